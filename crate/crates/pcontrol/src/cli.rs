//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pcontrol_core::ga::reduced_search;
use pcontrol_core::ga::{run_search, GaConfig};
use pcontrol_core::pulse::{
    genome_to_spectral_field, intensity, intensity_spectrum, synthesize_temporal, wigner, SpectralGrid,
};
use pcontrol_core::srs::RamanTarget;
use pcontrol_core::Genome;

use crate::analysis::{analyze, anchor_genome, best_of, AnalysisOptions, TargetAnalysis};
use crate::config::{Anchor, Config};
use crate::error::{io_error, Error, Result};
use crate::parallel::Parallel;
use crate::report;
use crate::runfile::{load_run, load_runs, BasisInfo, LoadOptions, RunHeader, RunKind, RunSet, RunWriter};

#[derive(Debug, Parser)]
#[command(name = "pcontrol", version, about = "Pulse-shape search and principal-control analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Genetic search on one target; writes a run file.
    Run(RunArgs),
    /// Covariance analysis of one or more run files.
    Analyze(AnalyzeArgs),
    /// Essential pulse of each target's optimum.
    Essential(AnalyzeArgs),
    /// Wigner map of a pulse as CSV.
    Wigner(WignerArgs),
    /// Fourier transform of a pulse's temporal intensity as CSV.
    Ftintensity(FtArgs),
    /// Genetic search over the principal-control coordinates.
    ReducedRun(ReducedArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML settings file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the effective settings as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Population size.
    #[arg(long)]
    pub pop: Option<usize>,
    /// Maximum number of generations, counting the initial one.
    #[arg(long)]
    pub generations: Option<usize>,
    /// Generations without improvement before stopping.
    #[arg(long)]
    pub stall: Option<usize>,
    /// Per-gene mutation probability.
    #[arg(long)]
    pub mutation: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "sym")]
    pub target: RamanTarget,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Spectral bins (genes per genome).
    #[arg(long)]
    pub genes: Option<usize>,
    /// Phase levels per gene (power of two).
    #[arg(long)]
    pub levels: Option<u32>,
    /// Run file to write [default: <out-dir>/<target>.runs]
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    /// Number of principal controls to keep.
    #[arg(long)]
    pub k: Option<usize>,
    /// Smallest |r| a principal control may have.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Leave out trials from earlier generations.
    #[arg(long)]
    pub generations_from: Option<u32>,
    /// Project the optimum about the mean phase differences of the trials.
    #[arg(long)]
    pub centered: bool,
    /// Skip a malformed final line in the run files.
    #[arg(long)]
    pub tolerate_truncation: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Run files to merge.
    #[arg(required_unless_present = "dump_config")]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Only report this target.
    #[arg(long)]
    pub target: Option<RamanTarget>,
    #[arg(long, default_value = "analysis")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct GenomeArgs {
    /// Run file to take the genome from.
    #[arg(required_unless_present_any = ["genome", "dump_config"])]
    pub input: Option<PathBuf>,
    /// `best` or a trial id.
    #[arg(long, default_value = "best")]
    pub genome_from: String,
    /// Explicit genes, comma separated.
    #[arg(long, conflicts_with = "input", value_delimiter = ',')]
    pub genome: Option<Vec<u32>>,
    /// Levels for `--genome`.
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long)]
    pub time_samples: Option<usize>,
    /// CSV destination [default: stdout]
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub tolerate_truncation: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub genome: GenomeArgs,
    /// Largest |t| written, fs [default: a quarter of the time window]
    #[arg(long, conflicts_with = "full")]
    pub max_time: Option<f64>,
    /// Write the whole time window, including the periodic images.
    #[arg(long)]
    pub full: bool,
    /// Only the rows on the spectral grid itself.
    #[arg(long)]
    pub base_grid: bool,
}

#[derive(Debug, Args)]
pub struct FtArgs {
    #[command(flatten)]
    pub genome: GenomeArgs,
    /// Only non-negative frequencies.
    #[arg(long)]
    pub positive: bool,
}

#[derive(Debug, Args)]
pub struct ReducedArgs {
    /// Run files the principal controls are taken from.
    #[arg(required_unless_present = "dump_config")]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "sym")]
    pub target: RamanTarget,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Genome the coordinates are measured from: best, essential or mean.
    #[arg(long)]
    pub anchor: Option<Anchor>,
    /// Coordinate j ranges over ±c·√λ_j.
    #[arg(long)]
    pub range_scale: Option<f64>,
    /// Run file to write [default: <out-dir>/<target>-reduced.runs]
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Analyze(a) => cmd_analyze(a, false),
        Command::Essential(a) => cmd_analyze(a, true),
        Command::Wigner(a) => cmd_wigner(a),
        Command::Ftintensity(a) => cmd_ftintensity(a),
        Command::ReducedRun(a) => cmd_reduced(a),
    }
}

fn dump(config: &Config) -> Result<()> {
    print!("{}", config.to_toml());
    Ok(())
}

fn apply_search(ga: &mut GaConfig, s: &SearchArgs) {
    if let Some(v) = s.seed {
        ga.rng_seed = v;
    }
    if let Some(v) = s.pop {
        ga.population_size = v;
    }
    if let Some(v) = s.generations {
        ga.max_generations = v;
    }
    if let Some(v) = s.stall {
        ga.stall_generations = v;
    }
    if let Some(v) = s.mutation {
        ga.mutation_prob = v;
    }
}

fn apply_selection(config: &mut Config, s: &SelectionArgs) {
    if let Some(k) = s.k {
        config.analysis.k = k;
    }
    if let Some(t) = s.threshold {
        config.analysis.threshold = t;
    }
    if let Some(g) = s.generations_from {
        config.analysis.generations_from = g;
    }
    if s.centered {
        config.analysis.centered = true;
    }
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut config = Config::load_or_default(a.config.config.as_deref())?;
    apply_search(&mut config.ga, &a.search);
    if let Some(n) = a.genes {
        config.ga.genes = n;
        config.grid.n_bins = n;
    }
    if let Some(l) = a.levels {
        config.ga.levels = l;
    }
    if a.config.dump_config {
        return dump(&config);
    }
    config.validate()?;

    let mut header = RunHeader::new(RunKind::Full, a.target, config.ga, config.grid, config.model);
    header.time_samples = config.time_samples;
    let path = a.out.unwrap_or_else(|| a.out_dir.join(format!("{}.runs", a.target)));
    let model = header.model();
    let mut writer = RunWriter::create(&path, header)?;
    let summary = run_search(&config.ga, &Parallel(model), &mut writer)?;
    println!(
        "{}: {} trials, {} evaluations, {} generations, best {} (trial {}, generation {})",
        path.display(),
        summary.trials,
        summary.evaluations,
        summary.generations,
        summary.best.fitness,
        summary.best.trial_id,
        summary.best.generation
    );
    Ok(())
}

fn load_and_analyze(inputs: &[PathBuf], config: &Config, tolerate: bool) -> Result<(RunSet, crate::analysis::Analysis)> {
    let set = load_runs(inputs, LoadOptions { tolerate_truncation: tolerate })?;
    for run in &set.runs {
        if let Some(line) = run.dropped_line {
            eprintln!("warning: {}: dropped malformed final line {line}", run.path.display());
        }
    }
    let analysis = analyze(
        &set,
        AnalysisOptions {
            rule: config.analysis.rule(),
            generations_from: config.analysis.generations_from,
            centered: config.analysis.centered,
        },
    )?;
    Ok((set, analysis))
}

fn cmd_analyze(a: AnalyzeArgs, essential_only: bool) -> Result<()> {
    let mut config = Config::load_or_default(a.config.config.as_deref())?;
    apply_selection(&mut config, &a.selection);
    if a.config.dump_config {
        return dump(&config);
    }
    let (_, mut analysis) = load_and_analyze(&a.inputs, &config, a.selection.tolerate_truncation)?;
    if let Some(t) = a.target {
        analysis.targets.retain(|x| x.target == t);
        if analysis.targets.is_empty() {
            return Err(Error::Config(format!("no {t} runs among the inputs")));
        }
    }
    if essential_only {
        std::fs::create_dir_all(&a.out_dir).map_err(io_error(&a.out_dir))?;
        let targets: Vec<&TargetAnalysis> = analysis.targets.iter().collect();
        report::write_essential(&a.out_dir.join("essential.csv"), &targets)?;
        report::write_essential_genomes(&a.out_dir.join("essential_genomes.csv"), &targets)?;
        for t in &targets {
            println!(
                "{}: retained {:.4}, essential fitness {} vs optimum {} ({:.3})",
                t.target,
                t.essential.retained_fraction,
                t.essential_fitness,
                t.best.fitness,
                t.essential_fitness / t.best.fitness
            );
        }
    } else {
        report::write_report(&a.out_dir, &analysis)?;
        print!("{}", report::summary(&analysis));
    }
    Ok(())
}

/// Genome, grid and time resolution for the diagnostics commands.
fn select_genome(a: &GenomeArgs) -> Result<(Genome, SpectralGrid, usize)> {
    let config = Config::load_or_default(a.config.config.as_deref())?;
    if let Some(genes) = &a.genome {
        let levels = a.levels.unwrap_or(config.ga.levels);
        let genome = Genome::new(genes.clone(), levels)?;
        let grid = SpectralGrid {
            n_bins: genome.len(),
            ..config.grid
        };
        return Ok((genome, grid, a.time_samples.unwrap_or(config.time_samples)));
    }
    let path = a.input.as_ref().expect("clap requires an input or --genome");
    let run = load_run(path, LoadOptions { tolerate_truncation: a.tolerate_truncation })?;
    let trial = match a.genome_from.as_str() {
        "best" => run.best(),
        id => {
            let id: u64 = id
                .parse()
                .map_err(|_| Error::Config(format!("--genome-from expects `best` or a trial id, got {id:?}")))?;
            run.trial(id)
        }
    }
    .ok_or_else(|| Error::Config(format!("{}: no such trial {:?}", path.display(), a.genome_from)))?;
    Ok((
        trial.genome.clone(),
        run.header.grid,
        a.time_samples.unwrap_or(run.header.time_samples),
    ))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_error(p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_wigner(a: WignerArgs) -> Result<()> {
    if a.genome.config.dump_config {
        return dump(&Config::load_or_default(a.genome.config.config.as_deref())?);
    }
    let (genome, grid, n_t) = select_genome(&a.genome)?;
    let field = genome_to_spectral_field(&genome, &grid)?;
    let mut map = wigner(&field, n_t)?;
    if a.base_grid {
        map = map.on_base_grid();
    }
    let window = 1000.0 / grid.bin_width;
    let max_time = if a.full {
        f64::INFINITY
    } else {
        a.max_time.unwrap_or(window / 4.0)
    };
    report::write_wigner(output(a.genome.output.as_deref())?, &map, max_time)
}

fn cmd_ftintensity(a: FtArgs) -> Result<()> {
    if a.genome.config.dump_config {
        return dump(&Config::load_or_default(a.genome.config.config.as_deref())?);
    }
    let (genome, grid, n_t) = select_genome(&a.genome)?;
    let field = genome_to_spectral_field(&genome, &grid)?;
    let e = synthesize_temporal(&field, n_t)?;
    let spectrum = intensity_spectrum(&intensity(&e), e.dt)?;
    report::write_intensity_spectrum(output(a.genome.output.as_deref())?, &spectrum, a.positive)
}

fn cmd_reduced(a: ReducedArgs) -> Result<()> {
    let mut config = Config::load_or_default(a.config.config.as_deref())?;
    apply_selection(&mut config, &a.selection);
    if let Some(anchor) = a.anchor {
        config.reduced.anchor = anchor;
    }
    if let Some(c) = a.range_scale {
        config.reduced.range_scale = c;
    }
    let mut search = config.reduced.search_config(config.ga.rng_seed);
    apply_search(&mut search.ga, &a.search);
    config.reduced.population_size = search.ga.population_size;
    config.reduced.max_generations = search.ga.max_generations;
    config.reduced.stall_generations = search.ga.stall_generations;
    config.reduced.mutation_prob = search.ga.mutation_prob;
    config.ga.rng_seed = search.ga.rng_seed;
    if a.config.dump_config {
        return dump(&config);
    }

    let (set, analysis) = load_and_analyze(&a.inputs, &config, a.selection.tolerate_truncation)?;
    let anchor = anchor_genome(&analysis, a.target, config.reduced.anchor)?;
    let basis = crate::analysis::reduced_basis(&analysis, a.target, config.reduced.anchor, search.range_scale)?;
    let target = analysis.target(a.target).expect("anchor_genome checked the target");
    let (source_run, _) = best_of(&set, a.target).expect("target has runs");
    let source = &set.runs[source_run].header;

    let ga = GaConfig {
        genes: basis.dim(),
        levels: anchor.levels(),
        ..search.ga
    };
    let mut header = RunHeader::new(RunKind::Reduced, a.target, ga, source.grid, source.model);
    header.time_samples = source.time_samples;
    header.basis = Some(BasisInfo {
        anchor: anchor.genes().to_vec(),
        anchor_kind: config.reduced.anchor.tag().into(),
        axes: target.controls.axes(),
        eigenvalues: target.controls.selected.iter().map(|x| x.eigenvalue).collect(),
        range_scale: search.range_scale,
        creep: search.creep,
        sources: a.inputs.iter().map(|p| p.display().to_string()).collect(),
    });
    let path = a.out.unwrap_or_else(|| a.out_dir.join(format!("{}-reduced.runs", a.target)));
    let model = header.model();
    let mut writer = RunWriter::create(&path, header)?;
    let summary = reduced_search(&basis, &search, &Parallel(model), &mut writer)?;
    let full_evaluations: usize = set
        .runs
        .iter()
        .filter(|r| r.header.target == a.target && r.header.kind == RunKind::Full)
        .map(|r| r.evaluations())
        .sum();
    println!(
        "{}: k = {}, anchor {}, {} evaluations, best {} (trial {}); full-basis best {} from {} evaluations",
        path.display(),
        basis.dim(),
        config.reduced.anchor,
        summary.evaluations,
        summary.best.fitness,
        summary.best.trial_id,
        target.best.fitness,
        full_evaluations
    );
    Ok(())
}
