//! CSV and text outputs. Reals are written with Rust's shortest round-trip
//! formatting, '.' as decimal separator and LF line endings; undefined values
//! are empty cells.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pcontrol_core::pulse::{IntensitySpectrum, WignerMap};
use serde::Serialize;

use crate::analysis::{Analysis, TargetAnalysis};
use crate::error::{io_error, Result};

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(io_error(path))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

pub fn write_eigenvalues(path: &Path, analysis: &Analysis) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["index", "lambda", "cumulative"])?;
    let cumulative = analysis.eigen.cumulative_fraction();
    for (i, (l, c)) in analysis.eigen.values.iter().zip(cumulative).enumerate() {
        w.write_record([i.to_string(), l.to_string(), c.to_string()])?;
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

/// One row per eigenvector, components ordered by phase-difference index.
pub fn write_eigenvectors(path: &Path, analysis: &Analysis) -> Result<()> {
    let mut w = writer(path)?;
    let dim = analysis.eigen.dim();
    let mut head = vec!["axis".to_string()];
    head.extend((0..dim).map(|i| format!("d{i}")));
    w.write_record(&head)?;
    for (j, u) in analysis.eigen.vectors.iter().enumerate() {
        let mut row = vec![j.to_string()];
        row.extend(u.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

/// `r_eigen` for eigen-axis `i` and `r_raw` for phase difference `i`, per
/// target.
pub fn write_correlations(path: &Path, analysis: &Analysis) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["target", "axis", "r_eigen", "r_raw"])?;
    for t in &analysis.targets {
        for (i, (re, rr)) in t.r_eigen.iter().zip(&t.r_raw).enumerate() {
            w.write_record([t.target.tag().to_string(), i.to_string(), cell(*re), cell(*rr)])?;
        }
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

pub fn write_essential(path: &Path, targets: &[&TargetAnalysis]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["target", "axis", "eta", "lambda", "r"])?;
    for t in targets {
        for (a, eta) in t.controls.selected.iter().zip(&t.essential.projections) {
            w.write_record([
                t.target.tag().to_string(),
                a.axis.to_string(),
                eta.to_string(),
                a.eigenvalue.to_string(),
                a.correlation.to_string(),
            ])?;
        }
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

/// Optimum and essential genomes side by side.
pub fn write_essential_genomes(path: &Path, targets: &[&TargetAnalysis]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "target",
        "pulse",
        "trial_id",
        "fitness",
        "retained_fraction",
        "genes",
    ])?;
    let genes = |g: &[u32]| g.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    for t in targets {
        w.write_record([
            t.target.tag().to_string(),
            "optimum".into(),
            t.best.trial_id.to_string(),
            t.best.fitness.to_string(),
            "1".into(),
            genes(t.best.genome.genes()),
        ])?;
        w.write_record([
            t.target.tag().to_string(),
            "essential".into(),
            String::new(),
            t.essential_fitness.to_string(),
            t.essential.retained_fraction.to_string(),
            genes(t.essential.genome.genes()),
        ])?;
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

pub fn summary(analysis: &Analysis) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let e = &analysis.eigen;
    let cum = e.cumulative_fraction();
    let _ = writeln!(s, "trials          {}", analysis.trial_count());
    let _ = writeln!(s, "runs            {}", analysis.sources.len());
    let _ = writeln!(s, "axes            {}", e.dim());
    let _ = writeln!(s, "trace           {}", e.trace());
    let _ = writeln!(s, "generations     >= {}", analysis.options.generations_from);
    let _ = writeln!(
        s,
        "selection       k = {}, |r| >= {}",
        analysis.options.rule.k, analysis.options.rule.threshold
    );
    for (i, c) in cum.iter().enumerate().take(5) {
        let _ = writeln!(s, "lambda[{i}]       {:.6} (cumulative {:.4})", e.values[i], c);
    }
    for t in &analysis.targets {
        let _ = writeln!(s);
        let _ = writeln!(s, "[{}]", t.target);
        let _ = writeln!(s, "trials          {}", t.trials);
        let _ = writeln!(s, "best_fitness    {} (trial {})", t.best.fitness, t.best.trial_id);
        let axes: Vec<String> = t
            .controls
            .selected
            .iter()
            .map(|a| format!("{} (r = {:.4})", a.axis, a.correlation))
            .collect();
        let _ = writeln!(s, "principal_axes  {}", axes.join(", "));
        let _ = writeln!(s, "retained        {:.6}", t.essential.retained_fraction);
        let _ = writeln!(s, "essential       {}", t.essential_fitness);
        let _ = writeln!(s, "essential/best  {:.4}", t.essential_fitness / t.best.fitness);
    }
    s
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    inputs: Vec<String>,
    k: usize,
    threshold: f64,
    generations_from: u32,
    files: &'a [&'a str],
}

/// Writes the full report into `dir` and returns the written paths.
pub fn write_report(dir: &Path, analysis: &Analysis) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let targets: Vec<&TargetAnalysis> = analysis.targets.iter().collect();
    let files = [
        "eigenvalues.csv",
        "eigenvectors.csv",
        "correlations.csv",
        "essential.csv",
        "essential_genomes.csv",
        "summary.txt",
    ];
    let paths: Vec<PathBuf> = files.iter().map(|f| dir.join(f)).collect();
    write_eigenvalues(&paths[0], analysis)?;
    write_eigenvectors(&paths[1], analysis)?;
    write_correlations(&paths[2], analysis)?;
    write_essential(&paths[3], &targets)?;
    write_essential_genomes(&paths[4], &targets)?;
    fs::write(&paths[5], summary(analysis)).map_err(io_error(&paths[5]))?;
    write_meta(dir, analysis, &files)?;
    Ok(paths)
}

/// Provenance sidecar; kept apart so the data files depend only on inputs
/// and flags.
pub fn write_meta(dir: &Path, analysis: &Analysis, files: &[&str]) -> Result<()> {
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        inputs: analysis.sources.iter().map(|p| p.display().to_string()).collect(),
        k: analysis.options.rule.k,
        threshold: analysis.options.rule.threshold,
        generations_from: analysis.options.generations_from,
        files,
    };
    let path = dir.join("analysis.meta.json");
    let text = serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n";
    fs::write(&path, text).map_err(io_error(&path))
}

/// `freq,re,im,magnitude,phase` for every frequency (or `Ω ≥ 0` only).
pub fn write_intensity_spectrum<W: Write>(out: W, spectrum: &IntensitySpectrum, positive_only: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["freq", "re", "im", "magnitude", "phase"])?;
    let start = if positive_only { spectrum.zero_index() } else { 0 };
    for (f, v) in spectrum.freq.iter().zip(&spectrum.values).skip(start) {
        w.write_record([
            f.to_string(),
            v.re.to_string(),
            v.im.to_string(),
            v.norm().to_string(),
            v.arg().to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Matrix layout: the header row holds the times (fs) after a corner cell,
/// then one row per frequency (THz) with its values. Only columns with
/// `|t| ≤ max_time` are written.
pub fn write_wigner<W: Write>(out: W, map: &WignerMap, max_time: f64) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let cols: Vec<usize> = (0..map.time.len()).filter(|&k| map.time[k].abs() <= max_time).collect();
    let mut head = vec!["omega\\t".to_string()];
    head.extend(cols.iter().map(|&k| map.time[k].to_string()));
    w.write_record(&head)?;
    for (r, omega) in map.omega.iter().enumerate() {
        let row = map.row(r);
        let mut rec = vec![omega.to_string()];
        rec.extend(cols.iter().map(|&k| row[k].to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
