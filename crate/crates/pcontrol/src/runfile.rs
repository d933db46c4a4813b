//! Line-delimited JSON run files.
//!
//! The first line is a [`RunHeader`]; every following line is one trial.
//! Records are flushed as they are written, so an interrupted run leaves a
//! readable prefix.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pcontrol_core::ga::{GaConfig, TrialRecord, TrialSink};
use pcontrol_core::pulse::SpectralGrid;
use pcontrol_core::srs::{RamanTarget, SrsModel, SrsModelParams};
use pcontrol_core::Genome;
use serde::{Deserialize, Serialize};

use crate::error::{io_error, Error, Result};

pub const FORMAT: &str = "pcontrol-run";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    Full,
    Reduced,
}

/// Where a reduced-basis run's coordinates come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisInfo {
    pub anchor: Vec<u32>,
    pub anchor_kind: String,
    pub axes: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub range_scale: f64,
    pub creep: f64,
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunHeader {
    pub format: String,
    pub version: u32,
    pub kind: RunKind,
    pub target: RamanTarget,
    pub seed: u64,
    pub genes: usize,
    pub levels: u32,
    pub time_samples: usize,
    pub ga: GaConfig,
    pub grid: SpectralGrid,
    pub model: SrsModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisInfo>,
}

impl RunHeader {
    pub fn new(kind: RunKind, target: RamanTarget, ga: GaConfig, grid: SpectralGrid, model: SrsModelParams) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
            kind,
            target,
            seed: ga.rng_seed,
            genes: grid.n_bins,
            levels: ga.levels,
            time_samples: pcontrol_core::pulse::DEFAULT_TIME_SAMPLES,
            ga,
            grid,
            model,
            basis: None,
        }
    }

    /// Fitness functional the run was scored with.
    pub fn model(&self) -> SrsModel {
        SrsModel {
            time_samples: self.time_samples,
            ..SrsModel::new(self.grid, self.model, self.target)
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.format != FORMAT {
            return Err(format!("not a run file (format {:?})", self.format));
        }
        if self.version != VERSION {
            return Err(format!("unsupported run file version {}", self.version));
        }
        if self.genes != self.grid.n_bins {
            return Err(format!("{} genes but {} grid bins", self.genes, self.grid.n_bins));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    trial_id: u64,
    generation: u32,
    genes: Vec<u32>,
    fitness: f64,
    parent_ids: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    coefficients: Vec<f64>,
}

/// Ordering and shape rules shared by the writer and the reader.
#[derive(Debug, Default)]
struct Validator {
    seen: HashSet<u64>,
    last: Option<u64>,
}

impl Validator {
    fn check(&mut self, header: &RunHeader, r: &TrialRecord) -> std::result::Result<(), String> {
        if r.genome.len() != header.genes {
            return Err(format!(
                "trial {} has {} genes, header says {}",
                r.trial_id,
                r.genome.len(),
                header.genes
            ));
        }
        if r.genome.levels() != header.levels {
            return Err(format!("trial {} uses {} levels, header says {}", r.trial_id, r.genome.levels(), header.levels));
        }
        if self.last.is_some_and(|last| r.trial_id <= last) {
            return Err(format!("trial id {} is not increasing", r.trial_id));
        }
        if !r.fitness.is_finite() {
            return Err(format!("trial {} has non-finite fitness", r.trial_id));
        }
        if let Some(p) = r.parent_ids.iter().find(|p| !self.seen.contains(p)) {
            return Err(format!("trial {} names parent {p}, which is not an earlier record", r.trial_id));
        }
        self.seen.insert(r.trial_id);
        self.last = Some(r.trial_id);
        Ok(())
    }
}

/// Appends records to a run file, one flushed line each.
pub struct RunWriter {
    path: PathBuf,
    header: RunHeader,
    out: BufWriter<File>,
    validator: Validator,
}

impl RunWriter {
    pub fn create(path: impl AsRef<Path>, header: RunHeader) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        header.check().map_err(|message| Error::Schema {
            path: path.clone(),
            message,
        })?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_error(dir))?;
        }
        let file = File::create(&path).map_err(io_error(&path))?;
        let mut w = Self {
            path,
            header,
            out: BufWriter::new(file),
            validator: Validator::default(),
        };
        let line = serde_json::to_string(&w.header).expect("header serializes");
        w.write_line(&line)?;
        Ok(w)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn header(&self) -> &RunHeader {
        &self.header
    }

    pub fn append_trial(&mut self, record: &TrialRecord) -> Result<()> {
        self.validator
            .check(&self.header, record)
            .map_err(|message| Error::Schema {
                path: self.path.clone(),
                message,
            })?;
        let line = serde_json::to_string(&Line {
            trial_id: record.trial_id,
            generation: record.generation,
            genes: record.genome.genes().to_vec(),
            fitness: record.fitness,
            parent_ids: record.parent_ids.clone(),
            coefficients: record.coefficients.clone(),
        })
        .expect("record serializes");
        self.write_line(&line)
    }

    fn write_line(&mut self, line: &str) -> Result<()> {
        let path = &self.path;
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .and_then(|_| self.out.flush())
            .map_err(io_error(path))
    }
}

impl TrialSink for RunWriter {
    fn append(&mut self, record: &TrialRecord) -> pcontrol_core::Result<()> {
        self.append_trial(record)
            .map_err(|e| pcontrol_core::Error::Store(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub path: PathBuf,
    pub header: RunHeader,
    pub trials: Vec<TrialRecord>,
    /// A malformed final line that was skipped under `tolerate_truncation`.
    pub dropped_line: Option<usize>,
}

impl Run {
    /// Highest fitness; the earliest trial wins ties.
    pub fn best(&self) -> Option<&TrialRecord> {
        self.trials
            .iter()
            .fold(None, |best: Option<&TrialRecord>, t| match best {
                Some(b) if b.fitness >= t.fitness => Some(b),
                _ => Some(t),
            })
    }

    pub fn trial(&self, id: u64) -> Option<&TrialRecord> {
        self.trials
            .binary_search_by_key(&id, |t| t.trial_id)
            .ok()
            .map(|i| &self.trials[i])
    }

    /// Fitness-function calls made by the run. The first `elite_count`
    /// members of every later generation are carried over, not re-evaluated.
    pub fn evaluations(&self) -> usize {
        let mut total = 0;
        let mut sizes: Vec<usize> = Vec::new();
        for t in &self.trials {
            let g = t.generation as usize;
            if sizes.len() <= g {
                sizes.resize(g + 1, 0);
            }
            sizes[g] += 1;
        }
        for (g, &count) in sizes.iter().enumerate() {
            total += if g == 0 {
                count
            } else {
                count - self.header.ga.elite_count.min(sizes[g - 1]).min(count)
            };
        }
        total
    }

    /// Best-so-far fitness after each generation.
    pub fn best_per_generation(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        let mut best = f64::NEG_INFINITY;
        let mut current = None;
        for t in &self.trials {
            if current != Some(t.generation) {
                if current.is_some() {
                    out.push(best);
                }
                current = Some(t.generation);
            }
            best = best.max(t.fitness);
        }
        if current.is_some() {
            out.push(best);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip a malformed final line instead of failing.
    pub tolerate_truncation: bool,
}

pub fn load_run(path: impl AsRef<Path>, options: LoadOptions) -> Result<Run> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    parse_run(path, &text, options)
}

fn parse_run(path: &Path, text: &str, options: LoadOptions) -> Result<Run> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines: Vec<&str> = text.split('\n').collect();
    // a complete file ends with a newline, leaving one empty segment
    let unterminated = !lines.last().is_some_and(|l| l.is_empty());
    if !unterminated {
        lines.pop();
    }
    let Some(first) = lines.first() else {
        return Err(parse_err(1, "empty file, expected a header line".into()));
    };
    let header: RunHeader = serde_json::from_str(first).map_err(|e| parse_err(1, format!("bad header: {e}")))?;
    header.check().map_err(|m| parse_err(1, m))?;

    let mut validator = Validator::default();
    let mut trials = Vec::with_capacity(lines.len().saturating_sub(1));
    let mut dropped_line = None;
    let last = lines.len();
    for (i, raw) in lines.iter().enumerate().skip(1) {
        let number = i + 1;
        let parsed = serde_json::from_str::<Line>(raw)
            .map_err(|e| e.to_string())
            .and_then(|l| {
                let genome = Genome::new(l.genes, header.levels).map_err(|e| e.to_string())?;
                Ok(TrialRecord {
                    trial_id: l.trial_id,
                    generation: l.generation,
                    genome,
                    fitness: l.fitness,
                    parent_ids: l.parent_ids,
                    coefficients: l.coefficients,
                })
            });
        let record = match parsed {
            Ok(r) => r,
            Err(_) if number == last && unterminated && options.tolerate_truncation => {
                dropped_line = Some(number);
                break;
            }
            Err(message) => return Err(parse_err(number, message)),
        };
        validator
            .check(&header, &record)
            .map_err(|m| parse_err(number, m))?;
        trials.push(record);
    }
    Ok(Run {
        path: path.to_path_buf(),
        header,
        trials,
        dropped_line,
    })
}

/// Several runs over the same control space, kept in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSet {
    pub runs: Vec<Run>,
}

impl RunSet {
    pub fn new(runs: Vec<Run>) -> Result<Self> {
        let Some(first) = runs.first() else {
            return Err(Error::Incompatible("no run files given".into()));
        };
        for r in &runs[1..] {
            if r.header.genes != first.header.genes || r.header.levels != first.header.levels {
                return Err(Error::Incompatible(format!(
                    "{} has n = {}, L = {} but {} has n = {}, L = {}",
                    r.path.display(),
                    r.header.genes,
                    r.header.levels,
                    first.path.display(),
                    first.header.genes,
                    first.header.levels
                )));
            }
        }
        Ok(Self { runs })
    }

    pub fn genes(&self) -> usize {
        self.runs[0].header.genes
    }

    pub fn levels(&self) -> u32 {
        self.runs[0].header.levels
    }

    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.trials.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every trial tagged with the index of its run.
    pub fn trials(&self) -> impl Iterator<Item = (usize, &TrialRecord)> {
        self.runs
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.trials.iter().map(move |t| (i, t)))
    }

    /// Targets in order of first appearance.
    pub fn targets(&self) -> Vec<RamanTarget> {
        let mut out = Vec::new();
        for r in &self.runs {
            if !out.contains(&r.header.target) {
                out.push(r.header.target);
            }
        }
        out
    }
}

pub fn load_runs<P: AsRef<Path>>(paths: &[P], options: LoadOptions) -> Result<RunSet> {
    let runs = paths
        .iter()
        .map(|p| load_run(p, options))
        .collect::<Result<Vec<_>>>()?;
    RunSet::new(runs)
}
