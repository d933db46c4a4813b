//! Principal-control analysis of one or more runs.
//!
//! A single covariance matrix is built from every analysed trial of every
//! run. Correlations, principal controls and the essential pulse are then
//! computed per target, each target's trials against its own fitness.

use std::path::PathBuf;

use pcontrol_core::ga::ReducedBasis;
use pcontrol_core::ga::{Fitness, TrialRecord};
use pcontrol_core::pca::{
    self, covariance, deltas, eigendecompose, essential_pulse, essential_pulse_about, fitness_correlation, mean_deltas, project,
    raw_basis_correlation, reconstruct_genome, select_principal, CovarianceMatrix, DeltaVector, EigenSystem,
    EssentialPulse, PrincipalControls, SelectionRule,
};
use pcontrol_core::srs::RamanTarget;
use pcontrol_core::Genome;

use crate::config::Anchor;
use crate::error::{Error, Result};
use crate::runfile::RunSet;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub rule: SelectionRule,
    pub generations_from: u32,
    /// Project the optimum about the trial mean instead of the origin.
    pub centered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetAnalysis {
    pub target: RamanTarget,
    /// Analysed trials of this target.
    pub trials: usize,
    /// Correlation with each eigen-axis.
    pub r_eigen: Vec<Option<f64>>,
    /// Correlation with each raw phase difference.
    pub r_raw: Vec<Option<f64>>,
    pub controls: PrincipalControls,
    /// Best trial of the target over all of its runs.
    pub best: TrialRecord,
    pub best_run: usize,
    pub essential: EssentialPulse,
    /// Surrogate fitness of the essential pulse, scored like the best trial.
    pub essential_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub options: AnalysisOptions,
    pub sources: Vec<PathBuf>,
    pub covariance: CovarianceMatrix,
    pub eigen: EigenSystem,
    pub mean: DeltaVector,
    pub targets: Vec<TargetAnalysis>,
}

impl Analysis {
    pub fn target(&self, target: RamanTarget) -> Option<&TargetAnalysis> {
        self.targets.iter().find(|t| t.target == target)
    }

    pub fn trial_count(&self) -> usize {
        self.covariance.sample_count()
    }
}

/// Deltas of every trial at or after `generations_from`, with run index and
/// fitness.
fn analysed_trials(set: &RunSet, generations_from: u32) -> Result<Vec<(usize, DeltaVector, f64)>> {
    set.trials()
        .filter(|(_, t)| t.generation >= generations_from)
        .map(|(run, t)| Ok((run, deltas(&t.genome)?, t.fitness)))
        .collect()
}

pub fn analyze(set: &RunSet, options: AnalysisOptions) -> Result<Analysis> {
    let trials = analysed_trials(set, options.generations_from)?;
    let all: Vec<DeltaVector> = trials.iter().map(|(_, d, _)| d.clone()).collect();
    let c = covariance(&all)?;
    let eigen = eigendecompose(&c)?;
    let problems = pca::check_eigensystem(&c, &eigen);
    if !problems.is_empty() {
        return Err(pcontrol_core::Error::Contract(problems.join("; ")).into());
    }
    let mean = mean_deltas(&all)?;
    let projections: Vec<Vec<f64>> = all
        .iter()
        .map(|d| project(d, &eigen))
        .collect::<pcontrol_core::Result<_>>()?;

    let mut targets = Vec::new();
    for target in set.targets() {
        let of_target: Vec<usize> = trials
            .iter()
            .enumerate()
            .filter(|(_, (run, _, _))| set.runs[*run].header.target == target)
            .map(|(i, _)| i)
            .collect();
        let fitness: Vec<f64> = of_target.iter().map(|&i| trials[i].2).collect();
        let eta: Vec<Vec<f64>> = of_target.iter().map(|&i| projections[i].clone()).collect();
        let raw: Vec<DeltaVector> = of_target.iter().map(|&i| all[i].clone()).collect();
        let r_eigen = fitness_correlation(&eta, &fitness)?;
        let r_raw = raw_basis_correlation(&raw, &fitness)?;
        let controls = select_principal(&eigen, &r_eigen, options.rule)?;

        let (best_run, best) = best_of(set, target).expect("target has runs");
        let essential = if options.centered {
            essential_pulse_about(&best.genome, &controls, &mean)?
        } else {
            essential_pulse(&best.genome, &controls)?
        };
        let essential_fitness = set.runs[best_run].header.model().fitness(&essential.genome)?;
        targets.push(TargetAnalysis {
            target,
            trials: of_target.len(),
            r_eigen,
            r_raw,
            controls,
            best: best.clone(),
            best_run,
            essential,
            essential_fitness,
        });
    }

    Ok(Analysis {
        options,
        sources: set.runs.iter().map(|r| r.path.clone()).collect(),
        covariance: c,
        eigen,
        mean,
        targets,
    })
}

/// Best trial of a target across runs; earlier runs and trials win ties.
pub fn best_of(set: &RunSet, target: RamanTarget) -> Option<(usize, &TrialRecord)> {
    let mut best: Option<(usize, &TrialRecord)> = None;
    for (i, run) in set.runs.iter().enumerate() {
        if run.header.target != target {
            continue;
        }
        if let Some(t) = run.best() {
            if best.is_none_or(|(_, b)| t.fitness > b.fitness) {
                best = Some((i, t));
            }
        }
    }
    best
}

/// Anchor genome for a reduced-basis search on `target`.
pub fn anchor_genome(analysis: &Analysis, target: RamanTarget, anchor: Anchor) -> Result<Genome> {
    let t = analysis
        .target(target)
        .ok_or_else(|| Error::Config(format!("no {target} trials in the analysed runs")))?;
    Ok(match anchor {
        Anchor::Best => t.best.genome.clone(),
        Anchor::Essential => t.essential.genome.clone(),
        Anchor::Mean => reconstruct_genome(&analysis.mean.0, t.best.genome.phase(0), t.best.genome.levels()),
    })
}

/// Principal-control basis around the chosen anchor.
pub fn reduced_basis(
    analysis: &Analysis,
    target: RamanTarget,
    anchor: Anchor,
    range_scale: f64,
) -> Result<ReducedBasis> {
    let genome = anchor_genome(analysis, target, anchor)?;
    let t = analysis.target(target).expect("checked by anchor_genome");
    Ok(ReducedBasis::new(&genome, &t.controls, range_scale)?)
}
