//! Principal control analysis.
//!
//! Trials are represented by their nearest-neighbour phase differences
//! `δ_i = φ_{i+1} − φ_i` (no modular wrapping), which removes the global
//! phase. The population covariance of all trials is diagonalized; the
//! eigenvectors whose projections correlate best with fitness are the
//! principal controls, and projecting an optimum onto them gives the
//! essential pulse.

mod jacobi;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::stats::{self, pearson};
use crate::{Error, Genome, Result, TAU};

/// Convergence threshold of the Jacobi sweeps, relative to `‖C‖_F`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

/// Nearest-neighbour phase differences of one pulse shape, radians.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaVector(pub Vec<f64>);

impl DeltaVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

/// `δ_i = 2π·(gene_{i+1} − gene_i)/L`.
pub fn deltas(genome: &Genome) -> Result<DeltaVector> {
    if genome.len() < 2 {
        return Err(Error::Dimension(alloc::format!(
            "need at least 2 genes for phase differences, got {}",
            genome.len()
        )));
    }
    let step = TAU / genome.levels() as f64;
    Ok(DeltaVector(
        genome
            .genes()
            .windows(2)
            .map(|w| (w[1] as f64 - w[0] as f64) * step)
            .collect(),
    ))
}

/// Symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    dim: usize,
    entries: Vec<f64>,
    sample_count: usize,
}

impl CovarianceMatrix {
    /// Wraps an explicit matrix. Rows must all have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<f64>], sample_count: usize) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("covariance matrix must be square".into()));
        }
        Ok(Self {
            dim,
            entries: rows.concat(),
            sample_count,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|x| x * x).sum())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Population covariance `C_ij = ⟨δ_i δ_j⟩ − ⟨δ_i⟩⟨δ_j⟩` over all trials.
pub fn covariance(trials: &[DeltaVector]) -> Result<CovarianceMatrix> {
    if trials.len() < 2 {
        return Err(Error::SampleSize(alloc::format!(
            "covariance needs at least 2 trials, got {}",
            trials.len()
        )));
    }
    let dim = trials[0].len();
    if trials.iter().any(|t| t.len() != dim) {
        return Err(Error::Dimension("trials have mixed delta-vector lengths".into()));
    }
    // moments about the first trial: the covariance is unchanged, identical
    // trials give exact zeros and large common offsets do not cancel badly
    let origin = trials[0].as_slice();
    let n = trials.len() as f64;
    let mut mean = vec![0.0; dim];
    let mut second = vec![0.0; dim * dim];
    let mut d = vec![0.0; dim];
    for t in trials {
        for ((x, a), o) in d.iter_mut().zip(t.as_slice()).zip(origin) {
            *x = a - o;
        }
        for i in 0..dim {
            mean[i] += d[i];
            for j in i..dim {
                second[i * dim + j] += d[i] * d[j];
            }
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut entries = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let c = second[i * dim + j] / n - mean[i] * mean[j];
            entries[i * dim + j] = c;
            entries[j * dim + i] = c;
        }
    }
    Ok(CovarianceMatrix {
        dim,
        entries,
        sample_count: trials.len(),
    })
}

/// Mean delta vector of a trial set.
pub fn mean_deltas(trials: &[DeltaVector]) -> Result<DeltaVector> {
    let first = trials
        .first()
        .ok_or_else(|| Error::SampleSize("no trials".into()))?;
    let dim = first.len();
    let mut mean = vec![0.0; dim];
    for t in trials {
        if t.len() != dim {
            return Err(Error::Dimension("trials have mixed delta-vector lengths".into()));
        }
        for (m, d) in mean.iter_mut().zip(t.as_slice()) {
            *m += d;
        }
    }
    mean.iter_mut().for_each(|m| *m /= trials.len() as f64);
    Ok(DeltaVector(mean))
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// `vectors[j]` is the eigenvector of `values[j]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Running `Σ_{i≤j} λ_i / Σ λ`.
    pub fn cumulative_fraction(&self) -> Vec<f64> {
        let total = self.trace();
        let mut acc = 0.0;
        self.values
            .iter()
            .map(|v| {
                acc += v;
                if total != 0.0 {
                    acc / total
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// `U·Λ·Uᵀ` row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        for (lambda, u) in self.values.iter().zip(&self.vectors) {
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += lambda * u[i] * u[j];
                }
            }
        }
        out
    }
}

/// Diagonalizes `C` by cyclic Jacobi rotations.
///
/// Eigenvalues come out descending; equal eigenvalues keep index order. Each
/// eigenvector is signed so its largest-magnitude component is positive
/// (first index wins among equal magnitudes).
pub fn eigendecompose(c: &CovarianceMatrix) -> Result<EigenSystem> {
    if !c.is_symmetric() {
        return Err(Error::Contract("eigendecompose requires a symmetric matrix".into()));
    }
    let n = c.dim();
    let (values, v) = jacobi::jacobi(c.entries(), n, JACOBI_TOLERANCE);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let vectors = order
        .iter()
        .map(|&j| {
            let mut u: Vec<f64> = (0..n).map(|i| v[i * n + j]).collect();
            let peak = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let lead = u
                .iter()
                .position(|x| x.abs() >= peak * (1.0 - 1e-12))
                .unwrap_or(0);
            if u[lead] < 0.0 {
                u.iter_mut().for_each(|x| *x = -*x);
            }
            u
        })
        .collect();
    Ok(EigenSystem {
        values: order.iter().map(|&j| values[j]).collect(),
        vectors,
    })
}

/// `η_j = u_jᵀ δ` for every axis.
pub fn project(delta: &DeltaVector, eig: &EigenSystem) -> Result<Vec<f64>> {
    if delta.len() != eig.dim() {
        return Err(Error::Dimension(alloc::format!(
            "delta vector has {} components, eigensystem has {}",
            delta.len(),
            eig.dim()
        )));
    }
    Ok(eig.vectors.iter().map(|u| dot(u, delta.as_slice())).collect())
}

/// `Σ_j η_j u_j` over the given axes.
pub fn combine(eig: &EigenSystem, axes: &[usize], coefficients: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; eig.dim()];
    for (&axis, &eta) in axes.iter().zip(coefficients) {
        for (o, u) in out.iter_mut().zip(&eig.vectors[axis]) {
            *o += eta * u;
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn correlate(rows: &[Vec<f64>], fitness: &[f64]) -> Result<Vec<Option<f64>>> {
    if rows.len() != fitness.len() {
        return Err(Error::Dimension(alloc::format!(
            "{} coordinate rows for {} fitness values",
            rows.len(),
            fitness.len()
        )));
    }
    if rows.len() < 3 {
        return Err(Error::SampleSize(alloc::format!(
            "correlation needs at least 3 trials, got {}",
            rows.len()
        )));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Dimension("coordinate rows have mixed lengths".into()));
    }
    if stats::is_constant(fitness) {
        return Err(Error::DegenerateFitness);
    }
    Ok((0..dim)
        .map(|j| pearson(&stats::column(rows, j), fitness))
        .collect())
}

/// Per-axis `(⟨η_i f⟩ − ⟨η_i⟩⟨f⟩)/(σ_η σ_f)`. Axes whose projections do not
/// vary are `None`.
pub fn fitness_correlation(projections: &[Vec<f64>], fitness: &[f64]) -> Result<Vec<Option<f64>>> {
    correlate(projections, fitness)
}

/// The same correlation in the original δ basis.
pub fn raw_basis_correlation(trials: &[DeltaVector], fitness: &[f64]) -> Result<Vec<Option<f64>>> {
    let rows: Vec<Vec<f64>> = trials.iter().map(|t| t.0.clone()).collect();
    correlate(&rows, fitness)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SelectionRule {
    pub k: usize,
    pub threshold: f64,
}

impl Default for SelectionRule {
    fn default() -> Self {
        Self { k: 3, threshold: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAxis {
    /// 0-based eigen-axis index (descending eigenvalue order).
    pub axis: usize,
    pub eigenvalue: f64,
    pub correlation: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalControls {
    /// Ordered by `|r|` descending.
    pub selected: Vec<PrincipalAxis>,
    pub rule: SelectionRule,
}

impl PrincipalControls {
    pub fn axes(&self) -> Vec<usize> {
        self.selected.iter().map(|a| a.axis).collect()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

/// Top `k` axes by `|r|`, keeping only `|r| ≥ threshold`. Undefined
/// correlations never qualify; ties go to the lower axis index.
pub fn select_principal(
    eig: &EigenSystem,
    correlations: &[Option<f64>],
    rule: SelectionRule,
) -> Result<PrincipalControls> {
    if correlations.len() != eig.dim() {
        return Err(Error::Dimension(alloc::format!(
            "{} correlations for {} axes",
            correlations.len(),
            eig.dim()
        )));
    }
    let mut candidates: Vec<(usize, f64)> = correlations
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .filter(|(_, r)| r.abs() >= rule.threshold)
        .collect();
    candidates.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    candidates.truncate(rule.k);
    if candidates.is_empty() {
        let best = correlations
            .iter()
            .flatten()
            .fold(0.0f64, |m, r| m.max(r.abs()));
        let undefined = correlations.iter().filter(|r| r.is_none()).count();
        return Err(Error::EmptySelection(alloc::format!(
            "k = {}, threshold = {}, largest |r| = {best:.4}, {undefined} undefined axes",
            rule.k,
            rule.threshold
        )));
    }
    Ok(PrincipalControls {
        selected: candidates
            .into_iter()
            .map(|(axis, r)| PrincipalAxis {
                axis,
                eigenvalue: eig.values[axis],
                correlation: r,
                vector: eig.vectors[axis].clone(),
            })
            .collect(),
        rule,
    })
}

/// The optimum projected onto the principal controls.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialPulse {
    pub anchor_genome: Genome,
    /// Point the projection is taken about; all zeros for the plain
    /// projection.
    pub origin: DeltaVector,
    /// `η_j` per selected axis, in selection order.
    pub projections: Vec<f64>,
    /// `origin + Σ η_j u_j`.
    pub reconstructed_deltas: DeltaVector,
    /// `Σ η_j² / ‖δ_opt − origin‖²`.
    pub retained_fraction: f64,
    /// Realization of the reconstructed deltas, anchored at the optimum's
    /// first phase.
    pub genome: Genome,
}

/// `η_j = u_jᵀ δ_opt` on the selected axes; the essential pulse keeps
/// `Σ η_j u_j` and drops every other direction.
pub fn essential_pulse(optimal: &Genome, controls: &PrincipalControls) -> Result<EssentialPulse> {
    let zero = DeltaVector(vec![0.0; optimal.len().saturating_sub(1)]);
    essential_pulse_about(optimal, controls, &zero)
}

/// Projection of `δ_opt − origin` instead, keeping the origin: with the
/// trial mean as origin, the dropped directions fall back to their
/// population average rather than to zero.
pub fn essential_pulse_about(
    optimal: &Genome,
    controls: &PrincipalControls,
    origin: &DeltaVector,
) -> Result<EssentialPulse> {
    if controls.is_empty() {
        return Err(Error::EmptySelection("no principal controls supplied".into()));
    }
    let delta = deltas(optimal)?;
    if origin.len() != delta.len() {
        return Err(Error::Dimension("origin does not match the genome".into()));
    }
    let offset: Vec<f64> = delta.0.iter().zip(&origin.0).map(|(d, o)| d - o).collect();
    let norm: f64 = offset.iter().map(|x| x * x).sum();
    if norm == 0.0 {
        return Err(Error::DegenerateOptimum);
    }
    if controls.selected.iter().any(|a| a.vector.len() != delta.len()) {
        return Err(Error::Dimension("control vectors do not match the genome".into()));
    }
    let projections: Vec<f64> = controls.selected.iter().map(|a| dot(&a.vector, &offset)).collect();
    let mut recon = origin.0.clone();
    for (a, eta) in controls.selected.iter().zip(&projections) {
        for (r, u) in recon.iter_mut().zip(&a.vector) {
            *r += eta * u;
        }
    }
    let retained = (projections.iter().map(|e| e * e).sum::<f64>() / norm).clamp(0.0, 1.0);
    let genome = reconstruct_genome(&recon, optimal.phase(0), optimal.levels());
    Ok(EssentialPulse {
        anchor_genome: optimal.clone(),
        origin: origin.clone(),
        projections,
        reconstructed_deltas: DeltaVector(recon),
        retained_fraction: retained,
        genome,
    })
}

/// Integrates deltas from `anchor_phase`, reduces mod 2π and rounds each
/// phase to the nearest of `levels` levels.
pub fn reconstruct_genome(deltas: &[f64], anchor_phase: f64, levels: u32) -> Genome {
    let step = TAU / levels as f64;
    let level = |phi: f64| -> u32 {
        let q = libm::round(crate::pulse::wrap_phase(phi) / step) as u64;
        (q % levels as u64) as u32
    };
    let mut phi = anchor_phase;
    let mut genes = Vec::with_capacity(deltas.len() + 1);
    genes.push(level(phi));
    for d in deltas {
        phi += d;
        genes.push(level(phi));
    }
    Genome::new(genes, levels).expect("levels are reduced into range")
}

/// One line per problem found when checking an eigensystem against `C`.
pub fn check_eigensystem(c: &CovarianceMatrix, eig: &EigenSystem) -> Vec<String> {
    let mut problems = Vec::new();
    let n = c.dim();
    let trace = c.trace();
    if (eig.trace() - trace).abs() > 1e-10 * trace.abs().max(f64::MIN_POSITIVE) {
        problems.push(alloc::format!("trace {} vs Σλ {}", trace, eig.trace()));
    }
    for j in 0..n {
        for k in 0..n {
            let d = dot(&eig.vectors[j], &eig.vectors[k]) - if j == k { 1.0 } else { 0.0 };
            if d.abs() >= 1e-10 {
                problems.push(alloc::format!("u{j}·u{k} off by {d:e}"));
            }
        }
    }
    let recon = eig.reconstruct();
    let err = libm::sqrt(
        recon
            .iter()
            .zip(c.entries())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>(),
    );
    if err >= 1e-10 * c.frobenius() && err > 0.0 {
        problems.push(alloc::format!("reconstruction error {err:e}"));
    }
    if eig.values.windows(2).any(|w| w[0] < w[1]) {
        problems.push("eigenvalues not descending".into());
    }
    problems
}
