//! Search over a handful of principal coordinates around an anchor genome.
//!
//! A candidate is a coefficient vector `η` with `η_j ∈ [−c√λ_j, +c√λ_j]`,
//! decoded to `δ = δ_anchor + Σ η_j u_j` and realized by
//! [`reconstruct_genome`](crate::pca::reconstruct_genome) from the anchor's
//! first phase. Mutation is a uniform creep of `±creep` times the
//! coordinate's full range, clamped to the range.

use alloc::vec::Vec;

use rand::Rng;

use super::engine::{self, Representation};
use super::{Evaluator, GaConfig, RunSummary, TrialSink};
use crate::pca::{deltas, reconstruct_genome, PrincipalControls};
use crate::{Error, Genome, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ReducedConfig {
    /// Operator settings; `genes` and `levels` are taken from the basis.
    pub ga: GaConfig,
    /// `c` in `±c√λ_j`.
    pub range_scale: f64,
    /// Creep step as a fraction of each coordinate's full range.
    pub creep: f64,
}

impl Default for ReducedConfig {
    fn default() -> Self {
        Self {
            ga: GaConfig {
                population_size: 20,
                max_generations: 20,
                stall_generations: 10,
                mutation_prob: 0.3,
                ..GaConfig::default()
            },
            range_scale: 2.0,
            creep: 0.1,
        }
    }
}

/// Principal axes, their coordinate ranges and the anchor they are measured
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedBasis {
    anchor: Genome,
    anchor_deltas: Vec<f64>,
    axes: Vec<Vec<f64>>,
    half_ranges: Vec<f64>,
}

impl ReducedBasis {
    pub fn new(anchor: &Genome, controls: &PrincipalControls, range_scale: f64) -> Result<Self> {
        if controls.is_empty() {
            return Err(Error::Config("reduced search needs at least one principal control".into()));
        }
        if !(range_scale >= 0.0 && range_scale.is_finite()) {
            return Err(Error::Config("range scale must be finite and non-negative".into()));
        }
        if let Some(a) = controls.selected.iter().find(|a| a.eigenvalue.is_nan() || a.eigenvalue <= 0.0) {
            return Err(Error::Config(alloc::format!(
                "axis {} has non-positive eigenvalue {}",
                a.axis,
                a.eigenvalue
            )));
        }
        let anchor_deltas = deltas(anchor)?.0;
        if controls.selected.iter().any(|a| a.vector.len() != anchor_deltas.len()) {
            return Err(Error::Dimension("control vectors do not match the anchor genome".into()));
        }
        Ok(Self {
            anchor: anchor.clone(),
            anchor_deltas,
            axes: controls.selected.iter().map(|a| a.vector.clone()).collect(),
            half_ranges: controls
                .selected
                .iter()
                .map(|a| range_scale * libm::sqrt(a.eigenvalue))
                .collect(),
        })
    }

    pub fn anchor(&self) -> &Genome {
        &self.anchor
    }

    /// Number of coordinates k.
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn half_ranges(&self) -> &[f64] {
        &self.half_ranges
    }

    pub fn decode(&self, coefficients: &[f64]) -> Genome {
        let mut d = self.anchor_deltas.clone();
        for (u, eta) in self.axes.iter().zip(coefficients) {
            for (x, ui) in d.iter_mut().zip(u) {
                *x += eta * ui;
            }
        }
        reconstruct_genome(&d, self.anchor.phase(0), self.anchor.levels())
    }
}

struct Coefficients<'a> {
    half_ranges: &'a [f64],
    creep: f64,
}

impl Representation for Coefficients<'_> {
    type Gene = f64;

    fn len(&self) -> usize {
        self.half_ranges.len()
    }

    fn random_gene<R: Rng>(&self, index: usize, rng: &mut R) -> f64 {
        let h = self.half_ranges[index];
        if h > 0.0 {
            rng.random_range(-h..=h)
        } else {
            0.0
        }
    }

    fn mutate_gene<R: Rng>(&self, index: usize, gene: f64, rng: &mut R) -> f64 {
        let h = self.half_ranges[index];
        if h > 0.0 {
            let step = self.creep * 2.0 * h;
            (gene + rng.random_range(-step..=step)).clamp(-h, h)
        } else {
            0.0
        }
    }
}

/// GA over the basis coordinates. Records carry the decoded genome and the
/// coefficient vector.
pub fn reduced_search<E, S>(
    basis: &ReducedBasis,
    config: &ReducedConfig,
    evaluator: &E,
    sink: &mut S,
) -> Result<RunSummary>
where
    E: Evaluator + ?Sized,
    S: TrialSink + ?Sized,
{
    if basis.dim() == 0 {
        return Err(Error::Config("reduced search needs at least one coordinate".into()));
    }
    if !(config.creep >= 0.0 && config.creep.is_finite()) {
        return Err(Error::Config("creep must be finite and non-negative".into()));
    }
    let ga = GaConfig {
        genes: basis.dim(),
        levels: basis.anchor.levels(),
        ..config.ga
    };
    ga.validate()?;
    let rep = Coefficients {
        half_ranges: &basis.half_ranges,
        creep: config.creep,
    };
    engine::run(
        &rep,
        &ga,
        |eta: &[f64]| basis.decode(eta),
        |eta: &[f64]| eta.to_vec(),
        evaluator,
        sink,
    )
}
