//! Two-mode stimulated Raman surrogate fitness.
//!
//! The surrogate rewards pulses whose intensity is modulated at the Raman
//! mode-separation frequency `Ω₀` with a target-dependent modulation phase.
//! With `Ĩ = FT[I(t)]`:
//!
//! - `m` is the window mean of `|Ĩ(Ω)|/Ĩ(0)` over `Ω₀ ± bandwidth`, minus the
//!   mean of the two nearest grid points just outside the window, clamped to
//!   `[0, 1]`. The subtraction turns `m` into a contrast, so the smooth
//!   transform-limited spectrum scores ≈ 0 instead of ≈ 1.
//! - `ψ = arg Ĩ(Ω₀)` at the nearest grid point.
//! - `f = m · ((1 + cos(ψ − φ_target))/2)^p`, clipped to `[0, 1]`.
//!
//! `p = 1` with background subtraction switched off gives the plain
//! window-mean form.

use core::f64::consts::FRAC_PI_2;

use crate::ga::Fitness;
use crate::pulse::{
    genome_to_spectral_field, intensity, intensity_spectrum, synthesize_temporal, IntensitySpectrum,
    SpectralField, SpectralGrid, DEFAULT_TIME_SAMPLES,
};
use crate::{Error, Genome, Result};

/// Which C–H stretch mode the pulse should drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RamanTarget {
    #[cfg_attr(feature = "serde", serde(rename = "sym"))]
    Symmetric,
    #[cfg_attr(feature = "serde", serde(rename = "anti"))]
    Antisymmetric,
}

impl RamanTarget {
    pub fn tag(self) -> &'static str {
        match self {
            RamanTarget::Symmetric => "sym",
            RamanTarget::Antisymmetric => "anti",
        }
    }
}

impl core::str::FromStr for RamanTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sym" | "symmetric" => Ok(RamanTarget::Symmetric),
            "anti" | "antisymmetric" => Ok(RamanTarget::Antisymmetric),
            other => Err(Error::Config(alloc::format!("unknown target `{other}`"))),
        }
    }
}

impl core::fmt::Display for RamanTarget {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SrsModelParams {
    /// Mode-separation frequency Ω₀, THz.
    pub coupling_frequency: f64,
    /// Target modulation phase for the symmetric stretch, rad.
    pub phase_symmetric: f64,
    /// Target modulation phase for the antisymmetric stretch, rad.
    pub phase_antisymmetric: f64,
    /// Half-width of the averaging window around Ω₀, THz.
    pub bandwidth: f64,
    /// Exponent `p` on the phase-match factor.
    pub phase_sharpness: f64,
    /// Subtract the out-of-window background from the window mean.
    pub subtract_background: bool,
}

impl Default for SrsModelParams {
    fn default() -> Self {
        Self {
            coupling_frequency: 3.0,
            phase_symmetric: 0.0,
            phase_antisymmetric: FRAC_PI_2,
            bandwidth: 0.25,
            phase_sharpness: 4.0,
            subtract_background: true,
        }
    }
}

impl SrsModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_frequency > 0.0 && self.coupling_frequency.is_finite()) {
            return Err(Error::Config("coupling_frequency must be positive".into()));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::Config("bandwidth must be positive".into()));
        }
        if !(self.phase_sharpness >= 1.0 && self.phase_sharpness.is_finite()) {
            return Err(Error::Config("phase_sharpness must be >= 1".into()));
        }
        if !(self.phase_symmetric.is_finite() && self.phase_antisymmetric.is_finite()) {
            return Err(Error::Config("target phases must be finite".into()));
        }
        Ok(())
    }

    pub fn target_phase(&self, target: RamanTarget) -> f64 {
        match target {
            RamanTarget::Symmetric => self.phase_symmetric,
            RamanTarget::Antisymmetric => self.phase_antisymmetric,
        }
    }
}

/// Intermediate quantities of one fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrsResponse {
    /// Modulation contrast `m` in `[0, 1]`.
    pub modulation: f64,
    /// `arg Ĩ(Ω₀)`, rad.
    pub phase: f64,
    pub fitness: f64,
}

/// Modulation contrast and phase read off an intensity spectrum.
pub fn modulation(spectrum: &IntensitySpectrum, params: &SrsModelParams) -> (f64, f64) {
    let dc = spectrum.dc().norm();
    let mag = spectrum.magnitudes();
    let centre = spectrum.nearest_index(params.coupling_frequency);
    let in_window: alloc::vec::Vec<usize> = (0..mag.len())
        .filter(|&i| (spectrum.freq[i] - params.coupling_frequency).abs() <= params.bandwidth)
        .collect();
    let (lo, hi, mean) = if in_window.is_empty() {
        (centre, centre, mag[centre])
    } else {
        let mean = in_window.iter().map(|&i| mag[i]).sum::<f64>() / in_window.len() as f64;
        (in_window[0], *in_window.last().unwrap(), mean)
    };
    let background = if params.subtract_background {
        let below = lo.checked_sub(1).map(|i| mag[i]);
        let above = (hi + 1 < mag.len()).then(|| mag[hi + 1]);
        match (below, above) {
            (Some(a), Some(b)) => (a + b) / 2.0,
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0.0,
        }
    } else {
        0.0
    };
    let m = ((mean - background) / dc).clamp(0.0, 1.0);
    (m, spectrum.values[centre].arg())
}

/// Full response on an explicit number of time samples.
pub fn evaluate_response(
    field: &SpectralField,
    target: RamanTarget,
    params: &SrsModelParams,
    n_t: usize,
) -> Result<SrsResponse> {
    let e = synthesize_temporal(field, n_t)?;
    let spectrum = intensity_spectrum(&intensity(&e), e.dt)?;
    let (m, psi) = modulation(&spectrum, params);
    let matched = (1.0 + libm::cos(psi - params.target_phase(target))) / 2.0;
    let fitness = (m * libm::pow(matched, params.phase_sharpness)).clamp(0.0, 1.0);
    Ok(SrsResponse {
        modulation: m,
        phase: psi,
        fitness,
    })
}

/// Surrogate fitness in `[0, 1]` on the default time grid.
pub fn evaluate_fitness(
    field: &SpectralField,
    target: RamanTarget,
    params: &SrsModelParams,
) -> Result<f64> {
    evaluate_response(field, target, params, DEFAULT_TIME_SAMPLES).map(|r| r.fitness)
}

/// Genome-level fitness functional for the GA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrsModel {
    pub grid: SpectralGrid,
    pub params: SrsModelParams,
    pub target: RamanTarget,
    pub time_samples: usize,
}

impl SrsModel {
    pub fn new(grid: SpectralGrid, params: SrsModelParams, target: RamanTarget) -> Self {
        Self {
            grid,
            params,
            target,
            time_samples: DEFAULT_TIME_SAMPLES,
        }
    }

    pub fn response(&self, genome: &Genome) -> Result<SrsResponse> {
        let field = genome_to_spectral_field(genome, &self.grid)?;
        evaluate_response(&field, self.target, &self.params, self.time_samples)
    }
}

impl Fitness for SrsModel {
    fn fitness(&self, genome: &Genome) -> Result<f64> {
        self.response(genome).map(|r| r.fitness)
    }
}
