//! Pulse synthesis: spectral phase masks to optical fields and their
//! time-frequency diagnostics.
//!
//! Units are THz for frequencies and fs for times. Temporal fields are the
//! complex envelope relative to the grid's centre frequency, sampled on the
//! centred axis `t_k = (k − N/2)·dt`, with
//!
//! ```text
//! E(t_k) = (N·dt)^(-1/2) · Σ_i A_i·exp(iφ_i)·exp(−2πi·(f_i − f_c)·t_k)
//! ```
//!
//! so that `dt·Σ|E(t_k)|² = Σ A_i²` exactly (Parseval on the sample grid).

mod wigner;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{fft, Error, Genome, Result, TAU};

pub use wigner::{wigner, WignerMap};

/// Default number of time samples for synthesis and diagnostics.
pub const DEFAULT_TIME_SAMPLES: usize = 1024;

/// Spectral sampling of the shaper: one bin per gene.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SpectralGrid {
    pub n_bins: usize,
    /// THz. 374.7 THz is 800 nm.
    pub center_frequency: f64,
    /// THz.
    pub bin_width: f64,
    /// FWHM of the Gaussian amplitude envelope, THz.
    pub envelope_fwhm: f64,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self {
            n_bins: 25,
            center_frequency: 374.7,
            bin_width: 1.0,
            envelope_fwhm: 12.0,
        }
    }
}

impl SpectralGrid {
    pub fn with_bins(n_bins: usize) -> Self {
        Self {
            n_bins,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bins < 2 {
            return Err(Error::Config(alloc::format!(
                "n_bins must be >= 2, got {}",
                self.n_bins
            )));
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::Config("bin_width must be positive".into()));
        }
        if !(self.envelope_fwhm > 0.0 && self.envelope_fwhm.is_finite()) {
            return Err(Error::Config("envelope_fwhm must be positive".into()));
        }
        Ok(())
    }

    /// Offset of bin `i` from the centre frequency, THz.
    pub fn offset(&self, i: usize) -> f64 {
        (i as f64 - (self.n_bins as f64 - 1.0) / 2.0) * self.bin_width
    }

    /// Absolute frequency of bin `i`, THz.
    pub fn frequency(&self, i: usize) -> f64 {
        self.center_frequency + self.offset(i)
    }

    /// Unit-peak Gaussian amplitude at bin `i`.
    pub fn envelope(&self, i: usize) -> f64 {
        let x = self.offset(i) / self.envelope_fwhm;
        libm::exp(-4.0 * core::f64::consts::LN_2 * x * x)
    }

    /// Sample spacing of an `n_t`-point temporal field, fs.
    pub fn time_step(&self, n_t: usize) -> f64 {
        1000.0 / (n_t as f64 * self.bin_width)
    }

    /// `n_t` must be a power of two and at least `4·n_bins`.
    pub fn check_time_samples(&self, n_t: usize) -> Result<()> {
        if !n_t.is_power_of_two() {
            return Err(Error::Resolution(alloc::format!(
                "n_t = {n_t} is not a power of two"
            )));
        }
        if n_t < 4 * self.n_bins {
            return Err(Error::Resolution(alloc::format!(
                "n_t = {n_t} is below 4 x n_bins = {}",
                4 * self.n_bins
            )));
        }
        Ok(())
    }
}

/// Complex field on the spectral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: SpectralGrid,
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
}

impl SpectralField {
    /// Phases are reduced into `[0, 2π)`.
    pub fn new(grid: SpectralGrid, amplitudes: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if amplitudes.len() != grid.n_bins || phases.len() != grid.n_bins {
            return Err(Error::Dimension(alloc::format!(
                "field has {} amplitudes and {} phases for {} bins",
                amplitudes.len(),
                phases.len(),
                grid.n_bins
            )));
        }
        if amplitudes.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::Contract("amplitudes must be finite and non-negative".into()));
        }
        let phases = phases.into_iter().map(wrap_phase).collect();
        Ok(Self {
            grid,
            amplitudes,
            phases,
        })
    }

    /// Gaussian envelope with the given phases.
    pub fn from_phases(grid: SpectralGrid, phases: Vec<f64>) -> Result<Self> {
        let amplitudes = (0..grid.n_bins).map(|i| grid.envelope(i)).collect();
        Self::new(grid, amplitudes, phases)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `A_i·exp(iφ_i)`.
    pub fn value(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.amplitudes[i], self.phases[i])
    }

    /// `Σ A_i²`.
    pub fn energy(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    fn require_energy(&self) -> Result<()> {
        if self.energy() > 0.0 {
            Ok(())
        } else {
            Err(Error::DegenerateField)
        }
    }
}

pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let mut w = libm::fmod(phi, TAU);
    if w < 0.0 {
        w += TAU;
    }
    // tiny negative inputs round up to exactly TAU
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Complex envelope samples on the centred time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalField {
    /// fs
    pub dt: f64,
    pub samples: Vec<Complex64>,
}

impl TemporalField {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `k`, fs.
    pub fn time(&self, k: usize) -> f64 {
        centred_time(k, self.samples.len(), self.dt)
    }

    /// `dt·Σ|E|²`.
    pub fn energy(&self) -> f64 {
        self.dt * self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>()
    }
}

pub(crate) fn centred_time(k: usize, n: usize, dt: f64) -> f64 {
    (k as f64 - (n / 2) as f64) * dt
}

/// Phase-only mapping: `φ_i = 2π·gene_i/L` over the fixed Gaussian envelope.
pub fn genome_to_spectral_field(genome: &Genome, grid: &SpectralGrid) -> Result<SpectralField> {
    if genome.len() != grid.n_bins {
        return Err(Error::Dimension(alloc::format!(
            "genome has {} genes but the grid has {} bins",
            genome.len(),
            grid.n_bins
        )));
    }
    SpectralField::from_phases(*grid, genome.phases().collect())
}

/// Discrete inverse Fourier synthesis of `E(t)` on `n_t` samples.
pub fn synthesize_temporal(field: &SpectralField, n_t: usize) -> Result<TemporalField> {
    let grid = field.grid();
    grid.check_time_samples(n_t)?;
    field.require_energy()?;

    let dt = grid.time_step(n_t);
    let norm = 1.0 / libm::sqrt(n_t as f64 * dt);
    // exp(−2πi·q/(2N)); bin offsets may be half-integer, so work in half bins
    let period = 2 * n_t as i64;
    let table = unit_table(2 * n_t, -1.0);

    let mut samples = vec![Complex64::new(0.0, 0.0); n_t];
    let half = (n_t / 2) as i64;
    for i in 0..grid.n_bins {
        let a = field.value(i) * norm;
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let twice_offset = 2 * i as i64 - (grid.n_bins as i64 - 1);
        for (k, s) in samples.iter_mut().enumerate() {
            let q = (twice_offset * (k as i64 - half)).rem_euclid(period);
            *s += a * table[q as usize];
        }
    }
    Ok(TemporalField { dt, samples })
}

/// `exp(sign·2πi·q/n)` for `q in 0..n`.
pub(crate) fn unit_table(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|q| {
            let a = sign * TAU * q as f64 / n as f64;
            Complex64::new(libm::cos(a), libm::sin(a))
        })
        .collect()
}

/// `I(t) = |E(t)|²` per sample.
pub fn intensity(field: &TemporalField) -> Vec<f64> {
    field.samples.iter().map(|s| s.norm_sqr()).collect()
}

/// `Ĩ(Ω) = FT[I(t)]` on the frequency axis `Ω_m = m/(N·dt)`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySpectrum {
    /// THz, ascending, containing 0.
    pub freq: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl IntensitySpectrum {
    /// Frequency spacing, THz.
    pub fn spacing(&self) -> f64 {
        self.freq[1] - self.freq[0]
    }

    pub fn zero_index(&self) -> usize {
        self.nearest_index(0.0)
    }

    /// `Ĩ(0)`: total pulse energy.
    pub fn dc(&self) -> Complex64 {
        self.values[self.zero_index()]
    }

    pub fn nearest_index(&self, freq: f64) -> usize {
        let first = self.freq[0];
        let idx = libm::round((freq - first) / self.spacing());
        (idx.max(0.0) as usize).min(self.freq.len() - 1)
    }

    /// Value at the grid point nearest to `freq`.
    pub fn at(&self, freq: f64) -> Complex64 {
        self.values[self.nearest_index(freq)]
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Strict local maxima of `|Ĩ|` at positive frequencies, as
    /// `(freq, magnitude)` pairs.
    pub fn positive_local_maxima(&self) -> Vec<(f64, f64)> {
        let mag = self.magnitudes();
        let z = self.zero_index();
        (z + 1..mag.len().saturating_sub(1))
            .filter(|&i| mag[i] > mag[i - 1] && mag[i] > mag[i + 1])
            .map(|i| (self.freq[i], mag[i]))
            .collect()
    }
}

/// Fourier transform of an intensity series sampled on the centred time axis
/// with spacing `dt` (fs):
///
/// ```text
/// Ĩ(Ω_m) = dt · Σ_k I(t_k)·exp(+2πi·Ω_m·t_k)
/// ```
///
/// Negative frequencies are filled by conjugation, so Hermitian symmetry is
/// exact for real input.
pub fn intensity_spectrum(intensity: &[f64], dt: f64) -> Result<IntensitySpectrum> {
    let n = intensity.len();
    if n < 4 {
        return Err(Error::Dimension(alloc::format!(
            "intensity series needs at least 4 samples, got {n}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Contract("dt must be positive".into()));
    }
    let mut buf: Vec<Complex64> = intensity.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::transform(&mut buf, 1.0);

    let half = n / 2;
    let df = 1000.0 / (n as f64 * dt);
    // ascending m from −⌊N/2⌋
    let m_min = -(half as i64);
    let shift_phase = |m: i64| -> Complex64 {
        // centred time origin: exp(−2πi·m·half/N)
        let q = (m * half as i64).rem_euclid(n as i64);
        let a = -TAU * q as f64 / n as f64;
        Complex64::new(libm::cos(a), libm::sin(a))
    };
    let value = |m: i64| -> Complex64 {
        let k = m.rem_euclid(n as i64) as usize;
        buf[k] * shift_phase(m) * dt
    };

    let freq: Vec<f64> = (0..n).map(|idx| (m_min + idx as i64) as f64 * df).collect();
    let mut values: Vec<Complex64> = (0..n)
        .map(|idx| {
            let m = m_min + idx as i64;
            if m >= 0 {
                value(m)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let zero = half;
    values[zero].im = 0.0;
    for idx in 0..zero {
        let mirror = 2 * zero - idx;
        if mirror < n {
            values[idx] = values[mirror].conj();
        } else {
            // unpaired Nyquist bin of an even-length series
            let v = value(m_min + idx as i64);
            values[idx] = Complex64::new(v.re, 0.0);
        }
    }
    Ok(IntensitySpectrum { freq, values })
}

#[cfg(test)]
mod tests;
