use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{centred_time, unit_table, SpectralField};
use crate::Result;

/// Real time-frequency map `W(ω, t)`.
///
/// Rows are frequencies at half-bin spacing across the field's spectral
/// support (`2·n_bins − 1` rows); columns share the temporal field's axis.
///
/// The spectrum is sampled at `bin_width`, so the field is periodic in a
/// window `T = 1/bin_width` and every row repeats (integer rows) or flips
/// sign (half-bin rows) after `T/2`. Interference with the neighbouring
/// period therefore shows up around `±T/2`; the pulse itself is read off the
/// central half `|t| < T/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    /// Absolute frequency, THz.
    pub omega: Vec<f64>,
    /// fs
    pub time: Vec<f64>,
    /// Row-major, `omega.len() × time.len()`.
    pub values: Vec<f64>,
    /// Largest discarded imaginary part divided by `max|W|`.
    pub imag_residue: f64,
}

impl WignerMap {
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.time.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.time.len();
        &self.values[row * n..(row + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Σ_t W(ω, t)` per row.
    pub fn time_marginal(&self) -> Vec<f64> {
        (0..self.omega.len()).map(|r| self.row(r).iter().sum()).collect()
    }

    /// `Σ_ω W(ω, t)` per column.
    pub fn frequency_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.time.len()];
        for r in 0..self.omega.len() {
            for (o, v) in out.iter_mut().zip(self.row(r)) {
                *o += v;
            }
        }
        out
    }

    /// Nearest-neighbour resampling onto the spectral grid itself: the
    /// integer-bin rows.
    pub fn on_base_grid(&self) -> WignerMap {
        let n_t = self.time.len();
        let rows: Vec<usize> = (0..self.omega.len()).step_by(2).collect();
        let mut values = Vec::with_capacity(rows.len() * n_t);
        for &r in &rows {
            values.extend_from_slice(self.row(r));
        }
        WignerMap {
            omega: rows.iter().map(|&r| self.omega[r]).collect(),
            time: self.time.clone(),
            values,
            imag_residue: self.imag_residue,
        }
    }
}

/// Spectrally resolved field auto-correlation,
///
/// ```text
/// W(ω, t) = (1/N) Σ_ω' E(ω−ω')·E*(ω+ω')·exp(+2iω't)
/// ```
///
/// summed over the zero-padded grid. The kernel sign follows the synthesis
/// convention `exp(−2πi·f·t)`, so that `Σ_ω W(ω, t) = dt·|E(t)|²` on the
/// temporal grid and `Σ_t W(ω_i, t) = |E(ω_i)|²` at every spectral bin.
pub fn wigner(field: &SpectralField, n_t: usize) -> Result<WignerMap> {
    let grid = field.grid();
    grid.check_time_samples(n_t)?;
    field.require_energy()?;

    let n = grid.n_bins;
    let dt = grid.time_step(n_t);
    let a: Vec<Complex64> = (0..n).map(|i| field.value(i)).collect();
    let table = unit_table(n_t, 1.0);
    let half = (n_t / 2) as i64;
    let scale = 1.0 / n_t as f64;

    let rows = 2 * n - 1;
    let mut values = vec![0.0; rows * n_t];
    let mut max_imag: f64 = 0.0;
    let mut row = vec![Complex64::new(0.0, 0.0); n_t];
    for s in 0..rows {
        row.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        for j1 in lo..=hi {
            let j2 = s - j1;
            let product = a[j1] * a[j2].conj() * scale;
            if product == Complex64::new(0.0, 0.0) {
                continue;
            }
            // exp(+2iω't) with ω' = (j2 − j1)/2 bins
            let lag = j2 as i64 - j1 as i64;
            for (k, v) in row.iter_mut().enumerate() {
                let q = (lag * (k as i64 - half)).rem_euclid(n_t as i64);
                *v += product * table[q as usize];
            }
        }
        for (dst, v) in values[s * n_t..(s + 1) * n_t].iter_mut().zip(&row) {
            *dst = v.re;
            max_imag = max_imag.max(v.im.abs());
        }
    }

    let omega = (0..rows)
        .map(|s| grid.frequency(0) + s as f64 * grid.bin_width / 2.0)
        .collect();
    let time = (0..n_t).map(|k| centred_time(k, n_t, dt)).collect();
    let mut map = WignerMap {
        omega,
        time,
        values,
        imag_residue: 0.0,
    };
    let peak = map.max_abs();
    map.imag_residue = if peak > 0.0 { max_imag / peak } else { 0.0 };
    Ok(map)
}
