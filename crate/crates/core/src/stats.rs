//! Population moments and Pearson correlation (divide by N throughout).

use alloc::vec::Vec;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation, two-pass.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    libm::sqrt(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64)
}

/// Whether a series is constant up to rounding of its own magnitude.
pub fn is_constant(xs: &[f64]) -> bool {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    std_dev(xs) <= 1e-12 * scale
}

/// `(⟨xy⟩ − ⟨x⟩⟨y⟩) / (σ_x σ_y)`, or `None` when either series is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    if is_constant(xs) || is_constant(ys) {
        return None;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let n = xs.len() as f64;
    let cov = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n;
    let r = cov / (std_dev(xs) * std_dev(ys));
    Some(r.clamp(-1.0, 1.0))
}

/// Column `j` of a row-major table.
pub(crate) fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}
