//! Small in-place transforms used by the pulse diagnostics.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::TAU;

/// `X[m] = Σ_k x[k]·exp(sign·2πi·m·k/N)`, unnormalized.
///
/// Radix-2 when `N` is a power of two, direct summation otherwise.
pub(crate) fn transform(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, sign);
    } else {
        let out: Vec<Complex64> = (0..n)
            .map(|m| {
                data.iter()
                    .enumerate()
                    .map(|(k, x)| x * unit((m * k % n) as f64 / n as f64, sign))
                    .sum()
            })
            .collect();
        data.copy_from_slice(&out);
    }
}

fn unit(cycles: f64, sign: f64) -> Complex64 {
    let a = sign * TAU * cycles;
    Complex64::new(libm::cos(a), libm::sin(a))
}

fn radix2(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    // twiddles for the largest stage; smaller stages stride through it
    let half = n / 2;
    let twiddles: Vec<Complex64> = (0..half).map(|k| unit(k as f64 / n as f64, sign)).collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = twiddles[k * stride];
                let a = data[start + k];
                let b = data[start + k + len / 2] * w;
                data[start + k] = a + b;
                data[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}
