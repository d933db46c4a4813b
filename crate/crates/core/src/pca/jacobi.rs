use alloc::vec;
use alloc::vec::Vec;

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization of a symmetric row-major `n × n` matrix.
///
/// Sweeps rotate every upper-triangle pair in row order until the
/// off-diagonal Frobenius norm drops below `tol_rel · ‖A‖_F`. Returns the
/// (unsorted) diagonal and the accumulated rotation `V` with `A = V·D·Vᵀ`,
/// eigenvectors in the columns of `V` (row-major).
pub(crate) fn jacobi(a: &[f64], n: usize, tol_rel: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    if norm == 0.0 {
        return (vec![0.0; n], v);
    }
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += a[p * n + q] * a[p * n + q];
                }
            }
        }
        libm::sqrt(s)
    };

    for _ in 0..MAX_SWEEPS {
        if off(&a) < tol_rel * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // t = tan θ, smaller root of t² + 2τt − 1 = 0
                let tau = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, tau) / (tau.abs() + libm::sqrt(1.0 + tau * tau));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}
