use super::*;
use alloc::vec;
use alloc::vec::Vec;
use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N_T: usize = DEFAULT_TIME_SAMPLES;

fn genome(genes: Vec<u32>) -> Genome {
    Genome::new(genes, 32).unwrap()
}

fn field_for(genes: Vec<u32>) -> SpectralField {
    genome_to_spectral_field(&genome(genes), &SpectralGrid::default()).unwrap()
}

fn pulse_intensity(genes: Vec<u32>) -> (Vec<f64>, f64) {
    let e = synthesize_temporal(&field_for(genes), N_T).unwrap();
    (intensity(&e), e.dt)
}

fn random_genes(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.random_range(0..32)).collect()
}

/// Full width at half maximum of a single-peaked series, by linear
/// interpolation between samples.
fn fwhm(values: &[f64], dt: f64) -> f64 {
    let (peak_idx, peak) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let half = peak / 2.0;
    let mut left = peak_idx;
    while values[left - 1] > half {
        left -= 1;
    }
    let mut right = peak_idx;
    while values[right + 1] > half {
        right += 1;
    }
    let l = (left - 1) as f64 + (half - values[left - 1]) / (values[left] - values[left - 1]);
    let r = right as f64 + (values[right] - half) / (values[right] - values[right + 1]);
    (r - l) * dt
}

#[test]
fn grid_frequencies_are_centred() {
    let g = SpectralGrid::default();
    assert_relative_eq!(g.frequency(12), 374.7);
    assert_relative_eq!(g.frequency(0), 362.7);
    assert_relative_eq!(g.envelope(12), 1.0);
    // FWHM of the amplitude envelope
    let even = SpectralGrid {
        n_bins: 4,
        ..g
    };
    assert_relative_eq!(even.offset(0), -1.5);
    assert_relative_eq!(even.offset(3), 1.5);
}

#[test]
fn zero_genome_gives_flat_phase_and_pure_envelope() {
    let f = field_for(vec![0; 25]);
    assert!(f.phases().iter().all(|&p| p == 0.0));
    for (i, a) in f.amplitudes().iter().enumerate() {
        assert_eq!(*a, f.grid().envelope(i));
    }
}

#[test]
fn genome_length_mismatch_is_a_dimension_error() {
    let err = genome_to_spectral_field(&genome(vec![0; 24]), &SpectralGrid::default());
    assert!(matches!(err, Err(Error::Dimension(_))));
}

#[test]
fn constant_phase_leaves_intensity_unchanged() {
    let f = field_for(vec![8; 25]);
    assert!(f.phases().iter().all(|&p| (p - core::f64::consts::FRAC_PI_2).abs() < 1e-15));
    let (flat, _) = pulse_intensity(vec![0; 25]);
    let (shifted, _) = pulse_intensity(vec![8; 25]);
    for (a, b) in flat.iter().zip(&shifted) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn linear_phase_delays_the_pulse() {
    // slope 2π/32 per bin → delay slope/(2π·bin_width) = 1/32 ps
    let expected = 1000.0 / 32.0;
    let (flat, dt) = pulse_intensity(vec![0; 25]);
    let (ramp, _) = pulse_intensity((0..25).collect());
    // oracle: circular cross-correlation peak
    let n = flat.len();
    let best_lag = (0..n)
        .map(|lag| {
            let c: f64 = (0..n).map(|k| flat[k] * ramp[(k + lag) % n]).sum();
            (lag, c)
        })
        .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc })
        .0;
    let lag = if best_lag > n / 2 { best_lag as f64 - n as f64 } else { best_lag as f64 };
    assert!((lag * dt - expected).abs() <= dt, "lag {} fs", lag * dt);
    // time-shift theorem: rigid circular shift
    let shift = libm::round(expected / dt) as usize;
    let peak = flat.iter().cloned().fold(0.0, f64::max);
    for k in 0..n {
        assert!((ramp[(k + shift) % n] - flat[k]).abs() < 1e-9 * peak);
    }
}

#[test]
fn transform_limited_width_matches_gaussian_pair() {
    // wide enough that truncating the envelope wings does not broaden the pulse
    let grid = SpectralGrid::with_bins(41);
    let e = synthesize_temporal(&SpectralField::from_phases(grid, vec![0.0; 41]).unwrap(), N_T).unwrap();
    let (i, dt) = (intensity(&e), e.dt);
    // amplitude FWHM F ↔ intensity FWHM 2√2·ln2/(π·F)
    let analytic = 2.0 * core::f64::consts::SQRT_2 * core::f64::consts::LN_2
        / (core::f64::consts::PI * grid.envelope_fwhm)
        * 1000.0;
    let measured = fwhm(&i, dt);
    assert!((measured - analytic).abs() / analytic < 0.02, "{measured} vs {analytic}");
    // peak at t = 0
    let peak_idx = i.iter().cloned().enumerate().fold((0, 0.0), |a, x| if x.1 > a.1 { x } else { a }).0;
    assert_eq!(peak_idx, N_T / 2);
}

#[test]
fn parseval_holds_for_random_genomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let f = field_for(random_genes(&mut rng, 25));
        let e = synthesize_temporal(&f, N_T).unwrap();
        assert_relative_eq!(e.energy(), f.energy(), max_relative = 1e-9);
    }
}

#[test]
fn unit_spectral_energy_maps_to_unit_temporal_energy() {
    let grid = SpectralGrid::default();
    let raw: Vec<f64> = (0..25).map(|i| grid.envelope(i)).collect();
    let norm = libm::sqrt(raw.iter().map(|a| a * a).sum::<f64>());
    let f = SpectralField::new(grid, raw.iter().map(|a| a / norm).collect(), vec![0.3; 25]).unwrap();
    let e = synthesize_temporal(&f, N_T).unwrap();
    assert!((e.energy() - 1.0).abs() < 1e-9);
}

#[test]
fn synthesis_rejects_degenerate_and_coarse_inputs() {
    let grid = SpectralGrid::default();
    let zero = SpectralField::new(grid, vec![0.0; 25], vec![0.0; 25]).unwrap();
    assert_eq!(synthesize_temporal(&zero, N_T), Err(Error::DegenerateField));
    let f = field_for(vec![0; 25]);
    assert!(matches!(synthesize_temporal(&f, 64), Err(Error::Resolution(_))));
    assert!(matches!(synthesize_temporal(&f, 1000), Err(Error::Resolution(_))));
}

#[test]
fn intensity_is_non_negative_and_single_peaked_for_flat_phase() {
    let zero = TemporalField { dt: 1.0, samples: vec![Complex64::new(0.0, 0.0); 8] };
    assert!(intensity(&zero).iter().all(|&v| v == 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (i, _) = pulse_intensity(random_genes(&mut rng, 25));
    assert!(i.iter().all(|&v| v >= 0.0));

    let (flat, _) = pulse_intensity(vec![0; 25]);
    let peak = flat.iter().cloned().fold(0.0, f64::max);
    let n = flat.len();
    let maxima = (0..n)
        .filter(|&k| {
            let prev = flat[(k + n - 1) % n];
            let next = flat[(k + 1) % n];
            flat[k] > prev && flat[k] >= next && flat[k] > 0.01 * peak
        })
        .count();
    assert_eq!(maxima, 1);
}

fn gaussian_train(centres: &[f64], width_fs: f64, n: usize, dt: f64) -> Vec<f64> {
    let s = width_fs / (2.0 * libm::sqrt(2.0 * core::f64::consts::LN_2));
    (0..n)
        .map(|k| {
            let t = centred_time(k, n, dt);
            centres.iter().map(|c| libm::exp(-(t - c) * (t - c) / (2.0 * s * s))).sum()
        })
        .collect()
}

#[test]
fn two_pulses_333_fs_apart_peak_at_three_terahertz() {
    let dt = SpectralGrid::default().time_step(N_T);
    let i = gaussian_train(&[-166.5, 166.5], 30.0, N_T, dt);
    let spec = intensity_spectrum(&i, dt).unwrap();
    let df = spec.spacing();
    // oracle: |Ĩ| ∝ |cos(πΩτ)|·G(Ω), first peak at 1/τ
    let expected = 1000.0 / 333.0;
    let maxima = spec.positive_local_maxima();
    assert!(
        maxima.iter().any(|(f, _)| (f - expected).abs() <= df + 1e-12),
        "{maxima:?}"
    );
}

#[test]
fn transform_limited_intensity_spectrum_decays_monotonically() {
    let (i, dt) = pulse_intensity(vec![0; 25]);
    let spec = intensity_spectrum(&i, dt).unwrap();
    let dc = spec.dc().re;
    assert!(spec
        .positive_local_maxima()
        .iter()
        .all(|(f, m)| *f <= 1.0 || *m <= 0.05 * dc));
}

#[test]
fn intensity_spectrum_dc_and_hermitian_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (i, dt) = pulse_intensity(random_genes(&mut rng, 25));
    let spec = intensity_spectrum(&i, dt).unwrap();
    let total: f64 = dt * i.iter().sum::<f64>();
    assert_relative_eq!(spec.dc().re, total, max_relative = 1e-9);
    let z = spec.zero_index();
    for m in 1..z {
        assert_eq!(spec.values[z - m], spec.values[z + m].conj());
    }
    assert!(matches!(intensity_spectrum(&[], 1.0), Err(Error::Dimension(_))));
    assert!(matches!(intensity_spectrum(&[1.0, 2.0], 1.0), Err(Error::Dimension(_))));
}

#[test]
fn intensity_spectrum_of_odd_length_series() {
    let i = [1.0, 2.0, 0.5, 0.25, 3.0];
    let spec = intensity_spectrum(&i, 2.0).unwrap();
    assert_eq!(spec.freq.len(), 5);
    assert_relative_eq!(spec.dc().re, 2.0 * 6.75, max_relative = 1e-12);
    // direct evaluation of the defining sum at m = 1
    let n = i.len();
    let df = 1000.0 / (n as f64 * 2.0);
    let direct: Complex64 = i
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let t = centred_time(k, n, 2.0);
            Complex64::from_polar(2.0 * v, TAU * df * t / 1000.0)
        })
        .sum();
    assert!((spec.at(df) - direct).norm() < 1e-12);
    assert!((spec.at(-df) - direct.conj()).norm() < 1e-12);
}

fn weighted_tilt(w: &WignerMap) -> (f64, f64, f64) {
    let mut total = 0.0;
    let (mut mo, mut mt) = (0.0, 0.0);
    for (r, o) in w.omega.iter().enumerate() {
        for (c, t) in w.time.iter().enumerate() {
            let v = w.value(r, c);
            total += v;
            mo += v * o;
            mt += v * t;
        }
    }
    mo /= total;
    mt /= total;
    let (mut voo, mut vtt, mut vot) = (0.0, 0.0, 0.0);
    for (r, o) in w.omega.iter().enumerate() {
        for (c, t) in w.time.iter().enumerate() {
            let v = w.value(r, c);
            voo += v * (o - mo) * (o - mo);
            vtt += v * (t - mt) * (t - mt);
            vot += v * (o - mo) * (t - mt);
        }
    }
    (voo / total, vtt / total, vot / total)
}

#[test]
fn wigner_of_transform_limited_pulse_has_no_tilt() {
    let w = wigner(&field_for(vec![0; 25]), N_T).unwrap();
    assert_eq!(w.omega.len(), 49);
    assert_eq!(w.time.len(), N_T);
    let (voo, vtt, vot) = weighted_tilt(&w);
    assert!(vot.abs() <= 1e-6 * libm::sqrt(voo * vtt));
    assert!(w.imag_residue < 1e-9);
}

#[test]
fn wigner_tilt_follows_chirp_sign() {
    let grid = SpectralGrid::default();
    for beta in [0.05, -0.05] {
        // φ(f) = β·(f − f_c)²; stationary phase puts frequency f at
        // t = β·(f − f_c)/π ps
        let phases = (0..25).map(|i| beta * grid.offset(i) * grid.offset(i)).collect();
        let f = SpectralField::from_phases(grid, phases).unwrap();
        let w = wigner(&f, N_T).unwrap();
        let (_, _, vot) = weighted_tilt(&w);
        assert_eq!(vot.signum(), f64::signum(beta));
        // ridge of the central rows sits at the group delay
        for bin in [10usize, 12, 14] {
            let row = w.row(2 * bin);
            // rows repeat with half the time window; look in the central half
            let quarter = row.len() / 4;
            let ridge = (quarter..3 * quarter).fold(quarter, |b, k| if row[k] > row[b] { k } else { b });
            let delay = beta * grid.offset(bin) / core::f64::consts::PI * 1000.0;
            let dt = w.time[1] - w.time[0];
            assert!((w.time[ridge] - delay).abs() <= 2.0 * dt, "bin {bin}: {} vs {delay}", w.time[ridge]);
        }
    }
}

#[test]
fn wigner_marginals_and_reality() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let f = field_for(random_genes(&mut rng, 25));
        let w = wigner(&f, N_T).unwrap();
        assert!(w.imag_residue < 1e-9);
        let marginal = w.time_marginal();
        for i in 0..25 {
            let expected = f.amplitudes()[i] * f.amplitudes()[i];
            assert_relative_eq!(marginal[2 * i], expected, max_relative = 1e-6);
        }
        let e = synthesize_temporal(&f, N_T).unwrap();
        let i_t = intensity(&e);
        let fm = w.frequency_marginal();
        let peak = i_t.iter().cloned().fold(0.0, f64::max);
        for (a, b) in fm.iter().zip(&i_t) {
            assert!((a - e.dt * b).abs() < 1e-9 * peak * e.dt);
        }
    }
}

#[test]
fn wigner_is_global_phase_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let genes = random_genes(&mut rng, 25);
    let g = genome(genes);
    let grid = SpectralGrid::default();
    let w0 = wigner(&genome_to_spectral_field(&g, &grid).unwrap(), N_T).unwrap();
    let w1 = wigner(&genome_to_spectral_field(&g.shifted(13), &grid).unwrap(), N_T).unwrap();
    let peak = w0.max_abs();
    for (a, b) in w0.values.iter().zip(&w1.values) {
        assert!((a - b).abs() < 1e-9 * peak);
    }
}

#[test]
fn wigner_base_grid_keeps_integer_rows() {
    let f = field_for(vec![0; 25]);
    let w = wigner(&f, 128).unwrap();
    let base = w.on_base_grid();
    assert_eq!(base.omega.len(), 25);
    for i in 0..25 {
        assert_relative_eq!(base.omega[i], f.grid().frequency(i), max_relative = 1e-12);
        assert_eq!(base.row(i), w.row(2 * i));
    }
    let zero = SpectralField::new(*f.grid(), vec![0.0; 25], vec![0.0; 25]).unwrap();
    assert_eq!(wigner(&zero, 128), Err(Error::DegenerateField));
}
