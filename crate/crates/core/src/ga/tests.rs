use super::{reduced_search, ReducedBasis, ReducedConfig};
use super::*;
use crate::pca::{PrincipalAxis, PrincipalControls, SelectionRule};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn sum_fitness(g: &Genome) -> f64 {
    g.genes().iter().map(|&x| x as f64).sum()
}

fn run(config: &GaConfig, f: impl Fn(&Genome) -> f64) -> (RunSummary, Vec<TrialRecord>) {
    let mut trials = Vec::new();
    let summary = run_search(config, &f, &mut trials).unwrap();
    (summary, trials)
}

#[test]
fn same_seed_same_run() {
    let config = GaConfig {
        rng_seed: 42,
        max_generations: 8,
        ..GaConfig::default()
    };
    let (a, ta) = run(&config, sum_fitness);
    let (b, tb) = run(&config, sum_fitness);
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    let other = GaConfig { rng_seed: 43, ..config };
    let (_, tc) = run(&other, sum_fitness);
    assert_ne!(ta[0].genome, tc[0].genome);
}

#[test]
fn initial_population_shape_and_range() {
    let config = GaConfig::default();
    let pop = init_population(&config, &mut ChaCha8Rng::seed_from_u64(1));
    assert_eq!(pop.len(), 50);
    for g in &pop {
        assert_eq!(g.len(), 25);
        assert!(g.genes().iter().all(|&x| x < 32));
    }
}

#[test]
fn initial_genes_are_uniform() {
    let config = GaConfig {
        genes: 1,
        population_size: 10_000,
        ..GaConfig::default()
    };
    let pop = init_population(&config, &mut ChaCha8Rng::seed_from_u64(9));
    let mut counts = [0u32; 32];
    for g in &pop {
        counts[g.genes()[0] as usize] += 1;
    }
    let expected = 10_000.0 / 32.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let p = 1.0 - ChiSquared::new(31.0).unwrap().cdf(chi2);
    assert!(p > 0.01, "chi2 = {chi2}, p = {p}");
}

#[test]
fn one_point_crossover_example() {
    let a = Genome::new(vec![0, 0, 0, 0], 8).unwrap();
    let b = Genome::new(vec![7, 7, 7, 7], 8).unwrap();
    assert_eq!(one_point_crossover(&a, &b, 2).genes(), &[0, 0, 7, 7]);
    assert_eq!(one_point_crossover(&b, &a, 1).genes(), &[7, 0, 0, 0]);
}

#[test]
fn converged_population_is_a_fixed_point_without_mutation() {
    let config = GaConfig {
        genes: 6,
        levels: 8,
        population_size: 10,
        mutation_prob: 0.0,
        ..GaConfig::default()
    };
    let genome = Genome::new(vec![1, 2, 3, 4, 5, 6], 8).unwrap();
    let population: Vec<Member> = (0..10)
        .map(|i| Member {
            trial_id: i,
            genome: genome.clone(),
            fitness: 0.5,
        })
        .collect();
    let next = step_generation(&population, &config, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(next.len(), 10);
    assert!(next.iter().all(|o| o.genome == genome));
}

#[test]
fn elites_are_carried_with_self_parentage() {
    let config = GaConfig {
        genes: 3,
        levels: 4,
        population_size: 4,
        elite_count: 2,
        ..GaConfig::default()
    };
    let population: Vec<Member> = [0.1, 0.9, 0.9, 0.3]
        .iter()
        .enumerate()
        .map(|(i, &f)| Member {
            trial_id: 10 + i as u64,
            genome: Genome::new(vec![i as u32; 3], 4).unwrap(),
            fitness: f,
        })
        .collect();
    let next = step_generation(&population, &config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    // ties broken by the lower trial id
    assert_eq!(next[0].parent_ids, [11, 11]);
    assert_eq!(next[1].parent_ids, [12, 12]);
    assert_eq!(next[0].inherited_fitness, Some(0.9));
    assert!(next[2..].iter().all(|o| o.inherited_fitness.is_none()));
}

#[test]
fn best_so_far_never_decreases_with_elitism() {
    for seed in 0..5 {
        let config = GaConfig {
            rng_seed: seed,
            max_generations: 15,
            ..GaConfig::default()
        };
        let (summary, trials) = run(&config, |g: &Genome| {
            g.genes().iter().map(|&x| libm::sin(x as f64)).sum()
        });
        assert!(summary.best_per_generation.windows(2).all(|w| w[1] >= w[0]));
        // each generation's best is at least the previous generation's best
        let mut per_gen: BTreeMap<u32, f64> = BTreeMap::new();
        for t in &trials {
            let e = per_gen.entry(t.generation).or_insert(f64::NEG_INFINITY);
            *e = e.max(t.fitness);
        }
        let bests: Vec<f64> = per_gen.values().copied().collect();
        assert!(bests.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn constant_fitness_stops_after_stall_window() {
    let config = GaConfig::default();
    let (summary, trials) = run(&config, |_: &Genome| 0.25);
    assert_eq!(summary.generations, config.stall_generations + 1);
    assert_eq!(trials.len(), 50 * summary.generations);
    assert_eq!(summary.evaluations, 50 + 48 * config.stall_generations);
}

#[test]
fn evaluation_count_within_bounds() {
    let config = GaConfig::default();
    let (summary, trials) = run(&config, sum_fitness);
    assert!((50..=2000).contains(&summary.evaluations));
    assert!(summary.generations <= 40);
    assert_eq!(summary.trials, trials.len());
    let ids: Vec<u64> = trials.iter().map(|t| t.trial_id).collect();
    assert_eq!(ids, (0..trials.len() as u64).collect::<Vec<_>>());
}

#[test]
fn genealogy_is_a_dag_into_the_previous_generation() {
    let config = GaConfig {
        max_generations: 6,
        ..GaConfig::default()
    };
    let (_, trials) = run(&config, sum_fitness);
    let generation_of: BTreeMap<u64, u32> =
        trials.iter().map(|t| (t.trial_id, t.generation)).collect();
    for t in &trials {
        if t.generation == 0 {
            assert!(t.parent_ids.is_empty());
            continue;
        }
        assert_eq!(t.parent_ids.len(), 2);
        for p in &t.parent_ids {
            assert!(*p < t.trial_id);
            assert_eq!(generation_of[p], t.generation - 1);
        }
    }
}

#[test]
fn non_finite_fitness_is_an_error() {
    let config = GaConfig::default();
    let mut trials = Vec::new();
    let f = |g: &Genome| if g.genes()[0] == 3 { f64::NAN } else { 1.0 };
    let err = run_search(&config, &f, &mut trials).unwrap_err();
    match err {
        Error::NonFiniteFitness { trial_id, fitness } => {
            assert!(fitness.is_nan());
            assert!(trial_id < 50);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mut trials = Vec::new();
    for bad in [
        GaConfig { levels: 24, ..GaConfig::default() },
        GaConfig { population_size: 0, ..GaConfig::default() },
        GaConfig { mutation_prob: 1.5, ..GaConfig::default() },
        GaConfig { elite_count: 60, ..GaConfig::default() },
    ] {
        assert!(run_search(&bad, &sum_fitness, &mut trials).is_err(), "{bad:?}");
    }
}

fn unit_axis(dim: usize, index: usize, eigenvalue: f64) -> PrincipalControls {
    let mut vector = vec![0.0; dim];
    vector[index] = 1.0;
    PrincipalControls {
        selected: vec![PrincipalAxis {
            axis: 0,
            eigenvalue,
            correlation: 1.0,
            vector,
        }],
        rule: SelectionRule::default(),
    }
}

#[test]
fn reduced_search_finds_a_one_dimensional_optimum() {
    // fine levels so that the decoded phase tracks η closely
    let levels = 1024;
    let anchor = Genome::new(vec![0; 6], levels).unwrap();
    let basis = ReducedBasis::new(&anchor, &unit_axis(5, 0, 1.0), 1.0).unwrap();
    let f = |g: &Genome| {
        let eta = g.phase(1) - g.phase(0);
        let eta = if eta > core::f64::consts::PI { eta - core::f64::consts::TAU } else { eta };
        -(eta - 0.5) * (eta - 0.5)
    };
    let mut trials = Vec::new();
    let summary = reduced_search(&basis, &ReducedConfig::default(), &f, &mut trials).unwrap();
    assert_eq!(summary.best.coefficients.len(), 1);
    assert!((summary.best.coefficients[0] - 0.5).abs() < 0.05, "{:?}", summary.best);
    assert!(trials.iter().all(|t| t.coefficients[0].abs() <= 1.0));
}

#[test]
fn zero_range_reduced_search_stays_at_the_anchor() {
    let anchor = Genome::new(vec![3, 9, 1, 30, 12], 32).unwrap();
    let basis = ReducedBasis::new(&anchor, &unit_axis(4, 2, 0.7), 0.0).unwrap();
    let mut trials = Vec::new();
    reduced_search(&basis, &ReducedConfig::default(), &sum_fitness, &mut trials).unwrap();
    assert!(trials.iter().all(|t| t.genome == anchor && t.coefficients == [0.0]));
}

#[test]
fn reduced_search_without_controls_is_a_config_error() {
    let anchor = Genome::new(vec![0; 4], 32).unwrap();
    let empty = PrincipalControls {
        selected: Vec::new(),
        rule: SelectionRule::default(),
    };
    assert!(matches!(ReducedBasis::new(&anchor, &empty, 2.0), Err(Error::Config(_))));
}

#[test]
fn decode_at_origin_is_the_anchor() {
    let anchor = Genome::new(vec![5, 31, 0, 17, 8, 2], 32).unwrap();
    let basis = ReducedBasis::new(&anchor, &unit_axis(5, 3, 2.0), 2.0).unwrap();
    assert_eq!(basis.decode(&[0.0]), anchor);
    assert!((basis.half_ranges()[0] - 2.0 * 2f64.sqrt()).abs() < 1e-15);
}
