//! Representation-generic GA machinery shared by the full-basis search over
//! quantized genes and the reduced-basis search over real coefficients.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, GaConfig, RunSummary, TrialRecord, TrialSink, STALL_EPSILON};
use crate::{Error, Genome, Result};

pub(crate) trait Representation {
    type Gene: Copy;

    fn len(&self) -> usize;
    fn random_gene<R: Rng>(&self, index: usize, rng: &mut R) -> Self::Gene;
    fn mutate_gene<R: Rng>(&self, index: usize, gene: Self::Gene, rng: &mut R) -> Self::Gene;
}

/// Quantized phase levels with uniform-reset mutation.
pub(crate) struct Levels {
    pub len: usize,
    pub levels: u32,
}

impl Representation for Levels {
    type Gene = u32;

    fn len(&self) -> usize {
        self.len
    }

    fn random_gene<R: Rng>(&self, _index: usize, rng: &mut R) -> u32 {
        rng.random_range(0..self.levels)
    }

    fn mutate_gene<R: Rng>(&self, index: usize, _gene: u32, rng: &mut R) -> u32 {
        self.random_gene(index, rng)
    }
}

pub(crate) struct Parent<'a, G> {
    pub trial_id: u64,
    pub genes: &'a [G],
    pub fitness: f64,
}

pub(crate) struct Child<G> {
    pub genes: Vec<G>,
    pub parent_ids: [u64; 2],
    pub inherited_fitness: Option<f64>,
}

pub(crate) fn init<P: Representation, R: Rng>(rep: &P, count: usize, rng: &mut R) -> Vec<Vec<P::Gene>> {
    (0..count)
        .map(|_| (0..rep.len()).map(|i| rep.random_gene(i, rng)).collect())
        .collect()
}

pub(crate) fn crossover<G: Copy>(a: &[G], b: &[G], cut: usize) -> Vec<G> {
    a[..cut].iter().chain(&b[cut..]).copied().collect()
}

/// Higher fitness first; equal fitness goes to the lower trial id.
fn beats<G>(a: &Parent<'_, G>, b: &Parent<'_, G>) -> bool {
    a.fitness > b.fitness || (a.fitness == b.fitness && a.trial_id < b.trial_id)
}

fn tournament<'p, 'a, G, R: Rng>(
    parents: &'p [Parent<'a, G>],
    size: usize,
    rng: &mut R,
) -> &'p Parent<'a, G> {
    let mut winner = &parents[rng.random_range(0..parents.len())];
    for _ in 1..size {
        let challenger = &parents[rng.random_range(0..parents.len())];
        if beats(challenger, winner) {
            winner = challenger;
        }
    }
    winner
}

pub(crate) fn breed<P: Representation, R: Rng>(
    rep: &P,
    parents: &[Parent<'_, P::Gene>],
    config: &GaConfig,
    rng: &mut R,
) -> Result<Vec<Child<P::Gene>>> {
    if parents.is_empty() {
        return Err(Error::SampleSize("cannot breed from an empty population".into()));
    }
    if let Some(p) = parents.iter().find(|p| !p.fitness.is_finite()) {
        return Err(Error::NonFiniteFitness {
            trial_id: p.trial_id,
            fitness: p.fitness,
        });
    }
    if parents.iter().any(|p| p.genes.len() != rep.len()) {
        return Err(Error::Dimension("parent genome length differs from config".into()));
    }

    let mut order: Vec<usize> = (0..parents.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&parents[a], &parents[b]);
        pb.fitness
            .total_cmp(&pa.fitness)
            .then(pa.trial_id.cmp(&pb.trial_id))
    });

    let mut next = Vec::with_capacity(config.population_size);
    for &i in order.iter().take(config.elite_count.min(parents.len())) {
        let p = &parents[i];
        next.push(Child {
            genes: p.genes.to_vec(),
            parent_ids: [p.trial_id, p.trial_id],
            inherited_fitness: Some(p.fitness),
        });
    }

    let n = rep.len();
    while next.len() < config.population_size {
        let a = tournament(parents, config.tournament_size, rng);
        let b = tournament(parents, config.tournament_size, rng);
        let mut genes = if n >= 2 {
            let cut = rng.random_range(1..n);
            crossover(a.genes, b.genes, cut)
        } else {
            a.genes.to_vec()
        };
        for (i, g) in genes.iter_mut().enumerate() {
            if rng.random_bool(config.mutation_prob) {
                *g = rep.mutate_gene(i, *g, rng);
            }
        }
        next.push(Child {
            genes,
            parent_ids: [a.trial_id, b.trial_id],
            inherited_fitness: None,
        });
    }
    Ok(next)
}

fn evaluate_checked<E: Evaluator + ?Sized>(
    evaluator: &E,
    genomes: &[Genome],
    first_id: u64,
) -> Result<Vec<f64>> {
    let fitness = evaluator.evaluate(genomes)?;
    if fitness.len() != genomes.len() {
        return Err(Error::Contract("evaluator returned the wrong number of values".into()));
    }
    if let Some((i, &f)) = fitness.iter().enumerate().find(|(_, f)| !f.is_finite()) {
        return Err(Error::NonFiniteFitness {
            trial_id: first_id + i as u64,
            fitness: f,
        });
    }
    Ok(fitness)
}

struct Slot<G> {
    trial_id: u64,
    genes: Vec<G>,
    fitness: f64,
}

pub(crate) fn run<P, D, C, E, S>(
    rep: &P,
    config: &GaConfig,
    decode: D,
    coefficients: C,
    evaluator: &E,
    sink: &mut S,
) -> Result<RunSummary>
where
    P: Representation,
    D: Fn(&[P::Gene]) -> Genome,
    C: Fn(&[P::Gene]) -> Vec<f64>,
    E: Evaluator + ?Sized,
    S: TrialSink + ?Sized,
{
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut next_id: u64 = 0;
    let mut evaluations = 0usize;
    let mut trials = 0usize;
    let mut best: Option<TrialRecord> = None;
    let mut best_per_generation = Vec::new();
    let mut stall = 0usize;

    let initial = init(rep, config.population_size, &mut rng);
    let genomes: Vec<Genome> = initial.iter().map(|g| decode(g)).collect();
    let fitness = evaluate_checked(evaluator, &genomes, next_id)?;
    evaluations += genomes.len();

    let mut population = Vec::with_capacity(config.population_size);
    let mut generation_best: Option<TrialRecord> = None;
    for ((genes, genome), f) in initial.into_iter().zip(genomes).zip(fitness) {
        let record = TrialRecord {
            trial_id: next_id,
            generation: 0,
            genome,
            fitness: f,
            parent_ids: Vec::new(),
            coefficients: coefficients(&genes),
        };
        sink.append(&record)?;
        trials += 1;
        if generation_best.as_ref().is_none_or(|b| f > b.fitness) {
            generation_best = Some(record);
        }
        population.push(Slot {
            trial_id: next_id,
            genes,
            fitness: f,
        });
        next_id += 1;
    }
    best = best.or(generation_best);
    best_per_generation.push(best.as_ref().map_or(f64::NEG_INFINITY, |b| b.fitness));

    let mut generation: u32 = 0;
    while (generation as usize + 1) < config.max_generations && stall < config.stall_generations {
        generation += 1;
        let parents: Vec<Parent<'_, P::Gene>> = population
            .iter()
            .map(|s| Parent {
                trial_id: s.trial_id,
                genes: &s.genes,
                fitness: s.fitness,
            })
            .collect();
        let children = breed(rep, &parents, config, &mut rng)?;
        drop(parents);

        let genomes: Vec<Genome> = children.iter().map(|c| decode(&c.genes)).collect();
        let fresh: Vec<Genome> = children
            .iter()
            .zip(&genomes)
            .filter(|(c, _)| c.inherited_fitness.is_none())
            .map(|(_, g)| g.clone())
            .collect();
        let first_fresh_id = next_id + children.iter().filter(|c| c.inherited_fitness.is_some()).count() as u64;
        let mut fresh_fitness = evaluate_checked(evaluator, &fresh, first_fresh_id)?.into_iter();
        evaluations += fresh.len();

        let mut next_population = Vec::with_capacity(children.len());
        let mut generation_best: Option<TrialRecord> = None;
        for (child, genome) in children.into_iter().zip(genomes) {
            let f = match child.inherited_fitness {
                Some(f) => f,
                None => fresh_fitness.next().expect("one value per fresh child"),
            };
            let record = TrialRecord {
                trial_id: next_id,
                generation,
                genome,
                fitness: f,
                parent_ids: child.parent_ids.to_vec(),
                coefficients: coefficients(&child.genes),
            };
            sink.append(&record)?;
            trials += 1;
            if generation_best.as_ref().is_none_or(|b| f > b.fitness) {
                generation_best = Some(record);
            }
            next_population.push(Slot {
                trial_id: next_id,
                genes: child.genes,
                fitness: f,
            });
            next_id += 1;
        }
        population = next_population;

        let current = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.fitness);
        match generation_best {
            Some(g) if g.fitness > current + STALL_EPSILON => {
                best = Some(g);
                stall = 0;
            }
            _ => stall += 1,
        }
        best_per_generation.push(best.as_ref().map_or(f64::NEG_INFINITY, |b| b.fitness));
    }

    Ok(RunSummary {
        best: best.expect("generation 0 is never empty"),
        generations: generation as usize + 1,
        evaluations,
        trials,
        best_per_generation,
    })
}
