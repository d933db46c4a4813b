//! Generational genetic algorithm over quantized phase genomes.
//!
//! Operators: tournament selection (ties go to the lower trial id),
//! one-point crossover at a uniform cut, per-gene uniform-reset mutation and
//! elitism. All random draws are made by the single coordinator in a fixed
//! order, so an evaluator that runs fitness calls concurrently cannot change
//! the outcome.

mod engine;
mod reduced;

use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Genome, Result};

pub use reduced::{reduced_search, ReducedBasis, ReducedConfig};

/// Improvement smaller than this does not reset the stall counter.
pub const STALL_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GaConfig {
    /// Genome length n.
    pub genes: usize,
    /// Quantization levels L per gene.
    pub levels: u32,
    pub population_size: usize,
    /// Upper bound on generations executed, counting generation 0.
    pub max_generations: usize,
    /// Stop after this many consecutive generations without improvement.
    pub stall_generations: usize,
    pub mutation_prob: f64,
    pub tournament_size: usize,
    /// 0 disables elitism.
    pub elite_count: usize,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            genes: 25,
            levels: 32,
            population_size: 50,
            max_generations: 40,
            stall_generations: 10,
            mutation_prob: 0.03,
            tournament_size: 3,
            elite_count: 2,
            rng_seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.into()));
        if self.genes == 0 {
            return fail("genome length must be positive");
        }
        if self.levels < 2 || !self.levels.is_power_of_two() {
            return fail("levels must be a power of two >= 2");
        }
        if self.population_size < 2 {
            return fail("population_size must be at least 2");
        }
        if self.elite_count >= self.population_size {
            return fail("elite_count must be smaller than population_size");
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return fail("mutation_prob must lie in [0, 1]");
        }
        if self.tournament_size < 2 {
            return fail("tournament_size must be at least 2");
        }
        if self.max_generations == 0 {
            return fail("max_generations must be positive");
        }
        Ok(())
    }
}

/// One evaluated pulse shape and its parentage.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub generation: u32,
    pub genome: Genome,
    pub fitness: f64,
    /// Empty in generation 0, otherwise exactly two ids from the previous
    /// generation. Elites list themselves twice.
    pub parent_ids: Vec<u64>,
    /// Principal-basis coordinates for reduced-basis trials, empty otherwise.
    pub coefficients: Vec<f64>,
}

/// A fitness functional over genomes.
pub trait Fitness {
    fn fitness(&self, genome: &Genome) -> Result<f64>;
}

impl<F> Fitness for F
where
    F: Fn(&Genome) -> f64,
{
    fn fitness(&self, genome: &Genome) -> Result<f64> {
        Ok(self(genome))
    }
}

/// Evaluates a batch of genomes, returning fitnesses in input order.
pub trait Evaluator {
    fn evaluate(&self, genomes: &[Genome]) -> Result<Vec<f64>>;
}

impl<F: Fitness> Evaluator for F {
    fn evaluate(&self, genomes: &[Genome]) -> Result<Vec<f64>> {
        genomes.iter().map(|g| self.fitness(g)).collect()
    }
}

/// Destination for trial records, written in trial-id order.
pub trait TrialSink {
    fn append(&mut self, record: &TrialRecord) -> Result<()>;
}

impl TrialSink for Vec<TrialRecord> {
    fn append(&mut self, record: &TrialRecord) -> Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

impl<S: TrialSink + ?Sized> TrialSink for &mut S {
    fn append(&mut self, record: &TrialRecord) -> Result<()> {
        (**self).append(record)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub best: TrialRecord,
    /// Generations executed, counting generation 0.
    pub generations: usize,
    /// Fitness-function calls. Elites are carried over, not re-evaluated.
    pub evaluations: usize,
    /// Records written.
    pub trials: usize,
    /// Best-so-far fitness after each generation.
    pub best_per_generation: Vec<f64>,
}

/// A member of the current generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub trial_id: u64,
    pub genome: Genome,
    pub fitness: f64,
}

/// A slot of the next generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Offspring {
    pub genome: Genome,
    pub parent_ids: [u64; 2],
    /// Set for elites, whose fitness is carried over.
    pub inherited_fitness: Option<f64>,
}

/// `population_size` genomes with genes uniform over `0..levels`.
pub fn init_population<R: Rng>(config: &GaConfig, rng: &mut R) -> Vec<Genome> {
    let rep = engine::Levels {
        len: config.genes,
        levels: config.levels,
    };
    engine::init(&rep, config.population_size, rng)
        .into_iter()
        .map(|genes| Genome::new(genes, config.levels).expect("levels validated"))
        .collect()
}

/// Genes of `a` before `cut`, genes of `b` from `cut` on.
pub fn one_point_crossover(a: &Genome, b: &Genome, cut: usize) -> Genome {
    let genes = engine::crossover(a.genes(), b.genes(), cut);
    Genome::new(genes, a.levels()).expect("parents share levels")
}

/// Breeds the next generation: elites first, then tournament children.
pub fn step_generation<R: Rng>(
    population: &[Member],
    config: &GaConfig,
    rng: &mut R,
) -> Result<Vec<Offspring>> {
    let rep = engine::Levels {
        len: config.genes,
        levels: config.levels,
    };
    let parents: Vec<engine::Parent<'_, u32>> = population
        .iter()
        .map(|m| engine::Parent {
            trial_id: m.trial_id,
            genes: m.genome.genes(),
            fitness: m.fitness,
        })
        .collect();
    let children = engine::breed(&rep, &parents, config, rng)?;
    Ok(children
        .into_iter()
        .map(|c| Offspring {
            genome: Genome::new(c.genes, config.levels).expect("operators keep genes in range"),
            parent_ids: c.parent_ids,
            inherited_fitness: c.inherited_fitness,
        })
        .collect())
}

/// Runs the search until `max_generations` or until the best fitness has not
/// improved for `stall_generations` generations. Every trial is appended to
/// `sink` as soon as its generation has been evaluated.
pub fn run_search<E, S>(config: &GaConfig, evaluator: &E, sink: &mut S) -> Result<RunSummary>
where
    E: Evaluator + ?Sized,
    S: TrialSink + ?Sized,
{
    config.validate()?;
    let rep = engine::Levels {
        len: config.genes,
        levels: config.levels,
    };
    let levels = config.levels;
    engine::run(
        &rep,
        config,
        |genes: &[u32]| Genome::new(genes.to_vec(), levels).expect("valid genes"),
        |_| Vec::new(),
        evaluator,
        sink,
    )
}

#[cfg(test)]
mod tests;
