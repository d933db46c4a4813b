use pcontrol_core::ga::{Evaluator, Fitness};
use pcontrol_core::{Genome, Result};
use rayon::prelude::*;

/// Scores a generation on the rayon pool. Results come back in input order
/// and the search draws no random numbers here, so runs stay reproducible.
#[derive(Debug, Clone, Copy)]
pub struct Parallel<F>(pub F);

impl<F: Fitness + Sync> Evaluator for Parallel<F> {
    fn evaluate(&self, genomes: &[Genome]) -> Result<Vec<f64>> {
        genomes.par_iter().map(|g| self.0.fitness(g)).collect()
    }
}
