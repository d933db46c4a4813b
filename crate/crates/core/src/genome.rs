use alloc::vec::Vec;

use crate::{Error, Result};

/// Quantized spectral-phase genes. Gene `g` encodes the phase `2π·g/levels`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Genome {
    genes: Vec<u32>,
    levels: u32,
}

impl Genome {
    /// Builds a genome, checking that `levels` is a power of two ≥ 2 and that
    /// every gene lies in `0..levels`.
    pub fn new(genes: Vec<u32>, levels: u32) -> Result<Self> {
        if levels < 2 || !levels.is_power_of_two() {
            return Err(Error::Config(alloc::format!(
                "levels must be a power of two >= 2, got {levels}"
            )));
        }
        if let Some((i, g)) = genes.iter().enumerate().find(|(_, &g)| g >= levels) {
            return Err(Error::Dimension(alloc::format!(
                "gene {i} = {g} outside 0..{levels}"
            )));
        }
        Ok(Self { genes, levels })
    }

    pub fn genes(&self) -> &[u32] {
        &self.genes
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Phase of gene `i` in radians, in `[0, 2π)`.
    pub fn phase(&self, i: usize) -> f64 {
        crate::TAU * self.genes[i] as f64 / self.levels as f64
    }

    pub fn phases(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.genes.len()).map(|i| self.phase(i))
    }

    /// Adds `shift` levels to every gene, modulo `levels`.
    pub fn shifted(&self, shift: u32) -> Self {
        let genes = self
            .genes
            .iter()
            .map(|&g| (g + shift % self.levels) % self.levels)
            .collect();
        Self {
            genes,
            levels: self.levels,
        }
    }

    pub fn into_genes(self) -> Vec<u32> {
        self.genes
    }
}
