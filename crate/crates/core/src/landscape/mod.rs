//! NK performance landscapes.
//!
//! Each decision `n` owns a table of `2^(K+1)` payoffs drawn from U(0,1).
//! The table index is the bit pattern (d_n, d_i1, ..., d_iK) read as a
//! binary number with d_n as the most significant bit and the dependencies
//! in ascending order after it.

mod matrix;
mod solution;
mod task;

pub use matrix::{InterdependenceMatrix, StructureKind};
pub use solution::Solution;
pub use task::Task;

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Largest N for which the optimum is found by enumeration.
pub const MAX_DECISIONS: usize = 24;

#[derive(Debug, Clone)]
pub struct Landscape {
    matrix: InterdependenceMatrix,
    tables: Vec<Vec<f64>>,
    seed: u64,
    optimum: Solution,
    optimum_value: f64,
}

impl Landscape {
    /// Draws all payoff tables from a ChaCha8 stream seeded with `seed`,
    /// decision by decision, table entries in index order.
    pub fn generate(matrix: InterdependenceMatrix, seed: u64) -> Result<Self> {
        check_size(matrix.n())?;
        let mut rng = SimRng::seed_from_u64(seed);
        let width = 1usize << (matrix.k() + 1);
        let tables = (0..matrix.n())
            .map(|_| (0..width).map(|_| rng.random::<f64>()).collect())
            .collect();
        Self::assemble(matrix, tables, seed)
    }

    /// Builds a landscape from explicit payoff tables.
    pub fn from_tables(matrix: InterdependenceMatrix, tables: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        check_size(matrix.n())?;
        if tables.len() != matrix.n() {
            return Err(Error::LengthMismatch { expected: matrix.n(), actual: tables.len() });
        }
        let width = 1usize << (matrix.k() + 1);
        for (n, table) in tables.iter().enumerate() {
            if table.len() != width {
                return Err(Error::InvalidTable(format!("table {n} has {} entries, expected {width}", table.len())));
            }
            if let Some(v) = table.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidTable(format!("table {n} holds {v}, outside [0, 1]")));
            }
        }
        Self::assemble(matrix, tables, seed)
    }

    fn assemble(matrix: InterdependenceMatrix, tables: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let mut landscape = Landscape { matrix, tables, seed, optimum: Solution::from_raw(0, 0), optimum_value: 0.0 };
        let (optimum, value) = landscape.enumerate_optimum()?;
        landscape.optimum = optimum;
        landscape.optimum_value = value;
        Ok(landscape)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &InterdependenceMatrix {
        &self.matrix
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Payoff of decision `n` under the full solution `d`.
    pub fn contribution(&self, d: &Solution, n: usize) -> Result<f64> {
        self.check_full(d)?;
        if n >= self.n() {
            return Err(Error::IndexOutOfRange { index: n, len: self.n() });
        }
        Ok(self.contribution_bits(d.bits(), n))
    }

    /// Mean payoff over all N decisions.
    pub fn performance(&self, d: &Solution) -> Result<f64> {
        self.check_full(d)?;
        Ok(self.performance_bits(d.bits()))
    }

    /// The cached maximum and its bitstring (lowest bitstring on ties).
    pub fn global_optimum(&self) -> (Solution, f64) {
        (self.optimum, self.optimum_value)
    }

    /// Exhaustive scan over all `2^N` bitstrings. Strict improvement only,
    /// so the first (lowest) maximizer wins ties.
    pub fn enumerate_optimum(&self) -> Result<(Solution, f64)> {
        check_size(self.n())?;
        let mut best = (0u32, f64::NEG_INFINITY);
        for bits in 0..1u32 << self.n() {
            let value = self.performance_bits(bits);
            if value > best.1 {
                best = (bits, value);
            }
        }
        Ok((Solution::from_raw(best.0, self.n()), best.1))
    }

    #[inline]
    pub(crate) fn contribution_bits(&self, bits: u32, n: usize) -> f64 {
        let top = self.n() - 1;
        let mut idx = ((bits >> (top - n)) & 1) as usize;
        for &j in self.matrix.row(n) {
            idx = (idx << 1) | ((bits >> (top - j)) & 1) as usize;
        }
        self.tables[n][idx]
    }

    #[inline]
    pub(crate) fn performance_bits(&self, bits: u32) -> f64 {
        let sum: f64 = (0..self.n()).map(|n| self.contribution_bits(bits, n)).sum();
        sum / self.n() as f64
    }

    fn check_full(&self, d: &Solution) -> Result<()> {
        if d.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: d.len() });
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DECISIONS {
        return Err(Error::TooLarge { n, max: MAX_DECISIONS });
    }
    Ok(())
}
