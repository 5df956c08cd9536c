use crate::error::{Error, Result};

use super::solution::{mask, splice_bits};
use super::{Landscape, Solution};

/// Landscapes up to this size get a precomputed block-mean table.
const CACHE_LIMIT: usize = 16;

/// A landscape split into `M` equal subtask blocks.
///
/// Block means are `(sum of the block's S contributions, ascending) / S`.
/// For small N they are precomputed for every full bitstring; the cached
/// and direct paths perform the same arithmetic.
#[derive(Debug, Clone)]
pub struct Task {
    landscape: Landscape,
    m_subtasks: usize,
    block_len: usize,
    block_means: Option<Vec<f64>>,
}

impl Task {
    pub fn new(landscape: Landscape, m_subtasks: usize) -> Result<Self> {
        let n = landscape.n();
        if m_subtasks == 0 || !n.is_multiple_of(m_subtasks) {
            return Err(Error::InvalidDivisibility { total: n, parts: m_subtasks });
        }
        let mut task = Task { landscape, m_subtasks, block_len: n / m_subtasks, block_means: None };
        if n <= CACHE_LIMIT {
            let mut cache = Vec::with_capacity(m_subtasks << n);
            for bits in 0..1u32 << n {
                cache.extend((0..m_subtasks).map(|b| task.compute_block_mean(bits, b)));
            }
            task.block_means = Some(cache);
        }
        Ok(task)
    }

    pub fn landscape(&self) -> &Landscape {
        &self.landscape
    }

    pub fn m_subtasks(&self) -> usize {
        self.m_subtasks
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn n(&self) -> usize {
        self.landscape.n()
    }

    /// Mean contribution of block `block` under full solution `d`.
    pub fn block_mean(&self, d: &Solution, block: usize) -> Result<f64> {
        if d.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: d.len() });
        }
        if block >= self.m_subtasks {
            return Err(Error::IndexOutOfRange { index: block, len: self.m_subtasks });
        }
        Ok(self.block_mean_bits(d.bits(), block))
    }

    #[inline]
    pub(crate) fn block_mean_bits(&self, bits: u32, block: usize) -> f64 {
        match &self.block_means {
            Some(cache) => cache[bits as usize * self.m_subtasks + block],
            None => self.compute_block_mean(bits, block),
        }
    }

    #[inline]
    pub(crate) fn splice_bits(&self, full: u32, block: usize, part: u32) -> u32 {
        splice_bits(full, self.n(), block, part & mask(self.block_len), self.block_len)
    }

    fn compute_block_mean(&self, bits: u32, block: usize) -> f64 {
        let start = block * self.block_len;
        let sum: f64 = (start..start + self.block_len)
            .map(|n| self.landscape.contribution_bits(bits, n))
            .sum();
        sum / self.block_len as f64
    }
}
