use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A fixed-length bitstring, either a full task vector or one subtask block.
///
/// Position 0 is the leftmost character of the string form and the most
/// significant bit of [`Solution::bits`], so ordering by `bits` is the same
/// as ordering the strings lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    bits: u32,
    len: u8,
}

impl Solution {
    pub const MAX_LEN: usize = 32;

    pub fn new(bits: u32, len: usize) -> Result<Self> {
        if len > Self::MAX_LEN {
            return Err(Error::TooLarge { n: len, max: Self::MAX_LEN });
        }
        if len < 32 && bits >> len != 0 {
            return Err(Error::InvalidBits(format!("{bits:#b} does not fit in {len} bits")));
        }
        Ok(Solution { bits, len: len as u8 })
    }

    pub(crate) fn from_raw(bits: u32, len: usize) -> Self {
        debug_assert!(len <= Self::MAX_LEN && (len == 32 || bits >> len == 0));
        Solution { bits, len: len as u8 }
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len(), "bit {i} out of range for length {}", self.len);
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn flipped(&self, i: usize) -> Solution {
        assert!(i < self.len(), "bit {i} out of range for length {}", self.len);
        Solution { bits: self.bits ^ (1 << (self.len() - 1 - i)), len: self.len }
    }

    pub fn hamming(&self, other: &Solution) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Block `index` of width `width`, counted from the left.
    pub fn block(&self, index: usize, width: usize) -> Result<Solution> {
        let blocks = self.block_count(width)?;
        if index >= blocks {
            return Err(Error::IndexOutOfRange { index, len: blocks });
        }
        let shift = (blocks - 1 - index) * width;
        Ok(Solution::from_raw((self.bits >> shift) & mask(width), width))
    }

    /// Replaces block `index` with `block`, keeping every other bit.
    pub fn splice(&self, index: usize, block: &Solution) -> Result<Solution> {
        let width = block.len();
        let blocks = self.block_count(width)?;
        if index >= blocks {
            return Err(Error::IndexOutOfRange { index, len: blocks });
        }
        Ok(Solution::from_raw(splice_bits(self.bits, self.len(), index, block.bits, width), self.len()))
    }

    /// Concatenates blocks left to right.
    pub fn concat(blocks: &[Solution]) -> Result<Solution> {
        let len: usize = blocks.iter().map(Solution::len).sum();
        if len > Self::MAX_LEN {
            return Err(Error::TooLarge { n: len, max: Self::MAX_LEN });
        }
        let bits = blocks
            .iter()
            .fold(0u64, |acc, b| (acc << b.len()) | u64::from(b.bits));
        Ok(Solution::from_raw(bits as u32, len))
    }

    /// All `2^len` bitstrings of length `len` in ascending order.
    pub fn all(len: usize) -> impl Iterator<Item = Solution> {
        assert!(len < 32, "cannot enumerate {len}-bit strings");
        (0..1u32 << len).map(move |bits| Solution::from_raw(bits, len))
    }

    fn block_count(&self, width: usize) -> Result<usize> {
        if width == 0 || !self.len().is_multiple_of(width) {
            return Err(Error::InvalidDivisibility { total: self.len(), parts: width });
        }
        Ok(self.len() / width)
    }
}

pub(crate) fn mask(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

pub(crate) fn splice_bits(full: u32, full_len: usize, index: usize, block: u32, width: usize) -> u32 {
    let shift = full_len - (index + 1) * width;
    (full & !(mask(width) << shift)) | (block << shift)
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Solution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > Self::MAX_LEN {
            return Err(Error::TooLarge { n: s.len(), max: Self::MAX_LEN });
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::InvalidBits(s.to_string())),
                };
        }
        Ok(Solution::from_raw(bits, s.len()))
    }
}
