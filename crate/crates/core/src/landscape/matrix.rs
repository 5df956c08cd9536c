//! Interdependence structures.
//!
//! Row `n` lists the decisions (other than `n`) that co-determine the payoff
//! of decision `n`, ascending. The text form has one line per row with `x`
//! where row `i` depends on column `j` and `0` elsewhere; the diagonal is
//! always `x`.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    /// Full coupling inside each subtask block, nothing across blocks.
    Decomposed,
    /// Full intra-block coupling plus links to the decisions right after
    /// the block (cyclic).
    Interdependent,
    /// Row `n` depends on `n+1 ..= n+K` modulo N.
    Roll,
    /// Loaded from a matrix file.
    Custom,
}

impl StructureKind {
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Decomposed => "decomposed",
            StructureKind::Interdependent => "interdependent",
            StructureKind::Roll => "roll",
            StructureKind::Custom => "custom",
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterdependenceMatrix {
    n: usize,
    kind: StructureKind,
    k: usize,
    rows: Vec<Vec<usize>>,
}

impl InterdependenceMatrix {
    /// Builds one of the parametric structures for `n` decisions split into
    /// `m_subtasks` equal blocks.
    pub fn build(kind: StructureKind, n: usize, m_subtasks: usize, k: usize) -> Result<Self> {
        if m_subtasks == 0 || n == 0 || !n.is_multiple_of(m_subtasks) {
            return Err(Error::InvalidDivisibility { total: n, parts: m_subtasks });
        }
        if k >= n {
            return Err(Error::KOutOfRange { k, n, reason: "k must be smaller than n" });
        }
        let block = n / m_subtasks;
        let rows: Vec<Vec<usize>> = match kind {
            StructureKind::Decomposed => {
                if k != block - 1 {
                    return Err(Error::DecomposedCrossK { k, expected: block - 1 });
                }
                (0..n)
                    .map(|row| {
                        let start = row / block * block;
                        (start..start + block).filter(|&j| j != row).collect()
                    })
                    .collect()
            }
            StructureKind::Interdependent => {
                if k < block - 1 {
                    return Err(Error::KOutOfRange {
                        k,
                        n,
                        reason: "interdependent structures keep full intra-block coupling (k >= block size - 1)",
                    });
                }
                let extra = k - (block - 1);
                if extra > n - block {
                    return Err(Error::KOutOfRange { k, n, reason: "not enough decisions outside the block" });
                }
                (0..n)
                    .map(|row| {
                        let start = row / block * block;
                        let mut deps: Vec<usize> = (start..start + block).filter(|&j| j != row).collect();
                        deps.extend((0..extra).map(|i| (start + block + i) % n));
                        deps.sort_unstable();
                        deps
                    })
                    .collect()
            }
            StructureKind::Roll => (0..n)
                .map(|row| {
                    let mut deps: Vec<usize> = (1..=k).map(|i| (row + i) % n).collect();
                    deps.sort_unstable();
                    deps
                })
                .collect(),
            StructureKind::Custom => return Err(Error::UnbuildableKind { kind: "custom" }),
        };
        Self::from_rows(kind, rows)
    }

    /// Validates explicit dependency rows. Every row must list the same
    /// number of distinct indices, none equal to the row itself.
    pub fn from_rows(kind: StructureKind, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let k = rows[0].len();
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.len() != k {
                return Err(Error::KOutOfRange { k: row.len(), n, reason: "rows differ in their number of dependencies" });
            }
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidTable(format!("row {i} lists a dependency twice")));
            }
            if let Some(&bad) = row.iter().find(|&&j| j >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
            if row.contains(&i) {
                return Err(Error::InvalidTable(format!("row {i} lists itself as a dependency")));
            }
        }
        if k >= n {
            return Err(Error::KOutOfRange { k, n, reason: "k must be smaller than n" });
        }
        Ok(InterdependenceMatrix { n, kind, k, rows })
    }

    /// Parses the `0`/`x` text form. Blank lines and lines starting with
    /// `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut width = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = lineno + 1;
            let cells: Vec<char> = line.chars().collect();
            let w = *width.get_or_insert(cells.len());
            if cells.len() != w {
                return Err(Error::MatrixFormat {
                    line: lineno,
                    message: format!("expected {w} columns, found {}", cells.len()),
                });
            }
            let row = rows.len();
            let mut deps = Vec::new();
            for (j, c) in cells.iter().enumerate() {
                match c {
                    'x' | 'X' if j == row => {}
                    'x' | 'X' => deps.push(j),
                    '0' if j == row => {
                        return Err(Error::MatrixFormat { line: lineno, message: "diagonal entry must be 'x'".into() })
                    }
                    '0' => {}
                    other => {
                        return Err(Error::MatrixFormat {
                            line: lineno,
                            message: format!("unexpected character {other:?}; use '0' or 'x'"),
                        })
                    }
                }
            }
            if row >= w {
                return Err(Error::MatrixFormat { line: lineno, message: format!("more than {w} rows") });
            }
            rows.push(deps);
        }
        match width {
            None => Err(Error::MatrixFormat { line: 0, message: "no rows".into() }),
            Some(w) if rows.len() != w => Err(Error::MatrixFormat {
                line: 0,
                message: format!("matrix is not square: {} rows, {w} columns", rows.len()),
            }),
            Some(_) => Self::from_rows(StructureKind::Custom, rows).map_err(|e| Error::MatrixFormat {
                line: 0,
                message: e.to_string(),
            }),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            for j in 0..self.n {
                out.push(if i == j || self.depends_on(i, j) { 'x' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn row(&self, n: usize) -> &[usize] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// True if the payoff of decision `i` depends on decision `j` (`i != j`).
    pub fn depends_on(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }
}
