//! Naive reference implementations shared by the integration tests.
#![allow(dead_code)]

use orgsim::landscape::{InterdependenceMatrix, Landscape, Solution, StructureKind};

/// Decision values as a vector of 0/1, position 0 first.
pub fn digits(d: &Solution) -> Vec<usize> {
    d.to_string().chars().map(|c| if c == '1' { 1 } else { 0 }).collect()
}

pub fn naive_contribution(l: &Landscape, d: &[usize], n: usize) -> f64 {
    let mut index = d[n];
    for &j in l.matrix().row(n) {
        index = index * 2 + d[j];
    }
    l.tables()[n][index]
}

pub fn naive_performance(l: &Landscape, d: &[usize]) -> f64 {
    let mut sum = 0.0;
    for n in 0..d.len() {
        sum += naive_contribution(l, d, n);
    }
    sum / d.len() as f64
}

pub fn all_strings(n: usize) -> Vec<String> {
    (0..1u32 << n).map(|v| format!("{v:0n$b}")).collect()
}

pub fn naive_optimum(l: &Landscape) -> (String, f64) {
    let mut best = (String::new(), f64::NEG_INFINITY);
    for s in all_strings(l.n()) {
        let d: Vec<usize> = s.chars().map(|c| (c == '1') as usize).collect();
        let v = naive_performance(l, &d);
        if v > best.1 {
            best = (s, v);
        }
    }
    best
}

pub fn block_mean(l: &Landscape, d: &[usize], block: usize, width: usize) -> f64 {
    let mut sum = 0.0;
    for n in block * width..(block + 1) * width {
        sum += naive_contribution(l, d, n);
    }
    sum / width as f64
}

pub fn naive_utility(l: &Landscape, m: usize, slot: usize, candidate: &str, previous: &str, a: f64, b: f64) -> f64 {
    let width = l.n() / m;
    let mut s: Vec<char> = previous.chars().collect();
    for (i, c) in candidate.chars().enumerate() {
        s[slot * width + i] = c;
    }
    let d: Vec<usize> = s.iter().map(|&c| (c == '1') as usize).collect();
    let own = block_mean(l, &d, slot, width);
    let residual = if m > 1 {
        let mut sum = 0.0;
        for r in (0..m).filter(|&r| r != slot) {
            sum += block_mean(l, &d, r, width);
        }
        sum / (m - 1) as f64
    } else {
        0.0
    };
    a * own + b * residual
}

/// Decomposed, roll and interdependent landscapes for seeds 0..100.
pub fn landscapes(n: usize, m: usize) -> Vec<Landscape> {
    let mut out = Vec::new();
    for seed in 0..100u64 {
        for (kind, k) in [(StructureKind::Decomposed, n / m - 1), (StructureKind::Roll, 1), (StructureKind::Interdependent, n / m)] {
            let matrix = InterdependenceMatrix::build(kind, n, m, k).unwrap();
            out.push(Landscape::generate(matrix, seed).unwrap());
        }
    }
    out
}

