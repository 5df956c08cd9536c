//! Two-sample tests on per-replication statistics.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Two-sided level below which a difference gets `**`.
pub const SIGNIFICANCE_LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SignificanceTest {
    /// Welch's unequal-variance t-test.
    #[default]
    Welch,
    /// Mann-Whitney U with normal approximation, tie and continuity
    /// corrections.
    MannWhitney,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stars {
    Significant,
    NotSignificant,
}

impl fmt::Display for Stars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stars::Significant => "**",
            Stars::NotSignificant => "n.s.",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Significance {
    pub statistic: f64,
    pub p_value: f64,
    pub stars: Stars,
}

impl Significance {
    fn from_p(statistic: f64, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        let stars = if p_value < SIGNIFICANCE_LEVEL { Stars::Significant } else { Stars::NotSignificant };
        Significance { statistic, p_value, stars }
    }
}

pub fn significance(a: &[f64], b: &[f64], test: SignificanceTest) -> Result<Significance> {
    match test {
        SignificanceTest::Welch => welch_t_test(a, b),
        SignificanceTest::MannWhitney => mann_whitney_u(a, b),
    }
}

fn check_sizes(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::SampleTooSmall { a: a.len(), b: b.len() });
    }
    Ok(())
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Two-sided Welch t-test. Two zero-variance samples give p = 1 when their
/// means agree and p = 0 otherwise.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<Significance> {
    check_sizes(a, b)?;
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Ok(if ma == mb {
            Significance::from_p(0.0, 1.0)
        } else {
            Significance::from_p((ma - mb).signum() * f64::INFINITY, 0.0)
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    Ok(Significance::from_p(t, 2.0 * dist.sf(t.abs())))
}

/// Two-sided Mann-Whitney U test; the statistic is U of the first sample.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<Significance> {
    check_sizes(a, b)?;
    let mut pooled: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let ties = (j - i + 1) as f64;
        tie_term += ties * ties * ties - ties;
        rank_sum_a += avg_rank * pooled[i..=j].iter().filter(|p| p.1).count() as f64;
        i = j + 1;
    }

    let (na, nb) = (a.len() as f64, b.len() as f64);
    let nf = n as f64;
    let u = rank_sum_a - na * (na + 1.0) / 2.0;
    let mu = na * nb / 2.0;
    let sigma2 = na * nb / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if sigma2 <= 0.0 {
        return Ok(Significance::from_p(u, 1.0));
    }
    let z = ((u - mu).abs() - 0.5).max(0.0) / sigma2.sqrt();
    let normal = Normal::standard();
    Ok(Significance::from_p(u, 2.0 * normal.sf(z)))
}
