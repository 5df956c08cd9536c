//! Aggregation of replication traces and the derived effect measures.

mod figures;
mod stats;
mod tables;

pub use figures::series_svg;
pub use stats::{mann_whitney_u, significance, welch_t_test, Significance, SignificanceTest, Stars, SIGNIFICANCE_LEVEL};
pub use tables::{format_fixed, write_series, write_summary, write_tables, Family, ResultGrid, LEARN_LEVELS, SCHEDULE_LEVELS};

use crate::engine::{RunTrace, Scenario};
use crate::error::{Error, Result};

/// Which per-scenario number an effect is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// Mean normalized performance in the last period.
    Final,
    /// Time average of the per-period means.
    Mean,
}

impl Measure {
    pub const BOTH: [Measure; 2] = [Measure::Mean, Measure::Final];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Final => "Final",
            Measure::Mean => "Mean",
        }
    }
}

/// Aggregated results of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub label: String,
    /// Mean normalized performance per period.
    pub series: Vec<f64>,
    pub final_performance: f64,
    pub mean_performance: f64,
    /// Per-replication last-period values, by replication index.
    pub finals: Vec<f64>,
    /// Per-replication time averages, by replication index.
    pub time_means: Vec<f64>,
    pub replications: usize,
}

impl ScenarioReport {
    pub fn value(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Final => self.final_performance,
            Measure::Mean => self.mean_performance,
        }
    }

    /// Per-replication observations behind `value(measure)`.
    pub fn samples(&self, measure: Measure) -> &[f64] {
        match measure {
            Measure::Final => &self.finals,
            Measure::Mean => &self.time_means,
        }
    }
}

/// Averages normalized traces period by period.
///
/// Traces are summed in replication-index order whatever order they are
/// passed in, so the result is bit-identical under permutation.
pub fn aggregate(scenario: Scenario, traces: &[RunTrace]) -> Result<ScenarioReport> {
    let Some(first) = traces.first() else {
        return Err(Error::EmptyInput);
    };
    let horizon = first.len();
    if horizon == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = traces.iter().find(|t| t.len() != horizon) {
        return Err(Error::LengthMismatch { expected: horizon, actual: bad.len() });
    }
    let mut ordered: Vec<&RunTrace> = traces.iter().collect();
    ordered.sort_by_key(|t| t.replication);

    let r = ordered.len() as f64;
    let series: Vec<f64> = (0..horizon)
        .map(|t| ordered.iter().map(|trace| trace.normalized[t]).sum::<f64>() / r)
        .collect();
    let mean_performance = series.iter().sum::<f64>() / horizon as f64;
    Ok(ScenarioReport {
        label: scenario.label(),
        scenario,
        final_performance: series[horizon - 1],
        mean_performance,
        series,
        finals: ordered.iter().map(|t| t.final_normalized()).collect(),
        time_means: ordered.iter().map(|t| t.time_mean()).collect(),
        replications: ordered.len(),
    })
}

/// (joint - baseline) / ((learning - baseline) + (adaptation - baseline)).
pub fn interaction_coefficient(baseline: f64, learning: f64, adaptation: f64, joint: f64) -> Result<f64> {
    let denominator = (learning - baseline) + (adaptation - baseline);
    if denominator == 0.0 || !denominator.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    Ok((joint - baseline) / denominator)
}

/// Relative change from the first-stage value to the joint value.
pub fn offsetting_effect(first_stage: f64, joint: f64) -> Result<f64> {
    if first_stage == 0.0 || !first_stage.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    Ok((joint - first_stage) / first_stage)
}

/// Interaction and offsetting effects for one measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effects {
    /// Learning promoted alone, minus baseline.
    pub learning_gain: f64,
    /// Adaptation promoted alone, minus baseline.
    pub adaptation_gain: f64,
    /// Both promoted, minus baseline.
    pub joint_gain: f64,
    /// Both promoted, minus adaptation alone.
    pub joint_over_adaptation: f64,
    /// Both promoted, minus learning alone.
    pub joint_over_learning: f64,
    /// `None` when the isolated gains cancel out.
    pub interaction: Option<f64>,
    /// Relative gain from promoting learning after adaptation.
    pub offset_learning: Option<f64>,
    /// Relative gain from promoting adaptation after learning.
    pub offset_adaptation: Option<f64>,
}

impl Effects {
    pub fn from_values(baseline: f64, learning: f64, adaptation: f64, joint: f64) -> Self {
        Effects {
            learning_gain: learning - baseline,
            adaptation_gain: adaptation - baseline,
            joint_gain: joint - baseline,
            joint_over_adaptation: joint - adaptation,
            joint_over_learning: joint - learning,
            interaction: interaction_coefficient(baseline, learning, adaptation, joint).ok(),
            offset_learning: offsetting_effect(adaptation, joint).ok(),
            offset_adaptation: offsetting_effect(learning, joint).ok(),
        }
    }
}

/// The four corner scenarios of one learning/adaptation comparison.
#[derive(Debug, Clone, Copy)]
pub struct EffectReport<'a> {
    pub baseline: &'a ScenarioReport,
    pub learning: &'a ScenarioReport,
    pub adaptation: &'a ScenarioReport,
    pub joint: &'a ScenarioReport,
}

impl<'a> EffectReport<'a> {
    pub fn new(
        baseline: &'a ScenarioReport,
        learning: &'a ScenarioReport,
        adaptation: &'a ScenarioReport,
        joint: &'a ScenarioReport,
    ) -> Result<Self> {
        let horizon = baseline.series.len();
        for r in [learning, adaptation, joint] {
            if r.series.len() != horizon {
                return Err(Error::LengthMismatch { expected: horizon, actual: r.series.len() });
            }
            if r.scenario.family_label() != baseline.scenario.family_label() {
                return Err(Error::IncompleteGrid(format!(
                    "{} and {} are not comparable",
                    baseline.label, r.label
                )));
            }
        }
        Ok(EffectReport { baseline, learning, adaptation, joint })
    }

    pub fn effects(&self, measure: Measure) -> Effects {
        Effects::from_values(
            self.baseline.value(measure),
            self.learning.value(measure),
            self.adaptation.value(measure),
            self.joint.value(measure),
        )
    }
}
