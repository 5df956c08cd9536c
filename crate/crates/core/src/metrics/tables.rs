//! CSV tables laid out like the published result tables.
//!
//! | file | rows | columns |
//! |------|------|---------|
//! | `table2.csv` | composition x measure | family x learning level: mean/final performance |
//! | `table3.csv` | adaptation step x measure | family x learning step: interaction coefficient |
//! | `table4.csv` | composition x measure | family x learning step: relative gain from learning |
//! | `table5.csv` | learning level x measure | family x adaptation step: relative gain from adaptation |
//! | `significance.csv` | one row per test | long format |
//!
//! Numbers are rounded half away from zero; performances and coefficients
//! get four decimals, relative changes are percentages with two.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{interaction_coefficient, offsetting_effect, significance, Measure, ScenarioReport, SignificanceTest};
use crate::engine::AuctionSchedule;
use crate::error::{Error, Result};

pub const LEARN_LEVELS: [(f64, &str); 3] = [(0.0, "Zero"), (0.25, "Moderate"), (0.5, "High")];
pub const SCHEDULE_LEVELS: [(AuctionSchedule, &str); 3] = [
    (AuctionSchedule::Once, "Long-term"),
    (AuctionSchedule::Every(10), "Medium-term"),
    (AuctionSchedule::Every(1), "Short-term"),
];

/// Rounds half away from zero and prints `decimals` digits.
pub fn format_fixed(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let rounded = (x * scale).round() / scale;
    let s = format!("{rounded:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn percent(x: Result<f64>) -> String {
    x.map(|v| format!("{}%", format_fixed(v * 100.0, 2))).unwrap_or_else(|_| "undefined".into())
}

fn coefficient(x: Result<f64>) -> String {
    x.map(|v| format_fixed(v, 4)).unwrap_or_else(|_| "undefined".into())
}

/// One structure/incentive combination with all nine learning x schedule
/// cells present.
#[derive(Debug, Clone)]
pub struct Family<'a> {
    pub label: String,
    /// `cells[learning][schedule]`, indexed like the level constants.
    pub cells: [[&'a ScenarioReport; 3]; 3],
}

impl<'a> Family<'a> {
    pub fn cell(&self, learning: usize, schedule: usize) -> &'a ScenarioReport {
        self.cells[learning][schedule]
    }
}

/// Reports arranged by family, in order of first appearance.
#[derive(Debug, Clone)]
pub struct ResultGrid<'a> {
    families: Vec<Family<'a>>,
}

impl<'a> ResultGrid<'a> {
    /// Fails unless every family has all nine standard cells exactly once.
    /// Reports at non-standard levels are left out.
    pub fn from_reports(reports: &'a [ScenarioReport]) -> Result<Self> {
        let mut partial: Vec<(String, [[Option<&'a ScenarioReport>; 3]; 3])> = Vec::new();
        for report in reports {
            let family = report.scenario.family_label();
            let l = LEARN_LEVELS.iter().position(|(p, _)| *p == report.scenario.learn_prob);
            let s = SCHEDULE_LEVELS.iter().position(|(sch, _)| *sch == report.scenario.schedule);
            let (Some(l), Some(s)) = (l, s) else { continue };
            let idx = match partial.iter().position(|(f, _)| *f == family) {
                Some(i) => i,
                None => {
                    partial.push((family, [[None; 3]; 3]));
                    partial.len() - 1
                }
            };
            let slot = &mut partial[idx].1[l][s];
            if slot.is_some() {
                return Err(Error::IncompleteGrid(format!("duplicate scenario {}", report.label)));
            }
            *slot = Some(report);
        }
        if partial.is_empty() {
            return Err(Error::IncompleteGrid("no scenario at the standard learning/schedule levels".into()));
        }
        let families = partial
            .into_iter()
            .map(|(label, cells)| {
                let mut full = [[&reports[0]; 3]; 3];
                for l in 0..3 {
                    for s in 0..3 {
                        full[l][s] = cells[l][s].ok_or_else(|| {
                            Error::IncompleteGrid(format!(
                                "{label} lacks learning {} with {} composition",
                                LEARN_LEVELS[l].1, SCHEDULE_LEVELS[s].1
                            ))
                        })?;
                    }
                }
                Ok(Family { label, cells: full })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ResultGrid { families })
    }

    pub fn families(&self) -> &[Family<'a>] {
        &self.families
    }

    /// Mean and final performance by composition and learning level.
    pub fn performance_table(&self) -> String {
        let mut out = String::from("group_composition,performance");
        for f in &self.families {
            for (_, name) in LEARN_LEVELS {
                let _ = write!(out, ",{}:{}", f.label, name);
            }
        }
        out.push('\n');
        for (s, (_, comp)) in SCHEDULE_LEVELS.iter().enumerate() {
            for measure in Measure::BOTH {
                let _ = write!(out, "{comp},{}", measure.name());
                for f in &self.families {
                    for l in 0..3 {
                        let _ = write!(out, ",{}", format_fixed(f.cell(l, s).value(measure), 4));
                    }
                }
                out.push('\n');
            }
        }
        out
    }

    /// Interaction coefficients relative to zero learning, long-term
    /// composition.
    pub fn interaction_table(&self) -> String {
        let mut out = String::from("group_composition,performance");
        for f in &self.families {
            let _ = write!(out, ",{0}:Zero to moderate,{0}:Zero to high", f.label);
        }
        out.push('\n');
        for (s, (_, comp)) in SCHEDULE_LEVELS.iter().enumerate().skip(1) {
            for measure in Measure::BOTH {
                let _ = write!(out, "Long-term to {},{}", comp.to_lowercase(), measure.name());
                for f in &self.families {
                    for l in 1..3 {
                        let ie = interaction_coefficient(
                            f.cell(0, 0).value(measure),
                            f.cell(l, 0).value(measure),
                            f.cell(0, s).value(measure),
                            f.cell(l, s).value(measure),
                        );
                        let _ = write!(out, ",{}", coefficient(ie));
                    }
                }
                out.push('\n');
            }
        }
        out
    }

    /// Relative change from promoting learning at a fixed composition.
    pub fn learning_offset_table(&self) -> String {
        let mut out = String::from("group_composition,performance");
        for f in &self.families {
            let _ = write!(out, ",{0}:Zero to moderate,{0}:Zero to high", f.label);
        }
        out.push('\n');
        for (s, (_, comp)) in SCHEDULE_LEVELS.iter().enumerate() {
            for measure in Measure::BOTH {
                let _ = write!(out, "{comp},{}", measure.name());
                for f in &self.families {
                    for l in 1..3 {
                        let oe = offsetting_effect(f.cell(0, s).value(measure), f.cell(l, s).value(measure));
                        let _ = write!(out, ",{}", percent(oe));
                    }
                }
                out.push('\n');
            }
        }
        out
    }

    /// Relative change from promoting adaptation at a fixed learning level.
    pub fn adaptation_offset_table(&self) -> String {
        let mut out = String::from("learning,performance");
        for f in &self.families {
            let _ = write!(out, ",{0}:Long-term to medium-term,{0}:Long-term to short-term", f.label);
        }
        out.push('\n');
        for (l, (_, level)) in LEARN_LEVELS.iter().enumerate() {
            for measure in Measure::BOTH {
                let _ = write!(out, "{level},{}", measure.name());
                for f in &self.families {
                    for s in 1..3 {
                        let oe = offsetting_effect(f.cell(l, 0).value(measure), f.cell(l, s).value(measure));
                        let _ = write!(out, ",{}", percent(oe));
                    }
                }
                out.push('\n');
            }
        }
        out
    }

    /// Significance of each one-step promotion of learning or adaptation.
    /// Stars and p-values are blank when a sample has fewer than two runs.
    pub fn significance_table(&self, test: SignificanceTest) -> String {
        let mut out = String::from("promotion,family,held_fixed,performance,comparison,stars,p_value\n");
        let row = |out: &mut String, promotion: &str, family: &str, fixed: &str, measure: Measure, cmp: &str, a: &ScenarioReport, b: &ScenarioReport| {
            let (stars, p) = match significance(a.samples(measure), b.samples(measure), test) {
                Ok(s) => (s.stars.to_string(), format!("{:.6e}", s.p_value)),
                Err(_) => (String::new(), String::new()),
            };
            let _ = writeln!(out, "{promotion},{family},{fixed},{},{cmp},{stars},{p}", measure.name());
        };
        for f in &self.families {
            for (s, (_, comp)) in SCHEDULE_LEVELS.iter().enumerate() {
                for measure in Measure::BOTH {
                    row(&mut out, "learning", &f.label, comp, measure, "Zero to moderate", f.cell(0, s), f.cell(1, s));
                    row(&mut out, "learning", &f.label, comp, measure, "Moderate to high", f.cell(1, s), f.cell(2, s));
                }
            }
            for (l, (_, level)) in LEARN_LEVELS.iter().enumerate() {
                for measure in Measure::BOTH {
                    row(&mut out, "adaptation", &f.label, level, measure, "Long-term to medium-term", f.cell(l, 0), f.cell(l, 1));
                    row(&mut out, "adaptation", &f.label, level, measure, "Medium-term to short-term", f.cell(l, 1), f.cell(l, 2));
                }
            }
        }
        out
    }
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the four result tables and `significance.csv` into `dir`.
pub fn write_tables(reports: &[ScenarioReport], dir: &Path, test: SignificanceTest) -> Result<Vec<PathBuf>> {
    let grid = ResultGrid::from_reports(reports)?;
    Ok(vec![
        write_file(dir.join("table2.csv"), &grid.performance_table())?,
        write_file(dir.join("table3.csv"), &grid.interaction_table())?,
        write_file(dir.join("table4.csv"), &grid.learning_offset_table())?,
        write_file(dir.join("table5.csv"), &grid.adaptation_offset_table())?,
        write_file(dir.join("significance.csv"), &grid.significance_table(test))?,
    ])
}

/// One `series/<label>.csv` per scenario with the per-period means.
pub fn write_series(reports: &[ScenarioReport], dir: &Path) -> Result<Vec<PathBuf>> {
    reports
        .iter()
        .map(|r| {
            let mut out = String::from("period,mean_normalized_performance\n");
            for (t, v) in r.series.iter().enumerate() {
                let _ = writeln!(out, "{},{v:.10}", t + 1);
            }
            write_file(dir.join("series").join(format!("{}.csv", r.label)), &out)
        })
        .collect()
}

/// `summary.csv`: one row per scenario.
pub fn write_summary(reports: &[ScenarioReport], dir: &Path) -> Result<PathBuf> {
    let mut out = String::from("scenario,structure,k,learn_prob,tau,alpha,beta,replications,horizon,mean,final\n");
    for r in reports {
        let s = &r.scenario;
        let tau = s.schedule.tau().map(|t| t.to_string()).unwrap_or_else(|| "none".into());
        let _ = writeln!(
            out,
            "{},{},{},{},{tau},{},{},{},{},{},{}",
            r.label,
            s.structure.label(),
            s.structure.k(),
            s.learn_prob,
            s.scheme.alpha(),
            s.scheme.beta(),
            r.replications,
            r.series.len(),
            format_fixed(r.mean_performance, 4),
            format_fixed(r.final_performance, 4),
        );
    }
    write_file(dir.join("summary.csv"), &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Scenario, Structure};

    fn report(structure: Structure, l: usize, s: usize, base: f64) -> ScenarioReport {
        let scenario = Scenario::new(structure, LEARN_LEVELS[l].0, SCHEDULE_LEVELS[s].0);
        let v = base + 0.01 * (3 * l + s) as f64;
        ScenarioReport {
            label: scenario.label(),
            scenario,
            series: vec![v - 0.001, v],
            final_performance: v,
            mean_performance: v - 0.0005,
            finals: vec![v - 0.01, v, v + 0.01],
            time_means: vec![v - 0.01, v, v + 0.01],
            replications: 3,
        }
    }

    fn grid_reports() -> Vec<ScenarioReport> {
        let mut out = Vec::new();
        for structure in [Structure::Decomposed { k: 3 }, Structure::Interdependent { k: 5 }] {
            for l in 0..3 {
                for s in 0..3 {
                    out.push(report(structure.clone(), l, s, 0.8));
                }
            }
        }
        out
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(format_fixed(0.12345, 4), "0.1235");
        assert_eq!(format_fixed(0.8697, 4), "0.8697");
        assert_eq!(format_fixed(-6.775, 2), "-6.78");
        assert_eq!(format_fixed(-0.00001, 4), "0.0000");
        assert_eq!(format_fixed(1.0, 4), "1.0000");
    }

    #[test]
    fn performance_table_addressing() {
        let reports = grid_reports();
        let grid = ResultGrid::from_reports(&reports).unwrap();
        let table = grid.performance_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[0].starts_with("group_composition,performance,decomp_K3_a0.5:Zero"));
        // Long-term / Final / decomposed / zero learning is the baseline cell
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(&cells[..3], &["Long-term", "Final", "0.8000"]);
        assert_eq!(cells.len(), 2 + 6);
    }

    #[test]
    fn derived_tables_have_expected_shape() {
        let reports = grid_reports();
        let grid = ResultGrid::from_reports(&reports).unwrap();
        assert_eq!(grid.families().len(), 2);
        assert_eq!(grid.interaction_table().lines().count(), 5);
        assert_eq!(grid.learning_offset_table().lines().count(), 7);
        assert_eq!(grid.adaptation_offset_table().lines().count(), 7);
        // 2 families x (3 schedules + 3 learning levels) x 2 measures x 2 comparisons
        assert_eq!(grid.significance_table(SignificanceTest::Welch).lines().count(), 1 + 48);
        // values are linear in the indices, so every interaction coefficient is 1
        assert!(grid.interaction_table().lines().skip(1).all(|l| l.split(',').skip(2).all(|c| c == "1.0000")));
    }

    #[test]
    fn incomplete_grid_is_rejected() {
        let mut reports = grid_reports();
        reports.remove(4);
        assert!(matches!(ResultGrid::from_reports(&reports), Err(Error::IncompleteGrid(_))));
        let mut dup = grid_reports();
        dup.push(dup[0].clone());
        assert!(ResultGrid::from_reports(&dup).is_err());
    }

    #[test]
    fn single_run_has_no_stars() {
        let mut reports = grid_reports();
        for r in reports.iter_mut() {
            r.finals.truncate(1);
            r.time_means.truncate(1);
            r.replications = 1;
        }
        let grid = ResultGrid::from_reports(&reports).unwrap();
        let sig = grid.significance_table(SignificanceTest::Welch);
        assert!(sig.lines().skip(1).all(|l| l.ends_with(",,")));
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let reports = grid_reports();
        let written = write_tables(&reports, dir.path(), SignificanceTest::Welch).unwrap();
        assert_eq!(written.len(), 5);
        let series = write_series(&reports, dir.path()).unwrap();
        assert_eq!(series.len(), 18);
        assert!(dir.path().join("series/decomp_K3_P0_tauNone_a0.5.csv").exists());
        let summary = fs::read_to_string(write_summary(&reports, dir.path()).unwrap()).unwrap();
        assert_eq!(summary.lines().count(), 19);
    }
}
