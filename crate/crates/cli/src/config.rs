//! Scenario lists from presets or TOML files.
//!
//! A config file has an optional `master_seed`, an optional `[defaults]`
//! table and one `[[scenario]]` table per scenario. Both tables accept the
//! same keys; a scenario's keys override the defaults, which override the
//! built-in values.
//!
//! ```toml
//! master_seed = 7
//!
//! [defaults]
//! replications = 500
//! alpha = 0.5
//!
//! [[scenario]]
//! structure = "interdependent"   # decomposed | interdependent | roll | file
//! k = 5
//! learn_prob = 0.25
//! tau = 10                       # or "none" for a single auction
//!
//! [[scenario]]
//! structure = "file"
//! matrix_file = "cross.ixm"      # relative to the config file
//! learn_prob = 0.5
//! tau = "none"
//! ```
//!
//! Other keys: `beta`, `n`, `m_subtasks`, `p_total`, `horizon`,
//! `learning_scope` (`all` | `members-only`) and `event_order`
//! (`learn-after-decision` | `learn-first`). Giving only one of `alpha` and
//! `beta` sets the other to the complement.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use orgsim::engine::{AuctionSchedule, EventOrder, LearningScope, Scenario, Structure};
use orgsim::landscape::InterdependenceMatrix;
use orgsim::metrics::{LEARN_LEVELS, SCHEDULE_LEVELS};
use orgsim::population::IncentiveScheme;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Decomposed (K=3) and interdependent (K=5) tasks, balanced incentives.
    PaperMain,
    /// Roll structures with K=3 and K=5.
    PaperRoll,
    /// As paper-main with alpha = 0.75.
    PaperIndividualism,
    /// As paper-main with alpha = 0.25.
    PaperCollectivism,
    /// Scenarios come from `--config`.
    Custom,
}

fn grid(structures: &[Structure], alpha: f64) -> Vec<Scenario> {
    let scheme = IncentiveScheme::new(alpha, 1.0 - alpha).expect("preset weights are valid");
    let mut out = Vec::new();
    for structure in structures {
        for (p, _) in LEARN_LEVELS {
            for (schedule, _) in SCHEDULE_LEVELS {
                let mut s = Scenario::new(structure.clone(), p, schedule);
                s.scheme = scheme;
                out.push(s);
            }
        }
    }
    out
}

/// The 18-scenario grid behind a preset. `Custom` expands to nothing.
pub fn preset(preset: Preset) -> Vec<Scenario> {
    let main = [Structure::Decomposed { k: 3 }, Structure::Interdependent { k: 5 }];
    match preset {
        Preset::PaperMain => grid(&main, 0.5),
        Preset::PaperRoll => grid(&[Structure::Roll { k: 3 }, Structure::Roll { k: 5 }], 0.5),
        Preset::PaperIndividualism => grid(&main, 0.75),
        Preset::PaperCollectivism => grid(&main, 0.25),
        Preset::Custom => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum StructureName {
    Decomposed,
    Interdependent,
    Roll,
    File,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Tau {
    Every(usize),
    Keyword(String),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ScopeName {
    All,
    MembersOnly,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum OrderName {
    LearnAfterDecision,
    LearnFirst,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    structure: Option<StructureName>,
    k: Option<usize>,
    matrix_file: Option<PathBuf>,
    learn_prob: Option<f64>,
    tau: Option<Tau>,
    alpha: Option<f64>,
    beta: Option<f64>,
    n: Option<usize>,
    m_subtasks: Option<usize>,
    p_total: Option<usize>,
    horizon: Option<usize>,
    replications: Option<usize>,
    learning_scope: Option<ScopeName>,
    event_order: Option<OrderName>,
}

impl Params {
    fn over(self, base: &Params) -> Params {
        let b = base.clone();
        Params {
            structure: self.structure.or(b.structure),
            k: self.k.or(b.k),
            matrix_file: self.matrix_file.or(b.matrix_file),
            learn_prob: self.learn_prob.or(b.learn_prob),
            tau: self.tau.or(b.tau),
            // a scenario that sets either weight replaces both defaults
            alpha: if self.alpha.is_some() || self.beta.is_some() { self.alpha } else { b.alpha },
            beta: if self.alpha.is_some() || self.beta.is_some() { self.beta } else { b.beta },
            n: self.n.or(b.n),
            m_subtasks: self.m_subtasks.or(b.m_subtasks),
            p_total: self.p_total.or(b.p_total),
            horizon: self.horizon.or(b.horizon),
            replications: self.replications.or(b.replications),
            learning_scope: self.learning_scope.or(b.learning_scope),
            event_order: self.event_order.or(b.event_order),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    master_seed: Option<u64>,
    #[serde(default)]
    defaults: Params,
    #[serde(default, rename = "scenario")]
    scenarios: Vec<Params>,
}

/// Loads a structure from the text matrix format; the file stem names it.
pub fn structure_from_file(path: &Path) -> Result<Structure, CliError> {
    let matrix = InterdependenceMatrix::load(path).map_err(|e| CliError::Config(e.to_string()))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix").to_string();
    Ok(Structure::FromFile { name, matrix: Arc::new(matrix) })
}

fn build(index: usize, p: Params, base_dir: &Path, master_seed: u64) -> Result<Scenario, CliError> {
    let err = |msg: String| CliError::Config(format!("scenario {}: {msg}", index + 1));
    let n = p.n.unwrap_or(Scenario::DEFAULT_N);
    let m = p.m_subtasks.unwrap_or(Scenario::DEFAULT_M);
    let block = n.checked_div(m).unwrap_or(0);
    let structure = match p.structure.ok_or_else(|| err("missing `structure`".into()))? {
        StructureName::Decomposed => Structure::Decomposed { k: p.k.unwrap_or(block.saturating_sub(1)) },
        StructureName::Interdependent => Structure::Interdependent { k: p.k.unwrap_or(5) },
        StructureName::Roll => Structure::Roll { k: p.k.unwrap_or(3) },
        StructureName::File => {
            let file = p.matrix_file.as_ref().ok_or_else(|| err("structure \"file\" needs `matrix_file`".into()))?;
            let structure = structure_from_file(&base_dir.join(file)).map_err(|e| err(e.to_string()))?;
            if let Some(k) = p.k.filter(|&k| k != structure.k()) {
                return Err(err(format!("k = {k} does not match the matrix file (K = {})", structure.k())));
            }
            structure
        }
    };
    if p.matrix_file.is_some() && !matches!(structure, Structure::FromFile { .. }) {
        return Err(err("`matrix_file` requires structure = \"file\"".into()));
    }
    let schedule = match p.tau {
        None => AuctionSchedule::Once,
        Some(Tau::Every(tau)) => AuctionSchedule::Every(tau),
        Some(Tau::Keyword(word)) if word.eq_ignore_ascii_case("none") => AuctionSchedule::Once,
        Some(Tau::Keyword(word)) => return Err(err(format!("tau must be a positive integer or \"none\", got {word:?}"))),
    };
    let scheme = match (p.alpha, p.beta) {
        (None, None) => Ok(IncentiveScheme::balanced()),
        (Some(a), None) => IncentiveScheme::new(a, 1.0 - a),
        (None, Some(b)) => IncentiveScheme::new(1.0 - b, b),
        (Some(a), Some(b)) => IncentiveScheme::new(a, b),
    }
    .map_err(|e| err(e.to_string()))?;

    let mut scenario = Scenario::new(structure, p.learn_prob.unwrap_or(0.0), schedule);
    scenario.scheme = scheme;
    scenario.n = n;
    scenario.m_subtasks = m;
    scenario.p_total = p.p_total.unwrap_or(Scenario::DEFAULT_P);
    scenario.horizon = p.horizon.unwrap_or(Scenario::DEFAULT_HORIZON);
    scenario.replications = p.replications.unwrap_or(Scenario::DEFAULT_REPLICATIONS);
    scenario.master_seed = master_seed;
    scenario.learning_scope = match p.learning_scope {
        Some(ScopeName::MembersOnly) => LearningScope::MembersOnly,
        _ => LearningScope::All,
    };
    scenario.event_order = match p.event_order {
        Some(OrderName::LearnFirst) => EventOrder::LearnFirst,
        _ => EventOrder::LearnAfterDecision,
    };
    scenario.validate().map_err(|e| err(e.to_string()))?;
    Ok(scenario)
}

/// Parses config text. Relative matrix paths resolve against `base_dir`.
pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<Vec<Scenario>, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if file.scenarios.is_empty() {
        return Err(CliError::Config("no scenarios: add at least one [[scenario]] table".into()));
    }
    let seed = file.master_seed.unwrap_or(0);
    let scenarios = file
        .scenarios
        .into_iter()
        .enumerate()
        .map(|(i, p)| build(i, p.over(&file.defaults), base_dir, seed))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, a) in scenarios.iter().enumerate() {
        if let Some(j) = scenarios[..i].iter().position(|b| b.label() == a.label()) {
            return Err(CliError::Config(format!(
                "scenarios {} and {} share the label {}",
                j + 1,
                i + 1,
                a.label()
            )));
        }
    }
    Ok(scenarios)
}

pub fn parse_config(path: &Path) -> Result<Vec<Scenario>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&text, base).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
