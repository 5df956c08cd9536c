//! Front end for running experiment grids and writing their artifacts.

pub mod config;
pub mod output;

use orgsim::engine::{EventOrder, LearningScope, Scenario, Structure};

pub use config::{parse_config, parse_config_str, preset, structure_from_file, Preset};
pub use output::{execute, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] orgsim::Error),
}

impl CliError {
    /// 1 for configuration problems, 2 for failures while running or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Run(_) => 2,
        }
    }
}

/// Command-line settings applied on top of a preset or config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub structure: Option<Structure>,
    pub event_order: Option<EventOrder>,
    pub learning_scope: Option<LearningScope>,
    pub replications: Option<usize>,
    pub horizon: Option<usize>,
}

impl Overrides {
    /// Applies the overrides and drops scenarios that became identical,
    /// e.g. two structures replaced by the same matrix file.
    pub fn apply(&self, scenarios: Vec<Scenario>) -> Result<Vec<Scenario>, CliError> {
        let mut out: Vec<Scenario> = Vec::with_capacity(scenarios.len());
        for mut s in scenarios {
            if let Some(seed) = self.seed {
                s.master_seed = seed;
            }
            if let Some(structure) = &self.structure {
                s.structure = structure.clone();
            }
            if let Some(order) = self.event_order {
                s.event_order = order;
            }
            if let Some(scope) = self.learning_scope {
                s.learning_scope = scope;
            }
            if let Some(r) = self.replications {
                s.replications = r;
            }
            if let Some(t) = self.horizon {
                s.horizon = t;
            }
            s.validate().map_err(|e| CliError::Config(format!("{}: {e}", s.label())))?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }
}
