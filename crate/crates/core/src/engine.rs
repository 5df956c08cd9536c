//! Scenario definition and the per-period event loop.
//!
//! A period runs: (1) an auction if one is scheduled, against last
//! period's solution; (2) every group member picks its best known block
//! against that same solution; (3) the blocks are joined, scored and
//! published; (4) agents learn and forget against the new solution. With
//! [`EventOrder::LearnFirst`] step (4) moves to the front and uses last
//! period's solution instead.

use std::fmt;
use std::hash::Hasher;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use fnv::FnvHasher;
use rand::Rng;
use rayon::prelude::*;

use crate::auction::{run_auction, Group};
use crate::error::{Error, Result};
use crate::landscape::{InterdependenceMatrix, Landscape, Solution, StructureKind, Task};
use crate::metrics::{aggregate, ScenarioReport};
use crate::population::{
    concatenate_group_solution, decide, init_population, learn_forget_step, Agent, IncentiveScheme, ResidualContext,
};
use crate::rng::{replication_seed, SimRng, Streams};

#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Decomposed { k: usize },
    Interdependent { k: usize },
    Roll { k: usize },
    FromFile { name: String, matrix: Arc<InterdependenceMatrix> },
}

impl Structure {
    pub fn k(&self) -> usize {
        match self {
            Structure::Decomposed { k } | Structure::Interdependent { k } | Structure::Roll { k } => *k,
            Structure::FromFile { matrix, .. } => matrix.k(),
        }
    }

    /// Short tag used in scenario labels, e.g. `decomp_K3`.
    pub fn label(&self) -> String {
        match self {
            Structure::Decomposed { k } => format!("decomp_K{k}"),
            Structure::Interdependent { k } => format!("interdep_K{k}"),
            Structure::Roll { k } => format!("roll_K{k}"),
            Structure::FromFile { name, matrix } => format!("file-{name}_K{}", matrix.k()),
        }
    }

    pub fn matrix(&self, n: usize, m_subtasks: usize) -> Result<InterdependenceMatrix> {
        match self {
            Structure::Decomposed { k } => InterdependenceMatrix::build(StructureKind::Decomposed, n, m_subtasks, *k),
            Structure::Interdependent { k } => {
                InterdependenceMatrix::build(StructureKind::Interdependent, n, m_subtasks, *k)
            }
            Structure::Roll { k } => InterdependenceMatrix::build(StructureKind::Roll, n, m_subtasks, *k),
            Structure::FromFile { matrix, .. } => {
                if matrix.n() != n {
                    return Err(Error::LengthMismatch { expected: n, actual: matrix.n() });
                }
                Ok(matrix.as_ref().clone())
            }
        }
    }
}

/// How often the group is re-formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuctionSchedule {
    /// Only in the first period.
    Once,
    /// In period 1 and every `tau` periods after it.
    Every(usize),
}

impl AuctionSchedule {
    pub fn is_auction_period(&self, t: usize) -> bool {
        match *self {
            AuctionSchedule::Once => t == 1,
            AuctionSchedule::Every(tau) => t == 1 || (t >= 1 && (t - 1).is_multiple_of(tau)),
        }
    }

    pub fn count_auctions(&self, horizon: usize) -> usize {
        (1..=horizon).filter(|&t| self.is_auction_period(t)).count()
    }

    pub fn tau(&self) -> Option<usize> {
        match *self {
            AuctionSchedule::Once => None,
            AuctionSchedule::Every(tau) => Some(tau),
        }
    }
}

impl fmt::Display for AuctionSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuctionSchedule::Once => f.write_str("tauNone"),
            AuctionSchedule::Every(tau) => write!(f, "tau{tau}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LearningScope {
    #[default]
    All,
    MembersOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EventOrder {
    #[default]
    LearnAfterDecision,
    LearnFirst,
}

/// One point of an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub structure: Structure,
    pub learn_prob: f64,
    pub schedule: AuctionSchedule,
    pub scheme: IncentiveScheme,
    pub n: usize,
    pub m_subtasks: usize,
    pub p_total: usize,
    pub horizon: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub learning_scope: LearningScope,
    pub event_order: EventOrder,
}

impl Scenario {
    pub const DEFAULT_N: usize = 12;
    pub const DEFAULT_M: usize = 3;
    pub const DEFAULT_P: usize = 30;
    pub const DEFAULT_HORIZON: usize = 200;
    pub const DEFAULT_REPLICATIONS: usize = 1500;

    /// A scenario with every other parameter at its default.
    pub fn new(structure: Structure, learn_prob: f64, schedule: AuctionSchedule) -> Self {
        Scenario {
            structure,
            learn_prob,
            schedule,
            scheme: IncentiveScheme::balanced(),
            n: Self::DEFAULT_N,
            m_subtasks: Self::DEFAULT_M,
            p_total: Self::DEFAULT_P,
            horizon: Self::DEFAULT_HORIZON,
            replications: Self::DEFAULT_REPLICATIONS,
            master_seed: 0,
            learning_scope: LearningScope::All,
            event_order: EventOrder::LearnAfterDecision,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if !(0.0..=1.0).contains(&self.learn_prob) {
            return bad(format!("learning probability {} outside [0, 1]", self.learn_prob));
        }
        if let AuctionSchedule::Every(0) = self.schedule {
            return bad("tau must be a positive integer".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.m_subtasks == 0 || !self.n.is_multiple_of(self.m_subtasks) {
            return bad(format!("n = {} is not divisible by m = {}", self.n, self.m_subtasks));
        }
        if self.p_total == 0 || !self.p_total.is_multiple_of(self.m_subtasks) {
            return bad(format!("p = {} is not divisible by m = {}", self.p_total, self.m_subtasks));
        }
        IncentiveScheme::new(self.scheme.alpha(), self.scheme.beta())?;
        self.structure.matrix(self.n, self.m_subtasks)?;
        if self.n > crate::landscape::MAX_DECISIONS {
            return Err(Error::TooLarge { n: self.n, max: crate::landscape::MAX_DECISIONS });
        }
        Ok(())
    }

    /// Directory-safe name, e.g. `decomp_K3_P0.25_tau10_a0.5`. Non-default
    /// sizes, scope and event order are appended when present.
    pub fn label(&self) -> String {
        format!("{}_P{}_{}_a{}{}", self.structure.label(), self.learn_prob, self.schedule, self.scheme.alpha(), self.suffix())
    }

    /// The label without learning probability and schedule; scenarios
    /// sharing it form one block of a results table.
    pub fn family_label(&self) -> String {
        format!("{}_a{}{}", self.structure.label(), self.scheme.alpha(), self.suffix())
    }

    fn suffix(&self) -> String {
        let mut label = String::new();
        if (self.n, self.m_subtasks, self.p_total) != (Self::DEFAULT_N, Self::DEFAULT_M, Self::DEFAULT_P) {
            label.push_str(&format!("_N{}M{}p{}", self.n, self.m_subtasks, self.p_total));
        }
        if self.learning_scope == LearningScope::MembersOnly {
            label.push_str("_members");
        }
        if self.event_order == EventOrder::LearnFirst {
            label.push_str("_learnfirst");
        }
        label
    }

    /// FNV-1a of everything that shapes a replication except the horizon,
    /// the number of replications and the master seed.
    pub fn hash(&self) -> u64 {
        let mut h = FnvHasher::default();
        h.write(self.label().as_bytes());
        h.write(&self.scheme.beta().to_bits().to_le_bytes());
        if let Structure::FromFile { matrix, .. } = &self.structure {
            h.write(matrix.to_text().as_bytes());
        }
        h.finish()
    }

    pub fn replication_seed(&self, r: usize) -> u64 {
        replication_seed(self.master_seed, self.hash(), r as u64)
    }
}

/// Everything a replication carries from one period to the next.
#[derive(Debug, Clone)]
pub struct ReplicationState {
    task: Task,
    agents: Vec<Agent>,
    current: Solution,
    group: Option<Group>,
    streams: Streams,
    behavior: SimRng,
}

impl ReplicationState {
    /// Fresh landscape, population and random initial solution for
    /// replication `r`.
    pub fn new(scenario: &Scenario, r: usize) -> Result<Self> {
        scenario.validate()?;
        let streams = Streams::new(scenario.replication_seed(r));
        let matrix = scenario.structure.matrix(scenario.n, scenario.m_subtasks)?;
        let landscape = Landscape::generate(matrix, streams.landscape_seed())?;
        let task = Task::new(landscape, scenario.m_subtasks)?;
        let mut setup = streams.setup();
        let agents = init_population(scenario.p_total, scenario.m_subtasks, &task, &mut setup)?;
        let initial = Solution::new(setup.random_range(0..1u64 << scenario.n) as u32, scenario.n)?;
        Ok(ReplicationState { task, agents, current: initial, group: None, streams, behavior: streams.behavior() })
    }

    pub fn task(&self) -> &Task {
        &self.task
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    /// The most recently published full solution.
    pub fn current(&self) -> Solution {
        self.current
    }

    pub fn group(&self) -> Option<&Group> {
        self.group.as_ref()
    }

    pub fn optimum_value(&self) -> f64 {
        self.task.landscape().global_optimum().1
    }

    fn learn(&mut self, scenario: &Scenario, against: Solution) -> Result<()> {
        let members = self.group.as_ref().map(|g| g.members().to_vec()).unwrap_or_default();
        for agent in self.agents.iter_mut() {
            if scenario.learning_scope == LearningScope::MembersOnly && !members.contains(&agent.id()) {
                continue;
            }
            let ctx = ResidualContext::new(against, agent.slot());
            learn_forget_step(agent, &ctx, &scenario.scheme, &self.task, scenario.learn_prob, &mut self.behavior)?;
        }
        Ok(())
    }
}

/// What one period produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    pub period: usize,
    pub solution: Solution,
    pub raw: f64,
    pub normalized: f64,
    /// The group formed this period, if an auction was held.
    pub auction: Option<Group>,
}

/// Advances `state` by period `t` (1-based).
pub fn run_period(state: &mut ReplicationState, t: usize, scenario: &Scenario) -> Result<PeriodRecord> {
    let previous = state.current;
    if scenario.event_order == EventOrder::LearnFirst {
        state.learn(scenario, previous)?;
    }

    let mut auction = None;
    if scenario.schedule.is_auction_period(t) || state.group.is_none() {
        let mut pools: Vec<Vec<&Agent>> = vec![Vec::new(); scenario.m_subtasks];
        for agent in &state.agents {
            pools[agent.slot()].push(agent);
        }
        let streams = state.streams;
        let group = run_auction(&pools, previous, &scenario.scheme, &state.task, t, |slot| streams.auction(t, slot))?;
        auction = Some(group.clone());
        state.group = Some(group);
    }

    let group = state.group.as_ref().expect("group formed above");
    let mut blocks = Vec::with_capacity(scenario.m_subtasks);
    for (slot, &id) in group.members().iter().enumerate() {
        let ctx = ResidualContext::new(previous, slot);
        blocks.push(decide(&state.agents[id], &ctx, &scenario.scheme, &state.task, &mut state.behavior)?);
    }
    let solution = concatenate_group_solution(&blocks, &state.task)?;
    let raw = state.task.landscape().performance(&solution)?;
    let normalized = raw / state.optimum_value();
    state.current = solution;

    if scenario.event_order == EventOrder::LearnAfterDecision {
        state.learn(scenario, solution)?;
    }
    Ok(PeriodRecord { period: t, solution, raw, normalized, auction })
}

/// Per-period results of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub replication: usize,
    pub landscape_seed: u64,
    pub optimum_value: f64,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.normalized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normalized.is_empty()
    }

    pub fn final_normalized(&self) -> f64 {
        *self.normalized.last().expect("traces are never empty")
    }

    pub fn time_mean(&self) -> f64 {
        self.normalized.iter().sum::<f64>() / self.normalized.len() as f64
    }
}

pub fn run_replication(scenario: &Scenario, r: usize) -> Result<RunTrace> {
    run_replication_observed(scenario, r, |_, _| {})
}

/// Like [`run_replication`], calling `observe` after every period.
pub fn run_replication_observed<F>(scenario: &Scenario, r: usize, mut observe: F) -> Result<RunTrace>
where
    F: FnMut(&PeriodRecord, &ReplicationState),
{
    let mut state = ReplicationState::new(scenario, r)?;
    let mut trace = RunTrace {
        replication: r,
        landscape_seed: state.task.landscape().seed(),
        optimum_value: state.optimum_value(),
        raw: Vec::with_capacity(scenario.horizon),
        normalized: Vec::with_capacity(scenario.horizon),
    };
    for t in 1..=scenario.horizon {
        let record = run_period(&mut state, t, scenario)?;
        trace.raw.push(record.raw);
        trace.normalized.push(record.normalized);
        observe(&record, &state);
    }
    Ok(trace)
}

/// Runs replications on a fixed-size worker pool. Results never depend on
/// the pool size: each replication is seeded on its own and reductions are
/// ordered by replication index.
pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `workers == 0` uses the available parallelism.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidScenario(format!("cannot start worker pool: {e}")))?;
        Ok(Runner { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// All replications of `scenario`, in replication order.
    pub fn run_traces(&self, scenario: &Scenario) -> Result<Vec<RunTrace>> {
        self.map_replications(scenario, run_replication)
    }

    /// Calls `job(scenario, r)` for every replication on the pool and
    /// returns the results in replication order. Errors and panics are
    /// reported with the scenario label and replication index.
    pub fn map_replications<T, F>(&self, scenario: &Scenario, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&Scenario, usize) -> Result<T> + Sync,
    {
        scenario.validate()?;
        let label = scenario.label();
        self.pool.install(|| {
            (0..scenario.replications)
                .into_par_iter()
                .map(|r| {
                    catch_unwind(AssertUnwindSafe(|| job(scenario, r)))
                        .unwrap_or_else(|panic| {
                            let message = panic
                                .downcast_ref::<&str>()
                                .map(|s| s.to_string())
                                .or_else(|| panic.downcast_ref::<String>().cloned())
                                .unwrap_or_else(|| "worker panicked".into());
                            Err(Error::Replication { scenario: label.clone(), replication: r, message })
                        })
                        .map_err(|e| match e {
                            e @ Error::Replication { .. } => e,
                            other => Error::Replication {
                                scenario: label.clone(),
                                replication: r,
                                message: other.to_string(),
                            },
                        })
                })
                .collect()
        })
    }

    pub fn run_scenario(&self, scenario: &Scenario) -> Result<ScenarioReport> {
        aggregate(scenario.clone(), &self.run_traces(scenario)?)
    }

    /// Runs every scenario in order; `progress(done, total, report)` is
    /// called after each one.
    pub fn run_grid<F>(&self, scenarios: &[Scenario], mut progress: F) -> Result<Vec<ScenarioReport>>
    where
        F: FnMut(usize, usize, &ScenarioReport),
    {
        if scenarios.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut reports = Vec::with_capacity(scenarios.len());
        for (i, scenario) in scenarios.iter().enumerate() {
            let report = self.run_scenario(scenario)?;
            progress(i + 1, scenarios.len(), &report);
            reports.push(report);
        }
        Ok(reports)
    }
}

/// Convenience wrapper over [`Runner::run_grid`] using all cores.
pub fn run_grid(scenarios: &[Scenario]) -> Result<Vec<ScenarioReport>> {
    Runner::new(0)?.run_grid(scenarios, |_, _, _| {})
}
