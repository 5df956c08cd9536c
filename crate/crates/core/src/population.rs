//! Agents, their known solutions, and the individual decision rule.

use rand::Rng;

use crate::error::{Error, Result};
use crate::landscape::{Solution, Task};

/// Linear weights on own-block and residual performance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveScheme {
    alpha: f64,
    beta: f64,
}

impl IncentiveScheme {
    const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = (0.0..=1.0).contains(&alpha)
            && (0.0..=1.0).contains(&beta)
            && (alpha + beta - 1.0).abs() <= Self::SUM_TOLERANCE;
        if !ok {
            return Err(Error::InvalidScheme { alpha, beta });
        }
        Ok(IncentiveScheme { alpha, beta })
    }

    /// Normalizes two non-negative weights so that they sum to one.
    pub fn from_weights(own: f64, residual: f64) -> Result<Self> {
        let total = own + residual;
        if !(own >= 0.0 && residual >= 0.0 && total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidScheme { alpha: own, beta: residual });
        }
        Self::new(own / total, residual / total)
    }

    pub fn balanced() -> Self {
        IncentiveScheme { alpha: 0.5, beta: 0.5 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for IncentiveScheme {
    fn default() -> Self {
        Self::balanced()
    }
}

/// What an agent in `slot` sees: last period's full solution. The
/// residual is every block except `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualContext {
    previous: Solution,
    slot: usize,
}

impl ResidualContext {
    pub fn new(previous: Solution, slot: usize) -> Self {
        ResidualContext { previous, slot }
    }

    pub fn previous(&self) -> Solution {
        self.previous
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    /// The other agents' blocks, in slot order.
    pub fn residual(&self, block_len: usize) -> Result<Vec<Solution>> {
        let blocks = self.previous.len() / block_len.max(1);
        (0..blocks)
            .filter(|&b| b != self.slot)
            .map(|b| self.previous.block(b, block_len))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    id: usize,
    slot: usize,
    known: Vec<Solution>,
}

impl Agent {
    pub fn new(id: usize, slot: usize, initial: Solution) -> Self {
        Agent { id, slot, known: vec![initial] }
    }

    /// An agent with an explicit knowledge set (deduplicated, sorted).
    pub fn with_known(id: usize, slot: usize, mut known: Vec<Solution>) -> Result<Self> {
        let Some(first) = known.first() else {
            return Err(Error::EmptyInput);
        };
        let width = first.len();
        if let Some(bad) = known.iter().find(|s| s.len() != width) {
            return Err(Error::LengthMismatch { expected: width, actual: bad.len() });
        }
        known.sort_unstable();
        known.dedup();
        Ok(Agent { id, slot, known })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    /// Known partial solutions, ascending.
    pub fn known(&self) -> &[Solution] {
        &self.known
    }

    pub fn knows(&self, s: &Solution) -> bool {
        self.known.binary_search(s).is_ok()
    }

    fn insert(&mut self, s: Solution) {
        if let Err(pos) = self.known.binary_search(&s) {
            self.known.insert(pos, s);
        }
    }

    fn check(&self, ctx: &ResidualContext, task: &Task) -> Result<()> {
        if ctx.slot != self.slot {
            return Err(Error::SlotMismatch { agent: self.id, agent_slot: self.slot, ctx_slot: ctx.slot });
        }
        if ctx.previous.len() != task.n() {
            return Err(Error::LengthMismatch { expected: task.n(), actual: ctx.previous.len() });
        }
        Ok(())
    }

    fn utilities(&self, ctx: &ResidualContext, scheme: &IncentiveScheme, task: &Task) -> Vec<f64> {
        self.known
            .iter()
            .map(|s| utility_bits(task, self.slot, s.bits(), ctx.previous.bits(), scheme))
            .collect()
    }

    /// Best estimated utility over the known set.
    pub fn best_utility(&self, ctx: &ResidualContext, scheme: &IncentiveScheme, task: &Task) -> Result<f64> {
        self.check(ctx, task)?;
        Ok(self.utilities(ctx, scheme, task).into_iter().fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Splits `p_total` agents evenly over the slots (ids `0..P/M` take slot 0,
/// and so on); each starts out knowing one uniformly random block.
pub fn init_population<R: Rng + ?Sized>(p_total: usize, m_subtasks: usize, task: &Task, rng: &mut R) -> Result<Vec<Agent>> {
    if m_subtasks == 0 || p_total == 0 || !p_total.is_multiple_of(m_subtasks) {
        return Err(Error::InvalidDivisibility { total: p_total, parts: m_subtasks });
    }
    if m_subtasks != task.m_subtasks() {
        return Err(Error::LengthMismatch { expected: task.m_subtasks(), actual: m_subtasks });
    }
    let per_slot = p_total / m_subtasks;
    let width = task.block_len();
    Ok((0..p_total)
        .map(|id| {
            let bits = rng.random_range(0..1u64 << width) as u32;
            Agent::new(id, id / per_slot, Solution::from_raw(bits, width))
        })
        .collect())
}

/// α · (own block mean) + β · (mean of the other block means), evaluated on
/// last period's solution with `candidate` spliced into the agent's block.
pub fn estimated_utility(
    agent: &Agent,
    candidate: &Solution,
    ctx: &ResidualContext,
    scheme: &IncentiveScheme,
    task: &Task,
) -> Result<f64> {
    agent.check(ctx, task)?;
    if candidate.len() != task.block_len() {
        return Err(Error::LengthMismatch { expected: task.block_len(), actual: candidate.len() });
    }
    Ok(utility_bits(task, agent.slot, candidate.bits(), ctx.previous.bits(), scheme))
}

#[inline]
pub(crate) fn utility_bits(task: &Task, slot: usize, candidate: u32, previous: u32, scheme: &IncentiveScheme) -> f64 {
    let spliced = task.splice_bits(previous, slot, candidate);
    let own = task.block_mean_bits(spliced, slot);
    let m = task.m_subtasks();
    let residual = if m > 1 {
        let sum: f64 = (0..m)
            .filter(|&r| r != slot)
            .map(|r| task.block_mean_bits(spliced, r))
            .sum();
        sum / (m - 1) as f64
    } else {
        0.0
    };
    scheme.alpha * own + scheme.beta * residual
}

fn argmax_indices(values: &[f64]) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .map(|(i, _)| i)
        .collect()
}

/// Uniform pick; draws from `rng` only when there is more than one option.
pub(crate) fn pick<R: Rng + ?Sized>(len: usize, rng: &mut R) -> usize {
    if len == 1 {
        0
    } else {
        rng.random_range(0..len)
    }
}

/// The known solution with the highest estimated utility, ties broken
/// uniformly at random.
pub fn decide<R: Rng + ?Sized>(
    agent: &Agent,
    ctx: &ResidualContext,
    scheme: &IncentiveScheme,
    task: &Task,
    rng: &mut R,
) -> Result<Solution> {
    agent.check(ctx, task)?;
    let maxima = argmax_indices(&agent.utilities(ctx, scheme, task));
    Ok(agent.known[maxima[pick(maxima.len(), rng)]])
}

/// What happened to an agent's knowledge in one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KnowledgeChange {
    pub learned: Option<Solution>,
    pub forgotten: Option<Solution>,
}

/// One period of learning and forgetting.
///
/// Two Bernoulli(`prob`) draws are made, learning first, then forgetting.
/// Forgetting is applied first: it removes a uniformly chosen known
/// solution that is not among the current utility maximizers. Learning then
/// picks a uniformly random (known solution, bit) pair whose one-bit
/// neighbour is still unknown and adds that neighbour.
pub fn learn_forget_step<R: Rng + ?Sized>(
    agent: &mut Agent,
    ctx: &ResidualContext,
    scheme: &IncentiveScheme,
    task: &Task,
    prob: f64,
    rng: &mut R,
) -> Result<KnowledgeChange> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::InvalidProbability(prob));
    }
    agent.check(ctx, task)?;
    let learn = rng.random_bool(prob);
    let forget = rng.random_bool(prob);
    let mut change = KnowledgeChange::default();

    if forget && agent.known.len() > 1 {
        let utilities = agent.utilities(ctx, scheme, task);
        let best = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let candidates: Vec<usize> = (0..utilities.len()).filter(|&i| utilities[i] != best).collect();
        if !candidates.is_empty() {
            let victim = candidates[pick(candidates.len(), rng)];
            change.forgotten = Some(agent.known.remove(victim));
        }
    }

    if learn {
        let width = task.block_len();
        let options: Vec<Solution> = agent
            .known
            .iter()
            .flat_map(|s| (0..width).map(move |b| s.flipped(b)))
            .filter(|s| !agent.knows(s))
            .collect();
        if !options.is_empty() {
            let learned = options[pick(options.len(), rng)];
            agent.insert(learned);
            change.learned = Some(learned);
        }
    }
    Ok(change)
}

/// Joins the slot-ordered blocks into the full solution.
pub fn concatenate_group_solution(decisions: &[Solution], task: &Task) -> Result<Solution> {
    if decisions.len() != task.m_subtasks() {
        return Err(Error::MissingBlock { expected: task.m_subtasks(), actual: decisions.len() });
    }
    if let Some(bad) = decisions.iter().find(|d| d.len() != task.block_len()) {
        return Err(Error::LengthMismatch { expected: task.block_len(), actual: bad.len() });
    }
    Solution::concat(decisions)
}
