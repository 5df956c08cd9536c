//! Second-price group formation.
//!
//! Every candidate bids the best estimated utility it can reach with its
//! known solutions. Per slot the highest bid wins (uniform tie-break) and
//! the winner is charged the second-highest bid, or its own bid when it is
//! the only candidate. Prices are recorded but never feed back into
//! behaviour.

use rand::Rng;

use crate::error::{Error, Result};
use crate::landscape::{Solution, Task};
use crate::population::{pick, Agent, IncentiveScheme, ResidualContext};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bid {
    pub agent_id: usize,
    pub slot: usize,
    pub value: f64,
}

/// Result of one slot's auction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotAward {
    /// Index of the winning bid in the bid list.
    pub winner: usize,
    pub winning_bid: f64,
    pub price: f64,
}

/// One row of the auction log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuctionRecord {
    pub period: usize,
    pub slot: usize,
    pub winner: usize,
    pub winning_bid: f64,
    pub price: f64,
}

/// The current slot holders, one per subtask, in slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    members: Vec<usize>,
    winning_bids: Vec<f64>,
    prices: Vec<f64>,
    formed_at: usize,
}

impl Group {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn winning_bids(&self) -> &[f64] {
        &self.winning_bids
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn formed_at(&self) -> usize {
        self.formed_at
    }

    pub fn records(&self) -> impl Iterator<Item = AuctionRecord> + '_ {
        (0..self.members.len()).map(move |slot| AuctionRecord {
            period: self.formed_at,
            slot,
            winner: self.members[slot],
            winning_bid: self.winning_bids[slot],
            price: self.prices[slot],
        })
    }
}

/// One sealed bid per candidate of the context's slot.
pub fn collect_bids(
    candidates: &[&Agent],
    ctx: &ResidualContext,
    scheme: &IncentiveScheme,
    task: &Task,
) -> Result<Vec<Bid>> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidatePool { slot: ctx.slot() });
    }
    candidates
        .iter()
        .map(|agent| {
            Ok(Bid { agent_id: agent.id(), slot: agent.slot(), value: agent.best_utility(ctx, scheme, task)? })
        })
        .collect()
}

/// Picks the winner and the price from a slot's bids.
pub fn settle<R: Rng + ?Sized>(bids: &[Bid], rng: &mut R) -> Result<SlotAward> {
    let Some(first) = bids.first() else {
        return Err(Error::EmptyCandidatePool { slot: 0 });
    };
    let top = bids.iter().map(|b| b.value).fold(f64::NEG_INFINITY, f64::max);
    let leaders: Vec<usize> = (0..bids.len()).filter(|&i| bids[i].value == top).collect();
    let winner = leaders[pick(leaders.len(), rng)];
    let price = if bids.len() == 1 {
        first.value
    } else if leaders.len() > 1 {
        top
    } else {
        bids.iter()
            .enumerate()
            .filter(|&(i, _)| i != winner)
            .map(|(_, b)| b.value)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(SlotAward { winner, winning_bid: top, price })
}

/// Runs every slot's auction against last period's solution.
///
/// `candidates_by_slot[m]` lists the agents able to fill slot `m`;
/// `slot_rng(m)` supplies that slot's tie-break stream, so the outcome of
/// one slot never depends on the candidates of another.
pub fn run_auction<R, F>(
    candidates_by_slot: &[Vec<&Agent>],
    previous: Solution,
    scheme: &IncentiveScheme,
    task: &Task,
    period: usize,
    mut slot_rng: F,
) -> Result<Group>
where
    R: Rng,
    F: FnMut(usize) -> R,
{
    if candidates_by_slot.len() != task.m_subtasks() {
        return Err(Error::MissingBlock { expected: task.m_subtasks(), actual: candidates_by_slot.len() });
    }
    let mut group = Group {
        members: Vec::with_capacity(task.m_subtasks()),
        winning_bids: Vec::with_capacity(task.m_subtasks()),
        prices: Vec::with_capacity(task.m_subtasks()),
        formed_at: period,
    };
    for (slot, candidates) in candidates_by_slot.iter().enumerate() {
        let ctx = ResidualContext::new(previous, slot);
        let bids = collect_bids(candidates, &ctx, scheme, task)?;
        let award = settle(&bids, &mut slot_rng(slot))?;
        group.members.push(bids[award.winner].agent_id);
        group.winning_bids.push(award.winning_bid);
        group.prices.push(award.price);
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{InterdependenceMatrix, Landscape, StructureKind};
    use crate::population::init_population;
    use crate::rng::SimRng;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn bids(values: &[f64]) -> Vec<Bid> {
        values.iter().enumerate().map(|(i, &value)| Bid { agent_id: i, slot: 0, value }).collect()
    }

    fn task(seed: u64) -> Task {
        let matrix = InterdependenceMatrix::build(StructureKind::Interdependent, 12, 3, 5).unwrap();
        Task::new(Landscape::generate(matrix, seed).unwrap(), 3).unwrap()
    }

    #[test]
    fn second_price() {
        let award = settle(&bids(&[0.9, 0.7, 0.4]), &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!((award.winner, award.winning_bid, award.price), (0, 0.9, 0.7));
        let award = settle(&bids(&[0.4, 0.7, 0.9]), &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!((award.winner, award.price), (2, 0.7));
    }

    #[test]
    fn lone_bidder_pays_own_bid() {
        let award = settle(&bids(&[0.42]), &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!((award.winner, award.price), (0, 0.42));
        assert!(settle(&[], &mut SimRng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn ties_spread_uniformly() {
        let tied = bids(&[0.6; 10]);
        let mut rng = SimRng::seed_from_u64(1);
        let mut wins = [0usize; 10];
        for _ in 0..10_000 {
            let award = settle(&tied, &mut rng).unwrap();
            assert_eq!(award.price, 0.6);
            wins[award.winner] += 1;
        }
        // each expected 1000, sd ≈ 30
        assert!(wins.iter().all(|&w| (850..1150).contains(&w)), "{wins:?}");
    }

    #[test]
    fn constant_field_bid() {
        let matrix = InterdependenceMatrix::build(StructureKind::Decomposed, 12, 3, 3).unwrap();
        let l = Landscape::from_tables(matrix, vec![vec![0.5; 16]; 12], 0).unwrap();
        let t = Task::new(l, 3).unwrap();
        let agent = Agent::new(0, 0, "0110".parse().unwrap());
        let ctx = ResidualContext::new(Solution::zeros(12).unwrap(), 0);
        let own = IncentiveScheme::new(1.0, 0.0).unwrap();
        let b = collect_bids(&[&agent], &ctx, &own, &t).unwrap();
        assert_eq!(b[0].value, 0.5);
        assert!(matches!(collect_bids(&[], &ctx, &own, &t), Err(Error::EmptyCandidatePool { slot: 0 })));
    }

    #[test]
    fn identical_knowledge_identical_bids() {
        let t = task(3);
        let known: Vec<Solution> = ["0001", "1110", "1011"].iter().map(|s| s.parse().unwrap()).collect();
        let a = Agent::with_known(0, 1, known.clone()).unwrap();
        let b = Agent::with_known(1, 1, known).unwrap();
        let ctx = ResidualContext::new("010101010101".parse().unwrap(), 1);
        let out = collect_bids(&[&a, &b], &ctx, &IncentiveScheme::balanced(), &t).unwrap();
        assert_eq!(out[0].value, out[1].value);
    }

    #[test]
    fn empty_slot_is_an_error() {
        let t = task(1);
        let agent = Agent::new(0, 0, "0000".parse().unwrap());
        let pools = vec![vec![&agent], vec![], vec![]];
        let err = run_auction(&pools, Solution::zeros(12).unwrap(), &IncentiveScheme::balanced(), &t, 1, |_| {
            SimRng::seed_from_u64(0)
        });
        assert!(matches!(err, Err(Error::EmptyCandidatePool { slot: 1 })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn winners_are_maximal_and_pay_at_most_their_bid(seed in any::<u64>(), prev in 0u32..4096) {
            let t = task(seed);
            let agents = init_population(30, 3, &t, &mut SimRng::seed_from_u64(seed)).unwrap();
            let pools: Vec<Vec<&Agent>> = (0..3).map(|m| agents.iter().filter(|a| a.slot() == m).collect()).collect();
            let previous = Solution::new(prev, 12).unwrap();
            let scheme = IncentiveScheme::balanced();
            let group = run_auction(&pools, previous, &scheme, &t, 1, |m| SimRng::seed_from_u64(seed ^ m as u64)).unwrap();
            for slot in 0..3 {
                let winner = &agents[group.members()[slot]];
                prop_assert_eq!(winner.slot(), slot);
                let ctx = ResidualContext::new(previous, slot);
                let all = collect_bids(&pools[slot], &ctx, &scheme, &t).unwrap();
                let win = group.winning_bids()[slot];
                prop_assert_eq!(win, winner.best_utility(&ctx, &scheme, &t).unwrap());
                prop_assert!(all.iter().all(|b| b.value <= win));
                prop_assert!(group.prices()[slot] <= win && group.prices()[slot] >= 0.0);
            }
            let again = run_auction(&pools, previous, &scheme, &t, 1, |m| SimRng::seed_from_u64(seed ^ m as u64)).unwrap();
            prop_assert_eq!(&again, &group);
        }

        #[test]
        fn slots_are_independent(seed in any::<u64>(), rotate in 1usize..10) {
            let t = task(seed);
            let agents = init_population(30, 3, &t, &mut SimRng::seed_from_u64(seed)).unwrap();
            let mut pools: Vec<Vec<&Agent>> = (0..3).map(|m| agents.iter().filter(|a| a.slot() == m).collect()).collect();
            let previous = Solution::new((seed % 4096) as u32, 12).unwrap();
            let scheme = IncentiveScheme::balanced();
            let streams = crate::rng::Streams::new(seed);
            let before = run_auction(&pools, previous, &scheme, &t, 1, |m| streams.auction(1, m)).unwrap();
            pools[0].rotate_left(rotate);
            let after = run_auction(&pools, previous, &scheme, &t, 1, |m| streams.auction(1, m)).unwrap();
            prop_assert_eq!(&before.members()[1..], &after.members()[1..]);
        }
    }
}
