//! Half-APS allocation for binary XOS valuations.
//!
//! The solver guesses an APS estimate `s_i` per agent, starting from the
//! trivial upper bound `⌊b_i·m⌋`. Each pass sorts agents by
//! `⌈s_i/2⌉ / b_i` and hands each a non-wasteful bundle of exactly
//! `⌈s_i/2⌉` goods from the shrinking pool. The first agent the pool cannot
//! satisfy has its estimate lowered by one and the pass restarts from the
//! full pool. A failing agent always has `s_i > APS_i`, so estimates never
//! drop below the true share and the final allocation gives every agent at
//! least `⌈APS_i/2⌉`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{Allocation, GoodSet, Instance};
use crate::rational::{self, Rational};
use crate::valuation::extract_from_clauses;

/// Per-agent APS estimates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessVector(pub Vec<u64>);

impl GuessVector {
    /// `s_i = ⌊b_i·m⌋`.
    pub fn initial(instance: &Instance) -> Self {
        let m = instance.num_goods() as u64;
        GuessVector(instance.agents().iter().map(|a| rational::floor_mul(&a.entitlement, m)).collect())
    }

    /// Bundle size the agent must receive: `⌈s_i/2⌉`.
    pub fn demand(&self, agent: usize) -> u64 {
        rational::ceil_half(self.0[agent])
    }
}

/// Agents ascending by `⌈s_i/2⌉ / b_i`, ties by id.
pub fn sorted_agent_order(instance: &Instance, guesses: &GuessVector) -> Vec<usize> {
    let key = |i: usize| rational::from_u64(guesses.demand(i)) / instance.entitlement(i);
    let keys: Vec<Rational> = (0..instance.n()).map(key).collect();
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by(|&a, &b| match keys[a].cmp(&keys[b]) {
        Ordering::Equal => a.cmp(&b),
        other => other,
    });
    order
}

/// One agent's turn in a successful pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassStep {
    pub agent: usize,
    /// Goods already handed out before this agent's turn.
    pub assigned_before: usize,
    /// `v_i` of the pool at this agent's turn.
    pub pool_value: u64,
    /// The bundle handed out, before leftovers.
    pub bundle: GoodSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PassOutcome {
    Allocated { allocation: Allocation, steps: Vec<PassStep> },
    Unsatisfied(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decrement {
    pub pass: usize,
    pub agent: usize,
    /// Estimate before the decrement.
    pub from: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfApsResult {
    pub allocation: Allocation,
    pub achieved: Vec<u64>,
    pub final_guesses: GuessVector,
    pub passes: usize,
    pub oracle_calls: u64,
    pub decrements: Vec<Decrement>,
    /// Steps of the successful pass.
    pub steps: Vec<PassStep>,
}

fn unit_clauses_of(instance: &Instance, operation: &'static str) -> Result<Vec<Vec<GoodSet>>> {
    instance
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            a.valuation.unit_clauses().ok_or(Error::WrongClass { agent: i, class: a.valuation.class_name(), operation })
        })
        .collect()
}

fn run_pass(
    instance: &Instance,
    clauses: &[Vec<GoodSet>],
    guesses: &GuessVector,
    order: &[usize],
    oracle_calls: &mut u64,
) -> PassOutcome {
    let mut pool = instance.all_goods();
    let mut bundles = vec![GoodSet::new(); instance.n()];
    let mut steps = Vec::with_capacity(order.len());
    for &agent in order {
        let demand = guesses.demand(agent);
        // one value query: the best clause on the pool gives v_i(pool) and X
        *oracle_calls += 1;
        let witness = extract_from_clauses(&clauses[agent], &pool);
        if witness.value < demand {
            return PassOutcome::Unsatisfied(agent);
        }
        let bundle: GoodSet = witness.extracted.iter().take(demand as usize).collect();
        steps.push(PassStep {
            agent,
            assigned_before: instance.num_goods() - pool.len(),
            pool_value: witness.value,
            bundle: bundle.clone(),
        });
        pool = pool.difference(&bundle);
        bundles[agent] = bundle;
    }
    PassOutcome::Allocated { allocation: instance.complete(bundles), steps }
}

/// Single existence pass with fixed estimates and agent order.
pub fn aps_existence_pass(instance: &Instance, guesses: &GuessVector, order: &[usize]) -> Result<PassOutcome> {
    let clauses = unit_clauses_of(instance, "the half-APS pass")?;
    Ok(run_pass(instance, &clauses, guesses, order, &mut 0))
}

/// Guess-and-decrease loop around [`aps_existence_pass`].
pub fn solve_half_aps(instance: &Instance) -> Result<HalfApsResult> {
    let clauses = unit_clauses_of(instance, "the half-APS solver")?;
    let mut guesses = GuessVector::initial(instance);
    let mut oracle_calls = 0;
    let mut decrements = Vec::new();
    let mut passes = 0;
    loop {
        passes += 1;
        let order = sorted_agent_order(instance, &guesses);
        match run_pass(instance, &clauses, &guesses, &order, &mut oracle_calls) {
            PassOutcome::Allocated { allocation, steps } => {
                let achieved = allocation
                    .bundles
                    .iter()
                    .enumerate()
                    .map(|(i, bundle)| extract_from_clauses(&clauses[i], bundle).value)
                    .collect();
                return Ok(HalfApsResult {
                    allocation,
                    achieved,
                    final_guesses: guesses,
                    passes,
                    oracle_calls,
                    decrements,
                    steps,
                });
            }
            PassOutcome::Unsatisfied(agent) => {
                // s_i = 0 demands nothing, so a failing agent has s_i ≥ 1.
                let from = guesses.0[agent];
                decrements.push(Decrement { pass: passes, agent, from });
                guesses.0[agent] = from - 1;
            }
        }
    }
}

/// Half-MMS: the half-APS solver run with equal entitlements.
pub fn solve_half_mms(instance: &Instance) -> Result<HalfApsResult> {
    let equal = instance.with_equal_entitlements();
    let mut result = solve_half_aps(&equal)?;
    // Leftovers follow the caller's entitlements, not the equalized ones.
    let mut bundles: Vec<GoodSet> = vec![GoodSet::new(); instance.n()];
    for step in &result.steps {
        bundles[step.agent] = step.bundle.clone();
    }
    result.allocation = instance.complete(bundles);
    result.achieved = result
        .allocation
        .bundles
        .iter()
        .enumerate()
        .map(|(i, b)| rational::as_u64(&instance.valuation(i).value(b)).unwrap_or(0))
        .collect();
    Ok(result)
}
