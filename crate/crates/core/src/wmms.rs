//! Weighted-maximin-share allocators.
//!
//! * [`wmms_round_robin`]: 1/n-WMMS for XOS valuations, driven by each
//!   agent's WMMS partition.
//! * [`wmms_partition_binadd`]: exact WMMS partition for binary additive
//!   valuations by water-filling `|S_j|/b_j`.
//! * [`wmms_allocate_binadd`]: exact WMMS allocation for binary additive
//!   valuations.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Allocation, GoodSet, Instance};
use crate::rational::{self, Rational};
use crate::shares::{check_witness, exact_wmms_partition, partition_floor, OracleLimits, WmmsPartitionWitness};
use crate::valuation::Clause;

/// Agents by entitlement, largest first, ties by id.
pub fn entitlement_order(instance: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by(|&a, &b| match instance.entitlement(b).cmp(instance.entitlement(a)) {
        Ordering::Equal => a.cmp(&b),
        other => other,
    });
    order
}

/// The bundle an agent commits to at its first pick, and the clause that
/// guides its later picks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WmmsInputBundle {
    pub agent: usize,
    /// Index into the agent's partition (the agent the bundle was meant for).
    pub partition_slot: usize,
    pub bundle: GoodSet,
    pub clause_index: usize,
    pub clause: Clause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRobinResult {
    pub allocation: Allocation,
    pub achieved: Vec<Rational>,
    /// Indexed by agent.
    pub targets: Vec<WmmsInputBundle>,
    /// `l^i(B^i)` per agent.
    pub target_clause_value: Vec<Rational>,
    /// `l^i(A_i)` per agent, over the goods picked before leftovers.
    pub received_clause_value: Vec<Rational>,
    pub rounds: usize,
}

fn clause_value(clause: &Clause, bundle: &GoodSet) -> Rational {
    bundle.iter().filter_map(|g| clause.get(&g)).fold(Rational::zero(), |acc, w| acc + w)
}

/// Exact WMMS partitions for every agent from the enumeration oracle.
pub fn oracle_partitions(instance: &Instance, limits: &OracleLimits) -> Result<Vec<WmmsPartitionWitness>> {
    (0..instance.n()).map(|i| exact_wmms_partition(instance, i, limits)).collect()
}

/// Partitions supplied in the instance, checked for consistency.
pub fn supplied_partitions(instance: &Instance) -> Option<Result<Vec<WmmsPartitionWitness>>> {
    let supplied = instance.wmms_partitions()?;
    Some(
        supplied
            .iter()
            .enumerate()
            .map(|(agent, p)| {
                let floor = partition_floor(instance, agent, &p.bundles);
                let witness = WmmsPartitionWitness {
                    agent,
                    partition: p.bundles.clone(),
                    value: p.value.clone().unwrap_or(floor),
                };
                check_witness(instance, &witness)?;
                Ok(witness)
            })
            .collect(),
    )
}

/// Round-robin-like 1/n-WMMS allocation for XOS valuations.
///
/// Agents act in entitlement order. At its first turn, the agent at
/// position `k` commits to the first of the bundles its partition
/// intends for positions `0..=k` that no earlier pick has touched, and
/// fixes the lowest-index clause maximising the bundle's value. Every
/// turn thereafter it takes the heaviest remaining good of its bundle
/// under that clause (lowest id on ties) and leaves once the bundle is
/// empty. Goods nobody took go to the leftover recipient.
pub fn wmms_round_robin(instance: &Instance, partitions: &[WmmsPartitionWitness]) -> Result<RoundRobinResult> {
    let n = instance.n();
    if partitions.len() != n {
        return Err(Error::InvalidPartition {
            agent: partitions.len().min(n.saturating_sub(1)),
            reason: format!("expected {n} partitions, found {}", partitions.len()),
        });
    }
    for (i, witness) in partitions.iter().enumerate() {
        if witness.agent != i {
            return Err(Error::InvalidPartition {
                agent: i,
                reason: format!("witness belongs to agent {}", witness.agent),
            });
        }
        check_witness(instance, witness)?;
    }

    let order = entitlement_order(instance);
    let mut targets: Vec<Option<WmmsInputBundle>> = vec![None; n];
    let mut remaining: Vec<GoodSet> = vec![GoodSet::new(); n];
    let mut bundles = vec![GoodSet::new(); n];
    let mut active = vec![true; n];
    let mut taken = GoodSet::new();
    let mut rounds = 0;

    while active.iter().any(|&a| a) {
        rounds += 1;
        for (position, &agent) in order.iter().enumerate() {
            if rounds == 1 {
                let slot = order[..=position]
                    .iter()
                    .copied()
                    .find(|&j| partitions[agent].partition[j].is_disjoint(&taken))
                    .ok_or(Error::FirstPickUnavailable { agent })?;
                let bundle = partitions[agent].partition[slot].clone();
                let clauses = instance.valuation(agent).additive_clauses();
                let mut clause_index = 0;
                for (t, clause) in clauses.iter().enumerate() {
                    if clause_value(clause, &bundle) > clause_value(&clauses[clause_index], &bundle) {
                        clause_index = t;
                    }
                }
                let clause = clauses.into_iter().nth(clause_index).unwrap_or_default();
                remaining[agent] = bundle.clone();
                targets[agent] = Some(WmmsInputBundle { agent, partition_slot: slot, bundle, clause_index, clause });
            }
            if !active[agent] {
                continue;
            }
            let Some(target) = &targets[agent] else { continue };
            let zero = Rational::zero();
            let pick = remaining[agent]
                .iter()
                .map(|g| (g, target.clause.get(&g).unwrap_or(&zero)))
                .fold(None::<(usize, &Rational)>, |best, (g, w)| match best {
                    Some((_, bw)) if bw >= w => best,
                    _ => Some((g, w)),
                })
                .map(|(g, _)| g);
            match pick {
                Some(g) => {
                    bundles[agent].insert(g);
                    taken.insert(g);
                    for r in remaining.iter_mut() {
                        r.remove(g);
                    }
                }
                None => active[agent] = false,
            }
        }
    }

    let targets: Vec<WmmsInputBundle> = targets.into_iter().map(Option::unwrap).collect();
    let target_clause_value = targets.iter().map(|t| clause_value(&t.clause, &t.bundle)).collect();
    let received_clause_value = targets.iter().map(|t| clause_value(&t.clause, &bundles[t.agent])).collect();
    let allocation = instance.complete(bundles);
    let achieved = allocation.bundles.iter().enumerate().map(|(i, b)| instance.valuation(i).value(b)).collect();
    Ok(RoundRobinResult { allocation, achieved, targets, target_clause_value, received_clause_value, rounds })
}

fn desired_sets(instance: &Instance, operation: &'static str) -> Result<Vec<GoodSet>> {
    instance
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            a.valuation.desired_set().ok_or(Error::WrongClass { agent: i, class: a.valuation.class_name(), operation })
        })
        .collect()
}

/// Index minimising `sizes[j] / b[j]` over `candidates`, lowest index on ties.
fn least_loaded(instance: &Instance, sizes: &[usize], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    let load = |j: usize| rational::from_u64(sizes[j] as u64) / instance.entitlement(j);
    let mut best: Option<(usize, Rational)> = None;
    for j in candidates {
        let l = load(j);
        if best.as_ref().is_none_or(|(_, bl)| l < *bl) {
            best = Some((j, l));
        }
    }
    best.map(|(j, _)| j)
}

/// WMMS partition of a binary-additive agent, with the bundle sizes after
/// every assignment step.
pub fn wmms_partition_binadd_traced(
    instance: &Instance,
    agent: usize,
) -> Result<(WmmsPartitionWitness, Vec<Vec<usize>>)> {
    let valuation = &instance.agent(agent)?.valuation;
    let desired = valuation.desired_set().ok_or(Error::WrongClass {
        agent,
        class: valuation.class_name(),
        operation: "the binary-additive WMMS partition",
    })?;
    let n = instance.n();
    let mut partition = vec![GoodSet::new(); n];
    let mut sizes = vec![0usize; n];
    let mut trace = Vec::with_capacity(desired.len());
    for g in desired.iter() {
        let j = least_loaded(instance, &sizes, 0..n).unwrap();
        partition[j].insert(g);
        sizes[j] += 1;
        trace.push(sizes.clone());
    }
    let value = (0..n).map(|j| rational::from_u64(sizes[j] as u64) / instance.entitlement(j)).min().unwrap()
        * instance.entitlement(agent);
    let rest = instance.all_goods().difference(&desired);
    partition[instance.leftover_recipient()].union_with(&rest);
    Ok((WmmsPartitionWitness { agent, partition, value }, trace))
}

pub fn wmms_partition_binadd(instance: &Instance, agent: usize) -> Result<WmmsPartitionWitness> {
    wmms_partition_binadd_traced(instance, agent).map(|(witness, _)| witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaddResult {
    pub allocation: Allocation,
    pub achieved: Vec<u64>,
}

/// Exact WMMS allocation for binary additive valuations.
///
/// Repeatedly the active agent with the smallest `|A_i|/b_i` (lowest id on
/// ties) takes its lowest-id remaining desired good, or leaves when none
/// is left.
pub fn wmms_allocate_binadd(instance: &Instance) -> Result<BinaddResult> {
    let desired = desired_sets(instance, "the binary-additive WMMS allocator")?;
    let n = instance.n();
    let mut remaining = instance.all_goods();
    let mut bundles = vec![GoodSet::new(); n];
    let mut sizes = vec![0usize; n];
    let mut active = vec![true; n];
    while let Some(i) = least_loaded(instance, &sizes, (0..n).filter(|&i| active[i])) {
        match desired[i].iter().find(|&g| remaining.contains(g)) {
            Some(g) => {
                remaining.remove(g);
                bundles[i].insert(g);
                sizes[i] += 1;
            }
            None => active[i] = false,
        }
    }
    let allocation = instance.complete(bundles);
    let achieved = allocation.bundles.iter().zip(&desired).map(|(b, d)| b.intersection(d).len() as u64).collect();
    Ok(BinaddResult { allocation, achieved })
}
