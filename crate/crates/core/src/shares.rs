//! Exact MMS, WMMS and APS oracles for desk-scale instances.
//!
//! WMMS and MMS enumerate labeled partitions depth-first (good `0` first,
//! bundle `0` first), pruning any subtree whose optimistic bound (each
//! bundle extended by every unassigned good) cannot beat the incumbent.
//! Leaves are visited in lexicographic order of the assignment vector and
//! the incumbent is replaced only on strict improvement, so the reported
//! witness is the lexicographically smallest optimal partition.
//!
//! APS scans the candidate values of `v_i` from the top and returns the
//! first one no price vector can block. Blocking is decided by an exact
//! LP over the inclusion-minimal sets reaching the candidate.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp;
use crate::model::{GoodSet, Instance, Notion, ShareValue, Witness};
use crate::rational::Rational;
use crate::valuation::Valuation;

/// Enumeration caps for the exact oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Upper bound on `n^m` for partition enumeration.
    pub max_partitions: u64,
    /// Upper bound on `m` for APS (which tabulates all `2^m` subsets).
    pub max_aps_goods: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_partitions: 2_000_000, max_aps_goods: 14 }
    }
}

impl OracleLimits {
    /// Parses `FAIRSHARE_ORACLE_CAP`: either a bare partition cap
    /// (`"5000000"`) or `key=value` pairs (`"partitions=5000000,aps-goods=16"`).
    pub fn parse_override(text: &str, base: OracleLimits) -> Option<OracleLimits> {
        let mut limits = base;
        if let Ok(cap) = text.trim().parse::<u64>() {
            limits.max_partitions = cap;
            return Some(limits);
        }
        for part in text.split(',') {
            let (key, value) = part.split_once('=')?;
            match key.trim() {
                "partitions" => limits.max_partitions = value.trim().parse().ok()?,
                "aps-goods" | "aps_goods" => limits.max_aps_goods = value.trim().parse().ok()?,
                _ => return None,
            }
        }
        Some(limits)
    }

    pub fn from_env() -> OracleLimits {
        std::env::var("FAIRSHARE_ORACLE_CAP")
            .ok()
            .and_then(|text| Self::parse_override(&text, Self::default()))
            .unwrap_or_default()
    }

    fn check_partitions(&self, what: &'static str, n: usize, m: usize) -> Result<()> {
        let needed = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if needed > self.max_partitions as u128 || m > 26 {
            return Err(Error::CapExceeded {
                what,
                needed: if needed == u128::MAX { format!("{n}^{m}") } else { needed.to_string() },
                cap: self.max_partitions,
            });
        }
        Ok(())
    }
}

/// A labeled partition and the WMMS floor it attains for one agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WmmsPartitionWitness {
    pub agent: usize,
    pub partition: Vec<GoodSet>,
    pub value: Rational,
}

/// `min_j v_i(S_j)·b_i/b_j` for a labeled partition.
pub fn partition_floor(instance: &Instance, agent: usize, partition: &[GoodSet]) -> Rational {
    let b_i = instance.entitlement(agent);
    let valuation = instance.valuation(agent);
    partition
        .iter()
        .enumerate()
        .map(|(j, bundle)| valuation.value(bundle) * b_i / instance.entitlement(j))
        .min()
        .unwrap_or_else(Rational::zero)
}

/// Checks that `witness` labels a partition of all goods into `n` bundles
/// and that its recorded value equals the recomputed floor.
pub fn check_witness(instance: &Instance, witness: &WmmsPartitionWitness) -> Result<()> {
    let invalid = |reason: String| Error::InvalidPartition { agent: witness.agent, reason };
    if witness.partition.len() != instance.n() {
        return Err(invalid(format!("expected {} bundles, found {}", instance.n(), witness.partition.len())));
    }
    let mut seen = GoodSet::new();
    for bundle in &witness.partition {
        for g in bundle {
            if g >= instance.num_goods() {
                return Err(invalid(format!("good {g} does not exist")));
            }
            if !seen.insert(g) {
                return Err(invalid(format!("good {g} appears twice")));
            }
        }
    }
    if seen.len() != instance.num_goods() {
        let missing = instance.all_goods().difference(&seen);
        return Err(invalid(format!("goods {missing} are not covered")));
    }
    let floor = partition_floor(instance, witness.agent, &witness.partition);
    if floor != witness.value {
        return Err(invalid(format!("claimed value {} but the partition attains {floor}", witness.value)));
    }
    Ok(())
}

fn value_table(valuation: &Valuation, m: usize) -> Vec<Rational> {
    (0u64..1 << m).map(|mask| valuation.value_mask(mask)).collect()
}

/// Ranks `keys` by value so the enumeration compares plain integers.
fn rank_all(keys: &[Rational]) -> Vec<u32> {
    let mut distinct: Vec<&Rational> = keys.iter().collect();
    distinct.sort();
    distinct.dedup();
    keys.iter().map(|k| distinct.binary_search(&k).unwrap() as u32).collect()
}

/// Depth-first search over labeled partitions maximising
/// `min_j score[j][mask_j]`, where every `score[j]` is monotone in the mask.
struct PartitionSearch<'a> {
    m: usize,
    n: usize,
    score: &'a [Vec<u32>],
    symmetric: bool,
    masks: Vec<u64>,
    assign: Vec<usize>,
    rest: Vec<u64>,
    best: Option<u32>,
    best_assign: Vec<usize>,
}

impl<'a> PartitionSearch<'a> {
    fn run(m: usize, n: usize, score: &'a [Vec<u32>], symmetric: bool) -> (u32, Vec<usize>) {
        let rest = (0..=m).map(|g| if g >= m { 0 } else { ((1u64 << m) - 1) & !((1u64 << g) - 1) }).collect();
        let mut search = PartitionSearch {
            m,
            n,
            score,
            symmetric,
            masks: vec![0; n],
            assign: vec![0; m],
            rest,
            best: None,
            best_assign: vec![0; m],
        };
        search.visit(0, 0);
        (search.best.unwrap(), search.best_assign)
    }

    fn visit(&mut self, g: usize, labels_used: usize) {
        let rest = self.rest[g];
        let bound = (0..self.n).map(|j| self.score[j][(self.masks[j] | rest) as usize]).min().unwrap();
        if self.best.is_some_and(|best| bound <= best) {
            return;
        }
        if g == self.m {
            self.best = Some(bound);
            self.best_assign.copy_from_slice(&self.assign);
            return;
        }
        let limit = if self.symmetric { (labels_used + 1).min(self.n) } else { self.n };
        for j in 0..limit {
            self.masks[j] |= 1 << g;
            self.assign[g] = j;
            self.visit(g + 1, labels_used.max(j + 1));
            self.masks[j] &= !(1 << g);
        }
    }
}

fn bundles_from_assignment(assign: &[usize], n: usize) -> Vec<GoodSet> {
    let mut bundles = vec![GoodSet::new(); n];
    for (g, &j) in assign.iter().enumerate() {
        bundles[j].insert(g);
    }
    bundles
}

fn maximin_partition(
    instance: &Instance,
    agent: usize,
    entitlements: &[Rational],
    symmetric: bool,
    limits: &OracleLimits,
    what: &'static str,
) -> Result<WmmsPartitionWitness> {
    instance.agent(agent)?;
    let (n, m) = (instance.n(), instance.num_goods());
    let valuation = instance.valuation(agent);
    if n == 1 {
        let all = instance.all_goods();
        return Ok(WmmsPartitionWitness { agent, value: valuation.value(&all), partition: vec![all] });
    }
    limits.check_partitions(what, n, m)?;
    let table = value_table(valuation, m);
    let b_i = &entitlements[agent];
    let keys: Vec<Rational> = entitlements.iter().flat_map(|b_j| table.iter().map(move |v| v * b_i / b_j)).collect();
    let ranks = rank_all(&keys);
    let score: Vec<Vec<u32>> = ranks.chunks(table.len()).map(<[u32]>::to_vec).collect();
    let (_, assign) = PartitionSearch::run(m, n, &score, symmetric);
    let partition = bundles_from_assignment(&assign, n);
    let value =
        partition.iter().zip(entitlements).map(|(bundle, b_j)| valuation.value(bundle) * b_i / b_j).min().unwrap();
    Ok(WmmsPartitionWitness { agent, partition, value })
}

/// Exact weighted maximin share of `agent` with its partition witness.
pub fn exact_wmms_partition(instance: &Instance, agent: usize, limits: &OracleLimits) -> Result<WmmsPartitionWitness> {
    let entitlements: Vec<Rational> = instance.agents().iter().map(|a| a.entitlement.clone()).collect();
    maximin_partition(instance, agent, &entitlements, false, limits, "WMMS partition enumeration")
}

pub fn exact_wmms(instance: &Instance, agent: usize, limits: &OracleLimits) -> Result<ShareValue> {
    let witness = exact_wmms_partition(instance, agent, limits)?;
    Ok(ShareValue {
        notion: Notion::Wmms,
        agent,
        value: witness.value,
        witness: Some(Witness::Partition(witness.partition)),
    })
}

/// Exact maximin share: WMMS under equal entitlements, enumerating only
/// canonically labeled partitions.
pub fn exact_mms(instance: &Instance, agent: usize, limits: &OracleLimits) -> Result<ShareValue> {
    let share = Rational::new(1.into(), (instance.n() as i64).into());
    let entitlements = vec![share; instance.n()];
    let witness = maximin_partition(instance, agent, &entitlements, true, limits, "MMS partition enumeration")?;
    Ok(ShareValue {
        notion: Notion::Mms,
        agent,
        value: witness.value,
        witness: Some(Witness::Partition(witness.partition)),
    })
}

fn check_aps_size(instance: &Instance, limits: &OracleLimits) -> Result<()> {
    let m = instance.num_goods();
    if m > limits.max_aps_goods || m > 30 {
        return Err(Error::CapExceeded {
            what: "APS subset enumeration",
            needed: format!("2^{m}"),
            cap: 1u64 << limits.max_aps_goods.min(63),
        });
    }
    Ok(())
}

/// Inclusion-minimal masks with value at least `z` (monotone `table`).
fn minimal_sets(table: &[Rational], m: usize, z: &Rational) -> Vec<u64> {
    (0..table.len() as u64)
        .filter(|&mask| {
            &table[mask as usize] >= z && (0..m).all(|g| mask >> g & 1 == 0 || &table[(mask & !(1 << g)) as usize] < z)
        })
        .collect()
}

/// A price vector under which every set in `targets` costs more than
/// `budget`, if one exists.
///
/// Maximises the slack `δ` in `p(S) ≥ budget + δ` over `p ≥ 0, Σp ≤ 1`;
/// blocking holds iff the optimum is positive. Leftover mass is put on
/// good 0 so the returned prices sum to exactly 1.
fn blocking_prices(targets: &[u64], m: usize, budget: &Rational) -> Result<Option<Vec<Rational>>> {
    if m == 0 || targets.contains(&0) {
        return Ok(None);
    }
    // Variables p_0..p_{m-1} and s = δ + 1 ≥ 0:  s − p(S) ≤ 1 − budget,  Σp ≤ 1.
    let one = Rational::one();
    let mut objective = vec![Rational::zero(); m + 1];
    objective[m] = one.clone();
    let mut a = Vec::with_capacity(targets.len() + 1);
    let mut b = Vec::with_capacity(targets.len() + 1);
    for &mask in targets {
        let mut row: Vec<Rational> =
            (0..m).map(|g| if mask >> g & 1 == 1 { -one.clone() } else { Rational::zero() }).collect();
        row.push(one.clone());
        a.push(row);
        b.push(&one - budget);
    }
    let mut total: Vec<Rational> = vec![one.clone(); m];
    total.push(Rational::zero());
    a.push(total);
    b.push(one.clone());

    let solution = lp::maximize(&objective, &a, &b)?;
    if solution.objective <= one {
        return Ok(None);
    }
    let mut prices: Vec<Rational> = solution.x[..m].to_vec();
    let sum: Rational = prices.iter().fold(Rational::zero(), |acc, p| acc + p);
    prices[0] += one - sum;
    Ok(Some(prices))
}

/// Price vector certifying `APS_agent < threshold`, if one exists.
pub fn aps_blocking_prices(
    instance: &Instance,
    agent: usize,
    threshold: &Rational,
    limits: &OracleLimits,
) -> Result<Option<Vec<Rational>>> {
    instance.agent(agent)?;
    check_aps_size(instance, limits)?;
    let m = instance.num_goods();
    if !threshold.is_positive() {
        return Ok(None);
    }
    let table = value_table(instance.valuation(agent), m);
    blocking_prices(&minimal_sets(&table, m, threshold), m, instance.entitlement(agent))
}

/// Exact AnyPrice share of `agent`.
///
/// The witness, when present, is a price vector blocking the smallest
/// candidate value above the share.
pub fn exact_aps(instance: &Instance, agent: usize, limits: &OracleLimits) -> Result<ShareValue> {
    instance.agent(agent)?;
    check_aps_size(instance, limits)?;
    let m = instance.num_goods();
    let table = value_table(instance.valuation(agent), m);
    let budget = instance.entitlement(agent);
    let mut candidates: Vec<&Rational> = table.iter().collect();
    candidates.sort();
    candidates.dedup();

    let mut witness = None;
    for z in candidates.into_iter().rev() {
        if !z.is_positive() {
            return Ok(ShareValue { notion: Notion::Aps, agent, value: z.clone(), witness });
        }
        match blocking_prices(&minimal_sets(&table, m, z), m, budget)? {
            Some(prices) => witness = Some(Witness::Prices(prices)),
            None => return Ok(ShareValue { notion: Notion::Aps, agent, value: z.clone(), witness }),
        }
    }
    // v(∅) = 0 is always a candidate and is never blocked.
    unreachable!("the empty bundle is always affordable")
}

/// `max_A min_i v_i(A_i) / WMMS_i` over complete allocations.
///
/// Agents with `WMMS_i = 0` are satisfied by any bundle and drop out of the
/// minimum; if every agent does, the ratio is 1. The ratio is not capped
/// at 1.
pub fn best_allocation_ratio(instance: &Instance, limits: &OracleLimits) -> Result<Rational> {
    let (n, m) = (instance.n(), instance.num_goods());
    limits.check_partitions("allocation enumeration", n, m)?;
    let shares: Vec<Rational> =
        (0..n).map(|i| exact_wmms(instance, i, limits).map(|s| s.value)).collect::<Result<_>>()?;
    if shares.iter().all(Zero::is_zero) {
        return Ok(Rational::one());
    }
    if m > 24 {
        return Err(Error::CapExceeded {
            what: "allocation enumeration",
            needed: format!("2^{m}"),
            cap: limits.max_partitions,
        });
    }
    let mut keys = Vec::with_capacity(n << m);
    for (i, share) in shares.iter().enumerate() {
        let valuation = instance.valuation(i);
        if share.is_zero() {
            continue;
        }
        keys.extend(value_table(valuation, m).into_iter().map(|v| v / share));
    }
    let ranks = rank_all(&keys);
    let mut chunks = ranks.chunks(1 << m);
    let satisfied = u32::MAX;
    let score: Vec<Vec<u32>> = shares
        .iter()
        .map(|share| if share.is_zero() { vec![satisfied; 1 << m] } else { chunks.next().unwrap().to_vec() })
        .collect();
    let (_, assign) = PartitionSearch::run(m, n, &score, false);
    let bundles = bundles_from_assignment(&assign, n);
    Ok(bundles
        .iter()
        .enumerate()
        .filter(|(i, _)| !shares[*i].is_zero())
        .map(|(i, bundle)| instance.valuation(i).value(bundle) / &shares[i])
        .min()
        .unwrap())
}

/// Exact share of one agent under `notion`.
pub fn share_of(instance: &Instance, notion: Notion, agent: usize, limits: &OracleLimits) -> Result<ShareValue> {
    match notion {
        Notion::Aps => exact_aps(instance, agent, limits),
        Notion::Mms => exact_mms(instance, agent, limits),
        Notion::Wmms => exact_wmms(instance, agent, limits),
    }
}

/// Exact shares of every agent for one notion.
pub fn all_shares(instance: &Instance, notion: Notion, limits: &OracleLimits) -> Result<Vec<ShareValue>> {
    (0..instance.n()).map(|i| share_of(instance, notion, i, limits)).collect()
}

pub(crate) fn price_of(prices: &[Rational], bundle: &GoodSet) -> Rational {
    bundle.iter().fold(Rational::zero(), |acc, g| acc + &prices[g])
}

/// Checks a blocking witness: prices non-negative, summing to 1, and every
/// set worth at least `threshold` costing more than the budget.
pub fn blocking_witness_holds(instance: &Instance, agent: usize, threshold: &Rational, prices: &[Rational]) -> bool {
    let m = instance.num_goods();
    if prices.len() != m || prices.iter().any(Signed::is_negative) {
        return false;
    }
    if prices.iter().fold(Rational::zero(), |acc, p| acc + p) != Rational::one() {
        return false;
    }
    let valuation = instance.valuation(agent);
    let budget = instance.entitlement(agent);
    (0u64..1 << m).all(|mask| {
        let bundle = GoodSet::from_mask(mask);
        valuation.value_mask(mask) < *threshold || price_of(prices, &bundle) > *budget
    })
}
