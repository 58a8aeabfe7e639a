//! Instances, allocations and share values.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuation::Valuation;

/// A set of good ids, iterated in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoodSet(BTreeSet<usize>);

impl GoodSet {
    pub fn new() -> Self {
        GoodSet(BTreeSet::new())
    }

    /// All goods `0..m`.
    pub fn full(m: usize) -> Self {
        (0..m).collect()
    }

    pub fn from_mask(mask: u64) -> Self {
        (0..64).filter(|g| mask >> g & 1 == 1).collect()
    }

    /// Bitmask encoding; `None` if some good id is ≥ 64.
    pub fn to_mask(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, &g| (g < 64).then(|| acc | 1 << g))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, good: usize) -> bool {
        self.0.contains(&good)
    }

    pub fn insert(&mut self, good: usize) -> bool {
        self.0.insert(good)
    }

    pub fn remove(&mut self, good: usize) -> bool {
        self.0.remove(&good)
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn intersection(&self, other: &GoodSet) -> GoodSet {
        GoodSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &GoodSet) -> GoodSet {
        GoodSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn union_with(&mut self, other: &GoodSet) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn is_subset(&self, other: &GoodSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &GoodSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }
}

impl FromIterator<usize> for GoodSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        GoodSet(iter.into_iter().collect())
    }
}

impl From<BTreeSet<usize>> for GoodSet {
    fn from(set: BTreeSet<usize>) -> Self {
        GoodSet(set)
    }
}

impl<'a> IntoIterator for &'a GoodSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub entitlement: Rational,
    pub valuation: Valuation,
}

impl Agent {
    pub fn new(entitlement: Rational, valuation: Valuation) -> Self {
        Agent { entitlement, valuation }
    }
}

/// A labeled partition supplied alongside an instance, optionally with
/// the WMMS value it claims to attain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuppliedPartition {
    pub bundles: Vec<GoodSet>,
    pub value: Option<Rational>,
}

/// A validated fair-division instance: goods `0..m`, agents `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    goods: usize,
    agents: Vec<Agent>,
    wmms_partitions: Option<Vec<SuppliedPartition>>,
}

impl Instance {
    /// Validates entitlements (positive, summing to exactly 1) and the
    /// good references and weights of every valuation.
    pub fn new(goods: usize, agents: Vec<Agent>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::Schema { path: "agents".into(), message: "at least one agent is required".into() });
        }
        let mut total = Rational::zero();
        for (i, agent) in agents.iter().enumerate() {
            if !agent.entitlement.is_positive() {
                return Err(Error::Schema {
                    path: format!("agents[{i}].entitlement"),
                    message: format!("entitlement {} is not positive", agent.entitlement),
                });
            }
            total += &agent.entitlement;
            validate_valuation(&agent.valuation, goods, &format!("agents[{i}].valuation"))?;
        }
        if !total.is_one() {
            return Err(Error::EntitlementSum(total));
        }
        Ok(Instance { goods, agents, wmms_partitions: None })
    }

    /// Attaches per-agent WMMS partitions; bundle counts and good
    /// references are checked here, optimality claims by the consumer.
    pub fn with_wmms_partitions(mut self, partitions: Vec<SuppliedPartition>) -> Result<Self> {
        if partitions.len() != self.n() {
            return Err(Error::Schema {
                path: "wmmsPartitions".into(),
                message: format!("expected {} partitions, found {}", self.n(), partitions.len()),
            });
        }
        for (i, p) in partitions.iter().enumerate() {
            if p.bundles.len() != self.n() {
                return Err(Error::Schema {
                    path: format!("wmmsPartitions[{i}].bundles"),
                    message: format!("expected {} bundles, found {}", self.n(), p.bundles.len()),
                });
            }
            for (j, bundle) in p.bundles.iter().enumerate() {
                if let Some(g) = bundle.iter().find(|&g| g >= self.goods) {
                    return Err(Error::DanglingGood {
                        path: format!("wmmsPartitions[{i}].bundles[{j}]"),
                        good: g,
                        goods: self.goods,
                    });
                }
            }
        }
        self.wmms_partitions = Some(partitions);
        Ok(self)
    }

    pub fn num_goods(&self) -> usize {
        self.goods
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, agent: usize) -> Result<&Agent> {
        self.agents.get(agent).ok_or(Error::UnknownAgent(agent))
    }

    pub fn entitlement(&self, agent: usize) -> &Rational {
        &self.agents[agent].entitlement
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.agents[agent].valuation
    }

    pub fn wmms_partitions(&self) -> Option<&[SuppliedPartition]> {
        self.wmms_partitions.as_deref()
    }

    pub fn all_goods(&self) -> GoodSet {
        GoodSet::full(self.goods)
    }

    /// `v_agent(bundle)`, rejecting goods outside the instance.
    pub fn value(&self, agent: usize, bundle: &GoodSet) -> Result<Rational> {
        let a = self.agent(agent)?;
        if let Some(g) = bundle.iter().find(|&g| g >= self.goods) {
            return Err(Error::DanglingGood { path: "bundle".into(), good: g, goods: self.goods });
        }
        Ok(a.valuation.value(bundle))
    }

    /// The same goods and valuations with every entitlement set to `1/n`.
    pub fn with_equal_entitlements(&self) -> Instance {
        let share = Rational::new(1.into(), (self.n() as i64).into());
        Instance {
            goods: self.goods,
            agents: self
                .agents
                .iter()
                .map(|a| Agent { entitlement: share.clone(), valuation: a.valuation.clone() })
                .collect(),
            wmms_partitions: None,
        }
    }

    /// Agent receiving goods left over after an algorithm finishes:
    /// largest entitlement, lowest id on ties.
    pub fn leftover_recipient(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.agents.iter().enumerate().skip(1) {
            if a.entitlement > self.agents[best].entitlement {
                best = i;
            }
        }
        best
    }

    /// Completes a partial allocation with the leftover rule.
    pub fn complete(&self, mut bundles: Vec<GoodSet>) -> Allocation {
        let mut unassigned = self.all_goods();
        for b in &bundles {
            unassigned = unassigned.difference(b);
        }
        bundles[self.leftover_recipient()].union_with(&unassigned);
        Allocation { bundles, complete: true }
    }
}

fn validate_valuation(valuation: &Valuation, goods: usize, path: &str) -> Result<()> {
    let dangling = |good: usize, path: String| Error::DanglingGood { path, good, goods };
    let check_weights = |clause: &crate::valuation::Clause, path: String| -> Result<()> {
        for (&g, w) in clause {
            if g >= goods {
                return Err(dangling(g, path));
            }
            if w.is_negative() {
                return Err(Error::NegativeWeight { path: format!("{path}.{g}"), weight: w.clone() });
            }
        }
        Ok(())
    };
    match valuation {
        Valuation::BinaryXos { clauses } => {
            if clauses.is_empty() {
                return Err(Error::Schema {
                    path: format!("{path}.clauses"),
                    message: "at least one clause is required".into(),
                });
            }
            for (t, clause) in clauses.iter().enumerate() {
                if let Some(g) = clause.iter().find(|&g| g >= goods) {
                    return Err(dangling(g, format!("{path}.clauses[{t}]")));
                }
            }
        }
        Valuation::Xos { clauses } => {
            if clauses.is_empty() {
                return Err(Error::Schema {
                    path: format!("{path}.clauses"),
                    message: "at least one clause is required".into(),
                });
            }
            for (t, clause) in clauses.iter().enumerate() {
                check_weights(clause, format!("{path}.clauses[{t}]"))?;
            }
        }
        Valuation::Additive { weights } => check_weights(weights, format!("{path}.weights"))?,
        Valuation::BinaryAdditive { desired } => {
            if let Some(g) = desired.iter().find(|&g| g >= goods) {
                return Err(dangling(g, format!("{path}.desired")));
            }
        }
    }
    Ok(())
}

/// Disjoint bundles indexed by agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub bundles: Vec<GoodSet>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BundleCount { expected: usize, found: usize },
    UnknownGood(usize),
    AssignedTwice(usize),
    Unassigned(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BundleCount { expected, found } => write!(f, "expected {expected} bundles, found {found}"),
            Violation::UnknownGood(g) => write!(f, "good {g} does not exist"),
            Violation::AssignedTwice(g) => write!(f, "good {g} assigned twice"),
            Violation::Unassigned(g) => write!(f, "good {g} unassigned"),
        }
    }
}

/// Lists every disjointness, range and (for complete allocations)
/// coverage violation; empty means valid.
pub fn validate_allocation(instance: &Instance, allocation: &Allocation) -> Vec<Violation> {
    let mut violations = Vec::new();
    if allocation.bundles.len() != instance.n() {
        violations.push(Violation::BundleCount { expected: instance.n(), found: allocation.bundles.len() });
    }
    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for bundle in &allocation.bundles {
        for g in bundle {
            if g >= instance.num_goods() {
                if reported.insert(g) {
                    violations.push(Violation::UnknownGood(g));
                }
            } else if !seen.insert(g) && reported.insert(g) {
                violations.push(Violation::AssignedTwice(g));
            }
        }
    }
    if allocation.complete {
        violations.extend((0..instance.num_goods()).filter(|g| !seen.contains(g)).map(Violation::Unassigned));
    }
    violations
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Notion {
    Aps,
    Mms,
    Wmms,
}

impl Notion {
    pub fn as_str(self) -> &'static str {
        match self {
            Notion::Aps => "APS",
            Notion::Mms => "MMS",
            Notion::Wmms => "WMMS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Labeled partition, bundle `j` intended for agent `j`.
    Partition(Vec<GoodSet>),
    /// Price vector blocking the smallest candidate value above the share.
    Prices(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareValue {
    pub notion: Notion,
    pub agent: usize,
    pub value: Rational,
    pub witness: Option<Witness>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn set(goods: &[usize]) -> GoodSet {
        goods.iter().copied().collect()
    }

    fn bxos(clauses: &[&[usize]]) -> Valuation {
        Valuation::BinaryXos { clauses: clauses.iter().map(|c| set(c)).collect() }
    }

    fn two_agents() -> Instance {
        Instance::new(
            3,
            vec![Agent::new(ratio(1, 3), bxos(&[&[0], &[1, 2]])), Agent::new(ratio(2, 3), bxos(&[&[0, 1, 2]]))],
        )
        .unwrap()
    }

    #[test]
    fn mask_roundtrip() {
        let s = set(&[0, 5, 63]);
        assert_eq!(GoodSet::from_mask(s.to_mask().unwrap()), s);
        assert_eq!(set(&[64]).to_mask(), None);
        assert_eq!(set(&[0, 2]).to_string(), "{0,2}");
    }

    #[test]
    fn entitlement_sum_is_checked() {
        let err =
            Instance::new(1, vec![Agent::new(ratio(1, 2), bxos(&[&[0]])), Agent::new(ratio(1, 3), bxos(&[&[0]]))])
                .unwrap_err();
        assert_eq!(err.to_string(), "entitlements sum 5/6 ≠ 1");
    }

    #[test]
    fn entitlements_must_be_positive() {
        let err =
            Instance::new(1, vec![Agent::new(int(0), bxos(&[&[0]])), Agent::new(int(1), bxos(&[&[0]]))]).unwrap_err();
        assert!(err.to_string().starts_with("agents[0].entitlement"));
    }

    #[test]
    fn dangling_and_negative_are_rejected() {
        let err = Instance::new(3, vec![Agent::new(int(1), bxos(&[&[0], &[7]]))]).unwrap_err();
        assert!(matches!(err, Error::DanglingGood { good: 7, goods: 3, .. }));
        assert_eq!(err.to_string(), "agents[0].valuation.clauses[1]: good 7 does not exist in a 3-good instance");

        let neg = Valuation::Additive { weights: [(0, ratio(-1, 2))].into_iter().collect() };
        let err = Instance::new(2, vec![Agent::new(int(1), neg)]).unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { .. }));

        let err = Instance::new(2, vec![Agent::new(int(1), Valuation::BinaryXos { clauses: vec![] })]).unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }

    #[test]
    fn allocation_violations() {
        let inst = two_agents();
        let ok = Allocation { bundles: vec![set(&[0]), set(&[1, 2])], complete: true };
        assert!(validate_allocation(&inst, &ok).is_empty());

        let twice = Allocation { bundles: vec![set(&[0, 1]), set(&[1])], complete: false };
        let v = validate_allocation(&inst, &twice);
        assert_eq!(v, vec![Violation::AssignedTwice(1)]);
        assert_eq!(v[0].to_string(), "good 1 assigned twice");

        let missing = Allocation { bundles: vec![set(&[0]), set(&[1])], complete: true };
        let v = validate_allocation(&inst, &missing);
        assert_eq!(v, vec![Violation::Unassigned(2)]);
        assert_eq!(v[0].to_string(), "good 2 unassigned");

        let partial = Allocation { bundles: vec![set(&[0]), set(&[])], complete: false };
        assert!(validate_allocation(&inst, &partial).is_empty());

        let bad = Allocation { bundles: vec![set(&[9])], complete: false };
        assert_eq!(
            validate_allocation(&inst, &bad),
            vec![Violation::BundleCount { expected: 2, found: 1 }, Violation::UnknownGood(9)]
        );
    }

    #[test]
    fn leftovers_go_to_largest_entitlement() {
        let inst = two_agents();
        assert_eq!(inst.leftover_recipient(), 1);
        let alloc = inst.complete(vec![set(&[0]), GoodSet::new()]);
        assert_eq!(alloc.bundles[1], set(&[1, 2]));

        let tied = inst.with_equal_entitlements();
        assert_eq!(tied.leftover_recipient(), 0);
        assert_eq!(tied.entitlement(1), &ratio(1, 2));
    }

    #[test]
    fn value_rejects_foreign_goods() {
        let inst = two_agents();
        assert_eq!(inst.value(1, &set(&[0, 2])).unwrap(), int(2));
        assert!(inst.value(0, &set(&[3])).is_err());
        assert!(matches!(inst.value(5, &set(&[])), Err(Error::UnknownAgent(5))));
    }
}
