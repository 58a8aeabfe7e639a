//! Valuation oracles.
//!
//! Four valuation classes are supported, all XOS (a pointwise maximum of
//! additive clauses):
//!
//! * `BinaryXos`: clauses are good sets with unit weights, `v(S) = max_t |S ∩ T_t|`.
//! * `Xos`: clauses carry non-negative rational weights.
//! * `Additive`: a single weighted clause.
//! * `BinaryAdditive`: a single unit clause, `v(S) = |S ∩ D|`.
//!
//! Binary classes have marginals in `{0, 1}`, so every bundle contains a
//! non-wasteful subset `X` with `v(X) = |X| = v(S)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::GoodSet;
use crate::rational::{self, Rational};

/// One additive clause of an XOS valuation: good → weight.
pub type Clause = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    BinaryXos { clauses: Vec<GoodSet> },
    Xos { clauses: Vec<Clause> },
    Additive { weights: Clause },
    BinaryAdditive { desired: GoodSet },
}

/// A non-wasteful subset extracted from a bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonWastefulWitness {
    pub source: GoodSet,
    pub extracted: GoodSet,
    pub value: u64,
}

impl Valuation {
    pub fn class_name(&self) -> &'static str {
        match self {
            Valuation::BinaryXos { .. } => "binary_xos",
            Valuation::Xos { .. } => "xos",
            Valuation::Additive { .. } => "additive",
            Valuation::BinaryAdditive { .. } => "binary_additive",
        }
    }

    /// Evaluates the valuation on the set described by `contains`.
    ///
    /// Work is proportional to the size of the representation, independent
    /// of how the bundle is stored.
    pub fn eval(&self, contains: impl Fn(usize) -> bool) -> Rational {
        match self {
            Valuation::BinaryXos { clauses } => {
                let best =
                    clauses.iter().map(|clause| clause.iter().filter(|&g| contains(g)).count()).max().unwrap_or(0);
                rational::from_u64(best as u64)
            }
            Valuation::Xos { clauses } => {
                clauses.iter().map(|clause| clause_sum(clause, &contains)).max().unwrap_or_else(Rational::zero)
            }
            Valuation::Additive { weights } => clause_sum(weights, &contains),
            Valuation::BinaryAdditive { desired } => {
                rational::from_u64(desired.iter().filter(|&g| contains(g)).count() as u64)
            }
        }
    }

    pub fn value(&self, bundle: &GoodSet) -> Rational {
        self.eval(|g| bundle.contains(g))
    }

    /// Value of the bundle encoded as a bitmask over goods `0..64`.
    pub fn value_mask(&self, mask: u64) -> Rational {
        self.eval(|g| g < 64 && mask >> g & 1 == 1)
    }

    /// Every good id the representation mentions.
    pub fn referenced_goods(&self) -> Vec<usize> {
        let mut goods: Vec<usize> = match self {
            Valuation::BinaryXos { clauses } => clauses.iter().flat_map(|c| c.iter()).collect(),
            Valuation::Xos { clauses } => clauses.iter().flat_map(|c| c.keys().copied()).collect(),
            Valuation::Additive { weights } => weights.keys().copied().collect(),
            Valuation::BinaryAdditive { desired } => desired.iter().collect(),
        };
        goods.sort_unstable();
        goods.dedup();
        goods
    }

    /// The valuation as an explicit list of additive clauses.
    pub fn additive_clauses(&self) -> Vec<Clause> {
        let unit = |set: &GoodSet| -> Clause { set.iter().map(|g| (g, Rational::one())).collect() };
        match self {
            Valuation::BinaryXos { clauses } => clauses.iter().map(unit).collect(),
            Valuation::Xos { clauses } => clauses.clone(),
            Valuation::Additive { weights } => vec![weights.clone()],
            Valuation::BinaryAdditive { desired } => vec![unit(desired)],
        }
    }

    /// Unit-weight clause sets, when every clause weight is 0 or 1.
    ///
    /// Such a representation certifies binary marginals.
    pub fn unit_clauses(&self) -> Option<Vec<GoodSet>> {
        match self {
            Valuation::BinaryXos { clauses } => Some(clauses.clone()),
            Valuation::BinaryAdditive { desired } => Some(vec![desired.clone()]),
            Valuation::Xos { clauses } => clauses.iter().map(unit_support).collect(),
            Valuation::Additive { weights } => unit_support(weights).map(|set| vec![set]),
        }
    }

    /// The desired set `D = {g : v({g}) = 1}` of a binary additive valuation.
    pub fn desired_set(&self) -> Option<GoodSet> {
        match self {
            Valuation::BinaryAdditive { desired } => Some(desired.clone()),
            Valuation::Additive { weights } => unit_support(weights),
            _ => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.unit_clauses().is_some()
    }
}

fn clause_sum(clause: &Clause, contains: impl Fn(usize) -> bool) -> Rational {
    clause.iter().filter(|(&g, _)| contains(g)).fold(Rational::zero(), |acc, (_, w)| acc + w)
}

fn unit_support(clause: &Clause) -> Option<GoodSet> {
    let mut support = GoodSet::new();
    for (&g, w) in clause {
        if w.is_one() {
            support.insert(g);
        } else if !w.is_zero() {
            return None;
        }
    }
    Some(support)
}

/// Checks `v(S ∪ {g}) − v(S) ∈ {0, 1}`.
///
/// Exhaustive over all `(S, g)` when `2^goods ≤ 4096`; otherwise samples
/// `trials` random pairs from a seeded generator.
pub fn check_binary_marginals(valuation: &Valuation, goods: usize, trials: usize, seed: u64) -> bool {
    let binary_step = |with: &Rational, without: &Rational| {
        let step = with - without;
        step.is_zero() || step.is_one()
    };
    if goods <= 12 {
        for mask in 0u64..1 << goods {
            let base = valuation.value_mask(mask);
            for g in 0..goods {
                if mask >> g & 1 == 0 && !binary_step(&valuation.value_mask(mask | 1 << g), &base) {
                    return false;
                }
            }
        }
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let set: GoodSet = (0..goods).filter(|_| rng.gen_bool(0.5)).collect();
        let g = rng.gen_range(0..goods);
        if set.contains(g) {
            continue;
        }
        let mut bigger = set.clone();
        bigger.insert(g);
        if !binary_step(&valuation.value(&bigger), &valuation.value(&set)) {
            return false;
        }
    }
    true
}

/// Extracts `X ⊆ bundle` with `v(X) = |X| = v(bundle)`.
///
/// Valuations with a unit-clause representation take the fast path
/// `X = bundle ∩ T_t*`, where `t*` is the lowest-index clause maximising
/// `|bundle ∩ T_t|`. Everything else goes through the oracle-only greedy
/// [`extract_non_wasteful_generic`].
pub fn extract_non_wasteful(valuation: &Valuation, bundle: &GoodSet) -> Result<NonWastefulWitness> {
    match valuation.unit_clauses() {
        Some(clauses) => Ok(extract_from_clauses(&clauses, bundle)),
        None => extract_non_wasteful_generic(valuation, bundle),
    }
}

pub(crate) fn extract_from_clauses(clauses: &[GoodSet], bundle: &GoodSet) -> NonWastefulWitness {
    let mut best: Option<GoodSet> = None;
    for clause in clauses {
        let hit = bundle.intersection(clause);
        if best.as_ref().is_none_or(|b| hit.len() > b.len()) {
            best = Some(hit);
        }
    }
    let extracted = best.unwrap_or_default();
    NonWastefulWitness { source: bundle.clone(), value: extracted.len() as u64, extracted }
}

/// Greedy single-good removal using only value queries.
///
/// Scans goods in ascending id and removes the first one whose removal
/// keeps the value, restarting until `v(X) = |X|`. Needs `O(m²)` queries.
pub fn extract_non_wasteful_generic(valuation: &Valuation, bundle: &GoodSet) -> Result<NonWastefulWitness> {
    let mut current = bundle.clone();
    let mut value = valuation.value(&current);
    let target = integral(&value, bundle.first().unwrap_or(0))?;
    if target > current.len() as u64 {
        for g in current.iter() {
            let mut without = current.clone();
            without.remove(g);
            let marginal = &value - valuation.value(&without);
            if !(marginal.is_zero() || marginal.is_one()) {
                return Err(Error::NonBinaryMarginal { good: g, marginal });
            }
        }
        return Err(Error::NonBinaryMarginal { good: current.first().unwrap_or(0), marginal: value });
    }
    while (current.len() as u64) > target {
        let mut removed = None;
        for g in current.iter() {
            let mut without = current.clone();
            without.remove(g);
            let reduced = valuation.value(&without);
            let marginal = &value - &reduced;
            if !(marginal.is_zero() || marginal.is_one()) {
                return Err(Error::NonBinaryMarginal { good: g, marginal });
            }
            if marginal.is_zero() {
                removed = Some(without);
                break;
            }
        }
        match removed {
            Some(next) => current = next,
            // With binary marginals a redundant good exists while v(X) < |X|.
            None => return Err(Error::NonBinaryMarginal { good: current.first().unwrap_or(0), marginal: value }),
        }
        value = valuation.value(&current);
    }
    Ok(NonWastefulWitness { source: bundle.clone(), extracted: current, value: target })
}

fn integral(value: &Rational, good: usize) -> Result<u64> {
    rational::as_u64(value).ok_or_else(|| Error::NonBinaryMarginal { good, marginal: value.clone() })
}

/// The `k` lowest-id goods of the extracted set.
pub fn trim_non_wasteful(witness: &NonWastefulWitness, k: usize) -> Result<GoodSet> {
    if k > witness.extracted.len() {
        return Err(Error::TrimOutOfRange { k, len: witness.extracted.len() });
    }
    Ok(witness.extracted.iter().take(k).collect())
}
