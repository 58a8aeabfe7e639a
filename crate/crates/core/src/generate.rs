//! Deterministic instance families.
//!
//! Two tight constructions (the 1/n-WMMS lower bound and the APS/WMMS gap)
//! plus seeded random families for fuzzing. Random instances depend only
//! on the [`GeneratorSpec`], so the same seed always yields the same bytes.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Agent, GoodSet, Instance};
use crate::rational::{self, ratio, Rational};
use crate::valuation::{Clause, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Thm43,
    Prop41,
    RandomBinaryXos,
    RandomBinaryAdditive,
    RandomXos,
    RandomAdditive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    /// Gap parameter for `Prop41`; derived from `delta` when absent.
    pub epsilon: Option<Rational>,
    /// Target APS/WMMS ratio for `Prop41`.
    pub delta: Option<Rational>,
    /// Maximum number of clauses per XOS valuation.
    pub clause_count: usize,
    /// Maximum clause size.
    pub clause_size: usize,
    pub seed: u64,
    /// Entitlements are `w_i / Σw` with `Σw` at most this.
    pub max_denominator: u64,
    /// Restrict `RandomAdditive` weights to {0, 1}.
    pub zero_one_weights: bool,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, m: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            n,
            m,
            epsilon: None,
            delta: None,
            clause_count: 4,
            clause_size: m.max(1),
            seed,
            max_denominator: 1000,
            zero_one_weights: false,
        }
    }
}

/// The 1/n-WMMS tight instance: `m = 2n − 1`, agents `0..n−1` value any
/// single good of `{0..n−1}`, agent `n−1` additionally values the clause
/// `{0..n−1}` and entitlement `n/(2n−1)`.
pub fn gen_thm43(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Generator(format!("thm43 needs n ≥ 2, got {n}")));
    }
    let m = 2 * n - 1;
    let light: Vec<GoodSet> = (0..n).map(|g| GoodSet::from_iter([g])).collect();
    let mut heavy = vec![GoodSet::full(n)];
    heavy.extend((n..m).map(|g| GoodSet::from_iter([g])));
    let mut agents: Vec<Agent> =
        (0..n - 1).map(|_| Agent::new(ratio(1, m as i64), Valuation::BinaryXos { clauses: light.clone() })).collect();
    agents.push(Agent::new(ratio(n as i64, m as i64), Valuation::BinaryXos { clauses: heavy }));
    Instance::new(m, agents)
}

/// The APS/WMMS gap instance: `m = n` goods, identical additive values
/// and entitlements `(ε, …, ε, 1 − (n−1)ε)`.
pub fn gen_prop41(n: usize, epsilon: &Rational) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Generator(format!("prop41 needs n ≥ 2, got {n}")));
    }
    let rest = Rational::one() - epsilon * rational::from_u64(n as u64 - 1);
    if !epsilon.is_positive() || !rest.is_positive() {
        return Err(Error::Generator(format!("prop41 needs 0 < ε < 1/(n−1), got ε = {epsilon}")));
    }
    let weights: Clause = (0..n).map(|g| (g, if g + 1 < n { epsilon.clone() } else { rest.clone() })).collect();
    let agents = (0..n)
        .map(|i| {
            let b = if i + 1 < n { epsilon.clone() } else { rest.clone() };
            Agent::new(b, Valuation::Additive { weights: weights.clone() })
        })
        .collect();
    Instance::new(n, agents)
}

/// Half of the largest admissible ε for APS/WMMS < δ: `δ / (2(n−1)(δ+1))`.
pub fn epsilon_for_delta(n: usize, delta: &Rational) -> Result<Rational> {
    if n < 2 || !delta.is_positive() {
        return Err(Error::Generator(format!("δ-targeting needs n ≥ 2 and δ > 0, got n = {n}, δ = {delta}")));
    }
    let bound = delta / (rational::from_u64(n as u64 - 1) * (delta + Rational::one()));
    Ok(bound / rational::int(2))
}

pub fn gen_random(spec: &GeneratorSpec) -> Result<Instance> {
    match spec.family {
        Family::Thm43 => return gen_thm43(spec.n),
        Family::Prop41 => {
            let epsilon = match (&spec.epsilon, &spec.delta) {
                (Some(e), _) => e.clone(),
                (None, Some(d)) => epsilon_for_delta(spec.n, d)?,
                (None, None) => return Err(Error::Generator("prop41 needs ε or δ".into())),
            };
            return gen_prop41(spec.n, &epsilon);
        }
        _ => {}
    }
    if spec.n == 0 || spec.m == 0 {
        return Err(Error::Generator(format!("need n ≥ 1 and m ≥ 1, got n = {}, m = {}", spec.n, spec.m)));
    }
    if spec.clause_count == 0 || spec.clause_size == 0 {
        return Err(Error::Generator("clause count and clause size caps must be positive".into()));
    }
    if spec.max_denominator < spec.n as u64 {
        return Err(Error::Generator(format!(
            "max denominator {} is below the agent count {}",
            spec.max_denominator, spec.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let entitlements = random_entitlements(&mut rng, spec.n, spec.max_denominator);
    let agents = entitlements
        .into_iter()
        .map(|b| {
            let valuation = match spec.family {
                Family::RandomBinaryXos => Valuation::BinaryXos {
                    clauses: (0..rng.gen_range(1..=spec.clause_count))
                        .map(|_| random_subset(&mut rng, spec.m, spec.clause_size))
                        .collect(),
                },
                Family::RandomBinaryAdditive => {
                    Valuation::BinaryAdditive { desired: (0..spec.m).filter(|_| rng.gen_bool(0.5)).collect() }
                }
                Family::RandomXos => Valuation::Xos {
                    clauses: (0..rng.gen_range(1..=spec.clause_count))
                        .map(|_| {
                            random_subset(&mut rng, spec.m, spec.clause_size)
                                .iter()
                                .map(|g| (g, random_weight(&mut rng, false)))
                                .collect()
                        })
                        .collect(),
                },
                Family::RandomAdditive => Valuation::Additive {
                    weights: (0..spec.m)
                        .map(|g| (g, random_weight(&mut rng, spec.zero_one_weights)))
                        .filter(|(_, w)| !w.is_zero())
                        .collect::<BTreeMap<_, _>>(),
                },
                Family::Thm43 | Family::Prop41 => unreachable!(),
            };
            Agent::new(b, valuation)
        })
        .collect();
    Instance::new(spec.m, agents)
}

fn random_entitlements(rng: &mut ChaCha8Rng, n: usize, max_denominator: u64) -> Vec<Rational> {
    let per_agent = (max_denominator / n as u64).max(1);
    let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=per_agent)).collect();
    let total: u64 = weights.iter().sum();
    weights.into_iter().map(|w| ratio(w as i64, total as i64)).collect()
}

fn random_subset(rng: &mut ChaCha8Rng, m: usize, max_size: usize) -> GoodSet {
    let size = rng.gen_range(1..=max_size.min(m));
    sample(rng, m, size).into_iter().collect()
}

fn random_weight(rng: &mut ChaCha8Rng, zero_one: bool) -> Rational {
    if zero_one {
        rational::from_u64(rng.gen_range(0..=1))
    } else {
        ratio(rng.gen_range(0..=6), rng.gen_range(1..=3))
    }
}
