//! Checks an allocation against a share guarantee, recomputing every
//! share with the exact oracles.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::RationalText;
use crate::model::{validate_allocation, Allocation, Instance};
use crate::rational::{self, Rational};
use crate::shares::{exact_aps, exact_mms, exact_wmms, OracleLimits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    /// `v_i(A_i) ≥ APS_i / 2`, rounded up for binary valuations.
    ApsHalf,
    /// `v_i(A_i) ≥ MMS_i / 2`, rounded up for binary valuations.
    MmsHalf,
    /// `v_i(A_i) ≥ WMMS_i / n`.
    WmmsOverN,
    /// `v_i(A_i) ≥ WMMS_i`.
    WmmsExact,
}

impl Guarantee {
    pub fn as_str(self) -> &'static str {
        match self {
            Guarantee::ApsHalf => "aps-half",
            Guarantee::MmsHalf => "mms-half",
            Guarantee::WmmsOverN => "wmms-over-n",
            Guarantee::WmmsExact => "wmms-exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentCheck {
    pub achieved: RationalText,
    pub bound: RationalText,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub guarantee: Guarantee,
    pub per_agent: Vec<AgentCheck>,
    pub overall: bool,
}

fn half(share: Rational, binary: bool) -> Rational {
    let half = share / rational::int(2);
    if binary {
        half.ceil()
    } else {
        half
    }
}

/// The bound each agent must reach under `guarantee`.
pub fn guarantee_bounds(instance: &Instance, guarantee: Guarantee, limits: &OracleLimits) -> Result<Vec<Rational>> {
    let n = rational::from_u64(instance.n() as u64);
    (0..instance.n())
        .map(|i| {
            let binary = instance.valuation(i).is_binary();
            Ok(match guarantee {
                Guarantee::ApsHalf => half(exact_aps(instance, i, limits)?.value, binary),
                Guarantee::MmsHalf => half(exact_mms(instance, i, limits)?.value, binary),
                Guarantee::WmmsOverN => exact_wmms(instance, i, limits)?.value / &n,
                Guarantee::WmmsExact => exact_wmms(instance, i, limits)?.value,
            })
        })
        .collect()
}

/// Compares every agent's value with its bound. A structurally invalid
/// allocation is an input error rather than a failed guarantee.
pub fn verify(
    instance: &Instance,
    allocation: &Allocation,
    guarantee: Guarantee,
    limits: &OracleLimits,
) -> Result<VerifyReport> {
    let violations = validate_allocation(instance, allocation);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidAllocation(text.join("; ")));
    }
    let bounds = guarantee_bounds(instance, guarantee, limits)?;
    let per_agent: Vec<AgentCheck> = bounds
        .into_iter()
        .enumerate()
        .map(|(i, bound)| {
            let achieved = instance.valuation(i).value(&allocation.bundles[i]);
            AgentCheck { pass: achieved >= bound, achieved: RationalText(achieved), bound: RationalText(bound) }
        })
        .collect();
    let overall = per_agent.iter().all(|c| c.pass);
    Ok(VerifyReport { guarantee, per_agent, overall })
}

/// Human-readable summary: one row per agent and a closing verdict.
pub fn render_table(report: &VerifyReport) -> String {
    let rows: Vec<[String; 4]> = report
        .per_agent
        .iter()
        .enumerate()
        .map(|(i, c)| {
            [
                i.to_string(),
                rational::format(&c.achieved.0),
                rational::format(&c.bound.0),
                if c.pass { "yes" } else { "NO" }.into(),
            ]
        })
        .collect();
    let header = ["agent".to_string(), "achieved".into(), "bound".into(), "pass".into()];
    let mut widths = header.clone().map(|h| h.len());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = format!("guarantee: {}\n", report.guarantee.as_str());
    for row in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    let _ = writeln!(out, "overall: {}", if report.overall { "PASS" } else { "FAIL" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aps_half::solve_half_aps;
    use crate::generate::{gen_random, gen_thm43, Family, GeneratorSpec};
    use crate::io::{from_json, to_json};
    use crate::model::{Agent, GoodSet};
    use crate::rational::{int, ratio};
    use crate::valuation::Valuation;
    use crate::wmms::wmms_allocate_binadd;

    fn set(goods: &[usize]) -> GoodSet {
        goods.iter().copied().collect()
    }

    #[test]
    fn half_aps_output_passes() {
        let limits = OracleLimits::default();
        for seed in 0..10 {
            let inst = gen_random(&GeneratorSpec::new(Family::RandomBinaryXos, 3, 6, seed)).unwrap();
            let result = solve_half_aps(&inst).unwrap();
            let report = verify(&inst, &result.allocation, Guarantee::ApsHalf, &limits).unwrap();
            assert!(report.overall, "seed {seed}: {}", render_table(&report));
        }
    }

    #[test]
    fn starving_an_agent_fails_wmms_over_n() {
        let inst = gen_thm43(2).unwrap();
        let allocation = Allocation { bundles: vec![set(&[]), set(&[0, 1, 2])], complete: true };
        let report = verify(&inst, &allocation, Guarantee::WmmsOverN, &OracleLimits::default()).unwrap();
        assert!(!report.per_agent[0].pass);
        assert_eq!(report.per_agent[0].bound.0, ratio(1, 4));
        assert!(report.per_agent[1].pass);
        assert!(!report.overall);
    }

    #[test]
    fn contention_free_binadd_meets_wmms_exactly() {
        let agents = vec![
            Agent::new(ratio(1, 4), Valuation::BinaryAdditive { desired: set(&[0, 1]) }),
            Agent::new(ratio(3, 4), Valuation::BinaryAdditive { desired: set(&[2, 3, 4]) }),
        ];
        let inst = Instance::new(5, agents).unwrap();
        let result = wmms_allocate_binadd(&inst).unwrap();
        let report = verify(&inst, &result.allocation, Guarantee::WmmsExact, &OracleLimits::default()).unwrap();
        assert!(report.overall);
        // each agent gets its whole desired set; the share can sit strictly below it
        let achieved: Vec<Rational> = report.per_agent.iter().map(|c| c.achieved.0.clone()).collect();
        assert_eq!(achieved, vec![int(2), int(3)]);
        assert_eq!(report.per_agent[0].bound.0, ratio(1, 3));
        assert_eq!(report.per_agent[1].bound.0, int(2));
    }

    #[test]
    fn binary_bounds_round_up() {
        let agents = vec![Agent::new(int(1), Valuation::BinaryAdditive { desired: set(&[0, 1, 2]) })];
        let inst = Instance::new(3, agents).unwrap();
        let bounds = guarantee_bounds(&inst, Guarantee::ApsHalf, &OracleLimits::default()).unwrap();
        assert_eq!(bounds, vec![int(2)]);
        let additive = vec![Agent::new(int(1), Valuation::Additive { weights: [(0, int(3))].into_iter().collect() })];
        let inst = Instance::new(1, additive).unwrap();
        let bounds = guarantee_bounds(&inst, Guarantee::MmsHalf, &OracleLimits::default()).unwrap();
        assert_eq!(bounds, vec![ratio(3, 2)]);
    }

    #[test]
    fn invalid_allocation_is_an_input_error() {
        let inst = gen_thm43(2).unwrap();
        let allocation = Allocation { bundles: vec![set(&[0, 1]), set(&[1])], complete: true };
        let err = verify(&inst, &allocation, Guarantee::ApsHalf, &OracleLimits::default()).unwrap_err();
        assert!(err.to_string().contains("good 1 assigned twice"), "{err}");
    }

    #[test]
    fn report_json_and_table() {
        let inst = gen_thm43(2).unwrap();
        let allocation = Allocation { bundles: vec![set(&[0]), set(&[1, 2])], complete: true };
        let report = verify(&inst, &allocation, Guarantee::WmmsOverN, &OracleLimits::default()).unwrap();
        let text = to_json(&report);
        assert!(text.contains("\"guarantee\": \"wmms-over-n\""));
        assert!(text.contains("\"perAgent\""));
        assert_eq!(from_json::<VerifyReport>(&text).unwrap(), report);
        let table = render_table(&report);
        assert!(table.contains("overall: PASS"));
        assert!(table.lines().any(|l| l.trim_start().starts_with("0") && l.contains("1/4")));
    }
}
