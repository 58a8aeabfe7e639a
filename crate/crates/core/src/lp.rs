//! Exact rational simplex for small linear programs.
//!
//! Solves `max c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`, so the all-slack
//! basis is feasible and no phase one is needed. The tableau is kept in
//! dictionary form (one column per nonbasic variable) and pivots follow
//! Bland's rule, which rules out cycling.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("right-hand side of row {0} is negative; origin is infeasible")]
    InfeasibleOrigin(usize),
    #[error("row {row} has {found} coefficients, expected {expected}")]
    Shape { row: usize, found: usize, expected: usize },
    #[error("objective is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub objective: Rational,
    pub x: Vec<Rational>,
    pub pivots: usize,
}

#[allow(clippy::needless_range_loop)]
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Result<LpSolution, LpError> {
    let vars = c.len();
    let rows = a.len();
    for (r, row) in a.iter().enumerate() {
        if row.len() != vars {
            return Err(LpError::Shape { row: r, found: row.len(), expected: vars });
        }
        if b[r].is_negative() {
            return Err(LpError::InfeasibleOrigin(r));
        }
    }

    // basic_r = rhs_r − Σ_k t[r][k]·x_{nonbasic_k};  z = z0 + Σ_k cbar_k·x_{nonbasic_k}
    let mut t: Vec<Vec<Rational>> = a.to_vec();
    let mut rhs: Vec<Rational> = b.to_vec();
    let mut cbar: Vec<Rational> = c.to_vec();
    let mut z0 = Rational::zero();
    let mut nonbasic: Vec<usize> = (0..vars).collect();
    let mut basic: Vec<usize> = (vars..vars + rows).collect();
    let mut pivots = 0;

    loop {
        let entering = (0..vars).filter(|&k| cbar[k].is_positive()).min_by_key(|&k| nonbasic[k]);
        let Some(e) = entering else { break };

        let mut leaving: Option<(usize, Rational)> = None;
        for r in 0..rows {
            if !t[r][e].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &t[r][e];
            let better = match &leaving {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basic[r] < basic[*l]),
            };
            if better {
                leaving = Some((r, ratio));
            }
        }
        let Some((l, _)) = leaving else { return Err(LpError::Unbounded) };

        let pivot = t[l][e].clone();
        rhs[l] = &rhs[l] / &pivot;
        for k in 0..vars {
            if k != e {
                t[l][k] = &t[l][k] / &pivot;
            }
        }
        t[l][e] = Rational::from_integer(1.into()) / &pivot;

        for r in 0..rows {
            if r == l || t[r][e].is_zero() {
                continue;
            }
            let factor = t[r][e].clone();
            rhs[r] = &rhs[r] - &factor * &rhs[l];
            for k in 0..vars {
                if k != e {
                    let delta = &factor * &t[l][k];
                    t[r][k] -= delta;
                }
            }
            t[r][e] = -(&factor * &t[l][e]);
        }

        let factor = cbar[e].clone();
        z0 += &factor * &rhs[l];
        for k in 0..vars {
            if k != e {
                let delta = &factor * &t[l][k];
                cbar[k] -= delta;
            }
        }
        cbar[e] = -(&factor * &t[l][e]);

        std::mem::swap(&mut basic[l], &mut nonbasic[e]);
        pivots += 1;
    }

    let mut x = vec![Rational::zero(); vars];
    for (r, &var) in basic.iter().enumerate() {
        if var < vars {
            x[var] = rhs[r].clone();
        }
    }
    Ok(LpSolution { objective: z0, x, pivots })
}
