//! Exact phase-1 revised simplex for `A x = b, x ≥ 0` with a 0/1 matrix `A`
//! whose columns are produced on demand.
//!
//! Bland's rule picks both the entering column (lowest index with negative
//! reduced cost) and the leaving row (lowest basic index among tied ratios),
//! so the method terminates without cycling. At a positive phase-1 optimum
//! the simplex multipliers give a Farkas vector `y` with `yᵀA ≤ 0` and
//! `yᵀb > 0`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Outcome of [`solve_feasibility`].
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// Non-zero entries of a basic feasible solution, by column.
    Feasible(Vec<(usize, Rational)>),
    /// Farkas vector over the rows.
    Infeasible(Vec<Rational>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Column(usize),
    Artificial(usize),
}

/// Decides `∃x ≥ 0: A x = b` where `support(j)` lists the rows in which
/// column `j` of `A` equals 1 (all other entries are 0).
pub fn solve_feasibility<F>(rhs: &[Rational], num_columns: usize, support: F) -> Feasibility
where
    F: Fn(usize, &mut Vec<usize>),
{
    let m = rhs.len();
    let signs: Vec<bool> = rhs.iter().map(|b| b.is_negative()).collect();
    let mut x_b: Vec<Rational> = rhs.iter().map(|b| b.abs()).collect();
    let mut basis: Vec<Var> = (0..m).map(Var::Artificial).collect();
    let mut binv: Vec<Vec<Rational>> = (0..m)
        .map(|r| {
            (0..m)
                .map(|c| if r == c { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let mut col = Vec::with_capacity(m);

    loop {
        // y = c_Bᵀ B⁻¹ with phase-1 costs (1 on artificials).
        let mut y = vec![Rational::zero(); m];
        for (r, var) in basis.iter().enumerate() {
            if matches!(var, Var::Artificial(_)) {
                for (k, yk) in y.iter_mut().enumerate() {
                    if !binv[r][k].is_zero() {
                        *yk += &binv[r][k];
                    }
                }
            }
        }
        // Sign-adjusted multipliers over a common denominator: the reduced
        // cost of column j is −Σ_{k∈supp(j)} ỹ_k, with ỹ = s∘y.
        let scaled = common_scale(&y, &signs);

        let entering = (0..num_columns).find(|&j| {
            support(j, &mut col);
            let dot: BigInt = col.iter().map(|&k| &scaled[k]).sum();
            dot.is_positive()
        });

        let Some(j) = entering else {
            let objective: Rational = basis
                .iter()
                .zip(&x_b)
                .filter(|(v, _)| matches!(v, Var::Artificial(_)))
                .map(|(_, x)| x.clone())
                .sum();
            if objective.is_zero() {
                let mut solution: Vec<(usize, Rational)> = basis
                    .iter()
                    .zip(&x_b)
                    .filter_map(|(v, x)| match v {
                        Var::Column(c) if !x.is_zero() => Some((*c, x.clone())),
                        _ => None,
                    })
                    .collect();
                solution.sort_by_key(|(c, _)| *c);
                return Feasibility::Feasible(solution);
            }
            let farkas = y
                .into_iter()
                .zip(&signs)
                .map(|(v, &neg)| if neg { -v } else { v })
                .collect();
            return Feasibility::Infeasible(farkas);
        };

        // u = B⁻¹ ã_j
        support(j, &mut col);
        let u: Vec<Rational> = (0..m)
            .map(|r| {
                col.iter()
                    .map(|&k| {
                        if signs[k] {
                            -binv[r][k].clone()
                        } else {
                            binv[r][k].clone()
                        }
                    })
                    .sum()
            })
            .collect();

        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..m {
            if !u[r].is_positive() {
                continue;
            }
            let ratio = &x_b[r] / &u[r];
            let better = match &leave {
                None => true,
                Some((best_r, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*best_r]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let (p, step) = leave.expect("phase-1 objective is bounded below");

        for r in 0..m {
            if r != p && !u[r].is_zero() {
                let delta = &u[r] * &step;
                x_b[r] -= delta;
            }
        }
        x_b[p] = step;

        let pivot = u[p].clone();
        let pivot_row: Vec<Rational> = binv[p].iter().map(|v| v / &pivot).collect();
        for r in 0..m {
            if r == p || u[r].is_zero() {
                continue;
            }
            let factor = &u[r];
            for (dst, src) in binv[r].iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst -= factor * src;
                }
            }
        }
        binv[p] = pivot_row;
        basis[p] = Var::Column(j);
    }
}

/// `s∘y` scaled to integers by the lcm of denominators (positive factor).
fn common_scale(y: &[Rational], signs: &[bool]) -> Vec<BigInt> {
    let lcm = y
        .iter()
        .fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
    y.iter()
        .zip(signs)
        .map(|(v, &neg)| {
            let scaled = v.numer() * (&lcm / v.denom());
            if neg {
                -scaled
            } else {
                scaled
            }
        })
        .collect()
}
