//! The Clauser–Horne system characterizing `C(4, S₄)`.
//!
//! For `S₄ = {{1,3},{1,4},{2,3},{2,4}}` membership in the correlation
//! polytope is equivalent to the trivial bounds on each measured pair plus
//! four Bell-type two-sided inequalities.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::polytope::{ConjunctionScheme, CorrelationVector};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChFamily {
    /// `0 ≤ p_ij ≤ p_i ≤ 1` and the same with `p_j`.
    Bounds,
    /// `p_i + p_j − p_ij ≤ 1`.
    Union,
    /// `−1 ≤ … ≤ 0`.
    Bell,
}

/// One inequality `lower ≤ value ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChRow {
    pub label: String,
    pub family: ChFamily,
    pub value: Rational,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    pub satisfied: bool,
    /// Distance to the nearer bound when satisfied, minus the violation otherwise.
    pub slack: Rational,
}

impl ChRow {
    fn new(label: String, family: ChFamily, value: Rational, lower: Option<i64>, upper: Option<i64>) -> Self {
        let lower = lower.map(|l| Rational::from_integer(l.into()));
        let upper = upper.map(|u| Rational::from_integer(u.into()));
        let below = lower.as_ref().map(|l| &value - l);
        let above = upper.as_ref().map(|u| u - &value);
        let slack = match (below, above) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!("every row has a bound"),
        };
        Self {
            label,
            family,
            satisfied: slack >= Rational::zero(),
            value,
            lower,
            upper,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChReport {
    pub rows: Vec<ChRow>,
    pub holds: bool,
}

impl ChReport {
    pub fn violated(&self) -> impl Iterator<Item = &ChRow> {
        self.rows.iter().filter(|r| !r.satisfied)
    }

    pub fn bell_rows(&self) -> impl Iterator<Item = &ChRow> {
        self.rows.iter().filter(|r| r.family == ChFamily::Bell)
    }
}

/// Plus pairs, minus pair, minus singles; 1-based.
type BellLine = ([(usize, usize); 3], (usize, usize), [usize; 2]);

const BELL: [BellLine; 4] = [
    ([(1, 3), (1, 4), (2, 4)], (2, 3), [1, 4]),
    ([(2, 3), (2, 4), (1, 4)], (1, 3), [2, 4]),
    ([(1, 4), (1, 3), (2, 3)], (2, 4), [1, 3]),
    ([(2, 4), (2, 3), (1, 3)], (1, 4), [2, 3]),
];

/// Evaluates every inequality on a vector over `(4, S₄ ∪ singletons)`.
pub fn ch_evaluate(p: &CorrelationVector) -> Result<ChReport> {
    let expected = ConjunctionScheme::clauser_horne();
    let mut have = p.scheme().sets().to_vec();
    let mut want = expected.sets().to_vec();
    have.sort();
    want.sort();
    if p.scheme().n() != 4 || have != want {
        return Err(Error::SchemeMismatch(
            "Clauser-Horne evaluation needs n = 4 with singletons and pairs {1,3},{1,4},{2,3},{2,4}".into(),
        ));
    }
    let single = |i: usize| p.get(IndexSet::singleton(i - 1)).expect("checked").clone();
    let pair = |i: usize, j: usize| p.get(IndexSet::from_indices([i - 1, j - 1])).expect("checked").clone();

    let mut rows = Vec::new();
    for i in 1..=2 {
        for j in 3..=4 {
            let (pi, pj, pij) = (single(i), single(j), pair(i, j));
            rows.push(ChRow::new(format!("p{i}{j} >= 0"), ChFamily::Bounds, pij.clone(), Some(0), None));
            rows.push(ChRow::new(format!("p{i} - p{i}{j} >= 0"), ChFamily::Bounds, &pi - &pij, Some(0), None));
            rows.push(ChRow::new(format!("p{i} <= 1"), ChFamily::Bounds, pi.clone(), None, Some(1)));
            rows.push(ChRow::new(format!("p{j} - p{i}{j} >= 0"), ChFamily::Bounds, &pj - &pij, Some(0), None));
            rows.push(ChRow::new(format!("p{j} <= 1"), ChFamily::Bounds, pj.clone(), None, Some(1)));
            rows.push(ChRow::new(
                format!("p{i} + p{j} - p{i}{j} <= 1"),
                ChFamily::Union,
                &pi + &pj - &pij,
                None,
                Some(1),
            ));
        }
    }
    for (plus, minus, singles) in BELL {
        let value = plus.iter().map(|&(i, j)| pair(i, j)).sum::<Rational>()
            - pair(minus.0, minus.1)
            - single(singles[0])
            - single(singles[1]);
        let label = format!(
            "-1 <= p{}{} + p{}{} + p{}{} - p{}{} - p{} - p{} <= 0",
            plus[0].0, plus[0].1, plus[1].0, plus[1].1, plus[2].0, plus[2].1, minus.0, minus.1, singles[0], singles[1]
        );
        rows.push(ChRow::new(label, ChFamily::Bell, value, Some(-1), Some(0)));
    }
    let holds = rows.iter().all(|r| r.satisfied);
    Ok(ChReport { rows, holds })
}
