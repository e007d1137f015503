//! Generalized correlation vectors and the classical correlation polytope.
//!
//! A [`CorrelationVector`] assigns a number to each conjunction `I ∈ S`.
//! It is a mixture of deterministic vertices `u^ε` (with `u^ε_I = ∏_{i∈I} ε_i`)
//! exactly when it has a Kolmogorovian representation; [`membership`] decides
//! this in exact arithmetic and always returns a checkable witness.

mod simplex;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{IndexSet, MAX_INDICES};
use crate::rational::Rational;
use crate::space::KolmogorovSpace;

pub use simplex::{solve_feasibility, Feasibility};

/// Default guard on the number of events (2ⁿ simplex columns).
pub const DEFAULT_N_MAX: usize = 16;

/// Index structure `(n, S)`: which conjunctions carry a value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConjunctionScheme {
    n: usize,
    sets: Vec<IndexSet>,
}

impl ConjunctionScheme {
    /// Deduplicates `sets` keeping first occurrences.
    pub fn new(n: usize, sets: impl IntoIterator<Item = IndexSet>) -> Result<Self> {
        if n == 0 || n > MAX_INDICES {
            return Err(Error::InvalidScheme(format!("n must be in 1..={MAX_INDICES}, got {n}")));
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for s in sets {
            if s.is_empty() {
                return Err(Error::InvalidScheme("empty conjunction".into()));
            }
            if s.span() > n {
                return Err(Error::InvalidScheme(format!("{s} is not a subset of 1..{n}")));
            }
            if seen.insert(s) {
                out.push(s);
            }
        }
        Ok(Self { n, sets: out })
    }

    /// Singletons `{1}..{n}` first, then `extra`.
    pub fn with_singletons(n: usize, extra: impl IntoIterator<Item = IndexSet>) -> Result<Self> {
        Self::new(n, (0..n).map(IndexSet::singleton).chain(extra))
    }

    /// The `(4, S₄)` scheme with singletons: 1,2,3,4,{1,3},{1,4},{2,3},{2,4}.
    pub fn clauser_horne() -> Self {
        let pairs = [(0, 2), (0, 3), (1, 2), (1, 3)].map(|(i, j)| IndexSet::from_indices([i, j]));
        Self::with_singletons(4, pairs).expect("static scheme")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn position(&self, set: IndexSet) -> Option<usize> {
        self.sets.iter().position(|s| *s == set)
    }
}

/// Values `p_I` for every `I ∈ S`, in scheme order. Values are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrelationVector {
    scheme: ConjunctionScheme,
    values: Vec<Rational>,
}

impl CorrelationVector {
    pub fn new(scheme: ConjunctionScheme, values: Vec<Rational>) -> Result<Self> {
        if values.len() != scheme.len() {
            return Err(Error::SchemeMismatch(format!(
                "{} values for {} conjunctions",
                values.len(),
                scheme.len()
            )));
        }
        Ok(Self { scheme, values })
    }

    /// Builds the vector from `(I, p_I)` pairs; every `I` must be listed once.
    pub fn from_entries(n: usize, entries: Vec<(IndexSet, Rational)>) -> Result<Self> {
        let mut by_set = BTreeMap::new();
        let mut order = Vec::new();
        for (set, value) in entries {
            if by_set.insert(set, value).is_some() {
                return Err(Error::InvalidScheme(format!("conjunction {set} listed twice")));
            }
            order.push(set);
        }
        let scheme = ConjunctionScheme::new(n, order)?;
        let values = scheme.sets().iter().map(|s| by_set.remove(s).unwrap()).collect();
        Ok(Self { scheme, values })
    }

    pub fn scheme(&self) -> &ConjunctionScheme {
        &self.scheme
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, set: IndexSet) -> Option<&Rational> {
        self.scheme.position(set).map(|k| &self.values[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (IndexSet, &Rational)> {
        self.scheme.sets.iter().copied().zip(&self.values)
    }

    /// Relabels events: index `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.scheme.n {
            return Err(Error::SchemeMismatch("permutation length differs from n".into()));
        }
        let entries = self
            .iter()
            .map(|(s, v)| (IndexSet::from_indices(s.iter().map(|i| perm[i])), v.clone()))
            .collect();
        Self::from_entries(self.scheme.n, entries)
    }
}

/// Deterministic assignment `ε ∈ {0,1}ⁿ`, stored as the set of indices with `ε_i = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexLabel {
    n: usize,
    ones: IndexSet,
}

impl VertexLabel {
    pub fn new(n: usize, ones: IndexSet) -> Result<Self> {
        if ones.span() > n {
            return Err(Error::SchemeMismatch(format!("{ones} does not fit in {n} bits")));
        }
        Ok(Self { n, ones })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut ones = IndexSet::EMPTY;
        for (i, b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => ones = ones.with(i),
                _ => return Err(Error::Parse(format!("vertex bit {b} is not 0/1"))),
            }
        }
        Self::new(bits.len(), ones)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ones(&self) -> IndexSet {
        self.ones
    }

    pub fn bit(&self, i: usize) -> bool {
        self.ones.contains(i)
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.n).map(|i| self.bit(i) as u8).collect()
    }

    /// `u^ε_I = ∏_{i∈I} ε_i`.
    pub fn covers(&self, set: IndexSet) -> bool {
        set.is_subset(self.ones)
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.bit(i) as u8)?;
        }
        Ok(())
    }
}

/// The vertex `u^ε` of `C(n, S)`.
pub fn vertex(eps: VertexLabel, scheme: &ConjunctionScheme) -> Result<CorrelationVector> {
    if eps.n != scheme.n {
        return Err(Error::SchemeMismatch(format!(
            "vertex has {} bits, scheme has n = {}",
            eps.n, scheme.n
        )));
    }
    let values = scheme
        .sets
        .iter()
        .map(|s| if eps.covers(*s) { Rational::one() } else { Rational::zero() })
        .collect();
    CorrelationVector::new(scheme.clone(), values)
}

/// Affine functional `f(q) = c·q + c₀` with `f(u^ε) ≤ 0` on every vertex
/// and `f(p) > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatingCertificate {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl SeparatingCertificate {
    pub fn apply(&self, values: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .zip(values)
            .map(|(c, v)| c * v)
            .sum::<Rational>()
            + &self.constant
    }

    /// Maximum of the functional over all 2ⁿ vertices.
    pub fn max_over_vertices(&self, scheme: &ConjunctionScheme) -> Rational {
        (0..1u64 << scheme.n)
            .map(|mask| {
                let ones = IndexSet(mask);
                scheme
                    .sets
                    .iter()
                    .zip(&self.coefficients)
                    .filter(|(s, _)| s.is_subset(ones))
                    .map(|(_, c)| c.clone())
                    .sum::<Rational>()
                    + &self.constant
            })
            .max()
            .expect("at least one vertex")
    }

    /// Exhaustive check against `p`.
    pub fn separates(&self, p: &CorrelationVector) -> bool {
        self.coefficients.len() == p.scheme.len()
            && self.apply(&p.values).is_positive()
            && !self.max_over_vertices(&p.scheme).is_positive()
    }

    /// Scales to coprime integers (positive factor, so validity is preserved).
    fn normalized(self) -> Self {
        let all = self.coefficients.iter().chain(std::iter::once(&self.constant));
        let lcm = all.clone().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let gcd = all.fold(BigInt::zero(), |acc, v| acc.gcd(&(v.numer() * (&lcm / v.denom()))));
        if gcd.is_zero() {
            return self;
        }
        let factor = Rational::new(lcm, gcd);
        Self {
            coefficients: self.coefficients.iter().map(|c| c * &factor).collect(),
            constant: &self.constant * &factor,
        }
    }
}

/// Exact membership decision for `C(n, S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipVerdict {
    /// Convex weights with `Σ λ_ε u^ε = p`.
    Inside { weights: Vec<(VertexLabel, Rational)> },
    Outside { certificate: SeparatingCertificate },
}

impl MembershipVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipVerdict::Inside { .. })
    }

    /// Re-checks the witness against `p` exactly.
    pub fn validate(&self, p: &CorrelationVector) -> bool {
        match self {
            MembershipVerdict::Inside { weights } => weights_reproduce(weights, p),
            MembershipVerdict::Outside { certificate } => certificate.separates(p),
        }
    }
}

/// `λ ≥ 0`, `Σλ = 1` and `Σ λ_ε u^ε = p`.
pub fn weights_reproduce(weights: &[(VertexLabel, Rational)], p: &CorrelationVector) -> bool {
    if weights.iter().any(|(e, w)| w.is_negative() || e.n != p.scheme.n) {
        return false;
    }
    if weights.iter().map(|(_, w)| w.clone()).sum::<Rational>() != Rational::one() {
        return false;
    }
    p.iter().all(|(set, value)| {
        let mixed: Rational = weights
            .iter()
            .filter(|(e, _)| e.covers(set))
            .map(|(_, w)| w.clone())
            .sum();
        &mixed == value
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipOptions {
    pub n_max: usize,
    /// Run the cheap range and monotonicity checks before the LP.
    pub prechecks: bool,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            prechecks: true,
        }
    }
}

pub fn membership(p: &CorrelationVector) -> Result<MembershipVerdict> {
    membership_with(p, MembershipOptions::default())
}

pub fn membership_with(p: &CorrelationVector, opts: MembershipOptions) -> Result<MembershipVerdict> {
    let n = p.scheme.n;
    if n > opts.n_max || n >= 63 {
        return Err(Error::TooLarge { n, limit: opts.n_max.min(62) });
    }
    if opts.prechecks {
        if let Some(certificate) = precheck(p) {
            return Ok(MembershipVerdict::Outside { certificate });
        }
    }
    Ok(membership_lp(p))
}

/// Necessary conditions with ready-made certificates: `0 ≤ p_I ≤ 1` and
/// `p_J ≤ p_I` whenever `I ⊆ J` are both in `S`.
fn precheck(p: &CorrelationVector) -> Option<SeparatingCertificate> {
    let k = p.scheme.len();
    let unit = |idx: usize, sign: i64| {
        let mut c = vec![Rational::zero(); k];
        c[idx] = Rational::from_integer(sign.into());
        c
    };
    for (idx, v) in p.values.iter().enumerate() {
        if v.is_negative() {
            return Some(SeparatingCertificate {
                coefficients: unit(idx, -1),
                constant: Rational::zero(),
            });
        }
        if v > &Rational::one() {
            return Some(SeparatingCertificate {
                coefficients: unit(idx, 1),
                constant: -Rational::one(),
            });
        }
    }
    for (a, sa) in p.scheme.sets.iter().enumerate() {
        for (b, sb) in p.scheme.sets.iter().enumerate() {
            if a != b && sa.is_subset(*sb) && p.values[b] > p.values[a] {
                let mut c = unit(b, 1);
                c[a] = -Rational::one();
                return Some(SeparatingCertificate {
                    coefficients: c,
                    constant: Rational::zero(),
                });
            }
        }
    }
    None
}

/// The exact LP alone: find `λ ≥ 0` with `Σλ = 1` and `Σ λ_ε u^ε = p`.
pub fn membership_lp(p: &CorrelationVector) -> MembershipVerdict {
    let n = p.scheme.n;
    let mut rhs = Vec::with_capacity(p.scheme.len() + 1);
    rhs.push(Rational::one());
    rhs.extend(p.values.iter().cloned());
    let sets = &p.scheme.sets;
    let support = |col: usize, out: &mut Vec<usize>| {
        out.clear();
        out.push(0);
        let ones = IndexSet(col as u64);
        out.extend(
            sets.iter()
                .enumerate()
                .filter(|(_, s)| s.is_subset(ones))
                .map(|(r, _)| r + 1),
        );
    };
    match solve_feasibility(&rhs, 1usize << n, support) {
        Feasibility::Feasible(x) => MembershipVerdict::Inside {
            weights: x
                .into_iter()
                .map(|(col, w)| (VertexLabel { n, ones: IndexSet(col as u64) }, w))
                .collect(),
        },
        Feasibility::Infeasible(y) => {
            let mut it = y.into_iter();
            let constant = it.next().expect("sum row");
            MembershipVerdict::Outside {
                certificate: SeparatingCertificate {
                    coefficients: it.collect(),
                    constant,
                }
                .normalized(),
            }
        }
    }
}

/// Kolmogorovian representation from convex weights: Ω is the support,
/// `X_{A_i} = {ε : ε_i = 1}`, `μ({ε}) = λ_ε`. Events are named `A1..An`.
pub fn representation_from_weights(
    weights: &[(VertexLabel, Rational)],
    scheme: &ConjunctionScheme,
) -> Result<KolmogorovSpace> {
    let names: Vec<String> = (1..=scheme.n).map(|i| format!("A{i}")).collect();
    representation_with_names(weights, scheme, &names)
}

pub fn representation_with_names(
    weights: &[(VertexLabel, Rational)],
    scheme: &ConjunctionScheme,
    names: &[String],
) -> Result<KolmogorovSpace> {
    if names.len() != scheme.n {
        return Err(Error::SchemeMismatch(format!(
            "{} event names for n = {}",
            names.len(),
            scheme.n
        )));
    }
    let mut merged: BTreeMap<VertexLabel, Rational> = BTreeMap::new();
    for (eps, w) in weights {
        if eps.n != scheme.n {
            return Err(Error::SchemeMismatch(format!("vertex {eps} has wrong length")));
        }
        if w.is_negative() {
            return Err(Error::InvalidDistribution(format!("negative weight {w} on {eps}")));
        }
        *merged.entry(*eps).or_insert_with(Rational::zero) += w;
    }
    let total: Rational = merged.values().cloned().sum();
    if total != Rational::one() {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
    }
    let support: Vec<(VertexLabel, Rational)> = merged.into_iter().filter(|(_, w)| !w.is_zero()).collect();
    let points = support.iter().map(|(e, _)| e.to_string()).collect();
    let masses = support.iter().map(|(_, w)| w.clone()).collect();
    let events = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let members = support
                .iter()
                .enumerate()
                .filter(|(_, (e, _))| e.bit(i))
                .map(|(k, _)| k)
                .collect();
            (name.clone(), members)
        })
        .collect();
    KolmogorovSpace::new(points, masses, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn set(ix: &[usize]) -> IndexSet {
        IndexSet::from_indices(ix.iter().map(|i| i - 1))
    }

    #[test]
    fn vertex_examples() {
        let scheme = ConjunctionScheme::clauser_horne();
        let all_ones = vertex(VertexLabel::from_bits(&[1, 1, 1, 1]).unwrap(), &scheme).unwrap();
        assert!(all_ones.values().iter().all(|v| v.is_one()));
        let zeros = vertex(VertexLabel::from_bits(&[0, 0, 0, 0]).unwrap(), &scheme).unwrap();
        assert!(zeros.values().iter().all(|v| v.is_zero()));
        let v = vertex(VertexLabel::from_bits(&[1, 0, 1, 0]).unwrap(), &scheme).unwrap();
        let got: Vec<i64> = v.values().iter().map(|r| if r.is_one() { 1 } else { 0 }).collect();
        assert_eq!(got, vec![1, 0, 1, 0, 1, 0, 0, 0]);
        assert!(matches!(
            vertex(VertexLabel::from_bits(&[1, 0]).unwrap(), &scheme),
            Err(Error::SchemeMismatch(_))
        ));
    }

    #[test]
    fn scheme_validation() {
        assert!(ConjunctionScheme::new(3, [IndexSet::EMPTY]).is_err());
        assert!(ConjunctionScheme::new(2, [set(&[3])]).is_err());
        let s = ConjunctionScheme::new(3, [set(&[1]), set(&[1]), set(&[1, 2])]).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn vertices_are_inside_with_unit_weight() {
        let scheme = ConjunctionScheme::clauser_horne();
        for mask in 0..16u64 {
            let eps = VertexLabel::new(4, IndexSet(mask)).unwrap();
            let p = vertex(eps, &scheme).unwrap();
            let verdict = membership(&p).unwrap();
            assert_eq!(verdict, MembershipVerdict::Inside { weights: vec![(eps, Rational::one())] });
        }
    }

    #[test]
    fn naked_orsay_vector_is_outside() {
        let h = rat(1, 2);
        let t = rat(3, 8);
        let p = CorrelationVector::new(
            ConjunctionScheme::clauser_horne(),
            vec![h.clone(), h.clone(), h.clone(), h, t.clone(), t.clone(), rat(0, 1), t],
        )
        .unwrap();
        let verdict = membership(&p).unwrap();
        assert!(!verdict.is_inside());
        assert!(verdict.validate(&p));
        assert!(!membership_lp(&p).is_inside());
    }

    #[test]
    fn precheck_certificates_are_valid() {
        let scheme = ConjunctionScheme::new(2, [set(&[1]), set(&[1, 2])]).unwrap();
        for values in [
            vec![rat(-1, 2), rat(0, 1)],
            vec![rat(3, 2), rat(0, 1)],
            vec![rat(1, 4), rat(1, 2)],
        ] {
            let p = CorrelationVector::new(scheme.clone(), values).unwrap();
            let verdict = membership(&p).unwrap();
            assert!(verdict.validate(&p), "{verdict:?}");
            assert!(!membership_lp(&p).is_inside());
        }
    }

    #[test]
    fn too_large_is_rejected() {
        let scheme = ConjunctionScheme::with_singletons(17, []).unwrap();
        let p = CorrelationVector::new(scheme, vec![rat(1, 2); 17]).unwrap();
        assert!(matches!(membership(&p), Err(Error::TooLarge { n: 17, limit: 16 })));
    }

    #[test]
    fn uniform_two_event_representation() {
        let scheme = ConjunctionScheme::with_singletons(2, [set(&[1, 2])]).unwrap();
        let weights: Vec<_> = (0..4u64)
            .map(|m| (VertexLabel::new(2, IndexSet(m)).unwrap(), rat(1, 4)))
            .collect();
        let space = representation_from_weights(&weights, &scheme).unwrap();
        assert_eq!(space.evaluate(&["A1"]).unwrap(), rat(1, 2));
        assert_eq!(space.evaluate(&["A2"]).unwrap(), rat(1, 2));
        assert_eq!(space.evaluate(&["A1", "A2"]).unwrap(), rat(1, 4));
    }

    #[test]
    fn one_point_representation() {
        let scheme = ConjunctionScheme::with_singletons(3, [set(&[1, 2, 3])]).unwrap();
        let eps = VertexLabel::from_bits(&[1, 1, 1]).unwrap();
        let space = representation_from_weights(&[(eps, Rational::one())], &scheme).unwrap();
        assert_eq!(space.len(), 1);
        assert_eq!(space.evaluate(&["A1", "A2", "A3"]).unwrap(), Rational::one());
    }

    #[test]
    fn representation_rejects_non_distributions() {
        let scheme = ConjunctionScheme::with_singletons(1, []).unwrap();
        let e0 = VertexLabel::from_bits(&[0]).unwrap();
        let e1 = VertexLabel::from_bits(&[1]).unwrap();
        assert!(matches!(
            representation_from_weights(&[(e0, rat(1, 2))], &scheme),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            representation_from_weights(&[(e0, rat(3, 2)), (e1, rat(-1, 2))], &scheme),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn certificate_normalization_gives_integers() {
        let c = SeparatingCertificate {
            coefficients: vec![rat(1, 2), rat(-3, 4)],
            constant: rat(1, 4),
        }
        .normalized();
        assert_eq!(c.coefficients, vec![rat(2, 1), rat(-3, 1)]);
        assert_eq!(c.constant, rat(1, 1));
    }
}
