//! Kolmogorovian censorship: classical switches times quantum conditionals
//! always admit a Kolmogorov model.
//!
//! A [`MeasurementSuite`] fixes the state and the outcome projectors. A
//! [`SetupDistribution`] says how often each compatible context `J` is the
//! set of measurements actually performed. The effective probability of
//! `(∧_{I₁} A_i) ∧ (∧_{I₂} a_j)` is
//!
//! ```text
//! p(∧_{I₁∪I₂} a_j) · tr(W ∏_{i∈I₁} Â_i),   p(∧_I a_j) = Σ_{J ⊇ I} κ_J
//! ```
//!
//! and [`build_censored_space`] glues the per-context spaces into one space
//! that reproduces all of them.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::parallel::{self, Execution};
use crate::polytope::{ConjunctionScheme, CorrelationVector};
use crate::quantum::{born, commutes, DensityOperator, Projector, PROB_TOLERANCE};
use crate::rational::{to_f64, Rational, RationalizationPolicy};
use crate::space::KolmogorovSpace;

/// Upper bound on the number of measurements (contexts are enumerated).
pub const MAX_MEASUREMENTS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub name: String,
    /// Name of the "measurement was performed" event.
    pub switch_name: String,
    pub projector: Projector,
}

/// State plus named outcome projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSuite {
    density: DensityOperator,
    measurements: Vec<Measurement>,
}

impl MeasurementSuite {
    /// Switch events default to the lowercased outcome name (`A` → `a`),
    /// falling back to `performed(A)` when that would collide.
    pub fn new(density: DensityOperator, measurements: Vec<(String, Projector)>) -> Result<Self> {
        let named = measurements.into_iter().map(|(n, p)| (n, None, p)).collect();
        Self::with_switch_names(density, named)
    }

    pub fn with_switch_names(
        density: DensityOperator,
        measurements: Vec<(String, Option<String>, Projector)>,
    ) -> Result<Self> {
        if measurements.is_empty() {
            return Err(Error::InvalidSuite("no measurements".into()));
        }
        if measurements.len() > MAX_MEASUREMENTS {
            return Err(Error::InvalidSuite(format!(
                "{} measurements exceed the limit of {MAX_MEASUREMENTS}",
                measurements.len()
            )));
        }
        let names: Vec<&str> = measurements.iter().map(|(n, _, _)| n.as_str()).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() || !seen.insert(*n) {
                return Err(Error::InvalidSuite(format!("measurement names must be unique and non-empty: `{n}`")));
            }
        }
        let mut out = Vec::with_capacity(measurements.len());
        for (name, switch, projector) in &measurements {
            if projector.dim() != density.dim() {
                return Err(Error::DimMismatch {
                    expected: density.dim(),
                    found: projector.dim(),
                });
            }
            let switch_name = match switch {
                Some(s) => s.clone(),
                None => {
                    let lower = name.to_lowercase();
                    let collides = lower == *name
                        || names.contains(&lower.as_str())
                        || measurements.iter().any(|(_, s, _)| s.as_deref() == Some(lower.as_str()));
                    if collides {
                        format!("performed({name})")
                    } else {
                        lower
                    }
                }
            };
            out.push(Measurement {
                name: name.clone(),
                switch_name,
                projector: projector.clone(),
            });
        }
        let mut all = HashSet::new();
        for m in &out {
            if !all.insert(m.name.as_str()) || !all.insert(m.switch_name.as_str()) {
                return Err(Error::InvalidSuite(format!("event name `{}` is not unique", m.switch_name)));
            }
        }
        Ok(Self {
            density,
            measurements: out,
        })
    }

    pub fn density(&self) -> &DensityOperator {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.measurements
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    }

    pub fn context<S: AsRef<str>>(&self, names: &[S]) -> Result<IndexSet> {
        names
            .iter()
            .try_fold(IndexSet::EMPTY, |acc, n| Ok(acc.with(self.index_of(n.as_ref())?)))
    }

    /// `{A,B}` style label.
    pub fn context_label(&self, set: IndexSet) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.measurements[i].name.as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Outcome names then switch names: the 2n effective events.
    pub fn event_names(&self) -> Vec<String> {
        self.measurements
            .iter()
            .map(|m| m.name.clone())
            .chain(self.measurements.iter().map(|m| m.switch_name.clone()))
            .collect()
    }

    fn projectors(&self, set: IndexSet) -> Vec<&Projector> {
        set.iter().map(|i| &self.measurements[i].projector).collect()
    }

    /// All measurements in `set` pairwise commute.
    pub fn is_compatible(&self, set: IndexSet) -> bool {
        let idx: Vec<usize> = set.iter().collect();
        idx.iter().enumerate().all(|(a, &i)| {
            idx[a + 1..].iter().all(|&j| {
                commutes(
                    self.measurements[i].projector.as_operator(),
                    self.measurements[j].projector.as_operator(),
                )
                .expect("dimensions validated")
            })
        })
    }
}

/// The family 𝒦 of non-empty pairwise-commuting index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityStructure {
    n: usize,
    members: BTreeSet<IndexSet>,
}

impl CompatibilityStructure {
    pub fn contains(&self, set: IndexSet) -> bool {
        self.members.contains(&set)
    }

    pub fn members(&self) -> impl Iterator<Item = IndexSet> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Members not contained in a larger member.
    pub fn maximal(&self) -> Vec<IndexSet> {
        self.members
            .iter()
            .filter(|s| !self.members.iter().any(|t| t != *s && s.is_subset(*t)))
            .copied()
            .collect()
    }
}

pub fn compute_compatibility(suite: &MeasurementSuite) -> CompatibilityStructure {
    let n = suite.len();
    let ops: Vec<_> = suite.measurements.iter().map(|m| m.projector.as_operator()).collect();
    let mut adjacent = vec![IndexSet::EMPTY; n];
    for i in 0..n {
        adjacent[i] = adjacent[i].with(i);
        for j in i + 1..n {
            if commutes(ops[i], ops[j]).expect("dimensions validated") {
                adjacent[i] = adjacent[i].with(j);
                adjacent[j] = adjacent[j].with(i);
            }
        }
    }
    let members = (1..1u64 << n)
        .map(IndexSet)
        .filter(|s| s.iter().all(|i| s.is_subset(adjacent[i])))
        .collect();
    CompatibilityStructure { n, members }
}

/// Validated weights κ over contexts; only positive weights are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetupDistribution {
    n: usize,
    weights: BTreeMap<IndexSet, Rational>,
}

impl SetupDistribution {
    pub fn weights(&self) -> impl Iterator<Item = (IndexSet, &Rational)> {
        self.weights.iter().map(|(s, w)| (*s, w))
    }

    pub fn support(&self) -> impl Iterator<Item = IndexSet> + '_ {
        self.weights.keys().copied()
    }

    pub fn weight(&self, set: IndexSet) -> Rational {
        self.weights.get(&set).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Accepts κ iff its support lies in 𝒦, κ ≥ 0 and Σκ = 1.
pub fn validate_distribution(
    kappa: &[(IndexSet, Rational)],
    compat: &CompatibilityStructure,
    label: impl Fn(IndexSet) -> String,
) -> Result<SetupDistribution> {
    let mut weights = BTreeMap::new();
    for (set, w) in kappa {
        if set.is_empty() || set.span() > compat.n {
            return Err(Error::InvalidDistribution(format!("context {} is not a valid index set", label(*set))));
        }
        if w.is_negative() {
            return Err(Error::InvalidDistribution(format!("negative weight {w} on {}", label(*set))));
        }
        if weights.insert(*set, w.clone()).is_some() {
            return Err(Error::InvalidDistribution(format!("context {} listed twice", label(*set))));
        }
        if !w.is_zero() && !compat.contains(*set) {
            return Err(Error::IncompatibleSupport { context: label(*set) });
        }
    }
    let total: Rational = weights.values().cloned().sum();
    if total != Rational::one() {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
    }
    weights.retain(|_, w| !w.is_zero());
    Ok(SetupDistribution { n: compat.n, weights })
}

/// `p(∧_{j∈I} a_j) = Σ_{J ⊇ I} κ_J`.
pub fn switch_probability(kappa: &SetupDistribution, set: IndexSet) -> Rational {
    kappa
        .weights
        .iter()
        .filter(|(j, _)| set.is_subset(**j))
        .map(|(_, w)| w.clone())
        .sum()
}

/// Cell `ε` of a context: bit `k` is the outcome of the k-th member of `J`.
fn cell_label(bits: &[bool]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

/// Outcome vectors of a context in the order 11…1 down to 00…0.
fn context_cells(size: usize) -> Vec<Vec<bool>> {
    (0..1u64 << size)
        .rev()
        .map(|m| (0..size).map(|k| m >> (size - 1 - k) & 1 == 1).collect())
        .collect()
}

/// Rationalizes non-negative floats whose exact sum is 1, then repairs the
/// rounding residual (at most a few tolerances) on the largest cell.
fn rationalize_distribution(values: &[f64], policy: &RationalizationPolicy, what: &str) -> Result<Vec<Rational>> {
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::NumericalFailure(format!("{what}: masses sum to {sum}")));
    }
    if let Some(v) = values.iter().find(|v| **v < -PROB_TOLERANCE) {
        return Err(Error::NumericalFailure(format!("{what}: negative mass {v}")));
    }
    let mut masses = values
        .iter()
        .map(|v| policy.rationalize(v.max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    let residual = Rational::one() - masses.iter().cloned().sum::<Rational>();
    if !residual.is_zero() {
        let slack = Rational::from_float(policy.tolerance * values.len() as f64).expect("finite");
        if residual.abs() > slack {
            return Err(Error::NumericalFailure(format!("{what}: rationalized masses miss 1 by {residual}")));
        }
        let (k, _) = masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1))
            .expect("non-empty");
        masses[k] += residual;
    }
    Ok(masses)
}

/// Kolmogorov model of the naked probabilities of one compatible context:
/// `Ω^J = {0,1}^{|J|}`, `μ^J(ε) = tr(W ∏ Â_i^{ε_i})` with `Â⁰ = I − Â`.
pub fn context_space(set: IndexSet, suite: &MeasurementSuite, policy: &RationalizationPolicy) -> Result<KolmogorovSpace> {
    if set.is_empty() || set.span() > suite.len() {
        return Err(Error::IncompatibleContext {
            context: format!("{set}"),
        });
    }
    if !suite.is_compatible(set) {
        return Err(Error::IncompatibleContext {
            context: suite.context_label(set),
        });
    }
    let members: Vec<usize> = set.iter().collect();
    let cells = context_cells(members.len());
    let floats = cells
        .iter()
        .map(|bits| {
            let factors: Vec<Projector> = members
                .iter()
                .zip(bits)
                .map(|(&i, &b)| {
                    let p = &suite.measurements[i].projector;
                    if b {
                        p.clone()
                    } else {
                        p.complement()
                    }
                })
                .collect();
            let refs: Vec<&Projector> = factors.iter().collect();
            born(&suite.density, &refs)
        })
        .collect::<Result<Vec<f64>>>()?;
    let masses = rationalize_distribution(&floats, policy, &suite.context_label(set))?;
    let points = cells.iter().map(|b| cell_label(b)).collect();
    let events = members
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let inside = cells.iter().enumerate().filter(|(_, b)| b[k]).map(|(c, _)| c).collect();
            (suite.measurements[i].name.clone(), inside)
        })
        .collect();
    KolmogorovSpace::new(points, masses, events)
}

/// Rationalized `tr(W ∏_{i∈I} Â_i)` for a compatible `I`.
pub fn naked_probability(suite: &MeasurementSuite, set: IndexSet, policy: &RationalizationPolicy) -> Result<Rational> {
    if !suite.is_compatible(set) {
        return Err(Error::IncompatibleContext {
            context: suite.context_label(set),
        });
    }
    policy.rationalize(born(&suite.density, &suite.projectors(set))?)
}

/// `p(∧_{I₁∪I₂} a_j) · tr(W ∏_{I₁} Â_i)`; zero when no performed context covers `I₁ ∪ I₂`.
pub fn effective_probability(
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    outcomes: IndexSet,
    switches: IndexSet,
    policy: &RationalizationPolicy,
) -> Result<Rational> {
    let performed = switch_probability(kappa, outcomes.union(switches));
    if performed.is_zero() {
        return Ok(Rational::zero());
    }
    if outcomes.is_empty() {
        return Ok(performed);
    }
    Ok(performed * naked_probability(suite, outcomes, policy)?)
}

/// Correlation vector over the 2n events (outcomes `0..n`, switches `n..2n`).
pub fn effective_vector(
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    scheme: &ConjunctionScheme,
    policy: &RationalizationPolicy,
) -> Result<CorrelationVector> {
    let n = suite.len();
    if scheme.n() != 2 * n {
        return Err(Error::SchemeMismatch(format!(
            "effective vectors live on {} events, scheme has {}",
            2 * n,
            scheme.n()
        )));
    }
    let values = scheme
        .sets()
        .iter()
        .map(|s| {
            let (outcomes, switches) = split_events(*s, n);
            effective_probability(suite, kappa, outcomes, switches, policy)
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelationVector::new(scheme.clone(), values)
}

/// Splits a set over the 2n effective events into (outcomes, switches).
pub fn split_events(set: IndexSet, n: usize) -> (IndexSet, IndexSet) {
    let low = IndexSet::full(n);
    (set.intersection(low), IndexSet(set.0 >> n))
}

/// The disjoint union `⊔_J {J}×Ω^J` with `μ(J, ε) = κ_J μ^J(ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSpace {
    space: KolmogorovSpace,
    /// `(J, ε)` per point, ε as the subset of `J` with outcome 1.
    cells: Vec<(IndexSet, IndexSet)>,
}

impl CensoredSpace {
    pub fn space(&self) -> &KolmogorovSpace {
        &self.space
    }

    pub fn cells(&self) -> &[(IndexSet, IndexSet)] {
        &self.cells
    }

    /// Mass of the cell `(J, ε)`; zero when `J` is not in the support.
    pub fn cell_mass(&self, context: IndexSet, ones: IndexSet) -> Rational {
        self.cells
            .iter()
            .position(|c| *c == (context, ones))
            .map(|k| self.space.masses()[k].clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn with_corrupted_mass(&self, k: usize, mass: Rational) -> Self {
        Self {
            space: self.space.with_corrupted_mass(k, mass),
            cells: self.cells.clone(),
        }
    }
}

pub fn build_censored_space(
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    policy: &RationalizationPolicy,
) -> Result<CensoredSpace> {
    let n = suite.len();
    let mut points = Vec::new();
    let mut masses = Vec::new();
    let mut cells = Vec::new();
    for (set, weight) in kappa.weights() {
        let local = context_space(set, suite, policy)?;
        let members: Vec<usize> = set.iter().collect();
        for (k, (id, mass)) in local.points().iter().zip(local.masses()).enumerate() {
            let ones = members
                .iter()
                .filter(|&&i| local.contains(&suite.measurements[i].name, k).expect("own event"))
                .fold(IndexSet::EMPTY, |acc, &i| acc.with(i));
            points.push(format!("{}:{}", suite.context_label(set), id));
            masses.push(weight * mass);
            cells.push((set, ones));
        }
    }
    let mut events = BTreeMap::new();
    for i in 0..n {
        let m = &suite.measurements[i];
        let outcome = cells
            .iter()
            .enumerate()
            .filter(|(_, (j, ones))| j.contains(i) && ones.contains(i))
            .map(|(k, _)| k)
            .collect();
        let performed = cells
            .iter()
            .enumerate()
            .filter(|(_, (j, _))| j.contains(i))
            .map(|(k, _)| k)
            .collect();
        events.insert(m.name.clone(), outcome);
        events.insert(m.switch_name.clone(), performed);
    }
    Ok(CensoredSpace {
        space: KolmogorovSpace::new(points, masses, events)?,
        cells,
    })
}

/// Default verification depth `min(2n, 8)`.
pub fn default_max_order(n: usize) -> usize {
    (2 * n).min(8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub outcomes: IndexSet,
    pub switches: IndexSet,
    pub space_value: Rational,
    pub effective_value: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub max_order: usize,
    pub checked: usize,
    /// Pairs whose two sides agree exactly.
    pub exact: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks `μ((∩_{I₁} X_{A_i}) ∩ (∩_{I₂} X_{a_j}))` against the effective
/// probability for every pair with `|I₁| + |I₂| ≤ max_order`.
pub fn verify_censorship(
    space: &CensoredSpace,
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    max_order: usize,
    policy: &RationalizationPolicy,
) -> Result<VerificationReport> {
    verify_censorship_with(space, suite, kappa, max_order, policy, Execution::default())
}

pub fn verify_censorship_with(
    space: &CensoredSpace,
    suite: &MeasurementSuite,
    kappa: &SetupDistribution,
    max_order: usize,
    policy: &RationalizationPolicy,
    exec: Execution,
) -> Result<VerificationReport> {
    let n = suite.len();
    let all = IndexSet::full(n);
    let pairs: Vec<(IndexSet, IndexSet)> = all
        .subsets()
        .flat_map(|o| all.subsets().map(move |s| (o, s)))
        .filter(|(o, s)| o.len() + s.len() <= max_order)
        .collect();
    let results = parallel::map(exec, &pairs, |&(outcomes, switches)| -> Result<Option<(bool, Mismatch)>> {
        let mut names: Vec<&str> = outcomes.iter().map(|i| suite.measurements[i].name.as_str()).collect();
        names.extend(switches.iter().map(|j| suite.measurements[j].switch_name.as_str()));
        let (lhs, summed) = space.space.evaluate_counting(&names)?;
        let rhs = effective_probability(suite, kappa, outcomes, switches, policy)?;
        if lhs == rhs {
            return Ok(None);
        }
        let allowance = PROB_TOLERANCE * (summed as f64 + 1.0);
        let close = (to_f64(&lhs) - to_f64(&rhs)).abs() <= allowance;
        Ok(Some((
            close,
            Mismatch {
                outcomes,
                switches,
                space_value: lhs,
                effective_value: rhs,
            },
        )))
    });
    let mut exact = 0;
    let mut mismatches = Vec::new();
    for r in results {
        match r? {
            None => exact += 1,
            Some((true, _)) => {}
            Some((false, m)) => mismatches.push(m),
        }
    }
    Ok(VerificationReport {
        max_order,
        checked: pairs.len(),
        exact,
        mismatches,
    })
}
