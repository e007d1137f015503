//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use kolmocensor::censorship::{compute_compatibility, validate_distribution, MeasurementSuite, SetupDistribution};
use kolmocensor::index::IndexSet;
use kolmocensor::polytope::{ConjunctionScheme, CorrelationVector, VertexLabel};
use kolmocensor::quantum::{tensor, Complex, DensityOperator, Operator, Projector};
use kolmocensor::rational::{rat, Rational};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random convex weights on `support` distinct vertices of {0,1}ⁿ.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize, support: usize) -> Vec<(VertexLabel, Rational)> {
    let mut masks: Vec<u64> = (0..1u64 << n).collect();
    masks.shuffle(rng);
    let raw: Vec<i64> = (0..support.min(masks.len())).map(|_| rng.gen_range(1..=12)).collect();
    let total: i64 = raw.iter().sum();
    masks
        .into_iter()
        .zip(raw)
        .map(|(m, w)| (VertexLabel::new(n, IndexSet(m)).unwrap(), rat(w, total)))
        .collect()
}

/// `Σ λ_ε u^ε` computed directly from the definition.
pub fn mixture(weights: &[(VertexLabel, Rational)], scheme: &ConjunctionScheme) -> CorrelationVector {
    let values = scheme
        .sets()
        .iter()
        .map(|s| {
            weights
                .iter()
                .filter(|(e, _)| s.is_subset(e.ones()))
                .map(|(_, w)| w.clone())
                .sum()
        })
        .collect();
    CorrelationVector::new(scheme.clone(), values).unwrap()
}

/// Singletons plus `extra` random conjunctions of size 2..=max_size.
pub fn random_scheme<R: Rng>(rng: &mut R, n: usize, extra: usize, max_size: usize) -> ConjunctionScheme {
    let sets: Vec<IndexSet> = (0..extra)
        .map(|_| {
            let size = rng.gen_range(2..=max_size.min(n).max(2));
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(rng);
            IndexSet::from_indices(idx.into_iter().take(size))
        })
        .collect();
    ConjunctionScheme::with_singletons(n, sets).unwrap()
}

/// Random non-empty subset of the 2ⁿ − 1 conjunctions.
pub fn random_subset_scheme<R: Rng>(rng: &mut R, n: usize) -> ConjunctionScheme {
    loop {
        let sets: Vec<IndexSet> = (1..1u64 << n).map(IndexSet).filter(|_| rng.gen_bool(0.5)).collect();
        if !sets.is_empty() {
            return ConjunctionScheme::new(n, sets).unwrap();
        }
    }
}

pub fn random_rational<R: Rng>(rng: &mut R, den: i64) -> Rational {
    rat(rng.gen_range(0..=den), den)
}

fn single_qubit(state: usize) -> Operator {
    let m = |a: f64, b: f64, c: f64, d: f64| {
        Operator::from_rows(vec![
            vec![Complex::new(a, 0.0), Complex::new(b, 0.0)],
            vec![Complex::new(c, 0.0), Complex::new(d, 0.0)],
        ])
        .unwrap()
    };
    match state {
        0 => m(1.0, 0.0, 0.0, 0.0),
        1 => m(0.0, 0.0, 0.0, 1.0),
        2 => m(0.5, 0.5, 0.5, 0.5),
        _ => m(0.5, -0.5, -0.5, 0.5),
    }
}

fn kron_all(factors: &[Operator]) -> Operator {
    factors[1..].iter().fold(factors[0].clone(), |acc, f| tensor(&acc, f))
}

/// Suite on `qubits` qubits: each measurement is a Z- or X-basis projector
/// on one or two qubits (identity elsewhere); the state mixes product states
/// from {|0⟩,|1⟩,|+⟩,|−⟩}. All Born values are dyadic-by-small rationals.
pub fn random_suite<R: Rng>(rng: &mut R, qubits: usize, n: usize) -> MeasurementSuite {
    let components = rng.gen_range(1..=3);
    let raw: Vec<f64> = (0..components).map(|_| rng.gen_range(1..=6) as f64).collect();
    let total: f64 = raw.iter().sum();
    let dim = 1 << qubits;
    let mut w = Operator::zeros(dim);
    for r in &raw {
        let factors: Vec<Operator> = (0..qubits).map(|_| single_qubit(rng.gen_range(0..4))).collect();
        w = &w + &kron_all(&factors).scale(Complex::new(r / total, 0.0));
    }
    let density = DensityOperator::new(w).unwrap();
    let measurements = (0..n)
        .map(|k| {
            let mut factors: Vec<Operator> = (0..qubits).map(|_| Operator::identity(2)).collect();
            let first = rng.gen_range(0..qubits);
            factors[first] = single_qubit(rng.gen_range(0..4));
            if qubits > 1 && rng.gen_bool(0.3) {
                let second = (first + rng.gen_range(1..qubits)) % qubits;
                factors[second] = single_qubit(rng.gen_range(0..4));
            }
            (format!("M{}", k + 1), Projector::new(kron_all(&factors)).unwrap())
        })
        .collect();
    MeasurementSuite::new(density, measurements).unwrap()
}

/// Random κ on up to four members of 𝒦.
pub fn random_kappa<R: Rng>(rng: &mut R, suite: &MeasurementSuite) -> SetupDistribution {
    let compat = compute_compatibility(suite);
    let mut members: Vec<IndexSet> = compat.members().collect();
    members.shuffle(rng);
    let k = rng.gen_range(1..=members.len().min(4));
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    let kappa: Vec<(IndexSet, Rational)> = members.into_iter().zip(raw).map(|(s, w)| (s, rat(w, total))).collect();
    validate_distribution(&kappa, &compat, |s| suite.context_label(s)).unwrap()
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}
