//! Spin-singlet Bell experiment with two switches per side.
//!
//! Left magnets measure along **a** or **a′**, right magnets along **b** or
//! **b′**; each switch picks one direction. Measurement indices are
//! `A = 1, A′ = 2, B = 3, B′ = 4`, so the measured pairs are exactly `S₄`.
//! All directions lie in the xz-plane; the singlet is rotation invariant so
//! a single plane loses nothing.

use num_traits::Zero;

use crate::censorship::{
    build_censored_space, compute_compatibility, effective_probability, validate_distribution, CensoredSpace,
    MeasurementSuite, SetupDistribution,
};
use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::polytope::{ConjunctionScheme, CorrelationVector};
use crate::quantum::{singlet_density, spin_projector_up, tensor_projectors, Projector, SpinDirection};
use crate::rational::{rat, Rational, RationalizationPolicy};

pub const A: usize = 0;
pub const A_PRIME: usize = 1;
pub const B: usize = 2;
pub const B_PRIME: usize = 3;

pub const NAMES: [&str; 4] = ["A", "A'", "B", "B'"];

/// The four cross-side contexts in table order: ab, ab′, a′b, a′b′.
pub const CONTEXTS: [(usize, usize); 4] = [(A, B), (A, B_PRIME), (A_PRIME, B), (A_PRIME, B_PRIME)];

#[derive(Debug, Clone, PartialEq)]
pub struct OrsayConfig {
    /// Directions of a, a′, b, b′ in radians from +z towards +x.
    pub angles: [f64; 4],
    /// Switch weights of the contexts ab, ab′, a′b, a′b′.
    pub weights: [Rational; 4],
}

impl Default for OrsayConfig {
    /// θ(a,a′) = θ(a′,b′) = θ(a,b′) = 120° and θ(b,a′) = 0, uniform switches.
    fn default() -> Self {
        Self::from_degrees([0.0, 120.0, 120.0, 240.0], std::array::from_fn(|_| rat(1, 4)))
    }
}

impl OrsayConfig {
    pub fn from_degrees(degrees: [f64; 4], weights: [Rational; 4]) -> Self {
        Self {
            angles: degrees.map(f64::to_radians),
            weights,
        }
    }

    pub fn direction(&self, k: usize) -> SpinDirection {
        SpinDirection::in_xz_plane(self.angles[k])
    }

    /// Angle between the directions of measurements `i` and `j`.
    pub fn angle_between(&self, i: usize, j: usize) -> f64 {
        self.direction(i).angle_to(&self.direction(j))
    }
}

/// `Â = P_{+a}⊗I`, `Â′ = P_{+a′}⊗I`, `B̂ = I⊗P_{+b}`, `B̂′ = I⊗P_{+b′}` on the singlet.
pub fn build_suite(cfg: &OrsayConfig) -> MeasurementSuite {
    let id = Projector::identity(2);
    let measurements = (0..4)
        .map(|k| {
            let p = spin_projector_up(&cfg.direction(k));
            let op = if k < 2 { tensor_projectors(&p, &id) } else { tensor_projectors(&id, &p) };
            (NAMES[k].to_string(), op)
        })
        .collect();
    MeasurementSuite::new(singlet_density(), measurements).expect("static suite is valid")
}

pub fn context_set(left: usize, right: usize) -> IndexSet {
    IndexSet::from_indices([left, right])
}

pub fn distribution(cfg: &OrsayConfig, suite: &MeasurementSuite) -> Result<SetupDistribution> {
    let compat = compute_compatibility(suite);
    let kappa: Vec<_> = CONTEXTS
        .iter()
        .zip(&cfg.weights)
        .map(|(&(l, r), w)| (context_set(l, r), w.clone()))
        .collect();
    validate_distribution(&kappa, &compat, |s| suite.context_label(s))
}

/// `(tr ŴÂ, tr ŴÂ′, tr ŴB̂, tr ŴB̂′, tr ŴÂB̂, tr ŴÂB̂′, tr ŴÂ′B̂, tr ŴÂ′B̂′)`.
pub fn naked_vector(cfg: &OrsayConfig, policy: &RationalizationPolicy) -> Result<CorrelationVector> {
    let suite = build_suite(cfg);
    let scheme = ConjunctionScheme::clauser_horne();
    let values = scheme
        .sets()
        .iter()
        .map(|s| crate::censorship::naked_probability(&suite, *s, policy))
        .collect::<Result<Vec<_>>>()?;
    CorrelationVector::new(scheme, values)
}

/// The same layout filled with effective frequencies (no switch events).
pub fn effective_pair_vector(cfg: &OrsayConfig, policy: &RationalizationPolicy) -> Result<CorrelationVector> {
    let suite = build_suite(cfg);
    let kappa = distribution(cfg, &suite)?;
    let scheme = ConjunctionScheme::clauser_horne();
    let values = scheme
        .sets()
        .iter()
        .map(|s| effective_probability(&suite, &kappa, *s, IndexSet::EMPTY, policy))
        .collect::<Result<Vec<_>>>()?;
    CorrelationVector::new(scheme, values)
}

/// Index of a switch event among the eight effective events.
pub fn switch_event(k: usize) -> usize {
    4 + k
}

/// Singles on all eight events plus every conjunction listed among the
/// observed frequencies (outcome/own switch, outcome/other switch, outcome
/// pairs, switch pairs, outcome/opposite-side switch).
pub fn effective_scheme() -> ConjunctionScheme {
    let pair = |i: usize, j: usize| IndexSet::from_indices([i, j]);
    let s = switch_event;
    let mut extra = Vec::new();
    for k in 0..4 {
        extra.push(pair(k, s(k)));
    }
    extra.extend([pair(A, s(A_PRIME)), pair(A_PRIME, s(A)), pair(B, s(B_PRIME)), pair(B_PRIME, s(B))]);
    extra.extend(CONTEXTS.iter().map(|&(l, r)| pair(l, r)));
    extra.extend([pair(s(A), s(A_PRIME)), pair(s(B), s(B_PRIME))]);
    extra.extend(CONTEXTS.iter().map(|&(l, r)| pair(s(l), s(r))));
    for left in [A, A_PRIME] {
        for right in [B, B_PRIME] {
            extra.push(pair(left, s(right)));
        }
    }
    for right in [B, B_PRIME] {
        for left in [A, A_PRIME] {
            extra.push(pair(right, s(left)));
        }
    }
    ConjunctionScheme::with_singletons(8, extra).expect("static scheme")
}

pub fn effective_vector(
    cfg: &OrsayConfig,
    scheme: &ConjunctionScheme,
    policy: &RationalizationPolicy,
) -> Result<CorrelationVector> {
    let suite = build_suite(cfg);
    let kappa = distribution(cfg, &suite)?;
    crate::censorship::effective_vector(&suite, &kappa, scheme, policy)
}

/// 2×2 table of one context: rows `±left`, columns `±right`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextTable {
    pub left: usize,
    pub right: usize,
    /// `[[L∩R, L∩¬R], [¬L∩R, ¬L∩¬R]]`.
    pub cells: [[Rational; 2]; 2],
}

impl ContextTable {
    pub fn title(&self) -> String {
        format!("{} ∩ {}", NAMES[self.left].to_lowercase(), NAMES[self.right].to_lowercase())
    }

    pub fn total(&self) -> Rational {
        self.cells.iter().flatten().cloned().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrsayTables {
    /// Naked per-context models, in [`CONTEXTS`] order.
    pub contexts: Vec<ContextTable>,
    /// Censored model: row pairs for A and A′, column pairs for B and B′.
    pub censored: [[Rational; 4]; 4],
    pub space: CensoredSpace,
}

fn ones_for(left: usize, left_on: bool, right: usize, right_on: bool) -> IndexSet {
    let mut s = IndexSet::EMPTY;
    if left_on {
        s = s.with(left);
    }
    if right_on {
        s = s.with(right);
    }
    s
}

pub fn tables(cfg: &OrsayConfig, policy: &RationalizationPolicy) -> Result<OrsayTables> {
    let suite = build_suite(cfg);
    let kappa = distribution(cfg, &suite)?;
    let mut contexts = Vec::new();
    for &(left, right) in &CONTEXTS {
        let space = crate::censorship::context_space(context_set(left, right), &suite, policy)?;
        let lookup = |l: bool, r: bool| -> Result<Rational> {
            let id = format!("{}{}", l as u8, r as u8);
            space
                .mass_of(&id)
                .cloned()
                .ok_or_else(|| Error::NumericalFailure(format!("missing cell {id}")))
        };
        contexts.push(ContextTable {
            left,
            right,
            cells: [
                [lookup(true, true)?, lookup(true, false)?],
                [lookup(false, true)?, lookup(false, false)?],
            ],
        });
    }
    let space = build_censored_space(&suite, &kappa, policy)?;
    let mut censored: [[Rational; 4]; 4] = Default::default();
    for (block, left) in [A, A_PRIME].into_iter().enumerate() {
        for (row_off, left_on) in [true, false].into_iter().enumerate() {
            for (col_block, right) in [B, B_PRIME].into_iter().enumerate() {
                for (col_off, right_on) in [true, false].into_iter().enumerate() {
                    let j = context_set(left, right);
                    censored[2 * block + row_off][2 * col_block + col_off] =
                        space.cell_mass(j, ones_for(left, left_on, right, right_on));
                }
            }
        }
    }
    Ok(OrsayTables {
        contexts,
        censored,
        space,
    })
}

/// `½ sin²(θ/2)`: singlet probability of spin-up on both sides.
pub fn singlet_joint_up(theta: f64) -> f64 {
    0.5 * (theta / 2.0).sin().powi(2)
}

/// Whether every cross-side switch weight is positive.
pub fn all_contexts_performed(cfg: &OrsayConfig) -> bool {
    cfg.weights.iter().all(|w| !w.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::born;
    use std::f64::consts::PI;

    #[test]
    fn default_geometry_matches_stated_angles() {
        let cfg = OrsayConfig::default();
        let deg = |i, j| cfg.angle_between(i, j).to_degrees();
        assert!((deg(A, A_PRIME) - 120.0).abs() < 1e-9);
        assert!((deg(A_PRIME, B_PRIME) - 120.0).abs() < 1e-9);
        assert!((deg(A, B_PRIME) - 120.0).abs() < 1e-9);
        assert!(deg(B, A_PRIME).abs() < 1e-6);
    }

    #[test]
    fn suite_born_values() {
        let suite = build_suite(&OrsayConfig::default());
        let p = |k: usize| &suite.measurements()[k].projector;
        let w = suite.density();
        assert!((born(w, &[p(A), p(B)]).unwrap() - 0.375).abs() < 1e-9);
        assert!(born(w, &[p(A_PRIME), p(B)]).unwrap().abs() < 1e-9);
        let odd = build_suite(&OrsayConfig::from_degrees([13.0, 77.0, 200.0, 310.0], Default::default()));
        for k in 0..4 {
            assert!((born(odd.density(), &[&odd.measurements()[k].projector]).unwrap() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn naked_vector_pair_extremes() {
        let policy = RationalizationPolicy::default();
        let mut cfg = OrsayConfig::default();
        cfg.angles[B] = cfg.angles[A];
        let v = naked_vector(&cfg, &policy).unwrap();
        assert_eq!(v.get(context_set(A, B)).unwrap(), &rat(0, 1));
        cfg.angles[B] = cfg.angles[A] + PI;
        let v = naked_vector(&cfg, &policy).unwrap();
        assert_eq!(v.get(context_set(A, B)).unwrap(), &rat(1, 2));
    }

    #[test]
    fn effective_scheme_size() {
        let s = effective_scheme();
        assert_eq!(s.n(), 8);
        assert_eq!(s.len(), 34);
    }

    #[test]
    fn invalid_weights_are_rejected() {
        let cfg = OrsayConfig::from_degrees([0.0, 120.0, 120.0, 240.0], [rat(1, 2), rat(1, 2), rat(1, 2), rat(0, 1)]);
        assert!(distribution(&cfg, &build_suite(&cfg)).is_err());
    }
}
