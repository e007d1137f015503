mod common;

use std::f64::consts::PI;

use kolmocensor::censorship::{
    build_censored_space, compute_compatibility, effective_probability, verify_censorship, MeasurementSuite,
};
use kolmocensor::ch::ch_evaluate;
use kolmocensor::index::IndexSet;
use kolmocensor::orsay::{self, OrsayConfig};
use kolmocensor::parallel::Execution;
use kolmocensor::polytope::{
    membership, membership_with, representation_from_weights, ConjunctionScheme, CorrelationVector,
    MembershipOptions, MembershipVerdict,
};
use kolmocensor::quantum::{
    born, commutes, singlet_density, singlet_density_along, spin_projector_up, tensor_projectors, Projector,
    SpinDirection,
};
use kolmocensor::rational::{rat, to_f64, RationalizationPolicy};
use kolmocensor::simulation;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn policy() -> RationalizationPolicy {
    RationalizationPolicy::default()
}

fn no_prechecks() -> MembershipOptions {
    MembershipOptions {
        prechecks: false,
        ..Default::default()
    }
}

fn direction() -> impl Strategy<Value = SpinDirection> {
    (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, p)| SpinDirection::from_angles(t, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_and_complement_sum_to_identity(d in direction()) {
        let p = spin_projector_up(&d);
        let sum = p.as_operator() + p.complement().as_operator();
        let id = Projector::identity(2);
        prop_assert!(sum.distance(id.as_operator()).unwrap() < 1e-12);
        prop_assert!(Projector::new(p.as_operator().clone()).is_ok());
    }

    #[test]
    fn singlet_is_rotation_invariant(d in direction()) {
        let w = singlet_density_along(&d);
        let reference = singlet_density();
        prop_assert!(w.as_operator().distance(reference.as_operator()).unwrap() < 1e-9);
    }

    #[test]
    fn singlet_joint_probability_depends_only_on_angle(a in direction(), b in direction()) {
        let w = singlet_density();
        let left = tensor_projectors(&spin_projector_up(&a), &Projector::identity(2));
        let right = tensor_projectors(&Projector::identity(2), &spin_projector_up(&b));
        let got = born(&w, &[&left, &right]).unwrap();
        let expected = orsay::singlet_joint_up(a.angle_to(&b));
        prop_assert!((got - expected).abs() < 1e-9);
    }

    #[test]
    fn born_is_symmetric_for_commuting_projectors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let suite = common::random_suite(&mut rng, 2, 3);
        let ms = suite.measurements();
        for i in 0..ms.len() {
            for j in 0..ms.len() {
                let (x, y) = (&ms[i].projector, &ms[j].projector);
                if commutes(x.as_operator(), y.as_operator()).unwrap() {
                    let xy = born(suite.density(), &[x, y]).unwrap();
                    let yx = born(suite.density(), &[y, x]).unwrap();
                    prop_assert!((xy - yx).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mixtures_round_trip(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scheme = common::random_scheme(&mut rng, n, 4, 3);
        let support = rng.gen_range(1..=6);
        let p = common::mixture(&common::random_weights(&mut rng, n, support), &scheme);
        let verdict = membership(&p).unwrap();
        prop_assert!(verdict.validate(&p));
        let MembershipVerdict::Inside { weights } = verdict else {
            return Err(TestCaseError::fail("mixture reported Outside"));
        };
        let space = representation_from_weights(&weights, &scheme).unwrap();
        for (set, value) in p.iter() {
            let names: Vec<String> = set.iter().map(|i| format!("A{}", i + 1)).collect();
            prop_assert_eq!(&space.evaluate(&names).unwrap(), value);
        }
    }

    #[test]
    fn verdicts_carry_valid_witnesses(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scheme = common::random_subset_scheme(&mut rng, 3);
        let values = (0..scheme.len()).map(|_| common::random_rational(&mut rng, 10)).collect();
        let p = CorrelationVector::new(scheme, values).unwrap();
        let a = membership_with(&p, no_prechecks()).unwrap();
        let b = membership_with(&p, no_prechecks()).unwrap();
        prop_assert!(a.validate(&p));
        prop_assert_eq!(&a, &b);
        let with_prechecks = membership(&p).unwrap();
        prop_assert!(with_prechecks.validate(&p));
        prop_assert_eq!(a.is_inside(), with_prechecks.is_inside());
    }

    #[test]
    fn non_monotone_vectors_are_outside(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scheme = ConjunctionScheme::with_singletons(3, [IndexSet::from_indices([0, 1])]).unwrap();
        let single = common::random_rational(&mut rng, 8);
        let pair = &single + rat(rng.gen_range(1..=4), 16);
        let p = CorrelationVector::new(scheme, vec![single, rat(1, 1), rat(1, 2), pair]).unwrap();
        let verdict = membership_with(&p, no_prechecks()).unwrap();
        prop_assert!(!verdict.is_inside());
        prop_assert!(verdict.validate(&p));
    }

    #[test]
    fn ch_is_invariant_under_side_swap(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..8).map(|_| common::random_rational(&mut rng, 12)).collect();
        let p = CorrelationVector::new(ConjunctionScheme::clauser_horne(), values).unwrap();
        let q = p.permuted(&[1, 0, 3, 2]).unwrap();
        prop_assert_eq!(ch_evaluate(&p).unwrap().holds, ch_evaluate(&q).unwrap().holds);
        prop_assert_eq!(membership(&p).unwrap().is_inside(), membership(&q).unwrap().is_inside());
    }

    #[test]
    fn censored_space_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qubits = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=4);
        let suite = common::random_suite(&mut rng, qubits, n);
        let kappa = common::random_kappa(&mut rng, &suite);
        let censored = build_censored_space(&suite, &kappa, &policy()).unwrap();
        let space = censored.space();
        let compat = compute_compatibility(&suite);
        for m in suite.measurements() {
            let outcome = space.event(&m.name).unwrap();
            let switch = space.event(&m.switch_name).unwrap();
            prop_assert!(outcome.iter().all(|k| switch.contains(k)));
        }
        for i in 0..n {
            for j in i + 1..n {
                let pair = IndexSet::from_indices([i, j]);
                if !compat.contains(pair) {
                    let ms = suite.measurements();
                    let both = space.evaluate(&[&ms[i].switch_name, &ms[j].switch_name]).unwrap();
                    prop_assert!(both.is_zero());
                }
            }
        }
        // A_i ⊆ a_i: adding a_i to an outcome conjunction containing A_i is free,
        // and adding any conjunct can only lower the probability
        let full = IndexSet::full(n);
        let p = policy();
        for outcomes in full.subsets() {
            for switches in full.subsets() {
                let base = effective_probability(&suite, &kappa, outcomes, switches, &p).unwrap();
                let absorbed = effective_probability(&suite, &kappa, outcomes, switches.union(outcomes), &p).unwrap();
                prop_assert_eq!(&absorbed, &base);
                for i in 0..n {
                    let more = effective_probability(&suite, &kappa, outcomes.with(i), switches, &p).unwrap();
                    prop_assert!(more <= base);
                }
            }
        }
        let report = verify_censorship(&censored, &suite, &kappa, 2 * n, &policy()).unwrap();
        prop_assert!(report.passed());
    }
}

#[test]
fn total_mass_is_one_and_switches_marginalise() {
    let cfg = OrsayConfig::default();
    let suite = orsay::build_suite(&cfg);
    let kappa = orsay::distribution(&cfg, &suite).unwrap();
    let space = build_censored_space(&suite, &kappa, &policy()).unwrap();
    let total: num_rational::BigRational = space.space().masses().iter().cloned().sum();
    assert!(total.is_one());
    let p = policy();
    // p(A ∧ a) + p(¬A ∧ a) = p(a)
    for (i, m) in suite.measurements().iter().enumerate() {
        let s = IndexSet::singleton(i);
        let with = effective_probability(&suite, &kappa, s, s, &p).unwrap();
        let switch = effective_probability(&suite, &kappa, IndexSet::EMPTY, s, &p).unwrap();
        let not_outcome = space.space().evaluate(&[m.switch_name.as_str()]).unwrap() - &with;
        assert_eq!(with + not_outcome, switch);
    }
}

#[test]
fn arbitrary_angles_follow_half_sine_squared() {
    let loose = RationalizationPolicy::new(1e-9, 1_000_000_000_000, false).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..25 {
        let degrees = [0.0, rng.gen_range(0.0..360.0), rng.gen_range(0.0..360.0), rng.gen_range(0.0..360.0)];
        let cfg = OrsayConfig::from_degrees(degrees, [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)]);
        let v = orsay::naked_vector(&cfg, &loose).unwrap();
        for (k, (i, j)) in orsay::CONTEXTS.iter().enumerate() {
            let expected = orsay::singlet_joint_up(cfg.angle_between(*i, *j));
            assert!((to_f64(&v.values()[4 + k]) - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn frequencies_converge_with_trials() {
    let cfg = OrsayConfig::default();
    let suite = orsay::build_suite(&cfg);
    let kappa = orsay::distribution(&cfg, &suite).unwrap();
    let queries = vec![(orsay::context_set(orsay::A, orsay::B), IndexSet::EMPTY)];
    let mut errors = Vec::new();
    for trials in [1_000u64, 100_000] {
        let mut worst: f64 = 0.0;
        for seed in 0..5 {
            let records = simulation::run(&suite, &kappa, trials, seed, &policy()).unwrap();
            let est = &simulation::estimate(&records, &queries)[0];
            worst = worst.max((est.frequency - 3.0 / 32.0).abs());
        }
        errors.push(worst);
    }
    assert!(errors[1] < errors[0]);
    assert!(errors[1] < 0.005);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let cfg = OrsayConfig::default();
    let suite = orsay::build_suite(&cfg);
    let kappa = orsay::distribution(&cfg, &suite).unwrap();
    let a = simulation::run_with(&suite, &kappa, 20_000, 5, &policy(), Execution::Sequential).unwrap();
    let b = simulation::run_with(&suite, &kappa, 20_000, 5, &policy(), Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn incompatible_support_is_rejected() {
    let cfg = OrsayConfig::default();
    let suite: MeasurementSuite = orsay::build_suite(&cfg);
    let compat = compute_compatibility(&suite);
    let bad = vec![(suite.context(&["A", "A'"]).unwrap(), rat(1, 1))];
    let err = kolmocensor::censorship::validate_distribution(&bad, &compat, |s| suite.context_label(s)).unwrap_err();
    assert!(matches!(err, kolmocensor::Error::IncompatibleSupport { .. }));
}
