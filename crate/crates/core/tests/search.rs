use std::sync::Arc;

use proptest::prelude::*;
use qcomm::amplamp::{grover_angle, iteration_count, NoiseModel};
use qcomm::boolfn::Gadget;
use qcomm::harness::{run_trials, trial_rng};
use qcomm::params::Constants;
use qcomm::search::{SearchInstance, SearchRunner};
use qcomm::symmetric::{CountOutcome, Counter};

fn runner() -> SearchRunner {
    SearchRunner::new(Constants::default(), NoiseModel::RandomPhases { seed: 3 })
}

#[test]
fn known_count_cost_is_order_sqrt_n_q() {
    let r = runner();
    for q in [1u64, 4] {
        for n in [64usize, 256, 1024] {
            let k = iteration_count(grover_angle(1, n).unwrap()).unwrap();
            let worst = r.base_cost(n, q, k) + q;
            let limit = 10.0 * (n as f64).sqrt() * q as f64;
            assert!((worst as f64) <= limit, "n={n} q={q}: {worst} > {limit}");
        }
    }
}

#[test]
fn measured_cost_matches_the_model() {
    let r = runner();
    let g = Arc::new(Gadget::and2().with_cost(3));
    let inst = SearchInstance::planted_count(g, 256, 1, &mut trial_rng(5, 0)).unwrap();
    let k = iteration_count(grover_angle(1, 256).unwrap()).unwrap();
    let base = r.base_cost(256, 3, k);
    for out in run_trials(40, 8, |_, rng| r.search_known_t(&inst, 1, rng).unwrap()) {
        let total = out.meter.total();
        let verified = u64::from(out.alice == out.bob) * 3;
        assert_eq!(total, base + verified);
    }
}

#[test]
fn unknown_count_finds_planted_solutions() {
    let r = runner();
    let g = Arc::new(Gadget::and2());
    let hits = run_trials(60, 11, |i, rng| {
        let inst = SearchInstance::planted_count(g.clone(), 128, 1 + i as usize % 5, rng).unwrap();
        r.search_unknown(&inst, rng).unwrap().0.is_some()
    });
    assert!(hits.iter().filter(|&&h| h).count() >= 57);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_never_reports_a_non_solution(seed in any::<u64>(), z in 0usize..6, t in 1usize..8) {
        let r = runner();
        let mut rng = trial_rng(seed, 0);
        let inst = SearchInstance::planted_count(Arc::new(Gadget::xor2()), 32, z, &mut rng).unwrap();
        let out = r.search_known_t(&inst, t, &mut rng).unwrap();
        if let Some(i) = out.found {
            prop_assert_eq!(inst.value(i), -1);
        }
        prop_assert!(z > 0 || out.found.is_none());
    }

    #[test]
    fn counting_small_instances(seed in any::<u64>(), z in 0usize..5) {
        let r = runner();
        let mut rng = trial_rng(seed, 1);
        let inst = SearchInstance::planted_count(Arc::new(Gadget::and2()), 32, z, &mut rng).unwrap();
        let rep = Counter::new(&r).count_or_threshold(&inst, 4, &mut rng).unwrap();
        // Counting may err with small probability; it never overcounts.
        if let CountOutcome::Exact(c) = rep.outcome {
            prop_assert!(c <= z);
        }
    }
}

