mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speedscale::greedy::{
    fifo_ordering, kappa_delta, kappa_delta_c, kappa_delta_with, naive_per_level_sweep, naive_two_speed_sweep,
    validate_kd_rule, Guard,
};
use speedscale::metrics::{affection, evaluate, optimality_witness, shrink_expand_energies};
use speedscale::{Extended, Rational};

fn zero() -> Extended<Rational> {
    Extended::Finite(Rational::from_integer(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kd_output_is_locally_optimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, k) = (rng.gen_range(1..=7), rng.gen_range(1..=4));
        let i = common::unit_instance(&mut rng, n, k);
        let (s, trace) = kappa_delta(&i).unwrap();
        let w = optimality_witness(&s, &i).unwrap();
        prop_assert!(w.violations.is_empty());
        for j in 0..n {
            prop_assert!(w.expand_margin(j) >= zero());
        }
        prop_assert!(validate_kd_rule(&trace, &i).is_ok());
        prop_assert!(trace.steps.len() <= n * (n + k));

        let (strict, strict_trace) = kappa_delta_with(&i, Guard::Strict).unwrap();
        let ws = optimality_witness(&strict, &i).unwrap();
        prop_assert!(ws.violations.is_empty());
        for j in 0..n {
            prop_assert!(ws.expand_margin(j) > zero());
        }
        prop_assert!(validate_kd_rule(&strict_trace, &i).is_ok());
        prop_assert_eq!(
            evaluate(&s, &i, None).unwrap().objective,
            evaluate(&strict, &i, None).unwrap().objective
        );
    }

    #[test]
    fn rates_are_monotone_along_traces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, k) = (rng.gen_range(1..=6), rng.gen_range(1..=4));
        let i = common::unit_instance(&mut rng, n, k);
        let order = fifo_ordering(&i).unwrap();
        for f in [kappa_delta, naive_two_speed_sweep, naive_per_level_sweep] {
            let (_, trace) = f(&i).unwrap();
            let mut prev: Option<(Vec<Rational>, Vec<Extended<Rational>>)> = None;
            for x in trace.states(&i) {
                let s = speedscale::dispatch::dispatch_ordering(&i, &order, &x).unwrap();
                let (plain, _) = affection(&s, &i).unwrap();
                let delta: Vec<_> = shrink_expand_energies(&s, &i).unwrap().into_iter().map(|e| e.0).collect();
                if let Some((pk, pd)) = &prev {
                    for j in 0..n {
                        prop_assert!(plain.kappa[j] <= pk[j]);
                        prop_assert!(delta[j] >= pd[j]);
                    }
                }
                prev = Some((plain.kappa, delta));
            }
        }
    }

    #[test]
    fn variants_coincide_on_two_speeds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=7);
        let i = common::unit_instance(&mut rng, n, 2);
        let obj = |s| evaluate(&s, &i, None).unwrap().objective;
        let kd = obj(kappa_delta(&i).unwrap().0);
        prop_assert_eq!(&kd, &obj(naive_two_speed_sweep(&i).unwrap().0));
        prop_assert_eq!(&kd, &obj(naive_per_level_sweep(&i).unwrap().0));
    }

    #[test]
    fn extended_variant_reduces_to_plain_on_fifo(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, k) = (rng.gen_range(1..=6), rng.gen_range(1..=4));
        let i = common::unit_instance(&mut rng, n, k);
        let order = fifo_ordering(&i).unwrap();
        let (a, ta) = kappa_delta(&i).unwrap();
        let (b, tb) = kappa_delta_c(&i, &order).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(ta.final_x(&i), tb.final_x(&i));
    }
}
