mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speedscale::metrics::evaluate;
use speedscale::oracle::{audit_optimum, exact_optimum, BudgetIdentity, DEFAULT_MAX_N};
use speedscale::reductions::{budget_to_fe, restrict_schedule, subset_sum_exists, subsetsum_to_bidua};
use speedscale::Rational;

#[test]
fn budget_identity_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let n = rng.gen_range(1..=5);
        let i = common::two_speed_budget(&mut rng, n);
        let rep = audit_optimum(&i, DEFAULT_MAX_N).unwrap();
        assert!(matches!(rep.budget_identity, BudgetIdentity::Holds { .. }));
    }
}

#[test]
fn budget_to_fe_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let n = rng.gen_range(1..=2);
        let src = common::two_speed_budget(&mut rng, n);
        let red = budget_to_fe(&src).unwrap();
        let fe = exact_optimum(&red.instance, DEFAULT_MAX_N).unwrap();
        let m = &fe.metrics;
        let last_src = (0..n).map(|j| m.completion[j].clone()).max().unwrap();
        for j in n..=2 * n {
            assert!(m.completion[j] > last_src, "job {j} not last: {src:?}");
            let slow = red.instance.x(j, 0);
            assert_eq!(m.processing[j], slow, "job {j} sped up: {src:?}");
        }
        let v = red.normalized_source.total_volume();
        let chi: Rational = (0..n).map(|j| m.processing[j].clone()).sum();
        assert_eq!(chi, v - red.y.clone(), "{src:?}");
        let restricted = restrict_schedule(&fe.schedule, &(0..n).collect::<Vec<_>>());
        let rm = evaluate(&restricted, &red.normalized_source, None).unwrap();
        let bopt = exact_optimum(&red.normalized_source, DEFAULT_MAX_N).unwrap();
        assert!(rm.within_budget);
        assert_eq!(rm.flow, bopt.objective, "{src:?}");
    }
}

#[test]
fn bidua_gap_small() {
    for (a, target) in [(vec![3u64, 2, 2], 4u64), (vec![4, 3, 2], 5), (vec![4, 3], 5), (vec![3, 3, 2], 7), (vec![4, 4, 3], 6)] {
        let red = subsetsum_to_bidua::<Rational>(&a, target).unwrap();
        let opt = exact_optimum(&red.instance, DEFAULT_MAX_N).unwrap();
        let yes = subset_sum_exists(&a, target);
        eprintln!("{a:?} {target} yes={yes} flow={} thr={}", opt.objective, red.yes_threshold);
        assert_eq!(opt.objective <= red.yes_threshold, yes, "{a:?} {target}");
    }
}

/// At two elements the gap can close: here a NO instance reaches the YES
/// threshold with every long job run fast and every short job slow.
#[test]
fn two_element_gap_can_close() {
    use speedscale::metrics::Content;
    use speedscale::Schedule;
    let red = subsetsum_to_bidua::<Rational>(&[2, 2], 3).unwrap();
    assert!(!subset_sum_exists(&[2, 2], 3));
    let q = common::q;
    let mut s = Schedule::default();
    s.push(q(0, 1), q(1, 1), Content::Run { job: 0, level: 1 });
    s.push(q(1, 1), q(3, 2), Content::Run { job: 1, level: 0 });
    s.push(q(7, 2), q(9, 2), Content::Run { job: 2, level: 1 });
    s.push(q(9, 2), q(5, 1), Content::Run { job: 3, level: 0 });
    let m = evaluate(&s, &red.instance, None).unwrap();
    assert!(m.within_budget);
    assert_eq!(m.flow, q(3, 1));
    assert!(m.flow < red.yes_threshold);
    assert_eq!(exact_optimum(&red.instance, DEFAULT_MAX_N).unwrap().objective, q(3, 1));
}
