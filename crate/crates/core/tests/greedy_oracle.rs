mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speedscale::greedy::{kappa_delta, naive_per_level_sweep, naive_two_speed_sweep};
use speedscale::metrics::evaluate;
use speedscale::oracle::{exact_optimum, DEFAULT_MAX_N};

#[test]
fn greedy_matches_oracle_on_random_unit_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..120 {
        let n = rng.gen_range(1..=7);
        let k = rng.gen_range(1..=4);
        let i = common::unit_instance(&mut rng, n, k);
        let (s, _) = kappa_delta(&i).unwrap();
        let kd = evaluate(&s, &i, None).unwrap().objective;
        let opt = exact_optimum(&i, DEFAULT_MAX_N).unwrap();
        assert_eq!(kd, opt.objective, "{i:?}");
    }
}

#[test]
fn two_speed_sweeps_are_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..80 {
        let n = rng.gen_range(1..=6);
        let i = common::unit_instance(&mut rng, n, 2);
        let opt = exact_optimum(&i, DEFAULT_MAX_N).unwrap().objective;
        for f in [naive_two_speed_sweep, naive_per_level_sweep] {
            let (s, _) = f(&i).unwrap();
            assert_eq!(evaluate(&s, &i, None).unwrap().objective, opt, "{i:?}");
        }
    }
}
