//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use speedscale::problem::validate_profile;
use speedscale::{Instance, Job, JobOrder, Rational, SpeedProfile, Variant};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// A valid profile with `k` levels. Breakpoints are drawn first and powers
/// derived from them, so convexity holds by construction.
pub fn profile(rng: &mut impl Rng, k: usize, max_delta: i64) -> SpeedProfile {
    let pool = [q(1, 1), q(3, 2), q(2, 1), q(5, 2), q(3, 1), q(4, 1), q(5, 1)];
    let mut speeds: Vec<Rational> = pool.choose_multiple(rng, k).cloned().collect();
    speeds.sort();
    let mut powers = vec![q(rng.gen_range(1..=8), 4)];
    let mut d = q(rng.gen_range(0..=4 * max_delta), 4);
    for i in 0..k - 1 {
        let p = (d.clone() * (speeds[i + 1].clone() - speeds[i].clone()) + powers[i].clone() * speeds[i + 1].clone())
            / speeds[i].clone();
        powers.push(p);
        d += q(rng.gen_range(1..=12), 4);
    }
    validate_profile(&speeds, &powers).expect("generated profile is valid");
    SpeedProfile::new(speeds, powers).unwrap()
}

/// Unit jobs with releases on a 1/12 grid spread over `[0, n]`.
pub fn unit_instance(rng: &mut impl Rng, n: usize, k: usize) -> Instance {
    let jobs = (0..n).map(|_| Job::unit(q(rng.gen_range(0..=12 * n as i64), 12))).collect();
    Instance::new(jobs, profile(rng, k, n as i64 + 1), Variant::FlowEnergy).unwrap()
}

/// Arbitrary jobs: volumes and weights from small grids.
pub fn general_instance(rng: &mut impl Rng, n: usize, k: usize, variant: Variant) -> Instance {
    let jobs = (0..n)
        .map(|_| {
            Job::new(
                q(rng.gen_range(0..=6 * n as i64), 6),
                q(rng.gen_range(1..=8), 4),
                q(rng.gen_range(1..=6), 2),
            )
        })
        .collect();
    Instance::new(jobs, profile(rng, k, n as i64 + 1), variant).unwrap()
}

pub fn random_order(rng: &mut impl Rng, n: usize) -> JobOrder {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    JobOrder::completion(perm).unwrap()
}

/// Two-speed budget instance with `s₁ = 1`, unit weights and a budget
/// strictly between the all-slow and all-fast energies.
pub fn two_speed_budget(rng: &mut impl Rng, n: usize) -> Instance {
    let s2 = [q(3, 2), q(2, 1), q(3, 1)].choose(rng).unwrap().clone();
    let p1 = q(rng.gen_range(1..=4), 2);
    let d = q(rng.gen_range(1..=8), 2);
    let p2 = p1.clone() * s2.clone() + d * (s2.clone() - q(1, 1));
    let jobs: Vec<Job> = (0..n)
        .map(|_| Job::new(q(rng.gen_range(0..=4 * n as i64), 4), q(rng.gen_range(1..=8), 4), q(1, 1)))
        .collect();
    let v: Rational = jobs.iter().map(|j| j.volume.clone()).sum();
    let (low, high) = (p1.clone() * v.clone(), p2.clone() * v / s2.clone());
    let t = q(rng.gen_range(1..=11), 12);
    let b = low.clone() + t * (high - low);
    let profile = SpeedProfile::new(vec![q(1, 1), s2], vec![p1, p2]).unwrap();
    Instance::new(jobs, profile, Variant::Budget(b)).unwrap()
}
