//! Random instance generators for the CLI and acceptance tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use speedscale::problem::validate_profile;
use speedscale::{Instance, Job, JobOrder, Rational, SpeedProfile, Variant};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// A valid `k`-level profile: breakpoint energies increase strictly, so
/// every level is useful.
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

/// Unit jobs, releases on a 1/12 grid in `[0, n]`.
pub fn unit_instance(rng: &mut impl Rng, n: usize, k: usize) -> Instance {
    let jobs = (0..n).map(|_| Job::unit(q(rng.gen_range(0..=12 * n as i64), 12))).collect();
    Instance::new(jobs, profile(rng, k, n as i64 + 1), Variant::FlowEnergy).unwrap()
}

pub fn general_instance(rng: &mut impl Rng, n: usize, k: usize, variant: Variant) -> Instance {
    let jobs = (0..n)
        .map(|_| {
            Job::new(q(rng.gen_range(0..=6 * n as i64), 6), q(rng.gen_range(1..=8), 4), q(rng.gen_range(1..=6), 2))
        })
        .collect();
    Instance::new(jobs, profile(rng, k, n as i64 + 1), variant).unwrap()
}

/// Budget between the all-slow and all-fast energies of `instance`.
pub fn with_random_budget(rng: &mut impl Rng, instance: &Instance) -> Instance {
    let p = instance.profile();
    let k = p.k();
    let v = instance.total_volume();
    let low = p.power(0).clone() * v.clone() / p.speed(0).clone();
    let high = p.power(k - 1).clone() * v / p.speed(k - 1).clone();
    let t = q(rng.gen_range(1..=11), 12);
    instance.with_variant(Variant::Budget(low.clone() + t * (high - low))).unwrap()
}

pub fn random_order(rng: &mut impl Rng, n: usize) -> JobOrder {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    JobOrder::completion(perm).unwrap()
}

/// Two speeds with `s₁ = 1`, unit weights, `P₁V < B < P₂V/s₂`.
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

/// A processing time for each job drawn from a 1/12 grid over its
/// feasible range.
pub fn random_x(rng: &mut impl Rng, instance: &Instance) -> Vec<Rational> {
    let k = instance.profile().k();
    (0..instance.n())
        .map(|j| {
            let (lo, hi) = (instance.x(j, k - 1), instance.x(j, 0));
            lo.clone() + q(rng.gen_range(0..=12), 12) * (hi - lo)
        })
        .collect()
}
