//! Building concrete timelines from processing times.

use crate::error::{Error, Result};
use crate::metrics::{Content, Schedule};
use crate::problem::{Instance, JobOrder, SpeedProfile};
use crate::scalar::Scalar;

/// Per-job convex weights over speed levels: `lambda[j][i]` is the share of
/// job `j`'s pure level-`i` processing time that is used.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation<T> {
    pub lambda: Vec<Vec<T>>,
}

impl<T: Scalar> Allocation<T> {
    /// `x_j = Σ_i λ_j^i x_j^i`.
    pub fn processing_times(&self, instance: &Instance<T>) -> Vec<T> {
        (0..instance.n())
            .map(|j| self.lambda[j].iter().enumerate().map(|(i, l)| l.clone() * instance.x(j, i)).sum())
            .collect()
    }

    /// `Σ_j Σ_i λ_j^i E_j^i`.
    pub fn energy(&self, instance: &Instance<T>) -> T {
        (0..instance.n())
            .flat_map(|j| self.lambda[j].iter().enumerate().map(move |(i, l)| l.clone() * instance.e(j, i)))
            .sum()
    }

    /// The same processing times realized with adjacent levels only.
    pub fn canonical(&self, instance: &Instance<T>) -> Result<Self> {
        let x = self.processing_times(instance);
        let lambda = (0..instance.n())
            .map(|j| realize_two_speed(&instance.job(j).volume, &x[j], instance.profile()))
            .collect::<Result<_>>()?;
        Ok(Allocation { lambda })
    }
}

/// Cheapest convex combination of levels with processing time `target_x` for
/// volume `v`: the bracketing pair of adjacent levels, or a single level.
pub fn realize_two_speed<T: Scalar>(v: &T, target_x: &T, profile: &SpeedProfile<T>) -> Result<Vec<T>> {
    let k = profile.k();
    let xs: Vec<T> = (0..k).map(|i| profile.time_at(v, i)).collect();
    if *target_x > xs[0] || *target_x < xs[k - 1] {
        return Err(Error::TargetOutOfRange);
    }
    let mut lambda = vec![T::zero(); k];
    if let Some(i) = xs.iter().position(|t| t == target_x) {
        lambda[i] = T::one();
        return Ok(lambda);
    }
    // xs decreasing: find i with xs[i] > target > xs[i + 1].
    let i = (0..k - 1).find(|&i| xs[i + 1] < *target_x).expect("target inside range");
    let l = (target_x.clone() - xs[i + 1].clone()) / (xs[i].clone() - xs[i + 1].clone());
    lambda[i + 1] = T::one() - l.clone();
    lambda[i] = l;
    Ok(lambda)
}

/// Time spent at the faster and at the slower level of a two-level plan.
struct Plan<T> {
    fast: (usize, T),
    slow: (usize, T),
}

fn plan<T: Scalar>(instance: &Instance<T>, j: usize, x: &T) -> Result<Plan<T>> {
    let lambda = realize_two_speed(&instance.job(j).volume, x, instance.profile())?;
    let used: Vec<usize> = (0..lambda.len()).filter(|&i| !lambda[i].is_zero()).collect();
    let time = |i: usize| lambda[i].clone() * instance.x(j, i);
    Ok(match used.as_slice() {
        [i] => Plan { fast: (*i, time(*i)), slow: (*i, T::zero()) },
        [lo, hi] => Plan { fast: (*hi, time(*hi)), slow: (*lo, time(*lo)) },
        _ => unreachable!("at most two adjacent levels"),
    })
}

/// Non-idling list schedule: at every instant the released unfinished job
/// earliest in `order` runs, its faster level first.
pub fn dispatch_ordering<T: Scalar>(instance: &Instance<T>, order: &JobOrder, x: &[T]) -> Result<Schedule<T>> {
    let n = instance.n();
    order.check_len(n)?;
    if x.len() != n {
        return Err(Error::OrderingSizeMismatch { expected: n, got: x.len() });
    }
    let mut plans = Vec::with_capacity(n);
    for (j, xj) in x.iter().enumerate() {
        plans.push(plan(instance, j, xj)?);
    }
    let pos = order.positions();
    let mut sched = Schedule::default();
    let mut t = T::zero();
    let mut left = n;
    let mut finished = vec![false; n];
    while left > 0 {
        let mut best: Option<usize> = None;
        let mut next_release: Option<&T> = None;
        for j in (0..n).filter(|&j| !finished[j]) {
            let r = &instance.job(j).release;
            if *r <= t {
                if best.is_none_or(|b| pos[j] < pos[b]) {
                    best = Some(j);
                }
            } else if next_release.is_none_or(|nr| r < nr) {
                next_release = Some(r);
            }
        }
        let Some(j) = best else {
            let nr = next_release.expect("unfinished jobs remain").clone();
            sched.push(t.clone(), nr.clone(), Content::Idle);
            t = nr;
            continue;
        };
        let p = &mut plans[j];
        let part = if p.fast.1.is_positive() { &mut p.fast } else { &mut p.slow };
        let mut d = part.1.clone();
        if let Some(nr) = next_release {
            let avail = nr.clone() - t.clone();
            if avail < d {
                d = avail;
            }
        }
        let end = t.clone() + d.clone();
        sched.push(t, end.clone(), Content::Run { job: j, level: part.0 });
        part.1 -= d;
        t = end;
        if p.fast.1.is_zero() && p.slow.1.is_zero() {
            finished[j] = true;
            left -= 1;
        }
    }
    Ok(sched)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrptOutcome<T> {
    pub schedule: Schedule<T>,
    pub completion: Vec<T>,
    pub makespan: T,
    /// Idle time before the makespan: `C_max - Σ v_j / s`.
    pub idle: T,
}

/// Preemptive shortest-remaining-volume-first at a single fixed level.
/// Ties keep the running job, then prefer the lowest index.
pub fn srpt_schedule<T: Scalar>(instance: &Instance<T>, level: usize) -> SrptOutcome<T> {
    let n = instance.n();
    let s = instance.profile().speed(level).clone();
    let mut rem: Vec<T> = instance.jobs().iter().map(|j| j.volume.clone()).collect();
    let mut completion = vec![T::zero(); n];
    let mut finished = vec![false; n];
    let mut sched = Schedule::default();
    let mut t = T::zero();
    let mut current: Option<usize> = None;
    let mut left = n;
    while left > 0 {
        let mut best: Option<usize> = None;
        let mut next_release: Option<&T> = None;
        for j in (0..n).filter(|&j| !finished[j]) {
            let r = &instance.job(j).release;
            if *r <= t {
                let better = match best {
                    None => true,
                    Some(b) => rem[j] < rem[b] || (rem[j] == rem[b] && current == Some(j)),
                };
                if better {
                    best = Some(j);
                }
            } else if next_release.is_none_or(|nr| r < nr) {
                next_release = Some(r);
            }
        }
        let Some(j) = best else {
            let nr = next_release.expect("unfinished jobs remain").clone();
            sched.push(t.clone(), nr.clone(), Content::Idle);
            t = nr;
            current = None;
            continue;
        };
        let mut d = rem[j].clone() / s.clone();
        if let Some(nr) = next_release {
            let avail = nr.clone() - t.clone();
            if avail < d {
                d = avail;
            }
        }
        let end = t.clone() + d.clone();
        sched.push(t, end.clone(), Content::Run { job: j, level });
        rem[j] -= d * s.clone();
        t = end;
        if rem[j].is_zero() {
            finished[j] = true;
            completion[j] = t.clone();
            left -= 1;
            current = None;
        } else {
            current = Some(j);
        }
    }
    let makespan = sched.makespan();
    let idle = makespan.clone() - instance.total_volume() / s;
    SrptOutcome { schedule: sched, completion, makespan, idle }
}
