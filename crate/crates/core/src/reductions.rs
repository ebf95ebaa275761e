//! Generators for the hardness reductions and the greedy counterexample,
//! with the derived constants each construction depends on.

use crate::dispatch::srpt_schedule;
use crate::error::{Error, Result};
use crate::metrics::{Content, Schedule};
use crate::problem::{Instance, Job, JobOrder, OrderKind, SpeedProfile, Variant};
use crate::scalar::Scalar;

/// A flow-plus-energy instance built from a two-speed budget instance whose
/// optimum, restricted to the original jobs, is optimal for the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetToFe<T> {
    /// Jobs `0..n` are the source jobs; job `n` is the long job; `n+1..=2n`
    /// are the late jobs.
    pub instance: Instance<T>,
    /// The source after rescaling volumes and speeds so that `s₁ = 1`.
    pub normalized_source: Instance<T>,
    /// Factor the source's volumes and speeds were divided by.
    pub speed_scale: T,
    /// `(B - P₁V)/Δ₁`: total processing time the budget can save.
    pub y: T,
    pub c_max: T,
    pub idle: T,
    pub delta_tilde: T,
}

fn two_speed_budget<T: Scalar>(instance: &Instance<T>) -> Result<T> {
    if instance.profile().k() != 2 {
        return Err(Error::NotTwoSpeeds);
    }
    instance.variant().budget().cloned().ok_or(Error::NotBudget)
}

/// Divides volumes and speeds by `s₁`. Processing times, powers and
/// energies are unchanged, so both instances have the same schedules.
pub fn normalize_slowest_speed<T: Scalar>(instance: &Instance<T>) -> Result<(Instance<T>, T)> {
    let p = instance.profile();
    let s1 = p.speed(0).clone();
    let speeds = p.speeds().iter().map(|s| s.clone() / s1.clone()).collect();
    let profile = SpeedProfile::new(speeds, p.powers().to_vec())?;
    let jobs = instance
        .jobs()
        .iter()
        .map(|j| Job { volume: j.volume.clone() / s1.clone(), ..j.clone() })
        .collect();
    Ok((Instance::new(jobs, profile, instance.variant().clone())?, s1))
}

pub fn budget_to_fe<T: Scalar>(budget_instance: &Instance<T>) -> Result<BudgetToFe<T>> {
    two_speed_budget(budget_instance)?;
    let (src, speed_scale) = normalize_slowest_speed(budget_instance)?;
    let b = src.variant().budget().expect("budget variant").clone();
    let p = src.profile();
    let (p1, s2) = (p.power(0).clone(), p.speed(1).clone());
    let v = src.total_volume();
    let low = p1.clone() * v.clone();
    let high = p.power(1).clone() * v.clone() / s2.clone();
    if b <= low || b >= high {
        return Err(Error::BudgetOutOfRange);
    }
    let y = (b - low) / p.delta_table()[0].clone();
    let srpt = srpt_schedule(&src, 0);
    let n = src.n();
    let one = T::one();
    let mut jobs = src.jobs().to_vec();
    let spread = (s2.clone() + one.clone()) * v.clone();
    jobs.push(Job::new(T::zero(), srpt.idle.clone() + spread.clone() + y.clone(), one.clone()));
    for _ in 0..n {
        jobs.push(Job::new(srpt.makespan.clone() + spread.clone(), y.clone() + one.clone(), one.clone()));
    }
    let nn = T::from_int(n as i64);
    let p2 = (nn.clone() + T::from_frac(3, 2)) * (s2.clone() - one.clone()) + p1.clone() * s2.clone();
    let profile = SpeedProfile::new(vec![one, s2], vec![p1, p2])?;
    let delta_tilde = profile.delta_table()[0].clone();
    assert!(
        nn.clone() + T::one() < delta_tilde && delta_tilde < nn + T::from_int(2),
        "breakpoint {delta_tilde} outside (n+1, n+2)"
    );
    let instance = Instance::new(jobs, profile, Variant::FlowEnergy)?;
    Ok(BudgetToFe {
        instance,
        normalized_source: src,
        speed_scale,
        y,
        c_max: srpt.makespan,
        idle: srpt.idle,
        delta_tilde,
    })
}

/// `schedule` with every segment of a job outside `jobs` turned idle.
pub fn restrict_schedule<T: Scalar>(schedule: &Schedule<T>, jobs: &[usize]) -> Schedule<T> {
    let mut out = Schedule::default();
    for s in &schedule.segments {
        let content = match s.content {
            Content::Run { job, .. } if jobs.contains(&job) => s.content,
            _ => Content::Idle,
        };
        out.push(s.start.clone(), s.end.clone(), content);
    }
    out
}

fn check_subset_sum(elements: &[u64], target: u64) -> Result<()> {
    let bad = |msg: String| Err(Error::PreconditionViolated(msg));
    if elements.len() < 2 {
        return bad("at least two elements are needed".into());
    }
    if elements.contains(&0) {
        return bad("elements must be positive".into());
    }
    if elements.windows(2).any(|w| w[0] < w[1]) {
        return bad("elements must be sorted in nonincreasing order".into());
    }
    let sum: u64 = elements.iter().sum();
    if !(elements[0] < target && target < sum) {
        return bad(format!("target {target} must lie strictly between {} and {sum}", elements[0]));
    }
    Ok(())
}

/// Whether some subset of `elements` sums to `target`, by exhaustive search.
pub fn subset_sum_exists(elements: &[u64], target: u64) -> bool {
    let mut reachable = std::collections::BTreeSet::from([0u64]);
    for &a in elements {
        let next: Vec<u64> = reachable.iter().map(|s| s + a).filter(|&s| s <= target).collect();
        reachable.extend(next);
    }
    reachable.contains(&target)
}

/// `count` identical copies of `job`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobGroup<T> {
    pub job: Job<T>,
    pub count: u64,
}

/// A weighted unit-job instance from SubsetSum, kept as groups of identical
/// jobs so that its size stays polynomial in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumFe<T> {
    /// Per element `i`: the light job `(i,0)`, then the `m` heavy jobs. Then
    /// the early filler package, then the late filler package.
    pub groups: Vec<JobGroup<T>>,
    pub profile: SpeedProfile<T>,
    /// Size of the early filler package.
    pub k: u64,
    /// Size of the late filler package.
    pub k_tilde: u64,
    /// `m²/2 + A/(2a₁²)`: total shrinkage an optimum applies.
    pub y: T,
    pub delta: T,
}

impl<T: Scalar> SubsetSumFe<T> {
    pub fn job_count(&self) -> u64 {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// The flat instance, refused when it would exceed `max_jobs` jobs.
    pub fn expand(&self, max_jobs: usize) -> Result<Instance<T>> {
        let total = self.job_count();
        if total > max_jobs as u64 {
            return Err(Error::TooLarge { n: usize::try_from(total).unwrap_or(usize::MAX), max: max_jobs });
        }
        let jobs = self
            .groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.job.clone(), g.count as usize))
            .collect();
        Instance::new(jobs, self.profile.clone(), Variant::FlowEnergy)
    }
}

fn overflow() -> Error {
    Error::PreconditionViolated("constants overflow 64-bit counts".into())
}

pub fn subsetsum_to_feidwu<T: Scalar>(elements: &[u64], target: u64) -> Result<SubsetSumFe<T>> {
    check_subset_sum(elements, target)?;
    let (lo, hi) = (elements[elements.len() - 1], elements[0]);
    if hi > 2 * lo {
        return Err(Error::PreconditionViolated(format!("elements must be within a factor 2: {hi} > 2·{lo}")));
    }
    let int = |x: u64| i64::try_from(x).map(T::from_int).map_err(|_| overflow());
    let m = elements.len() as u64;
    let (mt, a1) = (int(m)?, int(hi)?);
    let a1_cubed = a1.clone() * a1.clone() * a1.clone();
    let m5 = (0..5).map(|_| mt.clone()).fold(T::one(), |acc, x| acc * x);
    let y = mt.clone() * mt.clone() / T::from_int(2) + int(target)? / (T::from_int(2) * a1.clone() * a1.clone());
    // K = ⌈(m²a₁² + A) / (2a₁²)⌉ in integers.
    let den = hi.checked_mul(hi).and_then(|x| x.checked_mul(2)).ok_or_else(overflow)?;
    let num = (m * m).checked_mul(hi * hi).and_then(|x| x.checked_add(target)).ok_or_else(overflow)?;
    let k = num.div_ceil(den);
    let k_count = int(k)?;
    debug_assert_eq!(k_count, y.ceil());
    let k_tilde = [m.checked_pow(8), hi.checked_pow(3)]
        .into_iter()
        .try_fold(99u64, |acc, f| f.and_then(|f| acc.checked_mul(f)))
        .ok_or_else(overflow)?;

    let mut groups = Vec::new();
    let heavy = T::from_int(2) * mt.clone() * a1_cubed.clone();
    for (idx, &a) in elements.iter().enumerate() {
        let r0 = int(idx as u64 * (m + 1))?;
        let alpha = int(a)? / (T::from_int(2) * a1.clone() * a1.clone());
        groups.push(JobGroup { job: Job::new(r0.clone(), T::one(), int(a)? / mt.clone()), count: 1 });
        groups.push(JobGroup { job: Job::new(r0 + T::one() - alpha, T::one(), heavy.clone()), count: m });
    }
    let w0 = T::one() / (T::from_int(32) * m5.clone());
    let w_late = T::one() / (T::from_int(33) * m5);
    groups.push(JobGroup { job: Job::new(T::zero(), T::one(), w0), count: k });
    let r_late = mt.clone() * (mt.clone() + T::one()) + k_count - y.clone();
    groups.push(JobGroup { job: Job::new(r_late, T::one(), w_late.clone()), count: k_tilde });

    let delta = T::from_int(3) * mt.clone() * mt.clone() * mt * a1_cubed + w_late;
    let profile =
        SpeedProfile::new(vec![T::one(), T::from_int(2)], vec![T::one(), delta.clone() + T::from_int(2)])?;
    assert_eq!(profile.delta_table()[0], delta, "breakpoint identity");
    Ok(SubsetSumFe { groups, profile, k, k_tilde, y, delta })
}

/// A unit-weight two-speed budget instance from SubsetSum, with a priority
/// ordering known to be followed by some optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumBudget<T> {
    /// Job `2i` is `(i,1)` and job `2i+1` is `(i,2)`.
    pub instance: Instance<T>,
    /// `(i,2)` before `(i,1)` in every package.
    pub priority: JobOrder,
    pub delta: T,
    /// `Σ F_i(BS_i)`: the base schedules' total flow.
    pub base_flow: T,
    /// `Σ F_i(BS_i) - (1/2 + δ)A`: YES instances reach this flow, NO instances do not.
    pub yes_threshold: T,
    /// Release of each package's first job.
    pub shifts: Vec<T>,
}

pub fn subsetsum_to_bidua<T: Scalar>(elements: &[u64], target: u64) -> Result<SubsetSumBudget<T>> {
    check_subset_sum(elements, target)?;
    let int = |x: u64| i64::try_from(x).map(T::from_int).map_err(|_| overflow());
    let m = int(elements.len() as u64)?;
    let delta = T::one() / (int(elements[0])? * m.clone() * m);
    let two = T::from_int(2);
    let mut jobs = Vec::new();
    let mut shifts = Vec::new();
    let mut shift = T::zero();
    let mut sum = T::zero();
    for &a in elements {
        let a = int(a)?;
        let small = two.clone() * delta.clone() * a.clone();
        shifts.push(shift.clone());
        jobs.push(Job::new(shift.clone(), a.clone(), T::one()));
        jobs.push(Job::new(shift.clone() + a.clone() / two.clone(), small.clone(), T::one()));
        // All-slow completion bound of this package, plus a unit gap.
        shift = shift + a.clone() + small + T::one();
        sum += a;
    }
    let base_flow = sum.clone() + two.clone() * delta.clone() * sum.clone();
    let budget = (T::one() + T::from_int(4) * delta.clone()) * sum + int(target)?;
    let profile = SpeedProfile::new(vec![T::one(), two.clone()], vec![T::one(), T::from_int(4)])?;
    let instance = Instance::new(jobs, profile, Variant::Budget(budget))?;
    let perm = (0..elements.len()).flat_map(|i| [2 * i + 1, 2 * i]).collect();
    let priority = JobOrder::new(OrderKind::Priority, perm)?;
    let yes_threshold = base_flow.clone() - (T::one() / two + delta.clone()) * int(target)?;
    Ok(SubsetSumBudget { instance, priority, delta, base_flow, yes_threshold, shifts })
}

/// Three unit jobs on which both naive multi-speed sweeps can be
/// suboptimal: releases `0, 1/3, 4/3`, speeds `1, 2, 3`, powers
/// `1, 3+α, 6+α`. At `α = 1` the two breakpoints coincide, so `α ∈ [0, 1)`.
pub fn counterexample_instance<T: Scalar>(alpha: &T) -> Result<Instance<T>> {
    if alpha.is_negative() || *alpha >= T::one() {
        return Err(Error::AlphaOutOfRange);
    }
    let profile = SpeedProfile::new(
        vec![T::one(), T::from_int(2), T::from_int(3)],
        vec![T::one(), T::from_int(3) + alpha.clone(), T::from_int(6) + alpha.clone()],
    )?;
    let jobs = [T::zero(), T::from_frac(1, 3), T::from_frac(4, 3)].into_iter().map(Job::unit).collect();
    Instance::new(jobs, profile, Variant::FlowEnergy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::evaluate;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn budget_instance(jobs: Vec<Job<Rational>>, speeds: Vec<Rational>, powers: Vec<Rational>, b: Rational) -> Instance<Rational> {
        Instance::new(jobs, SpeedProfile::new(speeds, powers).unwrap(), Variant::Budget(b)).unwrap()
    }

    #[test]
    fn budget_to_fe_single_job() {
        let src = budget_instance(
            vec![Job::new(q(0, 1), q(2, 1), q(1, 1))],
            vec![q(1, 1), q(2, 1)],
            vec![q(1, 1), q(4, 1)],
            q(3, 1),
        );
        let r = budget_to_fe(&src).unwrap();
        assert_eq!(r.y, q(1, 2));
        assert_eq!((r.c_max.clone(), r.idle.clone()), (q(2, 1), q(0, 1)));
        let jobs = r.instance.jobs();
        assert_eq!(jobs.len(), 3);
        assert_eq!((jobs[1].release.clone(), jobs[1].volume.clone()), (q(0, 1), q(13, 2)));
        assert_eq!((jobs[2].release.clone(), jobs[2].volume.clone()), (q(8, 1), q(3, 2)));
        assert_eq!(r.instance.profile().power(1), &q(9, 2));
        assert_eq!(r.delta_tilde, q(5, 2));
    }

    #[test]
    fn budget_to_fe_bounds() {
        let mk = |b| {
            budget_instance(vec![Job::new(q(0, 1), q(2, 1), q(1, 1))], vec![q(1, 1), q(2, 1)], vec![q(1, 1), q(4, 1)], b)
        };
        assert_eq!(budget_to_fe(&mk(q(2, 1))).unwrap_err(), Error::BudgetOutOfRange);
        assert_eq!(budget_to_fe(&mk(q(4, 1))).unwrap_err(), Error::BudgetOutOfRange);
        let three = budget_instance(
            vec![Job::unit(q(0, 1))],
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(1, 1), q(4, 1), q(9, 1)],
            q(2, 1),
        );
        assert_eq!(budget_to_fe(&three).unwrap_err(), Error::NotTwoSpeeds);
    }

    #[test]
    fn budget_to_fe_normalizes_slowest_speed() {
        let src = budget_instance(
            vec![Job::new(q(0, 1), q(4, 1), q(1, 1))],
            vec![q(2, 1), q(4, 1)],
            vec![q(1, 1), q(4, 1)],
            q(3, 1),
        );
        let r = budget_to_fe(&src).unwrap();
        assert_eq!(r.speed_scale, q(2, 1));
        assert_eq!(r.normalized_source.job(0).volume, q(2, 1));
        assert_eq!(r.normalized_source.profile().speeds(), &[q(1, 1), q(2, 1)]);
        assert_eq!(r.y, q(1, 2));
    }

    #[test]
    fn restrict_identity_and_empty() {
        let s = Schedule::new(vec![
            crate::metrics::Segment { start: q(0, 1), end: q(1, 1), content: Content::Run { job: 0, level: 0 } },
            crate::metrics::Segment { start: q(1, 1), end: q(2, 1), content: Content::Run { job: 1, level: 1 } },
        ]);
        assert_eq!(restrict_schedule(&s, &[0, 1]), s);
        let idle = restrict_schedule(&s, &[]);
        assert_eq!(idle.segments.len(), 1);
        assert_eq!(idle.segments[0].content, Content::Idle);
        assert_eq!(idle.segments[0].end, q(2, 1));
    }

    #[test]
    fn feidwu_small_example() {
        let r = subsetsum_to_feidwu::<Rational>(&[2, 2], 3).unwrap();
        assert_eq!(r.k, 3);
        assert_eq!(r.k_tilde, 202_752);
        assert_eq!(r.groups[4].job.weight, q(1, 1024));
        assert_eq!(r.delta, q(192, 1) + q(1, 1056));
        assert_eq!(r.job_count(), 2 * 3 + 3 + 202_752);
        assert!(matches!(r.expand(100), Err(Error::TooLarge { .. })));
        assert!(matches!(subsetsum_to_feidwu::<Rational>(&[2, 2], 2), Err(Error::PreconditionViolated(_))));
        assert!(matches!(subsetsum_to_feidwu::<Rational>(&[5, 2], 6), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn bidua_small_example() {
        let r = subsetsum_to_bidua::<Rational>(&[2, 2], 3).unwrap();
        assert_eq!(r.delta, q(1, 8));
        assert_eq!(r.instance.variant().budget(), Some(&q(9, 1)));
        let vols: Vec<Rational> = r.instance.jobs().iter().map(|j| j.volume.clone()).collect();
        assert_eq!(vols, vec![q(2, 1), q(1, 2), q(2, 1), q(1, 2)]);
        assert_eq!(r.priority.perm(), &[1, 0, 3, 2]);
        assert_eq!(r.base_flow, q(5, 1));
        assert!(matches!(subsetsum_to_bidua::<Rational>(&[2], 3), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn subset_sum_search() {
        assert!(subset_sum_exists(&[3, 2, 2], 4));
        assert!(!subset_sum_exists(&[4, 3], 5));
        assert!(subset_sum_exists(&[4, 3, 2], 7));
    }

    #[test]
    fn counterexample_profiles() {
        let i = counterexample_instance(&q(0, 1)).unwrap();
        assert_eq!(i.profile().delta_table(), &[q(1, 1), q(3, 1)]);
        assert_eq!(counterexample_instance(&q(1, 1)).unwrap_err(), Error::AlphaOutOfRange);
        assert_eq!(counterexample_instance(&q(-1, 2)).unwrap_err(), Error::AlphaOutOfRange);
        // α = 1/2 is the crossover: both naive outcomes cost 6 + 1/2.
        let half = counterexample_instance(&q(1, 2)).unwrap();
        for f in [crate::greedy::naive_two_speed_sweep, crate::greedy::naive_per_level_sweep] {
            let (s, _) = f(&half).unwrap();
            assert_eq!(evaluate(&s, &half, None).unwrap().objective, q(13, 2));
        }
    }
}
