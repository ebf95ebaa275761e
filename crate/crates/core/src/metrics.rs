//! Schedules and everything measured on them: completion times, flow,
//! energy, affection, shrinking/expanding energies and optimality witnesses.

use crate::dispatch::dispatch_ordering;
use crate::error::{Error, Result};
use crate::problem::{release_order, Instance, JobOrder, SpeedProfile, Variant};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Content {
    Idle,
    Run { job: usize, level: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment<T> {
    pub start: T,
    pub end: T,
    pub content: Content,
}

/// A piecewise-constant timeline. Well-formedness is checked by [`evaluate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schedule<T> {
    pub segments: Vec<Segment<T>>,
}

impl<T> Default for Schedule<T> {
    fn default() -> Self {
        Schedule { segments: Vec::new() }
    }
}

impl<T: Scalar> Schedule<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Self {
        Schedule { segments }
    }

    /// Appends `[start, end)`, skipping empty intervals and merging with a
    /// contiguous predecessor of the same content.
    pub fn push(&mut self, start: T, end: T, content: Content) {
        if start >= end {
            return;
        }
        if let Some(last) = self.segments.last_mut() {
            if last.content == content && last.end == start {
                last.end = end;
                return;
            }
        }
        self.segments.push(Segment { start, end, content });
    }

    /// End of the last non-idle segment, or zero.
    pub fn makespan(&self) -> T {
        self.segments
            .iter()
            .rev()
            .find(|s| s.content != Content::Idle)
            .map(|s| s.end.clone())
            .unwrap_or_else(T::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleMetrics<T> {
    pub completion: Vec<T>,
    /// Total processing time `x_j`.
    pub processing: Vec<T>,
    /// Average speed `v_j / x_j`.
    pub speed: Vec<T>,
    /// `level_time[j][i]`: time job `j` runs at level `i`.
    pub level_time: Vec<Vec<T>>,
    pub job_energy: Vec<T>,
    pub flow: T,
    pub energy: T,
    /// `flow + energy` for FE instances, `flow` for budget instances.
    pub objective: T,
    pub within_budget: bool,
    /// Running maximum of completions along the supplied ordering, by job.
    pub extended: Option<Vec<T>>,
    /// The objective with `C` replaced by the extended completions.
    pub extended_objective: Option<T>,
}

fn infeasible<T>(msg: String) -> Result<T> {
    Err(Error::InfeasibleSchedule(msg))
}

/// Checks feasibility and computes all metrics exactly.
pub fn evaluate<T: Scalar>(
    schedule: &Schedule<T>,
    instance: &Instance<T>,
    order: Option<&JobOrder>,
) -> Result<ScheduleMetrics<T>> {
    let n = instance.n();
    let prof = instance.profile();
    let k = prof.k();
    let mut level_time = vec![vec![T::zero(); k]; n];
    let mut done = vec![T::zero(); n];
    let mut completion: Vec<Option<T>> = vec![None; n];
    let mut energy = T::zero();
    let mut job_energy = vec![T::zero(); n];
    let mut prev_end: Option<&T> = None;
    for (idx, seg) in schedule.segments.iter().enumerate() {
        if seg.start >= seg.end {
            return infeasible(format!("segment {idx} is empty or reversed"));
        }
        if seg.start.is_negative() {
            return infeasible(format!("segment {idx} starts before time zero"));
        }
        if let Some(p) = prev_end {
            if seg.start < *p {
                return infeasible(format!("segment {idx} overlaps its predecessor"));
            }
        }
        prev_end = Some(&seg.end);
        if let Content::Run { job, level } = seg.content {
            if job >= n {
                return infeasible(format!("segment {idx} names unknown job {job}"));
            }
            if level >= k {
                return infeasible(format!("segment {idx} uses unknown level {level}"));
            }
            if seg.start < instance.job(job).release {
                return infeasible(format!("job {job} runs before its release"));
            }
            let dur = seg.end.clone() - seg.start.clone();
            done[job] += dur.clone() * prof.speed(level).clone();
            let e = dur.clone() * prof.power(level).clone();
            energy += e.clone();
            job_energy[job] += e;
            level_time[job][level] += dur;
            completion[job] = Some(seg.end.clone());
        }
    }
    let mut c = Vec::with_capacity(n);
    for j in 0..n {
        if done[j] != instance.job(j).volume {
            return infeasible(format!(
                "job {j} receives volume {} instead of {}",
                done[j],
                instance.job(j).volume
            ));
        }
        c.push(completion[j].clone().expect("positive volume implies a segment"));
    }
    let processing: Vec<T> = level_time.iter().map(|l| l.iter().cloned().sum()).collect();
    let speed = (0..n).map(|j| instance.job(j).volume.clone() / processing[j].clone()).collect();
    let flow: T = (0..n)
        .map(|j| instance.job(j).weight.clone() * (c[j].clone() - instance.job(j).release.clone()))
        .sum();
    let (objective, within_budget) = match instance.variant() {
        Variant::FlowEnergy => (flow.clone() + energy.clone(), true),
        Variant::Budget(b) => (flow.clone(), energy <= *b),
    };
    let (extended, extended_objective) = match order {
        Some(o) => {
            o.check_len(n)?;
            let ch = extended_completions(&c, o);
            let ef: T = (0..n)
                .map(|j| instance.job(j).weight.clone() * (ch[j].clone() - instance.job(j).release.clone()))
                .sum();
            let eo = match instance.variant() {
                Variant::FlowEnergy => ef + energy.clone(),
                Variant::Budget(_) => ef,
            };
            (Some(ch), Some(eo))
        }
        None => (None, None),
    };
    Ok(ScheduleMetrics {
        completion: c,
        processing,
        speed,
        level_time,
        job_energy,
        flow,
        energy,
        objective,
        within_budget,
        extended,
        extended_objective,
    })
}

/// `Ĉ` indexed by job: the running maximum of `C` along the ordering.
pub fn extended_completions<T: Scalar>(completion: &[T], order: &JobOrder) -> Vec<T> {
    let mut out = completion.to_vec();
    let mut run: Option<T> = None;
    for &j in order.perm() {
        let v = match run {
            Some(r) if r > completion[j] => r,
            _ => completion[j].clone(),
        };
        out[j] = v.clone();
        run = Some(v);
    }
    out
}

/// Affection sets and their weights. `sets[j]` is sorted and contains `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affection<T> {
    pub sets: Vec<Vec<usize>>,
    pub kappa: Vec<T>,
}

impl<T> Affection<T> {
    pub fn contains(&self, j: usize, other: usize) -> bool {
        self.sets[j].binary_search(&other).is_ok()
    }
}

/// Transitive closure of direct affection. With `lower` set, `C_j = r_j'`
/// also counts.
pub fn affection_from<T: Scalar>(completion: &[T], release: &[T], weight: &[T], lower: bool) -> Affection<T> {
    let n = completion.len();
    let direct = |a: usize, b: usize| {
        completion[a] <= completion[b]
            && if lower { completion[a] >= release[b] } else { completion[a] > release[b] }
    };
    let mut sets = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    for j in 0..n {
        let mut seen = vec![false; n];
        seen[j] = true;
        let mut stack = vec![j];
        while let Some(a) = stack.pop() {
            for (b, s) in seen.iter_mut().enumerate() {
                if !*s && direct(a, b) {
                    *s = true;
                    stack.push(b);
                }
            }
        }
        let set: Vec<usize> = (0..n).filter(|&b| seen[b]).collect();
        kappa.push(set.iter().map(|&b| weight[b].clone()).sum());
        sets.push(set);
    }
    Affection { sets, kappa }
}

fn releases<T: Scalar>(instance: &Instance<T>) -> Vec<T> {
    instance.jobs().iter().map(|j| j.release.clone()).collect()
}

fn weights<T: Scalar>(instance: &Instance<T>) -> Vec<T> {
    instance.jobs().iter().map(|j| j.weight.clone()).collect()
}

/// Plain and lower affection of every job in a feasible schedule.
pub fn affection<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Result<(Affection<T>, Affection<T>)> {
    let m = evaluate(schedule, instance, None)?;
    let (r, w) = (releases(instance), weights(instance));
    Ok((
        affection_from(&m.completion, &r, &w, false),
        affection_from(&m.completion, &r, &w, true),
    ))
}

/// Maximal runs of consecutive jobs (in release order) where each affects
/// the next. Defined only for non-preemptive FIFO schedules of unit jobs.
pub fn affection_chains<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Result<Vec<Vec<usize>>> {
    if !instance.is_unit() {
        return Err(Error::NotUnitInstance);
    }
    let m = evaluate(schedule, instance, None)?;
    let fifo = release_order(instance);
    let mut blocks: Vec<(usize, &T, &T)> = Vec::new();
    for s in &schedule.segments {
        if let Content::Run { job, .. } = s.content {
            match blocks.last_mut() {
                Some((j, _, end)) if *j == job && **end == s.start => *end = &s.end,
                _ => blocks.push((job, &s.start, &s.end)),
            }
        }
    }
    if blocks.len() != instance.n() || blocks.iter().map(|b| b.0).ne(fifo.perm().iter().copied()) {
        return Err(Error::NotFifoSchedule);
    }
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut prev: Option<usize> = None;
    for &j in fifo.perm() {
        match prev {
            Some(p) if m.completion[p] > instance.job(j).release => {
                chains.last_mut().expect("started").push(j)
            }
            _ => chains.push(vec![j]),
        }
        prev = Some(j);
    }
    Ok(chains)
}

/// Level boundaries in processing time: `x^i = v / s_i`, decreasing in `i`.
fn level_times<T: Scalar>(v: &T, profile: &SpeedProfile<T>) -> Vec<T> {
    (0..profile.k()).map(|i| profile.time_at(v, i)).collect()
}

/// `(Δ_j, Δ⁺_j)` for a job of volume `v` processed for time `x`.
pub fn shrink_expand<T: Scalar>(v: &T, x: &T, profile: &SpeedProfile<T>) -> Option<(Extended<T>, Extended<T>)> {
    let xs = level_times(v, profile);
    let k = xs.len();
    if *x > xs[0] || *x < xs[k - 1] {
        return None;
    }
    // Largest level i with x^i >= x, i.e. s_i <= s_j.
    let lo = (0..k).rev().find(|&i| xs[i] >= *x).expect("x <= x^0");
    let shrink = profile.delta_at(lo + 1);
    let expand = if xs[lo] == *x { profile.delta_at(lo) } else { profile.delta_at(lo + 1) };
    Some((shrink, expand))
}

/// Shrinking and expanding energies of every job.
pub fn shrink_expand_energies<T: Scalar>(
    schedule: &Schedule<T>,
    instance: &Instance<T>,
) -> Result<Vec<(Extended<T>, Extended<T>)>> {
    let m = evaluate(schedule, instance, None)?;
    energies_for(instance, &m.processing)
}

pub(crate) fn energies_for<T: Scalar>(instance: &Instance<T>, x: &[T]) -> Result<Vec<(Extended<T>, Extended<T>)>> {
    (0..instance.n())
        .map(|j| shrink_expand(&instance.job(j).volume, &x[j], instance.profile()).ok_or(Error::SpeedOutOfRange(j)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    /// `κ_j > Δ_j`: shrinking the job improves the objective.
    Shrink(usize),
    /// `Δ⁺_j > κ⁺_j`: expanding the job improves the objective.
    Expand(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalityWitness<T> {
    pub affection: Affection<T>,
    pub lower_affection: Affection<T>,
    pub delta: Vec<Extended<T>>,
    pub delta_plus: Vec<Extended<T>>,
    pub violations: Vec<Violation>,
}

impl<T: Scalar> OptimalityWitness<T> {
    /// `κ_j - Δ_j`.
    pub fn shrink_margin(&self, j: usize) -> Extended<T> {
        self.delta[j].sub_from(&self.affection.kappa[j])
    }

    /// `κ⁺_j - Δ⁺_j`.
    pub fn expand_margin(&self, j: usize) -> Extended<T> {
        self.delta_plus[j].sub_from(&self.lower_affection.kappa[j])
    }
}

pub(crate) fn witness_from<T: Scalar>(instance: &Instance<T>, c: &[T], x: &[T]) -> Result<OptimalityWitness<T>> {
    let (r, w) = (releases(instance), weights(instance));
    let affection = affection_from(c, &r, &w, false);
    let lower_affection = affection_from(c, &r, &w, true);
    let (delta, delta_plus): (Vec<_>, Vec<_>) = energies_for(instance, x)?.into_iter().unzip();
    let mut violations = Vec::new();
    let zero = Extended::Finite(T::zero());
    for j in 0..instance.n() {
        if delta[j].sub_from(&affection.kappa[j]) > zero {
            violations.push(Violation::Shrink(j));
        }
        if delta_plus[j].sub_from(&lower_affection.kappa[j]) < zero {
            violations.push(Violation::Expand(j));
        }
    }
    Ok(OptimalityWitness { affection, lower_affection, delta, delta_plus, violations })
}

/// Necessary local optimality conditions. An empty violation list does not
/// prove optimality.
pub fn optimality_witness<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Result<OptimalityWitness<T>> {
    let m = evaluate(schedule, instance, None)?;
    witness_from(instance, &m.completion, &m.processing)
}

/// Largest amount the jobs in `moving` can all be shifted (earlier when
/// `expand` is false, later otherwise) before some completion meets a
/// release or another completion. `None` if nothing bounds the shift.
pub(crate) fn structure_gap<T: Scalar>(c: &[T], r: &[T], moving: &[bool], expand: bool) -> Option<T> {
    match structure_gaps(c, r, moving, expand) {
        (Some(a), Some(b)) => Some(if a < b { a } else { b }),
        (a, b) => a.or(b),
    }
}

/// The two parts of [`structure_gap`]: distance to the nearest release, and
/// to the nearest completion of a job that does not move. Reaching the
/// second exactly can make a preempted job's final piece vanish, which moves
/// its completion discontinuously.
pub(crate) fn structure_gaps<T: Scalar>(c: &[T], r: &[T], moving: &[bool], expand: bool) -> (Option<T>, Option<T>) {
    let consider = |best: &mut Option<T>, g: T| {
        if g.is_positive() && best.as_ref().is_none_or(|b| g < *b) {
            *best = Some(g);
        }
    };
    let (mut rel, mut comp) = (None, None);
    for a in (0..c.len()).filter(|&a| moving[a]) {
        for b in 0..c.len() {
            if expand {
                consider(&mut rel, r[b].clone() - c[a].clone());
                if !moving[b] {
                    consider(&mut comp, c[b].clone() - c[a].clone());
                }
            } else {
                consider(&mut rel, c[a].clone() - r[b].clone());
                if !moving[b] {
                    consider(&mut comp, c[a].clone() - c[b].clone());
                }
            }
        }
    }
    (rel, comp)
}

/// Largest level time strictly below `x` (the next faster level).
pub(crate) fn next_faster<T: Scalar>(v: &T, x: &T, profile: &SpeedProfile<T>) -> Option<T> {
    level_times(v, profile).into_iter().find(|t| t < x)
}

/// Smallest level time strictly above `x` (the next slower level).
pub(crate) fn next_slower<T: Scalar>(v: &T, x: &T, profile: &SpeedProfile<T>) -> Option<T> {
    level_times(v, profile).into_iter().rev().find(|t| t > x)
}

/// First-order change `(ΔF, ΔE)` from changing `x_j` by `eps` in the schedule
/// dispatched from `x` under `order`. Negative `eps` shrinks.
///
/// Rejects any `eps` that would move `x_j` across a speed level or change the
/// affection structure strictly inside the step; landing exactly on such a
/// boundary is allowed.
pub fn perturb_processing_time<T: Scalar>(
    instance: &Instance<T>,
    order: &JobOrder,
    x: &[T],
    j: usize,
    eps: &T,
) -> Result<(T, T)> {
    let sched = dispatch_ordering(instance, order, x)?;
    let m = evaluate(&sched, instance, None)?;
    let w = witness_from(instance, &m.completion, &m.processing)?;
    if eps.is_zero() {
        return Ok((T::zero(), T::zero()));
    }
    let v = &instance.job(j).volume;
    let prof = instance.profile();
    let r = releases(instance);
    let shrink = eps.is_negative();
    let e = eps.abs();
    let (set, delta) = if shrink {
        (&w.affection.sets[j], &w.delta[j])
    } else {
        (&w.lower_affection.sets[j], &w.delta_plus[j])
    };
    let delta = match delta {
        Extended::Finite(d) => d.clone(),
        _ => {
            return Err(Error::EpsilonTooLarge(format!(
                "job {j} is already at the {} speed",
                if shrink { "highest" } else { "lowest" }
            )))
        }
    };
    let bound = if shrink {
        next_faster(v, &x[j], prof).map(|t| x[j].clone() - t)
    } else {
        next_slower(v, &x[j], prof).map(|t| t - x[j].clone())
    }
    .expect("finite energy implies a neighbouring level");
    if e > bound {
        return Err(Error::EpsilonTooLarge(format!("job {j} would cross a speed level")));
    }
    let mut moving = vec![false; instance.n()];
    for &a in set {
        moving[a] = true;
    }
    let (rel, comp) = structure_gaps(&m.completion, &r, &moving, !shrink);
    if rel.is_some_and(|g| e > g) || comp.is_some_and(|g| e >= g) {
        return Err(Error::EpsilonTooLarge(format!("job {j} would change the affection structure")));
    }
    let kappa = if shrink { &w.affection.kappa[j] } else { &w.lower_affection.kappa[j] };
    if shrink {
        Ok((-(e.clone() * kappa.clone()), e * delta))
    } else {
        Ok((e.clone() * kappa.clone(), -(e * delta)))
    }
}
