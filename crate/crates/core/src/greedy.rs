//! Greedy speed-up algorithms for unit jobs under a FIFO completion order,
//! the two naive multi-speed sweeps they are compared against, and an
//! auditor for the `(κ-Δ)` rule on construction traces.
//!
//! Every algorithm here starts with all jobs at the slowest level and only
//! ever shortens processing times. Each trace step shortens one job up to the
//! next critical point: a speed level boundary, or a change in the set of
//! jobs its completion delays.

use std::fmt::{self, Write as _};

use crate::dispatch::dispatch_ordering;
use crate::error::{Error, Result};
use crate::lp::{build_fe_lp, solve};
use crate::metrics::{
    affection_from, evaluate, extended_completions, next_faster, shrink_expand, structure_gap, Schedule,
};
use crate::problem::{release_order, Instance, JobOrder, Variant};
use crate::scalar::{Extended, Scalar};

/// FIFO completion ordering: by release, ties by index.
pub fn fifo_ordering<T: Scalar>(instance: &Instance<T>) -> Result<JobOrder> {
    if !instance.is_unit() {
        return Err(Error::NotUnitInstance);
    }
    Ok(release_order(instance))
}

/// When the main loop may still speed a job up.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Guard {
    /// `κ_j >= Δ_j`: also moves through objective-neutral stretches.
    #[default]
    NonStrict,
    /// `κ_j > Δ_j`: leaves every job where expanding it would cost something.
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepEnd {
    SpeedLevelHit,
    AffectionBreak,
    /// Neither rate changed; the job was no longer selected.
    Balanced,
}

impl fmt::Display for StepEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepEnd::SpeedLevelHit => "SpeedLevelHit",
            StepEnd::AffectionBreak => "AffectionBreak",
            StepEnd::Balanced => "Balanced",
        })
    }
}

/// One speed-up: `job` goes from `x_before` to `x_after`, with `kappa` and
/// `delta` its rates at the start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep<T> {
    pub job: usize,
    pub x_before: T,
    pub x_after: T,
    pub kappa: T,
    pub delta: T,
    pub end: StepEnd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionTrace<T> {
    pub order: JobOrder,
    /// Rates were computed with extended affection.
    pub extended: bool,
    pub steps: Vec<TraceStep<T>>,
}

impl<T: Scalar> ConstructionTrace<T> {
    /// Processing times before every step, then the final ones.
    pub fn states(&self, instance: &Instance<T>) -> Vec<Vec<T>> {
        let mut x = initial_x(instance);
        let mut out = vec![x.clone()];
        for s in &self.steps {
            x[s.job] = s.x_after.clone();
            out.push(x.clone());
        }
        out
    }

    pub fn final_x(&self, instance: &Instance<T>) -> Vec<T> {
        self.states(instance).pop().expect("initial state")
    }

    /// One line per step: job, processing-time interval, rates, end reason.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let _ = writeln!(
                out,
                "job={} x=[{} -> {}] kappa={} delta={} end={}",
                s.job, s.x_before, s.x_after, s.kappa, s.delta, s.end
            );
        }
        out
    }
}

/// `K̂` per job for a fixed completion ordering, with `κ̂` and the `Ĉ` used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedAffectionReport<T> {
    pub sets: Vec<Vec<usize>>,
    pub kappa: Vec<T>,
    pub c_hat: Vec<T>,
}

fn extended_affection_from<T: Scalar>(
    c: &[T],
    c_hat: &[T],
    r: &[T],
    w: &[T],
    order: &JobOrder,
) -> ExtendedAffectionReport<T> {
    let perm = order.perm();
    let n = perm.len();
    // rises[p]: Ĉ strictly above its predecessor's (always true at p = 0).
    let rises: Vec<bool> = (0..n).map(|p| p == 0 || c_hat[perm[p]] > c_hat[perm[p - 1]]).collect();
    let direct = |p: usize, q: usize| {
        let (a, b) = (perm[p], perm[q]);
        (c[a] > r[b] && rises[q]) || (rises[p] && c_hat[a] == c_hat[b])
    };
    let mut sets = Vec::with_capacity(n);
    let mut kappa = vec![T::zero(); n];
    let mut by_job = vec![Vec::new(); n];
    for p in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![p];
        while let Some(a) = stack.pop() {
            for (q, s) in seen.iter_mut().enumerate().skip(a) {
                if !*s && direct(a, q) {
                    *s = true;
                    stack.push(q);
                }
            }
        }
        let mut set: Vec<usize> = (0..n).filter(|&q| seen[q]).map(|q| perm[q]).collect();
        set.sort_unstable();
        kappa[perm[p]] = set.iter().map(|&b| w[b].clone()).sum();
        by_job[perm[p]] = set;
    }
    sets.extend(by_job);
    ExtendedAffectionReport { sets, kappa, c_hat: c_hat.to_vec() }
}

/// Extended affection of a feasible schedule under a completion ordering.
pub fn extended_affection<T: Scalar>(
    schedule: &Schedule<T>,
    instance: &Instance<T>,
    order: &JobOrder,
) -> Result<ExtendedAffectionReport<T>> {
    let m = evaluate(schedule, instance, None)?;
    let c_hat = extended_completions(&m.completion, order);
    let (r, w) = (releases(instance), weights(instance));
    Ok(extended_affection_from(&m.completion, &c_hat, &r, &w, order))
}

fn releases<T: Scalar>(instance: &Instance<T>) -> Vec<T> {
    instance.jobs().iter().map(|j| j.release.clone()).collect()
}

fn weights<T: Scalar>(instance: &Instance<T>) -> Vec<T> {
    instance.jobs().iter().map(|j| j.weight.clone()).collect()
}

fn initial_x<T: Scalar>(instance: &Instance<T>) -> Vec<T> {
    (0..instance.n()).map(|j| instance.x(j, 0)).collect()
}

/// Completion times of the non-idling list schedule for `order` with
/// processing times `x`. Speed levels do not matter for this.
fn completions<T: Scalar>(instance: &Instance<T>, pos: &[usize], x: &[T]) -> Vec<T> {
    let n = x.len();
    let mut rem = x.to_vec();
    let mut c = vec![T::zero(); n];
    let mut done = vec![false; n];
    let mut left = n;
    let mut t = T::zero();
    while left > 0 {
        let mut best: Option<usize> = None;
        let mut next: Option<&T> = None;
        for j in (0..n).filter(|&j| !done[j]) {
            let r = &instance.job(j).release;
            if *r <= t {
                if best.is_none_or(|b| pos[j] < pos[b]) {
                    best = Some(j);
                }
            } else if next.is_none_or(|nr| r < nr) {
                next = Some(r);
            }
        }
        let Some(j) = best else {
            t = next.expect("unfinished jobs remain").clone();
            continue;
        };
        let mut d = rem[j].clone();
        if let Some(nr) = next {
            let avail = nr.clone() - t.clone();
            if avail < d {
                d = avail;
            }
        }
        t += d.clone();
        rem[j] -= d;
        if rem[j].is_zero() {
            c[j] = t.clone();
            done[j] = true;
            left -= 1;
        }
    }
    c
}

/// Rates at one point of a construction.
struct State<T> {
    c: Vec<T>,
    kappa: Vec<T>,
    /// Plain affection sets: the jobs whose completions move with `x_j`.
    moving: Vec<Vec<usize>>,
    delta: Vec<Extended<T>>,
}

impl<T: Scalar> State<T> {
    fn margin(&self, j: usize) -> Extended<T> {
        self.delta[j].sub_from(&self.kappa[j])
    }
}

struct Engine<'a, T> {
    instance: &'a Instance<T>,
    order: JobOrder,
    pos: Vec<usize>,
    r: Vec<T>,
    w: Vec<T>,
    extended: bool,
    x: Vec<T>,
    steps: Vec<TraceStep<T>>,
}

impl<'a, T: Scalar> Engine<'a, T> {
    fn new(instance: &'a Instance<T>, order: JobOrder, extended: bool) -> Self {
        Engine {
            pos: order.positions(),
            order,
            r: releases(instance),
            w: weights(instance),
            instance,
            extended,
            x: initial_x(instance),
            steps: Vec::new(),
        }
    }

    fn state_at(&self, x: &[T]) -> State<T> {
        let c = completions(self.instance, &self.pos, x);
        let plain = affection_from(&c, &self.r, &self.w, false);
        let kappa = if self.extended {
            let c_hat = extended_completions(&c, &self.order);
            extended_affection_from(&c, &c_hat, &self.r, &self.w, &self.order).kappa
        } else {
            plain.kappa
        };
        let prof = self.instance.profile();
        let delta = (0..x.len())
            .map(|j| shrink_expand(&self.instance.job(j).volume, &x[j], prof).expect("x within level range").0)
            .collect();
        State { c, kappa, moving: plain.sets, delta }
    }

    fn state(&self) -> State<T> {
        self.state_at(&self.x)
    }

    /// Distance from `x_j` to the next critical point.
    fn critical_step(&self, st: &State<T>, j: usize) -> T {
        let v = &self.instance.job(j).volume;
        let level = next_faster(v, &self.x[j], self.instance.profile())
            .map(|t| self.x[j].clone() - t)
            .expect("finite shrinking energy implies a faster level");
        let mut moving = vec![false; self.x.len()];
        for &a in &st.moving[j] {
            moving[a] = true;
        }
        match structure_gap(&st.c, &self.r, &moving, false) {
            Some(g) if g < level => g,
            _ => level,
        }
    }

    fn check_budget(&self) -> Result<()> {
        let (n, k) = (self.instance.n(), self.instance.profile().k());
        // Generous: a correct run needs at most n(n + k) steps on unit FIFO input.
        if self.steps.len() > 4 * n * (n + k) + 64 {
            return Err(Error::IterationLimit);
        }
        Ok(())
    }

    /// Shortens `j` to its next critical point and records the step.
    fn advance(&mut self, st: &State<T>, j: usize) -> State<T> {
        let eps = self.critical_step(st, j);
        let before = self.x[j].clone();
        self.x[j] -= eps;
        let next = self.state();
        self.steps.push(TraceStep {
            job: j,
            x_before: before,
            x_after: self.x[j].clone(),
            kappa: st.kappa[j].clone(),
            delta: st.delta[j].finite().expect("finite").clone(),
            end: end_reason(st, &next, j),
        });
        next
    }

    fn pick(&self, st: &State<T>, guard: Guard) -> Option<usize> {
        let zero = Extended::Finite(T::zero());
        let mut best: Option<(usize, Extended<T>)> = None;
        for j in 0..self.x.len() {
            let m = st.margin(j);
            let ok = match guard {
                Guard::NonStrict => m >= zero,
                Guard::Strict => m > zero,
            };
            if ok && best.as_ref().is_none_or(|(_, b)| m > *b) {
                best = Some((j, m));
            }
        }
        best.map(|(j, _)| j)
    }

    fn run_kd(&mut self, guard: Guard) -> Result<()> {
        let mut st = self.state();
        while let Some(j) = self.pick(&st, guard) {
            let start = self.x[j].clone();
            let (k0, d0) = (st.kappa[j].clone(), st.delta[j].clone());
            // Sub-steps that leave j's rates and selection unchanged are merged.
            loop {
                let eps = self.critical_step(&st, j);
                self.x[j] -= eps;
                st = self.state();
                if st.kappa[j] != k0 || st.delta[j] != d0 || self.pick(&st, guard) != Some(j) {
                    break;
                }
            }
            let end = if st.delta[j] != d0 {
                StepEnd::SpeedLevelHit
            } else if st.kappa[j] != k0 {
                StepEnd::AffectionBreak
            } else {
                StepEnd::Balanced
            };
            self.steps.push(TraceStep {
                job: j,
                x_before: start,
                x_after: self.x[j].clone(),
                kappa: k0,
                delta: d0.finite().expect("selected jobs have finite Δ").clone(),
                end,
            });
            self.check_budget()?;
        }
        Ok(())
    }

    fn finish(self) -> Result<(Schedule<T>, ConstructionTrace<T>)> {
        let schedule = dispatch_ordering(self.instance, &self.order, &self.x)?;
        Ok((schedule, ConstructionTrace { order: self.order, extended: self.extended, steps: self.steps }))
    }
}

fn end_reason<T: Scalar>(before: &State<T>, after: &State<T>, j: usize) -> StepEnd {
    if after.delta[j] != before.delta[j] {
        StepEnd::SpeedLevelHit
    } else if after.kappa[j] != before.kappa[j] {
        StepEnd::AffectionBreak
    } else {
        StepEnd::Balanced
    }
}

fn unit_fe<T: Scalar>(instance: &Instance<T>) -> Result<JobOrder> {
    let order = fifo_ordering(instance)?;
    if !matches!(instance.variant(), Variant::FlowEnergy) {
        return Err(Error::NotFlowEnergy);
    }
    Ok(order)
}

/// The `(κ-Δ)` algorithm: repeatedly speed up the job maximizing `κ_j - Δ_j`
/// (lowest index on ties) while some job has `κ_j >= Δ_j`.
pub fn kappa_delta<T: Scalar>(instance: &Instance<T>) -> Result<(Schedule<T>, ConstructionTrace<T>)> {
    kappa_delta_with(instance, Guard::default())
}

pub fn kappa_delta_with<T: Scalar>(
    instance: &Instance<T>,
    guard: Guard,
) -> Result<(Schedule<T>, ConstructionTrace<T>)> {
    let order = unit_fe(instance)?;
    let mut e = Engine::new(instance, order, false);
    e.run_kd(guard)?;
    e.finish()
}

/// Each job once, in FIFO order: speed it up while `κ_j >= Δ_j`, across
/// levels. Optimal for two speeds only.
pub fn naive_two_speed_sweep<T: Scalar>(instance: &Instance<T>) -> Result<(Schedule<T>, ConstructionTrace<T>)> {
    let order = unit_fe(instance)?;
    let mut e = Engine::new(instance, order.clone(), false);
    for &j in order.perm() {
        let mut st = e.state();
        while Extended::Finite(st.kappa[j].clone()) >= st.delta[j] {
            st = e.advance(&st, j);
            e.check_budget()?;
        }
    }
    e.finish()
}

/// For each level boundary `i`, then each job in FIFO order: speed it up
/// while `κ_j >= Δ_i` and `Δ_j <= Δ_i`. Optimal for two speeds only.
pub fn naive_per_level_sweep<T: Scalar>(instance: &Instance<T>) -> Result<(Schedule<T>, ConstructionTrace<T>)> {
    let order = unit_fe(instance)?;
    let mut e = Engine::new(instance, order.clone(), false);
    for di in instance.profile().delta_table().to_vec() {
        let cap = Extended::Finite(di.clone());
        for &j in order.perm() {
            let mut st = e.state();
            while st.kappa[j] >= di && st.delta[j] <= cap {
                st = e.advance(&st, j);
                e.check_budget()?;
            }
        }
    }
    e.finish()
}

/// The `(κ-Δ)` algorithm with extended affection `κ̂` under a given
/// completion ordering. Unproven beyond unit FIFO input; pair every result
/// with [`conjecture_check`].
pub fn kappa_delta_c<T: Scalar>(
    instance: &Instance<T>,
    order: &JobOrder,
) -> Result<(Schedule<T>, ConstructionTrace<T>)> {
    order.check_len(instance.n())?;
    if !matches!(instance.variant(), Variant::FlowEnergy) {
        return Err(Error::NotFlowEnergy);
    }
    let mut e = Engine::new(instance, order.clone(), true);
    e.run_kd(Guard::default())?;
    e.finish()
}

/// `kappa_delta_c` against the LP optimum for the same ordering, both in
/// extended flow plus energy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureCheck<T> {
    pub greedy: T,
    pub lp: T,
    pub agree: bool,
}

pub fn conjecture_check<T: Scalar>(instance: &Instance<T>, order: &JobOrder) -> Result<ConjectureCheck<T>> {
    let (schedule, _) = kappa_delta_c(instance, order)?;
    let greedy = evaluate(&schedule, instance, Some(order))?.extended_objective.expect("ordering supplied");
    let lp = solve(&build_fe_lp(instance, order)?)?.flow_form;
    Ok(ConjectureCheck { agree: greedy == lp, greedy, lp })
}

/// Which construction requirement a step breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraceCondition {
    /// The step must shorten exactly one job, staying within its level range.
    SingleJobSpeedUp,
    /// The job's `κ` and `Δ` at the start must equal `κ⁺` and `Δ⁺` at the end.
    ConstantRates,
    /// The job must maximize `κ - Δ` over all jobs at the start.
    KappaDeltaRule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceViolation {
    pub step: usize,
    pub condition: TraceCondition,
    pub detail: String,
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {:?}: {}", self.step, self.condition, self.detail)
    }
}

pub type ValidationResult = std::result::Result<(), TraceViolation>;

/// Replays `trace` from the all-slowest state and reports the first step that
/// breaks the `(κ-Δ)` rule or a construction condition. The rule implies the
/// weaker ordering condition of a construction, so that one is not checked
/// separately. Traces with extended rates skip [`TraceCondition::ConstantRates`],
/// which is defined for plain affection only.
pub fn validate_kd_rule<T: Scalar>(trace: &ConstructionTrace<T>, instance: &Instance<T>) -> ValidationResult {
    let n = instance.n();
    let k = instance.profile().k();
    let bad = |step: usize, condition: TraceCondition, detail: String| Err(TraceViolation { step, condition, detail });
    if trace.order.len() != n {
        return bad(0, TraceCondition::SingleJobSpeedUp, "ordering does not match the instance".into());
    }
    let mut e = Engine::new(instance, trace.order.clone(), trace.extended);
    for (s, step) in trace.steps.iter().enumerate() {
        let j = step.job;
        if j >= n {
            return bad(s, TraceCondition::SingleJobSpeedUp, format!("no job {j}"));
        }
        if step.x_before != e.x[j] || step.x_after >= step.x_before || step.x_after < instance.x(j, k - 1) {
            return bad(
                s,
                TraceCondition::SingleJobSpeedUp,
                format!("job {j} goes {} -> {} from current {}", step.x_before, step.x_after, e.x[j]),
            );
        }
        let st = e.state();
        let mine = st.margin(j);
        if let Some(other) = (0..n).find(|&b| st.margin(b) > mine) {
            return bad(
                s,
                TraceCondition::KappaDeltaRule,
                format!("job {j} has κ-Δ = {mine} but job {other} has {}", st.margin(other)),
            );
        }
        e.x[j] = step.x_after.clone();
        if !trace.extended {
            let c = completions(instance, &e.pos, &e.x);
            let lower = affection_from(&c, &e.r, &e.w, true);
            let plus = shrink_expand(&instance.job(j).volume, &e.x[j], instance.profile()).expect("checked range").1;
            if lower.kappa[j] != st.kappa[j] || plus != st.delta[j] {
                return bad(
                    s,
                    TraceCondition::ConstantRates,
                    format!(
                        "job {j}: (κ, Δ) = ({}, {}) at start but (κ⁺, Δ⁺) = ({}, {plus}) at end",
                        st.kappa[j], st.delta[j], lower.kappa[j]
                    ),
                );
            }
        }
    }
    Ok(())
}
