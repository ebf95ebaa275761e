//! Jobs, speed profiles, instances and job orderings.
//!
//! Speed levels are 0-based throughout: level `0` is the slowest allowed
//! speed. The idle speed is implicit and never stored.

use crate::error::{Error, ProfileViolation, Result};
use crate::scalar::{Extended, Scalar};

/// Allowed speeds with their powers and the derived table of breakpoints
/// `delta[i] = (P[i+1] s[i] - P[i] s[i+1]) / (s[i+1] - s[i])`, the energy
/// spent per unit of processing time saved when moving from level `i` to `i+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpeedProfile<T> {
    speeds: Vec<T>,
    powers: Vec<T>,
    deltas: Vec<T>,
}

/// Checks a speed/power table and returns its breakpoint table.
///
/// Every violation is reported, not just the first.
pub fn validate_profile<T: Scalar>(speeds: &[T], powers: &[T]) -> Result<Vec<T>> {
    if speeds.is_empty() && powers.is_empty() {
        return Err(Error::EmptyProfile);
    }
    if speeds.len() != powers.len() {
        return Err(Error::ProfileLengthMismatch { speeds: speeds.len(), powers: powers.len() });
    }
    let k = speeds.len();
    let mut bad = Vec::new();
    for i in 0..k {
        if !speeds[i].is_positive() || !powers[i].is_positive() {
            bad.push(ProfileViolation::NonPositive(i));
        }
        if i > 0 && speeds[i] <= speeds[i - 1] {
            bad.push(ProfileViolation::NonMonotoneSpeeds(i));
        }
        if i > 0 && powers[i] <= powers[i - 1] {
            bad.push(ProfileViolation::NonMonotonePowers(i));
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidProfile(bad));
    }
    let deltas: Vec<T> = (0..k - 1)
        .map(|i| {
            (powers[i + 1].clone() * speeds[i].clone() - powers[i].clone() * speeds[i + 1].clone())
                / (speeds[i + 1].clone() - speeds[i].clone())
        })
        .collect();
    for i in 1..deltas.len() {
        if deltas[i] <= deltas[i - 1] {
            bad.push(ProfileViolation::SuperfluousSpeed(i));
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidProfile(bad));
    }
    Ok(deltas)
}

impl<T: Scalar> SpeedProfile<T> {
    pub fn new(speeds: Vec<T>, powers: Vec<T>) -> Result<Self> {
        let deltas = validate_profile(&speeds, &powers)?;
        Ok(SpeedProfile { speeds, powers, deltas })
    }

    /// Number of allowed (non-idle) speeds.
    pub fn k(&self) -> usize {
        self.speeds.len()
    }

    pub fn speeds(&self) -> &[T] {
        &self.speeds
    }

    pub fn powers(&self) -> &[T] {
        &self.powers
    }

    pub fn speed(&self, level: usize) -> &T {
        &self.speeds[level]
    }

    pub fn power(&self, level: usize) -> &T {
        &self.powers[level]
    }

    /// The `k - 1` finite breakpoints, strictly increasing.
    pub fn delta_table(&self) -> &[T] {
        &self.deltas
    }

    /// Breakpoint between level `b - 1` and `b`, for `b` in `0..=k`;
    /// `b = 0` is `-inf` and `b = k` is `+inf`.
    pub fn delta_at(&self, b: usize) -> Extended<T> {
        if b == 0 {
            Extended::NegInf
        } else if b >= self.k() {
            Extended::PosInf
        } else {
            Extended::Finite(self.deltas[b - 1].clone())
        }
    }

    /// Processing time of volume `v` at a single level.
    pub fn time_at(&self, v: &T, level: usize) -> T {
        v.clone() / self.speeds[level].clone()
    }

    /// Energy of volume `v` at a single level.
    pub fn energy_at(&self, v: &T, level: usize) -> T {
        v.clone() * self.powers[level].clone() / self.speeds[level].clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Job<T> {
    pub release: T,
    pub volume: T,
    pub weight: T,
}

impl<T: Scalar> Job<T> {
    pub fn new(release: T, volume: T, weight: T) -> Self {
        Job { release, volume, weight }
    }

    /// Unit volume, unit weight.
    pub fn unit(release: T) -> Self {
        Job { release, volume: T::one(), weight: T::one() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Variant<T> {
    /// Minimise weighted flow plus energy.
    FlowEnergy,
    /// Minimise weighted flow subject to total energy at most the budget.
    Budget(T),
}

impl<T> Variant<T> {
    pub fn budget(&self) -> Option<&T> {
        match self {
            Variant::Budget(b) => Some(b),
            Variant::FlowEnergy => None,
        }
    }
}

/// A validated instance: positive volumes and weights, earliest release 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance<T> {
    jobs: Vec<Job<T>>,
    profile: SpeedProfile<T>,
    variant: Variant<T>,
}

/// A validated instance together with the release shift that was applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized<T> {
    pub instance: Instance<T>,
    /// Amount added to every release (zero or negative).
    pub shift: T,
}

/// Validates jobs against the profile and shifts releases so the earliest is 0.
pub fn validate_instance<T: Scalar>(
    jobs: Vec<Job<T>>,
    profile: SpeedProfile<T>,
    variant: Variant<T>,
) -> Result<Normalized<T>> {
    if jobs.is_empty() {
        return Err(Error::NoJobs);
    }
    for (j, job) in jobs.iter().enumerate() {
        if !job.volume.is_positive() {
            return Err(Error::NonPositiveVolume(j));
        }
        if !job.weight.is_positive() {
            return Err(Error::NonPositiveWeight(j));
        }
    }
    if let Variant::Budget(b) = &variant {
        if !b.is_positive() {
            return Err(Error::NonPositiveBudget);
        }
    }
    let min = jobs.iter().map(|j| j.release.clone()).min().expect("nonempty");
    let shift = -min;
    let jobs = jobs
        .into_iter()
        .map(|j| Job { release: j.release + shift.clone(), ..j })
        .collect();
    Ok(Normalized { instance: Instance { jobs, profile, variant }, shift })
}

impl<T: Scalar> Instance<T> {
    /// Validates and normalizes, discarding the shift.
    pub fn new(jobs: Vec<Job<T>>, profile: SpeedProfile<T>, variant: Variant<T>) -> Result<Self> {
        validate_instance(jobs, profile, variant).map(|n| n.instance)
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job<T>] {
        &self.jobs
    }

    pub fn job(&self, j: usize) -> &Job<T> {
        &self.jobs[j]
    }

    pub fn profile(&self) -> &SpeedProfile<T> {
        &self.profile
    }

    pub fn variant(&self) -> &Variant<T> {
        &self.variant
    }

    pub fn is_unit_size(&self) -> bool {
        self.jobs.iter().all(|j| j.volume.is_one())
    }

    pub fn is_weighted(&self) -> bool {
        !self.jobs.iter().all(|j| j.weight.is_one())
    }

    pub fn is_unit(&self) -> bool {
        self.is_unit_size() && !self.is_weighted()
    }

    pub fn total_volume(&self) -> T {
        self.jobs.iter().map(|j| j.volume.clone()).sum()
    }

    /// `x_j^i`: processing time of job `j` run entirely at `level`.
    pub fn x(&self, j: usize, level: usize) -> T {
        self.profile.time_at(&self.jobs[j].volume, level)
    }

    /// `E_j^i`: energy of job `j` run entirely at `level`.
    pub fn e(&self, j: usize, level: usize) -> T {
        self.profile.energy_at(&self.jobs[j].volume, level)
    }

    /// Same jobs and profile under another variant.
    pub fn with_variant(&self, variant: Variant<T>) -> Result<Self> {
        Instance::new(self.jobs.clone(), self.profile.clone(), variant)
    }

    /// Same jobs under another profile.
    pub fn with_profile(&self, profile: SpeedProfile<T>) -> Self {
        Instance { jobs: self.jobs.clone(), profile, variant: self.variant.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    /// Extended completion times must be nondecreasing along the order.
    Completion,
    /// At every instant the earliest released unfinished job in the order runs.
    Priority,
}

/// A permutation of job indices; `perm[p]` is the job at position `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JobOrder {
    kind_is_priority: bool,
    perm: Vec<usize>,
}

impl JobOrder {
    pub fn new(kind: OrderKind, perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || seen[j] {
                return Err(Error::InvalidOrdering(n));
            }
            seen[j] = true;
        }
        Ok(JobOrder { kind_is_priority: kind == OrderKind::Priority, perm })
    }

    pub fn completion(perm: Vec<usize>) -> Result<Self> {
        Self::new(OrderKind::Completion, perm)
    }

    pub fn identity(n: usize) -> Self {
        JobOrder { kind_is_priority: false, perm: (0..n).collect() }
    }

    pub fn kind(&self) -> OrderKind {
        if self.kind_is_priority {
            OrderKind::Priority
        } else {
            OrderKind::Completion
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// `pos[j]` is the position of job `j`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (p, &j) in self.perm.iter().enumerate() {
            pos[j] = p;
        }
        pos
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.perm.len() != n {
            return Err(Error::OrderingSizeMismatch { expected: n, got: self.perm.len() });
        }
        Ok(())
    }
}

/// Jobs sorted by release, ties by index.
pub fn release_order<T: Scalar>(instance: &Instance<T>) -> JobOrder {
    let mut perm: Vec<usize> = (0..instance.n()).collect();
    perm.sort_by(|&a, &b| instance.job(a).release.cmp(&instance.job(b).release).then(a.cmp(&b)));
    JobOrder { kind_is_priority: false, perm }
}
