use thiserror::Error;

/// Defect in a speed profile. Level indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileViolation {
    NonPositive(usize),
    NonMonotoneSpeeds(usize),
    NonMonotonePowers(usize),
    /// Level `i` lies on or above the chord of its neighbours.
    SuperfluousSpeed(usize),
}

impl std::fmt::Display for ProfileViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileViolation::NonPositive(i) => write!(f, "level {i} has a non-positive speed or power"),
            ProfileViolation::NonMonotoneSpeeds(i) => write!(f, "speeds not increasing at level {i}"),
            ProfileViolation::NonMonotonePowers(i) => write!(f, "powers not increasing at level {i}"),
            ProfileViolation::SuperfluousSpeed(i) => write!(f, "level {i} is superfluous"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("speed profile is empty")]
    EmptyProfile,
    #[error("{speeds} speeds but {powers} powers")]
    ProfileLengthMismatch { speeds: usize, powers: usize },
    #[error("invalid speed profile: {}", join(.0))]
    InvalidProfile(Vec<ProfileViolation>),
    #[error("instance has no jobs")]
    NoJobs,
    #[error("job {0} has non-positive volume")]
    NonPositiveVolume(usize),
    #[error("job {0} has non-positive weight")]
    NonPositiveWeight(usize),
    #[error("job {0} has negative release")]
    NegativeRelease(usize),
    #[error("budget must be positive")]
    NonPositiveBudget,
    #[error("ordering is not a permutation of {0} jobs")]
    InvalidOrdering(usize),
    #[error("ordering has {got} entries for {expected} jobs")]
    OrderingSizeMismatch { expected: usize, got: usize },
    #[error("infeasible schedule: {0}")]
    InfeasibleSchedule(String),
    #[error("job {0} runs outside the speed range")]
    SpeedOutOfRange(usize),
    #[error("processing time target outside the feasible range")]
    TargetOutOfRange,
    #[error("epsilon too large: {0}")]
    EpsilonTooLarge(String),
    #[error("instance is not unit-size and unit-weight")]
    NotUnitInstance,
    #[error("schedule is not a non-preemptive FIFO schedule")]
    NotFifoSchedule,
    #[error("operation needs an FE instance")]
    NotFlowEnergy,
    #[error("operation needs a budget instance")]
    NotBudget,
    #[error("budget too small for every completion ordering")]
    Infeasible,
    #[error("reconstructed schedule disagrees with LP solution: {0}")]
    ReconstructionMismatch(String),
    #[error("{n} jobs exceed the oracle limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("audit failed: {0}")]
    AuditFailed(String),
    #[error("budget outside the open interval where the reduction applies")]
    BudgetOutOfRange,
    #[error("operation needs exactly two speeds")]
    NotTwoSpeeds,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("alpha must lie in [0, 1)")]
    AlphaOutOfRange,
    #[error("simplex exceeded its iteration limit")]
    IterationLimit,
}

fn join(v: &[ProfileViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
