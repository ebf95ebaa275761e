//! Exact single-machine speed-scaling scheduling.
//!
//! Jobs with release times, volumes and weights run on one processor with a
//! finite set of speeds. The library computes optimal schedules for total
//! weighted flow plus energy, or flow under an energy budget, when the
//! completion ordering is fixed (via a linear program), solves the unit-job
//! case greedily, and finds exact optima of small instances by enumerating
//! orderings. All arithmetic is exact.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix the scalar to
//! [`Rational`].

pub mod dispatch;
pub mod error;
pub mod greedy;
pub mod lp;
pub mod metrics;
pub mod oracle;
pub mod problem;
pub mod rational;
pub mod reductions;
pub mod scalar;

pub use error::{Error, ProfileViolation, Result};
pub use greedy::{Guard, StepEnd};
pub use metrics::{Content, Violation};
pub use problem::{JobOrder, OrderKind};
pub use rational::Rational;
pub use scalar::{Extended, Scalar};

pub type SpeedProfile = problem::SpeedProfile<Rational>;
pub type Job = problem::Job<Rational>;
pub type Instance = problem::Instance<Rational>;
pub type Variant = problem::Variant<Rational>;
pub type Schedule = metrics::Schedule<Rational>;
pub type Segment = metrics::Segment<Rational>;
pub type ScheduleMetrics = metrics::ScheduleMetrics<Rational>;
pub type OptimalityWitness = metrics::OptimalityWitness<Rational>;
pub type Allocation = dispatch::Allocation<Rational>;
pub type LpModel = lp::LpModel<Rational>;
pub type LpSolution = lp::LpSolution<Rational>;
pub type ConstructionTrace = greedy::ConstructionTrace<Rational>;
pub type Optimum = oracle::Optimum<Rational>;
