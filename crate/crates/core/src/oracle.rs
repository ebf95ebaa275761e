//! Exact optimum for small instances: the best completion ordering, found by
//! solving the ordering LP for every ordering.

use crate::error::{Error, Result};
use crate::lp::{build_lp, reconstruct, solve, IncrementalLp, LpSolution};
use crate::metrics::{optimality_witness, Schedule, ScheduleMetrics};
use crate::problem::{Instance, JobOrder, Variant};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_N: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum<T> {
    pub schedule: Schedule<T>,
    /// Lexicographically smallest optimal completion ordering.
    pub order: JobOrder,
    /// Flow plus energy (FE) or flow (budget).
    pub objective: T,
    pub solution: LpSolution<T>,
    pub metrics: ScheduleMetrics<T>,
    /// Orderings whose LP was solved to completion.
    pub orderings_solved: usize,
}

struct Search<'a, T> {
    instance: &'a Instance<T>,
    /// `twin[j]`: the previous job with identical release, volume and weight.
    twin: Vec<Option<usize>>,
    prefix: Vec<usize>,
    used: Vec<bool>,
    best: Option<(T, Vec<usize>)>,
    leaves: usize,
}

impl<'a, T: Scalar> Search<'a, T> {
    fn dfs(&mut self, lp: &IncrementalLp<T>) -> Result<()> {
        let n = self.instance.n();
        if self.prefix.len() == n {
            let obj = lp.objective();
            self.leaves += 1;
            // Strict improvement keeps the lexicographically first optimum.
            if self.best.as_ref().is_none_or(|(b, _)| obj < *b) {
                self.best = Some((obj, self.prefix.clone()));
            }
            return Ok(());
        }
        for j in 0..n {
            if self.used[j] || self.twin[j].is_some_and(|t| !self.used[t]) {
                continue;
            }
            self.prefix.push(j);
            self.used[j] = true;
            let mut child = lp.clone();
            match child.push(self.instance, &self.prefix) {
                Ok(()) => self.dfs(&child)?,
                // Only the budget row can make a prefix infeasible; extensions stay so.
                Err(Error::Infeasible) => {}
                Err(e) => return Err(e),
            }
            self.used[j] = false;
            self.prefix.pop();
        }
        Ok(())
    }
}

/// Minimum over all completion orderings of the ordering LP, reconstructed
/// into a schedule. Orderings differing only among identical jobs are
/// explored once.
pub fn exact_optimum<T: Scalar>(instance: &Instance<T>, max_n: usize) -> Result<Optimum<T>> {
    let n = instance.n();
    if n > max_n {
        return Err(Error::TooLarge { n, max: max_n });
    }
    let twin = (0..n)
        .map(|j| (0..j).rev().find(|&a| instance.job(a) == instance.job(j)))
        .collect();
    let mut search = Search { instance, twin, prefix: Vec::with_capacity(n), used: vec![false; n], best: None, leaves: 0 };
    let root = IncrementalLp::root(instance)?;
    search.dfs(&root)?;
    let (value, perm) = search.best.ok_or(Error::Infeasible)?;
    let order = JobOrder::completion(perm)?;
    let solution = solve(&build_lp(instance, &order)?)?;
    if solution.objective != value {
        return Err(Error::AuditFailed(format!(
            "cold solve gives {} but the search found {value}",
            solution.objective
        )));
    }
    let (schedule, metrics) = reconstruct(&solution, instance, &order)?;
    let objective = match instance.variant() {
        Variant::FlowEnergy => metrics.objective.clone(),
        Variant::Budget(_) => metrics.flow.clone(),
    };
    // An optimal ordering's schedule completes in that order, so C = Ĉ.
    if objective != solution.flow_form {
        return Err(Error::AuditFailed(format!(
            "optimal schedule has objective {objective}, LP value {}",
            solution.flow_form
        )));
    }
    Ok(Optimum { schedule, order, objective, solution, metrics, orderings_solved: search.leaves })
}

/// What [`audit_optimum`] could check for the budget processing-time identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BudgetIdentity<T> {
    NotApplicable,
    /// `B >= P₂V/s₂`: everything can run at the top speed.
    TrivialRegime,
    /// `Σ x_j = V/s₁ - Y` with `Y = (B - P₁V/s₁)/Δ₁`.
    Holds { total_processing: T },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport<T> {
    pub objective: T,
    /// The local optimality conditions were checked (FE instances).
    pub witness_checked: bool,
    pub budget_identity: BudgetIdentity<T>,
}

/// Solves `instance` exactly and checks the consequences of optimality that
/// apply to it. Any failure means a solver bug.
pub fn audit_optimum<T: Scalar>(instance: &Instance<T>, max_n: usize) -> Result<AuditReport<T>> {
    let opt = exact_optimum(instance, max_n)?;
    let mut witness_checked = false;
    let mut budget_identity = BudgetIdentity::NotApplicable;
    match instance.variant() {
        Variant::FlowEnergy => {
            let w = optimality_witness(&opt.schedule, instance)?;
            if !w.violations.is_empty() {
                return Err(Error::AuditFailed(format!("optimal schedule violates {:?}", w.violations)));
            }
            witness_checked = true;
        }
        Variant::Budget(b) if instance.profile().k() == 2 => {
            let p = instance.profile();
            let v = instance.total_volume();
            let slow = v.clone() / p.speed(0).clone();
            let low = p.power(0).clone() * slow.clone();
            let high = p.power(1).clone() * v / p.speed(1).clone();
            if *b >= high {
                budget_identity = BudgetIdentity::TrivialRegime;
            } else if *b > low {
                let y = (b.clone() - low) / p.delta_table()[0].clone();
                let expected = slow - y;
                let total: T = opt.metrics.processing.iter().cloned().sum();
                if total != expected {
                    return Err(Error::AuditFailed(format!("total processing {total}, expected {expected}")));
                }
                budget_identity = BudgetIdentity::Holds { total_processing: total };
            }
        }
        Variant::Budget(_) => {}
    }
    Ok(AuditReport { objective: opt.objective, witness_checked, budget_identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::kappa_delta;
    use crate::lp::build_fe_lp;
    use crate::metrics::evaluate;
    use crate::problem::{Job, SpeedProfile};
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn two_speed(p2: Rational) -> SpeedProfile<Rational> {
        SpeedProfile::new(vec![q(1, 1), q(2, 1)], vec![q(1, 1), p2]).unwrap()
    }

    #[test]
    fn single_job_matches_its_lp() {
        let i = Instance::new(vec![Job::unit(q(0, 1))], two_speed(q(4, 1)), Variant::FlowEnergy).unwrap();
        let opt = exact_optimum(&i, DEFAULT_MAX_N).unwrap();
        let lp = solve(&build_fe_lp(&i, &JobOrder::identity(1)).unwrap()).unwrap();
        assert_eq!(opt.objective, lp.flow_form);
        assert_eq!(opt.objective, q(2, 1));
    }

    #[test]
    fn counterexample_optimum() {
        let prof = SpeedProfile::new(vec![q(1, 1), q(2, 1), q(3, 1)], vec![q(1, 1), q(13, 4), q(25, 4)]).unwrap();
        let jobs = [q(0, 1), q(1, 3), q(4, 3)].into_iter().map(Job::unit).collect();
        let i = Instance::new(jobs, prof, Variant::FlowEnergy).unwrap();
        let opt = exact_optimum(&i, DEFAULT_MAX_N).unwrap();
        assert_eq!(opt.objective, q(19, 3));
        let (s, _) = kappa_delta(&i).unwrap();
        assert_eq!(evaluate(&s, &i, None).unwrap().objective, opt.objective);
    }

    #[test]
    fn identical_jobs_explored_once() {
        let i = Instance::new(vec![Job::unit(q(0, 1)), Job::unit(q(0, 1))], two_speed(q(4, 1)), Variant::FlowEnergy)
            .unwrap();
        let opt = exact_optimum(&i, DEFAULT_MAX_N).unwrap();
        assert_eq!(opt.orderings_solved, 1);
        assert_eq!(opt.order.perm(), &[0, 1]);
        // Both orderings are symmetric; the optimum equals the other ordering's LP.
        let other = solve(&build_fe_lp(&i, &JobOrder::completion(vec![1, 0]).unwrap()).unwrap()).unwrap();
        assert_eq!(opt.objective, other.flow_form);
        let (s, _) = kappa_delta(&i).unwrap();
        assert_eq!(evaluate(&s, &i, None).unwrap().objective, opt.objective);
    }

    #[test]
    fn too_large() {
        let jobs = (0..3).map(|t| Job::unit(q(t, 1))).collect();
        let i = Instance::new(jobs, two_speed(q(4, 1)), Variant::FlowEnergy).unwrap();
        assert_eq!(exact_optimum(&i, 2).unwrap_err(), Error::TooLarge { n: 3, max: 2 });
    }

    #[test]
    fn budget_identity_and_regimes() {
        let jobs = vec![Job::new(q(0, 1), q(2, 1), q(1, 1)), Job::new(q(1, 1), q(1, 1), q(1, 1))];
        let prof = two_speed(q(4, 1));
        // V = 3: low = 3, high = 6.
        let mid = Instance::new(jobs.clone(), prof.clone(), Variant::Budget(q(4, 1))).unwrap();
        let rep = audit_optimum(&mid, DEFAULT_MAX_N).unwrap();
        // Δ₁ = 2, Y = 1/2.
        assert_eq!(rep.budget_identity, BudgetIdentity::Holds { total_processing: q(5, 2) });
        let rich = Instance::new(jobs.clone(), prof.clone(), Variant::Budget(q(6, 1))).unwrap();
        assert_eq!(audit_optimum(&rich, DEFAULT_MAX_N).unwrap().budget_identity, BudgetIdentity::TrivialRegime);
        let poor = Instance::new(jobs, prof, Variant::Budget(q(2, 1))).unwrap();
        assert_eq!(exact_optimum(&poor, DEFAULT_MAX_N).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn fe_audit_checks_witness() {
        let jobs = vec![Job::new(q(0, 1), q(2, 1), q(1, 1)), Job::new(q(1, 2), q(1, 1), q(3, 1)), Job::unit(q(1, 1))];
        let i = Instance::new(jobs, two_speed(q(3, 1)), Variant::FlowEnergy).unwrap();
        let rep = audit_optimum(&i, DEFAULT_MAX_N).unwrap();
        assert!(rep.witness_checked);
    }
}
