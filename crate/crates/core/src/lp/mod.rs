//! The fixed-completion-ordering LP: model, exact solve, and reconstruction
//! of a schedule attaining the LP value.

mod model;
mod simplex;

pub use model::{build_budget_lp, build_fe_lp, build_lp, LpModel, LpRow, RowTag, Sense};

use crate::dispatch::{dispatch_ordering, Allocation};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, Schedule, ScheduleMetrics};
use crate::problem::{Instance, JobOrder, Variant};
use crate::scalar::Scalar;
use simplex::Tableau;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution<T> {
    /// Extended completion times, by job.
    pub c_hat: Vec<T>,
    pub allocation: Allocation<T>,
    /// Model objective: `Σ w Ĉ + energy` (FE) or `Σ w Ĉ` (budget).
    pub objective: T,
    /// `objective - Σ w r`: extended flow (plus energy for FE).
    pub flow_form: T,
    pub energy: T,
    pub status: LpStatus,
    pub pivots: usize,
}

fn load<T: Scalar>(tab: &mut Tableau<T>, row: &LpRow<T>) {
    match row.sense {
        Sense::Ge => tab.add_row(&row.coeffs, &row.rhs, false),
        Sense::Eq => tab.add_row(&row.coeffs, &row.rhs, true),
        Sense::Le => {
            let neg: Vec<(usize, T)> = row.coeffs.iter().map(|(j, c)| (*j, -c.clone())).collect();
            tab.add_row(&neg, &-row.rhs.clone(), false)
        }
    }
}

/// Exact optimum of the model. `Err(Infeasible)` only for budget models.
pub fn solve<T: Scalar>(model: &LpModel<T>) -> Result<LpSolution<T>> {
    let mut tab = Tableau::new(model.objective.clone());
    for row in model.rows.iter().filter(|r| !matches!(r.tag, RowTag::NonNeg { .. })) {
        load(&mut tab, row);
    }
    tab.optimize()?;
    let y = tab.solution();
    if let Some(tag) = model.violated_row(&y) {
        return Err(Error::AuditFailed(format!("simplex point violates {tag:?}")));
    }
    let n = model.n;
    let k = model.k;
    let lambda: Vec<Vec<T>> = (0..n).map(|j| y[n + j * k..n + (j + 1) * k].to_vec()).collect();
    let energy: T = y[n..].iter().zip(&model.lambda_energy).map(|(l, e)| l.clone() * e.clone()).sum();
    let objective = tab.objective();
    Ok(LpSolution {
        c_hat: y[..n].to_vec(),
        allocation: Allocation { lambda },
        flow_form: objective.clone() - model.flow_offset.clone(),
        objective,
        energy,
        status: LpStatus::Optimal,
        pivots: tab.pivots,
    })
}

/// Dispatches the solution's processing times along `order` and checks that
/// the schedule attains exactly the LP's extended completions and value.
pub fn reconstruct<T: Scalar>(
    solution: &LpSolution<T>,
    instance: &Instance<T>,
    order: &JobOrder,
) -> Result<(Schedule<T>, ScheduleMetrics<T>)> {
    let x = solution.allocation.processing_times(instance);
    let schedule = dispatch_ordering(instance, order, &x)?;
    let m = evaluate(&schedule, instance, Some(order))?;
    let ext = m.extended.as_ref().expect("ordering supplied");
    if *ext != solution.c_hat {
        return Err(Error::ReconstructionMismatch(format!(
            "extended completions {ext:?} differ from LP values {:?}",
            solution.c_hat
        )));
    }
    let value = m.extended_objective.clone().expect("ordering supplied");
    if value != solution.flow_form {
        return Err(Error::ReconstructionMismatch(format!(
            "schedule value {value} differs from LP value {}",
            solution.flow_form
        )));
    }
    if let Variant::Budget(b) = instance.variant() {
        if m.energy > *b {
            return Err(Error::ReconstructionMismatch(format!("energy {} exceeds budget {b}", m.energy)));
        }
    }
    Ok((schedule, m))
}

/// Build, solve and reconstruct in one go.
pub fn solve_ordering<T: Scalar>(
    instance: &Instance<T>,
    order: &JobOrder,
) -> Result<(LpSolution<T>, Schedule<T>, ScheduleMetrics<T>)> {
    let model = build_lp(instance, order)?;
    let sol = solve(&model)?;
    let (s, m) = reconstruct(&sol, instance, order)?;
    Ok((sol, s, m))
}

/// The LP grown one ordering position at a time. After pushing a full
/// permutation its rows are exactly those of [`build_lp`] for it, so the
/// optimal value agrees; every intermediate value is a lower bound.
#[derive(Clone, Debug)]
pub(crate) struct IncrementalLp<T> {
    tab: Tableau<T>,
}

impl<T: Scalar> IncrementalLp<T> {
    pub(crate) fn root(instance: &Instance<T>) -> Result<Self> {
        let (n, k) = (instance.n(), instance.profile().k());
        let budget = instance.variant().budget();
        let mut tab = Tableau::new(model::objective(instance, budget.is_none()));
        for j in 0..n {
            load(&mut tab, &model::convex_row(n, k, j));
        }
        if let Some(b) = budget {
            load(&mut tab, &model::budget_row(instance, b));
        }
        tab.optimize()?;
        Ok(IncrementalLp { tab })
    }

    /// Adds the rows of the last job of `prefix` and reoptimizes.
    pub(crate) fn push(&mut self, instance: &Instance<T>, prefix: &[usize]) -> Result<()> {
        let p = prefix.len() - 1;
        if p > 0 {
            load(&mut self.tab, &model::ordering_row(prefix[p - 1], prefix[p]));
        }
        for row in model::completion_rows(instance, prefix) {
            load(&mut self.tab, &row);
        }
        self.tab.optimize()
    }

    pub(crate) fn objective(&self) -> T {
        self.tab.objective()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Job, SpeedProfile};
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn profile(p2: Rational) -> SpeedProfile<Rational> {
        SpeedProfile::new(vec![q(1, 1), q(2, 1)], vec![q(1, 1), p2]).unwrap()
    }

    fn fe(jobs: Vec<Job<Rational>>, p2: Rational) -> Instance<Rational> {
        Instance::new(jobs, profile(p2), Variant::FlowEnergy).unwrap()
    }

    #[test]
    fn smallest_model_shape() {
        let i = fe(vec![Job::unit(q(0, 1))], q(4, 1));
        let m = build_fe_lp(&i, &JobOrder::identity(1)).unwrap();
        assert_eq!(m.count(|t| matches!(t, RowTag::ConvexSum { .. })), 1);
        assert_eq!(m.count(|t| matches!(t, RowTag::NonNeg { .. })), 2);
        assert_eq!(m.count(|t| matches!(t, RowTag::Completion { .. })), 1);
        assert_eq!(m.count(|t| matches!(t, RowTag::Ordering { .. })), 0);
        let comp = m.rows.iter().find(|r| matches!(r.tag, RowTag::Completion { .. })).unwrap();
        assert_eq!(comp.coeffs, vec![(0, q(1, 1)), (1, q(-1, 1)), (2, q(-1, 2))]);
        assert_eq!(comp.rhs, q(0, 1));
    }

    #[test]
    fn equal_releases_dedupe() {
        let i = fe(vec![Job::unit(q(0, 1)), Job::unit(q(0, 1))], q(4, 1));
        let m = build_fe_lp(&i, &JobOrder::identity(2)).unwrap();
        let comp: Vec<RowTag> = m.rows.iter().map(|r| r.tag).filter(|t| matches!(t, RowTag::Completion { .. })).collect();
        assert_eq!(comp, vec![RowTag::Completion { job: 0, via: 0 }, RowTag::Completion { job: 1, via: 0 }]);
        assert_eq!(m.count(|t| matches!(t, RowTag::Ordering { .. })), 1);
    }

    #[test]
    fn distinct_releases_pairs() {
        let i = fe(vec![Job::unit(q(0, 1)), Job::unit(q(1, 3)), Job::unit(q(4, 3))], q(4, 1));
        let m = build_fe_lp(&i, &JobOrder::identity(3)).unwrap();
        assert_eq!(m.count(|t| matches!(t, RowTag::Completion { .. })), 6);
    }

    #[test]
    fn single_job_prefers_slow() {
        let i = fe(vec![Job::unit(q(0, 1))], q(4, 1));
        let (sol, _, m) = solve_ordering(&i, &JobOrder::identity(1)).unwrap();
        assert_eq!(sol.allocation.lambda[0], vec![q(1, 1), q(0, 1)]);
        assert_eq!(sol.c_hat, vec![q(1, 1)]);
        assert_eq!(sol.objective, q(2, 1));
        assert_eq!(m.objective, q(2, 1));
    }

    #[test]
    fn single_job_prefers_fast_when_cheap() {
        let i = fe(vec![Job::unit(q(0, 1))], q(3, 2));
        let (sol, _, _) = solve_ordering(&i, &JobOrder::identity(1)).unwrap();
        assert_eq!(sol.allocation.lambda[0], vec![q(0, 1), q(1, 1)]);
        assert_eq!(sol.objective, q(5, 4));
    }

    fn budget(jobs: Vec<Job<Rational>>, b: Rational) -> Instance<Rational> {
        Instance::new(jobs, profile(q(4, 1)), Variant::Budget(b)).unwrap()
    }

    #[test]
    fn budget_limits() {
        let jobs = vec![Job::new(q(0, 1), q(2, 1), q(1, 1)), Job::new(q(0, 1), q(1, 1), q(1, 1))];
        // Ample budget: both at top speed, shorter job first.
        let roomy = budget(jobs.clone(), q(100, 1));
        let (sol, _, _) = solve_ordering(&roomy, &JobOrder::completion(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(sol.flow_form, q(1, 2) + q(3, 2));
        // Exactly the all-slow energy: everything at level 0.
        let tight = budget(jobs.clone(), q(3, 1));
        let (sol, _, _) = solve_ordering(&tight, &JobOrder::completion(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(sol.allocation.lambda, vec![vec![q(1, 1), q(0, 1)], vec![q(1, 1), q(0, 1)]]);
        assert_eq!(sol.flow_form, q(1, 1) + q(3, 1));
        let short = budget(jobs, q(2, 1));
        assert_eq!(solve_ordering(&short, &JobOrder::identity(2)).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn extended_completion_under_inflated_predecessor() {
        // Ordering forces job 1 (released at 1) before job 2 (released at 0, short).
        let i = fe(
            vec![Job::unit(q(0, 1)), Job::new(q(1, 1), q(3, 1), q(1, 1)), Job::new(q(0, 1), q(1, 4), q(1, 1))],
            q(4, 1),
        );
        let order = JobOrder::completion(vec![0, 1, 2]).unwrap();
        let (sol, _, m) = solve_ordering(&i, &order).unwrap();
        assert_eq!(sol.c_hat[2], sol.c_hat[1]);
        assert!(m.completion[2] < m.extended.as_ref().unwrap()[2]);
    }

    #[test]
    fn far_apart_jobs_are_isolated() {
        let i = fe(vec![Job::unit(q(0, 1)), Job::unit(q(10, 1))], q(4, 1));
        let (sol, _, m) = solve_ordering(&i, &JobOrder::identity(2)).unwrap();
        assert_eq!(sol.c_hat, m.completion);
        assert_eq!(m.completion, vec![q(1, 1), q(11, 1)]);
    }

    #[test]
    fn incremental_matches_cold() {
        let i = fe(
            vec![Job::unit(q(0, 1)), Job::unit(q(1, 3)), Job::unit(q(4, 3)), Job::new(q(1, 2), q(2, 1), q(3, 1))],
            q(4, 1),
        );
        let perm = vec![2, 0, 3, 1];
        let mut inc = IncrementalLp::root(&i).unwrap();
        for p in 0..4 {
            inc.push(&i, &perm[..=p]).unwrap();
        }
        let cold = solve(&build_fe_lp(&i, &JobOrder::completion(perm).unwrap()).unwrap()).unwrap();
        assert_eq!(inc.objective(), cold.objective);
    }

    #[test]
    fn lp_text_export() {
        let i = fe(vec![Job::unit(q(0, 1)), Job::unit(q(1, 3))], q(4, 1));
        let text = build_fe_lp(&i, &JobOrder::identity(2)).unwrap().to_lp_text();
        assert!(text.contains("Minimize"));
        assert!(text.contains("ord_2"));
        assert!(text.contains("conv_1"));
        assert!(text.trim_end().ends_with("End"));
    }
}
