use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::problem::{Instance, JobOrder, Variant};
use crate::scalar::Scalar;

/// Where a constraint row comes from. Job indices refer to the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowTag {
    /// `Ĉ_j >= Ĉ_prev` for the job directly before `job` in the ordering.
    Ordering { job: usize },
    /// `Ĉ_job >= r_via + Σ x` over earlier-or-equal jobs released at or after `r_via`.
    Completion { job: usize, via: usize },
    ConvexSum { job: usize },
    NonNeg { job: usize, level: usize },
    BudgetCap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow<T> {
    pub tag: RowTag,
    /// Sparse coefficients over variable indices.
    pub coeffs: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

/// The fixed-ordering LP. Variable `j < n` is `Ĉ_j`; variable
/// `n + j*k + i` is `λ_j^i`. All variables are nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpModel<T> {
    pub n: usize,
    pub k: usize,
    pub order: JobOrder,
    pub objective: Vec<T>,
    pub rows: Vec<LpRow<T>>,
    /// `Σ w_j r_j`: subtract from the objective for the flow form.
    pub flow_offset: T,
    /// `E_j^i` for each `λ` variable, in variable order after the `Ĉ` block.
    pub lambda_energy: Vec<T>,
    pub budget: Option<T>,
}

impl<T: Scalar> LpModel<T> {
    pub fn chat_var(&self, j: usize) -> usize {
        j
    }

    pub fn lambda_var(&self, j: usize, i: usize) -> usize {
        self.n + j * self.k + i
    }

    pub fn num_vars(&self) -> usize {
        self.n + self.n * self.k
    }

    pub fn count(&self, pred: impl Fn(&RowTag) -> bool) -> usize {
        self.rows.iter().filter(|r| pred(&r.tag)).count()
    }

    /// Checks `values` against every row exactly; returns the first violated tag.
    pub fn violated_row(&self, values: &[T]) -> Option<RowTag> {
        if values.iter().any(|v| v.is_negative()) {
            return Some(RowTag::NonNeg { job: 0, level: 0 });
        }
        self.rows.iter().find_map(|row| {
            let lhs: T = row.coeffs.iter().map(|(j, c)| c.clone() * values[*j].clone()).sum();
            let ok = match row.sense {
                Sense::Ge => lhs >= row.rhs,
                Sense::Le => lhs <= row.rhs,
                Sense::Eq => lhs == row.rhs,
            };
            (!ok).then_some(row.tag)
        })
    }

    /// CPLEX LP text. Coefficients are printed as decimals and so may be
    /// rounded; the export is for cross-checking only.
    pub fn to_lp_text(&self) -> String {
        let name = |v: usize| {
            if v < self.n {
                format!("C{}", v + 1)
            } else {
                let j = (v - self.n) / self.k;
                let i = (v - self.n) % self.k;
                format!("L{}_{}", j + 1, i + 1)
            }
        };
        let term = |first: bool, c: &T, v: usize| {
            let f = c.to_f64();
            let sign = if f < 0.0 { "-" } else if first { "" } else { "+" };
            format!("{sign} {} {}", fmt_num(f.abs()), name(v))
        };
        let mut out = String::from("\\ exact coefficients are rational; values below are rounded\nMinimize\n obj:");
        let mut first = true;
        for (v, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                out.push(' ');
                out.push_str(&term(first, c, v));
                first = false;
            }
        }
        if first {
            out.push_str(" 0 C1");
        }
        out.push_str("\nSubject To\n");
        for (idx, row) in self.rows.iter().enumerate() {
            if matches!(row.tag, RowTag::NonNeg { .. }) {
                continue;
            }
            let label = match row.tag {
                RowTag::Ordering { job } => format!("ord_{}", job + 1),
                RowTag::Completion { job, via } => format!("comp_{}_{}", job + 1, via + 1),
                RowTag::ConvexSum { job } => format!("conv_{}", job + 1),
                RowTag::BudgetCap => "budget".to_string(),
                RowTag::NonNeg { .. } => unreachable!(),
            };
            let _ = write!(out, " {label}_{idx}:");
            for (t, (v, c)) in row.coeffs.iter().enumerate() {
                out.push(' ');
                out.push_str(&term(t == 0, c, *v));
            }
            let op = match row.sense {
                Sense::Ge => ">=",
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", fmt_num(row.rhs.to_f64()));
        }
        out.push_str("End\n");
        out
    }
}

fn fmt_num(f: f64) -> String {
    let s = format!("{f:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Completion rows for the job at the end of `prefix`: one per distinct
/// release value among prefix jobs released no later than it.
pub(crate) fn completion_rows<T: Scalar>(instance: &Instance<T>, prefix: &[usize]) -> Vec<LpRow<T>> {
    let n = instance.n();
    let k = instance.profile().k();
    let j = *prefix.last().expect("nonempty prefix");
    let rj = &instance.job(j).release;
    let mut vias: Vec<usize> = prefix.iter().copied().filter(|&a| instance.job(a).release <= *rj).collect();
    vias.sort_by(|&a, &b| instance.job(a).release.cmp(&instance.job(b).release).then(a.cmp(&b)));
    vias.dedup_by(|b, a| instance.job(*a).release == instance.job(*b).release);
    vias.into_iter()
        .map(|via| {
            let t = instance.job(via).release.clone();
            let mut coeffs = vec![(j, T::one())];
            for &b in prefix.iter().filter(|&&b| instance.job(b).release >= t) {
                for i in 0..k {
                    coeffs.push((n + b * k + i, -instance.x(b, i)));
                }
            }
            LpRow { tag: RowTag::Completion { job: j, via }, coeffs, sense: Sense::Ge, rhs: t }
        })
        .collect()
}

pub(crate) fn ordering_row<T: Scalar>(prev: usize, j: usize) -> LpRow<T> {
    LpRow {
        tag: RowTag::Ordering { job: j },
        coeffs: vec![(j, T::one()), (prev, -T::one())],
        sense: Sense::Ge,
        rhs: T::zero(),
    }
}

pub(crate) fn convex_row<T: Scalar>(n: usize, k: usize, j: usize) -> LpRow<T> {
    LpRow {
        tag: RowTag::ConvexSum { job: j },
        coeffs: (0..k).map(|i| (n + j * k + i, T::one())).collect(),
        sense: Sense::Eq,
        rhs: T::one(),
    }
}

pub(crate) fn budget_row<T: Scalar>(instance: &Instance<T>, budget: &T) -> LpRow<T> {
    let (n, k) = (instance.n(), instance.profile().k());
    LpRow {
        tag: RowTag::BudgetCap,
        coeffs: (0..n).flat_map(|j| (0..k).map(move |i| (n + j * k + i, instance.e(j, i)))).collect(),
        sense: Sense::Le,
        rhs: budget.clone(),
    }
}

pub(crate) fn objective<T: Scalar>(instance: &Instance<T>, with_energy: bool) -> Vec<T> {
    let (n, k) = (instance.n(), instance.profile().k());
    let mut c: Vec<T> = instance.jobs().iter().map(|j| j.weight.clone()).collect();
    for j in 0..n {
        for i in 0..k {
            c.push(if with_energy { instance.e(j, i) } else { T::zero() });
        }
    }
    c
}

fn build<T: Scalar>(instance: &Instance<T>, order: &JobOrder, budget: Option<&T>) -> Result<LpModel<T>> {
    let (n, k) = (instance.n(), instance.profile().k());
    order.check_len(n)?;
    let mut rows = Vec::new();
    let perm = order.perm();
    for p in 0..n {
        if p > 0 {
            rows.push(ordering_row(perm[p - 1], perm[p]));
        }
        rows.extend(completion_rows(instance, &perm[..=p]));
    }
    for j in 0..n {
        rows.push(convex_row(n, k, j));
    }
    for j in 0..n {
        for i in 0..k {
            rows.push(LpRow {
                tag: RowTag::NonNeg { job: j, level: i },
                coeffs: vec![(n + j * k + i, T::one())],
                sense: Sense::Ge,
                rhs: T::zero(),
            });
        }
    }
    if let Some(b) = budget {
        rows.push(budget_row(instance, b));
    }
    let flow_offset = instance.jobs().iter().map(|j| j.weight.clone() * j.release.clone()).sum();
    let lambda_energy = (0..n).flat_map(|j| (0..k).map(move |i| instance.e(j, i))).collect();
    Ok(LpModel {
        n,
        k,
        order: order.clone(),
        objective: objective(instance, budget.is_none()),
        rows,
        flow_offset,
        lambda_energy,
        budget: budget.cloned(),
    })
}

/// `min Σ w_j Ĉ_j + Σ λ_j^i E_j^i` over the rows for a fixed completion ordering.
pub fn build_fe_lp<T: Scalar>(instance: &Instance<T>, order: &JobOrder) -> Result<LpModel<T>> {
    build(instance, order, None)
}

/// `min Σ w_j Ĉ_j` with the extra row `Σ λ_j^i E_j^i <= B`.
pub fn build_budget_lp<T: Scalar>(instance: &Instance<T>, order: &JobOrder) -> Result<LpModel<T>> {
    match instance.variant() {
        Variant::Budget(b) => build(instance, order, Some(b)),
        Variant::FlowEnergy => Err(Error::NotBudget),
    }
}

/// The model matching the instance's variant.
pub fn build_lp<T: Scalar>(instance: &Instance<T>, order: &JobOrder) -> Result<LpModel<T>> {
    match instance.variant() {
        Variant::Budget(b) => build(instance, order, Some(b)),
        Variant::FlowEnergy => build(instance, order, None),
    }
}
