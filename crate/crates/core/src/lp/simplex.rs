//! Exact dual simplex over a dense tableau.
//!
//! Problems have the shape `min c·y` subject to rows `a·y >= b` and `y >= 0`,
//! with `c >= 0`. Each row gets a slack `s = a·y - b`, bounded to `[0, ∞)` or,
//! for equality rows, fixed at `0`. The all-slack basis is then dual feasible
//! and rows can be appended at any time without losing dual feasibility, which
//! is what makes warm starts across ordering prefixes cheap.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Debug)]
pub(crate) struct Tableau<T> {
    n_struct: usize,
    cost: Vec<T>,
    // Row r reads `x[basis[r]] + Σ_{j nonbasic} rows[r][j] x[j] = rhs[r]`.
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    fixed: Vec<bool>,
    // Reduced costs; nonnegative on every nonbasic column that is not fixed.
    reduced: Vec<T>,
    pub(crate) pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    /// `cost` must be nonnegative.
    pub(crate) fn new(cost: Vec<T>) -> Self {
        debug_assert!(cost.iter().all(|c| !c.is_negative()));
        let n = cost.len();
        Tableau {
            n_struct: n,
            reduced: cost.clone(),
            cost,
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            row_of: vec![None; n],
            fixed: vec![false; n],
            pivots: 0,
        }
    }

    /// Appends `a·y >= b` (or `a·y = b` when `equality`), `a` sparse over structural columns.
    pub(crate) fn add_row(&mut self, a: &[(usize, T)], b: &T, equality: bool) {
        let ncols = self.cost.len();
        let mut row = vec![T::zero(); ncols + 1];
        let mut rhs = -b.clone();
        for (j, v) in a {
            row[*j] -= v.clone();
        }
        // Express in nonbasic columns by eliminating basic structurals.
        for (j, _) in a {
            if let Some(r) = self.row_of[*j] {
                let f = row[*j].clone();
                if f.is_zero() {
                    continue;
                }
                for (c, v) in self.rows[r].iter().enumerate() {
                    if !v.is_zero() {
                        row[c] -= f.clone() * v.clone();
                    }
                }
                rhs -= f * self.rhs[r].clone();
            }
        }
        row[ncols] = T::one();
        for r in &mut self.rows {
            r.push(T::zero());
        }
        self.cost.push(T::zero());
        self.reduced.push(T::zero());
        self.fixed.push(equality);
        self.row_of.push(Some(self.rows.len()));
        self.basis.push(ncols);
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    fn leaving(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (r, v) in self.rhs.iter().enumerate() {
            let bad = v.is_negative() || (self.fixed[self.basis[r]] && v.is_positive());
            if bad && best.is_none_or(|b| self.basis[r] < self.basis[b]) {
                best = Some(r);
            }
        }
        best
    }

    fn entering(&self, r: usize) -> Option<usize> {
        let raise = self.rhs[r].is_negative();
        let row = &self.rows[r];
        let mut best: Option<(usize, T)> = None;
        for (j, a) in row.iter().enumerate() {
            if a.is_zero() || self.row_of[j].is_some() || self.fixed[j] {
                continue;
            }
            if (raise && !a.is_negative()) || (!raise && !a.is_positive()) {
                continue;
            }
            let ratio = self.reduced[j].clone() / a.abs();
            if best.as_ref().is_none_or(|(_, b)| ratio < *b) {
                best = Some((j, ratio));
            }
        }
        best.map(|(j, _)| j)
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.rows[r][q].clone();
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        if !piv.is_one() {
            for &j in &nz {
                self.rows[r][j] = self.rows[r][j].clone() / piv.clone();
            }
            self.rhs[r] = self.rhs[r].clone() / piv;
        }
        let (before, rest) = self.rows.split_at_mut(r);
        let (pr, after) = rest.split_first_mut().expect("row r exists");
        let pr_rhs = self.rhs[r].clone();
        for (i, row) in before.iter_mut().enumerate().chain(after.iter_mut().enumerate().map(|(i, x)| (i + r + 1, x))) {
            let f = row[q].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                row[j] -= f.clone() * pr[j].clone();
            }
            self.rhs[i] -= f * pr_rhs.clone();
        }
        let f = self.reduced[q].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.reduced[j] -= f.clone() * pr[j].clone();
            }
        }
        let old = self.basis[r];
        self.row_of[old] = None;
        self.row_of[q] = Some(r);
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Restores primal feasibility. `Err(Infeasible)` if the rows admit no point.
    pub(crate) fn optimize(&mut self) -> Result<()> {
        while let Some(r) = self.leaving() {
            let q = self.entering(r).ok_or(Error::Infeasible)?;
            self.pivot(r, q);
            if self.pivots > MAX_PIVOTS {
                return Err(Error::IterationLimit);
            }
        }
        Ok(())
    }

    /// Current values of the structural variables.
    pub(crate) fn solution(&self) -> Vec<T> {
        (0..self.n_struct)
            .map(|j| self.row_of[j].map_or_else(T::zero, |r| self.rhs[r].clone()))
            .collect()
    }

    pub(crate) fn objective(&self) -> T {
        (0..self.n_struct)
            .filter_map(|j| self.row_of[j].map(|r| self.cost[j].clone() * self.rhs[r].clone()))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn small_covering_problem() {
        // min 2a + 3b  s.t. a + b >= 4, a - b = 1
        let mut t = Tableau::new(vec![q(2), q(3)]);
        t.add_row(&[(0, q(1)), (1, q(1))], &q(4), false);
        t.add_row(&[(0, q(1)), (1, q(-1))], &q(1), true);
        t.optimize().unwrap();
        assert_eq!(t.solution(), vec![Rational::new(5, 2), Rational::new(3, 2)]);
        assert_eq!(t.objective(), Rational::new(19, 2));
    }

    #[test]
    fn warm_start_after_new_row() {
        let mut t = Tableau::new(vec![q(1), q(1)]);
        t.add_row(&[(0, q(1))], &q(2), false);
        t.optimize().unwrap();
        assert_eq!(t.objective(), q(2));
        t.add_row(&[(0, q(-1)), (1, q(1))], &q(1), false);
        t.optimize().unwrap();
        assert_eq!(t.solution(), vec![q(2), q(3)]);
    }

    #[test]
    fn detects_infeasibility() {
        let mut t = Tableau::new(vec![q(1)]);
        t.add_row(&[(0, q(1))], &q(3), false);
        t.add_row(&[(0, q(-1))], &q(-2), false);
        assert_eq!(t.optimize(), Err(Error::Infeasible));
    }
}
