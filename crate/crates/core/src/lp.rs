//! Dense-tableau two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for the few-hundred-row programs produced by grid separation
//! problems; there is no sparsity handling and no presolve.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

/// `maximize objective·x` subject to `a·x <= b` rows, `a·x = b` rows and
/// per-variable sign restrictions (`x_i >= 0` unless marked free).
#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    free: Vec<bool>,
    le: Vec<(Vec<f64>, f64)>,
    eq: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    /// A program over `num_vars` nonnegative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            free: vec![false; num_vars],
            le: Vec::new(),
            eq: Vec::new(),
        }
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.num_vars);
        self.objective = objective;
        self
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn all_free(mut self) -> Self {
        self.free.iter_mut().for_each(|f| *f = true);
        self
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.num_vars);
        self.le.push((row, rhs));
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.num_vars);
        self.eq.push((row, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
    /// structural column index for each variable: (positive part, negative part)
    var_cols: Vec<(usize, Option<usize>)>,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut var_cols = Vec::with_capacity(lp.num_vars);
        let mut next = 0;
        for &free in &lp.free {
            if free {
                var_cols.push((next, Some(next + 1)));
                next += 2;
            } else {
                var_cols.push((next, None));
                next += 1;
            }
        }
        let nstruct = next;
        let nle = lp.le.len();
        let m = nle + lp.eq.len();

        // (scaled structural row, rhs, slack sign or None for equalities)
        let mut staged: Vec<(Vec<f64>, f64, Option<f64>)> = Vec::with_capacity(m);
        let expand = |row: &[f64]| {
            let mut out = vec![0.0; nstruct];
            for (i, &v) in row.iter().enumerate() {
                let (p, n) = var_cols[i];
                out[p] = v;
                if let Some(n) = n {
                    out[n] = -v;
                }
            }
            out
        };
        for (row, rhs) in &lp.le {
            staged.push((expand(row), *rhs, Some(1.0)));
        }
        for (row, rhs) in &lp.eq {
            staged.push((expand(row), *rhs, None));
        }
        for (row, rhs, slack) in staged.iter_mut() {
            let scale = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if scale > 0.0 {
                row.iter_mut().for_each(|v| *v /= scale);
                *rhs /= scale;
            }
            if *rhs < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
                *rhs = -*rhs;
                if let Some(s) = slack {
                    *s = -*s;
                }
            }
        }
        let needs_art: Vec<bool> = staged.iter().map(|(_, _, s)| *s != Some(1.0)).collect();
        let nart = needs_art.iter().filter(|&&b| b).count();
        let first_slack = nstruct;
        let first_artificial = nstruct + nle;
        let ncols = first_artificial + nart;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut art = first_artificial;
        for (i, (row, rhs, slack)) in staged.into_iter().enumerate() {
            let mut full = vec![0.0; ncols + 1];
            full[..nstruct].copy_from_slice(&row);
            if let Some(s) = slack {
                full[first_slack + i] = s;
            }
            if needs_art[i] {
                full[art] = 1.0;
                basis.push(art);
                art += 1;
            } else {
                basis.push(first_slack + i);
            }
            full[ncols] = rhs;
            rows.push(full);
        }
        Self {
            rows,
            obj: vec![0.0; ncols + 1],
            basis,
            ncols,
            var_cols,
            first_artificial,
            pivots: 0,
        }
    }

    fn set_objective(&mut self, cost: &[f64]) {
        // obj[j] = z_j - c_j with z_j = sum_i c_B(i) a_ij
        let n = self.ncols;
        for j in 0..=n {
            let c = if j < n { cost[j] } else { 0.0 };
            let z: f64 = self
                .rows
                .iter()
                .zip(&self.basis)
                .map(|(row, &b)| cost[b] * row[j])
                .sum();
            self.obj[j] = z - c;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let n = self.ncols;
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..=n {
                    row[j] -= f * pivot_row[j];
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for j in 0..=n {
                self.obj[j] -= f * pivot_row[j];
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs simplex iterations over columns `< enterable`. Returns false
    /// if the objective is unbounded.
    fn iterate(&mut self, enterable: usize) -> Result<bool> {
        let n = self.ncols;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::NumericallyDegenerate(format!(
                    "simplex exceeded {MAX_PIVOTS} pivots"
                )));
            }
            let Some(enter) = (0..enterable).find(|&j| self.obj[j] < -PIVOT_EPS) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_EPS {
                    let ratio = row[n] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let n = self.ncols;
        let scale = 1.0 + self.rows.iter().fold(0.0f64, |a, r| a.max(r[n].abs()));

        if self.first_artificial < n {
            let mut cost = vec![0.0; n];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = -1.0;
            }
            self.set_objective(&cost);
            self.iterate(n)?;
            let infeasibility = -self.obj[n];
            if infeasibility > 1e-9 * scale {
                return Err(Error::Infeasible(format!("phase one residual {infeasibility:e}")));
            }
            // drive remaining zero-level artificials out of the basis
            for r in 0..self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    if let Some(c) = (0..self.first_artificial).find(|&j| self.rows[r][j].abs() > PIVOT_EPS) {
                        self.pivot(r, c);
                    }
                }
            }
        }

        let mut cost = vec![0.0; n];
        for (i, &(p, neg)) in self.var_cols.iter().enumerate() {
            cost[p] = lp.objective[i];
            if let Some(q) = neg {
                cost[q] = -lp.objective[i];
            }
        }
        self.set_objective(&cost);
        if !self.iterate(self.first_artificial)? {
            return Err(Error::Unbounded);
        }

        let mut col_value = vec![0.0; n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            col_value[b] = row[n];
        }
        let x: Vec<f64> = self
            .var_cols
            .iter()
            .map(|&(p, neg)| col_value[p] - neg.map_or(0.0, |q| col_value[q]))
            .collect();
        let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots: self.pivots,
        })
    }
}
