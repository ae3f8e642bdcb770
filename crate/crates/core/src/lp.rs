//! Dense two-phase primal simplex for
//!
//! ```text
//! minimize c.x  subject to  A x = b,  0 <= x <= upper
//! ```
//!
//! Finite upper bounds become explicit slack rows. Pivoting uses Bland's rule
//! throughout. When phase two stops, the basis is refactored from the original
//! data and the reduced costs are recomputed; pivoting resumes if that exact
//! check disagrees with the tableau.

use nalgebra::{DMatrix, DVector};

use crate::error::LpError;

const PIVOT_TOL: f64 = 1e-11;
const MAX_REFACTORS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: DMatrix<f64>,
    rhs: Vec<f64>,
    upper_bounds: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, constraints: DMatrix<f64>, rhs: Vec<f64>) -> Result<Self, LpError> {
        if constraints.ncols() != objective.len() || constraints.nrows() != rhs.len() {
            return Err(LpError::DimensionMismatch {
                rows: constraints.nrows(),
                cols: constraints.ncols(),
                n_obj: objective.len(),
                n_rhs: rhs.len(),
            });
        }
        if objective.iter().chain(&rhs).chain(constraints.iter()).any(|x| !x.is_finite()) {
            return Err(LpError::NonFinite);
        }
        let n = objective.len();
        Ok(LinearProgram {
            objective,
            constraints,
            rhs,
            upper_bounds: vec![None; n],
        })
    }

    pub fn with_upper_bounds(mut self, upper: Vec<Option<f64>>) -> Result<Self, LpError> {
        if upper.len() != self.n_vars() {
            return Err(LpError::BoundsMismatch {
                expected: self.n_vars(),
                found: upper.len(),
            });
        }
        if upper.iter().flatten().any(|u| !u.is_finite()) {
            return Err(LpError::NonFinite);
        }
        self.upper_bounds = upper;
        Ok(self)
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &DMatrix<f64> {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn upper_bounds(&self) -> &[Option<f64>] {
        &self.upper_bounds
    }

    /// Equality form with one slack column and row per finite upper bound:
    /// `(A', b', c')` with original rows first, then bound rows.
    pub fn standardized(&self) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
        let n = self.n_vars();
        let m = self.n_constraints();
        let bounded: Vec<(usize, f64)> = self
            .upper_bounds
            .iter()
            .enumerate()
            .filter_map(|(j, u)| u.map(|u| (j, u)))
            .collect();
        let nb = bounded.len();
        let mut a = DMatrix::zeros(m + nb, n + nb);
        a.view_mut((0, 0), (m, n)).copy_from(&self.constraints);
        let mut b = self.rhs.clone();
        for (k, &(j, u)) in bounded.iter().enumerate() {
            a[(m + k, j)] = 1.0;
            a[(m + k, n + k)] = 1.0;
            b.push(u);
        }
        let mut c = self.objective.clone();
        c.extend(std::iter::repeat_n(0.0, nb));
        (a, b, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point (original variables); empty unless optimal.
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// Dual multipliers for the rows of [`LinearProgram::standardized`];
    /// empty unless optimal.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            objective_value: match status {
                LpStatus::Unbounded => f64::NEG_INFINITY,
                _ => f64::INFINITY,
            },
            dual: Vec::new(),
            iterations,
        }
    }
}

struct Tableau {
    /// Rows are constraints; the last column is the right-hand side.
    t: DMatrix<f64>,
    /// Reduced costs for every column, and the current objective in the last slot.
    z: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
    cap: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.t.ncols() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let rc = self.rhs_col();
        let p = self.t[(row, col)];
        for j in 0..=rc {
            self.t[(row, j)] /= p;
        }
        for i in 0..self.t.nrows() {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)];
            if f != 0.0 {
                for j in 0..=rc {
                    let v = self.t[(row, j)];
                    self.t[(i, j)] -= f * v;
                }
                self.t[(i, col)] = 0.0;
            }
        }
        let f = self.z[col];
        if f != 0.0 {
            for j in 0..=rc {
                self.z[j] -= f * self.t[(row, j)];
            }
            self.z[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Bland's rule: lowest-index improving column, ratio ties broken by the
    /// lowest-index leaving variable.
    fn run(&mut self, n_allowed: usize, tol: f64) -> Result<Outcome, LpError> {
        let rc = self.rhs_col();
        loop {
            let Some(col) = (0..n_allowed).find(|&j| self.z[j] < -tol) else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.nrows() {
                let a = self.t[(i, col)];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.t[(i, rc)].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-14
                            || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            self.iterations += 1;
            if self.iterations > self.cap {
                return Err(LpError::IterationLimit(self.iterations - 1));
            }
            self.pivot(row, col);
        }
    }
}

/// Solves `lp`. `tol` governs feasibility and reduced-cost decisions.
pub fn solve(lp: &LinearProgram, tol: f64) -> Result<LpSolution, LpError> {
    let (a_std, b_std, c_std) = lp.standardized();
    let m = a_std.nrows();
    let n = a_std.ncols();
    let cap = 50 * (n + m);

    let mut sign = vec![1.0; m];
    let mut a = a_std.clone();
    let mut b = b_std.clone();
    for i in 0..m {
        if b[i] < 0.0 {
            sign[i] = -1.0;
            b[i] = -b[i];
            for j in 0..n {
                a[(i, j)] = -a[(i, j)];
            }
        }
    }

    if m == 0 {
        // only the sign constraints remain
        if c_std.iter().any(|&c| c < -tol) {
            return Ok(LpSolution::without_point(LpStatus::Unbounded, 0));
        }
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            x: vec![0.0; lp.n_vars()],
            objective_value: 0.0,
            dual: Vec::new(),
            iterations: 0,
        });
    }

    // phase one
    let mut t = DMatrix::zeros(m, n + m + 1);
    t.view_mut((0, 0), (m, n)).copy_from(&a);
    for i in 0..m {
        t[(i, n + i)] = 1.0;
        t[(i, n + m)] = b[i];
    }
    let mut z = vec![0.0; n + m + 1];
    for i in 0..m {
        for j in 0..n {
            z[j] -= a[(i, j)];
        }
        z[n + m] -= b[i];
    }
    let mut tab = Tableau {
        t,
        z,
        basis: (n..n + m).collect(),
        iterations: 0,
        cap,
    };
    tab.run(n + m, tol)?;
    let b_scale = b.iter().fold(1.0_f64, |s, x| s.max(x.abs()));
    let infeasibility = -tab.z[n + m];
    if infeasibility > tol * b_scale {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, tab.iterations));
    }

    // drive artificial variables out of the basis; rows where that fails are redundant
    let mut keep_rows: Vec<usize> = Vec::new();
    for i in 0..m {
        if tab.basis[i] >= n {
            let best = (0..n)
                .map(|j| (j, tab.t[(i, j)].abs()))
                .filter(|&(_, v)| v > 1e-9)
                .max_by(|x, y| x.1.total_cmp(&y.1));
            if let Some((j, _)) = best {
                tab.pivot(i, j);
            }
        }
    }
    for i in 0..m {
        if tab.basis[i] < n {
            keep_rows.push(i);
        }
    }
    let basis: Vec<usize> = keep_rows.iter().map(|&i| tab.basis[i]).collect();
    let iterations = tab.iterations;

    // phase two on the kept rows of the sign-normalized system
    let a_kept = DMatrix::from_fn(keep_rows.len(), n, |r, c| a[(keep_rows[r], c)]);
    let b_kept = DVector::from_fn(keep_rows.len(), |r, _| b[keep_rows[r]]);
    let c = DVector::from_column_slice(&c_std);

    let mut tab = rebuild(&a_kept, &b_kept, &c, basis, iterations, cap)
        .ok_or(LpError::SingularBasis)?;
    let mut refactors = 0;
    let (x_full, y_kept) = loop {
        match tab.run(n, tol)? {
            Outcome::Unbounded => {
                return Ok(LpSolution::without_point(LpStatus::Unbounded, tab.iterations));
            }
            Outcome::Optimal => {}
        }
        let (x, y, reduced) = exact_point(&a_kept, &b_kept, &c, &tab.basis)
            .ok_or(LpError::SingularBasis)?;
        let certified = reduced.iter().all(|&d| d >= -tol);
        if certified || refactors >= MAX_REFACTORS {
            break (x, y);
        }
        refactors += 1;
        let it = tab.iterations;
        tab = rebuild(&a_kept, &b_kept, &c, tab.basis.clone(), it, cap)
            .ok_or(LpError::SingularBasis)?;
    };

    let mut dual = vec![0.0; m];
    for (r, &i) in keep_rows.iter().enumerate() {
        dual[i] = sign[i] * y_kept[r];
    }
    let mut x: Vec<f64> = x_full.iter().take(lp.n_vars()).map(|&v| v.max(0.0)).collect();
    for (j, u) in lp.upper_bounds().iter().enumerate() {
        if let Some(u) = u {
            x[j] = x[j].min(*u);
        }
    }
    let objective_value = x.iter().zip(lp.objective()).map(|(a, b)| a * b).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
        dual,
        iterations: tab.iterations,
    })
}

/// Tableau for `basis` computed directly from the data.
fn rebuild(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
    basis: Vec<usize>,
    iterations: usize,
    cap: usize,
) -> Option<Tableau> {
    let m = a.nrows();
    let n = a.ncols();
    let bm = DMatrix::from_fn(m, m, |r, k| a[(r, basis[k])]);
    let lu = bm.lu();
    let mut aug = DMatrix::zeros(m, n + 1);
    aug.view_mut((0, 0), (m, n)).copy_from(a);
    aug.set_column(n, b);
    let t = lu.solve(&aug)?;
    let cb = DVector::from_fn(m, |k, _| c[basis[k]]);
    let mut z = vec![0.0; n + 1];
    for j in 0..n {
        z[j] = c[j] - cb.dot(&t.column(j));
    }
    z[n] = -cb.dot(&t.column(n));
    for &j in &basis {
        z[j] = 0.0;
    }
    Some(Tableau {
        t,
        z,
        basis,
        iterations,
        cap,
    })
}

/// Basic solution, dual vector and reduced costs for `basis`.
fn exact_point(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
    basis: &[usize],
) -> Option<(Vec<f64>, DVector<f64>, Vec<f64>)> {
    let m = a.nrows();
    let n = a.ncols();
    let bm = DMatrix::from_fn(m, m, |r, k| a[(r, basis[k])]);
    let xb = bm.clone().lu().solve(b)?;
    let cb = DVector::from_fn(m, |k, _| c[basis[k]]);
    let y = bm.transpose().lu().solve(&cb)?;
    let mut x = vec![0.0; n];
    for (k, &j) in basis.iter().enumerate() {
        x[j] = xb[k];
    }
    let reduced: Vec<f64> = (0..n).map(|j| c[j] - a.column(j).dot(&y)).collect();
    Some((x, y, reduced))
}
