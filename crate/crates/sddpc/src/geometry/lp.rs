//! Dense linear programming: maximize `c'x` subject to `A x <= b` with free
//! `x`.
//!
//! The problem is solved through its dual `min b'y s.t. A'y = c, y >= 0`
//! with a revised simplex, so the factored basis stays `d x d` no matter how
//! many rows `A` has. Dantzig pricing is used while the objective makes
//! progress; Bland's rule takes over on stalls to rule out cycling.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Outcome of an LP solve.
#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// Finite optimum attained at `x`.
    Optimal { x: DVector<f64>, value: f64 },
    /// The objective is unbounded above on the feasible set.
    Unbounded,
    /// `A x <= b` has no solution.
    Infeasible,
}

impl LpOutcome {
    pub fn optimal(self) -> Result<(DVector<f64>, f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Ok((x, value)),
            LpOutcome::Unbounded => Err(Error::Unbounded("lp".into())),
            LpOutcome::Infeasible => Err(Error::EmptySet("lp constraints infeasible".into())),
        }
    }
}

const TOL_COST: f64 = 1e-9;
const TOL_PIVOT: f64 = 1e-11;
const TOL_FEAS: f64 = 1e-7;
const STALL_LIMIT: usize = 50;

/// Maximize `c'x` over `{x | a x <= b}`.
///
/// Rows are normalized internally; rows with a (numerically) zero normal are
/// dropped when trivially satisfied and flag infeasibility otherwise. The
/// zero objective is only supported through a feasible-point query by the
/// caller (`c` must not be the zero vector).
pub fn maximize(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LpOutcome> {
    let dim = c.len();
    if a.ncols() != dim || a.nrows() != b.len() {
        return Err(Error::dim(format!(
            "lp: A is {}x{}, b has {}, c has {}",
            a.nrows(),
            a.ncols(),
            b.len(),
            dim
        )));
    }

    // Normalize rows, dropping zero rows.
    let mut rows: Vec<usize> = Vec::with_capacity(a.nrows());
    let mut an = DMatrix::zeros(a.nrows(), dim);
    let mut bn = DVector::zeros(a.nrows());
    let mut k = 0;
    for r in 0..a.nrows() {
        let norm = a.row(r).norm();
        if norm <= 1e-300 {
            if b[r] < -TOL_FEAS {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        an.row_mut(k).copy_from(&(a.row(r) / norm));
        bn[k] = b[r] / norm;
        rows.push(r);
        k += 1;
    }
    let an = an.rows(0, k).into_owned();
    let bn = bn.rows(0, k).into_owned();
    let n = k;

    if c.norm() == 0.0 {
        return Err(Error::InvalidArgument("lp: zero objective".into()));
    }
    if n == 0 {
        return Ok(LpOutcome::Unbounded);
    }

    Simplex::new(&an, &bn, c).solve()
}

/// Revised simplex state for `min q'w s.t. G w = h, w >= 0` where
/// `G = A'` (d x n), `h = c`, `q = b`. Columns `n..n+d` are artificials.
struct Simplex<'a> {
    a: &'a DMatrix<f64>,
    b: &'a DVector<f64>,
    c: &'a DVector<f64>,
    d: usize,
    n: usize,
    /// Sign carried by artificial column i (so the start basis is feasible).
    art_sign: Vec<f64>,
    basis: Vec<usize>,
    w_basic: DVector<f64>,
}

impl<'a> Simplex<'a> {
    fn new(a: &'a DMatrix<f64>, b: &'a DVector<f64>, c: &'a DVector<f64>) -> Simplex<'a> {
        let d = c.len();
        let n = a.nrows();
        let art_sign: Vec<f64> = (0..d).map(|i| if c[i] >= 0.0 { 1.0 } else { -1.0 }).collect();
        let basis: Vec<usize> = (n..n + d).collect();
        let w_basic = DVector::from_fn(d, |i, _| c[i].abs());
        Simplex {
            a,
            b,
            c,
            d,
            n,
            art_sign,
            basis,
            w_basic,
        }
    }

    /// Column j of G (= row j of A for real columns, signed unit vector for
    /// artificials).
    fn column(&self, j: usize) -> DVector<f64> {
        if j < self.n {
            self.a.row(j).transpose()
        } else {
            let i = j - self.n;
            let mut e = DVector::zeros(self.d);
            e[i] = self.art_sign[i];
            e
        }
    }

    fn basis_matrix(&self) -> DMatrix<f64> {
        let mut gb = DMatrix::zeros(self.d, self.d);
        for (k, &j) in self.basis.iter().enumerate() {
            gb.set_column(k, &self.column(j));
        }
        gb
    }

    fn solve(mut self) -> Result<LpOutcome> {
        // Phase 1: drive the artificials to zero.
        if self.w_basic.amax() > 0.0 {
            match self.run(true)? {
                RunEnd::Converged => {
                    let infeas: f64 = self
                        .basis
                        .iter()
                        .zip(self.w_basic.iter())
                        .filter(|(&j, _)| j >= self.n)
                        .map(|(_, &w)| w)
                        .sum();
                    if infeas > 1e-7 {
                        // Dual infeasible: the primal is unbounded.
                        return Ok(LpOutcome::Unbounded);
                    }
                }
                RunEnd::UnboundedBelow => {
                    return Err(Error::Numerical("lp: phase-1 unbounded".into()))
                }
            }
        }

        // Phase 2 on the true cost.
        match self.run(false)? {
            RunEnd::Converged => self.recover(),
            // Dual unbounded below means the primal constraints are empty.
            RunEnd::UnboundedBelow => Ok(LpOutcome::Infeasible),
        }
    }

    fn cost(&self, j: usize, phase1: bool) -> f64 {
        if phase1 {
            if j >= self.n {
                1.0
            } else {
                0.0
            }
        } else if j < self.n {
            self.b[j]
        } else {
            0.0
        }
    }

    fn run(&mut self, phase1: bool) -> Result<RunEnd> {
        let max_iter = 10_000 + 20 * self.d;
        let mut bland = false;
        let mut stall = 0usize;
        let mut last_obj = f64::INFINITY;

        for _ in 0..max_iter {
            let gb = self.basis_matrix();
            let lu_t = gb.transpose().lu();
            let qb = DVector::from_fn(self.d, |k, _| self.cost(self.basis[k], phase1));
            let pi = lu_t
                .solve(&qb)
                .ok_or_else(|| Error::Numerical("lp: singular basis".into()))?;

            // Reduced costs over real columns (vectorized) and artificials.
            let mut entering: Option<(usize, f64)> = None;
            let api = self.a * &pi;
            for j in 0..self.n {
                if self.basis.contains(&j) {
                    continue;
                }
                let r = self.cost(j, phase1) - api[j];
                if r < -TOL_COST {
                    match (&entering, bland) {
                        (_, true) => {
                            entering = Some((j, r));
                            break;
                        }
                        (Some((_, best)), false) if r >= *best => {}
                        _ => entering = Some((j, r)),
                    }
                }
            }
            // Artificials may only re-enter during phase 1 (harmless) and are
            // barred in phase 2.
            let Some((j_in, _)) = entering else {
                return Ok(RunEnd::Converged);
            };

            let gj = self.column(j_in);
            let lu = gb.lu();
            let t = lu
                .solve(&gj)
                .ok_or_else(|| Error::Numerical("lp: singular basis".into()))?;

            // Ratio test; ties break toward artificials (to flush them) and
            // then by smallest variable index, which is Bland's rule.
            // Outside phase 1 a basic artificial must never grow back above
            // zero, so a pivot that would push one negative-t artificial up
            // leaves at step zero (kicking the artificial out instead).
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.d {
                let art_block = !phase1 && self.basis[i] >= self.n && t[i] < -TOL_PIVOT;
                if t[i] > TOL_PIVOT || art_block {
                    let ratio = if art_block {
                        0.0
                    } else {
                        self.w_basic[i] / t[i]
                    };
                    let better = match leave {
                        None => true,
                        Some((li, best)) => {
                            if ratio < best - 1e-12 {
                                true
                            } else if ratio > best + 1e-12 {
                                false
                            } else {
                                let (ci, cb) = (self.basis[i], self.basis[li]);
                                if bland {
                                    ci < cb
                                } else {
                                    let cand_art = ci >= self.n;
                                    let cur_art = cb >= self.n;
                                    (cand_art && !cur_art) || (cand_art == cur_art && ci < cb)
                                }
                            }
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((i_out, step)) = leave else {
                return Ok(RunEnd::UnboundedBelow);
            };

            for i in 0..self.d {
                self.w_basic[i] -= step * t[i];
                if self.w_basic[i] < 0.0 {
                    self.w_basic[i] = 0.0;
                }
            }
            self.w_basic[i_out] = step;
            self.basis[i_out] = j_in;

            let obj: f64 = self
                .basis
                .iter()
                .zip(self.w_basic.iter())
                .map(|(&j, &w)| self.cost(j, phase1) * w)
                .sum();
            if obj < last_obj - 1e-12 {
                last_obj = obj;
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
        }
        Err(Error::Numerical("lp: iteration cap exceeded".into()))
    }

    /// Recover the primal optimizer from the active rows of the final basis.
    fn recover(&self) -> Result<LpOutcome> {
        let active: Vec<usize> = self.basis.iter().copied().filter(|&j| j < self.n).collect();
        let mut aact = DMatrix::zeros(active.len(), self.d);
        let mut bact = DVector::zeros(active.len());
        for (k, &j) in active.iter().enumerate() {
            aact.row_mut(k).copy_from(&self.a.row(j));
            bact[k] = self.b[j];
        }
        let x = if active.len() == self.d {
            match aact.clone().lu().solve(&bact) {
                Some(x) => x,
                None => crate::numeric::pinv(&aact)? * &bact,
            }
        } else {
            crate::numeric::pinv(&aact)? * &bact
        };

        // The recovered point must satisfy every row.
        let slack = self.a * &x - self.b;
        if slack.iter().any(|&s| s > 1e-6) {
            return Err(Error::Numerical(format!(
                "lp: optimizer violates constraints by {:.3e}",
                slack.max()
            )));
        }
        let value = self.c.dot(&x);
        Ok(LpOutcome::Optimal { x, value })
    }
}

enum RunEnd {
    Converged,
    UnboundedBelow,
}
