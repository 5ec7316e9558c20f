//! Exact orthogonal projection by Fourier-Motzkin elimination with
//! redundancy pruning after every eliminated variable.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{Polytope, PROJECTION_ROW_CAP};

const TOL_ZERO: f64 = 1e-11;

pub(super) fn project(p: &Polytope, keep_dims: &[usize]) -> Result<Polytope> {
    let d = p.dim();
    if keep_dims.is_empty() {
        return Err(Error::InvalidArgument("projection onto no coordinates".into()));
    }
    for w in keep_dims.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidArgument(
                "keep_dims must be strictly increasing".into(),
            ));
        }
    }
    if *keep_dims.last().unwrap() >= d {
        return Err(Error::dim(format!(
            "keep dimension {} outside polytope dimension {d}",
            keep_dims.last().unwrap()
        )));
    }

    // Track the original index of every remaining column.
    let mut cols: Vec<usize> = (0..d).collect();
    let mut cur = p.normalized();

    while cols.len() > keep_dims.len() {
        // Greedy order: eliminate the variable with the smallest
        // positive*negative row-count product.
        let mut best: Option<(usize, usize)> = None;
        for (local, &orig) in cols.iter().enumerate() {
            if keep_dims.binary_search(&orig).is_ok() {
                continue;
            }
            let (mut pos, mut neg) = (0usize, 0usize);
            for r in 0..cur.nrows() {
                let v = cur.a[(r, local)];
                if v > TOL_ZERO {
                    pos += 1;
                } else if v < -TOL_ZERO {
                    neg += 1;
                }
            }
            let cost = pos * neg;
            if best.map_or(true, |(_, c)| cost < c) {
                best = Some((local, cost));
            }
        }
        let (local, _) = best.expect("an eliminable column must remain");

        cur = eliminate(&cur, local)?;
        cols.remove(local);
        cur = prune(cur)?;
    }
    debug_assert_eq!(cols, keep_dims);
    Ok(cur)
}

fn eliminate(p: &Polytope, col: usize) -> Result<Polytope> {
    let d = p.dim();
    let mut zero_rows: Vec<usize> = Vec::new();
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for r in 0..p.nrows() {
        let v = p.a[(r, col)];
        if v > TOL_ZERO {
            pos.push(r);
        } else if v < -TOL_ZERO {
            neg.push(r);
        } else {
            zero_rows.push(r);
        }
    }
    let total = zero_rows.len() + pos.len() * neg.len();
    if total > PROJECTION_ROW_CAP {
        return Err(Error::ProjectionBlowup {
            cap: PROJECTION_ROW_CAP,
        });
    }

    let keep_cols: Vec<usize> = (0..d).filter(|&c| c != col).collect();
    let mut a = DMatrix::zeros(total, d - 1);
    let mut b = DVector::zeros(total);
    let mut k = 0;
    for &r in &zero_rows {
        for (cc, &c) in keep_cols.iter().enumerate() {
            a[(k, cc)] = p.a[(r, c)];
        }
        b[k] = p.b[r];
        k += 1;
    }
    for &i in &pos {
        let ci = p.a[(i, col)];
        for &j in &neg {
            let cj = -p.a[(j, col)];
            for (cc, &c) in keep_cols.iter().enumerate() {
                a[(k, cc)] = p.a[(i, c)] / ci + p.a[(j, c)] / cj;
            }
            b[k] = p.b[i] / ci + p.b[j] / cj;
            k += 1;
        }
    }
    Polytope::new(a, b)
}

fn prune(p: Polytope) -> Result<Polytope> {
    if p.nrows() <= 1 {
        return Ok(p.normalized());
    }
    p.remove_redundant()
}
