//! Vertex enumeration for bounded low-dimensional polytopes by incremental
//! half-space insertion (double description in vertex form).

use nalgebra::{DMatrix, DVector};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::numeric;

use super::{Polytope, VertexSet, TOL_FEAS, VERTEX_DIM_CAP};

const TOL_MERGE: f64 = 1e-9;
const TOL_CUT: f64 = 1e-9;

struct Vertex {
    point: DVector<f64>,
    /// Active constraint indices; 0..2d are the virtual seed-box rows, the
    /// polytope rows follow shifted by 2d.
    active: BTreeSet<usize>,
}

pub(super) fn exact_vertices(p: &Polytope) -> Result<VertexSet> {
    let d = p.dim();
    if d == 0 {
        return Err(Error::dim("vertex enumeration in dimension 0"));
    }
    if d > VERTEX_DIM_CAP {
        return Err(Error::InvalidArgument(format!(
            "vertex enumeration capped at dimension {VERTEX_DIM_CAP} (got {d}); \
             use the box hull instead"
        )));
    }
    let q = p.normalized().dedup_rows();
    // bounding box doubles as the boundedness check
    let (lo, hi) = q.bounding_box()?;
    let pad = DVector::from_fn(d, |i, _| 1e-6 + 1e-6 * (hi[i] - lo[i]).abs());
    let lo = &lo - &pad;
    let hi = &hi + &pad;

    // seed-box facet normals: row i is e_i (<= hi), row d+i is -e_i (<= -lo)
    let normal = |idx: usize| -> DVector<f64> {
        if idx < d {
            DVector::from_fn(d, |k, _| if k == idx { 1.0 } else { 0.0 })
        } else if idx < 2 * d {
            DVector::from_fn(d, |k, _| if k == idx - d { -1.0 } else { 0.0 })
        } else {
            q.a.row(idx - 2 * d).transpose()
        }
    };

    let mut verts: Vec<Vertex> = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        let point = DVector::from_fn(d, |i, _| if mask >> i & 1 == 1 { hi[i] } else { lo[i] });
        let active: BTreeSet<usize> = (0..d)
            .map(|i| if mask >> i & 1 == 1 { i } else { d + i })
            .collect();
        verts.push(Vertex { point, active });
    }

    for row in 0..q.nrows() {
        let dir = q.a.row(row).transpose();
        let off = q.b[row];
        let vals: Vec<f64> = verts.iter().map(|v| dir.dot(&v.point) - off).collect();
        if vals.iter().all(|&v| v <= TOL_CUT) {
            // record boundary contacts and move on
            for (v, &val) in verts.iter_mut().zip(&vals) {
                if val.abs() <= TOL_CUT {
                    v.active.insert(2 * d + row);
                }
            }
            continue;
        }

        let keep_idx: Vec<usize> = (0..verts.len()).filter(|&i| vals[i] <= TOL_CUT).collect();
        let cut_idx: Vec<usize> = (0..verts.len()).filter(|&i| vals[i] > TOL_CUT).collect();
        if keep_idx.is_empty() {
            return Err(Error::EmptySet("vertex enumeration on empty polytope".into()));
        }

        let mut new_verts: Vec<Vertex> = Vec::new();
        for &u in &keep_idx {
            if vals[u] > -TOL_CUT {
                continue; // on the hyperplane already; survives as-is
            }
            for &w in &cut_idx {
                let common: Vec<usize> = verts[u]
                    .active
                    .intersection(&verts[w].active)
                    .copied()
                    .collect();
                if common.len() < d - 1 {
                    continue;
                }
                // adjacency: the shared active normals must span d-1 dims
                let mut m = DMatrix::zeros(common.len(), d);
                for (k, &idx) in common.iter().enumerate() {
                    m.row_mut(k).copy_from(&normal(idx).transpose());
                }
                if numeric::numerical_rank(&m) != d - 1 {
                    continue;
                }
                let (vu, vw) = (vals[u], vals[w]);
                let t = vu / (vu - vw); // in (0, 1)
                let point = &verts[u].point + (&verts[w].point - &verts[u].point) * t;
                let mut active: BTreeSet<usize> = common.into_iter().collect();
                active.insert(2 * d + row);
                new_verts.push(Vertex { point, active });
            }
        }

        let mut next: Vec<Vertex> = Vec::new();
        for i in keep_idx {
            let mut v = Vertex {
                point: verts[i].point.clone(),
                active: verts[i].active.clone(),
            };
            if vals[i].abs() <= TOL_CUT {
                v.active.insert(2 * d + row);
            }
            next.push(v);
        }
        for v in new_verts {
            merge_push(&mut next, v);
        }
        verts = next;
    }

    // final filter against the true rows
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in verts {
        if q.violation(&v.point) <= 10.0 * TOL_FEAS
            && !out.iter().any(|u| (u - &v.point).amax() <= TOL_MERGE)
        {
            out.push(v.point);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySet("no vertices found".into()));
    }
    Ok(VertexSet { vertices: out })
}

fn merge_push(list: &mut Vec<Vertex>, v: Vertex) {
    for existing in list.iter_mut() {
        if (&existing.point - &v.point).amax() <= TOL_MERGE {
            existing.active.extend(v.active.iter().copied());
            return;
        }
    }
    list.push(v);
}
