//! Half-space polytope kernel: membership, intersection, scaling, erosion,
//! projection, redundancy removal, Chebyshev centers, vertex enumeration,
//! and invariant-set iterations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric;

pub mod lp;
mod project;
mod vertices;

pub use lp::LpOutcome;

/// Feasibility tolerance (absolute, on normalized rows).
pub const TOL_FEAS: f64 = 1e-8;
/// Redundancy-removal tolerance.
pub const TOL_RED: f64 = 1e-9;
/// Mutual-inclusion tolerance for set-equality tests.
pub const TOL_SET_EQ: f64 = 1e-7;
/// Dimension cap for exact vertex enumeration.
pub const VERTEX_DIM_CAP: usize = 6;
/// Intermediate row cap for Fourier-Motzkin elimination.
pub const PROJECTION_ROW_CAP: usize = 200_000;
/// Iteration cap for invariant-set recursions.
pub const INVARIANT_MAX_ITER: usize = 500;

/// Convex polytope in half-space representation: rows `a_r x <= b_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    normalized: bool,
}

/// Explicit vertex list of a polytope.
#[derive(Debug, Clone)]
pub struct VertexSet {
    pub vertices: Vec<DVector<f64>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Single vertex at the origin of dimension `d` (the degenerate
    /// disturbance set {0}).
    pub fn origin(d: usize) -> Self {
        VertexSet {
            vertices: vec![DVector::zeros(d)],
        }
    }
}

/// Result of a fixed-point invariant-set recursion.
#[derive(Debug, Clone)]
pub struct InvariantSet {
    pub set: Polytope,
    /// True when the recursion reached a two-way-inclusion fixed point.
    pub certified: bool,
    pub iterations: usize,
}

impl Polytope {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::dim(format!(
                "polytope: {} rows vs {} offsets",
                a.nrows(),
                b.len()
            )));
        }
        if !numeric::all_finite(&a) || !numeric::all_finite_vec(&b) {
            return Err(Error::NonFinite("polytope data".into()));
        }
        Ok(Polytope {
            a,
            b,
            normalized: false,
        })
    }

    /// The whole space (no rows).
    pub fn whole_space(dim: usize) -> Self {
        Polytope {
            a: DMatrix::zeros(0, dim),
            b: DVector::zeros(0),
            normalized: true,
        }
    }

    /// Axis-aligned box `lo <= x <= hi`.
    pub fn from_box(lo: &DVector<f64>, hi: &DVector<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::dim("box bounds dimension mismatch"));
        }
        let d = lo.len();
        let mut a = DMatrix::zeros(2 * d, d);
        let mut b = DVector::zeros(2 * d);
        for i in 0..d {
            a[(i, i)] = 1.0;
            b[i] = hi[i];
            a[(d + i, i)] = -1.0;
            b[d + i] = -lo[i];
        }
        Polytope::new(a, b)
    }

    /// Symmetric box `|x_i| <= r_i`.
    pub fn symmetric_box(radii: &DVector<f64>) -> Result<Self> {
        Polytope::from_box(&(-radii), radii)
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Row-normalized copy; zero rows with a non-negative offset are dropped,
    /// zero rows with a negative offset are kept (they mark emptiness).
    pub fn normalized(&self) -> Polytope {
        if self.normalized {
            return self.clone();
        }
        let mut rows = Vec::new();
        for r in 0..self.nrows() {
            let norm = self.a.row(r).norm();
            if norm <= 1e-300 {
                if self.b[r] < -TOL_FEAS {
                    rows.push((DVector::zeros(self.dim()), -1.0));
                }
                continue;
            }
            rows.push((self.a.row(r).transpose() / norm, self.b[r] / norm));
        }
        let mut a = DMatrix::zeros(rows.len(), self.dim());
        let mut b = DVector::zeros(rows.len());
        for (k, (dir, off)) in rows.iter().enumerate() {
            a.row_mut(k).copy_from(&dir.transpose());
            b[k] = *off;
        }
        Polytope {
            a,
            b,
            normalized: true,
        }
    }

    /// Membership up to `TOL_FEAS` on normalized rows.
    pub fn contains(&self, x: &DVector<f64>) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::dim(format!(
                "point dim {} vs polytope dim {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.violation(x) <= TOL_FEAS)
    }

    /// Largest normalized row violation at `x` (negative inside).
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for r in 0..self.nrows() {
            let norm = self.a.row(r).norm().max(1e-300);
            let v = (self.a.row(r).transpose().dot(x) - self.b[r]) / norm;
            worst = worst.max(v);
        }
        if self.nrows() == 0 {
            f64::NEG_INFINITY
        } else {
            worst
        }
    }

    /// Stack the rows of both polytopes.
    pub fn intersect(&self, other: &Polytope) -> Result<Polytope> {
        if self.dim() != other.dim() {
            return Err(Error::dim("intersection dimension mismatch"));
        }
        let a = numeric::vstack(&[&self.a, &other.a]);
        let b = numeric::vcat(&[&self.b, &other.b]);
        Polytope::new(a, b)
    }

    /// `{c} + sigma * (P - {c})` for `sigma >= 0`; `c` must lie strictly
    /// inside `P`.
    pub fn scale_about_center(&self, c: &DVector<f64>, sigma: f64) -> Result<Polytope> {
        if c.len() != self.dim() {
            return Err(Error::dim("scaling center dimension mismatch"));
        }
        if !(sigma >= 0.0) {
            return Err(Error::InvalidArgument("scaling factor must be >= 0".into()));
        }
        if self.violation(c) > TOL_FEAS {
            return Err(Error::InvalidArgument(
                "scaling center lies outside the polytope".into(),
            ));
        }
        let gc = &self.a * c;
        let b = DVector::from_fn(self.nrows(), |r, _| sigma * self.b[r] + (1.0 - sigma) * gc[r]);
        Polytope::new(self.a.clone(), b)
    }

    /// `{x | x + E d in P for all d in conv(D)}`: rows keep their normals and
    /// the offsets tighten by the support of `E*D` in each row direction.
    pub fn erode_by_image(&self, e: &DMatrix<f64>, d_vertices: &VertexSet) -> Result<Polytope> {
        if d_vertices.is_empty() {
            return Err(Error::InvalidArgument("empty disturbance vertex set".into()));
        }
        if e.nrows() != self.dim() {
            return Err(Error::dim("erosion image row count mismatch"));
        }
        for v in &d_vertices.vertices {
            if v.len() != e.ncols() {
                return Err(Error::dim("disturbance vertex dimension mismatch"));
            }
        }
        let mut b = self.b.clone();
        for r in 0..self.nrows() {
            let ge = (self.a.row(r) * e).transpose();
            let h = d_vertices
                .vertices
                .iter()
                .map(|v| ge.dot(v))
                .fold(f64::NEG_INFINITY, f64::max);
            b[r] -= h;
        }
        Polytope::new(self.a.clone(), b)
    }

    /// Support query `max a'x` over the polytope.
    pub fn support(&self, dir: &DVector<f64>) -> Result<LpOutcome> {
        lp::maximize(dir, &self.a, &self.b)
    }

    /// Chebyshev center and inradius. Errors with `EmptySet` when the set is
    /// empty, `Unbounded` when arbitrarily large balls fit.
    pub fn chebyshev_center(&self) -> Result<(DVector<f64>, f64)> {
        let p = self.normalized();
        let d = p.dim();
        if p.nrows() == 0 {
            return Err(Error::Unbounded("chebyshev center of whole space".into()));
        }
        // zero rows marking emptiness
        for r in 0..p.nrows() {
            if p.a.row(r).norm() <= 1e-300 && p.b[r] < -TOL_FEAS {
                return Err(Error::EmptySet("contradictory zero row".into()));
            }
        }
        let mut a = DMatrix::zeros(p.nrows(), d + 1);
        a.view_mut((0, 0), (p.nrows(), d)).copy_from(&p.a);
        for r in 0..p.nrows() {
            a[(r, d)] = 1.0;
        }
        let mut c = DVector::zeros(d + 1);
        c[d] = 1.0;
        match lp::maximize(&c, &a, &p.b)? {
            LpOutcome::Optimal { x, value } => {
                if value < -TOL_FEAS {
                    return Err(Error::EmptySet(format!(
                        "empty polytope (depth {:.3e})",
                        -value
                    )));
                }
                Ok((x.rows(0, d).into_owned(), value))
            }
            LpOutcome::Unbounded => Err(Error::Unbounded("chebyshev center".into())),
            LpOutcome::Infeasible => Err(Error::EmptySet("chebyshev infeasible".into())),
        }
    }

    /// True when no point satisfies all rows (up to tolerance).
    pub fn is_empty(&self) -> Result<bool> {
        match self.chebyshev_center() {
            Ok((_, r)) => Ok(r < -TOL_FEAS),
            Err(Error::EmptySet(_)) => Ok(true),
            Err(Error::Unbounded(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// `self` included in `other` up to `tol` (per-facet support LPs).
    pub fn included_in(&self, other: &Polytope, tol: f64) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::dim("inclusion dimension mismatch"));
        }
        let q = other.normalized();
        for r in 0..q.nrows() {
            let dir = q.a.row(r).transpose();
            match lp::maximize(&dir, &self.a, &self.b)? {
                LpOutcome::Optimal { value, .. } => {
                    if value > q.b[r] + tol {
                        return Ok(false);
                    }
                }
                LpOutcome::Unbounded => return Ok(false),
                LpOutcome::Infeasible => return Ok(true), // empty set in anything
            }
        }
        Ok(true)
    }

    /// Set equality by mutual inclusion at `TOL_SET_EQ`.
    pub fn set_eq(&self, other: &Polytope) -> Result<bool> {
        Ok(self.included_in(other, TOL_SET_EQ)? && other.included_in(self, TOL_SET_EQ)?)
    }

    /// Per-coordinate bounds via `2d` support LPs.
    pub fn bounding_box(&self) -> Result<(DVector<f64>, DVector<f64>)> {
        let d = self.dim();
        let mut lo = DVector::zeros(d);
        let mut hi = DVector::zeros(d);
        for i in 0..d {
            let mut dir = DVector::zeros(d);
            dir[i] = 1.0;
            hi[i] = match self.support(&dir)? {
                LpOutcome::Optimal { value, .. } => value,
                LpOutcome::Unbounded => {
                    return Err(Error::Unbounded(format!("coordinate {i} above")))
                }
                LpOutcome::Infeasible => return Err(Error::EmptySet("bounding box".into())),
            };
            dir[i] = -1.0;
            lo[i] = match self.support(&dir)? {
                LpOutcome::Optimal { value, .. } => -value,
                LpOutcome::Unbounded => {
                    return Err(Error::Unbounded(format!("coordinate {i} below")))
                }
                LpOutcome::Infeasible => return Err(Error::EmptySet("bounding box".into())),
            };
        }
        Ok((lo, hi))
    }

    /// The `2^d` corners of the bounding box.
    pub fn box_hull_vertices(&self) -> Result<VertexSet> {
        let (lo, hi) = self.bounding_box()?;
        let d = self.dim();
        if d > 30 {
            return Err(Error::InvalidArgument(format!(
                "box hull in dimension {d} would enumerate 2^{d} corners"
            )));
        }
        let mut vertices = Vec::with_capacity(1usize << d);
        for mask in 0..(1usize << d) {
            let v = DVector::from_fn(d, |i, _| if mask >> i & 1 == 1 { hi[i] } else { lo[i] });
            vertices.push(v);
        }
        // collapse duplicates from flat coordinates
        let mut unique: Vec<DVector<f64>> = Vec::new();
        for v in vertices {
            if !unique.iter().any(|u| (u - &v).amax() <= 1e-12) {
                unique.push(v);
            }
        }
        Ok(VertexSet { vertices: unique })
    }

    /// Keep only the columns in `cols` (caller asserts the dropped columns
    /// carry no coefficient mass).
    pub fn restrict_columns(&self, cols: &[usize]) -> Polytope {
        let mut a = DMatrix::zeros(self.nrows(), cols.len());
        for (k, &c) in cols.iter().enumerate() {
            a.set_column(k, &self.a.column(c));
        }
        Polytope {
            a,
            b: self.b.clone(),
            normalized: false,
        }
    }

    /// Re-embed a column-restricted polytope into `full_dim` dimensions,
    /// placing column `k` at `cols[k]` and zeros elsewhere.
    pub fn embed_columns(&self, cols: &[usize], full_dim: usize) -> Polytope {
        let mut a = DMatrix::zeros(self.nrows(), full_dim);
        for (k, &c) in cols.iter().enumerate() {
            a.set_column(c, &self.a.column(k));
        }
        Polytope {
            a,
            b: self.b.clone(),
            normalized: self.normalized,
        }
    }

    /// Columns whose largest absolute coefficient exceeds `tol`.
    pub fn active_columns(&self, tol: f64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&c| self.a.column(c).amax() > tol)
            .collect()
    }

    /// Minimal half-space representation (same solution set up to
    /// tolerance). Clarkson's algorithm when an interior point exists, plain
    /// per-row LPs otherwise. Rows whose removal changes nothing beyond
    /// `TOL_RED` are dropped; unbounded relaxations count as "row needed".
    pub fn remove_redundant(&self) -> Result<Polytope> {
        let p = self.normalized().dedup_rows();
        let n = p.nrows();
        if n <= 1 {
            return Ok(p);
        }
        match p.chebyshev_center() {
            Ok((z, r)) if r > 10.0 * TOL_FEAS => p.remove_redundant_clarkson(&z),
            Ok(_) => p.remove_redundant_plain(),
            Err(Error::EmptySet(m)) => Err(Error::EmptySet(m)),
            Err(Error::Unbounded(_)) => p.remove_redundant_plain(),
            Err(e) => Err(e),
        }
    }

    /// Drop duplicate and dominated parallel rows (needs normalized rows).
    fn dedup_rows(&self) -> Polytope {
        let n = self.nrows();
        let d = self.dim();
        let mut keep: Vec<usize> = Vec::with_capacity(n);
        // bucket rows by a quantized direction key
        use std::collections::HashMap;
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for r in 0..n {
            let key: Vec<i64> = (0..d)
                .map(|c| (self.a[(r, c)] * 1e7).round() as i64)
                .collect();
            buckets.entry(key).or_default().push(r);
        }
        let mut dropped = vec![false; n];
        for rows in buckets.values() {
            for (i, &r) in rows.iter().enumerate() {
                if dropped[r] {
                    continue;
                }
                for &s in rows.iter().skip(i + 1) {
                    if dropped[s] {
                        continue;
                    }
                    let dot = self.a.row(r).transpose().dot(&self.a.row(s).transpose());
                    if dot >= 1.0 - 1e-12 {
                        // parallel: keep the tighter offset
                        if self.b[s] >= self.b[r] {
                            dropped[s] = true;
                        } else {
                            dropped[r] = true;
                            break;
                        }
                    }
                }
            }
        }
        for r in 0..n {
            if !dropped[r] {
                keep.push(r);
            }
        }
        self.take_rows(&keep)
    }

    fn take_rows(&self, rows: &[usize]) -> Polytope {
        let mut a = DMatrix::zeros(rows.len(), self.dim());
        let mut b = DVector::zeros(rows.len());
        for (k, &r) in rows.iter().enumerate() {
            a.row_mut(k).copy_from(&self.a.row(r));
            b[k] = self.b[r];
        }
        Polytope {
            a,
            b,
            normalized: self.normalized,
        }
    }

    /// Clarkson redundancy removal from a strictly interior point `z`.
    fn remove_redundant_clarkson(&self, z: &DVector<f64>) -> Result<Polytope> {
        let n = self.nrows();
        let d = self.dim();
        let mut essential: Vec<usize> = Vec::new();
        let mut state = vec![RowState::Pending; n];
        let mut queue: std::collections::VecDeque<usize> = (0..n).collect();

        while let Some(r) = queue.pop_front() {
            if state[r] != RowState::Pending {
                continue;
            }
            let dir = self.a.row(r).transpose();
            // LP over the current essential set, capped in the objective
            // direction so it cannot be unbounded.
            let mut a_e = DMatrix::zeros(essential.len() + 1, d);
            let mut b_e = DVector::zeros(essential.len() + 1);
            for (k, &j) in essential.iter().enumerate() {
                a_e.row_mut(k).copy_from(&self.a.row(j));
                b_e[k] = self.b[j];
            }
            a_e.row_mut(essential.len()).copy_from(&self.a.row(r));
            b_e[essential.len()] = self.b[r] + 1.0;

            let (x_star, value) = lp::maximize(&dir, &a_e, &b_e)?.optimal()?;
            if value <= self.b[r] - TOL_RED {
                state[r] = RowState::Redundant;
                continue;
            }
            // Ray-shoot from z toward the relaxed optimizer; the first row
            // hit is a facet.
            let mut ray = &x_star - z;
            if ray.norm() <= 1e-12 {
                ray = dir.clone();
            }
            let mut hit: Option<(usize, f64)> = None;
            for s in 0..n {
                if state[s] == RowState::Redundant {
                    continue;
                }
                let gs = self.a.row(s).transpose();
                let denom = gs.dot(&ray);
                if denom > 1e-12 {
                    let t = (self.b[s] - gs.dot(z)) / denom;
                    match hit {
                        None => hit = Some((s, t)),
                        Some((_, tb)) if t < tb - 1e-12 => hit = Some((s, t)),
                        _ => {}
                    }
                }
            }
            match hit {
                Some((s, _)) => {
                    if state[s] == RowState::Pending {
                        state[s] = RowState::Essential;
                        essential.push(s);
                    }
                    if s != r && state[r] == RowState::Pending {
                        queue.push_back(r);
                    }
                }
                None => {
                    // no row blocks the ray: r is needed to bound it
                    state[r] = RowState::Essential;
                    essential.push(r);
                }
            }
        }

        let mut kept: Vec<usize> = (0..n).filter(|&r| state[r] == RowState::Essential).collect();
        kept.sort_unstable();
        Ok(self.take_rows(&kept))
    }

    /// Per-row LP removal over the full remaining set (fallback for flat or
    /// unbounded polytopes).
    fn remove_redundant_plain(&self) -> Result<Polytope> {
        let n = self.nrows();
        let mut keep: Vec<bool> = vec![true; n];
        for r in 0..n {
            let others: Vec<usize> = (0..n).filter(|&s| s != r && keep[s]).collect();
            if others.is_empty() {
                continue;
            }
            let sub = self.take_rows(&others);
            let dir = self.a.row(r).transpose();
            match lp::maximize(&dir, &sub.a, &sub.b)? {
                LpOutcome::Optimal { value, .. } => {
                    if value <= self.b[r] - TOL_RED {
                        keep[r] = false;
                    }
                }
                // unbounded relaxation: the row is needed
                LpOutcome::Unbounded => {}
                LpOutcome::Infeasible => {
                    return Err(Error::EmptySet("redundancy removal on empty set".into()))
                }
            }
        }
        let kept: Vec<usize> = (0..n).filter(|&r| keep[r]).collect();
        Ok(self.take_rows(&kept))
    }

    /// Exact orthogonal projection onto the (sorted) coordinate subset
    /// `keep_dims` via Fourier-Motzkin elimination with pruning.
    pub fn project(&self, keep_dims: &[usize]) -> Result<Polytope> {
        project::project(self, keep_dims)
    }

    /// Exact vertex enumeration (double description); requires a bounded
    /// polytope of dimension at most `VERTEX_DIM_CAP`.
    pub fn exact_vertices(&self) -> Result<VertexSet> {
        vertices::exact_vertices(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowState {
    Pending,
    Essential,
    Redundant,
}

/// Maximal robust control invariant set for `xi+ = A_cl,j xi + B_j v0 + E d`
/// subject to `(xi, v0) in c_n`, computed as the fixed point of
/// `O^{i+1} = {xi in O^i | exists v0: (xi, v0) in c_n and
/// A_cl,j xi + B_j v0 + E d in O^i for all j and d}`.
pub fn max_robust_control_invariant(
    a_cl_vertices: &[DMatrix<f64>],
    b_vertices: &[DMatrix<f64>],
    e: &DMatrix<f64>,
    d_vertices: &VertexSet,
    c_n: &Polytope,
) -> Result<InvariantSet> {
    if a_cl_vertices.is_empty() || a_cl_vertices.len() != b_vertices.len() {
        return Err(Error::dim("vertex matrix lists empty or mismatched"));
    }
    let n_xi = a_cl_vertices[0].nrows();
    let n_v = b_vertices[0].ncols();
    if c_n.dim() != n_xi + n_v {
        return Err(Error::dim(format!(
            "c_n dimension {} vs xi+v0 dimension {}",
            c_n.dim(),
            n_xi + n_v
        )));
    }
    let xi_dims: Vec<usize> = (0..n_xi).collect();

    let mut omega = c_n
        .project(&xi_dims)?
        .remove_redundant()?;
    if omega.is_empty()? {
        return Err(Error::EmptySet(
            "feasible initial-state projection is empty".into(),
        ));
    }

    for it in 1..=INVARIANT_MAX_ITER {
        let pre = robust_pre_set(&omega, a_cl_vertices, b_vertices, e, d_vertices)?;
        let lifted = pre.intersect(c_n)?.remove_redundant().map_err(|e| match e {
            Error::EmptySet(_) => Error::EmptySet("invariant recursion emptied the set".into()),
            other => other,
        })?;
        let next = lifted
            .project(&xi_dims)?
            .intersect(&omega)?
            .remove_redundant()
            .map_err(|e| match e {
                Error::EmptySet(_) => Error::EmptySet("invariant recursion emptied the set".into()),
                other => other,
            })?;
        if next.is_empty()? {
            return Err(Error::EmptySet("invariant recursion emptied the set".into()));
        }
        if next.set_eq(&omega)? {
            return Ok(InvariantSet {
                set: next,
                certified: true,
                iterations: it,
            });
        }
        omega = next;
    }
    Ok(InvariantSet {
        set: omega,
        certified: false,
        iterations: INVARIANT_MAX_ITER,
    })
}

/// Rows over `(xi, v0)` enforcing `A_cl,j xi + B_j v0 + E d in target` for
/// every vertex pair and disturbance vertex.
fn robust_pre_set(
    target: &Polytope,
    a_cl_vertices: &[DMatrix<f64>],
    b_vertices: &[DMatrix<f64>],
    e: &DMatrix<f64>,
    d_vertices: &VertexSet,
) -> Result<Polytope> {
    let t = target.normalized();
    let n_xi = a_cl_vertices[0].nrows();
    let n_v = b_vertices[0].ncols();
    let eroded = t.erode_by_image(e, d_vertices)?;
    let n_j = a_cl_vertices.len();
    let mut a = DMatrix::zeros(n_j * t.nrows(), n_xi + n_v);
    let mut b = DVector::zeros(n_j * t.nrows());
    for (j, (acl, bj)) in a_cl_vertices.iter().zip(b_vertices).enumerate() {
        let wa = &t.a * acl;
        let wb = &t.a * bj;
        let base = j * t.nrows();
        a.view_mut((base, 0), (t.nrows(), n_xi)).copy_from(&wa);
        a.view_mut((base, n_xi), (t.nrows(), n_v)).copy_from(&wb);
        b.rows_mut(base, t.nrows()).copy_from(&eroded.b);
    }
    Polytope::new(a, b)
}

/// Robust positively invariant subset of `x_constraints` under `u = K xi`:
/// fixed point of `X^{i+1} = {xi in X^i | K xi in U,
/// A_cl,j xi + E d in X^i for all j, d}`.
pub fn rpi_terminal_set(
    a_cl_vertices: &[DMatrix<f64>],
    e: &DMatrix<f64>,
    d_vertices: &VertexSet,
    x_constraints: &Polytope,
    u_set: &Polytope,
    k_gain: &DMatrix<f64>,
) -> Result<InvariantSet> {
    if a_cl_vertices.is_empty() {
        return Err(Error::dim("empty vertex matrix list"));
    }
    let n_xi = a_cl_vertices[0].nrows();
    if x_constraints.dim() != n_xi || k_gain.ncols() != n_xi {
        return Err(Error::dim("terminal-set dimension mismatch"));
    }
    // initial set: state constraints plus K xi in U
    let ku_rows = Polytope::new(&u_set.a * k_gain, u_set.b.clone())?;
    let mut x = x_constraints
        .intersect(&ku_rows)?
        .remove_redundant()
        .map_err(|e| match e {
            Error::EmptySet(_) => Error::EmptySet("terminal recursion emptied the set".into()),
            other => other,
        })?;

    for it in 1..=INVARIANT_MAX_ITER {
        let t = x.normalized();
        let eroded = t.erode_by_image(e, d_vertices)?;
        let n_j = a_cl_vertices.len();
        let mut a = DMatrix::zeros(n_j * t.nrows(), n_xi);
        let mut b = DVector::zeros(n_j * t.nrows());
        for (j, acl) in a_cl_vertices.iter().enumerate() {
            let base = j * t.nrows();
            a.view_mut((base, 0), (t.nrows(), n_xi)).copy_from(&(&t.a * acl));
            b.rows_mut(base, t.nrows()).copy_from(&eroded.b);
        }
        let step = Polytope::new(a, b)?;
        let next = x.intersect(&step)?.remove_redundant().map_err(|e| match e {
            Error::EmptySet(_) => Error::EmptySet("terminal recursion emptied the set".into()),
            other => other,
        })?;
        if next.is_empty()? {
            return Err(Error::EmptySet("terminal recursion emptied the set".into()));
        }
        if next.set_eq(&x)? {
            return Ok(InvariantSet {
                set: next,
                certified: true,
                iterations: it,
            });
        }
        x = next;
    }
    Ok(InvariantSet {
        set: x,
        certified: false,
        iterations: INVARIANT_MAX_ITER,
    })
}

#[cfg(test)]
mod tests;
