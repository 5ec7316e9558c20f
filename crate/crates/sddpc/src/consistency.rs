//! Consistency of disturbance data: the projector-based parameterization of
//! all disturbance trajectories that, together with the recorded
//! input-output data, could have been generated by some ARX system, the
//! polytopic set of admissible free parameters, implied system matrices, and
//! prior-knowledge injection.

use nalgebra::{DMatrix, DVector};

use crate::behavioral::{self, IoTrajectory};
use crate::error::{Error, Result};
use crate::geometry::{Polytope, VERTEX_DIM_CAP};
use crate::numeric;

/// Condition-number level of `S` above which construction flags the model.
pub const COND_WARN: f64 = 1e8;

/// Where the vertex list of the consistent-parameter set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexProvenance {
    ExactVertices,
    BoxHull,
}

/// Identification artifacts shared by every downstream stage.
///
/// `dc` lives over the column-major vectorization of the free disturbance
/// block (a `p x free_dim` matrix; the data index varies fastest).
#[derive(Debug, Clone)]
pub struct ConsistencyModel {
    pub s: DMatrix<f64>,
    pub s_pinv: DMatrix<f64>,
    pub pi_s: DMatrix<f64>,
    pub gamma1: DMatrix<f64>,
    pub gamma2: DMatrix<f64>,
    pub gamma_a1: DMatrix<f64>,
    pub gamma_a2: DMatrix<f64>,
    pub free_dim: usize,
    pub dc: Polytope,
    /// Output data H_1(y^d) kept for residual checks.
    pub h1_y: DMatrix<f64>,
    /// Condition number of `S`; above `COND_WARN` identification is fragile.
    pub s_condition: f64,
    pub m: usize,
    pub p: usize,
    pub n_xi: usize,
    pub t: usize,
}

/// Vertex representation of the set of consistent system parameter matrices
/// `[Phi Psi]`.
#[derive(Debug, Clone)]
pub struct SystemMatrixSet {
    pub vertices: Vec<DMatrix<f64>>,
    pub provenance: VertexProvenance,
    /// Free-parameter blocks behind each vertex, in the same order.
    pub free_blocks: Vec<DMatrix<f64>>,
}

impl SystemMatrixSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Build the consistency parameterization from a recorded trajectory and the
/// disturbance support set.
pub fn build_consistency_model(traj: &IoTrajectory, d_set: &Polytope) -> Result<ConsistencyModel> {
    let (m, p) = (traj.input_dim(), traj.output_dim());
    let n_xi = traj.xi_dim();
    let t = traj.data_len();
    let free_dim = n_xi + m;
    if d_set.dim() != p {
        return Err(Error::dim("disturbance set dimension must equal p"));
    }
    if t <= free_dim {
        return Err(Error::dim(format!(
            "data length {t} too short for {free_dim} free parameters"
        )));
    }

    let xi_data = behavioral::xi_data_matrix(traj, t)?;
    let u_data = behavioral::h1_matrix(&traj.data_inputs());
    let h1_y = behavioral::h1_matrix(&traj.data_outputs());
    let s = numeric::vstack(&[&xi_data, &u_data]);

    let sv = s.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if numeric::numerical_rank(&s) < free_dim {
        return Err(Error::RankDeficient(
            format!("data matrix S ({free_dim} x {t}) is not full row rank"),
            smin,
        ));
    }
    let s_condition = smax / smin;
    let s_pinv = numeric::pinv(&s)?;
    let pi_s = DMatrix::identity(t, t) - &s_pinv * &s;

    // free-parameter solve: Pi0 := S, its leading block must be invertible
    let pi0_lead = s.columns(0, free_dim).into_owned();
    let gamma2 = numeric::solve_guarded(&pi0_lead, &s, 1e12, "leading block of S")?;
    let h_ls = &h1_y * &pi_s;
    let h_ls_lead = h_ls.columns(0, free_dim).into_owned();
    let gamma1 = &h_ls - &h_ls_lead * &gamma2;

    let gamma_a1 = (&h1_y - &gamma1) * &s_pinv;
    let gamma_a2 = -(&gamma2 * &s_pinv);

    // construction invariants
    let idem = (&pi_s * &pi_s - &pi_s).norm();
    if idem > 1e-8 {
        return Err(Error::Numerical(format!(
            "projector not idempotent (residual {idem:.3e})"
        )));
    }
    let annih = (&s * &pi_s).norm();
    if annih > 1e-8 * s.norm().max(1.0) {
        return Err(Error::Numerical(format!(
            "S * Pi_S != 0 (residual {annih:.3e})"
        )));
    }
    let lead_err = (gamma2.columns(0, free_dim) - DMatrix::<f64>::identity(free_dim, free_dim))
        .norm();
    if lead_err > 1e-8 {
        return Err(Error::Numerical(format!(
            "leading block of Gamma_2 deviates from identity ({lead_err:.3e})"
        )));
    }

    let dc = consistent_parameter_set(&gamma1, &gamma2, d_set, p, free_dim, t)?;

    Ok(ConsistencyModel {
        s,
        s_pinv,
        pi_s,
        gamma1,
        gamma2,
        gamma_a1,
        gamma_a2,
        free_dim,
        dc,
        h1_y,
        s_condition,
        m,
        p,
        n_xi,
        t,
    })
}

/// Rows of the consistent-parameter polytope: for every data index `t`, the
/// reconstructed column must satisfy the disturbance bound.
fn consistent_parameter_set(
    gamma1: &DMatrix<f64>,
    gamma2: &DMatrix<f64>,
    d_set: &Polytope,
    p: usize,
    free_dim: usize,
    t: usize,
) -> Result<Polytope> {
    let n_d = d_set.nrows();
    let dim = p * free_dim;
    let mut a = DMatrix::zeros(n_d * t, dim);
    let mut b = DVector::zeros(n_d * t);
    for col in 0..t {
        let gamma_col = DMatrix::from_row_slice(1, free_dim, gamma2.column(col).transpose().as_slice());
        let block = numeric::kron(&gamma_col, &d_set.a); // n_d x dim
        a.view_mut((col * n_d, 0), (n_d, dim)).copy_from(&block);
        let offset = &d_set.b - &d_set.a * gamma1.column(col);
        b.rows_mut(col * n_d, n_d).copy_from(&offset);
    }
    Polytope::new(a, b)
}

impl ConsistencyModel {
    /// Full consistent disturbance data from a free-parameter block.
    pub fn reconstruct_disturbance(&self, free_block: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if free_block.nrows() != self.p || free_block.ncols() != self.free_dim {
            return Err(Error::dim(format!(
                "free block must be {} x {}",
                self.p, self.free_dim
            )));
        }
        Ok(&self.gamma1 + free_block * &self.gamma2)
    }

    /// Frobenius norm of `(H_1(y) - D) Pi_S`; consistent data lies in the
    /// kernel.
    pub fn check_consistency(&self, d_full: &DMatrix<f64>) -> Result<f64> {
        if d_full.nrows() != self.p || d_full.ncols() != self.t {
            return Err(Error::dim(format!(
                "disturbance data must be {} x {}",
                self.p, self.t
            )));
        }
        Ok(((&self.h1_y - d_full) * &self.pi_s).norm())
    }

    /// Relative residual threshold for calling data consistent.
    pub fn consistency_threshold(&self) -> f64 {
        1e-6 * self.h1_y.norm()
    }

    /// System parameters `[Phi Psi]` implied by a free-parameter block.
    /// Computed through the reduced affine map and cross-checked against the
    /// direct pseudo-inverse formula.
    pub fn implied_system(&self, free_block: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let reduced = &self.gamma_a1 + free_block * &self.gamma_a2;
        let direct = (&self.h1_y - self.reconstruct_disturbance(free_block)?) * &self.s_pinv;
        let gap = (&reduced - &direct).norm();
        if gap > 1e-6 * reduced.norm().max(1.0) {
            return Err(Error::Numerical(format!(
                "implied-system routes disagree by {gap:.3e}"
            )));
        }
        Ok(reduced)
    }

    /// Column-major vectorization of a free block (data index fastest).
    pub fn vectorize_free_block(&self, free_block: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_column_slice(free_block.as_slice())
    }

    /// Inverse of [`Self::vectorize_free_block`].
    pub fn free_block_from_vec(&self, v: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.p, self.free_dim, v.as_slice())
    }

    /// Inject prior knowledge `G1 [Phi Psi] G2 <= G3` as additional rows of
    /// the consistent-parameter set. Equalities enter as two opposing
    /// inequalities supplied by the caller.
    pub fn add_prior_knowledge(
        &self,
        g1: &DMatrix<f64>,
        g2: &DMatrix<f64>,
        g3: &DMatrix<f64>,
    ) -> Result<ConsistencyModel> {
        let q = g1.nrows();
        let w = g2.ncols();
        if g1.ncols() != self.p || g2.nrows() != self.free_dim || g3.nrows() != q || g3.ncols() != w
        {
            return Err(Error::dim(
                "prior knowledge matrices not conformable with [Phi Psi]",
            ));
        }
        // G1 * F * M <= G3 - G1 * GammaA1 * G2  with M = GammaA2 * G2,
        // vectorized column-by-column over vec(F).
        let m_map = &self.gamma_a2 * g2;
        let rhs = g3 - g1 * &self.gamma_a1 * g2;
        let dim = self.p * self.free_dim;
        let mut a = DMatrix::zeros(q * w, dim);
        let mut b = DVector::zeros(q * w);
        for c in 0..w {
            let mcol = DMatrix::from_row_slice(1, self.free_dim, m_map.column(c).transpose().as_slice());
            let block = numeric::kron(&mcol, g1); // q x dim
            a.view_mut((c * q, 0), (q, dim)).copy_from(&block);
            b.rows_mut(c * q, q).copy_from(&rhs.column(c));
        }
        let extra = Polytope::new(a, b)?;
        let dc = self.dc.intersect(&extra)?;
        if dc.is_empty()? {
            return Err(Error::EmptySet(
                "prior knowledge inconsistent with data".into(),
            ));
        }
        let dc = dc.remove_redundant()?;
        let mut out = self.clone();
        out.dc = dc;
        Ok(out)
    }

    /// Vertices of the consistent system-parameter set: exact enumeration
    /// when the free-parameter dimension allows it, the interval (box hull)
    /// over-approximation otherwise.
    pub fn system_matrix_vertices(&self) -> Result<SystemMatrixSet> {
        let dim = self.p * self.free_dim;
        let (vertex_vecs, provenance) = if dim <= VERTEX_DIM_CAP {
            (self.dc.exact_vertices()?, VertexProvenance::ExactVertices)
        } else {
            let hull = self.dc.box_hull_vertices().map_err(|e| match e {
                Error::Unbounded(_) => Error::Unbounded(
                    "consistent-parameter set unbounded; disturbance bounds required".into(),
                ),
                other => other,
            })?;
            (hull, VertexProvenance::BoxHull)
        };
        let mut vertices = Vec::with_capacity(vertex_vecs.len());
        let mut free_blocks = Vec::with_capacity(vertex_vecs.len());
        for v in &vertex_vecs.vertices {
            let f = self.free_block_from_vec(v);
            vertices.push(&self.gamma_a1 + &f * &self.gamma_a2);
            free_blocks.push(f);
        }
        Ok(SystemMatrixSet {
            vertices,
            provenance,
            free_blocks,
        })
    }
}
