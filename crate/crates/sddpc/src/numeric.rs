//! Dense linear-algebra helpers: numerical rank, pseudo-inverses, eigenvalue
//! queries, and block assembly used throughout the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative rank tolerance: a singular value counts toward the rank iff it
/// exceeds `rank_rel_tol(rows, cols) * sigma_max`.
pub fn rank_rel_tol(rows: usize, cols: usize) -> f64 {
    1e-10 * rows.max(cols) as f64
}

/// Numerical rank via singular values.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let tol = rank_rel_tol(m.nrows(), m.ncols());
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Smallest singular value.
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    sv.min()
}

/// Moore-Penrose pseudo-inverse via SVD with relative truncation.
///
/// Returns an error when every singular value is (numerically) zero and the
/// caller asked for `require_full_rank` along the shorter dimension.
pub fn pinv(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(DMatrix::zeros(m.ncols(), m.nrows()));
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = rank_rel_tol(m.nrows(), m.ncols()) * smax.max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(tol)
        .map_err(|e| Error::Numerical(format!("pseudo-inverse failed: {e}")))
}

/// Pseudo-inverse together with the numerical rank of the input.
pub fn pinv_with_rank(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, usize)> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok((DMatrix::zeros(m.ncols(), m.nrows()), 0));
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = rank_rel_tol(m.nrows(), m.ncols()) * smax.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let pi = svd
        .pseudo_inverse(tol)
        .map_err(|e| Error::Numerical(format!("pseudo-inverse failed: {e}")))?;
    Ok((pi, rank))
}

/// Spectral radius of a square matrix (largest eigenvalue modulus).
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    assert_eq!(m.nrows(), m.ncols(), "spectral radius of non-square matrix");
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    DVector::from_vec(ev)
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_eigenvalue_sym(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m)[0]
}

/// Largest eigenvalue of the symmetric part.
pub fn max_eigenvalue_sym(m: &DMatrix<f64>) -> f64 {
    let ev = symmetric_eigenvalues(m);
    ev[ev.len() - 1]
}

/// Kronecker product.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Stack matrices vertically. All inputs must share the column count.
pub fn vstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    assert!(!blocks.is_empty());
    let ncols = blocks[0].ncols();
    let nrows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(nrows, ncols);
    let mut r = 0;
    for b in blocks {
        assert_eq!(b.ncols(), ncols, "vstack column mismatch");
        out.view_mut((r, 0), (b.nrows(), ncols)).copy_from(*b);
        r += b.nrows();
    }
    out
}

/// Stack matrices horizontally. All inputs must share the row count.
pub fn hstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    assert!(!blocks.is_empty());
    let nrows = blocks[0].nrows();
    let ncols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(nrows, ncols);
    let mut c = 0;
    for b in blocks {
        assert_eq!(b.nrows(), nrows, "hstack row mismatch");
        out.view_mut((0, c), (nrows, b.ncols())).copy_from(*b);
        c += b.ncols();
    }
    out
}

/// Stack vectors into one long column vector.
pub fn vcat(parts: &[&DVector<f64>]) -> DVector<f64> {
    let n: usize = parts.iter().map(|p| p.len()).sum();
    let mut out = DVector::zeros(n);
    let mut r = 0;
    for p in parts {
        out.rows_mut(r, p.len()).copy_from(*p);
        r += p.len();
    }
    out
}

/// True if all entries are finite.
pub fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

/// True if all entries are finite.
pub fn all_finite_vec(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Solve `a * x = b` by LU with a condition-number guard.
///
/// Fails when the estimated condition number (ratio of extreme singular
/// values) exceeds `cond_cap`.
pub fn solve_guarded(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    cond_cap: f64,
    what: &str,
) -> Result<DMatrix<f64>> {
    let sv = a.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if smin <= 0.0 || smax / smin > cond_cap {
        return Err(Error::Numerical(format!(
            "{what}: matrix ill-conditioned (cond {:.3e})",
            if smin > 0.0 { smax / smin } else { f64::INFINITY }
        )));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical(format!("{what}: LU solve failed")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pinv_reproduces_inverse_on_square_full_rank() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 3.0]);
        let pi = pinv(&a).unwrap();
        let id = &a * &pi;
        assert_relative_eq!(id[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(id[(1, 1)], 1.0, epsilon = 1e-12);
        assert!(id[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn pinv_right_inverse_for_wide_full_row_rank() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 2.0, -1.0, 0.0, 1.0, 1.0, 3.0]);
        let pi = pinv(&a).unwrap();
        let id = &a * &pi;
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(id[(i, j)], want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn numerical_rank_detects_deficiency() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(numerical_rank(&a), 1);
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(3, 3)), 0);
        assert_eq!(numerical_rank(&DMatrix::<f64>::identity(3, 3)), 3);
    }

    #[test]
    fn spectral_radius_of_rotation_scaled() {
        // 0.5 * rotation: complex pair with modulus 0.5.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -0.5, 0.5, 0.0]);
        assert_relative_eq!(spectral_radius(&a), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn kron_matches_by_hand() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let b = DMatrix::<f64>::identity(2, 2);
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 2);
        assert_eq!(k.ncols(), 4);
        assert_eq!(k[(0, 0)], 1.0);
        assert_eq!(k[(0, 2)], 2.0);
        assert_eq!(k[(1, 3)], 2.0);
    }
}
