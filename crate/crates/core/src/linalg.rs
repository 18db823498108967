//! Dense complex linear algebra over a generic real scalar.
//!
//! Rank decisions threshold singular values relative to the largest one.
//! Subspaces are returned in a canonical orthonormal basis (reduced row
//! echelon form followed by Gram–Schmidt) so results do not depend on the
//! arbitrary rotation an SVD picks inside a null space.

use nalgebra::{ComplexField, DMatrix, DVector, RealField};
use num_complex::Complex;

pub type CMatrix<R> = DMatrix<Complex<R>>;
pub type CVector<R> = DVector<Complex<R>>;

/// Thresholds for numeric decisions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol<R> {
    /// Relative singular-value cutoff for rank.
    pub rank: R,
    /// Absolute cutoff for residual checks.
    pub residual: R,
}

impl<R: RealField + Copy> Tol<R> {
    /// `1e-9`, or `1e4·ε` when the scalar type cannot resolve that.
    pub fn standard() -> Self {
        let floor = R::default_epsilon() * nalgebra::convert::<f64, R>(1e4);
        let t = nalgebra::convert::<f64, R>(1e-9).max(floor);
        Tol { rank: t, residual: t }
    }
}

pub fn c<R: RealField + Copy>(re: f64, im: f64) -> Complex<R> {
    Complex::new(nalgebra::convert(re), nalgebra::convert(im))
}

/// Column-major flattening, matching nalgebra's storage.
pub fn vectorize<R: RealField + Copy>(a: &CMatrix<R>) -> CVector<R> {
    DVector::from_column_slice(a.as_slice())
}

pub fn unvectorize<R: RealField + Copy>(v: &CVector<R>, rows: usize, cols: usize) -> CMatrix<R> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

pub fn frobenius<R: RealField + Copy>(a: &CMatrix<R>) -> R {
    a.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Largest singular value.
pub fn operator_norm<R: RealField + Copy>(a: &CMatrix<R>) -> R {
    if a.is_empty() {
        return R::zero();
    }
    a.clone().singular_values().iter().fold(R::zero(), |m, &s| m.max(s))
}

/// `A ⊗ B` (Kronecker product).
pub fn kron<R: RealField + Copy>(a: &CMatrix<R>, b: &CMatrix<R>) -> CMatrix<R> {
    a.kronecker(b)
}

/// Orthonormal basis of `{ v : M v = 0 }`, canonicalised.
pub fn nullspace<R: RealField + Copy>(m: &CMatrix<R>, tol: Tol<R>) -> Vec<CVector<R>> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    let padded = if m.nrows() < n {
        let mut p = CMatrix::<R>::zeros(n, n);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().fold(R::zero(), |a, &s| a.max(s));
    let cutoff = tol.rank * smax;
    let null: Vec<CVector<R>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == R::zero() || s <= cutoff)
        .map(|(i, _)| v_t.row(i).adjoint().into_owned())
        .collect();
    canonical_basis(&null, tol)
}

/// Orthonormal basis of the span of `vectors`, canonicalised.
pub fn span<R: RealField + Copy>(vectors: &[CVector<R>], tol: Tol<R>) -> Vec<CVector<R>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let n = vectors[0].len();
    let mut m = CMatrix::<R>::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().fold(R::zero(), |a, &s| a.max(s));
    if smax == R::zero() {
        return Vec::new();
    }
    let cutoff = tol.rank * smax;
    let cols: Vec<CVector<R>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    canonical_basis(&cols, tol)
}

/// Reduced row echelon form of the rows `vectors` (as row vectors), with
/// partial pivoting. Returns the nonzero rows and their pivot columns.
pub fn rref<R: RealField + Copy>(vectors: &[CVector<R>], tol: R) -> (Vec<CVector<R>>, Vec<usize>) {
    if vectors.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let mut rows: Vec<CVector<R>> = vectors.to_vec();
    let n = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == rows.len() {
            break;
        }
        let (best, mag) = (r..rows.len())
            .map(|i| (i, rows[i][col].modulus()))
            .fold((r, R::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][col];
        rows[r] /= p;
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[col];
                if f != Complex::new(R::zero(), R::zero()) {
                    *row -= &pivot_row * f;
                }
            }
        }
        for row in rows.iter_mut() {
            for z in row.iter_mut() {
                if z.modulus() <= tol * nalgebra::convert(1e-3) {
                    *z = Complex::new(R::zero(), R::zero());
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Canonical orthonormal basis of the span of (numerically independent)
/// `vectors`: RREF, then Gram–Schmidt in pivot order.
pub fn canonical_basis<R: RealField + Copy>(vectors: &[CVector<R>], tol: Tol<R>) -> Vec<CVector<R>> {
    let (rows, _) = rref(vectors, tol.rank.max(nalgebra::convert(1e-7)));
    gram_schmidt(&rows, tol)
}

pub fn gram_schmidt<R: RealField + Copy>(vectors: &[CVector<R>], tol: Tol<R>) -> Vec<CVector<R>> {
    let mut out: Vec<CVector<R>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for q in &out {
                let coef = q.dotc(&w);
                w -= q * coef;
            }
        }
        let norm = w.norm();
        if norm > tol.rank {
            out.push(w.unscale(norm));
        }
    }
    out
}

/// `‖v − P v‖` for `P` the orthogonal projector onto the span of the
/// orthonormal `basis`.
pub fn projection_residual<R: RealField + Copy>(basis: &[CVector<R>], v: &CVector<R>) -> R {
    let mut w = v.clone();
    for q in basis {
        let coef = q.dotc(&w);
        w -= q * coef;
    }
    w.norm()
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// matching orthonormal eigenvectors (as columns).
pub fn hermitian_eigen<R: RealField + Copy>(a: &CMatrix<R>) -> (Vec<R>, CMatrix<R>) {
    let sym = (a + a.adjoint()) * Complex::new(nalgebra::convert::<f64, R>(0.5), R::zero());
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::<R>::zeros(a.nrows(), a.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Largest off-diagonal magnitude.
pub fn off_diagonal<R: RealField + Copy>(a: &CMatrix<R>) -> R {
    let mut m = R::zero();
    for ((i, j), z) in a.iter().enumerate().map(|(k, z)| ((k % a.nrows(), k / a.nrows()), z)) {
        if i != j {
            m = m.max(z.modulus());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols: usize, data: &[(f64, f64)]) -> CMatrix<f64> {
        DMatrix::from_row_iterator(rows, cols, data.iter().map(|&(a, b)| Complex::new(a, b)))
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = cm(1, 3, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let ns = nullspace(&m, Tol::standard());
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn nullspace_of_zero_matrix_is_everything() {
        let m = CMatrix::<f64>::zeros(0, 4);
        assert_eq!(nullspace(&m, Tol::standard()).len(), 4);
    }

    #[test]
    fn canonical_basis_is_rotation_invariant() {
        let a = DVector::from_vec(vec![c::<f64>(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let b = DVector::from_vec(vec![c::<f64>(0.0, 0.0), c(2.0, 0.0), c(1.0, -1.0)]);
        let first = canonical_basis(&[a.clone(), b.clone()], Tol::standard());
        let mixed = canonical_basis(&[&a + &b * c(0.3, 0.2), &a * c(0.0, 2.0) - &b], Tol::standard());
        for (x, y) in first.iter().zip(&mixed) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn hermitian_eigen_sorts() {
        let m = cm(2, 2, &[(2.0, 0.0), (0.0, 1.0), (0.0, -1.0), (2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let d = vecs.adjoint() * &m * &vecs;
        assert!(off_diagonal(&d) < 1e-12);
    }

    #[test]
    fn f32_tolerance_is_coarser() {
        let t32: Tol<f32> = Tol::standard();
        let t64: Tol<f64> = Tol::standard();
        assert_eq!(t64.rank, 1e-9);
        assert!(t32.rank > 1e-4);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m = cm(2, 2, &[(0.0, 3.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)]);
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
    }
}
