//! Dense complex matrices with Hilbert-Schmidt geometry, rank decisions and
//! the factorizations everything above this module is built on.
//!
//! All rank decisions go through a single [`Tolerance`] policy: singular
//! values below `rank_tol` times the largest one are treated as zero, and
//! residuals are accepted up to `residual_tol` in operator norm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Shared tolerance policy: `rank_tol` is a relative singular-value cutoff,
/// `residual_tol` an absolute operator-norm residual bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Tolerance {
    pub fn new(rank_tol: f64, residual_tol: f64) -> Result<Self> {
        if !(rank_tol > 0.0 && rank_tol < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "rank_tol must lie in (0, 1), got {rank_tol}"
            )));
        }
        if residual_tol <= 0.0 || residual_tol.is_nan() {
            return Err(Error::InvalidTolerance(format!(
                "residual_tol must be positive, got {residual_tol}"
            )));
        }
        Ok(Tolerance { rank_tol, residual_tol })
    }

    /// Gram-Schmidt pivoting threshold paired with `rank_tol`: an element is
    /// kept when its residual after projection exceeds `sqrt(rank_tol)` times
    /// its norm, which keeps the Gram spectrum of the kept set above the
    /// `rank_tol` cutoff.
    pub fn pivot_tol(&self) -> f64 {
        self.rank_tol.sqrt()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rank_tol: 1e-9, residual_tol: 1e-8 }
    }
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Matrix unit `e_i e_j^*` on a `d`-dimensional space (zero-indexed).
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = ONE;
    v
}

/// Rank-one operator `x y^*`.
pub fn outer(x: &CVector, y: &CVector) -> CMatrix {
    x * y.adjoint()
}

/// Hilbert-Schmidt inner product `tr(B^* A)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "hs_inner: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mut acc = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += y.conj() * x;
    }
    Ok(acc)
}

/// Frobenius norm, i.e. the norm induced by [`hs_inner`].
pub fn hs_norm(a: &CMatrix) -> f64 {
    a.norm()
}

/// Operator norm (largest singular value).
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone().singular_values()[0]
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// The input is symmetrized first so rounding in a nominally Hermitian
/// matrix cannot leak into complex eigenvalues.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (a + a.adjoint()).scale(0.5);
    let se = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = CMatrix::from_columns(
        &order.iter().map(|&i| se.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Positive square root of a positive semidefinite Hermitian matrix.
/// Slightly negative eigenvalues from rounding are clamped to zero.
pub fn hermitian_sqrt_psd(a: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(a);
    let sq = CMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| Complex64::new(v.max(0.0).sqrt(), 0.0)),
    ));
    &vecs * sq * vecs.adjoint()
}

/// Raw Gram matrix `[hs_inner(m_i, m_j)]_{ij}`.
pub fn hs_gram(mats: &[CMatrix]) -> Result<CMatrix> {
    if mats.is_empty() {
        return Err(Error::EmptyInput("hs_gram: empty list".into()));
    }
    let shape = mats[0].shape();
    for m in mats {
        if m.shape() != shape {
            return Err(Error::ShapeMismatch(format!(
                "hs_gram: {:?} vs {:?}",
                m.shape(),
                shape
            )));
        }
    }
    let n = mats.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = hs_inner(&mats[i], &mats[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Dimension of the span of a family of same-shaped matrices.
///
/// Works on the Gram matrix of the unit-normalized family so the decision is
/// scale-free per element; eigenvalues below `rank_tol` times the largest are
/// treated as zero. Zero matrices contribute nothing.
pub fn span_rank(mats: &[CMatrix], tol: &Tolerance) -> Result<usize> {
    span_rank_with_margin(mats, tol).map(|(r, _)| r)
}

/// Like [`span_rank`] but also reports the margin: the ratio between the
/// smallest kept and the largest Gram eigenvalue (1.0 for a single element,
/// 0.0 when everything collapsed).
pub fn span_rank_with_margin(mats: &[CMatrix], tol: &Tolerance) -> Result<(usize, f64)> {
    if mats.is_empty() {
        return Err(Error::EmptyInput("span_rank: empty list".into()));
    }
    let shape = mats[0].shape();
    let mut normalized = Vec::with_capacity(mats.len());
    for m in mats {
        if m.shape() != shape {
            return Err(Error::ShapeMismatch(format!(
                "span_rank: {:?} vs {:?}",
                m.shape(),
                shape
            )));
        }
        let n = hs_norm(m);
        if n > 0.0 {
            normalized.push(m.unscale(n));
        }
    }
    if normalized.is_empty() {
        return Ok((0, 0.0));
    }
    let g = hs_gram(&normalized)?;
    let (vals, _) = hermitian_eigen(&g);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    if top <= 0.0 {
        return Ok((0, 0.0));
    }
    let cutoff = tol.rank_tol * top;
    let rank = vals.iter().filter(|&&v| v > cutoff).count();
    let smallest_kept = vals
        .iter()
        .filter(|&&v| v > cutoff)
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let margin = if rank == 0 { 0.0 } else { smallest_kept / top };
    Ok((rank, margin))
}

/// Span dimension of a list of vectors.
pub fn vec_span_rank(vecs: &[CVector], tol: &Tolerance) -> usize {
    let nonzero: Vec<CVector> = vecs
        .iter()
        .filter(|v| v.norm() > 0.0)
        .map(|v| v.unscale(v.norm()))
        .collect();
    if nonzero.is_empty() {
        return 0;
    }
    let n = nonzero.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = nonzero[j].dotc(&nonzero[i]);
        }
    }
    let (vals, _) = hermitian_eigen(&g);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    if top <= 0.0 {
        return 0;
    }
    vals.iter().filter(|&&v| v > tol.rank_tol * top).count()
}

/// Modified Gram-Schmidt with a relative drop threshold.
pub fn orthonormalize_vectors(vecs: &[CVector], tol: &Tolerance) -> Vec<CVector> {
    let mut ortho: Vec<CVector> = Vec::new();
    for v in vecs {
        let scale = v.norm();
        if scale <= 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = q.dotc(&r);
                r -= q.scale_complex(c);
            }
        }
        if r.norm() > tol.pivot_tol() * scale {
            let n = r.norm();
            ortho.push(r.unscale(n));
        }
    }
    ortho
}

trait ScaleComplex {
    fn scale_complex(&self, c: Complex64) -> Self;
}

impl ScaleComplex for CVector {
    fn scale_complex(&self, c: Complex64) -> Self {
        self.map(|x| x * c)
    }
}

/// Orthonormal basis of the kernel of `m`, computed from the Hermitian
/// eigendecomposition of `m^* m`. Columns of the result are the basis.
pub fn nullspace(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMatrix::identity(cols, cols);
    }
    let gram = m.adjoint() * m;
    let (vals, vecs) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    // the Gram squares singular values, so rank_tol² would sit below machine
    // precision; floor the cutoff at the eigen solver's noise level
    let cutoff = (tol.rank_tol * tol.rank_tol).max(1e-12) * top;
    let kernel: Vec<CVector> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= cutoff)
        .map(|(i, _)| vecs.column(i).into_owned())
        .collect();
    if kernel.is_empty() {
        CMatrix::zeros(cols, 0)
    } else {
        CMatrix::from_columns(&kernel)
    }
}

/// Minimum-norm least-squares solution of `a x = b` via SVD.
pub fn lstsq(a: &CMatrix, b: &CVector) -> Result<CVector> {
    if a.nrows() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "lstsq: matrix has {} rows, rhs has {}",
            a.nrows(),
            b.len()
        )));
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let sv = &svd.singular_values;
    let top = sv[0];
    let mut y = u.adjoint() * b;
    for i in 0..sv.len() {
        if sv[i] > 1e-13 * top.max(1.0) {
            y[i] /= Complex64::new(sv[i], 0.0);
        } else {
            y[i] = ZERO;
        }
    }
    Ok(vt.adjoint() * y)
}

/// Re-orthonormalize the columns of a frame via QR.
pub fn frame_orthonormalize(w: &CMatrix) -> CMatrix {
    w.clone().qr().q()
}

/// Orthonormal basis of `(range of within) ∩ (span vecs)^⊥`.
///
/// `within` is a column-orthonormal map describing the carrier subspace;
/// `None` means the full ambient space. The result may be empty.
pub fn orthonormal_complement(
    vecs: &[CVector],
    within: Option<&CMatrix>,
    ambient_dim: usize,
    tol: &Tolerance,
) -> Result<Vec<CVector>> {
    let w_owned;
    let w = match within {
        Some(m) => {
            if m.nrows() != ambient_dim {
                return Err(Error::ShapeMismatch(format!(
                    "orthonormal_complement: frame lives in dim {}, ambient is {}",
                    m.nrows(),
                    ambient_dim
                )));
            }
            m
        }
        None => {
            w_owned = CMatrix::identity(ambient_dim, ambient_dim);
            &w_owned
        }
    };
    for v in vecs {
        if v.len() != ambient_dim {
            return Err(Error::ShapeMismatch(format!(
                "orthonormal_complement: vector of dim {} in ambient {}",
                v.len(),
                ambient_dim
            )));
        }
    }
    if w.ncols() == 0 {
        return Ok(Vec::new());
    }
    if vecs.is_empty() {
        return Ok((0..w.ncols()).map(|j| w.column(j).into_owned()).collect());
    }
    let x = CMatrix::from_columns(vecs);
    // w-range vector W c is orthogonal to span(vecs) iff X^* W c = 0
    let m = x.adjoint() * w;
    let kernel = nullspace(&m, tol);
    let cols = w * kernel;
    Ok((0..cols.ncols()).map(|j| cols.column(j).into_owned()).collect())
}

/// Spectral cut of a positive operator `S` at threshold `t`: the spectral
/// projection `E_t` for the open interval `(t, ‖S‖]` and the partial inverse
/// `R_t` with `R_t S = E_t`.
#[derive(Debug, Clone)]
pub struct SpectralCut {
    pub threshold: f64,
    pub e_t: CMatrix,
    pub r_t: CMatrix,
}

/// Polar data of a map `T`: the factor `V_iso` with `T^* = V_iso^* S`,
/// the positive part `S = (T T^*)^{1/2}`, and the spectral cut of `S` at `t`.
///
/// `V_iso` is a partial isometry whose support projection `V_iso^* V_iso`
/// is the projection onto `ker(T)^⊥`; it is a coisometry exactly when `T`
/// has full row rank.
pub fn polar_and_cut(t_mat: &CMatrix, t: f64, tol: &Tolerance) -> Result<(CMatrix, CMatrix, SpectralCut)> {
    let k = t_mat.nrows();
    let svd = t_mat.clone().svd(true, true);
    let sv = &svd.singular_values;
    let top = sv[0];
    if top <= 0.0 {
        return Err(Error::ZeroOperator("polar_and_cut: T = 0".into()));
    }
    if t >= top {
        return Err(Error::EmptyCut { threshold: t, top });
    }
    if t <= 0.0 {
        return Err(Error::InvalidTolerance(format!(
            "polar_and_cut: threshold must be positive, got {t}"
        )));
    }
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let rank = sv.iter().filter(|&&s| s > tol.rank_tol * top).count();

    let u_r = u.columns(0, rank).into_owned();
    let vt_r = vt.rows(0, rank).into_owned();
    let v_iso = &u_r * vt_r;
    let sigma = CMatrix::from_diagonal(&DVector::from_iterator(
        rank,
        sv.iter().take(rank).map(|&s| Complex64::new(s, 0.0)),
    ));
    let s_mat = &u_r * sigma * u_r.adjoint();

    let mut e_t = CMatrix::zeros(k, k);
    let mut r_t = CMatrix::zeros(k, k);
    for i in 0..rank {
        // strictly greater: ties at t fall outside the open interval
        if sv[i] > t {
            let ui = u.column(i);
            let p = ui * ui.adjoint();
            e_t += &p;
            r_t += p.unscale(sv[i]);
        }
    }
    Ok((v_iso, s_mat, SpectralCut { threshold: t, e_t, r_t }))
}

/// A unit vector in `span(X) ∩ Y` where `Y` is the orthogonal complement of
/// `span(y_perp)`, built from a dependency among the `Y^⊥`-components of the
/// `X` vectors. Returns `None` when no such vector is found.
pub fn intersection_nonzero(
    x_basis: &[CVector],
    y_perp: &[CVector],
    tol: &Tolerance,
) -> Result<Option<CVector>> {
    if x_basis.is_empty() {
        return Ok(None);
    }
    let d = x_basis[0].len();
    for v in x_basis.iter().chain(y_perp.iter()) {
        if v.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "intersection_nonzero: vector of dim {} in ambient {}",
                v.len(),
                d
            )));
        }
    }
    let x = CMatrix::from_columns(x_basis);
    let z = orthonormalize_vectors(y_perp, tol);
    let kernel = if z.is_empty() {
        CMatrix::identity(x_basis.len(), x_basis.len())
    } else {
        let zm = CMatrix::from_columns(&z);
        // components of the x vectors along Y^⊥; a kernel element of this
        // matrix is exactly a dependency among them
        let comp = zm.adjoint() * &x;
        nullspace(&comp, tol)
    };
    if kernel.ncols() == 0 {
        return Ok(None);
    }
    let candidates = &x * kernel;
    let svd = candidates.svd(true, false);
    let top = svd.singular_values[0];
    let x_scale = x_basis.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if top <= tol.pivot_tol() * x_scale {
        return Ok(None);
    }
    Ok(Some(svd.u.as_ref().unwrap().column(0).into_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    fn pauli_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    #[test]
    fn hs_inner_identity_is_dimension() {
        let i2 = identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn hs_inner_disjoint_supports() {
        let e11 = matrix_unit(2, 0, 0);
        let e22 = matrix_unit(2, 1, 1);
        assert_eq!(hs_inner(&e11, &e22).unwrap(), ZERO);
    }

    #[test]
    fn hs_inner_self_is_entrywise_square_sum() {
        // entrywise oracle for the squared Frobenius norm
        let a = CMatrix::from_row_slice(2, 3, &[
            c(1., 2.), c(0., -1.), c(3., 0.),
            c(0.5, 0.5), c(-2., 1.), c(0., 0.),
        ]);
        let oracle: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let got = hs_inner(&a, &a).unwrap();
        assert!((got.re - oracle).abs() < 1e-12);
        assert!(got.im.abs() < 1e-12);
        assert!((hs_norm(&a).powi(2) - oracle).abs() < 1e-12);
    }

    #[test]
    fn hs_inner_shape_mismatch_errors() {
        assert!(hs_inner(&identity(2), &identity(3)).is_err());
    }

    #[test]
    fn span_rank_scalar_multiples() {
        let tol = Tolerance::default();
        let mats = vec![identity(2), identity(2).scale(2.0)];
        assert_eq!(span_rank(&mats, &tol).unwrap(), 1);
    }

    #[test]
    fn span_rank_matrix_units() {
        let tol = Tolerance::default();
        let mats: Vec<CMatrix> = (0..2)
            .flat_map(|i| (0..2).map(move |j| matrix_unit(2, i, j)))
            .collect();
        assert_eq!(span_rank(&mats, &tol).unwrap(), 4);
    }

    #[test]
    fn span_rank_pauli_family_gram_oracle() {
        // hand oracle: the raw Gram of {I, X, Y, Z} is 2·I₄
        let fam = vec![identity(2), pauli_x(), pauli_y(), pauli_z()];
        let g = hs_gram(&fam).unwrap();
        let expected = CMatrix::identity(4, 4).scale(2.0);
        assert!((&g - &expected).norm() < 1e-14);
        assert_eq!(span_rank(&fam, &Tolerance::default()).unwrap(), 4);
    }

    #[test]
    fn span_rank_empty_errors() {
        assert!(span_rank(&[], &Tolerance::default()).is_err());
    }

    #[test]
    fn complement_of_single_basis_vector() {
        let tol = Tolerance::default();
        let out = orthonormal_complement(&[basis_vector(3, 0)], None, 3, &tol).unwrap();
        assert_eq!(out.len(), 2);
        for v in &out {
            assert!(v[0].norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_of_full_basis_is_empty() {
        let tol = Tolerance::default();
        let vecs: Vec<CVector> = (0..3).map(|i| basis_vector(3, i)).collect();
        let out = orthonormal_complement(&vecs, None, 3, &tol).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn complement_orthogonality_oracle() {
        // complement of e1+e2 in C^3: every output vector must be a unit
        // vector orthogonal to e1+e2, and together with the input span C^3
        let tol = Tolerance::default();
        let v = basis_vector(3, 0) + basis_vector(3, 1);
        let out = orthonormal_complement(std::slice::from_ref(&v), None, 3, &tol).unwrap();
        assert_eq!(out.len(), 2);
        for w in &out {
            assert!(v.dotc(w).norm() < 1e-12);
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
        assert!(out[0].dotc(&out[1]).norm() < 1e-12);
        let mut all = out.clone();
        all.push(v);
        assert_eq!(vec_span_rank(&all, &tol), 3);
    }

    #[test]
    fn polar_cut_identity() {
        let tol = Tolerance::default();
        let (v, s, cut) = polar_and_cut(&identity(3), 0.5, &tol).unwrap();
        assert!((s - identity(3)).norm() < 1e-12);
        assert!((cut.e_t.clone() - identity(3)).norm() < 1e-12);
        assert!((cut.r_t.clone() - identity(3)).norm() < 1e-12);
        assert!((v.adjoint() * &v - identity(3)).norm() < 1e-12);
    }

    #[test]
    fn polar_cut_diagonal_eigendecomposition_by_hand() {
        // T = diag(2, 1, 0), t = 1.5: only the eigenvalue 2 survives the cut,
        // so E_t = E₁₁ and R_t = ½ E₁₁
        let tol = Tolerance::default();
        let t = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2., 0.), c(1., 0.), c(0., 0.)]));
        let (_, s, cut) = polar_and_cut(&t, 1.5, &tol).unwrap();
        assert!((&s - &t).norm() < 1e-12);
        assert!((cut.e_t.clone() - matrix_unit(3, 0, 0)).norm() < 1e-12);
        assert!((cut.r_t.clone() - matrix_unit(3, 0, 0).scale(0.5)).norm() < 1e-12);
    }

    #[test]
    fn polar_cut_residual_oracle_random_rectangular() {
        let tol = Tolerance::default();
        // fixed pseudo-random 4x3 with no singular value near the cut
        let t = CMatrix::from_row_slice(4, 3, &[
            c(1.3, -0.2), c(0.1, 0.7), c(-0.5, 0.0),
            c(0.0, 0.9), c(2.1, 0.3), c(0.4, -0.4),
            c(-0.7, 0.1), c(0.2, 0.0), c(1.8, 0.6),
            c(0.3, 0.3), c(-1.1, 0.2), c(0.0, 1.0),
        ]).transpose(); // 3x4 — exercise wide shape too
        let (v_iso, s, cut) = polar_and_cut(&t, 0.5, &tol).unwrap();
        let resid1 = op_norm(&(t.adjoint() - v_iso.adjoint() * &s));
        let resid2 = op_norm(&(&cut.r_t * &s - &cut.e_t));
        assert!(resid1 < 1e-10, "polar residual {resid1}");
        assert!(resid2 < 1e-10, "cut residual {resid2}");
    }

    #[test]
    fn polar_cut_rejects_zero_and_high_threshold() {
        let tol = Tolerance::default();
        assert!(matches!(
            polar_and_cut(&CMatrix::zeros(2, 2), 0.5, &tol),
            Err(Error::ZeroOperator(_))
        ));
        assert!(matches!(
            polar_and_cut(&identity(2), 1.5, &tol),
            Err(Error::EmptyCut { .. })
        ));
    }

    #[test]
    fn intersection_simple() {
        let tol = Tolerance::default();
        let x = vec![basis_vector(3, 0), basis_vector(3, 1)];
        let yp = vec![basis_vector(3, 0)];
        let v = intersection_nonzero(&x, &yp, &tol).unwrap().unwrap();
        // must be ±e2
        assert!((v[1].norm() - 1.0).abs() < 1e-12);
        assert!(v[0].norm() < 1e-12 && v[2].norm() < 1e-12);
    }

    #[test]
    fn intersection_hypothesis_fails() {
        let tol = Tolerance::default();
        let x = vec![basis_vector(3, 0)];
        let yp = vec![basis_vector(3, 0)];
        assert!(intersection_nonzero(&x, &yp, &tol).unwrap().is_none());
    }

    #[test]
    fn intersection_dependency_construction() {
        // X = {e1+e3, e2+e3}, Y^⊥ = {e3}: the dependency kills the e3 legs
        // and returns a unit multiple of e1−e2
        let tol = Tolerance::default();
        let x = vec![
            basis_vector(3, 0) + basis_vector(3, 2),
            basis_vector(3, 1) + basis_vector(3, 2),
        ];
        let yp = vec![basis_vector(3, 2)];
        let v = intersection_nonzero(&x, &yp, &tol).unwrap().unwrap();
        assert!(v[2].norm() < 1e-12, "orthogonal to Y^⊥");
        // lies in span(X): residual after projecting on span{x1,x2}
        let on = orthonormalize_vectors(&x, &tol);
        let mut r = v.clone();
        for q in &on {
            let c = q.dotc(&r);
            r -= q.map(|z| z * c);
        }
        assert!(r.norm() < 1e-10, "inside span(X)");
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!((v[0] + v[1]).norm() < 1e-10, "proportional to e1 − e2");
    }

    #[test]
    fn nullspace_wide_matrix() {
        let tol = Tolerance::default();
        // 1x3 matrix [1 1 0]: kernel dim 2
        let m = CMatrix::from_row_slice(1, 3, &[c(1., 0.), c(1., 0.), c(0., 0.)]);
        let k = nullspace(&m, &tol);
        assert_eq!(k.ncols(), 2);
        assert!(op_norm(&(&m * &k)) < 1e-10);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let a = CMatrix::from_row_slice(3, 2, &[
            c(1., 0.), c(0., 1.),
            c(0., 0.), c(2., 0.),
            c(1., 1.), c(0., 0.),
        ]);
        let x = CVector::from_vec(vec![c(0.5, -0.5), c(1.0, 2.0)]);
        let b = &a * &x;
        let got = lstsq(&a, &b).unwrap();
        assert!((got - x).norm() < 1e-10);
    }
}
