//! The dilation isometry and the kernel-projection clique criterion.
//!
//! Given operators `A_n` on C^d and small vectors `x_n` in C^N, there is an
//! isometry `V : C^N → C^d ⊕ C^d` with `V^* (A_n ⊕ 0) V = T_n` where
//! `T_n = Σ_{ij} ⟨A_n e_j, e_i⟩ x_i x_j^*`. The certificate carries `V`, the
//! targets and the per-operator residuals.

use serde::Serialize;

use super::norm_cap;
use crate::error::{Error, Result};
use crate::json;
use crate::matcore::{self, CMatrix, CVector, Tolerance};
use crate::opsys::{OperatorSystem, Projection};

/// Proof object for the identity `V^*(A_n ⊕ 0)V = T_n`.
#[derive(Debug, Clone, Serialize)]
pub struct DilationCertificate {
    /// Column-orthonormal `2d×N` isometry.
    #[serde(with = "json::cmatrix")]
    pub isometry: CMatrix,
    /// The vectors `x_n`, one per used basis slot of C^d.
    #[serde(with = "json::cvector_list")]
    pub vectors: Vec<CVector>,
    /// Target operators `T_n` on C^N.
    #[serde(with = "json::cmatrix_list")]
    pub targets: Vec<CMatrix>,
    /// Operator-norm residual `‖V^*(A_n ⊕ 0)V − T_n‖` per input.
    pub residuals: Vec<f64>,
    /// `‖V^*V − I‖`.
    pub isometry_residual: f64,
}

impl DilationCertificate {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn verify(&self, tol: &Tolerance) -> bool {
        self.isometry_residual <= tol.residual_tol && self.max_residual() <= tol.residual_tol
    }
}

/// Build the dilation isometry for `a_list` on C^d and admissible vectors
/// `x_list` in C^N (`‖x_k‖ ≤ 2^{-(k+1)}`, at most `d` of them, `N ≤ d`).
///
/// The construction follows the explicit recipe: the contraction `R` with
/// `R e_k = x_k`, its isometric completion `S = R ⊕ (1 − R^*R)^{1/2}`, an
/// isometric extension `W` sending `S e_k ↦ e_k ⊕ 0`, and `V = W` restricted
/// to the first summand.
pub fn dilation_isometry(
    a_list: &[CMatrix],
    x_list: &[CVector],
    tol: &Tolerance,
) -> Result<DilationCertificate> {
    if a_list.is_empty() {
        return Err(Error::EmptyInput("dilation needs at least one operator".into()));
    }
    if x_list.is_empty() {
        return Err(Error::EmptyInput("dilation needs at least one vector".into()));
    }
    let d = a_list[0].nrows();
    for a in a_list {
        if a.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "dilation: operator of shape {:?}, expected {d}×{d}",
                a.shape()
            )));
        }
    }
    let n_dim = x_list[0].len();
    if n_dim > d {
        return Err(Error::DimensionLimit(format!(
            "dilation: target dimension {n_dim} exceeds ambient {d}; the isometric \
             extension needs N ≤ d"
        )));
    }
    if x_list.len() > d {
        return Err(Error::DimensionLimit(format!(
            "dilation: {} vectors for {d} basis slots",
            x_list.len()
        )));
    }
    for (idx, x) in x_list.iter().enumerate() {
        if x.len() != n_dim {
            return Err(Error::ShapeMismatch(format!(
                "dilation: vector {idx} has length {}, expected {n_dim}",
                x.len()
            )));
        }
        let cap = norm_cap(idx + 1);
        let norm = x.norm();
        if norm > cap * (1.0 + 1e-12) {
            return Err(Error::NormCapViolated { index: idx + 1, norm, cap });
        }
    }

    // R e_k = x_k on the used slots, zero elsewhere
    let mut r = CMatrix::zeros(n_dim, d);
    for (idx, x) in x_list.iter().enumerate() {
        r.set_column(idx, x);
    }
    let defect = CMatrix::identity(d, d) - r.adjoint() * &r;
    let defect_sqrt = matcore::hermitian_sqrt_psd(&defect);

    // S = R ⊕ (1 − R^*R)^{1/2} is an isometry C^d → C^N ⊕ C^d
    let mut s = CMatrix::zeros(n_dim + d, d);
    s.view_mut((0, 0), (n_dim, d)).copy_from(&r);
    s.view_mut((n_dim, 0), (d, d)).copy_from(&defect_sqrt);

    let y_cols: Vec<CVector> = (0..d).map(|j| s.column(j).into_owned()).collect();
    let extra = matcore::orthonormal_complement(&y_cols, None, n_dim + d, tol)?;
    if extra.len() != n_dim {
        return Err(Error::InvariantViolation(format!(
            "dilation: complement of the y-family has dimension {}, expected {n_dim}",
            extra.len()
        )));
    }

    // unitary B = [y | complement] on C^{N+d}; W maps its columns to the
    // first N+d standard basis vectors of C^{2d}
    let mut b = CMatrix::zeros(n_dim + d, n_dim + d);
    for (j, y) in y_cols.iter().enumerate() {
        b.set_column(j, y);
    }
    for (k, u) in extra.iter().enumerate() {
        b.set_column(d + k, u);
    }
    let mut c = CMatrix::zeros(2 * d, n_dim + d);
    for i in 0..(n_dim + d) {
        c[(i, i)] = matcore::ONE;
    }
    let w = c * b.adjoint();
    let v = w.columns(0, n_dim).into_owned();

    let m_used = x_list.len();
    let x_mat = {
        let mut xm = CMatrix::zeros(n_dim, m_used);
        for (idx, x) in x_list.iter().enumerate() {
            xm.set_column(idx, x);
        }
        xm
    };

    let mut targets = Vec::with_capacity(a_list.len());
    let mut residuals = Vec::with_capacity(a_list.len());
    for a in a_list {
        let a_block = a.view((0, 0), (m_used, m_used)).into_owned();
        let t = &x_mat * a_block * x_mat.adjoint();
        let mut ext = CMatrix::zeros(2 * d, 2 * d);
        ext.view_mut((0, 0), (d, d)).copy_from(a);
        let compressed = v.adjoint() * ext * &v;
        residuals.push(matcore::op_norm(&(&compressed - &t)));
        targets.push(t);
    }
    let isometry_residual =
        matcore::op_norm(&(v.adjoint() * &v - CMatrix::identity(n_dim, n_dim)));

    Ok(DilationCertificate {
        isometry: v,
        vectors: x_list.to_vec(),
        targets,
        residuals,
        isometry_residual,
    })
}

/// Kernel-projection clique criterion: `P` is the projection onto
/// `ker(T)^⊥`, and `verified` is true exactly when the sandwiched family
/// `{T A T^*}` spans a full matrix algebra of dimension `rank(T)²` and the
/// compression by `P` reaches that same dimension.
pub fn clique_from_map(
    t_map: &CMatrix,
    v: &OperatorSystem,
    t: f64,
    tol: &Tolerance,
) -> Result<(Projection, bool)> {
    if t_map.ncols() != v.ambient_dim() {
        return Err(Error::ShapeMismatch(format!(
            "clique_from_map: map has {} columns, system dimension is {}",
            t_map.ncols(),
            v.ambient_dim()
        )));
    }
    let (v_iso, _s, _cut) = matcore::polar_and_cut(t_map, t, tol)?;
    let p = Projection::from_map(v.ambient_dim(), &v_iso.adjoint(), tol)?;
    let r = p.rank();

    let sandwiched: Vec<CMatrix> = v
        .basis()
        .iter()
        .map(|a| t_map * a * t_map.adjoint())
        .collect();
    let hypothesis = matcore::span_rank(&sandwiched, tol)? == r * r;
    let verified = hypothesis && v.compress(&p, tol)?.dimension(tol) == r * r;
    Ok((p, verified))
}
