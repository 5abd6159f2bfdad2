//! Certified finite-scale constructions: dilation isometries, spanning
//! families, diagonal reductions, corner elimination, triangularization,
//! clustering and clique certificates.
//!
//! Every construction returns a certificate carrying the residuals and
//! achieved bounds of the identity it realizes, so callers and tests assert
//! the inequalities directly instead of trusting a boolean.

mod diagonal;
mod dilation;
mod reduction;

pub use diagonal::{
    anticlique_or_obstruction, clique_certificate, cluster_diagonals, triangularize_diagonals,
    CertificateLevel, CliqueCertificate, ClusterSelection, TriangularFamily,
};
pub use dilation::{clique_from_map, dilation_isometry, DilationCertificate};
pub use reduction::{
    diagonal_from_corners, extract_block_supported, orthogonal_chain, reduce_to_diagonal,
    spanning_vectors, thin_subsequence, BlockExtraction, CornerElimination, DiagonalReduction,
    ExtractedPart, OrthogonalChain, ReductionBranch, SpanningFamily, ThinSelection,
};

use crate::matcore::{basis_vector, CVector};
use num_complex::Complex64;

/// The canonical positive rank-one spanning directions of the top-left
/// `mu`-corner, padded to length `len`: coordinate vectors, real mixtures
/// `(e_p + e_q)/√2` and imaginary mixtures `(e_p + i e_q)/√2`. There are
/// exactly `mu²` of them and their rank-one projections span the corner.
pub(crate) fn rank_one_directions(mu: usize, len: usize) -> Vec<CVector> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(mu * mu);
    for p in 0..mu {
        out.push(basis_vector(len, p));
    }
    for p in 0..mu {
        for q in (p + 1)..mu {
            let real_mix = (basis_vector(len, p) + basis_vector(len, q)).map(|z| z * inv_sqrt2);
            out.push(real_mix);
            let imag_mix =
                (basis_vector(len, p) + basis_vector(len, q).map(|z| z * i_unit)).map(|z| z * inv_sqrt2);
            out.push(imag_mix);
        }
    }
    out
}

/// Norm cap `2^{-(k+1)}` for the k-th vector of a dilation input (1-based).
pub(crate) fn norm_cap(k: usize) -> f64 {
    0.5f64.powi(k as i32 + 1)
}

use crate::error::Result;
use crate::matcore::{CMatrix, Tolerance};
use crate::opsys::OperatorSystem;
use rand::{Rng, SeedableRng};

/// Seeded convenience wrapper around [`reduce_to_diagonal`].
pub fn reduce_to_diagonal_seeded(
    v: &OperatorSystem,
    extra_candidates: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<DiagonalReduction> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    reduce_to_diagonal(v, extra_candidates, &mut rng, tol)
}

/// Seeded family of random real diagonal operators, the stock input for the
/// triangularization and certificate commands.
pub fn random_diagonal_family(d: usize, count: usize, seed: u64) -> Vec<CMatrix> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            CMatrix::from_diagonal(&crate::matcore::CVector::from_fn(d, |_, _| {
                num_complex::Complex64::new(rng.random_range(-1.0..1.0), 0.0)
            }))
        })
        .collect()
}
