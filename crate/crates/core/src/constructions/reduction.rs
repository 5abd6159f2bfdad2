//! Reduction machinery: greedy diagonal reduction, orthogonal chains,
//! block-supported extraction, cubic index thinning, corner elimination and
//! spanning families.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{norm_cap, rank_one_directions};
use crate::error::{Error, Result};
use crate::json;
use crate::matcore::{self, CMatrix, CVector, Tolerance, ONE};
use crate::opsys::{self, OperatorSystem, Projection};

// ---------------------------------------------------------------------------
// spanning family
// ---------------------------------------------------------------------------

/// Vectors `x_1..x_{m²}` in C^m and operators `T_k = Σ_{i,j≤k} α_ij^k x_i x_j^*`
/// that are linearly independent, hence span all of M_m.
#[derive(Debug, Clone, Serialize)]
pub struct SpanningFamily {
    pub m: usize,
    #[serde(with = "json::cvector_list")]
    pub vectors: Vec<CVector>,
    #[serde(with = "json::cmatrix_list")]
    pub operators: Vec<CMatrix>,
    /// Normalized-Gram margin of the full family.
    pub margin: f64,
}

impl SpanningFamily {
    pub fn verify(&self, tol: &Tolerance) -> bool {
        let caps_ok = self
            .vectors
            .iter()
            .enumerate()
            .all(|(k, x)| x.norm() <= norm_cap(k + 1) * (1.0 + 1e-12));
        let rank = matcore::span_rank(&self.operators, tol).unwrap_or(0);
        caps_ok && rank == self.m * self.m
    }
}

fn check_fin_supp_pattern(a_list: &[CMatrix], needed: usize, tol: &Tolerance) -> Result<usize> {
    if a_list.len() < needed {
        return Err(Error::ScaleLimit(format!(
            "spanning family needs {needed} operators, got {}",
            a_list.len()
        )));
    }
    let d = a_list[0].nrows();
    if d < needed {
        return Err(Error::DimensionLimit(format!(
            "spanning family needs ambient dimension ≥ {needed}, got {d}"
        )));
    }
    for (n0, a) in a_list.iter().take(needed).enumerate() {
        let n = n0 + 1;
        if a.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "operator {n} has shape {:?}, expected {d}×{d}",
                a.shape()
            )));
        }
        if matcore::op_norm(&(a - a.adjoint())) > tol.residual_tol * 10.0 {
            return Err(Error::PatternViolation(format!("operator {n} is not self-adjoint")));
        }
        if (a[(n0, n0)] - ONE).norm() > 1e-6 {
            return Err(Error::PatternViolation(format!(
                "operator {n} has diagonal entry {} at position {n}, expected 1",
                a[(n0, n0)]
            )));
        }
        for i in 0..d {
            for j in 0..d {
                if (i.max(j) >= n) && a[(i, j)].norm() > tol.residual_tol {
                    return Err(Error::PatternViolation(format!(
                        "operator {n} has entry {:.2e} outside its {n}×{n} block",
                        a[(i, j)].norm()
                    )));
                }
            }
        }
    }
    Ok(d)
}

/// Build a spanning family from operators with the finite-support pattern
/// (`A_n` lives in the top-left `n×n` block with unit `(n,n)` entry).
///
/// Each new vector is a scaled canonical rank-one direction whose projection
/// leaves the accumulated span; the scale starts at 1 and halves until the
/// Gram margin of the family stays above `10·rank_tol` and the norm cap
/// `‖x_k‖ ≤ 2^{-(k+1)}` holds. Only finitely many scales can fail, so the
/// halving is a deterministic stand-in for "almost any scale works".
pub fn spanning_vectors(
    a_list: &[CMatrix],
    m: usize,
    tol: &Tolerance,
) -> Result<SpanningFamily> {
    if m == 0 {
        return Err(Error::EmptyInput("spanning family with m = 0".into()));
    }
    let total = m * m;
    check_fin_supp_pattern(a_list, total, tol)?;
    let margin_floor = 10.0 * tol.rank_tol;
    const MAX_RETRIES: usize = 64;

    let mut xs: Vec<CVector> = Vec::with_capacity(total);
    let mut ops: Vec<CMatrix> = Vec::with_capacity(total);
    let mut margin = 1.0;

    for k in 1..=total {
        let mu = (k as f64).sqrt().ceil() as usize;
        if k == 1 {
            let x1 = matcore::basis_vector(m, 0).scale(norm_cap(1));
            let t1 = build_target(&a_list[0], std::slice::from_ref(&x1), m);
            xs.push(x1);
            ops.push(t1);
            continue;
        }

        // direction whose rank-one projection adds a new dimension; scored
        // against both the target span and the rank-one span, since at small
        // scales the target span's corner noise can mask a reused direction
        let ortho_targets = opsys::hs_orthonormalize(&ops, tol);
        let rank_ones: Vec<CMatrix> = xs
            .iter()
            .map(|x| matcore::outer(x, x).unscale(x.norm_squared()))
            .collect();
        let ortho_rank_ones = opsys::hs_orthonormalize(&rank_ones, tol);
        let mut best: Option<(f64, CVector)> = None;
        for z in rank_one_directions(mu, m) {
            let zz = matcore::outer(&z, &z);
            let scale = matcore::hs_norm(&zz);
            let resid = (opsys::hs_project_residual(&zz, &ortho_targets) / scale)
                .min(opsys::hs_project_residual(&zz, &ortho_rank_ones) / scale);
            if best.as_ref().map(|(r, _)| resid > *r).unwrap_or(true) {
                best = Some((resid, z));
            }
        }
        let (_, z) = best.expect("mu ≥ 1 provides candidates");

        let cap = norm_cap(k + 1);
        let mut alpha = 1.0f64;
        let mut accepted = false;
        for _ in 0..MAX_RETRIES {
            let x = z.scale(alpha);
            if x.norm() <= cap * (1.0 + 1e-12) {
                xs.push(x);
                let t = build_target(&a_list[k - 1], &xs, m);
                ops.push(t);
                let (rank, mg) = matcore::span_rank_with_margin(&ops, tol)?;
                if rank == k && mg >= margin_floor {
                    margin = mg;
                    accepted = true;
                    break;
                }
                xs.pop();
                ops.pop();
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::IndependenceUnreachable(format!(
                "spanning family stalled at k = {k} after {MAX_RETRIES} scalings"
            )));
        }
    }

    Ok(SpanningFamily { m, vectors: xs, operators: ops, margin })
}

/// `T_k = Σ_{i,j ≤ |xs|} α_ij x_i x_j^*` realized as `X A X^*`.
fn build_target(a: &CMatrix, xs: &[CVector], m: usize) -> CMatrix {
    let k = xs.len();
    let mut x_mat = CMatrix::zeros(m, k);
    for (i, x) in xs.iter().enumerate() {
        x_mat.set_column(i, x);
    }
    let block = a.view((0, 0), (k, k)).into_owned();
    &x_mat * block * x_mat.adjoint()
}

// ---------------------------------------------------------------------------
// greedy diagonal reduction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionBranch {
    /// The chain of complements made progress; the chosen vectors pairwise
    /// annihilate every generator.
    Diagonalized,
    /// Every candidate direction already had a full orbit at the first step:
    /// the finite stand-in for "all compressions have finite codimension".
    FiniteCodimObstructed,
}

/// Result of the greedy complement chain.
#[derive(Debug, Clone)]
pub struct DiagonalReduction {
    vectors: Vec<CVector>,
    nested_ranks: Vec<usize>,
    final_projection: Projection,
    branch: ReductionBranch,
}

impl DiagonalReduction {
    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Ranks of the nested projections `P_1 ≥ P_2 ≥ …` the chain passed through.
    pub fn nested_ranks(&self) -> &[usize] {
        &self.nested_ranks
    }

    pub fn projection(&self) -> &Projection {
        &self.final_projection
    }

    pub fn branch(&self) -> ReductionBranch {
        self.branch
    }

    /// Largest `|⟨A x_k, x_l⟩|` over generators and k ≠ l; the defining
    /// orthogonality of the construction.
    pub fn max_cross_term(&self, v: &OperatorSystem) -> f64 {
        let mut worst: f64 = 0.0;
        for a in v.basis() {
            for (k, xk) in self.vectors.iter().enumerate() {
                let ax = a * xk;
                for (l, xl) in self.vectors.iter().enumerate() {
                    if k != l {
                        worst = worst.max(xl.dotc(&ax).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Greedy finite-scale reduction to a diagonal compression.
///
/// At each step the candidate set is the current subspace's basis plus
/// `extra_candidates` random unit vectors from the passed RNG; the candidate
/// maximizing the dimension of `P_k H ⊖ P_k V P_k x` wins (ties to the first
/// candidate in order). The chain stops when the complement is empty.
pub fn reduce_to_diagonal(
    v: &OperatorSystem,
    extra_candidates: usize,
    rng: &mut ChaCha8Rng,
    tol: &Tolerance,
) -> Result<DiagonalReduction> {
    let d = v.ambient_dim();
    if d < 2 {
        return Err(Error::DimensionLimit("reduction needs ambient dimension ≥ 2".into()));
    }
    let mut frame = CMatrix::identity(d, d);
    // the compressed basis in current subspace coordinates, updated in place
    // as the subspace shrinks
    let mut reduced: Vec<CMatrix> = v.basis().to_vec();
    let mut vectors: Vec<CVector> = Vec::new();
    let mut nested_ranks = vec![d];

    loop {
        let q = frame.ncols();
        let noise_floor = 1e-12
            * reduced
                .iter()
                .map(matcore::hs_norm)
                .fold(0.0f64, f64::max)
                .max(1e-300);
        let mut candidates: Vec<CVector> = (0..q).map(|i| matcore::basis_vector(q, i)).collect();
        for _ in 0..extra_candidates {
            let raw = CVector::from_fn(q, |_, _| {
                Complex64::new(rng.random_range(-1.0f64..1.0), rng.random_range(-1.0f64..1.0))
            });
            let n = raw.norm();
            if n > 0.0 {
                candidates.push(raw.unscale(n));
            }
        }

        let orbit_of = |y: &CVector| -> Vec<CVector> {
            reduced
                .iter()
                .map(|a| a * y)
                .filter(|w| w.norm() > noise_floor)
                .collect()
        };

        let mut best: Option<(usize, usize)> = None; // (complement dim, candidate idx)
        for (ci, y) in candidates.iter().enumerate() {
            let orbit_dim = matcore::orthonormalize_vectors(&orbit_of(y), tol).len();
            let comp_dim = q - orbit_dim;
            if best.map(|(b, _)| comp_dim > b).unwrap_or(true) {
                best = Some((comp_dim, ci));
            }
        }
        let (comp_dim, ci) = best.expect("candidate list is nonempty");
        let y = &candidates[ci];
        vectors.push(&frame * y);

        if comp_dim == 0 {
            break;
        }
        let complement = matcore::orthonormal_complement(&orbit_of(y), None, q, tol)?;
        if complement.is_empty() {
            break;
        }
        let comp_mat = CMatrix::from_columns(&complement);
        frame = &frame * &comp_mat;
        for a in reduced.iter_mut() {
            *a = comp_mat.adjoint() * &*a * &comp_mat;
        }
        nested_ranks.push(frame.ncols());
    }

    let branch = if vectors.len() == 1 && d >= 2 {
        ReductionBranch::FiniteCodimObstructed
    } else {
        ReductionBranch::Diagonalized
    };
    let final_projection = Projection::new(d, CMatrix::from_columns(&vectors), tol)?;
    Ok(DiagonalReduction { vectors, nested_ranks, final_projection, branch })
}

// ---------------------------------------------------------------------------
// orthogonal chain
// ---------------------------------------------------------------------------

/// A chain `A_n x_n = x_{n+1}` with the avoidance orthogonalities
/// `⟨A_n x_i, x_j⟩ = 0` for `max{i,j} > n+1`, `i ≠ j`.
#[derive(Debug, Clone)]
pub struct OrthogonalChain {
    pub operators: Vec<CMatrix>,
    pub vectors: Vec<CVector>,
}

impl OrthogonalChain {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest violation of the chain orthogonality conditions.
    pub fn max_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (n0, a) in self.operators.iter().enumerate() {
            let n = n0 + 1;
            for (i0, xi) in self.vectors.iter().enumerate() {
                let ax = a * xi;
                for (j0, xj) in self.vectors.iter().enumerate() {
                    let (i, j) = (i0 + 1, j0 + 1);
                    if i != j && i.max(j) > n + 1 {
                        worst = worst.max(xj.dotc(&ax).norm());
                    }
                }
            }
            // the defining unit pairing
            let pair = self.vectors[n0 + 1].dotc(&(a * &self.vectors[n0]));
            worst = worst.max((pair - ONE).norm());
        }
        worst
    }
}

/// Grow an orthogonal chain from `x1`, choosing each `x_{k+1}` inside
/// `V x_k` and orthogonal to the accumulated avoidance family, then solving
/// for `A_k ∈ V` with `A_k x_k = x_{k+1}`. Stops when the intersection
/// argument finds nothing; short chains are valid finite-scale outputs.
pub fn orthogonal_chain(
    v: &OperatorSystem,
    x1: &CVector,
    tol: &Tolerance,
) -> Result<OrthogonalChain> {
    let d = v.ambient_dim();
    if x1.len() != d {
        return Err(Error::ShapeMismatch(format!(
            "chain seed has length {}, ambient is {d}",
            x1.len()
        )));
    }
    if x1.norm() <= 0.0 {
        return Err(Error::ZeroOperator("chain seed is zero".into()));
    }
    let mut vectors = vec![x1.unscale(x1.norm())];
    let mut operators: Vec<CMatrix> = Vec::new();
    let mut avoidance: Vec<CVector> = vec![vectors[0].clone()];

    for _ in 0..d {
        let xk = vectors.last().unwrap().clone();
        let orbit: Vec<CVector> = v
            .basis()
            .iter()
            .map(|a| a * &xk)
            .filter(|w| w.norm() > 1e-14)
            .collect();
        if orbit.is_empty() {
            break;
        }
        let Some(x_next) = matcore::intersection_nonzero(&orbit, &avoidance, tol)? else {
            break;
        };
        // coefficients over the basis orbit give the chain operator
        let orbit_full: Vec<CVector> = v.basis().iter().map(|a| a * &xk).collect();
        let m = CMatrix::from_columns(&orbit_full);
        let coeff = matcore::lstsq(&m, &x_next)?;
        let mut a_op = CMatrix::zeros(d, d);
        for (i, a) in v.basis().iter().enumerate() {
            a_op += a.map(|z| z * coeff[i]);
        }
        if (&a_op * &xk - &x_next).norm() > tol.residual_tol.max(1e-9) {
            break;
        }
        // extend the avoidance family before the next step
        avoidance.push(x_next.clone());
        for xi in &vectors {
            avoidance.push(&a_op * xi);
            avoidance.push(a_op.adjoint() * xi);
        }
        avoidance.push(&a_op * &x_next);
        avoidance.push(a_op.adjoint() * &x_next);
        for old in &operators {
            avoidance.push(old * &x_next);
            avoidance.push(old.adjoint() * &x_next);
        }
        vectors.push(x_next);
        operators.push(a_op);
    }

    Ok(OrthogonalChain { operators, vectors })
}

// ---------------------------------------------------------------------------
// block-supported extraction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractedPart {
    Real,
    Imaginary,
}

/// A nonzero block-supported element of the tail span, reduced to its real
/// or imaginary part and normalized so a designated quadratic form is 1.
#[derive(Debug, Clone, Serialize)]
pub struct BlockExtraction {
    #[serde(with = "json::cmatrix")]
    pub matrix: CMatrix,
    /// Coefficients of the raw combination over `a_list[from_index..]`.
    pub coefficients: Vec<[f64; 2]>,
    pub part: ExtractedPart,
    /// Coordinate whose diagonal entry was normalized to 1, when one exists.
    pub designated_index: Option<usize>,
    /// Unit vector `f` with `⟨matrix·f, f⟩ = 1`.
    #[serde(skip)]
    pub designated_vector: CVector,
}

/// Find a nonzero combination of `{A_n : n ≥ from_index}` supported in the
/// top-left `block×block` corner: a nullspace problem on the outside-corner
/// entries. The Re (or, if that vanishes, Im) part is normalized so that a
/// designated diagonal entry — or failing that a top eigenvector's quadratic
/// form — equals 1.
pub fn extract_block_supported(
    a_list: &[CMatrix],
    from_index: usize,
    block: usize,
    tol: &Tolerance,
) -> Result<Option<BlockExtraction>> {
    if a_list.is_empty() {
        return Err(Error::EmptyInput("extraction from an empty list".into()));
    }
    let d = a_list[0].nrows();
    if block == 0 || block > d {
        return Err(Error::DimensionLimit(format!("block {block} invalid in dimension {d}")));
    }
    if from_index >= a_list.len() {
        return Ok(None);
    }
    let tail = &a_list[from_index..];
    let p = tail.len();

    // constraint rows: every entry with max index ≥ block must vanish
    let positions: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| i >= block || j >= block)
        .collect();
    let mut phi = CMatrix::zeros(positions.len(), p);
    for (c, a) in tail.iter().enumerate() {
        for (r, &(i, j)) in positions.iter().enumerate() {
            phi[(r, c)] = a[(i, j)];
        }
    }
    let kernel = matcore::nullspace(&phi, tol);
    if kernel.ncols() == 0 {
        return Ok(None);
    }

    // pick the kernel combination with the largest resulting operator
    let mut stacked = CMatrix::zeros(d * d, p);
    for (c, a) in tail.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                stacked[(i * d + j, c)] = a[(i, j)];
            }
        }
    }
    let images = &stacked * &kernel;
    let svd = images.svd(false, true);
    let top = svd.singular_values[0];
    let scale = tail.iter().map(matcore::hs_norm).fold(0.0f64, f64::max);
    if top <= tol.pivot_tol() * scale {
        return Ok(None);
    }
    let combo = &kernel * svd.v_t.as_ref().unwrap().row(0).adjoint();
    let mut raw = CMatrix::zeros(d, d);
    for (c, a) in tail.iter().enumerate() {
        raw += a.map(|z| z * combo[c]);
    }

    let re = (&raw + raw.adjoint()).scale(0.5);
    let im = (&raw - raw.adjoint()).map(|z| z * Complex64::new(0.0, -0.5));
    let (mut mat, part) = if matcore::hs_norm(&re) > tol.residual_tol * matcore::hs_norm(&raw) {
        (re, ExtractedPart::Real)
    } else {
        (im, ExtractedPart::Imaginary)
    };
    let mat_norm = matcore::hs_norm(&mat);
    if mat_norm <= 0.0 {
        return Ok(None);
    }

    // normalize a designated quadratic form to 1
    let mut designated_index = None;
    let mut best_diag = 0.0;
    for i in 0..block {
        let v = mat[(i, i)].norm();
        if v > best_diag {
            best_diag = v;
            designated_index = Some(i);
        }
    }
    let (scale_factor, designated_vector) = if best_diag > tol.pivot_tol() * mat_norm {
        let i = designated_index.unwrap();
        (mat[(i, i)], matcore::basis_vector(d, i))
    } else {
        designated_index = None;
        let (vals, vecs) = matcore::hermitian_eigen(&mat);
        // largest |eigenvalue| end of the spectrum
        let (idx, lam) = {
            let lo = (0usize, vals[0]);
            let hi = (vals.len() - 1, *vals.last().unwrap());
            if lo.1.abs() >= hi.1.abs() { lo } else { hi }
        };
        (Complex64::new(lam, 0.0), vecs.column(idx).into_owned())
    };
    mat = mat.map(|z| z / scale_factor);

    Ok(Some(BlockExtraction {
        matrix: mat,
        coefficients: (0..p).map(|i| [combo[i].re, combo[i].im]).collect(),
        part,
        designated_index,
        designated_vector,
    }))
}

// ---------------------------------------------------------------------------
// cubic index thinning
// ---------------------------------------------------------------------------

/// Indices selected by the cubic thinning argument together with the flag
/// recording whether the ambient dimension ran out.
#[derive(Debug, Clone, Serialize)]
pub struct ThinSelection {
    /// Zero-based coordinates `M_1 < scale constraints`, one per operator prefix.
    pub indices: Vec<usize>,
    pub scale_limited: bool,
}

impl ThinSelection {
    pub fn frames(&self, d: usize) -> Vec<CVector> {
        self.indices.iter().map(|&i| matcore::basis_vector(d, i)).collect()
    }
}

/// Choose indices `M_k` beyond the cubic bounds `N_{k³}` so that the
/// compressions of `A_1..A_k` to the selected coordinates stay linearly
/// independent, using the distinguishing-diagonal-entry argument. Returns
/// the longest achieved prefix with a scale-limit flag when the ambient
/// dimension runs out.
pub fn thin_subsequence(
    a_list: &[CMatrix],
    n_bounds: &[usize],
    tol: &Tolerance,
) -> Result<ThinSelection> {
    if a_list.is_empty() {
        return Err(Error::EmptyInput("thinning an empty list".into()));
    }
    let d = a_list[0].nrows();
    // off-diagonal support must sit inside the declared blocks
    for (n0, a) in a_list.iter().enumerate() {
        let bound = bound_at(n_bounds, n0 + 1);
        for i in 0..d {
            for j in 0..d {
                if i != j && i.max(j) >= bound && a[(i, j)].norm() > tol.residual_tol {
                    return Err(Error::PatternViolation(format!(
                        "operator {} has off-diagonal entry outside its N-block",
                        n0 + 1
                    )));
                }
            }
        }
    }

    let mut indices: Vec<usize> = Vec::new();
    let mut scale_limited = false;

    for k in 1..=a_list.len() {
        let floor = bound_at(n_bounds, k * k * k);
        if floor >= d {
            scale_limited = true;
            break;
        }
        let prev = &a_list[..k - 1];
        let current = &a_list[k - 1];

        // does the span of the earlier operators already reproduce the
        // current compression?
        let distinguisher: Option<CMatrix> = if k == 1 {
            Some(current.clone())
        } else {
            let compress = |a: &CMatrix| -> CVector {
                CVector::from_fn((k - 1) * (k - 1), |r, _| {
                    let (p, q) = (r / (k - 1), r % (k - 1));
                    a[(indices[p], indices[q])]
                })
            };
            let m = CMatrix::from_columns(&prev.iter().map(compress).collect::<Vec<_>>());
            let rhs = compress(current);
            let coeff = matcore::lstsq(&m, &rhs)?;
            let residual = (&m * &coeff - &rhs).norm();
            if residual <= tol.residual_tol * rhs.norm().max(1.0) {
                let mut a_match = CMatrix::zeros(d, d);
                for (i, a) in prev.iter().enumerate() {
                    a_match += a.map(|z| z * coeff[i]);
                }
                Some(a_match - current)
            } else {
                None
            }
        };

        let chosen = match distinguisher {
            Some(diff) => {
                let mut best: Option<(f64, usize)> = None;
                for idx in floor..d {
                    if indices.contains(&idx) {
                        continue;
                    }
                    let val = diff[(idx, idx)].norm();
                    if best.map(|(b, _)| val > b).unwrap_or(true) {
                        best = Some((val, idx));
                    }
                }
                match best {
                    Some((val, idx)) if val > tol.residual_tol * matcore::op_norm(&diff).max(1e-30) => {
                        Some(idx)
                    }
                    _ => None,
                }
            }
            None => (floor..d).find(|idx| !indices.contains(idx)),
        };

        match chosen {
            Some(idx) => indices.push(idx),
            None => {
                scale_limited = true;
                break;
            }
        }
    }

    Ok(ThinSelection { indices, scale_limited })
}

fn bound_at(n_bounds: &[usize], pos: usize) -> usize {
    // the bounds are made nondecreasing; positions beyond the list reuse the last
    let mut running = 0usize;
    let mut out = 0usize;
    for (i, &b) in n_bounds.iter().enumerate() {
        running = running.max(b);
        if i < pos {
            out = running;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// corner elimination
// ---------------------------------------------------------------------------

/// A fully diagonal nonzero combination extracted from block-plus-diagonal
/// inputs.
#[derive(Debug, Clone, Serialize)]
pub struct CornerElimination {
    #[serde(with = "json::cmatrix")]
    pub matrix: CMatrix,
    pub coefficients: Vec<[f64; 2]>,
    pub off_diagonal_norm: f64,
}

/// Solve the nullspace of the off-diagonal-entry map over inputs that are
/// each a top-left `n×n` block plus a diagonal; with `3n²−3n+1 > n²−n`
/// inputs a nonzero diagonal combination always exists.
pub fn diagonal_from_corners(
    a_list: &[CMatrix],
    n: usize,
    tol: &Tolerance,
) -> Result<CornerElimination> {
    if a_list.is_empty() {
        return Err(Error::EmptyInput("corner elimination on an empty list".into()));
    }
    let d = a_list[0].nrows();
    if n > d {
        return Err(Error::DimensionLimit(format!("block {n} exceeds dimension {d}")));
    }
    for (idx, a) in a_list.iter().enumerate() {
        if a.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "operator {idx} has shape {:?}",
                a.shape()
            )));
        }
        for i in 0..d {
            for j in 0..d {
                if i != j && i.max(j) >= n && a[(i, j)].norm() > tol.residual_tol {
                    return Err(Error::PatternViolation(format!(
                        "operator {idx} is not block-plus-diagonal"
                    )));
                }
            }
        }
    }

    let p = a_list.len();
    let positions: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    let mut phi = CMatrix::zeros(positions.len(), p);
    for (c, a) in a_list.iter().enumerate() {
        for (r, &(i, j)) in positions.iter().enumerate() {
            phi[(r, c)] = a[(i, j)];
        }
    }
    let kernel = matcore::nullspace(&phi, tol);
    if kernel.ncols() == 0 {
        return Err(Error::NullspaceEmpty(
            "no diagonal combination at this tolerance".into(),
        ));
    }

    let mut stacked = CMatrix::zeros(d * d, p);
    for (c, a) in a_list.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                stacked[(i * d + j, c)] = a[(i, j)];
            }
        }
    }
    let images = &stacked * &kernel;
    let svd = images.svd(false, true);
    let top = svd.singular_values[0];
    if top <= 0.0 {
        return Err(Error::NullspaceEmpty("kernel produces only zero operators".into()));
    }
    let combo = &kernel * svd.v_t.as_ref().unwrap().row(0).adjoint();
    let mut mat = CMatrix::zeros(d, d);
    for (c, a) in a_list.iter().enumerate() {
        mat += a.map(|z| z * combo[c]);
    }
    let mut off = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                off += mat[(i, j)].norm_sqr();
            }
        }
    }
    Ok(CornerElimination {
        matrix: mat,
        coefficients: (0..p).map(|i| [combo[i].re, combo[i].im]).collect(),
        off_diagonal_norm: off.sqrt(),
    })
}
