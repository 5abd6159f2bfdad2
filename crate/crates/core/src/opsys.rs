//! Operator systems on finite-dimensional spaces: construction from explicit
//! bases, graphs and fixtures, normalization, compression and dimension
//! queries.
//!
//! An operator system here is a span of `d×d` complex matrices that contains
//! the identity and is closed under adjoints. The stored basis is linearly
//! independent, extracted by first-come Gram pivoting so fixture bases are
//! stable.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{self, MatrixDto};
use crate::matcore::{self, CMatrix, Tolerance};

/// Simple undirected graph without loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphDto", into = "GraphDto")]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDto {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphDto> for Graph {
    type Error = Error;
    fn try_from(dto: GraphDto) -> Result<Self> {
        Graph::new(dto.vertex_count, &dto.edges)
    }
}

impl From<Graph> for GraphDto {
    fn from(g: Graph) -> Self {
        GraphDto { vertex_count: g.vertex_count, edges: g.edges.into_iter().collect() }
    }
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvariantViolation(format!("graph has a loop at {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvariantViolation(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { vertex_count, edges: set })
    }

    pub fn empty(vertex_count: usize) -> Self {
        Graph { vertex_count, edges: BTreeSet::new() }
    }

    pub fn complete(vertex_count: usize) -> Self {
        let mut edges = BTreeSet::new();
        for u in 0..vertex_count {
            for v in (u + 1)..vertex_count {
                edges.insert((u, v));
            }
        }
        Graph { vertex_count, edges }
    }

    pub fn cycle(vertex_count: usize) -> Self {
        let mut edges = BTreeSet::new();
        for u in 0..vertex_count {
            let v = (u + 1) % vertex_count;
            if u != v {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        Graph { vertex_count, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// True when every pair of distinct vertices in `c` is adjacent.
    pub fn is_clique(&self, c: &[usize]) -> bool {
        c.iter().enumerate().all(|(i, &u)| c[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// True when no pair of vertices in `c` is adjacent.
    pub fn is_anticlique(&self, c: &[usize]) -> bool {
        c.iter().enumerate().all(|(i, &u)| c[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }
}

/// Which span the graph system uses: the literal unit-plus-edge-units span,
/// or the reflexive variant that also includes all diagonal units.
///
/// The literal span makes the anticlique criterion exact (compression
/// dimension 1) while a size-k clique compresses to dimension k²−k+1; the
/// reflexive span restores the k² clique criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphConvention {
    PaperLiteral,
    Reflexive,
}

/// Rank-k orthogonal projection carried as a `d×k` column-orthonormal frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ProjectionDto", into = "ProjectionDto")]
pub struct Projection {
    dim: usize,
    columns: CMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionDto {
    d: usize,
    columns: MatrixDto,
}

impl TryFrom<ProjectionDto> for Projection {
    type Error = Error;
    fn try_from(dto: ProjectionDto) -> Result<Self> {
        Projection::new(dto.d, json::matrix_from_dto(&dto.columns)?, &Tolerance::default())
    }
}

impl From<Projection> for ProjectionDto {
    fn from(p: Projection) -> Self {
        ProjectionDto { d: p.dim, columns: json::matrix_to_dto(&p.columns) }
    }
}

impl Projection {
    pub fn new(dim: usize, columns: CMatrix, tol: &Tolerance) -> Result<Self> {
        if columns.nrows() != dim {
            return Err(Error::ShapeMismatch(format!(
                "projection frame has {} rows, ambient dimension is {dim}",
                columns.nrows()
            )));
        }
        if columns.ncols() == 0 || columns.ncols() > dim {
            return Err(Error::InvariantViolation(format!(
                "projection rank {} invalid in dimension {dim}",
                columns.ncols()
            )));
        }
        let k = columns.ncols();
        let gram = columns.adjoint() * &columns;
        let dev = matcore::op_norm(&(gram - CMatrix::identity(k, k)));
        if dev > tol.residual_tol {
            return Err(Error::InvariantViolation(format!(
                "projection frame is not column-orthonormal: deviation {dev:.3e}"
            )));
        }
        Ok(Projection { dim, columns })
    }

    /// Coordinate projection onto the span of the listed standard basis vectors.
    pub fn from_coordinates(dim: usize, coords: &[usize]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("projection onto no coordinates".into()));
        }
        let mut seen = BTreeSet::new();
        let mut cols = Vec::with_capacity(coords.len());
        for &i in coords {
            if i >= dim {
                return Err(Error::InvariantViolation(format!(
                    "coordinate {i} out of range for dimension {dim}"
                )));
            }
            if seen.insert(i) {
                cols.push(matcore::basis_vector(dim, i));
            }
        }
        Ok(Projection { dim, columns: CMatrix::from_columns(&cols) })
    }

    /// Orthonormalize an arbitrary full-column-rank map into a frame.
    pub fn from_map(dim: usize, map: &CMatrix, tol: &Tolerance) -> Result<Self> {
        let cols: Vec<_> = (0..map.ncols()).map(|j| map.column(j).into_owned()).collect();
        let ortho = matcore::orthonormalize_vectors(&cols, tol);
        if ortho.is_empty() {
            return Err(Error::ZeroOperator("projection from a rank-zero map".into()));
        }
        Projection::new(dim, CMatrix::from_columns(&ortho), tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.columns.ncols()
    }

    /// The frame `W`; the projection itself is `W W^*`.
    pub fn frame(&self) -> &CMatrix {
        &self.columns
    }

    pub fn matrix(&self) -> CMatrix {
        &self.columns * self.columns.adjoint()
    }

    /// Compose with a projection expressed in this projection's range
    /// coordinates, yielding a projection of the ambient space.
    pub fn compose(&self, inner: &Projection, tol: &Tolerance) -> Result<Projection> {
        if inner.ambient_dim() != self.rank() {
            return Err(Error::ShapeMismatch(format!(
                "inner projection lives in dim {}, range has dim {}",
                inner.ambient_dim(),
                self.rank()
            )));
        }
        Projection::new(self.dim, &self.columns * inner.frame(), tol)
    }
}

/// A unital self-adjoint span of `d×d` matrices with an independent basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "OperatorSystemDto", into = "OperatorSystemDto")]
pub struct OperatorSystem {
    ambient_dim: usize,
    basis: Vec<CMatrix>,
    label: String,
    graph: Option<Graph>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorSystemDto {
    d: usize,
    #[serde(default)]
    label: Option<String>,
    basis: Vec<MatrixDto>,
    #[serde(default)]
    graph: Option<Graph>,
}

impl TryFrom<OperatorSystemDto> for OperatorSystem {
    type Error = Error;
    fn try_from(dto: OperatorSystemDto) -> Result<Self> {
        let basis = dto
            .basis
            .iter()
            .map(json::matrix_from_dto)
            .collect::<Result<Vec<_>>>()?;
        let mut sys = OperatorSystem::new(
            dto.d,
            basis,
            dto.label.unwrap_or_default(),
            &Tolerance::default(),
        )?;
        sys.graph = dto.graph;
        Ok(sys)
    }
}

impl From<OperatorSystem> for OperatorSystemDto {
    fn from(v: OperatorSystem) -> Self {
        OperatorSystemDto {
            d: v.ambient_dim,
            label: if v.label.is_empty() { None } else { Some(v.label) },
            basis: v.basis.iter().map(json::matrix_to_dto).collect(),
            graph: v.graph,
        }
    }
}

impl OperatorSystem {
    /// Validating constructor: the basis must be independent, its span must
    /// contain the identity and be closed under adjoints.
    pub fn new(
        ambient_dim: usize,
        basis: Vec<CMatrix>,
        label: impl Into<String>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::EmptyInput("operator system needs a basis".into()));
        }
        for m in &basis {
            if m.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::ShapeMismatch(format!(
                    "basis element of shape {:?} in ambient dimension {ambient_dim}",
                    m.shape()
                )));
            }
        }
        let sys = OperatorSystem {
            ambient_dim,
            basis,
            label: label.into(),
            graph: None,
        };
        let rank = matcore::span_rank(&sys.basis, tol)?;
        if rank != sys.basis.len() {
            return Err(Error::InvariantViolation(format!(
                "basis is dependent: {} elements, span rank {rank}",
                sys.basis.len()
            )));
        }
        if !sys.contains(&matcore::identity(ambient_dim), tol)? {
            return Err(Error::InvariantViolation("span does not contain the identity".into()));
        }
        for m in &sys.basis {
            if !sys.contains(&m.adjoint(), tol)? {
                return Err(Error::InvariantViolation(
                    "span is not closed under adjoints".into(),
                ));
            }
        }
        Ok(sys)
    }

    fn from_parts(ambient_dim: usize, basis: Vec<CMatrix>, label: String) -> Self {
        OperatorSystem { ambient_dim, basis, label, graph: None }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn graph(&self) -> Option<&Graph> {
        self.graph.as_ref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Attach the graph this system was built from, enabling the coordinate
    /// search strategies.
    pub fn with_graph(mut self, graph: Graph) -> Self {
        self.graph = Some(graph);
        self
    }

    /// Span membership: the Hilbert-Schmidt projection of `a` onto the span
    /// leaves a residual of at most `residual_tol · ‖a‖`.
    pub fn contains(&self, a: &CMatrix, tol: &Tolerance) -> Result<bool> {
        if a.shape() != (self.ambient_dim, self.ambient_dim) {
            return Err(Error::ShapeMismatch(format!(
                "contains: matrix of shape {:?} in dimension {}",
                a.shape(),
                self.ambient_dim
            )));
        }
        let scale = matcore::hs_norm(a);
        if scale == 0.0 {
            return Ok(true);
        }
        let ortho = hs_orthonormalize(&self.basis, tol);
        let residual = hs_project_residual(a, &ortho);
        Ok(residual <= tol.residual_tol * scale)
    }

    /// Span dimension (Gram rank of the basis).
    pub fn dimension(&self, tol: &Tolerance) -> usize {
        matcore::span_rank(&self.basis, tol).expect("basis is nonempty and same-shaped")
    }

    /// Compression by a projection, realized on the range: the system on C^k
    /// spanned by `{W^* A W}` together with the identity.
    pub fn compress(&self, p: &Projection, tol: &Tolerance) -> Result<OperatorSystem> {
        if p.ambient_dim() != self.ambient_dim {
            return Err(Error::ShapeMismatch(format!(
                "compress: projection in dimension {}, system in {}",
                p.ambient_dim(),
                self.ambient_dim
            )));
        }
        let w = p.frame();
        let compressed: Vec<CMatrix> = self.basis.iter().map(|a| w.adjoint() * a * w).collect();
        Ok(normalize(&compressed, p.rank(), tol)?
            .with_label(format!("{}|P(rank {})", self.label, p.rank())))
    }
}

/// Gram-Schmidt over the Hilbert-Schmidt inner product; returns the
/// orthonormalized family, dropping elements below the pivot threshold.
pub(crate) fn hs_orthonormalize(mats: &[CMatrix], tol: &Tolerance) -> Vec<CMatrix> {
    let mut ortho: Vec<CMatrix> = Vec::new();
    for m in mats {
        let scale = matcore::hs_norm(m);
        if scale <= 0.0 {
            continue;
        }
        let mut r = m.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = matcore::hs_inner(&r, q).expect("same shape");
                r -= q.map(|z| z * c);
            }
        }
        let n = matcore::hs_norm(&r);
        if n > tol.pivot_tol() * scale {
            ortho.push(r.unscale(n));
        }
    }
    ortho
}

pub(crate) fn hs_project_residual(a: &CMatrix, ortho: &[CMatrix]) -> f64 {
    let mut r = a.clone();
    for _ in 0..2 {
        for q in ortho {
            let c = matcore::hs_inner(&r, q).expect("same shape");
            r -= q.map(|z| z * c);
        }
    }
    matcore::hs_norm(&r)
}

/// Unital self-adjoint normalization: the span of `mats ∪ adjoints ∪ {I}`,
/// with an independent basis extracted by first-come Gram pivoting. The
/// identity always comes first, then inputs in order, then any adjoints that
/// add new directions.
pub fn normalize(mats: &[CMatrix], d: usize, tol: &Tolerance) -> Result<OperatorSystem> {
    if d == 0 {
        return Err(Error::EmptyInput("normalize in dimension zero".into()));
    }
    for m in mats {
        if m.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "normalize: matrix of shape {:?}, expected {d}×{d}",
                m.shape()
            )));
        }
    }
    let mut candidates: Vec<CMatrix> = Vec::with_capacity(2 * mats.len() + 1);
    candidates.push(matcore::identity(d));
    candidates.extend(mats.iter().cloned());
    candidates.extend(mats.iter().map(|m| m.adjoint()));

    let mut basis: Vec<CMatrix> = Vec::new();
    let mut ortho: Vec<CMatrix> = Vec::new();
    for cand in candidates {
        let scale = matcore::hs_norm(&cand);
        if scale <= 0.0 {
            continue;
        }
        let mut r = cand.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = matcore::hs_inner(&r, q).expect("same shape");
                r -= q.map(|z| z * c);
            }
        }
        let n = matcore::hs_norm(&r);
        if n > tol.pivot_tol() * scale {
            ortho.push(r.unscale(n));
            basis.push(cand);
        }
    }
    Ok(OperatorSystem::from_parts(d, basis, String::new()))
}

/// The operator system of a graph: the span of the identity and the edge
/// matrix units `h_v h_w^*` in both orientations, plus all diagonal units
/// under the reflexive convention.
pub fn from_graph(g: &Graph, convention: GraphConvention) -> Result<OperatorSystem> {
    let d = g.vertex_count();
    if d == 0 {
        return Err(Error::EmptyInput("graph with no vertices".into()));
    }
    let mut mats = Vec::new();
    if convention == GraphConvention::Reflexive {
        for v in 0..d {
            mats.push(matcore::matrix_unit(d, v, v));
        }
    }
    for (u, v) in g.edges() {
        mats.push(matcore::matrix_unit(d, u, v));
        mats.push(matcore::matrix_unit(d, v, u));
    }
    let tol = Tolerance::default();
    let mut sys = normalize(&mats, d, &tol)?.with_label(format!(
        "V_G(n={}, e={}, {:?})",
        d,
        g.edge_count(),
        convention
    ));
    sys.graph = Some(g.clone());
    Ok(sys)
}

/// Named fixtures realized at a finite truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    /// `span{I, K, e_1 e_n^*, e_n e_1^*}` with `K = Σ (1/n) e_n e_n^*`.
    WeaverExample,
    /// `span{I, A_n}` with `A_n = e_n e_n^* + n e_0 e_n^* + n e_n e_0^*`,
    /// the system whose trace functionals `T_m` annihilate every generator.
    TraceExample,
    /// `span{I, K}` for the positive compact-type operator `K = diag(1/n)`.
    CompactKExample,
    /// All of `M_N`, the maximal system; the probe's clique baseline.
    FullAlgebra,
}

impl std::str::FromStr for FixtureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weaver_example" | "weaver" => Ok(FixtureKind::WeaverExample),
            "trace_example" | "trace" => Ok(FixtureKind::TraceExample),
            "compact_k_example" | "compact_k" | "compact_K_example" => {
                Ok(FixtureKind::CompactKExample)
            }
            "full_algebra" | "full" => Ok(FixtureKind::FullAlgebra),
            other => Err(Error::UnknownFixture(other.into())),
        }
    }
}

/// Truncation parameters for a fixture.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub n: usize,
    pub kind: FixtureKind,
}

impl TruncationSpec {
    pub fn new(kind: FixtureKind, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionLimit(format!(
                "fixture truncation must have N ≥ 3, got {n}"
            )));
        }
        Ok(TruncationSpec { n, kind })
    }
}

/// Truncation of the named system to the first `N` basis vectors, normalized.
///
/// Indexing follows each example's own convention: the Weaver and compact-K
/// systems index their basis from 1 (`e_1` is coordinate 0), the trace
/// example keeps `e_0` as the distinguished vector (coordinate 0).
pub fn fixture(spec: &TruncationSpec) -> Result<OperatorSystem> {
    let n = spec.n;
    let tol = Tolerance::default();
    match spec.kind {
        FixtureKind::WeaverExample => {
            let mut mats = vec![compact_k_diag(n)];
            for j in 0..n {
                mats.push(matcore::matrix_unit(n, 0, j));
                if j != 0 {
                    mats.push(matcore::matrix_unit(n, j, 0));
                }
            }
            Ok(normalize(&mats, n, &tol)?.with_label(format!("weaver(N={n})")))
        }
        FixtureKind::TraceExample => {
            let mats: Vec<CMatrix> = (1..n).map(|k| trace_example_generator(n, k)).collect();
            Ok(normalize(&mats, n, &tol)?.with_label(format!("trace_example(N={n})")))
        }
        FixtureKind::CompactKExample => {
            let mats = vec![compact_k_diag(n)];
            Ok(normalize(&mats, n, &tol)?.with_label(format!("compact_K(N={n})")))
        }
        FixtureKind::FullAlgebra => {
            // assembled directly: Gram pivoting over N² candidates is wasteful
            // when the independent basis is known in closed form
            let mut basis = vec![matcore::identity(n)];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        basis.push(matcore::matrix_unit(n, i, j));
                    }
                }
            }
            for i in 0..n.saturating_sub(1) {
                basis.push(matcore::matrix_unit(n, i, i));
            }
            Ok(OperatorSystem::from_parts(n, basis, format!("M_{n}")))
        }
    }
}

/// `K = diag(1, 1/2, …, 1/N)`.
pub fn compact_k_diag(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            num_complex::Complex64::new(1.0 / (i as f64 + 1.0), 0.0)
        } else {
            matcore::ZERO
        }
    })
}

/// `A_k = e_k e_k^* + k e_0 e_k^* + k e_k e_0^*` on C^N (coordinate 0 is `e_0`).
pub fn trace_example_generator(n: usize, k: usize) -> CMatrix {
    let kf = num_complex::Complex64::new(k as f64, 0.0);
    let mut m = matcore::matrix_unit(n, k, k);
    m += matcore::matrix_unit(n, 0, k).map(|z| z * kf);
    m += matcore::matrix_unit(n, k, 0).map(|z| z * kf);
    m
}

/// `T_m = 2m e_0 e_0^* + e_0 e_m^* + e_m e_0^* − 2m e_m e_m^*`, the trace
/// functional that annihilates every generator of the trace example.
pub fn trace_example_functional(n: usize, m: usize) -> CMatrix {
    let two_m = num_complex::Complex64::new(2.0 * m as f64, 0.0);
    let mut t = matcore::matrix_unit(n, 0, 0).map(|z| z * two_m);
    t += matcore::matrix_unit(n, 0, m);
    t += matcore::matrix_unit(n, m, 0);
    t -= matcore::matrix_unit(n, m, m).map(|z| z * two_m);
    t
}
