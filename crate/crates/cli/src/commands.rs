//! Subcommand implementations: file loading, strict parsing, dispatch into
//! the core library, and report emission with the exit-code contract.

use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use ncg_core::channels::{self, QuantumChannel};
use ncg_core::constructions::{
    clique_certificate, cluster_diagonals, diagonal_from_corners, dilation_isometry,
    random_diagonal_family, reduce_to_diagonal_seeded, spanning_vectors,
    triangularize_diagonals,
};
use ncg_core::json as cjson;
use ncg_core::matcore::CMatrix;
use ncg_core::opsys::{self, Graph, GraphConvention, OperatorSystem, Projection};
use ncg_core::ramsey::{
    find_anticlique, find_clique, is_quantum_anticlique, is_quantum_clique, trichotomy_probe,
    SearchConfig, Verdict, VerdictKind,
};
use ncg_core::FixtureKind;

use crate::report::{config_value, emit};
use crate::{CliError, CommonOpts, ConventionArg, ConstructionKind, SearchMode};

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("reading {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("parsing {}: {e}", path.display())))
}

fn search_config(common: &CommonOpts) -> Result<SearchConfig, CliError> {
    Ok(SearchConfig {
        tol: common.tolerance()?,
        seed: common.effective_seed()?,
        restarts: common.restarts.max(1),
        ..SearchConfig::default()
    })
}

impl ConventionArg {
    fn to_core(self) -> GraphConvention {
        match self {
            ConventionArg::PaperLiteral => GraphConvention::PaperLiteral,
            ConventionArg::Reflexive => GraphConvention::Reflexive,
        }
    }
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatricesInput {
    d: usize,
    basis: Vec<cjson::MatrixDto>,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphInput {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelInput {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<cjson::MatrixDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemInput {
    d: usize,
    #[serde(default)]
    label: Option<String>,
    basis: Vec<cjson::MatrixDto>,
    #[serde(default)]
    graph: Option<GraphInput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionInput {
    d: usize,
    columns: cjson::MatrixDto,
}

fn load_graph(value: &Value) -> Result<Graph, CliError> {
    let input: GraphInput = serde_json::from_value(value.clone())
        .map_err(|e| CliError::parse(format!("graph schema: {e}")))?;
    Ok(Graph::new(input.vertex_count, &input.edges)?)
}

fn load_channel(value: &Value, tol: &ncg_core::Tolerance) -> Result<QuantumChannel, CliError> {
    let input: ChannelInput = serde_json::from_value(value.clone())
        .map_err(|e| CliError::parse(format!("channel schema: {e}")))?;
    let kraus = matrices(&input.kraus)?;
    Ok(QuantumChannel::new(input.in_dim, input.out_dim, kraus, tol)?)
}

fn load_system(path: &Path, tol: &ncg_core::Tolerance) -> Result<OperatorSystem, CliError> {
    let input: SystemInput = parse_json(path)?;
    let basis = matrices(&input.basis)?;
    let system = OperatorSystem::new(
        input.d,
        basis,
        input.label.unwrap_or_default(),
        tol,
    )?;
    // the graph label is advisory; re-validated like everything else
    if let Some(g) = input.graph {
        let graph = Graph::new(g.vertex_count, &g.edges)?;
        return Ok(system.with_graph(graph));
    }
    Ok(system)
}

fn load_projection(path: &Path, tol: &ncg_core::Tolerance) -> Result<Projection, CliError> {
    let input: ProjectionInput = parse_json(path)?;
    let columns = cjson::matrix_from_dto(&input.columns)?;
    Ok(Projection::new(input.d, columns, tol)?)
}

pub fn build(
    input: &Path,
    convention: ConventionArg,
    common: &CommonOpts,
) -> Result<u8, CliError> {
    let tol = common.tolerance()?;
    let seed = common.effective_seed()?;
    let raw: Value = parse_json(input)?;
    let obj = raw
        .as_object()
        .ok_or_else(|| CliError::parse("input must be a JSON object"))?;

    let system: OperatorSystem = if obj.contains_key("vertex_count") {
        let graph = load_graph(&raw)?;
        opsys::from_graph(&graph, convention.to_core())?
    } else if obj.contains_key("kraus") {
        let channel = load_channel(&raw, &tol)?;
        channels::confusability(&channel, &tol)?
    } else if obj.contains_key("basis") {
        let mats: MatricesInput = serde_json::from_value(raw.clone())
            .map_err(|e| CliError::parse(format!("matrix-list schema: {e}")))?;
        let basis = mats
            .basis
            .iter()
            .map(cjson::matrix_from_dto)
            .collect::<Result<Vec<_>, _>>()?;
        opsys::normalize(&basis, mats.d, &tol)?
            .with_label(mats.label.unwrap_or_else(|| "normalized".into()))
    } else {
        return Err(CliError::parse(
            "input is none of: graph {vertex_count, edges}, channel {in_dim, out_dim, kraus}, \
             matrices {d, basis}",
        ));
    };

    let dimension = system.dimension(&tol);
    let result = json!({
        "system": serde_json::to_value(&system)
            .map_err(|e| CliError::parse(e.to_string()))?,
        "dimension": dimension,
        "ambient_dim": system.ambient_dim(),
    });
    emit(
        "build",
        config_value(
            common.tol_rank,
            common.tol_res,
            seed,
            common.restarts,
            json!({"convention": format!("{:?}", convention.to_core())}),
        ),
        result,
        common.out.as_deref(),
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

pub fn search(
    system_path: &Path,
    mode: SearchMode,
    k: usize,
    common: &CommonOpts,
) -> Result<u8, CliError> {
    let cfg = search_config(common)?;
    let system = load_system(system_path, &cfg.tol)?;
    if k == 0 || k >= system.ambient_dim() {
        return Err(CliError::parse(format!(
            "k = {k} must satisfy 0 < k < ambient dimension {}",
            system.ambient_dim()
        )));
    }

    let (found, mode_name) = match mode {
        SearchMode::Anticlique => (find_anticlique(&system, k, &cfg), "anticlique"),
        SearchMode::Clique => (find_clique(&system, k, &cfg), "clique"),
    };

    let verdict = match &found {
        Some(p) => {
            let reverified = match mode {
                SearchMode::Anticlique => is_quantum_anticlique(&system, p, &cfg.tol)?,
                SearchMode::Clique => is_quantum_clique(&system, p, &cfg.tol)?,
            };
            let compression_dim = system.compress(p, &cfg.tol)?.dimension(&cfg.tol);
            json!({
                "kind": mode_name,
                "projection": serde_json::to_value(p)
                    .map_err(|e| CliError::parse(e.to_string()))?,
                "metrics": {
                    "rank": p.rank(),
                    "compression_dim": compression_dim,
                },
                "reverified": reverified,
            })
        }
        None => json!({
            "kind": "inconclusive",
            "projection": null,
            "metrics": {},
            "notes": "search exhausted its strategies without a verified witness",
        }),
    };

    emit(
        "search",
        config_value(
            common.tol_rank,
            common.tol_res,
            cfg.seed,
            cfg.restarts,
            json!({"mode": mode_name, "k": k}),
        ),
        verdict,
        common.out.as_deref(),
    )?;
    Ok(if found.is_some() { 0 } else { 4 })
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DilationParams {
    operators: Vec<cjson::MatrixDto>,
    vectors: Vec<cjson::VectorDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpanningParams {
    operators: Vec<cjson::MatrixDto>,
    m: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReduceDiagParams {
    d: usize,
    operators: Vec<cjson::MatrixDto>,
    #[serde(default = "default_candidates")]
    candidates: usize,
}

fn default_candidates() -> usize {
    8
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CornersParams {
    operators: Vec<cjson::MatrixDto>,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangularizeParams {
    operators: Vec<cjson::MatrixDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CliqueCertParams {
    m: usize,
    k_max: usize,
    /// Explicit diagonal operators; generated from the seed when omitted.
    #[serde(default)]
    operators: Option<Vec<cjson::MatrixDto>>,
    #[serde(default)]
    ambient_dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterParams {
    operators: Vec<cjson::MatrixDto>,
    eps: f64,
    #[serde(default = "default_min_size")]
    min_size: usize,
}

fn default_min_size() -> usize {
    2
}

fn matrices(dtos: &[cjson::MatrixDto]) -> Result<Vec<CMatrix>, CliError> {
    Ok(dtos
        .iter()
        .map(cjson::matrix_from_dto)
        .collect::<Result<Vec<_>, _>>()?)
}

pub fn construct(which: ConstructionKind, params: &Path, common: &CommonOpts) -> Result<u8, CliError> {
    let tol = common.tolerance()?;
    let seed = common.effective_seed()?;

    let (name, certifies, result, all_checks_pass): (&str, &str, Value, bool) = match which {
        ConstructionKind::Dilation => {
            let p: DilationParams = parse_json(params)?;
            let ops = matrices(&p.operators)?;
            let xs = p
                .vectors
                .iter()
                .map(cjson::vector_from_dto)
                .collect::<Result<Vec<_>, _>>()?;
            let cert = dilation_isometry(&ops, &xs, &tol)?;
            let ok = cert.verify(&tol);
            (
                "dilation",
                "V*(A ⊕ 0)V = T with T = Σ α_ij x_i x_j*",
                serde_json::to_value(&cert).map_err(|e| CliError::parse(e.to_string()))?,
                ok,
            )
        }
        ConstructionKind::Spanning => {
            let p: SpanningParams = parse_json(params)?;
            let ops = matrices(&p.operators)?;
            let fam = spanning_vectors(&ops, p.m, &tol)?;
            let ok = fam.verify(&tol);
            (
                "spanning",
                "span{T_1..T_m²} = M_m with ‖x_k‖ ≤ 2^-(k+1)",
                serde_json::to_value(&fam).map_err(|e| CliError::parse(e.to_string()))?,
                ok,
            )
        }
        ConstructionKind::ReduceDiag => {
            let p: ReduceDiagParams = parse_json(params)?;
            let ops = matrices(&p.operators)?;
            let system = opsys::normalize(&ops, p.d, &tol)?;
            let red = reduce_to_diagonal_seeded(&system, p.candidates, seed, &tol)?;
            let worst = red.max_cross_term(&system);
            let ok = worst <= tol.residual_tol;
            (
                "reduce-diag",
                "⟨A x_k, x_l⟩ = 0 for all generators A and k ≠ l",
                json!({
                    "vectors": red.vectors().iter().map(cjson::vector_to_dto).collect::<Vec<_>>(),
                    "nested_ranks": red.nested_ranks(),
                    "branch": format!("{:?}", red.branch()),
                    "max_cross_term": worst,
                }),
                ok,
            )
        }
        ConstructionKind::Corners => {
            let p: CornersParams = parse_json(params)?;
            let ops = matrices(&p.operators)?;
            let out = diagonal_from_corners(&ops, p.n, &tol)?;
            let ok = out.off_diagonal_norm <= tol.residual_tol;
            (
                "corners",
                "Σ c_n A_n is diagonal and nonzero (3n²−3n+1 > n²−n)",
                serde_json::to_value(&out).map_err(|e| CliError::parse(e.to_string()))?,
                ok,
            )
        }
        ConstructionKind::Triangularize => {
            let p: TriangularizeParams = parse_json(params)?;
            let ops = matrices(&p.operators)?;
            let fam = triangularize_diagonals(&ops, &tol)?;
            let ok = !fam.stalled && fam.max_violation() <= tol.residual_tol;
            let stalled = fam.stalled;
            let value =
                serde_json::to_value(&fam).map_err(|e| CliError::parse(e.to_string()))?;
            if stalled {
                emit(
                    "construct/triangularize",
                    construct_config(common, seed, "triangularize"),
                    json!({"certifies": "⟨B_n f_i, f_i⟩ = 0 for i < n, ⟨B_n f_n, f_n⟩ = 1",
                           "certificate": value, "passed": false}),
                    common.out.as_deref(),
                )?;
                return Ok(5);
            }
            (
                "triangularize",
                "⟨B_n f_i, f_i⟩ = 0 for i < n, ⟨B_n f_n, f_n⟩ = 1",
                value,
                ok,
            )
        }
        ConstructionKind::CliqueCert => {
            let p: CliqueCertParams = parse_json(params)?;
            let ops = match &p.operators {
                Some(dtos) => matrices(dtos)?,
                None => {
                    let d = p.ambient_dim.unwrap_or(p.k_max + 4);
                    random_diagonal_family(d, p.k_max, seed)
                }
            };
            let fam = triangularize_diagonals(&ops, &tol)?;
            let cert = clique_certificate(&fam, p.m, p.k_max, &tol)?;
            let ok = cert.verify(&tol);
            (
                "clique-cert",
                "‖E_rs − Σ_j γ_j V*A_jV‖ ≤ 1/m for all r, s ≤ m",
                serde_json::to_value(&cert).map_err(|e| CliError::parse(e.to_string()))?,
                ok,
            )
        }
        ConstructionKind::Cluster => {
            let p: ClusterParams = parse_json(params)?;
            let ops = matrices(&p.operators)?;
            let sel = cluster_diagonals(&ops, p.eps, p.min_size, &tol)?;
            (
                "cluster",
                "|diag(A_k)[i] − α_k| ≤ eps for every selected index i",
                serde_json::to_value(&sel).map_err(|e| CliError::parse(e.to_string()))?,
                true,
            )
        }
    };

    emit(
        &format!("construct/{name}"),
        construct_config(common, seed, name),
        json!({"certifies": certifies, "certificate": result, "passed": all_checks_pass}),
        common.out.as_deref(),
    )?;
    Ok(if all_checks_pass { 0 } else { 5 })
}

fn construct_config(common: &CommonOpts, seed: u64, construction: &str) -> Value {
    config_value(
        common.tol_rank,
        common.tol_res,
        seed,
        common.restarts,
        json!({"construction": construction}),
    )
}

// ---------------------------------------------------------------------------
// probe
// ---------------------------------------------------------------------------

pub fn probe(fixture: &str, dims: &[usize], common: &CommonOpts) -> Result<u8, CliError> {
    let cfg = search_config(common)?;
    let kind: FixtureKind = fixture
        .parse()
        .map_err(|e: ncg_core::Error| CliError::parse(e.to_string()))?;
    if dims.len() < 3 {
        return Err(CliError::parse("probe needs at least three truncation dimensions"));
    }
    let verdict = trichotomy_probe(kind, dims, &cfg)?;
    let code = verdict_exit_code(&verdict);
    emit(
        "probe",
        config_value(
            common.tol_rank,
            common.tol_res,
            cfg.seed,
            cfg.restarts,
            json!({"fixture": fixture, "dims": dims}),
        ),
        serde_json::to_value(&verdict).map_err(|e| CliError::parse(e.to_string()))?,
        common.out.as_deref(),
    )?;
    Ok(code)
}

fn verdict_exit_code(verdict: &Verdict) -> u8 {
    match verdict.kind {
        VerdictKind::Inconclusive => 4,
        _ => 0,
    }
}

// ---------------------------------------------------------------------------
// verify-kl / find-code
// ---------------------------------------------------------------------------

pub fn verify_kl(
    channel_path: &Path,
    projection_path: &Path,
    common: &CommonOpts,
) -> Result<u8, CliError> {
    let tol = common.tolerance()?;
    let channel_raw: Value = parse_json(channel_path)?;
    let channel = load_channel(&channel_raw, &tol)?;
    let projection = load_projection(projection_path, &tol)?;
    let report = channels::kl_verify(&channel, &projection, &tol)?;
    let passed = report.passed;
    let seed = common.effective_seed()?;
    emit(
        "verify-kl",
        config_value(common.tol_rank, common.tol_res, seed, common.restarts, json!({})),
        json!({
            "report": serde_json::to_value(&report)
                .map_err(|e| CliError::parse(e.to_string()))?,
            "trace_preserving": channel.is_trace_preserving(),
        }),
        common.out.as_deref(),
    )?;
    Ok(if passed { 0 } else { 4 })
}

pub fn find_code(channel_path: &Path, k: usize, common: &CommonOpts) -> Result<u8, CliError> {
    let cfg = search_config(common)?;
    let channel_raw: Value = parse_json(channel_path)?;
    let channel = load_channel(&channel_raw, &cfg.tol)?;
    let found = channels::find_code(&channel, k, &cfg)?;
    let result = match &found {
        Some((p, report)) => json!({
            "projection": serde_json::to_value(p)
                .map_err(|e| CliError::parse(e.to_string()))?,
            "kl_report": serde_json::to_value(report)
                .map_err(|e| CliError::parse(e.to_string()))?,
        }),
        None => json!({"projection": null, "notes": "no code found at this dimension"}),
    };
    let ok = found.as_ref().map(|(_, r)| r.passed).unwrap_or(false);
    emit(
        "find-code",
        config_value(
            common.tol_rank,
            common.tol_res,
            cfg.seed,
            cfg.restarts,
            json!({"k": k}),
        ),
        result,
        common.out.as_deref(),
    )?;
    Ok(if ok { 0 } else { 4 })
}
