//! End-to-end tests of the `ncg` binary: exit codes, report shapes,
//! round-trips and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn ncg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncg"))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn c5_graph() -> Value {
    json!({"vertex_count": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[4,0]]})
}

fn identity_matrix_json(d: usize) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|i| (0..d).map(|j| [if i == j { 1.0 } else { 0.0 }, 0.0]).collect())
        .collect();
    json!(rows)
}

#[test]
fn build_graph_reports_dimension_eleven() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(dir.path(), "c5.json", &c5_graph());
    let out = dir.path().join("report.json");
    let status = run(ncg()
        .args(["build", "--input"])
        .arg(&input)
        .args(["--out"])
        .arg(&out))
    .status;
    assert_eq!(status.code(), Some(0));
    let report = read_report(&out);
    assert_eq!(report["result"]["dimension"], 11);
    assert_eq!(report["command"], "build");
}

#[test]
fn build_bit_flip_channel_dimension_two() {
    let dir = tempfile::tempdir().unwrap();
    let p: f64 = 0.25;
    let a = (1.0 - p).sqrt();
    let b = p.sqrt();
    let channel = json!({
        "in_dim": 2, "out_dim": 2,
        "kraus": [
            [[[a, 0.0], [0.0, 0.0]], [[0.0, 0.0], [a, 0.0]]],
            [[[0.0, 0.0], [b, 0.0]], [[b, 0.0], [0.0, 0.0]]],
        ]
    });
    let input = write_json(dir.path(), "ch.json", &channel);
    let out = dir.path().join("report.json");
    let status = run(ncg().arg("build").arg("--input").arg(&input).arg("--out").arg(&out)).status;
    assert_eq!(status.code(), Some(0));
    assert_eq!(read_report(&out)["result"]["dimension"], 2);
}

#[test]
fn build_empty_edge_list_dimension_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(
        dir.path(),
        "empty.json",
        &json!({"vertex_count": 4, "edges": []}),
    );
    let out = dir.path().join("report.json");
    let status = run(ncg().arg("build").arg("--input").arg(&input).arg("--out").arg(&out)).status;
    assert_eq!(status.code(), Some(0));
    assert_eq!(read_report(&out)["result"]["dimension"], 1);
}

#[test]
fn build_rejects_garbage_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{not json").unwrap();
    let status = run(ncg().arg("build").arg("--input").arg(&path)).status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn build_rejects_loop_graph_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(
        dir.path(),
        "loop.json",
        &json!({"vertex_count": 3, "edges": [[1, 1]]}),
    );
    let status = run(ncg().arg("build").arg("--input").arg(&input)).status;
    assert_eq!(status.code(), Some(3));
}

fn full_algebra_system(dir: &Path, d: usize) -> PathBuf {
    // build from the complete reflexive graph so the span is all of M_d
    let edges: Vec<[usize; 2]> = (0..d)
        .flat_map(|u| ((u + 1)..d).map(move |v| [u, v]))
        .collect();
    let graph = write_json(dir, "kd.json", &json!({"vertex_count": d, "edges": edges}));
    let out = dir.join("kd_report.json");
    let status = run(ncg()
        .arg("build")
        .arg("--input")
        .arg(&graph)
        .args(["--convention", "reflexive", "--out"])
        .arg(&out))
    .status;
    assert_eq!(status.code(), Some(0));
    let report = read_report(&out);
    let system = dir.join("kd_system.json");
    std::fs::write(&system, serde_json::to_string(&report["result"]["system"]).unwrap())
        .unwrap();
    system
}

#[test]
fn search_clique_on_full_algebra_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let system = full_algebra_system(dir.path(), 4);
    let out = dir.path().join("verdict.json");
    let status = run(ncg()
        .arg("search")
        .arg("--system")
        .arg(&system)
        .args(["--mode", "clique", "--k", "2", "--out"])
        .arg(&out))
    .status;
    assert_eq!(status.code(), Some(0));
    let verdict = read_report(&out);
    assert_eq!(verdict["result"]["kind"], "clique");
    assert_eq!(verdict["result"]["reverified"], true);
}

#[test]
fn search_clique_on_scalars_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let system = write_json(
        dir.path(),
        "scalars.json",
        &json!({"d": 3, "basis": [identity_matrix_json(3)]}),
    );
    let status = run(ncg()
        .arg("search")
        .arg("--system")
        .arg(&system)
        .args(["--mode", "clique", "--k", "2"]))
    .status;
    assert_eq!(status.code(), Some(4));
}

#[test]
fn construct_dilation_trivial_instance() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_json(
        dir.path(),
        "dilation.json",
        &json!({
            "operators": [identity_matrix_json(3)],
            "vectors": [[[0.25, 0.0], [0.0, 0.0]]],
        }),
    );
    let out = dir.path().join("cert.json");
    let status = run(ncg()
        .args(["construct", "dilation", "--params"])
        .arg(&params)
        .arg("--out")
        .arg(&out))
    .status;
    assert_eq!(status.code(), Some(0));
    let report = read_report(&out);
    assert_eq!(report["result"]["passed"], true);
    let residual = report["result"]["certificate"]["isometry_residual"].as_f64().unwrap();
    assert!(residual <= 1e-10);
}

#[test]
fn construct_spanning_with_too_few_operators_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_json(
        dir.path(),
        "spanning.json",
        &json!({"operators": [identity_matrix_json(2)], "m": 2}),
    );
    let status =
        run(ncg().args(["construct", "spanning", "--params"]).arg(&params)).status;
    assert_eq!(status.code(), Some(5));
}

#[test]
fn construct_clique_cert_bundled_generator() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_json(dir.path(), "cert.json", &json!({"m": 2, "k_max": 16}));
    let out = dir.path().join("report.json");
    let status = run(ncg()
        .args(["construct", "clique-cert", "--params"])
        .arg(&params)
        .arg("--out")
        .arg(&out))
    .status;
    assert_eq!(status.code(), Some(0));
    let report = read_report(&out);
    assert_eq!(report["result"]["passed"], true);
    let levels = report["result"]["certificate"]["levels"].as_array().unwrap();
    for lvl in levels {
        let mu = lvl["mu"].as_u64().unwrap();
        for b in lvl["bounds"].as_array().unwrap() {
            assert!(b.as_f64().unwrap() <= 1.0 / mu as f64);
        }
    }
}

#[test]
fn probe_compact_k_reports_obstruction_evidence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("probe.json");
    let status = run(ncg()
        .args(["probe", "--fixture", "compact_k_example", "--dims", "16,24,32", "--out"])
        .arg(&out))
    .status;
    assert_eq!(status.code(), Some(0));
    let report = read_report(&out);
    assert_eq!(report["result"]["kind"], "obstruction_evidence");
    assert_eq!(report["result"]["metrics"]["dim16.compression_dim"], 2.0);
}

#[test]
fn probe_rejects_short_dims_with_exit_2() {
    let status = run(ncg().args(["probe", "--fixture", "weaver_example", "--dims", "8,16"]))
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(dir.path(), "c5.json", &c5_graph());
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    for out in [&out1, &out2] {
        let status = run(ncg()
            .arg("build")
            .arg("--input")
            .arg(&input)
            .args(["--seed", "9", "--out"])
            .arg(out))
        .status;
        assert_eq!(status.code(), Some(0));
    }
    let mut r1 = read_report(&out1);
    let mut r2 = read_report(&out2);
    r1.as_object_mut().unwrap().remove("timestamp_unix_s");
    r2.as_object_mut().unwrap().remove("timestamp_unix_s");
    assert_eq!(
        serde_json::to_string(&r1).unwrap(),
        serde_json::to_string(&r2).unwrap(),
        "same RunConfig must give byte-identical reports"
    );
}

#[test]
fn ncg_seed_env_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(dir.path(), "c5.json", &c5_graph());
    let out = dir.path().join("report.json");
    let status = run(ncg()
        .arg("build")
        .arg("--input")
        .arg(&input)
        .args(["--seed", "1", "--out"])
        .arg(&out)
        .env("NCG_SEED", "42"))
    .status;
    assert_eq!(status.code(), Some(0));
    assert_eq!(read_report(&out)["config"]["seed"], 42);
}

#[test]
fn system_roundtrip_through_build() {
    // build → emit → parse again as a search input: values survive exactly
    let dir = tempfile::tempdir().unwrap();
    let system = full_algebra_system(dir.path(), 3);
    let parsed: Value = serde_json::from_str(&std::fs::read_to_string(&system).unwrap()).unwrap();
    let reparsed = write_json(dir.path(), "again.json", &parsed);
    let status = run(ncg()
        .arg("search")
        .arg("--system")
        .arg(&reparsed)
        .args(["--mode", "anticlique", "--k", "1"]))
    .status;
    // rank-1 compressions of anything are scalar
    assert_eq!(status.code(), Some(0));
}

#[test]
fn verify_kl_and_find_code_on_bit_flip_channel() {
    let dir = tempfile::tempdir().unwrap();
    // three-qubit bit flip assembled entrywise
    let p_err: f64 = 0.3;
    let mut kraus = Vec::new();
    let x = [[0.0, 1.0], [1.0, 0.0]];
    let i2 = [[1.0, 0.0], [0.0, 1.0]];
    let factors = [
        (i2, i2, i2, (1.0 - p_err).sqrt()),
        (x, i2, i2, (p_err / 3.0).sqrt()),
        (i2, x, i2, (p_err / 3.0).sqrt()),
        (i2, i2, x, (p_err / 3.0).sqrt()),
    ];
    for (a, b, c, scale) in factors {
        let mut rows = Vec::new();
        for i in 0..8 {
            let (i1, i2_, i3) = (i / 4, (i / 2) % 2, i % 2);
            let mut row = Vec::new();
            for j in 0..8 {
                let (j1, j2, j3) = (j / 4, (j / 2) % 2, j % 2);
                let v = a[i1][j1] * b[i2_][j2] * c[i3][j3] * scale;
                row.push([v, 0.0]);
            }
            rows.push(row);
        }
        kraus.push(rows);
    }
    let channel = write_json(
        dir.path(),
        "ch3.json",
        &json!({"in_dim": 8, "out_dim": 8, "kraus": kraus}),
    );
    // repetition code |000⟩, |111⟩
    let mut columns = vec![vec![[0.0, 0.0]; 2]; 8];
    columns[0][0] = [1.0, 0.0];
    columns[7][1] = [1.0, 0.0];
    let proj = write_json(dir.path(), "code.json", &json!({"d": 8, "columns": columns}));

    let out = dir.path().join("kl.json");
    let status = run(ncg()
        .arg("verify-kl")
        .arg("--channel")
        .arg(&channel)
        .arg("--projection")
        .arg(&proj)
        .arg("--out")
        .arg(&out))
    .status;
    assert_eq!(status.code(), Some(0));
    let report = read_report(&out);
    assert_eq!(report["result"]["report"]["passed"], true);

    let out2 = dir.path().join("code_found.json");
    let status = run(ncg()
        .arg("find-code")
        .arg("--channel")
        .arg(&channel)
        .args(["--k", "2", "--out"])
        .arg(&out2))
    .status;
    assert_eq!(status.code(), Some(0));
    assert_eq!(read_report(&out2)["result"]["kl_report"]["passed"], true);
}

#[test]
fn shipped_schema_covers_all_document_kinds() {
    let text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/ncg.schema.json"),
    )
    .expect("schema ships in-repo");
    let schema: Value = serde_json::from_str(&text).expect("schema is valid JSON");
    let defs = schema["$defs"].as_object().unwrap();
    for kind in [
        "matrix",
        "graph",
        "channel",
        "operator_system",
        "projection",
        "verdict",
        "report",
        "construct_params_dilation",
        "construct_params_spanning",
        "construct_params_reduce_diag",
        "construct_params_corners",
        "construct_params_triangularize",
        "construct_params_clique_cert",
        "construct_params_cluster",
    ] {
        assert!(defs.contains_key(kind), "schema is missing {kind}");
    }
}

#[test]
fn verify_kl_rejects_non_orthonormal_frame_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let channel = write_json(
        dir.path(),
        "id.json",
        &json!({"in_dim": 2, "out_dim": 2, "kraus": [identity_matrix_json(2)]}),
    );
    // two identical columns: not a frame
    let bad = json!({"d": 2, "columns": [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]});
    let proj = write_json(dir.path(), "bad.json", &bad);
    let status = run(ncg()
        .arg("verify-kl")
        .arg("--channel")
        .arg(&channel)
        .arg("--projection")
        .arg(&proj))
    .status;
    assert_eq!(status.code(), Some(3));
}

#[test]
fn unparseable_ncg_seed_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(dir.path(), "c5.json", &c5_graph());
    let status = run(ncg()
        .arg("build")
        .arg("--input")
        .arg(&input)
        .env("NCG_SEED", "not-a-number"))
    .status;
    assert_eq!(status.code(), Some(2));
}
