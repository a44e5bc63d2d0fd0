use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn svem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = svem(args);
    assert!(
        out.status.success(),
        "svem {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    svem(args).status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cell_count(mesh_file: &Path) -> usize {
    let v: Value = serde_json::from_slice(&std::fs::read(mesh_file).unwrap()).unwrap();
    v["cells"].as_array().unwrap().len()
}

/// One triangle plus a quadrilateral with a straight angle at (0.5, 0).
fn write_degenerate_quad(file: &Path) {
    std::fs::write(
        file,
        r#"{"vertices":[[0,0],[0.5,0],[1,0],[0,1],[1,1]],"cells":[[0,1,2,3],[2,4,3]]}"#,
    )
    .unwrap();
}

#[test]
fn gen_mesh_cell_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], usize); 3] = [
        (&["--family", "trapezoid", "--n", "16"], 256),
        (&["--family", "voronoi", "--cells", "100", "--lloyd", "50", "--seed", "1"], 100),
        (&["--family", "square", "--n", "2"], 4),
    ];
    for (i, (flags, cells)) in cases.iter().enumerate() {
        let file = dir.path().join(format!("m{i}.json"));
        let mut args = vec!["gen-mesh"];
        args.extend_from_slice(flags);
        args.extend_from_slice(&["--out", path(&file)]);
        let stdout = ok(&args);
        assert!(stdout.starts_with(&format!("{cells} cells")), "{stdout}");
        assert_eq!(cell_count(&file), *cells);
    }
}

#[test]
fn gen_mesh_to_stdout_is_the_file_format() {
    let v: Value = serde_json::from_str(&ok(&["gen-mesh", "--family", "square", "--n", "3"])).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 9);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 16);
}

#[test]
fn solve_quintic_on_square_grid() {
    let out = ok(&[
        "solve", "--family", "square", "--n", "8", "--k", "3", "--problem", "poisson-quintic", "--json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["rel_l2"].as_f64().unwrap() < 1e-3);
    assert!(v["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["n_cells"], 64);
}

#[test]
fn solve_zero_problem_has_no_relative_error() {
    let out = ok(&["solve", "--family", "square", "--n", "4", "--problem", "zero"]);
    assert!(out.contains("rel L2    n/a"), "{out}");
}

#[test]
fn degenerate_quad_with_loose_theta0() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("degenerate.json");
    write_degenerate_quad(&mesh);
    ok(&[
        "solve", "--mesh", path(&mesh), "--k", "4", "--strategy", "stingy", "--theta0", "1e-2",
    ]);
    let dumps: Value = serde_json::from_str(&ok(&["inspect", "--mesh", path(&mesh), "--k", "4"])).unwrap();
    assert_eq!(dumps[0]["eta"], 3);
    assert_eq!(dumps[0]["internal_degree"], 1);
}

#[test]
fn property_s_failure_names_the_element() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("degenerate.json");
    write_degenerate_quad(&mesh);
    let out = svem(&["solve", "--mesh", path(&mesh), "--k", "4", "--strategy", "fixed:0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("element 0"));
}

#[test]
fn convergence_csv_has_one_row_per_level() {
    let out = ok(&["convergence", "--problem", "trapezoid-quintic", "--k", "2", "--levels", "4"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].ends_with("rate_l2,rate_h1"));
    let last: Vec<&str> = lines[4].split(',').collect();
    let rate: f64 = last[7].parse().unwrap();
    assert!((rate - 3.0).abs() < 0.2, "rate {rate}");
}

#[test]
fn convergence_writes_every_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, json, text) = (dir.path().join("r.csv"), dir.path().join("r.json"), dir.path().join("r.txt"));
    let stdout = ok(&[
        "convergence", "--problem", "poisson-quintic", "--family", "square", "--k", "1", "--levels", "2",
        "--csv", path(&csv), "--json", path(&json), "--text", path(&text),
    ]);
    assert!(stdout.is_empty());
    let report: Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(report["levels"].as_array().unwrap().len(), 2);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
    assert!(!std::fs::read_to_string(&text).unwrap().is_empty());
}

#[test]
fn inspect_triangles_satisfy_property_s() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("tri.json");
    std::fs::write(
        &mesh,
        r#"{"vertices":[[0,0],[1,0],[1,1],[0,1],[0.5,0.5]],"cells":[[0,1,4],[1,2,4],[2,3,4],[3,0,4]]}"#,
    )
    .unwrap();
    let dumps: Value = serde_json::from_str(&ok(&["inspect", "--mesh", path(&mesh), "--k", "3"])).unwrap();
    let dumps = dumps.as_array().unwrap();
    assert_eq!(dumps.len(), 4);
    for d in dumps {
        assert!(d["min_sv"].as_f64().unwrap() > 1e-10);
    }
}

#[test]
fn dofs_order_original_lazy_stingy() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("lloyd100.json");
    ok(&["gen-mesh", "--family", "voronoi", "--cells", "100", "--out", path(&mesh)]);
    let csv = ok(&["dofs", "--mesh", path(&mesh), "--k", "4", "--strategy", "all", "--format", "csv"]);
    let totals: Vec<usize> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(totals.len(), 3);
    assert!(totals[0] > totals[1] && totals[1] >= totals[2], "{totals:?}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let mesh = dir.path().join(format!("{name}.json"));
        let report = dir.path().join(format!("{name}-report.json"));
        ok(&["gen-mesh", "--family", "voronoi", "--cells", "30", "--seed", "4", "--out", path(&mesh)]);
        ok(&[
            "convergence", "--problem", "lloyd-variable", "--k", "2", "--levels", "2", "--seed", "4",
            "--json", path(&report),
        ]);
        (std::fs::read(mesh).unwrap(), std::fs::read(report).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn invalid_configuration_exits_2_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    let o = path(&out);
    assert_eq!(code(&["gen-mesh", "--family", "hexagon", "--out", o]), 2);
    assert_eq!(code(&["gen-mesh", "--family", "trapezoid", "--sigma", "0.7", "--out", o]), 2);
    assert_eq!(code(&["gen-mesh", "--family", "square", "--n", "0", "--out", o]), 2);
    assert_eq!(code(&["inspect", "--family", "square", "--k", "0", "--out", o]), 2);
    assert_eq!(code(&["inspect", "--family", "square", "--strategy", "greedy", "--out", o]), 2);
    assert_eq!(code(&["dofs", "--family", "square", "--k", "9", "--out", o]), 2);
    assert_eq!(code(&["convergence", "--problem", "unknown", "--csv", o]), 2);
    assert_eq!(code(&["convergence", "--problem", "zero", "--levels", "1", "--csv", o]), 2);
    assert_eq!(code(&["solve", "--problem", "poisson-quintic"]), 2);
    assert_eq!(code(&["solve", "--family", "square", "--strategy", "lazy", "--theta0", "0.1"]), 2);
    assert!(!out.exists());
}

#[test]
fn unreadable_and_malformed_meshes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&["solve", "--mesh", path(&dir.path().join("missing.json"))]), 1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"vertices":[[0,0]],"cells":[[0,1,2]]}"#).unwrap();
    assert_eq!(code(&["solve", "--mesh", path(&bad)]), 2);
}

#[test]
fn dump_system_writes_matrix_market() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump");
    ok(&["solve", "--family", "square", "--n", "2", "--k", "2", "--dump-system", path(&dump)]);
    let matrix = std::fs::read_to_string(dump.join("matrix.mtx")).unwrap();
    let rhs = std::fs::read_to_string(dump.join("rhs.mtx")).unwrap();
    assert!(matrix.starts_with("%%MatrixMarket matrix coordinate real general\n"));
    let n: usize = matrix.lines().nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert_eq!(rhs.lines().nth(1).unwrap(), format!("{n} 1"));
}
