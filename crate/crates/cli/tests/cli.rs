use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pathflow::bundle::measure_from_json;
use pathflow::path_space::d_l2;
use serde_json::Value;
use tempfile::TempDir;

fn pathflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathflow"))
        .args(args)
        .current_dir(dir)
        .env_remove("PATHFLOW_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = pathflow(args, dir);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], dir: &Path) -> i32 {
    pathflow(args, dir).status.code().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn sample(dir: &Path, name: &str, group: &[&str], atoms: usize, seed: u64) {
    let (atoms, seed) = (atoms.to_string(), seed.to_string());
    let mut args = vec!["sample"];
    args.extend_from_slice(group);
    args.extend_from_slice(&[
        "--grid", "8", "--atoms", &atoms, "--seed", &seed, "--out", name,
    ]);
    ok(&args, dir);
}

const TORUS: &[&str] = &["--group", "torus", "--dim", "2"];

#[test]
fn sampling_is_byte_identical_for_equal_seeds() {
    let dir = TempDir::new().unwrap();
    sample(dir.path(), "a.json", TORUS, 4, 7);
    sample(dir.path(), "b.json", TORUS, 4, 7);
    sample(dir.path(), "c.json", TORUS, 4, 8);
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_ne!(read("a.json"), read("c.json"));
}

#[test]
fn bundles_round_trip() {
    let dir = TempDir::new().unwrap();
    for (name, group) in [
        ("t.json", TORUS),
        ("s.json", &["--group", "so3"][..]),
        ("h.json", &["--group", "heisenberg", "--dim", "2"][..]),
    ] {
        sample(dir.path(), name, group, 3, 1);
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let measure = measure_from_json(&text).unwrap();
        assert_eq!(
            pathflow::bundle::measure_to_json(&measure).unwrap() + "\n",
            text
        );
        let json: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(json["format"], 1);
        assert_eq!(json["grid"], 8);
        assert_eq!(json["paths"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn sample_validation() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    assert_eq!(
        code(
            &["sample", "--group", "torus", "--dim", "2", "--atoms", "0", "--out", "x.json"],
            p
        ),
        2
    );
    assert_eq!(
        code(
            &["sample", "--group", "torus", "--dim", "2", "--grid", "3", "--out", "x.json"],
            p
        ),
        2
    );
    assert_eq!(
        code(&["sample", "--group", "torus", "--out", "x.json"], p),
        2
    );
    assert_eq!(
        code(
            &["sample", "--group", "klein", "--dim", "2", "--out", "x.json"],
            p
        ),
        2
    );
    assert_eq!(
        code(
            &[
                "sample",
                "--group",
                "so3",
                "--loops",
                "torus-bridge",
                "--out",
                "x.json"
            ],
            p
        ),
        2
    );
    assert_eq!(
        code(
            &["sample", "--group", "so3", "--out", "missing/dir/x.json"],
            p
        ),
        2
    );
    assert!(!p.join("x.json").exists());
}

#[test]
fn loop_bundles_close_up() {
    let dir = TempDir::new().unwrap();
    for method in ["geodesic-correction", "torus-bridge"] {
        ok(
            &[
                "sample", "--group", "torus", "--dim", "3", "--atoms", "5", "--loops", method,
                "--out", "l.json",
            ],
            dir.path(),
        );
        let loops =
            measure_from_json(&fs::read_to_string(dir.path().join("l.json")).unwrap()).unwrap();
        assert!(loops.is_loop_measure());
    }
    ok(
        &[
            "sample", "--group", "so3", "--atoms", "5", "--loops", "--out", "l.json",
        ],
        dir.path(),
    );
    let loops = measure_from_json(&fs::read_to_string(dir.path().join("l.json")).unwrap()).unwrap();
    assert!(loops.support().iter().all(|l| l.ends_at_identity(1e-12)));
}

#[test]
fn transport_of_a_bundle_onto_itself() {
    let dir = TempDir::new().unwrap();
    sample(dir.path(), "a.json", TORUS, 5, 3);
    ok(&["transport", "a.json", "a.json", "--out", "t"], dir.path());
    let report = read_json(&dir.path().join("t/report.json"));
    assert_eq!(report["primal"], 0.0);
    assert_eq!(report["wasserstein"], 0.0);
    let csv = fs::read_to_string(dir.path().join("t/coupling.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,j,mass"));
    for (k, line) in lines.enumerate() {
        assert!(line.starts_with(&format!("{k},{k},")), "{line}");
    }
}

#[test]
fn transport_between_diracs() {
    let dir = TempDir::new().unwrap();
    sample(dir.path(), "a.json", &["--group", "so3"], 1, 1);
    sample(dir.path(), "b.json", &["--group", "so3"], 1, 2);
    ok(
        &["transport", "a.json", "b.json", "--p", "3", "--out", "t"],
        dir.path(),
    );
    let read =
        |n: &str| measure_from_json(&fs::read_to_string(dir.path().join(n)).unwrap()).unwrap();
    let d = d_l2(read("a.json").path(0), read("b.json").path(0)).unwrap();
    let report = read_json(&dir.path().join("t/report.json"));
    assert!((report["primal"].as_f64().unwrap() - d.powi(3)).abs() <= 1e-14);
    assert!((report["wasserstein"].as_f64().unwrap() - d).abs() <= 1e-14);
}

#[test]
fn transport_report_contents() {
    let dir = TempDir::new().unwrap();
    sample(dir.path(), "a.json", TORUS, 6, 1);
    sample(dir.path(), "b.json", TORUS, 6, 2);
    ok(
        &["transport", "a.json", "b.json", "--p", "1.5", "--out", "t"],
        dir.path(),
    );
    let report = read_json(&dir.path().join("t/report.json"));
    assert_eq!(report["format"], 1);
    assert_eq!(report["config"]["command"], "transport");
    assert_eq!(report["config"]["group"]["tag"], "torus");
    assert_eq!(report["config"]["p"], 1.5);
    assert_eq!(report["config"]["solver"], "exact");
    assert!(report["gap"].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(report["lipschitz"]["passed"], true);
    assert!(
        report["lipschitz"]["max_ratio"].as_f64().unwrap()
            <= report["lipschitz"]["bound"].as_f64().unwrap()
    );
    let potentials = read_json(&dir.path().join("t/potentials.json"));
    assert_eq!(potentials["phi"][0], 0.0);
    assert_eq!(potentials["psi"].as_array().unwrap().len(), 6);
}

#[test]
fn sinkhorn_tracks_the_exact_value() {
    let dir = TempDir::new().unwrap();
    sample(dir.path(), "a.json", TORUS, 8, 1);
    sample(dir.path(), "b.json", TORUS, 8, 2);
    ok(
        &["transport", "a.json", "b.json", "--out", "exact"],
        dir.path(),
    );
    ok(
        &[
            "transport",
            "a.json",
            "b.json",
            "--solver",
            "sinkhorn",
            "--epsilon",
            "1e-3",
            "--out",
            "entropic",
        ],
        dir.path(),
    );
    let value = |d: &str| {
        read_json(&dir.path().join(d).join("report.json"))["primal"]
            .as_f64()
            .unwrap()
    };
    let (exact, entropic) = (value("exact"), value("entropic"));
    assert!(
        (entropic - exact).abs() <= 1e-2 * exact,
        "{exact} vs {entropic}"
    );
    assert!(entropic >= exact - 1e-12);
    assert_eq!(
        code(
            &[
                "transport",
                "a.json",
                "b.json",
                "--solver",
                "sinkhorn",
                "--out",
                "x"
            ],
            dir.path()
        ),
        2
    );
}

#[test]
fn transport_validation() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    sample(p, "a.json", TORUS, 3, 1);
    ok(
        &[
            "sample", "--group", "torus", "--dim", "2", "--grid", "6", "--atoms", "3", "--out",
            "g.json",
        ],
        p,
    );
    sample(p, "s.json", &["--group", "so3"], 3, 1);
    sample(p, "h.json", &["--group", "heisenberg", "--dim", "1"], 3, 1);
    assert_eq!(code(&["transport", "a.json", "g.json", "--out", "t"], p), 2);
    assert_eq!(code(&["transport", "a.json", "s.json", "--out", "t"], p), 2);
    assert_eq!(code(&["transport", "h.json", "h.json", "--out", "t"], p), 2);
    assert_eq!(
        code(
            &["transport", "a.json", "a.json", "--p", "1", "--out", "t"],
            p
        ),
        2
    );
    assert_eq!(
        code(&["transport", "a.json", "nope.json", "--out", "t"], p),
        2
    );
    fs::write(p.join("bad.json"), "{\"format\": 1}").unwrap();
    assert_eq!(
        code(&["transport", "a.json", "bad.json", "--out", "t"], p),
        2
    );
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    sample(p, "a.json", TORUS, 7, 1);
    sample(p, "b.json", TORUS, 7, 2);
    ok(&["transport", "a.json", "b.json", "--out", "one"], p);
    let threaded = Command::new(env!("CARGO_BIN_EXE_pathflow"))
        .args(["transport", "a.json", "b.json", "--out", "four"])
        .current_dir(p)
        .env("PATHFLOW_THREADS", "4")
        .output()
        .unwrap();
    assert!(threaded.status.success());
    let read = |d: &str, f: &str| fs::read(p.join(d).join(f)).unwrap();
    assert_eq!(read("one", "coupling.csv"), read("four", "coupling.csv"));
    assert_eq!(
        read("one", "potentials.json"),
        read("four", "potentials.json")
    );
    assert_eq!(
        read_json(&p.join("four/report.json"))["config"]["threads"],
        4
    );

    let bad = Command::new(env!("CARGO_BIN_EXE_pathflow"))
        .args(["transport", "a.json", "b.json", "--out", "x"])
        .current_dir(p)
        .env("PATHFLOW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn interpolation_report() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    sample(p, "a.json", TORUS, 6, 11);
    sample(p, "b.json", TORUS, 6, 12);
    ok(
        &[
            "interpolate",
            "a.json",
            "b.json",
            "--lambdas",
            "0.75,0.5,0",
            "--out",
            "i",
        ],
        p,
    );
    let report = read_json(&p.join("i/report.json"));
    assert_eq!(report["format"], 1);
    assert_eq!(
        report["config"]["lambdas"],
        serde_json::json!([0.0, 0.5, 0.75])
    );
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows[0]["lambda"], 0.0);
    assert_eq!(rows[0]["distance"], 0.0);
    assert_eq!(rows[0]["ratio"], 1.0);
    if report["has_cut_pair"] == false {
        for row in rows {
            assert!(
                (row["ratio"].as_f64().unwrap() - 1.0).abs() <= 1e-8,
                "{row}"
            );
        }
    }
    for row in rows {
        let bundle = fs::read_to_string(p.join(row["bundle"].as_str().unwrap())).unwrap();
        assert_eq!(measure_from_json(&bundle).unwrap().len(), 6);
    }
    assert_eq!(
        code(
            &[
                "interpolate",
                "a.json",
                "b.json",
                "--lambdas",
                "1.5",
                "--out",
                "j"
            ],
            p
        ),
        2
    );
    assert_eq!(
        code(
            &[
                "interpolate",
                "a.json",
                "b.json",
                "--lambdas",
                "-0.1",
                "--out",
                "j"
            ],
            p
        ),
        2
    );
    assert!(!p.join("j").exists());
}

#[test]
fn verify_suites() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    assert_eq!(code(&["verify", "bogus"], p), 2);
    for suite in ["duality", "geodesic-ode", "gradient-identity"] {
        let stdout = ok(&["verify", suite, "--seed", "3", "--out", "v.json"], p);
        assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");
        let report = read_json(&p.join("v.json"));
        assert_eq!(report["format"], 1);
        assert_eq!(report["passed"], true);
        assert_eq!(report["config"]["suite"], suite);
        for check in report["suites"][0]["checks"].as_array().unwrap() {
            assert!(check["measured"].as_f64().unwrap() <= check["tolerance"].as_f64().unwrap());
            assert!(check["slack"].is_number());
        }
    }
    let report = read_json(&p.join("v.json"));
    let relative_error = &report["suites"][0]["checks"][0];
    assert_eq!(relative_error["tolerance"], 1e-2);
}
