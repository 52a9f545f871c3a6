use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn jetgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetgeo"))
        .args(args)
        .output()
        .expect("run jetgeo")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn geometry_lorenz_point() {
    let v = json(&jetgeo(&[
        "geometry",
        "--model",
        "lorenz5",
        "--param",
        "eps=0.1",
        "--at",
        "1,2,3,4,5",
    ]));
    assert!((v["eym"].as_f64().unwrap() - 8.26).abs() <= 1e-12);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "point",
        "jacobian",
        "connection",
        "torsion",
        "em",
        "eym",
        "maxwell_residual",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    // N_12 = -(J_12 - J_21)/2 = x3 - eps*x5 = 2.5 here
    assert_eq!(v["connection"][0][1].as_f64().unwrap(), 2.5);
    assert_eq!(v["torsion"].as_array().unwrap().len(), 5);
}

#[test]
fn geometry_zero_field() {
    let v = json(&jetgeo(&["geometry", "--field", &fixture("zero.txt"), "--at", "0"]));
    assert_eq!(v["eym"].as_f64().unwrap(), 0.0);
    assert_eq!(v["jacobian"], serde_json::json!([[0.0]]));
    assert_eq!(v["connection"], serde_json::json!([[0.0]]));
    assert_eq!(v["em"], serde_json::json!([[0.0]]));
    assert_eq!(v["maxwell_residual"].as_f64().unwrap(), 0.0);
}

#[test]
fn geometry_dimension_mismatch_is_a_usage_error() {
    let out = jetgeo(&["geometry", "--model", "lorenz5", "--at", "1,2,3"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn geometry_negative_coordinates() {
    let v = json(&jetgeo(&["geometry", "--model", "lorenz5", "--at", "-1,-2,-3,-4,-5"]));
    assert_eq!(v["point"][0].as_f64().unwrap(), -1.0);
}

#[test]
fn geometry_unbound_parameter_and_missing_source() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, "X1 = a*x1\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&jetgeo(&["geometry", "--field", p, "--at", "1"])), 2);
    let v = json(&jetgeo(&["geometry", "--field", p, "--param", "a=3", "--at", "1"]));
    assert_eq!(v["jacobian"][0][0].as_f64().unwrap(), 3.0);
    // dimension is checked before parameters
    let out = jetgeo(&["geometry", "--field", p, "--at", "1,2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
    assert_eq!(code(&jetgeo(&["geometry", "--at", "1"])), 2);
    assert_eq!(
        code(&jetgeo(&["geometry", "--model", "lorenz5", "--at", "1,2,x,4,5"])),
        2
    );
}

#[test]
fn geometry_parse_error_and_eval_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "X1 = x1 +\n").unwrap();
    let out = jetgeo(&["geometry", "--field", bad.to_str().unwrap(), "--at", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let div = dir.path().join("div.txt");
    std::fs::write(&div, "X1 = 1/x1\n").unwrap();
    assert_eq!(
        code(&jetgeo(&["geometry", "--field", div.to_str().unwrap(), "--at", "0"])),
        3
    );
}

#[test]
fn integrate_grid_has_10001_rows() {
    let out = jetgeo(&[
        "integrate",
        "--model",
        "lorenz5",
        "--param",
        "eps=0.05",
        "--x0",
        "1,1,1,0.1,0.1",
        "--t1",
        "10",
        "--dt",
        "0.001",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["t", "x1", "x2", "x3", "x4", "x5"]);
    assert_eq!(rows.len(), 10001);
    assert_eq!(rows[10000][0], 10.0);
}

#[test]
fn integrate_observables_and_action_of_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let p = path.to_str().unwrap();
    let out = jetgeo(&[
        "integrate",
        "--model",
        "lorenz5",
        "--param",
        "eps=0.05",
        "--x0",
        "1,1,1,0.1,0.1",
        "--t1",
        "10",
        "--dt",
        "0.001",
        "--observables",
        "--out",
        p,
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    let jls = column(&header, "jls");
    let eym = column(&header, "eym");
    let worst = rows.iter().map(|r| r[jls]).fold(0.0, f64::max);
    assert!(worst <= 1e-10, "max jls {worst}");
    assert!(rows.iter().all(|r| r[eym] >= 1.0 - 1e-12));

    let v = json(&jetgeo(&[
        "action", "--model", "lorenz5", "--param", "eps=0.05", "--traj", p,
    ]));
    let a = v["action"].as_f64().unwrap();
    assert!((0.0..=1e-10).contains(&a), "action {a}");
}

#[test]
fn integrate_el_matches_first_order_flow() {
    let eps = 0.05;
    let x0 = [1.0, 1.0, 1.0, 0.1, 0.1];
    let v0 = jetgeo_core::lorenz5::rhs(&x0, eps);
    let v0: Vec<String> = v0.iter().map(|v| format!("{v:?}")).collect();
    let common = [
        "--model",
        "lorenz5",
        "--param",
        "eps=0.05",
        "--x0",
        "1,1,1,0.1,0.1",
        "--t1",
        "5",
        "--dt",
        "0.001",
    ];

    let first = jetgeo(&[&["integrate"][..], &common[..]].concat());
    let el = jetgeo(&[&["integrate", "--el", "--v0", &v0.join(",")][..], &common[..]].concat());
    assert_eq!(code(&el), 0);
    let (_, a) = csv_rows(&String::from_utf8(first.stdout).unwrap());
    let (header, b) = csv_rows(&String::from_utf8(el.stdout).unwrap());
    assert_eq!(header.len(), 11);
    assert_eq!(a.len(), b.len());
    let sup = a
        .iter()
        .zip(&b)
        .flat_map(|(ra, rb)| (1..=5).map(move |i| (ra[i] - rb[i]).abs()))
        .fold(0.0, f64::max);
    assert!(sup <= 1e-6, "sup {sup}");
}

#[test]
fn integrate_flag_errors() {
    let base = ["integrate", "--model", "lorenz5", "--x0", "1,1,1,0.1,0.1", "--t1", "1"];
    assert_eq!(code(&jetgeo(&[&base[..], &["--dt", "0.1", "--el"][..]].concat())), 2);
    assert_eq!(code(&jetgeo(&[&base[..], &["--dt", "0"][..]].concat())), 2);
    assert_eq!(
        code(&jetgeo(
            &[&base[..], &["--dt", "0.1", "--v0", "1,1,1,1,1"][..]].concat()
        )),
        2
    );
}

#[test]
fn integrate_blow_up_reports_last_valid_time() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, "X1 = x1^2\n").unwrap();
    let out = jetgeo(&[
        "integrate",
        "--field",
        path.to_str().unwrap(),
        "--x0",
        "1",
        "--t1",
        "2",
        "--dt",
        "0.01",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("last valid time"));
}

#[test]
fn integrate_json_format() {
    let v = json(&jetgeo(&[
        "integrate",
        "--field",
        &fixture("zero.txt"),
        "--x0",
        "2",
        "--t1",
        "1",
        "--dt",
        "0.5",
        "--format",
        "json",
    ]));
    assert_eq!(v["t"], serde_json::json!([0.0, 0.5, 1.0]));
    assert_eq!(v["x"], serde_json::json!([[2.0], [2.0], [2.0]]));
}

#[test]
fn action_of_constant_trajectories() {
    let v = json(&jetgeo(&[
        "action",
        "--model",
        "lorenz5",
        "--traj",
        &fixture("constant_origin.csv"),
    ]));
    assert_eq!(v["action"].as_f64().unwrap(), 0.0);

    // |X(1,2,3,4,5)|^2 at eps = 0.1, by hand: X = (-5, 2.5, -2, -5, 4.2)
    let expected = 25.0 + 6.25 + 4.0 + 25.0 + 4.2f64.powi(2);
    let v = json(&jetgeo(&[
        "action",
        "--model",
        "lorenz5",
        "--param",
        "eps=0.1",
        "--traj",
        &fixture("constant_12345.csv"),
    ]));
    let a = v["action"].as_f64().unwrap();
    assert!((a - expected).abs() <= 1e-12 * expected, "{a} vs {expected}");
    assert!((a - 77.89).abs() <= 1e-10);
}

#[test]
fn action_rejects_malformed_csv() {
    let out = jetgeo(&["action", "--model", "lorenz5", "--traj", &fixture("malformed.csv")]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        code(&jetgeo(&[
            "action",
            "--model",
            "lorenz5",
            "--traj",
            "/nonexistent/traj.csv"
        ])),
        2
    );
}

#[test]
fn levelset_cases() {
    let v = json(&jetgeo(&["levelset", "--C", "5", "--param", "eps=1"]));
    assert_eq!(v["case"], "cylinder");
    assert_eq!(v["radius"].as_f64().unwrap(), std::f64::consts::SQRT_2);

    let v = json(&jetgeo(&["levelset", "--C", "1", "--param", "eps=0.3"]));
    assert_eq!(v["case"], "line");
    assert_eq!(v["constraints"], "x1 = 0, x3 = 0.3*x5");

    let v = json(&jetgeo(&["levelset", "--C", "0.5"]));
    assert_eq!(v["case"], "empty");

    assert_eq!(code(&jetgeo(&["levelset", "--C", "3"])), 2);
    assert_eq!(code(&jetgeo(&["levelset", "--param", "eps=1"])), 2);
}

#[test]
fn verify_default_passes() {
    let out = jetgeo(&["verify"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(code(&out), 0, "{text}");
    for eps in ["0.0", "0.1", "1.0"] {
        for suite in [
            "lorenz_oracle_equivalence",
            "antisymmetry",
            "maxwell_identity",
            "first_integrals",
            "el_inclusion",
        ] {
            assert!(
                text.lines()
                    .any(|l| l.starts_with("PASS") && l.contains(suite) && l.contains(&format!("eps={eps} "))),
                "{suite} eps={eps} missing:\n{text}"
            );
        }
    }
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_is_deterministic_per_seed() {
    let a = jetgeo(&["verify", "--seed", "42"]);
    let b = jetgeo(&["verify", "--seed", "42"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_flags_the_typo_fixture() {
    let out = jetgeo(&["verify", "--field", &fixture("maxwell_typo.txt")]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("maxwell_identity")).unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
    assert!(line.contains("worst triple (1,2,3)"), "{line}");

    assert_eq!(code(&jetgeo(&["verify", "--field", &fixture("maxwell_ok.txt")])), 0);
}
