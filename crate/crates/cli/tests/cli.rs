use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ihara::graph::{generators, io::GraphJson};
use ihara::limits::CsvRow;
use ihara::zeta::parse_rational;
use serde_json::Value;
use tempfile::TempDir;

fn ihara(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ihara"))
        .arg("--quiet")
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn write_graph(dir: &TempDir, name: &str, g: &ihara::graph::Graph) -> PathBuf {
    write(
        dir,
        name,
        &serde_json::to_string(&GraphJson::from_graph(g)).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn triangle_euler_product() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.txt", "0 1\n1 2\n2 0\n");
    let out = ihara(&[
        "zeta",
        "--input",
        s(&tri),
        "--method",
        "euler",
        "--order",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    // (1 - u^3)^-2 = sum_k (k + 1) u^{3k}
    let expected: Vec<i64> = (0..=7)
        .map(|j| if j % 3 == 0 { j / 3 + 1 } else { 0 })
        .collect();
    let got: Vec<i64> = v["zeta"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().parse().unwrap())
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn verify_random_graphs() {
    let dir = TempDir::new().unwrap();
    for seed in 0..4 {
        let g = generators::random_connected(8, 4, 5, seed).unwrap();
        let path = write_graph(&dir, &format!("g{seed}.json"), &g);
        for measure in ["counting", "normalized"] {
            let out = ihara(&[
                "zeta",
                "--input",
                s(&path),
                "--order",
                "9",
                "--measure",
                measure,
                "--verify",
                "--eval",
                "0.1,0.05",
            ]);
            assert_eq!(
                out.status.code(),
                Some(0),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert_eq!(stdout_json(&out)["verified"], Value::Bool(true));
        }
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let k4 = write_graph(&dir, "k4.json", &generators::complete(4).unwrap());
    assert_eq!(
        ihara(&["zeta", "--input", s(&k4), "--eval", "0.6,0"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        ihara(&[
            "zeta",
            "--input",
            s(&k4),
            "--method",
            "det",
            "--eval",
            "0,0.6"
        ])
        .status
        .code(),
        Some(3)
    );
    let bad = write(&dir, "bad.json", "{\"vertices\": 2, \"edges\": [[0, 0]]}");
    assert_eq!(ihara(&["zeta", "--input", s(&bad)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        ihara(&["zeta", "--input", s(&missing)]).status.code(),
        Some(2)
    );
    assert_eq!(
        ihara(&["zeta", "--input", s(&k4), "--method", "bogus"])
            .status
            .code(),
        Some(2)
    );
    let path = write_graph(&dir, "p.json", &generators::triangle_with_pendant());
    let out = ihara(&[
        "zeta",
        "--input",
        s(&path),
        "--method",
        "spectral",
        "--eval",
        "0.1,0",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn selftest_passes() {
    let out = ihara(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .next()
        .unwrap()
        .starts_with("PASS determinant-formula"));
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn converge_csv_round_trip() {
    let out = ihara(&[
        "converge", "--family", "cycle", "--range", "4..12", "--order", "6", "--eval", "0.3,0.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = CsvRow::parse_all(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 10);
    let limit = rows.last().unwrap();
    assert_eq!(limit.label, "limit");
    assert!(limit
        .nbar
        .iter()
        .all(|c| *c == parse_rational("0").unwrap()));
    for row in &rows[..9] {
        let n: usize = row.label.parse().unwrap();
        assert_eq!(row.vertices, Some(n));
        // a cycle of length n has 2n reduced closed paths of length n
        for (j, c) in row.nbar.iter().enumerate() {
            let expected = if (j + 1) % n == 0 { 2 } else { 0 };
            assert_eq!(*c, parse_rational(&expected.to_string()).unwrap());
        }
    }
}

#[test]
fn torus_and_quotient_families_agree() {
    let args = |family: &str| {
        [
            "converge", "--family", family, "--range", "5..7", "--order", "6", "--eval", "0.1,0",
        ]
        .map(String::from)
    };
    let torus = ihara(
        &args("torus2")
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
    );
    let sofic = ihara(&args("sofic").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(torus.status.code(), Some(0));
    assert_eq!(sofic.status.code(), Some(0));
    assert_eq!(torus.stdout, sofic.stdout);
}

#[test]
fn balls_feed_converge() {
    let dir = TempDir::new().unwrap();
    let c9 = write_graph(&dir, "c9.json", &generators::cycle(9).unwrap());
    let out = ihara(&["balls", "--input", s(&c9), "--radius", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    let limit = write(&dir, "limit.json", &String::from_utf8(out.stdout).unwrap());
    let out = ihara(&[
        "converge",
        "--family",
        "cycle",
        "--range",
        "8..10",
        "--order",
        "4",
        "--limit",
        s(&limit),
        "--out",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert!(v["sup_coeff_dev"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d == "0"));
}

#[test]
fn periodic_and_sofic_commands() {
    let out = ihara(&[
        "periodic",
        "--builtin",
        "grid",
        "--order",
        "4",
        "--eval",
        "0.1,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["nbar"][3], "8");

    let dir = TempDir::new().unwrap();
    let emitted = dir.path().join("g.json");
    let out = ihara(&[
        "sofic",
        "--builtin",
        "grid",
        "--radius",
        "2",
        "--provider",
        r#"{"provider":"quotient","n":6}"#,
        "--emit-graph",
        s(&emitted),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["vertices"], 36);
    assert_eq!(v["delta"]["max_deviation"], "0");
    let g = ihara::graph::io::load(&emitted).unwrap().graph;
    assert_eq!(g.vertex_count(), 36);
    assert_eq!(g.regular_degree(), Some(4));

    let out = ihara(&[
        "sofic",
        "--builtin",
        "grid",
        "--provider",
        r#"{"provider":"random","N":10,"seed":1}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
}
