use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ricci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ricci"))
        .args(args)
        .env_remove("RICCI_SEED")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../docs/output.schema.json"
    ))
    .unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_schema(v: &Value) {
    let errors: Vec<String> = schema().iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v:#}");
}

/// Random connected graph on `n` nodes, as edge-list text.
fn random_graph(n: usize, seed: u64) -> String {
    let mut x = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        x
    };
    let mut edges = std::collections::BTreeSet::new();
    for i in 1..n {
        edges.insert((next() as usize % i, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if next() % 100 < 40 {
                edges.insert((i, j));
            }
        }
    }
    edges.iter().map(|(a, b)| format!("n{a} n{b}\n")).collect()
}

#[test]
fn exact_examples() {
    let dir = TempDir::new().unwrap();
    let k2 = write(&dir, "k2.txt", "1 2\n");
    let k3 = write(&dir, "k3.txt", "# triangle\na b\nb c\nc a\n");
    let p4 = write(&dir, "p4.txt", "a u\nu v\nv b\n");

    let v = json_of(&ricci(&[
        "curvature",
        "edge",
        "--input",
        p(&k2),
        "--u",
        "1",
        "--v",
        "2",
    ]));
    assert_eq!(v["curvature"], "1/1");
    assert_schema(&v);

    let v = json_of(&ricci(&["curvature", "graph", "--input", p(&k3)]));
    assert_eq!(v["avg"], "1/1");
    assert_schema(&v);

    let v = json_of(&ricci(&[
        "curvature",
        "edge",
        "--input",
        p(&p4),
        "--u",
        "u",
        "--v",
        "v",
    ]));
    assert_eq!(v["curvature"], "0/1");

    let v = json_of(&ricci(&[
        "curvature",
        "node",
        "--input",
        p(&p4),
        "--u",
        "u",
    ]));
    assert_eq!(v["curvature"], "1/4");
    assert_schema(&v);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "a b c\n");
    let p4 = write(&dir, "p4.txt", "a u\nu v\nv b\n");
    let code = |args: &[&str]| ricci(args).status.code().unwrap();

    assert_eq!(code(&["curvature", "graph", "--input", p(&bad)]), 2);
    assert_eq!(
        code(&["curvature", "graph", "--input", "/nonexistent/edges.txt"]),
        2
    );
    assert_eq!(code(&["curvature", "edge"]), 2);
    assert_eq!(
        code(&[
            "approx",
            "edge",
            "--input",
            p(&p4),
            "--u",
            "u",
            "--v",
            "v",
            "--eps",
            "zero"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "curvature",
            "edge",
            "--input",
            p(&p4),
            "--u",
            "a",
            "--v",
            "b"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "approx",
            "edge",
            "--mode",
            "equal-a",
            "--input",
            p(&p4),
            "--u",
            "a",
            "--v",
            "u"
        ]),
        4
    );
    // deg 2 vs deg 4: 5 is not a multiple of 3 and 2 < (1 - 0.1/3) * 4.
    let uneven = write(&dir, "uneven.txt", "u v\nu x\nv a\nv b\nv c\n");
    assert_eq!(
        code(&[
            "approx",
            "edge",
            "--mode",
            "unequal",
            "--delta",
            "0.1",
            "--input",
            p(&uneven),
            "--u",
            "u",
            "--v",
            "v"
        ]),
        4
    );
    assert_eq!(code(&["experiment", "--strategy", "coin-flip"]), 5);
}

#[test]
fn approx_outputs_match_schema() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", &random_graph(14, 2));
    for mode in ["equal-a", "equal-b", "unequal"] {
        let out = ricci(&[
            "approx",
            "edge",
            "--mode",
            mode,
            "--eps",
            "0.1",
            "--seed",
            "7",
            "--input",
            p(&g),
            "--u",
            "n0",
            "--v",
            "n1",
        ]);
        let code = out.status.code().unwrap();
        if code == 4 {
            continue;
        }
        let v = json_of(&out);
        assert!(v["queries"].is_object());
        assert_schema(&v);
    }
    let v = json_of(&ricci(&[
        "approx",
        "node",
        "--r",
        "0.2",
        "--seed",
        "7",
        "--input",
        p(&g),
        "--u",
        "n3",
    ]));
    assert_schema(&v);
    let v = json_of(&ricci(&["approx", "avg", "--r", "0.25", "--input", p(&g)]));
    assert_schema(&v);
}

#[test]
fn approx_edge_equal_b_shape() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", "a b\nb c\nc d\nd a\n");
    let v = json_of(&ricci(&[
        "approx",
        "edge",
        "--mode",
        "equal-b",
        "--eps",
        "0.1",
        "--seed",
        "7",
        "--input",
        p(&c4),
        "--u",
        "a",
        "--v",
        "b",
    ]));
    for key in ["pair", "neighbor", "weighted_neighbor", "selective_degree"] {
        assert!(v["queries"][key].is_u64(), "{key}");
    }
    assert_eq!(v["guarantee"]["fraction"], "3/5");
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", &random_graph(30, 5));
    let runs: [&[&str]; 4] = [
        &[
            "approx",
            "node",
            "--r",
            "0.2",
            "--seed",
            "7",
            "--input",
            p(&g),
            "--u",
            "n0",
        ],
        &[
            "approx",
            "avg",
            "--r",
            "0.25",
            "--seed",
            "7",
            "--input",
            p(&g),
        ],
        &[
            "approx",
            "edge",
            "--seed",
            "7",
            "--input",
            p(&g),
            "--u",
            "n1",
            "--v",
            "n2",
            "--mode",
            "unequal",
            "--delta",
            "1",
        ],
        &[
            "experiment",
            "--family",
            "single-light",
            "--n",
            "12",
            "--trials",
            "40",
            "--seed",
            "7",
        ],
    ];
    for args in runs {
        let a = ricci(args);
        let b = ricci(args);
        assert_eq!(a.status.code(), b.status.code(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(
            !a.stdout.is_empty(),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
    }
}

#[test]
fn env_seed_overrides_flag() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", &random_graph(30, 6));
    let run = |seed_flag: &str, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ricci"));
        cmd.args([
            "approx",
            "avg",
            "--r",
            "0.25",
            "--seed",
            seed_flag,
            "--input",
            p(&g),
        ]);
        match env {
            Some(s) => cmd.env("RICCI_SEED", s),
            None => cmd.env_remove("RICCI_SEED"),
        };
        cmd.output().unwrap()
    };
    let with_env = json_of(&run("1", Some("9")));
    assert_eq!(with_env["seed"], 9);
    assert_eq!(run("1", Some("9")).stdout, run("9", None).stdout);
    assert_eq!(run("1", Some("x")).status.code(), Some(2));
}

#[test]
fn avg_estimate_tracks_exact() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", &random_graph(30, 8));
    let exact = json_of(&ricci(&["curvature", "graph", "--input", p(&g)]));
    let truth: f64 = exact["decimal"].as_str().unwrap().parse().unwrap();
    let mut hits = 0;
    for seed in 0..12 {
        let s = seed.to_string();
        let v = json_of(&ricci(&[
            "approx",
            "avg",
            "--r",
            "0.25",
            "--seed",
            &s,
            "--input",
            p(&g),
        ]));
        let est: f64 = v["estimate"]["decimal"].as_str().unwrap().parse().unwrap();
        if (est - truth).abs() <= 0.5 {
            hits += 1;
        }
    }
    assert!(hits >= 8, "{hits}/12");
}

#[test]
fn experiment_smoke() {
    let dir = TempDir::new().unwrap();
    for family in ["single-light", "all-heavy", "permutation"] {
        let out = ricci(&[
            "experiment",
            "--family",
            family,
            "--n",
            "10",
            "--trials",
            "25",
        ]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("trial,family,correct,pair_q,wneigh_q,seldeg_q")
        );
        assert_eq!(lines.count(), 25);
    }
    let file = dir.path().join("report.csv");
    let out = ricci(&[
        "experiment",
        "--strategy",
        "neighbor-scan",
        "--n",
        "30",
        "--output",
        p(&file),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&file)
        .unwrap()
        .starts_with("trial,"));
}

#[test]
fn csv_format() {
    let dir = TempDir::new().unwrap();
    let k3 = write(&dir, "k3.txt", "a b\nb c\nc a\n");
    let out = ricci(&["curvature", "graph", "--input", p(&k3), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "curvature,decimal,u,v\n1/1,1,a,b\n1/1,1,a,c\n1/1,1,b,c\n"
    );
}
