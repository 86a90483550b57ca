use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use plankcover::cli::json::to_canonical_string;
use plankcover::{CoverCertificate, Instance};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plankcover"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn stacked(&self, k: usize) -> (PathBuf, PathBuf) {
        let inst = self.path(&format!("stack{k}.json"));
        let cert = self.path(&format!("stack{k}.cert.json"));
        assert_eq!(
            code(&run(&[
                "gen",
                "parallel",
                "--k",
                &k.to_string(),
                "--eps",
                "0.2",
                "--out",
                s(&inst)
            ])),
            0
        );
        assert_eq!(
            code(&run(&["cover", "--instance", s(&inst), "--out", s(&cert)])),
            0
        );
        (inst, cert)
    }
}

#[test]
fn stacked_cover_verifies() {
    let w = Work::new();
    let (inst, cert) = w.stacked(10);
    let c: CoverCertificate = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert!(c.covered);
    assert_eq!(c.planks_used, 10);
    let out = run(&[
        "verify",
        "--instance",
        s(&inst),
        "--certificate",
        s(&cert),
        "--samples",
        "200000",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "uncovered_fraction 0"
    );
}

#[test]
fn truncated_cover_exits_uncovered() {
    let w = Work::new();
    let (inst, cert) = w.stacked(9);
    let out = run(&[
        "verify",
        "--instance",
        s(&inst),
        "--certificate",
        s(&cert),
        "--samples",
        "400000",
    ]);
    assert_eq!(code(&out), 5);
    let text = String::from_utf8_lossy(&out.stdout);
    let f: f64 = text
        .trim()
        .strip_prefix("uncovered_fraction ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((f - 0.028).abs() < 0.002, "{f}");
}

#[test]
fn tampered_certificate_exits_static() {
    let w = Work::new();
    let (inst, cert) = w.stacked(10);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    v["placements"][3]["normal"] = serde_json::json!([0.0, 0.6, 0.8]);
    fs::write(&cert, v.to_string()).unwrap();
    let out = run(&["verify", "--instance", s(&inst), "--certificate", s(&cert)]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("normal mismatch"));
}

#[test]
fn bad_parameters_exit_usage() {
    let w = Work::new();
    let out = w.path("x.json");
    for args in [
        vec![
            "gen",
            "random",
            "--k",
            "0",
            "--eps",
            "0.1",
            "--out",
            s(&out),
        ],
        vec![
            "gen",
            "random",
            "--k",
            "10",
            "--eps",
            "-1",
            "--out",
            s(&out),
        ],
        vec![
            "gen",
            "random",
            "--k",
            "ten",
            "--eps",
            "0.1",
            "--out",
            s(&out),
        ],
        vec![
            "gen",
            "adversarial",
            "--eps",
            "0.02",
            "--cap",
            "2",
            "--out",
            s(&out),
        ],
        vec![
            "gen",
            "parallel",
            "--k",
            "3",
            "--eps",
            "0.1",
            "--normal",
            "0,0,0",
            "--out",
            s(&out),
        ],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let missing = w.path("missing.json");
    assert_eq!(
        code(&run(&[
            "cover",
            "--instance",
            s(&missing),
            "--out",
            s(&out)
        ])),
        2
    );
}

#[test]
#[allow(clippy::approx_constant)]
fn generated_files_are_canonical() {
    let w = Work::new();
    let inst = w.path("adv.json");
    let args = [
        "gen",
        "adversarial",
        "--eps",
        "0.02",
        "--cap",
        "0.5236",
        "--sep",
        "2",
        "--seed",
        "7",
        "--out",
        s(&inst),
    ];
    assert_eq!(code(&run(&args)), 0);
    let text = fs::read_to_string(&inst).unwrap();
    let parsed: Instance = serde_json::from_str(&text).unwrap();
    assert_eq!(to_canonical_string(&parsed).unwrap(), text);
    assert_eq!(parsed.metadata.params["cap_angle"], 0.5236);
    assert_eq!(parsed.metadata.seed, Some(7));

    let cert = w.path("adv.cert.json");
    assert_eq!(
        code(&run(&[
            "cover",
            "--instance",
            s(&inst),
            "--mode",
            "fixed_order",
            "--record-volumes",
            "--samples",
            "5000",
            "--out",
            s(&cert)
        ])),
        0
    );
    let text = fs::read_to_string(&cert).unwrap();
    let parsed: CoverCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(to_canonical_string(&parsed).unwrap(), text);
}

#[test]
fn cover_then_verify_is_self_consistent() {
    let w = Work::new();
    for seed in ["1", "2"] {
        let inst = w.path("r.json");
        let cert = w.path("r.cert.json");
        assert_eq!(
            code(&run(&[
                "gen",
                "random",
                "--k",
                "134",
                "--eps",
                "0.2",
                "--seed",
                seed,
                "--out",
                s(&inst)
            ])),
            0
        );
        for max in ["5", "1000"] {
            assert_eq!(
                code(&run(&[
                    "cover",
                    "--instance",
                    s(&inst),
                    "--max-planks",
                    max,
                    "--out",
                    s(&cert)
                ])),
                0
            );
            let o = run(&[
                "verify",
                "--instance",
                s(&inst),
                "--certificate",
                s(&cert),
                "--samples",
                "100000",
            ]);
            assert_ne!(code(&o), 4);
        }
    }
}

#[test]
fn obj_export_of_stacked_cover() {
    let w = Work::new();
    let (inst, cert) = w.stacked(10);
    let obj = w.path("stack.obj");
    assert_eq!(
        code(&run(&[
            "export-obj",
            "--instance",
            s(&inst),
            "--certificate",
            s(&cert),
            "--out",
            s(&obj)
        ])),
        0
    );
    let text = fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 20);
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 80);

    // Every quad lies in its boundary plane: z = 1 − 0.2 j.
    let c: CoverCertificate = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let mut lines = text.lines().skip_while(|l| !l.starts_with("g "));
    for p in &c.placements {
        for offset in [p.lower_offset, p.upper_offset] {
            assert!(lines.next().unwrap().starts_with("g "));
            for _ in 0..4 {
                let v: Vec<f64> = lines.next().unwrap()[2..]
                    .split(' ')
                    .map(|x| x.parse().unwrap())
                    .collect();
                assert!((v[2] - offset).abs() < 1e-12);
            }
            assert!(lines.next().unwrap().starts_with("f "));
        }
    }

    let again = w.path("again.obj");
    run(&[
        "export-obj",
        "--instance",
        s(&inst),
        "--certificate",
        s(&cert),
        "--out",
        s(&again),
    ]);
    assert_eq!(fs::read(&obj).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn obj_export_of_empty_certificate_is_header_only() {
    let w = Work::new();
    let (inst, cert) = w.stacked(3);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    v["placements"] = Value::Array(vec![]);
    v["steps"] = Value::Array(vec![]);
    v["planks_used"] = 0.into();
    v["covered"] = false.into();
    fs::write(&cert, v.to_string()).unwrap();
    let obj = w.path("empty.obj");
    assert_eq!(
        code(&run(&[
            "export-obj",
            "--instance",
            s(&inst),
            "--certificate",
            s(&cert),
            "--out",
            s(&obj)
        ])),
        0
    );
    let text = fs::read_to_string(&obj).unwrap();
    assert!(!text.is_empty());
    assert!(text.lines().all(|l| l.starts_with('#')));
}

#[test]
fn obj_export_rejects_mismatched_pair() {
    let w = Work::new();
    let (_, cert) = w.stacked(10);
    let (other, _) = w.stacked(9);
    let obj = w.path("bad.obj");
    assert_eq!(
        code(&run(&[
            "export-obj",
            "--instance",
            s(&other),
            "--certificate",
            s(&cert),
            "--out",
            s(&obj)
        ])),
        2
    );
}

#[test]
fn parallel_sweep_is_linear() {
    let w = Work::new();
    let cfg = w.path("sweep.json");
    fs::write(
        &cfg,
        r#"{"epsilons": [0.2, 0.1, 0.05], "generator": "parallel", "mode": "chunked",
            "seeds": [1], "k_rule": "ceil(2 * eps^(-1))", "verify_samples": 20000}"#,
    )
    .unwrap();
    let csv = w.path("sweep.csv");
    let o = run(&[
        "sweep",
        "--config",
        s(&cfg),
        "--out",
        s(&csv),
        "--workers",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,k_supplied,planks_used,covered,mode,seed,wall_time_s"
    );
    let rows: Vec<Vec<&str>> = lines
        .clone()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(
        rows.iter().map(|r| r[2]).collect::<Vec<_>>(),
        vec!["10", "20", "40"]
    );
    assert!(rows.iter().all(|r| r[3] == "true" && r[1] == r[2]));
    let slope_line = lines.find(|l| l.starts_with("# slope")).unwrap();
    let fields: Vec<&str> = slope_line.split(',').collect();
    assert_eq!(&fields[1..3], &["parallel", "chunked"]);
    assert!((fields[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn empty_sweep_grid_exits_usage() {
    let w = Work::new();
    let cfg = w.path("sweep.json");
    fs::write(&cfg, r#"{"epsilons": [], "generator": "random", "mode": "chunked", "seeds": [1], "k_rule": "ceil(8 * eps^(-1.75))"}"#).unwrap();
    assert_eq!(
        code(&run(&[
            "sweep",
            "--config",
            s(&cfg),
            "--out",
            s(&w.path("x.csv"))
        ])),
        2
    );
}
