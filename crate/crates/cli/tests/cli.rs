use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn krylov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krylov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn resonant_run_peaks_at_two_j() {
    let o = krylov(&[
        "run",
        "--family",
        "su2-driven",
        "--j",
        "5",
        "--b0",
        "2.1",
        "--omega0",
        "4",
        "--omega",
        "4",
        "--t-end",
        "10",
        "--samples",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["t", "C"]);
    assert_eq!(rows.len(), 1000);
    let max = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!(max > 9.99 && max <= 10.0 + 1e-12);
}

#[test]
fn photon_resonance_column_is_quadratic() {
    let o = krylov(&[
        "run",
        "--family",
        "h1",
        "--f0",
        "3",
        "--omega0",
        "4",
        "--omega",
        "4",
        "--samples",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&o));
    for r in rows.iter().skip(1) {
        assert!((r[1] / (9.0 * r[0] * r[0]) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn usage_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &[
            "run", "--family", "h1", "--f0", "3", "--omega0", "4", "--omega", "4", "--t-end", "0",
        ],
        &[
            "run",
            "--family",
            "h1",
            "--f0",
            "3",
            "--omega0",
            "4",
            "--omega",
            "4",
            "--samples",
            "1",
        ],
        &["run", "--family", "nope"],
        &["run", "--family", "h1", "--f0", "3", "--omega0", "4"],
        &[
            "run", "--family", "h1", "--f0", "3", "--omega0", "4", "--omega", "4", "--j", "1",
        ],
        &[
            "run",
            "--family",
            "su2-driven",
            "--j",
            "0.3",
            "--b0",
            "1",
            "--omega0",
            "1",
            "--omega",
            "1",
        ],
        &["repro", "fig99"],
        &["frobnicate"],
        &[
            "run", "--family", "h1", "--f0", "3", "--omega0", "4", "--omega", "4", "--method",
            "guess",
        ],
    ];
    for args in cases {
        let o = krylov(args);
        assert_eq!(
            o.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn numeric_failures_exit_two() {
    let o = krylov(&[
        "run", "--family", "su11", "--g", "2.1", "--omega0", "4", "--delta", "2", "--t-end", "100",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("growth rate"));
    let pole = krylov(&[
        "run",
        "--family",
        "su2-kicked",
        "--j",
        "1",
        "--omega0",
        "1",
        "--T",
        "6.283185307179586",
        "--chi",
        "0.1",
    ]);
    assert_eq!(pole.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(krylov(&["--help"]).status.code(), Some(0));
    assert_eq!(krylov(&["--version"]).status.code(), Some(0));
}

#[test]
fn output_is_byte_deterministic() {
    let args = [
        "run",
        "--family",
        "su2-damped",
        "--j",
        "2",
        "--b0",
        "5",
        "--eta",
        "0.09",
        "--omega0",
        "4",
        "--omega",
        "2",
        "--t-end",
        "30",
        "--samples",
        "301",
        "--method",
        "both",
        "--probabilities",
    ];
    let a = krylov(&args);
    let b = krylov(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (header, _) = csv_rows(&stdout(&a));
    assert_eq!(header, ["t", "C", "dev", "p0", "p1", "p2", "p3", "p4"]);
}

#[test]
fn config_file_with_flag_override() {
    let cfg = fixture("su2_driven.json");
    let from_cfg = krylov(&["run", "--config", &cfg]);
    let explicit = krylov(&[
        "run",
        "--family",
        "su2-driven",
        "--j",
        "5",
        "--b0",
        "2.1",
        "--omega0",
        "4",
        "--omega",
        "4",
        "--t-end",
        "10",
        "--samples",
        "1000",
    ]);
    assert_eq!(from_cfg.status.code(), Some(0));
    assert_eq!(from_cfg.stdout, explicit.stdout);
    let overridden = krylov(&["run", "--config", &cfg, "--j", "1", "--samples", "50"]);
    let (_, rows) = csv_rows(&stdout(&overridden));
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r[1] <= 2.0 + 1e-12));
}

#[test]
fn json_output_round_trips() {
    let o = krylov(&[
        "run",
        "--family",
        "quench",
        "--omega0",
        "1",
        "--eta0",
        "0.5",
        "--tau",
        "7.5",
        "--samples",
        "11",
        "--format",
        "json",
        "--method",
        "both",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["family"], "quench");
    assert_eq!(v["C"].as_array().unwrap().len(), 11);
    assert_eq!(v["dev"].as_array().unwrap().len(), 11);
}

#[test]
fn repro_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let svg = dir.path().join("svg");
    let o = krylov(&[
        "--output",
        &out,
        "--plot",
        &svg.to_string_lossy(),
        "repro",
        "figquench",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("figquench.csv")).unwrap();
    let (header, rows) = csv_rows(&text);
    assert_eq!(&header[..3], ["t", "C", "dev"]);
    let c_tau = rows.iter().filter(|r| r[0] <= 7.5).next_back().unwrap()[1];
    for r in rows.iter().filter(|r| r[0] >= 7.5) {
        assert!((r[1] - c_tau).abs() < 1e-10);
    }
    assert!(std::fs::read_to_string(svg.join("figquench.svg"))
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn repro_transition_is_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let o = krylov(&["--output", &dir.path().to_string_lossy(), "repro", "fig6b"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&std::fs::read_to_string(dir.path().join("fig6b.csv")).unwrap());
    let (t, c): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r[0] <= 5.0)
        .map(|r| (r[0], r[1]))
        .unzip();
    let (a, r2) = krylov_cli::presets::quadratic_fit(&t, &c);
    assert!((a / 0.0625 - 1.0).abs() < 1e-6);
    assert!(r2 >= 1.0 - 1e-6);
}

#[test]
fn regime_sweep_marks_the_diagonal() {
    let o = krylov(&[
        "sweep",
        "--family",
        "su11",
        "--omega0",
        "4",
        "--x",
        "g",
        "--x-range",
        "0:3:61",
        "--y",
        "delta",
        "--y-range",
        "0:3:61",
        "--t-end",
        "1",
        "--samples",
        "3",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "g,delta,value,regime,error");
    let mut n = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (g, d): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert_eq!(
            f[3] == "quadratic",
            (g - d).abs() <= 1e-12 * g.max(d),
            "{line}"
        );
        n += 1;
    }
    assert_eq!(n, 61 * 61);
}

#[test]
fn single_cell_sweep_equals_run() {
    let common = [
        "--family",
        "su11",
        "--omega0",
        "4",
        "--t-end",
        "20",
        "--samples",
        "401",
    ];
    let mut sweep_args = vec!["sweep"];
    sweep_args.extend(common);
    sweep_args.extend([
        "--x",
        "g",
        "--x-range",
        "1:1:1",
        "--y",
        "delta",
        "--y-range",
        "2:2:1",
    ]);
    let s = krylov(&sweep_args);
    assert_eq!(s.status.code(), Some(0));
    let value: f64 = stdout(&s)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    let mut run_args = vec!["run"];
    run_args.extend(common);
    run_args.extend(["--g", "1", "--delta", "2"]);
    let r = krylov(&run_args);
    let (_, rows) = csv_rows(&stdout(&r));
    let cmax = rows.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(value, cmax);
}

#[test]
fn failing_sweep_cell_is_flagged() {
    let o = krylov(&[
        "sweep",
        "--family",
        "su11",
        "--omega0",
        "4",
        "--delta",
        "2",
        "--x",
        "g",
        "--x-range",
        "0.5:3:2",
        "--y",
        "eta",
        "--y-range",
        "0:0:1",
        "--t-end",
        "20",
        "--samples",
        "101",
        "--truncation",
        "16",
        "--probabilities",
        "--summary",
        "c-saturation",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(','), "{}", rows[0]);
    assert!(rows[1].contains("exponential,\""), "{}", rows[1]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 of 2 cells failed"));
}

fn lanczos_json(args: &[&str]) -> serde_json::Value {
    let o = krylov(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn lanczos_on_v_configuration() {
    let m = fixture("su3_v.json");
    for method in ["direct", "moments"] {
        let v = lanczos_json(&["lanczos", "--matrix", &m, "--method", method]);
        let (a, b) = (floats(&v["a"]), floats(&v["b"]));
        for (x, e) in a.iter().zip([4.0, -8.0, 4.0]) {
            assert!((x - e).abs() < 1e-9, "{method}: a = {a:?}");
        }
        for (x, e) in b.iter().zip([2.0, 5.0]) {
            assert!((x - e).abs() < 1e-9, "{method}: b = {b:?}");
        }
        assert_eq!(v["basis"].is_null(), method == "moments");
    }
}

#[test]
fn lanczos_diagonal_seed_terminates() {
    let v = lanczos_json(&[
        "lanczos",
        "--matrix",
        &fixture("diag.json"),
        "--seed",
        &fixture("seed_e1.json"),
    ]);
    assert_eq!(floats(&v["a"]), vec![1.0]);
    assert!(floats(&v["b"]).is_empty());
}

#[test]
fn lanczos_routes_agree_on_random_hermitian() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(krylov_cli::fixture_seed(11));
    let dir = tempfile::tempdir().unwrap();
    for trial in 0..5 {
        let d = 4;
        let mut re = vec![0.0; d * d];
        let mut im = vec![0.0; d * d];
        for i in 0..d {
            re[i * d + i] = rng.gen_range(-1.0..1.0);
            for j in i + 1..d {
                let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                re[i * d + j] = x;
                re[j * d + i] = x;
                im[i * d + j] = y;
                im[j * d + i] = -y;
            }
        }
        let path: PathBuf = dir.path().join(format!("h{trial}.json"));
        std::fs::write(
            &path,
            serde_json::json!({"dim": d, "re": re, "im": im}).to_string(),
        )
        .unwrap();
        let p = path.to_string_lossy();
        let direct = lanczos_json(&["lanczos", "--matrix", &p, "--method", "direct"]);
        let mom = lanczos_json(&["lanczos", "--matrix", &p, "--method", "moments"]);
        for key in ["a", "b"] {
            let (x, y) = (floats(&direct[key]), floats(&mom[key]));
            assert_eq!(x.len(), y.len());
            for (u, v) in x.iter().zip(&y) {
                assert!((u - v).abs() <= 1e-7, "{key}: {x:?} vs {y:?}");
            }
        }
    }
}

#[test]
fn lanczos_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"dim": 2, "re": [0, 1, 2, 0], "im": [0, 0, 0, 0]}"#,
    )
    .unwrap();
    let o = krylov(&["lanczos", "--matrix", &path.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(&path, r#"{"dim": 2, "re": [0, 1, 1]}"#).unwrap();
    let o = krylov(&["lanczos", "--matrix", &path.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(1));
}
