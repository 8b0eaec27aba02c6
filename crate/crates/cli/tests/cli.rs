use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_levy-growth");

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(root()).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Set UPDATE_GOLDEN=1 to rewrite the files.
#[test]
fn help_text_matches_golden_files() {
    let cases: [(&str, &[&str]); 6] = [
        ("main", &["--help"]),
        ("simulate", &["simulate", "--help"]),
        ("cov", &["cov", "--help"]),
        ("mc-verify", &["mc-verify", "--help"]),
        ("fit", &["fit", "--help"]),
        ("moments", &["moments", "--help"]),
    ];
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (name, args) in cases {
        let o = run(args);
        assert_eq!(code(&o), 0);
        let text = String::from_utf8(o.stdout).unwrap();
        let path = dir.join(format!("{name}.txt"));
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, &text).unwrap();
        }
        let want = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, want, "help for {name} changed");
    }
    let sub = std::fs::read_to_string(dir.join("simulate.txt")).unwrap();
    for flag in ["--preset", "--config", "--seed", "--replicates", "--out-dir", "--threads", "--fine", "--set"] {
        assert!(sub.contains(flag), "{flag} missing from help");
    }
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn simulate_is_byte_identical_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let o = run(&["simulate", "--preset", "ex4", "--seed", "7", "--out-dir", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (fa, fb) = (read_dir(&a), read_dir(&b));
    assert_eq!(fa, fb);
    for (_, bytes) in &fa {
        assert!(bytes.starts_with(b"# levy-growth "));
    }
}

#[test]
fn simulate_ex3_writes_its_three_times() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--preset", "ex3", "--out-dir", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let names: Vec<String> = read_dir(tmp.path()).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["history.csv", "polyline_t100.csv", "polyline_t125.csv", "polyline_t75.csv"]);
    let text = std::fs::read_to_string(tmp.path().join("history.csv")).unwrap();
    let mut times: Vec<&str> = text.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    times.dedup();
    assert_eq!(times, ["75.0", "100.0", "125.0"]);
}

#[test]
fn config_errors_exit_2_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "seed = 1\n[grid]\nn_angles = 64\ncells = 3\n").unwrap();
    let o = run(&["simulate", "--preset", "ex4", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cells"), "{}", stderr(&o));
    std::fs::write(&bad, "seed = \n").unwrap();
    let o = run(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
    let o = run(&["simulate", "--preset", "ex9"]);
    assert_eq!(code(&o), 2);
    assert!(!stderr(&o).is_empty());
}

#[test]
fn kumulant_domain_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate",
        "--preset",
        "tumour",
        "--set",
        "model.basis.spot={kind=\"gamma\",shape=1.0,rate=0.01}",
        "--out-dir",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("kumulant"));
}

#[test]
fn single_harmonic_table_is_a_cosine() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["cov", "--config", "configs/single_harmonic.toml", "--out-dir", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("cov.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# levy-growth"));
    assert_eq!(lines.next().unwrap(), "t1,t2,dphi,cov");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4 * 17);
    for block in rows.chunks(17) {
        let c0 = block[0][3];
        assert!(c0 > 0.0);
        for r in block {
            assert!((r[3] - c0 * r[2].cos()).abs() < 1e-12 * c0);
        }
    }
}

#[test]
fn mc_verify_passes_and_gates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = run(&["mc-verify", "--config", "configs/rect_gaussian_verify.toml", "--out-dir", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("mc_verify.csv")).unwrap();
    assert_eq!(text.lines().count(), 2 + 4);
    let o = run(&[
        "mc-verify",
        "--config",
        "configs/rect_gaussian_verify.toml",
        "--set",
        "verify.max_z=1e-9",
        "--replicates",
        "50",
        "--out-dir",
        out,
    ]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn fit_round_trip_converges() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let o = run(&[
        "simulate",
        "--preset",
        "ex4",
        "--set",
        "grid.n_angles=128",
        "--set",
        "model.ambit.half_width.value=0.1",
        "--replicates",
        "100",
        "--seed",
        "5",
        "--out-dir",
        sim.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let data = sim.join("history.csv");
    let fit = tmp.path().join("fit");
    let o = run(&[
        "fit",
        "--config",
        "configs/fit_direct.toml",
        "--data",
        data.to_str().unwrap(),
        "--out-dir",
        fit.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(fit.join("fit.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], serde_json::Value::Bool(true));
    let est = report["estimates"].as_array().unwrap();
    assert!((est[0].as_f64().unwrap() - 1.0).abs() < 0.2);
    assert!((est[1].as_f64().unwrap() - 0.1).abs() < 0.02);

    let mom = tmp.path().join("mom");
    let o = run(&["moments", "--data", data.to_str().unwrap(), "--out-dir", mom.to_str().unwrap(), "--set", "moments.orders=4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let names: Vec<String> = read_dir(&mom).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["coefficients.csv", "moments_spatial.csv", "moments_summary.csv", "moments_temporal.csv"]);
}
