use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dichotomy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dichotomy"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = "
[system]
kind = logistic
transient = 1000
[sweep]
a_start = 3.8
a_end = 4.0
a_step = 0.1
n_omega = 10
N_list = 2000, 4000
delta = 0.01
schemes = i, ii, iii
master_seed = 3
";

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_config_exits_with_config_code() {
    let out = dichotomy(&["sweep", "--config", "/nonexistent/dichotomy.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn zero_step_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.conf",
        &SMALL.replace("a_step = 0.1", "a_step = 0"),
    );
    let out = dichotomy(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("a_step"), "{}", stderr(&out));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", &format!("{SMALL}colour = blue\n"));
    let out = dichotomy(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("colour"));
}

#[test]
fn zero_delta_in_probe_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", SMALL);
    let out = dichotomy(&["probe-delta", "--config", &cfg, "--delta-list", "0.01,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("delta_list"));
}

#[test]
fn blowup_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = "
        [system]
        kind = lorenz96
        dt = 0.01
        stride = 1
        transient = 10
        blowup_bound = 1
        [sweep]
        a_start = 6
        a_end = 6
        a_step = 1
        n_omega = 2
        N_list = 1000
        delta = 0.01
    ";
    let cfg = write_config(dir.path(), "c.conf", text);
    let out_dir = dir.path().join("out");
    let out = dichotomy(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("a = 6"), "{}", stderr(&out));
}

#[test]
fn printed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", SMALL);
    let first = dichotomy(&["sweep", "--config", &cfg, "--seed", "99", "--print-config"]);
    assert!(first.status.success());
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("master_seed = 99"));
    let echoed = write_config(dir.path(), "echo.conf", &text);
    let second = dichotomy(&["sweep", "--config", &echoed, "--print-config"]);
    assert_eq!(String::from_utf8(second.stdout).unwrap(), text);
}

#[test]
fn repository_configs_round_trip() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let out = dichotomy(&[
            "sweep",
            "--config",
            path.to_str().unwrap(),
            "--print-config",
        ]);
        assert!(out.status.success(), "{}: {}", path.display(), stderr(&out));
        let text = String::from_utf8(out.stdout).unwrap();
        let echoed = write_config(dir.path(), "echo.conf", &text);
        let again = dichotomy(&["sweep", "--config", &echoed, "--print-config"]);
        assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
    }
}

#[test]
fn sweep_writes_csvs_with_expected_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", SMALL);
    let out_dir = dir.path().join("out");
    let out = dichotomy(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let results = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next(),
        Some("a,omega,N,K,label_scheme_i,label_scheme_ii,label_scheme_iii")
    );
    assert_eq!(lines.count(), 3 * 2 * 10);

    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("N,scheme,Q_u,Q_u_prime,Q_min,Q_min_prime\n"));
    assert_eq!(summary.lines().count(), 1 + 2 * 3);

    let outliers = fs::read_to_string(out_dir.join("outliers.csv")).unwrap();
    assert!(outliers.starts_with("a,N,M_u_percent\n"));
    assert_eq!(outliers.lines().count(), 1 + 3 * 2);
}

fn percentages(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn narrower_scheme_has_at_least_as_many_outliers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", SMALL);
    let ii = dir.path().join("ii");
    let iii = dir.path().join("iii");
    assert!(
        dichotomy(&["outliers", "--config", &cfg, "--out", ii.to_str().unwrap()])
            .status
            .success()
    );
    assert!(dichotomy(&[
        "outliers",
        "--config",
        &cfg,
        "--scheme",
        "iii",
        "--out",
        iii.to_str().unwrap()
    ])
    .status
    .success());
    let (wide, narrow) = (
        percentages(&ii.join("outliers.csv")),
        percentages(&iii.join("outliers.csv")),
    );
    assert_eq!(wide.len(), narrow.len());
    for (w, n) in wide.iter().zip(&narrow) {
        assert!(n >= w);
    }
}

#[test]
fn median_of_a_single_frequency_is_its_k() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL
        .replace("a_end = 4.0", "a_end = 3.8")
        .replace("n_omega = 10", "n_omega = 1")
        .replace("N_list = 2000, 4000", "N_list = 2000");
    let cfg = write_config(dir.path(), "c.conf", &text);
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();
    assert!(dichotomy(&["median", "--config", &cfg, "--out", o])
        .status
        .success());
    assert!(dichotomy(&["sweep", "--config", &cfg, "--out", o])
        .status
        .success());
    let median = fs::read_to_string(out_dir.join("median.csv")).unwrap();
    let results = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let m = median
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .to_string();
    let k = results
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .to_string();
    assert_eq!(m, k);
}

#[test]
fn probe_writes_curves_and_cutoffs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", SMALL);
    let out_dir = dir.path().join("probe");
    let out = dichotomy(&[
        "probe-delta",
        "--config",
        &cfg,
        "--a",
        "4.0",
        "--omega",
        "1.9418",
        "--N-list",
        "2000,4000",
        "--delta-list",
        "0.01,0.1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let curves = fs::read_to_string(out_dir.join("probe.csv")).unwrap();
    assert!(curves.starts_with("N,n,log_n,log_D,in_delta_0.01,in_delta_0.1\n"));
    let rows: Vec<Vec<&str>> = curves
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("4000,"))
        .map(|l| l.split(',').collect())
        .collect();
    assert!(rows.len() > 3000);
    for r in &rows {
        let n: usize = r[1].parse().unwrap();
        assert_eq!(r[4] == "1", n <= 40);
        assert_eq!(r[5] == "1", n <= 400);
    }
    let ks = fs::read_to_string(out_dir.join("probe_k.csv")).unwrap();
    assert_eq!(ks.lines().count(), 1 + 2 * 2);
}

#[test]
fn checkpointed_rerun_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", SMALL);
    let cp = dir.path().join("sweep.checkpoint");
    let cp = cp.to_str().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    for out in [&first, &second] {
        let o = dichotomy(&[
            "sweep",
            "--config",
            &cfg,
            "--checkpoint",
            cp,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["results.csv", "summary.csv", "outliers.csv"] {
        assert_eq!(
            fs::read(first.join(name)).unwrap(),
            fs::read(second.join(name)).unwrap()
        );
    }
    let other = write_config(
        dir.path(),
        "d.conf",
        &SMALL.replace("master_seed = 3", "master_seed = 4"),
    );
    let o = dichotomy(&["sweep", "--config", &other, "--checkpoint", cp]);
    assert_eq!(o.status.code(), Some(2));
}
