use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn synthlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synthlab"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMOKE: &str = r#"
master_seed = 7

[dictionary]
kind = "identity"
n = 16

[signal]
kind = "random"
s = 2

[experiment]
trials = 5

[width]
samples = 50
"#;

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn phase_smoke_run_is_well_formed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "smoke.toml", SMOKE);
    let out = synthlab(tmp.path(), &["phase", "--config", &cfg, "--out", "run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&tmp.path().join("run/phase.csv"));
    assert_eq!(
        rows[0].join(","),
        "s,m,trials,coef_successes,sig_successes,solver_failures,statdim,statdim_stderr"
    );
    assert_eq!(rows.len(), 17);
    for row in &rows[1..] {
        assert_eq!(row.len(), 8);
        let trials: usize = row[2].parse().unwrap();
        let coef: usize = row[3].parse().unwrap();
        let sig: usize = row[4].parse().unwrap();
        let fail: usize = row[5].parse().unwrap();
        assert_eq!(trials, 5);
        assert!(coef + fail <= trials && sig + fail <= trials);
    }
    // m = n pins the signal for the identity
    assert_eq!(rows[16][4], "5");
    assert!(tmp.path().join("run/manifest.toml").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "smoke.toml", SMOKE);
    for dir in ["a", "b"] {
        let out = synthlab(tmp.path(), &["phase", "--config", &cfg, "--out", dir]);
        assert!(out.status.success());
    }
    let a = fs::read(tmp.path().join("a/phase.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/phase.csv")).unwrap();
    assert_eq!(a, b);
    let out = synthlab(tmp.path(), &["phase", "--config", &cfg, "--out", "c", "--threads", "1"]);
    assert!(out.status.success());
    assert_eq!(a, fs::read(tmp.path().join("c/phase.csv")).unwrap());
}

#[test]
fn manifest_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "smoke.toml", SMOKE);
    assert!(synthlab(tmp.path(), &["phase", "--config", &cfg, "--out", "a"]).status.success());
    let out = synthlab(tmp.path(), &["phase", "--config", "a/manifest.toml", "--out", "b"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(tmp.path().join("a/phase.csv")).unwrap(),
        fs::read(tmp.path().join("b/phase.csv")).unwrap()
    );
}

#[test]
fn invalid_preset_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = synthlab(tmp.path(), &["noise", "--figure", "no-such-preset"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
    // a preset of the wrong command is a configuration error too
    let out = synthlab(tmp.path(), &["noise", "--figure", "fig5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2_and_leave_no_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = SMOKE.replace("s = 2", "s = 40");
    let cfg = write_config(tmp.path(), "bad.toml", &bad);
    let out = synthlab(tmp.path(), &["phase", "--config", &cfg, "--out", "run"]);
    assert_eq!(out.status.code(), Some(2));
    let typo = write_config(tmp.path(), "typo.toml", "[dictionary]\nkindd = \"haar\"\n");
    let out = synthlab(tmp.path(), &["phase", "--config", &typo]);
    assert_eq!(out.status.code(), Some(2));
    let haar = write_config(tmp.path(), "haar.toml", "[dictionary]\nkind = \"haar\"\nn = 12\n");
    let out = synthlab(tmp.path(), &["geometry", "--config", &haar, "--out", "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("run/geometry.csv").exists());
}

#[test]
fn print_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = synthlab(tmp.path(), &["print-config", "--figure", "fig6a"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# signal dimension (default: 16)"));
    let cfg = write_config(tmp.path(), "fig6a.toml", &text);
    let again = synthlab(tmp.path(), &["print-config", "--config", &cfg]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn noise_preset_populates_bounds() {
    // the desk haar-coef preset, cut down to two levels and three trials
    let tmp = tempfile::tempdir().unwrap();
    let out = synthlab(tmp.path(), &["print-config", "--figure", "haar-coef"]);
    let text = String::from_utf8(out.stdout)
        .unwrap()
        .replace("trials = 25", "trials = 3")
        .replace("eta_max = 1.0", "eta_max = 0.05");
    let cfg = write_config(tmp.path(), "hc.toml", &text);
    let out = synthlab(tmp.path(), &["noise", "--config", &cfg, "--out", "run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&tmp.path().join("run/noise.csv"));
    assert_eq!(rows[0].join(","), "eta,trials,mean_coef_err,mean_sig_err,bound_sig");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let sig: f64 = row[3].parse().unwrap();
        let bound: f64 = row[4].parse().unwrap();
        assert!(sig <= bound + 1e-5, "{row:?}");
    }
    // noiseless entry
    assert!(rows[1][3].parse::<f64>().unwrap() < 1e-5);
}

#[test]
fn geometry_identity_and_conv_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let id = write_config(
        tmp.path(),
        "id.toml",
        "[dictionary]\nkind = \"identity\"\nn = 32\n[signal]\ns = 4\n[width]\nsamples = 40\nlambda_perturbations = 2\n",
    );
    let out = synthlab(tmp.path(), &["geometry", "--config", &id, "--out", "id"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&tmp.path().join("id/geometry.csv"));
    let header = rows[0].clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let tan_sq: f64 = rows[1][col("tan_sq_alpha")].parse().unwrap();
    assert!((tan_sq - 4.0).abs() < 1e-6);
    assert!(!rows[1][col("bound_gauge")].is_empty());
    assert!(!rows[1][col("corollary_rate")].is_empty());

    let cp = write_config(
        tmp.path(),
        "cp.toml",
        "[dictionary]\nkind = \"conv-pair\"\nn = 8\n[signal]\nkind = \"endpoint\"\n[width]\nsamples = 0\nlambda_perturbations = 0\n",
    );
    let out = synthlab(tmp.path(), &["geometry", "--config", &cp, "--out", "cp"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&tmp.path().join("cp/geometry.csv"));
    let alpha: f64 = rows[1][col("alpha")].parse().unwrap();
    assert!((alpha.cos() - 1.0 / 3f64.sqrt()).abs() < 1e-6);
    assert_eq!(rows[1][col("lineality_dim")], "2");
}

#[test]
fn tv_sweep_is_increasing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "tv.toml",
        "[dictionary]\nkind = \"tv\"\n[signal]\nkind = \"tv-jumps\"\njumps = 4\n\
         [experiment]\nn_values = [128, 256, 512]\n[width]\nsamples = 0\nlambda_perturbations = 0\n",
    );
    let out = synthlab(tmp.path(), &["geometry", "--config", &cfg, "--out", "tv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&tmp.path().join("tv/geometry.csv"));
    let t: Vec<f64> = rows[1..].iter().map(|r| r[7].parse().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]), "{t:?}");
}

#[test]
fn oversized_seed_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = synthlab(tmp.path(), &["print-config", "--seed", "18446744073709551615"]);
    assert_eq!(out.status.code(), Some(2));
}
