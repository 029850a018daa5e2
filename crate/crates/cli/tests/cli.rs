use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lasekit::numerics::Scale;
use lasekit_cli::cli::{ScaleArg, SweepArgs};
use lasekit_cli::commands::sweep_series;
use lasekit_cli::config::RunConfig;
use lasekit_cli::emit::{read_footer, read_meta, read_sweep};
use tempfile::TempDir;

const THREE_B: &str = r#"{"model":"three-b","parameterization":"physical","params":{"n_atoms":100,"coupling_g":1,
"cavity_kappa":1,"gamma_21":1,"gamma_02":2,"gamma_10":0.1}}"#;
const TWO_LEVEL: &str =
    r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":1000,"s":1e-6,"delta":1e5}}"#;
const SCHEME_B: &str =
    r#"{"model":"three-b","parameterization":"dimensionless","params":{"lambda":1e5,"s":0.01,"eps":0,"delta":0.1}}"#;

fn lasekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lasekit"))
        .args(args)
        .env_remove("LASEKIT_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn config(&self, name: &str, json: &str) -> String {
        let path = self.dir.path().join(name);
        std::fs::write(&path, json).unwrap();
        path.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn steady_examples() {
    let fx = Fixture::new();
    let b = fx.config("b.json", THREE_B);
    let v = json(&lasekit(&["steady", "--config", &b, "--format", "json"]));
    assert!((v["photon_number"].as_f64().unwrap() - 23.448125).abs() < 1e-12);
    assert_eq!(v["regime"], "lasing");
    for key in ["raw_bracket", "gamma_perp", "gamma_parallel", "inversion", "rho22"] {
        assert!(v[key].is_number(), "{key}");
    }

    let t = fx.config("t.json", TWO_LEVEL);
    let v = json(&lasekit(&["steady", "--config", &t, "--pump", "449999", "--format", "json"]));
    let n = v["photon_number"].as_f64().unwrap();
    assert!(((n - 2.02498e8) / 2.02498e8).abs() < 1e-6, "{n}");
    assert!(v.get("gamma_parallel").is_none());

    let o = lasekit(&["steady", "--config", &t, "--pump", "1.1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("\nphoton_number,0\n") && text.contains("\nregime,below_threshold\n"), "{text}");
}

#[test]
fn region_examples() {
    let fx = Fixture::new();
    let t = fx.config("t.json", TWO_LEVEL);
    let v = json(&lasekit(&["region", "--config", &t, "--format", "json"]));
    assert!((v["threshold"].as_f64().unwrap() - 1.22223).abs() < 1e-5);
    assert!((v["window_upper"].as_f64().unwrap() / 9e5 - 1.0).abs() < 1e-5);

    let b = fx.config("b.json", SCHEME_B);
    let v = json(&lasekit(&["region", "--config", &b, "--format", "json"]));
    assert_eq!(v["window_lower"], 0.0);
    assert!((v["window_upper"].as_f64().unwrap() - 99.9).abs() < 1e-12);
    assert_eq!(v["optimum_pump_paper"], 49.95);
    assert!((v["optimum_pump_exact"].as_f64().unwrap() - 12.2759).abs() < 1e-4);

    let a = fx.config(
        "a.json",
        r#"{"model":"three-a","parameterization":"dimensionless","params":{"lambda":1e5,"s":0.01,"eps":1,"delta":0.1}}"#,
    );
    let v = json(&lasekit(&["region", "--config", &a, "--format", "json"]));
    assert_eq!(v["outcome"], "no_lasing");
    assert!(v["threshold"].is_null());
}

#[test]
fn scheme_a_physical_region_reports_atom_floor() {
    let fx = Fixture::new();
    let a = fx.config(
        "a.json",
        r#"{"model":"three-a","parameterization":"physical","params":{"n_atoms":100,"coupling_g":1,"cavity_kappa":1,
        "gamma_21":5,"gamma_02":2,"gamma_10":0.1}}"#,
    );
    let v = json(&lasekit(&["region", "--config", &a, "--format", "json"]));
    // κγ02/2g² · (1 + ε)² / (1 − ε) with ε = 0.05.
    let expected = 1.0 * 1.05 * 1.05 / 0.95;
    assert!((v["n_min_atoms"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(v["window_upper"], "inf");
    assert!(v["depletion_ratio_lower"].as_f64().unwrap() > 1.0);
}

#[test]
fn config_errors_exit_2_with_the_key() {
    let fx = Fixture::new();
    let cases = [
        (r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":1,"s":0.1}}"#, "params.delta"),
        (
            r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":1,"s":0.1,"delta":0,"eps":0}}"#,
            "params.eps",
        ),
        (
            r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":0,"s":0.1,"delta":0}}"#,
            "params.lambda",
        ),
        (r#"{"model":"five-level","parameterization":"dimensionless","params":{}}"#, "model"),
        (
            r#"{"model":"three-b","parameterization":"physical","params":{"n_atoms":0.5,"coupling_g":1,"cavity_kappa":1,"gamma_21":1,"gamma_02":2,"gamma_10":0.1}}"#,
            "params.n_atoms",
        ),
        ("not json", "invalid JSON"),
    ];
    for (k, (text, key)) in cases.iter().enumerate() {
        let c = fx.config(&format!("c{k}.json"), text);
        let o = lasekit(&["region", "--config", &c]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(key), "{}", stderr(&o));
    }
    let o = lasekit(&["steady", "--config", &fx.config("t.json", TWO_LEVEL)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pump"));
    assert_eq!(lasekit(&["steady"]).status.code(), Some(2));
    assert_eq!(lasekit(&["figure", "fig3"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let fx = Fixture::new();
    let b = fx.config("b.json", SCHEME_B);
    let o =
        lasekit(&["sweep", "--config", &b, "--pump-min", "0.1", "--pump-max", "10", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("/nonexistent/dir/x.csv"));
    assert_eq!(lasekit(&["steady", "--config", "/nonexistent/c.json"]).status.code(), Some(3));
    assert_eq!(lasekit(&["figure", "fig2", "--out", "/nonexistent/dir"]).status.code(), Some(3));
}

fn sweep_args(config: &Path, out: Option<PathBuf>, scale: ScaleArg) -> SweepArgs {
    SweepArgs {
        config: config.to_path_buf(),
        pump_min: 0.01,
        pump_max: 120.0,
        points: 97,
        scale,
        out,
        format: Default::default(),
        oracle_every: None,
    }
}

#[test]
fn sweep_csv_round_trips() {
    let fx = Fixture::new();
    let b = fx.config("b.json", SCHEME_B);
    let out = fx.path("sweep.csv");
    for (scale, flag) in [(ScaleArg::Log, "log"), (ScaleArg::Linear, "linear")] {
        let o = lasekit(&[
            "sweep",
            "--config",
            &b,
            "--pump-min",
            "0.01",
            "--pump-max",
            "120",
            "--points",
            "97",
            "--scale",
            flag,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        let cfg = RunConfig::from_json(SCHEME_B).unwrap();
        let expected = sweep_series(&cfg, &sweep_args(Path::new(&b), None, scale)).unwrap();
        assert_eq!(read_sweep(&text).unwrap(), expected);
        assert_eq!(expected.scale, Scale::from(scale));
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "pump,photon_number,regime");
        assert!(read_meta(&text).iter().any(|(k, v)| k == "s" && v == "0.01"));
    }
}

#[test]
fn sweep_with_oracle_column() {
    let fx = Fixture::new();
    let t = fx.config(
        "t.json",
        r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":50,"s":0.01,"delta":0.1}}"#,
    );
    let o = lasekit(&[
        "sweep",
        "--config",
        &t,
        "--pump-min",
        "0.5",
        "--pump-max",
        "60",
        "--points",
        "9",
        "--oracle-every",
        "4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = read_sweep(&stdout(&o)).unwrap();
    assert_eq!(s.oracle.iter().map(|(i, _)| *i).collect::<Vec<_>>(), [0, 4, 8]);
    for (i, v) in &s.oracle {
        if let Some(v) = v {
            assert!((v - s.photon_numbers[*i]).abs() <= 1e-5 * s.photon_numbers[*i].max(1e-3), "{i}: {v}");
        }
    }
}

#[test]
fn precision_override() {
    let fx = Fixture::new();
    let b = fx.config("b.json", THREE_B);
    let o = Command::new(env!("CARGO_BIN_EXE_lasekit"))
        .args(["steady", "--config", &b])
        .env("LASEKIT_PRECISION", "4")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("\nphoton_number,2.345e1\n"), "{}", stdout(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_lasekit"))
        .args(["steady", "--config", &b])
        .env("LASEKIT_PRECISION", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dynamics_settles_on_the_closed_form() {
    let fx = Fixture::new();
    let b = fx.config("b.json", THREE_B);
    let out = fx.path("d.csv");
    let o = lasekit(&["dynamics", "--config", &b, "--stride", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l == "t,rho11,rho22,y,x,n"));
    let footer = read_footer(&text);
    assert_eq!(footer[0], ("settle".to_string(), "converged".to_string()));
    let last = text.lines().rfind(|l| !l.starts_with('#')).unwrap();
    let n: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((n - 23.448125).abs() / 23.448125 < 1e-5, "{n}");
    let first = text.lines().find(|l| l.starts_with("0,")).unwrap();
    assert!(first.ends_with(",0.001,1e-6"), "{first}");
}

#[test]
fn dynamics_below_threshold_and_overrides() {
    let fx = Fixture::new();
    let b = fx.config("b.json", THREE_B);
    let o = lasekit(&["dynamics", "--config", &b, "--pump", "0.001", "--seed-field", "0.01", "--stride", "1000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let last = text.lines().rfind(|l| !l.starts_with('#')).unwrap();
    let n: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!(n < 1e-8, "{n}");
    assert!(read_meta(&text).contains(&("seed_field".to_string(), "0.01".to_string())));
    assert!(read_footer(&text).contains(&("regime".to_string(), "below_threshold".to_string())));
}

#[test]
fn dynamics_no_convergence_is_reported_not_failed() {
    let fx = Fixture::new();
    let b = fx.config("b.json", THREE_B);
    let o = lasekit(&["dynamics", "--config", &b, "--t-max", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let footer = read_footer(&stdout(&o));
    assert_eq!(footer[0], ("settle".to_string(), "no_convergence".to_string()));
    assert!(footer.iter().any(|(k, _)| k == "residual"));
}

#[test]
fn dynamics_needs_physical_rates_or_gauge() {
    let fx = Fixture::new();
    let t = fx.config(
        "t.json",
        r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":50,"s":0.01,"delta":0.1,"pump":5}}"#,
    );
    let o = lasekit(&["dynamics", "--config", &t]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--expand-gauge"));
    let o = lasekit(&["dynamics", "--config", &t, "--expand-gauge", "--stride", "100000"]);
    assert!(o.status.success());
    let footer = read_footer(&stdout(&o));
    let n: f64 = footer.iter().find(|(k, _)| k == "photon_number").unwrap().1.parse().unwrap();
    // λ[P − 1 − (P + 1)(P + 1 + δ)s] at P = 5.
    let exact = 50.0 * (4.0 - 6.0 * 6.1 * 0.01);
    assert!((n - exact).abs() / exact < 1e-5, "{n} vs {exact}");
}

#[test]
fn integrator_failure_exits_4() {
    let fx = Fixture::new();
    let c = fx.config(
        "c.json",
        r#"{"model":"two-level","parameterization":"physical","params":{"n_atoms":1e10,"coupling_g":1e150,
        "cavity_kappa":1,"gamma_decay":1,"pump_rate":5}}"#,
    );
    let o = lasekit(&["dynamics", "--config", &c]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("underflow"));
}

#[test]
fn figure_is_deterministic() {
    let fx = Fixture::new();
    let dir = fx.path("figs");
    std::fs::create_dir(&dir).unwrap();
    let o = lasekit(&["figure", "fig4b", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
    let first = std::fs::read(dir.join("fig4b_curve2.csv")).unwrap();
    let o = lasekit(&["figure", "fig4b", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(dir.join("fig4b_curve2.csv")).unwrap(), first);
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 401);
    assert!(read_meta(&text).contains(&("figure".to_string(), "fig4b".to_string())));
}
