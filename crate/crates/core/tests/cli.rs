use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = r#"
[model]
a = 2.0
b = 0.5
c = 0.5
d = 1.0
beta = 2.0
mu = 2.0
g0 = 2.0
h0 = 1.5

[solver]
ny = 64
nxi = 64
t_max = 5.0
snapshot_interval = 2.5
snapshot_nodes = 33

[output]
directory = "run"
formats = ["csv", "json"]
plot = true
"#;

fn cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fronts-lv"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FRONTS_LV_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn simulate_writes_a_deterministic_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.toml"), BASE).unwrap();

    let first = cli(&["simulate", "run.toml"], tmp.path());
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let second = cli(&["simulate", "run.toml", "--out", "again"], tmp.path());
    assert_eq!(code(&second), 0);
    assert_eq!(first.stdout, second.stdout);

    let a = read_tree(&tmp.path().join("run"));
    let b = read_tree(&tmp.path().join("again"));
    assert!(a.iter().any(|(n, _)| n == "fronts.svg"));
    assert!(a.iter().any(|(n, _)| n.ends_with("snapshot_0002.csv")));
    assert_eq!(a, b);

    let ts = fs::read_to_string(tmp.path().join("run/timeseries.csv")).unwrap();
    let mut lines = ts.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,g,h,gdot,hdot,umax,vmax,u_at_0,v_at_0,mass_u,mass_v"
    );
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 11);
    }
}

#[test]
fn classify_and_speeds_read_back_a_run() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.toml"), BASE).unwrap();
    assert_eq!(code(&cli(&["simulate", "run.toml"], tmp.path())), 0);

    let classify = cli(&["classify", "run"], tmp.path());
    assert_eq!(code(&classify), 0);
    let outcome: serde_json::Value = serde_json::from_slice(&classify.stdout).unwrap();
    let stored: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run/outcome.json")).unwrap()).unwrap();
    assert_eq!(outcome, stored["outcome"]);
    assert_eq!(outcome["prey"], "spreading");

    let speeds = cli(&["speeds", "run", "--frame-fraction", "0.5"], tmp.path());
    assert_eq!(code(&speeds), 0, "{}", stderr(&speeds));
    let report: serde_json::Value = serde_json::from_slice(&speeds.stdout).unwrap();
    assert!(report["speeds"]["prey_fit"]["slope"].as_f64().unwrap() > 0.0);
    assert_eq!(report["moving_frame"].as_array().unwrap().len(), 3);

    assert_eq!(code(&cli(&["classify", "missing"], tmp.path())), 3);
}

#[test]
fn plots_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.toml"), BASE).unwrap();
    assert_eq!(code(&cli(&["simulate", "run.toml"], tmp.path())), 0);
    for (kind, input) in [
        ("fronts", "run/timeseries.csv"),
        ("profile", "run/snapshots/snapshot_0001.csv"),
    ] {
        let a = cli(
            &["plot", input, "--kind", kind, "-o", "a.svg", "--config", "run.toml"],
            tmp.path(),
        );
        let b = cli(
            &["plot", input, "--kind", kind, "-o", "b.svg", "--config", "run.toml"],
            tmp.path(),
        );
        assert_eq!((code(&a), code(&b)), (0, 0), "{}", stderr(&a));
        let sa = fs::read(tmp.path().join("a.svg")).unwrap();
        assert!(sa.starts_with(b"<svg"));
        assert_eq!(sa, fs::read(tmp.path().join("b.svg")).unwrap());
    }
}

#[test]
fn semiwave_prints_the_speed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(&["semiwave", "--nu", "5", "--profile", "q.csv"], tmp.path());
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let k = v["k"].as_f64().unwrap();
    assert!(k > 0.0 && k < 2.0);
    let q = fs::read_to_string(tmp.path().join("q.csv")).unwrap();
    assert!(q.starts_with("y,q\n"));

    assert_eq!(code(&cli(&["semiwave", "--nu", "0"], tmp.path())), 2);
}

#[test]
fn invalid_configs_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("neg.toml"), BASE.replace("a = 2.0", "a = -2.0")).unwrap();
    let out = cli(&["simulate", "neg.toml"], tmp.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("model.a"), "{}", stderr(&out));

    fs::write(tmp.path().join("typo.toml"), BASE.replace("beta", "betta")).unwrap();
    let out = cli(&["simulate", "typo.toml"], tmp.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("betta"), "{}", stderr(&out));

    assert_eq!(code(&cli(&["simulate", "absent.toml"], tmp.path())), 2);
}

#[test]
fn invariant_breach_exits_with_4() {
    let tmp = tempfile::tempdir().unwrap();
    let text = BASE
        .replace("g0 = 2.0", "g0 = 20.0")
        .replace("snapshot_interval = 2.5", "dt = { kind = \"fixed\", dt = 1.0 }")
        + "\n[initial.prey]\nkind = \"cosine\"\namplitude = 1.9\n";
    fs::write(tmp.path().join("coarse.toml"), text).unwrap();
    let out = cli(&["simulate", "coarse.toml"], tmp.path());
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("invariant breach"));
}

#[test]
fn inconclusive_threshold_exits_with_5() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(
        &["gamma-star", "--rho0", "0.5", "--t-max", "0.001", "--t-cap", "0.002"],
        tmp.path(),
    );
    assert_eq!(code(&out), 5, "{}", stderr(&out));

    let out = cli(&["gamma-star", "--rho0", "3.0"], tmp.path());
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"]["kind"], "spreads_for_all_gamma");
}

const FLIP_BASE: &str = r#"
[model]
a = 2.0
b = 0.5
c = 0.5
d = 1.0
beta = 2.0
mu = 1.0
g0 = 1.0
h0 = 0.5

[solver]
ny = 64
nxi = 64
t_max = 40.0
record_interval = 0.5
"#;

#[test]
fn sweep_is_thread_independent_and_keeps_failed_rows() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("base.toml"), FLIP_BASE).unwrap();
    fs::write(
        tmp.path().join("sweep.toml"),
        "base = \"base.toml\"\n[[axes]]\nname = \"beta\"\nvalues = [1.0, 2.0]\n\
         [[axes]]\nname = \"mu\"\nvalues = [0.05, -1.0, 5.0]\n",
    )
    .unwrap();

    let one = cli(
        &["sweep", "sweep.toml", "--out", "one", "--threads", "1", "--plot"],
        tmp.path(),
    );
    assert_eq!(code(&one), 0, "{}", stderr(&one));
    let many = Command::new(env!("CARGO_BIN_EXE_fronts-lv"))
        .args(["sweep", "sweep.toml", "--out", "many", "--plot"])
        .current_dir(tmp.path())
        .env("FRONTS_LV_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&many), 0);
    assert_eq!(read_tree(&tmp.path().join("one")), read_tree(&tmp.path().join("many")));

    let table = fs::read_to_string(tmp.path().join("one/sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = table.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let mu: f64 = row[2].parse().unwrap();
        if mu < 0.0 {
            assert_eq!(row[3], "failed");
            assert!(row[10..].join(",").contains("model.mu"));
        } else {
            assert_eq!(row[3], "ok");
            assert_eq!(row[4], "spreading");
            // Small mu starves the predator; large mu lets it escape.
            assert_eq!(row[5], if mu < 1.0 { "vanishing" } else { "spreading" });
        }
    }

    let plot = cli(
        &["plot", "one/sweep.csv", "--kind", "phase", "-o", "phase.svg"],
        tmp.path(),
    );
    assert_eq!(code(&plot), 0, "{}", stderr(&plot));
    assert_eq!(
        fs::read(tmp.path().join("phase.svg")).unwrap(),
        fs::read(tmp.path().join("one/phase.svg")).unwrap()
    );
}

#[test]
fn bad_thread_override_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("base.toml"), FLIP_BASE).unwrap();
    fs::write(
        tmp.path().join("sweep.toml"),
        "base = \"base.toml\"\n[[axes]]\nname = \"mu\"\nvalues = [1.0]\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fronts-lv"))
        .args(["sweep", "sweep.toml"])
        .current_dir(tmp.path())
        .env("FRONTS_LV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn check_reports_predator_vanishing_below_the_threshold() {
    // mu is half the critical value for this predator habitat (about 0.6885).
    let tmp = tempfile::tempdir().unwrap();
    let h0 = 0.5 * std::f64::consts::FRAC_PI_2 * 0.5f64.sqrt();
    let config = format!(
        "[model]\na = 2.0\nb = 0.5\nc = 0.5\nd = 1.0\nbeta = 1.0\nmu = 0.3443\ng0 = 1.0\nh0 = {h0}\n\
         [initial.prey]\nkind = \"cosine\"\namplitude = 1.5\n"
    );
    fs::write(tmp.path().join("check.toml"), config).unwrap();
    let out = cli(&["check", "check.toml"], tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entry = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["id"] == "predator_vanishing")
        .unwrap();
    assert_eq!(entry["verdict"], "satisfied");
    assert_eq!(entry["prediction"], "h_inf finite");
}
