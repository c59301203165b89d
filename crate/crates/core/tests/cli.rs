use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dicke-reset"));
    // keep the caller's environment from leaking into flag resolution
    for (k, _) in std::env::vars() {
        if k.starts_with("DICKE_RESET_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn first_line(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

fn dir_str(d: &Path) -> &str {
    d.to_str().unwrap()
}

#[test]
fn simulate_quench_writes_outputs() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "simulate",
        "-N",
        "1",
        "--protocol",
        "quench",
        "--out",
        dir_str(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&tmp.path().join("summary.json"));
    assert!((summary["epsilon_final"].as_f64().unwrap() - 0.353944).abs() < 1e-6);
    assert_eq!(summary["metadata"]["schema_version"], 1);
    assert_eq!(
        first_line(&tmp.path().join("trajectory.csv")),
        "t,epsilon,zeta,heat_acc,ep_acc,activity_integral"
    );
}

#[test]
fn emit_states_adds_population_columns() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "simulate",
        "-N",
        "3",
        "--emit-states",
        "--samples",
        "5",
        "--out",
        dir_str(tmp.path()),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,p_0,p_1,p_2,p_3,epsilon,zeta,heat_acc,ep_acc,activity_integral"
    );
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let out = run(&[
            "simulate",
            "-N",
            "12",
            "--protocol",
            "exponential",
            "--emit-states",
            "--out",
            dir_str(d.path()),
        ]);
        assert_eq!(code(&out), 0);
    }
    for f in ["trajectory.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn environment_overrides_defaults_and_flags_override_environment() {
    let tmp = TempDir::new().unwrap();
    let out = bin()
        .args(["simulate", "--out", dir_str(tmp.path())])
        .env("DICKE_RESET_N", "5")
        .env("DICKE_RESET_BETA", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let s = json(&tmp.path().join("summary.json"));
    assert_eq!(s["metadata"]["params"]["n_qubits"], 5);
    assert_eq!(s["metadata"]["params"]["beta"], 2.0);

    let out = bin()
        .args(["simulate", "-N", "2", "--out", dir_str(tmp.path())])
        .env("DICKE_RESET_N", "5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(
        json(&tmp.path().join("summary.json"))["metadata"]["params"]["n_qubits"],
        2
    );
}

#[test]
fn config_file_drives_simulate() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    let out_dir = tmp.path().join("results");
    fs::write(
        &cfg,
        format!(
            "schema_version = 1\n\
             [params]\nn_qubits = 4\n\
             [protocol]\nkind = \"linear\"\nrate_coeff = 2.0\n\
             [integrator]\nsamples = 11\n\
             [output]\npath = {:?}\nemit_states = true\n",
            out_dir
        ),
    )
    .unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&out_dir.join("summary.json"));
    assert_eq!(s["metadata"]["protocol"]["kind"], "linear");
    assert_eq!(s["metadata"]["protocol"]["rate_coeff"], 2.0);
    assert_eq!(s["metadata"]["samples"], 11);
    assert!(first_line(&out_dir.join("trajectory.csv")).contains("p_4"));
}

#[test]
fn configuration_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let d = dir_str(tmp.path());
    assert_eq!(code(&run(&["simulate", "--tau", "0", "--out", d])), 2);
    assert_eq!(
        code(&run(&["simulate", "--protocol", "sawtooth", "--out", d])),
        2
    );
    assert_eq!(code(&run(&["simulate", "-N", "0", "--out", d])), 2);

    let cfg = tmp.path().join("bad.toml");
    fs::write(
        &cfg,
        "schema_version = 1\n[protocol]\nkind = \"sawtooth\"\n",
    )
    .unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", d]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sawtooth"));

    fs::write(&cfg, "[params]\nn_qubits = 2\n").unwrap();
    assert_eq!(
        code(&run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            d
        ])),
        2
    );
    assert_eq!(code(&run(&["oracle-check", "-N", "9", "--out", d])), 2);
    assert_eq!(code(&run(&["quasistatic", "--tau", "3", "--out", d])), 2);
}

#[test]
fn integration_failure_exits_3_and_keeps_partial_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("tight.toml");
    fs::write(
        &cfg,
        "schema_version = 1\n[params]\nn_qubits = 64\n[integrator]\nmax_steps = 4\n",
    )
    .unwrap();
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir_str(tmp.path()),
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("integration failed"));
    assert!(tmp.path().join("trajectory.partial.csv").exists());
    assert!(!tmp.path().join("summary.json").exists());
}

#[test]
fn bounds_on_idle_run_marks_reset_factor_not_applicable() {
    let tmp = TempDir::new().unwrap();
    let d = dir_str(tmp.path());
    assert_eq!(
        code(&run(&[
            "simulate",
            "-N",
            "3",
            "--protocol",
            "idle",
            "--out",
            d
        ])),
        0
    );
    let out = run(&["bounds", "--from", d]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let csv = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "name,N,protocol,lhs,rhs,margin,satisfied"
    );
    let rf = csv
        .lines()
        .find(|l| l.starts_with("reset_factor,"))
        .unwrap();
    assert!(rf.ends_with(",n/a"), "{rf}");
}

#[test]
fn bounds_from_saved_run_and_tampered_summary() {
    let tmp = TempDir::new().unwrap();
    let d = dir_str(tmp.path());
    assert_eq!(
        code(&run(&[
            "simulate",
            "-N",
            "8",
            "--protocol",
            "linear",
            "--out",
            d
        ])),
        0
    );
    assert_eq!(code(&run(&["bounds", "--from", d])), 0);

    // an activity far above its ceiling must be reported as a breach
    let path = tmp.path().join("summary.json");
    let mut s = json(&path);
    s["avg_activity"] = serde_json::json!(1e6);
    fs::write(&path, serde_json::to_string(&s).unwrap()).unwrap();
    let out = run(&["bounds", "--from", d]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("FAIL activity"));
}

#[test]
fn bounds_matrix_passes() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["bounds", "--matrix", "--out", dir_str(tmp.path())]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let csv = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 21 * 7);
    assert!(!csv
        .lines()
        .any(|l| l.starts_with("speed_limit") && l.ends_with(",false")));
}

#[test]
fn oracle_check_n4_quench() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "oracle-check",
        "-N",
        "4",
        "--protocol",
        "quench",
        "--out",
        dir_str(tmp.path()),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let dev: f64 = text
        .split("max population deviation = ")
        .nth(1)
        .and_then(|r| r.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .unwrap();
    assert!(dev <= 1e-6);
    assert_eq!(
        first_line(&tmp.path().join("oracle.csv")),
        "N,protocol,max_population_deviation,heat_deviation,max_leakage"
    );
}

#[test]
fn sweep_figure_2_writes_only_its_tables() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "sweep",
        "--figure",
        "2",
        "--n-max",
        "16",
        "--out",
        dir_str(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(
        first_line(&tmp.path().join("fig2a.csv")),
        "N,protocol,epsilon"
    );
    assert_eq!(
        first_line(&tmp.path().join("fig2b.csv")),
        "N,protocol,heat_per_qubit,landauer_per_qubit"
    );
    assert!(!tmp.path().join("fig3.csv").exists());
    let rows = fs::read_to_string(tmp.path().join("fig2a.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 3 * 5);
    assert!(rows.contains("\n1,quench,0.353943122"));
}

#[test]
fn sweep_spec_file() {
    let tmp = TempDir::new().unwrap();
    let spec = tmp.path().join("sweep.toml");
    fs::write(
        &spec,
        "schema_version = 1\nn_values = [2, 6]\n[params]\nbeta = 2.0\n\
         [[protocols]]\nkind = \"quench\"\nomega = 1.5\n\
         [[protocols]]\nkind = \"exponential\"\n",
    )
    .unwrap();
    let out = run(&[
        "sweep",
        "--figure",
        "3",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        dir_str(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let fig3 = fs::read_to_string(tmp.path().join("fig3.csv")).unwrap();
    let lines: Vec<&str> = fig3.lines().collect();
    assert_eq!(lines[0], "N,protocol,F,bound_N,bound_1");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("2,quench,"));
    assert!(
        lines[1].ends_with(",0.5"),
        "bound_1 = 1 / (beta gamma0) = 0.5: {}",
        lines[1]
    );
    assert!(lines[4].starts_with("6,exponential,"));
}

#[test]
fn protocol_files() {
    let tmp = TempDir::new().unwrap();
    let d = dir_str(tmp.path());
    let csv = tmp.path().join("ramp.csv");
    fs::write(&csv, "t,omega\n0,0\n0.5,2\n1,2\n").unwrap();
    let arg = format!("file={}", csv.display());
    assert_eq!(
        code(&run(&[
            "simulate",
            "-N",
            "4",
            "--protocol",
            &arg,
            "--out",
            d
        ])),
        0
    );
    let s = json(&tmp.path().join("summary.json"));
    assert_eq!(s["metadata"]["protocol"]["kind"], "tabulated");

    let toml = tmp.path().join("ramp.toml");
    fs::write(
        &toml,
        "schema_version = 1\n[protocol]\nkind = \"quench\"\nomega = 3.0\n",
    )
    .unwrap();
    let arg = format!("file={}", toml.display());
    assert_eq!(code(&run(&["simulate", "--protocol", &arg, "--out", d])), 0);
    assert_eq!(
        json(&tmp.path().join("summary.json"))["metadata"]["protocol"]["omega"],
        3.0
    );

    // schedule that does not span [0, tau]
    fs::write(&csv, "t,omega\n0,0\n0.5,2\n").unwrap();
    let arg = format!("file={}", csv.display());
    assert_eq!(code(&run(&["simulate", "--protocol", &arg, "--out", d])), 2);
}

#[test]
fn quasistatic_table() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "quasistatic",
        "-N",
        "2",
        "--taus",
        "10,1000",
        "--out",
        dir_str(tmp.path()),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(tmp.path().join("quasistatic.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "tau,heat_total,landauer,relative_excess,epsilon_final,perfect_reset"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("1000,1.10"));
}

#[test]
fn help_lists_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for sub in [
        "simulate",
        "sweep",
        "bounds",
        "oracle-check",
        "quasistatic",
        "Exit codes",
    ] {
        assert!(text.contains(sub), "{sub}");
    }
}
