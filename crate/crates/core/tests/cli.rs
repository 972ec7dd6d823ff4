use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn conserva(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_conserva"));
    cmd.args(args).env_remove("CONSERVA_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("CONSERVA_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn sod_run_writes_solution_and_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sod.csv");
    let res = conserva(
        &[
            "run",
            "--case",
            "sod",
            "--scheme",
            "fv-rusanov",
            "--nx",
            "1000",
            "--cfl",
            "0.4",
            "--tend",
            "0.2",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let solution = read(&out);
    assert!(!solution.contains('\r'));
    let lines: Vec<&str> = solution.lines().collect();
    assert_eq!(lines[0], "x,density,momentum,energy");
    assert_eq!(lines.len(), 1 + 1001);
    assert!(lines[1].starts_with("0,1,"), "{}", lines[1]);
    let ledger = read(&dir.path().join("sod_ledger.csv"));
    assert!(ledger.starts_with("step,time,mass,momentum,energy,entropy,alpha_max,fallback_cells\n0,0,"));
    let last = ledger.lines().last().unwrap();
    assert_eq!(last.split(',').nth(1).unwrap().parse::<f64>().unwrap(), 0.2);
}

#[test]
fn identical_configurations_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(format!("{name}.csv"));
        let res = conserva(
            &[
                "run",
                "--case",
                "burgers-sine",
                "--scheme",
                "active-flux",
                "--nx",
                "64",
                "--seed",
                "42",
                "--out",
                out.to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(res.status.code(), Some(0));
        outputs.push((
            fs::read(&out).unwrap(),
            fs::read(dir.path().join(format!("{name}_ledger.csv"))).unwrap(),
            fs::read(dir.path().join(format!("{name}_points.csv"))).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn unknown_case_is_a_usage_error() {
    let res = conserva(&["run", "--case", "unknown"], None);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("unknown case"), "{err}");
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn incompatible_scheme_is_a_usage_error() {
    let res = conserva(
        &["run", "--case", "burgers-sine", "--scheme", "nc-energy-corrected"],
        None,
    );
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn blow_up_is_a_run_failure() {
    // the bare central flux has no dissipation once the shock forms
    let dir = tempfile::tempdir().unwrap();
    let res = conserva(
        &[
            "run",
            "--case",
            "burgers-sine",
            "--scheme",
            "fv-central",
            "--nx",
            "100",
            "--tend",
            "2",
        ],
        Some(dir.path()),
    );
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("run failed at step"));
}

#[test]
fn convergence_table_reports_third_order_for_active_flux() {
    let dir = tempfile::tempdir().unwrap();
    let res = conserva(
        &[
            "convergence",
            "--case",
            "advection-sine",
            "--scheme",
            "active-flux",
            "--nx",
            "40,80,160",
        ],
        Some(dir.path()),
    );
    assert_eq!(res.status.code(), Some(0));
    let table = read(&dir.path().join("advection-sine_active-flux_40_convergence.txt"));
    assert_eq!(table, String::from_utf8(res.stdout).unwrap());
    let rows: Vec<Vec<&str>> = table.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][2], "");
    for r in &rows[1..] {
        assert!(r[2].parse::<f64>().unwrap() > 2.7, "{r:?}");
    }
}

#[test]
fn out_dir_variable_sets_the_default_location() {
    let dir = tempfile::tempdir().unwrap();
    let res = conserva(
        &["run", "--case", "advection-sine", "--nx", "20", "--tend", "0.1"],
        Some(dir.path()),
    );
    assert_eq!(res.status.code(), Some(0));
    assert!(dir.path().join("advection-sine_fv-rusanov_20.csv").exists());
    assert!(dir.path().join("advection-sine_fv-rusanov_20_ledger.csv").exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(&config, "case = burgers-riemann\nnx = 50\ntend = 0.1\n").unwrap();
    let res = conserva(
        &["run", "--config", config.to_str().unwrap(), "--nx", "20"],
        Some(dir.path()),
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let solution = read(&dir.path().join("burgers-riemann_fv-rusanov_20.csv"));
    // transmissive mesh with 20 cells has 21 DOFs
    assert_eq!(solution.lines().count(), 22);
}

#[test]
fn bad_config_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    fs::write(&config, "nx: 50\n").unwrap();
    let res = conserva(&["run", "--config", config.to_str().unwrap()], Some(dir.path()));
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn recover_fluxes_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fluxes.csv");
    let res = conserva(
        &[
            "recover-fluxes",
            "--case",
            "sod",
            "--scheme",
            "supg",
            "--nx",
            "10",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let text = read(&out);
    assert!(text.starts_with("cell,x_left,x_right,flux_density,flux_momentum,flux_energy\n"));
    assert_eq!(text.lines().count(), 11);
    let res = conserva(
        &["recover-fluxes", "--case", "sod", "--scheme", "active-flux"],
        Some(dir.path()),
    );
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn weak_diagnostic_shrinks_under_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let res = conserva(
        &[
            "diagnose-weak",
            "--case",
            "burgers-riemann",
            "--scheme",
            "fv-rusanov",
            "--nx",
            "50,100",
        ],
        Some(dir.path()),
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8(res.stdout).unwrap();
    let defects: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(defects[1] < defects[0], "{defects:?}");
}
