use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::cases::CaseId;
use crate::harness::config::{RunConfig, SchemeId};
use crate::harness::output::{format_g17, ledger_csv, points_csv, solution_csv, write_text};
use crate::harness::runner::{convergence, recover_fluxes_table, run};
use crate::harness::weak::{weak_residual_diagnostic, TestFunction};
use crate::mesh::Boundary;

pub const OUT_DIR_ENV: &str = "CONSERVA_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "conserva",
    version,
    about = "Conservative schemes for 1D hyperbolic conservation laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one case and write the final solution and the ledger as CSV.
    Run(CommonArgs),
    /// Run a case at several resolutions and tabulate L1 errors and orders.
    Convergence(CommonArgs),
    /// Dump the interface fluxes recovered from the element residuals of the initial data.
    RecoverFluxes(CommonArgs),
    /// Weak-form defect of the computed solution at each resolution.
    DiagnoseWeak(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, value_parser = parse_case)]
    case: Option<CaseId>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<SchemeId>,
    /// Cell count, or a comma-separated list for convergence and diagnose-weak.
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    tend: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_parser = parse_boundary)]
    boundary: Option<Boundary>,
    /// File of `key = value` lines; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; defaults to a name derived from the run inside $CONSERVA_OUT_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Adds a reproducible relative perturbation of 1e-3 to the initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// A posteriori detector for active flux (`--detector` alone means on).
    #[arg(long, num_args = 0..=1, default_missing_value = "on", value_parser = parse_switch)]
    detector: Option<bool>,
}

fn parse_case(s: &str) -> std::result::Result<CaseId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<SchemeId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_switch(s: &str) -> std::result::Result<bool, String> {
    match s {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        other => Err(format!("expected on or off, got '{other}'")),
    }
}

fn parse_resolutions(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid cell count '{p}'")))
        })
        .collect()
}

impl CommonArgs {
    /// Config file first, then flags. Returns the configuration and the
    /// resolutions named by `--nx`.
    fn resolve(&self) -> Result<(RunConfig, Vec<usize>)> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(c) = self.case {
            cfg.case = c;
        }
        if let Some(s) = self.scheme {
            cfg.scheme = s;
        }
        let resolutions = match &self.nx {
            Some(s) => parse_resolutions(s)?,
            None => vec![cfg.nx],
        };
        cfg.nx = resolutions[0];
        if let Some(v) = self.cfl {
            cfg.cfl = Some(v);
        }
        if let Some(v) = self.tend {
            cfg.t_end = Some(v);
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(b) = self.boundary {
            cfg.boundary = Some(b);
        }
        if let Some(p) = &self.out {
            cfg.out = Some(p.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(d) = self.detector {
            cfg.detector = d;
        }
        for &nx in &resolutions {
            RunConfig { nx, ..cfg.clone() }.validate()?;
        }
        Ok((cfg, resolutions))
    }
}

fn output_path(cfg: &RunConfig, suffix: &str) -> PathBuf {
    if let Some(p) = &cfg.out {
        return p.clone();
    }
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("{}_{}_{}{suffix}", cfg.case, cfg.scheme, cfg.nx))
}

/// `dir/stem<tag>.csv` next to `path`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("solution");
    path.with_file_name(format!("{stem}{tag}.csv"))
}

fn single_resolution(resolutions: &[usize]) -> Result<()> {
    if resolutions.len() != 1 {
        return Err(Error::Config("this subcommand takes a single --nx value".into()));
    }
    Ok(())
}

/// Printed after a failed run that is likely missing the detector.
fn detector_hint(cfg: &RunConfig) -> Option<&'static str> {
    (cfg.scheme == SchemeId::ActiveFlux && !cfg.detector)
        .then_some("active flux on discontinuous data usually needs --detector")
}

fn execute(command: Command, hint: &mut Option<&'static str>) -> Result<()> {
    match command {
        Command::Run(args) => {
            let (cfg, resolutions) = args.resolve()?;
            single_resolution(&resolutions)?;
            let path = output_path(&cfg, ".csv");
            *hint = detector_hint(&cfg);
            let out = run(&cfg)?;
            write_text(&path, &solution_csv(&out.record))?;
            write_text(&sibling(&path, "_ledger"), &ledger_csv(&out.record))?;
            if let Some(points) = points_csv(&out.record) {
                write_text(&sibling(&path, "_points"), &points)?;
            }
            let drift = out.record.conservation_drift();
            println!(
                "{} steps to t = {}; conservation drift {}",
                out.record.steps,
                format_g17(out.record.final_time()),
                format_g17(drift.norm_inf())
            );
            println!("wrote {}", path.display());
        }
        Command::Convergence(args) => {
            let (cfg, resolutions) = args.resolve()?;
            *hint = detector_hint(&cfg);
            let table = convergence(&cfg, &resolutions)?;
            let text = table.to_text();
            print!("{text}");
            write_text(&output_path(&cfg, "_convergence.txt"), &text)?;
        }
        Command::RecoverFluxes(args) => {
            let (cfg, resolutions) = args.resolve()?;
            single_resolution(&resolutions)?;
            let path = output_path(&cfg, "_fluxes.csv");
            write_text(&path, &recover_fluxes_table(&cfg)?)?;
            println!("wrote {}", path.display());
        }
        Command::DiagnoseWeak(args) => {
            let (cfg, resolutions) = args.resolve()?;
            *hint = detector_hint(&cfg);
            let mut text = String::from("nx,weak_defect\n");
            for &nx in &resolutions {
                let run_cfg = RunConfig {
                    nx,
                    snapshot_stride: 1,
                    ..cfg.clone()
                };
                let out = run(&run_cfg)?;
                let family = TestFunction::family(&out.case, out.record.final_time());
                let report = weak_residual_diagnostic(&out.record, &out.case.model, &family)?;
                text.push_str(&format!("{nx},{}\n", format_g17(report.max())));
            }
            print!("{text}");
            write_text(&output_path(&cfg, "_weak.csv"), &text)?;
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code: 0 on success, 2 on a usage error, 1 if the run fails.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            let rendered = e.render().to_string();
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return 2;
        }
    };
    let mut hint = None;
    match execute(cli.command, &mut hint) {
        Ok(()) => 0,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}\n");
            let _ = Cli::command().print_help();
            2
        }
        Err(e) => {
            let mut shown = e.to_string();
            eprintln!("error: {shown}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let text = s.to_string();
                if !shown.contains(&text) {
                    eprintln!("  caused by: {text}");
                    shown = text;
                }
                source = s.source();
            }
            if let Some(h) = hint {
                eprintln!("hint: {h}");
            }
            1
        }
    }
}
