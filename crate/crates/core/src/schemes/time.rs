//! Explicit method-of-lines driver. Every SSP Runge-Kutta scheme is written
//! as convex combinations of forward Euler substeps, so per-step corrections
//! and a-posteriori fallbacks live entirely inside
//! [`Semidiscrete::euler_substep`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeScheme {
    ForwardEuler,
    Ssprk2,
    Ssprk3,
}

impl TimeScheme {
    /// Default CFL number for this integrator.
    pub fn default_cfl(&self) -> f64 {
        match self {
            TimeScheme::ForwardEuler | TimeScheme::Ssprk2 => 0.4,
            TimeScheme::Ssprk3 => 0.8,
        }
    }
}

impl FromStr for TimeScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" | "forward-euler" => Ok(TimeScheme::ForwardEuler),
            "ssprk2" => Ok(TimeScheme::Ssprk2),
            "ssprk3" => Ok(TimeScheme::Ssprk3),
            other => Err(Error::Config(format!("unknown time scheme '{other}'"))),
        }
    }
}

impl fmt::Display for TimeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeScheme::ForwardEuler => "euler",
            TimeScheme::Ssprk2 => "ssprk2",
            TimeScheme::Ssprk3 => "ssprk3",
        })
    }
}

/// Diagnostics of one forward Euler substep.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstepInfo {
    /// Net rate at which conserved quantities leave the domain.
    pub boundary_flux: State,
    pub alpha_max: f64,
    pub fallback_cells: usize,
    /// Smallest per-element entropy production `Σ v·Φ − ∮ĝ`, when monitored.
    pub entropy_margin: Option<f64>,
}

impl SubstepInfo {
    pub fn new(boundary_flux: State) -> Self {
        Self {
            boundary_flux,
            alpha_max: 0.0,
            fallback_cells: 0,
            entropy_margin: None,
        }
    }
}

/// A spatial discretisation on a flat state buffer.
pub trait Semidiscrete {
    /// Number of conserved components.
    fn components(&self) -> usize;

    /// `u + Δt L(u)`, including any correction or fallback.
    fn euler_substep(&self, u: &[f64], dt: f64) -> Result<(Vec<f64>, SubstepInfo)>;

    fn max_wave_speed(&self, u: &[f64]) -> Result<f64>;

    fn min_width(&self) -> f64;

    /// Totals `Σ |C_σ| u_σ` of the conserved components.
    fn totals(&self, u: &[f64]) -> Result<State>;

    fn total_entropy(&self, u: &[f64]) -> Result<f64>;

    fn snapshot(&self, time: f64, u: &[f64]) -> Result<Snapshot>;

    fn positions(&self) -> Vec<f64>;

    fn point_positions(&self) -> Option<Vec<f64>> {
        None
    }

    fn component_names(&self) -> Vec<String>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    /// Conserved states at the DOFs (or cell averages for active flux).
    pub values: Vec<State>,
    /// Point values in conserved variables, for schemes that carry them.
    pub points: Option<Vec<State>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub step: usize,
    pub time: f64,
    pub totals: State,
    pub entropy: f64,
    pub alpha_max: f64,
    pub fallback_cells: usize,
    /// Accumulated `∫ (net boundary outflow) dt` since the start.
    pub boundary_outflow: State,
    pub entropy_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord {
    pub component_names: Vec<String>,
    pub positions: Vec<f64>,
    pub point_positions: Option<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    /// One row for the initial data plus one per step.
    pub ledger: Vec<LedgerRow>,
    pub steps: usize,
}

impl SolutionRecord {
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("record without snapshots")
    }

    pub fn final_time(&self) -> f64 {
        self.final_snapshot().time
    }

    /// Largest `|Δ totals + boundary outflow|` over the run, per component.
    pub fn conservation_drift(&self) -> State {
        let first = &self.ledger[0];
        let mut drift = State::zeros(first.totals.len());
        for row in &self.ledger {
            let d = (row.totals - first.totals) + (row.boundary_outflow - first.boundary_outflow);
            drift = drift.zip_with(&d, |a, b| a.max(b.abs()));
        }
        drift
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrateOptions {
    pub scheme: TimeScheme,
    pub cfl: f64,
    pub t_end: f64,
    /// Stop after this many steps even if `t_end` is not reached.
    pub max_steps: Option<usize>,
    /// Keep every `stride`-th step as a snapshot; `0` keeps only the initial
    /// and final states.
    pub snapshot_stride: usize,
    pub max_retries: usize,
}

impl IntegrateOptions {
    pub fn new(scheme: TimeScheme, cfl: f64, t_end: f64) -> Self {
        Self {
            scheme,
            cfl,
            t_end,
            max_steps: None,
            snapshot_stride: 0,
            max_retries: 3,
        }
    }
}

struct Stage {
    u: Vec<f64>,
    outflow: State,
}

fn combine(a: f64, x: &Stage, b: f64, y: &Stage) -> Stage {
    Stage {
        u: x.u.iter().zip(&y.u).map(|(p, q)| a * p + b * q).collect(),
        outflow: x.outflow * a + y.outflow * b,
    }
}

fn merge(into: &mut SubstepInfo, info: SubstepInfo) {
    into.alpha_max = into.alpha_max.max(info.alpha_max);
    into.fallback_cells += info.fallback_cells;
    into.entropy_margin = match (into.entropy_margin, info.entropy_margin) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
}

fn euler_stage(disc: &dyn Semidiscrete, s: &Stage, dt: f64, acc: &mut SubstepInfo) -> Result<Stage> {
    let (u, info) = disc.euler_substep(&s.u, dt)?;
    let outflow = s.outflow + info.boundary_flux * dt;
    merge(acc, info);
    Ok(Stage { u, outflow })
}

fn step(disc: &dyn Semidiscrete, scheme: TimeScheme, s0: &Stage, dt: f64) -> Result<(Stage, SubstepInfo)> {
    let mut acc = SubstepInfo::new(State::zeros(disc.components()));
    let next = match scheme {
        TimeScheme::ForwardEuler => euler_stage(disc, s0, dt, &mut acc)?,
        TimeScheme::Ssprk2 => {
            let s1 = euler_stage(disc, s0, dt, &mut acc)?;
            let e1 = euler_stage(disc, &s1, dt, &mut acc)?;
            combine(0.5, s0, 0.5, &e1)
        }
        TimeScheme::Ssprk3 => {
            let s1 = euler_stage(disc, s0, dt, &mut acc)?;
            let e1 = euler_stage(disc, &s1, dt, &mut acc)?;
            let s2 = combine(0.75, s0, 0.25, &e1);
            let e2 = euler_stage(disc, &s2, dt, &mut acc)?;
            combine(1.0 / 3.0, s0, 2.0 / 3.0, &e2)
        }
    };
    Ok((next, acc))
}

fn ledger_row(disc: &dyn Semidiscrete, step: usize, time: f64, s: &Stage, info: &SubstepInfo) -> Result<LedgerRow> {
    Ok(LedgerRow {
        step,
        time,
        totals: disc.totals(&s.u)?,
        entropy: disc.total_entropy(&s.u)?,
        alpha_max: info.alpha_max,
        fallback_cells: info.fallback_cells,
        boundary_outflow: s.outflow,
        entropy_margin: info.entropy_margin,
    })
}

/// Advances `u0` to `t_end` with `Δt = CFL · min width / max wave speed`.
/// A failed step is retried with halved `Δt` up to `max_retries` times.
pub fn integrate(disc: &dyn Semidiscrete, u0: Vec<f64>, opts: &IntegrateOptions) -> Result<SolutionRecord> {
    if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(Error::Config(format!("CFL must lie in (0, 1], got {}", opts.cfl)));
    }
    if !(opts.t_end >= 0.0) {
        return Err(Error::Config(format!(
            "end time must be nonnegative, got {}",
            opts.t_end
        )));
    }
    let mut stage = Stage {
        u: u0,
        outflow: State::zeros(disc.components()),
    };
    let mut time = 0.0;
    let mut steps = 0;
    let initial_info = SubstepInfo::new(State::zeros(disc.components()));
    let mut ledger = vec![ledger_row(disc, 0, time, &stage, &initial_info)?];
    let mut snapshots = vec![disc.snapshot(time, &stage.u)?];
    let remaining_eps = 1e-14 * opts.t_end.max(1.0);

    while opts.t_end - time > remaining_eps && opts.max_steps.is_none_or(|m| steps < m) {
        let speed = disc.max_wave_speed(&stage.u).map_err(|e| Error::Run {
            step: steps + 1,
            source: Box::new(e),
        })?;
        let remaining = opts.t_end - time;
        let mut dt = if speed > 1e-300 {
            (opts.cfl * disc.min_width() / speed).min(remaining)
        } else {
            remaining
        };
        let mut attempt = 0;
        let (next, info) = loop {
            match step(disc, opts.scheme, &stage, dt) {
                Ok(ok) if ok.0.u.iter().all(|v| v.is_finite()) => break ok,
                Ok(_) if attempt < opts.max_retries => {}
                Err(e) if attempt >= opts.max_retries => {
                    return Err(Error::Run {
                        step: steps + 1,
                        source: Box::new(e),
                    })
                }
                Ok(_) => {
                    return Err(Error::Run {
                        step: steps + 1,
                        source: Box::new(Error::Diagnostic("non-finite state".into())),
                    })
                }
                Err(_) => {}
            }
            attempt += 1;
            dt *= 0.5;
            log::warn!("step {} rejected, retrying with dt = {dt:e}", steps + 1);
        };
        stage = next;
        time += dt;
        steps += 1;
        ledger.push(ledger_row(disc, steps, time, &stage, &info).map_err(|e| Error::Run {
            step: steps,
            source: Box::new(e),
        })?);
        let done = opts.t_end - time <= remaining_eps || opts.max_steps.is_some_and(|m| steps >= m);
        if done || (opts.snapshot_stride > 0 && steps % opts.snapshot_stride == 0) {
            snapshots.push(disc.snapshot(time, &stage.u)?);
        }
    }
    if snapshots.len() == 1 && steps > 0 {
        snapshots.push(disc.snapshot(time, &stage.u)?);
    }

    Ok(SolutionRecord {
        component_names: disc.component_names(),
        positions: disc.positions(),
        point_positions: disc.point_positions(),
        snapshots,
        ledger,
        steps,
    })
}
