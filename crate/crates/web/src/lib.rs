//! Three interactive operations for the browser page in `www/`.
//!
//! The functions here are plain Rust so they can be tested natively. The
//! `wasm` module wraps them for JavaScript when built for `wasm32`.

use conserva::corrections::entropy::correct_element;
use conserva::harness::{run, Layout, RunConfig};
use conserva::recovery::{recover_fluxes, RecoveryProblem};
use conserva::schemes::{triangle_edge_fluxes, triangle_fv_residuals, PlanarModel, TriangleGeometry};
use conserva::{ElementGraph, Error, GraphKind, Model, Result, State};

#[cfg(target_arch = "wasm32")]
mod wasm;

/// Upper bound on the resolution the page may ask for.
pub const MAX_CELLS: usize = 4000;

/// Final profile of the first component together with the per-step ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub component: String,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// Exact values (or exact cell averages) at the same positions; empty
    /// when the case has no closed-form solution.
    pub exact: Vec<f64>,
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub entropy: Vec<f64>,
    pub steps: usize,
}

/// `cfl = None` takes the scheme's default.
pub fn simulate(case: &str, scheme: &str, nx: usize, cfl: Option<f64>, detector: bool) -> Result<Simulation> {
    if nx > MAX_CELLS {
        return Err(Error::Config(format!("at most {MAX_CELLS} cells, got {nx}")));
    }
    let cfg = RunConfig {
        case: case.parse()?,
        scheme: scheme.parse()?,
        nx,
        cfl,
        detector,
        ..RunConfig::default()
    };
    cfg.validate()?;
    let out = run(&cfg)?;
    let snap = out.record.final_snapshot();
    let t = snap.time;
    let exact: Result<Vec<f64>> = match out.layout {
        Layout::Nodal => out
            .record
            .positions
            .iter()
            .map(|&x| Ok(out.case.exact(x, t)?[0]))
            .collect(),
        Layout::Cells => out
            .mesh
            .nodes()
            .windows(2)
            .map(|w| Ok(out.case.average_of(w[0], w[1], |x| out.case.exact(x, t))?[0]))
            .collect(),
    };
    Ok(Simulation {
        component: out.record.component_names[0].clone(),
        x: out.record.positions.clone(),
        values: snap.values.iter().map(|u| u[0]).collect(),
        exact: exact.unwrap_or_default(),
        times: out.record.ledger.iter().map(|r| r.time).collect(),
        mass: out.record.ledger.iter().map(|r| r.totals[0]).collect(),
        entropy: out.record.ledger.iter().map(|r| r.entropy).collect(),
        steps: out.record.steps,
    })
}

/// Vertex residuals of one triangle, the fluxes recovered from them and the
/// Rusanov fluxes that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleFluxes {
    pub residuals: [f64; 3],
    /// Minimum-norm solution on the edges `0→1`, `1→2`, `2→0`.
    pub recovered: [f64; 3],
    pub direct: [f64; 3],
    /// The two flux sets differ by a constant around the cycle.
    pub circulation: f64,
    /// Largest deviation of `direct − recovered` from that constant.
    pub spread: f64,
}

pub fn planar_model(name: &str) -> Result<PlanarModel> {
    match name {
        "advection" => Ok(PlanarModel::Advection { velocity: [1.0, 0.5] }),
        "burgers" => Ok(PlanarModel::Burgers),
        other => Err(Error::Config(format!(
            "unknown planar model '{other}' (use advection or burgers)"
        ))),
    }
}

pub fn triangle_fluxes(vertices: [[f64; 2]; 3], states: [f64; 3], model: &str) -> Result<TriangleFluxes> {
    let model = planar_model(model)?;
    let geometry = TriangleGeometry::from_vertices(vertices)?;
    let element = triangle_fv_residuals(states, &geometry, &model);
    let graph = ElementGraph::new(GraphKind::Triangle)?;
    let fluxes = recover_fluxes(&graph, &RecoveryProblem::from_element(&element)?)?;
    let direct = triangle_edge_fluxes(states, &geometry, &model);
    let recovered: [f64; 3] = std::array::from_fn(|i| fluxes.values()[i][0]);
    let gaps: [f64; 3] = std::array::from_fn(|i| direct[i] - recovered[i]);
    let circulation = gaps.iter().sum::<f64>() / 3.0;
    Ok(TriangleFluxes {
        residuals: std::array::from_fn(|i| element.residuals[i][0]),
        recovered,
        direct,
        circulation,
        spread: gaps.iter().map(|g| (g - circulation).abs()).fold(0.0, f64::max),
    })
}

/// One Burgers cell `[u_l, u_r]` with the central flux, before and after
/// the entropy correction.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyStep {
    pub residuals: [f64; 2],
    pub corrected: [f64; 2],
    pub alpha: f64,
    pub pre_margin: f64,
    pub post_margin: f64,
}

pub fn entropy_step(u_left: f64, u_right: f64) -> Result<EntropyStep> {
    let model = Model::Burgers;
    let (ul, ur) = (State::scalar(u_left), State::scalar(u_right));
    let (fl, fr) = (model.flux(&ul)?, model.flux(&ur)?);
    let central = (fl + fr) * 0.5;
    let residuals = [central - fl, fr - central];
    let (el, er) = (model.entropy_pair(&ul)?, model.entropy_pair(&ur)?);
    let speed = model.max_wave_speed(&ul)?.max(model.max_wave_speed(&ur)?);
    let c = correct_element(0, &residuals, &[el.variables, er.variables], er.flux - el.flux, speed)?;
    Ok(EntropyStep {
        residuals: [residuals[0][0], residuals[1][0]],
        corrected: [
            residuals[0][0] + c.corrections[0][0],
            residuals[1][0] + c.corrections[1][0],
        ],
        alpha: c.alpha,
        pre_margin: c.pre_margin,
        post_margin: c.post_margin,
    })
}
