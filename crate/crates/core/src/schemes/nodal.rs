//! Node-based schemes on a 1D mesh: FV rewritten as residuals, SUPG, the
//! entropy-corrected central scheme and a deliberately non-conservative
//! Burgers discretisation used as a negative control.

use crate::corrections::entropy::{entropy_correction, CorrectionReport};
use crate::error::Result;
use crate::mesh::{Boundary, Mesh1D};
use crate::models::Model;
use crate::schemes::flux::{NumericalFlux, RusanovEntropyFlux};
use crate::schemes::residuals::{domain_boundary_flux, fv_residuals_1d, rd_step, supg_residuals_1d, ResidualSet};
use crate::schemes::time::{Semidiscrete, Snapshot, SubstepInfo};
use crate::state::{flatten, unflatten, State};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ResidualKind {
    Fv(NumericalFlux),
    Supg { tau_scale: f64 },
}

#[derive(Clone, Debug)]
pub struct NodalScheme {
    mesh: Mesh1D,
    model: Model,
    kind: ResidualKind,
    correct_entropy: bool,
    monitor_entropy: bool,
}

impl NodalScheme {
    pub fn new(mesh: Mesh1D, model: Model, kind: ResidualKind) -> Self {
        Self {
            mesh,
            model,
            kind,
            correct_entropy: false,
            monitor_entropy: false,
        }
    }

    /// Applies the per-element entropy correction before every update.
    pub fn with_entropy_correction(mut self, on: bool) -> Self {
        self.correct_entropy = on;
        self
    }

    /// Records the smallest element entropy margin of every substep.
    pub fn with_entropy_monitor(mut self, on: bool) -> Self {
        self.monitor_entropy = on;
        self
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn kind(&self) -> ResidualKind {
        self.kind
    }

    pub fn base_residuals(&self, states: &[State]) -> Result<ResidualSet> {
        match self.kind {
            ResidualKind::Fv(flux) => fv_residuals_1d(&self.mesh, states, flux, &self.model),
            ResidualKind::Supg { tau_scale } => supg_residuals_1d(&self.mesh, states, &self.model, tau_scale),
        }
    }

    /// Residuals actually used by the update, with the correction report
    /// when monitoring or correcting.
    pub fn residuals(&self, states: &[State]) -> Result<(ResidualSet, Option<CorrectionReport>)> {
        let base = self.base_residuals(states)?;
        if !(self.correct_entropy || self.monitor_entropy) {
            return Ok((base, None));
        }
        let (corrected, report) = entropy_correction(&base, states, &self.model, &RusanovEntropyFlux)?;
        if self.correct_entropy {
            Ok((corrected, Some(report)))
        } else {
            // report the uncorrected margins
            let mut report = report;
            for e in &mut report.elements {
                e.post_margin = e.pre_margin;
                e.alpha = 0.0;
            }
            Ok((base, Some(report)))
        }
    }
}

pub(crate) fn nodal_totals(mesh: &Mesh1D, states: &[State], components: usize) -> State {
    states
        .iter()
        .enumerate()
        .fold(State::zeros(components), |acc, (j, u)| acc + *u * mesh.volume(j))
}

pub(crate) fn nodal_entropy(mesh: &Mesh1D, states: &[State], model: &Model) -> Result<f64> {
    states
        .iter()
        .enumerate()
        .map(|(j, u)| Ok(mesh.volume(j) * model.entropy(u)?))
        .sum()
}

pub(crate) fn nodal_wave_speed(states: &[State], model: &Model) -> Result<f64> {
    states
        .iter()
        .map(|u| model.max_wave_speed(u))
        .try_fold(0.0_f64, |m, s| s.map(|s| m.max(s)))
}

fn names(model: &Model) -> Vec<String> {
    model.component_names().iter().map(|s| s.to_string()).collect()
}

impl Semidiscrete for NodalScheme {
    fn components(&self) -> usize {
        self.model.components()
    }

    fn euler_substep(&self, u: &[f64], dt: f64) -> Result<(Vec<f64>, SubstepInfo)> {
        let states = unflatten(u, self.components());
        let (set, report) = self.residuals(&states)?;
        let next = rd_step(&self.mesh, &states, &set, dt, &self.model)?;
        let mut info = SubstepInfo::new(domain_boundary_flux(&self.mesh, &states, &self.model)?);
        if let Some(report) = report {
            info.alpha_max = report.alpha_max();
            info.entropy_margin = Some(report.min_post_margin());
        }
        Ok((flatten(&next), info))
    }

    fn max_wave_speed(&self, u: &[f64]) -> Result<f64> {
        nodal_wave_speed(&unflatten(u, self.components()), &self.model)
    }

    fn min_width(&self) -> f64 {
        self.mesh.min_width()
    }

    fn totals(&self, u: &[f64]) -> Result<State> {
        Ok(nodal_totals(
            &self.mesh,
            &unflatten(u, self.components()),
            self.components(),
        ))
    }

    fn total_entropy(&self, u: &[f64]) -> Result<f64> {
        nodal_entropy(&self.mesh, &unflatten(u, self.components()), &self.model)
    }

    fn snapshot(&self, time: f64, u: &[f64]) -> Result<Snapshot> {
        Ok(Snapshot {
            time,
            values: unflatten(u, self.components()),
            points: None,
        })
    }

    fn positions(&self) -> Vec<f64> {
        self.mesh.dof_positions().to_vec()
    }

    fn component_names(&self) -> Vec<String> {
        names(&self.model)
    }
}

/// `du_i/dt = −u_i (u_{i+1} − u_{i−1})/(2h) + |u_i| (u_{i+1} − 2u_i + u_{i−1})/(2h)`:
/// upwinded differencing of the quasi-linear form `u_t + u u_x = 0`.
/// Stable, but it moves shocks at the wrong speed.
#[derive(Clone, Debug)]
pub struct NcBurgers {
    mesh: Mesh1D,
}

impl NcBurgers {
    pub fn new(mesh: Mesh1D) -> Self {
        Self { mesh }
    }
}

impl Semidiscrete for NcBurgers {
    fn components(&self) -> usize {
        1
    }

    fn euler_substep(&self, u: &[f64], dt: f64) -> Result<(Vec<f64>, SubstepInfo)> {
        let n = u.len();
        let periodic = self.mesh.boundary() == Boundary::Periodic;
        let at = |i: isize| -> f64 {
            if periodic {
                u[i.rem_euclid(n as isize) as usize]
            } else {
                u[i.clamp(0, n as isize - 1) as usize]
            }
        };
        let next = (0..n as isize)
            .map(|i| {
                let idx = i.clamp(0, n as isize - 1) as usize;
                let h = self.mesh.cell_width(idx.min(self.mesh.cell_count() - 1));
                let (l, c, r) = (at(i - 1), at(i), at(i + 1));
                c + dt * (-c * (r - l) / (2.0 * h) + c.abs() * (r - 2.0 * c + l) / (2.0 * h))
            })
            .collect();
        let flux = if periodic {
            0.0
        } else {
            0.5 * (u[n - 1] * u[n - 1] - u[0] * u[0])
        };
        Ok((next, SubstepInfo::new(State::scalar(flux))))
    }

    fn max_wave_speed(&self, u: &[f64]) -> Result<f64> {
        Ok(u.iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    fn min_width(&self) -> f64 {
        self.mesh.min_width()
    }

    fn totals(&self, u: &[f64]) -> Result<State> {
        Ok(nodal_totals(&self.mesh, &unflatten(u, 1), 1))
    }

    fn total_entropy(&self, u: &[f64]) -> Result<f64> {
        nodal_entropy(&self.mesh, &unflatten(u, 1), &Model::Burgers)
    }

    fn snapshot(&self, time: f64, u: &[f64]) -> Result<Snapshot> {
        Ok(Snapshot {
            time,
            values: unflatten(u, 1),
            points: None,
        })
    }

    fn positions(&self) -> Vec<f64> {
        self.mesh.dof_positions().to_vec()
    }

    fn component_names(&self) -> Vec<String> {
        names(&Model::Burgers)
    }
}
