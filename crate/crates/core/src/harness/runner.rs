//! Builds a discretisation from a [`RunConfig`], runs it and measures it.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::active_flux::{ActiveFlux, AfState, Detector};
use crate::corrections::energy::NcEnergyScheme;
use crate::error::{Error, Result};
use crate::harness::cases::Case;
use crate::harness::config::{RunConfig, SchemeId};
use crate::harness::output::format_g17;
use crate::mesh::Mesh1D;
use crate::recovery::reconstruct_scheme;
use crate::schemes::flux::NumericalFlux;
use crate::schemes::nodal::{NcBurgers, NodalScheme, ResidualKind};
use crate::schemes::time::{integrate, IntegrateOptions, Semidiscrete, SolutionRecord};
use crate::state::{flatten, State};

/// Size of the relative perturbation added to the initial data by `--seed`.
pub const SEED_PERTURBATION: f64 = 1e-3;

/// Where the values of a solution live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Point values at the nodes, weighted by the dual volumes.
    Nodal,
    /// Cell averages.
    Cells,
}

pub struct Prepared {
    pub case: Case,
    pub mesh: Mesh1D,
    pub layout: Layout,
    pub disc: Box<dyn Semidiscrete + Send + Sync>,
    pub u0: Vec<f64>,
}

fn perturb(states: &mut [State], rng: &mut ChaCha8Rng) {
    for u in states {
        let r: f64 = rng.gen_range(-1.0..1.0);
        // scaling the whole state keeps Euler data admissible
        *u = *u * (1.0 + SEED_PERTURBATION * r);
    }
}

fn nodal(mesh: &Mesh1D, case: &Case, kind: ResidualKind) -> NodalScheme {
    NodalScheme::new(mesh.clone(), case.model, kind)
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    config.validate()?;
    let case = Case::with_sod_domain(config.case, config.gamma, config.sod_domain)?;
    let mesh = case.mesh(config.nx, config.boundary)?;
    let mut rng = config.seed.map(ChaCha8Rng::seed_from_u64);

    if config.scheme == SchemeId::ActiveFlux {
        let mut averages = case.cell_initial(&mesh)?;
        let mut points = case.point_initial(&mesh);
        if let Some(rng) = rng.as_mut() {
            perturb(&mut averages, rng);
            perturb(&mut points, rng);
        }
        let af = AfState::from_conserved(&case.model, averages, &points)?;
        let disc = ActiveFlux::new(mesh.clone(), case.model, config.detector.then(Detector::default));
        return Ok(Prepared {
            case,
            mesh,
            layout: Layout::Cells,
            disc: Box::new(disc),
            u0: af.to_flat(),
        });
    }

    let mut states = case.nodal_initial(&mesh)?;
    if let Some(rng) = rng.as_mut() {
        perturb(&mut states, rng);
    }
    let scalar = case.model.is_scalar();
    let disc: Box<dyn Semidiscrete + Send + Sync> = match config.scheme {
        SchemeId::FvRusanov => Box::new(nodal(&mesh, &case, ResidualKind::Fv(NumericalFlux::Rusanov))),
        SchemeId::FvCentral => {
            Box::new(nodal(&mesh, &case, ResidualKind::Fv(NumericalFlux::Central)).with_entropy_monitor(scalar))
        }
        SchemeId::Supg => Box::new(nodal(
            &mesh,
            &case,
            ResidualKind::Supg {
                tau_scale: config.supg_tau,
            },
        )),
        SchemeId::FvEntropyCorrected => Box::new(
            nodal(&mesh, &case, ResidualKind::Fv(NumericalFlux::Central))
                .with_entropy_correction(config.correct)
                .with_entropy_monitor(true),
        ),
        SchemeId::NcEnergyCorrected => Box::new(NcEnergyScheme::new(mesh.clone(), config.gamma, config.correct)?),
        SchemeId::NcBurgers => Box::new(NcBurgers::new(mesh.clone())),
        SchemeId::ActiveFlux => unreachable!("handled above"),
    };
    Ok(Prepared {
        case,
        mesh,
        layout: Layout::Nodal,
        disc,
        u0: flatten(&states),
    })
}

pub struct RunOutput {
    pub config: RunConfig,
    pub case: Case,
    pub mesh: Mesh1D,
    pub layout: Layout,
    pub record: SolutionRecord,
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let prepared = prepare(config)?;
    let t_end = config.t_end.unwrap_or(prepared.case.t_end);
    let mut opts = IntegrateOptions::new(config.time_scheme, config.cfl(), t_end);
    opts.snapshot_stride = config.snapshot_stride;
    opts.max_steps = config.max_steps;
    log::info!(
        "running {} with {} on {} cells to t = {t_end}",
        config.case,
        config.scheme,
        config.nx
    );
    let record = integrate(prepared.disc.as_ref(), prepared.u0, &opts)?;
    Ok(RunOutput {
        config: config.clone(),
        case: prepared.case,
        mesh: prepared.mesh,
        layout: prepared.layout,
        record,
    })
}

impl RunOutput {
    /// Weighted L1 distance of component `comp` to the exact solution at the
    /// final time: point values against exact values for nodal layouts,
    /// averages against exact averages for cell layouts.
    pub fn l1_error(&self, comp: usize) -> Result<f64> {
        let snap = self.record.final_snapshot();
        let t = snap.time;
        match self.layout {
            Layout::Nodal => self
                .mesh
                .dof_positions()
                .iter()
                .zip(&snap.values)
                .enumerate()
                .map(|(j, (&x, u))| Ok(self.mesh.volume(j) * (u[comp] - self.case.exact(x, t)?[comp]).abs()))
                .sum(),
            Layout::Cells => (0..self.mesh.cell_count())
                .map(|k| {
                    let (a, b) = (self.mesh.nodes()[k], self.mesh.nodes()[k + 1]);
                    let exact = self.case.average_of(a, b, |x| self.case.exact(x, t))?;
                    Ok((b - a) * (snap.values[k][comp] - exact[comp]).abs())
                })
                .sum(),
        }
    }

    /// Final values of component `comp` as a piecewise-linear function
    /// through the DOF positions (cell centers for cell layouts).
    pub fn sample(&self, comp: usize, x: f64) -> f64 {
        let pos = &self.record.positions;
        let vals: Vec<f64> = self.record.final_snapshot().values.iter().map(|u| u[comp]).collect();
        let i = pos.partition_point(|p| *p <= x);
        if i == 0 {
            return vals[0];
        }
        if i >= pos.len() {
            return vals[pos.len() - 1];
        }
        let s = (x - pos[i - 1]) / (pos[i] - pos[i - 1]);
        vals[i - 1] * (1.0 - s) + vals[i] * s
    }

    /// L1 distance to a finer run of the same layout. Cell layouts compare
    /// against fine averages aggregated onto the coarse cells, nodal layouts
    /// against the fine solution interpolated at the coarse nodes.
    pub fn l1_distance_to(&self, fine: &RunOutput, comp: usize) -> Result<f64> {
        if self.layout != fine.layout {
            return Err(Error::Config("runs with different layouts cannot be compared".into()));
        }
        let coarse = self.record.final_snapshot();
        match self.layout {
            Layout::Cells => {
                let (nc, nf) = (self.mesh.cell_count(), fine.mesh.cell_count());
                if nf % nc != 0 {
                    return Err(Error::Config(format!("{nf} cells do not refine {nc} cells")));
                }
                let ratio = nf / nc;
                let fine_vals = &fine.record.final_snapshot().values;
                Ok((0..nc)
                    .map(|k| {
                        let mean = fine_vals[k * ratio..(k + 1) * ratio]
                            .iter()
                            .map(|u| u[comp])
                            .sum::<f64>()
                            / ratio as f64;
                        self.mesh.cell_width(k) * (coarse.values[k][comp] - mean).abs()
                    })
                    .sum())
            }
            Layout::Nodal => Ok(self
                .mesh
                .dof_positions()
                .iter()
                .zip(&coarse.values)
                .enumerate()
                .map(|(j, (&x, u))| self.mesh.volume(j) * (u[comp] - fine.sample(comp, x)).abs())
                .sum()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub error: f64,
    /// `log(e_prev/e)/log(n/n_prev)`; absent on the coarsest row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn from_errors(errors: &[(usize, f64)]) -> Self {
        let rows = errors
            .iter()
            .enumerate()
            .map(|(i, &(nx, error))| ConvergenceRow {
                nx,
                error,
                order: (i > 0).then(|| {
                    let (n0, e0) = errors[i - 1];
                    (e0 / error).ln() / (nx as f64 / n0 as f64).ln()
                }),
            })
            .collect();
        Self { rows }
    }

    pub fn min_order(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.order).reduce(f64::min)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("nx,l1_error,order\n");
        for r in &self.rows {
            let order = r.order.map(format_g17).unwrap_or_default();
            let _ = writeln!(out, "{},{},{}", r.nx, format_g17(r.error), order);
        }
        out
    }
}

/// Runs `config` at every resolution (in parallel) and tabulates the L1
/// error of the first component against the exact solution.
pub fn convergence(config: &RunConfig, resolutions: &[usize]) -> Result<ConvergenceTable> {
    if resolutions.is_empty() {
        return Err(Error::Config("no resolutions given".into()));
    }
    let errors: Vec<Result<(usize, f64)>> = std::thread::scope(|s| {
        let handles: Vec<_> = resolutions
            .iter()
            .map(|&nx| {
                let cfg = RunConfig { nx, ..config.clone() };
                s.spawn(move || run(&cfg).and_then(|out| Ok((nx, out.l1_error(0)?))))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect()
    });
    let errors = errors.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_errors(&errors))
}

/// Recovered interface fluxes of the residuals evaluated on the initial
/// data, as CSV rows `cell,x_left,x_right,<flux components>`.
pub fn recover_fluxes_table(config: &RunConfig) -> Result<String> {
    let residual_kind = match config.scheme {
        SchemeId::FvRusanov => ResidualKind::Fv(NumericalFlux::Rusanov),
        SchemeId::FvCentral | SchemeId::FvEntropyCorrected => ResidualKind::Fv(NumericalFlux::Central),
        SchemeId::Supg => ResidualKind::Supg {
            tau_scale: config.supg_tau,
        },
        other => {
            return Err(Error::Config(format!(
                "scheme {other} has no element residuals to recover fluxes from"
            )))
        }
    };
    let prepared = prepare(config)?;
    let scheme = NodalScheme::new(prepared.mesh.clone(), prepared.case.model, residual_kind)
        .with_entropy_correction(config.scheme == SchemeId::FvEntropyCorrected && config.correct);
    let states = crate::state::unflatten(&prepared.u0, prepared.case.model.components());
    let (residuals, _) = scheme.residuals(&states)?;
    let form = reconstruct_scheme(&prepared.mesh, &residuals)?;
    let names: Vec<String> = prepared
        .case
        .model
        .component_names()
        .iter()
        .map(|n| format!("flux_{n}"))
        .collect();
    let mut out = format!("cell,x_left,x_right,{}\n", names.join(","));
    for (k, f) in form.interface_fluxes.iter().enumerate() {
        let nodes = prepared.mesh.nodes();
        let values: Vec<String> = f.iter().map(|v| format_g17(*v)).collect();
        let _ = writeln!(
            out,
            "{k},{},{},{}",
            format_g17(nodes[k]),
            format_g17(nodes[k + 1]),
            values.join(",")
        );
    }
    Ok(out)
}
