//! Active flux: cell averages of the conserved variables evolve in flux
//! form from point values at the nodes; the point values, stored in
//! auxiliary variables, evolve by an upwind split of the quasi-linear
//! system. Simpson's rule ties a cell average to its two node values and
//! the cell's mid value.

use crate::error::{Error, Result};
use crate::mesh::{Boundary, Mesh1D};
use crate::models::Model;
use crate::schemes::flux::NumericalFlux;
use crate::schemes::time::{Semidiscrete, Snapshot, SubstepInfo};
use crate::state::{flatten, unflatten, State};

/// Cell averages (conserved) and node values (auxiliary variables).
#[derive(Clone, Debug, PartialEq)]
pub struct AfState {
    pub averages: Vec<State>,
    pub points: Vec<State>,
}

impl AfState {
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = flatten(&self.averages);
        out.extend(flatten(&self.points));
        out
    }

    pub fn from_flat(buf: &[f64], cells: usize, components: usize) -> Self {
        let (a, p) = buf.split_at(cells * components);
        Self {
            averages: unflatten(a, components),
            points: unflatten(p, components),
        }
    }

    /// Builds a consistent state from conserved point values at the nodes
    /// and the exact cell averages.
    pub fn from_conserved(model: &Model, averages: Vec<State>, node_values: &[State]) -> Result<Self> {
        let points = node_values
            .iter()
            .map(|u| model.to_aux(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { averages, points })
    }
}

/// Mid value `v_{i+1/2}` from `ū = (u_i + 4 u_{i+1/2} + u_{i+1})/6` with
/// `u = ψ⁻¹(v)`. The relation is linear in `u_{i+1/2}`, so the solve is
/// explicit: `u_{i+1/2} = (6ū − u_i − u_{i+1})/4`.
pub fn recover_midpoint(cell: usize, average: &State, left: &State, right: &State, model: &Model) -> Result<State> {
    let to_u = |v: &State| {
        model.from_aux(v).map_err(|e| Error::Recovery {
            cell,
            reason: e.to_string(),
        })
    };
    let mid = (*average * 6.0 - to_u(left)? - to_u(right)?) * 0.25;
    model.to_aux(&mid).map_err(|e| Error::Recovery {
        cell,
        reason: format!("mid value is inadmissible: {e}"),
    })
}

fn node_cells(mesh: &Mesh1D, node: usize) -> (Option<usize>, Option<usize>) {
    let cells = mesh.cell_count();
    match mesh.boundary() {
        Boundary::Periodic => (Some((node + cells - 1) % cells), Some(node % cells)),
        Boundary::Transmissive => (node.checked_sub(1), (node < cells).then_some(node)),
    }
}

fn conserved_points(af: &AfState, model: &Model) -> Result<Vec<State>> {
    af.points.iter().map(|v| model.from_aux(v)).collect()
}

/// `dū_k/dt = −(f(u_{k+1}) − f(u_k))/Δx_k` from the node values.
pub fn average_update(mesh: &Mesh1D, af: &AfState, model: &Model) -> Result<Vec<State>> {
    let fluxes = conserved_points(af, model)?
        .iter()
        .map(|u| model.flux(u))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..mesh.cell_count())
        .map(|k| {
            let [l, r] = mesh.cell_dofs(k);
            (fluxes[r] - fluxes[l]) * (-1.0 / mesh.cell_width(k))
        })
        .collect())
}

pub fn midpoints(mesh: &Mesh1D, af: &AfState, model: &Model) -> Result<Vec<State>> {
    (0..mesh.cell_count())
        .map(|k| {
            let [l, r] = mesh.cell_dofs(k);
            recover_midpoint(k, &af.averages[k], &af.points[l], &af.points[r], model)
        })
        .collect()
}

/// `dv_i/dt = −(J⁻ D⁺v + J⁺ D⁻v)` at every node, with one-sided quadratic
/// derivatives `D⁺v = (−3v_i + 4v_{i+1/2} − v_{i+1})/Δx` from the right
/// cell and `D⁻v = (3v_i − 4v_{i−1/2} + v_{i−1})/Δx` from the left one.
/// A missing cell at a transmissive end contributes nothing.
pub fn point_update(mesh: &Mesh1D, af: &AfState, mids: &[State], model: &Model) -> Result<Vec<State>> {
    (0..af.points.len())
        .map(|i| {
            let v = af.points[i];
            let split = model.aux_eigen(&v).map_err(|_| Error::Splitting { node: i })?;
            let mut rate = State::zeros(v.len());
            let (left, right) = node_cells(mesh, i);
            if let Some(k) = right {
                let [_, r] = mesh.cell_dofs(k);
                let d = (v * -3.0 + mids[k] * 4.0 - af.points[r]) * (1.0 / mesh.cell_width(k));
                rate -= split.negative_part().mul_state(&d);
            }
            if let Some(k) = left {
                let [l, _] = mesh.cell_dofs(k);
                let d = (v * 3.0 - mids[k] * 4.0 + af.points[l]) * (1.0 / mesh.cell_width(k));
                rate -= split.positive_part().mul_state(&d);
            }
            if !rate.is_finite() {
                return Err(Error::Splitting { node: i });
            }
            Ok(rate)
        })
        .collect()
}

/// Relaxed discrete maximum principle on the first component of the
/// averages: the new average must stay within the old local bounds
/// widened by `max(absolute, relative · local range)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detector {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Detector {
    fn default() -> Self {
        Self {
            absolute: 1e-4,
            relative: 1e-3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ActiveFlux {
    mesh: Mesh1D,
    model: Model,
    detector: Option<Detector>,
}

impl ActiveFlux {
    pub fn new(mesh: Mesh1D, model: Model, detector: Option<Detector>) -> Self {
        Self { mesh, model, detector }
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn unpack(&self, u: &[f64]) -> AfState {
        AfState::from_flat(u, self.mesh.cell_count(), self.model.components())
    }

    fn high_order(&self, af: &AfState, dt: f64) -> Result<AfState> {
        let mids = midpoints(&self.mesh, af, &self.model)?;
        let da = average_update(&self.mesh, af, &self.model)?;
        let dv = point_update(&self.mesh, af, &mids, &self.model)?;
        Ok(AfState {
            averages: af.averages.iter().zip(&da).map(|(u, d)| *u + *d * dt).collect(),
            points: af.points.iter().zip(&dv).map(|(v, d)| *v + *d * dt).collect(),
        })
    }

    fn cell_is_bad(&self, k: usize, old: &AfState, new: &AfState, detector: &Detector) -> bool {
        let u = &new.averages[k];
        if !u.is_finite() || !self.model.is_admissible(u) {
            return true;
        }
        let [l, r] = self.mesh.cell_dofs(k);
        let cells = self.mesh.cell_count();
        let neighbours = match self.mesh.boundary() {
            Boundary::Periodic => [(k + cells - 1) % cells, k, (k + 1) % cells],
            Boundary::Transmissive => [k.saturating_sub(1), k, (k + 1).min(cells - 1)],
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let old_points = [old.points[l], old.points[r]];
        for value in neighbours
            .iter()
            .map(|&j| old.averages[j][0])
            .chain(old_points.iter().map(|v| v[0]))
        {
            lo = lo.min(value);
            hi = hi.max(value);
        }
        let delta = detector.absolute.max(detector.relative * (hi - lo));
        !(u[0] >= lo - delta && u[0] <= hi + delta)
    }

    fn point_is_bad(&self, v: &State) -> bool {
        !v.is_finite() || self.model.from_aux(v).is_err()
    }

    /// Replaces flagged cells by a first-order Rusanov update built from
    /// the old averages, repeating until no further cell is flagged.
    /// Returns the new state, the number of flagged cells and the net
    /// boundary flux actually used by the averages.
    fn fallback(
        &self,
        old: &AfState,
        mut new: AfState,
        dt: f64,
        detector: &Detector,
    ) -> Result<(AfState, usize, State)> {
        let cells = self.mesh.cell_count();
        let nodes = self.mesh.dof_count();
        let high_fluxes = conserved_points(old, &self.model)?
            .iter()
            .map(|u| self.model.flux(u))
            .collect::<Result<Vec<_>>>()?;
        let mut flux = high_fluxes.clone();
        let mut low_node = vec![false; nodes];
        let mut flagged = vec![false; cells];
        for (i, v) in new.points.iter().enumerate() {
            if self.point_is_bad(v) {
                let (a, b) = node_cells(&self.mesh, i);
                for k in [a, b].into_iter().flatten() {
                    flagged[k] = true;
                }
            }
        }
        loop {
            let mut changed = false;
            for (k, flag) in flagged.iter_mut().enumerate() {
                if !*flag && self.cell_is_bad(k, old, &new, detector) {
                    *flag = true;
                }
                if *flag {
                    for node in self.mesh.cell_dofs(k) {
                        if !low_node[node] {
                            low_node[node] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
            flux = high_fluxes.clone();
            for i in (0..nodes).filter(|&i| low_node[i]) {
                let (a, b) = node_cells(&self.mesh, i);
                let left = old.averages[a.or(b).expect("node without cells")];
                let right = old.averages[b.or(a).expect("node without cells")];
                flux[i] = NumericalFlux::Rusanov.evaluate(&self.model, 1.0, &left, &right)?;
            }
            for k in 0..cells {
                let [l, r] = self.mesh.cell_dofs(k);
                if low_node[l] || low_node[r] {
                    new.averages[k] = old.averages[k] - (flux[r] - flux[l]) * (dt / self.mesh.cell_width(k));
                }
            }
            for i in (0..nodes).filter(|&i| low_node[i]) {
                let (a, b) = node_cells(&self.mesh, i);
                let adjacent: Vec<State> = [a, b].into_iter().flatten().map(|k| new.averages[k]).collect();
                let mean = adjacent.iter().skip(1).fold(adjacent[0], |m, u| m + *u) * (1.0 / adjacent.len() as f64);
                if let Ok(v) = self.model.to_aux(&mean) {
                    new.points[i] = v;
                }
            }
        }
        for (k, u) in new.averages.iter().enumerate() {
            if !self.model.is_admissible(u) {
                return Err(Error::Recovery {
                    cell: k,
                    reason: "first-order fallback produced an inadmissible average".into(),
                });
            }
        }
        let boundary = match self.mesh.boundary() {
            Boundary::Periodic => State::zeros(self.model.components()),
            Boundary::Transmissive => flux[nodes - 1] - flux[0],
        };
        Ok((new, flagged.iter().filter(|f| **f).count(), boundary))
    }

    fn boundary_flux(&self, af: &AfState) -> Result<State> {
        Ok(match self.mesh.boundary() {
            Boundary::Periodic => State::zeros(self.model.components()),
            Boundary::Transmissive => {
                let first = self.model.from_aux(&af.points[0])?;
                let last = self.model.from_aux(&af.points[af.points.len() - 1])?;
                self.model.flux(&last)? - self.model.flux(&first)?
            }
        })
    }
}

impl Semidiscrete for ActiveFlux {
    fn components(&self) -> usize {
        self.model.components()
    }

    fn euler_substep(&self, u: &[f64], dt: f64) -> Result<(Vec<f64>, SubstepInfo)> {
        let old = self.unpack(u);
        let (next, fallback_cells, boundary) = match &self.detector {
            None => (self.high_order(&old, dt)?, 0, self.boundary_flux(&old)?),
            Some(detector) => {
                let candidate = match self.high_order(&old, dt) {
                    Ok(c) => c,
                    // a failed recovery or splitting marks every cell
                    Err(Error::Recovery { .. } | Error::Splitting { .. } | Error::Domain { .. }) => AfState {
                        averages: vec![State::filled(self.components(), f64::NAN); old.averages.len()],
                        points: vec![State::filled(self.components(), f64::NAN); old.points.len()],
                    },
                    Err(e) => return Err(e),
                };
                self.fallback(&old, candidate, dt, detector)?
            }
        };
        let mut info = SubstepInfo::new(boundary);
        info.fallback_cells = fallback_cells;
        Ok((next.to_flat(), info))
    }

    fn max_wave_speed(&self, u: &[f64]) -> Result<f64> {
        let af = self.unpack(u);
        let mut speed = 0.0_f64;
        for a in &af.averages {
            speed = speed.max(self.model.max_wave_speed(a)?);
        }
        for v in &af.points {
            speed = speed.max(self.model.max_wave_speed(&self.model.from_aux(v)?)?);
        }
        Ok(speed)
    }

    fn min_width(&self) -> f64 {
        self.mesh.min_width()
    }

    fn totals(&self, u: &[f64]) -> Result<State> {
        let af = self.unpack(u);
        Ok(af
            .averages
            .iter()
            .enumerate()
            .fold(State::zeros(self.components()), |acc, (k, a)| {
                acc + *a * self.mesh.cell_width(k)
            }))
    }

    fn total_entropy(&self, u: &[f64]) -> Result<f64> {
        let af = self.unpack(u);
        af.averages
            .iter()
            .enumerate()
            .map(|(k, a)| Ok(self.mesh.cell_width(k) * self.model.entropy(a)?))
            .sum()
    }

    fn snapshot(&self, time: f64, u: &[f64]) -> Result<Snapshot> {
        let af = self.unpack(u);
        Ok(Snapshot {
            time,
            points: Some(conserved_points(&af, &self.model)?),
            values: af.averages,
        })
    }

    fn positions(&self) -> Vec<f64> {
        self.mesh.cell_centers()
    }

    fn point_positions(&self) -> Option<Vec<f64>> {
        Some(self.mesh.dof_positions().to_vec())
    }

    fn component_names(&self) -> Vec<String> {
        self.model.component_names().iter().map(|s| s.to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> State {
        State::scalar(x)
    }

    #[test]
    fn midpoint_recovery_examples() {
        let m = Model::Burgers;
        assert!((recover_midpoint(0, &s(0.3), &s(0.3), &s(0.3), &m).unwrap()[0] - 0.3).abs() < 1e-15);
        assert_eq!(recover_midpoint(0, &s(0.5), &s(0.0), &s(1.0), &m).unwrap()[0], 0.5);
        let q = recover_midpoint(0, &s(1.0 / 3.0), &s(0.0), &s(1.0), &m).unwrap()[0];
        assert!((q - 0.25).abs() < 1e-15);
    }

    #[test]
    fn euler_midpoint_is_consistent_and_checked() {
        let m = Model::euler(1.4).unwrap();
        let w = State::from_slice(&[1.0, 0.2, 1.0]);
        let u = m.from_aux(&w).unwrap();
        let mid = recover_midpoint(3, &u, &w, &w, &m).unwrap();
        assert!((mid - w).norm_inf() < 1e-14);
        let thin = State::from_slice(&[0.01, 0.0, 0.01]);
        let err = recover_midpoint(3, &m.from_aux(&thin).unwrap(), &w, &w, &m);
        assert!(matches!(err, Err(Error::Recovery { cell: 3, .. })));
    }

    #[test]
    fn average_update_of_burgers_jump() {
        let mesh = Mesh1D::uniform(0.0, 2.0, 2, Boundary::Transmissive).unwrap();
        let af = AfState {
            averages: vec![s(0.5), s(0.0)],
            points: vec![s(1.0), s(0.0), s(0.0)],
        };
        let d = average_update(&mesh, &af, &Model::Burgers).unwrap();
        assert_eq!(d[0][0], 0.5);
        assert_eq!(d[1][0], 0.0);
    }

    #[test]
    fn point_update_for_right_moving_advection_uses_left_cell() {
        let model = Model::Advection { speed: 2.0 };
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, Boundary::Periodic).unwrap();
        let h = 0.25;
        // v = x² sampled around node 1 at x = h: left cell [0, h]
        let x: [f64; 4] = [0.0, h, 2.0 * h, 3.0 * h];
        let points: Vec<State> = x.iter().map(|x| s(x * x)).collect();
        let mids: Vec<State> = (0..4).map(|k| s((x[k] + 0.5 * h).powi(2))).collect();
        let af = AfState {
            averages: vec![s(0.0); 4],
            points,
        };
        let dv = point_update(&mesh, &af, &mids, &model).unwrap();
        // exact derivative 2x at x = h, upwind from the left
        assert!((dv[1][0] + 2.0 * 2.0 * h).abs() < 1e-13);
    }

    #[test]
    fn one_sided_derivative_is_exact_for_quadratics() {
        let model = Model::Advection { speed: -1.0 };
        let mesh = Mesh1D::uniform(0.0, 1.0, 2, Boundary::Transmissive).unwrap();
        // v = x² on [0, 0.5]: derivative at 0 is 0
        let af = AfState {
            averages: vec![s(0.0); 2],
            points: vec![s(0.0), s(0.25), s(1.0)],
        };
        let mids = vec![s(0.0625), s(0.5625)];
        let dv = point_update(&mesh, &af, &mids, &model).unwrap();
        assert!(dv[0][0].abs() < 1e-15);
    }

    #[test]
    fn constant_state_is_steady() {
        let model = Model::euler(1.4).unwrap();
        let mesh = Mesh1D::uniform(0.0, 1.0, 8, Boundary::Periodic).unwrap();
        let w = State::from_slice(&[1.0, 0.5, 2.0]);
        let u = model.from_aux(&w).unwrap();
        let scheme = ActiveFlux::new(mesh, model, Some(Detector::default()));
        let af = AfState {
            averages: vec![u; 8],
            points: vec![w; 8],
        };
        let (next, info) = scheme.euler_substep(&af.to_flat(), 0.01).unwrap();
        assert_eq!(info.fallback_cells, 0);
        let next = scheme.unpack(&next);
        assert!(next.averages.iter().all(|a| (*a - u).norm_inf() < 1e-14));
        assert!(next.points.iter().all(|p| (*p - w).norm_inf() < 1e-14));
    }

    #[test]
    fn detector_flags_new_extrema() {
        let model = Model::Burgers;
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, Boundary::Periodic).unwrap();
        let scheme = ActiveFlux::new(mesh, model, Some(Detector::default()));
        let old = AfState {
            averages: vec![s(1.0), s(1.0), s(0.0), s(0.0)],
            points: vec![s(0.5), s(1.0), s(0.5), s(0.0)],
        };
        let mut bad = old.clone();
        bad.averages[1] = s(1.5);
        let (fixed, flagged, _) = scheme.fallback(&old, bad, 0.01, &Detector::default()).unwrap();
        assert!(flagged >= 1);
        assert!(fixed.averages[1][0] <= 1.0 + 1e-12);
    }
}
