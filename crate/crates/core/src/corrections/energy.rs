//! Total-energy conservation for a scheme written in `(ρ, ρv, e)` with
//! `e = E − ½ρv²` the internal energy density.
//!
//! Over one step, `ΔE = Δe + v̄ Δ(ρv) − (v⁺v/2) Δρ` exactly, with
//! `v̄ = (v⁺ + v)/2` and `v⁺` the new velocity. Requiring the per-element
//! version of this identity to produce the energy flux difference fixes one
//! scalar `r^K` added to every internal-energy residual of the element.

use crate::error::{Error, Result};
use crate::mesh::{Boundary, Mesh1D};
use crate::models::{Model, ADMISSIBILITY_FLOOR};
use crate::schemes::flux::NumericalFlux;
use crate::schemes::nodal::{nodal_entropy, nodal_totals, nodal_wave_speed};
use crate::schemes::residuals::{domain_boundary_flux, fv_residuals_1d};
use crate::schemes::time::{Semidiscrete, Snapshot, SubstepInfo};
use crate::state::{flatten, unflatten, State};

/// `|ΔE − (Δe + v̄Δ(ρv) − (v⁺v/2)Δρ)|` for states given as `(ρ, v, e)`.
pub fn energy_update_identity(old: [f64; 3], new: [f64; 3]) -> f64 {
    let [r0, v0, e0] = old;
    let [r1, v1, e1] = new;
    let total = |r: f64, v: f64, e: f64| e + 0.5 * r * v * v;
    let lhs = total(r1, v1, e1) - total(r0, v0, e0);
    let rhs = (e1 - e0) + 0.5 * (v1 + v0) * (r1 * v1 - r0 * v0) - 0.5 * v1 * v0 * (r1 - r0);
    (lhs - rhs).abs()
}

/// Residuals of one element for the three evolved variables.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyElement {
    pub density: Vec<f64>,
    pub momentum: Vec<f64>,
    pub internal: Vec<f64>,
}

/// `r^K = (target − current)/#K` with
/// `current = Σ Φ^e + Σ v̄_σ Φ^{ρv}_σ − Σ (v⁺_σ v_σ/2) Φ^ρ_σ`.
pub fn energy_correction_shift(el: &EnergyElement, v_old: &[f64], v_new: &[f64], target: f64) -> f64 {
    let mut current = 0.0;
    for i in 0..el.internal.len() {
        current +=
            el.internal[i] + 0.5 * (v_new[i] + v_old[i]) * el.momentum[i] - 0.5 * v_new[i] * v_old[i] * el.density[i];
    }
    (target - current) / el.internal.len() as f64
}

/// Corrects the internal-energy residuals of every element in place and
/// returns the shifts `r^K`. `targets[K]` is `∮_{∂K} f^E·n`.
pub fn nonconservative_energy_correction(
    elements: &mut [EnergyElement],
    dofs: &[Vec<usize>],
    v_old: &[f64],
    v_new: &[f64],
    targets: &[f64],
) -> Vec<f64> {
    elements
        .iter_mut()
        .zip(dofs)
        .zip(targets)
        .map(|((el, d), &target)| {
            let vo: Vec<f64> = d.iter().map(|&i| v_old[i]).collect();
            let vn: Vec<f64> = d.iter().map(|&i| v_new[i]).collect();
            let r = energy_correction_shift(el, &vo, &vn, target);
            for phi in &mut el.internal {
                *phi += r;
            }
            r
        })
        .collect()
}

/// Euler scheme evolving `(ρ, ρv, e)`: Rusanov residuals for mass and
/// momentum, a Rusanov-type distribution of `e_t + (ve)_x + p v_x = 0`
/// for the internal energy, and optionally the energy correction.
///
/// States are stored in conserved form; the total energy is rebuilt
/// after each substep.
#[derive(Clone, Debug)]
pub struct NcEnergyScheme {
    mesh: Mesh1D,
    model: Model,
    correct: bool,
}

impl NcEnergyScheme {
    pub fn new(mesh: Mesh1D, gamma: f64, correct: bool) -> Result<Self> {
        Ok(Self {
            mesh,
            model: Model::euler(gamma)?,
            correct,
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }
}

impl Semidiscrete for NcEnergyScheme {
    fn components(&self) -> usize {
        3
    }

    fn euler_substep(&self, u: &[f64], dt: f64) -> Result<(Vec<f64>, SubstepInfo)> {
        let states = unflatten(u, 3);
        let prim = states
            .iter()
            .map(|s| self.model.primitive(s))
            .collect::<Result<Vec<_>>>()?;
        let gm1 = self.model.gamma().expect("Euler model") - 1.0;
        let v_old: Vec<f64> = prim.iter().map(|w| w.velocity).collect();
        let internal: Vec<f64> = prim.iter().map(|w| w.pressure / gm1).collect();

        let conservative = fv_residuals_1d(&self.mesh, &states, NumericalFlux::Rusanov, &self.model)?;
        let mut elements = Vec::with_capacity(self.mesh.cell_count());
        let mut dofs = Vec::with_capacity(self.mesh.cell_count());
        let mut targets = Vec::with_capacity(self.mesh.cell_count());
        for (k, el) in conservative.elements.iter().enumerate() {
            let [l, r] = self.mesh.cell_dofs(k);
            let alpha = self
                .model
                .max_wave_speed(&states[l])?
                .max(self.model.max_wave_speed(&states[r])?);
            let (wl, wr) = (prim[l], prim[r]);
            let phi = v_old[r] * internal[r] - v_old[l] * internal[l]
                + 0.5 * (wl.pressure + wr.pressure) * (v_old[r] - v_old[l]);
            let jump = 0.5 * alpha * (internal[r] - internal[l]);
            elements.push(EnergyElement {
                density: el.residuals.iter().map(|s| s[0]).collect(),
                momentum: el.residuals.iter().map(|s| s[1]).collect(),
                internal: vec![0.5 * phi - jump, 0.5 * phi + jump],
            });
            dofs.push(vec![l, r]);
            targets.push(el.boundary[0][2] + el.boundary[1][2]);
        }

        let n = self.mesh.dof_count();
        let mut acc = vec![[0.0; 3]; n];
        let accumulate = |acc: &mut Vec<[f64; 3]>, elements: &[EnergyElement], comp: usize| {
            for a in acc.iter_mut() {
                a[comp] = 0.0;
            }
            for (el, d) in elements.iter().zip(&dofs) {
                let part = match comp {
                    0 => &el.density,
                    1 => &el.momentum,
                    _ => &el.internal,
                };
                for (&i, phi) in d.iter().zip(part) {
                    acc[i][comp] += phi;
                }
            }
        };
        accumulate(&mut acc, &elements, 0);
        accumulate(&mut acc, &elements, 1);
        let rho_new: Vec<f64> = (0..n)
            .map(|j| states[j][0] - dt / self.mesh.volume(j) * acc[j][0])
            .collect();
        let mom_new: Vec<f64> = (0..n)
            .map(|j| states[j][1] - dt / self.mesh.volume(j) * acc[j][1])
            .collect();
        if let Some(j) = rho_new.iter().position(|r| !(*r > ADMISSIBILITY_FLOOR)) {
            return Err(Error::StepRejected { dof: j });
        }
        let v_new: Vec<f64> = rho_new.iter().zip(&mom_new).map(|(r, m)| m / r).collect();

        let shifts = if self.correct {
            nonconservative_energy_correction(&mut elements, &dofs, &v_old, &v_new, &targets)
        } else {
            Vec::new()
        };
        accumulate(&mut acc, &elements, 2);

        let next = (0..n)
            .map(|j| {
                let e = internal[j] - dt / self.mesh.volume(j) * acc[j][2];
                if !(e > ADMISSIBILITY_FLOOR) {
                    return Err(Error::StepRejected { dof: j });
                }
                Ok(State::from_slice(&[
                    rho_new[j],
                    mom_new[j],
                    e + 0.5 * rho_new[j] * v_new[j] * v_new[j],
                ]))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut info = SubstepInfo::new(domain_boundary_flux(&self.mesh, &states, &self.model)?);
        info.alpha_max = shifts.iter().fold(0.0, |m, r| m.max(r.abs()));
        Ok((flatten(&next), info))
    }

    fn max_wave_speed(&self, u: &[f64]) -> Result<f64> {
        nodal_wave_speed(&unflatten(u, 3), &self.model)
    }

    fn min_width(&self) -> f64 {
        self.mesh.min_width()
    }

    fn totals(&self, u: &[f64]) -> Result<State> {
        Ok(nodal_totals(&self.mesh, &unflatten(u, 3), 3))
    }

    fn total_entropy(&self, u: &[f64]) -> Result<f64> {
        nodal_entropy(&self.mesh, &unflatten(u, 3), &self.model)
    }

    fn snapshot(&self, time: f64, u: &[f64]) -> Result<Snapshot> {
        Ok(Snapshot {
            time,
            values: unflatten(u, 3),
            points: None,
        })
    }

    fn positions(&self) -> Vec<f64> {
        self.mesh.dof_positions().to_vec()
    }

    fn component_names(&self) -> Vec<String> {
        self.model.component_names().iter().map(|s| s.to_string()).collect()
    }
}

impl NcEnergyScheme {
    pub fn boundary(&self) -> Boundary {
        self.mesh.boundary()
    }
}
