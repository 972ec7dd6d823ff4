//! Residual-distribution form: each element sends a residual to each of its
//! DOFs, and the residuals of an element sum to the flux through its boundary.

use crate::error::{Error, Result};
use crate::mesh::{Boundary, Mesh1D};
use crate::models::Model;
use crate::schemes::flux::NumericalFlux;
use crate::state::State;

/// Tolerance on the per-element conservation defect of assembled residuals.
pub const CONSERVATION_TOLERANCE: f64 = 1e-12;

/// Three-point Gauss-Legendre rule on the unit interval.
pub(crate) const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_3, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Residuals of one element, with the boundary part attributed to each DOF.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementResidual {
    /// Global DOF indices; in 1D `[left, right]`.
    pub dofs: Vec<usize>,
    pub residuals: Vec<State>,
    /// `∮ φ_σ f̂_n` over the element boundary, per local DOF.
    pub boundary: Vec<State>,
}

impl ElementResidual {
    pub fn total(&self) -> State {
        sum_states(&self.residuals)
    }

    pub fn boundary_total(&self) -> State {
        sum_states(&self.boundary)
    }

    /// `max |Σ Φ_σ − Σ f̂_σ^b|`.
    pub fn defect(&self) -> f64 {
        (self.total() - self.boundary_total()).norm_inf()
    }

    pub fn relative_defect(&self) -> f64 {
        let defect = self.defect();
        if defect == 0.0 {
            return 0.0;
        }
        let scale = self
            .residuals
            .iter()
            .chain(&self.boundary)
            .map(State::norm_inf)
            .fold(0.0, f64::max);
        defect / scale.max(f64::MIN_POSITIVE)
    }
}

fn sum_states(states: &[State]) -> State {
    let mut it = states.iter();
    let first = *it.next().expect("element without DOFs");
    it.fold(first, |acc, s| acc + *s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSet {
    pub elements: Vec<ElementResidual>,
    components: usize,
}

impl ResidualSet {
    pub fn new(elements: Vec<ElementResidual>, components: usize) -> Self {
        Self { elements, components }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn max_relative_defect(&self) -> f64 {
        self.elements
            .iter()
            .map(ElementResidual::relative_defect)
            .fold(0.0, f64::max)
    }

    pub fn check_conservation(&self) -> Result<()> {
        let defect = self.max_relative_defect();
        if defect > CONSERVATION_TOLERANCE {
            return Err(Error::ConservationViolation {
                defect,
                tolerance: CONSERVATION_TOLERANCE,
            });
        }
        Ok(())
    }

    /// `Σ_{K ∋ σ} Φ_σ^K` for every DOF.
    pub fn accumulate(&self, dof_count: usize) -> Vec<State> {
        let mut out = vec![State::zeros(self.components); dof_count];
        for el in &self.elements {
            for (&dof, phi) in el.dofs.iter().zip(&el.residuals) {
                out[dof] += *phi;
            }
        }
        out
    }
}

fn check_sizes(mesh: &Mesh1D, states: &[State]) -> Result<()> {
    if states.len() != mesh.dof_count() {
        return Err(Error::Config(format!(
            "{} states for a mesh with {} DOFs",
            states.len(),
            mesh.dof_count()
        )));
    }
    Ok(())
}

fn nodal_fluxes(model: &Model, states: &[State]) -> Result<Vec<State>> {
    states.iter().map(|u| model.flux(u)).collect()
}

/// Boundary parts of a 1D element with continuous data: `-f(u_l)` and `f(u_r)`.
fn segment_boundary(fl: State, fr: State) -> Vec<State> {
    vec![-fl, fr]
}

/// Finite volume scheme rewritten in residual form: on cell `[x_i, x_{i+1}]`,
/// `Φ_i = f̂_{i+1/2} − f(u_i)` and `Φ_{i+1} = f(u_{i+1}) − f̂_{i+1/2}`.
pub fn fv_residuals_1d(mesh: &Mesh1D, states: &[State], flux: NumericalFlux, model: &Model) -> Result<ResidualSet> {
    check_sizes(mesh, states)?;
    let f = nodal_fluxes(model, states)?;
    let elements = (0..mesh.cell_count())
        .map(|k| {
            let [l, r] = mesh.cell_dofs(k);
            let face = flux.evaluate(model, 1.0, &states[l], &states[r])?;
            Ok(ElementResidual {
                dofs: vec![l, r],
                residuals: vec![face - f[l], f[r] - face],
                boundary: segment_boundary(f[l], f[r]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualSet::new(elements, model.components()))
}

/// SUPG residuals for continuous P1 elements.
///
/// `Φ_σ = −∫ φ_σ' f(u_h) + [φ_σ f(u_h) n] + h ∫ φ_σ' f'(u_h) τ f'(u_h) ∂_x u_h`
/// with `τ = tau_scale / (2 max wave speed)` per element and three-point
/// Gauss quadrature.
pub fn supg_residuals_1d(mesh: &Mesh1D, states: &[State], model: &Model, tau_scale: f64) -> Result<ResidualSet> {
    check_sizes(mesh, states)?;
    let f = nodal_fluxes(model, states)?;
    let p = model.components();
    let elements = (0..mesh.cell_count())
        .map(|k| {
            let [l, r] = mesh.cell_dofs(k);
            let h = mesh.cell_width(k);
            let (ul, ur) = (states[l], states[r]);
            let speed = model.max_wave_speed(&ul)?.max(model.max_wave_speed(&ur)?);
            let tau = if speed > 1e-14 { tau_scale / (2.0 * speed) } else { 0.0 };
            let grad = (ur - ul) * (1.0 / h);
            // dphi_l/dx = -1/h, dphi_r/dx = +1/h
            let mut flux_mean = State::zeros(p);
            let mut streamline = State::zeros(p);
            for (xi, w) in GAUSS3 {
                let u = ul * (1.0 - xi) + ur * xi;
                flux_mean += model.flux(&u)? * w;
                let a = model.jacobian(&u)?;
                streamline += a.mul_state(&a.mul_state(&grad)) * w;
            }
            // ∫_K φ' g dx = ±(1/h) h Σ w g, so the Galerkin term is the mean flux
            let galerkin = flux_mean;
            let stab = streamline * (h * tau);
            Ok(ElementResidual {
                dofs: vec![l, r],
                residuals: vec![galerkin - f[l] - stab, f[r] - galerkin + stab],
                boundary: segment_boundary(f[l], f[r]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualSet::new(elements, p))
}

/// `u_σ ← u_σ − Δt / |C_σ| Σ_K Φ_σ^K`.
pub fn rd_step(mesh: &Mesh1D, states: &[State], residuals: &ResidualSet, dt: f64, model: &Model) -> Result<Vec<State>> {
    check_sizes(mesh, states)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let sums = residuals.accumulate(mesh.dof_count());
    states
        .iter()
        .zip(&sums)
        .enumerate()
        .map(|(dof, (u, phi))| {
            let next = *u - *phi * (dt / mesh.volume(dof));
            if model.is_admissible(&next) {
                Ok(next)
            } else {
                Err(Error::StepRejected { dof })
            }
        })
        .collect()
}

/// Direct flux-form finite volume update on the dual volumes, used as the
/// reference route for the residual rewriting. Transmissive ends use the
/// consistent boundary flux `f̂(u_0, u_0) = f(u_0)`.
pub fn fv_flux_form_update(
    mesh: &Mesh1D,
    states: &[State],
    flux: NumericalFlux,
    model: &Model,
    dt: f64,
) -> Result<Vec<State>> {
    check_sizes(mesh, states)?;
    let n = mesh.dof_count();
    let faces = (0..mesh.cell_count())
        .map(|k| {
            let [l, r] = mesh.cell_dofs(k);
            flux.evaluate(model, 1.0, &states[l], &states[r])
        })
        .collect::<Result<Vec<_>>>()?;
    (0..n)
        .map(|j| {
            let (left_face, right_face) = match mesh.boundary() {
                Boundary::Periodic => (faces[(j + n - 1) % n], faces[j]),
                Boundary::Transmissive => {
                    let lf = if j == 0 { model.flux(&states[0])? } else { faces[j - 1] };
                    let rf = if j == n - 1 {
                        model.flux(&states[n - 1])?
                    } else {
                        faces[j]
                    };
                    (lf, rf)
                }
            };
            Ok(states[j] - (right_face - left_face) * (dt / mesh.volume(j)))
        })
        .collect()
}

/// Net flux leaving the domain, `f(u_last) − f(u_0)` on transmissive meshes
/// and zero on periodic ones.
pub fn domain_boundary_flux(mesh: &Mesh1D, states: &[State], model: &Model) -> Result<State> {
    Ok(match mesh.boundary() {
        Boundary::Periodic => State::zeros(model.components()),
        Boundary::Transmissive => model.flux(&states[states.len() - 1])? - model.flux(&states[0])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalars(values: &[f64]) -> Vec<State> {
        values.iter().map(|&v| State::scalar(v)).collect()
    }

    #[test]
    fn constant_states_give_zero_residuals() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 6, Boundary::Periodic).unwrap();
        let states = scalars(&[0.7; 6]);
        let fv = fv_residuals_1d(&mesh, &states, NumericalFlux::Rusanov, &Model::Burgers).unwrap();
        let supg = supg_residuals_1d(&mesh, &states, &Model::Burgers, 1.0).unwrap();
        for set in [fv, supg] {
            for el in &set.elements {
                for phi in &el.residuals {
                    assert!(phi.norm_inf() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn fv_residuals_burgers_riemann_cell() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 2, Boundary::Transmissive).unwrap();
        let states = scalars(&[1.0, 0.0, 0.0]);
        let set = fv_residuals_1d(&mesh, &states, NumericalFlux::Rusanov, &Model::Burgers).unwrap();
        let el = &set.elements[0];
        assert_eq!(el.residuals[0][0], 0.25);
        assert_eq!(el.residuals[1][0], -0.75);
        assert_eq!(el.total()[0], -0.5);
        assert_eq!(el.defect(), 0.0);
    }

    #[test]
    fn size_mismatch_is_a_config_error() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, Boundary::Periodic).unwrap();
        let r = fv_residuals_1d(&mesh, &scalars(&[1.0; 5]), NumericalFlux::Rusanov, &Model::Burgers);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn supg_element_sum_is_interpolated_boundary_flux() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 5, Boundary::Transmissive).unwrap();
        let states = scalars(&[0.3, -0.8, 1.1, 0.4, 0.0, 2.0]);
        let set = supg_residuals_1d(&mesh, &states, &Model::Burgers, 1.0).unwrap();
        for (k, el) in set.elements.iter().enumerate() {
            let expect = 0.5 * states[k + 1][0].powi(2) - 0.5 * states[k][0].powi(2);
            assert!((el.total()[0] - expect).abs() < 1e-14);
        }
        assert!(set.max_relative_defect() < CONSERVATION_TOLERANCE);
    }

    #[test]
    fn supg_advection_reduces_to_upwind() {
        // Hand assembly on two cells, a = 1, tau = 1/(2a):
        // Galerkin part splits a Δu evenly, the stabilisation moves -aΔu/2
        // from the left DOF to the right DOF.
        let model = Model::Advection { speed: 1.0 };
        let mesh = Mesh1D::uniform(0.0, 2.0, 2, Boundary::Transmissive).unwrap();
        let states = scalars(&[1.0, 3.0, 2.0]);
        let set = supg_residuals_1d(&mesh, &states, &model, 1.0).unwrap();
        let expect = [[0.0, 2.0], [0.0, -1.0]];
        for (el, e) in set.elements.iter().zip(expect) {
            assert!((el.residuals[0][0] - e[0]).abs() < 1e-14);
            assert!((el.residuals[1][0] - e[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn rd_step_single_burgers_riemann() {
        // Periodic 4-cell mesh, h = 0.25, dt = 0.1. Hand-computed FV update
        // with Rusanov faces f̂(1,1)=0.5, f̂(1,0)=0.75, f̂(0,0)=0, f̂(0,1)=−0.25.
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, Boundary::Periodic).unwrap();
        let states = scalars(&[1.0, 1.0, 0.0, 0.0]);
        let set = fv_residuals_1d(&mesh, &states, NumericalFlux::Rusanov, &Model::Burgers).unwrap();
        let next = rd_step(&mesh, &states, &set, 0.1, &Model::Burgers).unwrap();
        let expect = [
            1.0 - 0.4 * (0.5 + 0.25),
            1.0 - 0.4 * (0.75 - 0.5),
            0.0 - 0.4 * (0.0 - 0.75),
            0.0 - 0.4 * (-0.25 - 0.0),
        ];
        for (u, e) in next.iter().zip(expect) {
            assert!((u[0] - e).abs() < 1e-15, "{u:?} vs {e}");
        }
    }

    #[test]
    fn rd_step_rejects_inadmissible_results() {
        let model = Model::euler(1.4).unwrap();
        let mesh = Mesh1D::uniform(0.0, 1.0, 2, Boundary::Transmissive).unwrap();
        let states = vec![State::from_slice(&[1.0, 0.0, 2.5]); 3];
        let mut set = fv_residuals_1d(&mesh, &states, NumericalFlux::Rusanov, &model).unwrap();
        set.elements[1].residuals[1] = State::from_slice(&[100.0, 0.0, 0.0]);
        assert!(matches!(
            rd_step(&mesh, &states, &set, 0.1, &model),
            Err(Error::StepRejected { dof: 2 })
        ));
        assert!(rd_step(&mesh, &states, &set, 0.0, &model).is_err());
    }

    #[test]
    fn zero_residuals_leave_states_unchanged() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 3, Boundary::Periodic).unwrap();
        let states = scalars(&[0.1, 0.2, 0.3]);
        let zero = ResidualSet::new(
            (0..3)
                .map(|k| ElementResidual {
                    dofs: mesh.cell_dofs(k).to_vec(),
                    residuals: vec![State::scalar(0.0); 2],
                    boundary: vec![State::scalar(0.0); 2],
                })
                .collect(),
            1,
        );
        assert_eq!(rd_step(&mesh, &states, &zero, 0.5, &Model::Burgers).unwrap(), states);
    }
}
