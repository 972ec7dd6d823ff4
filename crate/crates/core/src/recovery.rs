//! Recovery of edge fluxes from conservative residuals.
//!
//! For an element with DOF graph incidence `A`, the residuals minus their
//! boundary parts, `Ψ = Φ − f̂^b`, sum to zero. Then `A f̂ = Ψ` is solvable
//! and `f̂ = Aᵀ L⁺ Ψ` with `L = A Aᵀ` is its minimum-norm solution. Writing
//! each DOF update with these edge fluxes gives a flux form of the scheme.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{EdgeFluxSet, ElementGraph, GraphKind, Mesh1D};
use crate::schemes::residuals::{ElementResidual, ResidualSet};
use crate::state::State;

/// Relative tolerance on `|Σ_σ Ψ_σ|` for a problem to count as conservative.
pub const RECOVERY_TOLERANCE: f64 = 1e-10;

/// `L = A Aᵀ` with a Cholesky factor of the block that remains after
/// pinning DOF 0.
#[derive(Clone, Debug)]
pub struct GraphLaplacian {
    matrix: DMatrix<f64>,
    incidence: DMatrix<f64>,
    reduced: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl GraphLaplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn incidence(&self) -> &DMatrix<f64> {
        &self.incidence
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `L⁺ b` for a single component: project `b` onto the complement of the
    /// constants, solve with DOF 0 pinned to zero, then remove the mean.
    pub fn apply_pseudo_inverse(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mean = b.sum() / n as f64;
        let projected = b.add_scalar(-mean);
        let mut x = DVector::zeros(n);
        if let Some(chol) = &self.reduced {
            let rhs = projected.rows(1, n - 1).into_owned();
            let sol = chol.solve(&rhs);
            x.rows_mut(1, n - 1).copy_from(&sol);
        }
        let shift = x.sum() / n as f64;
        x.add_scalar(-shift)
    }
}

pub fn build_laplacian(graph: &ElementGraph) -> Result<GraphLaplacian> {
    if !graph.is_connected() {
        return Err(Error::Structure("element graph is not connected".into()));
    }
    let incidence = graph.incidence();
    let matrix = &incidence * incidence.transpose();
    let n = matrix.nrows();
    let reduced = if n > 1 {
        let block = matrix.view((1, 1), (n - 1, n - 1)).into_owned();
        Some(
            nalgebra::Cholesky::new(block)
                .ok_or_else(|| Error::Structure("reduced Laplacian is not positive definite".into()))?,
        )
    } else {
        None
    };
    Ok(GraphLaplacian {
        matrix,
        incidence,
        reduced,
    })
}

/// Right-hand side `Ψ_σ = Φ_σ − f̂_σ^b` of the recovery system.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryProblem {
    psi: Vec<State>,
}

impl RecoveryProblem {
    /// Fails unless `Σ_σ Ψ_σ` vanishes componentwise to `RECOVERY_TOLERANCE`
    /// relative to `|S| max_σ |Ψ_σ|`.
    pub fn new(psi: Vec<State>) -> Result<Self> {
        Self::checked(psi, 0.0)
    }

    /// `Ψ_σ = Φ_σ − f̂_σ^b`. The tolerance also scales with the size of the
    /// residuals and boundary parts, since `Ψ` can be pure cancellation
    /// error in flat regions.
    pub fn from_element(el: &ElementResidual) -> Result<Self> {
        let inputs = el
            .residuals
            .iter()
            .chain(&el.boundary)
            .map(State::norm_inf)
            .fold(0.0, f64::max);
        Self::checked(
            el.residuals
                .iter()
                .zip(&el.boundary)
                .map(|(phi, b)| *phi - *b)
                .collect(),
            inputs,
        )
    }

    fn checked(psi: Vec<State>, input_scale: f64) -> Result<Self> {
        let first = psi
            .first()
            .ok_or_else(|| Error::Structure("recovery problem without DOFs".into()))?;
        let sum = psi.iter().skip(1).fold(*first, |acc, p| acc + *p);
        let largest = psi.iter().map(State::norm_inf).fold(input_scale, f64::max);
        let scale = largest * psi.len() as f64;
        let defect = sum.norm_inf();
        if defect > RECOVERY_TOLERANCE * scale || !defect.is_finite() {
            return Err(Error::ConservationViolation {
                defect: defect / scale.max(f64::MIN_POSITIVE),
                tolerance: RECOVERY_TOLERANCE,
            });
        }
        Ok(Self { psi })
    }

    pub fn psi(&self) -> &[State] {
        &self.psi
    }
}

/// Minimum-norm edge fluxes with `A f̂ = Ψ`.
pub fn recover_fluxes(graph: &ElementGraph, problem: &RecoveryProblem) -> Result<EdgeFluxSet> {
    let laplacian = build_laplacian(graph)?;
    recover_with(&laplacian, graph, problem)
}

/// As [`recover_fluxes`], reusing an already factored Laplacian.
pub fn recover_with(
    laplacian: &GraphLaplacian,
    graph: &ElementGraph,
    problem: &RecoveryProblem,
) -> Result<EdgeFluxSet> {
    let n = graph.dof_count();
    if problem.psi.len() != n {
        return Err(Error::Structure(format!(
            "{} residuals for a graph with {n} DOFs",
            problem.psi.len()
        )));
    }
    let p = problem.psi[0].len();
    let at = laplacian.incidence.transpose();
    let mut values = vec![State::zeros(p); graph.edge_count()];
    for c in 0..p {
        let b = DVector::from_iterator(n, problem.psi.iter().map(|s| s[c]));
        let f = &at * laplacian.apply_pseudo_inverse(&b);
        for (v, fe) in values.iter_mut().zip(f.iter()) {
            v[c] = *fe;
        }
    }
    Ok(EdgeFluxSet::new(graph, values))
}

/// Flux form of a 1D residual scheme: one recovered flux per cell (the
/// flux across the dual-cell interface inside it) plus the boundary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxForm {
    pub interface_fluxes: Vec<State>,
    /// `Σ_{K∋σ} f̂_σ^{b,K}` per DOF; zero at interior DOFs for continuous data.
    pub boundary_sums: Vec<State>,
}

impl FluxForm {
    /// `−(1/|C_σ|)(Σ_K f̂_σ^b + F_right − F_left)` per DOF.
    pub fn rates(&self, mesh: &Mesh1D) -> Vec<State> {
        let mut rates = self.boundary_sums.clone();
        for (k, f) in self.interface_fluxes.iter().enumerate() {
            let [l, r] = mesh.cell_dofs(k);
            rates[l] += *f;
            rates[r] -= *f;
        }
        rates
            .into_iter()
            .enumerate()
            .map(|(j, r)| r * (-1.0 / mesh.volume(j)))
            .collect()
    }

    pub fn update(&self, mesh: &Mesh1D, states: &[State], dt: f64) -> Vec<State> {
        states.iter().zip(self.rates(mesh)).map(|(u, r)| *u + r * dt).collect()
    }
}

/// Recovers a flux form for every element of a 1D residual set.
pub fn reconstruct_scheme(mesh: &Mesh1D, residuals: &ResidualSet) -> Result<FluxForm> {
    if residuals.elements.len() != mesh.cell_count() {
        return Err(Error::Config(format!(
            "{} element residuals for a mesh with {} cells",
            residuals.elements.len(),
            mesh.cell_count()
        )));
    }
    let graph = ElementGraph::new(GraphKind::Segment)?;
    let laplacian = build_laplacian(&graph)?;
    let mut boundary_sums = vec![State::zeros(residuals.components()); mesh.dof_count()];
    let mut interface_fluxes = Vec::with_capacity(mesh.cell_count());
    for (k, el) in residuals.elements.iter().enumerate() {
        let problem = RecoveryProblem::from_element(el).inspect_err(|_| {
            log::error!("residuals of cell {k} are not conservative");
        })?;
        let fluxes = recover_with(&laplacian, &graph, &problem)?;
        interface_fluxes.push(fluxes.values()[0]);
        for (&dof, b) in el.dofs.iter().zip(&el.boundary) {
            boundary_sums[dof] += *b;
        }
    }
    Ok(FluxForm {
        interface_fluxes,
        boundary_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Boundary;
    use crate::models::Model;
    use crate::schemes::{fv_residuals_1d, rd_step, NumericalFlux};

    fn scalars(v: &[f64]) -> Vec<State> {
        v.iter().map(|&x| State::scalar(x)).collect()
    }

    #[test]
    fn laplacians_of_supported_graphs() {
        let seg = build_laplacian(&ElementGraph::new(GraphKind::Segment).unwrap()).unwrap();
        assert_eq!(seg.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let tri = build_laplacian(&ElementGraph::new(GraphKind::Triangle).unwrap()).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        assert_eq!(tri.matrix(), &expect);
        let path = build_laplacian(&ElementGraph::new(GraphKind::Path(3)).unwrap()).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        assert_eq!(path.matrix(), &expect);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = ElementGraph::from_edges(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(matches!(build_laplacian(&g), Err(Error::Structure(_))));
    }

    #[test]
    fn segment_and_path_recovery() {
        let seg = ElementGraph::new(GraphKind::Segment).unwrap();
        let f = recover_fluxes(&seg, &RecoveryProblem::new(scalars(&[0.7, -0.7])).unwrap()).unwrap();
        assert!((f.values()[0][0] - 0.7).abs() < 1e-15);

        let path = ElementGraph::new(GraphKind::Path(3)).unwrap();
        let (a, b) = (0.3, -1.1);
        let f = recover_fluxes(&path, &RecoveryProblem::new(scalars(&[a, b, -a - b])).unwrap()).unwrap();
        assert!((f.values()[0][0] - a).abs() < 1e-14);
        assert!((f.values()[1][0] - (a + b)).abs() < 1e-14);
    }

    #[test]
    fn triangle_recovery() {
        let tri = ElementGraph::new(GraphKind::Triangle).unwrap();
        let f = recover_fluxes(&tri, &RecoveryProblem::new(scalars(&[1.0, -1.0, 0.0])).unwrap()).unwrap();
        let expect = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (v, e) in f.values().iter().zip(expect) {
            assert!((v[0] - e).abs() < 1e-12);
        }
        // A f̂ = Ψ by hand: node 0 has out-edge 0→1 and in-edge 2→0
        assert!((f.flux(0, 1).unwrap()[0] - f.flux(2, 0).unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_residuals_are_rejected() {
        let r = RecoveryProblem::new(scalars(&[1.0 + 1e-3, -1.0 + 1e-3]));
        assert!(matches!(r, Err(Error::ConservationViolation { .. })));
    }

    #[test]
    fn zero_residuals_give_zero_fluxes() {
        let tri = ElementGraph::new(GraphKind::Triangle).unwrap();
        let f = recover_fluxes(&tri, &RecoveryProblem::new(scalars(&[0.0; 3])).unwrap()).unwrap();
        assert!(f.values().iter().all(|v| v[0] == 0.0));
    }

    #[test]
    fn fv_residuals_recover_their_numerical_fluxes() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 5, Boundary::Transmissive).unwrap();
        let states = scalars(&[1.0, 0.4, -0.3, 0.0, 0.9, 2.0]);
        let model = Model::Burgers;
        let set = fv_residuals_1d(&mesh, &states, NumericalFlux::Rusanov, &model).unwrap();
        let form = reconstruct_scheme(&mesh, &set).unwrap();
        for k in 0..mesh.cell_count() {
            let direct = NumericalFlux::Rusanov
                .evaluate(&model, 1.0, &states[k], &states[k + 1])
                .unwrap();
            assert!((form.interface_fluxes[k] - direct).norm_inf() < 1e-15);
        }
        let a = form.update(&mesh, &states, 0.01);
        let b = rd_step(&mesh, &states, &set, 0.01, &model).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((*x - *y).norm_inf() < 1e-14);
        }
    }
}
