//! 1D grids with dual control volumes, and the small per-element DOF graphs
//! on which flux recovery operates.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Transmissive,
}

impl FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "transmissive" => Ok(Boundary::Transmissive),
            other => Err(Error::Config(format!("unknown boundary kind '{other}'"))),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Transmissive => "transmissive",
        })
    }
}

/// Nodes `x_0 < ... < x_n`, cells `[x_i, x_{i+1}]` and the dual control
/// volumes around the nodes.
///
/// Degrees of freedom sit at nodes. With periodic boundaries the last node
/// is identified with the first, so there are `n` DOFs; otherwise `n + 1`
/// with half-width end volumes.
#[derive(Clone, Debug)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    boundary: Boundary,
    volumes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Config(format!(
                "a mesh needs at least 2 cells, got {}",
                nodes.len().saturating_sub(1)
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "mesh nodes must be finite and strictly increasing".into(),
            ));
        }
        let n = nodes.len() - 1;
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let volumes = match boundary {
            Boundary::Periodic => (0..n).map(|j| 0.5 * (widths[(j + n - 1) % n] + widths[j])).collect(),
            Boundary::Transmissive => (0..=n)
                .map(|j| {
                    let left = if j > 0 { widths[j - 1] } else { 0.0 };
                    let right = if j < n { widths[j] } else { 0.0 };
                    0.5 * (left + right)
                })
                .collect(),
        };
        Ok(Self {
            nodes,
            boundary,
            volumes,
        })
    }

    pub fn uniform(a: f64, b: f64, cells: usize, boundary: Boundary) -> Result<Self> {
        if cells < 2 {
            return Err(Error::Config(format!("a mesh needs at least 2 cells, got {cells}")));
        }
        if !(a < b) {
            return Err(Error::Config(format!("empty interval [{a}, {b}]")));
        }
        let h = (b - a) / cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| a + i as f64 * h).collect();
        nodes[cells] = b;
        Self::new(nodes, boundary)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn dof_count(&self) -> usize {
        self.volumes.len()
    }

    /// Positions of the DOFs (the nodes, minus the duplicated periodic end).
    pub fn dof_positions(&self) -> &[f64] {
        &self.nodes[..self.dof_count()]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn volume(&self, dof: usize) -> f64 {
        self.volumes[dof]
    }

    /// Left and right DOF of cell `k`.
    pub fn cell_dofs(&self, k: usize) -> [usize; 2] {
        [k, (k + 1) % self.dof_count()]
    }

    pub fn cell_width(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn cell_center(&self, k: usize) -> f64 {
        0.5 * (self.nodes[k] + self.nodes[k + 1])
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.cell_count()).map(|k| self.cell_center(k)).collect()
    }

    pub fn min_width(&self) -> f64 {
        (0..self.cell_count())
            .map(|k| self.cell_width(k))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.end() - self.start()
    }

    /// Control-volume bounds `(x_{j-1/2}, x_{j+1/2})` of a DOF, clipped to the
    /// domain for transmissive meshes. Periodic volumes may wrap, in which
    /// case the left bound is returned below the domain start.
    pub fn volume_bounds(&self, dof: usize) -> (f64, f64) {
        let x = self.nodes[dof];
        let n = self.cell_count();
        let right = if dof < n { 0.5 * (x + self.nodes[dof + 1]) } else { x };
        let left = if dof > 0 {
            0.5 * (self.nodes[dof - 1] + x)
        } else if self.boundary == Boundary::Periodic {
            x - 0.5 * self.cell_width(n - 1)
        } else {
            x
        };
        (left, right)
    }
}

/// Supported element graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Segment,
    Path(usize),
    Triangle,
}

/// DOFs of one element connected by direct (oriented) edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementGraph {
    dofs: usize,
    edges: Vec<(usize, usize)>,
}

impl ElementGraph {
    /// Graph from an explicit list of direct edges `(tail, head)`.
    /// Connectivity is not required here; [`crate::recovery::build_laplacian`]
    /// rejects disconnected graphs.
    pub fn from_edges(dofs: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if dofs == 0 {
            return Err(Error::Structure("graph without vertices".into()));
        }
        for &(a, b) in &edges {
            if a >= dofs || b >= dofs || a == b {
                return Err(Error::Structure(format!("invalid edge ({a}, {b})")));
            }
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            if edges[..i].iter().any(|&(c, d)| (c, d) == (a, b) || (c, d) == (b, a)) {
                return Err(Error::Structure(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self { dofs, edges })
    }

    /// Segments and paths orient edges by increasing DOF index; the triangle
    /// is oriented cyclically 0 -> 1 -> 2 -> 0.
    pub fn new(kind: GraphKind) -> Result<Self> {
        match kind {
            GraphKind::Segment => Self::from_edges(2, vec![(0, 1)]),
            GraphKind::Path(n) if n >= 2 => Self::from_edges(n, (0..n - 1).map(|i| (i, i + 1)).collect()),
            GraphKind::Path(n) => Err(Error::Structure(format!("path needs at least 2 vertices, got {n}"))),
            GraphKind::Triangle => Self::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]),
        }
    }

    pub fn dof_count(&self) -> usize {
        self.dofs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Orientation sign: `1` if `a -> b` is a direct edge, `-1` if `b -> a`
    /// is, `0` when `a` and `b` are not adjacent.
    pub fn sign(&self, a: usize, b: usize) -> i8 {
        for &(t, h) in &self.edges {
            if (t, h) == (a, b) {
                return 1;
            }
            if (t, h) == (b, a) {
                return -1;
            }
        }
        0
    }

    /// Node-by-edge incidence matrix: `+1` at the tail, `-1` at the head.
    pub fn incidence(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.dofs, self.edges.len());
        for (e, &(t, h)) in self.edges.iter().enumerate() {
            a[(t, e)] = 1.0;
            a[(h, e)] = -1.0;
        }
        a
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.dofs];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(a, b) in &self.edges {
                let next = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.dofs
    }
}

/// One flux value per direct edge. The flux along the reversed edge is the
/// negation of the stored value.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFluxSet {
    edges: Vec<(usize, usize)>,
    values: Vec<State>,
}

impl EdgeFluxSet {
    pub fn new(graph: &ElementGraph, values: Vec<State>) -> Self {
        assert_eq!(graph.edge_count(), values.len());
        Self {
            edges: graph.edges().to_vec(),
            values,
        }
    }

    pub fn values(&self) -> &[State] {
        &self.values
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Flux from `a` to `b`, if they share an edge.
    pub fn flux(&self, a: usize, b: usize) -> Option<State> {
        self.edges.iter().zip(&self.values).find_map(|(&(t, h), v)| {
            if (t, h) == (a, b) {
                Some(*v)
            } else if (t, h) == (b, a) {
                Some(-*v)
            } else {
                None
            }
        })
    }

    /// `(A f)_dof`: net flux leaving `dof` through the element's edges.
    pub fn divergence(&self, dof: usize, components: usize) -> State {
        let mut out = State::zeros(components);
        for (&(t, h), v) in self.edges.iter().zip(&self.values) {
            if t == dof {
                out += *v;
            } else if h == dof {
                out -= *v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_nodes_and_volumes() {
        let mesh = Mesh1D::uniform(-1.0, 1.0, 4, Boundary::Transmissive).unwrap();
        assert_eq!(mesh.nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(mesh.volumes(), &[0.25, 0.5, 0.5, 0.5, 0.25]);
        assert_eq!(mesh.dof_count(), 5);
        let total: f64 = mesh.volumes().iter().sum();
        assert_eq!(total, 2.0);
    }

    #[test]
    fn periodic_volumes_wrap() {
        let mesh = Mesh1D::uniform(-1.0, 1.0, 4, Boundary::Periodic).unwrap();
        assert_eq!(mesh.dof_count(), 4);
        assert_eq!(mesh.volumes(), &[0.5; 4]);
        assert_eq!(mesh.volumes().iter().sum::<f64>(), 2.0);
        assert_eq!(mesh.cell_dofs(3), [3, 0]);
        assert_eq!(mesh.volume_bounds(0), (-1.25, -0.75));
    }

    #[test]
    fn nonuniform_periodic_volumes_sum_to_length() {
        let mesh = Mesh1D::new(vec![0.0, 0.1, 0.5, 0.6, 1.3], Boundary::Periodic).unwrap();
        assert!((mesh.volumes().iter().sum::<f64>() - 1.3).abs() < 1e-15);
        assert!(mesh.volumes().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn too_few_cells_is_a_config_error() {
        assert!(matches!(
            Mesh1D::uniform(0.0, 1.0, 1, Boundary::Periodic),
            Err(Error::Config(_))
        ));
        assert!(Mesh1D::new(vec![0.0, 1.0, 1.0], Boundary::Periodic).is_err());
    }

    #[test]
    fn segment_incidence() {
        let g = ElementGraph::new(GraphKind::Segment).unwrap();
        let a = g.incidence();
        assert_eq!(a.shape(), (2, 1));
        assert_eq!((a[(0, 0)], a[(1, 0)]), (1.0, -1.0));
    }

    #[test]
    fn triangle_incidence_rows_sum_to_zero() {
        let g = ElementGraph::new(GraphKind::Triangle).unwrap();
        let a = g.incidence();
        assert_eq!(a.shape(), (3, 3));
        for row in a.row_iter() {
            assert_eq!(row.sum(), 0.0);
        }
        assert_eq!(g.sign(2, 0), 1);
        assert_eq!(g.sign(0, 2), -1);
    }

    #[test]
    fn path_middle_node_touches_both_edges() {
        let g = ElementGraph::new(GraphKind::Path(3)).unwrap();
        let a = g.incidence();
        assert_eq!(a.ncols(), 2);
        assert_eq!((a[(1, 0)], a[(1, 1)]), (-1.0, 1.0));
        assert!(g.is_tree());
        assert!(ElementGraph::new(GraphKind::Path(1)).is_err());
    }

    #[test]
    fn incidence_columns_sum_to_zero() {
        for kind in [GraphKind::Segment, GraphKind::Path(5), GraphKind::Triangle] {
            let a = ElementGraph::new(kind).unwrap().incidence();
            for col in a.column_iter() {
                assert_eq!(col.sum(), 0.0);
                assert_eq!(col.iter().filter(|&&v| v == 1.0).count(), 1);
                assert_eq!(col.iter().filter(|&&v| v == -1.0).count(), 1);
            }
        }
    }

    #[test]
    fn disconnected_graph_detected() {
        let g = ElementGraph::from_edges(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        assert!(ElementGraph::from_edges(3, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn edge_fluxes_are_antisymmetric() {
        let g = ElementGraph::new(GraphKind::Triangle).unwrap();
        let set = EdgeFluxSet::new(&g, vec![State::scalar(1.0), State::scalar(2.0), State::scalar(3.0)]);
        assert_eq!(set.flux(1, 0).unwrap()[0], -1.0);
        assert_eq!(set.flux(0, 2).unwrap()[0], -3.0);
        assert_eq!(set.divergence(0, 1)[0], 1.0 - 3.0);
    }
}
