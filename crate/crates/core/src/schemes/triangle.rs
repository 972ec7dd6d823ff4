//! Vertex-centred finite volume residuals on a single triangle.
//!
//! The dual cell of vertex `σ` inside the triangle is bounded by the two
//! internal segments joining edge midpoints to the centroid. The residual
//! sent to `σ` is the numerical flux leaving that sub-polygon, minus the
//! consistency terms `f(u_σ)·n`.

use crate::error::{Error, Result};
use crate::schemes::residuals::ElementResidual;
use crate::state::State;

pub type Vec2 = [f64; 2];

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn scale(a: Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// Scalar conservation laws in the plane, `u_t + div f(u) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlanarModel {
    Advection {
        velocity: Vec2,
    },
    /// `f(u) = (u²/2, u²/2)`.
    Burgers,
}

impl PlanarModel {
    pub fn normal_flux(&self, u: f64, n: Vec2) -> f64 {
        match *self {
            PlanarModel::Advection { velocity } => u * dot(velocity, n),
            PlanarModel::Burgers => 0.5 * u * u * (n[0] + n[1]),
        }
    }

    /// Bound on `|f'(u)·n̂|` for unit normals.
    pub fn max_wave_speed(&self, u: f64) -> f64 {
        match *self {
            PlanarModel::Advection { velocity } => norm(velocity),
            PlanarModel::Burgers => u.abs() * std::f64::consts::SQRT_2,
        }
    }

    /// Rusanov flux leaving the `own` side through a scaled normal `n`:
    /// `½(f(u_own) + f(u_other))·n − ½ α |n| (u_other − u_own)`.
    pub fn rusanov(&self, n: Vec2, own: f64, other: f64) -> f64 {
        let alpha = self.max_wave_speed(own).max(self.max_wave_speed(other));
        0.5 * (self.normal_flux(own, n) + self.normal_flux(other, n)) - 0.5 * alpha * norm(n) * (other - own)
    }
}

/// Dual geometry of one triangle.
///
/// `n12`, `n23`, `n31` are the scaled normals of the internal segments,
/// oriented from the first vertex's sub-cell into the second's. `vertex`
/// holds the scaled inward normals of the edges opposite each vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleGeometry {
    pub n12: Vec2,
    pub n23: Vec2,
    pub n31: Vec2,
    pub vertex: [Vec2; 3],
}

impl TriangleGeometry {
    /// Validates the closed-polygon constraints: for every sub-cell the
    /// outward internal normals plus half the opposite inward normal vanish,
    /// and the three vertex normals sum to zero.
    pub fn new(n12: Vec2, n23: Vec2, n31: Vec2, vertex: [Vec2; 3]) -> Result<Self> {
        let g = Self { n12, n23, n31, vertex };
        let size = [n12, n23, n31, vertex[0], vertex[1], vertex[2]]
            .iter()
            .map(|v| norm(*v))
            .fold(0.0, f64::max);
        if !(size > 0.0 && size.is_finite()) {
            return Err(Error::Geometry("degenerate normals".into()));
        }
        let tol = 1e-12 * size;
        let closure = add(add(vertex[0], vertex[1]), vertex[2]);
        if norm(closure) > tol {
            return Err(Error::Geometry(format!(
                "vertex normals do not close: residual {:e}",
                norm(closure)
            )));
        }
        for (sigma, &n) in vertex.iter().enumerate() {
            let out = g.internal_normals(sigma);
            let residual = add(add(out[0].1, out[1].1), scale(n, 0.5));
            if norm(residual) > tol {
                return Err(Error::Geometry(format!(
                    "dual cell of vertex {} is not closed: residual {:e}",
                    sigma + 1,
                    norm(residual)
                )));
            }
        }
        Ok(g)
    }

    pub fn from_vertices(p: [Vec2; 3]) -> Result<Self> {
        let area2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        if !(area2.abs() > 0.0 && area2.is_finite()) {
            return Err(Error::Geometry("degenerate triangle".into()));
        }
        let centroid = scale(add(add(p[0], p[1]), p[2]), 1.0 / 3.0);
        // normal of segment [midpoint(a,b), centroid], scaled by its length,
        // pointing from a towards b
        let internal = |a: usize, b: usize| -> Vec2 {
            let mid = scale(add(p[a], p[b]), 0.5);
            let s = sub(centroid, mid);
            let n = [s[1], -s[0]];
            if dot(n, sub(p[b], p[a])) >= 0.0 {
                n
            } else {
                scale(n, -1.0)
            }
        };
        let inward = |sigma: usize| -> Vec2 {
            let (a, b) = ((sigma + 1) % 3, (sigma + 2) % 3);
            let e = sub(p[b], p[a]);
            let n = [e[1], -e[0]];
            if dot(n, sub(p[sigma], p[a])) >= 0.0 {
                n
            } else {
                scale(n, -1.0)
            }
        };
        Self::new(
            internal(0, 1),
            internal(1, 2),
            internal(2, 0),
            [inward(0), inward(1), inward(2)],
        )
    }

    /// The two internal segments around vertex `sigma`, as
    /// `(neighbour, outward scaled normal)`.
    pub fn internal_normals(&self, sigma: usize) -> [(usize, Vec2); 2] {
        let neg = |v: Vec2| scale(v, -1.0);
        match sigma {
            0 => [(1, self.n12), (2, neg(self.n31))],
            1 => [(2, self.n23), (0, neg(self.n12))],
            2 => [(0, self.n31), (1, neg(self.n23))],
            _ => panic!("triangle vertex index {sigma} out of range"),
        }
    }
}

/// Residuals `Φ_σ = Σ_γ [f̂_{n_γ}(u_σ, u_γ⁻) − f(u_σ)·n_γ]` over the internal
/// segments around each vertex, with boundary parts `f(u_σ)·n_σ/2`.
pub fn triangle_fv_residuals(states: [f64; 3], geometry: &TriangleGeometry, model: &PlanarModel) -> ElementResidual {
    let residuals = (0..3)
        .map(|sigma| {
            let own = states[sigma];
            let phi: f64 = geometry
                .internal_normals(sigma)
                .iter()
                .map(|&(other, n)| model.rusanov(n, own, states[other]) - model.normal_flux(own, n))
                .sum();
            State::scalar(phi)
        })
        .collect();
    let boundary = (0..3)
        .map(|sigma| State::scalar(model.normal_flux(states[sigma], scale(geometry.vertex[sigma], 0.5))))
        .collect();
    ElementResidual {
        dofs: vec![0, 1, 2],
        residuals,
        boundary,
    }
}

/// Internal-edge Rusanov fluxes `(f̂_12, f̂_23, f̂_31)` of the dual cells.
pub fn triangle_edge_fluxes(states: [f64; 3], geometry: &TriangleGeometry, model: &PlanarModel) -> [f64; 3] {
    [
        model.rusanov(geometry.n12, states[0], states[1]),
        model.rusanov(geometry.n23, states[1], states[2]),
        model.rusanov(geometry.n31, states[2], states[0]),
    ]
}
