//! Hyperbolic systems in one space dimension: linear advection, Burgers and
//! the ideal-gas Euler equations.
//!
//! Each model bundles its flux, flux Jacobian, entropy pair, a map to
//! auxiliary variables (primitive variables for Euler, identity otherwise)
//! and a bound on the characteristic speeds.

use crate::error::{Error, Result};
use crate::state::{SmallMat, State};

/// Lower bound on density and internal energy for admissible Euler states.
pub const ADMISSIBILITY_FLOOR: f64 = 1e-12;

pub const DEFAULT_GAMMA: f64 = 1.4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Advection { speed: f64 },
    Burgers,
    Euler { gamma: f64 },
}

/// Entropy `eta`, entropy variables `v = d eta / du` and entropy flux `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyPair {
    pub entropy: f64,
    pub variables: State,
    pub flux: f64,
}

/// Eigendecomposition `J = R diag(values) L` with `L = R^-1`.
#[derive(Clone, Copy, Debug)]
pub struct EigenSplit {
    pub values: State,
    pub right: SmallMat,
    pub left: SmallMat,
}

impl EigenSplit {
    fn part(&self, keep: impl Fn(f64) -> f64) -> SmallMat {
        let lambda = SmallMat::diagonal(&self.values.map(keep));
        self.right.matmul(&lambda).matmul(&self.left)
    }

    /// `J+`, built from the nonnegative eigenvalues.
    pub fn positive_part(&self) -> SmallMat {
        self.part(|l| l.max(0.0))
    }

    /// `J-`, built from the nonpositive eigenvalues.
    pub fn negative_part(&self) -> SmallMat {
        self.part(|l| l.min(0.0))
    }
}

/// Primitive Euler quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    pub density: f64,
    pub velocity: f64,
    pub pressure: f64,
}

impl Model {
    pub fn euler(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Model::Euler { gamma })
    }

    pub fn components(&self) -> usize {
        match self {
            Model::Advection { .. } | Model::Burgers => 1,
            Model::Euler { .. } => 3,
        }
    }

    pub fn component_names(&self) -> &'static [&'static str] {
        match self {
            Model::Advection { .. } | Model::Burgers => &["u"],
            Model::Euler { .. } => &["density", "momentum", "energy"],
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Model::Euler { gamma } => Some(gamma),
            _ => None,
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.components() == 1
    }

    pub fn check(&self, u: &State) -> Result<()> {
        if u.len() != self.components() {
            return Err(Error::Domain {
                state: *u,
                reason: "wrong component count",
            });
        }
        if !u.is_finite() {
            return Err(Error::Domain {
                state: *u,
                reason: "non-finite component",
            });
        }
        if let Model::Euler { .. } = self {
            let (rho, m, energy) = (u[0], u[1], u[2]);
            if rho <= ADMISSIBILITY_FLOOR {
                return Err(Error::Domain {
                    state: *u,
                    reason: "density not positive",
                });
            }
            if energy - 0.5 * m * m / rho <= ADMISSIBILITY_FLOOR {
                return Err(Error::Domain {
                    state: *u,
                    reason: "internal energy not positive",
                });
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self, u: &State) -> bool {
        self.check(u).is_ok()
    }

    /// Primitive variables of an admissible Euler state. Panics for scalar models.
    pub fn primitive(&self, u: &State) -> Result<Primitive> {
        let Model::Euler { gamma } = *self else {
            panic!("primitive variables requested for a scalar model");
        };
        self.check(u)?;
        let velocity = u[1] / u[0];
        Ok(Primitive {
            density: u[0],
            velocity,
            pressure: (gamma - 1.0) * (u[2] - 0.5 * u[1] * velocity),
        })
    }

    pub fn conserved(&self, w: &Primitive) -> State {
        let gamma = self.gamma().expect("conserved() requires the Euler model");
        State::from_slice(&[
            w.density,
            w.density * w.velocity,
            w.pressure / (gamma - 1.0) + 0.5 * w.density * w.velocity * w.velocity,
        ])
    }

    pub fn flux(&self, u: &State) -> Result<State> {
        self.check(u)?;
        Ok(match *self {
            Model::Advection { speed } => State::scalar(speed * u[0]),
            Model::Burgers => State::scalar(0.5 * u[0] * u[0]),
            Model::Euler { .. } => {
                let w = self.primitive(u)?;
                State::from_slice(&[u[1], u[1] * w.velocity + w.pressure, (u[2] + w.pressure) * w.velocity])
            }
        })
    }

    /// Analytic flux Jacobian `df/du`.
    pub fn jacobian(&self, u: &State) -> Result<SmallMat> {
        self.check(u)?;
        Ok(match *self {
            Model::Advection { speed } => SmallMat::from_rows(&[&[speed]]),
            Model::Burgers => SmallMat::from_rows(&[&[u[0]]]),
            Model::Euler { gamma } => {
                let w = self.primitive(u)?;
                let v = w.velocity;
                let enthalpy = (u[2] + w.pressure) / u[0];
                let gm1 = gamma - 1.0;
                SmallMat::from_rows(&[
                    &[0.0, 1.0, 0.0],
                    &[0.5 * (gamma - 3.0) * v * v, (3.0 - gamma) * v, gm1],
                    &[v * (0.5 * gm1 * v * v - enthalpy), enthalpy - gm1 * v * v, gamma * v],
                ])
            }
        })
    }

    /// Entropy pair. Scalar laws use the square entropy; Euler uses
    /// `eta = -rho (ln p - gamma ln rho)` with flux `g = v eta`.
    pub fn entropy_pair(&self, u: &State) -> Result<EntropyPair> {
        self.check(u)?;
        Ok(match *self {
            Model::Advection { speed } => EntropyPair {
                entropy: 0.5 * u[0] * u[0],
                variables: State::scalar(u[0]),
                flux: 0.5 * speed * u[0] * u[0],
            },
            Model::Burgers => EntropyPair {
                entropy: 0.5 * u[0] * u[0],
                variables: State::scalar(u[0]),
                flux: u[0] * u[0] * u[0] / 3.0,
            },
            Model::Euler { gamma } => {
                let w = self.primitive(u)?;
                let s = w.pressure.ln() - gamma * w.density.ln();
                let entropy = -w.density * s;
                let gm1 = gamma - 1.0;
                let beta = w.density / w.pressure;
                EntropyPair {
                    entropy,
                    variables: State::from_slice(&[
                        gamma - s - 0.5 * gm1 * beta * w.velocity * w.velocity,
                        gm1 * beta * w.velocity,
                        -gm1 * beta,
                    ]),
                    flux: w.velocity * entropy,
                }
            }
        })
    }

    pub fn entropy(&self, u: &State) -> Result<f64> {
        Ok(self.entropy_pair(u)?.entropy)
    }

    pub fn max_wave_speed(&self, u: &State) -> Result<f64> {
        self.check(u)?;
        Ok(match *self {
            Model::Advection { speed } => speed.abs(),
            Model::Burgers => u[0].abs(),
            Model::Euler { gamma } => {
                let w = self.primitive(u)?;
                w.velocity.abs() + (gamma * w.pressure / w.density).sqrt()
            }
        })
    }

    /// Map `psi` from conserved to auxiliary variables.
    pub fn to_aux(&self, u: &State) -> Result<State> {
        self.check(u)?;
        Ok(match self {
            Model::Euler { .. } => {
                let w = self.primitive(u)?;
                State::from_slice(&[w.density, w.velocity, w.pressure])
            }
            _ => *u,
        })
    }

    /// Inverse map `psi^-1` from auxiliary to conserved variables.
    pub fn from_aux(&self, w: &State) -> Result<State> {
        let u = match self {
            Model::Euler { .. } => {
                if w.len() != 3 {
                    return Err(Error::Domain {
                        state: *w,
                        reason: "wrong component count",
                    });
                }
                self.conserved(&Primitive {
                    density: w[0],
                    velocity: w[1],
                    pressure: w[2],
                })
            }
            _ => *w,
        };
        self.check(&u)?;
        Ok(u)
    }

    /// `d psi / du` at a conserved state.
    pub fn aux_map_jacobian(&self, u: &State) -> Result<SmallMat> {
        self.check(u)?;
        Ok(match *self {
            Model::Euler { gamma } => {
                let v = u[1] / u[0];
                let gm1 = gamma - 1.0;
                SmallMat::from_rows(&[
                    &[1.0, 0.0, 0.0],
                    &[-v / u[0], 1.0 / u[0], 0.0],
                    &[0.5 * gm1 * v * v, -gm1 * v, gm1],
                ])
            }
            _ => SmallMat::identity(1),
        })
    }

    /// Jacobian of the quasi-linear system in auxiliary variables,
    /// `J = psi'(u) f'(u) psi'(u)^-1`, evaluated at auxiliary state `w`.
    pub fn aux_jacobian(&self, w: &State) -> Result<SmallMat> {
        let u = self.from_aux(w)?;
        Ok(match *self {
            Model::Euler { gamma } => {
                let (rho, v, p) = (w[0], w[1], w[2]);
                SmallMat::from_rows(&[&[v, rho, 0.0], &[0.0, v, 1.0 / rho], &[0.0, gamma * p, v]])
            }
            _ => self.jacobian(&u)?,
        })
    }

    /// Eigendecomposition of [`Model::aux_jacobian`].
    pub fn aux_eigen(&self, w: &State) -> Result<EigenSplit> {
        let u = self.from_aux(w)?;
        match *self {
            Model::Euler { gamma } => {
                let (rho, v, p) = (w[0], w[1], w[2]);
                let c = (gamma * p / rho).sqrt();
                let right = SmallMat::from_rows(&[&[rho, 1.0, rho], &[-c, 0.0, c], &[rho * c * c, 0.0, rho * c * c]]);
                let left = right.try_inverse().ok_or(Error::Domain {
                    state: *w,
                    reason: "degenerate eigenvector basis",
                })?;
                Ok(EigenSplit {
                    values: State::from_slice(&[v - c, v, v + c]),
                    right,
                    left,
                })
            }
            _ => {
                let j = self.jacobian(&u)?;
                Ok(EigenSplit {
                    values: State::scalar(j.get(0, 0)),
                    right: SmallMat::identity(1),
                    left: SmallMat::identity(1),
                })
            }
        }
    }
}
