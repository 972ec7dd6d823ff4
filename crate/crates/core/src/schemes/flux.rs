use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::Model;
use crate::state::State;

/// Two-point numerical fluxes in 1D.
///
/// Arguments are ordered by position (`left`, `right`); the signed normal
/// `n = ±1` multiplies the whole flux, so `F(-n; l, r) = -F(n; l, r)` and
/// `F(n; u, u) = f(u) n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericalFlux {
    Rusanov,
    Central,
    /// Exact upwinding; only valid for linear advection.
    UpwindAdvection,
}

impl NumericalFlux {
    pub fn evaluate(&self, model: &Model, normal: f64, left: &State, right: &State) -> Result<State> {
        let fl = model.flux(left)?;
        let fr = model.flux(right)?;
        let value = match self {
            NumericalFlux::Rusanov => {
                let alpha = model.max_wave_speed(left)?.max(model.max_wave_speed(right)?);
                0.5 * (fl + fr) - 0.5 * alpha * (*right - *left)
            }
            NumericalFlux::Central => 0.5 * (fl + fr),
            NumericalFlux::UpwindAdvection => match *model {
                Model::Advection { speed } if speed >= 0.0 => fl,
                Model::Advection { .. } => fr,
                _ => {
                    return Err(Error::Config(
                        "upwind-advection flux requires the advection model".into(),
                    ))
                }
            },
        };
        Ok(normal * value)
    }
}

impl FromStr for NumericalFlux {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rusanov" => Ok(NumericalFlux::Rusanov),
            "central" => Ok(NumericalFlux::Central),
            "upwind-advection" => Ok(NumericalFlux::UpwindAdvection),
            other => Err(Error::Config(format!("unknown numerical flux '{other}'"))),
        }
    }
}

impl fmt::Display for NumericalFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NumericalFlux::Rusanov => "rusanov",
            NumericalFlux::Central => "central",
            NumericalFlux::UpwindAdvection => "upwind-advection",
        })
    }
}

/// `½(f(l) + f(r)) n − ½ α (r − l) n`, `α` the larger of the two wave-speed bounds.
pub fn rusanov(normal: f64, left: &State, right: &State, model: &Model) -> Result<State> {
    NumericalFlux::Rusanov.evaluate(model, normal, left, right)
}

/// Numerical entropy flux of Rusanov type,
/// `½(g(l) + g(r)) n − ½ α (η(r) − η(l)) n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RusanovEntropyFlux;

impl RusanovEntropyFlux {
    pub fn evaluate(&self, model: &Model, normal: f64, left: &State, right: &State) -> Result<f64> {
        let pl = model.entropy_pair(left)?;
        let pr = model.entropy_pair(right)?;
        let alpha = model.max_wave_speed(left)?.max(model.max_wave_speed(right)?);
        Ok(normal * (0.5 * (pl.flux + pr.flux) - 0.5 * alpha * (pr.entropy - pl.entropy)))
    }
}
