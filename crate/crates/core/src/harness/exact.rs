//! Exact solutions used as oracles: the Euler Riemann problem for a
//! perfect gas and Burgers' equation for sine and Riemann data.

use crate::error::{Error, Result};
use crate::models::Primitive;

/// Solution of the Euler Riemann problem with data `left | right` at `x = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannSolution {
    pub gamma: f64,
    pub left: Primitive,
    pub right: Primitive,
    pub p_star: f64,
    pub u_star: f64,
}

fn sound_speed(gamma: f64, w: &Primitive) -> f64 {
    (gamma * w.pressure / w.density).sqrt()
}

/// `f_K(p)` and its derivative for the wave facing state `w`.
fn wave_function(gamma: f64, p: f64, w: &Primitive) -> (f64, f64) {
    let c = sound_speed(gamma, w);
    if p > w.pressure {
        let a = 2.0 / ((gamma + 1.0) * w.density);
        let b = (gamma - 1.0) / (gamma + 1.0) * w.pressure;
        let q = (a / (p + b)).sqrt();
        ((p - w.pressure) * q, q * (1.0 - 0.5 * (p - w.pressure) / (p + b)))
    } else {
        let e = (gamma - 1.0) / (2.0 * gamma);
        let ratio = p / w.pressure;
        let f = 2.0 * c / (gamma - 1.0) * (ratio.powf(e) - 1.0);
        let df = ratio.powf(-(gamma + 1.0) / (2.0 * gamma)) / (w.density * c);
        (f, df)
    }
}

/// Star-region pressure and velocity by a safeguarded Newton iteration on
/// `f_L(p) + f_R(p) + u_R − u_L = 0`, converged to `1e-12` relative.
pub fn exact_riemann_euler(left: Primitive, right: Primitive, gamma: f64) -> Result<RiemannSolution> {
    for w in [&left, &right] {
        if !(w.density > 0.0 && w.pressure > 0.0 && w.velocity.is_finite()) {
            return Err(Error::Oracle(format!("inadmissible Riemann data {w:?}")));
        }
    }
    let (cl, cr) = (sound_speed(gamma, &left), sound_speed(gamma, &right));
    let du = right.velocity - left.velocity;
    if 2.0 / (gamma - 1.0) * (cl + cr) <= du {
        return Err(Error::Oracle("the data generate vacuum".into()));
    }
    let g = |p: f64| {
        let (fl, dl) = wave_function(gamma, p, &left);
        let (fr, dr) = wave_function(gamma, p, &right);
        (fl + fr + du, dl + dr)
    };
    // two-rarefaction guess, which is exact when both waves are rarefactions
    let e = (gamma - 1.0) / (2.0 * gamma);
    let guess = ((cl + cr - 0.5 * (gamma - 1.0) * du) / (cl / left.pressure.powf(e) + cr / right.pressure.powf(e)))
        .powf(1.0 / e);
    // g is increasing in p; keep a bracket [lo, hi] with g(lo) < 0 < g(hi)
    let mut lo = 0.0;
    let mut hi = guess.max(left.pressure).max(right.pressure).max(1e-300);
    while g(hi).0 < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Oracle("star pressure bracket diverged".into()));
        }
    }
    let mut p = guess.clamp(1e-14 * hi, hi);
    for _ in 0..200 {
        let (val, der) = g(p);
        if val < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let mut next = p - val / der;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let change = (next - p).abs() / (0.5 * (next + p));
        p = next;
        if change < 1e-15 || hi - lo < 1e-15 * p {
            break;
        }
    }
    let (fl, _) = wave_function(gamma, p, &left);
    let (fr, _) = wave_function(gamma, p, &right);
    let u_star = 0.5 * (left.velocity + right.velocity) + 0.5 * (fr - fl);
    Ok(RiemannSolution {
        gamma,
        left,
        right,
        p_star: p,
        u_star,
    })
}

impl RiemannSolution {
    /// `f_L(p*) + f_R(p*) + u_R − u_L`.
    pub fn pressure_function_residual(&self) -> f64 {
        let (fl, _) = wave_function(self.gamma, self.p_star, &self.left);
        let (fr, _) = wave_function(self.gamma, self.p_star, &self.right);
        fl + fr + self.right.velocity - self.left.velocity
    }

    fn star_density(&self, w: &Primitive) -> f64 {
        let g = self.gamma;
        let ratio = self.p_star / w.pressure;
        if self.p_star > w.pressure {
            let k = (g - 1.0) / (g + 1.0);
            w.density * (ratio + k) / (k * ratio + 1.0)
        } else {
            w.density * ratio.powf(1.0 / g)
        }
    }

    pub fn star_densities(&self) -> (f64, f64) {
        (self.star_density(&self.left), self.star_density(&self.right))
    }

    /// Speed of the left shock, if the left wave is a shock.
    pub fn left_shock_speed(&self) -> Option<f64> {
        let g = self.gamma;
        (self.p_star > self.left.pressure).then(|| {
            let c = sound_speed(g, &self.left);
            self.left.velocity
                - c * ((g + 1.0) / (2.0 * g) * self.p_star / self.left.pressure + (g - 1.0) / (2.0 * g)).sqrt()
        })
    }

    pub fn right_shock_speed(&self) -> Option<f64> {
        let g = self.gamma;
        (self.p_star > self.right.pressure).then(|| {
            let c = sound_speed(g, &self.right);
            self.right.velocity
                + c * ((g + 1.0) / (2.0 * g) * self.p_star / self.right.pressure + (g - 1.0) / (2.0 * g)).sqrt()
        })
    }

    /// Self-similar solution at `ξ = x/t`.
    pub fn sample(&self, xi: f64) -> Primitive {
        let g = self.gamma;
        let (rho_l, rho_r) = self.star_densities();
        if xi <= self.u_star {
            let w = self.left;
            let c = sound_speed(g, &w);
            if let Some(s) = self.left_shock_speed() {
                return if xi <= s { w } else { self.star(rho_l) };
            }
            let head = w.velocity - c;
            let tail = self.u_star - c * (self.p_star / w.pressure).powf((g - 1.0) / (2.0 * g));
            if xi <= head {
                w
            } else if xi >= tail {
                self.star(rho_l)
            } else {
                let k = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (w.velocity - xi);
                Primitive {
                    density: w.density * k.powf(2.0 / (g - 1.0)),
                    velocity: 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * w.velocity + xi),
                    pressure: w.pressure * k.powf(2.0 * g / (g - 1.0)),
                }
            }
        } else {
            let w = self.right;
            let c = sound_speed(g, &w);
            if let Some(s) = self.right_shock_speed() {
                return if xi >= s { w } else { self.star(rho_r) };
            }
            let head = w.velocity + c;
            let tail = self.u_star + c * (self.p_star / w.pressure).powf((g - 1.0) / (2.0 * g));
            if xi >= head {
                w
            } else if xi <= tail {
                self.star(rho_r)
            } else {
                let k = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (w.velocity - xi);
                Primitive {
                    density: w.density * k.powf(2.0 / (g - 1.0)),
                    velocity: 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * w.velocity + xi),
                    pressure: w.pressure * k.powf(2.0 * g / (g - 1.0)),
                }
            }
        }
    }

    fn star(&self, density: f64) -> Primitive {
        Primitive {
            density,
            velocity: self.u_star,
            pressure: self.p_star,
        }
    }
}

/// Initial data with a known Burgers solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BurgersInitial {
    /// `u₀ = sin(πx)`, smooth until `t* = 1/π`.
    Sine,
    Riemann {
        left: f64,
        right: f64,
        x0: f64,
    },
}

pub const BURGERS_SINE_BREAKDOWN: f64 = 1.0 / std::f64::consts::PI;

pub fn burgers_exact(init: BurgersInitial, x: f64, t: f64) -> Result<f64> {
    use std::f64::consts::PI;
    if t < 0.0 {
        return Err(Error::Oracle(format!("negative time {t}")));
    }
    match init {
        BurgersInitial::Sine => {
            if t >= BURGERS_SINE_BREAKDOWN {
                return Err(Error::Oracle(format!(
                    "sine data are discontinuous at t = {t} >= 1/π; no exact solution branch"
                )));
            }
            // x = ξ + t sin(πξ) has exactly one root, and it lies in [x − t, x + t]
            let h = |xi: f64| xi + t * (PI * xi).sin() - x;
            let (mut lo, mut hi) = (x - t, x + t);
            let mut xi = x - t * (PI * x).sin();
            for _ in 0..100 {
                let val = h(xi);
                if val == 0.0 {
                    break;
                }
                if val < 0.0 {
                    lo = xi;
                } else {
                    hi = xi;
                }
                let mut next = xi - val / (1.0 + PI * t * (PI * xi).cos());
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if (next - xi).abs() < 1e-16 * (1.0 + xi.abs()) {
                    xi = next;
                    break;
                }
                xi = next;
            }
            Ok((PI * xi).sin())
        }
        BurgersInitial::Riemann { left, right, x0 } => {
            let y = x - x0;
            if t == 0.0 {
                return Ok(if y < 0.0 { left } else { right });
            }
            Ok(if left > right {
                let s = 0.5 * (left + right);
                if y < s * t {
                    left
                } else {
                    right
                }
            } else if y <= left * t {
                left
            } else if y >= right * t {
                right
            } else {
                y / t
            })
        }
    }
}
