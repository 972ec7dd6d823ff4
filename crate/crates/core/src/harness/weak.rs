//! Weak-form defect `∫∫ (φ_t u + φ_x f(u)) dx dt + ∫ φ(x, 0) u₀ dx` of a
//! computed solution, tested against smooth compactly supported bumps.
//!
//! For a scheme that converges to a weak solution the defect tends to zero
//! under refinement; a scheme with the wrong shock speed leaves a defect of
//! order one near the shock.

use crate::error::{Error, Result};
use crate::harness::cases::{gauss_integral, Case, CaseId};
use crate::models::Model;
use crate::schemes::time::SolutionRecord;
use crate::state::State;

/// Snapshots required inside the time support of every test function.
pub const MIN_SNAPSHOTS: usize = 8;

fn bump(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - s * s;
    let b = (1.0 - 1.0 / q).exp();
    (b, -2.0 * s / (q * q) * b)
}

/// `φ(x, t) = B((x − x_c)/r_x) B((t − t_c)/r_t)` with `B(s) = exp(1 − 1/(1 − s²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunction {
    pub center_x: f64,
    pub center_t: f64,
    pub radius_x: f64,
    pub radius_t: f64,
}

impl TestFunction {
    /// `(φ, φ_x, φ_t)`.
    pub fn eval(&self, x: f64, t: f64) -> (f64, f64, f64) {
        let (bx, dbx) = bump((x - self.center_x) / self.radius_x);
        let (bt, dbt) = bump((t - self.center_t) / self.radius_t);
        (bx * bt, dbx * bt / self.radius_x, bx * dbt / self.radius_t)
    }

    /// Three placements: along the shock path `x = t/2` for the Burgers
    /// Riemann problem, otherwise spread across the middle of the domain.
    pub fn family(case: &Case, t_end: f64) -> Vec<TestFunction> {
        let (a, b) = case.domain;
        let len = b - a;
        match case.id {
            CaseId::BurgersRiemann => [0.3, 0.5, 0.7]
                .iter()
                .map(|&f| TestFunction {
                    center_x: 0.5 * f * t_end,
                    center_t: f * t_end,
                    radius_x: 0.3 * len / 2.0,
                    radius_t: 0.25 * t_end,
                })
                .collect(),
            _ => [0.35, 0.5, 0.65]
                .iter()
                .map(|&f| TestFunction {
                    center_x: a + f * len,
                    center_t: 0.5 * t_end,
                    radius_x: 0.25 * len,
                    radius_t: 0.4 * t_end,
                })
                .collect(),
        }
    }
}

/// Piecewise-linear interpolation of snapshot values between `positions`.
fn interpolate(positions: &[f64], values: &[State], x: f64) -> State {
    let i = positions.partition_point(|p| *p <= x);
    if i == 0 {
        return values[0];
    }
    if i >= positions.len() {
        return values[positions.len() - 1];
    }
    let s = (x - positions[i - 1]) / (positions[i] - positions[i - 1]);
    values[i - 1] * (1.0 - s) + values[i] * s
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakReport {
    /// Largest component defect for each test function.
    pub defects: Vec<f64>,
}

impl WeakReport {
    pub fn max(&self) -> f64 {
        self.defects.iter().copied().fold(0.0, f64::max)
    }
}

/// Spatial integral of `φ_t u + φ_x f(u)` at one snapshot.
fn space_integral(
    record: &SolutionRecord,
    values: &[State],
    model: &Model,
    phi: &TestFunction,
    t: f64,
    pieces: usize,
) -> Result<State> {
    let lo = phi.center_x - phi.radius_x;
    let hi = phi.center_x + phi.radius_x;
    gauss_integral(lo, hi, pieces, &|x| {
        let u = interpolate(&record.positions, values, x);
        let (_, px, pt) = phi.eval(x, t);
        Ok(u * pt + model.flux(&u)? * px)
    })
}

pub fn weak_residual_diagnostic(record: &SolutionRecord, model: &Model, family: &[TestFunction]) -> Result<WeakReport> {
    let snaps = &record.snapshots;
    let (x_min, x_max) = (record.positions[0], record.positions[record.positions.len() - 1]);
    let t_final = record.final_time();
    // quadrature resolves the data: at least four Gauss pieces per DOF spacing
    let spacing = (x_max - x_min) / (record.positions.len() - 1).max(1) as f64;
    let mut defects = Vec::with_capacity(family.len());
    for phi in family {
        if phi.center_t + phi.radius_t > t_final + 1e-12 || phi.center_t - phi.radius_t < -1e-12 {
            return Err(Error::Diagnostic(format!(
                "test function time support [{}, {}] leaves the run interval [0, {t_final}]",
                phi.center_t - phi.radius_t,
                phi.center_t + phi.radius_t
            )));
        }
        let inside = snaps
            .iter()
            .filter(|s| (s.time - phi.center_t).abs() < phi.radius_t)
            .count();
        if inside < MIN_SNAPSHOTS {
            return Err(Error::Diagnostic(format!(
                "only {inside} snapshots inside the test function support; at least {MIN_SNAPSHOTS} needed"
            )));
        }
        let pieces = ((8.0 * phi.radius_x / spacing).ceil() as usize).max(16);
        let mut total = State::zeros(model.components());
        let mut prev: Option<(f64, State)> = None;
        for s in snaps {
            let value = space_integral(record, &s.values, model, phi, s.time, pieces)?;
            if let Some((t0, v0)) = prev {
                total += (v0 + value) * (0.5 * (s.time - t0));
            }
            prev = Some((s.time, value));
        }
        let first = &snaps[0];
        let initial = gauss_integral(phi.center_x - phi.radius_x, phi.center_x + phi.radius_x, pieces, &|x| {
            Ok(interpolate(&record.positions, &first.values, x) * phi.eval(x, first.time).0)
        })?;
        total += initial;
        defects.push(total.norm_inf());
    }
    Ok(WeakReport { defects })
}
