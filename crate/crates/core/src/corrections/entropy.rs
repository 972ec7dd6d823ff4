//! Entropy correction of residuals.
//!
//! An element is entropy stable when its entropy production margin
//! `Σ_σ v_σ·Φ_σ − ∮ ĝ` is nonnegative. When it is not, every residual is
//! shifted by `α (v_σ − v̄)`, which keeps `Σ_σ Φ_σ` unchanged and raises the
//! margin by `α Σ_σ |v_σ − v̄|²`.

use crate::error::{Error, Result};
use crate::models::Model;
use crate::schemes::flux::RusanovEntropyFlux;
use crate::schemes::residuals::{ElementResidual, ResidualSet};
use crate::state::State;

/// `α` is clamped at this multiple of the local wave speed.
pub const ALPHA_CLAMP_FACTOR: f64 = 1e3;

/// `Σ |v_σ − v̄|² < DEGENERACY_THRESHOLD · |v̄|²` counts as a degenerate element.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct ElementCorrection {
    pub element: usize,
    pub alpha: f64,
    /// `r_σ = α (v_σ − v̄)` per local DOF.
    pub corrections: Vec<State>,
    /// Margin `Σ v·Φ − ∮ĝ` before and after the correction.
    pub pre_margin: f64,
    pub post_margin: f64,
    pub clamped: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrectionReport {
    pub elements: Vec<ElementCorrection>,
}

impl CorrectionReport {
    pub fn alpha_max(&self) -> f64 {
        self.elements.iter().map(|e| e.alpha).fold(0.0, f64::max)
    }

    pub fn min_pre_margin(&self) -> f64 {
        self.elements.iter().map(|e| e.pre_margin).fold(f64::INFINITY, f64::min)
    }

    pub fn min_post_margin(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| e.post_margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn corrected_count(&self) -> usize {
        self.elements.iter().filter(|e| e.alpha > 0.0).count()
    }

    pub fn clamped_count(&self) -> usize {
        self.elements.iter().filter(|e| e.clamped).count()
    }
}

pub fn entropy_variables(states: &[State], model: &Model) -> Result<Vec<State>> {
    states.iter().map(|u| Ok(model.entropy_pair(u)?.variables)).collect()
}

/// `Ψ_σ^K = v_σ·Φ_σ^K` for every element and local DOF.
pub fn entropy_residuals(residuals: &ResidualSet, states: &[State], model: &Model) -> Result<Vec<Vec<f64>>> {
    let v = entropy_variables(states, model)?;
    Ok(residuals
        .elements
        .iter()
        .map(|el| {
            el.dofs
                .iter()
                .zip(&el.residuals)
                .map(|(&d, phi)| v[d].dot(phi))
                .collect()
        })
        .collect())
}

/// `∮_{∂K} ĝ` on a segment element. Both traces at each end belong to the
/// continuous solution, so the integral is `ĝ(+1; u_r, u_r) + ĝ(−1; u_l, u_l)`.
pub fn boundary_entropy_flux(
    el: &ElementResidual,
    states: &[State],
    model: &Model,
    flux: &RusanovEntropyFlux,
) -> Result<f64> {
    let [l, r] = match el.dofs[..] {
        [l, r] => [l, r],
        _ => {
            return Err(Error::Structure(format!(
                "entropy flux integral needs a segment element, got {} DOFs",
                el.dofs.len()
            )))
        }
    };
    Ok(flux.evaluate(model, 1.0, &states[r], &states[r])? + flux.evaluate(model, -1.0, &states[l], &states[l])?)
}

/// Corrects one element given its residuals, entropy variables and
/// `∮ ĝ`. `wave_speed` sets the clamp on `α`.
pub fn correct_element(
    element: usize,
    residuals: &[State],
    variables: &[State],
    boundary_entropy: f64,
    wave_speed: f64,
) -> Result<ElementCorrection> {
    correct_element_scaled(element, residuals, variables, boundary_entropy, wave_speed, 0.0)
}

/// [`correct_element`] with the magnitude of the quantities the margin is
/// computed from, such as `|v|·|f(u)| + |g|` at the element's DOFs. On an
/// element whose entropy variables coincide the exact margin vanishes, so
/// a deficit at roundoff of that magnitude is left alone instead of
/// reported.
pub fn correct_element_scaled(
    element: usize,
    residuals: &[State],
    variables: &[State],
    boundary_entropy: f64,
    wave_speed: f64,
    roundoff_scale: f64,
) -> Result<ElementCorrection> {
    let n = variables.len() as f64;
    let mut mean = variables[0] * 0.0;
    for v in variables {
        mean += *v * (1.0 / n);
    }
    let mut deviations: Vec<State> = variables.iter().map(|v| *v - mean).collect();
    // recentre so the rounding error of `mean` does not survive into Σ dᵢ
    let mut residual_mean = variables[0] * 0.0;
    for d in &deviations {
        residual_mean += *d * (1.0 / n);
    }
    for d in &mut deviations {
        *d -= residual_mean;
    }
    let spread: f64 = deviations.iter().map(State::norm_sq).sum();
    let production: f64 = variables.iter().zip(residuals).map(|(v, phi)| v.dot(phi)).sum();
    let pre_margin = production - boundary_entropy;

    let zero = || vec![variables[0] * 0.0; variables.len()];
    let unchanged = |clamped| ElementCorrection {
        element,
        alpha: 0.0,
        corrections: zero(),
        pre_margin,
        post_margin: pre_margin,
        clamped,
    };
    if pre_margin >= 0.0 {
        return Ok(unchanged(false));
    }
    let terms: f64 = variables
        .iter()
        .zip(residuals)
        .map(|(v, phi)| v.zip_with(phi, |a, b| (a * b).abs()).iter().sum::<f64>())
        .sum();
    let scale = terms
        .max(boundary_entropy.abs())
        .max(roundoff_scale)
        .max(f64::MIN_POSITIVE);
    if spread <= DEGENERACY_THRESHOLD * mean.norm_sq() || spread == 0.0 {
        // `|Σ (v_σ − v̄)·Φ_σ| ≤ √spread ‖Φ‖`, so a deficit below that bound
        // cannot be told apart from zero on this element.
        let unresolved = spread.sqrt() * residuals.iter().map(State::norm_sq).sum::<f64>().sqrt();
        if -pre_margin <= 1e-13 * scale + unresolved {
            return Ok(unchanged(false));
        }
        return Err(Error::CorrectionImpossible {
            element,
            defect: -pre_margin,
        });
    }
    let mut alpha = -pre_margin / spread;
    let limit = ALPHA_CLAMP_FACTOR * wave_speed;
    let clamped = alpha > limit;
    if clamped {
        log::warn!("entropy correction on element {element}: alpha {alpha:e} clamped to {limit:e}");
        alpha = limit;
    }
    Ok(ElementCorrection {
        element,
        alpha,
        corrections: deviations.iter().map(|d| *d * alpha).collect(),
        pre_margin,
        post_margin: pre_margin + alpha * spread,
        clamped,
    })
}

/// Applies [`correct_element`] to every element of a 1D residual set.
pub fn entropy_correction(
    residuals: &ResidualSet,
    states: &[State],
    model: &Model,
    flux: &RusanovEntropyFlux,
) -> Result<(ResidualSet, CorrectionReport)> {
    let pairs = states
        .iter()
        .map(|u| model.entropy_pair(u))
        .collect::<Result<Vec<_>>>()?;
    let v: Vec<State> = pairs.iter().map(|p| p.variables).collect();
    let magnitude = states
        .iter()
        .zip(&pairs)
        .map(|(u, p)| Ok(p.variables.norm_inf() * model.flux(u)?.norm_inf() + p.flux.abs()))
        .collect::<Result<Vec<f64>>>()?;
    let mut elements = Vec::with_capacity(residuals.elements.len());
    let mut report = CorrectionReport::default();
    for (k, el) in residuals.elements.iter().enumerate() {
        let local_v: Vec<State> = el.dofs.iter().map(|&d| v[d]).collect();
        let speed = el
            .dofs
            .iter()
            .map(|&d| model.max_wave_speed(&states[d]))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let ghat = boundary_entropy_flux(el, states, model, flux)?;
        let scale = el.dofs.iter().map(|&d| magnitude[d]).sum();
        let c = correct_element_scaled(k, &el.residuals, &local_v, ghat, speed, scale)?;
        let mut corrected = el.clone();
        for (phi, r) in corrected.residuals.iter_mut().zip(&c.corrections) {
            *phi += *r;
        }
        elements.push(corrected);
        report.elements.push(c);
    }
    Ok((ResidualSet::new(elements, residuals.components()), report))
}
