//! Least-squares correction for several scalar constraints at once.
//!
//! Each constraint `k` asks `Σ_σ w_σ^k·Φ̃_σ = T_k`. With
//! `Φ̃_σ = Φ_σ + Σ_m α_m (w_σ^m − w̄^m)` this becomes `G α = d` where
//! `G_km = Σ_σ (w_σ^k − w̄^k)·(w_σ^m − w̄^m)` and `d_k = T_k − Σ_σ w_σ^k·Φ_σ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::schemes::residuals::ResidualSet;
use crate::state::State;

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// One weight vector per local DOF.
    pub weights: Vec<State>,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiCorrection {
    pub alphas: Vec<f64>,
    pub corrections: Vec<State>,
    /// `|G α − d|₂`; nonzero only for inconsistent constraints.
    pub residual_norm: f64,
}

fn mean(v: &[State]) -> State {
    let n = v.len() as f64;
    v.iter().fold(v[0] * 0.0, |acc, w| acc + *w * (1.0 / n))
}

pub fn correct_element_multi(residuals: &[State], constraints: &[Constraint]) -> Result<MultiCorrection> {
    let dofs = residuals.len();
    if constraints.len() + 1 > dofs {
        return Err(Error::Config(format!(
            "{} constraints on an element with {dofs} DOFs (at most {} allowed)",
            constraints.len(),
            dofs.saturating_sub(1)
        )));
    }
    if constraints.iter().any(|c| c.weights.len() != dofs) {
        return Err(Error::Config("constraint weights do not match the element DOFs".into()));
    }
    let deviations: Vec<Vec<State>> = constraints
        .iter()
        .map(|c| {
            let m = mean(&c.weights);
            c.weights.iter().map(|w| *w - m).collect()
        })
        .collect();
    let k = constraints.len();
    let g = DMatrix::from_fn(k, k, |i, j| {
        deviations[i]
            .iter()
            .zip(&deviations[j])
            .map(|(a, b)| a.dot(b))
            .sum::<f64>()
    });
    let d = DVector::from_iterator(
        k,
        constraints
            .iter()
            .map(|c| c.target - c.weights.iter().zip(residuals).map(|(w, phi)| w.dot(phi)).sum::<f64>()),
    );
    let eps = 1e-12 * g.amax().max(f64::MIN_POSITIVE);
    let alpha = g
        .clone()
        .svd(true, true)
        .solve(&d, eps)
        .map_err(|e| Error::Config(format!("least-squares solve failed: {e}")))?;
    let residual_norm = (&g * &alpha - &d).norm();
    if residual_norm > 1e-12 * d.norm().max(1.0) {
        log::warn!("constraint system is inconsistent: least-squares residual {residual_norm:e}");
    }
    let mut corrections = vec![residuals[0] * 0.0; dofs];
    for (m, dev) in deviations.iter().enumerate() {
        for (r, w) in corrections.iter_mut().zip(dev) {
            *r += *w * alpha[m];
        }
    }
    Ok(MultiCorrection {
        alphas: alpha.iter().copied().collect(),
        corrections,
        residual_norm,
    })
}

/// Applies [`correct_element_multi`] element by element; `constraints[k]`
/// belongs to element `k`.
pub fn multi_constraint_correction(
    residuals: &ResidualSet,
    constraints: &[Vec<Constraint>],
) -> Result<(ResidualSet, Vec<MultiCorrection>)> {
    if constraints.len() != residuals.elements.len() {
        return Err(Error::Config(format!(
            "{} constraint sets for {} elements",
            constraints.len(),
            residuals.elements.len()
        )));
    }
    let mut out = residuals.clone();
    let mut reports = Vec::with_capacity(constraints.len());
    for (el, cs) in out.elements.iter_mut().zip(constraints) {
        let c = correct_element_multi(&el.residuals, cs)?;
        for (phi, r) in el.residuals.iter_mut().zip(&c.corrections) {
            *phi += *r;
        }
        reports.push(c);
    }
    Ok((out, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrections::entropy::correct_element;

    fn s(x: f64) -> State {
        State::scalar(x)
    }

    #[test]
    fn single_constraint_matches_entropy_correction() {
        let phi = [s(0.4), s(-0.1), s(-0.2)];
        let v = [s(1.0), s(-0.5), s(0.3)];
        let ghat = 2.0;
        let e = correct_element(0, &phi, &v, ghat, 1.0).unwrap();
        let m = correct_element_multi(
            &phi,
            &[Constraint {
                weights: v.to_vec(),
                target: ghat,
            }],
        )
        .unwrap();
        assert!((m.alphas[0] - e.alpha).abs() < 1e-13);
        for (a, b) in m.corrections.iter().zip(&e.corrections) {
            assert!((a[0] - b[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn duplicated_constraint_gives_the_same_correction() {
        let phi = [s(0.4), s(-0.1), s(-0.2)];
        let c = Constraint {
            weights: vec![s(1.0), s(-0.5), s(0.3)],
            target: 2.0,
        };
        let one = correct_element_multi(&phi, std::slice::from_ref(&c)).unwrap();
        let two = correct_element_multi(&phi, &[c.clone(), c]).unwrap();
        for (a, b) in one.corrections.iter().zip(&two.corrections) {
            assert!((a[0] - b[0]).abs() < 1e-12);
        }
        assert!(two.residual_norm < 1e-12);
    }

    #[test]
    fn corrections_sum_to_zero() {
        let phi = [s(0.1), s(0.2), s(-0.3)];
        let c = correct_element_multi(
            &phi,
            &[
                Constraint {
                    weights: vec![s(1.0), s(2.0), s(5.0)],
                    target: 1.0,
                },
                Constraint {
                    weights: vec![s(0.5), s(2.0), s(4.5)],
                    target: -1.0,
                },
            ],
        )
        .unwrap();
        let total: f64 = c.corrections.iter().map(|r| r[0]).sum();
        assert!(total.abs() < 1e-13);
    }

    /// Minimum-norm solution of the stacked system
    /// `[conservation rows; constraint rows] r = [0; d]` via the pseudo-inverse.
    fn pseudo_inverse_correction(phi: &[State], constraints: &[Constraint]) -> Vec<State> {
        let comps = phi[0].len();
        let n = phi.len() * comps;
        let rows = comps + constraints.len();
        let mut a = DMatrix::zeros(rows, n);
        let mut b = DVector::zeros(rows);
        for c in 0..comps {
            for dof in 0..phi.len() {
                a[(c, dof * comps + c)] = 1.0;
            }
        }
        for (k, con) in constraints.iter().enumerate() {
            for (dof, w) in con.weights.iter().enumerate() {
                for c in 0..comps {
                    a[(comps + k, dof * comps + c)] = w[c];
                }
            }
            b[comps + k] = con.target - con.weights.iter().zip(phi).map(|(w, p)| w.dot(p)).sum::<f64>();
        }
        let r = a.pseudo_inverse(1e-12).unwrap() * b;
        crate::state::unflatten(r.as_slice(), comps)
    }

    #[test]
    fn matches_the_pseudo_inverse_of_the_stacked_system() {
        let v = |x: [f64; 3]| State::from_slice(&x);
        let phi = [
            v([0.3, -0.1, 0.7]),
            v([-0.2, 0.4, 0.1]),
            v([0.05, 0.0, -0.6]),
            v([0.1, 0.2, 0.3]),
        ];
        let constraints = [
            Constraint {
                weights: vec![
                    v([1.0, 0.2, -0.3]),
                    v([0.4, -1.1, 0.5]),
                    v([-0.7, 0.3, 0.9]),
                    v([0.2, 0.8, -0.4]),
                ],
                target: 0.25,
            },
            Constraint {
                weights: vec![
                    v([0.0, 1.0, 0.0]),
                    v([0.5, 0.5, 0.5]),
                    v([-1.0, 0.2, 0.1]),
                    v([0.3, -0.6, 1.2]),
                ],
                target: -0.4,
            },
        ];
        let ours = correct_element_multi(&phi, &constraints).unwrap();
        let oracle = pseudo_inverse_correction(&phi, &constraints);
        for (a, b) in ours.corrections.iter().zip(&oracle) {
            assert!((*a - *b).norm_inf() < 1e-12, "{a:?} vs {b:?}");
        }
        for con in &constraints {
            let produced: f64 = con
                .weights
                .iter()
                .zip(phi.iter().zip(&ours.corrections))
                .map(|(w, (p, r))| w.dot(&(*p + *r)))
                .sum();
            assert!((produced - con.target).abs() < 1e-12);
        }
    }

    #[test]
    fn too_many_constraints_are_rejected() {
        let c = Constraint {
            weights: vec![s(1.0), s(2.0)],
            target: 0.0,
        };
        assert!(matches!(
            correct_element_multi(&[s(0.0), s(0.0)], &[c.clone(), c]),
            Err(Error::Config(_))
        ));
    }
}
