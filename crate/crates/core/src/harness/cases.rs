use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::exact::{
    burgers_exact, exact_riemann_euler, BurgersInitial, RiemannSolution, BURGERS_SINE_BREAKDOWN,
};
use crate::mesh::{Boundary, Mesh1D};
use crate::models::{Model, Primitive};
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseId {
    AdvectionSine,
    BurgersSine,
    BurgersRiemann,
    Sod,
    ShuOsher,
    EulerDensityWave,
}

impl CaseId {
    pub const ALL: [CaseId; 6] = [
        CaseId::AdvectionSine,
        CaseId::BurgersSine,
        CaseId::BurgersRiemann,
        CaseId::Sod,
        CaseId::ShuOsher,
        CaseId::EulerDensityWave,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseId::AdvectionSine => "advection-sine",
            CaseId::BurgersSine => "burgers-sine",
            CaseId::BurgersRiemann => "burgers-riemann",
            CaseId::Sod => "sod",
            CaseId::ShuOsher => "shu-osher",
            CaseId::EulerDensityWave => "euler-density-wave",
        }
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let known: Vec<&str> = CaseId::ALL.iter().map(|c| c.name()).collect();
            Error::Config(format!("unknown case '{s}' (known: {})", known.join(", ")))
        })
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A canned problem: model, domain, boundary treatment, initial data and,
/// where one exists, the exact solution.
#[derive(Clone, Debug)]
pub struct Case {
    pub id: CaseId,
    pub model: Model,
    pub domain: (f64, f64),
    pub boundary: Boundary,
    pub t_end: f64,
    riemann: Option<(RiemannSolution, f64)>,
}

pub const SOD_LEFT: Primitive = Primitive {
    density: 1.0,
    velocity: 0.0,
    pressure: 1.0,
};
pub const SOD_RIGHT: Primitive = Primitive {
    density: 0.125,
    velocity: 0.0,
    pressure: 0.1,
};
pub const SHU_OSHER_LEFT: Primitive = Primitive {
    density: 3.857143,
    velocity: 2.629369,
    pressure: 10.3333333,
};

/// Where the Sod interface sits: `[0, 1]` split at `0.5`, or the centered
/// `[−0.5, 0.5]` split at `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SodDomain {
    #[default]
    Unit,
    Centered,
}

impl FromStr for SodDomain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" | "0,1" => Ok(SodDomain::Unit),
            "centered" | "-0.5,0.5" => Ok(SodDomain::Centered),
            other => Err(Error::Config(format!(
                "unknown Sod domain '{other}' (use unit or centered)"
            ))),
        }
    }
}

impl Case {
    pub fn new(id: CaseId, gamma: f64) -> Result<Self> {
        Self::with_sod_domain(id, gamma, SodDomain::Unit)
    }

    pub fn with_sod_domain(id: CaseId, gamma: f64, sod: SodDomain) -> Result<Self> {
        let euler = || Model::euler(gamma);
        let case = |model, domain, boundary, t_end| Case {
            id,
            model,
            domain,
            boundary,
            t_end,
            riemann: None,
        };
        Ok(match id {
            CaseId::AdvectionSine => case(Model::Advection { speed: 1.0 }, (-1.0, 1.0), Boundary::Periodic, 2.0),
            CaseId::BurgersSine => case(Model::Burgers, (-1.0, 1.0), Boundary::Periodic, 0.25 / PI),
            CaseId::BurgersRiemann => case(Model::Burgers, (-1.0, 1.0), Boundary::Transmissive, 1.0),
            CaseId::Sod => {
                let domain = match sod {
                    SodDomain::Unit => (0.0, 1.0),
                    SodDomain::Centered => (-0.5, 0.5),
                };
                let mut c = case(euler()?, domain, Boundary::Transmissive, 0.2);
                let x0 = 0.5 * (domain.0 + domain.1);
                c.riemann = Some((exact_riemann_euler(SOD_LEFT, SOD_RIGHT, gamma)?, x0));
                c
            }
            CaseId::ShuOsher => case(euler()?, (-5.0, 5.0), Boundary::Transmissive, 1.8),
            CaseId::EulerDensityWave => case(euler()?, (-1.0, 1.0), Boundary::Periodic, 2.0),
        })
    }

    pub fn mesh(&self, cells: usize, boundary: Option<Boundary>) -> Result<Mesh1D> {
        Mesh1D::uniform(self.domain.0, self.domain.1, cells, boundary.unwrap_or(self.boundary))
    }

    /// Time after which no smooth exact solution exists, if any.
    pub fn breakdown_time(&self) -> Option<f64> {
        (self.id == CaseId::BurgersSine).then_some(BURGERS_SINE_BREAKDOWN)
    }

    fn conserved(&self, w: Primitive) -> State {
        self.model.conserved(&w)
    }

    /// Initial data as a conserved state at `x`.
    pub fn initial(&self, x: f64) -> State {
        match self.id {
            CaseId::AdvectionSine | CaseId::BurgersSine => State::scalar((PI * x).sin()),
            CaseId::BurgersRiemann => State::scalar(if x < 0.0 { 1.0 } else { 0.0 }),
            CaseId::Sod => {
                let (solution, x0) = self.riemann.expect("Sod case carries its Riemann solution");
                self.conserved(if x < x0 { solution.left } else { solution.right })
            }
            CaseId::ShuOsher => self.conserved(if x < -4.0 {
                SHU_OSHER_LEFT
            } else {
                Primitive {
                    density: 1.0 + 0.2 * (5.0 * x).sin(),
                    velocity: 0.0,
                    pressure: 1.0,
                }
            }),
            CaseId::EulerDensityWave => self.conserved(density_wave(x)),
        }
    }

    /// Exact conserved state at `(x, t)`.
    pub fn exact(&self, x: f64, t: f64) -> Result<State> {
        let (a, b) = self.domain;
        let wrap = |y: f64| a + (y - a).rem_euclid(b - a);
        match self.id {
            CaseId::AdvectionSine => Ok(self.initial(wrap(x - t))),
            CaseId::EulerDensityWave => Ok(self.initial(wrap(x - t))),
            CaseId::BurgersSine => burgers_exact(BurgersInitial::Sine, x, t).map(State::scalar),
            CaseId::BurgersRiemann => burgers_exact(
                BurgersInitial::Riemann {
                    left: 1.0,
                    right: 0.0,
                    x0: 0.0,
                },
                x,
                t,
            )
            .map(State::scalar),
            CaseId::Sod => {
                let (solution, x0) = self.riemann.expect("Sod case carries its Riemann solution");
                if t <= 0.0 {
                    return Ok(self.initial(x));
                }
                Ok(self.conserved(solution.sample((x - x0) / t)))
            }
            CaseId::ShuOsher => Err(Error::Oracle("shu-osher has no closed-form solution".into())),
        }
    }

    /// Mean of `f` over `[lo, hi]`. The interval is split at the domain's
    /// discontinuities so that the Gauss rule sees smooth pieces.
    pub fn average_of(&self, lo: f64, hi: f64, f: impl Fn(f64) -> Result<State>) -> Result<State> {
        let mut cuts = vec![lo];
        for d in self.discontinuities() {
            if d > lo && d < hi {
                cuts.push(d);
            }
        }
        cuts.push(hi);
        let mut total = State::zeros(self.model.components());
        for w in cuts.windows(2) {
            total += gauss_integral(w[0], w[1], 4, &f)?;
        }
        Ok(total * (1.0 / (hi - lo)))
    }

    fn discontinuities(&self) -> Vec<f64> {
        match self.id {
            CaseId::BurgersRiemann => vec![0.0],
            CaseId::Sod => vec![self.riemann.map_or(0.5, |r| r.1)],
            CaseId::ShuOsher => vec![-4.0],
            _ => Vec::new(),
        }
    }

    /// Initial data averaged over the dual control volumes of `mesh`.
    pub fn nodal_initial(&self, mesh: &Mesh1D) -> Result<Vec<State>> {
        (0..mesh.dof_count())
            .map(|j| {
                let (lo, hi) = mesh.volume_bounds(j);
                if hi - lo <= 0.0 {
                    Ok(self.initial(mesh.nodes()[j]))
                } else {
                    self.average_of(lo, hi, |x| Ok(self.initial(x)))
                }
            })
            .collect()
    }

    /// Initial cell averages of `mesh`.
    pub fn cell_initial(&self, mesh: &Mesh1D) -> Result<Vec<State>> {
        (0..mesh.cell_count())
            .map(|k| self.average_of(mesh.nodes()[k], mesh.nodes()[k + 1], |x| Ok(self.initial(x))))
            .collect()
    }

    /// Initial point values at the DOF nodes. The value at a jump is the
    /// mean of its one-sided limits.
    pub fn point_initial(&self, mesh: &Mesh1D) -> Vec<State> {
        mesh.dof_positions()
            .iter()
            .map(|&x| {
                if self.discontinuities().iter().any(|d| (d - x).abs() < 1e-14) {
                    let eps = 1e-12 * (1.0 + x.abs());
                    (self.initial(x - eps) + self.initial(x + eps)) * 0.5
                } else {
                    self.initial(x)
                }
            })
            .collect()
    }
}

fn density_wave(x: f64) -> Primitive {
    Primitive {
        density: 1.0 + 0.2 * (PI * x).sin(),
        velocity: 1.0,
        pressure: 1.0,
    }
}

const GAUSS_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Composite three-point Gauss rule with `pieces` sub-intervals.
pub fn gauss_integral(lo: f64, hi: f64, pieces: usize, f: &impl Fn(f64) -> Result<State>) -> Result<State> {
    let h = (hi - lo) / pieces as f64;
    let mut total: Option<State> = None;
    for i in 0..pieces {
        let mid = lo + (i as f64 + 0.5) * h;
        for (xi, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let v = f(mid + 0.5 * h * xi)? * (0.5 * h * w);
            total = Some(match total {
                Some(t) => t + v,
                None => v,
            });
        }
    }
    Ok(total.expect("at least one quadrature piece"))
}
