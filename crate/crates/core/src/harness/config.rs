use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::cases::{CaseId, SodDomain};
use crate::mesh::Boundary;
use crate::models::{Model, DEFAULT_GAMMA};
use crate::schemes::time::TimeScheme;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeId {
    FvRusanov,
    FvCentral,
    Supg,
    FvEntropyCorrected,
    NcEnergyCorrected,
    ActiveFlux,
    NcBurgers,
}

impl SchemeId {
    pub const ALL: [SchemeId; 7] = [
        SchemeId::FvRusanov,
        SchemeId::FvCentral,
        SchemeId::Supg,
        SchemeId::FvEntropyCorrected,
        SchemeId::NcEnergyCorrected,
        SchemeId::ActiveFlux,
        SchemeId::NcBurgers,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::FvRusanov => "fv-rusanov",
            SchemeId::FvCentral => "fv-central",
            SchemeId::Supg => "supg",
            SchemeId::FvEntropyCorrected => "fv-entropy-corrected",
            SchemeId::NcEnergyCorrected => "nc-energy-corrected",
            SchemeId::ActiveFlux => "active-flux",
            SchemeId::NcBurgers => "nc-burgers",
        }
    }

    /// Whether the update is a discrete conservation law.
    pub fn is_conservative(&self) -> bool {
        !matches!(self, SchemeId::NcBurgers)
    }
}

impl FromStr for SchemeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let known: Vec<&str> = SchemeId::ALL.iter().map(|c| c.name()).collect();
            Error::Config(format!("unknown scheme '{s}' (known: {})", known.join(", ")))
        })
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Active flux is unstable near CFL 0.8 under SSPRK3, so it keeps a lower
/// default than the integrator's.
pub const ACTIVE_FLUX_CFL: f64 = 0.4;
pub const DEFAULT_SUPG_TAU: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub case: CaseId,
    pub scheme: SchemeId,
    pub nx: usize,
    /// `None` takes the scheme's default, see [`RunConfig::cfl`].
    pub cfl: Option<f64>,
    /// `None` runs to the case's own end time.
    pub t_end: Option<f64>,
    pub gamma: f64,
    /// `None` keeps the case's boundary treatment.
    pub boundary: Option<Boundary>,
    pub time_scheme: TimeScheme,
    /// Apply the correction of the corrected schemes; off gives the base scheme.
    pub correct: bool,
    pub detector: bool,
    pub supg_tau: f64,
    pub sod_domain: SodDomain,
    pub seed: Option<u64>,
    pub snapshot_stride: usize,
    pub max_steps: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: CaseId::AdvectionSine,
            scheme: SchemeId::FvRusanov,
            nx: 100,
            cfl: None,
            t_end: None,
            gamma: DEFAULT_GAMMA,
            boundary: None,
            time_scheme: TimeScheme::Ssprk3,
            correct: true,
            detector: false,
            supg_tau: DEFAULT_SUPG_TAU,
            sod_domain: SodDomain::Unit,
            seed: None,
            snapshot_stride: 0,
            max_steps: None,
            out: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean '{value}' for '{key}'"))),
    }
}

impl RunConfig {
    /// Sets one `key = value` entry. Keys match the CLI flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "case" => self.case = value.parse()?,
            "scheme" => self.scheme = value.parse()?,
            "nx" => self.nx = parse(key, value)?,
            "cfl" => self.cfl = Some(parse(key, value)?),
            "tend" => self.t_end = Some(parse(key, value)?),
            "gamma" => self.gamma = parse(key, value)?,
            "boundary" => self.boundary = Some(value.parse()?),
            "time" => self.time_scheme = value.parse()?,
            "correct" => self.correct = parse_bool(key, value)?,
            "detector" => self.detector = parse_bool(key, value)?,
            "supg_tau" => self.supg_tau = parse(key, value)?,
            "domain" => self.sod_domain = value.parse()?,
            "seed" => self.seed = Some(parse(key, value)?),
            "snapshot_stride" => self.snapshot_stride = parse(key, value)?,
            "max_steps" => self.max_steps = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// The CFL number in effect: the configured one, else
    /// [`ACTIVE_FLUX_CFL`] for active flux and the integrator's default for
    /// everything else.
    pub fn cfl(&self) -> f64 {
        self.cfl.unwrap_or(match self.scheme {
            SchemeId::ActiveFlux => ACTIVE_FLUX_CFL,
            _ => self.time_scheme.default_cfl(),
        })
    }

    pub fn model(&self) -> Result<Model> {
        Ok(crate::harness::cases::Case::new(self.case, self.gamma)?.model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 {
            return Err(Error::Config(format!("nx must be at least 2, got {}", self.nx)));
        }
        let cfl = self.cfl();
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Config(format!("CFL must lie in (0, 1], got {cfl}")));
        }
        if let Some(t) = self.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tend must be finite and nonnegative, got {t}")));
            }
        }
        if !(self.supg_tau >= 0.0 && self.supg_tau.is_finite()) {
            return Err(Error::Config(format!(
                "supg_tau must be nonnegative, got {}",
                self.supg_tau
            )));
        }
        let model = self.model()?;
        match self.scheme {
            SchemeId::NcEnergyCorrected if !matches!(model, Model::Euler { .. }) => Err(Error::Config(format!(
                "scheme {} requires an Euler case, not {}",
                self.scheme, self.case
            ))),
            SchemeId::NcBurgers if model != Model::Burgers => Err(Error::Config(format!(
                "scheme {} requires a Burgers case, not {}",
                self.scheme, self.case
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_entries_then_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# sod study\ncase = sod\nscheme=active-flux\nnx = 200 # cells\ndetector = on\n")
            .unwrap();
        assert_eq!(c.case, CaseId::Sod);
        assert_eq!(c.scheme, SchemeId::ActiveFlux);
        assert_eq!(c.nx, 200);
        assert!(c.detector);
        c.set("nx", "50").unwrap();
        assert_eq!(c.nx, 50);
        c.validate().unwrap();
    }

    #[test]
    fn bad_entries_are_config_errors() {
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_text("nx 10"), Err(Error::Config(_))));
        assert!(matches!(c.set("colour", "red"), Err(Error::Config(_))));
        assert!(matches!(c.set("nx", "-3"), Err(Error::Config(_))));
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        ok.validate().unwrap();
        let bad = [
            RunConfig { nx: 1, ..ok.clone() },
            RunConfig {
                cfl: Some(0.0),
                ..ok.clone()
            },
            RunConfig {
                cfl: Some(1.5),
                ..ok.clone()
            },
            RunConfig {
                scheme: SchemeId::NcEnergyCorrected,
                ..ok.clone()
            },
            RunConfig {
                scheme: SchemeId::NcBurgers,
                case: CaseId::Sod,
                ..ok.clone()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        RunConfig {
            scheme: SchemeId::NcEnergyCorrected,
            case: CaseId::Sod,
            ..ok
        }
        .validate()
        .unwrap();
    }

    #[test]
    fn default_cfl_follows_scheme_and_integrator() {
        let c = RunConfig::default();
        assert_eq!(c.cfl(), 0.8);
        let euler = RunConfig {
            time_scheme: TimeScheme::ForwardEuler,
            ..c.clone()
        };
        assert_eq!(euler.cfl(), 0.4);
        let af = RunConfig {
            scheme: SchemeId::ActiveFlux,
            ..c.clone()
        };
        assert_eq!(af.cfl(), ACTIVE_FLUX_CFL);
        assert_eq!(RunConfig { cfl: Some(0.3), ..af }.cfl(), 0.3);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in SchemeId::ALL {
            assert_eq!(s.name().parse::<SchemeId>().unwrap(), s);
        }
    }
}
