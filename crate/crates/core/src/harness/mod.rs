//! Canned cases, exact solutions, the weak-form diagnostic, CSV output and
//! the command-line front end.

pub mod cases;
pub mod cli;
pub mod config;
pub mod exact;
pub mod output;
pub mod runner;
pub mod weak;

pub use cases::{Case, CaseId, SodDomain};
pub use cli::cli_run;
pub use config::{RunConfig, SchemeId};
pub use exact::{burgers_exact, exact_riemann_euler, BurgersInitial, RiemannSolution};
pub use runner::{convergence, run, ConvergenceTable, Layout, RunOutput};
pub use weak::{weak_residual_diagnostic, TestFunction, WeakReport};
