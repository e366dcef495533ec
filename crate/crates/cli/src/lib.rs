//! Scenario-driven front end for `ripsnet`: reads scenario files, runs the
//! localization pipelines and writes JSON reports, SVG figures and
//! complexity sweeps.

pub mod report;
pub mod scenario;
pub mod svg;
pub mod sweep;

pub use report::{run_scenario, Report};
pub use scenario::{Layer, Pipeline, Scenario};
pub use svg::emit_svg;
pub use sweep::{run_complexity_sweep, SweepTable};

/// Overrides the output directory of every run.
pub const OUT_DIR_ENV: &str = "RIPSNET_OUT_DIR";

pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] ripsnet::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ripsnet::Error as E;
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Io(_) => exit::IO,
            CliError::Core(e) => match e {
                E::InvalidParameter(_)
                | E::RadiusConstraint { .. }
                | E::HoleSwallowsNetwork { .. }
                | E::RasterTooCoarse { .. } => exit::VALIDATION,
                _ => exit::INCONCLUSIVE,
            },
        }
    }
}
