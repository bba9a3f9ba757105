//! Config-driven experiment runners for the two-qubit dissipative
//! simulator: single propagations, parallel parameter sweeps, spectrum
//! scans, coalescence reports, and built-in figure reproduction, all
//! emitting CSV.

pub mod csvout;
pub mod runner;
pub mod spec;

/// Failures split by exit code: validation problems (config, paths,
/// arguments) exit 2, numerical failures during computation exit 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<epsim_core::Error> for CliError {
    fn from(e: epsim_core::Error) -> Self {
        use epsim_core::Error as E;
        match &e {
            E::NonConvergence { .. } | E::NonFiniteState { .. } | E::InvalidState(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
