use thiserror::Error;

use crate::schedule::SourcePos;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hilbert space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("matrix is not hermitian (max |H - H^dagger| = {max_deviation:.3e})")]
    NotHermitian { max_deviation: f64 },

    #[error("matrix is not unitary (max |U^dagger U - I| = {max_deviation:.3e})")]
    NotUnitary { max_deviation: f64 },

    #[error("operator is not diagonal on the given basis (largest off-diagonal magnitude {max_off_diagonal:.3e})")]
    NotDiagonal { max_off_diagonal: f64 },

    #[error("resonator is not in vacuum (population outside |0> = {population:.3e})")]
    ResonatorEntangled { population: f64 },

    #[error("fock truncation reached: population {population:.3e} on levels without a complete ladder (cutoff {fock_cutoff})")]
    Truncation { population: f64, fock_cutoff: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mixing angle undefined: E_c(1-2n_g) and 2E_J cos(pi f) both vanish")]
    DegeneratePoint,

    #[error("geometry parameters are required for this operation")]
    MissingGeometry,

    #[error("dispersive condition violated: |lambda/Delta| = {ratio:.3e} exceeds hard limit {limit:.3e}")]
    DispersiveViolation { ratio: f64, limit: f64 },

    #[error("{tier} tier cannot execute this segment: {reason}")]
    TierIncompatible { tier: String, reason: String },

    #[error("{pos}: {message}")]
    Parse { pos: SourcePos, message: String },

    #[error("{pos}: {message}")]
    Compile { pos: SourcePos, message: String },

    #[error("parameter file: {0}")]
    ParamFile(String),
}

impl Error {
    /// Errors caused by the simulated physics (truncation, entanglement with
    /// the bus, broken dispersive regime) rather than malformed input.
    pub fn is_physics(&self) -> bool {
        matches!(
            self,
            Error::ResonatorEntangled { .. }
                | Error::Truncation { .. }
                | Error::DispersiveViolation { .. }
                | Error::NotDiagonal { .. }
        )
    }

    pub fn position(&self) -> Option<SourcePos> {
        match self {
            Error::Parse { pos, .. } | Error::Compile { pos, .. } => Some(*pos),
            _ => None,
        }
    }
}
