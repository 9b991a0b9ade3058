//! Simulation and protocol verification for superconducting charge qubits
//! sharing a transmission-line resonator as a data bus.
//!
//! Units: `hbar = 1`; every Hamiltonian entry is an angular frequency and
//! time is its inverse. SI input is converted once, in [`device`] and
//! [`params`].
//!
//! Basis ordering: qubit 0 is the most significant tensor factor and the
//! resonator the least significant; see [`space::HilbertSpace`].

pub mod analytic;
pub mod device;
pub mod error;
pub mod hamiltonian;
pub mod json;
pub mod metrics;
pub mod operator;
pub mod params;
pub mod protocols;
pub mod schedule;
pub mod space;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
pub use hamiltonian::{BusConfig, BusQubit};
pub use operator::{HermitianOperator, UnitaryOperator};
pub use schedule::{PulseSchedule, Segment, Tier};
pub use space::{HilbertSpace, Level};
pub use state::StateVector;

pub use nalgebra;
pub use num_complex;
pub use num_complex::Complex64;
