//! Parameter files.
//!
//! A parameter file is one JSON object with exactly one of two keys.
//!
//! Effective form, the four numbers the protocols depend on, in any
//! consistent angular-frequency unit:
//!
//! ```json
//! {"effective": {
//!    "omega": 1.0,                 // resonator frequency
//!    "fock_cutoff": 4,             // optional, default 4
//!    "lambda": 0.05,               // optional schedule binding, default |lambda| of qubit 0
//!    "qubits": [{"Omega": 1.3, "lambda": 0.05, "eta": 0.0}]   // eta optional
//! }}
//! ```
//!
//! SI form, one device design shared by all qubits, each parked at its own
//! operating point. Energies in joules, lengths in metres:
//!
//! ```json
//! {"si": {
//!    "C_J": 3e-16, "C_g": 1e-16, "E_J": 3.3e-24,
//!    "geometry": {"S": 1e-12, "d": 1e-6, "l": 0.01, "L": 1e-6, "C_line": 1e-10, "k": 1},
//!    "fock_cutoff": 4,
//!    "qubits": [{"n_g": 0.49, "flux_ratio": 0.3}]
//! }}
//! ```
//!
//! SI values are converted to rad/s once, here. The resonator frequency is
//! the geometry's mode `k` and each qubit's `(Omega, eta, lambda)` follows
//! from its operating point.

use serde::{Deserialize, Serialize};

use crate::device::{
    charging_energy, coupling_prefactor, joules_to_angular, mode_frequency, splitting, DeviceParams, EffectiveQubit,
    GeometryParams,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{BusConfig, BusQubit, DEFAULT_FOCK_CUTOFF};

/// The shipped dimensionless defaults: `omega = 1`, `lambda = 0.05`,
/// `Omega_k = 1 + 0.3 k` for `k = 1, 2, 3`, cutoff 4.
pub const DEFAULT_PARAMS_JSON: &str = include_str!("../data/default_params.json");

fn default_cutoff() -> usize {
    DEFAULT_FOCK_CUTOFF
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveParams {
    pub omega: f64,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub qubits: Vec<BusQubit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPoint {
    pub n_g: f64,
    pub flux_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiParams {
    #[serde(rename = "C_J")]
    pub c_j: f64,
    #[serde(rename = "C_g")]
    pub c_g: f64,
    /// Josephson energy in joules.
    #[serde(rename = "E_J")]
    pub e_j: f64,
    pub geometry: GeometryParams,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
    pub qubits: Vec<OperatingPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamFile {
    Effective(EffectiveParams),
    Si(SiParams),
}

/// Derived quantities of one SI qubit, angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitReport {
    pub n_g: f64,
    pub flux_ratio: f64,
    pub splitting: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub eta: f64,
    pub lambda: f64,
    pub outside_charge_regime: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceReport {
    pub e_c_joules: f64,
    pub e_c: f64,
    pub e_j: f64,
    pub omega_k: f64,
    /// `lambda / (sin(pi f) cos(eta))`, common to all qubits.
    pub coupling_prefactor: f64,
    pub qubits: Vec<QubitReport>,
}

impl ParamFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::ParamFile(e.to_string()))?;
        p.bus_config()?;
        Ok(p)
    }

    pub fn default_params() -> Self {
        Self::from_json(DEFAULT_PARAMS_JSON).expect("shipped defaults are valid")
    }

    pub fn bus_config(&self) -> Result<BusConfig> {
        match self {
            ParamFile::Effective(e) => BusConfig::new(e.omega, e.qubits.clone(), e.fock_cutoff),
            ParamFile::Si(si) => {
                let report = si.device_report()?;
                let qubits = report.qubits.iter().map(|q| BusQubit::new(q.omega, q.lambda).with_eta(q.eta)).collect();
                BusConfig::new(report.omega_k, qubits, si.fock_cutoff)
            }
        }
    }

    /// Value bound to `lambda` when compiling schedules.
    pub fn schedule_lambda(&self) -> Result<f64> {
        let explicit = match self {
            ParamFile::Effective(e) => e.lambda,
            ParamFile::Si(_) => None,
        };
        let lambda = match explicit {
            Some(l) => l,
            None => self.bus_config()?.qubits[0].lambda.abs(),
        };
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::ParamFile(format!("schedule lambda must be positive, got {lambda}")));
        }
        Ok(lambda)
    }

    pub fn device_report(&self) -> Result<DeviceReport> {
        match self {
            ParamFile::Si(si) => si.device_report(),
            ParamFile::Effective(_) => Err(Error::ParamFile("device quantities need the \"si\" parameter form".into())),
        }
    }
}

impl SiParams {
    pub fn device(&self, point: OperatingPoint) -> Result<DeviceParams> {
        let e_c = charging_energy(self.c_j, self.c_g)?;
        DeviceParams::from_si(e_c, self.e_j, point.n_g, point.flux_ratio)?.with_geometry(self.geometry)
    }

    pub fn device_report(&self) -> Result<DeviceReport> {
        if self.qubits.is_empty() {
            return Err(Error::ParamFile("at least one qubit is required".into()));
        }
        self.geometry.validate()?;
        let e_c_joules = charging_energy(self.c_j, self.c_g)?;
        let omega_k = mode_frequency(&self.geometry);
        let first = self.device(self.qubits[0])?;
        let qubits = self
            .qubits
            .iter()
            .map(|&pt| {
                let p = self.device(pt)?;
                let eff = EffectiveQubit::from_device(&p)?;
                Ok(QubitReport {
                    n_g: pt.n_g,
                    flux_ratio: pt.flux_ratio,
                    splitting: splitting(&p),
                    omega: eff.omega,
                    eta: eff.eta,
                    lambda: eff.lambda_max,
                    outside_charge_regime: p.outside_charge_regime(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DeviceReport {
            e_c_joules,
            e_c: joules_to_angular(e_c_joules),
            e_j: joules_to_angular(self.e_j),
            omega_k,
            coupling_prefactor: coupling_prefactor(&first, omega_k)?,
            qubits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = ParamFile::default_params();
        let cfg = p.bus_config().unwrap();
        assert_eq!(cfg.omega, 1.0);
        assert_eq!(cfg.fock_cutoff, 4);
        let omegas: Vec<f64> = cfg.qubits.iter().map(|q| q.omega).collect();
        assert_eq!(omegas, vec![1.3, 1.6, 1.9]);
        assert!(cfg.qubits.iter().all(|q| q.lambda == 0.05 && q.eta == 0.0));
        assert_eq!(p.schedule_lambda().unwrap(), 0.05);
        assert!(p.device_report().is_err());
    }

    #[test]
    fn rejects_unknown_and_ambiguous() {
        assert!(ParamFile::from_json(r#"{"effective": {"omega": 1, "qubits": [], "extra": 1}}"#).is_err());
        assert!(ParamFile::from_json(r#"{"effective": {"omega": 1, "qubits": []}}"#).is_err());
        assert!(ParamFile::from_json(r#"{"other": {}}"#).is_err());
        let p =
            ParamFile::from_json(r#"{"effective": {"omega": 2, "qubits": [{"Omega": 2.5, "lambda": 0.01}]}}"#).unwrap();
        assert_eq!(p.bus_config().unwrap().fock_cutoff, 4);
    }

    #[test]
    fn si_form() {
        let text = include_str!("../data/si_example.json");
        let p = ParamFile::from_json(text).unwrap();
        let r = p.device_report().unwrap();
        assert!((r.e_c - 6.954_670_877_941_111e11).abs() / r.e_c < 1e-12);
        assert!((r.omega_k - 3.141_592_653_589_793_4e10).abs() / r.omega_k < 1e-12);
        let cfg = p.bus_config().unwrap();
        assert_eq!(cfg.omega, r.omega_k);
        assert_eq!(cfg.qubits[1].omega, r.qubits[1].omega);
    }
}
