//! Charge-qubit device model: charging energy, two-level reduction, eigenbasis
//! and the flux coupling to one resonator mode.
//!
//! SI quantities are converted to angular frequencies (`E / hbar`) once, when a
//! [`DeviceParams`] is built with [`DeviceParams::from_si`]. Everything
//! downstream uses hbar = 1.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod constants {
    use std::f64::consts::PI;

    /// Elementary charge (C).
    pub const E_CHARGE: f64 = 1.602176634e-19;
    /// Reduced Planck constant (J s).
    pub const HBAR: f64 = 1.054571817e-34;
    /// Vacuum permeability (H/m).
    pub const MU_0: f64 = 4.0 * PI * 1e-7;
    /// Flux quantum `h / 2e` (Wb).
    pub const PHI_0: f64 = PI * HBAR / E_CHARGE;
}

use constants::{E_CHARGE, HBAR, MU_0, PHI_0};

/// Charge-regime flag threshold: `E_c <= 10 E_J` is reported as outside the
/// charge regime.
pub const CHARGE_REGIME_RATIO: f64 = 10.0;

/// Terms below this fraction of `max(E_c, E_J)` count as zero when deciding
/// degeneracy, so that `cos(pi/2)` rounding does not hide the point.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryParams {
    /// SQUID loop area (m^2).
    #[serde(rename = "S")]
    pub loop_area: f64,
    /// Qubit to line distance (m).
    #[serde(rename = "d")]
    pub distance: f64,
    /// Resonator length (m).
    #[serde(rename = "l")]
    pub length: f64,
    /// Inductance per unit length (H/m).
    #[serde(rename = "L")]
    pub inductance: f64,
    /// Capacitance per unit length (F/m).
    #[serde(rename = "C_line")]
    pub capacitance: f64,
    #[serde(rename = "k")]
    pub mode_index: u32,
}

impl GeometryParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("loop_area", self.loop_area),
            ("distance", self.distance),
            ("length", self.length),
            ("inductance", self.inductance),
            ("capacitance", self.capacitance),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("geometry {name} must be positive, got {v}")));
            }
        }
        if self.mode_index == 0 {
            return Err(Error::InvalidParameter("mode index must be at least 1".into()));
        }
        Ok(())
    }
}

/// One charge qubit. Energies are angular frequencies (rad/s when built from
/// SI input, arbitrary units otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    e_c: f64,
    e_j: f64,
    n_g: f64,
    flux_ratio: f64,
    geometry: Option<GeometryParams>,
}

impl DeviceParams {
    /// `e_c`, `e_j` already in angular-frequency units.
    pub fn new(e_c: f64, e_j: f64, n_g: f64, flux_ratio: f64) -> Result<Self> {
        if !(e_c > 0.0 && e_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("E_c must be positive, got {e_c}")));
        }
        if !(e_j >= 0.0 && e_j.is_finite()) {
            return Err(Error::InvalidParameter(format!("E_J must be non-negative, got {e_j}")));
        }
        if !n_g.is_finite() || !flux_ratio.is_finite() {
            return Err(Error::InvalidParameter("n_g and flux ratio must be finite".into()));
        }
        Ok(Self { e_c, e_j, n_g, flux_ratio, geometry: None })
    }

    /// Energies in joules; converted to angular frequencies here.
    pub fn from_si(e_c_joules: f64, e_j_joules: f64, n_g: f64, flux_ratio: f64) -> Result<Self> {
        Self::new(joules_to_angular(e_c_joules), joules_to_angular(e_j_joules), n_g, flux_ratio)
    }

    pub fn with_geometry(mut self, geometry: GeometryParams) -> Result<Self> {
        geometry.validate()?;
        self.geometry = Some(geometry);
        Ok(self)
    }

    /// Same device at another operating point.
    pub fn at(&self, n_g: f64, flux_ratio: f64) -> Result<Self> {
        let mut p = Self::new(self.e_c, self.e_j, n_g, flux_ratio)?;
        p.geometry = self.geometry;
        Ok(p)
    }

    pub fn e_c(&self) -> f64 {
        self.e_c
    }

    pub fn e_j(&self) -> f64 {
        self.e_j
    }

    pub fn n_g(&self) -> f64 {
        self.n_g
    }

    pub fn flux_ratio(&self) -> f64 {
        self.flux_ratio
    }

    pub fn geometry(&self) -> Option<&GeometryParams> {
        self.geometry.as_ref()
    }

    pub fn outside_charge_regime(&self) -> bool {
        self.e_c <= CHARGE_REGIME_RATIO * self.e_j
    }

    /// Two-level splitting vanishes (`n_g = 1/2` and `cos(pi f) = 0`).
    pub fn is_degenerate(&self) -> bool {
        splitting(self) <= DEGENERACY_TOL * self.e_c.max(self.e_j)
    }

    /// `E_c (1 - 2 n_g)`
    fn charge_term(&self) -> f64 {
        self.e_c * (1.0 - 2.0 * self.n_g)
    }

    /// `E_J cos(pi f)`
    fn josephson_term(&self) -> f64 {
        self.e_j * (PI * self.flux_ratio).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveQubit {
    pub omega: f64,
    pub eta: f64,
    pub lambda_max: f64,
}

impl EffectiveQubit {
    /// Derives `(Omega, eta, lambda)` from a device with geometry, coupled to
    /// the geometry's own resonator mode.
    pub fn from_device(p: &DeviceParams) -> Result<Self> {
        let g = p.geometry().ok_or(Error::MissingGeometry)?;
        let eta = mixing_angle(p)?;
        let omega_mode = mode_frequency(g);
        Ok(Self { omega: 2.0 * splitting(p), eta, lambda_max: coupling_lambda(p, omega_mode, eta)? })
    }
}

pub fn joules_to_angular(e: f64) -> f64 {
    e / HBAR
}

pub fn angular_to_joules(w: f64) -> f64 {
    w * HBAR
}

/// Single Cooper-pair charging energy `(2e)^2 / (2 (2 C_J + C_g))`, in joules.
pub fn charging_energy(c_j: f64, c_g: f64) -> Result<f64> {
    if !(c_j > 0.0 && c_g > 0.0) {
        return Err(Error::InvalidParameter(format!("capacitances must be positive (C_J = {c_j}, C_g = {c_g})")));
    }
    let q = 2.0 * E_CHARGE;
    Ok(q * q / (2.0 * (2.0 * c_j + c_g)))
}

/// Half the qubit splitting, `E = sqrt(E_c^2 (1-2n_g)^2 / 4 + E_J^2 cos^2(pi f))`.
/// The qubit frequency is `Omega = 2E`.
pub fn splitting(p: &DeviceParams) -> f64 {
    (0.5 * p.charge_term()).hypot(p.josephson_term())
}

/// Mixing angle `eta = atan2(2 E_J cos(pi f), E_c (1 - 2 n_g))`.
///
/// For `cos(pi f) >= 0` (any `|f| <= 1/2`) this lies in `[0, pi]`. Outside that
/// flux window the result is in `(-pi, 0)`; keeping the sign there is what
/// makes `|g>` the lower eigenstate of the charge Hamiltonian.
pub fn mixing_angle(p: &DeviceParams) -> Result<f64> {
    let num = 2.0 * p.josephson_term();
    let den = p.charge_term();
    let scale = DEGENERACY_TOL * p.e_c.max(p.e_j);
    if num.abs() <= scale && den.abs() <= scale {
        return Err(Error::DegeneratePoint);
    }
    Ok(num.atan2(den))
}

/// Columns are `|g>` and `|e>` expressed in the charge basis `(|0>, |1>)`.
pub fn eigenbasis_transform(eta: f64) -> Matrix2<f64> {
    let (s, c) = (0.5 * eta).sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Reduced two-level Hamiltonian in the charge basis,
/// `-1/2 E_c (1 - 2n_g) sigma_z - E_J cos(pi f) sigma_x`.
pub fn charge_hamiltonian(p: &DeviceParams) -> Matrix2<f64> {
    let z = -0.5 * p.charge_term();
    let x = -p.josephson_term();
    Matrix2::new(z, x, x, -z)
}

/// Resonator mode `omega_k = k pi / (l sqrt(L C))`.
pub fn mode_frequency(g: &GeometryParams) -> f64 {
    g.mode_index as f64 * PI / (g.length * (g.inductance * g.capacitance).sqrt())
}

/// Flux-coupling prefactor `mu_0 E_J S / (2 Phi_0 d) * sqrt(hbar omega / (l L))`
/// in angular-frequency units. The coupling at an operating point is this
/// times `sin(pi f) cos(eta)`.
pub fn coupling_prefactor(p: &DeviceParams, omega: f64) -> Result<f64> {
    let g = p.geometry().ok_or(Error::MissingGeometry)?;
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::InvalidParameter(format!("mode frequency must be positive, got {omega}")));
    }
    let current = (HBAR * omega / (g.length * g.inductance)).sqrt();
    Ok(MU_0 * p.e_j * g.loop_area / (2.0 * PHI_0 * g.distance) * current)
}

/// Qubit-resonator coupling `lambda` (signed, angular frequency) for a device
/// whose mixing angle is `eta`.
pub fn coupling_lambda(p: &DeviceParams, omega: f64, eta: f64) -> Result<f64> {
    Ok(coupling_prefactor(p, omega)? * (PI * p.flux_ratio).sin() * eta.cos())
}

/// Coupling at an operating point from a known prefactor (see
/// [`coupling_prefactor`]); works without geometry.
pub fn coupling_from_prefactor(prefactor: f64, p: &DeviceParams) -> Result<f64> {
    Ok(prefactor * (PI * p.flux_ratio).sin() * mixing_angle(p)?.cos())
}
