//! Hamiltonians of qubits sharing one resonator mode.
//!
//! Qubit terms are written in each qubit's eigenbasis: `-1/2 Omega_k rho_z`
//! with `rho_z = |g><g| - |e><e|`. The zero-point term `omega/2` is kept.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::space::{HilbertSpace, Level};

pub const DEFAULT_FOCK_CUTOFF: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusQubit {
    /// Idle transition frequency `Omega_k`.
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// Coupling to the resonator, `lambda_k`.
    pub lambda: f64,
    /// Mixing angle; only the lab-frame Hamiltonian uses it.
    #[serde(default)]
    pub eta: f64,
}

impl BusQubit {
    pub fn new(omega: f64, lambda: f64) -> Self {
        Self { omega, lambda, eta: 0.0 }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusConfig {
    /// Resonator angular frequency.
    pub omega: f64,
    pub qubits: Vec<BusQubit>,
    pub fock_cutoff: usize,
}

impl BusConfig {
    pub fn new(omega: f64, qubits: Vec<BusQubit>, fock_cutoff: usize) -> Result<Self> {
        let cfg = Self { omega, qubits, fock_cutoff };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.is_empty() {
            return Err(Error::InvalidParameter("bus needs at least one qubit".into()));
        }
        if self.fock_cutoff < 1 {
            return Err(Error::InvalidParameter("fock cutoff must be at least 1".into()));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter("resonator frequency must be finite".into()));
        }
        for (k, q) in self.qubits.iter().enumerate() {
            if !(q.omega.is_finite() && q.lambda.is_finite() && q.eta.is_finite()) {
                return Err(Error::InvalidParameter(format!("qubit {k} has non-finite parameters")));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new(self.qubits.len(), self.fock_cutoff)
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn with_fock_cutoff(&self, fock_cutoff: usize) -> Self {
        Self { fock_cutoff, ..self.clone() }
    }

    /// Keeps only the listed qubits, in the listed order.
    pub fn select(&self, qubits: &[usize]) -> Result<Self> {
        let picked = qubits
            .iter()
            .map(|&k| {
                self.qubits.get(k).copied().ok_or_else(|| Error::InvalidParameter(format!("qubit {k} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.omega, picked, self.fock_cutoff)
    }
}

/// `+1` for `|g>`, `-1` for `|e>`.
fn rho_z(space: &HilbertSpace, index: usize, k: usize) -> f64 {
    if space.is_excited(index, k) {
        -1.0
    } else {
        1.0
    }
}

fn diagonal_energy(space: &HilbertSpace, index: usize, omega: f64, qubits: &[BusQubit]) -> f64 {
    let n = space.photons(index) as f64;
    let qubit: f64 = qubits.iter().enumerate().map(|(k, q)| rho_z(space, index, k) * q.omega).sum();
    omega * (n + 0.5) - 0.5 * qubit
}

fn add_symmetric(m: &mut DMatrix<C64>, i: usize, j: usize, v: f64) {
    m[(i, j)] += v;
    m[(j, i)] += v;
}

/// Single qubit on the bus, rotating-wave form
/// `omega (a^dag a + 1/2) - 1/2 Omega rho_z + lambda (a^dag rho_- + rho_+ a)`.
pub fn build_jc(omega: f64, qubit_omega: f64, lambda: f64, fock_cutoff: usize) -> Result<HermitianOperator> {
    build_multi(&BusConfig::new(omega, vec![BusQubit::new(qubit_omega, lambda)], fock_cutoff)?)
}

/// Rotating-wave Hamiltonian of every qubit on the bus.
pub fn build_multi(cfg: &BusConfig) -> Result<HermitianOperator> {
    cfg.validate()?;
    let space = cfg.space();
    let d = space.dimension();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(diagonal_energy(&space, i, cfg.omega, &cfg.qubits), 0.0);
        let n = space.photons(i);
        for (k, q) in cfg.qubits.iter().enumerate() {
            // rho_+ a : |g, n> -> sqrt(n) |e, n-1>
            if n >= 1 && !space.is_excited(i, k) && q.lambda != 0.0 {
                let j = space.flip(i, k) - 1;
                add_symmetric(&mut m, i, j, q.lambda * (n as f64).sqrt());
            }
        }
    }
    HermitianOperator::new(space, m)
}

/// Lab-frame Hamiltonian with the flux coupling linearized but without the
/// rotating-wave approximation.
///
/// In the charge basis each qubit couples as `g_k (a + a^dag) sigma_x`. In the
/// eigenbasis `sigma_x = cos(eta) rho_x + sin(eta) rho_z`, so with
/// `lambda_k = g_k cos(eta_k)` the coupling is
/// `lambda_k (a + a^dag) rho_x + lambda_k tan(eta_k) (a + a^dag) rho_z`.
pub fn build_lab_frame(cfg: &BusConfig) -> Result<HermitianOperator> {
    cfg.validate()?;
    for (k, q) in cfg.qubits.iter().enumerate() {
        if q.lambda != 0.0 && q.eta.cos().abs() < 1e-12 {
            return Err(Error::InvalidParameter(format!("qubit {k}: nonzero lambda requires cos(eta) != 0")));
        }
    }
    let space = cfg.space();
    let d = space.dimension();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(diagonal_energy(&space, i, cfg.omega, &cfg.qubits), 0.0);
        let n = space.photons(i);
        for (k, q) in cfg.qubits.iter().enumerate() {
            if q.lambda == 0.0 {
                continue;
            }
            if !space.is_excited(i, k) {
                let flipped = space.flip(i, k);
                // rho_+ a
                if n >= 1 {
                    add_symmetric(&mut m, i, flipped - 1, q.lambda * (n as f64).sqrt());
                }
                // rho_+ a^dag
                if n < space.fock_cutoff() {
                    add_symmetric(&mut m, i, flipped + 1, q.lambda * ((n + 1) as f64).sqrt());
                }
            }
            let longitudinal = q.lambda * q.eta.tan();
            if longitudinal != 0.0 && n < space.fock_cutoff() {
                add_symmetric(&mut m, i, i + 1, longitudinal * rho_z(&space, i, k) * ((n + 1) as f64).sqrt());
            }
        }
    }
    HermitianOperator::new(space, m)
}

/// Total excitation number `a^dag a + sum_k |e_k><e_k|`.
pub fn excitation_operator(space: HilbertSpace) -> HermitianOperator {
    let d = space.dimension();
    let diag = nalgebra::DVector::from_fn(d, |i, _| C64::new(space.excitations(i) as f64, 0.0));
    HermitianOperator::new(space, DMatrix::from_diagonal(&diag)).expect("diagonal real matrix is hermitian")
}

/// Basis indices with exactly `n` excitations, ascending.
pub fn excitation_manifold(space: &HilbertSpace, n: usize) -> Vec<usize> {
    (0..space.dimension()).filter(|&i| space.excitations(i) == n).collect()
}

/// Basis state of the (qubit i, qubit j, resonator) subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairKet {
    pub first: Level,
    pub second: Level,
    pub photons: usize,
}

impl PairKet {
    fn new(first: bool, second: bool, photons: usize) -> Self {
        let lvl = |e: bool| if e { Level::Excited } else { Level::Ground };
        Self { first: lvl(first), second: lvl(second), photons }
    }

    pub fn label(&self) -> String {
        format!("{},{},{}", self.first.symbol(), self.second.symbol(), self.photons)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldLevel {
    /// Eigenvector number in the closed form, 1 through 4.
    pub label: u8,
    pub energy: f64,
    /// Components on [`ManifoldEigensystem::basis`].
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldEigensystem {
    pub n: usize,
    pub basis: Vec<PairKet>,
    pub levels: Vec<ManifoldLevel>,
}

/// Closed-form eigensystem of two qubits jointly resonant with the bus
/// (`Omega_i = Omega_j = omega`, common `lambda`) in the `n`-excitation
/// manifold.
///
/// The manifold basis is `|g,g,n>, |g,e,n-1>, |e,g,n-1>, |e,e,n-2>`, with the
/// states that need a negative photon number dropped. Levels come in the order
/// `E_1, E_2, E_3, E_4` (ascending for `lambda > 0`); `E_2` only exists for
/// `n >= 2` and `n = 0` has the single level `-omega/2`.
pub fn two_qubit_resonant_eigensystem(n: i64, omega: f64, lambda: f64) -> Result<ManifoldEigensystem> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!("manifold index must be non-negative, got {n}")));
    }
    let n = n as usize;
    if n == 0 {
        return Ok(ManifoldEigensystem {
            n,
            basis: vec![PairKet::new(false, false, 0)],
            levels: vec![ManifoldLevel { label: 1, energy: -0.5 * omega, vector: vec![1.0] }],
        });
    }
    let nf = n as f64;
    let center = omega * (nf - 0.5);
    let split = lambda * (4.0 * nf - 2.0).sqrt();
    let a = (nf / (4.0 * nf - 2.0)).sqrt();
    let b = ((nf - 1.0) / (4.0 * nf - 2.0)).sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;

    let mut basis =
        vec![PairKet::new(false, false, n), PairKet::new(false, true, n - 1), PairKet::new(true, false, n - 1)];
    let mut levels = vec![
        ManifoldLevel { label: 1, energy: center - split, vector: vec![-a, 0.5, 0.5, -b] },
        ManifoldLevel {
            label: 2,
            energy: center,
            vector: vec![-((nf - 1.0) / (2.0 * nf - 1.0)).sqrt(), 0.0, 0.0, (nf / (2.0 * nf - 1.0)).sqrt()],
        },
        ManifoldLevel { label: 3, energy: center, vector: vec![0.0, -r, r, 0.0] },
        ManifoldLevel { label: 4, energy: center + split, vector: vec![a, 0.5, 0.5, b] },
    ];
    if n >= 2 {
        basis.push(PairKet::new(true, true, n - 2));
    } else {
        levels.remove(1);
        for l in &mut levels {
            l.vector.truncate(3);
        }
    }
    Ok(ManifoldEigensystem { n, basis, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::eig_hermitian_matrix;

    fn commutator_norm(h: &HermitianOperator, n: &HermitianOperator) -> f64 {
        (h.matrix() * n.matrix() - n.matrix() * h.matrix()).norm()
    }

    #[test]
    fn jc_structure() {
        let h = build_jc(1.0, 1.2, 0.05, 4).unwrap();
        let s = h.space();
        let g1 = s.parse_label("g,1").unwrap();
        let e0 = s.parse_label("e,0").unwrap();
        assert!((h.entry(g1, e0) - C64::new(0.05, 0.0)).norm() < 1e-15);
        let n = excitation_operator(*s);
        assert!(commutator_norm(&h, &n) < 1e-12 * h.frobenius_norm());

        let h0 = build_jc(1.0, 1.2, 0.0, 4).unwrap();
        let m = h0.matrix();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    assert_eq!(m[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn jc_one_excitation_block_at_resonance() {
        let (omega, lambda) = (1.0, 0.05);
        let h = build_jc(omega, omega, lambda, 3).unwrap();
        let idx = excitation_manifold(h.space(), 1);
        let (vals, _) = eig_hermitian_matrix(&h.block(&idx)).unwrap();
        // |g,1> and |e,0> both sit at omega once the zero point is included
        assert!((vals[0] - (omega - lambda)).abs() < 1e-14);
        assert!((vals[1] - (omega + lambda)).abs() < 1e-14);
    }

    #[test]
    fn multi_reduces_to_jc() {
        let cfg = BusConfig::new(1.0, vec![BusQubit::new(1.3, 0.07)], 5).unwrap();
        assert_eq!(build_multi(&cfg).unwrap(), build_jc(1.0, 1.3, 0.07, 5).unwrap());
    }

    #[test]
    fn multi_uncoupled_diagonal() {
        let cfg = BusConfig::new(1.1, vec![BusQubit::new(1.3, 0.0), BusQubit::new(1.6, 0.0)], 3).unwrap();
        let h = build_multi(&cfg).unwrap();
        let s = h.space();
        let i = s.parse_label("e,g,2").unwrap();
        let expected = 1.1 * 2.5 - 0.5 * (-1.3 + 1.6);
        assert!((h.entry(i, i).re - expected).abs() < 1e-14);
    }

    #[test]
    fn multi_conserves_excitations() {
        let cfg =
            BusConfig::new(1.0, vec![BusQubit::new(1.3, 0.05), BusQubit::new(0.8, -0.02), BusQubit::new(1.0, 0.04)], 4)
                .unwrap();
        let h = build_multi(&cfg).unwrap();
        let n = excitation_operator(*h.space());
        assert!(commutator_norm(&h, &n) < 1e-12 * h.frobenius_norm());
    }

    #[test]
    fn two_resonant_qubits_n1_spectrum() {
        let (omega, lambda) = (1.0, 0.05);
        let cfg = BusConfig::new(omega, vec![BusQubit::new(omega, lambda); 2], 4).unwrap();
        let h = build_multi(&cfg).unwrap();
        let idx = excitation_manifold(h.space(), 1);
        let (vals, _) = eig_hermitian_matrix(&h.block(&idx)).unwrap();
        let s2 = 2f64.sqrt() * lambda;
        for (v, e) in vals.iter().zip([0.5 * omega - s2, 0.5 * omega, 0.5 * omega + s2]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn lab_frame_limits() {
        let cfg = BusConfig::new(1.0, vec![BusQubit::new(1.3, 0.0).with_eta(0.4), BusQubit::new(1.6, 0.0)], 3).unwrap();
        assert_eq!(build_lab_frame(&cfg).unwrap(), build_multi(&cfg).unwrap());

        let cfg = BusConfig::new(1.0, vec![BusQubit::new(1.3, 0.05), BusQubit::new(1.6, 0.05)], 3).unwrap();
        let h = build_lab_frame(&cfg).unwrap();
        let s = h.space();
        // counter-rotating element <e,g,1|H|g,g,0>
        let i = s.parse_label("e,g,1").unwrap();
        let j = s.parse_label("g,g,0").unwrap();
        assert!((h.entry(i, j).re - 0.05).abs() < 1e-15);
        assert_eq!(build_multi(&cfg).unwrap().entry(i, j), C64::new(0.0, 0.0));
        let n = excitation_operator(*s);
        assert!(commutator_norm(&h, &n) > 1e-3);
    }

    #[test]
    fn lab_frame_longitudinal_term() {
        let eta = 0.3;
        let cfg = BusConfig::new(1.0, vec![BusQubit::new(1.3, 0.05).with_eta(eta)], 3).unwrap();
        let h = build_lab_frame(&cfg).unwrap();
        let s = h.space();
        let g0 = s.parse_label("g,0").unwrap();
        let g1 = s.parse_label("g,1").unwrap();
        let e1 = s.parse_label("e,1").unwrap();
        let e2 = s.parse_label("e,2").unwrap();
        assert!((h.entry(g1, g0).re - 0.05 * eta.tan()).abs() < 1e-15);
        assert!((h.entry(e2, e1).re + 0.05 * eta.tan() * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eigensystem_shapes() {
        assert!(two_qubit_resonant_eigensystem(-1, 1.0, 0.1).is_err());
        let e0 = two_qubit_resonant_eigensystem(0, 2.0, 0.1).unwrap();
        assert_eq!(e0.levels.len(), 1);
        assert_eq!(e0.levels[0].energy, -1.0);
        let e1 = two_qubit_resonant_eigensystem(1, 1.0, 0.1).unwrap();
        assert_eq!(e1.basis.len(), 3);
        assert_eq!(e1.levels.iter().map(|l| l.label).collect::<Vec<_>>(), vec![1, 3, 4]);
        assert!((e1.levels[2].energy - e1.levels[0].energy - 2.0 * 0.1 * 2f64.sqrt()).abs() < 1e-15);
        for n in 1..6 {
            let e = two_qubit_resonant_eigensystem(n, 1.0, 0.1).unwrap();
            let dark = e.levels.iter().find(|l| l.label == 3).unwrap();
            let r = std::f64::consts::FRAC_1_SQRT_2;
            assert_eq!(&dark.vector[..3], &[0.0, -r, r]);
            for l in &e.levels {
                let norm: f64 = l.vector.iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
    }
}
