//! Phase-insensitive comparisons between states and operators.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::UnitaryOperator;
use crate::space::HilbertSpace;
use crate::state::StateVector;

/// Resonator population above which [`partial_trace_fidelity`] refuses to
/// treat the qubits as a pure subsystem.
pub const RESONATOR_LEAKAGE_TOL: f64 = 1e-6;
/// Off-diagonal tolerance of [`unitary_phases_mod_2pi`].
pub const DIAGONAL_TOL: f64 = 1e-8;

/// `|<a|b>|^2`, clamped to `[0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Distance on the circle between two angles, in `[0, pi]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TAU - d)
}

/// `arg(<b_k|U|b_k>)` in `[0, 2pi)` for each basis state.
///
/// The off-diagonal magnitude of column `k` is `|U b_k - <b_k|U|b_k> b_k|`,
/// which bounds every off-diagonal element in that column and also catches
/// leakage out of the span of `basis`.
pub fn unitary_phases_mod_2pi(u: &UnitaryOperator, basis: &[StateVector]) -> Result<Vec<f64>> {
    let (phases, off) = diagonal_phases(u.matrix(), u.space(), basis)?;
    if off > DIAGONAL_TOL {
        return Err(Error::NotDiagonal { max_off_diagonal: off });
    }
    Ok(phases)
}

/// Phases of the diagonal elements and the largest off-diagonal magnitude,
/// without any tolerance check. Used for approximate (numeric-tier) gates.
pub fn diagonal_phases(m: &DMatrix<C64>, space: &HilbertSpace, basis: &[StateVector]) -> Result<(Vec<f64>, f64)> {
    let mut phases = Vec::with_capacity(basis.len());
    let mut worst: f64 = 0.0;
    for b in basis {
        space.ensure_same(b.space())?;
        let ub = m * b.amplitudes();
        let d = b.amplitudes().dotc(&ub);
        let residual = (ub - b.amplitudes() * d).norm();
        worst = worst.max(residual);
        phases.push(wrap_phase(d.arg()));
    }
    Ok((phases, worst))
}

/// Process fidelity `|Tr(U^dagger M)|^2 / d^2` between a target unitary and a
/// (possibly non-unitary) achieved block of the same size.
pub fn process_fidelity(target: &DMatrix<C64>, achieved: &DMatrix<C64>) -> f64 {
    let d = target.nrows() as f64;
    let tr: C64 = target.iter().zip(achieved.iter()).map(|(t, a)| t.conj() * a).sum();
    (tr.norm_sqr() / (d * d)).clamp(0.0, 1.0)
}

/// Process fidelity after the best local Z rotations on two qubits:
/// `max |Tr(U^dagger D M)|^2 / 16` over `D = diag(1, e^{ib}, e^{ia}, e^{i(a+b)})`
/// in the basis order `gg, ge, eg, ee`. Returns the fidelity and `(a, b)`.
///
/// Each angle is optimal in closed form given the other, so coordinate
/// ascent converges in a few sweeps.
pub fn local_z_fidelity(target: &DMatrix<C64>, achieved: &DMatrix<C64>) -> Result<(f64, [f64; 2])> {
    if target.shape() != (4, 4) || achieved.shape() != (4, 4) {
        return Err(Error::InvalidParameter("local Z correction needs 4x4 two-qubit blocks".into()));
    }
    let mu = achieved * target.adjoint();
    let z: Vec<C64> = (0..4).map(|k| mu[(k, k)]).collect();
    let value = |a: f64, b: f64| {
        (z[0] + z[1] * C64::from_polar(1.0, b) + z[2] * C64::from_polar(1.0, a) + z[3] * C64::from_polar(1.0, a + b))
            .norm()
    };
    let (mut a, mut b) = (0.0, 0.0);
    for _ in 0..200 {
        // terms without / with e^{ia}
        let rest = z[0] + z[1] * C64::from_polar(1.0, b);
        let with = z[2] + z[3] * C64::from_polar(1.0, b);
        if with.norm() > 0.0 {
            a = rest.arg() - with.arg();
        }
        let rest = z[0] + z[2] * C64::from_polar(1.0, a);
        let with = z[1] + z[3] * C64::from_polar(1.0, a);
        if with.norm() > 0.0 {
            b = rest.arg() - with.arg();
        }
    }
    let f = (value(a, b).powi(2) / 16.0).clamp(0.0, 1.0);
    Ok((f, [wrap_phase(a), wrap_phase(b)]))
}

/// Reduced density matrix of `qubits` (in the given order), tracing out the
/// other qubits and the resonator.
pub fn reduced_density_matrix(full: &StateVector, qubits: &[usize]) -> Result<DMatrix<C64>> {
    let space = full.space();
    for (pos, &q) in qubits.iter().enumerate() {
        if q >= space.n_qubits() {
            return Err(Error::InvalidParameter(format!("qubit {q} out of range")));
        }
        if qubits[..pos].contains(&q) {
            return Err(Error::InvalidParameter(format!("qubit {q} listed twice")));
        }
    }
    let m = qubits.len();
    let sub = |i: usize| qubits.iter().fold(0usize, |acc, &q| (acc << 1) | space.is_excited(i, q) as usize);
    let rest_mask: usize = qubits.iter().fold(0, |acc, &q| acc | space.qubit_bit(q));
    // environment key: remaining qubit bits plus photon number
    let env = |i: usize| (space.qubit_mask(i) & !rest_mask, space.photons(i));

    let mut rho = DMatrix::zeros(1 << m, 1 << m);
    let amps = full.amplitudes();
    for i in 0..space.dimension() {
        if amps[i] == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..space.dimension() {
            if env(i) == env(j) {
                rho[(sub(i), sub(j))] += amps[i] * amps[j].conj();
            }
        }
    }
    Ok(rho)
}

/// Fidelity `<t|rho|t>` between the reduced state of `target_qubits` and a
/// pure target on the qubit-only space.
///
/// The resonator must be back in vacuum: population outside `|0>` above
/// [`RESONATOR_LEAKAGE_TOL`] is an error.
pub fn partial_trace_fidelity(full: &StateVector, target_qubits: &[usize], target: &StateVector) -> Result<f64> {
    let population = full.resonator_excited_population();
    if population > RESONATOR_LEAKAGE_TOL {
        return Err(Error::ResonatorEntangled { population });
    }
    let expected = HilbertSpace::qubits_only(target_qubits.len());
    expected.ensure_same(target.space())?;
    let rho = reduced_density_matrix(full, target_qubits)?;
    let t = target.amplitudes();
    let f = t.dotc(&(&rho * t)).re;
    Ok(f.clamp(0.0, 1.0))
}
