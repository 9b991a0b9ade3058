//! Closed-form evolution of resonant and idle qubits on the bus.
//!
//! Every step is an exact linear map on the full space and keeps all global
//! phases (including the resonator zero point), so compositions of steps
//! reproduce the phases of the corresponding rotating-wave propagation.
//! Idle qubits are treated as fully decoupled: each contributes
//! `|g> -> e^{+i Omega t/2} |g>`, `|e> -> e^{-i Omega t/2} |e>`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::two_qubit_resonant_eigensystem;
use crate::space::HilbertSpace;
use crate::state::StateVector;

/// Population allowed on truncated (incomplete) ladders before a step fails.
pub const TRUNCATION_TOL: f64 = 1e-9;

fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

fn check_qubit(space: &HilbertSpace, k: usize) -> Result<()> {
    if k >= space.n_qubits() {
        return Err(Error::InvalidParameter(format!("qubit {k} out of range for {space}")));
    }
    Ok(())
}

fn check_idle(space: &HilbertSpace, idle_omegas: &[f64]) -> Result<()> {
    if idle_omegas.len() != space.n_qubits() {
        return Err(Error::InvalidParameter(format!(
            "need one idle frequency per qubit ({}), got {}",
            space.n_qubits(),
            idle_omegas.len()
        )));
    }
    Ok(())
}

/// Phase picked up by idle qubits (all except `skip`) over time `t`.
fn spectator_phase(space: &HilbertSpace, index: usize, idle_omegas: &[f64], skip: &[usize], t: f64) -> f64 {
    idle_omegas
        .iter()
        .enumerate()
        .filter(|(k, _)| !skip.contains(k))
        .map(|(k, w)| if space.is_excited(index, k) { -0.5 * w * t } else { 0.5 * w * t })
        .sum()
}

/// Free phase of a decoupled qubit `k` with frequency `qubit_omega`.
pub fn idle_phase(psi: &StateVector, qubit: usize, qubit_omega: f64, t: f64) -> Result<StateVector> {
    let space = *psi.space();
    check_qubit(&space, qubit)?;
    let mut out = psi.clone();
    let (pg, pe) = (phase(0.5 * qubit_omega * t), phase(-0.5 * qubit_omega * t));
    for (i, a) in out.amplitudes_mut().iter_mut().enumerate() {
        *a *= if space.is_excited(i, qubit) { pe } else { pg };
    }
    Ok(out)
}

/// Everything decoupled: resonator `omega (n + 1/2)` plus idle qubit phases.
pub fn free_step(psi: &StateVector, omega: f64, idle_omegas: &[f64], t: f64) -> Result<StateVector> {
    let space = *psi.space();
    check_idle(&space, idle_omegas)?;
    let mut out = psi.clone();
    for (i, a) in out.amplitudes_mut().iter_mut().enumerate() {
        let n = space.photons(i) as f64;
        *a *= phase(-omega * (n + 0.5) * t + spectator_phase(&space, i, idle_omegas, &[], t));
    }
    Ok(out)
}

/// One qubit resonant with the bus (`Omega = omega`), the rest idle.
///
/// Within each ladder `{|g,m+1>, |e,m>}`
///
/// ```text
/// |g,m+1> -> e^{-i(m+1) omega t} [cos(sqrt(m+1) lambda t)|g,m+1> - i sin(sqrt(m+1) lambda t)|e,m>]
/// |e,m>   -> e^{-i(m+1) omega t} [cos(sqrt(m+1) lambda t)|e,m>   - i sin(sqrt(m+1) lambda t)|g,m+1>]
/// ```
///
/// and `|g,0>` is stationary. The top state `|e, cutoff>` has no partner in
/// the truncated space; it evolves by its diagonal energy and must carry less
/// than [`TRUNCATION_TOL`] population.
pub fn jc_resonant_step(
    psi: &StateVector,
    qubit: usize,
    lambda: f64,
    omega: f64,
    idle_omegas: &[f64],
    t: f64,
) -> Result<StateVector> {
    let space = *psi.space();
    check_qubit(&space, qubit)?;
    check_idle(&space, idle_omegas)?;
    let cutoff = space.fock_cutoff();
    let truncated = psi.population_where(|i| space.is_excited(i, qubit) && space.photons(i) == cutoff);
    if truncated > TRUNCATION_TOL {
        return Err(Error::Truncation { population: truncated, fock_cutoff: cutoff });
    }

    let amps = psi.amplitudes();
    let mut out = psi.clone();
    let dst = out.amplitudes_mut();
    for i in 0..space.dimension() {
        if space.is_excited(i, qubit) {
            continue;
        }
        // i = |g, m>
        let spect = spectator_phase(&space, i, idle_omegas, &[qubit], t);
        let m = space.photons(i);
        if m == 0 {
            dst[i] = amps[i] * phase(spect);
        } else {
            let j = space.flip(i, qubit) - 1; // |e, m-1>
            let rate = (m as f64).sqrt() * lambda * t;
            let (s, c) = rate.sin_cos();
            let ph = phase(-(m as f64) * omega * t + spect);
            let mis = C64::new(0.0, -s);
            let (ag, ae) = (amps[i], amps[j]);
            dst[i] = (ag * c + ae * mis) * ph;
            dst[j] = (ae * c + ag * mis) * ph;
        }
        if m == cutoff {
            // |e, cutoff> alone: energy omega (cutoff + 1)
            let j = space.flip(i, qubit);
            dst[j] = amps[j] * phase(-((cutoff + 1) as f64) * omega * t + spect);
        }
    }
    Ok(out)
}

struct Block {
    /// Local basis order: gg, ge, eg, ee (absent states omitted).
    offsets: Vec<(bool, bool, i64)>,
    levels: Vec<(f64, Vec<f64>)>,
}

fn joint_block(n: usize, cutoff: usize, omega: f64, lambda: f64) -> Result<Block> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    if n <= cutoff {
        let sys = two_qubit_resonant_eigensystem(n as i64, omega, lambda)?;
        let offsets =
            sys.basis.iter().map(|k| (k.first.is_excited(), k.second.is_excited(), k.photons as i64)).collect();
        let levels = sys.levels.into_iter().map(|l| (l.energy, l.vector)).collect();
        Ok(Block { offsets, levels })
    } else if n == cutoff + 1 {
        // |g,g,n> is outside the space: {|g,e,c>, |e,g,c>, |e,e,c-1>}
        let c = cutoff as f64;
        let center = omega * (c + 0.5);
        let split = lambda * (2.0 * c).sqrt();
        Ok(Block {
            offsets: vec![(false, true, cutoff as i64), (true, false, cutoff as i64), (true, true, cutoff as i64 - 1)],
            levels: vec![
                (center - split, vec![0.5, 0.5, -r]),
                (center, vec![-r, r, 0.0]),
                (center + split, vec![0.5, 0.5, r]),
            ],
        })
    } else {
        Ok(Block {
            offsets: vec![(true, true, cutoff as i64)],
            levels: vec![(omega * (cutoff as f64 + 1.5), vec![1.0])],
        })
    }
}

/// Two qubits resonant with the bus at once (equal `lambda`), the rest idle.
///
/// The state is expanded manifold by manifold in the closed-form joint
/// eigenvectors and each component picks up `e^{-i E t}`.
pub fn joint_resonant_step(
    psi: &StateVector,
    qubits: (usize, usize),
    lambda: f64,
    omega: f64,
    idle_omegas: &[f64],
    t: f64,
) -> Result<StateVector> {
    let space = *psi.space();
    let (qi, qj) = qubits;
    check_qubit(&space, qi)?;
    check_qubit(&space, qj)?;
    check_idle(&space, idle_omegas)?;
    if qi == qj {
        return Err(Error::InvalidParameter("joint resonance needs two distinct qubits".into()));
    }
    let cutoff = space.fock_cutoff();
    if cutoff == 0 {
        return Err(Error::InvalidParameter("joint resonance needs a resonator with at least one photon level".into()));
    }
    let pair_exc = |i: usize| space.is_excited(i, qi) as usize + space.is_excited(i, qj) as usize;
    let truncated = psi.population_where(|i| pair_exc(i) + space.photons(i) > cutoff);
    if truncated > TRUNCATION_TOL {
        return Err(Error::Truncation { population: truncated, fock_cutoff: cutoff });
    }

    let blocks = (0..=cutoff + 2).map(|n| joint_block(n, cutoff, omega, lambda)).collect::<Result<Vec<_>>>()?;
    let pair_mask = space.qubit_bit(qi) | space.qubit_bit(qj);
    let amps = psi.amplitudes();
    let mut out = psi.clone();
    let dst = out.amplitudes_mut();

    // one anchor per (spectator pattern, manifold): the index where i, j are
    // both ground, used to address the manifold members
    for spect_mask in (0..1usize << space.n_qubits()).filter(|m| m & pair_mask == 0) {
        let anchor = spect_mask * space.fock_levels();
        let spect = spectator_phase(&space, anchor, idle_omegas, &[qi, qj], t);
        for (n, block) in blocks.iter().enumerate() {
            let indices: Vec<usize> = block
                .offsets
                .iter()
                .map(|&(ei, ej, photons)| {
                    let mut mask = spect_mask;
                    if ei {
                        mask |= space.qubit_bit(qi);
                    }
                    if ej {
                        mask |= space.qubit_bit(qj);
                    }
                    debug_assert!(photons >= 0 && photons as usize + ei as usize + ej as usize == n);
                    mask * space.fock_levels() + photons as usize
                })
                .collect();
            let input: Vec<C64> = indices.iter().map(|&i| amps[i]).collect();
            let mut result = vec![C64::new(0.0, 0.0); indices.len()];
            for (energy, v) in &block.levels {
                let overlap: C64 = v.iter().zip(&input).map(|(x, a)| a * x).sum();
                let coeff = overlap * phase(-energy * t + spect);
                for (r, x) in result.iter_mut().zip(v) {
                    *r += coeff * x;
                }
            }
            for (&i, r) in indices.iter().zip(result) {
                dst[i] = r;
            }
        }
    }
    Ok(out)
}
