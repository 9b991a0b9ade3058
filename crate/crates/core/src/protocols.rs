//! Sequential-resonance protocols on the bus and their verification:
//! a two-qubit phase gate, Bell-pair and W-state preparation, the dispersive
//! leakage bound for idle qubits, and flux/charge-driven single-qubit gates.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::analytic::idle_phase;
use crate::device::{
    charge_hamiltonian, coupling_from_prefactor, eigenbasis_transform, mixing_angle, splitting, DeviceParams,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_jc, build_lab_frame, build_multi, BusConfig, BusQubit};
use crate::metrics::{
    diagonal_phases, fidelity, local_z_fidelity, partial_trace_fidelity, phase_distance, process_fidelity, wrap_phase,
};
use crate::operator::eig_hermitian_matrix;
use crate::schedule::{ExecOptions, Executor, IdleCoupling, PulseSchedule, Segment, Tier};
use crate::space::{HilbertSpace, Level};
use crate::state::StateVector;
use crate::sweep;

/// Tolerance for the closed-form phase comparison.
pub const PHASE_TOL: f64 = 1e-8;
/// `|lambda / Delta|` above which a single-qubit gate is flagged.
pub const DISPERSIVE_WARN: f64 = 0.01;
/// `|lambda / Delta|` above which a single-qubit gate is refused.
pub const DISPERSIVE_LIMIT: f64 = 0.1;

/// Operator restricted to a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBlock {
    pub basis: Vec<String>,
    pub matrix: DMatrix<C64>,
}

impl Serialize for OperatorBlock {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            self.matrix.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        let mut st = serializer.serialize_struct("OperatorBlock", 2)?;
        st.serialize_field("basis", &self.basis)?;
        st.serialize_field("matrix", &rows)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    State { state: StateVector },
    Operator { operator: OperatorBlock },
}

/// State check after a given segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    /// Zero-based segment index after which the check is made.
    pub segment: usize,
    pub description: String,
    /// Fidelity to the expected intermediate state, when one is defined.
    pub fidelity: Option<f64>,
    pub resonator_population: f64,
}

/// Diagonal phases of the phase gate next to the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseAnalysis {
    pub basis: Vec<String>,
    /// `arg <b_k|U|b_k>` in `[0, 2pi)`.
    pub derived: Vec<f64>,
    /// Largest `|U b_k - <b_k|U|b_k> b_k|`.
    pub off_diagonal: f64,
    /// `theta_1..theta_4` wrapped to `[0, 2pi)`, with `theta_4` read as a
    /// real phase. Absent when the two qubits have different couplings.
    pub formula: Option<Vec<f64>>,
    pub formula_match: Option<Vec<bool>>,
    /// Phases of `diag(e^{i theta_1}, e^{-i theta_2}, e^{-i theta_3}, e^{-i theta_4})`.
    pub printed_matrix: Option<Vec<f64>>,
    pub printed_matrix_match: Option<Vec<bool>>,
    /// The literal `theta_4 = -i (...)` is imaginary, so `e^{i theta_4}` would
    /// not have unit modulus; always false.
    pub literal_theta4_reproducible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub tier: Tier,
    pub qubits: Vec<usize>,
    pub schedule: PulseSchedule,
    pub target: Outcome,
    pub achieved: Outcome,
    pub fidelity: f64,
    /// Population that left the protocol's intended subspace.
    pub leakage: f64,
    pub phases: Option<PhaseAnalysis>,
    pub checkpoints: Vec<Checkpoint>,
    /// Secondary figures of merit, keyed by name.
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Execution settings shared by the protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOptions {
    pub exec: ExecOptions,
    /// Coupling used in each resonant window, overriding the bus values.
    /// `None` keeps each resonant qubit's own coupling.
    pub window_lambda: Option<Vec<f64>>,
}

impl ProtocolOptions {
    pub fn new(tier: Tier) -> Self {
        Self { exec: ExecOptions::new(tier), window_lambda: None }
    }

    pub fn with_idle_coupling(mut self, idle: IdleCoupling) -> Self {
        self.exec.idle_coupling = idle;
        self
    }

    pub fn with_window_lambda(mut self, lambdas: Vec<f64>) -> Self {
        self.window_lambda = Some(lambdas);
        self
    }
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self::new(Tier::Analytic)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda != 0.0) {
        return Err(Error::InvalidParameter(format!("resonant window needs a nonzero coupling, got {lambda}")));
    }
    Ok(())
}

/// A resonant window with duration `factor / |lambda|`, overriding the
/// coupling of its qubits when `lambda` is given explicitly.
fn window(qubits: &[usize], factor: f64, lambda: f64, explicit: bool) -> Result<Segment> {
    check_lambda(lambda)?;
    let mut seg = Segment::resonate(qubits, factor / lambda.abs());
    if explicit {
        for &q in qubits {
            seg = seg.with_lambda(q, lambda);
        }
    }
    Ok(seg)
}

fn window_lambdas(opts: &ProtocolOptions, defaults: &[f64]) -> Result<(Vec<f64>, bool)> {
    match &opts.window_lambda {
        None => Ok((defaults.to_vec(), false)),
        Some(l) if l.len() == defaults.len() => Ok((l.clone(), true)),
        Some(l) => Err(Error::InvalidParameter(format!(
            "protocol has {} resonant windows, got {} couplings",
            defaults.len(),
            l.len()
        ))),
    }
}

/// Phase gate: `i`, `j`, `i` resonate in turn for a full vacuum Rabi period
/// `2pi/lambda` each.
pub fn phase_gate_schedule(i: usize, j: usize, lambdas: [f64; 3], explicit: bool) -> Result<PulseSchedule> {
    PulseSchedule::new(
        "phase_gate",
        vec![
            window(&[i], TAU, lambdas[0], explicit)?,
            window(&[j], TAU, lambdas[1], explicit)?,
            window(&[i], TAU, lambdas[2], explicit)?,
        ],
    )
}

/// Bell pair: `i` emits its excitation in `pi/(2 lambda)`, then `i` and `j`
/// absorb it jointly in `pi/(2 sqrt 2 lambda)`.
pub fn bell_schedule(i: usize, j: usize, lambdas: [f64; 2], explicit: bool) -> Result<PulseSchedule> {
    PulseSchedule::new(
        "bell",
        vec![
            window(&[i], PI / 2.0, lambdas[0], explicit)?,
            window(&[i, j], PI / (2.0 * SQRT_2), lambdas[1], explicit)?,
        ],
    )
}

/// W state: `k` resonates until `cos(lambda t_1) = 1/sqrt 3`, then `i` and `j`
/// resonate jointly for `pi/(2 sqrt 2 lambda)`.
pub fn w_schedule(i: usize, j: usize, k: usize, lambdas: [f64; 2], explicit: bool) -> Result<PulseSchedule> {
    PulseSchedule::new(
        "wstate",
        vec![
            window(&[k], (1.0 / 3f64.sqrt()).acos(), lambdas[0], explicit)?,
            window(&[i, j], PI / (2.0 * SQRT_2), lambdas[1], explicit)?,
        ],
    )
}

fn distinct(qubits: &[usize], cfg: &BusConfig) -> Result<()> {
    for (p, &q) in qubits.iter().enumerate() {
        if q >= cfg.n_qubits() {
            return Err(Error::InvalidParameter(format!("qubit {q} out of range for {} qubits", cfg.n_qubits())));
        }
        if qubits[..p].contains(&q) {
            return Err(Error::InvalidParameter(format!("qubit {q} used twice")));
        }
    }
    Ok(())
}

/// Basis state with the listed qubits excited and `photons` in the resonator.
pub fn ket(space: HilbertSpace, excited: &[usize], photons: usize) -> Result<StateVector> {
    let levels: Vec<Level> =
        (0..space.n_qubits()).map(|k| if excited.contains(&k) { Level::Excited } else { Level::Ground }).collect();
    Ok(StateVector::basis(space, space.index_of(&levels, photons)?))
}

fn superpose(space: HilbertSpace, terms: &[(&[usize], C64)]) -> Result<StateVector> {
    let mut psi = StateVector::from_vec(space, vec![C64::new(0.0, 0.0); space.dimension()])?;
    for (excited, amp) in terms {
        let b = ket(space, excited, 0)?;
        *psi.amplitudes_mut() += b.amplitudes() * *amp;
    }
    Ok(psi)
}

/// Population outside the span of `support` (orthonormal).
fn leakage_outside(psi: &StateVector, support: &[StateVector]) -> Result<f64> {
    let mut inside = 0.0;
    for b in support {
        inside += b.inner(psi)?.norm_sqr();
    }
    Ok((psi.norm().powi(2) - inside).max(0.0))
}

/// Closed-form phases `theta_1..theta_4` of the phase gate (all windows at
/// the same `lambda`), with `theta_4` taken as a real phase.
pub fn phase_gate_formula(omega: f64, omega_i: f64, omega_j: f64, lambda: f64) -> [f64; 4] {
    let k = PI / lambda;
    [
        (omega_i + 2.0 * omega_j) * k,
        -(-omega_i + 2.0 * omega_j + 2.0 * omega) * k,
        -(omega_i - 2.0 * omega_j + 4.0 * omega) * k,
        -(omega_i + 2.0 * omega_j + 6.0 * omega) * k,
    ]
}

/// Two-qubit phase gate between `i` and `j`.
///
/// The gate is simulated on the two-qubit sub-bus `{i, j}` so that other
/// qubits do not contribute phases. The target is the closed-form diagonal
/// gate when both qubits share one coupling, else the analytic-tier result.
pub fn phase_gate(i: usize, j: usize, cfg: &BusConfig, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    distinct(&[i, j], cfg)?;
    let sub = cfg.select(&[i, j])?;
    let (li, lj) = (sub.qubits[0].lambda, sub.qubits[1].lambda);
    let (lambdas, explicit) = window_lambdas(opts, &[li, lj, li])?;
    let lambdas = [lambdas[0], lambdas[1], lambdas[2]];
    let local = phase_gate_schedule(0, 1, lambdas, explicit)?;
    let echo = phase_gate_schedule(i, j, lambdas, explicit)?;

    let space = sub.space();
    let basis: Vec<StateVector> =
        [&[][..], &[1], &[0], &[0, 1]].iter().map(|e| ket(space, e, 0)).collect::<Result<_>>()?;
    let labels: Vec<String> = ["g,g", "g,e", "e,g", "e,e"]
        .iter()
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            format!("{a}_{i},{b}_{j}")
        })
        .collect();

    let block = |tier: Tier| -> Result<(DMatrix<C64>, Vec<Checkpoint>, f64)> {
        let exec = Executor::new(&local, &sub, ExecOptions { tier, ..opts.exec })?;
        let mut m = DMatrix::zeros(4, 4);
        let mut worst_cavity = vec![0.0f64; local.segments.len()];
        let mut leak: f64 = 0.0;
        for (c, b) in basis.iter().enumerate() {
            let run = exec.run(b)?;
            for (w, tr) in worst_cavity.iter_mut().zip(&run.trace) {
                *w = w.max(tr.resonator_population);
            }
            for (r, br) in basis.iter().enumerate() {
                m[(r, c)] = br.inner(&run.final_state)?;
            }
            leak = leak.max(leakage_outside(&run.final_state, &basis)?);
        }
        let checkpoints = worst_cavity
            .into_iter()
            .enumerate()
            .map(|(segment, p)| Checkpoint {
                segment,
                description: "resonator population after the window, worst computational input".into(),
                fidelity: None,
                resonator_population: p,
            })
            .collect();
        Ok((m, checkpoints, leak))
    };

    let (achieved, checkpoints, leakage) = block(opts.exec.tier)?;
    let (derived, off_diagonal) = diagonal_phases(&achieved, &HilbertSpace::qubits_only(2), &qubit_basis(2))?;

    let same_lambda = lambdas[0] == lambdas[1] && lambdas[1] == lambdas[2];
    let mut notes = vec![
        "simulated on the two-qubit sub-bus {i, j}; other qubits are absent".to_string(),
        "theta_4 is printed with a factor i, which would make e^{i theta_4} non-unitary; compared with the i removed"
            .to_string(),
    ];
    let mut metrics = BTreeMap::new();
    metrics.insert("off_diagonal".into(), off_diagonal);

    let (formula, formula_match, printed, printed_match, target) = if same_lambda {
        let th = phase_gate_formula(sub.omega, sub.qubits[0].omega, sub.qubits[1].omega, lambdas[0]);
        let f: Vec<f64> = th.iter().map(|t| wrap_phase(*t)).collect();
        let fm: Vec<bool> = derived.iter().zip(&f).map(|(d, t)| phase_distance(*d, *t) < PHASE_TOL).collect();
        let p: Vec<f64> = th.iter().enumerate().map(|(k, t)| wrap_phase(if k == 0 { *t } else { -*t })).collect();
        let pm: Vec<bool> = derived.iter().zip(&p).map(|(d, t)| phase_distance(*d, *t) < PHASE_TOL).collect();
        let worst = derived.iter().zip(&f).map(|(d, t)| phase_distance(*d, *t)).fold(0.0, f64::max);
        metrics.insert("formula_max_deviation".into(), worst);
        if pm.iter().skip(1).any(|ok| !ok) {
            notes.push(
                "the printed gate matrix conjugates entries 2-4 (e^{-i theta_k}); the evolution gives e^{+i theta_k}"
                    .to_string(),
            );
        }
        let diag =
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(4, th.iter().map(|t| C64::from_polar(1.0, *t))));
        (Some(f), Some(fm), Some(p), Some(pm), diag)
    } else {
        notes.push("windows use different couplings; the closed-form phases do not apply".to_string());
        let target = if opts.exec.tier == Tier::Analytic { achieved.clone() } else { block(Tier::Analytic)?.0 };
        (None, None, None, None, target)
    };

    let fid = process_fidelity(&target, &achieved);
    let (fz, [za, zb]) = local_z_fidelity(&target, &achieved)?;
    metrics.insert("local_z_fidelity".into(), fz);
    metrics.insert("local_z_phase_i".into(), za);
    metrics.insert("local_z_phase_j".into(), zb);
    Ok(ProtocolReport {
        protocol: "phase_gate".into(),
        tier: opts.exec.tier,
        qubits: vec![i, j],
        schedule: echo,
        target: Outcome::Operator { operator: OperatorBlock { basis: labels.clone(), matrix: target } },
        achieved: Outcome::Operator { operator: OperatorBlock { basis: labels.clone(), matrix: achieved } },
        fidelity: fid,
        leakage,
        phases: Some(PhaseAnalysis {
            basis: labels,
            derived,
            off_diagonal,
            formula,
            formula_match,
            printed_matrix: printed,
            printed_matrix_match: printed_match,
            literal_theta4_reproducible: false,
        }),
        checkpoints,
        metrics,
        notes,
    })
}

fn qubit_basis(n: usize) -> Vec<StateVector> {
    let s = HilbertSpace::qubits_only(n);
    (0..s.dimension()).map(|k| StateVector::basis(s, k)).collect()
}

/// Worst idle-qubit transfer bound during window `seg` of a schedule.
fn idle_bound(cfg: &BusConfig, seg: &Segment) -> f64 {
    cfg.qubits
        .iter()
        .enumerate()
        .filter(|(k, _)| !seg.resonant_qubits.contains(k))
        .filter_map(|(k, q)| {
            let l = seg.lambda_override.get(&k).copied().unwrap_or(q.lambda);
            dispersive_leakage_bound(l, q.omega - cfg.omega).ok()
        })
        .fold(0.0, f64::max)
}

/// Bell pair `(|g_i e_j> + |e_i g_j>)/sqrt 2` from `|e_i g_j, 0>`, other
/// qubits in `|g>`.
pub fn bell_protocol(i: usize, j: usize, cfg: &BusConfig, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    distinct(&[i, j], cfg)?;
    let li = cfg.qubits[i].lambda;
    let (lambdas, explicit) = window_lambdas(opts, &[li, li])?;
    let schedule = bell_schedule(i, j, [lambdas[0], lambdas[1]], explicit)?;
    let space = cfg.space();
    let initial = ket(space, &[i], 0)?;
    let run = Executor::new(&schedule, cfg, opts.exec)?.run(&initial)?;

    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let target = superpose(space, &[(&[j], r), (&[i], r)])?;
    let support = [ket(space, &[j], 0)?, ket(space, &[i], 0)?];
    let final_state = run.final_state;
    let fid = fidelity(&target, &final_state)?;
    let leakage = leakage_outside(&final_state, &support)?;

    let waypoint = ket(space, &[], 1)?;
    let checkpoints = vec![Checkpoint {
        segment: 0,
        description: "|g_i,g_j,1>: the excitation sits in the resonator".into(),
        fidelity: Some(fidelity(&waypoint, &run.trace[0].state)?),
        resonator_population: run.trace[0].resonator_population,
    }];

    let mut metrics = BTreeMap::new();
    let cavity = final_state.resonator_excited_population();
    metrics.insert("resonator_population".into(), cavity);
    let pair = HilbertSpace::qubits_only(2);
    let pair_target = StateVector::from_terms(pair, &[("g,e,0", r), ("e,g,0", r)])?;
    if let Ok(f) = partial_trace_fidelity(&final_state, &[i, j], &pair_target) {
        metrics.insert("reduced_pair_fidelity".into(), f);
    }
    let mut notes = Vec::new();
    if opts.exec.tier != Tier::Analytic && opts.exec.idle_coupling == IdleCoupling::Detuned {
        let bound = idle_bound(cfg, &schedule.segments[0]);
        metrics.insert("idle_transfer_bound".into(), bound);
        notes.push(
            "idle_transfer_bound: largest detuned-Rabi transfer bound among idle qubits in the first window".into(),
        );
    }

    Ok(ProtocolReport {
        protocol: "bell".into(),
        tier: opts.exec.tier,
        qubits: vec![i, j],
        schedule,
        target: Outcome::State { state: target },
        achieved: Outcome::State { state: final_state },
        fidelity: fid,
        leakage,
        phases: None,
        checkpoints,
        metrics,
        notes,
    })
}

/// W state on `(i, j, k)` from `|g_i g_j e_k, 0>`.
///
/// The target keeps the relative phase `e^{-i omega pi / (2 sqrt 2 lambda)}`
/// and the minus branch. While `i` and `j` resonate, idle qubit `k` picks up
/// a relative phase `e^{i Omega_k t_2}` that the target leaves out; the
/// reported fidelity is taken after undoing it with a virtual Z on `k`, and
/// the uncorrected value is kept under `raw_fidelity`.
pub fn w_protocol(i: usize, j: usize, k: usize, cfg: &BusConfig, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    distinct(&[i, j, k], cfg)?;
    let (lk, li) = (cfg.qubits[k].lambda, cfg.qubits[i].lambda);
    let (lambdas, explicit) = window_lambdas(opts, &[lk, li])?;
    let schedule = w_schedule(i, j, k, [lambdas[0], lambdas[1]], explicit)?;
    let space = cfg.space();
    let initial = ket(space, &[k], 0)?;
    let run = Executor::new(&schedule, cfg, opts.exec)?.run(&initial)?;

    let t2 = schedule.segments[1].duration;
    let raw = run.final_state;
    let corrected = idle_phase(&raw, k, cfg.qubits[k].omega, -t2)?;

    let s3 = 1.0 / 3f64.sqrt();
    let rel = C64::from_polar(1.0, -cfg.omega * PI / (2.0 * SQRT_2 * lambdas[1].abs()));
    let target = superpose(space, &[(&[k], C64::new(s3, 0.0)), (&[j], -rel * s3), (&[i], -rel * s3)])?;
    let plain = superpose(space, &[(&[k], C64::new(s3, 0.0)), (&[j], C64::new(s3, 0.0)), (&[i], C64::new(s3, 0.0))])?;
    let support = [ket(space, &[k], 0)?, ket(space, &[j], 0)?, ket(space, &[i], 0)?];

    let fid = fidelity(&target, &corrected)?;
    let leakage = leakage_outside(&corrected, &support)?;

    let mut metrics = BTreeMap::new();
    metrics.insert("raw_fidelity".into(), fidelity(&target, &raw)?);
    metrics.insert("plain_w_fidelity".into(), fidelity(&plain, &corrected)?);
    metrics.insert("plain_vs_target_overlap".into(), fidelity(&plain, &target)?);
    metrics.insert("idle_frame_phase".into(), wrap_phase(cfg.qubits[k].omega * t2));
    for (name, b) in ["population_k", "population_j", "population_i"].iter().zip(&support) {
        metrics.insert((*name).into(), b.inner(&corrected)?.norm_sqr());
    }

    // after t_1: cos(lambda t_1)|e_k,0> - i sin(lambda t_1)|g,1>
    let mut after_t1 = superpose(space, &[(&[k], C64::new(s3, 0.0))])?;
    *after_t1.amplitudes_mut() += ket(space, &[], 1)?.amplitudes() * C64::new(0.0, -(2.0f64 / 3.0).sqrt());
    let checkpoints = vec![Checkpoint {
        segment: 0,
        description: "(|e_k,0> - i sqrt2 |g,1>)/sqrt3 after the first window".into(),
        fidelity: Some(fidelity(&after_t1, &run.trace[0].state)?),
        resonator_population: run.trace[0].resonator_population,
    }];

    let notes = vec![
        "t_2 = pi/(2 sqrt2 lambda), the time at which cos(sqrt2 lambda t_2) = 0".into(),
        "fidelity after removing the idle phase e^{i Omega_k t_2} of qubit k (virtual Z); see raw_fidelity".into(),
    ];

    Ok(ProtocolReport {
        protocol: "wstate".into(),
        tier: opts.exec.tier,
        qubits: vec![i, j, k],
        schedule,
        target: Outcome::State { state: target },
        achieved: Outcome::State { state: corrected },
        fidelity: fid,
        leakage,
        phases: None,
        checkpoints,
        metrics,
        notes,
    })
}

/// Largest `|<g,1|e^{-iHt}|e,0>|^2` for a qubit detuned by `delta`:
/// `lambda^2 / (lambda^2 + delta^2/4)`.
pub fn dispersive_leakage_bound(lambda: f64, delta: f64) -> Result<f64> {
    if lambda == 0.0 && delta == 0.0 {
        return Err(Error::InvalidParameter("bound undefined for lambda = delta = 0".into()));
    }
    let l2 = lambda * lambda;
    Ok(l2 / (l2 + 0.25 * delta * delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferMaximum {
    pub probability: f64,
    pub time: f64,
}

/// Numerically observed maximum of `|<g,1|e^{-iHt}|e,0>|^2` over one period
/// of the exchange oscillation, for `Omega = omega + delta`.
///
/// The period comes from the numeric splitting of the one-excitation block.
/// A grid scan brackets the maximum and golden-section search refines it.
pub fn max_transfer_numeric(omega: f64, lambda: f64, delta: f64) -> Result<TransferMaximum> {
    let h = build_jc(omega, omega + delta, lambda, 2)?;
    let space = *h.space();
    let (e0, g1) = (space.parse_label("e,0")?, space.parse_label("g,1")?);
    let (vals, _) = eig_hermitian_matrix(&h.block(&[g1, e0]))?;
    let gap = vals[1] - vals[0];
    if gap <= 0.0 {
        return Ok(TransferMaximum { probability: 0.0, time: 0.0 });
    }
    let spec = h.spectrum();
    let start = StateVector::basis(space, e0);
    let p = |t: f64| spec.evolve(&start, t).map(|s| s.amplitude(g1).norm_sqr());

    let period = TAU / gap;
    let n = 64;
    let grid: Vec<f64> = (0..=n).map(|k| period * k as f64 / n as f64).collect();
    let values = sweep::try_map(&grid, |&t| p(t))?;
    let best = values.iter().enumerate().fold(0, |b, (k, v)| if *v > values[b] { k } else { b });
    let step = period / n as f64;
    let (mut a, mut b) = ((grid[best] - step).max(0.0), grid[best] + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - inv_phi * (b - a), a + inv_phi * (b - a));
    let (mut fc, mut fd) = (p(c)?, p(d)?);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = p(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = p(d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok(TransferMaximum { probability: p(t)?.max(values[best]), time: t })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersiveRow {
    /// `Delta / lambda`.
    pub ratio: f64,
    pub delta: f64,
    pub bound: f64,
    pub numeric: f64,
    pub time_of_max: f64,
    pub abs_error: f64,
}

/// Bound against numeric maximum for each detuning ratio `Delta / lambda`.
pub fn dispersive_scan(omega: f64, lambda: f64, ratios: &[f64]) -> Result<Vec<DispersiveRow>> {
    check_lambda(lambda)?;
    sweep::try_map(ratios, |&ratio| {
        let delta = ratio * lambda;
        let bound = dispersive_leakage_bound(lambda, delta)?;
        let m = max_transfer_numeric(omega, lambda, delta)?;
        Ok(DispersiveRow {
            ratio,
            delta,
            bound,
            numeric: m.probability,
            time_of_max: m.time,
            abs_error: (m.probability - bound).abs(),
        })
    })
}

/// A qubit parked at an idle operating point on a bus of frequency
/// `bus_omega`, with coupling `prefactor * sin(pi f) cos(eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitSetup {
    pub idle: DeviceParams,
    pub bus_omega: f64,
    pub coupling_prefactor: f64,
    pub fock_cutoff: usize,
}

/// `exp(-i H_q t)` in the charge basis `(|0>, |1>)`.
pub fn charge_basis_unitary(p: &DeviceParams, t: f64) -> Matrix2<C64> {
    // H^2 = E^2, so exp(-iHt) = cos(Et) - i sin(Et) H/E
    let h = charge_hamiltonian(p);
    let e = splitting(p);
    let (c, s) = (C64::new((e * t).cos(), 0.0), C64::new(0.0, -(e * t).sin()));
    let id = Matrix2::<C64>::identity();
    if e == 0.0 {
        return id;
    }
    let hn = h.map(|x| C64::new(x / e, 0.0));
    id * c + hn * s
}

fn rotation(eta: f64) -> Matrix2<C64> {
    eigenbasis_transform(eta).map(|x| C64::new(x, 0.0))
}

/// Single-qubit gate from switching to `(n_g, f)` for time `t`.
///
/// The ideal gate is the decoupled evolution `exp(-i H_q t)`, expressed in
/// the idle operating point's eigenbasis `(|g>, |e>)`. Numeric tiers evolve
/// the qubit with its bus coupling at the gate point (resonator in vacuum)
/// and report the process fidelity of the `{|g,0>, |e,0>}` block.
pub fn single_qubit_gate(
    setup: &SingleQubitSetup,
    n_g: f64,
    flux_ratio: f64,
    t: f64,
    tier: Tier,
) -> Result<ProtocolReport> {
    let gate = setup.idle.at(n_g, flux_ratio)?;
    let eta_idle = mixing_angle(&setup.idle)?;
    let omega_q = 2.0 * splitting(&gate);
    let lambda = coupling_from_prefactor(setup.coupling_prefactor, &gate)?;
    let eta = mixing_angle(&gate)?;
    let delta = omega_q - setup.bus_omega;
    let ratio = if delta == 0.0 {
        if lambda == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (lambda / delta).abs()
    };
    if ratio > DISPERSIVE_LIMIT {
        return Err(Error::DispersiveViolation { ratio, limit: DISPERSIVE_LIMIT });
    }
    let mut notes = Vec::new();
    if ratio > DISPERSIVE_WARN {
        notes.push(format!("|lambda/Delta| = {ratio:.3e} exceeds the advisory threshold {DISPERSIVE_WARN}"));
    }

    // idle eigenbasis -> charge basis
    let to_charge = rotation(eta_idle);
    let ideal_charge = charge_basis_unitary(&gate, t);
    let ideal = to_charge.adjoint() * ideal_charge * to_charge;
    let ideal = DMatrix::from_fn(2, 2, |r, c| ideal[(r, c)]);

    let achieved = match tier {
        Tier::Analytic => ideal.clone(),
        Tier::Rwa | Tier::Lab => {
            let cfg =
                BusConfig::new(setup.bus_omega, vec![BusQubit::new(omega_q, lambda).with_eta(eta)], setup.fock_cutoff)?;
            let h = if tier == Tier::Rwa { build_multi(&cfg)? } else { build_lab_frame(&cfg)? };
            let space = cfg.space();
            let u = h.spectrum().unitary(t);
            let idx = [space.parse_label("g,0")?, space.parse_label("e,0")?];
            // block in the gate eigenbasis, then rotate to the idle eigenbasis
            let blk = Matrix2::from_fn(|r, c| u.matrix()[(idx[r], idx[c])]);
            let gate_to_idle = to_charge.adjoint() * rotation(eta);
            let m = gate_to_idle * blk * gate_to_idle.adjoint();
            DMatrix::from_fn(2, 2, |r, c| m[(r, c)])
        }
    };
    let fid = process_fidelity(&ideal, &achieved);
    let leakage = (1.0 - achieved.column_iter().map(|c| c.norm_squared()).fold(f64::INFINITY, f64::min)).max(0.0);
    let mut metrics = BTreeMap::new();
    metrics.insert("omega_q".into(), omega_q);
    metrics.insert("eta".into(), eta);
    metrics.insert("lambda".into(), lambda);
    metrics.insert("delta".into(), delta);
    metrics.insert("lambda_over_delta".into(), ratio);
    if let Ok(b) = dispersive_leakage_bound(lambda, delta) {
        metrics.insert("dispersive_bound".into(), b);
    }
    let labels = vec!["g".to_string(), "e".to_string()];
    Ok(ProtocolReport {
        protocol: "single_qubit".into(),
        tier,
        qubits: vec![0],
        schedule: PulseSchedule::new("single_qubit", vec![Segment::idle(t)])?,
        target: Outcome::Operator { operator: OperatorBlock { basis: labels.clone(), matrix: ideal } },
        achieved: Outcome::Operator { operator: OperatorBlock { basis: labels, matrix: achieved } },
        fidelity: fid,
        leakage,
        phases: None,
        checkpoints: Vec::new(),
        metrics,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_cfg() -> BusConfig {
        BusConfig::new(1.0, (1..=3).map(|k| BusQubit::new(1.0 + 0.3 * k as f64, 0.05)).collect(), 4).unwrap()
    }

    #[test]
    fn phase_gate_matches_closed_form() {
        let r = phase_gate(0, 1, &default_cfg(), &ProtocolOptions::default()).unwrap();
        let ph = r.phases.unwrap();
        assert!(ph.off_diagonal < 1e-9);
        assert!(ph.formula_match.unwrap().iter().all(|&ok| ok));
        assert!(ph.printed_matrix_match.unwrap()[0]);
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        assert!(r.leakage < 1e-9);
    }

    #[test]
    fn theta1_value() {
        let cfg = BusConfig::new(1.0, vec![BusQubit::new(1.3, 0.05), BusQubit::new(1.7, 0.05)], 4).unwrap();
        let r = phase_gate(0, 1, &cfg, &ProtocolOptions::default()).unwrap();
        let expect = wrap_phase((1.3 + 3.4) * PI / 0.05);
        assert!(phase_distance(r.phases.unwrap().derived[0], expect) < 1e-9);
    }

    #[test]
    fn bell_analytic() {
        let r = bell_protocol(0, 1, &default_cfg(), &ProtocolOptions::default()).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-9);
        assert!((r.checkpoints[0].fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.metrics["reduced_pair_fidelity"] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn w_analytic() {
        let r = w_protocol(0, 1, 2, &default_cfg(), &ProtocolOptions::default()).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-9, "{}", r.fidelity);
        for key in ["population_i", "population_j", "population_k"] {
            assert!((r.metrics[key] - 1.0 / 3.0).abs() < 1e-9);
        }
        assert!((r.checkpoints[0].fidelity.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dispersive_bound_values() {
        assert_eq!(dispersive_leakage_bound(0.1, 0.0).unwrap(), 1.0);
        assert_eq!(dispersive_leakage_bound(0.0, 0.3).unwrap(), 0.0);
        assert!((dispersive_leakage_bound(1.0, 100.0).unwrap() - 1.0 / 2501.0).abs() < 1e-18);
        assert!(dispersive_leakage_bound(0.0, 0.0).is_err());
        for ratio in [3.0, 10.0, 100.0] {
            let m = max_transfer_numeric(1.0, 0.003, ratio * 0.003).unwrap();
            let b = dispersive_leakage_bound(0.003, ratio * 0.003).unwrap();
            assert!((m.probability - b).abs() < 1e-6);
        }
    }

    #[test]
    fn single_qubit_full_period_is_identity() {
        let idle = DeviceParams::new(10.0, 0.5, 0.3, 0.25).unwrap();
        let setup = SingleQubitSetup { idle, bus_omega: 20.0, coupling_prefactor: 0.0, fock_cutoff: 2 };
        let gate = idle.at(0.3, 0.25).unwrap();
        let t = TAU / (2.0 * splitting(&gate));
        let r = single_qubit_gate(&setup, 0.3, 0.25, t, Tier::Analytic).unwrap();
        let Outcome::Operator { operator } = &r.achieved else { panic!() };
        let id = DMatrix::<C64>::identity(2, 2);
        assert!((process_fidelity(&id, &operator.matrix) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn charge_flop_at_degeneracy() {
        let p = DeviceParams::new(10.0, 0.5, 0.5, 0.0).unwrap();
        let u = charge_basis_unitary(&p, PI / (2.0 * 0.5));
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }
}
