use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{free_step, jc_resonant_step, joint_resonant_step, TRUNCATION_TOL};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_lab_frame, build_multi, BusConfig, BusQubit};
use crate::operator::{Spectrum, UnitaryOperator};
use crate::state::StateVector;

use super::{PulseSchedule, Segment};

/// Simulation fidelity level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    /// Closed-form steps, idle qubits exactly decoupled.
    #[serde(rename = "analytic")]
    Analytic,
    /// Exact propagation under the rotating-wave Hamiltonian.
    #[serde(rename = "rwa-numeric")]
    Rwa,
    /// Exact propagation including counter-rotating terms.
    #[serde(rename = "lab-frame")]
    Lab,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Analytic, Tier::Rwa, Tier::Lab];

    pub fn name(self) -> &'static str {
        match self {
            Tier::Analytic => "analytic",
            Tier::Rwa => "rwa-numeric",
            Tier::Lab => "lab-frame",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Tier::Analytic),
            "rwa" | "rwa-numeric" => Ok(Tier::Rwa),
            "lab" | "lab-frame" => Ok(Tier::Lab),
            _ => Err(Error::InvalidParameter(format!("unknown tier `{s}` (analytic, rwa, lab)"))),
        }
    }
}

/// How idle qubits couple to the bus in numeric tiers. The analytic tier
/// always decouples them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdleCoupling {
    /// Idle qubits keep their coupling at their own detuned frequency.
    Detuned,
    /// Idle qubits have `lambda = 0`.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecOptions {
    pub tier: Tier,
    pub idle_coupling: IdleCoupling,
}

impl ExecOptions {
    pub fn new(tier: Tier) -> Self {
        Self { tier, idle_coupling: IdleCoupling::Detuned }
    }

    pub fn with_idle_coupling(mut self, idle_coupling: IdleCoupling) -> Self {
        self.idle_coupling = idle_coupling;
        self
    }
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self::new(Tier::Analytic)
    }
}

/// Bus parameters in force during one segment: resonant qubits sit at
/// `Omega = omega`, idle qubits at their own frequency.
pub fn segment_config(cfg: &BusConfig, seg: &Segment, idle: IdleCoupling) -> Result<BusConfig> {
    check_indices(cfg, seg)?;
    let qubits = cfg
        .qubits
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let lambda = seg.lambda_override.get(&k).copied().unwrap_or(q.lambda);
            if seg.resonant_qubits.contains(&k) {
                BusQubit { omega: cfg.omega, lambda, eta: q.eta }
            } else {
                let lambda = match idle {
                    IdleCoupling::Detuned => lambda,
                    IdleCoupling::Off => 0.0,
                };
                BusQubit { omega: q.omega, lambda, eta: q.eta }
            }
        })
        .collect();
    BusConfig::new(cfg.omega, qubits, cfg.fock_cutoff)
}

fn check_indices(cfg: &BusConfig, seg: &Segment) -> Result<()> {
    let n = cfg.n_qubits();
    if let Some(&q) = seg.resonant_qubits.iter().chain(seg.lambda_override.keys()).find(|&&q| q >= n) {
        return Err(Error::InvalidParameter(format!("segment addresses qubit {q} but the bus has {n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentTrace {
    pub index: usize,
    pub resonant_qubits: Vec<usize>,
    pub duration: f64,
    /// Elapsed time at the end of the segment.
    pub time: f64,
    pub norm: f64,
    /// Population with at least one photon.
    pub resonator_population: f64,
    pub state: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Execution {
    pub final_state: StateVector,
    pub trace: Vec<SegmentTrace>,
}

enum Step {
    Free,
    Jc { qubit: usize, lambda: f64 },
    Joint { pair: (usize, usize), lambda: f64 },
    Numeric(Spectrum),
}

/// A schedule bound to a bus and tier, with per-segment propagators
/// prepared once so that many initial states can be run cheaply.
pub struct Executor {
    cfg: BusConfig,
    tier: Tier,
    segments: Vec<(Segment, Step)>,
}

impl Executor {
    pub fn new(schedule: &PulseSchedule, cfg: &BusConfig, opts: ExecOptions) -> Result<Self> {
        schedule.validate()?;
        cfg.validate()?;
        let segments = schedule
            .segments
            .iter()
            .map(|seg| Ok((seg.clone(), prepare(seg, cfg, opts)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { cfg: cfg.clone(), tier: opts.tier, segments })
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn config(&self) -> &BusConfig {
        &self.cfg
    }

    pub fn run(&self, initial: &StateVector) -> Result<Execution> {
        self.cfg.space().ensure_same(initial.space())?;
        let mut psi = initial.clone();
        let mut time = 0.0;
        let mut trace = Vec::with_capacity(self.segments.len());
        for (index, (seg, step)) in self.segments.iter().enumerate() {
            psi = self.step(&psi, seg, step)?;
            time += seg.duration;
            trace.push(SegmentTrace {
                index,
                resonant_qubits: seg.resonant_qubits.clone(),
                duration: seg.duration,
                time,
                norm: psi.norm(),
                resonator_population: psi.resonator_excited_population(),
                state: psi.clone(),
            });
        }
        Ok(Execution { final_state: psi, trace })
    }

    /// Final state only.
    pub fn apply(&self, initial: &StateVector) -> Result<StateVector> {
        self.cfg.space().ensure_same(initial.space())?;
        let mut psi = initial.clone();
        for (seg, step) in &self.segments {
            psi = self.step(&psi, seg, step)?;
        }
        Ok(psi)
    }

    /// Full propagator of the schedule. Numeric tiers only, since the
    /// analytic steps are undefined on states that reach the cutoff.
    pub fn unitary(&self) -> Result<UnitaryOperator> {
        let space = self.cfg.space();
        let mut u = UnitaryOperator::identity(space);
        for (seg, step) in &self.segments {
            let Step::Numeric(spec) = step else {
                return Err(Error::TierIncompatible {
                    tier: self.tier.to_string(),
                    reason: "full propagator needs a numeric tier".into(),
                });
            };
            u = u.then(&spec.unitary(seg.duration))?;
        }
        Ok(u)
    }

    fn step(&self, psi: &StateVector, seg: &Segment, step: &Step) -> Result<StateVector> {
        let omega = self.cfg.omega;
        let idle: Vec<f64> = self.cfg.qubits.iter().map(|q| q.omega).collect();
        let t = seg.duration;
        match step {
            Step::Free => free_step(psi, omega, &idle, t),
            Step::Jc { qubit, lambda } => jc_resonant_step(psi, *qubit, *lambda, omega, &idle, t),
            Step::Joint { pair, lambda } => joint_resonant_step(psi, *pair, *lambda, omega, &idle, t),
            Step::Numeric(spec) => {
                let out = spec.evolve(psi, t)?;
                let space = *out.space();
                let top = out.population_where(|i| space.photons(i) == space.fock_cutoff());
                if top > TRUNCATION_TOL {
                    return Err(Error::Truncation { population: top, fock_cutoff: space.fock_cutoff() });
                }
                Ok(out)
            }
        }
    }
}

fn prepare(seg: &Segment, cfg: &BusConfig, opts: ExecOptions) -> Result<Step> {
    check_indices(cfg, seg)?;
    let lambda_of = |k: usize| seg.lambda_override.get(&k).copied().unwrap_or(cfg.qubits[k].lambda);
    let incompatible = |reason: String| Error::TierIncompatible { tier: opts.tier.to_string(), reason };
    match opts.tier {
        Tier::Analytic => match seg.resonant_qubits.as_slice() {
            [] => Ok(Step::Free),
            &[q] => Ok(Step::Jc { qubit: q, lambda: lambda_of(q) }),
            &[a, b] => {
                let (la, lb) = (lambda_of(a), lambda_of(b));
                if la != lb {
                    return Err(incompatible(format!(
                        "joint resonance of q{a} and q{b} needs equal couplings, got {la} and {lb}"
                    )));
                }
                Ok(Step::Joint { pair: (a, b), lambda: la })
            }
            more => Err(incompatible(format!("{} simultaneously resonant qubits (at most 2)", more.len()))),
        },
        Tier::Rwa => Ok(Step::Numeric(build_multi(&segment_config(cfg, seg, opts.idle_coupling)?)?.spectrum())),
        Tier::Lab => Ok(Step::Numeric(build_lab_frame(&segment_config(cfg, seg, opts.idle_coupling)?)?.spectrum())),
    }
}

pub fn execute(
    schedule: &PulseSchedule,
    cfg: &BusConfig,
    initial: &StateVector,
    opts: ExecOptions,
) -> Result<Execution> {
    Executor::new(schedule, cfg, opts)?.run(initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::fidelity;
    use num_complex::Complex64 as C64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn cfg(lambda: f64) -> BusConfig {
        BusConfig::new(1.0, vec![BusQubit::new(1.3, lambda), BusQubit::new(1.6, lambda), BusQubit::new(1.9, lambda)], 4)
            .unwrap()
    }

    fn bell(lambda: f64) -> PulseSchedule {
        PulseSchedule::new(
            "bell",
            vec![
                Segment::resonate(&[0], PI / (2.0 * lambda)),
                Segment::resonate(&[0, 1], PI / (2.0 * SQRT_2 * lambda)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bell_analytic_and_rwa_agree() {
        let c = cfg(0.05);
        let init = StateVector::from_label(c.space(), "e,g,g,0").unwrap();
        let a = execute(&bell(0.05), &c, &init, ExecOptions::new(Tier::Analytic)).unwrap();
        let r =
            execute(&bell(0.05), &c, &init, ExecOptions::new(Tier::Rwa).with_idle_coupling(IdleCoupling::Off)).unwrap();
        assert!(a.final_state.max_abs_diff(&r.final_state).unwrap() < 1e-9);
        let target = StateVector::from_terms(
            c.space(),
            &[("g,e,g,0", C64::new(FRAC_1_SQRT_2, 0.0)), ("e,g,g,0", C64::new(FRAC_1_SQRT_2, 0.0))],
        )
        .unwrap();
        assert!((fidelity(&a.final_state, &target).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(a.trace.len(), 2);
        assert!((a.trace[0].resonator_population - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_config_sets_resonance() {
        let c = cfg(0.05);
        let seg = Segment::resonate(&[1], 1.0).with_lambda(1, 0.2);
        let s = segment_config(&c, &seg, IdleCoupling::Off).unwrap();
        assert_eq!(s.qubits[1], BusQubit::new(1.0, 0.2));
        assert_eq!(s.qubits[0], BusQubit::new(1.3, 0.0));
        let s = segment_config(&c, &seg, IdleCoupling::Detuned).unwrap();
        assert_eq!(s.qubits[2], BusQubit::new(1.9, 0.05));
    }

    #[test]
    fn analytic_rejects_three_resonant() {
        let c = cfg(0.05);
        let s = PulseSchedule::new("x", vec![Segment::resonate(&[0, 1, 2], 1.0)]).unwrap();
        assert!(matches!(Executor::new(&s, &c, ExecOptions::new(Tier::Analytic)), Err(Error::TierIncompatible { .. })));
        assert!(Executor::new(&s, &c, ExecOptions::new(Tier::Rwa)).is_ok());
        let s = PulseSchedule::new("x", vec![Segment::resonate(&[0, 1], 1.0).with_lambda(1, 0.1)]).unwrap();
        assert!(Executor::new(&s, &c, ExecOptions::new(Tier::Analytic)).is_err());
    }

    #[test]
    fn numeric_truncation_is_reported() {
        let c = BusConfig::new(1.0, vec![BusQubit::new(1.0, 0.05)], 1).unwrap();
        let init = StateVector::from_label(c.space(), "e,1").unwrap();
        let s = PulseSchedule::new("x", vec![Segment::resonate(&[0], 3.0)]).unwrap();
        let e = execute(&s, &c, &init, ExecOptions::new(Tier::Rwa)).unwrap_err();
        assert!(matches!(e, Error::Truncation { .. }));
    }

    #[test]
    fn tier_names() {
        assert_eq!("rwa".parse::<Tier>().unwrap(), Tier::Rwa);
        assert_eq!("lab-frame".parse::<Tier>().unwrap(), Tier::Lab);
        assert!("exact".parse::<Tier>().is_err());
        assert_eq!(serde_json::to_string(&Tier::Rwa).unwrap(), "\"rwa-numeric\"");
    }
}
