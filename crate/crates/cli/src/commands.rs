use std::fs;
use std::path::Path;

use chargebus::hamiltonian::{build_multi, excitation_manifold, two_qubit_resonant_eigensystem};
use chargebus::nalgebra::DVector;
use chargebus::operator::eig_hermitian_matrix;
use chargebus::params::ParamFile;
use chargebus::protocols::{bell_protocol, dispersive_scan, phase_gate, w_protocol, ProtocolOptions, ProtocolReport};
use chargebus::schedule::{compile, parse, ExecOptions, Executor};
use chargebus::{BusConfig, BusQubit, Complex64 as C64, StateVector};
use serde_json::{json, Value};

use crate::args::{Command, Common};
use crate::error::CliError;
use crate::output::{Report, Table};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub struct Setup {
    pub params: ParamFile,
    pub cfg: BusConfig,
}

pub fn load(common: &Common) -> Result<Setup, CliError> {
    let params = match &common.params {
        Some(p) => ParamFile::from_json(&read(p)?).map_err(|e| CliError::in_file(p, e))?,
        None => ParamFile::default_params(),
    };
    let mut cfg = params.bus_config()?;
    if let Some(n) = common.fock_cutoff {
        cfg = cfg.with_fock_cutoff(n);
        cfg.validate()?;
    }
    Ok(Setup { params, cfg })
}

fn base_inputs(common: &Common, setup: &Setup) -> Value {
    json!({
        "params": setup.params,
        "params_file": common.params.as_ref().map(|p| p.display().to_string()),
        "tier": common.tier,
        "idle_coupling": chargebus::schedule::IdleCoupling::from(common.idle_coupling),
        "fock_cutoff": setup.cfg.fock_cutoff,
    })
}

fn with(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn protocol_options(common: &Common) -> ProtocolOptions {
    ProtocolOptions::new(common.tier).with_idle_coupling(common.idle_coupling.into())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn dispatch(command: &Command, common: &Common) -> Result<Report, CliError> {
    let setup = load(common)?;
    let inputs = base_inputs(common, &setup);
    match command {
        Command::Run { schedule, init } => run(schedule, init.as_deref(), common, &setup, inputs),
        Command::PhaseGate { qubits } => {
            let rep = phase_gate(qubits[0], qubits[1], &setup.cfg, &protocol_options(common))?;
            Ok(protocol_report(with(inputs, json!({ "qubits": qubits })), rep))
        }
        Command::Bell { qubits } => {
            let rep = bell_protocol(qubits[0], qubits[1], &setup.cfg, &protocol_options(common))?;
            Ok(protocol_report(with(inputs, json!({ "qubits": qubits })), rep))
        }
        Command::Wstate { qubits } => {
            let rep = w_protocol(qubits[0], qubits[1], qubits[2], &setup.cfg, &protocol_options(common))?;
            Ok(protocol_report(with(inputs, json!({ "qubits": qubits })), rep))
        }
        Command::Spectrum { n } => spectrum(*n, &setup, inputs),
        Command::Dispersive { ratios } => dispersive(ratios, &setup, inputs),
        Command::Device => device(&setup, inputs),
    }
}

fn run(path: &Path, init: Option<&str>, common: &Common, setup: &Setup, inputs: Value) -> Result<Report, CliError> {
    let source = read(path)?;
    let lambda = setup.params.schedule_lambda()?;
    let schedule = parse(&source)
        .and_then(|ast| compile(&ast, lambda, setup.cfg.n_qubits()))
        .map_err(|e| CliError::in_file(path, e))?;
    let space = setup.cfg.space();
    let initial = match init {
        Some(label) => StateVector::from_label(space, label)?,
        None => StateVector::basis(space, 0),
    };
    let opts = ExecOptions::new(common.tier).with_idle_coupling(common.idle_coupling.into());
    let exec = Executor::new(&schedule, &setup.cfg, opts)?.run(&initial)?;

    let mut table = Table::new(vec!["segment", "resonant_qubits", "duration", "time", "norm", "resonator_population"]);
    for tr in &exec.trace {
        let qubits: Vec<String> = tr.resonant_qubits.iter().map(|q| format!("q{q}")).collect();
        table.push(vec![
            tr.index.into(),
            qubits.join(" ").into(),
            tr.duration.into(),
            tr.time.into(),
            tr.norm.into(),
            tr.resonator_population.into(),
        ]);
    }
    let inputs = with(
        inputs,
        json!({
            "schedule_file": path.display().to_string(),
            "schedule_source": source,
            "lambda": lambda,
            "init": space.label(initial.amplitudes().iter().position(|a| a.norm() > 0.0).unwrap_or(0)),
        }),
    );
    let results = json!({
        "schedule": schedule,
        "final_state": exec.final_state,
        "final_resonator_population": exec.final_state.resonator_excited_population(),
        "trace": exec.trace,
    });
    Ok(Report { inputs, results, table })
}

fn protocol_report(inputs: Value, rep: ProtocolReport) -> Report {
    let mut table = Table::new(vec!["quantity", "value"]);
    if let Some(ph) = &rep.phases {
        let mut t = Table::new(vec!["basis", "derived", "formula", "printed_matrix", "formula_match", "printed_match"]);
        for (k, b) in ph.basis.iter().enumerate() {
            let pick = |v: &Option<Vec<f64>>| v.as_ref().map(|v| v[k]);
            let flag = |v: &Option<Vec<bool>>| v.as_ref().map_or(String::new(), |v| v[k].to_string());
            t.push(vec![
                b.clone().into(),
                ph.derived[k].into(),
                pick(&ph.formula).into(),
                pick(&ph.printed_matrix).into(),
                flag(&ph.formula_match).into(),
                flag(&ph.printed_matrix_match).into(),
            ]);
        }
        table = t;
    } else {
        table.push(vec!["fidelity".into(), rep.fidelity.into()]);
        table.push(vec!["leakage".into(), rep.leakage.into()]);
        for c in &rep.checkpoints {
            if let Some(f) = c.fidelity {
                table.push(vec![format!("checkpoint_{}_fidelity", c.segment).into(), f.into()]);
            }
            table.push(vec![
                format!("checkpoint_{}_resonator_population", c.segment).into(),
                c.resonator_population.into(),
            ]);
        }
        for (k, v) in &rep.metrics {
            table.push(vec![k.clone().into(), (*v).into()]);
        }
    }
    Report { inputs, results: to_value(&rep), table }
}

fn spectrum(n: usize, setup: &Setup, inputs: Value) -> Result<Report, CliError> {
    let omega = setup.cfg.omega;
    let lambda = setup.params.schedule_lambda()?;
    let sys = two_qubit_resonant_eigensystem(n as i64, omega, lambda)?;
    // manifold n is complete in any space with at least n photons
    let cutoff = setup.cfg.fock_cutoff.max(n);
    let pair = BusConfig::new(omega, vec![BusQubit::new(omega, lambda); 2], cutoff)?;
    let h = build_multi(&pair)?;
    let space = *h.space();
    let idx = excitation_manifold(&space, n);
    let block = h.block(&idx);
    let (numeric, _) = eig_hermitian_matrix(&block)?;

    let position: Vec<usize> = sys
        .basis
        .iter()
        .map(|k| {
            let label = format!("{},{},{}", k.first.symbol(), k.second.symbol(), k.photons);
            let i = space.parse_label(&label)?;
            Ok(idx.iter().position(|&j| j == i).expect("ket lies in the manifold"))
        })
        .collect::<chargebus::Result<_>>()?;

    let mut sorted: Vec<f64> = sys.levels.iter().map(|l| l.energy).collect();
    sorted.sort_by(f64::total_cmp);
    let mut levels = Vec::new();
    let mut table = Table::new(vec!["level", "analytic", "numeric", "abs_diff", "residual"]);
    for l in &sys.levels {
        let mut v = DVector::<C64>::zeros(idx.len());
        for (c, &p) in l.vector.iter().zip(&position) {
            v[p] = C64::new(*c, 0.0);
        }
        let residual = (&block * &v - &v * C64::new(l.energy, 0.0)).norm();
        let rank = sorted.iter().position(|&e| e == l.energy).expect("energy present");
        let num = numeric[rank];
        table.push(vec![
            (l.label as usize).into(),
            l.energy.into(),
            num.into(),
            (num - l.energy).abs().into(),
            residual.into(),
        ]);
        levels.push(json!({
            "label": l.label,
            "analytic": l.energy,
            "numeric": num,
            "abs_diff": (num - l.energy).abs(),
            "residual": residual,
            "vector": l.vector,
        }));
    }
    let basis: Vec<String> = sys.basis.iter().map(|k| k.label()).collect();
    let results = json!({
        "n": n,
        "omega": omega,
        "lambda": lambda,
        "basis": basis,
        "levels": levels,
        "numeric_eigenvalues": numeric,
    });
    Ok(Report { inputs: with(inputs, json!({ "n": n, "lambda": lambda })), results, table })
}

fn dispersive(ratios: &[f64], setup: &Setup, inputs: Value) -> Result<Report, CliError> {
    let lambda = setup.params.schedule_lambda()?;
    let rows = dispersive_scan(setup.cfg.omega, lambda, ratios)?;
    let mut table = Table::new(vec!["ratio", "delta", "bound", "numeric", "time_of_max", "abs_error"]);
    for r in &rows {
        table.push(vec![
            r.ratio.into(),
            r.delta.into(),
            r.bound.into(),
            r.numeric.into(),
            r.time_of_max.into(),
            r.abs_error.into(),
        ]);
    }
    let inputs = with(inputs, json!({ "ratios": ratios, "lambda": lambda }));
    Ok(Report { inputs, results: json!({ "rows": rows }), table })
}

fn device(setup: &Setup, inputs: Value) -> Result<Report, CliError> {
    let rep = setup.params.device_report()?;
    let mut table = Table::new(vec!["qubit", "n_g", "flux_ratio", "Omega", "eta", "lambda", "outside_charge_regime"]);
    for (k, q) in rep.qubits.iter().enumerate() {
        table.push(vec![
            k.into(),
            q.n_g.into(),
            q.flux_ratio.into(),
            q.omega.into(),
            q.eta.into(),
            q.lambda.into(),
            q.outside_charge_regime.into(),
        ]);
    }
    Ok(Report { inputs, results: to_value(&rep), table })
}
