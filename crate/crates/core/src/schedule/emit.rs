//! Canonical text form of a compiled schedule.
//!
//! Byte layout: LF newlines, two-space indent, one segment per line, every
//! duration as a literal with 17 significant digits (`{:.16e}`), so parsing
//! and compiling the output reproduces each `f64` bit for bit. Per-qubit
//! coupling overrides have no syntax; they are written as a comment line
//! above their segment and are lost on re-parse.

use std::fmt::Write;

use super::PulseSchedule;

fn escape(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

pub fn emit(schedule: &PulseSchedule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schedule \"{}\" {{", escape(&schedule.name));
    for seg in &schedule.segments {
        if !seg.lambda_override.is_empty() {
            let list: Vec<String> = seg.lambda_override.iter().map(|(q, l)| format!("q{q}={l:.16e}")).collect();
            let _ = writeln!(out, "  # lambda override: {}", list.join(" "));
        }
        if seg.resonant_qubits.is_empty() {
            let _ = writeln!(out, "  idle for {:.16e};", seg.duration);
        } else {
            let qs: Vec<String> = seg.resonant_qubits.iter().map(|q| format!("q{q}")).collect();
            let _ = writeln!(out, "  resonate {} for {:.16e};", qs.join(" "), seg.duration);
        }
    }
    out.push_str("}\n");
    out
}
