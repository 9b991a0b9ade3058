use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

use super::parser::{BinOp, Expr, ExprKind, Item, ScheduleAst};
use super::{PulseSchedule, Segment};

struct Env<'a> {
    lambda: f64,
    consts: &'a HashMap<String, f64>,
}

fn compile_err(e: &Expr, message: impl Into<String>) -> Error {
    Error::Compile { pos: e.span.start, message: message.into() }
}

fn eval(e: &Expr, env: &Env<'_>) -> Result<f64> {
    let v = match &e.kind {
        ExprKind::Number(v) => *v,
        ExprKind::Pi => std::f64::consts::PI,
        ExprKind::Lambda => env.lambda,
        ExprKind::Const(name) => {
            *env.consts.get(name).ok_or_else(|| compile_err(e, format!("unresolved constant `{name}`")))?
        }
        ExprKind::Neg(inner) => -eval(inner, env)?,
        ExprKind::Binary(op, l, r) => {
            let a = eval(l, env)?;
            let b = eval(r, env)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(compile_err(r, "division by zero"));
                    }
                    a / b
                }
            }
        }
        ExprKind::Call(func, arg) => {
            let x = eval(arg, env)?;
            let y = func.apply(x);
            if !y.is_finite() {
                return Err(compile_err(e, format!("{}({x}) is outside the function's domain", func.name())));
            }
            y
        }
    };
    if !v.is_finite() {
        return Err(compile_err(e, "expression is not finite"));
    }
    Ok(v)
}

/// Evaluates a standalone expression with `lambda` bound.
pub fn eval_expr(e: &Expr, lambda: f64) -> Result<f64> {
    eval(e, &Env { lambda, consts: &HashMap::new() })
}

/// Resolves every expression with `lambda` bound and checks segment
/// invariants: qubit indices below `n_qubits`, positive finite durations.
pub fn compile(ast: &ScheduleAst, lambda: f64, n_qubits: usize) -> Result<PulseSchedule> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Compile {
            pos: ast.span.start,
            message: format!("lambda binding must be positive, got {lambda}"),
        });
    }
    let mut consts = HashMap::new();
    let mut segments = Vec::new();
    for item in &ast.items {
        match item {
            Item::Const { name, value, .. } => {
                let v = eval(value, &Env { lambda, consts: &consts })?;
                consts.insert(name.clone(), v);
            }
            Item::Resonate { qubits, duration, .. } => {
                let mut seen = Vec::with_capacity(qubits.len());
                for &(q, span) in qubits {
                    if q >= n_qubits {
                        return Err(Error::Compile {
                            pos: span.start,
                            message: format!("qubit q{q} does not exist (bus has {n_qubits} qubits)"),
                        });
                    }
                    if seen.contains(&q) {
                        return Err(Error::Compile { pos: span.start, message: format!("qubit q{q} listed twice") });
                    }
                    seen.push(q);
                }
                let d = duration_value(duration, &Env { lambda, consts: &consts })?;
                seen.sort_unstable();
                segments.push(Segment { resonant_qubits: seen, duration: d, lambda_override: BTreeMap::new() });
            }
            Item::Idle { duration, .. } => {
                let d = duration_value(duration, &Env { lambda, consts: &consts })?;
                segments.push(Segment::idle(d));
            }
        }
    }
    if segments.is_empty() {
        return Err(Error::Compile { pos: ast.span.start, message: "no segments".into() });
    }
    Ok(PulseSchedule { name: ast.name.clone(), segments })
}

fn duration_value(e: &Expr, env: &Env<'_>) -> Result<f64> {
    let d = eval(e, env)?;
    if d <= 0.0 {
        return Err(compile_err(e, format!("segment duration must be positive, got {d}")));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use std::f64::consts::PI;

    fn compile_src(src: &str, lambda: f64, n: usize) -> Result<PulseSchedule> {
        compile(&parse(src)?, lambda, n)
    }

    #[test]
    fn quarter_period_duration() {
        let s = compile_src("schedule \"a\" { resonate q0 for pi/(2*lambda); }", 0.05, 1).unwrap();
        assert_eq!(s.segments[0].duration, PI / (2.0 * 0.05));
        assert!((s.segments[0].duration - 10.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn empty_body() {
        let e = compile_src("schedule \"a\" { const x = 1; }", 0.05, 1).unwrap_err();
        assert!(e.to_string().contains("no segments"));
    }

    #[test]
    fn non_positive_duration() {
        let e = compile_src("schedule \"a\" {\n  resonate q0 for -1;\n}", 0.05, 1).unwrap_err();
        assert!(e.to_string().contains("must be positive"));
        assert_eq!(e.position().unwrap().line, 2);
        assert!(compile_src("schedule \"a\" { idle for 0; }", 0.05, 1).is_err());
    }

    #[test]
    fn qubit_range_and_duplicates() {
        let e = compile_src("schedule \"a\" { resonate q0 q3 for 1; }", 0.05, 3).unwrap_err();
        assert_eq!(e.position().unwrap().column, 28);
        assert!(compile_src("schedule \"a\" { resonate q1 q1 for 1; }", 0.05, 3).is_err());
        let s = compile_src("schedule \"a\" { resonate q2 q0 for 1; }", 0.05, 3).unwrap();
        assert_eq!(s.segments[0].resonant_qubits, vec![0, 2]);
    }

    #[test]
    fn division_by_zero_and_domain() {
        let e = compile_src("schedule \"a\" { idle for 1/(lambda-lambda); }", 0.05, 1).unwrap_err();
        assert!(e.to_string().contains("division by zero"));
        let e = compile_src("schedule \"a\" { idle for acos(2); }", 0.05, 1).unwrap_err();
        assert!(e.to_string().contains("domain"));
        assert!(compile_src("schedule \"a\" { idle for 1; }", 0.0, 1).is_err());
    }

    #[test]
    fn w_state_binding() {
        let s = compile_src(
            "schedule \"w\" { const t1 = acos(1/sqrt(3))/lambda; resonate q2 for t1; resonate q0 q1 for pi/(2*sqrt(2)*lambda); }",
            0.05,
            3,
        )
        .unwrap();
        assert!(((0.05 * s.segments[0].duration).cos() - 3f64.sqrt() / 3.0).abs() < 1e-15);
    }
}
