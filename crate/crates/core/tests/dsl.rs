//! Schedule language: round trips, error positions and expression evaluation.

mod common;

use chargebus::schedule::{compile, emit, eval_expr, parse, parse_expr};
use chargebus::{Error, PulseSchedule, Segment};
use common::rng;
use rand::Rng;

const SHIPPED: [&str; 3] = [
    include_str!("../schedules/bell.sched"),
    include_str!("../schedules/phase_gate.sched"),
    include_str!("../schedules/wstate.sched"),
];

fn build(source: &str, lambda: f64, n_qubits: usize) -> chargebus::Result<PulseSchedule> {
    compile(&parse(source)?, lambda, n_qubits)
}

#[test]
fn shipped_scripts_round_trip() {
    for src in SHIPPED {
        for lambda in [0.05, 1e-3, 0.37] {
            let s = build(src, lambda, 3).unwrap();
            let text = emit(&s);
            assert_eq!(build(&text, 99.0, 3).unwrap(), s, "{text}");
            assert_eq!(emit(&build(&text, 1.0, 3).unwrap()), text);
        }
    }
}

#[test]
fn shipped_durations() {
    let l = 0.05;
    let bell = build(SHIPPED[0], l, 3).unwrap();
    assert_eq!(bell.segments[0], Segment::resonate(&[0], std::f64::consts::PI / (2.0 * l)));
    assert_eq!(bell.segments[1].resonant_qubits, vec![0, 1]);
    let w = build(SHIPPED[2], l, 3).unwrap();
    assert!(((l * w.segments[0].duration).cos() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!((2f64.sqrt() * l * w.segments[1].duration - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
}

#[test]
fn random_schedules_round_trip() {
    let mut r = rng(7);
    for case in 0..200 {
        let segments: Vec<Segment> = (0..r.random_range(1..6))
            .map(|_| {
                let mut q: Vec<usize> = (0..4).filter(|_| r.random_bool(0.4)).collect();
                if r.random_bool(0.1) {
                    q.clear();
                }
                let exp = r.random_range(-12..12);
                let d = r.random_range(1.0..10.0) * 10f64.powi(exp);
                Segment::resonate(&q, d)
            })
            .collect();
        let name = match case % 3 {
            0 => "plain".to_string(),
            1 => "with \"quotes\" and \\ slash".to_string(),
            _ => "tab\there\nnewline".to_string(),
        };
        let s = PulseSchedule::new(name, segments).unwrap();
        let text = emit(&s);
        assert!(!text.contains('\r'));
        let back = build(&text, 0.05, 4).unwrap();
        assert_eq!(back, s, "{text}");
        for (a, b) in back.segments.iter().zip(&s.segments) {
            assert_eq!(a.duration.to_bits(), b.duration.to_bits());
        }
    }
}

#[test]
fn overrides_survive_only_as_comments() {
    let s = PulseSchedule::new("o", vec![Segment::resonate(&[0, 1], 2.0).with_lambda(1, 0.02)]).unwrap();
    let back = build(&emit(&s), 0.05, 2).unwrap();
    assert!(back.segments[0].lambda_override.is_empty());
    assert_eq!(back.segments[0].duration, 2.0);
}

/// Each case marks the offending token with `[[` and `]]`.
const MALFORMED: &[&str] = &[
    "schedule \"x\" { resonate q0 for [[t1]]; }",
    "schedule \"x\" { resonate [[q9]] for 1; }",
    "schedule \"x\" { resonate q0 for 1 [[}]]",
    "[[schedul]] \"x\" { idle for 1; }",
    "schedule [[x]] { idle for 1; }",
    "schedule \"x\" { idle for [[-1]]; }",
    "schedule \"x\" { idle for 1/[[0]]; }",
    "schedule \"x\" { idle for [[acos(2)]]; }",
    "schedule \"x\" { resonate q0 for 1 [[$]]; }",
    "schedule \"x\" { resonate [[for]] 1; }",
    "schedule \"x\" { const [[pi]] = 3; idle for 1; }",
    "schedule \"x\" { const a = 1; const [[a]] = 2; idle for a; }",
    "schedule \"x\" { idle for [[foo]](1); }",
    "schedule \"x\" { idle for (1 + 2[[;]] }",
    "schedule \"x\" { idle for 1; } [[extra]]",
    "schedule \"x\" { [[wait]] for 1; }",
    "schedule [[\"x { idle for 1; }]]",
    "schedule \"x\" { idle for 1 * [[;]] }",
    "schedule \"x\" { idle [[1]]; }",
    "schedule \"x\" { resonate q0 for [[lambda - lambda]]; }",
    "schedule \"x\" { resonate [[q]] for 1; }",
    "schedule \"x\" {\n  resonate q0 for 1;\n  resonate q1 for [[sqrt(-4)]];\n}",
    "schedule \"x\" {\n  const t = 2;\n\n  idle for t [[t]];\n}",
    "schedule \"x\" { resonate q0 for 1; idle for [[cos(0) - 1]]; }",
    "schedule \"x\" { resonate q0 q1 [[q0]] for 1; }",
];

fn locate(marked: &str) -> (String, (u32, u32), usize) {
    let start = marked.find("[[").unwrap();
    let end = marked.find("]]").unwrap();
    let source = marked.replace("[[", "").replace("]]", "");
    let before = &marked[..start];
    let line = before.matches('\n').count() as u32 + 1;
    let col = before.rsplit('\n').next().unwrap().chars().count() as u32 + 1;
    (source, (line, col), marked[start + 2..end].chars().count())
}

#[test]
fn malformed_inputs_report_positions() {
    assert!(MALFORMED.len() >= 20);
    for marked in MALFORMED {
        let (source, (line, col), width) = locate(marked);
        let e = build(&source, 0.05, 3).expect_err(marked);
        assert!(matches!(e, Error::Parse { .. } | Error::Compile { .. }), "{marked}: {e}");
        assert!(!e.is_physics());
        let pos = e.position().unwrap();
        assert_eq!(pos.line, line, "{marked}: {e}");
        assert!(pos.column >= col && pos.column < col + width.max(1) as u32, "{marked}: {e} expected {line}:{col}");
    }
}

#[derive(Debug)]
enum Tree {
    Num(f64),
    Pi,
    Lambda,
    Neg(Box<Tree>),
    Bin(char, Box<Tree>, Box<Tree>),
    Call(&'static str, Box<Tree>),
}

fn tree(r: &mut rand_chacha::ChaCha8Rng, depth: u32) -> Tree {
    if depth == 0 || r.random_bool(0.25) {
        return match r.random_range(0..4) {
            0 => Tree::Pi,
            1 => Tree::Lambda,
            _ => Tree::Num((r.random_range(0.1..10.0f64) * 1e4).round() / 1e4),
        };
    }
    let sub = |r: &mut _| Box::new(tree(r, depth - 1));
    match r.random_range(0..8) {
        0 => Tree::Neg(sub(r)),
        1 => Tree::Call(["sqrt", "cos", "sin", "acos", "asin"][r.random_range(0..5)], sub(r)),
        _ => Tree::Bin(['+', '-', '*', '/'][r.random_range(0..4)], sub(r), sub(r)),
    }
}

fn render(t: &Tree) -> String {
    match t {
        Tree::Num(v) => format!("{v}"),
        Tree::Pi => "pi".into(),
        Tree::Lambda => "lambda".into(),
        Tree::Neg(a) => format!("-{}", render(a)),
        Tree::Bin(op, a, b) => format!("({} {op} {})", render(a), render(b)),
        Tree::Call(f, a) => format!("{f}({})", render(a)),
    }
}

fn reference(t: &Tree, lambda: f64) -> f64 {
    match t {
        Tree::Num(v) => *v,
        Tree::Pi => std::f64::consts::PI,
        Tree::Lambda => lambda,
        Tree::Neg(a) => -reference(a, lambda),
        Tree::Bin(op, a, b) => {
            let (x, y) = (reference(a, lambda), reference(b, lambda));
            match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                _ => x / y,
            }
        }
        Tree::Call(f, a) => {
            let x = reference(a, lambda);
            match *f {
                "sqrt" => x.sqrt(),
                "cos" => x.cos(),
                "sin" => x.sin(),
                "acos" => x.acos(),
                _ => x.asin(),
            }
        }
    }
}

#[test]
fn random_expressions_match_reference() {
    let mut r = rng(11);
    let mut checked = 0;
    while checked < 100 {
        let t = tree(&mut r, 5);
        let lambda = r.random_range(0.01..1.0);
        let want = reference(&t, lambda);
        let text = render(&t);
        let parsed = parse_expr(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        if !want.is_finite() {
            assert!(eval_expr(&parsed, lambda).is_err(), "{text}");
            continue;
        }
        let got = eval_expr(&parsed, lambda).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!((got - want).abs() <= 1e-15 * want.abs().max(f64::MIN_POSITIVE), "{text}: {got} vs {want}");
        checked += 1;
    }
}

#[test]
fn precedence_and_associativity() {
    let cases = [
        ("1 - 2 - 3", -4.0),
        ("8 / 4 / 2", 1.0),
        ("1 + 2 * 3", 7.0),
        ("-2 * 3", -6.0),
        ("--2", 2.0),
        ("(1 + 2) * 3", 9.0),
        ("2 * lambda", 0.5),
        ("sqrt(16) / 2", 2.0),
    ];
    for (text, want) in cases {
        assert_eq!(eval_expr(&parse_expr(text).unwrap(), 0.25).unwrap(), want, "{text}");
    }
}
