//! Pulse schedules: a small text language, its compiler to piecewise-constant
//! segments, a canonical emitter, and an executor that drives the segments
//! through one of the simulation tiers.
//!
//! ```text
//! # Bell pair between q0 and q1
//! schedule "bell" {
//!   resonate q0 for pi/(2*lambda);
//!   resonate q0 q1 for pi/(2*sqrt(2)*lambda);
//! }
//! ```

mod compile;
mod emit;
mod execute;
mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use compile::{compile, eval_expr};
pub use emit::emit;
pub use execute::{execute, segment_config, ExecOptions, Execution, Executor, IdleCoupling, SegmentTrace, Tier};
pub use parser::{parse, parse_expr, BinOp, Expr, ExprKind, Func, Item, ScheduleAst};

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourcePos {
    pub line: u32,
    pub column: u32,
}

impl SourcePos {
    pub const START: SourcePos = SourcePos { line: 1, column: 1 };
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Half-open source range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: SourcePos,
    pub end: SourcePos,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Qubits tuned into resonance, ascending; empty means everything idles.
    pub resonant_qubits: Vec<usize>,
    pub duration: f64,
    /// Per-qubit coupling replacing the bus configuration's value for this
    /// segment.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lambda_override: BTreeMap<usize, f64>,
}

impl Segment {
    pub fn resonate(qubits: &[usize], duration: f64) -> Self {
        let mut q = qubits.to_vec();
        q.sort_unstable();
        q.dedup();
        Self { resonant_qubits: q, duration, lambda_override: BTreeMap::new() }
    }

    pub fn idle(duration: f64) -> Self {
        Self::resonate(&[], duration)
    }

    pub fn with_lambda(mut self, qubit: usize, lambda: f64) -> Self {
        self.lambda_override.insert(qubit, lambda);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub name: String,
    pub segments: Vec<Segment>,
}

impl PulseSchedule {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        let s = Self { name: name.into(), segments };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidParameter("schedule has no segments".into()));
        }
        for (k, seg) in self.segments.iter().enumerate() {
            if !(seg.duration > 0.0 && seg.duration.is_finite()) {
                return Err(Error::InvalidParameter(format!("segment {k} has non-positive duration {}", seg.duration)));
            }
            if seg.resonant_qubits.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!("segment {k} qubits must be ascending and distinct")));
            }
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.segments.iter().flat_map(|s| s.resonant_qubits.iter().copied()).max()
    }
}
