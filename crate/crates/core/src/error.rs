use std::fmt;

use thiserror::Error;

/// Weight axiom identifiers used in [`Error::AxiomViolation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    BoundedBelow,
    Symmetric,
    Submultiplicative,
    /// `m(x + y) <= w(x) m(y)`
    Ctrl1,
    /// `m(x + y) <= m(x) w(y)`
    Ctrl2,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::BoundedBelow => "bounded-below",
            Axiom::Symmetric => "symmetric",
            Axiom::Submultiplicative => "submultiplicative",
            Axiom::Ctrl1 => "ctrl1",
            Axiom::Ctrl2 => "ctrl2",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite L_{p} norm (overflow)")]
    Overflow { p: f64 },
    #[error("shift {shift} is not a multiple of the grid spacing {spacing}")]
    Alignment { shift: f64, spacing: f64 },
    #[error("weight axiom {axiom} violated at x = {x:?}, y = {y:?}: {lhs} > {rhs}")]
    AxiomViolation {
        axiom: Axiom,
        x: Vec<f64>,
        y: Vec<f64>,
        lhs: f64,
        rhs: f64,
    },
    #[error("weight must be positive and finite, got {value} at {point:?}")]
    InvalidWeight { value: f64, point: Vec<f64> },
    #[error("exponents violate 1 + 1/r = 1/p + 1/q: p = {p}, q = {q}, r = {r}")]
    ExponentRelation { p: f64, q: f64, r: f64 },
    #[error("zero denominator in ratio")]
    ZeroDenominator,
    #[error("scale tau = {tau} is below twice the grid spacing {spacing}")]
    ScaleTooSmall { tau: f64, spacing: f64 },
    #[error("out-of-band energy fraction {fraction:e} exceeds {threshold:e}")]
    OutOfBand { fraction: f64, threshold: f64 },
    #[error("not in the reproducing subspace: residual {residual:e} exceeds {threshold:e}")]
    NotMember { residual: f64, threshold: f64 },
    #[error("frequency {frequency} exceeds the Nyquist limit {nyquist}")]
    Nyquist { frequency: f64, nyquist: f64 },
    #[error("rank-deficient basis: condition number {condition:e} exceeds {threshold:e}")]
    RankDeficient { condition: f64, threshold: f64 },
    #[error("function is not smooth enough for spectral differentiation (tail fraction {tail:e})")]
    NotSmooth { tail: f64 },
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
