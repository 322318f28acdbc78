//! Control weights `w` and `w`-moderate weights `m`.
//!
//! Weights are radial profiles: a [`Weight`] is evaluated on `|x|` in one
//! dimension and on the Euclidean norm in two. Validation is a falsifier on
//! a finite point set, not a proof.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Axiom, Error, Result};

const AXIOM_TOL: f64 = 1e-12;

/// Built-in radial weight profiles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Weight {
    /// `1`
    #[default]
    Const,
    /// `(1 + r)^a`
    Poly(f64),
    /// `1 + log(1 + r)`
    Log,
    /// `e^{rate·r}`
    Exp(f64),
}

impl Weight {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Weight::Const => 1.0,
            Weight::Poly(a) => (1.0 + r).powf(a),
            Weight::Log => 1.0 + r.ln_1p(),
            Weight::Exp(rate) => (rate * r).exp(),
        }
    }

    pub fn at<P: Carrier>(&self, x: P) -> f64 {
        self.eval(x.norm())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Const => write!(f, "const"),
            Weight::Poly(a) => write!(f, "poly:{a}"),
            Weight::Log => write!(f, "log"),
            Weight::Exp(rate) => write!(f, "exp:{rate}"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_arg = |arg: &str| {
            arg.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidParameter(format!("bad weight parameter in {s:?}")))
        };
        match s.trim() {
            "const" => Ok(Weight::Const),
            "log" => Ok(Weight::Log),
            other => match other.split_once(':') {
                Some(("poly", a)) => Ok(Weight::Poly(parse_arg(a)?)),
                Some(("exp", r)) => Ok(Weight::Exp(parse_arg(r)?)),
                _ => Err(Error::InvalidParameter(format!("unknown weight preset {s:?}"))),
            },
        }
    }
}

impl From<Weight> for String {
    fn from(w: Weight) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Weight {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Points of an additive carrier group: `ℝ` or `ℝ²`.
pub trait Carrier: Copy {
    fn add(self, other: Self) -> Self;
    fn neg(self) -> Self;
    fn norm(self) -> f64;
    fn coords(self) -> Vec<f64>;
}

impl Carrier for f64 {
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn neg(self) -> Self {
        -self
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn coords(self) -> Vec<f64> {
        vec![self]
    }
}

impl Carrier for [f64; 2] {
    fn add(self, other: Self) -> Self {
        [self[0] + other[0], self[1] + other[1]]
    }
    fn neg(self) -> Self {
        [-self[0], -self[1]]
    }
    fn norm(self) -> f64 {
        self[0].hypot(self[1])
    }
    fn coords(self) -> Vec<f64> {
        self.to_vec()
    }
}

/// A validated control weight `w` and `w`-moderate weight `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub w: Weight,
    pub m: Weight,
    /// Empirical maximum of `m(x+y)/(w(x)m(y))` and `m(x+y)/(m(x)w(y))`.
    pub moderateness_constant: f64,
}

impl Default for WeightPair {
    fn default() -> Self {
        Self { w: Weight::Const, m: Weight::Const, moderateness_constant: 1.0 }
    }
}

/// Checks all weight axioms for the presets `w`, `m` on the square of `points`.
pub fn validate_weight_pair<P: Carrier>(w: Weight, m: Weight, points: &[P]) -> Result<WeightPair> {
    let c = check_weight_axioms(|x| w.at(x), |x| m.at(x), points)?;
    Ok(WeightPair { w, m, moderateness_constant: c })
}

/// Checks the weight axioms for arbitrary functions and returns the empirical moderateness constant.
///
/// The first violation in iteration order (points, then pairs in row-major order) is reported.
pub fn check_weight_axioms<P, W, M>(w: W, m: M, points: &[P]) -> Result<f64>
where
    P: Carrier,
    W: Fn(P) -> f64,
    M: Fn(P) -> f64,
{
    let positive = |value: f64, x: P| {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(Error::InvalidWeight { value, point: x.coords() })
        }
    };
    let violation = |axiom, x: P, y: P, lhs, rhs| Error::AxiomViolation {
        axiom,
        x: x.coords(),
        y: y.coords(),
        lhs,
        rhs,
    };
    let mut constant: f64 = 0.0;
    for &x in points {
        let wx = positive(w(x), x)?;
        positive(m(x), x)?;
        if wx < 1.0 - AXIOM_TOL {
            return Err(violation(Axiom::BoundedBelow, x, x, 1.0, wx));
        }
        let wnx = positive(w(x.neg()), x.neg())?;
        if (wnx - wx).abs() > AXIOM_TOL * wx {
            return Err(violation(Axiom::Symmetric, x, x.neg(), wx, wnx));
        }
    }
    for &x in points {
        let (wx, mx) = (w(x), m(x));
        for &y in points {
            let (wy, my) = (w(y), m(y));
            let s = x.add(y);
            let ws = positive(w(s), s)?;
            let ms = positive(m(s), s)?;
            if ws > wx * wy * (1.0 + AXIOM_TOL) {
                return Err(violation(Axiom::Submultiplicative, x, y, ws, wx * wy));
            }
            let r1 = ms / (wx * my);
            let r2 = ms / (mx * wy);
            if r1 > 1.0 + AXIOM_TOL {
                return Err(violation(Axiom::Ctrl1, x, y, ms, wx * my));
            }
            if r2 > 1.0 + AXIOM_TOL {
                return Err(violation(Axiom::Ctrl2, x, y, ms, mx * wy));
            }
            constant = constant.max(r1).max(r2);
        }
    }
    Ok(constant)
}

fn lattice_points(half_width: f64) -> impl Iterator<Item = f64> {
    let n = half_width.floor() as i64;
    (-n..=n).map(|k| k as f64)
}

/// 256 golden-ratio quasi-random points in `[-half_width, half_width]` followed by the integers in range.
pub fn default_sample_points_1d(half_width: f64) -> Vec<f64> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let mut pts: Vec<f64> = (1..=256)
        .map(|i| {
            let u = (i as f64 / phi).fract();
            (2.0 * u - 1.0) * half_width
        })
        .collect();
    pts.extend(lattice_points(half_width));
    pts
}

/// 256 plastic-ratio quasi-random points in the square of side `2·half_width`, then the integer lattice.
pub fn default_sample_points_2d(half_width: f64) -> Vec<[f64; 2]> {
    // The plastic number gives the R2 low-discrepancy sequence.
    let g = 1.324_717_957_244_746_f64;
    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
    let mut pts: Vec<[f64; 2]> = (1..=256)
        .map(|i| {
            let u = (0.5 + a1 * i as f64).fract();
            let v = (0.5 + a2 * i as f64).fract();
            [(2.0 * u - 1.0) * half_width, (2.0 * v - 1.0) * half_width]
        })
        .collect();
    for a in lattice_points(half_width) {
        for b in lattice_points(half_width) {
            pts.push([a, b]);
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_weights_have_unit_constant() {
        let pair = validate_weight_pair(Weight::Const, Weight::Const, &default_sample_points_1d(8.0))
            .unwrap();
        assert_eq!(pair.moderateness_constant, 1.0);
    }

    #[test]
    fn polynomial_weight_is_its_own_moderate_weight() {
        let pts = default_sample_points_1d(10.0);
        let pair = validate_weight_pair(Weight::Poly(1.0), Weight::Poly(1.0), &pts).unwrap();
        assert!((pair.moderateness_constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_moderate_weight_fails_ctrl1_at_one_one() {
        let err = check_weight_axioms(|_: f64| 1.0, |x: f64| x.abs().exp(), &[1.0]).unwrap_err();
        match err {
            Error::AxiomViolation { axiom, x, y, lhs, rhs } => {
                assert_eq!(axiom, Axiom::Ctrl1);
                assert_eq!((x, y), (vec![1.0], vec![1.0]));
                assert!((lhs - 2f64.exp()).abs() < 1e-12 && (rhs - 1f64.exp()).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(validate_weight_pair(Weight::Const, Weight::Exp(1.0), &default_sample_points_1d(4.0))
            .is_err());
    }

    #[test]
    fn each_axiom_has_a_witness() {
        let axiom_of = |r: Result<f64>| match r {
            Err(Error::AxiomViolation { axiom, .. }) => axiom,
            other => panic!("expected violation, got {other:?}"),
        };
        assert_eq!(axiom_of(check_weight_axioms(|_: f64| 0.5, |_| 1.0, &[0.0])), Axiom::BoundedBelow);
        assert_eq!(
            axiom_of(check_weight_axioms(|x: f64| if x > 0.0 { 2.0 } else { 1.0 }, |_| 1.0, &[1.0])),
            Axiom::Symmetric
        );
        assert_eq!(
            axiom_of(check_weight_axioms(|x: f64| 1.0 + x * x, |_| 1.0, &[1.0])),
            Axiom::Submultiplicative
        );
        assert_eq!(
            axiom_of(check_weight_axioms(|_: f64| 1.0, |x: f64| x.abs().exp(), &[0.0, 1.0])),
            Axiom::Ctrl2
        );
        assert!(matches!(
            check_weight_axioms(|_: f64| 1.0, |_| f64::NAN, &[0.0]),
            Err(Error::InvalidWeight { .. })
        ));
    }

    #[test]
    fn presets_parse_and_print() {
        for s in ["const", "log", "poly:0.5", "exp:2"] {
            let w: Weight = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("poly:x".parse::<Weight>().is_err());
        assert!("gauss".parse::<Weight>().is_err());
        assert_eq!(serde_json::to_string(&Weight::Poly(0.5)).unwrap(), "\"poly:0.5\"");
    }

    #[test]
    fn log_weight_validates_in_two_dimensions() {
        let pts = default_sample_points_2d(6.0);
        let pair = validate_weight_pair(Weight::Log, Weight::Log, &pts).unwrap();
        assert!((pair.moderateness_constant - 1.0).abs() < 1e-12);
        let mixed = validate_weight_pair(Weight::Poly(1.0), Weight::Poly(0.5), &pts).unwrap();
        assert!(mixed.moderateness_constant <= 1.0 + 1e-12);
    }
}
