//! Reproducing kernels of the Shannon and modulation settings.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{Grid1D, Grid2D, SampledFunction1D, SampledFunction2D};
use crate::spectral;

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Derivative of the normalized sinc.
pub fn sinc_derivative(x: f64) -> f64 {
    PI * shannon_kernel_derivative(1, PI * x)
}

/// Band-limited setting with half bandwidth `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShannonSetting {
    omega: f64,
}

impl ShannonSetting {
    pub fn new(omega: f64) -> Result<Self> {
        if omega > 0.0 && omega.is_finite() {
            Ok(Self { omega })
        } else {
            Err(Error::InvalidParameter(format!("half bandwidth must be positive, got {omega}")))
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Default lattice step `1/(2ω)`.
    pub fn tau(&self) -> f64 {
        0.5 / self.omega
    }
}

/// `K(b) = 2ω sinc(2ωb)`.
pub fn shannon_kernel_value(setting: &ShannonSetting, b: f64) -> f64 {
    let w = setting.omega;
    2.0 * w * sinc(2.0 * w * b)
}

pub fn shannon_kernel(setting: &ShannonSetting, grid: &Grid1D) -> SampledFunction1D {
    SampledFunction1D::from_real_fn(*grid, |b| shannon_kernel_value(setting, b))
}

/// Periodization of `K` over the grid period: inverse DFT of the band indicator,
/// with half weight on bins lying exactly on `|ξ| = ω`.
pub fn shannon_kernel_periodic(setting: &ShannonSetting, grid: &Grid1D) -> SampledFunction1D {
    let spectrum: Vec<Complex64> =
        grid.frequencies().into_iter().map(|xi| Complex64::new(band_weight(setting, xi), 0.0)).collect();
    let k = spectral::inverse_fourier_transform(grid, &spectrum);
    k.map(|_, v| Complex64::new(v.re, 0.0))
}

/// Closed form `sin(2πωx) cot(πx/P) / P` of the periodized kernel; requires `ωP` to be an integer.
pub fn shannon_kernel_periodic_value(setting: &ShannonSetting, period: f64, x: f64) -> f64 {
    let w = setting.omega;
    let t = (x / period).rem_euclid(1.0);
    if t.min(1.0 - t) < 1e-12 {
        return 2.0 * w;
    }
    (2.0 * PI * w * x).sin() / (PI * x / period).tan() / period
}

/// Indicator of the closed band `[-ω, ω]` with value 1/2 on its edge.
pub(crate) fn band_weight(setting: &ShannonSetting, xi: f64) -> f64 {
    let w = setting.omega;
    let tol = 1e-9 * w.max(1.0);
    let d = xi.abs() - w;
    if d < -tol {
        1.0
    } else if d <= tol {
        0.5
    } else {
        0.0
    }
}

const TAYLOR_RADIUS: f64 = 2.0;

/// `dⁿ/dxⁿ (sin x / x)` in the unnormalized convention.
///
/// Uses the product-rule closed form
/// `x^{-n} Σ_{k=0}^{n} (n!/k!) (−1)^{n−k} sin^{(k)}(x) x^{k−1}` away from the origin
/// and the Taylor series, summed to machine precision, for `|x| < 2`, where the closed form
/// loses `n!/|x|^{n+1}` ulps to cancellation.
/// For the dilated kernel use [`shannon_kernel_nth_derivative`].
pub fn shannon_kernel_derivative(n: u32, x: f64) -> f64 {
    if x.abs() < TAYLOR_RADIUS {
        let mut sum = 0.0;
        let mut j = n.div_ceil(2);
        loop {
            let p = 2 * j - n;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * x.powi(p as i32) / ((2 * j + 1) as f64 * factorial(p));
            sum += term;
            if p > 4 && term.abs() <= 1e-17 * sum.abs() || p > 80 {
                return sum;
            }
            j += 1;
        }
    }
    let mut sum = 0.0;
    let mut ratio = 1.0; // n!/k!, built from k = n downwards
    for k in (0..=n).rev() {
        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
        let sin_k = (x + k as f64 * PI / 2.0).sin();
        sum += ratio * sign * sin_k * x.powi(k as i32 - 1);
        ratio *= k as f64;
    }
    sum / x.powi(n as i32)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `K^{(n)}(x) = 2ω (2πω)^n S^{(n)}(2πωx)` with `S(u) = sin u / u`.
pub fn shannon_kernel_nth_derivative(setting: &ShannonSetting, n: u32, x: f64) -> f64 {
    let w = setting.omega;
    2.0 * w * (2.0 * PI * w).powi(n as i32) * shannon_kernel_derivative(n, 2.0 * PI * w * x)
}

/// Box window `χ_{[-1/2,1/2]}` and the truncated unit lattice `|k|, |l| <= R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationSetting {
    radius: u32,
}

impl ModulationSetting {
    pub fn new(radius: u32) -> Result<Self> {
        if radius >= 1 {
            Ok(Self { radius })
        } else {
            Err(Error::InvalidParameter("lattice radius must be at least 1".into()))
        }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }
}

/// `K(x, ω) = U_g g(x, ω) = (1 − |x|) e^{−πixω} sinc((1 − |x|)ω)` on `|x| <= 1`, zero elsewhere.
pub fn modulation_kernel_value(x: f64, omega: f64) -> Complex64 {
    let s = 1.0 - x.abs();
    if s < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(s * sinc(s * omega), -PI * x * omega)
}

pub fn modulation_kernel(grid: &Grid2D) -> SampledFunction2D {
    SampledFunction2D::from_fn(*grid, modulation_kernel_value)
}

/// `K̂(ξ, η) = χ_{[-1/2,1/2]}(η) sinc(ξ) e^{2πiηξ}`.
pub fn modulation_kernel_fourier(xi: f64, eta: f64) -> Complex64 {
    if eta.abs() > 0.5 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(sinc(xi), 2.0 * PI * eta * xi)
}

const KINK_TOL: f64 = 1e-12;

/// Weak derivative `∂K/∂x`; one-sided averages on the kink lines `x ∈ {−1, 0, 1}`.
pub fn modulation_kernel_x_derivative_value(x: f64, omega: f64) -> Complex64 {
    let inner = |x: f64| -> Complex64 {
        if x > 0.0 && x < 1.0 {
            -Complex64::from_polar(1.0, PI * omega * (1.0 - 2.0 * x))
        } else if x < 0.0 && x > -1.0 {
            Complex64::from_polar(1.0, -PI * omega * (1.0 + 2.0 * x))
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    if x.abs() < KINK_TOL {
        Complex64::new(0.0, -(PI * omega).sin())
    } else if (x - 1.0).abs() < KINK_TOL {
        -0.5 * Complex64::from_polar(1.0, -PI * omega)
    } else if (x + 1.0).abs() < KINK_TOL {
        0.5 * Complex64::from_polar(1.0, PI * omega)
    } else {
        inner(x)
    }
}

pub fn modulation_kernel_x_derivative(grid: &Grid2D) -> SampledFunction2D {
    SampledFunction2D::from_fn(*grid, modulation_kernel_x_derivative_value)
}

/// `∂K/∂ω`, used as an analytic reference for spectral differentiation.
pub fn modulation_kernel_omega_derivative_value(x: f64, omega: f64) -> Complex64 {
    let s = 1.0 - x.abs();
    if s < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = Complex64::from_polar(1.0, -PI * x * omega);
    phase * (s * s * sinc_derivative(s * omega) - Complex64::new(0.0, PI * x) * s * sinc(s * omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> ShannonSetting {
        ShannonSetting::new(1.0).unwrap()
    }

    #[test]
    fn shannon_kernel_values() {
        let s = ShannonSetting::new(1.5).unwrap();
        assert_eq!(shannon_kernel_value(&s, 0.0), 3.0);
        for k in 1..20 {
            let b = k as f64 * s.tau();
            assert!(shannon_kernel_value(&s, b).abs() < 1e-14);
            assert!(shannon_kernel_value(&s, -b).abs() < 1e-14);
        }
        assert_eq!(s.tau() * 2.0 * s.omega(), 1.0);
    }

    #[test]
    fn shannon_kernel_spectrum_is_band_indicator() {
        let grid = Grid1D::symmetric(64.0, 1.0 / 64.0).unwrap();
        let spec = spectral::fourier_transform(&shannon_kernel(&unit(), &grid));
        let mut worst: f64 = 0.0;
        let mut worst_all: f64 = 0.0;
        for (v, xi) in spec.iter().zip(grid.frequencies()) {
            let target = if xi.abs() < 1.0 { 1.0 } else { 0.0 };
            let d = (v - target).norm();
            if (xi.abs() - 1.0).abs() >= 0.05 {
                worst = worst.max(d);
            }
            worst_all = worst_all.max(d);
        }
        assert!(worst < 0.02, "deviation {worst}, including band edge {worst_all}");
    }

    #[test]
    fn periodic_kernel_matches_closed_form() {
        let grid = Grid1D::symmetric(16.0, 1.0 / 16.0).unwrap();
        let k = shannon_kernel_periodic(&unit(), &grid);
        for (x, v) in grid.points().zip(k.values()) {
            assert!((v.re - shannon_kernel_periodic_value(&unit(), 32.0, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_closed_forms() {
        assert_eq!(shannon_kernel_derivative(0, 0.0), 1.0);
        assert_relative_eq!(shannon_kernel_derivative(1, PI), -1.0 / PI, epsilon = 1e-15);
        let x: f64 = 1.0;
        assert_relative_eq!(
            shannon_kernel_derivative(1, x),
            (x * x.cos() - x.sin()) / (x * x),
            epsilon = 1e-15
        );
        let e = 1e-4;
        let fd = (shannon_kernel_derivative(1, x + e) - shannon_kernel_derivative(1, x - e)) / (2.0 * e);
        let exact = shannon_kernel_derivative(2, x);
        assert!(((fd - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn taylor_branch_is_continuous() {
        let (a, b) = (2.0 - 1e-7, 2.0 + 1e-7);
        for n in 0..6 {
            let jump = shannon_kernel_derivative(n, b) - shannon_kernel_derivative(n, a);
            let slope = shannon_kernel_derivative(n + 1, 2.0) * (b - a);
            assert!((jump - slope).abs() < 1e-12, "n = {n}: {jump} vs {slope}");
        }
        assert_relative_eq!(shannon_kernel_derivative(2, 0.0), -1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(shannon_kernel_derivative(1, 0.0), 0.0);
        let x: f64 = 0.5;
        assert_relative_eq!(shannon_kernel_derivative(0, x), x.sin() / x, epsilon = 1e-15);
        let first = (x * x.cos() - x.sin()) / (x * x);
        assert_relative_eq!(shannon_kernel_derivative(1, x), first, epsilon = 1e-14);
    }

    #[test]
    fn dilated_derivative_matches_kernel_difference() {
        let s = ShannonSetting::new(1.25).unwrap();
        let e = 1e-5;
        for x in [0.3, 1.1, 4.0] {
            let fd = (shannon_kernel_value(&s, x + e) - shannon_kernel_value(&s, x - e)) / (2.0 * e);
            assert_relative_eq!(shannon_kernel_nth_derivative(&s, 1, x), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn modulation_kernel_values() {
        assert_eq!(modulation_kernel_value(0.0, 0.0), Complex64::new(1.0, 0.0));
        for w in [-3.0, 0.0, 0.7, 12.0] {
            assert_eq!(modulation_kernel_value(1.2, w), Complex64::new(0.0, 0.0));
            assert_eq!(modulation_kernel_value(-1.01, w), Complex64::new(0.0, 0.0));
            assert!((modulation_kernel_value(0.0, w) - sinc(w)).norm() < 1e-15);
        }
        assert_eq!(modulation_kernel_fourier(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(modulation_kernel_fourier(0.3, 0.51), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn modulation_kernel_twisted_symmetry() {
        for &(x, w) in &[(0.3, 1.7), (-0.8, 0.2), (0.5, -4.1)] {
            let lhs = modulation_kernel_value(-x, -w);
            let rhs = Complex64::from_polar(1.0, -2.0 * PI * x * w) * modulation_kernel_value(x, w).conj();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn x_derivative_matches_finite_differences() {
        let (x, w) = (0.5, 1.3);
        let e = 1e-6;
        let fd = (modulation_kernel_value(x + e, w) - modulation_kernel_value(x - e, w)) / (2.0 * e);
        let exact = modulation_kernel_x_derivative_value(x, w);
        assert!((fd - exact).norm() / exact.norm() < 1e-6);
        for x in [-0.7, -0.2, 0.4, 0.9] {
            assert!((modulation_kernel_x_derivative_value(x, 0.0).re + f64::signum(x)).abs() < 1e-15);
        }
        assert_eq!(modulation_kernel_x_derivative_value(1.5, 2.0), Complex64::new(0.0, 0.0));
        let avg = 0.5 * (modulation_kernel_x_derivative_value(1e-9, 0.7)
            + modulation_kernel_x_derivative_value(-1e-9, 0.7));
        assert!((avg - modulation_kernel_x_derivative_value(0.0, 0.7)).norm() < 1e-8);
    }

    #[test]
    fn omega_derivative_matches_finite_differences() {
        let e = 1e-6;
        for &(x, w) in &[(0.0, 0.4), (0.35, 2.2), (-0.6, -1.3)] {
            let fd = (modulation_kernel_value(x, w + e) - modulation_kernel_value(x, w - e)) / (2.0 * e);
            let exact = modulation_kernel_omega_derivative_value(x, w);
            assert!((fd - exact).norm() < 1e-8, "({x}, {w})");
        }
    }
}
