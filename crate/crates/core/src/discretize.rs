//! The discretization operator `J_φ F = Σ_k ⟨F, φ_k⟩ K(· − g_k)`, the Shannon left
//! inverse, the multiplier bound and injectivity certificates.
//!
//! For the hat partition at `τ = 1/(2ω)` the operator is the Fourier multiplier
//! `Ĵ_φ F = 2ω φ̂_τ F̂` on the band, so its left inverse multiplies by
//! `χ_{[-ω,ω]} / (2ω φ̂_τ)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{band_weight, modulation_kernel_value, sinc, ModulationSetting, ShannonSetting};
use crate::pou::{hat_fourier, PartitionOfUnity, PouWindow, Profile};
use crate::sampling::{
    check_grid_1d, check_grid_2d, Grid1D, SampledFunction1D,
    SampledFunction2D,
};
use crate::spectral;
use crate::weights::Weight;

/// Coefficients `⟨F, φ_k⟩` on a box of lattice indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    /// Lattice step: `τ` in 1D, 1 for the unit lattice.
    pub step: f64,
    /// First index per lattice axis.
    pub first: Vec<i64>,
    /// Number of indices per lattice axis.
    pub counts: Vec<usize>,
    /// Values in index order (first axis major).
    pub values: Vec<Complex64>,
}

impl CoefficientSequence {
    pub fn zeros_like(pou: &PartitionOfUnity) -> Self {
        Self {
            step: pou.tau(),
            first: pou.first().to_vec(),
            counts: pou.counts().to_vec(),
            values: vec![Complex64::new(0.0, 0.0); pou.len()],
        }
    }

    /// Unit sequence supported on lattice index `k` of a 1D family.
    pub fn unit(pou: &PartitionOfUnity, k: i64) -> Result<Self> {
        let mut c = Self::zeros_like(pou);
        let pos = c.position_1d(k).ok_or_else(|| Error::IndexMismatch(format!("index {k} out of range")))?;
        c.values[pos] = Complex64::new(1.0, 0.0);
        Ok(c)
    }

    pub fn indices_1d(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.counts[0] as i64).map(move |i| self.first[0] + i)
    }

    pub fn position_1d(&self, k: i64) -> Option<usize> {
        let i = k - self.first[0];
        (i >= 0 && (i as usize) < self.counts[0]).then_some(i as usize)
    }

    pub fn get_1d(&self, k: i64) -> Option<Complex64> {
        self.position_1d(k).map(|i| self.values[i])
    }

    pub fn get_2d(&self, k: i64, l: i64) -> Option<Complex64> {
        let (a, b) = (k - self.first[0], l - self.first[1]);
        if a < 0 || b < 0 || a as usize >= self.counts[0] || b as usize >= self.counts[1] {
            return None;
        }
        Some(self.values[a as usize * self.counts[1] + b as usize])
    }

    /// Radius of the lattice point at position `i`.
    fn radius(&self, i: usize) -> f64 {
        match self.counts.len() {
            1 => ((self.first[0] + i as i64) as f64 * self.step).abs(),
            _ => {
                let k = self.first[0] + (i / self.counts[1]) as i64;
                let l = self.first[1] + (i % self.counts[1]) as i64;
                (k as f64 * self.step).hypot(l as f64 * self.step)
            }
        }
    }

    /// Weighted sequence norm `(Σ |m(g_k) c_k|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64, m: &Weight) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("exponent p = {p} must be >= 1")));
        }
        let terms = self.values.iter().enumerate().map(|(i, v)| m.eval(self.radius(i)) * v.norm());
        let norm = if p.is_infinite() {
            terms.fold(0.0, f64::max)
        } else {
            terms.map(|t| t.powf(p)).sum::<f64>().powf(1.0 / p)
        };
        if norm.is_finite() {
            Ok(norm)
        } else {
            Err(Error::Overflow { p })
        }
    }

    pub fn is_compatible(&self, pou: &PartitionOfUnity) -> bool {
        self.first == pou.first() && self.counts == pou.counts()
    }
}

fn line_window(pou: &PartitionOfUnity) -> Result<Grid1D> {
    match pou.window() {
        PouWindow::Line(g) => Ok(*g),
        PouWindow::Plane(_) => Err(Error::InvalidParameter("expected a 1D partition".into())),
    }
}

/// `c_k = ⟨F, φ_k⟩` by rectangle-rule quadrature over the support of each bump.
pub fn coefficients(f: &SampledFunction1D, pou: &PartitionOfUnity) -> Result<CoefficientSequence> {
    let grid = line_window(pou)?;
    check_grid_1d(f.grid(), &grid)?;
    let n = grid.len() as i64;
    let h = grid.spacing();
    let values = pou
        .indices_1d()
        .map(|k| {
            let (start, len) = pou.support_indices(k, &grid);
            let mut sum = Complex64::new(0.0, 0.0);
            for off in 0..len as i64 {
                let mut i = start + off;
                if pou.is_periodic() {
                    i = i.rem_euclid(n);
                } else if i < 0 || i >= n {
                    continue;
                }
                let phi = pou.eval_1d(k, grid.point(i as usize));
                sum += f.values()[i as usize] * phi;
            }
            sum * h
        })
        .collect();
    let mut c = CoefficientSequence::zeros_like(pou);
    c.values = values;
    Ok(c)
}

/// `c_k = ∫ F̂(ξ) φ̂_τ(ξ) e^{2πiξkτ} dξ` on the DFT frequency grid; periodic hat families only.
pub fn coefficients_spectral(
    f: &SampledFunction1D,
    pou: &PartitionOfUnity,
) -> Result<CoefficientSequence> {
    let grid = line_window(pou)?;
    check_grid_1d(f.grid(), &grid)?;
    if !pou.is_periodic() || pou.profile() != Profile::Hat {
        return Err(Error::InvalidParameter("spectral coefficients need a periodic hat family".into()));
    }
    let tau = pou.tau();
    let mut spectrum = spectral::fourier_transform(f);
    for (v, xi) in spectrum.iter_mut().zip(grid.frequencies()) {
        *v *= hat_fourier(tau, xi);
    }
    let smoothed = spectral::inverse_fourier_transform(&grid, &spectrum);
    let mut c = CoefficientSequence::zeros_like(pou);
    for (slot, k) in c.values.iter_mut().zip(pou.indices_1d()) {
        let i = grid.index_of(pou.center(k)).ok_or(Error::Alignment { shift: pou.center(k), spacing: grid.spacing() })?;
        *slot = smoothed.values()[i];
    }
    Ok(c)
}

/// Box integrals `⟨F, φ_{k,l}⟩` for the unit-box family on `ℤ²`.
pub fn coefficients_2d(f: &SampledFunction2D, pou: &PartitionOfUnity) -> Result<CoefficientSequence> {
    let grid = match pou.window() {
        PouWindow::Plane(g) => *g,
        PouWindow::Line(_) => return Err(Error::InvalidParameter("expected a 2D partition".into())),
    };
    check_grid_2d(f.grid(), &grid)?;
    let mut c = CoefficientSequence::zeros_like(pou);
    let ny = grid.omega.len();
    let (k0, l0) = (pou.first()[0], pou.first()[1]);
    let lcount = pou.counts()[1];
    for i in 0..grid.x.len() {
        let k = (grid.x.point(i) + 0.5).floor() as i64;
        for j in 0..ny {
            let l = (grid.omega.point(j) + 0.5).floor() as i64;
            let (a, b) = (k - k0, l - l0);
            if a >= 0 && b >= 0 && (a as usize) < pou.counts()[0] && (b as usize) < lcount {
                c.values[a as usize * lcount + b as usize] += f.at(i, j);
            }
        }
    }
    let cell = grid.cell_area();
    c.values.iter_mut().for_each(|v| *v *= cell);
    Ok(c)
}

/// `Σ_k c_k G(· − g_k)` on `g`'s grid; translations are cyclic for periodic families.
pub fn lattice_sum(
    c: &CoefficientSequence,
    g: &SampledFunction1D,
    pou: &PartitionOfUnity,
) -> Result<SampledFunction1D> {
    if !c.is_compatible(pou) {
        return Err(Error::IndexMismatch("coefficients do not match the partition".into()));
    }
    let grid = *g.grid();
    let n = grid.len() as i64;
    let shifts = pou
        .indices_1d()
        .map(|k| grid.steps(pou.center(k)).ok_or(Error::Alignment { shift: pou.center(k), spacing: grid.spacing() }))
        .collect::<Result<Vec<i64>>>()?;
    let periodic = pou.is_periodic();
    let src = g.values();
    // One output sample per task, each summing over k in a fixed order.
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ck, &s) in c.values.iter().zip(&shifts) {
                if ck.re == 0.0 && ck.im == 0.0 {
                    continue;
                }
                let mut j = i - s;
                if periodic {
                    j = j.rem_euclid(n);
                } else if j < 0 || j >= n {
                    continue;
                }
                acc += ck * src[j as usize];
            }
            acc
        })
        .collect();
    Ok(SampledFunction1D::from_parts(grid, values))
}

/// `J_φ F = Σ_k ⟨F, φ_k⟩ K(· − g_k)`.
pub fn j_phi_apply(
    f: &SampledFunction1D,
    pou: &PartitionOfUnity,
    kernel: &SampledFunction1D,
) -> Result<SampledFunction1D> {
    check_grid_1d(f.grid(), kernel.grid())?;
    let c = coefficients(f, pou)?;
    lattice_sum(&c, kernel, pou)
}

/// Closed form `factor · (F ∗ φ_τ)` of `J_φ F`, computed as a Fourier multiplier.
///
/// The identity holds with `factor = 2ω`.
pub fn j_phi_closed_form(f: &SampledFunction1D, tau: f64, factor: f64) -> SampledFunction1D {
    spectral::apply_multiplier(f, |xi| Complex64::new(factor * hat_fourier(tau, xi), 0.0))
}

/// Multiplier values on a DFT frequency grid, vanishing outside `[-band, band]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMultiplier {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub band: f64,
}

impl FourierMultiplier {
    pub fn apply(&self, f: &SampledFunction1D) -> Result<SampledFunction1D> {
        if f.grid().len() != self.values.len() {
            return Err(Error::GridMismatch("multiplier and function sizes differ".into()));
        }
        let mut buf = f.values().to_vec();
        spectral::fft(&mut buf);
        buf.iter_mut().zip(&self.values).for_each(|(v, m)| *v *= m);
        spectral::ifft(&mut buf);
        Ok(SampledFunction1D::from_parts(*f.grid(), buf))
    }

    pub fn value_at(&self, xi: f64) -> Option<Complex64> {
        self.frequencies.iter().position(|&f| (f - xi).abs() < 1e-12).map(|i| self.values[i])
    }
}

/// `χ_{[-ω,ω]}(ξ) τ / φ̂_τ(ξ)` on the grid's DFT frequencies, edges included.
///
/// For `τ <= 1/(2ω)` the lattice translates do not alias the band and `J_φ` acts on it as
/// multiplication by `φ̂_τ / τ`; at `τ = 1/(2ω)` the multiplier is `1 / (2ω φ̂_τ)`.
pub fn left_inverse_multiplier(setting: &ShannonSetting, tau: f64, grid: &Grid1D) -> FourierMultiplier {
    let frequencies = grid.frequencies();
    let values = frequencies
        .iter()
        .map(|&xi| {
            let inside = band_weight(setting, xi) > 0.0;
            Complex64::new(if inside { tau / hat_fourier(tau, xi) } else { 0.0 }, 0.0)
        })
        .collect();
    FourierMultiplier { frequencies, values, band: setting.omega() }
}

/// Out-of-band energy fraction accepted by [`shannon_left_inverse`].
pub const BAND_TOLERANCE: f64 = 1e-6;

/// Explicit left inverse of `J_φ` on band-limited input, for hats of scale `1/(2ω)`.
pub fn shannon_left_inverse(g: &SampledFunction1D, setting: &ShannonSetting) -> Result<SampledFunction1D> {
    shannon_left_inverse_at_scale(g, setting, setting.tau())
}

/// Left inverse for hats of scale `tau`; exact only when `tau <= 1/(2ω)`.
pub fn shannon_left_inverse_at_scale(
    g: &SampledFunction1D,
    setting: &ShannonSetting,
    tau: f64,
) -> Result<SampledFunction1D> {
    let fraction = spectral::out_of_band_fraction(g, setting.omega());
    if fraction >= BAND_TOLERANCE {
        return Err(Error::OutOfBand { fraction, threshold: BAND_TOLERANCE });
    }
    left_inverse_multiplier(setting, tau, g.grid()).apply(g)
}

/// Removes all spectral content outside the closed band.
pub fn project_band(f: &SampledFunction1D, setting: &ShannonSetting) -> SampledFunction1D {
    let tol = 1e-9 * setting.omega().max(1.0);
    spectral::apply_multiplier(f, |xi| {
        Complex64::new(if xi.abs() <= setting.omega() + tol { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Numeric and analytic sides of the `L_t` bound for `𝓕^{-1}[(χ|φ̂|)^{-2}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: f64,
    pub epsilon: f64,
    pub omega: f64,
    /// `‖·‖_t^t` over `|x| <= window` by quadrature.
    pub numeric_window: f64,
    /// Asymptotic contribution of `|x| > window`.
    pub numeric_tail: f64,
    pub numeric: f64,
    pub window: f64,
    /// `sup_{[-ω,ω]} |φ̂′| / |φ̂|³`.
    pub constant_c: f64,
    /// `2ε(ω³π⁴/2)^t + 2(ω²π²/2 + 2ωC/π)^t ε^{1−t}/(t−1)`.
    pub analytic_bound: f64,
    /// Same with the second constant `ω²π³/2`.
    pub rederived_bound: f64,
    pub best_epsilon: f64,
    pub best_bound: f64,
    pub pass: bool,
}

fn hat_fourier_derivative(tau: f64, xi: f64) -> f64 {
    let y = tau * xi;
    let ds = if y.abs() < 1e-8 { 0.0 } else { crate::kernels::sinc_derivative(y) };
    2.0 * tau * tau * sinc(y) * ds
}

fn closed_form_bound(t: f64, eps: f64, w: f64, c: f64, second: f64) -> f64 {
    2.0 * eps * (w.powi(3) * PI.powi(4) / 2.0).powf(t)
        + 2.0 * (second + 2.0 * w * c / PI).powf(t) / (t - 1.0) * eps.powf(1.0 - t)
}

/// `E|sin|^t` over a period.
fn mean_abs_sin_pow(t: f64) -> f64 {
    let n = 20_000;
    (0..n).map(|i| ((i as f64 + 0.5) * PI / n as f64).sin().powf(t)).sum::<f64>() / n as f64
}

/// Verifies the appendix bound on `‖𝓕^{-1}[(χ_{[-ω,ω]} |φ̂_{1/(2ω)}|)^{-2}]‖_{L_t}^t`.
pub fn multiplier_lt_bound(t: f64, epsilon: f64, setting: &ShannonSetting) -> Result<BoundReport> {
    if !(t > 1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must exceed 1")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    let (w, tau) = (setting.omega(), setting.tau());
    let u = |xi: f64| hat_fourier(tau, xi).powi(-2);

    let dense = 200_000;
    let constant_c = (0..=dense)
        .map(|i| {
            let xi = -w + 2.0 * w * i as f64 / dense as f64;
            hat_fourier_derivative(tau, xi).abs() / hat_fourier(tau, xi).powi(3)
        })
        .fold(0.0, f64::max);

    // f(x) = 2 ∫_0^ω u(ξ) cos(2πxξ) dξ by the trapezoid rule.
    let nodes = 8001;
    let dxi = w / (nodes - 1) as f64;
    let weights: Vec<f64> = (0..nodes)
        .map(|i| {
            let end = i == 0 || i == nodes - 1;
            u(i as f64 * dxi) * dxi * if end { 0.5 } else { 1.0 }
        })
        .collect();
    let window = 400.0;
    let hx = 1.0 / 64.0;
    let count = (window / hx) as usize;
    let samples: Vec<f64> = (0..=count)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * hx;
            let step = Complex64::from_polar(1.0, 2.0 * PI * x * dxi);
            let mut z = Complex64::new(1.0, 0.0);
            let mut acc = 0.0;
            for wt in &weights {
                acc += wt * z.re;
                z *= step;
            }
            (2.0 * acc).abs().powf(t)
        })
        .collect();
    let numeric_window = (2.0 * samples.iter().sum::<f64>() - samples[0]) * hx;
    let edge = u(w);
    let numeric_tail = 2.0 * (edge / PI).powf(t) * mean_abs_sin_pow(t) * window.powf(1.0 - t) / (t - 1.0);
    let numeric = numeric_window + numeric_tail;

    let second = w * w * PI * PI / 2.0;
    let analytic_bound = closed_form_bound(t, epsilon, w, constant_c, second);
    let rederived_bound = closed_form_bound(t, epsilon, w, constant_c, w * w * PI.powi(3) / 2.0);
    let (best_epsilon, best_bound) = (1..100)
        .map(|i| {
            let e = i as f64 / 100.0;
            (e, closed_form_bound(t, e, w, constant_c, second))
        })
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });

    Ok(BoundReport {
        t,
        epsilon,
        omega: w,
        numeric_window,
        numeric_tail,
        numeric,
        window,
        constant_c,
        analytic_bound,
        rederived_bound,
        best_epsilon,
        best_bound,
        pass: numeric <= analytic_bound,
    })
}

/// Smallest-singular-value witness for injectivity of a truncated coefficient map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityCertificate {
    pub setting: String,
    /// Lattice truncation radius.
    #[serde(rename = "R")]
    pub radius: f64,
    /// Dimension of the trial space.
    pub d: usize,
    /// Number of coefficient functionals (matrix rows).
    pub rows: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Quadrature spacing used to assemble the matrix.
    pub grid: f64,
    /// Trial-space window per axis.
    pub window: Vec<[f64; 2]>,
    pub tau: f64,
    pub omega: f64,
    /// Condition threshold for the orthonormalization, 0 when unused.
    pub tolerance: f64,
}

fn singular_values(m: DMatrix<Complex64>) -> (f64, f64) {
    let sv = m.singular_values();
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sv.iter().copied().fold(0.0, f64::max);
    (min, max)
}

/// Injectivity witness for `F̂ ↦ {⟨F, φ_k⟩}` on the band split into `band_dim` cells.
///
/// Row `k` (`|k| <= lattice_radius`), column `j` holds
/// `∫_{cell j} τ sinc²(τξ) e^{2πiξkτ} dξ / √|cell|`, integrated with a composite midpoint rule.
pub fn injectivity_certificate_shannon(
    setting: &ShannonSetting,
    tau: f64,
    band_dim: usize,
    lattice_radius: usize,
) -> Result<InjectivityCertificate> {
    if band_dim == 0 || !(tau > 0.0) {
        return Err(Error::InvalidParameter("band dimension and tau must be positive".into()));
    }
    let w = setting.omega();
    let width = 2.0 * w / band_dim as f64;
    let sub = 64;
    let dq = width / sub as f64;
    let rows = 2 * lattice_radius + 1;
    let m = DMatrix::from_fn(rows, band_dim, |r, j| {
        let k = r as f64 - lattice_radius as f64;
        let lo = -w + j as f64 * width;
        let sum: Complex64 = (0..sub)
            .map(|q| {
                let xi = lo + (q as f64 + 0.5) * dq;
                Complex64::from_polar(hat_fourier(tau, xi), 2.0 * PI * xi * k * tau)
            })
            .sum();
        sum * dq / width.sqrt()
    });
    let (sigma_min, sigma_max) = singular_values(m);
    Ok(InjectivityCertificate {
        setting: "shannon".into(),
        radius: lattice_radius as f64 * tau,
        d: band_dim,
        rows,
        sigma_min,
        sigma_max,
        grid: dq,
        window: vec![[-w, w]],
        tau,
        omega: w,
        tolerance: 0.0,
    })
}

/// Condition threshold for orthonormalizing the modulation trial basis.
pub const CONDITION_THRESHOLD: f64 = 1e8;

/// Twisted translate `B_{(a,b)}(x, ω) = e^{−2πia(ω−b)} K(x − a, ω − b)` of the modulation kernel.
pub fn twisted_translate(a: f64, b: f64, x: f64, omega: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * a * (omega - b)) * modulation_kernel_value(x - a, omega - b)
}

/// `⟨M_b T_a g, M_{b′} T_{a′} g⟩` for the unit box `g`, equal to the `L_2(ℝ²)` inner product of
/// the corresponding twisted translates.
pub fn twisted_translate_gram(p: [f64; 2], q: [f64; 2]) -> Complex64 {
    let len = 1.0 - (p[0] - q[0]).abs();
    if len <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let db = p[1] - q[1];
    let centre = 0.5 * (p[0] + q[0]);
    Complex64::from_polar(len * sinc(len * db), 2.0 * PI * db * centre)
}

/// `∫_{[k−½,k+½]×[l−½,l+½]} F` by an `n × n` midpoint rule.
pub fn box_integral(f: impl Fn(f64, f64) -> Complex64, k: i64, l: i64, n: usize) -> Complex64 {
    let d = 1.0 / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let x = k as f64 - 0.5 + (i as f64 + 0.5) * d;
        for j in 0..n {
            let w = l as f64 - 0.5 + (j as f64 + 0.5) * d;
            sum += f(x, w);
        }
    }
    sum * d * d
}

/// Injectivity witness for the unit-box coefficient map on the span of
/// `basis_side²` twisted translates with centres spaced `basis_step` apart around the origin.
pub fn injectivity_certificate_modulation(
    setting: &ModulationSetting,
    basis_side: usize,
    basis_step: f64,
    quadrature: usize,
) -> Result<InjectivityCertificate> {
    if basis_side == 0 || quadrature == 0 {
        return Err(Error::InvalidParameter("basis side and quadrature must be positive".into()));
    }
    let half = (basis_side as f64 - 1.0) / 2.0;
    let centres: Vec<[f64; 2]> = (0..basis_side * basis_side)
        .map(|i| {
            let a = ((i / basis_side) as f64 - half) * basis_step;
            let b = ((i % basis_side) as f64 - half) * basis_step;
            [a, b]
        })
        .collect();
    let d = centres.len();
    let gram = DMatrix::from_fn(d, d, |i, j| twisted_translate_gram(centres[i], centres[j]));
    let eig = gram.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
    if condition > CONDITION_THRESHOLD {
        return Err(Error::RankDeficient { condition, threshold: CONDITION_THRESHOLD });
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.powf(-0.5), 0.0)));
    let vecs = &eig.eigenvectors;
    let whiten = vecs * inv_sqrt * vecs.adjoint();

    let r = setting.radius() as i64;
    let boxes: Vec<[i64; 2]> = (-r..=r).flat_map(|k| (-r..=r).map(move |l| [k, l])).collect();
    let raw_rows: Vec<Vec<Complex64>> = boxes
        .par_iter()
        .map(|&[k, l]| {
            centres
                .iter()
                .map(|&[a, b]| {
                    if (k as f64 - a).abs() > 1.5 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        box_integral(|x, w| twisted_translate(a, b, x, w), k, l, quadrature)
                    }
                })
                .collect()
        })
        .collect();
    let raw = DMatrix::from_fn(boxes.len(), d, |i, j| raw_rows[i][j]);
    let (sigma_min, sigma_max) = singular_values(raw * whiten);
    let extent = half * basis_step + 1.0;
    Ok(InjectivityCertificate {
        setting: "modulation".into(),
        radius: r as f64,
        d,
        rows: boxes.len(),
        sigma_min,
        sigma_max,
        grid: 1.0 / quadrature as f64,
        window: vec![[-(r as f64) - 0.5, r as f64 + 0.5]; 2],
        tau: basis_step,
        omega: extent,
        tolerance: CONDITION_THRESHOLD,
    })
}
