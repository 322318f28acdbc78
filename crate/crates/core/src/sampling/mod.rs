//! Uniform grids, sampled functions, quadrature and weighted seminorms.
//!
//! One-dimensional grids are half-open windows `origin + i·h`, `i < N`.
//! Two-dimensional samples are stored x-major: the value at `(x_i, ω_j)`
//! lives at `i * ny + j`.

mod io;

pub use io::{read_binary_1d, read_binary_2d, read_csv_1d, read_csv_2d};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;
use crate::weights::Weight;

const ALIGN_TOL: f64 = 1e-9;

/// Uniform one-dimensional grid `origin + i·spacing`, `0 <= i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    origin: f64,
    spacing: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(origin: f64, spacing: f64, count: usize) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid(format!("origin must be finite, got {origin}")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {count}")));
        }
        Ok(Self { origin, spacing, count })
    }

    /// The half-open window `[-half_width, half_width)` sampled with step `spacing`.
    pub fn symmetric(half_width: f64, spacing: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(spacing > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width {half_width} and spacing {spacing} must be positive"
            )));
        }
        let cells = 2.0 * half_width / spacing;
        let count = cells.round();
        if (cells - count).abs() > ALIGN_TOL * cells.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "window width {} is not a multiple of the spacing {spacing}",
                2.0 * half_width
            )));
        }
        Self::new(-half_width, spacing, count as usize)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Last sample point.
    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    /// Length of the window treated as one period, `count · spacing`.
    pub fn period(&self) -> f64 {
        self.count as f64 * self.spacing
    }

    /// Number of grid steps in `dx` if `dx` is a multiple of the spacing.
    pub fn steps(&self, dx: f64) -> Option<i64> {
        aligned_steps(dx, self.spacing)
    }

    /// Index of the sample at `x`, if `x` is a grid point.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let k = self.steps(x - self.origin)?;
        (k >= 0 && (k as usize) < self.count).then_some(k as usize)
    }

    pub fn compatible(&self, other: &Grid1D) -> bool {
        self.count == other.count
            && close(self.spacing, other.spacing)
            && (self.origin - other.origin).abs() <= ALIGN_TOL * self.spacing
    }

    /// DFT frequencies in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        spectral::frequencies(self.count, self.spacing)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

pub(crate) fn aligned_steps(dx: f64, spacing: f64) -> Option<i64> {
    let r = dx / spacing;
    let k = r.round();
    ((r - k).abs() <= ALIGN_TOL * r.abs().max(1.0)).then_some(k as i64)
}

/// Tensor grid on the `(x, ω)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x: Grid1D,
    pub omega: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, omega: Grid1D) -> Self {
        Self { x, omega }
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.x.spacing() * self.omega.spacing()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.omega.len() + j
    }

    pub fn point(&self, index: usize) -> [f64; 2] {
        let ny = self.omega.len();
        [self.x.point(index / ny), self.omega.point(index % ny)]
    }

    pub fn compatible(&self, other: &Grid2D) -> bool {
        self.x.compatible(&other.x) && self.omega.compatible(&other.omega)
    }
}

/// Complex samples of a function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction1D {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl SampledFunction1D {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite sample at x = {}",
                grid.point(i)
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid1D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        Self::from_parts(grid, grid.points().map(f).collect())
    }

    pub fn from_real_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.grid.points().zip(&self.values).map(|(x, &v)| f(x, v)).collect();
        Self::from_parts(self.grid, values)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_grid_1d(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_parts(self.grid, values))
    }

    /// Sample nearest to `x`, or zero outside the window.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let r = ((x - self.grid.origin()) / self.grid.spacing()).round();
        if r < 0.0 || r >= self.grid.len() as f64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[r as usize]
        }
    }

    /// Restriction to the samples with `lo <= x < hi`, keeping the rest of the grid at zero.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let eps = ALIGN_TOL * self.grid.spacing();
        self.map(|x, v| if x >= lo - eps && x < hi - eps { v } else { Complex64::new(0.0, 0.0) })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Complex samples on a [`Grid2D`], stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction2D {
    grid: Grid2D,
    values: Vec<Complex64>,
}

impl SampledFunction2D {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite sample at {:?}",
                grid.point(i)
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid2D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for x in grid.x.points() {
            for w in grid.omega.points() {
                values.push(f(x, w));
            }
        }
        Self::from_parts(grid, values)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn map(&self, f: impl Fn([f64; 2], Complex64) -> Complex64) -> Self {
        let values =
            self.values.iter().enumerate().map(|(k, &v)| f(self.grid.point(k), v)).collect();
        Self::from_parts(self.grid, values)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_grid_2d(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect();
        Ok(Self::from_parts(self.grid, values))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn check_grid_1d(a: &Grid1D, b: &Grid1D) -> Result<()> {
    if a.compatible(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}

pub(crate) fn check_grid_2d(a: &Grid2D, b: &Grid2D) -> Result<()> {
    if a.compatible(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}

/// Common view of 1D and 2D samples used by quadrature routines.
pub trait Sampled {
    fn samples(&self) -> &[Complex64];
    fn cell_volume(&self) -> f64;
    /// Euclidean norm of the carrier point of sample `index`, the argument of radial weights.
    fn radius(&self, index: usize) -> f64;
    fn same_grid(&self, other: &Self) -> bool;
}

impl Sampled for SampledFunction1D {
    fn samples(&self) -> &[Complex64] {
        &self.values
    }
    fn cell_volume(&self) -> f64 {
        self.grid.spacing()
    }
    fn radius(&self, index: usize) -> f64 {
        self.grid.point(index).abs()
    }
    fn same_grid(&self, other: &Self) -> bool {
        self.grid.compatible(&other.grid)
    }
}

impl Sampled for SampledFunction2D {
    fn samples(&self) -> &[Complex64] {
        &self.values
    }
    fn cell_volume(&self) -> f64 {
        self.grid.cell_area()
    }
    fn radius(&self, index: usize) -> f64 {
        let [x, w] = self.grid.point(index);
        x.hypot(w)
    }
    fn same_grid(&self, other: &Self) -> bool {
        self.grid.compatible(&other.grid)
    }
}

/// Rectangle-rule weighted norm `(Σ |m(x_i) F(x_i)|^p · cell)^(1/p)`.
///
/// `p = ∞` gives the weighted maximum.
pub fn lp_norm<S: Sampled>(f: &S, p: f64, m: &Weight) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent p = {p} must be >= 1")));
    }
    let values = f.samples();
    let norm = if p.is_infinite() {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| m.eval(f.radius(i)) * v.norm())
            .fold(0.0, f64::max)
    } else {
        // Scale by the maximum so large exponents do not overflow prematurely.
        let scale = values
            .iter()
            .enumerate()
            .map(|(i, v)| m.eval(f.radius(i)) * v.norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(0.0);
        }
        let sum: f64 = values
            .iter()
            .enumerate()
            .map(|(i, v)| (m.eval(f.radius(i)) * v.norm() / scale).powf(p))
            .sum();
        scale * (sum * f.cell_volume()).powf(1.0 / p)
    };
    if norm.is_finite() {
        Ok(norm)
    } else {
        Err(Error::Overflow { p })
    }
}

/// `Σ F(x_i) conj(G(x_i)) · cell`.
pub fn inner_product<S: Sampled>(f: &S, g: &S) -> Result<Complex64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch("inner product of functions on different grids".into()));
    }
    let sum: Complex64 = f.samples().iter().zip(g.samples()).map(|(a, b)| a * b.conj()).sum();
    Ok(sum * f.cell_volume())
}

/// Finite family of weighted `L_p` seminorms standing in for the intersection over `1 < p < ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormFamily {
    exponents: Vec<f64>,
    weight: Weight,
}

impl SeminormFamily {
    pub fn new(exponents: Vec<f64>, weight: Weight) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidParameter("empty exponent list".into()));
        }
        if let Some(p) = exponents.iter().find(|p| !(**p > 1.0)) {
            return Err(Error::InvalidParameter(format!("exponent {p} must exceed 1")));
        }
        Ok(Self { exponents, weight })
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }
}

impl Default for SeminormFamily {
    fn default() -> Self {
        Self { exponents: vec![1.5, 2.0, 3.0, 4.0], weight: Weight::Const }
    }
}

pub fn seminorm_vector<S: Sampled>(f: &S, family: &SeminormFamily) -> Result<Vec<f64>> {
    family.exponents.iter().map(|&p| lp_norm(f, p, &family.weight)).collect()
}

/// How [`translate`] realizes a shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// Move samples by whole grid steps, filling with zeros.
    Lattice,
    /// Exact shift of the periodized band-limited interpolant.
    Fourier,
}

/// `(λ(s)F)(x) = F(x - s)`.
pub fn translate(f: &SampledFunction1D, shift: f64, mode: ShiftMode) -> Result<SampledFunction1D> {
    let grid = *f.grid();
    match mode {
        ShiftMode::Lattice => {
            let k = grid
                .steps(shift)
                .ok_or(Error::Alignment { shift, spacing: grid.spacing() })?;
            Ok(SampledFunction1D::from_parts(grid, shift_zero_fill(f.values(), k)))
        }
        ShiftMode::Fourier => {
            let freqs = grid.frequencies();
            let nyquist = (grid.len() % 2 == 0).then_some(grid.len() / 2);
            let mut buf = f.values().to_vec();
            spectral::fft(&mut buf);
            for (m, v) in buf.iter_mut().enumerate() {
                *v *= shift_phase(freqs[m], shift, Some(m) == nyquist);
            }
            spectral::ifft(&mut buf);
            Ok(SampledFunction1D::from_parts(grid, buf))
        }
    }
}

/// Shift of a 2D function by `(shift_x, shift_ω)`.
pub fn translate_2d(
    f: &SampledFunction2D,
    shift: [f64; 2],
    mode: ShiftMode,
) -> Result<SampledFunction2D> {
    let grid = *f.grid();
    let (nx, ny) = (grid.x.len(), grid.omega.len());
    match mode {
        ShiftMode::Lattice => {
            let kx = grid
                .x
                .steps(shift[0])
                .ok_or(Error::Alignment { shift: shift[0], spacing: grid.x.spacing() })?;
            let ky = grid
                .omega
                .steps(shift[1])
                .ok_or(Error::Alignment { shift: shift[1], spacing: grid.omega.spacing() })?;
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            for i in 0..nx {
                let si = i as i64 - kx;
                if si < 0 || si >= nx as i64 {
                    continue;
                }
                for j in 0..ny {
                    let sj = j as i64 - ky;
                    if sj >= 0 && sj < ny as i64 {
                        out[i * ny + j] = f.values()[si as usize * ny + sj as usize];
                    }
                }
            }
            Ok(SampledFunction2D::from_parts(grid, out))
        }
        ShiftMode::Fourier => {
            let mut buf = f.values().to_vec();
            spectral::fft_2d(&mut buf, nx, ny);
            let fx = grid.x.frequencies();
            let fy = grid.omega.frequencies();
            for i in 0..nx {
                let px = shift_phase(fx[i], shift[0], nx % 2 == 0 && i == nx / 2);
                for j in 0..ny {
                    let py = shift_phase(fy[j], shift[1], ny % 2 == 0 && j == ny / 2);
                    buf[i * ny + j] *= px * py;
                }
            }
            spectral::ifft_2d(&mut buf, nx, ny);
            Ok(SampledFunction2D::from_parts(grid, buf))
        }
    }
}

fn shift_phase(freq: f64, shift: f64, nyquist: bool) -> Complex64 {
    let arg = -2.0 * std::f64::consts::PI * freq * shift;
    if nyquist {
        // The Nyquist bin is shared by ±ξ; the symmetric split keeps real signals real.
        Complex64::new(arg.cos(), 0.0)
    } else {
        Complex64::from_polar(1.0, arg)
    }
}

pub(crate) fn shift_zero_fill(values: &[Complex64], k: i64) -> Vec<Complex64> {
    let n = values.len() as i64;
    (0..n)
        .map(|i| {
            let src = i - k;
            if (0..n).contains(&src) {
                values[src as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn shift_cyclic(values: &[Complex64], k: i64) -> Vec<Complex64> {
    let n = values.len() as i64;
    (0..n).map(|i| values[(i - k).rem_euclid(n) as usize]).collect()
}
