//! Discrete Fourier transforms scaled to approximate the continuous transform
//! `F̂(ξ) = ∫ F(x) e^{-2πixξ} dx` on uniform grids, plus band-limited test signals.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::sampling::{Grid1D, SampledFunction1D, SampledFunction2D};

/// Frequencies of the DFT bins of an `n`-point grid with spacing `h`, in FFT order.
pub fn frequencies(n: usize, h: f64) -> Vec<f64> {
    let df = 1.0 / (n as f64 * h);
    (0..n)
        .map(|m| {
            let k = if m < n.div_ceil(2) { m as f64 } else { m as f64 - n as f64 };
            k * df
        })
        .collect()
}

/// Unnormalized forward DFT in place.
pub fn fft(buf: &mut [Complex64]) {
    let plan = FftPlanner::new().plan_fft_forward(buf.len());
    plan.process(buf);
}

/// Inverse DFT in place, normalized by `1/n`.
pub fn ifft(buf: &mut [Complex64]) {
    let n = buf.len();
    let plan = FftPlanner::new().plan_fft_inverse(n);
    plan.process(buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= s);
}

fn transform_columns(buf: &mut [Complex64], nx: usize, ny: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let row = if inverse { planner.plan_fft_inverse(ny) } else { planner.plan_fft_forward(ny) };
    row.process(buf);
    let col = if inverse { planner.plan_fft_inverse(nx) } else { planner.plan_fft_forward(nx) };
    let mut scratch = vec![Complex64::new(0.0, 0.0); nx];
    for j in 0..ny {
        for i in 0..nx {
            scratch[i] = buf[i * ny + j];
        }
        col.process(&mut scratch);
        for i in 0..nx {
            buf[i * ny + j] = scratch[i];
        }
    }
    if inverse {
        let s = 1.0 / (nx * ny) as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }
}

/// Forward 2D DFT of an x-major `nx × ny` array.
pub fn fft_2d(buf: &mut [Complex64], nx: usize, ny: usize) {
    transform_columns(buf, nx, ny, false);
}

/// Normalized inverse 2D DFT of an x-major `nx × ny` array.
pub fn ifft_2d(buf: &mut [Complex64], nx: usize, ny: usize) {
    transform_columns(buf, nx, ny, true);
}

fn origin_phase(freq: f64, origin: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * freq * origin)
}

/// Samples `h Σ_j F(x_j) e^{-2πiξ_m x_j}` at the DFT frequencies (FFT order).
pub fn fourier_transform(f: &SampledFunction1D) -> Vec<Complex64> {
    let grid = f.grid();
    let mut buf = f.values().to_vec();
    fft(&mut buf);
    let h = grid.spacing();
    for (v, xi) in buf.iter_mut().zip(grid.frequencies()) {
        *v *= origin_phase(xi, grid.origin()) * h;
    }
    buf
}

/// Inverse of [`fourier_transform`].
pub fn inverse_fourier_transform(grid: &Grid1D, spectrum: &[Complex64]) -> SampledFunction1D {
    assert_eq!(spectrum.len(), grid.len(), "spectrum length must match the grid");
    let h = grid.spacing();
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .zip(grid.frequencies())
        .map(|(v, xi)| v * origin_phase(xi, grid.origin()).conj() / h)
        .collect();
    ifft(&mut buf);
    SampledFunction1D::from_parts(*grid, buf)
}

/// Continuous-transform samples on the 2D DFT frequency grid (x-major, FFT order on both axes).
pub fn fourier_transform_2d(f: &SampledFunction2D) -> Vec<Complex64> {
    let grid = f.grid();
    let (nx, ny) = (grid.x.len(), grid.omega.len());
    let mut buf = f.values().to_vec();
    fft_2d(&mut buf, nx, ny);
    let fx = grid.x.frequencies();
    let fy = grid.omega.frequencies();
    let cell = grid.cell_area();
    for i in 0..nx {
        let px = origin_phase(fx[i], grid.x.origin()) * cell;
        for j in 0..ny {
            buf[i * ny + j] *= px * origin_phase(fy[j], grid.omega.origin());
        }
    }
    buf
}

/// Multiplies the spectrum of `f` by `multiplier(ξ)` and transforms back.
pub fn apply_multiplier(
    f: &SampledFunction1D,
    multiplier: impl Fn(f64) -> Complex64,
) -> SampledFunction1D {
    let mut buf = f.values().to_vec();
    fft(&mut buf);
    for (v, xi) in buf.iter_mut().zip(f.grid().frequencies()) {
        *v *= multiplier(xi);
    }
    ifft(&mut buf);
    SampledFunction1D::from_parts(*f.grid(), buf)
}

/// `n`-th derivative by spectral differentiation along the grid period.
pub fn spectral_derivative(f: &SampledFunction1D, n: u32) -> SampledFunction1D {
    let tau = 2.0 * std::f64::consts::PI;
    let nyq = f.grid().len() / 2;
    let freqs = f.grid().frequencies();
    let mut buf = f.values().to_vec();
    fft(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        if f.grid().len() % 2 == 0 && m == nyq && n % 2 == 1 {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= Complex64::new(0.0, tau * freqs[m]).powu(n);
        }
    }
    ifft(&mut buf);
    SampledFunction1D::from_parts(*f.grid(), buf)
}

fn derivative_factor(freqs: &[f64], m: usize, order: u32) -> Complex64 {
    let n = freqs.len();
    if n % 2 == 0 && m == n / 2 && order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, 2.0 * std::f64::consts::PI * freqs[m]).powu(order)
}

/// Mixed partial `∂_x^a ∂_ω^b F` by spectral differentiation on the 2D grid period.
pub fn spectral_partial_2d(f: &SampledFunction2D, order_x: u32, order_omega: u32) -> SampledFunction2D {
    let grid = *f.grid();
    let (nx, ny) = (grid.x.len(), grid.omega.len());
    let fx = grid.x.frequencies();
    let fy = grid.omega.frequencies();
    let mut buf = f.values().to_vec();
    fft_2d(&mut buf, nx, ny);
    for i in 0..nx {
        let cx = derivative_factor(&fx, i, order_x);
        for j in 0..ny {
            buf[i * ny + j] *= cx * derivative_factor(&fy, j, order_omega);
        }
    }
    ifft_2d(&mut buf, nx, ny);
    SampledFunction2D::from_parts(grid, buf)
}

/// Fraction of the discrete energy carried by bins with `|ξ| > band`.
pub fn out_of_band_fraction(f: &SampledFunction1D, band: f64) -> f64 {
    let spectrum = fourier_transform(f);
    let tol = 1e-9 * band.abs().max(1.0);
    let (mut inside, mut outside) = (0.0, 0.0);
    for (v, xi) in spectrum.iter().zip(f.grid().frequencies()) {
        if xi.abs() <= band + tol {
            inside += v.norm_sqr();
        } else {
            outside += v.norm_sqr();
        }
    }
    let total = inside + outside;
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// Seeded complex white noise on the bins strictly inside `|ξ| < band`, unit `L_2` norm.
pub fn band_limited_noise(grid: &Grid1D, band: f64, rng: &mut ChaCha8Rng) -> SampledFunction1D {
    let tol = 1e-9 * band.max(1.0);
    let spectrum: Vec<Complex64> = grid
        .frequencies()
        .into_iter()
        .map(|xi| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            if xi.abs() < band - tol {
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let f = inverse_fourier_transform(grid, &spectrum);
    let norm = (f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.spacing()).sqrt();
    f.scale(Complex64::new(1.0 / norm, 0.0))
}

/// `count` independent [`band_limited_noise`] draws from one seeded stream.
pub fn band_limited_family(
    grid: &Grid1D,
    band: f64,
    seed: u64,
    count: usize,
) -> Vec<SampledFunction1D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| band_limited_noise(grid, band, &mut rng)).collect()
}
