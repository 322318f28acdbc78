//! Convolution on `ℝ`, twisted convolution on `ℝ²`, and the weighted Young inequality.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{
    aligned_steps, check_grid_2d, lp_norm, Grid2D, SampledFunction1D, SampledFunction2D,
};
use crate::weights::WeightPair;

/// Linear convolution `(F∗G)(x) = ∫ F(y) G(x − y) dy`, sampled on the grid of `f`.
///
/// Zero-padded FFT convolution scaled by `h`; `g`'s origin must be a multiple of `h`.
pub fn conv1d(f: &SampledFunction1D, g: &SampledFunction1D) -> Result<SampledFunction1D> {
    let (gf, gg) = (f.grid(), g.grid());
    let h = gf.spacing();
    if (gg.spacing() - h).abs() > 1e-12 * h {
        return Err(Error::GridMismatch(format!(
            "spacings differ: {} vs {}",
            h,
            gg.spacing()
        )));
    }
    let offset = aligned_steps(gg.origin(), h)
        .ok_or(Error::Alignment { shift: gg.origin(), spacing: h })?;
    let full = linear_convolution(f.values(), g.values());
    // Full index n sits at origin_f + origin_g + n h, so output index i reads n = i − origin_g/h.
    let values = (0..gf.len())
        .map(|i| {
            let n = i as i64 - offset;
            if n >= 0 && (n as usize) < full.len() {
                full[n as usize] * h
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(SampledFunction1D::from_parts(*gf, values))
}

fn linear_convolution(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len() + b.len() - 1;
    let m = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut fa = a.to_vec();
    fa.resize(m, Complex64::new(0.0, 0.0));
    let mut fb = b.to_vec();
    fb.resize(m, Complex64::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y / m as f64;
    }
    inv.process(&mut fa);
    fa.truncate(len);
    fa
}

/// Integer offsets `origin/h` of both axes, required for the output to stay on the grid.
fn lattice_offsets(grid: &Grid2D) -> Result<(i64, i64)> {
    let ox = aligned_steps(grid.x.origin(), grid.x.spacing())
        .ok_or(Error::Alignment { shift: grid.x.origin(), spacing: grid.x.spacing() })?;
    let ow = aligned_steps(grid.omega.origin(), grid.omega.spacing())
        .ok_or(Error::Alignment { shift: grid.omega.origin(), spacing: grid.omega.spacing() })?;
    Ok((ox, ow))
}

/// Twisted convolution
/// `(F ⊙ G)(x, ω) = ∫∫ F(x′, ω′) G(x − x′, ω − ω′) e^{2πi x′(ω′ − ω)} dx′ dω′`.
///
/// For each output `ω`, the modulated `F` is convolved with `G` along `x` in the Fourier
/// domain; the modulation becomes an integer bin shift on a zero-padded FFT length `M`
/// with `M·h_x·h_ω` and `M·h_x·ω_0` integral. Output columns are computed in parallel.
pub fn twisted_conv(f: &SampledFunction2D, g: &SampledFunction2D) -> Result<SampledFunction2D> {
    check_grid_2d(f.grid(), g.grid())?;
    let grid = *f.grid();
    let (ox, ow) = lattice_offsets(&grid)?;
    let (nx, nw) = (grid.x.len(), grid.omega.len());
    let (hx, hw) = (grid.x.spacing(), grid.omega.spacing());
    let (x0, w0) = (grid.x.origin(), grid.omega.origin());

    let mut m = (2 * nx).next_power_of_two();
    let integral = |v: f64| (v - v.round()).abs() < 1e-9;
    while !(integral(m as f64 * hx * hw) && integral(m as f64 * hx * w0)) {
        m *= 2;
        if m > 1 << 26 {
            return Err(Error::InvalidGrid(
                "twisted convolution needs h_x·h_ω and h_x·ω_0 to be dyadic rationals".into(),
            ));
        }
    }

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    // Column spectra along x: a[j] is the FFT of x' ↦ F(x', ω'_j) e^{2πi x'ω'_j}.
    let column = |src: &SampledFunction2D, j: usize, modulate: bool| -> Vec<Complex64> {
        let wj = grid.omega.point(j);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (i, slot) in buf.iter_mut().enumerate().take(nx) {
            let v = src.at(i, j);
            *slot = if modulate {
                v * Complex64::from_polar(1.0, 2.0 * PI * grid.x.point(i) * wj)
            } else {
                v
            };
        }
        fwd.process(&mut buf);
        buf
    };
    let a: Vec<Vec<Complex64>> = (0..nw).into_par_iter().map(|j| column(f, j, true)).collect();
    let b: Vec<Vec<Complex64>> = (0..nw).into_par_iter().map(|j| column(g, j, false)).collect();

    let scale = hx * hw / m as f64;
    let columns: Vec<Vec<Complex64>> = (0..nw)
        .into_par_iter()
        .map(|i| {
            let wi = grid.omega.point(i);
            // Modulating by e^{-2πi x' ω} shifts the spectrum: bin k reads bin k + s.
            let s = (wi * hx * m as f64).round() as i64;
            let phase = Complex64::from_polar(1.0, -2.0 * PI * x0 * wi);
            let mut acc = vec![Complex64::new(0.0, 0.0); m];
            for (j, aj) in a.iter().enumerate() {
                // ω − ω'_j = ω_0 + c h_ω with c = i − j − ω_0/h_ω.
                let c = i as i64 - j as i64 - ow;
                if c < 0 || c >= nw as i64 {
                    continue;
                }
                let bc = &b[c as usize];
                for (k, slot) in acc.iter_mut().enumerate() {
                    let src = (k as i64 + s).rem_euclid(m as i64) as usize;
                    *slot += aj[src] * bc[k];
                }
            }
            inv.process(&mut acc);
            (0..nx)
                .map(|r| {
                    // Output x_r = x_0 + r h_x sits at full index r − x_0/h_x.
                    let n = r as i64 - ox;
                    if n >= 0 && (n as usize) < m {
                        acc[n as usize] * phase * scale
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();

    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            values[i * nw + j] = v;
        }
    }
    Ok(SampledFunction2D::from_parts(grid, values))
}

/// Direct `O(N⁴)` evaluation of the twisted convolution, for cross-validation on small grids.
pub fn twisted_conv_direct(f: &SampledFunction2D, g: &SampledFunction2D) -> Result<SampledFunction2D> {
    check_grid_2d(f.grid(), g.grid())?;
    let grid = *f.grid();
    let (ox, ow) = lattice_offsets(&grid)?;
    let (nx, nw) = (grid.x.len() as i64, grid.omega.len() as i64);
    let cell = grid.cell_area();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i in 0..nx {
        for j in 0..nw {
            let w = grid.omega.point(j as usize);
            let mut sum = Complex64::new(0.0, 0.0);
            for a in 0..nx {
                let bx = i - a - ox;
                if bx < 0 || bx >= nx {
                    continue;
                }
                let xp = grid.x.point(a as usize);
                for b in 0..nw {
                    let bw = j - b - ow;
                    if bw < 0 || bw >= nw {
                        continue;
                    }
                    let wp = grid.omega.point(b as usize);
                    let phase = Complex64::from_polar(1.0, 2.0 * PI * xp * (wp - w));
                    sum += f.at(a as usize, b as usize) * g.at(bx as usize, bw as usize) * phase;
                }
            }
            values[(i * nw + j) as usize] = sum * cell;
        }
    }
    Ok(SampledFunction2D::from_parts(grid, values))
}

/// Evidence for the weighted Young inequality `‖H∗F‖_{r,m} ≤ C ‖H‖_{p,m} ‖F‖_{q,w}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub ratio: f64,
    pub constant: f64,
    pub pass: bool,
}

/// Default relative slack of [`weighted_young_check`].
pub const YOUNG_TOLERANCE: f64 = 0.05;

/// Computes `‖H∗F‖_{r,m} / (‖H‖_{p,m} ‖F‖_{q,w})`; PASS iff it is at most `constant·(1 + tol)`.
///
/// The convolution is sampled on `h`'s grid, which should contain the support of `H∗F`.
pub fn weighted_young_check(
    h: &SampledFunction1D,
    f: &SampledFunction1D,
    p: f64,
    q: f64,
    r: f64,
    pair: &WeightPair,
    tol: f64,
) -> Result<YoungReport> {
    if !(p >= 1.0 && q >= 1.0 && r >= 1.0) || (1.0 + 1.0 / r - 1.0 / p - 1.0 / q).abs() > 1e-12 {
        return Err(Error::ExponentRelation { p, q, r });
    }
    let denom = lp_norm(h, p, &pair.m)? * lp_norm(f, q, &pair.w)?;
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let conv = conv1d(h, f)?;
    let ratio = lp_norm(&conv, r, &pair.m)? / denom;
    let constant = pair.moderateness_constant;
    Ok(YoungReport { p, q, r, ratio, constant, pass: ratio <= constant * (1.0 + tol) })
}
