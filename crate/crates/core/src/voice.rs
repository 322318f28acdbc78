//! Voice transforms: the inclusion in the Shannon setting and the box-window
//! short-time Fourier transform `U_g f(x, ω) = ⟨f, M_ω T_x g⟩` with `g = χ_{[-1/2, 1/2]}`.
//!
//! The centre variable of the reduced Heisenberg group is dropped; every quantity
//! lives in `U_g f` on the plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolve::twisted_conv;
use crate::error::{Error, Result};
use crate::kernels::{modulation_kernel, sinc, ShannonSetting};
use crate::sampling::{lp_norm, Grid2D, SampledFunction1D, SampledFunction2D};
use crate::spectral;
use crate::weights::Weight;

/// Out-of-band energy fraction tolerated by [`voice_shannon`].
pub const BAND_TOLERANCE: f64 = 1e-6;

/// Default residual threshold for membership in the reproducing subspace.
pub const MEMBERSHIP_THRESHOLD: f64 = 1e-2;

/// The Shannon voice transform is the inclusion of band-limited functions into `L_2(ℝ)`.
pub fn voice_shannon(f: &SampledFunction1D, setting: &ShannonSetting) -> Result<SampledFunction1D> {
    let fraction = spectral::out_of_band_fraction(f, setting.omega());
    if fraction >= BAND_TOLERANCE {
        return Err(Error::OutOfBand { fraction, threshold: BAND_TOLERANCE });
    }
    Ok(f.clone())
}

/// Weight of a sample at offset `d = t − x` under the box window; half at the endpoints.
fn box_weight(d: f64, tol: f64) -> f64 {
    let e = d.abs() - 0.5;
    if e < -tol {
        1.0
    } else if e <= tol {
        0.5
    } else {
        0.0
    }
}

/// `U_g f(x, ω) = h Σ_t f(t) e^{−2πiωt} g(t − x)` on every point of `grid`.
///
/// The window hops by the sample spacing of `grid.x`; time samples are those of `f`.
pub fn voice_modulation(f: &SampledFunction1D, grid: &Grid2D) -> Result<SampledFunction2D> {
    let tgrid = f.grid();
    let h = tgrid.spacing();
    let nyquist = 0.5 / h;
    let (lo, hi) = (grid.omega.origin(), grid.omega.end());
    for frequency in [lo, hi] {
        if frequency.abs() > nyquist * (1.0 + 1e-12) {
            return Err(Error::Nyquist { frequency, nyquist });
        }
    }
    let nt = tgrid.len();
    let nw = grid.omega.len();
    let omegas: Vec<f64> = grid.omega.points().collect();
    let table: Vec<Complex64> = (0..nt)
        .flat_map(|n| {
            let t = tgrid.point(n);
            omegas.iter().map(move |&w| Complex64::from_polar(h, -2.0 * PI * w * t))
        })
        .collect();
    let tol = 1e-9 * h;
    let values = f.values();
    let rows: Vec<Vec<Complex64>> = (0..grid.x.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.x.point(i);
            let first = (((x - 0.5 - tgrid.origin()) / h).floor() as i64 - 1).max(0) as usize;
            let last = ((((x + 0.5 - tgrid.origin()) / h).ceil() as i64 + 1).max(0) as usize).min(nt);
            let mut row = vec![Complex64::new(0.0, 0.0); nw];
            for n in first..last {
                let wt = box_weight(tgrid.point(n) - x, tol);
                if wt == 0.0 || values[n] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let fv = values[n] * wt;
                let exps = &table[n * nw..(n + 1) * nw];
                row.iter_mut().zip(exps).for_each(|(r, e)| *r += fv * e);
            }
            row
        })
        .collect();
    Ok(SampledFunction2D::from_parts(*grid, rows.concat()))
}

/// Residual of the reproducing identity `F ⊙ K = F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    /// `‖F ⊙ K − F‖₂ / ‖F‖₂`, zero for `F = 0`.
    pub residual: f64,
    pub threshold: f64,
    pub member: bool,
}

/// [`reproducing_membership_with`] at [`MEMBERSHIP_THRESHOLD`].
pub fn reproducing_membership(f: &SampledFunction2D) -> Result<Membership> {
    reproducing_membership_with(f, MEMBERSHIP_THRESHOLD)
}

pub fn reproducing_membership_with(f: &SampledFunction2D, threshold: f64) -> Result<Membership> {
    let norm = lp_norm(f, 2.0, &Weight::Const)?;
    if norm == 0.0 {
        return Ok(Membership { residual: 0.0, threshold, member: true });
    }
    let k = modulation_kernel(f.grid());
    let fk = twisted_conv(f, &k)?;
    let residual = lp_norm(&fk.sub(f)?, 2.0, &Weight::Const)? / norm;
    Ok(Membership { residual, threshold, member: residual < threshold })
}

/// Both sides of `F̂(ξ, η) = sinc(ξ) e^{2πiξη} ∫ F̂(ξ′, η) sinc(ξ′) e^{−2πiξ′η} dξ′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierIdentityReport {
    pub membership: Membership,
    /// `max |LHS − RHS| / max |LHS|` over the frequency grid.
    pub discrepancy: f64,
    /// Max deviation of `F̂(ξ, η)/F̂(0, η)` from `sinc(ξ) e^{2πiξη}` where `|F̂(0, η)| > 0.1 max|F̂|`.
    pub ratio_discrepancy: f64,
}

/// Checks the factorization of the 2D spectrum of a reproducing-subspace element.
///
/// Fails with [`Error::NotMember`] when the membership residual reaches `membership_threshold`.
pub fn lem1_fourier_identity_check(
    f: &SampledFunction2D,
    membership_threshold: f64,
) -> Result<FourierIdentityReport> {
    let membership = reproducing_membership_with(f, membership_threshold)?;
    if !membership.member {
        return Err(Error::NotMember { residual: membership.residual, threshold: membership_threshold });
    }
    let grid = f.grid();
    let (nx, ny) = (grid.x.len(), grid.omega.len());
    let spectrum = spectral::fourier_transform_2d(f);
    let xis = grid.x.frequencies();
    let etas = grid.omega.frequencies();
    let dxi = 1.0 / (nx as f64 * grid.x.spacing());
    let peak = spectrum.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(FourierIdentityReport { membership, discrepancy: 0.0, ratio_discrepancy: 0.0 });
    }
    let zero = xis.iter().position(|&xi| xi == 0.0).unwrap_or(0);
    let (mut discrepancy, mut ratio_discrepancy) = (0.0f64, 0.0f64);
    for (j, &eta) in etas.iter().enumerate() {
        let profile: Complex64 = (0..nx)
            .map(|i| {
                spectrum[i * ny + j] * Complex64::from_polar(sinc(xis[i]), -2.0 * PI * xis[i] * eta)
            })
            .sum::<Complex64>()
            * dxi;
        let reference = spectrum[zero * ny + j];
        let ratio_ok = reference.norm() > 0.1 * peak;
        for (i, &xi) in xis.iter().enumerate() {
            let factor = Complex64::from_polar(sinc(xi), 2.0 * PI * xi * eta);
            let lhs = spectrum[i * ny + j];
            discrepancy = discrepancy.max((lhs - factor * profile).norm());
            if ratio_ok {
                ratio_discrepancy = ratio_discrepancy.max((lhs / reference - factor).norm());
            }
        }
    }
    Ok(FourierIdentityReport { membership, discrepancy: discrepancy / peak, ratio_discrepancy })
}
