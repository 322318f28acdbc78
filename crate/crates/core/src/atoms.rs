//! Atomic decomposition in the Shannon setting: analysis by the partition of unity,
//! synthesis by lattice translates of one mother atom.
//!
//! The left inverse of `J_φ` is a Fourier multiplier, so it commutes with lattice
//! translation and every atom is a translate of `a₀ = J_φ^{-1} K`. This shortcut is
//! specific to the Shannon setting.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::diagnostics::osc_q_cyclic;
use crate::discretize::{coefficients, lattice_sum, shannon_left_inverse_at_scale, CoefficientSequence};
use crate::error::{Error, Result};
use crate::kernels::{shannon_kernel_periodic, ShannonSetting};
use crate::pou::{make_pou_1d_periodic, Interval, PartitionOfUnity, PouWindow};
use crate::sampling::{check_grid_1d, lp_norm, Grid1D, SampledFunction1D, SeminormFamily};
use crate::spectral::band_limited_family;
use crate::weights::{Weight, WeightPair};

/// Relative error accepted by [`roundtrip_random_family`].
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-2;

/// Mother atom and the lattice it is translated to.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFamily {
    pub mother: SampledFunction1D,
    pub pou: PartitionOfUnity,
    pub setting: ShannonSetting,
}

impl AtomFamily {
    pub fn grid(&self) -> &Grid1D {
        self.mother.grid()
    }

    /// Atom at lattice index `k`: the mother atom moved cyclically to `kτ`.
    pub fn atom(&self, k: i64) -> Result<SampledFunction1D> {
        let c = CoefficientSequence::unit(&self.pou, k)?;
        lattice_sum(&c, &self.mother, &self.pou)
    }
}

/// Computes `a₀ = J_φ^{-1} K` on the periodic window of `pou`.
pub fn build_atoms(setting: &ShannonSetting, pou: &PartitionOfUnity) -> Result<AtomFamily> {
    let grid = match pou.window() {
        PouWindow::Line(g) if pou.is_periodic() => *g,
        _ => return Err(Error::InvalidParameter("atoms need a periodic 1D partition".into())),
    };
    let kernel = shannon_kernel_periodic(setting, &grid);
    let mother = shannon_left_inverse_at_scale(&kernel, setting, pou.tau())?;
    Ok(AtomFamily { mother, pou: pou.clone(), setting: *setting })
}

/// `A(F) = {⟨F, φ_k⟩}`; the Shannon voice transform is the inclusion.
pub fn analyze(f: &SampledFunction1D, pou: &PartitionOfUnity) -> Result<CoefficientSequence> {
    coefficients(f, pou)
}

/// `S(c) = Σ_k c_k a₀(· − kτ)`, summed in index order for every output sample.
pub fn synthesize(c: &CoefficientSequence, atoms: &AtomFamily) -> Result<SampledFunction1D> {
    lattice_sum(c, &atoms.mother, &atoms.pou)
}

/// `‖S(A(F)) − F‖_{L_{p,m}} / ‖F‖_{L_{p,m}}` for every exponent of `family`; zero for `F = 0`.
pub fn roundtrip(f: &SampledFunction1D, atoms: &AtomFamily, family: &SeminormFamily) -> Result<Vec<f64>> {
    check_grid_1d(f.grid(), atoms.grid())?;
    let back = synthesize(&analyze(f, &atoms.pou)?, atoms)?;
    let diff = back.sub(f)?;
    family
        .exponents()
        .iter()
        .map(|&p| {
            let base = lp_norm(f, p, family.weight())?;
            Ok(if base == 0.0 { 0.0 } else { lp_norm(&diff, p, family.weight())? / base })
        })
        .collect()
}

/// Worst roundtrip errors over a seeded family of random band-limited functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub omega: f64,
    pub tau: f64,
    pub h: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub seed: u64,
    pub trials: usize,
    pub exponents: Vec<f64>,
    /// Maximum over trials, per exponent.
    pub per_p_errors: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Parameters of a random-family roundtrip run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripConfig {
    pub omega: f64,
    pub tau: f64,
    pub half_width: f64,
    pub h: f64,
    pub exponents: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for RoundtripConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            tau: 0.5,
            half_width: 64.0,
            h: 1.0 / 64.0,
            exponents: vec![1.5, 2.0, 3.0, 4.0],
            trials: 20,
            seed: 7,
        }
    }
}

pub fn roundtrip_random_family(config: &RoundtripConfig) -> Result<RoundtripReport> {
    let setting = ShannonSetting::new(config.omega)?;
    let grid = Grid1D::symmetric(config.half_width, config.h)?;
    let pou = make_pou_1d_periodic(config.tau, &grid)?;
    let atoms = build_atoms(&setting, &pou)?;
    let family = SeminormFamily::new(config.exponents.clone(), Weight::Const)?;
    let mut worst = vec![0.0f64; config.exponents.len()];
    for f in band_limited_family(&grid, config.omega, config.seed, config.trials) {
        for (w, e) in worst.iter_mut().zip(roundtrip(&f, &atoms, &family)?) {
            *w = w.max(e);
        }
    }
    Ok(RoundtripReport {
        omega: config.omega,
        tau: config.tau,
        h: config.h,
        half_width: config.half_width,
        seed: config.seed,
        trials: config.trials,
        exponents: config.exponents.clone(),
        pass: worst.iter().all(|&e| e < ROUNDTRIP_TOLERANCE),
        per_p_errors: worst,
        tolerance: ROUNDTRIP_TOLERANCE,
    })
}

/// `‖A(F)‖_{ℓ_{p,m}} / ‖F‖_{L_{p,m}}`.
pub fn analysis_ratio(f: &SampledFunction1D, pou: &PartitionOfUnity, p: f64, m: &Weight) -> Result<f64> {
    let denom = lp_norm(f, p, m)?;
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(analyze(f, pou)?.lp_norm(p, m)? / denom)
}

/// Direct synthesis norm against the oscillation majorant and its Young bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub p: f64,
    pub q: f64,
    /// Exponent applied to the kernel factor.
    pub q_kernel: f64,
    /// `‖S(c)‖_{L_{p,m}}`
    pub direct: f64,
    /// `|Q|^{-1} ‖(Σ|c_k| χ_{g_k+Q}) ∗ (osc_Q a₀ + |a₀|)‖_{L_{p,m}}`
    pub majorant: f64,
    /// `C ‖c‖_{ℓ_{q,m}} (‖osc_Q a₀‖_{L_{q′,w}} + ‖a₀‖_{L_{q′,w}})`
    pub bound: f64,
    /// `C = overlap^{1−1/q} |Q|^{1/q−1} · moderateness constant`
    pub constant: f64,
    /// Maximal number of overlapping boxes `g_k + Q`.
    pub overlap: usize,
    pub pass: bool,
}

/// Circular convolution `h Σ_j a(x_j) b(x_i − x_j)` on a window whose grid contains `0`.
fn cyclic_convolution(a: &SampledFunction1D, b: &SampledFunction1D) -> Result<SampledFunction1D> {
    let grid = *a.grid();
    let n = grid.len();
    let zero = grid.index_of(0.0).ok_or(Error::Alignment { shift: 0.0, spacing: grid.spacing() })?;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    // Index j of `fa` holds x_0 + jh, index m of `fb` holds mh; the product lands on x_0 + ih.
    let mut fa = a.values().to_vec();
    let mut fb: Vec<Complex64> = (0..n).map(|m| b.values()[(m + zero) % n]).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let scale = grid.spacing() / n as f64;
    fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= y * scale);
    inv.process(&mut fa);
    Ok(SampledFunction1D::new(grid, fa).expect("finite convolution"))
}

/// Checks `‖S(c)‖_{p,m} <= majorant <= C ‖c‖_{q,m} (‖osc_Q a₀‖_{q′,w} + ‖a₀‖_{q′,w})`
/// with `Q` the support `[−τ, τ]` of the hat and `1/p + 1 = 1/q + 1/q′`.
pub fn synthesis_bound_check(
    c: &CoefficientSequence,
    atoms: &AtomFamily,
    p: f64,
    q: f64,
    q_kernel: f64,
    pair: &WeightPair,
) -> Result<SynthesisReport> {
    if !(p >= 1.0 && q >= 1.0 && q_kernel >= 1.0) || (1.0 / p + 1.0 - 1.0 / q - 1.0 / q_kernel).abs() > 1e-12 {
        return Err(Error::ExponentRelation { p: q, q: q_kernel, r: p });
    }
    let pou = &atoms.pou;
    let grid = *atoms.grid();
    let tau = pou.tau();
    let boxq = Interval::symmetric(tau);
    let volume = boxq.width();

    let direct = lp_norm(&synthesize(c, atoms)?, p, &pair.m)?;

    let kernel_factor = osc_q_cyclic(&atoms.mother, &boxq)?;
    let kernel_factor = kernel_factor.add(&atoms.mother.map(|_, v| Complex64::new(v.norm(), 0.0)))?;
    let magnitudes = CoefficientSequence {
        values: c.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
        ..c.clone()
    };
    let tol = 1e-9 * grid.spacing();
    let indicator = SampledFunction1D::from_real_fn(grid, |x| {
        let e = x.abs() - tau;
        if e < -tol {
            1.0
        } else if e <= tol {
            0.5
        } else {
            0.0
        }
    });
    let indicator_sum = lattice_sum(&magnitudes, &indicator, pou)?;
    let majorant_fn = cyclic_convolution(&indicator_sum, &kernel_factor)?.scale(Complex64::new(1.0 / volume, 0.0));
    let majorant = lp_norm(&majorant_fn, p, &pair.m)?;

    let overlap = 2;
    let constant = (overlap as f64).powf(1.0 - 1.0 / q) * volume.powf(1.0 / q - 1.0) * pair.moderateness_constant;
    let osc_norm = lp_norm(&osc_q_cyclic(&atoms.mother, &boxq)?, q_kernel, &pair.w)?;
    let atom_norm = lp_norm(&atoms.mother, q_kernel, &pair.w)?;
    let bound = constant * c.lp_norm(q, &pair.m)? * (osc_norm + atom_norm);
    let slack = 1.0 + 1e-9;
    Ok(SynthesisReport {
        p,
        q,
        q_kernel,
        direct,
        majorant,
        bound,
        constant,
        overlap,
        pass: direct <= majorant * slack && majorant <= bound * slack,
    })
}
