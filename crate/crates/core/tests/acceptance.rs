use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use coorbit_core::atoms::{roundtrip_random_family, RoundtripConfig};
use coorbit_core::convolve::{conv1d, twisted_conv, weighted_young_check, YOUNG_TOLERANCE};
use coorbit_core::diagnostics::{increment_verdict, osc_norm_scan, windowed_norms, DEFAULT_WINDOWS};
use coorbit_core::discretize::{
    coefficients_spectral, injectivity_certificate_modulation, injectivity_certificate_shannon,
    j_phi_apply, j_phi_closed_form, multiplier_lt_bound, shannon_left_inverse,
};
use coorbit_core::kernels::{
    modulation_kernel, modulation_kernel_fourier, shannon_kernel, shannon_kernel_nth_derivative,
    shannon_kernel_periodic, shannon_kernel_value, ModulationSetting, ShannonSetting,
};
use coorbit_core::pou::{make_pou_1d_periodic, Interval};
use coorbit_core::sampling::lp_norm;
use coorbit_core::spectral::{band_limited_family, fourier_transform, fourier_transform_2d};
use coorbit_core::voice::{lem1_fourier_identity_check, reproducing_membership_with, voice_modulation};
use coorbit_core::weights::{default_sample_points_1d, validate_weight_pair};
use coorbit_core::{Complex64, Grid1D, Grid2D, SampledFunction1D, SampledFunction2D, Weight};

const FAMILY_SEED: u64 = 2024;
const FAMILY_SIZE: usize = 20;
const MODULATION_MEMBERSHIP: f64 = 2e-2;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn rel_l2(a: &SampledFunction1D, reference: &SampledFunction1D) -> f64 {
    let diff = a.sub(reference).unwrap();
    lp_norm(&diff, 2.0, &Weight::Const).unwrap() / lp_norm(reference, 2.0, &Weight::Const).unwrap()
}

fn rel_l2_2d(a: &SampledFunction2D, reference: &SampledFunction2D) -> f64 {
    let diff = a.sub(reference).unwrap();
    lp_norm(&diff, 2.0, &Weight::Const).unwrap() / lp_norm(reference, 2.0, &Weight::Const).unwrap()
}

fn sci(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Periodic kernel followed by the seeded random band-limited family on `[−64, 64)`, `h = 1/64`.
fn shannon_family(setting: &ShannonSetting) -> (Grid1D, Vec<SampledFunction1D>) {
    let grid = Grid1D::symmetric(64.0, 1.0 / 64.0).unwrap();
    let mut family = vec![shannon_kernel_periodic(setting, &grid)];
    family.extend(band_limited_family(&grid, setting.omega(), FAMILY_SEED, FAMILY_SIZE));
    (grid, family)
}

fn reproducing_identity() -> Outcome {
    let (err, elapsed) = timed(|| {
        let s = ShannonSetting::new(1.0).unwrap();
        let grid = Grid1D::symmetric(64.0, 1.0 / 64.0).unwrap();
        let k = shannon_kernel(&s, &grid);
        let kk = conv1d(&k, &k).unwrap();
        rel_l2(&kk.restrict(-16.0, 16.0), &k.restrict(-16.0, 16.0))
    });
    let pass = err < 5e-3 && elapsed < Duration::from_secs(1);
    Outcome::new(pass, format!("‖K∗K − K‖/‖K‖ on [−16, 16] = {err:.3e} (< 5e-3), {elapsed:.2?} (< 1 s)"))
}

fn j_phi_against(factor_of_omega: f64) -> (f64, Duration) {
    let s = ShannonSetting::new(1.0).unwrap();
    timed(|| {
        let (grid, family) = shannon_family(&s);
        let pou = make_pou_1d_periodic(s.tau(), &grid).unwrap();
        let kernel = shannon_kernel_periodic(&s, &grid);
        family
            .iter()
            .map(|f| {
                let lattice = j_phi_apply(f, &pou, &kernel).unwrap();
                let closed = j_phi_closed_form(f, s.tau(), factor_of_omega * s.omega());
                rel_l2(&lattice, &closed)
            })
            .fold(0.0, f64::max)
    })
}

fn j_phi_closed_form_stated() -> Outcome {
    let (err, elapsed) = j_phi_against(4.0);
    let pass = err < 1e-3 && elapsed < Duration::from_secs(5);
    Outcome::new(pass, format!("max ‖J_φF − 4ω(F∗φ)‖/‖·‖ over K + {FAMILY_SIZE} random = {err:.3e} (< 1e-3), {elapsed:.2?}"))
}

fn j_phi_closed_form_corrected() -> String {
    let (err, elapsed) = j_phi_against(2.0);
    format!("max ‖J_φF − 2ω(F∗φ)‖/‖·‖ over the same family = {err:.3e}, {elapsed:.2?}")
}

fn left_inverse() -> Outcome {
    let s = ShannonSetting::new(1.0).unwrap();
    let (grid, family) = shannon_family(&s);
    let pou = make_pou_1d_periodic(s.tau(), &grid).unwrap();
    let kernel = shannon_kernel_periodic(&s, &grid);
    let err = family
        .iter()
        .map(|f| {
            let j = j_phi_apply(f, &pou, &kernel).unwrap();
            rel_l2(&shannon_left_inverse(&j, &s).unwrap(), f)
        })
        .fold(0.0, f64::max);
    Outcome::new(err < 1e-3, format!("max ‖J_φ⁻¹J_φF − F‖/‖F‖ = {err:.3e} (< 1e-3)"))
}

fn roundtrip() -> Outcome {
    let config = RoundtripConfig { trials: FAMILY_SIZE, seed: FAMILY_SEED, ..Default::default() };
    let (report, elapsed) = timed(|| roundtrip_random_family(&config).unwrap());
    let worst = report.per_p_errors.iter().copied().fold(0.0, f64::max);
    let pass = report.pass && elapsed < Duration::from_secs(30);
    Outcome::new(
        pass,
        format!("p = {:?}: errors [{}], max {worst:.3e} (< 1e-2), {elapsed:.2?} (< 30 s)", report.exponents, sci(&report.per_p_errors)),
    )
}

/// `F̃(x) = Σ_m F̂(ξ_m) sinc²(ξ_m / (2ω)) e^{2πiξ_m x} Δξ` evaluated pointwise.
fn smoothed_at(spectrum: &[Complex64], freqs: &[f64], dxi: f64, omega: f64, x: f64) -> Complex64 {
    spectrum
        .iter()
        .zip(freqs)
        .map(|(v, &xi)| {
            let s = coorbit_core::kernels::sinc(xi / (2.0 * omega));
            v * s * s * Complex64::from_polar(1.0, 2.0 * PI * xi * x)
        })
        .sum::<Complex64>()
        * dxi
}

fn coefficient_sampling() -> Outcome {
    let s = ShannonSetting::new(1.0).unwrap();
    let w = s.omega();
    let (grid, family) = shannon_family(&s);
    let pou = make_pou_1d_periodic(s.tau(), &grid).unwrap();
    let freqs = grid.frequencies();
    let dxi = 1.0 / grid.period();
    let mut worst = 0.0f64;
    for f in &family {
        let c = coefficients_spectral(f, &pou).unwrap();
        let spectrum = fourier_transform(f);
        let norm = lp_norm(f, 2.0, &Weight::Const).unwrap();
        for (k, ck) in pou.indices_1d().zip(&c.values) {
            let x = k as f64 / (2.0 * w);
            let err = (2.0 * w * ck - smoothed_at(&spectrum, &freqs, dxi, w, x)).norm() / norm;
            worst = worst.max(err);
        }
    }
    Outcome::new(worst < 1e-6, format!("max_k |2ω⟨F, φ_k⟩ − F̃(k/2ω)| / ‖F‖₂ = {worst:.3e} (< 1e-6)"))
}

fn weighted_young() -> Outcome {
    let grid = Grid1D::symmetric(16.0, 1.0 / 32.0).unwrap();
    let s = ShannonSetting::new(1.0).unwrap();
    let boxf = SampledFunction1D::from_real_fn(grid, |x| if x.abs() <= 0.5 { 1.0 } else { 0.0 });
    let gauss = SampledFunction1D::from_real_fn(grid, |x| (-PI * x * x).exp());
    let hat = SampledFunction1D::from_real_fn(grid, |x| (1.0 - x.abs()).max(0.0));
    let expo = SampledFunction1D::from_real_fn(grid, |x| (-x.abs()).exp());
    let kernel = shannon_kernel(&s, &grid);
    let points = default_sample_points_1d(16.0);
    let pair = |w: &str, m: &str| validate_weight_pair(w.parse().unwrap(), m.parse().unwrap(), &points).unwrap();
    let cases = [
        ("box∗box", &boxf, &boxf, 1.0, 1.0, 1.0, pair("const", "const")),
        ("gauss∗box", &gauss, &boxf, 2.0, 1.0, 2.0, pair("const", "const")),
        ("K∗gauss", &kernel, &gauss, 4.0 / 3.0, 4.0 / 3.0, 2.0, pair("const", "const")),
        ("gauss∗hat", &gauss, &hat, 2.0, 2.0, f64::INFINITY, pair("const", "const")),
        ("gauss∗gauss", &gauss, &gauss, 1.5, 1.5, 3.0, pair("poly:0.5", "poly:0.5")),
        ("hat∗box", &hat, &boxf, 2.0, 1.0, 2.0, pair("poly:1", "poly:0.5")),
        ("K∗gauss", &kernel, &gauss, 1.5, 1.5, 3.0, pair("log", "log")),
        ("gauss∗hat", &gauss, &hat, 1.0, 2.0, 2.0, pair("log", "log")),
        ("box∗exp", &boxf, &expo, 1.2, 1.5, 2.0, pair("exp:0.5", "exp:0.5")),
        ("exp∗exp", &expo, &expo, 1.25, 1.25, 5.0 / 3.0, pair("exp:0.25", "const")),
    ];
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (name, h, f, p, q, r, pair) in cases {
        let rep = weighted_young_check(h, f, p, q, r, &pair, YOUNG_TOLERANCE).unwrap();
        let ok = rep.ratio <= pair.moderateness_constant * 1.05;
        if !ok {
            println!("    {name} (p, q, r) = ({p}, {q}, {r}), w = {}, m = {}: ratio {:.4}", pair.w, pair.m, rep.ratio);
        }
        pass &= ok;
        worst = worst.max(rep.ratio / pair.moderateness_constant);
    }
    Outcome::new(pass, format!("10 presets, max ratio / moderateness constant = {worst:.4} (≤ 1.05)"))
}

/// Fourth-order Richardson extrapolation of the central difference of `f` at `x`.
fn richardson(f: impl Fn(f64) -> f64, x: f64, e: f64) -> f64 {
    let d = |e: f64| (f(x + e) - f(x - e)) / (2.0 * e);
    (4.0 * d(0.5 * e) - d(e)) / 3.0
}

fn derivative_closed_forms() -> Outcome {
    let s = ShannonSetting::new(1.0).unwrap();
    let points: Vec<f64> = (0..50).map(|i| 0.1 + 19.9 * i as f64 / 49.0).collect();
    let mut worst = 0.0f64;
    for &x in &points {
        let zero = (shannon_kernel_nth_derivative(&s, 0, x) - shannon_kernel_value(&s, x)).abs();
        worst = worst.max(zero / shannon_kernel_value(&s, x).abs());
        for n in 1..=3 {
            let exact = shannon_kernel_nth_derivative(&s, n, x);
            let fd = richardson(|y| shannon_kernel_nth_derivative(&s, n - 1, y), x, 1e-3);
            worst = worst.max((fd - exact).abs() / exact.abs());
        }
    }
    let grid = Grid1D::symmetric(256.0, 1.0 / 16.0).unwrap();
    let mut decays = true;
    let mut lines = Vec::new();
    for n in 0..=3 {
        let f = SampledFunction1D::from_real_fn(grid, |x| shannon_kernel_nth_derivative(&s, n, x));
        let (norms, finite) = windowed_norms(&f, &[1.5, 2.0, 4.0], &Weight::Const, &DEFAULT_WINDOWS).unwrap();
        decays &= finite.iter().all(|&v| v) && norms.iter().all(|row| increment_verdict(row));
        lines.push(format!("n={n}: {finite:?}"));
    }
    Outcome::new(
        worst < 1e-6 && decays,
        format!("max relative FD error {worst:.3e} (< 1e-6); window increments decay for p ∈ {{1.5, 2, 4}}: {}", lines.join(", ")),
    )
}

fn multiplier_bound() -> Outcome {
    let s = ShannonSetting::new(1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [1.5, 2.0, 3.0] {
        let rep = multiplier_lt_bound(t, 0.1, &s).unwrap();
        pass &= rep.pass;
        parts.push(format!("t={t}: {:.4e} ≤ {:.4e}", rep.numeric, rep.analytic_bound));
    }
    Outcome::new(pass, parts.join("; "))
}

fn oscillation_separation() -> Outcome {
    let s = ShannonSetting::new(1.0).unwrap();
    let grid = Grid1D::symmetric(258.0, 1.0 / 8.0).unwrap();
    let k = shannon_kernel(&s, &grid);
    let exps = [1.0, 1.5, 2.0, 4.0];
    let rep = osc_norm_scan(&k, &Interval::symmetric(1.0), &exps, &Weight::Const, &DEFAULT_WINDOWS).unwrap();
    let pass = rep.finite == [false, true, true, true];
    Outcome::new(pass, format!("verdicts for p = {exps:?} on L = {:?}: {:?} (expected [false, true, true, true])", rep.windows, rep.finite))
}

fn modulation_suite() -> Outcome {
    let ((kernel_err, full_err, voice_err, kk, lem1), elapsed) = timed(|| {
        let grid = Grid2D::new(Grid1D::symmetric(2.0, 1.0 / 64.0).unwrap(), Grid1D::symmetric(16.0, 1.0 / 16.0).unwrap());
        let k = modulation_kernel(&grid);

        let spectrum = fourier_transform_2d(&k);
        let (xis, etas) = (grid.x.frequencies(), grid.omega.frequencies());
        let (mut kernel_err, mut full_err) = (0.0f64, 0.0f64);
        for (i, &xi) in xis.iter().enumerate() {
            for (j, &eta) in etas.iter().enumerate() {
                let e = (spectrum[i * etas.len() + j] - modulation_kernel_fourier(xi, eta)).norm();
                full_err = full_err.max(e);
                if (eta.abs() - 0.5).abs() >= 0.125 {
                    kernel_err = kernel_err.max(e);
                }
            }
        }

        let h = grid.x.spacing();
        let tgrid = Grid1D::new(-2.0 + 0.5 * h, h, grid.x.len()).unwrap();
        let g = SampledFunction1D::from_real_fn(tgrid, |t| if t.abs() < 0.5 { 1.0 } else { 0.0 });
        let voice_err = rel_l2_2d(&voice_modulation(&g, &grid).unwrap(), &k);

        let kk = rel_l2_2d(&twisted_conv(&k, &k).unwrap(), &k);
        let lem1 = lem1_fourier_identity_check(&k, MODULATION_MEMBERSHIP).unwrap().discrepancy;
        (kernel_err, full_err, voice_err, kk, lem1)
    });
    let pass = kernel_err < 0.03 && voice_err < 2e-2 && kk < 2e-2 && lem1 < 2e-2 && elapsed < Duration::from_secs(60);
    Outcome::new(
        pass,
        format!(
            "FFT vs closed form {kernel_err:.3e} (< 0.03, ||η| − ½| ≥ ⅛; unrestricted {full_err:.3e}); U_g g {voice_err:.3e}; K⊙K {kk:.3e}; Fourier identity {lem1:.3e} (each < 2e-2); {elapsed:.2?} (< 60 s)"
        ),
    )
}

fn injectivity() -> Outcome {
    let s = ShannonSetting::new(1.0).unwrap();
    let fine = injectivity_certificate_shannon(&s, 0.5, 64, 128).unwrap();
    let coarse = injectivity_certificate_shannon(&s, 1.0, 64, 128).unwrap();
    let modulation = injectivity_certificate_modulation(&ModulationSetting::new(4).unwrap(), 5, 0.5, 32).unwrap();
    let pass = fine.sigma_min > 0.0 && coarse.sigma_min < fine.sigma_min && modulation.sigma_min > 0.0 && modulation.d >= 25;
    Outcome::new(
        pass,
        format!(
            "Shannon σ_min(τ=½) = {:.3e}, σ_min(τ=1) = {:.3e}; modulation σ_min(R=4, d={}) = {:.3e}",
            fine.sigma_min, coarse.sigma_min, modulation.d, modulation.sigma_min
        ),
    )
}

fn determinism() -> Outcome {
    let config = RoundtripConfig { trials: 4, ..Default::default() };
    let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = serde_json::to_string(&roundtrip_random_family(&config).unwrap()).unwrap();
    let b = serial_pool.install(|| serde_json::to_string(&roundtrip_random_family(&config).unwrap()).unwrap());
    let s = ShannonSetting::new(1.0).unwrap();
    let c1 = serde_json::to_string(&injectivity_certificate_shannon(&s, 0.5, 64, 128).unwrap()).unwrap();
    let c2 = serial_pool.install(|| serde_json::to_string(&injectivity_certificate_shannon(&s, 0.5, 64, 128).unwrap()).unwrap());
    let grid = Grid2D::new(Grid1D::symmetric(1.0, 1.0 / 32.0).unwrap(), Grid1D::symmetric(8.0, 1.0 / 8.0).unwrap());
    let k = modulation_kernel(&grid);
    let m1 = serde_json::to_string(&reproducing_membership_with(&k, MODULATION_MEMBERSHIP).unwrap()).unwrap();
    let m2 = serial_pool.install(|| serde_json::to_string(&reproducing_membership_with(&k, MODULATION_MEMBERSHIP).unwrap()).unwrap());
    let pass = a == b && c1 == c2 && m1 == m2;
    Outcome::new(pass, format!("roundtrip, certificate and membership reports identical across thread counts: {pass}"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("reproducing identity K∗K = K", reproducing_identity),
        ("J_φ closed form (4ω as stated)", j_phi_closed_form_stated),
        ("left inverse", left_inverse),
        ("atomic decomposition roundtrip", roundtrip),
        ("coefficient sampling identity", coefficient_sampling),
        ("weighted Young", weighted_young),
        ("kernel derivative closed forms", derivative_closed_forms),
        ("multiplier L_t bound", multiplier_bound),
        ("oscillation scale separation", oscillation_separation),
        ("modulation kernel suite", modulation_suite),
        ("injectivity certificates", injectivity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {}", i + 1, outcome.detail);
        if i == 1 {
            println!("INFO [ 2] J_φ closed form (2ω, corrected constant): {}", j_phi_closed_form_corrected());
        }
        failed += usize::from(!outcome.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
