use std::f64::consts::PI;

use coorbit_core::atoms::{build_atoms, roundtrip_random_family, RoundtripConfig};
use coorbit_core::convolve::{twisted_conv, weighted_young_check, YOUNG_TOLERANCE};
use coorbit_core::diagnostics::{increment_verdict, mixed_smoothness_check, osc_norm_scan, windowed_norms};
use coorbit_core::discretize::{
    injectivity_certificate_modulation, injectivity_certificate_shannon, multiplier_lt_bound,
};
use coorbit_core::kernels::{
    modulation_kernel, modulation_kernel_fourier, shannon_kernel, shannon_kernel_nth_derivative,
    shannon_kernel_value, ModulationSetting, ShannonSetting,
};
use coorbit_core::pou::{make_pou_1d_periodic, Interval};
use coorbit_core::sampling::lp_norm;
use coorbit_core::spectral::fourier_transform_2d;
use coorbit_core::voice::{lem1_fourier_identity_check, voice_modulation};
use coorbit_core::weights::{default_sample_points_1d, validate_weight_pair};
use coorbit_core::{Error, Grid1D, Grid2D, Result, SampledFunction1D, SampledFunction2D, SeminormFamily, Weight};
use serde_json::{json, to_value};

use crate::args::{
    DerivativeArgs, InjectivityArgs, ModulationArgs, MultiplierArgs, OscArgs, OscTarget, RoundtripArgs,
    SettingKind, YoungArgs,
};
use crate::report::{Report, Table};

fn value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    to_value(v).expect("report types are serializable")
}

fn e(v: f64) -> String {
    format!("{v:e}")
}

fn parse_weight(text: &str) -> Result<Weight> {
    text.parse()
}

pub fn shannon_roundtrip(args: &RoundtripArgs) -> Result<Report> {
    let config = RoundtripConfig {
        omega: args.omega,
        tau: args.tau,
        half_width: args.half_width,
        h: args.spacing,
        exponents: args.p_list.clone(),
        trials: args.trials,
        seed: args.seed,
    };
    let report = roundtrip_random_family(&config)?;
    let mut table = Table::new(&["p", "max_relative_error", "tolerance", "pass"]);
    for (p, err) in report.exponents.iter().zip(&report.per_p_errors) {
        table.push(vec![p.to_string(), e(*err), e(report.tolerance), (*err < report.tolerance).to_string()]);
    }
    Ok(Report { results: value(&report), table, pass: report.pass })
}

pub fn young_check(args: &YoungArgs) -> Result<Report> {
    let w = parse_weight(&args.weights)?;
    let m = parse_weight(args.moderate.as_deref().unwrap_or(&args.weights))?;
    let pair = validate_weight_pair(w, m, &default_sample_points_1d(16.0))?;
    let grid = Grid1D::symmetric(16.0, 1.0 / 32.0)?;
    let kernel = shannon_kernel(&ShannonSetting::new(1.0)?, &grid);
    let boxf = SampledFunction1D::from_real_fn(grid, |x| if x.abs() <= 0.5 { 1.0 } else { 0.0 });
    let gauss = SampledFunction1D::from_real_fn(grid, |x| (-PI * x * x).exp());
    let hat = SampledFunction1D::from_real_fn(grid, |x| (1.0 - x.abs()).max(0.0));
    let expo = SampledFunction1D::from_real_fn(grid, |x| (-x.abs()).exp());
    let pairs = [
        ("box*box", &boxf, &boxf),
        ("gauss*box", &gauss, &boxf),
        ("gauss*hat", &gauss, &hat),
        ("hat*box", &hat, &boxf),
        ("gauss*gauss", &gauss, &gauss),
        ("exp*exp", &expo, &expo),
        ("K*gauss", &kernel, &gauss),
    ];
    let mut table = Table::new(&["pair", "p", "q", "r", "ratio", "constant", "pass"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for (name, h, f) in pairs {
        let rep = weighted_young_check(h, f, args.p, args.q, args.r, &pair, YOUNG_TOLERANCE)?;
        pass &= rep.pass;
        table.push(vec![
            name.into(),
            rep.p.to_string(),
            rep.q.to_string(),
            rep.r.to_string(),
            e(rep.ratio),
            e(rep.constant),
            rep.pass.to_string(),
        ]);
        rows.push(json!({"pair": name, "report": value(&rep)}));
    }
    let results = json!({"weights": value(&pair), "tolerance": YOUNG_TOLERANCE, "pairs": rows});
    Ok(Report { results, table, pass })
}

pub fn osc_report(args: &OscArgs) -> Result<Report> {
    if !(args.q > 0.0) {
        return Err(Error::InvalidParameter(format!("Q half width must be positive, got {}", args.q)));
    }
    let weight = parse_weight(&args.weight)?;
    let setting = ShannonSetting::new(args.omega)?;
    let widest = args.windows.iter().copied().fold(0.0, f64::max);
    let half_width = widest + args.q.ceil() + 1.0;
    let grid = Grid1D::symmetric(half_width, args.spacing)?;
    let target = match args.target {
        OscTarget::K => shannon_kernel(&setting, &grid),
        OscTarget::Atom => build_atoms(&setting, &make_pou_1d_periodic(setting.tau(), &grid)?)?.mother,
    };
    let q = Interval::symmetric(args.q);
    let rep = osc_norm_scan(&target, &q, &args.p_list, &weight, &args.windows)?;
    let pass = rep.exponents.iter().zip(&rep.finite).all(|(&p, &finite)| p <= 1.0 || finite);
    let mut table = Table::new(&["p", "L", "norm", "verdict"]);
    for (a, p) in rep.exponents.iter().enumerate() {
        let verdict = if rep.finite[a] { "finite" } else { "not-finite" };
        for (b, l) in rep.windows.iter().enumerate() {
            table.push(vec![p.to_string(), l.to_string(), e(rep.norms[a][b]), verdict.into()]);
        }
    }
    let results = json!({"target": args.target, "grid_half_width": half_width, "scan": value(&rep)});
    Ok(Report { results, table, pass })
}

pub fn injectivity(args: &InjectivityArgs) -> Result<Report> {
    let mut table = Table::new(&["setting", "tau", "R", "d", "rows", "sigma_min", "sigma_max"]);
    let mut row = |c: &coorbit_core::discretize::InjectivityCertificate| {
        table.push(vec![
            c.setting.clone(),
            c.tau.to_string(),
            c.radius.to_string(),
            c.d.to_string(),
            c.rows.to_string(),
            e(c.sigma_min),
            e(c.sigma_max),
        ]);
    };
    let (results, pass) = match args.setting {
        SettingKind::Shannon => {
            let setting = ShannonSetting::new(args.omega)?;
            let radius = args.radius.unwrap_or(128) as usize;
            let band_dim = args.band_dim.unwrap_or(64);
            let tau = args.tau.unwrap_or(setting.tau());
            let cert = injectivity_certificate_shannon(&setting, tau, band_dim, radius)?;
            let baseline = injectivity_certificate_shannon(&setting, setting.tau(), band_dim, radius)?;
            row(&cert);
            row(&baseline);
            let relative = cert.sigma_min / baseline.sigma_min;
            let results = json!({
                "certificate": value(&cert),
                "baseline": value(&baseline),
                "relative_sigma_min": relative,
            });
            (results, cert.sigma_min > 0.0)
        }
        SettingKind::Modulation => {
            if args.tau.is_some() {
                return Err(Error::InvalidParameter("--tau applies to the shannon setting only".into()));
            }
            let setting = ModulationSetting::new(args.radius.unwrap_or(4))?;
            let band_dim = args.band_dim.unwrap_or(25);
            let side = (band_dim as f64).sqrt().ceil() as usize;
            let cert = injectivity_certificate_modulation(&setting, side, args.basis_step, args.quadrature)?;
            row(&cert);
            let pass = cert.sigma_min > 0.0 && cert.d >= band_dim;
            (json!({"certificate": value(&cert)}), pass)
        }
    };
    Ok(Report { results, table, pass })
}

pub fn multiplier_bound(args: &MultiplierArgs) -> Result<Report> {
    let setting = ShannonSetting::new(args.omega)?;
    let mut table = Table::new(&["t", "numeric", "analytic_bound", "rederived_bound", "pass"]);
    let mut reports = Vec::new();
    for &t in &args.t_list {
        let rep = multiplier_lt_bound(t, args.epsilon, &setting)?;
        table.push(vec![t.to_string(), e(rep.numeric), e(rep.analytic_bound), e(rep.rederived_bound), rep.pass.to_string()]);
        reports.push(rep);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(Report { results: json!({"bounds": value(&reports)}), table, pass })
}

fn rel_l2_2d(a: &SampledFunction2D, reference: &SampledFunction2D) -> Result<f64> {
    Ok(lp_norm(&a.sub(reference)?, 2.0, &Weight::Const)? / lp_norm(reference, 2.0, &Weight::Const)?)
}

pub fn modulation_suite(args: &ModulationArgs) -> Result<Report> {
    let grid = Grid2D::new(Grid1D::symmetric(2.0, 1.0 / 64.0)?, Grid1D::symmetric(16.0, 1.0 / 16.0)?);
    let k = modulation_kernel(&grid);

    // The sampled spectrum has a jump at |η| = 1/2; cells within 1/8 of it are reported separately.
    let spectrum = fourier_transform_2d(&k);
    let (xis, etas) = (grid.x.frequencies(), grid.omega.frequencies());
    let (mut spectrum_err, mut spectrum_err_full) = (0.0f64, 0.0f64);
    for (i, &xi) in xis.iter().enumerate() {
        for (j, &eta) in etas.iter().enumerate() {
            let err = (spectrum[i * etas.len() + j] - modulation_kernel_fourier(xi, eta)).norm();
            spectrum_err_full = spectrum_err_full.max(err);
            if (eta.abs() - 0.5).abs() >= 0.125 {
                spectrum_err = spectrum_err.max(err);
            }
        }
    }

    let h = grid.x.spacing();
    let tgrid = Grid1D::new(grid.x.origin() + 0.5 * h, h, grid.x.len())?;
    let window = SampledFunction1D::from_real_fn(tgrid, |t| if t.abs() < 0.5 { 1.0 } else { 0.0 });
    let voice_err = rel_l2_2d(&voice_modulation(&window, &grid)?, &k)?;
    let reproducing_err = rel_l2_2d(&twisted_conv(&k, &k)?, &k)?;
    let identity = lem1_fourier_identity_check(&k, args.membership)?;
    let family = SeminormFamily::new(vec![1.5, 2.0, 4.0], Weight::Const)?;
    let mixed = mixed_smoothness_check(&k, &family, args.membership)?;

    let checks = [
        ("kernel_spectrum", spectrum_err, args.spectrum_tolerance),
        ("voice_of_window", voice_err, args.tolerance),
        ("reproducing_identity", reproducing_err, args.tolerance),
        ("fourier_identity", identity.discrepancy, args.tolerance),
    ];
    let mut table = Table::new(&["check", "value", "tolerance", "pass"]);
    for (name, v, tol) in checks {
        table.push(vec![name.into(), e(v), e(tol), (v < tol).to_string()]);
    }
    table.push(vec!["mixed_norms_finite".into(), mixed.finite.iter().all(|&f| f).to_string(), String::new(), mixed.finite.iter().all(|&f| f).to_string()]);
    let pass = checks.iter().all(|(_, v, tol)| v < tol) && mixed.finite.iter().all(|&f| f);
    let results = json!({
        "grid": value(&grid),
        "kernel_spectrum_error": spectrum_err,
        "kernel_spectrum_error_unrestricted": spectrum_err_full,
        "voice_of_window_error": voice_err,
        "reproducing_identity_error": reproducing_err,
        "fourier_identity": value(&identity),
        "mixed_smoothness": value(&mixed),
    });
    Ok(Report { results, table, pass })
}

/// Fourth-order Richardson extrapolation of the central difference of `f` at `x`.
fn richardson(f: impl Fn(f64) -> f64, x: f64, step: f64) -> f64 {
    let d = |s: f64| (f(x + s) - f(x - s)) / (2.0 * s);
    (4.0 * d(0.5 * step) - d(step)) / 3.0
}

pub fn derivative_check(args: &DerivativeArgs) -> Result<Report> {
    if args.points < 2 || !(args.lo < args.hi) || args.n_max == 0 {
        return Err(Error::InvalidParameter("need n-max >= 1, points >= 2 and lo < hi".into()));
    }
    let setting = ShannonSetting::new(args.omega)?;
    let points: Vec<f64> =
        (0..args.points).map(|i| args.lo + (args.hi - args.lo) * i as f64 / (args.points - 1) as f64).collect();
    let step = 1e-3 / args.omega;
    let grid = Grid1D::symmetric(256.0, 1.0 / 16.0)?;
    let exponents = [1.5, 2.0, 4.0];
    let windows = [16.0, 64.0, 256.0];

    let mut table = Table::new(&["n", "max_relative_error", "window_norms_decay"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 0..=args.n_max {
        let worst = points
            .iter()
            .map(|&x| {
                let exact = shannon_kernel_nth_derivative(&setting, n, x);
                let reference = if n == 0 {
                    shannon_kernel_value(&setting, x)
                } else {
                    richardson(|y| shannon_kernel_nth_derivative(&setting, n - 1, y), x, step)
                };
                (reference - exact).abs() / exact.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
        let f = SampledFunction1D::from_real_fn(grid, |x| shannon_kernel_nth_derivative(&setting, n, x));
        let (norms, finite) = windowed_norms(&f, &exponents, &Weight::Const, &windows)?;
        let decays = finite.iter().all(|&v| v) && norms.iter().all(|row| increment_verdict(row));
        pass &= worst < args.tolerance && decays;
        table.push(vec![n.to_string(), e(worst), decays.to_string()]);
        rows.push(json!({
            "n": n,
            "max_relative_error": worst,
            "exponents": exponents,
            "windows": windows,
            "norms": norms,
            "decays": decays,
        }));
    }
    let results = json!({"points": points, "finite_difference_step": step, "derivatives": rows});
    Ok(Report { results, table, pass })
}
