//! Lattices, Q-density and partitions of unity.
//!
//! In one dimension the profile is the hat `φ_τ(x) = max(0, 1 − |x|/τ)` centred at
//! `g_k = kτ`; its Fourier transform is `τ sinc²(τξ)`. In two dimensions the profile
//! is the half-open unit box on the integer lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::sinc;
use crate::sampling::{aligned_steps, Grid1D, Grid2D, SampledFunction1D};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi && lo.is_finite() && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidParameter(format!("bad interval [{lo}, {hi}]")))
        }
    }

    pub fn symmetric(r: f64) -> Self {
        Self { lo: -r, hi: r }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let eps = 1e-12 * self.width().max(1.0);
        x >= self.lo - eps && x <= self.hi + eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    /// `max(0, 1 − |x|/τ)`
    Hat,
    /// `χ_{[-1/2,1/2)}` per axis
    UnitBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PouWindow {
    Line(Grid1D),
    Plane(Grid2D),
}

/// Bump functions `φ_k = φ(· − g_k)` on a truncated lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    tau: f64,
    profile: Profile,
    /// First index and count per lattice axis.
    first: Vec<i64>,
    counts: Vec<usize>,
    window: PouWindow,
    /// Whether bumps wrap around the window period.
    periodic: bool,
}

/// Hat profile of scale `τ`.
pub fn hat(tau: f64, x: f64) -> f64 {
    (1.0 - x.abs() / tau).max(0.0)
}

/// `φ̂_τ(ξ) = τ sinc²(τξ)`.
pub fn hat_fourier(tau: f64, xi: f64) -> f64 {
    tau * sinc(tau * xi).powi(2)
}

fn unit_box(x: f64) -> f64 {
    if (-0.5..0.5).contains(&x) {
        1.0
    } else {
        0.0
    }
}

/// Hats of scale `τ` with centres `kτ` inside `window ± τ`.
pub fn make_pou_1d(tau: f64, window: &Grid1D) -> Result<PartitionOfUnity> {
    check_scale(tau, window)?;
    let lo = ((window.origin() - tau) / tau).floor() as i64 + 1;
    let hi = ((window.end() + tau) / tau).ceil() as i64 - 1;
    Ok(PartitionOfUnity {
        tau,
        profile: Profile::Hat,
        first: vec![lo],
        counts: vec![(hi - lo + 1) as usize],
        window: PouWindow::Line(*window),
        periodic: false,
    })
}

/// Hats on the window viewed as a circle of length `N·h`: one hat per lattice
/// point of one period, supports wrapping around.
pub fn make_pou_1d_periodic(tau: f64, window: &Grid1D) -> Result<PartitionOfUnity> {
    check_scale(tau, window)?;
    let period = window.period();
    let n = aligned_steps(period, tau).ok_or_else(|| {
        Error::InvalidParameter(format!("period {period} is not a multiple of tau = {tau}"))
    })?;
    let first = aligned_steps(window.origin(), tau).ok_or_else(|| {
        Error::InvalidParameter(format!("origin {} is not a multiple of tau = {tau}", window.origin()))
    })?;
    Ok(PartitionOfUnity {
        tau,
        profile: Profile::Hat,
        first: vec![first],
        counts: vec![n as usize],
        window: PouWindow::Line(*window),
        periodic: true,
    })
}

fn check_scale(tau: f64, window: &Grid1D) -> Result<()> {
    if !(tau >= 2.0 * window.spacing() * (1.0 - 1e-12)) {
        return Err(Error::ScaleTooSmall { tau, spacing: window.spacing() });
    }
    if aligned_steps(tau, window.spacing()).is_none() {
        return Err(Error::Alignment { shift: tau, spacing: window.spacing() });
    }
    Ok(())
}

/// Unit boxes on `ℤ²` covering the window.
pub fn make_pou_2d(window: &Grid2D) -> Result<PartitionOfUnity> {
    let mut first = Vec::new();
    let mut counts = Vec::new();
    for axis in [&window.x, &window.omega] {
        if aligned_steps(0.5, axis.spacing()).is_none() || axis.steps(axis.origin()).is_none() {
            return Err(Error::Alignment { shift: 0.5, spacing: axis.spacing() });
        }
        let lo = (axis.origin() + 0.5).floor() as i64;
        let hi = (axis.end() + 0.5).floor() as i64;
        first.push(lo);
        counts.push((hi - lo + 1) as usize);
    }
    Ok(PartitionOfUnity {
        tau: 1.0,
        profile: Profile::UnitBox,
        first,
        counts,
        window: PouWindow::Plane(*window),
        periodic: false,
    })
}

impl PartitionOfUnity {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn dimension(&self) -> usize {
        self.first.len()
    }

    pub fn window(&self) -> &PouWindow {
        &self.window
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn first(&self) -> &[i64] {
        &self.first
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lattice indices of a 1D family, in order.
    pub fn indices_1d(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.counts[0] as i64).map(move |i| self.first[0] + i)
    }

    /// Lattice indices of a 2D family, `k`-major.
    pub fn indices_2d(&self) -> Vec<[i64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for a in 0..self.counts[0] as i64 {
            for b in 0..self.counts[1] as i64 {
                out.push([self.first[0] + a, self.first[1] + b]);
            }
        }
        out
    }

    pub fn center(&self, k: i64) -> f64 {
        k as f64 * self.tau
    }

    /// Centres of a 1D family.
    pub fn centers_1d(&self) -> Vec<f64> {
        self.indices_1d().map(|k| self.center(k)).collect()
    }

    /// Support `g_k + [−τ, τ]` per axis.
    pub fn support(&self) -> Interval {
        match self.profile {
            Profile::Hat => Interval::symmetric(self.tau),
            Profile::UnitBox => Interval::symmetric(0.5),
        }
    }

    /// `φ_k(x)` for a 1D family, wrapped around the period if periodic.
    pub fn eval_1d(&self, k: i64, x: f64) -> f64 {
        let mut d = x - self.center(k);
        if self.periodic {
            if let PouWindow::Line(g) = self.window {
                let p = g.period();
                d = (d + 0.5 * p).rem_euclid(p) - 0.5 * p;
            }
        }
        match self.profile {
            Profile::Hat => hat(self.tau, d),
            Profile::UnitBox => unit_box(d),
        }
    }

    /// `φ_{k,l}(x, ω)` for a 2D family.
    pub fn eval_2d(&self, k: i64, l: i64, x: f64, omega: f64) -> f64 {
        unit_box(x - k as f64) * unit_box(omega - l as f64)
    }

    /// `φ_k` sampled on the 1D window.
    pub fn bump(&self, k: i64) -> Result<SampledFunction1D> {
        match self.window {
            PouWindow::Line(g) => Ok(SampledFunction1D::from_real_fn(g, |x| self.eval_1d(k, x))),
            PouWindow::Plane(_) => Err(Error::InvalidParameter("bump() needs a 1D family".into())),
        }
    }

    /// Grid-index range `[start, end)` (possibly wrapping) covered by the support of `φ_k`,
    /// as `(start, len)` with `start` possibly negative for periodic families.
    pub(crate) fn support_indices(&self, k: i64, grid: &Grid1D) -> (i64, usize) {
        let h = grid.spacing();
        let r = (self.support().hi / h).round() as i64;
        let c = ((self.center(k) - grid.origin()) / h).round() as i64;
        (c - r, (2 * r + 1) as usize)
    }
}

/// True iff every grid point of `window` lies in some `g + Q`.
pub fn q_density_check(centers: &[f64], q: Interval, window: &Grid1D) -> bool {
    let mut sorted = centers.to_vec();
    sorted.sort_by(f64::total_cmp);
    window.points().all(|x| covered(&sorted, x, q))
}

fn covered(sorted: &[f64], x: f64, q: Interval) -> bool {
    // Need a centre c with x − c ∈ [lo, hi], i.e. c ∈ [x − hi, x − lo].
    let eps = 1e-12 * q.width().max(1.0);
    let start = sorted.partition_point(|&c| c < x - q.hi - eps);
    sorted.get(start).is_some_and(|&c| c <= x - q.lo + eps)
}

/// Two-dimensional variant with a product box `Q = qx × qω`.
pub fn q_density_check_2d(centers: &[[f64; 2]], q: [Interval; 2], window: &Grid2D) -> bool {
    let mut sorted = centers.to_vec();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let eps = 1e-12;
    window.x.points().all(|x| {
        let start = sorted.partition_point(|c| c[0] < x - q[0].hi - eps);
        let end = sorted.partition_point(|c| c[0] <= x - q[0].lo + eps);
        let candidates = &sorted[start..end];
        window.omega.points().all(|w| candidates.iter().any(|c| q[1].contains(w - c[1])))
    })
}

/// Integer lattice `{kτ : lo <= k <= hi}`.
pub fn lattice_1d(tau: f64, lo: i64, hi: i64) -> Vec<f64> {
    (lo..=hi).map(|k| k as f64 * tau).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hat_profile_values() {
        let tau = 0.5;
        assert_eq!(hat(tau, 0.0), 1.0);
        assert_eq!(hat(tau, tau), 0.0);
        assert_eq!(hat(tau, -tau), 0.0);
        assert_eq!(hat_fourier(tau, 0.0), tau);
        assert!((hat_fourier(1.0, 0.5) - 4.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn hat_partition_sums_to_one_in_the_interior() {
        let window = Grid1D::symmetric(8.0, 1.0 / 64.0).unwrap();
        let pou = make_pou_1d(0.5, &window).unwrap();
        for x in window.points().filter(|x| x.abs() <= 7.5) {
            let s: f64 = pou.indices_1d().map(|k| pou.eval_1d(k, x)).sum();
            assert!((s - 1.0).abs() < 1e-12, "x = {x}");
        }
        for k in pou.indices_1d() {
            for x in window.points() {
                let v = pou.eval_1d(k, x);
                assert!((0.0..=1.0).contains(&v));
                if v > 0.0 {
                    assert!((x - pou.center(k)).abs() < 0.5);
                }
            }
        }
    }

    #[test]
    fn periodic_partition_sums_to_one_everywhere() {
        let window = Grid1D::symmetric(4.0, 1.0 / 16.0).unwrap();
        let pou = make_pou_1d_periodic(0.5, &window).unwrap();
        assert_eq!(pou.len(), 16);
        for x in window.points() {
            let s: f64 = pou.indices_1d().map(|k| pou.eval_1d(k, x)).sum();
            assert!((s - 1.0).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn scale_must_be_resolvable() {
        let window = Grid1D::symmetric(4.0, 0.25).unwrap();
        assert!(matches!(make_pou_1d(0.25, &window), Err(Error::ScaleTooSmall { .. })));
        assert!(make_pou_1d(0.5, &window).is_ok());
    }

    #[test]
    fn box_partition_in_two_dimensions() {
        let axis = Grid1D::symmetric(3.0, 1.0 / 8.0).unwrap();
        let window = Grid2D::new(axis, axis);
        let pou = make_pou_2d(&window).unwrap();
        assert_eq!(pou.eval_2d(0, 0, 0.0, 0.0), 1.0);
        assert_eq!(pou.eval_2d(0, 0, 0.75, 0.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let idx = pou.indices_2d();
        for _ in 0..100 {
            let x = rng.gen_range(-2.5..2.5);
            let w = rng.gen_range(-2.5..2.5);
            let s: f64 = idx.iter().map(|&[k, l]| pou.eval_2d(k, l, x, w)).sum();
            assert_eq!(s, 1.0);
        }
        let bad = Grid2D::new(Grid1D::symmetric(3.0, 0.3).unwrap(), axis);
        assert!(make_pou_2d(&bad).is_err());
    }

    #[test]
    fn q_density_examples() {
        let window = Grid1D::symmetric(10.0, 1.0 / 8.0).unwrap();
        let integers = lattice_1d(1.0, -11, 11);
        assert!(q_density_check(&integers, Interval::symmetric(1.0), &window));
        let evens = lattice_1d(2.0, -6, 6);
        assert!(!q_density_check(&evens, Interval::symmetric(0.5), &window));

        let axis = Grid1D::symmetric(3.0, 1.0 / 8.0).unwrap();
        let plane = Grid2D::new(axis, axis);
        let mut z2 = Vec::new();
        for k in -3..=3 {
            for l in -3..=3 {
                z2.push([k as f64, l as f64]);
            }
        }
        let q = [Interval::symmetric(0.5), Interval::symmetric(0.5)];
        assert!(q_density_check_2d(&z2, q, &plane));
        let sparse: Vec<[f64; 2]> = z2.iter().copied().filter(|c| c[0] != 1.0).collect();
        assert!(!q_density_check_2d(&sparse, q, &plane));
    }
}
