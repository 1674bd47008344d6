//! Annulus intersections, the circle-pair Jacobian, the triangle identity,
//! the scaling integral and restricted weak-type configurations.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::measure::{dyadic_radii, frostman_constant, riesz_energy, DiscreteMeasure, SamplingPlan};
use crate::quadrature::integrate_split;
use crate::rng::{self, Kronecker, BLOCK};
use crate::scalar::{dist, dist2, shell_volume, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annulus<T> {
    pub center: Vec<T>,
    pub radius: T,
    pub delta: T,
}

impl<T: Real> Annulus<T> {
    pub fn new(center: Vec<T>, radius: T, delta: T) -> Result<Self> {
        if center.is_empty() {
            return param("annulus centre is empty");
        }
        if !(delta > T::zero() && radius - delta > T::zero()) {
            return param(format!("need 0 < delta < r, got r = {radius}, delta = {delta}"));
        }
        Ok(Self { center, radius, delta })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn inner(&self) -> T {
        self.radius - self.delta
    }

    pub fn outer(&self) -> T {
        self.radius + self.delta
    }

    pub fn volume(&self) -> T {
        shell_volume(self.dim(), self.inner(), self.outer())
    }

    pub fn contains(&self, y: &[T]) -> bool {
        let d2 = dist2(y, &self.center);
        let (i, o) = (self.inner(), self.outer());
        d2 >= i * i && d2 <= o * o
    }
}

/// Circle-pair Jacobian `1 / (4 |y_2| |x_1 - x_2|)` of the map
/// `y -> (|y - x_1|^2, |y - x_2|^2)`, evaluated in the frame where `x_1` is
/// the origin and `x_2` lies on the positive first axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianReport<T> {
    pub value: T,
    pub frame: Frame<T>,
    /// `y` in the pin frame.
    pub y_local: [T; 2],
}

/// `local = R (p - origin)` with `R` the rotation by `-angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame<T> {
    pub origin: [T; 2],
    pub cos: T,
    pub sin: T,
}

impl<T: Real> Frame<T> {
    pub fn to_local(&self, p: [T; 2]) -> [T; 2] {
        let (dx, dy) = (p[0] - self.origin[0], p[1] - self.origin[1]);
        [self.cos * dx + self.sin * dy, -self.sin * dx + self.cos * dy]
    }
}

pub fn circle_pair_jacobian<T: Real>(x1: [T; 2], x2: [T; 2], y: [T; 2]) -> Result<JacobianReport<T>> {
    let sep = dist(&x1, &x2);
    if !(sep > T::zero()) {
        return Err(Error::Singular("pins coincide".into()));
    }
    let frame = Frame { origin: x1, cos: (x2[0] - x1[0]) / sep, sin: (x2[1] - x1[1]) / sep };
    let y_local = frame.to_local(y);
    let scale = sep.max(dist(&x1, &y));
    if y_local[1].abs() <= T::lit(1e-12) * scale {
        return Err(Error::Singular("point is collinear with the pins".into()));
    }
    Ok(JacobianReport { value: (T::lit(4.0) * y_local[1].abs() * sep).recip(), frame, y_local })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleResidual<T> {
    /// `2 delta r_1 sin(theta)`.
    pub lhs: T,
    /// `sqrt(|(r_2^2 - (r_1 - delta)^2)(r_2^2 - (r_1 + delta)^2)|)`.
    pub rhs: T,
    /// `|lhs - rhs| / max(lhs, rhs)`, zero when both vanish.
    pub residual: T,
}

/// Twice the area of the triangle with sides `r1`, `r2`, `delta`, once from
/// the law of cosines and once from the factored form.
pub fn triangle_identity_check<T: Real>(r1: T, r2: T, delta: T) -> Result<TriangleResidual<T>> {
    let tol = T::lit(1e-12) * (r1 + r2 + delta);
    if !(r1 > T::zero() && r2 > T::zero() && delta > T::zero())
        || r1 > r2 + delta + tol
        || r2 > r1 + delta + tol
        || delta > r1 + r2 + tol
    {
        return param(format!("({r1}, {r2}, {delta}) violates the triangle inequality"));
    }
    let two = T::lit(2.0);
    let cos = ((r1 * r1 + delta * delta - r2 * r2) / (two * delta * r1)).max(-T::one()).min(T::one());
    let sin = ((T::one() - cos) * (T::one() + cos)).sqrt();
    let lhs = two * delta * r1 * sin;
    let (m, p) = (r1 - delta, r1 + delta);
    let rhs = ((r2 * r2 - m * m) * (r2 * r2 - p * p)).abs().sqrt();
    let big = lhs.max(rhs);
    let residual = if big > T::zero() { (lhs - rhs).abs() / big } else { T::zero() };
    Ok(TriangleResidual { lhs, rhs, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapMethod {
    Exact2d,
    MonteCarlo,
}

/// Area of the intersection of two discs at distance `sep`; symmetric in
/// `a`, `b` to the last bit.
pub fn disc_lens<T: Real>(a: T, b: T, sep: T) -> T {
    let (a, b) = (a.min(b), a.max(b));
    if sep >= a + b {
        return T::zero();
    }
    if sep <= (a - b).abs() {
        let m = a.min(b);
        return T::PI() * m * m;
    }
    let two = T::lit(2.0);
    let ca = ((sep * sep + a * a - b * b) / (two * sep * a)).max(-T::one()).min(T::one());
    let cb = ((sep * sep + b * b - a * a) / (two * sep * b)).max(-T::one()).min(T::one());
    let k = ((-sep + a + b) * (sep + a - b) * (sep - a + b) * (sep + a + b)).max(T::zero()).sqrt();
    a * a * ca.acos() + b * b * cb.acos() - k / two
}

/// Whether the two shells can meet at all, from the range of distances
/// between the first centre and points of the second shell.
fn shells_meet<T: Real>(a1: &Annulus<T>, a2: &Annulus<T>) -> bool {
    let sep = dist(&a1.center, &a2.center);
    let near = if sep <= a2.inner() {
        a2.inner() - sep
    } else if sep <= a2.outer() {
        T::zero()
    } else {
        sep - a2.outer()
    };
    let far = sep + a2.outer();
    near <= a1.outer() && far >= a1.inner()
}

/// Volume of `a1 ∩ a2`. `Exact2d` uses disc lenses by inclusion-exclusion.
/// `MonteCarlo` samples radii of the smaller annulus; for `d <= 3` the
/// angular part is integrated in closed form about the axis through both
/// centres, otherwise directions are sampled too.
pub fn annulus_overlap<T: Real>(
    a1: &Annulus<T>,
    a2: &Annulus<T>,
    method: OverlapMethod,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    let d = a1.dim();
    if a2.dim() != d {
        return param("annuli live in different dimensions");
    }
    if !shells_meet(a1, a2) {
        return Ok(T::zero());
    }
    match method {
        OverlapMethod::Exact2d => {
            if d != 2 {
                return param("exact overlap is only available in two dimensions");
            }
            let sep = dist(&a1.center, &a2.center);
            let cross = disc_lens(a1.outer(), a2.inner(), sep) + disc_lens(a1.inner(), a2.outer(), sep);
            let v = disc_lens(a1.outer(), a2.outer(), sep) - cross + disc_lens(a1.inner(), a2.inner(), sep);
            Ok(v.max(T::zero()))
        }
        OverlapMethod::MonteCarlo => {
            if n_samples == 0 {
                return param("Monte Carlo overlap needs samples");
            }
            let (src, dst) = if a1.volume() <= a2.volume() { (a1, a2) } else { (a2, a1) };
            Ok(shell_hits(src, dst, n_samples, seed))
        }
    }
}

fn shell_hits<T: Real>(src: &Annulus<T>, dst: &Annulus<T>, n: usize, seed: u64) -> T {
    let d = src.dim();
    let sep = dist(&src.center, &dst.center);
    let (ri2, ro2) = (dst.inner() * dst.inner(), dst.outer() * dst.outer());
    let two = T::lit(2.0);
    let blocks = n.div_ceil(BLOCK);
    let sums: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut g = rng::stream(seed, b as u64);
            let count = BLOCK.min(n - b * BLOCK);
            let mut u = vec![T::zero(); d];
            let mut y = vec![T::zero(); d];
            let mut acc = T::zero();
            for _ in 0..count {
                let rho = rng::shell_radius(rng::uniform::<T, _>(&mut g), src.inner(), src.outer(), d);
                if sep == T::zero() {
                    if rho * rho >= ri2 && rho * rho <= ro2 {
                        acc = acc + T::one();
                    }
                } else if d <= 3 {
                    // |y - x_2|^2 = rho^2 + sep^2 - 2 rho sep z, decreasing in z = cos(angle to the axis)
                    let base = rho * rho + sep * sep;
                    let lo = (base - ro2) / (two * rho * sep);
                    let hi = (base - ri2) / (two * rho * sep);
                    acc = acc + polar_share(d, lo, hi);
                } else {
                    rng::direction(&mut g, &mut u);
                    for k in 0..d {
                        y[k] = src.center[k] + rho * u[k];
                    }
                    if dst.contains(&y) {
                        acc = acc + T::one();
                    }
                }
            }
            acc
        })
        .collect();
    let total = sums.into_iter().fold(T::zero(), |a, b| a + b);
    src.volume() * total / T::from_usize_lossy(n)
}

/// Probability that a uniform direction on `S^{d-1}` (`d` = 2 or 3) has
/// first coordinate in `[lo, hi]`.
fn polar_share<T: Real>(d: usize, lo: T, hi: T) -> T {
    let lo = lo.max(-T::one());
    let hi = hi.min(T::one());
    if hi <= lo {
        return T::zero();
    }
    if d == 2 {
        (lo.acos() - hi.acos()) / T::PI()
    } else {
        (hi - lo) / T::lit(2.0)
    }
}

/// `|A_1 ∩ A_2| (delta + |x_1 - x_2| + |r_1 - r_2|) / delta^2` for equal
/// half-thicknesses.
pub fn overlap_scale_ratio<T: Real>(a1: &Annulus<T>, a2: &Annulus<T>, volume: T) -> T {
    let delta = a1.delta;
    volume * (delta + dist(&a1.center, &a2.center) + (a1.radius - a2.radius).abs()) / (delta * delta)
}

/// Merges overlapping or touching closed intervals.
pub fn merge_intervals<T: Real>(intervals: &[(T, T)]) -> Vec<(T, T)> {
    let mut v: Vec<(T, T)> = intervals.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<(T, T)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `|E_1 ∩ E_2|` where `E_i = {y : |y - x_i| ∈ T_i}` and each `T_i` is a
/// union of intervals (merged first). The annuli of one family are
/// disjoint, so the volume is the sum of pairwise annulus overlaps.
pub fn radial_set_overlap<T: Real>(
    x1: &[T],
    t1: &[(T, T)],
    x2: &[T],
    t2: &[(T, T)],
    method: OverlapMethod,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    let to_annuli = |x: &[T], t: &[(T, T)]| -> Result<Vec<Annulus<T>>> {
        merge_intervals(t)
            .into_iter()
            .map(|(a, b)| Annulus::new(x.to_vec(), (a + b) / T::lit(2.0), (b - a) / T::lit(2.0)))
            .collect()
    };
    let e1 = to_annuli(x1, t1)?;
    let e2 = to_annuli(x2, t2)?;
    let mut total = T::zero();
    for (i, a) in e1.iter().enumerate() {
        for (j, b) in e2.iter().enumerate() {
            let s = rng::derive_seed(seed, (i * e2.len() + j) as u64);
            total = total + annulus_overlap(a, b, method, n_samples, s)?;
        }
    }
    Ok(total)
}

/// The bound `B^b / |x_1 - x_2|^s` a radial-set overlap is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapBound {
    pub b_exponent: f64,
    pub sep_exponent: f64,
}

impl OverlapBound {
    /// `B^{3/2} / |x_1 - x_2|^{1/2}`, the planar bound.
    pub const PLANAR: Self = Self { b_exponent: 1.5, sep_exponent: 0.5 };
    /// `B^2 / |x_1 - x_2|`, the bound for `d > 2`.
    pub const HIGH_DIM: Self = Self { b_exponent: 2.0, sep_exponent: 1.0 };

    pub fn eval(&self, b: f64, sep: f64) -> f64 {
        b.powf(self.b_exponent) / sep.powf(self.sep_exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialLayout {
    /// Second family shifted inwards by the pin separation, so matching
    /// spheres are internally tangent.
    Tangent,
    /// Both families use the same radii.
    EqualRadii,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapSweep {
    pub dim: usize,
    pub bound: OverlapBound,
    pub base_radius: f64,
    pub separations: Vec<f64>,
    pub layouts: Vec<RadialLayout>,
    /// Intervals per radial set.
    pub intervals: usize,
    /// Coarsest half-thickness; each further level halves it.
    pub delta0: f64,
    pub levels: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// Admissible growth of the max ratio from the coarsest to the finest level.
    pub max_drift: f64,
}

impl OverlapSweep {
    pub fn planar() -> Self {
        Self {
            dim: 2,
            bound: OverlapBound::PLANAR,
            base_radius: 1.0,
            separations: vec![0.25, 0.5],
            layouts: vec![RadialLayout::Tangent, RadialLayout::EqualRadii],
            intervals: 1,
            delta0: 0.01,
            levels: 4,
            n_samples: 0,
            seed: 0,
            max_drift: 2.0,
        }
    }

    pub fn high_dim() -> Self {
        Self {
            dim: 3,
            bound: OverlapBound::HIGH_DIM,
            intervals: 8,
            delta0: 0.005,
            n_samples: 50_000,
            ..Self::planar()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapPoint {
    pub layout: RadialLayout,
    pub separation: f64,
    pub delta: f64,
    pub b: f64,
    pub overlap: f64,
    pub ratio: f64,
    /// `overlap / (B log(1 + B / separation))`.
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    pub sweep: OverlapSweep,
    pub points: Vec<OverlapPoint>,
    /// Max ratio per level, coarse to fine.
    pub level_max: Vec<f64>,
    pub max_ratio: f64,
    pub drift: f64,
    pub pass: bool,
}

/// Comb of `j` intervals of length `2 delta`, pitch `4 delta`, starting at `start`.
fn comb(start: f64, delta: f64, j: usize) -> Vec<(f64, f64)> {
    (0..j).map(|m| {
        let c = start + 4.0 * delta * m as f64;
        (c - delta, c + delta)
    })
    .collect()
}

/// Radial-set overlaps over halving half-thicknesses (with `B = 2 J delta`),
/// divided by the configured bound.
pub fn overlap_bound_check(sweep: &OverlapSweep) -> Result<OverlapReport> {
    if !(sweep.dim == 2 || sweep.dim == 3) {
        return param("overlap sweeps support d = 2 and d = 3");
    }
    if sweep.levels < 2 || sweep.intervals == 0 || sweep.separations.is_empty() || sweep.layouts.is_empty() {
        return param("overlap sweep needs two levels, one interval, a separation and a layout");
    }
    if sweep.separations.iter().any(|&s| !(s > 0.0)) {
        return param("pins must be distinct");
    }
    let method = if sweep.dim == 2 { OverlapMethod::Exact2d } else { OverlapMethod::MonteCarlo };
    let mut jobs = Vec::new();
    for level in 0..sweep.levels {
        for &layout in &sweep.layouts {
            for &sep in &sweep.separations {
                jobs.push((level, layout, sep));
            }
        }
    }
    let points: Vec<OverlapPoint> = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(level, layout, sep))| {
            let delta = sweep.delta0 / f64::powi(2.0, level as i32);
            let b = 2.0 * delta * sweep.intervals as f64;
            let r = sweep.base_radius;
            let t1 = comb(r, delta, sweep.intervals);
            let t2 = match layout {
                RadialLayout::Tangent => comb(r - sep, delta, sweep.intervals),
                RadialLayout::EqualRadii => t1.clone(),
            };
            let mut x1 = vec![0.0; sweep.dim];
            let mut x2 = vec![0.0; sweep.dim];
            x1[0] = -sep / 2.0;
            x2[0] = sep / 2.0;
            let seed = rng::derive_seed(sweep.seed, idx as u64);
            let overlap = radial_set_overlap(&x1, &t1, &x2, &t2, method, sweep.n_samples, seed)?;
            Ok(OverlapPoint {
                layout,
                separation: sep,
                delta,
                b,
                overlap,
                ratio: overlap / sweep.bound.eval(b, sep),
                log_ratio: overlap / (b * (1.0 + b / sep).ln()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let level_max: Vec<f64> = (0..sweep.levels)
        .map(|l| {
            let delta = sweep.delta0 / f64::powi(2.0, l as i32);
            points.iter().filter(|p| p.delta == delta).map(|p| p.ratio).fold(0.0, f64::max)
        })
        .collect();
    let max_ratio = level_max.iter().copied().fold(0.0, f64::max);
    let drift = level_max[level_max.len() - 1] / level_max[0];
    Ok(OverlapReport {
        sweep: sweep.clone(),
        pass: level_max[0] > 0.0 && drift <= sweep.max_drift,
        points,
        level_max,
        max_ratio,
        drift,
    })
}

/// `∫ dr / sqrt|(r - a)(r - b)|` antiderivative for `a < b`, continuous
/// across both roots.
fn root_antiderivative(r: f64, a: f64, b: f64) -> f64 {
    let w = b - a;
    if r <= a {
        -((a + b - 2.0 * r) / w).max(1.0).acosh() - PI / 2.0
    } else if r >= b {
        PI / 2.0 + ((2.0 * r - a - b) / w).max(1.0).acosh()
    } else {
        ((2.0 * r - a - b) / w).clamp(-1.0, 1.0).asin()
    }
}

/// Integrand of the scaling integral for fixed `r1`, integrated over `r2 ∈ T2`.
fn inner_integral(r1: f64, t2: &[(f64, f64)]) -> f64 {
    let a = (r1 - 1.0).abs();
    let b = r1 + 1.0;
    t2.iter().map(|&(lo, hi)| root_antiderivative(hi, a, b) - root_antiderivative(lo, a, b)).sum()
}

/// `(|(r_2 - |r_1 - 1|)(r_2 - (r_1 + 1))|)^{-1/2}`.
pub fn scaling_integrand(r1: f64, r2: f64) -> f64 {
    ((r2 - (r1 - 1.0).abs()) * (r2 - (r1 + 1.0))).abs().sqrt().recip()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub value: f64,
    pub error: f64,
    pub b: f64,
    pub ratio: f64,
}

/// `∫_{T1} ∫_{T2} scaling_integrand / B^{3/2}`. The inner integral is done in
/// closed form; the outer one adaptively, split where `|r_1 - 1|` or
/// `r_1 + 1` crosses an endpoint of `T2`.
pub fn scaling_integral_check<T: Real>(t1: &[(T, T)], t2: &[(T, T)], b: T, eta: T) -> Result<ScalingReport> {
    let conv = |t: &[(T, T)]| -> Vec<(f64, f64)> {
        merge_intervals(t).into_iter().map(|(a, b)| (a.to_f64_lossy(), b.to_f64_lossy())).collect()
    };
    let (t1, t2) = (conv(t1), conv(t2));
    let (b, eta) = (b.to_f64_lossy(), eta.to_f64_lossy());
    if !(b > 0.0) {
        return param("B must be positive");
    }
    for t in [&t1, &t2] {
        let len: f64 = t.iter().map(|(a, c)| c - a).sum();
        if len < b * (1.0 - 1e-9) || len > 2.0 * b * (1.0 + 1e-9) {
            return param(format!("interval union of length {len} outside [B, 2B] for B = {b}"));
        }
        if t.iter().any(|&(a, _)| a <= eta) {
            return param(format!("intervals must lie in ({eta}, inf)"));
        }
    }
    let mut breaks = vec![1.0];
    for &(lo, hi) in &t2 {
        for e in [lo, hi] {
            breaks.extend([e + 1.0, 1.0 - e, e - 1.0]);
        }
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for &(lo, hi) in &t1 {
        let part = integrate_split(|r1| inner_integral(r1, &t2), lo, hi, &breaks, 1e-13, 1e-10, 20_000)?;
        value += part.value;
        error += part.error;
    }
    Ok(ScalingReport { value, error, b, ratio: value / b.powf(1.5) })
}

/// Which restricted weak-type estimate is being exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeakTypeCase {
    /// `mu^2 lambda(A)^{1/alpha} B^{1/2} <~ |E|`, planar, energy hypothesis.
    A,
    /// `mu^{1+2 alpha} lambda(A) B^{1-alpha} <~ |E|`, planar, ball condition.
    B,
    /// `mu^{1+alpha} lambda(A) B^{1-alpha} <~ |E|`, `d > 2`, ball condition.
    C,
}

impl WeakTypeCase {
    /// Left side of the estimate.
    pub fn lhs(&self, mu: f64, lambda_a: f64, b: f64, alpha: f64) -> f64 {
        match self {
            WeakTypeCase::A => mu.powi(2) * lambda_a.powf(1.0 / alpha) * b.sqrt(),
            WeakTypeCase::B => mu.powf(1.0 + 2.0 * alpha) * lambda_a * b.powf(1.0 - alpha),
            WeakTypeCase::C => mu.powf(1.0 + alpha) * lambda_a * b.powf(1.0 - alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeConfig {
    pub case: WeakTypeCase,
    pub alpha: f64,
    pub pin_count: usize,
    pub b: f64,
    pub mu: f64,
    /// Distance from the support's centre to the common point of all sets.
    pub focal_offset: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Energy ceiling for case `A`, ball-condition ceiling otherwise.
    pub hypothesis_ceiling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakTypeReport {
    pub config: WeakTypeConfig,
    pub hypothesis_constant: f64,
    pub pins: Vec<Vec<f64>>,
    pub lambda_a: f64,
    pub union_volume: f64,
    pub lhs: f64,
    pub ratio: f64,
}

/// Builds `E` as a union of annular sectors, one per pin, all of width `B`
/// and all passing through a common focal point, so that the spherical
/// average of `1_E` is at least `mu` on every pin's radius set. Returns the
/// estimate's left side over `|E|`.
pub fn restricted_weak_type_check<T: Real>(
    lambda: &DiscreteMeasure<T>,
    config: &WeakTypeConfig,
) -> Result<WeakTypeReport> {
    let d = lambda.dim();
    match (config.case, d) {
        (WeakTypeCase::A | WeakTypeCase::B, 2) | (WeakTypeCase::C, 3) => {}
        _ => return param(format!("case {:?} is not available in dimension {d}", config.case)),
    }
    if !(config.mu > 0.0 && config.mu <= 1.0) || !(config.b > 0.0) || config.pin_count == 0 || config.n_samples == 0 {
        return param("need 0 < mu <= 1, B > 0, pins and samples");
    }
    if config.pin_count > lambda.len() {
        return param(format!("{} pins requested from {} atoms", config.pin_count, lambda.len()));
    }
    let alpha = T::lit(config.alpha);
    let hypothesis_constant = match config.case {
        WeakTypeCase::A => {
            let floor = lambda.resolution().unwrap_or(T::zero());
            riesz_energy(lambda, alpha, floor)?.value.to_f64_lossy()
        }
        _ => {
            let lo = lambda.resolution().unwrap_or(T::lit(1e-3));
            let radii = dyadic_radii(lo, T::one());
            frostman_constant(lambda, alpha, &SamplingPlan::default(), &radii)?.constant.to_f64_lossy()
        }
    };
    if !(hypothesis_constant <= config.hypothesis_ceiling) {
        return Err(Error::Precondition {
            message: format!("{:?} hypothesis constant exceeds {}", config.case, config.hypothesis_ceiling),
            measured: hypothesis_constant,
        });
    }

    let picks = distinct_atoms(lambda, config.pin_count, config.seed)?;
    let pins: Vec<Vec<f64>> = picks.iter().map(|&i| lambda.point(i).iter().map(|c| c.to_f64_lossy()).collect()).collect();
    let lambda_a: f64 = picks.iter().map(|&i| lambda.weights()[i].to_f64_lossy()).sum();

    let (lo, hi) = lambda.bounding_box();
    let mut focal: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a.to_f64_lossy() + b.to_f64_lossy())).collect();
    focal[0] += config.focal_offset;
    let half = config.b / 2.0;
    let cos_cap = if d == 2 { (PI * config.mu).cos() } else { 1.0 - 2.0 * config.mu };
    let mut sectors = Vec::with_capacity(pins.len());
    for x in &pins {
        let rho = dist(x, &focal);
        if !(rho - half > 0.0) {
            return param("focal point too close to a pin for the requested B");
        }
        let axis: Vec<f64> = focal.iter().zip(x).map(|(f, p)| (f - p) / rho).collect();
        sectors.push(Sector { pin: x.clone(), axis, inner: rho - half, outer: rho + half, cos_cap });
    }
    let union_volume = union_volume(&sectors, &focal, config.n_samples, config.seed);
    let lhs = config.case.lhs(config.mu, lambda_a, config.b, config.alpha);
    Ok(WeakTypeReport {
        config: config.clone(),
        hypothesis_constant,
        pins,
        lambda_a,
        union_volume,
        lhs,
        ratio: if union_volume > 0.0 { lhs / union_volume } else { f64::INFINITY },
    })
}

/// `count` distinct atom indices drawn in proportion to their weights.
fn distinct_atoms<T: Real>(lambda: &DiscreteMeasure<T>, count: usize, seed: u64) -> Result<Vec<usize>> {
    use rand::distr::{weighted::WeightedIndex, Distribution};
    let w: Vec<f64> = lambda.weights().iter().map(|w| w.to_f64_lossy()).collect();
    let mut live = w.clone();
    let mut g = rng::stream(seed, 1);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dist = WeightedIndex::new(&live).map_err(|e| Error::Degenerate(format!("pin weights: {e}")))?;
        let i = dist.sample(&mut g);
        live[i] = 0.0;
        out.push(i);
    }
    Ok(out)
}

struct Sector {
    pin: Vec<f64>,
    axis: Vec<f64>,
    inner: f64,
    outer: f64,
    cos_cap: f64,
}

impl Sector {
    fn contains(&self, y: &[f64]) -> bool {
        let mut r2 = 0.0;
        let mut dot = 0.0;
        for k in 0..y.len() {
            let v = y[k] - self.pin[k];
            r2 += v * v;
            dot += v * self.axis[k];
        }
        if r2 < self.inner * self.inner || r2 > self.outer * self.outer {
            return false;
        }
        dot >= r2.sqrt() * self.cos_cap
    }

    /// Half-width of a cube about the focal point containing the sector.
    fn reach(&self) -> f64 {
        let chord = if self.cos_cap <= -1.0 { 2.0 } else { (2.0 * (1.0 - self.cos_cap)).sqrt() };
        (self.outer - self.inner) / 2.0 + self.outer * chord
    }
}

/// Quasi Monte Carlo volume of the union over a cube about `focal`.
fn union_volume(sectors: &[Sector], focal: &[f64], n: usize, seed: u64) -> f64 {
    let d = focal.len();
    let half = sectors.iter().map(Sector::reach).fold(0.0, f64::max);
    let seq = Kronecker::new(d, seed);
    let blocks = n.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut u = vec![0.0; d];
            let mut y = vec![0.0; d];
            let mut hit = 0u64;
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                seq.point(i as u64, &mut u);
                for k in 0..d {
                    y[k] = focal[k] + half * (2.0 * u[k] - 1.0);
                }
                if sectors.iter().any(|s| s.contains(&y)) {
                    hit += 1;
                }
            }
            hit
        })
        .sum();
    (2.0 * half).powi(d as i32) * hits as f64 / n as f64
}
