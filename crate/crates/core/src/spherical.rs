//! Spherical averages `Sf(x, r)` over thickened spheres, the restricted
//! maximal function, and mixed `L^q(d lambda; L^s(dr))` norms.
//!
//! The sphere measure is normalised to total mass one, and every average is
//! taken over the annulus `r - delta <= |y - x| <= r + delta`.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::rng;
use crate::scalar::{dist, dist2, shell_volume, Real};

/// Uniform midpoint grid `r_k = r0 + (k + 1/2) dr`, `dr = (r1 - r0) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid<T> {
    pub r0: T,
    pub r1: T,
    pub n: usize,
}

impl<T: Real> RadiusGrid<T> {
    pub fn new(r0: T, r1: T, n: usize) -> Result<Self> {
        if !(r0 > T::zero() && r0 < r1) {
            return param(format!("need 0 < r0 < R0, got [{r0}, {r1}]"));
        }
        if n < 2 {
            return param("radius grid needs at least two radii");
        }
        Ok(Self { r0, r1, n })
    }

    pub fn step(&self) -> T {
        (self.r1 - self.r0) / T::from_usize_lossy(self.n)
    }

    pub fn radius(&self, k: usize) -> T {
        self.r0 + (T::from_usize_lossy(k) + T::lit(0.5)) * self.step()
    }

    pub fn radii(&self) -> Vec<T> {
        (0..self.n).map(|k| self.radius(k)).collect()
    }

    /// `max(spacing, step)`.
    pub fn default_delta(&self, spacing: T) -> T {
        spacing.max(self.step())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalProfile<T> {
    pub center: Vec<T>,
    pub grid: RadiusGrid<T>,
    pub radii: Vec<T>,
    pub values: Vec<T>,
    pub delta: T,
    pub seed: Option<u64>,
}

/// Monte Carlo average of `f` over the annulus about `x` of mid-radius `r`
/// and half-thickness `delta`. Radii are drawn with density `~ rho^{d-1}`,
/// so `f = 1` averages to exactly 1.
///
/// `f` is zero outside its node hull. In two and three dimensions, when `x`
/// lies outside the grid's bounding ball, directions are drawn from the cap
/// that can reach the grid and the result is scaled by the cap's share of
/// the sphere; this is unbiased and far less noisy for small supports.
pub fn spherical_average<T: Real>(
    f: &GridFunction<T>,
    x: &[T],
    r: T,
    delta: T,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    let d = f.dim();
    if x.len() != d {
        return param("centre dimension does not match the grid");
    }
    if !(r > T::zero()) || n_samples == 0 {
        return param("need r > 0 and at least one sample");
    }
    if !(r - delta > T::zero()) {
        return param(format!("r - delta = {} must be positive", r - delta));
    }
    if delta < f.spacing() {
        return param(format!("delta {delta} is below the grid spacing {}", f.spacing()));
    }
    let (lo, hi) = f.bounds();
    let center: Vec<T> = lo.iter().zip(&hi).map(|(&a, &b)| (a + b) / T::lit(2.0)).collect();
    let reach = dist(&lo, &hi) / T::lit(2.0);
    let gap = dist(x, &center);
    if r + delta < gap - reach || r - delta > gap + reach {
        return Ok(T::zero());
    }
    let cap = if (d == 2 || d == 3) && gap > reach * T::lit(1.000001) {
        let axis: Vec<T> = center.iter().zip(x).map(|(&c, &p)| (c - p) / gap).collect();
        Some(Cap::new(axis, (reach / gap).asin()))
    } else {
        None
    };
    let mut g = rng::stream(seed, 0);
    let mut u = vec![T::zero(); d];
    let mut y = vec![T::zero(); d];
    let mut acc = T::zero();
    for _ in 0..n_samples {
        match &cap {
            Some(c) => c.sample(&mut g, &mut u),
            None => rng::direction(&mut g, &mut u),
        }
        let rho = rng::shell_radius(rng::uniform::<T, _>(&mut g), r - delta, r + delta, d);
        for k in 0..d {
            y[k] = x[k] + rho * u[k];
        }
        acc = acc + f.interpolate(&y);
    }
    let share = cap.as_ref().map_or(T::one(), |c| c.share);
    Ok(share * acc / T::from_usize_lossy(n_samples))
}

/// Spherical cap about a unit axis with the given half-angle (d = 2 or 3).
struct Cap<T> {
    axis: Vec<T>,
    half_angle: T,
    share: T,
    basis: Option<([T; 3], [T; 3])>,
}

impl<T: Real> Cap<T> {
    fn new(axis: Vec<T>, half_angle: T) -> Self {
        let (share, basis) = if axis.len() == 2 {
            (half_angle / T::PI(), None)
        } else {
            let a = [axis[0], axis[1], axis[2]];
            // any vector not parallel to the axis
            let seed = if a[0].abs() < T::lit(0.9) { [T::one(), T::zero(), T::zero()] } else { [T::zero(), T::one(), T::zero()] };
            let e1 = normalize3(cross(a, seed));
            let e2 = cross(a, e1);
            ((T::one() - half_angle.cos()) / T::lit(2.0), Some((e1, e2)))
        };
        Self { axis, half_angle, share, basis }
    }

    fn sample<R: Rng + ?Sized>(&self, g: &mut R, out: &mut [T]) {
        match self.basis {
            None => {
                let base = self.axis[1].atan2(self.axis[0]);
                let t = base + self.half_angle * (T::lit(2.0) * rng::uniform::<T, _>(g) - T::one());
                out[0] = t.cos();
                out[1] = t.sin();
            }
            Some((e1, e2)) => {
                let c0 = self.half_angle.cos();
                let z = T::one() - rng::uniform::<T, _>(g) * (T::one() - c0);
                let s = (T::one() - z * z).max(T::zero()).sqrt();
                let phi = T::TAU() * rng::uniform::<T, _>(g);
                let (a, b) = (s * phi.cos(), s * phi.sin());
                for k in 0..3 {
                    out[k] = z * self.axis[k] + a * e1[k] + b * e2[k];
                }
            }
        }
    }
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize3<T: Real>(a: [T; 3]) -> [T; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// `mu(annulus) / |annulus|`, the thickened-sphere average of `mu`.
pub fn spherical_average_measure<T: Real>(mu: &DiscreteMeasure<T>, x: &[T], r: T, delta: T) -> Result<T> {
    if !(delta > T::zero()) {
        return param("delta must be positive");
    }
    if x.len() != mu.dim() {
        return param("centre dimension does not match the measure");
    }
    let inner = (r - delta).max(T::zero());
    let outer = r + delta;
    let (i2, o2) = (inner * inner, outer * outer);
    let mass: T = mu
        .atoms()
        .filter(|(p, _)| {
            let d2 = dist2(p, x);
            d2 >= i2 && d2 <= o2
        })
        .map(|(_, w)| w)
        .sum();
    Ok(mass / shell_volume::<T>(mu.dim(), inner, outer))
}

/// Profile `k -> Sf(x, r_k)`, every radius sharing `seed`.
pub fn grid_profile<T: Real>(
    f: &GridFunction<T>,
    x: &[T],
    grid: &RadiusGrid<T>,
    delta: T,
    n_samples: usize,
    seed: u64,
) -> Result<SphericalProfile<T>> {
    let radii = grid.radii();
    let values = radii
        .iter()
        .map(|&r| spherical_average(f, x, r, delta, n_samples, seed))
        .collect::<Result<Vec<T>>>()?;
    Ok(SphericalProfile { center: x.to_vec(), grid: *grid, radii, values, delta, seed: Some(seed) })
}

pub fn measure_profile<T: Real>(
    mu: &DiscreteMeasure<T>,
    x: &[T],
    grid: &RadiusGrid<T>,
    delta: T,
) -> Result<SphericalProfile<T>> {
    let radii = grid.radii();
    let values = radii
        .iter()
        .map(|&r| spherical_average_measure(mu, x, r, delta))
        .collect::<Result<Vec<T>>>()?;
    Ok(SphericalProfile { center: x.to_vec(), grid: *grid, radii, values, delta, seed: None })
}

/// One profile per pin, computed in parallel; pin `i` uses `derive_seed(master, i)`.
pub fn pin_profiles<T: Real>(
    f: &GridFunction<T>,
    pins: &[Vec<T>],
    grid: &RadiusGrid<T>,
    delta: T,
    n_samples: usize,
    master_seed: u64,
) -> Result<Vec<SphericalProfile<T>>> {
    pins.par_iter()
        .enumerate()
        .map(|(i, x)| grid_profile(f, x, grid, delta, n_samples, rng::derive_seed(master_seed, i as u64)))
        .collect()
}

/// One row per (pin, radius): pin coordinates, radius, value.
pub fn write_profiles_csv<T: Real, W: Write>(profiles: &[SphericalProfile<T>], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let dim = profiles.first().map_or(0, |p| p.center.len());
    let mut header: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
    header.extend(["radius".to_string(), "value".to_string()]);
    out.write_record(&header)?;
    for p in profiles {
        for (r, v) in p.radii.iter().zip(&p.values) {
            let mut row: Vec<String> = p.center.iter().map(|c| format!("{c:e}")).collect();
            row.push(format!("{r:e}"));
            row.push(format!("{v:e}"));
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalReport<T> {
    pub value: T,
    pub argmax_radius: T,
    pub profile: SphericalProfile<T>,
}

/// `max_k Sf(x, r_k)` over the radius grid; ties go to the smaller radius.
#[allow(clippy::too_many_arguments)]
pub fn spherical_maximal<T: Real>(
    f: &GridFunction<T>,
    x: &[T],
    r0: T,
    r1: T,
    r_grid: usize,
    delta: T,
    n_samples: usize,
    seed: u64,
) -> Result<MaximalReport<T>> {
    let grid = RadiusGrid::new(r0, r1, r_grid)?;
    let profile = grid_profile(f, x, &grid, delta, n_samples, seed)?;
    let mut best = 0;
    for (k, v) in profile.values.iter().enumerate() {
        if *v > profile.values[best] {
            best = k;
        }
    }
    Ok(MaximalReport { value: profile.values[best], argmax_radius: profile.radii[best], profile })
}

/// Which estimate an exponent triple belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormCase {
    /// Planar, energy hypothesis, `alpha > 1/2`.
    #[serde(rename = "a")]
    Frostman2d,
    /// Planar, ball condition, `0 < alpha < 1/2`.
    #[serde(rename = "b")]
    LowDim2d,
    /// `d > 2`, ball condition, `0 < alpha < 1`.
    #[serde(rename = "c")]
    HighDim,
    /// Maximal function (`s = inf`, `p = 2`, `q < 2`).
    #[serde(rename = "maximal")]
    Maximal,
}

/// Exponents stored as reciprocals so that infinite exponents are exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormParams<T> {
    pub inv_p: T,
    pub inv_q: T,
    pub inv_s: T,
    pub t: T,
    pub alpha: T,
    pub case: NormCase,
}

impl<T: Real> MixedNormParams<T> {
    pub fn p(&self) -> T {
        self.inv_p.recip()
    }
    pub fn q(&self) -> T {
        self.inv_q.recip()
    }
    pub fn s(&self) -> T {
        self.inv_s.recip()
    }

    /// The `t = 1` endpoint of the case's segment.
    pub fn endpoint(case: NormCase, alpha: T) -> [T; 3] {
        let one = T::one();
        let two = T::lit(2.0);
        match case {
            NormCase::Frostman2d => [one / two, one / (two * alpha), T::lit(0.25)],
            NormCase::LowDim2d => {
                let den = one + two * alpha;
                [one / den, one / den, (one - alpha) / den]
            }
            NormCase::HighDim => {
                let den = one + alpha;
                [one / den, one / den, (one - alpha) / den]
            }
            NormCase::Maximal => [one / two, one / two, T::zero()],
        }
    }

    fn start(case: NormCase) -> [T; 3] {
        match case {
            NormCase::Maximal => [T::lit(0.5), T::one(), T::zero()],
            _ => [T::one(), T::zero(), T::one()],
        }
    }

    /// Checks that the triple lies on its case's segment within `1e-12`.
    pub fn validate(&self) -> Result<()> {
        let want = params_on_line(self.case, self.t, self.alpha)?;
        let tol = T::merge_tol();
        if (want.inv_p - self.inv_p).abs() > tol
            || (want.inv_q - self.inv_q).abs() > tol
            || (want.inv_s - self.inv_s).abs() > tol
        {
            return param("exponent triple is off its interpolation segment");
        }
        Ok(())
    }
}

/// `(1/p, 1/q, 1/s) = t * endpoint + (1 - t) * start` for `t` in `[0, 1)`.
/// The three planar/high-dimensional cases start at `(1, 0, 1)`; the maximal
/// case runs from `(1/2, 1, 0)` towards `(1/2, 1/2, 0)`.
pub fn params_on_line<T: Real>(case: NormCase, t: T, alpha: T) -> Result<MixedNormParams<T>> {
    if !(t >= T::zero() && t < T::one()) {
        return param(format!("t = {t} outside [0, 1)"));
    }
    let half = T::lit(0.5);
    let ok = match case {
        NormCase::Frostman2d => alpha > half,
        NormCase::LowDim2d => alpha > T::zero() && alpha < half,
        NormCase::HighDim => alpha > T::zero() && alpha < T::one(),
        NormCase::Maximal => alpha > T::zero(),
    };
    if !ok {
        return param(format!("alpha = {alpha} invalid for case {case:?}"));
    }
    let e = MixedNormParams::endpoint(case, alpha);
    let s0 = MixedNormParams::<T>::start(case);
    let mix = |k: usize| t * e[k] + (T::one() - t) * s0[k];
    Ok(MixedNormParams { inv_p: mix(0), inv_q: mix(1), inv_s: mix(2), t, alpha, case })
}

/// `( sum_i lambda_i (sum_k |Sf(x_i, r_k)|^s dr)^{q/s} )^{1/q}` with the
/// usual maxima at `s = inf` or `q = inf`. Profile `i` belongs to atom `i`
/// of `lambda`.
pub fn mixed_norm<T: Real>(
    profiles: &[SphericalProfile<T>],
    lambda: &DiscreteMeasure<T>,
    params: &MixedNormParams<T>,
) -> Result<T> {
    if profiles.len() != lambda.len() {
        return param(format!("{} profiles for {} pins", profiles.len(), lambda.len()));
    }
    let Some(first) = profiles.first() else {
        return param("no profiles");
    };
    if profiles.iter().any(|p| p.grid != first.grid || p.values.len() != first.values.len()) {
        return param("profiles use different radius grids");
    }
    let dr = first.grid.step();
    let inner: Vec<T> = profiles
        .iter()
        .map(|p| {
            if params.inv_s == T::zero() {
                p.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
            } else {
                let s = params.s();
                let sum: T = p.values.iter().map(|v| v.abs().powf(s)).sum();
                (sum * dr).powf(params.inv_s)
            }
        })
        .collect();
    let w = lambda.weights();
    if params.inv_q == T::zero() {
        return Ok(inner
            .iter()
            .zip(w)
            .filter(|(_, &wi)| wi > T::zero())
            .fold(T::zero(), |m, (v, _)| m.max(*v)));
    }
    let q = params.q();
    let sum: T = inner.iter().zip(w).map(|(v, &wi)| wi * v.powf(q)).sum();
    Ok(sum.powf(params.inv_q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones() -> GridFunction<f64> {
        GridFunction::from_fn(vec![-2.0, -2.0], 0.02, vec![201, 201], |_| 1.0).unwrap()
    }

    #[test]
    fn constant_function_averages_to_one() {
        let f = ones();
        let v = spherical_average(&f, &[0.1, -0.2], 0.7, 0.02, 2000, 5).unwrap();
        assert!((v - 1.0).abs() <= 3.0 / (2000f64).sqrt());
    }

    #[test]
    fn parameter_errors() {
        let f = ones();
        assert!(spherical_average(&f, &[0.0, 0.0], 0.01, 0.02, 10, 0).is_err());
        assert!(spherical_average(&f, &[0.0, 0.0], 0.5, 0.001, 10, 0).is_err());
        assert!(spherical_average(&f, &[0.0, 0.0], 0.5, 0.02, 0, 0).is_err());
    }

    #[test]
    fn vanishing_function_gives_exact_zero() {
        let f = GridFunction::from_fn(vec![-0.1, -0.1], 0.01, vec![21, 21], |_| 1.0).unwrap();
        let v = spherical_average(&f, &[1.0, 0.0], 0.5, 0.01, 500, 1).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn measure_average_point_mass() {
        let mu = DiscreteMeasure::point_mass(vec![0.3, 0.4]);
        let (r, d) = (0.5_f64, 0.01);
        let v = spherical_average_measure(&mu, &[0.0, 0.0], r, d).unwrap();
        let vol = std::f64::consts::PI * ((r + d).powi(2) - (r - d).powi(2));
        assert!((v - 1.0 / vol).abs() < 1e-9);
        assert_eq!(spherical_average_measure(&mu, &[0.0, 0.0], r + 2.0 * d, d).unwrap(), 0.0);
    }

    #[test]
    fn maximal_of_constant_ties_to_first_radius() {
        let f = ones();
        let rep = spherical_maximal(&f, &[0.0, 0.0], 0.2, 1.0, 8, 0.05, 64, 3).unwrap();
        assert_eq!(rep.value, 1.0);
        assert_eq!(rep.argmax_radius, rep.profile.radii[0]);
    }

    #[test]
    fn params_examples() {
        let a = params_on_line(NormCase::Frostman2d, 0.0, 0.75).unwrap();
        assert_eq!((a.p(), a.q(), a.s()), (1.0, f64::INFINITY, 1.0));
        let b = params_on_line(NormCase::LowDim2d, 1.0 - 1e-12, 0.25_f64).unwrap();
        assert!((b.inv_p - 2.0 / 3.0).abs() < 1e-11);
        assert!((b.inv_q - 2.0 / 3.0).abs() < 1e-11);
        assert!((b.inv_s - 0.5).abs() < 1e-11);
        let c = params_on_line(NormCase::HighDim, 1.0 - 1e-12, 0.5_f64).unwrap();
        assert!((c.inv_p - 2.0 / 3.0).abs() < 1e-11);
        assert!((c.inv_s - 1.0 / 3.0).abs() < 1e-11);
        assert!(params_on_line(NormCase::LowDim2d, 0.5, 0.6).is_err());
        assert!(params_on_line(NormCase::Frostman2d, 1.0, 0.75).is_err());
        assert!(c.validate().is_ok());
        let mut bad = c;
        bad.inv_p += 1e-6;
        assert!(bad.validate().is_err());
    }

    fn const_profiles(n: usize, grid: RadiusGrid<f64>) -> Vec<SphericalProfile<f64>> {
        (0..n)
            .map(|i| SphericalProfile {
                center: vec![i as f64, 0.0],
                grid,
                radii: grid.radii(),
                values: vec![1.0; grid.n],
                delta: 0.01,
                seed: None,
            })
            .collect()
    }

    #[test]
    fn mixed_norm_of_constants() {
        let grid = RadiusGrid::new(0.25, 1.0, 30).unwrap();
        let lambda = DiscreteMeasure::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], vec![0.2, 0.3, 0.5])
            .unwrap();
        let profiles = const_profiles(3, grid);
        for t in [0.0, 0.3, 0.9] {
            let p = params_on_line(NormCase::LowDim2d, t, 0.3).unwrap();
            let v = mixed_norm(&profiles, &lambda, &p).unwrap();
            assert!((v - 0.75f64.powf(p.inv_s)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn mixed_norm_sup_and_single_pin() {
        let grid = RadiusGrid::new(0.5, 1.0, 4).unwrap();
        let mut profiles = const_profiles(2, grid);
        profiles[1].values = vec![2.0; 4];
        let lambda = DiscreteMeasure::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.5, 0.5]).unwrap();
        let p = params_on_line(NormCase::Frostman2d, 0.0, 0.75).unwrap();
        let v = mixed_norm(&profiles, &lambda, &p).unwrap();
        assert!((v - 2.0 * 0.5).abs() < 1e-12);

        let single = DiscreteMeasure::point_mass(vec![0.0, 0.0]);
        let mut prof = const_profiles(1, grid);
        prof[0].values = vec![0.1, 0.4, 0.3, 0.2];
        let s = MixedNormParams { inv_p: 0.5, inv_q: 1.0 / 3.0, inv_s: 1.0 / 3.0, t: 0.0, alpha: 0.3, case: NormCase::LowDim2d };
        let direct = (prof[0].values.iter().map(|v: &f64| v.powi(3)).sum::<f64>() * 0.125).powf(1.0 / 3.0);
        assert!((mixed_norm(&prof, &single, &s).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let mut profiles = const_profiles(2, RadiusGrid::new(0.5, 1.0, 4).unwrap());
        profiles[1].grid = RadiusGrid::new(0.5, 1.0, 5).unwrap();
        let lambda = DiscreteMeasure::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.5, 0.5]).unwrap();
        let p = params_on_line(NormCase::Frostman2d, 0.5, 0.75).unwrap();
        assert!(mixed_norm(&profiles, &lambda, &p).is_err());
    }
}
