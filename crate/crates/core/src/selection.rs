//! Random point selection: independent draws and sequential draws with
//! shrinking exclusion radii.

use rand::distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::measure::{dyadic_radii, frostman_constant, restrict, DiscreteMeasure, Region, SamplingPlan};
use crate::rng;
use crate::scalar::{dist2, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig<T> {
    pub alpha: T,
    pub alpha_prime: T,
    pub gamma: T,
    pub c: T,
    pub n: usize,
    pub seed: u64,
}

impl<T: Real> SelectionConfig<T> {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let d = T::from_usize_lossy(dim);
        if !(T::zero() < self.alpha && self.alpha < self.alpha_prime && self.alpha_prime < self.gamma && self.gamma <= d)
        {
            return param(format!(
                "need 0 < alpha < alpha' < gamma <= {dim}, got ({}, {}, {})",
                self.alpha, self.alpha_prime, self.gamma
            ));
        }
        if self.n < 2 {
            return param("selection needs N >= 2");
        }
        if self.c < T::zero() {
            return param("c must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaSchedule<T> {
    /// `eta_1, ..., eta_N`.
    pub values: Vec<T>,
    /// Set when `c = 0` and every radius vanishes.
    pub degenerate: bool,
}

/// `eta_k = c (lambda_mass / k)^{1/alpha}` for `k = 1..=N`.
pub fn eta_schedule<T: Real>(config: &SelectionConfig<T>, lambda_mass: T) -> Result<EtaSchedule<T>> {
    if !(lambda_mass > T::zero()) {
        return param("lambda(A) must be positive");
    }
    let inv = config.alpha.recip();
    let values: Vec<T> =
        (1..=config.n).map(|k| config.c * (lambda_mass / T::from_usize_lossy(k)).powf(inv)).collect();
    Ok(EtaSchedule { degenerate: config.c == T::zero(), values })
}

/// Limits for [`calibrate_c`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationLimits {
    /// Largest admissible ball-condition constant at `alpha'`.
    pub frostman_ceiling: f64,
    /// Smallest radius probed by the ball-condition check.
    pub min_radius: f64,
    pub plan: SamplingPlan,
}

impl Default for CalibrationLimits {
    fn default() -> Self {
        Self { frostman_ceiling: 100.0, min_radius: 1e-3, plan: SamplingPlan::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration<T> {
    pub c: T,
    pub frostman: T,
    pub lambda_a: T,
    /// Union bound on the excluded mass at the returned `c`.
    pub excluded_bound: T,
}

/// Union bound `sum_{j<N} max(C eta_j^{alpha'}, w_max)` on the mass removed
/// by the first `N - 1` exclusion balls.
fn excluded_bound<T: Real>(config: &SelectionConfig<T>, lambda_a: T, frostman: T, w_max: T) -> Result<T> {
    let etas = eta_schedule(config, lambda_a)?;
    Ok(etas.values[..config.n - 1]
        .iter()
        .map(|&e| (frostman * e.powf(config.alpha_prime)).max(w_max))
        .sum())
}

/// Largest `c` (halving from 1, then bisecting) whose union bound keeps at
/// least half of `lambda(A)` alive through every step.
pub fn calibrate_c<T: Real>(
    lambda: &DiscreteMeasure<T>,
    region: &Region<T>,
    config: &SelectionConfig<T>,
    limits: &CalibrationLimits,
) -> Result<Calibration<T>> {
    config.validate(lambda.dim())?;
    let r = restrict(lambda, region)?;
    let lambda_a = r.retained_mass;
    if !(lambda_a > T::zero()) {
        return param("lambda(A) is zero");
    }
    let floor = T::lit(limits.min_radius).max(lambda.resolution().unwrap_or(T::zero()));
    let radii = dyadic_radii(floor, lambda.diameter_bound().max(floor * T::lit(2.0)));
    let frostman = frostman_constant(lambda, config.alpha_prime, &limits.plan, &radii)?.constant;
    if !(frostman.to_f64_lossy() <= limits.frostman_ceiling) {
        return Err(Error::Precondition {
            message: format!("ball condition at alpha' = {} exceeds {}", config.alpha_prime, limits.frostman_ceiling),
            measured: frostman.to_f64_lossy(),
        });
    }
    let w_max = r.measure.weights().iter().copied().fold(T::zero(), T::max);
    let c = largest_c(config, lambda_a, frostman, w_max)?;
    let excluded = excluded_bound(&SelectionConfig { c, ..*config }, lambda_a, frostman, w_max)?;
    Ok(Calibration { c, frostman, lambda_a, excluded_bound: excluded })
}

/// Largest `c <= 1` with `sum_{j<N} max(C eta_j^{alpha'}, w_max) <= lambda(A)/2`
/// for ball-condition constant `C = frostman` and heaviest atom `w_max`.
pub fn largest_c<T: Real>(config: &SelectionConfig<T>, lambda_a: T, frostman: T, w_max: T) -> Result<T> {
    let half = lambda_a / T::lit(2.0);
    let ok = |c: T| -> Result<bool> { Ok(excluded_bound(&SelectionConfig { c, ..*config }, lambda_a, frostman, w_max)? <= half) };
    let mut hi = T::one();
    let mut lo = T::zero();
    let mut found = false;
    for _ in 0..200 {
        if ok(hi)? {
            lo = hi;
            found = true;
            break;
        }
        hi = hi / T::lit(2.0);
    }
    if !found {
        return Err(Error::Calibration(
            "no positive c satisfies the union bound; atoms are too heavy for lambda(A)/2".into(),
        ));
    }
    if lo < T::one() {
        let mut top = lo * T::lit(2.0);
        for _ in 0..60 {
            let mid = (lo + top) / T::lit(2.0);
            if ok(mid)? {
                lo = mid;
            } else {
                top = mid;
            }
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection<T> {
    pub points: Vec<Vec<T>>,
    /// Atom index of every selected point.
    pub atoms: Vec<usize>,
    pub etas: Vec<T>,
    /// `lambda(A(x_1..x_{k-1}))` before each draw `k = 1..=N`.
    pub restricted_masses: Vec<T>,
    pub lambda_a: T,
    pub seed: u64,
    pub retries: usize,
}

/// Draws `x_k` from `lambda` restricted to `A` minus the balls
/// `B(x_j, eta_j)`, `j < k`, and minus already selected atoms, by rejection.
/// The whole draw restarts with a derived seed if the alive mass ever drops
/// below `lambda(A) / 2`.
pub fn select_points<T: Real>(
    lambda: &DiscreteMeasure<T>,
    region: &Region<T>,
    config: &SelectionConfig<T>,
    max_retries: usize,
) -> Result<Selection<T>> {
    config.validate(lambda.dim())?;
    let r = restrict(lambda, region)?;
    let lambda_a = r.retained_mass;
    let etas = eta_schedule(config, lambda_a)?.values;
    let weights: Vec<f64> = r.measure.weights().iter().map(|w| w.to_f64_lossy()).collect();
    let sampler = WeightedIndex::new(&weights).map_err(|e| Error::Degenerate(format!("lambda(A): {e}")))?;
    let half = lambda_a / T::lit(2.0);
    for attempt in 0..=max_retries {
        let seed = if attempt == 0 { config.seed } else { rng::derive_seed(config.seed, attempt as u64) };
        if let Some(mut sel) = attempt_draw(&r.measure, &sampler, &etas, config.n, half, seed) {
            sel.lambda_a = lambda_a;
            sel.retries = attempt;
            return Ok(sel);
        }
    }
    Err(Error::Calibration(format!(
        "alive mass fell below lambda(A)/2 in {} attempts; use a smaller c",
        max_retries + 1
    )))
}

fn attempt_draw<T: Real>(
    mu: &DiscreteMeasure<T>,
    sampler: &WeightedIndex<f64>,
    etas: &[T],
    n: usize,
    half: T,
    seed: u64,
) -> Option<Selection<T>> {
    let w = mu.weights();
    let mut alive: Vec<bool> = w.iter().map(|&x| x > T::zero()).collect();
    let mut alive_mass: T = w.iter().copied().sum();
    let mut g = rng::stream(seed, 0);
    let mut sel = Selection {
        points: Vec::with_capacity(n),
        atoms: Vec::with_capacity(n),
        etas: etas.to_vec(),
        restricted_masses: Vec::with_capacity(n),
        lambda_a: T::zero(),
        seed,
        retries: 0,
    };
    for k in 0..n {
        sel.restricted_masses.push(alive_mass);
        if alive_mass < half {
            return None;
        }
        let i = loop {
            let i = sampler.sample(&mut g);
            if alive[i] {
                break i;
            }
        };
        let x = mu.point(i).to_vec();
        let e2 = etas[k] * etas[k];
        for (j, p) in mu.points().enumerate() {
            if alive[j] && (j == i || dist2(p, &x) < e2) {
                alive[j] = false;
                alive_mass = alive_mass - w[j];
            }
        }
        sel.points.push(x);
        sel.atoms.push(i);
    }
    Some(sel)
}

/// Checks `|x_k - x_j| >= eta_j` for all `j < k`, exactly.
pub fn exclusion_violations<T: Real>(points: &[Vec<T>], etas: &[T]) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for k in 0..points.len() {
        for j in 0..k {
            if dist2(&points[k], &points[j]) < etas[j] * etas[j] {
                bad.push((j, k));
            }
        }
    }
    bad
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySum<T> {
    pub value: T,
    /// Some pair of points coincides (distance below the floor when the floor is zero).
    pub coincident: bool,
}

/// `sum_{i<j} max(|x_i - x_j|, floor)^{-gamma}`.
pub fn energy_sum<T: Real>(points: &[Vec<T>], gamma: T, floor: T) -> Result<EnergySum<T>> {
    if points.len() < 2 {
        return param("energy sum needs at least two points");
    }
    let half = -gamma / T::lit(2.0);
    let f2 = floor * floor;
    let mut value = T::zero();
    let mut coincident = false;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d2 = dist2(&points[i], &points[j]).max(f2);
            if d2 == T::zero() {
                coincident = true;
            } else {
                value = value + d2.powf(half);
            }
        }
    }
    if coincident {
        value = T::infinity();
    }
    Ok(EnergySum { value, coincident })
}

/// `energy_sum / (lambda_mass^{-gamma/alpha} N^{1 + gamma/alpha})`.
pub fn verify_lemma25_bound<T: Real>(points: &[Vec<T>], config: &SelectionConfig<T>, lambda_mass: T) -> Result<T> {
    let e = energy_sum(points, config.gamma, T::zero())?.value;
    let ratio = config.gamma / config.alpha;
    let n = T::from_usize_lossy(points.len());
    Ok(e / (lambda_mass.powf(-ratio) * n.powf(T::one() + ratio)))
}

/// `n` independent draws from `lambda` restricted to `A`, normalised.
pub fn iid_select<T: Real>(lambda: &DiscreteMeasure<T>, region: &Region<T>, n: usize, seed: u64) -> Result<Vec<Vec<T>>> {
    let r = restrict(lambda, region)?;
    let weights: Vec<f64> = r.measure.weights().iter().map(|w| w.to_f64_lossy()).collect();
    let sampler = WeightedIndex::new(&weights).map_err(|e| Error::Degenerate(format!("lambda(A): {e}")))?;
    let mut g = rng::stream(seed, 0);
    Ok((0..n).map(|_| r.measure.point(sampler.sample(&mut g)).to_vec()).collect())
}
