//! Pinned distance measures and dimension estimates of distance sets.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::measure::{dyadic_radii, riesz_energy, DiscreteMeasure};
use crate::scalar::{dist, dist2, unit_ball_volume, Real};
use crate::spherical::{spherical_average_measure, RadiusGrid};

/// Push-forward of a measure under `y -> |x - y|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinnedMeasure<T> {
    pub pin: Vec<T>,
    /// Ascending, pairwise separated by more than `1e-12`.
    pub distances: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> PinnedMeasure<T> {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// The same atoms as a one-dimensional [`DiscreteMeasure`].
    pub fn as_measure(&self) -> Result<DiscreteMeasure<T>> {
        DiscreteMeasure::from_flat(1, self.distances.clone(), self.weights.clone())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["distance", "weight"])?;
        for (d, w) in self.distances.iter().zip(&self.weights) {
            out.write_record([format!("{d:e}"), format!("{w:e}")])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn pin_measure<T: Real>(nu: &DiscreteMeasure<T>, x: &[T]) -> Result<PinnedMeasure<T>> {
    if x.len() != nu.dim() {
        return param("pin dimension does not match the measure");
    }
    let mut pairs: Vec<(T, T)> = nu.atoms().map(|(p, w)| (dist(p, x), w)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let tol = T::merge_tol();
    let mut distances: Vec<T> = Vec::with_capacity(pairs.len());
    let mut weights: Vec<T> = Vec::with_capacity(pairs.len());
    for (d, w) in pairs {
        match distances.last() {
            Some(&last) if d - last <= tol => {
                let acc = weights.last_mut().expect("paired");
                *acc = *acc + w;
            }
            _ => {
                distances.push(d);
                weights.push(w);
            }
        }
    }
    Ok(PinnedMeasure { pin: x.to_vec(), distances, weights })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionMethod {
    BoxCounting,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleCount<T> {
    pub scale: T,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow<T> {
    pub alpha: T,
    /// One energy per refinement level, coarse to fine.
    pub energies: Vec<T>,
    pub increment_ratio: T,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate<T> {
    pub value: T,
    pub method: DimensionMethod,
    pub scale_lo: T,
    pub scale_hi: T,
    /// Root mean square residual of the log-log fit.
    pub fit_residual: T,
    pub slope_stderr: T,
    pub counts: Vec<ScaleCount<T>>,
    pub energy_table: Vec<EnergyRow<T>>,
    /// All points coincide (box) or the support is a single atom (energy).
    pub degenerate: bool,
    /// Every grid exponent was finite.
    pub saturated: bool,
    /// Fewer than ten points; the slope is reported but is not meaningful.
    pub sparse: bool,
}

/// Number of occupied boxes of side `delta`, the grid anchored at the
/// coordinate-wise minimum. Points within rounding of a box face count as
/// lying in the upper box.
pub fn box_count<T: Real>(dim: usize, coords: &[T], delta: T) -> usize {
    if coords.is_empty() || dim == 0 {
        return 0;
    }
    let n = coords.len() / dim;
    let mut lo = coords[..dim].to_vec();
    for p in coords.chunks_exact(dim) {
        for (l, &c) in lo.iter_mut().zip(p) {
            *l = l.min(c);
        }
    }
    let nudge = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
    let key = |p: &[T], k: usize| -> i64 { ((p[k] - lo[k]) / delta + nudge).floor().to_i64().unwrap_or(i64::MAX) };
    if dim == 1 {
        let mut keys: Vec<i64> = coords.iter().map(|&c| key(&[c], 0)).collect();
        keys.sort_unstable();
        keys.dedup();
        return keys.len();
    }
    let mut keys: Vec<i64> = Vec::with_capacity(n * dim);
    for p in coords.chunks_exact(dim) {
        keys.extend((0..dim).map(|k| key(p, k)));
    }
    let mut rows: Vec<&[i64]> = keys.chunks_exact(dim).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.len()
}

/// Least-squares slope of `log N(delta)` against `log(1/delta)`.
pub fn box_dimension<T: Real>(dim: usize, coords: &[T], scales: &[T]) -> Result<DimensionEstimate<T>> {
    if dim == 0 || coords.len() % dim != 0 || coords.is_empty() {
        return param("point set is empty or has ragged coordinates");
    }
    let mut scales: Vec<T> = scales.to_vec();
    if scales.iter().any(|s| !(*s > T::zero())) {
        return param("scales must be positive");
    }
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    scales.dedup();
    if scales.len() < 2 {
        return param("box counting needs at least two distinct scales");
    }
    let n = coords.len() / dim;
    let first = &coords[..dim];
    let degenerate = coords.chunks_exact(dim).all(|p| p == first);
    let counts: Vec<ScaleCount<T>> =
        scales.iter().map(|&s| ScaleCount { scale: s, count: box_count(dim, coords, s) }).collect();
    let base = DimensionEstimate {
        value: T::zero(),
        method: DimensionMethod::BoxCounting,
        scale_lo: scales[0],
        scale_hi: scales[scales.len() - 1],
        fit_residual: T::zero(),
        slope_stderr: T::zero(),
        counts,
        energy_table: Vec::new(),
        degenerate,
        saturated: false,
        sparse: n < 10,
    };
    if degenerate {
        return Ok(base);
    }
    let xs: Vec<f64> = base.counts.iter().map(|c| -c.scale.to_f64_lossy().ln()).collect();
    let ys: Vec<f64> = base.counts.iter().map(|c| (c.count as f64).ln()).collect();
    let fit = least_squares(&xs, &ys);
    Ok(DimensionEstimate {
        value: T::lit(fit.slope.max(0.0)),
        fit_residual: T::lit(fit.rms),
        slope_stderr: T::lit(fit.stderr),
        ..base
    })
}

/// Box dimension of a measure's support over the dyadic window
/// `[4 * resolution, diameter / 4]` (or the given window).
pub fn box_dimension_measure<T: Real>(
    mu: &DiscreteMeasure<T>,
    window: Option<(T, T)>,
) -> Result<DimensionEstimate<T>> {
    let (lo, hi) = match window {
        Some(w) => w,
        None => default_window(mu)?,
    };
    if !(lo > T::zero() && lo < hi) {
        return param(format!("invalid scale window [{lo}, {hi}]"));
    }
    let scales = dyadic_radii(lo, hi);
    if scales.len() < 2 {
        return param(format!("scale window [{lo}, {hi}] holds fewer than two dyadic scales"));
    }
    box_dimension(mu.dim(), mu.coords(), &scales)
}

pub fn default_window<T: Real>(mu: &DiscreteMeasure<T>) -> Result<(T, T)> {
    let res = mu.resolution().ok_or_else(|| Error::Degenerate("window of a single atom".into()))?;
    Ok((T::lit(4.0) * res, mu.diameter_bound() / T::lit(4.0)))
}

pub fn box_dimension_pinned<T: Real>(
    nu_x: &PinnedMeasure<T>,
    window: Option<(T, T)>,
) -> Result<DimensionEstimate<T>> {
    box_dimension_measure(&nu_x.as_measure()?, window)
}

struct Fit {
    slope: f64,
    rms: f64,
    stderr: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Fit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let stderr = if xs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Fit { slope, rms: (sse / n).sqrt(), stderr }
}

/// How a divergent energy is told apart from a convergent one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum GrowthRule {
    /// Finite when the last increment is smaller than the one before by
    /// at least this factor (1 means merely smaller).
    IncrementRatio { limit: f64 },
    /// Finite when the energy at the finest level is below `limit` times the
    /// energy one level coarser.
    LevelRatio { limit: f64 },
}

impl Default for GrowthRule {
    fn default() -> Self {
        GrowthRule::IncrementRatio { limit: 1.0 }
    }
}

/// Largest grid exponent whose energy stays bounded along a refinement
/// sequence `levels` (coarse to fine). Each level's energy is floored at its
/// own resolution. The scan stops at the first divergent exponent.
pub fn energy_dimension<T: Real>(
    levels: &[DiscreteMeasure<T>],
    alphas: &[T],
    rule: GrowthRule,
) -> Result<DimensionEstimate<T>> {
    let need = match rule {
        GrowthRule::IncrementRatio { .. } => 3,
        GrowthRule::LevelRatio { .. } => 2,
    };
    if levels.len() < need {
        return param(format!("growth rule needs {need} refinement levels"));
    }
    if alphas.is_empty() || alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return param("alphas must be nonempty and increasing");
    }
    let floors: Vec<T> = levels.iter().map(|m| m.resolution().unwrap_or(T::zero())).collect();
    let finest = floors.iter().copied().fold(T::infinity(), T::min);
    let coarsest = floors.iter().copied().fold(T::zero(), T::max);
    let mut est = DimensionEstimate {
        value: T::zero(),
        method: DimensionMethod::Energy,
        scale_lo: finest,
        scale_hi: coarsest,
        fit_residual: T::zero(),
        slope_stderr: T::zero(),
        counts: Vec::new(),
        energy_table: Vec::new(),
        degenerate: false,
        saturated: false,
        sparse: false,
    };
    if levels.iter().any(|m| m.len() < 2) {
        est.degenerate = true;
        return Ok(est);
    }
    let mut all_finite = true;
    for &alpha in alphas {
        let energies = levels
            .iter()
            .zip(&floors)
            .map(|(m, &h)| riesz_energy(m, alpha, h).map(|e| e.value))
            .collect::<Result<Vec<T>>>()?;
        let k = energies.len();
        let (ratio, finite) = match rule {
            GrowthRule::IncrementRatio { limit } => {
                let r = (energies[k - 1] - energies[k - 2]) / (energies[k - 2] - energies[k - 3]);
                (r, r.to_f64_lossy() < limit)
            }
            GrowthRule::LevelRatio { limit } => {
                let r = energies[k - 1] / energies[k - 2];
                (r, r.to_f64_lossy() < limit)
            }
        };
        est.energy_table.push(EnergyRow { alpha, energies, increment_ratio: ratio, finite });
        if !finite {
            all_finite = false;
            break;
        }
        est.value = alpha;
    }
    est.saturated = all_finite;
    Ok(est)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma2Report<T> {
    pub rho: T,
    pub depth: u32,
    pub radii: Vec<T>,
    pub lhs: Vec<T>,
    pub rhs: Vec<T>,
    /// `lhs / rhs`, zero where both sides vanish.
    pub ratios: Vec<T>,
    pub max_ratio: T,
    pub argmax_radius: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Params<T> {
    pub rho: T,
    pub r0: T,
    pub r1: T,
    pub r_grid: usize,
    /// Cutoff of the one-dimensional kernel.
    pub cutoff_1d: T,
    /// Cutoff of the `d`-dimensional kernel; at least four times `cutoff_1d`.
    pub cutoff_d: T,
    /// Dyadic truncation depth: the finest scale is `2^-depth`.
    pub depth: u32,
}

/// Compares the pinned convolution `nu_x * K_{rho+1-d}(r)` with the dyadic
/// spherical average `sum_j 2^{rho j} |B(0, 2^-j)| S nu(x, r; 2^-j)` on a
/// radius grid, both truncated at scale `2^-depth`.
pub fn lemma2_check<T: Real>(nu: &DiscreteMeasure<T>, x: &[T], p: &Lemma2Params<T>) -> Result<Lemma2Report<T>> {
    let d = nu.dim();
    if x.len() != d {
        return param("pin dimension does not match the measure");
    }
    if !(p.rho > T::from_usize_lossy(d - 1)) {
        return param(format!("rho = {} must exceed d - 1 = {}", p.rho, d - 1));
    }
    if !(p.cutoff_1d > T::zero()) || p.cutoff_d < T::lit(4.0) * p.cutoff_1d {
        return param("need cutoff_d >= 4 * cutoff_1d > 0");
    }
    let grid = RadiusGrid::new(p.r0, p.r1, p.r_grid)?;
    let kappa = p.rho + T::one() - T::from_usize_lossy(d);
    let two = T::lit(2.0);
    let floor = two.powi(-(p.depth as i32));
    let nu_x = pin_measure(nu, x)?;
    let ball = unit_ball_volume::<T>(d);
    let j_min = (-p.cutoff_d.log2()).ceil().to_i32().unwrap_or(0).max(0);
    let radii = grid.radii();
    let mut lhs = Vec::with_capacity(radii.len());
    let mut rhs = Vec::with_capacity(radii.len());
    for &r in &radii {
        let mut l = T::zero();
        for (&dist_i, &w) in nu_x.distances.iter().zip(&nu_x.weights) {
            let s = (r - dist_i).abs();
            if s < p.cutoff_1d {
                l = l + w * s.max(floor).powf(-kappa);
            }
        }
        let mut s = T::zero();
        for j in j_min..=(p.depth as i32) {
            let h = two.powi(-j);
            s = s + two.powf(p.rho * T::from_i32(j).expect("small")) * ball * h.powi(d as i32)
                * spherical_average_measure(nu, x, r, h)?;
        }
        lhs.push(l);
        rhs.push(s);
    }
    if rhs.iter().all(|v| *v == T::zero()) {
        return Err(Error::Degenerate(
            "dyadic spherical average vanishes on the whole radius grid; pin too far from the support".into(),
        ));
    }
    let ratios: Vec<T> = lhs
        .iter()
        .zip(&rhs)
        .map(|(&l, &s)| {
            if s > T::zero() {
                l / s
            } else if l > T::zero() {
                T::infinity()
            } else {
                T::zero()
            }
        })
        .collect();
    let mut best = 0;
    for (k, v) in ratios.iter().enumerate() {
        if *v > ratios[best] {
            best = k;
        }
    }
    Ok(Lemma2Report {
        rho: p.rho,
        depth: p.depth,
        max_ratio: ratios[best],
        argmax_radius: radii[best],
        radii,
        lhs,
        rhs,
        ratios,
    })
}

/// Smallest distance from `x` to an atom, by exhaustive scan.
pub fn distance_to_support<T: Real>(nu: &DiscreteMeasure<T>, x: &[T]) -> T {
    nu.points().map(|p| dist2(p, x)).fold(T::infinity(), T::min).sqrt()
}
