//! Weighted point clouds approximating Borel measures on `R^d`.

use std::cmp::Ordering;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::rng;
use crate::scalar::{dist2, Real};
use crate::spatial::CellIndex;

/// Atomic measure `sum_i w_i delta_{p_i}`. Coordinates are stored flat,
/// `dim` values per atom.
///
/// Atoms closer than `1e-12` (max-coordinate distance) are merged at
/// construction, adding their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T: Real> {
    dim: usize,
    coords: Vec<T>,
    weights: Vec<T>,
    total_mass: T,
    probability: bool,
    resolution: Option<T>,
}

impl<T: Real> DiscreteMeasure<T> {
    pub fn new(dim: usize, points: Vec<Vec<T>>, weights: Vec<T>) -> Result<Self> {
        if let Some(bad) = points.iter().position(|p| p.len() != dim) {
            return param(format!(
                "point {bad} has {} coordinates, expected {dim}",
                points[bad].len()
            ));
        }
        Self::from_flat(dim, points.into_iter().flatten().collect(), weights)
    }

    pub fn from_flat(dim: usize, coords: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return param("dimension must be at least 1");
        }
        if coords.len() != dim * weights.len() {
            return param(format!(
                "{} coordinates do not match {} weights in dimension {dim}",
                coords.len(),
                weights.len()
            ));
        }
        if let Some(i) = weights.iter().position(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return param(format!("weight {i} is negative or not finite"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return param("coordinates must be finite");
        }
        let (coords, weights) = merge_coincident(dim, coords, weights);
        let total_mass = weights.iter().copied().sum();
        Ok(Self { dim, coords, weights, total_mass, probability: false, resolution: None })
    }

    /// Single atom of mass 1.
    pub fn point_mass(at: Vec<T>) -> Self {
        let dim = at.len();
        Self {
            dim,
            coords: at,
            weights: vec![T::one()],
            total_mass: T::one(),
            probability: true,
            resolution: None,
        }
    }

    /// Marks the measure as a probability measure; fails unless `|mass - 1| <= 1e-12`.
    pub fn into_probability(mut self) -> Result<Self> {
        if (self.total_mass - T::one()).abs() > T::merge_tol() {
            return Err(Error::Parameter(format!(
                "total mass {} is not 1",
                self.total_mass
            )));
        }
        self.probability = true;
        Ok(self)
    }

    pub fn with_resolution(mut self, h: T) -> Self {
        self.resolution = Some(h);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    pub fn coords(&self) -> &[T] {
        &self.coords
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    pub fn total_mass(&self) -> T {
        self.total_mass
    }
    pub fn is_probability(&self) -> bool {
        self.probability
    }
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
    pub fn points(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }
    pub fn atoms(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.points().zip(self.weights.iter().copied())
    }

    /// Axis-aligned bounding box `(lo, hi)` of the atoms.
    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        let mut lo = vec![T::infinity(); self.dim];
        let mut hi = vec![T::neg_infinity(); self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn diameter_bound(&self) -> T {
        let (lo, hi) = self.bounding_box();
        if self.is_empty() {
            return T::zero();
        }
        dist2(&lo, &hi).sqrt()
    }

    /// Working resolution: the generator's cell size when known, otherwise
    /// the median nearest-neighbour distance. `None` for fewer than two atoms.
    pub fn resolution(&self) -> Option<T> {
        if self.resolution.is_some() {
            return self.resolution;
        }
        if self.len() < 2 {
            return None;
        }
        let mut nn = nearest_neighbour_distances(self);
        nn.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Some(nn[nn.len() / 2])
    }

    pub fn resolution_hint(&self) -> Option<T> {
        self.resolution
    }

    /// Maps every atom `p -> offset + scale * p`.
    pub fn transformed(&self, scale: T, offset: &[T]) -> Result<Self> {
        if offset.len() != self.dim {
            return param("offset dimension mismatch");
        }
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(offset).map(|(&x, &o)| o + scale * x).collect::<Vec<_>>())
            .collect();
        let mut out = Self::from_flat(self.dim, coords, self.weights.clone())?;
        out.probability = self.probability;
        out.resolution = self.resolution.map(|h| h * scale.abs());
        Ok(out)
    }

    /// Mass of the closed ball `B(center, radius)`.
    pub fn ball_mass(&self, center: &[T], radius: T) -> T {
        let r2 = radius * radius;
        self.atoms()
            .filter(|(p, _)| dist2(p, center) <= r2)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&MeasureDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: MeasureDoc<T> = serde_json::from_str(s)?;
        doc.try_into()
    }

    /// CSV with header `x0,..,x{d-1},weight`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim).map(|k| format!("x{k}")).collect();
        header.push("weight".into());
        wr.write_record(&header)?;
        for (p, wt) in self.atoms() {
            let mut row: Vec<String> = p.iter().map(|x| format!("{x:e}")).collect();
            row.push(format!("{wt:e}"));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        let mut dim = None;
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() < 2 {
                return param("CSV rows need at least one coordinate and a weight");
            }
            let d = rec.len() - 1;
            if *dim.get_or_insert(d) != d {
                return param("ragged CSV rows");
            }
            for (k, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad number '{field}'")))?;
                if k < d {
                    coords.push(T::lit(v));
                } else {
                    weights.push(T::lit(v));
                }
            }
        }
        Self::from_flat(dim.unwrap_or(1), coords, weights)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasureDoc<T> {
    dim: usize,
    points: Vec<Vec<T>>,
    weights: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<T>,
}

impl<T: Real> From<&DiscreteMeasure<T>> for MeasureDoc<T> {
    fn from(m: &DiscreteMeasure<T>) -> Self {
        Self {
            dim: m.dim,
            points: m.points().map(|p| p.to_vec()).collect(),
            weights: m.weights.clone(),
            resolution: m.resolution,
        }
    }
}

impl<T: Real> TryFrom<MeasureDoc<T>> for DiscreteMeasure<T> {
    type Error = Error;
    fn try_from(doc: MeasureDoc<T>) -> Result<Self> {
        let m = DiscreteMeasure::new(doc.dim, doc.points, doc.weights)?;
        Ok(match doc.resolution {
            Some(h) => m.with_resolution(h),
            None => m,
        })
    }
}

fn merge_coincident<T: Real>(dim: usize, coords: Vec<T>, weights: Vec<T>) -> (Vec<T>, Vec<T>) {
    let n = weights.len();
    if n < 2 {
        return (coords, weights);
    }
    let tol = T::merge_tol();
    let pt = |i: usize| &coords[i * dim..(i + 1) * dim];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pt(a)[0].partial_cmp(&pt(b)[0]).unwrap_or(Ordering::Equal));
    let mut rep: Vec<usize> = (0..n).collect();
    let mut any = false;
    for (pos, &i) in order.iter().enumerate() {
        if rep[i] != i {
            continue;
        }
        for &j in &order[pos + 1..] {
            if pt(j)[0] - pt(i)[0] > tol {
                break;
            }
            if rep[j] == j && pt(i).iter().zip(pt(j)).all(|(a, b)| (*a - *b).abs() <= tol) {
                rep[j] = i;
                any = true;
            }
        }
    }
    if !any {
        return (coords, weights);
    }
    // representative = smallest original index in its group
    let mut root = vec![usize::MAX; n];
    for i in 0..n {
        let r = rep[i];
        root[r] = root[r].min(i);
    }
    let mut acc: Vec<Option<T>> = vec![None; n];
    for i in 0..n {
        let r = root[rep[i]];
        acc[r] = Some(acc[r].unwrap_or_else(T::zero) + weights[i]);
    }
    let mut out_c = Vec::new();
    let mut out_w = Vec::new();
    for (i, w) in acc.into_iter().enumerate() {
        if let Some(w) = w {
            out_c.extend_from_slice(pt(i));
            out_w.push(w);
        }
    }
    (out_c, out_w)
}

fn nearest_neighbour_distances<T: Real>(m: &DiscreteMeasure<T>) -> Vec<T> {
    let n = m.len();
    let (lo, hi) = m.bounding_box();
    let extent = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| *b - *a)
        .fold(T::zero(), T::max)
        .max(T::min_positive_value());
    let cell = extent / T::lit((n as f64).powf(1.0 / m.dim() as f64)).max(T::one());
    let index = CellIndex::new(m.dim(), m.coords(), cell);
    let stride = (n / 2048).max(1);
    (0..n)
        .step_by(stride)
        .map(|i| {
            let p = m.point(i);
            let mut r = cell;
            loop {
                let mut best = T::infinity();
                index.for_each_within(m.coords(), p, r, |j, d2| {
                    if j != i {
                        best = best.min(d2);
                    }
                });
                if best.is_finite() {
                    return best.sqrt();
                }
                r = r + r;
            }
        })
        .collect()
}

/// `sum_{i != j} w_i w_j max(|p_i - p_j|, h_floor)^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszEnergy<T> {
    pub value: T,
    /// First pair of distinct atoms found at distance zero (only possible with `h_floor = 0`).
    pub coincident: Option<(usize, usize)>,
}

pub fn riesz_energy<T: Real>(
    mu: &DiscreteMeasure<T>,
    alpha: T,
    h_floor: T,
) -> Result<RieszEnergy<T>> {
    if mu.is_empty() {
        return param("energy of an empty measure");
    }
    if !(alpha > T::zero()) {
        return param("alpha must be positive");
    }
    let half = -alpha / T::lit(2.0);
    let floor2 = h_floor * h_floor;
    let d = mu.dim();
    let c = mu.coords();
    let w = mu.weights();
    let rows: Vec<(T, Option<usize>)> = (0..mu.len())
        .into_par_iter()
        .map(|i| {
            let pi = &c[i * d..(i + 1) * d];
            let mut s = T::zero();
            let mut hit = None;
            for j in (i + 1)..w.len() {
                let d2 = dist2(pi, &c[j * d..(j + 1) * d]).max(floor2);
                if d2 == T::zero() {
                    hit.get_or_insert(j);
                    continue;
                }
                s = s + w[j] * d2.powf(half);
            }
            (T::lit(2.0) * w[i] * s, hit)
        })
        .collect();
    let mut value = T::zero();
    let mut coincident = None;
    for (i, (v, hit)) in rows.into_iter().enumerate() {
        value = value + v;
        if let (None, Some(j)) = (coincident, hit) {
            coincident = Some((i.min(j), i.max(j)));
        }
    }
    if coincident.is_some() {
        value = T::infinity();
    }
    Ok(RieszEnergy { value, coincident })
}

/// Dyadic radii `hi, hi/2, hi/4, ...` down to `lo`, returned ascending.
pub fn dyadic_radii<T: Real>(lo: T, hi: T) -> Vec<T> {
    let mut out = Vec::new();
    if !(lo > T::zero()) || hi < lo {
        return out;
    }
    let mut r = hi;
    while r >= lo * (T::one() - T::lit(1e-12)) {
        out.push(r);
        r = r / T::lit(2.0);
    }
    out.reverse();
    out
}

/// Frostman centres: every `support_stride`-th atom (0 disables) plus
/// `box_samples` seeded uniform points of the bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub support_stride: usize,
    pub box_samples: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self { support_stride: 1, box_samples: 256, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrostmanReport<T> {
    pub alpha: T,
    pub constant: T,
    pub worst_center: Vec<T>,
    pub worst_radius: T,
    pub radii: Vec<T>,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn centers<T: Real>(&self, mu: &DiscreteMeasure<T>) -> Vec<Vec<T>> {
        let mut out: Vec<Vec<T>> = Vec::new();
        if self.support_stride > 0 {
            out.extend(mu.points().step_by(self.support_stride).map(|p| p.to_vec()));
        }
        if self.box_samples > 0 && !mu.is_empty() {
            let (lo, hi) = mu.bounding_box();
            let mut g = rng::stream(self.seed, 0);
            for _ in 0..self.box_samples {
                out.push(
                    lo.iter()
                        .zip(&hi)
                        .map(|(&a, &b)| a + rng::uniform::<T, _>(&mut g) * (b - a))
                        .collect(),
                );
            }
        }
        out
    }
}

/// `max mu(B(x, r)) / r^alpha` over the plan's centres and the given radii.
pub fn frostman_constant<T: Real>(
    mu: &DiscreteMeasure<T>,
    alpha: T,
    plan: &SamplingPlan,
    radii: &[T],
) -> Result<FrostmanReport<T>> {
    if radii.is_empty() {
        return param("empty radius range");
    }
    if radii.iter().any(|r| !(*r > T::zero())) {
        return param("radii must be positive");
    }
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let centers = plan.centers(mu);
    if centers.is_empty() {
        return param("sampling plan produced no centres");
    }
    let r2: Vec<T> = radii.iter().map(|r| *r * *r).collect();
    let scale: Vec<T> = radii.iter().map(|r| r.powf(-alpha)).collect();
    let per_center: Vec<(T, usize)> = centers
        .par_iter()
        .map(|c| {
            let mut hist = vec![T::zero(); radii.len()];
            for (p, w) in mu.atoms() {
                let d2 = dist2(p, c);
                let k = r2.partition_point(|&r| r < d2);
                if k < hist.len() {
                    hist[k] = hist[k] + w;
                }
            }
            let mut acc = T::zero();
            let mut best = (T::neg_infinity(), 0);
            for (k, h) in hist.iter().enumerate() {
                acc = acc + *h;
                let v = acc * scale[k];
                if v > best.0 {
                    best = (v, k);
                }
            }
            best
        })
        .collect();
    let mut best = (T::neg_infinity(), 0usize, 0usize);
    for (ci, (v, k)) in per_center.into_iter().enumerate() {
        if v > best.0 {
            best = (v, ci, k);
        }
    }
    Ok(FrostmanReport {
        alpha,
        constant: best.0.max(T::zero()),
        worst_center: centers[best.1].clone(),
        worst_radius: radii[best.2],
        radii,
        seed: plan.seed,
    })
}

/// Concatenates coordinates and multiplies weights; atoms ordered `a`-major.
pub fn product_measure<T: Real>(
    a: &DiscreteMeasure<T>,
    b: &DiscreteMeasure<T>,
) -> Result<DiscreteMeasure<T>> {
    let dim = a.dim() + b.dim();
    let mut coords = Vec::with_capacity(a.len() * b.len() * dim);
    let mut weights = Vec::with_capacity(a.len() * b.len());
    for (p, wp) in a.atoms() {
        for (q, wq) in b.atoms() {
            coords.extend_from_slice(p);
            coords.extend_from_slice(q);
            weights.push(wp * wq);
        }
    }
    let mut m = DiscreteMeasure::from_flat(dim, coords, weights)?;
    m.probability = a.probability && b.probability;
    m.resolution = match (a.resolution, b.resolution) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    };
    Ok(m)
}

pub fn normalize<T: Real>(mu: &DiscreteMeasure<T>) -> Result<DiscreteMeasure<T>> {
    if !(mu.total_mass > T::zero()) {
        return Err(Error::Degenerate("cannot normalize a zero-mass measure".into()));
    }
    let m = mu.total_mass;
    let mut out = mu.clone();
    for w in &mut out.weights {
        *w = *w / m;
    }
    out.total_mass = out.weights.iter().copied().sum();
    out.probability = (out.total_mass - T::one()).abs() <= T::merge_tol();
    Ok(out)
}

/// Axis-aligned box, closed ball, or the whole space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region<T> {
    All,
    Box { lo: Vec<T>, hi: Vec<T> },
    Ball { center: Vec<T>, radius: T },
}

impl<T: Real> Region<T> {
    pub fn contains(&self, p: &[T]) -> bool {
        match self {
            Region::All => true,
            Region::Box { lo, hi } => p
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&x, (&a, &b))| x >= a && x <= b),
            Region::Ball { center, radius } => dist2(p, center) <= *radius * *radius,
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        let ok = match self {
            Region::All => true,
            Region::Box { lo, hi } => lo.len() == dim && hi.len() == dim,
            Region::Ball { center, .. } => center.len() == dim,
        };
        if ok {
            Ok(())
        } else {
            param("region dimension does not match the measure")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restriction<T: Real> {
    /// Same atoms as the source, weights zeroed outside the region.
    pub measure: DiscreteMeasure<T>,
    pub retained_mass: T,
    pub source_mass: T,
}

pub fn restrict<T: Real>(mu: &DiscreteMeasure<T>, region: &Region<T>) -> Result<Restriction<T>> {
    region.check_dim(mu.dim())?;
    let mut out = mu.clone();
    for (i, w) in out.weights.iter_mut().enumerate() {
        if !region.contains(&mu.coords[i * mu.dim..(i + 1) * mu.dim]) {
            *w = T::zero();
        }
    }
    out.total_mass = out.weights.iter().copied().sum();
    out.probability = false;
    Ok(Restriction { retained_mass: out.total_mass, source_mass: mu.total_mass, measure: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> DiscreteMeasure<f64> {
        DiscreteMeasure::new(1, vec![vec![0.0], vec![0.5]], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn energy_point_mass_is_zero() {
        let m = DiscreteMeasure::point_mass(vec![0.0, 0.0]);
        assert_eq!(riesz_energy(&m, 1.3, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn energy_two_points() {
        let e = riesz_energy(&two_points(), 1.0, 0.0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-15);
        assert!(e.coincident.is_none());
    }

    #[test]
    fn energy_floor_clamps_distance() {
        let e = riesz_energy(&two_points(), 1.0, 1.0).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coincident_points_are_merged() {
        let m = DiscreteMeasure::new(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1e-14]],
            vec![0.25, 0.5, 0.25],
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.weights(), &[0.5, 0.5]);
        assert_eq!(m.point(0), &[0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DiscreteMeasure::new(2, vec![vec![0.0]], vec![1.0]).is_err());
        assert!(DiscreteMeasure::new(1, vec![vec![0.0]], vec![-1.0]).is_err());
        assert!(DiscreteMeasure::<f64>::from_flat(1, vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(two_points().into_probability().is_ok());
        let heavy = DiscreteMeasure::new(1, vec![vec![0.0]], vec![2.0]).unwrap();
        assert!(heavy.into_probability().is_err());
    }

    #[test]
    fn normalize_rescales() {
        let m = DiscreteMeasure::<f64>::new(1, vec![vec![0.0], vec![1.0], vec![2.0]], vec![2.0; 3]).unwrap();
        let n = normalize(&m).unwrap();
        for w in n.weights() {
            assert!((w - 2.0 / 6.0).abs() < 1e-15);
        }
        assert!(n.is_probability());
        let z = DiscreteMeasure::new(1, vec![vec![0.0]], vec![0.0]).unwrap();
        assert!(matches!(normalize(&z), Err(Error::Degenerate(_))));
    }

    #[test]
    fn restrict_zeroes_outside() {
        let m = two_points();
        let r = restrict(&m, &Region::Ball { center: vec![0.0], radius: 0.1 }).unwrap();
        assert_eq!(r.retained_mass, 0.5);
        assert_eq!(r.measure.len(), 2);
        assert_eq!(r.measure.weights()[1], 0.0);
        assert!(restrict(&m, &Region::Ball { center: vec![0.0, 0.0], radius: 1.0 }).is_err());
    }

    #[test]
    fn frostman_empty_radii_is_error() {
        let m = two_points();
        assert!(frostman_constant(&m, 0.5, &SamplingPlan::default(), &[]).is_err());
    }

    #[test]
    fn frostman_worst_pair_reproduces() {
        let m = two_points();
        let radii = dyadic_radii(1e-3, 1.0);
        let rep = frostman_constant(&m, 0.5, &SamplingPlan::default(), &radii).unwrap();
        let again = m.ball_mass(&rep.worst_center, rep.worst_radius) / rep.worst_radius.powf(0.5);
        assert!((again - rep.constant).abs() <= 1e-12 * rep.constant);
    }

    #[test]
    fn dyadic_radii_range() {
        let r = dyadic_radii(0.01_f64, 1.0);
        assert_eq!(r.len(), 7);
        assert_eq!(r[6], 1.0);
        assert!((r[0] - 1.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn json_and_csv_roundtrip() {
        let m = DiscreteMeasure::new(2, vec![vec![0.1, 0.2], vec![0.3, -0.4]], vec![0.25, 0.75])
            .unwrap();
        let back = DiscreteMeasure::<f64>::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = DiscreteMeasure::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.coords(), m.coords());
        assert_eq!(back.weights(), m.weights());
    }
}
