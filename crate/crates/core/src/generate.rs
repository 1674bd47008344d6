//! Test-measure generators.

use crate::error::{param, Error, Result};
use crate::measure::DiscreteMeasure;
use crate::scalar::Real;

/// Upper bound on generated atom counts.
pub const MAX_ATOMS: usize = 1 << 22;

/// Natural self-similar measure on the `d`-fold product of the Cantor set
/// with contraction `ratio`, discretised at `depth`: one atom at the centre
/// of every depth-level cell.
///
/// `branch_weights` sets the mass split between the left and right child
/// (default `[1/2, 1/2]`); in `d > 1` the per-axis splits multiply.
pub fn cantor_measure<T: Real>(
    d: usize,
    ratio: T,
    depth: usize,
    branch_weights: Option<[T; 2]>,
) -> Result<DiscreteMeasure<T>> {
    if d == 0 {
        return param("dimension must be at least 1");
    }
    if !(ratio > T::zero() && ratio <= T::lit(0.5)) {
        return param(format!("ratio {ratio} outside (0, 1/2]"));
    }
    let count = 1usize
        .checked_shl((d * depth) as u32)
        .filter(|&n| d * depth < usize::BITS as usize && n <= MAX_ATOMS)
        .ok_or_else(|| {
            Error::Resource(format!("2^({d}*{depth}) atoms exceed the budget of {MAX_ATOMS}"))
        })?;
    let [wl, wr] = branch_weights.unwrap_or([T::lit(0.5), T::lit(0.5)]);
    if wl < T::zero() || wr < T::zero() || ((wl + wr) - T::one()).abs() > T::lit(1e-12) {
        return param("branch weights must be nonnegative and sum to 1");
    }

    // 1-d cells: left endpoints and masses
    let mut left = vec![T::zero()];
    let mut mass = vec![T::one()];
    let mut size = T::one();
    for _ in 0..depth {
        let child = size * ratio;
        let mut nl = Vec::with_capacity(left.len() * 2);
        let mut nm = Vec::with_capacity(left.len() * 2);
        for (&a, &m) in left.iter().zip(&mass) {
            nl.push(a);
            nm.push(m * wl);
            nl.push(a + size - child);
            nm.push(m * wr);
        }
        left = nl;
        mass = nm;
        size = child;
    }
    let half = size / T::lit(2.0);
    let centers: Vec<T> = left.iter().map(|&a| a + half).collect();

    let n1 = centers.len();
    let mut coords = Vec::with_capacity(count * d);
    let mut weights = Vec::with_capacity(count);
    let mut idx = vec![0usize; d];
    for _ in 0..count {
        let mut w = T::one();
        for &i in &idx {
            coords.push(centers[i]);
            w = w * mass[i];
        }
        weights.push(w);
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < n1 {
                break;
            }
            idx[k] = 0;
        }
    }
    let m = DiscreteMeasure::from_flat(d, coords, weights)?.with_resolution(size);
    if branch_weights.is_none() {
        m.into_probability()
    } else {
        Ok(m)
    }
}

/// Similarity dimension `d log 2 / log(1/ratio)` of the product Cantor set.
pub fn cantor_dimension<T: Real>(d: usize, ratio: T) -> T {
    T::from_usize_lossy(d) * T::LN_2() / (T::one() / ratio).ln()
}

/// Uniform probability measure on the box `[lo, hi]`, one atom per cell centre.
pub fn uniform_grid<T: Real>(lo: &[T], hi: &[T], per_axis: usize) -> Result<DiscreteMeasure<T>> {
    let d = lo.len();
    if d == 0 || hi.len() != d || per_axis == 0 {
        return param("uniform grid needs matching nonempty bounds and per_axis >= 1");
    }
    let count = per_axis
        .checked_pow(d as u32)
        .filter(|&n| n <= MAX_ATOMS)
        .ok_or_else(|| Error::Resource(format!("{per_axis}^{d} atoms exceed the budget")))?;
    let n = T::from_usize_lossy(per_axis);
    let w = T::one() / T::from_usize_lossy(count);
    let mut coords = Vec::with_capacity(count * d);
    let mut idx = vec![0usize; d];
    for _ in 0..count {
        for k in 0..d {
            let t = (T::from_usize_lossy(idx[k]) + T::lit(0.5)) / n;
            coords.push(lo[k] + t * (hi[k] - lo[k]));
        }
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
        }
    }
    let spacing = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| (b - a) / n)
        .fold(T::zero(), T::max);
    let m = DiscreteMeasure::from_flat(d, coords, vec![w; count])?.with_resolution(spacing);
    // large grids can miss the 1e-12 mass tolerance through rounding alone
    Ok(m.clone().into_probability().unwrap_or(m))
}

/// Uniform probability measure on the segment `[a, b]`, `n` atoms at cell centres.
pub fn segment<T: Real>(a: &[T], b: &[T], n: usize) -> Result<DiscreteMeasure<T>> {
    if a.len() != b.len() || a.is_empty() || n == 0 {
        return param("segment needs matching endpoints and n >= 1");
    }
    let nn = T::from_usize_lossy(n);
    let mut coords = Vec::with_capacity(n * a.len());
    for i in 0..n {
        let t = (T::from_usize_lossy(i) + T::lit(0.5)) / nn;
        coords.extend(a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)));
    }
    let len = crate::scalar::dist(a, b);
    let m = DiscreteMeasure::from_flat(a.len(), coords, vec![T::one() / nn; n])?;
    Ok(m.with_resolution(len / nn))
}

/// Uniform measure on the circle of `radius` about `center` (first two axes).
pub fn circle<T: Real>(center: &[T], radius: T, n: usize) -> Result<DiscreteMeasure<T>> {
    if center.len() < 2 || n == 0 {
        return param("circle needs dimension >= 2 and n >= 1");
    }
    let nn = T::from_usize_lossy(n);
    let mut coords = Vec::with_capacity(n * center.len());
    for i in 0..n {
        let t = T::TAU() * T::from_usize_lossy(i) / nn;
        let mut p = center.to_vec();
        p[0] = p[0] + radius * t.cos();
        p[1] = p[1] + radius * t.sin();
        coords.extend(p);
    }
    let m = DiscreteMeasure::from_flat(center.len(), coords, vec![T::one() / nn; n])?;
    Ok(m.with_resolution(T::TAU() * radius / nn))
}
