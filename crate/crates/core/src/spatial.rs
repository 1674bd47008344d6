//! Uniform bucket grid for fixed-radius neighbour queries.

use std::collections::HashMap;

use crate::scalar::{dist2, Real};

/// Buckets point indices by `floor(x / cell)`. Queries visit neighbouring
/// buckets in lexicographic order and indices in ascending order, so any sum
/// accumulated over a query is reproducible.
#[derive(Debug, Clone)]
pub struct CellIndex<T: Real> {
    dim: usize,
    cell: T,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl<T: Real> CellIndex<T> {
    pub fn new(dim: usize, coords: &[T], cell: T) -> Self {
        assert!(cell > T::zero(), "cell size must be positive");
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            buckets.entry(key(p, cell)).or_default().push(i);
        }
        Self { dim, cell, buckets }
    }

    pub fn cell(&self) -> T {
        self.cell
    }

    /// Calls `f(index, squared_distance)` for every point with `|p - center| <= radius`.
    pub fn for_each_within<F: FnMut(usize, T)>(
        &self,
        coords: &[T],
        center: &[T],
        radius: T,
        mut f: F,
    ) {
        let r2 = radius * radius;
        self.for_each_candidate(center, radius, |i| {
            let p = &coords[i * self.dim..(i + 1) * self.dim];
            let d2 = dist2(p, center);
            if d2 <= r2 {
                f(i, d2);
            }
        });
    }

    /// Calls `f(index)` for every point in buckets overlapping the box `center +- radius`.
    pub fn for_each_candidate<F: FnMut(usize)>(&self, center: &[T], radius: T, mut f: F) {
        let lo: Vec<i64> = center
            .iter()
            .map(|&c| ((c - radius) / self.cell).floor().to_i64().unwrap_or(i64::MIN / 4))
            .collect();
        let hi: Vec<i64> = center
            .iter()
            .map(|&c| ((c + radius) / self.cell).floor().to_i64().unwrap_or(i64::MAX / 4))
            .collect();
        let span: i128 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as i128).product();
        if span > self.buckets.len() as i128 * 4 {
            // sparse occupancy: scan buckets instead of the box
            let mut keys: Vec<&Vec<i64>> = self
                .buckets
                .keys()
                .filter(|k| k.iter().zip(&lo).zip(&hi).all(|((v, a), b)| v >= a && v <= b))
                .collect();
            keys.sort();
            for k in keys {
                for &i in &self.buckets[k] {
                    f(i);
                }
            }
            return;
        }
        let mut cur = lo.clone();
        loop {
            if let Some(v) = self.buckets.get(&cur) {
                for &i in v {
                    f(i);
                }
            }
            // odometer increment, last axis fastest
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = lo[axis];
            }
        }
    }
}

fn key<T: Real>(p: &[T], cell: T) -> Vec<i64> {
    p.iter()
        .map(|&x| (x / cell).floor().to_i64().unwrap_or(0))
        .collect()
}
