//! Scalar fields sampled on regular grids.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::scalar::Real;

/// Values on the nodes `origin + spacing * i`, `0 <= i_k < extents[k]`,
/// stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction<T> {
    dim: usize,
    origin: Vec<T>,
    spacing: T,
    extents: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn zeros(origin: Vec<T>, spacing: T, extents: Vec<usize>) -> Result<Self> {
        let n = Self::check_shape(&origin, spacing, &extents)?;
        Ok(Self { dim: origin.len(), origin, spacing, extents, values: vec![T::zero(); n] })
    }

    pub fn from_values(origin: Vec<T>, spacing: T, extents: Vec<usize>, values: Vec<T>) -> Result<Self> {
        let n = Self::check_shape(&origin, spacing, &extents)?;
        if values.len() != n {
            return param(format!("{} values for a grid of {n} nodes", values.len()));
        }
        Ok(Self { dim: origin.len(), origin, spacing, extents, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(&[T]) -> T>(origin: Vec<T>, spacing: T, extents: Vec<usize>, f: F) -> Result<Self> {
        let mut g = Self::zeros(origin, spacing, extents)?;
        let mut x = vec![T::zero(); g.dim];
        for i in 0..g.values.len() {
            g.node_into(i, &mut x);
            g.values[i] = f(&x);
        }
        Ok(g)
    }

    fn check_shape(origin: &[T], spacing: T, extents: &[usize]) -> Result<usize> {
        if origin.is_empty() || origin.len() != extents.len() {
            return param("grid origin and extents must have the same nonzero length");
        }
        if !(spacing > T::zero()) {
            return param("grid spacing must be positive");
        }
        if extents.contains(&0) {
            return param("grid extents must be positive");
        }
        extents
            .iter()
            .try_fold(1usize, |a, &e| a.checked_mul(e))
            .filter(|&n| n <= 1 << 28)
            .ok_or_else(|| Error::Resource("grid too large".into()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn origin(&self) -> &[T] {
        &self.origin
    }
    pub fn spacing(&self) -> T {
        self.spacing
    }
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Volume of one cell, `h^d`.
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    pub fn node_into(&self, mut linear: usize, out: &mut [T]) {
        for k in (0..self.dim).rev() {
            let i = linear % self.extents[k];
            linear /= self.extents[k];
            out[k] = self.origin[k] + self.spacing * T::from_usize_lossy(i);
        }
    }

    pub fn node(&self, linear: usize) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim];
        self.node_into(linear, &mut x);
        x
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.extents).fold(0, |acc, (&i, &e)| acc * e + i)
    }

    /// `(lo, hi)` corners of the node hull.
    pub fn bounds(&self) -> (Vec<T>, Vec<T>) {
        let hi = self
            .origin
            .iter()
            .zip(&self.extents)
            .map(|(&o, &e)| o + self.spacing * T::from_usize_lossy(e - 1))
            .collect();
        (self.origin.clone(), hi)
    }

    /// Multilinear interpolation; zero outside the node hull. Constant data
    /// interpolate exactly (nested `a + t (b - a)`).
    pub fn interpolate(&self, x: &[T]) -> T {
        let d = self.dim;
        let mut base = [0usize; 8];
        let mut frac = [T::zero(); 8];
        let mut base_v;
        let mut frac_v;
        let (base, frac): (&mut [usize], &mut [T]) = if d <= 8 {
            (&mut base[..d], &mut frac[..d])
        } else {
            base_v = vec![0usize; d];
            frac_v = vec![T::zero(); d];
            (&mut base_v[..], &mut frac_v[..])
        };
        for k in 0..d {
            let u = (x[k] - self.origin[k]) / self.spacing;
            let last = T::from_usize_lossy(self.extents[k] - 1);
            if !(u >= T::zero() && u <= last) {
                return T::zero();
            }
            if self.extents[k] == 1 {
                base[k] = 0;
                frac[k] = T::zero();
                continue;
            }
            let mut i = u.floor().to_usize().unwrap_or(0);
            if i >= self.extents[k] - 1 {
                i = self.extents[k] - 2;
            }
            base[k] = i;
            frac[k] = u - T::from_usize_lossy(i);
        }
        // gather 2^d corners, then reduce the last axis first
        let corners = 1usize << d;
        let mut stack = [T::zero(); 16];
        let mut heap;
        let buf: &mut [T] = if corners <= 16 {
            &mut stack[..corners]
        } else {
            heap = vec![T::zero(); corners];
            &mut heap[..]
        };
        for (c, slot) in buf.iter_mut().enumerate() {
            let mut lin = 0usize;
            for k in 0..d {
                let bit = (c >> (d - 1 - k)) & 1;
                let i = (base[k] + bit).min(self.extents[k] - 1);
                lin = lin * self.extents[k] + i;
            }
            *slot = self.values[lin];
        }
        let mut len = corners;
        for k in (0..d).rev() {
            let t = frac[k];
            len /= 2;
            for j in 0..len {
                let a = buf[2 * j];
                let b = buf[2 * j + 1];
                buf[j] = a + t * (b - a);
            }
        }
        buf[0]
    }

    /// Binary layout: little-endian `u64` dim, `u64` extents, `f64` origin,
    /// `f64` spacing, then `f64` values row-major.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        for &e in &self.extents {
            w.write_all(&(e as u64).to_le_bytes())?;
        }
        for &o in &self.origin {
            w.write_all(&o.to_f64_lossy().to_le_bytes())?;
        }
        w.write_all(&self.spacing.to_f64_lossy().to_le_bytes())?;
        for &v in &self.values {
            w.write_all(&v.to_f64_lossy().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut b = [0u8; 8];
        let mut next_u = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut b)?;
            Ok(u64::from_le_bytes(b))
        };
        let dim = next_u(&mut r)? as usize;
        if dim == 0 || dim > 16 {
            return param(format!("implausible grid dimension {dim}"));
        }
        let extents: Vec<usize> = (0..dim).map(|_| next_u(&mut r).map(|e| e as usize)).collect::<Result<_>>()?;
        let mut next_f = |r: &mut R| -> Result<T> { Ok(T::lit(f64::from_bits(next_u(r)?))) };
        let origin: Vec<T> = (0..dim).map(|_| next_f(&mut r)).collect::<Result<_>>()?;
        let spacing = next_f(&mut r)?;
        let n = Self::check_shape(&origin, spacing, &extents)?;
        let values: Vec<T> = (0..n).map(|_| next_f(&mut r)).collect::<Result<_>>()?;
        Self::from_values(origin, spacing, extents, values)
    }

    /// CSV rows `x0,..,x{d-1},value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim).map(|k| format!("x{k}")).collect();
        header.push("value".into());
        wr.write_record(&header)?;
        let mut x = vec![T::zero(); self.dim];
        for (i, v) in self.values.iter().enumerate() {
            self.node_into(i, &mut x);
            let mut row: Vec<String> = x.iter().map(|c| format!("{c:e}")).collect();
            row.push(format!("{v:e}"));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_for_constants_and_linear() {
        let g = GridFunction::<f64>::from_fn(vec![0.0, 0.0], 0.1, vec![11, 11], |_| 1.0).unwrap();
        for x in [[0.0, 0.0], [0.33, 0.71], [1.0, 1.0], [0.999, 0.05]] {
            assert_eq!(g.interpolate(&x), 1.0);
        }
        assert_eq!(g.interpolate(&[1.01, 0.5]), 0.0);
        let lin = GridFunction::<f64>::from_fn(vec![0.0, 0.0], 0.1, vec![11, 11], |p| 2.0 * p[0] - p[1]).unwrap();
        let v = lin.interpolate(&[0.37, 0.52]);
        assert!((v - (0.74 - 0.52)).abs() < 1e-12);
    }

    #[test]
    fn binary_roundtrip() {
        let g = GridFunction::<f64>::from_fn(vec![-1.0, 0.5], 0.25, vec![3, 4], |p| p[0] * p[1]).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 * (1 + 2 + 2 + 1 + 12));
        let back = GridFunction::<f64>::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn shape_errors() {
        assert!(GridFunction::<f64>::zeros(vec![0.0], 0.0, vec![3]).is_err());
        assert!(GridFunction::<f64>::zeros(vec![0.0], 1.0, vec![0]).is_err());
        assert!(GridFunction::<f64>::from_values(vec![0.0], 1.0, vec![3], vec![1.0]).is_err());
    }
}
