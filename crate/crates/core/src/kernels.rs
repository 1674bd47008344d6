//! Truncated Riesz kernels `|x|^{-rho} 1_{|x| < cutoff}`, their
//! convolutions with atomic measures, and grid norms.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::scalar::{norm, Real};
use crate::spatial::CellIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec<T> {
    pub rho: T,
    pub cutoff: T,
    pub dim: usize,
}

impl<T: Real> KernelSpec<T> {
    pub fn new(rho: T, cutoff: T, dim: usize) -> Result<Self> {
        if !(cutoff > T::zero()) {
            return param("kernel cutoff must be positive");
        }
        if rho < T::zero() {
            return param("kernel exponent must be nonnegative");
        }
        if dim == 0 {
            return param("kernel dimension must be at least 1");
        }
        Ok(Self { rho, cutoff, dim })
    }

    /// Cutoff pair `(r(1), r(d))` with `r(1) = r0 / 4` and `r(d) = factor * r(1)`.
    pub fn default_cutoffs(r0: T, factor: T) -> (T, T) {
        let r1 = r0 / T::lit(4.0);
        (r1, factor * r1)
    }

    /// Kernel as a function of `|x|`. Distances below `cap` are evaluated at `cap`.
    #[inline]
    pub fn radial(&self, r: T, cap: T) -> T {
        if r >= self.cutoff {
            return T::zero();
        }
        if self.rho == T::zero() {
            return T::one();
        }
        let r = r.max(cap);
        if r == T::zero() {
            T::infinity()
        } else {
            r.powf(-self.rho)
        }
    }

    pub fn eval(&self, x: &[T], cap: T) -> T {
        self.radial(norm(x), cap)
    }
}

/// `(nu * K)(g) = sum_i w_i K(g - p_i)` at every node of `template`, with
/// the singular cap equal to the grid spacing.
pub fn convolve_measure<T: Real>(
    mu: &DiscreteMeasure<T>,
    spec: &KernelSpec<T>,
    template: &GridFunction<T>,
) -> Result<GridFunction<T>> {
    if mu.dim() != spec.dim || template.dim() != spec.dim {
        return param("measure, kernel and grid dimensions differ");
    }
    let h = template.spacing();
    let required = spec.cutoff / T::lit(4.0);
    if h > required {
        return param(format!(
            "grid spacing {h} does not resolve the kernel; need spacing <= {required}"
        ));
    }
    let index = CellIndex::new(mu.dim(), mu.coords(), spec.cutoff);
    let d = spec.dim;
    let w = mu.weights();
    let values: Vec<T> = (0..template.len())
        .into_par_iter()
        .map_init(
            || vec![T::zero(); d],
            |x, i| {
                template.node_into(i, x);
                let mut acc = T::zero();
                index.for_each_within(mu.coords(), x, spec.cutoff, |j, d2| {
                    if w[j] != T::zero() {
                        acc = acc + w[j] * spec.radial(d2.sqrt(), h);
                    }
                });
                acc
            },
        )
        .collect();
    GridFunction::from_values(template.origin().to_vec(), h, template.extents().to_vec(), values)
}

/// `(h^d sum |v|^p)^{1/p}`; `p = inf` gives `max |v|`.
pub fn lp_norm<T: Real>(g: &GridFunction<T>, p: T) -> T {
    if p.is_infinite() {
        return g.values().iter().fold(T::zero(), |m, v| m.max(v.abs()));
    }
    let s: T = g.values().iter().map(|v| v.abs().powf(p)).sum();
    (g.cell_volume() * s).powf(T::one() / p)
}

/// Exponent `gamma + (d - gamma)/p - epsilon` at which `nu * K_rho` lies in `L^p`.
pub fn rho_for_exponent<T: Real>(gamma: T, p: T, d: usize, epsilon: T) -> T {
    gamma + (T::from_usize_lossy(d) - gamma) / p - epsilon
}

/// `|| (1 + |xi|^2)^{s/2} g^ ||_2` from the periodic DFT of the grid, with
/// `xi` in cycles per unit length (`g^(xi) = int g(x) e^{-2 pi i x.xi} dx`).
/// Extents must be powers of two; callers zero-pad so the support sits well
/// inside the box.
pub fn sobolev_norm<T: Real>(g: &GridFunction<T>, s: T) -> Result<T> {
    if let Some(e) = g.extents().iter().find(|e| !e.is_power_of_two()) {
        return param(format!("extent {e} is not a power of two"));
    }
    let ext = g.extents().to_vec();
    let d = ext.len();
    let total = g.len();
    let mut data: Vec<Complex<T>> = g.values().iter().map(|&v| Complex::new(v, T::zero())).collect();
    let mut planner = FftPlanner::<T>::new();
    // stride of axis k in row-major order
    let strides: Vec<usize> = (0..d).map(|k| ext[k + 1..].iter().product()).collect();
    for k in 0..d {
        let n = ext[k];
        if n == 1 {
            continue;
        }
        let fft = planner.plan_fft_forward(n);
        let stride = strides[k];
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        for start in 0..total {
            // visit each line once: start index has coordinate 0 on axis k
            if (start / stride) % n != 0 {
                continue;
            }
            for (j, c) in line.iter_mut().enumerate() {
                *c = data[start + j * stride];
            }
            fft.process(&mut line);
            for (j, c) in line.iter().enumerate() {
                data[start + j * stride] = *c;
            }
        }
    }
    let h = g.spacing();
    let freq = |k: usize, n: usize| -> T {
        let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        T::lit(kk) / (T::from_usize_lossy(n) * h)
    };
    let half_s = s / T::lit(2.0);
    let mut acc = T::zero();
    for (lin, c) in data.iter().enumerate() {
        let mut xi2 = T::zero();
        let mut rem = lin;
        for k in (0..d).rev() {
            let i = rem % ext[k];
            rem /= ext[k];
            let f = freq(i, ext[k]);
            xi2 = xi2 + f * f;
        }
        let weight = (T::one() + xi2).powf(half_s);
        let m = c.norm_sqr();
        acc = acc + weight * weight * m;
    }
    Ok((g.cell_volume() / T::from_usize_lossy(total) * acc).sqrt())
}
