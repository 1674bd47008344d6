//! Seeded, counter-based random streams.
//!
//! Every randomized routine takes a `u64` seed. Parallel work is split into
//! fixed-size blocks and block `i` draws from ChaCha stream `i`, so results
//! do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

pub type StreamRng = ChaCha8Rng;

/// Samples per parallel block.
pub const BLOCK: usize = 1 << 14;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer; derives child seeds as `mix(master, index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.random::<f64>())
}

/// Standard normal via Box-Muller (one of the pair is discarded).
#[inline]
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform direction on `S^{d-1}`, written into `out`.
pub fn direction<T: Real, R: Rng + ?Sized>(rng: &mut R, out: &mut [T]) {
    match out.len() {
        1 => out[0] = if rng.random::<bool>() { T::one() } else { -T::one() },
        2 => {
            let t = std::f64::consts::TAU * rng.random::<f64>();
            out[0] = T::lit(t.cos());
            out[1] = T::lit(t.sin());
        }
        3 => {
            let z = 2.0 * rng.random::<f64>() - 1.0;
            let t = std::f64::consts::TAU * rng.random::<f64>();
            let s = (1.0 - z * z).max(0.0).sqrt();
            out[0] = T::lit(s * t.cos());
            out[1] = T::lit(s * t.sin());
            out[2] = T::lit(z);
        }
        _ => loop {
            let mut n2 = 0.0;
            let g: Vec<f64> = (0..out.len()).map(|_| normal(rng)).collect();
            for v in &g {
                n2 += v * v;
            }
            if n2 > 1e-300 {
                let n = n2.sqrt();
                for (o, v) in out.iter_mut().zip(g) {
                    *o = T::lit(v / n);
                }
                return;
            }
        },
    }
}

/// Radius in `[lo, hi]` with density proportional to `r^{d-1}`.
#[inline]
pub fn shell_radius<T: Real>(u: T, lo: T, hi: T, d: usize) -> T {
    if d == 1 {
        return lo + u * (hi - lo);
    }
    let di = d as i32;
    let a = lo.max(T::zero()).powi(di);
    let b = hi.powi(di);
    let v = a + u * (b - a);
    match d {
        2 => v.sqrt(),
        3 => v.cbrt(),
        _ => v.powf(T::one() / T::from_usize_lossy(d)),
    }
}

/// Additive-recurrence (Kronecker) low-discrepancy sequence with a seeded
/// Cranley-Patterson shift.
#[derive(Debug, Clone)]
pub struct Kronecker {
    alpha: Vec<f64>,
    shift: Vec<f64>,
}

impl Kronecker {
    pub fn new(dim: usize, seed: u64) -> Self {
        // phi_d is the unique positive root of x^{d+1} = x + 1.
        let mut phi = 2.0_f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha = (1..=dim).map(|i| (1.0 / phi.powi(i as i32)).fract()).collect();
        let mut rng = stream(seed, u64::MAX);
        let shift = (0..dim).map(|_| rng.random::<f64>()).collect();
        Self { alpha, shift }
    }

    /// The `n`-th point in `[0,1)^d`.
    pub fn point(&self, n: u64, out: &mut [f64]) {
        for ((o, a), s) in out.iter_mut().zip(&self.alpha).zip(&self.shift) {
            let prod = (n as f64) * a;
            *o = (prod.fract() + s).fract();
        }
    }
}
