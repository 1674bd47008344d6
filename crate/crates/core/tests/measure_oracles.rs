use pinned_core::generate::{cantor_measure, uniform_grid};
use pinned_core::measure::{
    dyadic_radii, frostman_constant, normalize, product_measure, restrict, riesz_energy, SamplingPlan,
};
use pinned_core::{Measure, Region};

/// Closed-form `alpha`-energy of Lebesgue measure on `[0, 1]`.
fn interval_energy(alpha: f64) -> f64 {
    2.0 / ((1.0 - alpha) * (2.0 - alpha))
}

/// The same energy by composite midpoint rule on `int_0^1 2 (1 - u) u^{-alpha} du`
/// after the substitution `u = v^{1/(1-alpha)}`, which removes the singularity.
fn interval_energy_quadrature(alpha: f64) -> f64 {
    let n = 200_000;
    let k = 1.0 / (1.0 - alpha);
    (0..n)
        .map(|i| {
            let v = (i as f64 + 0.5) / n as f64;
            let u = v.powf(k);
            2.0 * (1.0 - u) * k
        })
        .sum::<f64>()
        / n as f64
}

/// Brute-force `sup mu(B(x, r)) / r^alpha` over every atom and the given radii.
fn exhaustive_frostman(mu: &Measure, alpha: f64, radii: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for c in mu.points() {
        for &r in radii {
            let m: f64 = mu.atoms().filter(|(p, _)| pinned_core::scalar::dist(p, c) <= r).map(|(_, w)| w).sum();
            best = best.max(m / r.powf(alpha));
        }
    }
    best
}

#[test]
fn interval_energy_closed_form_matches_quadrature() {
    for alpha in [0.25, 0.5, 0.75] {
        let q = interval_energy_quadrature(alpha);
        assert!((q - interval_energy(alpha)).abs() < 1e-6 * interval_energy(alpha));
    }
}

#[test]
fn uniform_interval_energy_at_half() {
    let mu = uniform_grid(&[0.0], &[1.0], 10_000).unwrap();
    let e = riesz_energy(&mu, 0.5, 0.0).unwrap().value;
    let want = interval_energy(0.5);
    assert!((e - want).abs() < 0.02 * want, "{e} vs {want}");
}

#[test]
fn point_mass_frostman_diverges() {
    let mu = Measure::point_mass(vec![0.2, 0.3]);
    let radii = dyadic_radii(1e-7, 1.0);
    let rep = frostman_constant(&mu, 0.5, &SamplingPlan::default(), &radii).unwrap();
    let smallest = radii[0];
    assert!(rep.constant >= 1e3);
    assert!((rep.constant - smallest.powf(-0.5)).abs() < 1e-9 * rep.constant);
}

#[test]
fn planar_grid_frostman_at_two() {
    let mu = uniform_grid(&[0.0, 0.0], &[1.0, 1.0], 100).unwrap();
    let radii = dyadic_radii(0.01, 1.0);
    let rep = frostman_constant(&mu, 2.0, &SamplingPlan::default(), &radii).unwrap();
    assert!(rep.constant <= 4.0, "{}", rep.constant);
    // area comparison: mu(B(x, r)) <= pi r^2 up to one cell of slack
    for &r in &radii {
        let m = mu.ball_mass(&[0.5, 0.5], r);
        assert!(m <= std::f64::consts::PI * (r + 0.01f64.hypot(0.01)).powi(2));
    }
}

#[test]
fn cantor_frostman_matches_exhaustive_count() {
    let mu = cantor_measure(1, 1.0 / 3.0, 8, None).unwrap();
    let alpha = 2f64.ln() / 3f64.ln();
    let radii = dyadic_radii(3f64.powi(-7), 1.0);
    let rep = frostman_constant(&mu, alpha, &SamplingPlan { support_stride: 1, box_samples: 0, seed: 0 }, &radii).unwrap();
    let oracle = exhaustive_frostman(&mu, alpha, &radii);
    assert!(rep.constant <= 10.0);
    assert!((rep.constant - oracle).abs() <= 1e-12 * oracle);
}

#[test]
fn cantor_frostman_uniform_in_depth() {
    let alpha = 2f64.ln() / 3f64.ln();
    let consts: Vec<f64> = (4..=8)
        .map(|k| {
            let mu = cantor_measure(1, 1.0 / 3.0, k, None).unwrap();
            let radii = dyadic_radii(mu.resolution().unwrap(), 1.0);
            frostman_constant(&mu, alpha, &SamplingPlan::default(), &radii).unwrap().constant
        })
        .collect();
    let hi = consts.iter().cloned().fold(0.0, f64::max);
    let lo = consts.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 2.0, "{consts:?}");
}

#[test]
fn frostman_nondecreasing_in_alpha_for_small_radii() {
    let mu = cantor_measure(2, 1.0 / 3.0, 4, None).unwrap();
    let radii = dyadic_radii(1.0 / 81.0, 1.0);
    let plan = SamplingPlan { seed: 4, ..SamplingPlan::default() };
    let mut prev = 0.0;
    for alpha in [0.2, 0.5, 0.8, 1.1, 1.4, 1.7] {
        let c = frostman_constant(&mu, alpha, &plan, &radii).unwrap().constant;
        assert!(c >= prev);
        prev = c;
    }
}

#[test]
fn cantor_energy_bounded_below_and_diverging_above_dimension() {
    let dim = 2f64.ln() / 3f64.ln();
    let energies = |alpha: f64| -> Vec<f64> {
        (4..=8)
            .map(|k| {
                let mu = cantor_measure(1, 1.0 / 3.0, k, None).unwrap();
                riesz_energy(&mu, alpha, mu.resolution().unwrap()).unwrap().value
            })
            .collect()
    };
    let below = energies(dim - 0.2);
    assert!(below.iter().cloned().fold(0.0, f64::max) < 1.5 * below[0], "{below:?}");
    let above = energies(dim + 0.2);
    assert!(above.windows(2).all(|w| w[1] > w[0]), "{above:?}");
    assert!(above[4] > 2.0 * above[0]);
}

#[test]
fn product_of_cantor_measures_is_planar_dust() {
    let a = cantor_measure(1, 1.0 / 3.0, 2, None).unwrap();
    let p = product_measure(&a, &a).unwrap();
    let dust = cantor_measure(2, 1.0 / 3.0, 2, None).unwrap();
    let key = |m: &Measure| {
        let mut v: Vec<(i64, i64, i64)> = m
            .atoms()
            .map(|(x, w)| ((x[0] * 1e9).round() as i64, (x[1] * 1e9).round() as i64, (w * 1e12).round() as i64))
            .collect();
        v.sort();
        v
    };
    assert_eq!(key(&p), key(&dust));
}

#[test]
fn normalize_constant_weights() {
    let m = Measure::new(2, (0..5).map(|i| vec![i as f64, 0.0]).collect(), vec![2.0; 5]).unwrap();
    let n = normalize(&m).unwrap();
    assert!(n.weights().iter().all(|&w| (w - 0.2).abs() < 1e-15));
    let zero = Measure::new(1, vec![vec![0.0]], vec![0.0]).unwrap();
    assert!(normalize(&zero).is_err());
}

#[test]
fn quarter_disc_restriction() {
    let mu = uniform_grid(&[0.0, 0.0], &[1.0, 1.0], 200).unwrap();
    let r = restrict(&mu, &Region::Ball { center: vec![0.0, 0.0], radius: 0.5 }).unwrap();
    // counting oracle: cell centres inside the quarter disc
    let h = 1.0 / 200.0;
    let mut count = 0usize;
    for i in 0..200 {
        for j in 0..200 {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            if x * x + y * y <= 0.25 {
                count += 1;
            }
        }
    }
    assert!((r.retained_mass - count as f64 * h * h).abs() < 1e-12);
    let want = std::f64::consts::PI / 16.0;
    assert!((r.retained_mass - want).abs() < 0.02 * want);
}

#[test]
fn energy_resolution_floor_is_monotone() {
    let mu = cantor_measure(1, 1.0 / 3.0, 6, None).unwrap();
    let e0 = riesz_energy(&mu, 0.5, 0.0).unwrap().value;
    let e1 = riesz_energy(&mu, 0.5, 0.01).unwrap().value;
    assert!(e1 <= e0);
}

#[test]
fn single_precision_energy_agrees() {
    let mu32 = uniform_grid::<f32>(&[0.0], &[1.0], 1000).unwrap();
    let mu64 = uniform_grid::<f64>(&[0.0], &[1.0], 1000).unwrap();
    let a = riesz_energy(&mu32, 0.5, 0.0).unwrap().value as f64;
    let b = riesz_energy(&mu64, 0.5, 0.0).unwrap().value;
    assert!((a - b).abs() < 1e-3 * b);
}
