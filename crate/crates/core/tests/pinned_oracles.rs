use std::f64::consts::PI;

use pinned_core::generate::{cantor_measure, circle, uniform_grid};
use pinned_core::pinned::{
    box_dimension, box_dimension_measure, distance_to_support, energy_dimension, lemma2_check, pin_measure,
    GrowthRule, Lemma2Params,
};
use pinned_core::Measure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn geometric(base: f64, from: i32, to: i32) -> Vec<f64> {
    (from..=to).rev().map(|k| base.powi(-k)).collect()
}

#[test]
fn cantor_box_dimension_at_powers_of_three() {
    let mu = cantor_measure(1, 1.0 / 3.0, 10, None).unwrap();
    let est = box_dimension(1, mu.coords(), &geometric(3.0, 2, 8)).unwrap();
    assert!((est.value - 2f64.ln() / 3f64.ln()).abs() < 0.05, "{}", est.value);
    // exact oracle: at scale 3^-k the Cantor set occupies 2^k boxes
    for c in &est.counts {
        let k = (-c.scale.ln() / 3f64.ln()).round() as i32;
        assert_eq!(c.count, 1usize << k);
    }
}

#[test]
fn uniform_sample_box_dimension_is_one() {
    let mut g = ChaCha8Rng::seed_from_u64(2024);
    let xs: Vec<f64> = (0..10_000).map(|_| g.random::<f64>()).collect();
    let scales = geometric(2.0, 2, 7);
    let est = box_dimension(1, &xs, &scales).unwrap();
    assert!((est.value - 1.0).abs() < 0.05, "{}", est.value);
    for c in &est.counts {
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut occupied: Vec<i64> = xs.iter().map(|x| ((x - lo) / c.scale).floor() as i64).collect();
        occupied.sort();
        occupied.dedup();
        assert!((occupied.len() as i64 - c.count as i64).abs() <= 1);
    }
}

#[test]
fn finite_set_below_gap_has_dimension_zero() {
    let xs = [0.1, 0.35, 0.5, 0.72, 0.9];
    let est = box_dimension(1, &xs, &geometric(2.0, 4, 9)).unwrap();
    assert!(est.value.abs() < 0.05);
    assert!(est.sparse);
}

#[test]
fn planar_dust_box_dimension() {
    let mu = cantor_measure(2, 1.0 / 3.0, 6, None).unwrap();
    let est = box_dimension(2, mu.coords(), &geometric(3.0, 1, 5)).unwrap();
    assert!((est.value - 4f64.ln() / 3f64.ln()).abs() < 0.05);
    let window = box_dimension_measure(&mu, None).unwrap();
    assert!(window.scale_lo < window.scale_hi);
}

#[test]
fn pinned_cantor_dust_matches_exhaustive_scan() {
    let nu: Measure = cantor_measure(2, 1.0 / 3.0, 5, None).unwrap();
    let x = [2.0, 2.0];
    let p = pin_measure(&nu, &x).unwrap();
    assert!((p.total_mass() - 1.0).abs() < 1e-12);
    let scan = nu.points().map(|q| (q[0] - 2.0).hypot(q[1] - 2.0)).fold(f64::INFINITY, f64::min);
    assert!((p.distances[0] - scan).abs() < 1e-15);
    assert!((distance_to_support(&nu, &x) - scan).abs() < 1e-15);
    assert!(p.distances.windows(2).all(|w| w[1] - w[0] > 1e-12));
}

#[test]
fn segment_pins_see_an_interval() {
    let nu = pinned_core::generate::segment::<f64>(&[0.0, 0.0], &[1.0, 0.0], 4096).unwrap();
    let p = pin_measure(&nu, &[0.3, 0.7]).unwrap();
    let est = box_dimension_measure(&p.as_measure().unwrap(), None).unwrap();
    assert!((est.value - 1.0).abs() < 0.1, "{}", est.value);
}

#[test]
fn energy_dimension_of_uniform_interval_saturates() {
    let levels: Vec<Measure> = (7..=10).map(|k| uniform_grid(&[0.0], &[1.0], 1 << k).unwrap()).collect();
    let alphas: Vec<f64> = (1..10).map(|i| 0.1 * i as f64).collect();
    let e = energy_dimension(&levels, &alphas, GrowthRule::default()).unwrap();
    assert!(e.saturated);
    assert!(e.value >= 0.9 - 1e-12);
    // closed form energies bound the discrete ones
    for row in &e.energy_table {
        let exact = 2.0 / ((1.0 - row.alpha) * (2.0 - row.alpha));
        assert!(row.energies.iter().all(|&v| v <= exact * 1.01));
    }
}

#[test]
fn energy_dimension_of_cantor_set() {
    let levels: Vec<Measure> = (5..=8).map(|k| cantor_measure(1, 1.0 / 3.0, k, None).unwrap()).collect();
    let alphas: Vec<f64> = (0..17).map(|i| 0.1 + 0.05 * i as f64).collect();
    let e = energy_dimension(&levels, &alphas, GrowthRule::default()).unwrap();
    assert!((e.value - 2f64.ln() / 3f64.ln()).abs() < 0.1, "{}", e.value);
    assert!(!e.saturated);
}

#[test]
fn energy_dimension_of_point_mass_is_degenerate() {
    let levels = vec![Measure::point_mass(vec![0.5]); 3];
    let e = energy_dimension(&levels, &[0.5], GrowthRule::default()).unwrap();
    assert_eq!(e.value, 0.0);
    assert!(e.degenerate);
}

fn preset(depth: u32) -> Lemma2Params<f64> {
    Lemma2Params { rho: 1.5, r0: 0.25, r1: 1.5, r_grid: 250, cutoff_1d: 0.125, cutoff_d: 0.5, depth }
}

/// Both sides for a measure whose pinned push-forward is a unit atom at `dist`.
/// `None` when the atom sits on an annulus boundary, where rounding decides.
fn point_like_ratio(dist: f64, r: f64, p: &Lemma2Params<f64>) -> Option<f64> {
    let kappa = p.rho + 1.0 - 2.0;
    let floor = 2f64.powi(-(p.depth as i32));
    let s = (r - dist).abs();
    let lhs = if s < p.cutoff_1d { s.max(floor).powf(-kappa) } else { 0.0 };
    let j0 = (-p.cutoff_d.log2()).ceil() as i32;
    let mut rhs = 0.0;
    for j in j0..=p.depth as i32 {
        let h = 2f64.powi(-j);
        if (s - h).abs() < 1e-9 {
            return None;
        }
        if s <= h {
            let shell = PI * ((r + h).powi(2) - (r - h).max(0.0).powi(2));
            rhs += 2f64.powf(p.rho * j as f64) * PI * h * h / shell;
        }
    }
    Some(if rhs > 0.0 { lhs / rhs } else if lhs > 0.0 { f64::INFINITY } else { 0.0 })
}

#[test]
fn pinned_convolution_single_atom_matches_closed_form() {
    let nu = Measure::point_mass(vec![0.6, 0.0]);
    let mut maxima = Vec::new();
    for depth in [8, 10, 12, 14] {
        let p = preset(depth);
        let rep = lemma2_check(&nu, &[0.0, 0.0], &p).unwrap();
        for (&r, &q) in rep.radii.iter().zip(&rep.ratios) {
            let Some(want) = point_like_ratio(0.6, r, &p) else { continue };
            assert!((q - want).abs() <= 1e-9 * want.max(1.0), "r = {r}: {q} vs {want}");
        }
        assert!(rep.max_ratio <= 16.0);
        maxima.push(rep.max_ratio);
    }
    let (lo, hi) = (maxima.iter().cloned().fold(f64::INFINITY, f64::min), maxima.iter().cloned().fold(0.0, f64::max));
    assert!(hi <= 1.1 * lo, "{maxima:?}");
}

#[test]
fn pinned_convolution_centred_circle_matches_closed_form() {
    let nu = circle::<f64>(&[0.0, 0.0], 1.0, 2000).unwrap().into_probability().unwrap();
    let mut maxima = Vec::new();
    for depth in [8, 11, 14] {
        let p = preset(depth);
        let rep = lemma2_check(&nu, &[0.0, 0.0], &p).unwrap();
        for (&r, &q) in rep.radii.iter().zip(&rep.ratios) {
            let Some(want) = point_like_ratio(1.0, r, &p) else { continue };
            assert!((q - want).abs() <= 1e-9 * want.max(1.0), "r = {r}: {q} vs {want}");
        }
        maxima.push(rep.max_ratio);
    }
    let (lo, hi) = (maxima.iter().cloned().fold(f64::INFINITY, f64::min), maxima.iter().cloned().fold(0.0, f64::max));
    assert!(hi <= 1.1 * lo, "{maxima:?}");
}

#[test]
fn pinned_convolution_cantor_dust_ratio_is_depth_stable() {
    let nu = cantor_measure(2, 1.0 / 3.0, 6, None).unwrap();
    let maxima: Vec<f64> = [8, 10, 12, 14]
        .iter()
        .map(|&d| lemma2_check(&nu, &[-0.3, -0.2], &preset(d)).unwrap().max_ratio)
        .collect();
    let (lo, hi) = (maxima.iter().cloned().fold(f64::INFINITY, f64::min), maxima.iter().cloned().fold(0.0, f64::max));
    assert!(hi <= 1.1 * lo, "{maxima:?}");
}

#[test]
fn pinned_convolution_requires_admissible_exponent() {
    let nu = Measure::point_mass(vec![0.6, 0.0]);
    let mut p = preset(8);
    p.rho = 1.0;
    assert!(lemma2_check(&nu, &[0.0, 0.0], &p).is_err());
    p.rho = 1.5;
    p.cutoff_d = 0.3;
    assert!(lemma2_check(&nu, &[0.0, 0.0], &p).is_err());
}

#[test]
fn pinned_csv_layout() {
    let nu = cantor_measure(1, 1.0 / 3.0, 3, None).unwrap();
    let p = pin_measure(&nu, &[2.0]).unwrap();
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("distance,weight"));
    assert_eq!(text.lines().count(), 1 + 8);
}
