//! The check suite: each check runs a preset sweep and reports pass/fail
//! against its configured ceiling. Errors are captured per check.

use pinned_core::geometry::{
    overlap_bound_check, restricted_weak_type_check, scaling_integral_check, scaling_integrand, OverlapReport,
    OverlapSweep, WeakTypeCase, WeakTypeConfig,
};
use pinned_core::kernels::lp_norm;
use pinned_core::pinned::{lemma2_check, Lemma2Params};
use pinned_core::selection::{
    calibrate_c, energy_sum, exclusion_violations, iid_select, select_points, verify_lemma25_bound,
    CalibrationLimits,
};
use pinned_core::spherical::{mixed_norm, params_on_line, pin_profiles};
use pinned_core::{Grid, NormCase, RadiusGrid, Region, SelectionConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{ConfigError, MeasureSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum CheckSpec {
    PinnedConvolution(PinnedConvolutionCheck),
    Overlap(OverlapCheck),
    Scaling(ScalingCheck),
    WeakType(WeakTypeCheck),
    ExclusionSelection(ExclusionSelectionCheck),
    IidEnergy(IidEnergyCheck),
    MixedNorm(MixedNormCheck),
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::PinnedConvolution(_) => "pinned-convolution",
            CheckSpec::Overlap(_) => "overlap",
            CheckSpec::Scaling(_) => "scaling",
            CheckSpec::WeakType(_) => "weak-type",
            CheckSpec::ExclusionSelection(_) => "exclusion-selection",
            CheckSpec::IidEnergy(_) => "iid-energy",
            CheckSpec::MixedNorm(_) => "mixed-norm",
        }
    }

    pub fn label(&self) -> String {
        let label = match self {
            CheckSpec::Overlap(c) => &c.label,
            _ => &None,
        };
        label.clone().unwrap_or_else(|| self.kind().to_string())
    }

    pub fn run(&self) -> Result<CheckOutcome, ConfigError> {
        match self {
            CheckSpec::PinnedConvolution(c) => c.run(),
            CheckSpec::Overlap(c) => c.run(),
            CheckSpec::Scaling(c) => c.run(),
            CheckSpec::WeakType(c) => c.run(),
            CheckSpec::ExclusionSelection(c) => c.run(),
            CheckSpec::IidEnergy(c) => c.run(),
            CheckSpec::MixedNorm(c) => c.run(),
        }
    }
}

/// What a check found: the verdict, a few headline numbers and the full detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    pub summary: Value,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub label: String,
    pub check: String,
    pub pass: bool,
    pub summary: Value,
    pub detail: Value,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

/// Runs every check; a check that errors counts as failed.
pub fn run_check_suite(specs: &[CheckSpec]) -> SuiteReport {
    let checks: Vec<CheckResult> = specs
        .par_iter()
        .map(|spec| {
            let (label, check) = (spec.label(), spec.kind().to_string());
            match spec.run() {
                Ok(o) => CheckResult { label, check, pass: o.pass, summary: o.summary, detail: o.detail, error: None },
                Err(e) => CheckResult {
                    label,
                    check,
                    pass: false,
                    summary: Value::Null,
                    detail: Value::Null,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    SuiteReport { pass: checks.iter().all(|c| c.pass), checks }
}

/// The suite shipped as `presets/checks.json`.
pub fn default_suite() -> Vec<CheckSpec> {
    vec![
        CheckSpec::PinnedConvolution(PinnedConvolutionCheck::default()),
        CheckSpec::Overlap(OverlapCheck::default()),
        CheckSpec::Overlap(OverlapCheck { label: Some("overlap-high-dim".into()), sweep: OverlapSweep::high_dim() }),
        CheckSpec::Scaling(ScalingCheck::default()),
        CheckSpec::WeakType(WeakTypeCheck::default()),
        CheckSpec::ExclusionSelection(ExclusionSelectionCheck::default()),
        CheckSpec::IidEnergy(IidEnergyCheck::default()),
        CheckSpec::MixedNorm(MixedNormCheck::default()),
    ]
}

/// The planar sweep compared against `B^2 / |x_1 - x_2|^{1/2}`, which is
/// too optimistic in `B`; its ratio drifts and the check fails.
pub fn misscaled_suite() -> Vec<CheckSpec> {
    let mut sweep = OverlapSweep::planar();
    sweep.bound.b_exponent = 2.0;
    vec![CheckSpec::Overlap(OverlapCheck { label: Some("overlap-misscaled".into()), sweep })]
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedConvolutionCase {
    pub label: String,
    pub measure: MeasureSpec,
    pub pin: Vec<f64>,
    /// Upper bound on the max ratio, when the case has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PinnedConvolutionCheck {
    pub cases: Vec<PinnedConvolutionCase>,
    pub rho: f64,
    pub r0: f64,
    pub r1: f64,
    pub r_grid: usize,
    pub cutoff_1d: f64,
    pub cutoff_d: f64,
    pub depths: Vec<u32>,
    /// Largest admissible max/min of the max ratio across depths.
    pub max_spread: f64,
}

impl Default for PinnedConvolutionCheck {
    fn default() -> Self {
        Self {
            cases: vec![
                PinnedConvolutionCase {
                    label: "single-atom".into(),
                    measure: MeasureSpec::Atoms { points: vec![vec![0.6, 0.0]], weights: vec![1.0] },
                    pin: vec![0.0, 0.0],
                    ceiling: Some(16.0),
                },
                PinnedConvolutionCase {
                    label: "circle".into(),
                    measure: MeasureSpec::Circle { center: vec![0.0, 0.0], radius: 1.0, n: 2000 },
                    pin: vec![0.0, 0.0],
                    ceiling: None,
                },
                PinnedConvolutionCase {
                    label: "cantor".into(),
                    measure: MeasureSpec::Cantor { dim: 2, ratio: 1.0 / 3.0, depth: 6, branch_weights: None },
                    pin: vec![-0.3, -0.2],
                    ceiling: None,
                },
            ],
            rho: 1.5,
            r0: 0.25,
            r1: 1.5,
            r_grid: 250,
            cutoff_1d: 0.125,
            cutoff_d: 0.5,
            depths: vec![8, 10, 12, 14],
            max_spread: 1.1,
        }
    }
}

impl PinnedConvolutionCheck {
    fn run(&self) -> Result<CheckOutcome, ConfigError> {
        let mut pass = true;
        let mut rows = Vec::new();
        let mut summary = serde_json::Map::new();
        for case in &self.cases {
            let nu = case.measure.build()?;
            let mut maxima = Vec::new();
            for &depth in &self.depths {
                let p = Lemma2Params {
                    rho: self.rho,
                    r0: self.r0,
                    r1: self.r1,
                    r_grid: self.r_grid,
                    cutoff_1d: self.cutoff_1d,
                    cutoff_d: self.cutoff_d,
                    depth,
                };
                let rep = lemma2_check(&nu, &case.pin, &p)?;
                rows.push(json!({
                    "case": case.label, "depth": depth,
                    "max_ratio": rep.max_ratio, "argmax_radius": rep.argmax_radius,
                }));
                maxima.push(rep.max_ratio);
            }
            let s = spread(&maxima);
            let worst = maxima.iter().copied().fold(0.0, f64::max);
            let ok = s <= self.max_spread && case.ceiling.is_none_or(|c| worst <= c);
            pass &= ok;
            summary.insert(case.label.clone(), json!({ "max_ratio": worst, "spread": s, "pass": ok }));
        }
        Ok(CheckOutcome { pass, summary: Value::Object(summary), detail: json!(rows) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapCheck {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default = "OverlapSweep::planar")]
    pub sweep: OverlapSweep,
}

impl Default for OverlapCheck {
    fn default() -> Self {
        Self { label: Some("overlap-planar".into()), sweep: OverlapSweep::planar() }
    }
}

impl OverlapCheck {
    fn run(&self) -> Result<CheckOutcome, ConfigError> {
        let rep: OverlapReport = overlap_bound_check(&self.sweep)?;
        Ok(CheckOutcome {
            pass: rep.pass,
            summary: json!({
                "level_max": rep.level_max, "drift": rep.drift,
                "max_drift": self.sweep.max_drift, "max_ratio": rep.max_ratio,
            }),
            detail: serde_json::to_value(&rep)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPreset {
    pub label: String,
    /// Left ends of `T1 = [t1, t1 + B]` and `T2 = [t2, t2 + B]`.
    pub t1: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingCheck {
    pub presets: Vec<ScalingPreset>,
    pub b_values: Vec<f64>,
    pub eta: f64,
    pub max_drift: f64,
    /// Midpoints per axis of the brute-force oracle.
    pub oracle_points: usize,
    pub oracle_tolerance: f64,
}

impl Default for ScalingCheck {
    fn default() -> Self {
        Self {
            presets: vec![
                ScalingPreset { label: "generic".into(), t1: 2.0, t2: 2.0 },
                ScalingPreset { label: "singular".into(), t1: 2.0, t2: 1.0 },
            ],
            b_values: vec![0.1, 0.05, 0.025],
            eta: 0.5,
            max_drift: 2.0,
            oracle_points: 2000,
            oracle_tolerance: 0.05,
        }
    }
}

/// Brute-force midpoint value of the scaling integral over
/// `[t1, t1 + b] x [t2, t2 + b]`. In `r2` each piece between `|r1 - 1|` and
/// the interval ends is mapped by `r2 = p + w^2` (or `q - w^2`) from the end
/// nearer the singular line, which leaves a bounded integrand.
pub fn scaling_oracle(t1: f64, t2: f64, b: f64, n: usize) -> f64 {
    let h1 = b / n as f64;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let r1 = t1 + (i as f64 + 0.5) * h1;
            let a = (r1 - 1.0).abs();
            let mut cuts = vec![t2];
            if a > t2 && a < t2 + b {
                cuts.push(a);
            }
            cuts.push(t2 + b);
            let mut inner = 0.0;
            for piece in cuts.windows(2) {
                let (p, q) = (piece[0], piece[1]);
                let from_low = (p - a).abs() <= (q - a).abs();
                let hw = (q - p).sqrt() / n as f64;
                for k in 0..n {
                    let w = (k as f64 + 0.5) * hw;
                    let r2 = if from_low { p + w * w } else { q - w * w };
                    inner += 2.0 * w * scaling_integrand(r1, r2) * hw;
                }
            }
            inner * h1
        })
        .sum()
}

impl ScalingCheck {
    fn run(&self) -> Result<CheckOutcome, ConfigError> {
        let mut pass = true;
        let mut rows = Vec::new();
        let mut summary = serde_json::Map::new();
        for p in &self.presets {
            let mut ratios = Vec::new();
            let mut worst_gap: f64 = 0.0;
            for &b in &self.b_values {
                let rep = scaling_integral_check(&[(p.t1, p.t1 + b)], &[(p.t2, p.t2 + b)], b, self.eta)?;
                let oracle = scaling_oracle(p.t1, p.t2, b, self.oracle_points);
                let gap = (rep.value - oracle).abs() / oracle;
                worst_gap = worst_gap.max(gap);
                rows.push(json!({
                    "preset": p.label, "b": b, "value": rep.value, "error": rep.error,
                    "ratio": rep.ratio, "oracle": oracle, "oracle_gap": gap,
                }));
                ratios.push(rep.ratio);
            }
            let drift = ratios[ratios.len() - 1] / ratios[0];
            let ok = drift <= self.max_drift && worst_gap <= self.oracle_tolerance;
            pass &= ok;
            summary.insert(p.label.clone(), json!({ "ratios": ratios, "drift": drift, "oracle_gap": worst_gap, "pass": ok }));
        }
        Ok(CheckOutcome { pass, summary: Value::Object(summary), detail: json!(rows) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTypePreset {
    pub label: String,
    pub case: WeakTypeCase,
    pub alpha: f64,
    pub lambda: MeasureSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeakTypeCheck {
    pub presets: Vec<WeakTypePreset>,
    pub b_values: Vec<f64>,
    pub pin_count: usize,
    pub mu: f64,
    pub focal_offset: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub hypothesis_ceiling: f64,
    /// Largest admissible max/min of the ratio across the `B` sweep.
    pub max_spread: f64,
}

impl Default for WeakTypeCheck {
    fn default() -> Self {
        Self {
            presets: vec![
                WeakTypePreset {
                    label: "a".into(),
                    case: WeakTypeCase::A,
                    alpha: 1.0,
                    lambda: MeasureSpec::Uniform { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0], per_axis: 64 },
                },
                WeakTypePreset {
                    label: "b".into(),
                    case: WeakTypeCase::B,
                    alpha: 0.4,
                    lambda: MeasureSpec::Cantor { dim: 2, ratio: 2f64.powf(-2.0 / 0.48), depth: 4, branch_weights: None },
                },
                WeakTypePreset {
                    label: "c".into(),
                    case: WeakTypeCase::C,
                    alpha: 0.7,
                    lambda: MeasureSpec::Cantor { dim: 3, ratio: 2f64.powf(-3.0 / 0.8), depth: 4, branch_weights: None },
                },
            ],
            b_values: vec![0.05, 0.025],
            pin_count: 50,
            mu: 0.5,
            focal_offset: 1.5,
            n_samples: 1 << 20,
            seed: 1,
            hypothesis_ceiling: 10.0,
            max_spread: 2.0,
        }
    }
}

impl WeakTypeCheck {
    fn run(&self) -> Result<CheckOutcome, ConfigError> {
        let mut pass = true;
        let mut rows = Vec::new();
        let mut summary = serde_json::Map::new();
        for p in &self.presets {
            let lambda = p.lambda.build()?;
            let mut ratios = Vec::new();
            for &b in &self.b_values {
                let cfg = WeakTypeConfig {
                    case: p.case,
                    alpha: p.alpha,
                    pin_count: self.pin_count,
                    b,
                    mu: self.mu,
                    focal_offset: self.focal_offset,
                    n_samples: self.n_samples,
                    seed: self.seed,
                    hypothesis_ceiling: self.hypothesis_ceiling,
                };
                let rep = restricted_weak_type_check(&lambda, &cfg)?;
                rows.push(json!({
                    "preset": p.label, "b": b, "hypothesis_constant": rep.hypothesis_constant,
                    "lambda_a": rep.lambda_a, "union_volume": rep.union_volume, "lhs": rep.lhs, "ratio": rep.ratio,
                }));
                ratios.push(rep.ratio);
            }
            let s = spread(&ratios);
            let ok = s <= self.max_spread;
            pass &= ok;
            summary.insert(p.label.clone(), json!({ "ratios": ratios, "spread": s, "pass": ok }));
        }
        Ok(CheckOutcome { pass, summary: Value::Object(summary), detail: json!(rows) })
    }
}

fn unit_square() -> Region<f64> {
    Region::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] }
}

fn planar_grid() -> MeasureSpec {
    MeasureSpec::Uniform { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0], per_axis: 100 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExclusionSelectionCheck {
    pub lambda: MeasureSpec,
    pub region: Region<f64>,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub gamma: f64,
    pub n_values: Vec<usize>,
    pub seed: u64,
    pub max_retries: usize,
    /// Largest admissible max/min of the energy ratio across `N`.
    pub max_spread: f64,
    /// Allowed excess of the log-log energy slope over `1 + gamma / alpha`.
    pub slope_slack: f64,
}

impl Default for ExclusionSelectionCheck {
    fn default() -> Self {
        Self {
            lambda: planar_grid(),
            region: unit_square(),
            alpha: 0.8,
            alpha_prime: 0.9,
            gamma: 1.0,
            n_values: vec![16, 32, 64, 128],
            seed: 11,
            max_retries: 10,
            max_spread: 4.0,
            slope_slack: 0.2,
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

impl ExclusionSelectionCheck {
    fn run(&self) -> Result<CheckOutcome, ConfigError> {
        let lambda = self.lambda.build()?;
        let mut rows = Vec::new();
        let mut ratios = Vec::new();
        let mut logs = (Vec::new(), Vec::new());
        let mut exclusions_ok = true;
        let mut masses_ok = true;
        for &n in &self.n_values {
            let base = SelectionConfig {
                alpha: self.alpha,
                alpha_prime: self.alpha_prime,
                gamma: self.gamma,
                c: 0.0,
                n,
                seed: self.seed,
            };
            let cal = calibrate_c(&lambda, &self.region, &base, &CalibrationLimits::default())?;
            let cfg = SelectionConfig { c: cal.c, ..base };
            let sel = select_points(&lambda, &self.region, &cfg, self.max_retries)?;
            let violations = exclusion_violations(&sel.points, &sel.etas).len();
            let min_mass = sel.restricted_masses.iter().copied().fold(f64::INFINITY, f64::min);
            exclusions_ok &= violations == 0;
            masses_ok &= min_mass >= sel.lambda_a / 2.0;
            let energy = energy_sum(&sel.points, self.gamma, 0.0)?.value;
            let ratio = verify_lemma25_bound(&sel.points, &cfg, sel.lambda_a)?;
            logs.0.push((n as f64).ln());
            logs.1.push(energy.ln());
            ratios.push(ratio);
            rows.push(json!({
                "n": n, "c": cal.c, "frostman": cal.frostman, "seed": sel.seed, "retries": sel.retries,
                "violations": violations, "min_restricted_mass": min_mass, "lambda_a": sel.lambda_a,
                "energy": energy, "ratio": ratio,
            }));
        }
        let s = spread(&ratios);
        let k = slope(&logs.0, &logs.1);
        let limit = 1.0 + self.gamma / self.alpha + self.slope_slack;
        let pass = exclusions_ok && masses_ok && s < self.max_spread && k <= limit;
        Ok(CheckOutcome {
            pass,
            summary: json!({
                "exclusions_hold": exclusions_ok, "masses_hold": masses_ok,
                "ratio_spread": s, "slope": k, "slope_limit": limit,
            }),
            detail: json!(rows),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IidEnergyCheck {
    pub lambda: MeasureSpec,
    pub region: Region<f64>,
    pub gamma: f64,
    pub alpha: f64,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Distance floor; repeated atoms are otherwise at distance zero.
    /// Defaults to the measure's resolution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    pub max_drift: f64,
}

impl Default for IidEnergyCheck {
    fn default() -> Self {
        Self {
            lambda: planar_grid(),
            region: unit_square(),
            gamma: 0.5,
            alpha: 1.0,
            n_values: vec![16, 32, 64],
            trials: 50,
            seed: 5,
            floor: None,
            max_drift: 2.0,
        }
    }
}

impl IidEnergyCheck {
    fn run(&self) -> Result<CheckOutcome, ConfigError> {
        let lambda = self.lambda.build()?;
        let lambda_a = pinned_core::measure::restrict(&lambda, &self.region)?.retained_mass;
        let floor = self.floor.or_else(|| lambda.resolution()).unwrap_or(0.0);
        let mut constants = Vec::new();
        let mut rows = Vec::new();
        for (i, &n) in self.n_values.iter().enumerate() {
            let energies = (0..self.trials)
                .map(|t| {
                    let seed = pinned_core::rng::derive_seed(self.seed, (i * self.trials + t) as u64);
                    let pts = iid_select(&lambda, &self.region, n, seed)?;
                    Ok(energy_sum(&pts, self.gamma, floor)?.value)
                })
                .collect::<Result<Vec<f64>, pinned_core::Error>>()?;
            let mean = energies.iter().sum::<f64>() / self.trials as f64;
            let c = mean / ((n * n) as f64 / lambda_a.powf(1.0 / self.alpha));
            constants.push(c);
            rows.push(json!({ "n": n, "mean_energy": mean, "constant": c }));
        }
        let drift = spread(&constants);
        Ok(CheckOutcome {
            pass: drift < self.max_drift,
            summary: json!({ "constants": constants, "drift": drift, "floor": floor }),
            detail: json!(rows),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNormPreset {
    pub label: String,
    pub case: NormCase,
    pub alpha: f64,
    pub lambda: MeasureSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixedNormCheck {
    pub presets: Vec<MixedNormPreset>,
    pub t_values: Vec<f64>,
    /// Test functions are indicators of `B(0, 2^-k)`.
    pub scales: Vec<u32>,
    pub r0: f64,
    pub r1: f64,
    /// Radii per unit of `2^k`: the grid has `radii_per_scale << k` points.
    pub radii_per_scale: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub max_variation: f64,
}

fn shrunk(base: MeasureSpec, dim: usize) -> MeasureSpec {
    MeasureSpec::Affine { scale: 0.2, offset: vec![0.3; dim], base: Box::new(base) }
}

impl Default for MixedNormCheck {
    fn default() -> Self {
        Self {
            presets: vec![
                MixedNormPreset {
                    label: "a".into(),
                    case: NormCase::Frostman2d,
                    alpha: 0.75,
                    lambda: shrunk(MeasureSpec::Cantor { dim: 2, ratio: 1.0 / 3.0, depth: 4, branch_weights: None }, 2),
                },
                MixedNormPreset {
                    label: "b".into(),
                    case: NormCase::LowDim2d,
                    alpha: 0.4,
                    lambda: shrunk(
                        MeasureSpec::Cantor { dim: 2, ratio: 2f64.powf(-2.0 / 0.48), depth: 4, branch_weights: None },
                        2,
                    ),
                },
                MixedNormPreset {
                    label: "c".into(),
                    case: NormCase::HighDim,
                    alpha: 0.5,
                    lambda: shrunk(
                        MeasureSpec::Cantor { dim: 3, ratio: 2f64.powf(-3.0 / 0.8), depth: 3, branch_weights: None },
                        3,
                    ),
                },
            ],
            t_values: vec![0.25, 0.5, 0.75],
            scales: (3..=8).collect(),
            r0: 0.25,
            r1: 1.0,
            radii_per_scale: 6,
            n_samples: 256,
            seed: 7,
            max_variation: 3.0,
        }
    }
}

/// Indicator of `B(0, 2^-k)` on 33 nodes per axis with spacing `2^-k / 8`.
pub fn ball_test_function(dim: usize, k: u32) -> Result<Grid, pinned_core::Error> {
    let eps = 2f64.powi(-(k as i32));
    let h = eps / 8.0;
    Grid::from_fn(vec![-16.0 * h; dim], h, vec![33; dim], |x| {
        if x.iter().map(|v| v * v).sum::<f64>() <= eps * eps {
            1.0
        } else {
            0.0
        }
    })
}

impl MixedNormCheck {
    fn run(&self) -> Result<CheckOutcome, ConfigError> {
        let mut pass = true;
        let mut rows = Vec::new();
        let mut summary = serde_json::Map::new();
        for p in &self.presets {
            let lambda = p.lambda.build()?.into_probability()?;
            let pins: Vec<Vec<f64>> = lambda.points().map(<[f64]>::to_vec).collect();
            let params = self
                .t_values
                .iter()
                .map(|&t| params_on_line(p.case, t, p.alpha))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = vec![Vec::new(); params.len()];
            for &k in &self.scales {
                let f = ball_test_function(lambda.dim(), k)?;
                let grid = RadiusGrid::new(self.r0, self.r1, self.radii_per_scale << k)?;
                let delta = grid.default_delta(f.spacing());
                let seed = pinned_core::rng::derive_seed(self.seed, k as u64);
                let profiles = pin_profiles(&f, &pins, &grid, delta, self.n_samples, seed)?;
                for (i, prm) in params.iter().enumerate() {
                    let norm = mixed_norm(&profiles, &lambda, prm)?;
                    let fp = lp_norm(&f, prm.p());
                    table[i].push(norm / fp);
                    rows.push(json!({
                        "preset": p.label, "t": prm.t, "k": k, "p": prm.p(), "q": prm.q(), "s": prm.s(),
                        "mixed_norm": norm, "lp_norm": fp, "ratio": norm / fp, "seed": seed,
                    }));
                }
            }
            let variations: Vec<f64> = table.iter().map(|r| spread(r)).collect();
            let ok = variations.iter().all(|&v| v < self.max_variation);
            pass &= ok;
            summary.insert(p.label.clone(), json!({ "t": self.t_values, "variation": variations, "pass": ok }));
        }
        Ok(CheckOutcome { pass, summary: Value::Object(summary), detail: json!(rows) })
    }
}
