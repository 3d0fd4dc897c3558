//! Estimate suites: trial batteries, extremizer windows and exponent sweeps.

use num_complex::Complex64;

use super::{Check, Row, SuiteReport};
use crate::error::Result;
use crate::estimate::{
    cycled_signs, dyadic_sweep, make_extremizer, trial_fields, Coefficients, EstimateCase, Evaluator, ExtremizerKind,
    ExtremizerSpec, FitOn, SweepReport, SweepSpec, Theorem,
};
use crate::exec::Exec;
use crate::fixtures::{EstimateFixtures, Fixtures};
use crate::geometry::Sign;
use crate::spectral::{l2_norm, Spacing, SparseField};

pub const TRIALS: u64 = 100;

/// N = (2, 4, 8), L = (1/4, 1/2, 1).
pub const CELL_N: [f64; 3] = [2.0, 4.0, 8.0];
pub const CELL_L: [f64; 3] = [0.25, 0.5, 1.0];
pub const CELL_SPACING: Spacing = Spacing { tau: 0.125, xi: 0.5 };

/// The low-output cell: N = (2, 8, 8), r = (N₀L_max)^{1/2} = √2.
pub const LOW_N: [f64; 3] = [2.0, 8.0, 8.0];

pub const BILINEAR: [Theorem; 3] = [Theorem::BilinearInput, Theorem::BilinearOutput, Theorem::BilinearSymmetric];

/// Octaves of the extremizer windows.
pub const WINDOW_N: [f64; 5] = [64.0, 128.0, 256.0, 512.0, 1024.0];
pub const WINDOW_SPREAD: f64 = 8.0;

/// Largest ratio of each bilinear theorem over `trials` Gaussian trials
/// under all eight sign triples.
pub fn bilinear_battery(seed: u64, trials: u64, eval: &Evaluator) -> Result<[f64; 3]> {
    let mut worst = [0.0f64; 3];
    for trial in 0..trials {
        for (s0, s1, s2) in Sign::triples() {
            let mut base = EstimateCase::new(BILINEAR[0], CELL_N, CELL_L, [s0, s1, s2], CELL_SPACING);
            base.seed = seed;
            let (u1, u2) = trial_fields(&base, trial, Coefficients::Gaussian, eval.exec)?;
            let cases: Vec<EstimateCase> =
                BILINEAR.iter().map(|&t| EstimateCase { theorem: t, ..base.clone() }).collect();
            for (j, e) in eval.evaluate_many(&cases, &u1, &u2)?.iter().enumerate() {
                worst[j] = worst[j].max(e.ratio);
            }
        }
    }
    Ok(worst)
}

/// L₁ = 2⁻⁴..1 on the null ray extremizer at N = 4.
pub fn l1_sweep(seed: u64, fixture_hash: &str, eval: &Evaluator) -> Result<SweepReport> {
    let spec = SweepSpec {
        template: None,
        extremizer: Some(ExtremizerSpec::new(ExtremizerKind::NullRay, 4.0)),
        vary: "L1".into(),
        grid: (0..=4).rev().map(|j| 1.0 / (1u64 << j) as f64).collect(),
        trials: 2,
        seed,
        coefficients: Coefficients::Gaussian,
        fit_on: FitOn::RightSide,
    };
    dyadic_sweep(&spec, fixture_hash, eval)
}

fn sweep_rows(rep: &mut SuiteReport, op: &str, sweep: &SweepReport) {
    for p in &sweep.points {
        rep.rows.push(Row::new(op, &[(sweep.spec.vary.as_str(), p.value)], p.lhs_over_norms, 0.0, p.constant));
    }
}

/// Acceptance criterion 6.
pub fn bilinear(fx: &Fixtures, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("bilinear", seed);
    let eval = Evaluator::new(Exec::default());
    let worst = bilinear_battery(seed, TRIALS, &eval)?;
    let f = &fx.estimates;
    for (j, c) in [f.bilinear_input, f.bilinear_output, f.bilinear_symmetric].into_iter().enumerate() {
        rep.checks.push(Check::at_most(format!("{} max ratio", BILINEAR[j]), worst[j], c));
    }
    let sweep = l1_sweep(seed, &fx.hash(), &eval)?;
    sweep_rows(&mut rep, "l1_sweep", &sweep);
    rep.metric("l1_exponent_stderr", sweep.exponent_stderr);
    rep.checks.push(Check::within("L1 exponent", sweep.exponent, [0.35, 0.65]));
    Ok(rep)
}

/// Extremizer ratios over [`WINDOW_N`].
pub fn extremizer_window(kind: ExtremizerKind, theorem: Theorem, eval: &Evaluator) -> Result<Vec<(f64, f64)>> {
    WINDOW_N
        .iter()
        .map(|&n| {
            let x = make_extremizer(&ExtremizerSpec::new(kind, n).theorem(theorem), eval.exec)?;
            Ok((n, eval.evaluate(&x.case, &x.u1, &x.u2)?.ratio))
        })
        .collect()
}

fn min_max(v: &[(f64, f64)]) -> [f64; 2] {
    v.iter().fold([f64::INFINITY, 0.0], |m, &(_, r)| [m[0].min(r), m[1].max(r)])
}

fn judge_window(rep: &mut SuiteReport, name: &str, ratios: &[(f64, f64)], fixture: [f64; 2]) {
    for &(n, r) in ratios {
        rep.rows.push(Row::new(name, &[("n", n)], r, 0.0, 1.0));
        rep.checks.push(Check::within(format!("{name} ratio at N = {n}"), r, fixture));
    }
    let [lo, hi] = min_max(ratios);
    rep.checks.push(Check::at_most(format!("{name} window C/c"), hi / lo, WINDOW_SPREAD));
}

/// α = 1/16..1/2 on the null caps at N = 2¹⁴; smaller N saturates.
pub fn alpha_sweep(seed: u64, fixture_hash: &str, eval: &Evaluator) -> Result<SweepReport> {
    let spec = SweepSpec {
        template: None,
        extremizer: Some(ExtremizerSpec::new(ExtremizerKind::NullCaps, 16384.0)),
        vary: "alpha".into(),
        grid: vec![1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0],
        trials: 0,
        seed,
        coefficients: Coefficients::Gaussian,
        fit_on: FitOn::RightSide,
    };
    dyadic_sweep(&spec, fixture_hash, eval)
}

/// Acceptance criterion 7.
pub fn anisotropic_slab(fx: &Fixtures, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("anisotropic slab", seed);
    let eval = Evaluator::new(Exec::default());
    let ratios = extremizer_window(ExtremizerKind::NullCaps, Theorem::AnisotropicSlab, &eval)?;
    judge_window(&mut rep, "null_caps", &ratios, fx.estimates.null_caps);
    let sweep = alpha_sweep(seed, &fx.hash(), &eval)?;
    sweep_rows(&mut rep, "alpha_sweep", &sweep);
    rep.metric("alpha_exponent_stderr", sweep.exponent_stderr);
    rep.checks.push(Check::within("alpha exponent", sweep.exponent, [-0.65, -0.35]));
    Ok(rep)
}

/// Single exactly null pairs X₁ + X₂ with ξ₁ ∥ ξ₂, one per lattice
/// direction and sign pair, with a case containing them.
pub fn null_collinear_pairs() -> Result<Vec<(EstimateCase, SparseField, SparseField)>> {
    let h = Spacing { tau: 1.0, xi: 1.0 };
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    // Integer vectors of integer length.
    for (k, m) in [([1i64, 2, 2], 3i64), ([2, 3, 6], 7), ([1, 4, 8], 9), ([2, 6, 9], 11)] {
        for s2 in Sign::BOTH {
            let s = s2.value() as i64;
            let k2 = [2 * s * k[0], 2 * s * k[1], 2 * s * k[2]];
            let (t1, t2) = (m, 2 * s * m);
            let t0 = t1 + t2;
            let n_of = |len: i64| crate::estimate::dyadic_ceil(len as f64);
            let s0 = if t0 >= 0 { Sign::Plus } else { Sign::Minus };
            let case = EstimateCase::new(
                Theorem::NullFormCone,
                [n_of(t0.abs()), n_of(m), n_of(2 * m)],
                [1.0, 1.0, 1.0],
                [s0, Sign::Plus, s2],
                h,
            );
            let u1 = SparseField::from_entries(h, [(t1, k, one)])?;
            let u2 = SparseField::from_entries(h, [(t2, k2, one)])?;
            out.push((case, u1, u2));
        }
    }
    Ok(out)
}

/// Acceptance criterion 8.
pub fn null_forms(fx: &Fixtures, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("null forms", seed);
    let eval = Evaluator::new(Exec::default());
    let tube = extremizer_window(ExtremizerKind::NullCaps, Theorem::NullFormTube, &eval)?;
    judge_window(&mut rep, "null_form_tube", &tube, fx.estimates.null_form_tube);
    let ball = extremizer_window(ExtremizerKind::ShortNullCaps, Theorem::NullFormBall, &eval)?;
    judge_window(&mut rep, "null_form_ball", &ball, fx.estimates.null_form_ball);
    let mut nonzero = 0u64;
    let pairs = null_collinear_pairs()?;
    for (case, u1, u2) in &pairs {
        nonzero += (eval.lhs(case, u1, u2)? != 0.0) as u64;
    }
    rep.checks.push(Check::none("null collinear pairs with nonzero null form", nonzero));
    rep.metric("null_collinear_pairs", pairs.len() as f64);
    Ok(rep)
}

/// δ = N/32..N/4 on the null caps at N = 2¹¹, fitted on plain norms.
pub fn delta_sweep(seed: u64, fixture_hash: &str, eval: &Evaluator) -> Result<SweepReport> {
    let n = 2048.0;
    let spec = SweepSpec {
        template: None,
        extremizer: Some(ExtremizerSpec::new(ExtremizerKind::NullCaps, n).theorem(Theorem::NullFormSlab)),
        vary: "delta".into(),
        grid: vec![n / 32.0, n / 16.0, n / 8.0, n / 4.0],
        trials: 0,
        seed,
        coefficients: Coefficients::Gaussian,
        fit_on: FitOn::PlainNorms,
    };
    dyadic_sweep(&spec, fixture_hash, eval)
}

/// Acceptance criterion 9.
pub fn slab_improvement(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("slab improvement", seed);
    let eval = Evaluator::new(Exec::default());
    let sweep = delta_sweep(seed, "", &eval)?;
    sweep_rows(&mut rep, "delta_sweep", &sweep);
    // The full right side stays comparable: the slab-sup form is attained.
    let ratios: Vec<f64> = sweep.points.iter().filter_map(|p| p.extremizer_ratio).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    rep.metric("slab_ratio_spread", hi / lo);
    rep.metric("delta_exponent_stderr", sweep.exponent_stderr);
    rep.checks.push(Check::within("delta exponent", sweep.exponent, [0.35, 0.65]));
    Ok(rep)
}

/// Largest low-output ratio and the range of ‖u₂‖_{N,r}/‖u₂‖ over
/// `trials` trials with radial second factors.
pub fn low_output_battery(seed: u64, trials: u64, eval: &Evaluator) -> Result<(f64, [f64; 2])> {
    let mut worst = 0.0f64;
    let mut tube = [f64::INFINITY, 0.0f64];
    for trial in 0..trials {
        let mut case = EstimateCase::new(Theorem::LowOutputTube, LOW_N, CELL_L, cycled_signs(trial), CELL_SPACING);
        case.seed = seed;
        let (u1, u2) = trial_fields(&case, trial, Coefficients::RadialSecond, eval.exec)?;
        let e = eval.evaluate(&case, &u1, &u2)?;
        worst = worst.max(e.ratio);
        let t = e.rhs_norms / (l2_norm(&u1) * l2_norm(&u2));
        tube = [tube[0].min(t), tube[1].max(t)];
    }
    Ok((worst, tube))
}

/// Acceptance criterion 10.
pub fn low_output(fx: &Fixtures, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("low output", seed);
    let eval = Evaluator::new(Exec::default());
    let (worst, tube) = low_output_battery(seed, TRIALS, &eval)?;
    rep.checks.push(Check::at_most("low_output_tube max ratio", worst, fx.estimates.low_output_tube));
    rep.checks.push(Check::within("min tube norm / L2 norm", tube[0], fx.estimates.tube_norm));
    rep.checks.push(Check::within("max tube norm / L2 norm", tube[1], fx.estimates.tube_norm));
    Ok(rep)
}

/// Raw values for calibration.
pub fn observe_fixtures(seed: u64) -> Result<EstimateFixtures> {
    let eval = Evaluator::new(Exec::default());
    let b = bilinear_battery(seed, TRIALS, &eval)?;
    let (low, tube) = low_output_battery(seed, TRIALS, &eval)?;
    Ok(EstimateFixtures {
        bilinear_input: b[0],
        bilinear_output: b[1],
        bilinear_symmetric: b[2],
        low_output_tube: low,
        tube_norm: tube,
        null_caps: min_max(&extremizer_window(ExtremizerKind::NullCaps, Theorem::AnisotropicSlab, &eval)?),
        null_form_tube: min_max(&extremizer_window(ExtremizerKind::NullCaps, Theorem::NullFormTube, &eval)?),
        null_form_ball: min_max(&extremizer_window(ExtremizerKind::ShortNullCaps, Theorem::NullFormBall, &eval)?),
    })
}
