use serde::{Deserialize, Serialize};

use super::case::{theoretical_constant, EstimateCase};
use super::evaluate::{fields_on, trial_fields, Coefficients, Evaluation, Evaluator};
use super::extremizer::{make_extremizer, ExtremizerSpec};
use crate::error::{ensure, Error, Result};
use crate::spectral::{l2_norm, SparseField};

/// Least-squares slope of log₂y against log₂x, with its standard error
/// (0 when the fit is exact or has two points).
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    ensure!(
        points.iter().all(|&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()),
        Domain,
        "fit points must be positive and finite"
    );
    let lx: Vec<f64> = points.iter().map(|p| p.0.log2()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    ensure!(sxx > 0.0, Domain, "fit needs at least two distinct x values");
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let stderr = if points.len() > 2 {
        let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// A one-parameter family of cases to sweep over a dyadic grid.
///
/// With an extremizer, every grid point rebuilds it (the swept name is an
/// extremizer parameter) and the Gaussian trials use its supports; without
/// one, the swept name is a case parameter of `template`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<EstimateCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremizer: Option<ExtremizerSpec>,
    pub vary: String,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub coefficients: Coefficients,
    #[serde(default)]
    pub fit_on: FitOn,
}

/// Which normalisation of the left side the exponent is fitted to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitOn {
    /// LHS over the theorem's own right-side norms.
    #[default]
    RightSide,
    /// LHS over ‖u₁‖‖u₂‖, to compare against estimates with plain norms.
    PlainNorms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub case: EstimateCase,
    /// max LHS / norm product over the trials and the extremizer, with the
    /// norms chosen by [`FitOn`].
    pub lhs_over_norms: f64,
    pub constant: f64,
    /// lhs_over_norms / constant.
    pub ratio: f64,
    /// The extremizer alone, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremizer_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub version: String,
    pub seed: u64,
    pub fixture_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub stamp: Stamp,
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{},lhs_over_norms,constant,ratio,extremizer_ratio\n", self.spec.vary);
        for p in &self.points {
            let e = p.extremizer_ratio.map(|v| v.to_string()).unwrap_or_default();
            s.push_str(&format!("{},{},{},{},{}\n", p.value, p.lhs_over_norms, p.constant, p.ratio, e));
        }
        s
    }
}

fn normalised(spec: &SweepSpec, e: &Evaluation, u1: &SparseField, u2: &SparseField) -> f64 {
    let norms = match spec.fit_on {
        FitOn::RightSide => e.rhs_norms,
        FitOn::PlainNorms => l2_norm(u1) * l2_norm(u2),
    };
    if norms > 0.0 {
        e.lhs / norms
    } else {
        0.0
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    ensure!(grid.len() >= 4, Usage, "a sweep needs at least 4 grid points, got {}", grid.len());
    for g in grid {
        ensure!(*g > 0.0 && g.log2().fract() == 0.0, Usage, "grid value {g} is not a power of two");
    }
    ensure!(grid.windows(2).all(|w| w[0] < w[1]), Usage, "grid must be strictly increasing");
    Ok(())
}

/// Runs the sweep and fits the exponent of `lhs_over_norms` in the swept value.
pub fn dyadic_sweep(spec: &SweepSpec, fixture_hash: &str, eval: &Evaluator) -> Result<SweepReport> {
    check_grid(&spec.grid)?;
    ensure!(
        spec.template.is_some() != spec.extremizer.is_some(),
        Usage,
        "a sweep takes exactly one of a case template or an extremizer"
    );
    let mut points = Vec::with_capacity(spec.grid.len());
    for &value in &spec.grid {
        let point = if let Some(x) = &spec.extremizer {
            let mut x = x.clone();
            x.set_param(&spec.vary, value)?;
            let ext = make_extremizer(&x, eval.exec)?;
            let mut case = ext.case.clone();
            case.seed = spec.seed;
            let e = eval.evaluate(&case, &ext.u1, &ext.u2)?;
            let mut best = normalised(spec, &e, &ext.u1, &ext.u2);
            for t in 0..spec.trials {
                let (u1, u2) = fields_on((&ext.supports.0, &ext.supports.1), &case, t, spec.coefficients, eval.exec)?;
                best = best.max(normalised(spec, &eval.evaluate(&case, &u1, &u2)?, &u1, &u2));
            }
            SweepPoint {
                value,
                lhs_over_norms: best,
                constant: e.constant,
                ratio: best / e.constant,
                extremizer_ratio: Some(e.ratio),
                case,
            }
        } else {
            let mut case = spec.template.clone().expect("checked above");
            case.set_param(&spec.vary, value)?;
            case.seed = spec.seed;
            let constant = theoretical_constant(&case)?;
            ensure!(spec.trials > 0, Usage, "a template sweep needs at least one trial");
            let mut best = 0.0f64;
            for t in 0..spec.trials {
                let (u1, u2) = trial_fields(&case, t, spec.coefficients, eval.exec)?;
                best = best.max(normalised(spec, &eval.evaluate(&case, &u1, &u2)?, &u1, &u2));
            }
            SweepPoint { value, lhs_over_norms: best, constant, ratio: best / constant, extremizer_ratio: None, case }
        };
        if !(point.lhs_over_norms > 0.0) {
            return Err(Error::Precondition(format!("{} = {value}: every trial vanished", spec.vary)));
        }
        log::info!("sweep {} = {value}: ratio {:.4}", spec.vary, point.ratio);
        points.push(point);
    }
    let fit: Vec<(f64, f64)> = points.iter().map(|p| (p.value, p.lhs_over_norms)).collect();
    let (exponent, exponent_stderr) = fit_exponent(&fit)?;
    let ratios = points.iter().map(|p| p.ratio);
    Ok(SweepReport {
        stamp: Stamp { version: crate::VERSION.to_string(), seed: spec.seed, fixture_hash: fixture_hash.to_string() },
        max_ratio: ratios.clone().fold(f64::NEG_INFINITY, f64::max),
        min_ratio: ratios.fold(f64::INFINITY, f64::min),
        spec: spec.clone(),
        points,
        exponent,
        exponent_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_examples() {
        assert_eq!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)]).unwrap(), (1.0, 0.0));
        assert_eq!(fit_exponent(&[(1.0, 1.0), (2.0, 1.0), (4.0, 1.0)]).unwrap(), (0.0, 0.0));
        assert!(fit_exponent(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
        assert!(fit_exponent(&[(0.0, 1.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn grid_rules() {
        assert!(check_grid(&[1.0, 2.0, 4.0]).is_err());
        assert!(check_grid(&[1.0, 2.0, 3.0, 4.0]).is_err());
        assert!(check_grid(&[1.0, 4.0, 2.0, 8.0]).is_err());
        check_grid(&[0.0625, 0.125, 0.25, 0.5, 1.0]).unwrap();
    }
}
