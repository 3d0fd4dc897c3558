use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::case::{theoretical_constant, EstimateCase, Theorem};
use crate::error::{Error, Result};
use crate::exec::{chunk_rng, Exec};
use crate::geometry::{Region, Sign};
use crate::spectral::{
    bilinear_product, l2_norm, populate_region_with, project, slab_sup_norm, tube_sup_norm, FillMode, ProductOptions,
    SparseField, SymbolKind, DEFAULT_POINT_CAP,
};
use crate::sphere_net::SphereNet;

/// Seed of the direction nets used for tube suprema. Fixed so that a case's
/// right side does not depend on the trial seed.
pub const NET_SEED: u64 = 0x7e7_5eed;

/// One evaluated trial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub lhs: f64,
    /// The right side without the constant: ‖u₁‖‖u₂‖ or the theorem's
    /// replacement norms.
    pub rhs_norms: f64,
    pub constant: f64,
    /// lhs / (constant · rhs_norms).
    pub ratio: f64,
}

/// How trial coefficients are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    /// Independent complex Gaussians on both supports.
    #[default]
    Gaussian,
    /// As `Gaussian`, but û₂ depends only on (τ, |ξ|).
    RadialSecond,
}

/// Mixes a base seed with trial and factor indices (splitmix64 finalizer).
pub fn derive_seed(seed: u64, trial: u64, factor: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ factor.wrapping_mul(0xd1b5_4a32_d192_ed03);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Replaces each coefficient by a Gaussian keyed on (τ index, |k|²).
pub fn radialize(u: &SparseField, seed: u64) -> Result<SparseField> {
    let mut keys: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    for (t, k, _) in u.entries() {
        keys.insert((t, k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), Complex64::new(0.0, 0.0));
    }
    let mut rng = chunk_rng(seed, 0);
    for c in keys.values_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *c = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
    }
    SparseField::from_entries(
        u.spacing(),
        u.entries().map(|(t, k, _)| (t, k, keys[&(t, k[0] * k[0] + k[1] * k[1] + k[2] * k[2])])),
    )
}

/// Gaussian fields on the two given supports for one trial.
pub fn fields_on(
    supports: (&Region, &Region),
    case: &EstimateCase,
    trial: u64,
    coeffs: Coefficients,
    exec: Exec,
) -> Result<(SparseField, SparseField)> {
    let fill = |j: u64| FillMode::Gaussian { seed: derive_seed(case.seed, trial, j) };
    let u1 = populate_region_with(supports.0, case.spacing, fill(1), DEFAULT_POINT_CAP, exec)?;
    let u2 = match coeffs {
        Coefficients::Gaussian => populate_region_with(supports.1, case.spacing, fill(2), DEFAULT_POINT_CAP, exec)?,
        Coefficients::RadialSecond => radialize(
            &populate_region_with(supports.1, case.spacing, FillMode::Ones, DEFAULT_POINT_CAP, exec)?,
            derive_seed(case.seed, trial, 2),
        )?,
    };
    Ok((u1, u2))
}

/// Gaussian trial fields on the case's own supports.
pub fn trial_fields(
    case: &EstimateCase,
    trial: u64,
    coeffs: Coefficients,
    exec: Exec,
) -> Result<(SparseField, SparseField)> {
    case.validate()?;
    let (s1, s2) = case.supports()?;
    fields_on((&s1, &s2), case, trial, coeffs, exec)
}

/// Evaluates left and right sides of a case, caching direction nets.
#[derive(Debug, Default)]
pub struct Evaluator {
    pub exec: Exec,
    nets: Mutex<BTreeMap<u64, Arc<SphereNet>>>,
}

impl Evaluator {
    pub fn new(exec: Exec) -> Self {
        Evaluator { exec, nets: Mutex::new(BTreeMap::new()) }
    }

    fn net(&self, gamma: f64) -> Result<Arc<SphereNet>> {
        let mut nets = self.nets.lock().expect("net cache poisoned");
        if let Some(n) = nets.get(&gamma.to_bits()) {
            return Ok(n.clone());
        }
        let net = Arc::new(SphereNet::build(gamma, NET_SEED)?);
        nets.insert(gamma.to_bits(), net.clone());
        Ok(net)
    }

    /// Fails with a precondition error listing up to five entries that lie
    /// outside the case's supports.
    pub fn check_conformity(&self, case: &EstimateCase, u1: &SparseField, u2: &SparseField) -> Result<()> {
        case.validate()?;
        for u in [u1, u2] {
            if u.spacing() != case.spacing {
                return Err(Error::Usage(format!(
                    "field spacing {:?} differs from the case spacing {:?}",
                    u.spacing(),
                    case.spacing
                )));
            }
        }
        let (s1, s2) = case.supports()?;
        let mut bad = Vec::new();
        let mut total = 0usize;
        for (j, u, s) in [(1, u1, &s1), (2, u2, &s2)] {
            for (x, _) in u.points() {
                if !s.contains_spacetime(x) {
                    total += 1;
                    if bad.len() < 5 {
                        bad.push(format!("u{j} at (tau {}, xi {:?})", x.tau, x.xi.to_array()));
                    }
                }
            }
        }
        if total > 0 {
            return Err(Error::Precondition(format!(
                "{}: {total} entries outside the required supports: {}",
                case.theorem,
                bad.join("; ")
            )));
        }
        Ok(())
    }

    /// The norm of the theorem's left side.
    pub fn lhs(&self, case: &EstimateCase, u1: &SparseField, u2: &SparseField) -> Result<f64> {
        self.check_conformity(case, u1, u2)?;
        self.lhs_unchecked(case, u1, u2)
    }

    fn lhs_unchecked(&self, case: &EstimateCase, u1: &SparseField, u2: &SparseField) -> Result<f64> {
        if u1.is_empty() || u2.is_empty() {
            return Ok(0.0);
        }
        let signs = (case.signs[1], case.signs[2]);
        let out_cone = || Region::thick_cone(case.signs[0], case.n[0], case.l[0]);
        let omega = || case.omega.ok_or_else(|| Error::Usage("omega missing".into()));
        let slab = || -> Result<Region> {
            let [lo, hi] = case.interval.ok_or_else(|| Error::Usage("interval missing".into()))?;
            Ok(Region::Slab { omega: omega()?, lo, hi })
        };
        let tube = || -> Result<Region> {
            Ok(Region::Tube { r: case.r.ok_or_else(|| Error::Usage("r missing".into()))?, omega: omega()? })
        };
        let plain = ProductOptions::symbol(SymbolKind::One, signs).exec(self.exec);
        let (a, opts) = match case.theorem {
            Theorem::BilinearInput | Theorem::BilinearOutput | Theorem::BilinearSymmetric | Theorem::LowOutputTube => {
                (None, plain.output(out_cone()))
            }
            Theorem::AnisotropicSlab => (None, plain.output(slab()?)),
            Theorem::NullFormCone => {
                (None, ProductOptions::symbol(SymbolKind::Theta12, signs).exec(self.exec).output(out_cone()))
            }
            Theorem::NullFormTube => {
                (Some(project(u1, &tube()?)), ProductOptions::symbol(SymbolKind::Theta12, signs).exec(self.exec))
            }
            Theorem::NullFormBall => {
                let ball = Region::ball(
                    case.center.ok_or_else(|| Error::Usage("center missing".into()))?,
                    case.r.ok_or_else(|| Error::Usage("r missing".into()))?,
                );
                (Some(project(u1, &ball)), ProductOptions::symbol(SymbolKind::SqrtTheta12, signs).exec(self.exec))
            }
            Theorem::NullFormSlab => {
                let sym = SymbolKind::Theta12Small { threshold: case.symbol_threshold() };
                (Some(project(u1, &tube()?)), ProductOptions::symbol(sym, signs).exec(self.exec).output(slab()?))
            }
            Theorem::Strichartz | Theorem::SteinTomas | Theorem::ConeBall => (None, plain),
        };
        let u1 = a.as_ref().unwrap_or(u1);
        Ok(l2_norm(&bilinear_product(u1, u2, &opts)?))
    }

    /// The right side's norm product, without the constant.
    pub fn rhs_norms(&self, case: &EstimateCase, u1: &SparseField, u2: &SparseField) -> Result<f64> {
        Ok(match case.theorem {
            Theorem::LowOutputTube => {
                let r = case.derived_tube_radius();
                let net = self.net(r / case.n[2])?;
                l2_norm(u1) * tube_sup_norm(u2, case.n[2], r, &net)?.value
            }
            Theorem::NullFormSlab => {
                let len = case.interval_length().ok_or_else(|| Error::Usage("interval missing".into()))?;
                let omega = case.omega.ok_or_else(|| Error::Usage("omega missing".into()))?;
                slab_sup_norm(u1, omega.vec(), len)? * l2_norm(u2)
            }
            _ => l2_norm(u1) * l2_norm(u2),
        })
    }

    /// Left side, right side and their ratio. An empty factor gives ratio 0;
    /// otherwise a vanishing right side is an error.
    pub fn evaluate(&self, case: &EstimateCase, u1: &SparseField, u2: &SparseField) -> Result<Evaluation> {
        self.check_conformity(case, u1, u2)?;
        let constant = theoretical_constant(case)?;
        if u1.is_empty() || u2.is_empty() {
            return Ok(Evaluation { lhs: 0.0, rhs_norms: 0.0, constant, ratio: 0.0 });
        }
        let lhs = self.lhs_unchecked(case, u1, u2)?;
        let rhs_norms = self.rhs_norms(case, u1, u2)?;
        let rhs = constant * rhs_norms;
        if !(rhs > 0.0) {
            return Err(Error::Domain(format!("{}: right side vanishes, ratio undefined", case.theorem)));
        }
        Ok(Evaluation { lhs, rhs_norms, constant, ratio: lhs / rhs })
    }

    /// Evaluates one case under every sign triple, sharing the product
    /// across theorems whose left sides coincide.
    pub fn evaluate_many(&self, cases: &[EstimateCase], u1: &SparseField, u2: &SparseField) -> Result<Vec<Evaluation>> {
        let mut out = Vec::with_capacity(cases.len());
        let mut memo: Vec<(EstimateCase, f64)> = Vec::new();
        for case in cases {
            self.check_conformity(case, u1, u2)?;
            let constant = theoretical_constant(case)?;
            if u1.is_empty() || u2.is_empty() {
                out.push(Evaluation { lhs: 0.0, rhs_norms: 0.0, constant, ratio: 0.0 });
                continue;
            }
            let key = lhs_key(case);
            let lhs = match memo.iter().find(|(k, _)| *k == key) {
                Some((_, v)) => *v,
                None => {
                    let v = self.lhs_unchecked(case, u1, u2)?;
                    memo.push((key, v));
                    v
                }
            };
            let rhs_norms = self.rhs_norms(case, u1, u2)?;
            let rhs = constant * rhs_norms;
            if !(rhs > 0.0) {
                return Err(Error::Domain(format!("{}: right side vanishes, ratio undefined", case.theorem)));
            }
            out.push(Evaluation { lhs, rhs_norms, constant, ratio: lhs / rhs });
        }
        Ok(out)
    }
}

/// A case with everything that does not affect the left side normalised.
fn lhs_key(case: &EstimateCase) -> EstimateCase {
    let mut k = case.clone();
    k.theorem = match case.theorem {
        Theorem::BilinearOutput | Theorem::BilinearSymmetric | Theorem::LowOutputTube => Theorem::BilinearInput,
        t => t,
    };
    k.seed = 0;
    k
}

/// The sign triple used for trial `i` when a battery cycles through all eight.
pub fn cycled_signs(i: u64) -> [Sign; 3] {
    let (a, b, c) = Sign::triples()[(i % 8) as usize];
    [a, b, c]
}
