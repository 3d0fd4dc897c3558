use serde::{Deserialize, Serialize};

use super::case::{dyadic_ceil, EstimateCase, Theorem};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::geometry::{angle_unchecked, Direction, Region, Sign, Vec3};
use crate::spectral::{
    best_slab_window, bilinear_product, populate_region_with, project, FillMode, ProductOptions, Spacing, SparseField,
    SymbolKind, DEFAULT_POINT_CAP,
};

/// Families of test functions that saturate an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremizerKind {
    /// Two angular caps of aperture N^{-1/2} on the null hyperplane
    /// τ = ξ·ω + O(1), one centred on ω and one a cap-width away.
    NullCaps,
    /// `NullCaps` cut to a radial length N^{1/2}.
    ShortNullCaps,
    /// Two narrow sectors of the cone around one null ray.
    NullRay,
}

impl ExtremizerKind {
    pub fn default_theorem(self) -> Theorem {
        match self {
            ExtremizerKind::NullCaps => Theorem::AnisotropicSlab,
            ExtremizerKind::ShortNullCaps => Theorem::NullFormBall,
            ExtremizerKind::NullRay => Theorem::BilinearInput,
        }
    }

    fn supports_theorem(self, t: Theorem) -> bool {
        match self {
            ExtremizerKind::NullCaps => {
                matches!(t, Theorem::AnisotropicSlab | Theorem::NullFormTube | Theorem::NullFormSlab)
            }
            ExtremizerKind::ShortNullCaps => matches!(t, Theorem::NullFormBall | Theorem::NullFormTube),
            ExtremizerKind::NullRay => {
                matches!(t, Theorem::BilinearInput | Theorem::BilinearOutput | Theorem::BilinearSymmetric)
            }
        }
    }
}

/// What to build. Unset optional parameters take the family defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremizerSpec {
    pub kind: ExtremizerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<Theorem>,
    /// Frequency scale N of both factors.
    pub n: f64,
    /// Cap family: angle α between the first cap and the slab plane.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Cap family with the slab estimate: output slab length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Null ray: thickness of the first factor (the second has thickness 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    /// Lattice override; must resolve the construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
}

impl ExtremizerSpec {
    pub fn new(kind: ExtremizerKind, n: f64) -> Self {
        ExtremizerSpec { kind, theorem: None, n, alpha: None, delta: None, l1: None, spacing: None }
    }

    pub fn theorem(mut self, t: Theorem) -> Self {
        self.theorem = Some(t);
        self
    }

    /// Sets a sweep parameter: `N`, `alpha`, `delta` or `L1`.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "N" | "n" => self.n = value,
            "alpha" => self.alpha = Some(value),
            "delta" => self.delta = Some(value),
            "L1" | "l1" => self.l1 = Some(value),
            _ => return Err(Error::Usage(format!("unknown extremizer parameter '{name}'"))),
        }
        Ok(())
    }
}

/// Quantities measured on the constructed supports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// max |−τ + |ξ|| over each factor.
    pub max_weight: [f64; 2],
    /// Smallest angle between a frequency of u₁ and the slab plane ν^⊥
    /// (cap families only).
    pub min_plane_angle: Option<f64>,
    /// Largest angle between a frequency of u₁ and one of u₂.
    pub max_theta12: f64,
    pub points: [usize; 2],
}

#[derive(Clone, Debug)]
pub struct Extremizer {
    pub u1: SparseField,
    pub u2: SparseField,
    pub case: EstimateCase,
    /// The sets û₁, û₂ are the indicator functions of; trials may put other
    /// coefficients on them.
    pub supports: (Region, Region),
    pub certificate: Certificate,
}

fn unit(v: Vec3) -> Direction {
    Direction::from_vector(v).expect("nonzero construction direction")
}

fn max_weight(u: &SparseField) -> f64 {
    u.points().map(|(x, _)| (-x.tau + x.xi.norm()).abs()).fold(0.0, f64::max)
}

/// Largest pairwise angle, over column directions only.
fn max_pair_angle(u1: &SparseField, u2: &SparseField) -> f64 {
    let h = u1.spacing();
    let d2: Vec<Vec3> = u2.columns().iter().map(|c| h.xi_of(c.k)).collect();
    u1.columns()
        .iter()
        .map(|c| {
            let a = h.xi_of(c.k);
            d2.iter().map(|b| angle_unchecked(a, *b)).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn mean_along(u: &SparseField, w: Vec3) -> f64 {
    let (s, n) = u.points().fold((0.0, 0usize), |(s, n), (x, _)| (s + x.xi.dot(w), n + 1));
    s / n.max(1) as f64
}

fn centroid(u: &SparseField) -> Vec3 {
    let (s, n) = u.points().fold((Vec3::ZERO, 0usize), |(s, n), (x, _)| (s + x.xi, n + 1));
    s * (1.0 / n.max(1) as f64)
}

/// Builds the fields and a matching case.
pub fn make_extremizer(spec: &ExtremizerSpec, exec: Exec) -> Result<Extremizer> {
    let n = spec.n;
    ensure!(n >= 4.0 && n.log2().fract() == 0.0, Domain, "extremizer scale N = {n} must be a power of two >= 4");
    let theorem = spec.theorem.unwrap_or(spec.kind.default_theorem());
    ensure!(spec.kind.supports_theorem(theorem), Usage, "extremizer {:?} does not target {theorem}", spec.kind);
    match spec.kind {
        ExtremizerKind::NullCaps | ExtremizerKind::ShortNullCaps => null_caps(spec, theorem, exec),
        ExtremizerKind::NullRay => null_ray(spec, theorem, exec),
    }
}

fn null_caps(spec: &ExtremizerSpec, theorem: Theorem, exec: Exec) -> Result<Extremizer> {
    let n = spec.n;
    let rho = n.powf(-0.5);
    let root = n.sqrt();
    // Resolution is angular: the caps have width ~N·ρ = N^{1/2}.
    let spacing = spec.spacing.unwrap_or(Spacing { tau: 0.25, xi: root / 4.0 });
    spacing.validate()?;
    ensure!(
        spacing.xi <= root / 4.0 && spacing.tau <= 0.25,
        Precondition,
        "lattice {spacing:?} does not resolve caps of width N^(1/2) = {root} (need xi step <= {}, tau step <= 0.25)",
        root / 4.0
    );
    let alpha_nominal = spec.alpha.unwrap_or(rho);
    let beta = alpha_nominal - rho;
    ensure!(
        beta >= -1e-12 && alpha_nominal + 3.0 * rho < std::f64::consts::FRAC_PI_2,
        Domain,
        "alpha = {alpha_nominal} must lie in [N^(-1/2), pi/2 - 3 N^(-1/2))"
    );
    let beta = beta.max(0.0);
    let omega = unit(Vec3::new(beta.cos(), 0.0, beta.sin()));
    let omega1 = unit(Vec3::new((beta + 2.0 * rho).cos(), 0.0, (beta + 2.0 * rho).sin()));
    let nu = Direction::E3;
    // Loose enough to contain the hyperplane part of both caps.
    let l_big = n * (1.0 - (3.0 * rho).cos()) + 2.0;
    let plane = Region::NullHyperplane { d: 1.0, omega };
    let cap = |axis: Direction| {
        let r = Region::SectorCone { sign: Sign::Plus, n, l: l_big, gamma: rho, omega: axis }.and(plane.clone());
        if spec.kind == ExtremizerKind::ShortNullCaps {
            r.and(Region::ThickSphere { r: n - root / 2.0, delta: root / 2.0 })
        } else {
            r
        }
    };
    let (s1, s2) = (cap(omega1), cap(omega));
    let u1 = populate_region_with(&s1, spacing, FillMode::Ones, DEFAULT_POINT_CAP, exec)?;
    let u2 = populate_region_with(&s2, spacing, FillMode::Ones, DEFAULT_POINT_CAP, exec)?;
    ensure!(!u1.is_empty() && !u2.is_empty(), Precondition, "lattice {spacing:?} misses the caps at N = {n}");

    let w = [max_weight(&u1), max_weight(&u2)];
    let min_plane_angle = u1
        .points()
        .map(|(x, _)| (x.xi.dot(nu.vec()).abs() / x.xi.norm()).min(1.0).asin())
        .fold(f64::INFINITY, f64::min);
    let cert = Certificate {
        max_weight: w,
        min_plane_angle: Some(min_plane_angle),
        max_theta12: max_pair_angle(&u1, &u2),
        points: [u1.len(), u2.len()],
    };
    let l = [dyadic_ceil(w[0] + w[1] + 2.0), dyadic_ceil(w[0].max(spacing.tau)), dyadic_ceil(w[1].max(spacing.tau))];
    let mut case = EstimateCase::new(theorem, [2.0 * n, n, n], l, [Sign::Plus; 3], spacing);
    match theorem {
        Theorem::AnisotropicSlab => {
            // I is centred on the bulk of ξ₁·ν + ξ₂·ν, which is where the
            // output concentrates.
            let mid = mean_along(&u1, nu.vec()) + mean_along(&u2, nu.vec());
            case.omega = Some(nu);
            case.alpha = Some(alpha_nominal.min(min_plane_angle));
            case.interval = Some([mid - root, mid + root]);
        }
        Theorem::NullFormTube => {
            case.omega = Some(omega);
            case.r = Some(4.0 * root);
        }
        Theorem::NullFormBall => {
            case.center = Some(centroid(&u1));
            case.r = Some(2.0 * root);
        }
        Theorem::NullFormSlab => {
            let delta = spec.delta.unwrap_or(n / 4.0);
            ensure!(delta > 0.0, Domain, "slab length delta = {delta} must be positive");
            case.omega = Some(omega);
            case.r = Some(4.0 * root);
            let p1 = project(&u1, &Region::Tube { r: 4.0 * root, omega });
            let sym = SymbolKind::Theta12Small { threshold: case.symbol_threshold() };
            let full = bilinear_product(&p1, &u2, &ProductOptions::symbol(sym, (Sign::Plus, Sign::Plus)).exec(exec))?;
            let (start, _) = best_slab_window(&full, omega.vec(), delta)?
                .ok_or_else(|| Error::Precondition("null form of the caps vanishes".into()))?;
            case.interval = Some([start, start + delta]);
        }
        _ => unreachable!("checked by supports_theorem"),
    }
    case.validate()?;
    Ok(Extremizer { u1, u2, case, supports: (s1, s2), certificate: cert })
}

fn null_ray(spec: &ExtremizerSpec, theorem: Theorem, exec: Exec) -> Result<Extremizer> {
    let n = spec.n;
    let l1 = spec.l1.unwrap_or(0.25);
    let l2 = 1.0;
    ensure!(l1 > 0.0 && l1 <= l2, Domain, "null ray thickness L1 = {l1} must lie in (0, 1]");
    let gamma = (l2 / n).sqrt().min(0.5);
    let want = Spacing { tau: l1.min(l2) / 2.0, xi: n * gamma / 4.0 };
    let spacing = spec.spacing.unwrap_or(want);
    spacing.validate()?;
    ensure!(
        spacing.xi <= want.xi && spacing.tau <= want.tau,
        Precondition,
        "lattice {spacing:?} does not resolve the null ray sectors (need {want:?} or finer)"
    );
    let sector = |l: f64| Region::SectorCone { sign: Sign::Plus, n, l, gamma, omega: Direction::E1 };
    let (s1, s2) = (sector(l1), sector(l2));
    let u1 = populate_region_with(&s1, spacing, FillMode::Ones, DEFAULT_POINT_CAP, exec)?;
    let u2 = populate_region_with(&s2, spacing, FillMode::Ones, DEFAULT_POINT_CAP, exec)?;
    ensure!(!u1.is_empty() && !u2.is_empty(), Precondition, "lattice {spacing:?} misses the sectors at N = {n}");
    let cert = Certificate {
        max_weight: [max_weight(&u1), max_weight(&u2)],
        min_plane_angle: None,
        max_theta12: max_pair_angle(&u1, &u2),
        points: [u1.len(), u2.len()],
    };
    let l0 = dyadic_ceil(l1 + l2 + 2.0 * n * (1.0 - (2.0 * gamma).cos()));
    let case = EstimateCase::new(theorem, [2.0 * n, n, n], [l0, l1, l2], [Sign::Plus; 3], spacing);
    case.validate()?;
    Ok(Extremizer { u1, u2, case, supports: (s1, s2), certificate: cert })
}
