use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::geometry::{Direction, Region, Sign, Smallness, Vec3};
use crate::spectral::{Spacing, SymbolKind};

/// The estimates the lab can check. Each names the left side that is
/// measured and the constant it is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// ‖P_{K₀}(u₁u₂)‖ with C² = N_min^{012} N_min^{12} L₁L₂.
    BilinearInput,
    /// ‖P_{K₀}(u₁u₂)‖ with C² = min_j N_min^{012} N_min^{0j} L₀L_j.
    BilinearOutput,
    /// ‖P_{K₀}(u₁u₂)‖ with C² = N₀ N_min^{12} L_min^{012} L_med^{012}.
    BilinearSymmetric,
    /// ‖P_{ξ₀·ω ∈ I}(u₁u₂)‖ with u₁ away from ω^⊥ by α; C² = |I| N_min^{12} L₁L₂/α.
    AnisotropicSlab,
    /// ‖P_{K₀} 𝔅_θ(u₁, u₂)‖ with C² = N₀L₀L₁L₂.
    NullFormCone,
    /// ‖𝔅_θ(P_{T_r(ω)}u₁, u₂)‖ with C² = r²L₁L₂.
    NullFormTube,
    /// ‖𝔅_√θ(P_B u₁, u₂)‖, B a ball of radius r; C² = r²L₁L₂.
    NullFormBall,
    /// ‖P_{ξ₀·ω ∈ I₀} 𝔅_{θ≪1}(P_{T_r(ω)}u₁, u₂)‖ against
    /// (r²L₁L₂)^{1/2} sup_{I₁} ‖P_{ξ₁·ω ∈ I₁}u₁‖ ‖u₂‖.
    NullFormSlab,
    /// Low output ‖P_{K₀}(u₁u₂)‖ against (N₀L₀L₁L₂)^{1/2} ‖u₁‖ ‖u₂‖_{N₂,r},
    /// r = (N₀L_max^{012})^{1/2}.
    LowOutputTube,
    /// ‖u₁u₂‖ on one thickened cone K^±_{N,L}; bilinear constant NL.
    Strichartz,
    /// ‖g₁g₂‖ on the thickened unit sphere S_ε, placed at τ = 0; constant ε = L₁.
    SteinTomas,
    /// ‖u₁u₂‖ on K^±_{N,L} ∩ (ℝ × B); bilinear constant (rN)^{1/2}L.
    ConeBall,
}

impl Theorem {
    pub const ALL: [Theorem; 12] = [
        Theorem::BilinearInput,
        Theorem::BilinearOutput,
        Theorem::BilinearSymmetric,
        Theorem::AnisotropicSlab,
        Theorem::NullFormCone,
        Theorem::NullFormTube,
        Theorem::NullFormBall,
        Theorem::NullFormSlab,
        Theorem::LowOutputTube,
        Theorem::Strichartz,
        Theorem::SteinTomas,
        Theorem::ConeBall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::BilinearInput => "bilinear_input",
            Theorem::BilinearOutput => "bilinear_output",
            Theorem::BilinearSymmetric => "bilinear_symmetric",
            Theorem::AnisotropicSlab => "anisotropic_slab",
            Theorem::NullFormCone => "null_form_cone",
            Theorem::NullFormTube => "null_form_tube",
            Theorem::NullFormBall => "null_form_ball",
            Theorem::NullFormSlab => "null_form_slab",
            Theorem::LowOutputTube => "low_output_tube",
            Theorem::Strichartz => "strichartz",
            Theorem::SteinTomas => "stein_tomas",
            Theorem::ConeBall => "cone_ball",
        }
    }

    /// Whether N₀, L₀ and ±₀ enter the statement.
    fn uses_output_cone(self) -> bool {
        matches!(
            self,
            Theorem::BilinearInput
                | Theorem::BilinearOutput
                | Theorem::BilinearSymmetric
                | Theorem::NullFormCone
                | Theorem::LowOutputTube
        )
    }

    /// Both factors live on the same set.
    fn single_support(self) -> bool {
        matches!(self, Theorem::Strichartz | Theorem::SteinTomas | Theorem::ConeBall)
    }
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| Error::Usage(format!("unknown theorem '{s}'")))
    }
}

/// One instance of an estimate: which one, its parameters and the lattice.
///
/// Indices 0, 1, 2 of `n`, `l` and `signs` refer to the output and the two
/// factors. `interval` is I (or I₀) itself, since its position fixes the
/// projection; only its length enters the constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateCase {
    pub theorem: Theorem,
    pub n: [f64; 3],
    pub l: [f64; 3],
    pub signs: [Sign; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    /// Ball center for the ball-restricted estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_threshold: Option<f64>,
    pub spacing: Spacing,
    #[serde(default)]
    pub seed: u64,
}

fn is_dyadic(x: f64) -> bool {
    x > 0.0 && x.is_finite() && x.log2().fract() == 0.0
}

fn sorted3(v: [f64; 3]) -> [f64; 3] {
    let mut s = v;
    s.sort_by(f64::total_cmp);
    s
}

/// Smallest power of two ≥ x.
pub fn dyadic_ceil(x: f64) -> f64 {
    2f64.powi(x.log2().ceil() as i32)
}

impl EstimateCase {
    /// A case with every optional parameter unset.
    pub fn new(theorem: Theorem, n: [f64; 3], l: [f64; 3], signs: [Sign; 3], spacing: Spacing) -> Self {
        EstimateCase {
            theorem,
            n,
            l,
            signs,
            omega: None,
            r: None,
            alpha: None,
            interval: None,
            center: None,
            gamma_threshold: None,
            spacing,
            seed: 0,
        }
    }

    fn need<T: Copy>(&self, v: Option<T>, what: &str) -> Result<T> {
        v.ok_or_else(|| Error::Usage(format!("{} needs parameter '{what}'", self.theorem)))
    }

    pub fn interval_length(&self) -> Option<f64> {
        self.interval.map(|[a, b]| b - a)
    }

    /// The tube radius r = (N₀L_max^{012})^{1/2} of the low-output estimate.
    pub fn derived_tube_radius(&self) -> f64 {
        (self.n[0] * sorted3(self.l)[2]).sqrt()
    }

    pub fn symbol_threshold(&self) -> f64 {
        self.gamma_threshold.unwrap_or(SymbolKind::DEFAULT_SMALL)
    }

    pub fn validate(&self) -> Result<()> {
        self.spacing.validate()?;
        let t = self.theorem;
        let used: &[usize] = if t.uses_output_cone() { &[0, 1, 2] } else { &[1, 2] };
        for &j in used {
            ensure!(is_dyadic(self.n[j]), Domain, "{t}: N{j} = {} is not a positive power of two", self.n[j]);
            ensure!(is_dyadic(self.l[j]), Domain, "{t}: L{j} = {} is not a positive power of two", self.l[j]);
        }
        if t.single_support() {
            ensure!(
                self.n[1] == self.n[2] && self.l[1] == self.l[2] && self.signs[1] == self.signs[2],
                Usage,
                "{t}: both factors must share N, L and sign"
            );
        }
        for (name, v) in [("r", self.r), ("alpha", self.alpha), ("gamma_threshold", self.gamma_threshold)] {
            if let Some(v) = v {
                ensure!(v > 0.0 && v.is_finite(), Domain, "{t}: {name} = {v} must be positive");
            }
        }
        if let Some([a, b]) = self.interval {
            ensure!(a.is_finite() && b.is_finite() && a < b, Domain, "{t}: interval [{a}, {b}] is empty");
        }
        match t {
            Theorem::AnisotropicSlab => {
                self.need(self.omega, "omega")?;
                self.need(self.interval, "interval")?;
                let a = self.need(self.alpha, "alpha")?;
                ensure!(a <= std::f64::consts::FRAC_PI_2, Domain, "{t}: alpha = {a} exceeds pi/2");
            }
            Theorem::NullFormTube => {
                self.need(self.omega, "omega")?;
                self.need(self.r, "r")?;
            }
            Theorem::NullFormBall => {
                self.need(self.center, "center")?;
                self.need(self.r, "r")?;
            }
            Theorem::NullFormSlab => {
                self.need(self.omega, "omega")?;
                self.need(self.interval, "interval")?;
                let r = self.need(self.r, "r")?;
                let nmin = self.n[1].min(self.n[2]);
                ensure!(r <= nmin / 4.0, Precondition, "{t}: r = {r} is not small against N_min = {nmin}");
                SymbolKind::Theta12Small { threshold: self.symbol_threshold() }.validate()?;
            }
            Theorem::LowOutputTube => {
                let s = Smallness::default();
                let (n0, n1, n2) = (self.n[0], self.n[1], self.n[2]);
                ensure!(
                    n0 <= s.kappa * n1.min(n2) && n1.max(n2) <= s.comparable * n1.min(n2),
                    Precondition,
                    "{t}: needs low output N0 << N1 ~ N2, got N = {:?}",
                    self.n
                );
                ensure!(self.derived_tube_radius() < n2, Precondition, "{t}: tube radius must be below N2");
            }
            Theorem::SteinTomas => {
                ensure!(self.l[1] <= 0.25, Precondition, "{t}: thickness {} is not small against 1", self.l[1]);
                ensure!(
                    self.spacing.tau == 1.0,
                    Usage,
                    "{t}: the spatial estimate is placed on one tau layer and needs tau spacing 1"
                );
            }
            Theorem::ConeBall => {
                self.need(self.center, "center")?;
                let r = self.need(self.r, "r")?;
                ensure!(r <= self.n[1] / 8.0, Precondition, "{t}: r = {r} is not small against N = {}", self.n[1]);
            }
            _ => {}
        }
        Ok(())
    }

    /// Frequency supports required of û₁ and û₂.
    pub fn supports(&self) -> Result<(Region, Region)> {
        let cone = |j: usize| Region::thick_cone(self.signs[j], self.n[j], self.l[j]);
        Ok(match self.theorem {
            Theorem::AnisotropicSlab => {
                let half = Region::HalfSpaceCone {
                    omega: self.need(self.omega, "omega")?,
                    alpha: self.need(self.alpha, "alpha")?,
                };
                (cone(1).and(half), cone(2))
            }
            Theorem::SteinTomas => {
                let s = Region::TimeSlab { lo: 0.0, hi: 0.0 }.and(Region::ThickSphere { r: 1.0, delta: self.l[1] });
                (s.clone(), s)
            }
            Theorem::ConeBall => {
                let b = Region::ball(self.need(self.center, "center")?, self.need(self.r, "r")?);
                (cone(1).and(b.clone()), cone(1).and(b))
            }
            _ => (cone(1), cone(2)),
        })
    }

    /// Sets one named parameter, as used by sweeps.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "n0" => self.n[0] = value,
            "n1" => self.n[1] = value,
            "n2" => self.n[2] = value,
            "l0" => self.l[0] = value,
            "l1" => self.l[1] = value,
            "l2" => self.l[2] = value,
            "r" => self.r = Some(value),
            "alpha" => self.alpha = Some(value),
            "gamma_threshold" => self.gamma_threshold = Some(value),
            "interval_length" => {
                let [a, b] = self.need(self.interval, "interval")?;
                let mid = 0.5 * (a + b);
                self.interval = Some([mid - value / 2.0, mid + value / 2.0]);
            }
            _ => return Err(Error::Usage(format!("unknown case parameter '{name}'"))),
        }
        if self.theorem.single_support() && name.len() == 2 && name.ends_with('1') {
            // Keep the shared support consistent.
            self.n[2] = self.n[1];
            self.l[2] = self.l[1];
        }
        Ok(())
    }
}

/// The constant C of the estimate (the square root of the C² formula).
pub fn theoretical_constant(case: &EstimateCase) -> Result<f64> {
    case.validate()?;
    let [n0, n1, n2] = case.n;
    let [l0, l1, l2] = case.l;
    let nmin012 = n0.min(n1).min(n2);
    let nmin12 = n1.min(n2);
    let ls = sorted3(case.l);
    let c2 = match case.theorem {
        Theorem::BilinearInput => nmin012 * nmin12 * l1 * l2,
        // Both j = 1 and j = 2 hold, so the better one is the constant.
        Theorem::BilinearOutput => (nmin012 * n0.min(n1) * l0 * l1).min(nmin012 * n0.min(n2) * l0 * l2),
        Theorem::BilinearSymmetric => n0 * nmin12 * ls[0] * ls[1],
        Theorem::AnisotropicSlab => {
            case.interval_length().unwrap_or(0.0) * nmin12 * l1 * l2 / case.alpha.unwrap_or(1.0)
        }
        Theorem::NullFormCone | Theorem::LowOutputTube => n0 * l0 * l1 * l2,
        Theorem::NullFormTube | Theorem::NullFormBall | Theorem::NullFormSlab => {
            let r = case.r.unwrap_or(0.0);
            r * r * l1 * l2
        }
        // L⁴ constant (NL)^{1/2}, squared for the bilinear form.
        Theorem::Strichartz => (n1 * l1).powi(2),
        Theorem::SteinTomas => l1 * l1,
        // L⁴ constant ((rN)^{1/2}L)^{1/2}, squared for the bilinear form.
        Theorem::ConeBall => case.r.unwrap_or(0.0) * n1 * l1 * l1,
    };
    Ok(c2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(t: Theorem, n: [f64; 3], l: [f64; 3]) -> EstimateCase {
        EstimateCase::new(t, n, l, [Sign::Plus; 3], Spacing::uniform(0.5))
    }

    #[test]
    fn constant_examples() {
        let c = case(Theorem::BilinearInput, [1.0, 4.0, 4.0], [8.0, 1.0, 1.0]);
        assert_eq!(theoretical_constant(&c).unwrap(), 2.0);
        let c = case(Theorem::BilinearSymmetric, [4.0, 4.0, 8.0], [1.0, 2.0, 4.0]);
        assert_eq!(theoretical_constant(&c).unwrap(), 32f64.sqrt());
        let c = case(Theorem::LowOutputTube, [2.0, 8.0, 16.0], [8.0, 1.0, 1.0]);
        assert_eq!(c.derived_tube_radius(), 4.0);
    }

    #[test]
    fn missing_parameters_are_reported() {
        let c = case(Theorem::AnisotropicSlab, [2.0, 4.0, 4.0], [1.0, 1.0, 1.0]);
        let e = theoretical_constant(&c).unwrap_err();
        assert!(e.to_string().contains("omega"));
        let c = case(Theorem::BilinearInput, [3.0, 4.0, 4.0], [1.0, 1.0, 1.0]);
        assert!(theoretical_constant(&c).is_err());
    }

    #[test]
    fn theorem_names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.name()));
        }
    }
}
