use serde::{Deserialize, Serialize};

use super::region::{angle_unchecked, hyperbolic_weight};
use super::vector::{Sign, SpacetimePoint};
use crate::error::{ensure, Result};

/// How "≪" and "∼" are read when classifying an interaction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Smallness {
    /// |ξ₀| ≪ |ξ₁| means |ξ₀| ≤ kappa·min(|ξ₁|, |ξ₂|).
    pub kappa: f64,
    /// |ξ₁| ∼ |ξ₂| means their ratio lies in [1/comparable, comparable].
    pub comparable: f64,
    /// |𝔥₁|, |𝔥₂| ≪ |𝔥₀| means both are ≤ weight_gap·|𝔥₀|.
    pub weight_gap: f64,
}

impl Default for Smallness {
    fn default() -> Self {
        Smallness { kappa: 0.25, comparable: 2.0, weight_gap: 0.125 }
    }
}

/// A bilinear interaction X₀ = X₁ + X₂.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub x1: SpacetimePoint,
    pub x2: SpacetimePoint,
}

/// Everything the weight lemma says about one interaction and sign triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightReport {
    pub weights: [f64; 3],
    pub theta12: f64,
    /// max|𝔥ⱼ| / (min(|ξ₁|,|ξ₂|) θ₁₂²); `None` when θ₁₂ = 0.
    pub min_ratio: Option<f64>,
    /// max|𝔥ⱼ| / (|ξ₁||ξ₂|θ₁₂²/|ξ₀|); `None` when θ₁₂ = 0.
    pub product_ratio: Option<f64>,
    /// Low output with equal signs, where θ₁₂ is instead bounded below.
    pub low_output_same_sign: bool,
    /// The sign ±₀ makes |𝔥₀| = ||τ₀| − |ξ₀|| and |𝔥₁|, |𝔥₂| ≪ |𝔥₀|.
    pub dominant_output_weight: bool,
    /// |𝔥₀| over the min-type comparator (±₁ = ±₂) or the product-type one.
    pub output_ratio: Option<f64>,
}

impl Interaction {
    pub fn new(x1: SpacetimePoint, x2: SpacetimePoint) -> Self {
        Interaction { x1, x2 }
    }

    pub fn x0(&self) -> SpacetimePoint {
        self.x1 + self.x2
    }

    pub fn weights(&self, signs: (Sign, Sign, Sign)) -> [f64; 3] {
        [
            hyperbolic_weight(self.x0(), signs.0),
            hyperbolic_weight(self.x1, signs.1),
            hyperbolic_weight(self.x2, signs.2),
        ]
    }

    /// θ₁₂ = θ(±₁ξ₁, ±₂ξ₂).
    pub fn theta12(&self, s1: Sign, s2: Sign) -> Result<f64> {
        ensure!(!self.x1.xi.is_zero() && !self.x2.xi.is_zero(), Domain, "theta12 needs xi1, xi2 != 0");
        Ok(angle_unchecked(self.x1.xi * s1.value(), self.x2.xi * s2.value()))
    }

    pub fn report(&self, signs: (Sign, Sign, Sign), small: Smallness) -> Result<WeightReport> {
        let x0 = self.x0();
        ensure!(!x0.xi.is_zero(), Domain, "interaction needs xi0 != 0");
        let theta = self.theta12(signs.1, signs.2)?;
        let w = self.weights(signs);
        let hmax = w.iter().fold(0.0f64, |m, h| m.max(h.abs()));
        let (n0, n1, n2) = (x0.xi.norm(), self.x1.xi.norm(), self.x2.xi.norm());
        let t2 = theta * theta;
        let min_cmp = n1.min(n2) * t2;
        let prod_cmp = n1 * n2 * t2 / n0;
        let ratio = |num: f64, den: f64| (den > 0.0).then(|| num / den);

        let low_output_same_sign =
            n0 <= small.kappa * n1.min(n2) && n1.max(n2) <= small.comparable * n1.min(n2) && signs.1 == signs.2;
        let h0 = w[0].abs();
        let output_sign_ok = (h0 - (x0.tau.abs() - n0).abs()).abs() <= 1e-12 * (x0.tau.abs() + n0);
        let dominant = output_sign_ok && w[1].abs().max(w[2].abs()) <= small.weight_gap * h0 && h0 > 0.0;
        let output_ratio = if signs.1 == signs.2 { ratio(h0, min_cmp) } else { ratio(h0, prod_cmp) };

        Ok(WeightReport {
            weights: w,
            theta12: theta,
            min_ratio: ratio(hmax, min_cmp),
            product_ratio: ratio(hmax, prod_cmp),
            low_output_same_sign,
            dominant_output_weight: dominant,
            output_ratio,
        })
    }
}

/// The output sign ±₀ for which |𝔥₀| = ||τ₀| − |ξ₀||.
pub fn output_sign(x0: SpacetimePoint) -> Sign {
    if x0.tau >= 0.0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}
