use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Spatial frequency vector. Serialized as `[x, y, z]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const E1: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const E2: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn min_components(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max_components(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Unit vector from polar angle (from +z) and azimuth.
    pub fn from_spherical(polar: f64, azimuth: f64) -> Vec3 {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Vec3::new(sp * ca, sp * sa, cp)
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthogonal(self) -> Vec3 {
        let a = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Vec3::E1
        } else if self.y.abs() <= self.z.abs() {
            Vec3::E2
        } else {
            Vec3::E3
        };
        self.cross(a).normalized().unwrap_or(Vec3::E1)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A unit vector on S². Deserialization renormalizes inputs within 1e-6 of
/// unit length and rejects anything else.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Direction(Vec3);

pub const UNIT_TOLERANCE: f64 = 1e-6;

impl Direction {
    pub const E1: Direction = Direction(Vec3::E1);
    pub const E2: Direction = Direction(Vec3::E2);
    pub const E3: Direction = Direction(Vec3::E3);

    /// Accepts nearly-unit vectors only.
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        ensure!(
            (n - 1.0).abs() < UNIT_TOLERANCE,
            Domain,
            "direction {v} has norm {n}, not within {UNIT_TOLERANCE} of 1"
        );
        Ok(Direction(v * (1.0 / n)))
    }

    /// Normalizes any nonzero vector.
    pub fn from_vector(v: Vec3) -> Result<Self> {
        v.normalized().map(Direction).ok_or_else(|| Error::Domain("cannot normalize the zero vector".into()))
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }
}

impl TryFrom<[f64; 3]> for Direction {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        Direction::new(a.into())
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> Self {
        d.0.to_array()
    }
}

impl From<Direction> for Vec3 {
    fn from(d: Direction) -> Self {
        d.0
    }
}

/// Spacetime frequency X = (τ, ξ).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub tau: f64,
    pub xi: Vec3,
}

impl SpacetimePoint {
    pub const fn new(tau: f64, xi: Vec3) -> Self {
        SpacetimePoint { tau, xi }
    }

    pub fn is_finite(self) -> bool {
        self.tau.is_finite() && self.xi.is_finite()
    }
}

impl Add for SpacetimePoint {
    type Output = SpacetimePoint;
    fn add(self, o: SpacetimePoint) -> SpacetimePoint {
        SpacetimePoint::new(self.tau + o.tau, self.xi + o.xi)
    }
}

impl Sub for SpacetimePoint {
    type Output = SpacetimePoint;
    fn sub(self, o: SpacetimePoint) -> SpacetimePoint {
        SpacetimePoint::new(self.tau - o.tau, self.xi - o.xi)
    }
}

impl Neg for SpacetimePoint {
    type Output = SpacetimePoint;
    fn neg(self) -> SpacetimePoint {
        SpacetimePoint::new(-self.tau, -self.xi)
    }
}

/// Cone sign ±. Serialized as `"+"` / `"-"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// All eight sign triples (±0, ±1, ±2) in a fixed order.
    pub fn triples() -> [(Sign, Sign, Sign); 8] {
        let s = Sign::BOTH;
        let mut out = [(Sign::Plus, Sign::Plus, Sign::Plus); 8];
        for (i, t) in out.iter_mut().enumerate() {
            *t = (s[i >> 2 & 1], s[i >> 1 & 1], s[i & 1]);
        }
        out
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}
