//! Maximal γ-separated direction sets Ω(γ) and the angular decomposition
//! lemmas built on them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_distr::StandardNormal;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::exec::chunk_rng;
use crate::geometry::{angle_unchecked, in_annulus, Direction, Sign, SpacetimePoint, Vec3};

/// Bumped whenever construction changes in a way that alters the output.
pub const BUILDER_VERSION: u32 = 1;

/// Consecutive random rejections after which the refill phase stops.
pub const REFILL_PATIENCE: usize = 100_000;

/// Largest net the builder will attempt (about γ ≈ 1.5·10⁻³).
pub const MAX_NET_POINTS: usize = 5_000_000;

/// Smallest dyadic level used by the separated decomposition.
pub const GAMMA_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

#[derive(Clone, Debug)]
pub struct SphereNet {
    gamma: f64,
    seed: u64,
    directions: Vec<Vec3>,
    index: GridIndex,
}

#[derive(Serialize, Deserialize)]
struct NetFile {
    gamma: f64,
    seed: u64,
    builder_version: u32,
    directions: Vec<[f64; 3]>,
}

/// An ordered pair of net directions at a dyadic scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorPair {
    pub gamma: f64,
    pub omega1: Vec3,
    pub omega2: Vec3,
}

fn chord(phi: f64) -> f64 {
    2.0 * (phi.clamp(0.0, PI) / 2.0).sin()
}

/// Bucket grid over [−1, 1]³ for angular neighbour queries on S².
#[derive(Clone, Debug)]
struct GridIndex {
    cell: f64,
    buckets: FxHashMap<[i32; 3], Vec<u32>>,
}

impl GridIndex {
    fn new(gamma: f64) -> Self {
        GridIndex { cell: chord(gamma).max(1.0 / 256.0), buckets: FxHashMap::default() }
    }

    fn key(&self, v: Vec3) -> [i32; 3] {
        let f = |c: f64| ((c + 1.0) / self.cell).floor() as i32;
        [f(v.x), f(v.y), f(v.z)]
    }

    fn insert(&mut self, v: Vec3, id: u32) {
        let k = self.key(v);
        self.buckets.entry(k).or_default().push(id);
    }

    /// Calls `f` with every stored id whose point might lie within chord
    /// distance `c` of `v`.
    fn for_candidates(&self, v: Vec3, c: f64, mut f: impl FnMut(u32)) {
        let lo = self.key(v - Vec3::new(c, c, c));
        let hi = self.key(v + Vec3::new(c, c, c));
        let span = (hi[0] - lo[0] + 1) as i64 * (hi[1] - lo[1] + 1) as i64 * (hi[2] - lo[2] + 1) as i64;
        if span as usize > self.buckets.len() {
            for ids in self.buckets.values() {
                ids.iter().for_each(|&i| f(i));
            }
            return;
        }
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    if let Some(ids) = self.buckets.get(&[i, j, k]) {
                        ids.iter().for_each(|&id| f(id));
                    }
                }
            }
        }
    }
}

/// Separation test with a cheap dot-product filter; exact angle only near the threshold.
#[inline]
fn at_least_apart(a: Vec3, b: Vec3, gamma: f64, cos_gamma: f64) -> bool {
    let d = a.dot(b);
    if d < cos_gamma - 1e-9 {
        true
    } else if d > cos_gamma + 1e-9 {
        false
    } else {
        angle_unchecked(a, b) >= gamma
    }
}

impl SphereNet {
    /// Builds a maximal γ-separated set, deterministic in `seed`.
    ///
    /// Greedy insertion over a seeded rotation of a Fibonacci spiral with
    /// spacing γ/4, then seeded random refill until [`REFILL_PATIENCE`]
    /// consecutive rejections, then a repair pass that inserts a point next to
    /// every boundary-circle intersection still farther than γ from the net.
    pub fn build(gamma: f64, seed: u64) -> Result<SphereNet> {
        ensure!(gamma > 0.0 && gamma <= PI, Domain, "gamma {gamma} outside (0, pi]");
        let estimate = (16.0 / (gamma * gamma)).ceil();
        ensure!(
            estimate <= MAX_NET_POINTS as f64,
            Resource,
            "net for gamma {gamma} would hold up to {estimate} points (cap {MAX_NET_POINTS})"
        );
        let mut b = Builder::new(gamma);
        let mut rng = chunk_rng(seed, 0);
        let rot = random_rotation(&mut rng);

        let spacing = gamma / 4.0;
        let n_fib = ((4.0 * PI) / (spacing * spacing)).ceil().max(16.0) as usize;
        let golden = PI * (3.0 - 5f64.sqrt());
        for i in 0..n_fib {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n_fib as f64;
            let rxy = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            b.try_insert(rot(Vec3::new(rxy * c, rxy * s, z)));
        }

        let mut misses = 0;
        while misses < REFILL_PATIENCE {
            if b.try_insert(random_direction(&mut rng)) {
                misses = 0;
            } else {
                misses += 1;
            }
        }

        if b.points.len() == 1 {
            let p = -b.points[0];
            b.try_insert(p);
        }
        b.repair();
        Ok(SphereNet { gamma, seed, directions: b.points, index: b.index })
    }

    /// Loads a cached net from `dir` or builds and stores it.
    pub fn load_or_build(dir: &Path, gamma: f64, seed: u64) -> Result<SphereNet> {
        let path = dir.join(format!("net-v{BUILDER_VERSION}-{:016x}-{seed}.json", gamma.to_bits()));
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(net) = SphereNet::from_json(&text) {
                if net.gamma == gamma && net.seed == seed {
                    return Ok(net);
                }
            }
        }
        let net = SphereNet::build(gamma, seed)?;
        std::fs::create_dir_all(dir)?;
        std::fs::write(&path, net.to_json()?)?;
        Ok(net)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = NetFile {
            gamma: self.gamma,
            seed: self.seed,
            builder_version: BUILDER_VERSION,
            directions: self.directions.iter().map(|d| d.to_array()).collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    /// Parses a cached net; rejects other builder versions and non-unit entries.
    pub fn from_json(text: &str) -> Result<SphereNet> {
        let file: NetFile = serde_json::from_str(text)?;
        ensure!(
            file.builder_version == BUILDER_VERSION,
            Usage,
            "net cache has builder version {}, expected {BUILDER_VERSION}",
            file.builder_version
        );
        ensure!(file.gamma > 0.0 && file.gamma <= PI, Domain, "cached gamma {}", file.gamma);
        let mut index = GridIndex::new(file.gamma);
        let mut directions = Vec::with_capacity(file.directions.len());
        for (i, d) in file.directions.into_iter().enumerate() {
            // Validated but kept bit-exact, so a cached net equals a rebuilt one.
            let v: Vec3 = d.into();
            Direction::new(v)?;
            index.insert(v, i as u32);
            directions.push(v);
        }
        Ok(SphereNet { gamma: file.gamma, seed: file.seed, directions, index })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Indices of net points with θ(ω, v) ≤ φ, in increasing order.
    pub fn within(&self, v: Vec3, phi: f64) -> Vec<usize> {
        let Some(u) = v.normalized() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let c = chord(phi) + 1e-12;
        self.index.for_candidates(u, c, |id| {
            let w = self.directions[id as usize];
            if angle_unchecked(u, w) <= phi {
                out.push(id as usize);
            }
        });
        out.sort_unstable();
        out
    }

    /// Smallest angle from `v` to the net.
    pub fn nearest_angle(&self, v: Vec3) -> f64 {
        let Some(u) = v.normalized() else {
            return f64::NAN;
        };
        let mut radius = self.gamma;
        loop {
            let mut best = f64::INFINITY;
            self.index.for_candidates(u, chord(radius) + 1e-12, |id| {
                best = best.min(angle_unchecked(u, self.directions[id as usize]));
            });
            if best <= radius || radius >= PI {
                return best;
            }
            radius = (radius * 2.0).min(PI);
        }
    }

    /// #{ω ∈ Ω(γ) : θ(ξ, ω) ≤ γ}.
    pub fn covering_multiplicity(&self, xi: Vec3) -> Result<usize> {
        ensure!(!xi.is_zero(), Domain, "covering multiplicity of the zero vector");
        Ok(self.within(xi, self.gamma).len())
    }

    /// #{ω′ ∈ Ω(γ) : θ(ω′, ω) ≤ kγ}.
    pub fn count_within(&self, omega: Vec3, k: u32) -> Result<usize> {
        ensure!(k >= 1, Domain, "k must be at least 1");
        ensure!(!omega.is_zero(), Domain, "count_within around the zero vector");
        Ok(self.within(omega, k as f64 * self.gamma).len())
    }

    /// Pairs (ω₁, ω₂) ∈ Ω(γ)² with ξⱼ ∈ Γ_γ(ωⱼ) and θ(ω₁, ω₂) ≤ (k+2)γ.
    pub fn near_pair_decomposition(&self, xi1: Vec3, xi2: Vec3, k: u32) -> Result<Vec<SectorPair>> {
        ensure!(!xi1.is_zero() && !xi2.is_zero(), Domain, "near pair decomposition of a zero vector");
        let g = self.gamma;
        let theta = angle_unchecked(xi1, xi2);
        ensure!(theta <= k as f64 * g, Precondition, "angle {theta} exceeds k*gamma = {}", k as f64 * g);
        let a = self.within(xi1, g);
        let b = self.within(xi2, g);
        let limit = (k + 2) as f64 * g;
        let mut out = Vec::new();
        for &i in &a {
            for &j in &b {
                let (w1, w2) = (self.directions[i], self.directions[j]);
                if angle_unchecked(w1, w2) <= limit {
                    out.push(SectorPair { gamma: g, omega1: w1, omega2: w2 });
                }
            }
        }
        Ok(out)
    }

    /// Overlap count of thickened null hyperplanes H_d(ω) over the net
    /// directions within γ′ of ω₀, with the bound γ′/γ + d/(Nγ²).
    pub fn hyperplane_overlap_count(
        &self,
        omega0: Vec3,
        gamma_prime: f64,
        d: f64,
        n: f64,
        x: SpacetimePoint,
    ) -> Result<(usize, f64)> {
        let g = self.gamma;
        ensure!(0.0 < g && g < gamma_prime && gamma_prime < 1.0, Precondition, "need 0 < gamma < gamma' < 1");
        ensure!(d > 0.0 && n > 0.0, Precondition, "d and N must be positive");
        let m = x.xi.norm();
        ensure!(m >= n / 2.0 && m <= 2.0 * n, Precondition, "|xi| = {m} not in [N/2, 2N]");
        let count = self
            .within(omega0, gamma_prime)
            .into_iter()
            .filter(|&i| (-x.tau + x.xi.dot(self.directions[i])).abs() <= d)
            .count();
        Ok((count, gamma_prime / g + d / (n * g * g)))
    }
}

/// If X ∈ K±_{N,L,γ,ω} then |−τ + ξ·ω| ≤ c·max(L, Nγ²). Returns the truth of
/// that implication (vacuously true off the sector).
pub fn sector_in_hyperplane_check(
    sign: Sign,
    n: f64,
    l: f64,
    gamma: f64,
    omega: Vec3,
    x: SpacetimePoint,
    c: f64,
) -> Result<bool> {
    Ok(match sector_hyperplane_ratio(sign, n, l, gamma, omega, x)? {
        Some(ratio) => ratio <= c,
        None => true,
    })
}

/// |−τ + ξ·ω| / max(L, Nγ²) for X in the sector, `None` otherwise.
pub fn sector_hyperplane_ratio(
    sign: Sign,
    n: f64,
    l: f64,
    gamma: f64,
    omega: Vec3,
    x: SpacetimePoint,
) -> Result<Option<f64>> {
    ensure!(gamma > 0.0 && gamma < 1.0, Precondition, "sector check needs 0 < gamma < 1");
    ensure!(n > 0.0 && l >= 0.0, Domain, "N must be positive and L non-negative");
    let w = omega.normalized().ok_or_else(|| Error::Domain("zero sector axis".into()))?;
    let m = x.xi.norm();
    let inside =
        in_annulus(m, n) && (-x.tau + sign.value() * m).abs() <= l && angle_unchecked(x.xi * sign.value(), w) <= gamma;
    Ok(inside.then(|| (-x.tau + x.xi.dot(w)).abs() / l.max(n * gamma * gamma)))
}

/// Nets at the dyadic levels 2^{-k}γ* for one seed, built on demand.
#[derive(Debug)]
pub struct NetFamily {
    seed: u64,
    levels: Mutex<BTreeMap<u32, Arc<SphereNet>>>,
}

impl NetFamily {
    pub fn new(seed: u64) -> Self {
        NetFamily { seed, levels: Mutex::new(BTreeMap::new()) }
    }

    /// Net at level γ = 2^{-k}·γ*; γ* must be one fixed value per family.
    pub fn level(&self, gamma_star: f64, k: u32) -> Result<Arc<SphereNet>> {
        let mut map = self.levels.lock().expect("net cache poisoned");
        if let Some(n) = map.get(&k) {
            if n.gamma() == gamma_star / (1u64 << k) as f64 {
                return Ok(Arc::clone(n));
            }
        }
        let net = Arc::new(SphereNet::build(gamma_star / (1u64 << k) as f64, self.seed)?);
        map.insert(k, Arc::clone(&net));
        Ok(net)
    }

    /// Triples (γ, ω₁, ω₂) over dyadic γ ≤ γ* with ξⱼ ∈ Γ_γ(ωⱼ) and
    /// mγ ≤ θ(ω₁, ω₂) ≤ Mγ, where M = 2(1 + (m+2)/γ*).
    ///
    /// Only levels with (θ − 2γ)/M ≤ γ ≤ θ/(m − 2) can contribute, where
    /// θ = θ(ξ₁, ξ₂); the others are skipped. Levels below
    /// [`GAMMA_FLOOR`] are never visited.
    pub fn separated_pair_decomposition(
        &self,
        xi1: Vec3,
        xi2: Vec3,
        gamma_star: f64,
        m: u32,
    ) -> Result<Vec<SectorPair>> {
        ensure!(gamma_star > 0.0 && gamma_star <= 1.0, Domain, "gamma* {gamma_star} outside (0, 1]");
        ensure!(m >= 3, Domain, "m must be at least 3");
        ensure!(!xi1.is_zero() && !xi2.is_zero(), Domain, "zero vector in separated decomposition");
        let theta = angle_unchecked(xi1, xi2);
        ensure!(theta > 0.0, Domain, "collinear inputs have no separated decomposition");
        let big_m = separation_ceiling(gamma_star, m);
        let mut out = Vec::new();
        for k in 0.. {
            let g = gamma_star / (1u64 << k) as f64;
            if g < GAMMA_FLOOR || g * (big_m + 2.0) < theta {
                break;
            }
            if g * (m as f64 - 2.0) > theta {
                continue;
            }
            let net = self.level(gamma_star, k)?;
            let a = net.within(xi1, g);
            let b = net.within(xi2, g);
            for &i in &a {
                for &j in &b {
                    let (w1, w2) = (net.directions[i], net.directions[j]);
                    let t = angle_unchecked(w1, w2);
                    if m as f64 * g <= t && t <= big_m * g {
                        out.push(SectorPair { gamma: g, omega1: w1, omega2: w2 });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// M = 2(1 + (m+2)/γ*).
pub fn separation_ceiling(gamma_star: f64, m: u32) -> f64 {
    2.0 * (1.0 + (m as f64 + 2.0) / gamma_star)
}

struct Builder {
    gamma: f64,
    cos_gamma: f64,
    points: Vec<Vec3>,
    index: GridIndex,
}

impl Builder {
    fn new(gamma: f64) -> Self {
        Builder { gamma, cos_gamma: gamma.cos(), points: Vec::new(), index: GridIndex::new(gamma) }
    }

    fn separated(&self, v: Vec3) -> bool {
        let mut ok = true;
        let c = chord(self.gamma) + 1e-9;
        self.index.for_candidates(v, c, |id| {
            ok = ok && at_least_apart(v, self.points[id as usize], self.gamma, self.cos_gamma);
        });
        ok
    }

    fn try_insert(&mut self, v: Vec3) -> bool {
        if !self.separated(v) {
            return false;
        }
        let id = self.points.len() as u32;
        self.index.insert(v, id);
        self.points.push(v);
        true
    }

    /// Fills holes left by the sampling phases. An open region farther than γ
    /// from every net point has a corner where two γ-circles cross; a point
    /// nudged off that corner along the bisector is separated from the net.
    fn repair(&mut self) {
        let g = self.gamma;
        if g >= PI / 2.0 {
            return self.repair_coarse();
        }
        loop {
            let mut added = false;
            let n = self.points.len();
            for i in 0..n {
                let pi = self.points[i];
                let mut near = Vec::new();
                self.index.for_candidates(pi, chord(2.0 * g) + 1e-9, |id| {
                    if id as usize > i {
                        near.push(id as usize);
                    }
                });
                for j in near {
                    if j == i {
                        continue;
                    }
                    let pj = self.points[j];
                    for v in circle_crossings(pi, pj, g) {
                        if let Some(p) = self.nudge_into_hole(v, pi, pj) {
                            let id = self.points.len() as u32;
                            self.index.insert(p, id);
                            self.points.push(p);
                            added = true;
                        }
                    }
                }
            }
            if !added {
                break;
            }
        }
    }

    /// For γ ≥ π/2 nets have a handful of points; probe a dense grid instead.
    fn repair_coarse(&mut self) {
        loop {
            let mut added = false;
            for i in 0..2000 {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / 2000.0;
                let r = (1.0 - z * z).sqrt();
                let (s, c) = (PI * (3.0 - 5f64.sqrt()) * i as f64).sin_cos();
                if self.try_insert(Vec3::new(r * c, r * s, z)) {
                    added = true;
                }
            }
            if !added {
                break;
            }
        }
    }

    fn nudge_into_hole(&self, v: Vec3, a: Vec3, b: Vec3) -> Option<Vec3> {
        let g = self.gamma;
        let mut slack = f64::INFINITY;
        self.index.for_candidates(v, chord(g) + 1e-9, |id| {
            let w = self.points[id as usize];
            if w != a && w != b {
                slack = slack.min(angle_unchecked(v, w) - g);
            }
        });
        if slack <= 1e-12 {
            return None;
        }
        let mid = (a + b).normalized()?;
        let d = v - mid;
        let away = (d - v * d.dot(v)).normalized()?;
        let eta = (slack / 2.0).min(g * 1e-3);
        let p = (v + away * eta).normalized()?;
        self.separated(p).then_some(p)
    }
}

/// Intersection points of the circles of angular radius γ about unit vectors a, b.
fn circle_crossings(a: Vec3, b: Vec3, g: f64) -> Vec<Vec3> {
    let cab = a.dot(b).clamp(-1.0, 1.0);
    let denom = 1.0 - cab * cab;
    if denom <= 1e-15 {
        return Vec::new();
    }
    let cg = g.cos();
    // v = s(a + b) + t(a × b) with v·a = v·b = cos γ.
    let s = cg / (1.0 + cab);
    let axb = a.cross(b);
    let base = (a + b) * s;
    let rest = 1.0 - base.norm2();
    if rest < 0.0 {
        return Vec::new();
    }
    let t = (rest / axb.norm2()).sqrt();
    vec![base + axb * t, base - axb * t]
}

fn random_direction(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

/// Uniform random rotation, returned as a closure on vectors.
fn random_rotation(rng: &mut impl Rng) -> impl Fn(Vec3) -> Vec3 {
    let a = random_direction(rng);
    let b = random_direction(rng).cross(a).normalized().unwrap_or_else(|| a.any_orthogonal());
    let c = a.cross(b);
    move |v: Vec3| a * v.x + b * v.y + c * v.z
}

/// Uniformly distributed unit vector from a seeded generator.
pub fn sample_direction(rng: &mut impl Rng) -> Vec3 {
    random_direction(rng)
}
