//! Hyperpolygon configurations, moment maps, weight combinatorics and the
//! stability oracle.
//!
//! Indices are 0-based in the API; subsets print 1-based (`{1,2}`) to match
//! the usual labelling of polygon sides.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::algebra::{
    hermitian_coords, traceless_part, vec3_add, vec3_norm, Covec2C, Mat2, Vec2C, Vec3, C64, I,
    ZERO,
};
use crate::{Error, Result};

/// Largest `n` accepted by the exhaustive subset sweeps.
pub const MAX_POINTS: usize = 24;
/// `min |ε_S|` at or below this margin is a wall.
pub const GENERICITY_MARGIN: f64 = 1e-8;
/// Default relative tolerance for projective proportionality of `q_i`, `q_j`.
pub const DEFAULT_PROP_TOL: f64 = 1e-9;
/// Relative threshold below which a covector `p_i` counts as zero.
pub const P_ZERO_TOL: f64 = 1e-9;
/// Default tolerance for membership in the real level set.
pub const LEVEL_TOL: f64 = 1e-8;

const SAMPLER_ATTEMPTS: usize = 64;

/// A subset of `{0, …, n-1}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn full(n: usize) -> Self {
        Self(((1u64 << n) - 1) as u32)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Self(indices.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn complement(&self, n: usize) -> Self {
        Self(!self.0 & Self::full(n).0)
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn indices(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| self.contains(i)).collect()
    }

    /// Members as 1-based labels.
    pub fn labels(&self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).map(|i| i + 1).collect()
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Positive weights `α_1, …, α_n` with `n >= 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "need at least 4 weights, got {}",
                alpha.len()
            )));
        }
        if let Some(i) = alpha.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "weight {} is not a positive number",
                i + 1
            )));
        }
        Ok(Self(alpha))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `ε_S(α) = Σ_{i∈S} α_i − Σ_{i∉S} α_i`.
    pub fn epsilon(&self, s: SubsetMask) -> f64 {
        epsilon(s, &self.0)
    }

    pub fn is_short(&self, s: SubsetMask) -> bool {
        self.epsilon(s) < 0.0
    }

    /// The subset achieving `min_S |ε_S|`, with that value.
    pub fn min_abs_epsilon(&self) -> Result<(SubsetMask, f64)> {
        let n = self.n();
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints { n, cap: MAX_POINTS });
        }
        // ε_{S^c} = -ε_S, so masks containing the last index suffice.
        let half = 1u32 << (n - 1);
        let top = 1u32 << (n - 1);
        let best = (0..half)
            .into_par_iter()
            .map(|m| {
                let s = SubsetMask(m | top);
                (self.epsilon(s).abs(), s)
            })
            .reduce(
                || (f64::INFINITY, SubsetMask::empty()),
                |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
            );
        Ok((best.1, best.0))
    }

    /// Errors with [`Error::NonGeneric`] when some `|ε_S|` is within the margin.
    pub fn check_generic(&self) -> Result<()> {
        let (subset, margin) = self.min_abs_epsilon()?;
        if margin <= GENERICITY_MARGIN {
            return Err(Error::NonGeneric { subset, margin });
        }
        Ok(())
    }
}

impl std::ops::Deref for WeightVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `Σ_{i∈S} α_i − Σ_{i∉S} α_i`.
pub fn epsilon(s: SubsetMask, alpha: &[f64]) -> f64 {
    alpha
        .iter()
        .enumerate()
        .map(|(i, a)| if s.contains(i) { *a } else { -*a })
        .sum()
}

/// A point `(p, q)` of `T*C^{2n}` together with its weights.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperConfig {
    pub alpha: WeightVector,
    pub p: Vec<Covec2C>,
    pub q: Vec<Vec2C>,
}

impl HyperConfig {
    pub fn new(alpha: WeightVector, p: Vec<Covec2C>, q: Vec<Vec2C>) -> Result<Self> {
        if p.len() != alpha.n() || q.len() != alpha.n() {
            return Err(Error::InvalidInput(format!(
                "expected {} covectors and vectors, got {} and {}",
                alpha.n(),
                p.len(),
                q.len()
            )));
        }
        Ok(Self { alpha, p, q })
    }

    /// Configuration with `p = 0`.
    pub fn polygon(alpha: WeightVector, q: Vec<Vec2C>) -> Result<Self> {
        let p = vec![Covec2C::default(); q.len()];
        Self::new(alpha, p, q)
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn p_max_abs(&self) -> f64 {
        self.p.iter().fold(0.0, |m, p| m.max(p.max_abs()))
    }

    pub fn q_max_abs(&self) -> f64 {
        self.q.iter().fold(0.0, |m, q| m.max(q.max_abs()))
    }

    /// `‖p‖∞ < P_ZERO_TOL · max(1, ‖q‖∞)`.
    pub fn p_is_negligible(&self) -> bool {
        self.p_max_abs() < P_ZERO_TOL * self.q_max_abs().max(1.0)
    }

    fn p_zero_threshold(&self) -> f64 {
        P_ZERO_TOL * self.q_max_abs().max(1.0)
    }

    /// Largest coordinate difference to another configuration.
    pub fn distance_inf(&self, other: &HyperConfig) -> f64 {
        let dp = self
            .p
            .iter()
            .zip(&other.p)
            .fold(0.0_f64, |m, (a, b)| m.max((*a - *b).max_abs()));
        self.q
            .iter()
            .zip(&other.q)
            .fold(dp, |m, (a, b)| m.max((*a - *b).max_abs()))
    }

    /// Reorders the indices: slot `k` of the result holds index `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> HyperConfig {
        let alpha = WeightVector(order.iter().map(|&i| self.alpha[i]).collect());
        HyperConfig {
            alpha,
            p: order.iter().map(|&i| self.p[i]).collect(),
            q: order.iter().map(|&i| self.q[i]).collect(),
        }
    }
}

/// Value of the real moment map.
#[derive(Clone, Debug, PartialEq)]
pub struct MuReal {
    /// The `su(2)` component as a vector of `R³`.
    pub su2: Vec3,
    /// The `½(|q_i|² − |p_i|²)`.
    pub scalars: Vec<f64>,
}

/// Value of the complex moment map.
#[derive(Clone, Debug, PartialEq)]
pub struct MuComplex {
    /// `−Σ (q_i p_i)_0`.
    pub matrix: Mat2,
    /// `i p_i q_i`.
    pub scalars: Vec<C64>,
}

impl MuComplex {
    pub fn max_abs(&self) -> f64 {
        self.scalars
            .iter()
            .fold(self.matrix.max_abs(), |m, z| m.max(z.norm()))
    }
}

pub fn mu_real(cfg: &HyperConfig) -> MuReal {
    let mut h = Mat2::zero();
    let mut scalars = Vec::with_capacity(cfg.n());
    for (p, q) in cfg.p.iter().zip(&cfg.q) {
        h += traceless_part(&(q.outer(&q.adjoint()) - p.adjoint().outer(p)));
        scalars.push(0.5 * (q.norm_sqr() - p.norm_sqr()));
    }
    MuReal {
        su2: hermitian_coords(&h),
        scalars,
    }
}

/// `‖μ_R − (0, α)‖∞`.
pub fn level_residual(cfg: &HyperConfig) -> f64 {
    let mu = mu_real(cfg);
    let su2 = mu.su2.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    mu.scalars
        .iter()
        .zip(cfg.alpha.iter())
        .fold(su2, |m, (s, a)| m.max((s - a).abs()))
}

pub fn mu_complex(cfg: &HyperConfig) -> MuComplex {
    let mut m = Mat2::zero();
    let mut scalars = Vec::with_capacity(cfg.n());
    for (p, q) in cfg.p.iter().zip(&cfg.q) {
        m += traceless_part(&q.outer(p));
        scalars.push(I * p.pair(q));
    }
    MuComplex {
        matrix: -m,
        scalars,
    }
}

/// `‖μ_C‖∞`.
pub fn complex_residual(cfg: &HyperConfig) -> f64 {
    mu_complex(cfg).max_abs()
}

/// Short subsets of a generic weight vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortCensus {
    pub generic: bool,
    pub min_abs_epsilon: f64,
    /// Non-empty short sets in increasing mask order.
    pub shorts: Vec<SubsetMask>,
    /// Short sets with at least two elements.
    pub sprime: Vec<SubsetMask>,
}

pub fn short_census(alpha: &WeightVector) -> Result<ShortCensus> {
    alpha.check_generic()?;
    let (_, min_abs_epsilon) = alpha.min_abs_epsilon()?;
    let n = alpha.n();
    let shorts: Vec<SubsetMask> = (1..(1u32 << n))
        .into_par_iter()
        .map(SubsetMask)
        .filter(|s| alpha.is_short(*s))
        .collect();
    let sprime = shorts.iter().copied().filter(|s| s.len() >= 2).collect();
    Ok(ShortCensus {
        generic: true,
        min_abs_epsilon,
        shorts,
        sprime,
    })
}

/// `|c_i d_j − d_i c_j| <= tol |q_i| |q_j|`.
pub fn proportional(a: &Vec2C, b: &Vec2C, tol: f64) -> bool {
    a.wedge(b).norm() <= tol * a.norm() * b.norm()
}

/// Classes of indices whose `q_i` are projectively proportional, ordered by
/// smallest member. Proportionality with a tolerance is not transitive; the
/// classes are the connected components of the proportionality graph.
pub fn maximal_straight_sets(cfg: &HyperConfig, tol: f64) -> Result<Vec<SubsetMask>> {
    let n = cfg.n();
    if let Some(i) = cfg.q.iter().position(|q| q.norm_sqr() == 0.0) {
        return Err(Error::ZeroVector(i));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if proportional(&cfg.q[i], &cfg.q[j], tol) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut classes: Vec<SubsetMask> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(SubsetMask::empty());
        }
        classes[slot[r]].insert(i);
    }
    Ok(classes)
}

/// Outcome of the stability test.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    /// First index with `q_i = 0`, if any.
    pub zero_q: Option<usize>,
    /// A long straight set whose complement carries `p = 0`.
    pub violating: Option<SubsetMask>,
}

/// The α-stability criterion with the default proportionality tolerance.
pub fn is_alpha_stable(cfg: &HyperConfig) -> Result<StabilityReport> {
    is_alpha_stable_with(cfg, DEFAULT_PROP_TOL)
}

pub fn is_alpha_stable_with(cfg: &HyperConfig, prop_tol: f64) -> Result<StabilityReport> {
    cfg.alpha.check_generic()?;
    if let Some(i) = cfg.q.iter().position(|q| q.norm_sqr() == 0.0) {
        return Ok(StabilityReport {
            stable: false,
            zero_q: Some(i),
            violating: None,
        });
    }
    let threshold = cfg.p_zero_threshold();
    let n = cfg.n();
    for s in maximal_straight_sets(cfg, prop_tol)? {
        let p_vanishes = s
            .complement(n)
            .indices(n)
            .iter()
            .all(|&j| cfg.p[j].max_abs() < threshold);
        if p_vanishes && !cfg.alpha.is_short(s) {
            return Ok(StabilityReport {
                stable: false,
                zero_q: None,
                violating: Some(s),
            });
        }
    }
    Ok(StabilityReport {
        stable: true,
        zero_q: None,
        violating: None,
    })
}

fn gaussian_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_vec(rng: &mut ChaCha8Rng) -> Vec2C {
    Vec2C::new(gaussian_c(rng), gaussian_c(rng))
}

/// Columns `(c d, c², d²)` of the linear system `Σ t_i q_i (d_i, −c_i) = 0`.
fn level_columns(q: &[Vec2C]) -> Vec<[C64; 3]> {
    q.iter()
        .map(|q| {
            let [c, d] = q.0;
            [c * d, c * c, d * d]
        })
        .collect()
}

/// Solves for the three pivot coefficients given the others.
fn solve_pivots(cols: &[[C64; 3]], t: &mut [C64], pivots: [usize; 3]) -> Option<()> {
    let m = Matrix3::from_fn(|r, k| cols[pivots[k]][r]);
    let mut rhs = Vector3::from_element(ZERO);
    for (i, col) in cols.iter().enumerate() {
        if !pivots.contains(&i) {
            for r in 0..3 {
                rhs[r] -= col[r] * t[i];
            }
        }
    }
    let scale = m.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let det = m.determinant();
    if !(det.norm() > 1e-6 * scale.powi(3)) {
        return None;
    }
    let sol = m.lu().solve(&rhs)?;
    for k in 0..3 {
        t[pivots[k]] = sol[k];
    }
    Some(())
}

fn config_from_t(alpha: &WeightVector, q: Vec<Vec2C>, t: &[C64]) -> HyperConfig {
    let p = q.iter().zip(t).map(|(q, t)| q.annihilator().scale(*t)).collect();
    HyperConfig {
        alpha: alpha.clone(),
        p,
        q,
    }
}

/// A random α-stable point of the complex level set `μ_C = 0`.
///
/// `q` is Gaussian and `p_i = t_i (d_i, −c_i)`, so `p_i q_i = 0` holds by
/// construction; three of the `t_i` are then solved so that `Σ q_i p_i = 0`.
/// The output is deterministic in `seed`.
pub fn sample_complex_level(alpha: &WeightVector, seed: u64) -> Result<HyperConfig> {
    alpha.check_generic()?;
    let n = alpha.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLER_ATTEMPTS {
        let q: Vec<Vec2C> = (0..n).map(|_| gaussian_vec(&mut rng)).collect();
        let mut t: Vec<C64> = (0..n).map(|_| gaussian_c(&mut rng)).collect();
        let pivots = [n - 3, n - 2, n - 1];
        if solve_pivots(&level_columns(&q), &mut t, pivots).is_none() {
            continue;
        }
        let cfg = config_from_t(alpha, q, &t);
        if complex_residual(&cfg) < 1e-12 && is_alpha_stable(&cfg)?.stable {
            return Ok(cfg);
        }
    }
    Err(Error::SamplerFailed(SAMPLER_ATTEMPTS))
}

/// A random α-stable configuration with `p = 0`. Exists only when every
/// single side is shorter than the sum of the others.
pub fn sample_polygon_level(alpha: &WeightVector, seed: u64) -> Result<HyperConfig> {
    alpha.check_generic()?;
    let n = alpha.n();
    if (0..n).any(|i| !alpha.is_short(SubsetMask::from_indices(&[i]))) {
        return Err(Error::InvalidInput(
            "some side is longer than the others combined; no closed polygons".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLER_ATTEMPTS {
        let q: Vec<Vec2C> = (0..n).map(|_| gaussian_vec(&mut rng)).collect();
        let cfg = HyperConfig::polygon(alpha.clone(), q)?;
        if is_alpha_stable(&cfg)?.stable {
            return Ok(cfg);
        }
    }
    Err(Error::SamplerFailed(SAMPLER_ATTEMPTS))
}

/// The coefficients `t_i` with `p_i = t_i (d_i, −c_i)`; exact when `p_i q_i = 0`.
pub fn annihilator_coefficients(cfg: &HyperConfig) -> Vec<C64> {
    cfg.p
        .iter()
        .zip(&cfg.q)
        .map(|(p, q)| {
            let a = q.annihilator();
            let den = a.norm_sqr();
            if den == 0.0 {
                ZERO
            } else {
                (p.0[0] * a.0[0].conj() + p.0[1] * a.0[1].conj()) / den
            }
        })
        .collect()
}

/// A nearby point of the complex level set: `q` moves by `eps` Gaussian
/// noise, the `t_i` move by `eps` noise and three of them are re-solved.
pub fn perturb_on_complex_level(
    cfg: &HyperConfig,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Result<HyperConfig> {
    let n = cfg.n();
    let t0 = annihilator_coefficients(cfg);
    for _ in 0..SAMPLER_ATTEMPTS {
        let q: Vec<Vec2C> = cfg
            .q
            .iter()
            .map(|q| *q + gaussian_vec(rng).scale(C64::new(eps, 0.0)))
            .collect();
        let mut t: Vec<C64> = t0.iter().map(|t| t + gaussian_c(rng) * eps).collect();
        let cols = level_columns(&q);
        let mut best: Option<([usize; 3], f64)> = None;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let m = Matrix3::from_fn(|r, k| cols[[a, b, c][k]][r]);
                    let d = m.determinant().norm();
                    if best.is_none_or(|(_, bd)| d > bd) {
                        best = Some(([a, b, c], d));
                    }
                }
            }
        }
        let Some((pivots, _)) = best else {
            break;
        };
        if solve_pivots(&cols, &mut t, pivots).is_none() {
            continue;
        }
        let out = config_from_t(&cfg.alpha, q, &t);
        if complex_residual(&out) < 1e-10 {
            return Ok(out);
        }
    }
    Err(Error::SamplerFailed(SAMPLER_ATTEMPTS))
}

/// `p ↦ λ p`, `q` unchanged.
pub fn circle_act(lambda: C64, cfg: &HyperConfig) -> HyperConfig {
    HyperConfig {
        alpha: cfg.alpha.clone(),
        p: cfg.p.iter().map(|p| p.scale(lambda)).collect(),
        q: cfg.q.clone(),
    }
}

/// `½ Σ |p_i|²`.
pub fn phi(cfg: &HyperConfig) -> f64 {
    0.5 * cfg.p.iter().map(Covec2C::norm_sqr).sum::<f64>()
}

/// The Euclidean side vector of a single `q`: `(Re(c d̄), Im(c d̄), (|c|²−|d|²)/2)`.
pub fn side_of(q: &Vec2C) -> Vec3 {
    let [c, d] = q.0;
    let cd = c * d.conj();
    [cd.re, cd.im, 0.5 * (c.norm_sqr() - d.norm_sqr())]
}

/// A vector `q` with [`side_of`]`(q) = s`.
pub fn hopf_lift(s: Vec3) -> Vec2C {
    let r = vec3_norm(s);
    let c2 = r + s[2];
    if c2 <= 1e-300 {
        return Vec2C::new(ZERO, C64::new((2.0 * r).sqrt(), 0.0));
    }
    let c = c2.sqrt();
    Vec2C::new(C64::new(c, 0.0), C64::new(s[0], -s[1]) / c)
}

/// The closed Euclidean polygon of a `p = 0` point of the level set.
pub fn euclidean_sides(cfg: &HyperConfig) -> Result<Vec<Vec3>> {
    if !cfg.p_is_negligible() {
        return Err(Error::InvalidInput("euclidean_sides needs p = 0".into()));
    }
    let res = level_residual(cfg);
    if res > LEVEL_TOL {
        return Err(Error::NotOnLevelSet(res));
    }
    Ok(cfg.q.iter().map(side_of).collect())
}

/// The `p = 0` configuration whose polygon has the given sides.
pub fn polygon_config(sides: &[Vec3]) -> Result<HyperConfig> {
    let alpha = WeightVector::new(sides.iter().map(|s| vec3_norm(*s)).collect())?;
    HyperConfig::polygon(alpha, sides.iter().map(|s| hopf_lift(*s)).collect())
}

/// Length of the Euclidean diagonal `s_1 + … + s_j`.
pub fn euclidean_diagonal(sides: &[Vec3], j: usize) -> f64 {
    vec3_norm(sides[..j].iter().fold([0.0; 3], |a, s| vec3_add(a, *s)))
}

/// A closed quadrilateral with side lengths `alpha` whose diagonal `s_1 + s_2`
/// has length `ell`, with the two triangles opened by the bending angle
/// `theta`. `None` when a triangle inequality fails.
pub fn euclidean_quadrilateral(alpha: [f64; 4], ell: f64, theta: f64) -> Option<[Vec3; 4]> {
    if !(ell > 0.0) {
        return None;
    }
    // Triangle with sides a, b and base ell along +z: apex offset from the
    // base start is (x, 0, z) with z = (ell² + a² − b²) / (2 ell).
    let apex = |a: f64, b: f64| -> Option<(f64, f64)> {
        let z = (ell * ell + a * a - b * b) / (2.0 * ell);
        let x2 = a * a - z * z;
        if x2 < -1e-12 * a * a {
            return None;
        }
        Some((x2.max(0.0).sqrt(), z))
    };
    let (x1, z1) = apex(alpha[0], alpha[1])?;
    let (x3, z3) = apex(alpha[2], alpha[3])?;
    let (s, c) = theta.sin_cos();
    let s1 = [x1 * c, x1 * s, z1];
    let s2 = [-x1 * c, -x1 * s, ell - z1];
    let s3 = [x3, 0.0, -z3];
    let s4 = [-x3, 0.0, -(ell - z3)];
    Some([s1, s2, s3, s4])
}
