//! Closed polygons in Minkowski 3-space `R^{2,1}`.
//!
//! A polygon of type `(k1, k2)` has its first `k1` sides in the future
//! time-like cone and the remaining `k2` in the past cone, with Minkowski
//! norms `α_i`. The diagonal `SU(1,1)` acts by isometries; normalization
//! puts the future block's sum on the `t`-axis.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{CausalClass, MinkVector, Su11Isometry};
use crate::hyperpolygon::SubsetMask;
use crate::{Error, Result};

/// `|v∘v| < LIGHTLIKE_TOL · (1 + |v|²)` counts as light-like.
pub const LIGHTLIKE_TOL: f64 = 1e-10;
/// Largest exponent accepted by [`noncompact_witness`].
pub const WITNESS_MAX_EXPONENT: u32 = 26;

/// Sides of a polygon together with its type and radii.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkPolygon {
    pub sides: Vec<MinkVector>,
    pub k1: usize,
    pub alpha: Vec<f64>,
}

impl MinkPolygon {
    pub fn new(sides: Vec<MinkVector>, k1: usize, alpha: Vec<f64>) -> Result<Self> {
        if sides.len() != alpha.len() || k1 > sides.len() {
            return Err(Error::InvalidInput(format!(
                "{} sides, {} radii, k1 = {k1}",
                sides.len(),
                alpha.len()
            )));
        }
        Ok(Self { sides, k1, alpha })
    }

    pub fn n(&self) -> usize {
        self.sides.len()
    }

    pub fn k2(&self) -> usize {
        self.n() - self.k1
    }

    /// `Σ u_i` with compensated summation.
    pub fn closure(&self) -> MinkVector {
        MinkVector::sum(&self.sides)
    }

    /// `g·u_i` for every side.
    pub fn transformed(&self, g: &Su11Isometry) -> MinkPolygon {
        MinkPolygon {
            sides: self.sides.iter().map(|u| g.apply(u)).collect(),
            k1: self.k1,
            alpha: self.alpha.clone(),
        }
    }

    /// Largest coordinate difference to another polygon.
    pub fn distance_inf(&self, other: &MinkPolygon) -> f64 {
        self.sides
            .iter()
            .zip(&other.sides)
            .fold(0.0, |m, (a, b)| m.max((*a - *b).max_abs()))
    }
}

/// Result of [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// `‖Σ u_i‖∞`.
    pub closure_residual: f64,
    /// `|‖u_i‖ − α_i|` per side.
    pub norm_errors: Vec<f64>,
    /// Sides that are not in the cone their slot requires.
    pub causal_violations: Vec<usize>,
    /// `Σ_{i<=k1} α_i ≠ Σ_{i>k1} α_i`.
    pub generic: bool,
}

impl ValidationReport {
    pub fn max_norm_error(&self) -> f64 {
        self.norm_errors.iter().fold(0.0, |m, e| m.max(*e))
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.closure_residual <= tol
            && self.max_norm_error() <= tol
            && self.causal_violations.is_empty()
    }
}

pub fn validate(poly: &MinkPolygon) -> ValidationReport {
    let closure_residual = poly.closure().max_abs();
    let norm_errors = poly
        .sides
        .iter()
        .zip(&poly.alpha)
        .map(|(u, a)| (u.norm() - a).abs())
        .collect();
    let causal_violations = poly
        .sides
        .iter()
        .enumerate()
        .filter(|(i, u)| {
            let want = if *i < poly.k1 {
                CausalClass::TimeLikeFuture
            } else {
                CausalClass::TimeLikePast
            };
            u.causal_class(0.0) != want
        })
        .map(|(i, _)| i)
        .collect();
    let future: f64 = poly.alpha[..poly.k1].iter().sum();
    let past: f64 = poly.alpha[poly.k1..].iter().sum();
    ValidationReport {
        closure_residual,
        norm_errors,
        causal_violations,
        generic: (future - past).abs() > 1e-12 * (future + past),
    }
}

fn is_degenerate(v: &MinkVector) -> bool {
    let e2 = v.x * v.x + v.y * v.y + v.t * v.t;
    v.inner(v).abs() < LIGHTLIKE_TOL * (1.0 + e2)
}

/// Moves the future block's sum `d` to `(0, 0, ‖d‖)` and fixes the residual
/// rotation so the first side with a nonzero spatial part points along `+x`.
pub fn normalize_su11(poly: &MinkPolygon) -> Result<(MinkPolygon, Su11Isometry)> {
    let d = MinkVector::sum(&poly.sides[..poly.k1]);
    if is_degenerate(&d) || d.causal_class(0.0) != CausalClass::TimeLikeFuture {
        return Err(Error::DegenerateDiagonal);
    }
    let r = d.x.hypot(d.y);
    let mut g = Su11Isometry::identity();
    if r > 1e-15 * d.t {
        // Rotate the spatial part onto +y, then boost it away.
        let to_y = Su11Isometry::rotation(FRAC_PI_2 - d.y.atan2(d.x));
        let phi = (r / d.t).atanh();
        g = Su11Isometry::boost(-phi).compose(&to_y);
    }
    let moved = poly.transformed(&g);
    let scale = moved.sides.iter().fold(0.0_f64, |m, u| m.max(u.max_abs()));
    if let Some(u) = moved
        .sides
        .iter()
        .find(|u| u.x.hypot(u.y) > 1e-12 * scale.max(1.0))
    {
        let angle = -u.y.atan2(u.x);
        if angle != 0.0 {
            g = Su11Isometry::rotation(angle).compose(&g);
        }
    }
    Ok((poly.transformed(&g), g))
}

/// `‖Σ_{i<=k1} (x_i, y_i)‖∞`, zero for normalized polygons.
pub fn normalization_defect(poly: &MinkPolygon) -> f64 {
    let d = MinkVector::sum(&poly.sides[..poly.k1]);
    d.x.abs().max(d.y.abs())
}

/// The Kostant–Kirillov form `ω_u(v, w) = u∘(v ×̇ w)/R²` on the pseudosphere of radius `R`.
pub fn kk_form(u: &MinkVector, v: &MinkVector, w: &MinkVector, radius: f64) -> Result<f64> {
    let scale = 1.0 + u.euclidean_norm() * (1.0 + v.euclidean_norm() + w.euclidean_norm());
    let tol = 1e-9 * scale;
    let on_sphere = (u.inner(u) - radius * radius).abs();
    let tangency = u.inner(v).abs().max(u.inner(w).abs());
    let defect = on_sphere.max(tangency);
    if defect > tol {
        return Err(Error::NotTangent(defect));
    }
    Ok(u.inner(&v.cross(w)) / (radius * radius))
}

/// `‖u_1 + … + u_j‖` (1-based `j`); `0` for `j = n`.
pub fn diagonal_length(poly: &MinkPolygon, j: usize) -> Result<f64> {
    if j == 0 || j > poly.n() {
        return Err(Error::InvalidInput(format!("diagonal index {j} out of range")));
    }
    if j == poly.n() {
        return Ok(0.0);
    }
    let d = MinkVector::sum(&poly.sides[..j]);
    if d.inner(&d) <= 0.0 {
        return Err(Error::NotTimelike(j));
    }
    Ok(d.norm())
}

/// Rotates `u_1, u_2` about the `t`-axis by `theta`; needs `u_1 + u_2` on that axis.
pub fn bend(poly: &MinkPolygon, theta: f64) -> Result<MinkPolygon> {
    if poly.n() < 3 {
        return Err(Error::InvalidInput("bending needs at least 3 sides".into()));
    }
    let d = poly.sides[0] + poly.sides[1];
    if d.x.hypot(d.y) > 1e-9 * (1.0 + d.euclidean_norm()) {
        return Err(Error::NotNormalized);
    }
    let rot = Su11Isometry::rotation(theta);
    let mut out = poly.clone();
    out.sides[0] = rot.apply(&poly.sides[0]);
    out.sides[1] = rot.apply(&poly.sides[1]);
    Ok(out)
}

/// One row of a bending sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BendRow {
    pub theta: f64,
    pub ell: f64,
    pub closure_inf_norm: f64,
    pub max_norm_error: f64,
}

/// `steps` equally spaced bending angles in `[0, 2π)`; the diagonal is `u_1 + u_2`.
pub fn bend_sweep(poly: &MinkPolygon, steps: usize) -> Result<Vec<BendRow>> {
    bend(poly, 0.0)?;
    (0..steps)
        .into_par_iter()
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / steps as f64;
            let bent = bend(poly, theta)?;
            let report = validate(&bent);
            Ok(BendRow {
                theta,
                ell: diagonal_length(&bent, 2)?,
                closure_inf_norm: report.closure_residual,
                max_norm_error: report.max_norm_error(),
            })
        })
        .collect()
}

/// `(x, y, t) ↦ (−x, −y, −t)` with the past block moved first.
pub fn dual_swap(poly: &MinkPolygon) -> MinkPolygon {
    let k1 = poly.k1;
    let order: Vec<usize> = (k1..poly.n()).chain(0..k1).collect();
    MinkPolygon {
        sides: order.iter().map(|&i| -poly.sides[i]).collect(),
        k1: poly.k2(),
        alpha: order.iter().map(|&i| poly.alpha[i]).collect(),
    }
}

/// Two vectors in the same cone as `w` with norms `a`, `b` summing to `w`,
/// the first at angle `theta` around `w`'s rest-frame axis. `None` unless
/// `‖w‖ >= a + b`.
pub fn split_timelike(w: &MinkVector, a: f64, b: f64, theta: f64) -> Option<(MinkVector, MinkVector)> {
    if w.inner(w) <= 0.0 {
        return None;
    }
    let sign = w.t.signum();
    let wf = *w * sign;
    let ell = wf.norm();
    if ell < a + b {
        return None;
    }
    let t1 = (ell * ell + a * a - b * b) / (2.0 * ell);
    let r = (t1 * t1 - a * a).max(0.0).sqrt();
    let (s, c) = theta.sin_cos();
    let g = Su11Isometry::to_future(&wf);
    let u = g.apply(&MinkVector::new(r * c, r * s, t1));
    let v = g.apply(&MinkVector::new(-r * c, -r * s, ell - t1));
    Some((u * sign, v * sign))
}

/// A random side of norm `a` in the future or past cone, rapidity below `max_rapidity`.
pub fn random_side(a: f64, future: bool, max_rapidity: f64, rng: &mut ChaCha8Rng) -> MinkVector {
    let phi = rng.random_range(0.0..max_rapidity);
    let psi = rng.random_range(0.0..std::f64::consts::TAU);
    let u = Su11Isometry::rotation(psi)
        .compose(&Su11Isometry::boost(phi))
        .apply(&MinkVector::new(0.0, 0.0, a));
    if future {
        u
    } else {
        -u
    }
}

/// A random isometry: rotation, boost, rotation.
pub fn random_isometry(max_rapidity: f64, rng: &mut ChaCha8Rng) -> Su11Isometry {
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let b = rng.random_range(0.0..std::f64::consts::TAU);
    let phi = rng.random_range(0.0..max_rapidity);
    Su11Isometry::rotation(a)
        .compose(&Su11Isometry::boost(phi))
        .compose(&Su11Isometry::rotation(b))
}

/// Splits the time-like `w` into sides with norms `radii`, choosing random
/// intermediate diagonal lengths; needs `‖w‖ >= Σ radii`.
fn split_block(w: MinkVector, radii: &[f64], rng: &mut ChaCha8Rng) -> Option<Vec<MinkVector>> {
    let mut out = Vec::with_capacity(radii.len());
    let mut rest = w;
    for (i, &a) in radii.iter().enumerate() {
        if i + 1 == radii.len() {
            out.push(rest);
            break;
        }
        let tail: f64 = radii[i + 1..].iter().sum();
        let ell = rest.norm();
        let next = if i + 2 == radii.len() {
            tail
        } else {
            rng.random_range(tail..=(ell - a).max(tail))
        };
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let (u, v) = split_timelike(&rest, a, next, theta)?;
        out.push(u);
        rest = v;
    }
    Some(out)
}

/// A random closed polygon of type `(k1, n − k1)`. The diagonal
/// `u_1 + … + u_{k1}` gets length `L = max(Σ future, Σ past)·cosh(φ)` with
/// `φ` uniform in `[0, max_rapidity)`, each block is split along it at random,
/// and a random isometry is applied.
pub fn random_polygon(
    alpha: &[f64],
    k1: usize,
    max_rapidity: f64,
    rng: &mut ChaCha8Rng,
) -> Result<MinkPolygon> {
    let n = alpha.len();
    if k1 == 0 || k1 >= n || alpha.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidInput(format!("cannot sample type ({k1}, {})", n - k1)));
    }
    let future: f64 = alpha[..k1].iter().sum();
    let past: f64 = alpha[k1..].iter().sum();
    let ell = if k1 == 1 {
        future
    } else if n - k1 == 1 {
        past
    } else {
        future.max(past) * rng.random_range(0.0..max_rapidity.max(f64::MIN_POSITIVE)).cosh()
    };
    if ell < future.max(past) {
        return Err(Error::SamplerFailed(0));
    }
    let d = MinkVector::new(0.0, 0.0, ell);
    let mut sides = split_block(d, &alpha[..k1], rng).ok_or(Error::SamplerFailed(1))?;
    sides.extend(split_block(-d, &alpha[k1..], rng).ok_or(Error::SamplerFailed(1))?);
    let g = random_isometry(max_rapidity, rng);
    MinkPolygon::new(sides.iter().map(|u| g.apply(u)).collect(), k1, alpha.to_vec())
}

/// Closed polygons with unbounded diagonal `‖u_1 + … + u_{k1}‖`, one per
/// exponent `m` up to `m_max`.
///
/// Side 1 is the large future vector with light-cone coordinates
/// `(t + x, t − x) = (2^m, D/2^m)` and side `k1 + 1` its past mirror
/// `(−2^m, −D/2^m)`, with `D` a power of two; both are exactly representable,
/// so their norms and the cancellation between them are exact. The remaining
/// sides are axial except sides `k1` and `n`, which absorb the fixed
/// space-like remainder through an explicit two-vector solve.
pub fn noncompact_witness(alpha: &[f64], k1: usize, m_max: u32) -> Result<Vec<MinkPolygon>> {
    let n = alpha.len();
    if k1 == 0 || k1 >= n {
        return Err(Error::InvalidInput(format!("k1 = {k1} leaves an empty cone")));
    }
    let k2 = n - k1;
    if k1 == 1 || k2 == 1 {
        return Err(Error::CompactCase);
    }
    if m_max > WITNESS_MAX_EXPONENT {
        return Err(Error::InvalidInput(format!(
            "m_max = {m_max} exceeds {WITNESS_MAX_EXPONENT}"
        )));
    }
    let future: f64 = alpha[..k1].iter().sum();
    let past: f64 = alpha[k1..].iter().sum();
    if (future - past).abs() <= 1e-12 * (future + past) {
        return Err(Error::NonGeneric {
            subset: SubsetMask::full(k1),
            margin: (future - past).abs(),
        });
    }
    let (f, a_slot, g, b_slot) = (0, k1 - 1, k1, n - 1);
    let axial_future: f64 = alpha[1..k1 - 1].iter().sum();
    let axial_past: f64 = alpha[k1 + 1..n - 1].iter().sum();
    let big_y = (axial_past - axial_future).abs() + alpha.iter().sum::<f64>();
    let need = alpha[f].powi(2).max(alpha[g].powi(2)) + big_y * big_y;
    let d = 2f64.powi(need.max(1.0).log2().ceil() as i32);
    let y_f = (d - alpha[f] * alpha[f]).sqrt();
    let y_g = (d - alpha[g] * alpha[g]).sqrt();

    let w = MinkVector::new(0.0, -(y_f + y_g), -(axial_future - axial_past));
    let sigma = (-w.inner(&w)).sqrt();
    let (a, b) = (alpha[a_slot], alpha[b_slot]);
    let xp = (sigma * sigma - a * a + b * b) / (2.0 * sigma);
    let tp = (a * a + xp * xp).sqrt();
    let h = Su11Isometry::to_spacelike(&w);
    let u_a = h.apply(&MinkVector::new(xp, 0.0, tp));
    let u_b = h.apply(&MinkVector::new(sigma - xp, 0.0, -tp));

    let m0 = (d.log2() / 2.0).ceil() as u32 + 1;
    if m0 + 1 > m_max {
        return Err(Error::InvalidInput(format!(
            "m_max = {m_max} leaves fewer than two terms (first exponent {m0})"
        )));
    }
    let mut out = Vec::new();
    let mut last_ell = f64::NEG_INFINITY;
    for m in m0..=m_max {
        let big = 2f64.powi(m as i32);
        let small = d / big;
        let t = 0.5 * (big + small);
        let x = 0.5 * (big - small);
        let mut sides: Vec<MinkVector> = (0..n)
            .map(|i| {
                if i < k1 {
                    MinkVector::new(0.0, 0.0, alpha[i])
                } else {
                    MinkVector::new(0.0, 0.0, -alpha[i])
                }
            })
            .collect();
        sides[f] = MinkVector::new(x, y_f, t);
        sides[g] = MinkVector::new(-x, y_g, -t);
        sides[a_slot] = u_a;
        sides[b_slot] = u_b;
        let poly = MinkPolygon::new(sides, k1, alpha.to_vec())?;
        let ell = diagonal_length(&poly, k1)?;
        if !(ell > last_ell) {
            return Err(Error::InvalidInput(format!(
                "diagonal failed to increase at m = {m}"
            )));
        }
        last_ell = ell;
        out.push(poly);
    }
    Ok(out)
}

/// A number `a + b√2 + c·q` with `q` a formal symbol; coefficients are
/// small dyadic rationals, so sums and products stay exact in `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Surd {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Surd {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn add(self, o: Surd) -> Surd {
        Surd::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }

    pub fn neg(self) -> Surd {
        Surd::new(-self.a, -self.b, -self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0
    }

    /// Product, substituting `q² = q2` (itself free of `q`).
    pub fn mul(self, o: Surd, q2: Surd) -> Surd {
        let rational = Surd::new(
            self.a * o.a + 2.0 * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.a * o.c + self.c * o.a,
        );
        // (b√2)(c'q) + (c q)(b'√2): a √2·q term, kept only when it vanishes.
        let mixed = self.b * o.c + self.c * o.b;
        assert!(mixed == 0.0, "√2·q terms are not represented");
        let cc = self.c * o.c;
        rational.add(Surd::new(cc * q2.a, cc * q2.b, 0.0))
    }

    pub fn value(&self, q: f64) -> f64 {
        self.a + self.b * std::f64::consts::SQRT_2 + self.c * q
    }
}

/// A closed-form family `x_n` of quadrilaterals of type `(2, 2)` and radii
/// `(1, 1, 2, 1)`, with coordinates in `Q(√2)` plus a symbol `q` of square
/// `8(√2−1)n² − 4(3√2−1)n − 9`. The family closes identically, but sides 2
/// and 3 do not have the radii 1 and 2, so it serves as a closure test
/// vector only. For `n <= 4` the symbol `q` is imaginary.
#[derive(Clone, Debug, PartialEq)]
pub struct SurdQuadrilateral {
    pub n: u32,
    pub sides: [[Surd; 3]; 4],
    pub q_squared: Surd,
}

pub fn surd_quadrilateral(n: u32) -> SurdQuadrilateral {
    let nf = n as f64;
    // P = 3/2 + (√2 − 1) n
    let p = Surd::new(1.5 - nf, nf, 0.0);
    let q = Surd::new(0.0, 0.0, 1.0);
    let one = Surd::new(1.0, 0.0, 0.0);
    let sides = [
        [Surd::new(-1.0, 0.0, 0.0), Surd::default(), Surd::new(0.0, 1.0, 0.0)],
        [one.add(p.neg()), q, Surd::new(nf, -1.0, 0.0)],
        [p, q.neg(), Surd::new(1.0 - nf, 0.0, 0.0)],
        [Surd::default(), Surd::default(), Surd::new(-1.0, 0.0, 0.0)],
    ];
    SurdQuadrilateral {
        n,
        sides,
        q_squared: Surd::new(-8.0 * nf * nf + 4.0 * nf - 9.0, 8.0 * nf * nf - 12.0 * nf, 0.0),
    }
}

impl SurdQuadrilateral {
    pub const RADII: [f64; 4] = [1.0, 1.0, 2.0, 1.0];

    /// Exact coordinatewise sum of the sides.
    pub fn closure(&self) -> [Surd; 3] {
        let mut total = [Surd::default(); 3];
        for side in &self.sides {
            for k in 0..3 {
                total[k] = total[k].add(side[k]);
            }
        }
        total
    }

    /// `u_i∘u_i − α_i²` as an exact element of `Z[√2]`.
    pub fn norm_defect(&self, i: usize) -> Surd {
        let [x, y, t] = self.sides[i];
        let sq = |v: Surd| v.mul(v, self.q_squared);
        let r = Self::RADII[i];
        sq(t)
            .add(sq(x).neg())
            .add(sq(y).neg())
            .add(Surd::new(-r * r, 0.0, 0.0))
    }

    /// Floating-point polygon, available once `q` is real.
    pub fn to_polygon(&self) -> Option<MinkPolygon> {
        let q2 = self.q_squared.value(0.0);
        if q2 < 0.0 {
            return None;
        }
        let q = q2.sqrt();
        let sides = self
            .sides
            .iter()
            .map(|s| MinkVector::new(s[0].value(q), s[1].value(q), s[2].value(q)))
            .collect();
        MinkPolygon::new(sides, 2, Self::RADII.to_vec()).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn two_sided_polygon_is_valid() {
        let poly = MinkPolygon::new(
            vec![MinkVector::new(0.0, 0.0, 1.0), MinkVector::new(0.0, 0.0, -1.0)],
            1,
            vec![1.0, 1.0],
        )
        .unwrap();
        let rep = validate(&poly);
        assert!(rep.is_valid(0.0));
        assert!(!rep.generic);
    }

    #[test]
    fn spacelike_future_side_is_flagged() {
        let poly = MinkPolygon::new(
            vec![MinkVector::new(1.0, 0.0, 0.0), MinkVector::new(-1.0, 0.0, 0.0)],
            1,
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(validate(&poly).causal_violations, vec![0, 1]);
    }

    #[test]
    fn kk_form_examples() {
        let u = MinkVector::new(0.0, 0.0, 1.0);
        let v = MinkVector::new(1.0, 0.0, 0.0);
        let w = MinkVector::new(0.0, 1.0, 0.0);
        assert_eq!(kk_form(&u, &v, &w, 1.0).unwrap(), 1.0);
        assert_eq!(kk_form(&u, &v, &v, 1.0).unwrap(), 0.0);
        assert!(matches!(kk_form(&u, &u, &w, 1.0), Err(Error::NotTangent(_))));
    }

    #[test]
    fn aligned_diagonal() {
        let poly = MinkPolygon::new(
            vec![
                MinkVector::new(0.0, 0.0, 1.0),
                MinkVector::new(0.0, 0.0, 2.0),
                MinkVector::new(0.0, 0.0, -3.0),
            ],
            2,
            vec![1.0, 2.0, 3.0],
        )
        .unwrap();
        assert_eq!(diagonal_length(&poly, 2).unwrap(), 3.0);
        assert_eq!(diagonal_length(&poly, 3).unwrap(), 0.0);
    }

    #[test]
    fn normalize_boost_case() {
        let phi = 0.6_f64;
        let m = 2.5;
        let u = MinkVector::new(0.0, m * phi.sinh(), m * phi.cosh());
        let poly = MinkPolygon::new(vec![u, -u], 1, vec![m, m]).unwrap();
        let (norm, _) = normalize_su11(&poly).unwrap();
        assert!((norm.sides[0] - MinkVector::new(0.0, 0.0, m)).max_abs() < 1e-14);
        let (again, g) = normalize_su11(&norm).unwrap();
        assert!(again.distance_inf(&norm) < 1e-14);
        let id = Su11Isometry::identity();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.0[i][j] - id.0[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn normalize_rejects_lightlike_diagonal() {
        let poly = MinkPolygon::new(
            vec![MinkVector::new(1.0, 0.0, 1.0), MinkVector::new(-1.0, 0.0, -1.0)],
            1,
            vec![0.0, 0.0],
        )
        .unwrap();
        assert_eq!(normalize_su11(&poly), Err(Error::DegenerateDiagonal));
    }

    #[test]
    fn bend_and_sweep() {
        let alpha = [1.0, 1.0, 2.0, 1.0];
        let poly = random_polygon(&alpha, 2, 1.5, &mut rng(3)).unwrap();
        assert!(matches!(bend(&poly, 0.3), Err(Error::NotNormalized)));
        let (norm, _) = normalize_su11(&poly).unwrap();
        assert_eq!(bend(&norm, 0.0).unwrap(), norm);
        assert!(bend(&norm, std::f64::consts::TAU).unwrap().distance_inf(&norm) < 1e-12);
        let rows = bend_sweep(&norm, 16).unwrap();
        assert_eq!(rows.len(), 16);
        let ell0 = diagonal_length(&norm, 2).unwrap();
        for row in rows {
            assert!((row.ell - ell0).abs() < 1e-9);
            assert!(row.closure_inf_norm < 1e-9);
            assert!(row.max_norm_error < 1e-9);
        }
    }

    #[test]
    fn dual_swap_examples() {
        let alpha = [1.0, 1.0, 2.0, 1.0, 0.7];
        let poly = random_polygon(&alpha, 2, 1.0, &mut rng(9)).unwrap();
        assert_eq!(dual_swap(&dual_swap(&poly)), poly);
        let d = dual_swap(&poly);
        assert_eq!(d.k1, 3);
        assert!(validate(&d).is_valid(1e-9));
        let two = MinkPolygon::new(
            vec![MinkVector::new(0.0, 0.0, 1.0), MinkVector::new(0.0, 0.0, -1.0)],
            1,
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(dual_swap(&two).sides[1], MinkVector::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn witness_sequence() {
        assert_eq!(noncompact_witness(&[1.0, 1.0, 2.0, 1.0], 1, 20), Err(Error::CompactCase));
        let seq = noncompact_witness(&[1.0, 1.0, 2.0, 1.0], 2, 26).unwrap();
        let mut last = 0.0;
        for poly in &seq {
            let rep = validate(poly);
            assert!(rep.is_valid(1e-12), "{rep:?}");
            let ell = diagonal_length(poly, 2).unwrap();
            assert!(ell > last);
            last = ell;
        }
        assert!(last > 1e3);
    }

    #[test]
    fn surd_quadrilateral_closes_but_has_wrong_norms() {
        for n in 2..=10 {
            let x = surd_quadrilateral(n);
            assert!(x.closure().iter().all(Surd::is_zero));
            assert!(x.norm_defect(0).is_zero());
            assert!(x.norm_defect(3).is_zero());
            assert!(!x.norm_defect(1).is_zero());
        }
        // coefficient of n² in u_2∘u_2 − 1 is 6 − 6√2
        let d = |n: u32| surd_quadrilateral(n).norm_defect(1);
        let second = d(3).add(d(2).mul(Surd::new(-2.0, 0.0, 0.0), Surd::default())).add(d(1));
        assert_eq!(second, Surd::new(12.0, -12.0, 0.0));
    }

    proptest! {
        #[test]
        fn reversed_triangle_inequality(
            a in 0.1f64..5.0, b in 0.1f64..5.0, seed in any::<u64>()
        ) {
            let mut r = rng(seed);
            let u = random_side(a, true, 3.0, &mut r);
            let v = random_side(b, true, 3.0, &mut r);
            prop_assert!((u + v).norm() >= a + b - 1e-9 * (1.0 + (u + v).euclidean_norm()));
        }

        #[test]
        fn normalization_is_isometry_invariant(seed in any::<u64>()) {
            let mut r = rng(seed);
            let alpha = [1.0, 1.3, 2.2, 0.8, 1.1];
            let poly = random_polygon(&alpha, 2, 1.0, &mut r).unwrap();
            let g = random_isometry(1.0, &mut r);
            let (a, _) = normalize_su11(&poly).unwrap();
            let (b, _) = normalize_su11(&poly.transformed(&g)).unwrap();
            prop_assert!(a.distance_inf(&b) < 1e-8);
            prop_assert!(normalization_defect(&a) < 1e-10);
            let moved = poly.transformed(&g);
            prop_assert!((moved.closure() - g.apply(&poly.closure())).max_abs() < 1e-10);
        }

        #[test]
        fn kk_form_is_invariant(seed in any::<u64>(), radius in 0.5f64..3.0) {
            let mut r = rng(seed);
            let u = random_side(radius, true, 1.5, &mut r);
            let tangent = |r: &mut ChaCha8Rng| {
                let z = MinkVector::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
                z - u * (u.inner(&z) / u.inner(&u))
            };
            let (v, w) = (tangent(&mut r), tangent(&mut r));
            let g = random_isometry(1.0, &mut r);
            let lhs = kk_form(&u, &v, &w, radius).unwrap();
            let rhs = kk_form(&g.apply(&u), &g.apply(&v), &g.apply(&w), radius).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
            prop_assert!((lhs + kk_form(&u, &w, &v, radius).unwrap()).abs() < 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
