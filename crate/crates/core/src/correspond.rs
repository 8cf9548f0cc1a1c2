//! Maps out of hyperpolygon space: residue data of a strongly parabolic
//! Higgs field on `CP¹`, and the diffeomorphism between a component `Z_S`
//! and the Minkowski polygon space `M^{|S|,|S^c|}(α)`.
//!
//! In canonical `Z_S` form (see [`crate::involution`]) side `i` of the
//! polygon is
//!
//! ```text
//! i ∈ S:  u_i = (Re(b_i c_i),  Im(b_i c_i),  (|b_i|² + |c_i|²)/2)
//! i ∉ S:  u_i = (Re(a_i d_i), −Im(a_i d_i), −(|a_i|² + |d_i|²)/2)
//! ```

use crate::algebra::{traceless_part, Covec2C, Mat2, MinkVector, Vec2C, C64, ZERO};
use crate::hyperpolygon::{
    complex_residual, proportional, HyperConfig, SubsetMask, WeightVector, DEFAULT_PROP_TOL,
};
use crate::minkowski::{normalization_defect, MinkPolygon};
use crate::{Error, Result};

/// `|μ_C| <= COMPLEX_LEVEL_TOL · max(1, |q|∞)²` is accepted by [`to_higgs`].
pub const COMPLEX_LEVEL_TOL: f64 = 1e-9;
/// Relative size of entries treated as zero in canonical form.
pub const CANONICAL_TOL: f64 = 1e-9;

/// Weights `0 <= β_1(x_i) < β_2(x_i) < 1` at each marked point.
#[derive(Clone, Debug, PartialEq)]
pub struct ParabolicWeights(pub Vec<[f64; 2]>);

impl ParabolicWeights {
    /// `β_2 − β_1` per point.
    pub fn gaps(&self) -> Vec<f64> {
        self.0.iter().map(|[b1, b2]| b2 - b1).collect()
    }
}

/// `β_1 = base`, `β_2 = base + α`; refuses weights outside `[0, 1)`.
pub fn beta_from_alpha(alpha: &[f64], base: &[f64]) -> Result<ParabolicWeights> {
    if alpha.len() != base.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights but {} base values",
            alpha.len(),
            base.len()
        )));
    }
    alpha
        .iter()
        .zip(base)
        .enumerate()
        .map(|(i, (&a, &b))| {
            let top = b + a;
            if !(b >= 0.0) || !(a > 0.0) || !(top < 1.0) {
                Err(Error::WeightOutOfRange(i))
            } else {
                Ok([b, top])
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(ParabolicWeights)
}

/// A Higgs field `Φ(z) = Σ R_i/(z − x_i) dz` with flags `⟨q_i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct HiggsData {
    pub points: Vec<C64>,
    pub alpha: Vec<f64>,
    /// Present when every `α_i < 1`, with `β_1 = 0`.
    pub beta: Option<ParabolicWeights>,
    pub flags: Vec<Vec2C>,
    pub residues: Vec<Mat2>,
}

impl HiggsData {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// `Φ(z)`; `None` at a marked point.
    pub fn evaluate(&self, z: C64) -> Option<Mat2> {
        let mut out = Mat2::zero();
        for (x, r) in self.points.iter().zip(&self.residues) {
            let dz = z - x;
            if dz.norm() == 0.0 {
                return None;
            }
            out += r.scale(dz.inv());
        }
        Some(out)
    }

    /// `‖Σ R_i‖∞`; the field is regular at infinity when this vanishes.
    pub fn residue_sum(&self) -> f64 {
        self.residues
            .iter()
            .fold(Mat2::zero(), |acc, r| acc + *r)
            .max_abs()
    }

    /// Largest of `|tr R_i|`, `‖R_i²‖∞`, `‖R_i q_i‖∞`.
    pub fn parabolic_defect(&self) -> f64 {
        self.residues
            .iter()
            .zip(&self.flags)
            .fold(0.0_f64, |m, (r, q)| {
                m.max(r.trace().norm())
                    .max((*r * *r).max_abs())
                    .max(r.mul_vec(q).max_abs())
            })
    }

    /// Residues multiplied by `λ`.
    pub fn scaled(&self, lambda: C64) -> HiggsData {
        HiggsData {
            residues: self.residues.iter().map(|r| r.scale(lambda)).collect(),
            ..self.clone()
        }
    }

    /// Largest residue difference.
    pub fn residue_distance(&self, other: &HiggsData) -> f64 {
        self.residues
            .iter()
            .zip(&other.residues)
            .fold(0.0, |m, (a, b)| m.max((*a - *b).max_abs()))
    }
}

/// Marked points `1, 2, …, n`.
pub fn default_points(n: usize) -> Vec<C64> {
    (1..=n).map(|i| C64::new(i as f64, 0.0)).collect()
}

/// `R_i = (q_i p_i)_0` with flags `⟨q_i⟩`.
pub fn to_higgs(cfg: &HyperConfig, points: &[C64]) -> Result<HiggsData> {
    let n = cfg.n();
    if points.len() != n {
        return Err(Error::InvalidInput(format!("{} points for {n} indices", points.len())));
    }
    for i in 0..n {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(Error::InvalidInput(format!(
                    "marked points {} and {} coincide",
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    let scale = cfg.q_max_abs().max(1.0);
    let res = complex_residual(cfg);
    if res > COMPLEX_LEVEL_TOL * scale * scale {
        return Err(Error::NotOnComplexLevel(res));
    }
    let alpha = cfg.alpha.as_slice().to_vec();
    let beta = beta_from_alpha(&alpha, &vec![0.0; n]).ok();
    Ok(HiggsData {
        points: points.to_vec(),
        alpha,
        beta,
        flags: cfg.q.clone(),
        residues: cfg.p.iter().zip(&cfg.q).map(|(p, q)| traceless_part(&q.outer(p))).collect(),
    })
}

/// `(E, Φ) ↦ (E, −Φ)`.
pub fn involution_on_higgs(data: &HiggsData) -> HiggsData {
    data.scaled(C64::new(-1.0, 0.0))
}

/// Outcome of testing a constant line subbundle `⟨v⟩ ⊂ O(deg)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineTest {
    /// Indices where `v` spans the flag.
    pub s_l: SubsetMask,
    /// `−2·deg − Σ_{S_L} α + Σ_{S_L^c} α`; stability needs it positive.
    pub margin: f64,
    pub destabilizing: bool,
    /// `R_i v ∈ ⟨v⟩` for every `i`.
    pub phi_invariant: bool,
}

pub fn line_test(data: &HiggsData, v: &Vec2C, deg: i32) -> LineTest {
    let mut s_l = SubsetMask::empty();
    for (i, q) in data.flags.iter().enumerate() {
        if proportional(v, q, DEFAULT_PROP_TOL) {
            s_l.insert(i);
        }
    }
    let margin = -2.0 * deg as f64
        + data
            .alpha
            .iter()
            .enumerate()
            .map(|(i, a)| if s_l.contains(i) { -a } else { *a })
            .sum::<f64>();
    let scale = data.residues.iter().fold(0.0_f64, |m, r| m.max(r.max_abs()));
    let phi_invariant = data
        .residues
        .iter()
        .all(|r| r.mul_vec(v).wedge(v).norm() <= 1e-9 * scale.max(1.0) * v.norm_sqr());
    LineTest {
        s_l,
        margin,
        destabilizing: margin <= 0.0,
        phi_invariant,
    }
}

/// Whether `⟨v⟩` of degree `deg` violates the stability inequality.
pub fn line_destabilizes(data: &HiggsData, v: &Vec2C, deg: i32) -> bool {
    line_test(data, v, deg).destabilizing
}

/// Checks that `cfg` has the canonical `Z_S` shape.
fn check_canonical(cfg: &HyperConfig, s: SubsetMask) -> Result<()> {
    let tol = CANONICAL_TOL * cfg.q_max_abs().max(cfg.p_max_abs()).max(1.0);
    for i in 0..cfg.n() {
        let (q_off, p_off) = if s.contains(i) {
            (cfg.q[i].0[1], cfg.p[i].0[0])
        } else {
            (cfg.q[i].0[0], cfg.p[i].0[1])
        };
        if q_off.norm() > tol || p_off.norm() > tol {
            return Err(Error::NotCanonical(format!(
                "index {} has off-pattern entries {:.3e}, {:.3e}",
                i + 1,
                q_off.norm(),
                p_off.norm()
            )));
        }
    }
    Ok(())
}

/// The Minkowski polygon of a canonical `Z_S` point, with `S` moved to the
/// front. Slot `k` of the polygon comes from index `order[k]`.
pub fn zs_to_minkowski(cfg: &HyperConfig, s: SubsetMask) -> Result<(MinkPolygon, Vec<usize>)> {
    let n = cfg.n();
    if s.is_empty() || s.len() >= n {
        return Err(Error::NotCanonical(format!("index set {s} is not proper")));
    }
    check_canonical(cfg, s)?;
    let order: Vec<usize> = s.indices(n).into_iter().chain(s.complement(n).indices(n)).collect();
    let sides = order
        .iter()
        .map(|&i| {
            if s.contains(i) {
                let (c, b) = (cfg.q[i].0[0], cfg.p[i].0[1]);
                let bc = b * c;
                MinkVector::new(bc.re, bc.im, 0.5 * (b.norm_sqr() + c.norm_sqr()))
            } else {
                let (d, a) = (cfg.q[i].0[1], cfg.p[i].0[0]);
                let ad = a * d;
                MinkVector::new(ad.re, -ad.im, -0.5 * (a.norm_sqr() + d.norm_sqr()))
            }
        })
        .collect();
    let alpha = order.iter().map(|&i| cfg.alpha[i]).collect();
    Ok((MinkPolygon::new(sides, s.len(), alpha)?, order))
}

/// The canonical `Z_S` point of a normalized polygon, `S` being its future
/// block: `q_i = (l_i, 0)ᵀ`, `p_i = (0, (x_i + i y_i)/l_i)` on `S` and
/// `q_i = (0, l_i)ᵀ`, `p_i = ((x_i − i y_i)/l_i, 0)` off `S`, with
/// `l_i = √(α_i + t_i)` and `t_i = √(α_i² + x_i² + y_i²)`.
pub fn minkowski_to_zs(poly: &MinkPolygon) -> Result<HyperConfig> {
    let scale = poly.sides.iter().fold(1.0_f64, |m, u| m.max(u.max_abs()));
    let closure = poly.closure().max_abs();
    if closure > 1e-9 * scale {
        return Err(Error::NotClosed(closure));
    }
    if normalization_defect(poly) > 1e-9 * scale {
        return Err(Error::NotNormalized);
    }
    let alpha = WeightVector::new(poly.alpha.clone())?;
    let mut p = Vec::with_capacity(poly.n());
    let mut q = Vec::with_capacity(poly.n());
    for (i, (u, &a)) in poly.sides.iter().zip(&poly.alpha).enumerate() {
        let t = (a * a + u.x * u.x + u.y * u.y).sqrt();
        let l = (a + t).sqrt();
        if i < poly.k1 {
            q.push(Vec2C::real(l, 0.0));
            p.push(Covec2C::new(ZERO, C64::new(u.x, u.y) / l));
        } else {
            q.push(Vec2C::real(0.0, l));
            p.push(Covec2C::new(C64::new(u.x, -u.y) / l, ZERO));
        }
    }
    HyperConfig::new(alpha, p, q)
}

/// `other` moved by the residual circle `b_i ↦ e^{−2iθ} b_i`,
/// `a_i ↦ e^{2iθ} a_i` of the canonical form, with `θ` chosen to best match
/// `reference`. Both must be canonical for the same `S`.
pub fn align_canonical(reference: &HyperConfig, other: &HyperConfig, s: SubsetMask) -> HyperConfig {
    let mut z = ZERO;
    for i in 0..reference.n() {
        z += if s.contains(i) {
            other.p[i].0[1] * reference.p[i].0[1].conj()
        } else {
            other.p[i].0[0].conj() * reference.p[i].0[0]
        };
    }
    let mut out = other.clone();
    if z.norm() == 0.0 {
        return out;
    }
    let phase = z / z.norm();
    for i in 0..out.n() {
        if s.contains(i) {
            out.p[i].0[1] *= phase.conj();
        } else {
            out.p[i].0[0] *= phase;
        }
    }
    out
}

/// Slot `k` of `cfg` moved back to index `order[k]`.
pub fn unpermute(cfg: &HyperConfig, order: &[usize]) -> HyperConfig {
    let mut inverse = vec![0; order.len()];
    for (k, &i) in order.iter().enumerate() {
        inverse[i] = k;
    }
    cfg.permuted(&inverse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{kempf_ness_normalize, KnOptions};
    use crate::hyperpolygon::{
        circle_act, is_alpha_stable, level_residual, sample_complex_level,
    };
    use crate::involution::{classify_fixed, involve, sample_zs_complex_level, FixedPointClass};
    use crate::minkowski::{normalize_su11, random_polygon, validate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weights(a: &[f64]) -> WeightVector {
        WeightVector::new(a.to_vec()).unwrap()
    }

    fn tight() -> KnOptions {
        KnOptions {
            tol: 1e-12,
            ..KnOptions::default()
        }
    }

    fn zs_point(alpha: &[f64], s: &[usize], seed: u64) -> (SubsetMask, HyperConfig) {
        let s = SubsetMask::from_indices(s);
        let raw = sample_zs_complex_level(&weights(alpha), s, true, seed).unwrap();
        let cfg = kempf_ness_normalize(&raw, &tight()).unwrap().cfg;
        match classify_fixed(&cfg).unwrap() {
            FixedPointClass::ZComponent { s: found, canonical, .. } => {
                assert_eq!(found, s);
                (s, canonical)
            }
            other => panic!("unexpected class {other:?}"),
        }
    }

    #[test]
    fn beta_examples() {
        let beta = beta_from_alpha(&[0.1, 0.1, 0.2, 0.1], &[0.0; 4]).unwrap();
        assert_eq!(beta.0, vec![[0.0, 0.1], [0.0, 0.1], [0.0, 0.2], [0.0, 0.1]]);
        assert_eq!(beta.gaps(), vec![0.1, 0.1, 0.2, 0.1]);
        assert_eq!(
            beta_from_alpha(&[0.1, 1.2], &[0.0, 0.0]),
            Err(Error::WeightOutOfRange(1))
        );
    }

    #[test]
    fn polygon_point_has_zero_field() {
        let alpha = weights(&[0.1, 0.1, 0.2, 0.1]);
        let cfg = crate::hyperpolygon::sample_polygon_level(&alpha, 4).unwrap();
        let data = to_higgs(&cfg, &default_points(4)).unwrap();
        assert!(data.residues.iter().all(|r| r.max_abs() == 0.0));
        assert_eq!(involution_on_higgs(&data), data);
        assert!(data.beta.is_some());
    }

    #[test]
    fn residues_on_sampled_points() {
        let alpha = weights(&[1.0, 1.21, 1.33, 1.74, 2.15]);
        for seed in 0..20 {
            let cfg = sample_complex_level(&alpha, seed).unwrap();
            let data = to_higgs(&cfg, &default_points(5)).unwrap();
            let scale = cfg.q_max_abs().max(cfg.p_max_abs()).powi(2).max(1.0);
            assert!(data.parabolic_defect() < 1e-12 * scale);
            assert!(data.residue_sum() < 1e-10 * scale);
            assert!(data.beta.is_none());
            let lambda = C64::from_polar(1.0, 0.3 * seed as f64);
            let rotated = to_higgs(&circle_act(lambda, &cfg), &data.points).unwrap();
            assert!(rotated.residue_distance(&data.scaled(lambda)) < 1e-12 * scale);
            let inv = to_higgs(&involve(&cfg), &data.points).unwrap();
            assert!(inv.residue_distance(&involution_on_higgs(&data)) == 0.0);
            let z = C64::new(0.5, 0.7);
            let phi = data.evaluate(z).unwrap();
            let direct = data
                .residues
                .iter()
                .zip(&data.points)
                .fold(Mat2::zero(), |m, (r, x)| m + r.scale((z - x).inv()));
            assert!((phi - direct).max_abs() < 1e-14 * scale);
            assert!(data.evaluate(data.points[2]).is_none());
        }
    }

    #[test]
    fn off_level_is_rejected() {
        let alpha = weights(&[1.0, 1.0, 2.0, 1.0]);
        let mut cfg = sample_complex_level(&alpha, 1).unwrap();
        cfg.p[0].0[0] += C64::new(0.5, 0.0);
        assert!(matches!(
            to_higgs(&cfg, &default_points(4)),
            Err(Error::NotOnComplexLevel(_))
        ));
    }

    #[test]
    fn line_tests() {
        let alpha = weights(&[1.0, 1.0, 2.0, 1.0]);
        let cfg = sample_complex_level(&alpha, 2).unwrap();
        let data = to_higgs(&cfg, &default_points(4)).unwrap();
        let generic = Vec2C::new(C64::new(0.3, 0.1), C64::new(-0.7, 0.2));
        let t = line_test(&data, &generic, 0);
        assert!(t.s_l.is_empty());
        assert_eq!(t.margin, 5.0);
        assert!(!t.destabilizing);
        // {2, 3} is long: lining q_1, q_2 up with q_3 gives an unstable polygon
        let q3 = Vec2C::real(0.6, 0.8);
        let poly = HyperConfig::polygon(
            alpha.clone(),
            vec![Vec2C::real(1.0, 0.0), q3.scale(C64::new(2.0, 0.0)), q3, Vec2C::real(0.0, 1.0)],
        )
        .unwrap();
        assert!(!is_alpha_stable(&poly).unwrap().stable);
        let flat = to_higgs(&poly, &default_points(4)).unwrap();
        let t = line_test(&flat, &q3, 0);
        assert_eq!(t.s_l, SubsetMask::from_indices(&[1, 2]));
        assert!(t.destabilizing && t.phi_invariant);
        let small = weights(&[0.1, 0.1, 0.2, 0.1]);
        let cfg = sample_complex_level(&small, 3).unwrap();
        let data = to_higgs(&cfg, &default_points(4)).unwrap();
        for q in &data.flags {
            assert!(!line_destabilizes(&data, q, -1));
        }
    }

    #[test]
    fn forward_examples() {
        let alpha = weights(&[1.0, 1.0, 1.0, 1.0]);
        let s = SubsetMask::from_indices(&[0, 1]);
        let r3 = 3f64.sqrt();
        // b = ±1, c = √3 on S; a = ±1, d = √3 off S
        let cfg = HyperConfig::new(
            alpha,
            vec![
                Covec2C::new(ZERO, C64::new(1.0, 0.0)),
                Covec2C::new(ZERO, C64::new(-1.0, 0.0)),
                Covec2C::new(C64::new(1.0, 0.0), ZERO),
                Covec2C::new(C64::new(-1.0, 0.0), ZERO),
            ],
            vec![
                Vec2C::real(r3, 0.0),
                Vec2C::real(r3, 0.0),
                Vec2C::real(0.0, r3),
                Vec2C::real(0.0, r3),
            ],
        )
        .unwrap();
        let (poly, order) = zs_to_minkowski(&cfg, s).unwrap();
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert!((poly.sides[0] - MinkVector::new(r3, 0.0, 2.0)).max_abs() < 1e-15);
        assert!((poly.sides[2] - MinkVector::new(r3, 0.0, -2.0)).max_abs() < 1e-15);
        assert!((poly.sides[0].inner(&poly.sides[0]) - 1.0).abs() < 1e-14);
        assert!(validate(&poly).is_valid(1e-14));
        let mut bad = cfg.clone();
        bad.q[0].0[1] = C64::new(0.1, 0.0);
        assert!(matches!(zs_to_minkowski(&bad, s), Err(Error::NotCanonical(_))));
    }

    #[test]
    fn inverse_of_axial_side() {
        let poly = MinkPolygon::new(
            vec![
                MinkVector::new(0.0, 0.0, 1.0),
                MinkVector::new(0.0, 0.0, 2.0),
                MinkVector::new(0.0, 0.0, -2.0),
                MinkVector::new(0.0, 0.0, -0.5),
                MinkVector::new(0.0, 0.0, -0.5),
            ],
            2,
            vec![1.0, 2.0, 2.0, 0.5, 0.5],
        )
        .unwrap();
        let cfg = minkowski_to_zs(&poly).unwrap();
        assert_eq!(cfg.q[1], Vec2C::real(2.0, 0.0));
        assert_eq!(cfg.p[1], Covec2C::default());
        assert_eq!(cfg.q[3], Vec2C::real(0.0, 1.0));
    }

    #[test]
    fn round_trip_from_polygons() {
        let alpha = [1.0, 1.3, 2.2, 0.8, 1.1, 0.45];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for k1 in 2..=4 {
            for _ in 0..10 {
                let poly = random_polygon(&alpha, k1, 1.2, &mut rng).unwrap();
                let (norm, _) = normalize_su11(&poly).unwrap();
                let cfg = minkowski_to_zs(&norm).unwrap();
                assert!(level_residual(&cfg) < 1e-10);
                assert!(complex_residual(&cfg) < 1e-10);
                let (back, order) =
                    zs_to_minkowski(&cfg, SubsetMask::from_indices(&(0..k1).collect::<Vec<_>>()))
                        .unwrap();
                assert_eq!(order, (0..alpha.len()).collect::<Vec<_>>());
                assert!(back.distance_inf(&norm) < 1e-8);
            }
        }
        let unnormalized = random_polygon(&alpha, 3, 1.2, &mut rng).unwrap();
        if normalization_defect(&unnormalized) > 1e-6 {
            assert_eq!(minkowski_to_zs(&unnormalized), Err(Error::NotNormalized));
        }
    }

    #[test]
    fn round_trip_from_zs() {
        let alpha = [1.0, 1.21, 1.33, 1.74, 2.15, 0.96];
        for (seed, s) in [(1, vec![0, 1]), (2, vec![0, 2, 5]), (3, vec![1, 3])] {
            let (s, canonical) = zs_point(&alpha, &s, seed);
            let (poly, order) = zs_to_minkowski(&canonical, s).unwrap();
            let rep = validate(&poly);
            assert!(rep.closure_residual < 1e-9, "{rep:?}");
            for (u, a) in poly.sides.iter().zip(&poly.alpha) {
                assert!((u.inner(u) - a * a).abs() < 1e-10);
            }
            assert!(rep.causal_violations.is_empty());
            let back = unpermute(&minkowski_to_zs(&poly).unwrap(), &order);
            let FixedPointClass::ZComponent { s: s2, canonical: c2, .. } =
                classify_fixed(&back).unwrap()
            else {
                panic!("not in Z_S");
            };
            assert_eq!(s2, s);
            let aligned = align_canonical(&canonical, &c2, s);
            assert!(aligned.distance_inf(&canonical) < 1e-8);
        }
    }
}
