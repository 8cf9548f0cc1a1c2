//! The involution `(p, q) ↦ (−p, q)`, its fixed points and the census of
//! fixed components.
//!
//! A fixed point either has `p = 0` (the polygon space `M(α)`) or, after a
//! unitary change of frame, lies in canonical `Z_S` form:
//!
//! ```text
//! i ∈ S:    q_i = (c_i, 0)ᵀ,  p_i = (0, b_i)
//! i ∉ S:    q_i = (0, d_i)ᵀ,  p_i = (a_i, 0)
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Covec2C, Mat2, Vec2C, C64, ONE, ZERO};
use crate::gauge::{act, GaugeElement};
use crate::hyperpolygon::{
    complex_residual, level_residual, maximal_straight_sets, short_census, HyperConfig,
    SubsetMask, WeightVector, DEFAULT_PROP_TOL, LEVEL_TOL,
};
use crate::{Error, Result};

/// Tolerance of the `Z_S` identities.
pub const IDENTITY_TOL: f64 = 1e-9;

/// `(p, q) ↦ (−p, q)`.
pub fn involve(cfg: &HyperConfig) -> HyperConfig {
    HyperConfig {
        alpha: cfg.alpha.clone(),
        p: cfg.p.iter().map(|p| -*p).collect(),
        q: cfg.q.clone(),
    }
}

/// Position of a point relative to the involution.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedPointClass {
    NotFixed,
    /// `p = 0`.
    PolygonComponent,
    /// A point of `Z_S` with `S` short, `|S| >= 2`.
    ZComponent {
        s: SubsetMask,
        /// Compact gauge bringing the input to `canonical`.
        gauge: GaugeElement,
        /// The input in canonical `Z_S` form with `c_i > 0` on `S`, `d_i > 0` off `S`.
        canonical: HyperConfig,
    },
}

impl FixedPointClass {
    pub fn is_fixed(&self) -> bool {
        !matches!(self, FixedPointClass::NotFixed)
    }
}

/// Classifies a point of the hyper-Kähler level set.
pub fn classify_fixed(cfg: &HyperConfig) -> Result<FixedPointClass> {
    classify_fixed_with(cfg, DEFAULT_PROP_TOL)
}

pub fn classify_fixed_with(cfg: &HyperConfig, prop_tol: f64) -> Result<FixedPointClass> {
    let scale = cfg.q_max_abs().max(1.0);
    let res = level_residual(cfg).max(complex_residual(cfg) / (scale * scale));
    if res > LEVEL_TOL {
        return Err(Error::NotOnLevelSet(res));
    }
    if cfg.p_is_negligible() {
        return Ok(FixedPointClass::PolygonComponent);
    }
    let classes = maximal_straight_sets(cfg, prop_tol)?;
    if classes.len() != 2 {
        return Ok(FixedPointClass::NotFixed);
    }
    let n = cfg.n();
    let first = cfg.q[classes[0].indices(n)[0]];
    let u1 = first.scale(C64::new(1.0 / first.norm(), 0.0));
    let u2 = Vec2C::new(-u1.0[1].conj(), u1.0[0].conj());
    // Orthogonality of the two lines holds on the real level set.
    let other = cfg.q[classes[1].indices(n)[0]];
    if u1.adjoint().pair(&other).norm() > 1e-6 * other.norm() {
        return Ok(FixedPointClass::NotFixed);
    }
    let mut s = classes[0];
    let mut frame = Mat2::from_columns(u1, u2);
    if !cfg.alpha.is_short(s) {
        s = classes[1];
        let j = Mat2::new(ZERO, -ONE, ONE, ZERO);
        frame = frame * j;
    }
    if s.len() < 2 {
        return Ok(FixedPointClass::NotFixed);
    }
    let rotated = act(
        cfg,
        &GaugeElement {
            a: frame,
            e: vec![ONE; n],
        },
    );
    let e: Vec<C64> = (0..n)
        .map(|i| {
            let lead = if s.contains(i) {
                rotated.q[i].0[0]
            } else {
                rotated.q[i].0[1]
            };
            lead.conj() / lead.norm()
        })
        .collect();
    let gauge = GaugeElement { a: frame, e };
    let canonical = act(cfg, &gauge);
    Ok(FixedPointClass::ZComponent {
        s,
        gauge,
        canonical,
    })
}

/// Residual of one `Z_S` identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub magnitude: f64,
}

/// The five identities satisfied by canonical `Z_S` data on the level set.
#[derive(Clone, Debug, PartialEq)]
pub struct ZsIdentityReport {
    pub s: SubsetMask,
    pub checks: Vec<IdentityCheck>,
}

impl ZsIdentityReport {
    pub fn max_magnitude(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.magnitude))
    }
}

/// Evaluates the identities without failing.
pub fn zs_identities(cfg: &HyperConfig, s: SubsetMask) -> Result<ZsIdentityReport> {
    if cfg.p_is_negligible() {
        return Err(Error::PolygonPoint);
    }
    let n = cfg.n();
    let off = 1e-9 * cfg.q_max_abs().max(1.0);
    for i in 0..n {
        let (q_off, p_off) = if s.contains(i) {
            (cfg.q[i].0[1], cfg.p[i].0[0])
        } else {
            (cfg.q[i].0[0], cfg.p[i].0[1])
        };
        if q_off.norm() > off || p_off.norm() > off {
            return Err(Error::NotCanonical(format!("index {} is off-diagonal", i + 1)));
        }
    }
    let (mut norm_s, mut norm_sc) = (0.0_f64, 0.0_f64);
    let (mut balance, mut sum_a2, mut sum_b2) = (0.0, 0.0, 0.0);
    let (mut zero_s, mut zero_sc) = (ZERO, ZERO);
    for i in 0..n {
        let [a, b] = cfg.p[i].0;
        let [c, d] = cfg.q[i].0;
        let alpha = cfg.alpha[i];
        if s.contains(i) {
            norm_s = norm_s.max((c.norm_sqr() - b.norm_sqr() - 2.0 * alpha).abs());
            balance += c.norm_sqr() + b.norm_sqr();
            sum_b2 += b.norm_sqr();
            zero_s += b * c;
        } else {
            norm_sc = norm_sc.max((d.norm_sqr() - a.norm_sqr() - 2.0 * alpha).abs());
            balance -= d.norm_sqr() + a.norm_sqr();
            sum_a2 += a.norm_sqr();
            zero_sc += a * d;
        }
    }
    let signed = (cfg.alpha.epsilon(s) - (sum_a2 - sum_b2)).abs();
    Ok(ZsIdentityReport {
        s,
        checks: vec![
            IdentityCheck {
                name: "norm_on_s",
                magnitude: norm_s,
            },
            IdentityCheck {
                name: "norm_off_s",
                magnitude: norm_sc,
            },
            IdentityCheck {
                name: "balance",
                magnitude: balance.abs(),
            },
            IdentityCheck {
                name: "signed_weight",
                magnitude: signed,
            },
            IdentityCheck {
                name: "zero_sums",
                magnitude: zero_s.norm().max(zero_sc.norm()),
            },
        ],
    })
}

/// Checks the identities to [`IDENTITY_TOL`], failing on the first violation.
pub fn check_zs_identities(cfg: &HyperConfig, s: SubsetMask) -> Result<ZsIdentityReport> {
    let report = zs_identities(cfg, s)?;
    if let Some(bad) = report.checks.iter().find(|c| !(c.magnitude <= IDENTITY_TOL)) {
        return Err(Error::IdentityViolated {
            name: bad.name.to_string(),
            magnitude: bad.magnitude,
        });
    }
    Ok(report)
}

/// A point of `μ_C = 0` in canonical `Z_S` form (not yet on the real level
/// set). With `with_off_s` false the covectors off `S` vanish, giving a
/// point of the circle-fixed locus `X_S`.
pub fn sample_zs_complex_level(
    alpha: &WeightVector,
    s: SubsetMask,
    with_off_s: bool,
    seed: u64,
) -> Result<HyperConfig> {
    let n = alpha.n();
    let in_s = s.indices(n);
    let off_s = s.complement(n).indices(n);
    if in_s.len() < 2 || off_s.is_empty() || (with_off_s && off_s.len() < 2) {
        return Err(Error::InvalidInput(
            "need |S| >= 2 and enough indices off S".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 2.0;
    let mut p = vec![Covec2C::default(); n];
    let mut q = vec![Vec2C::default(); n];
    // Entries on the diagonal kept away from zero.
    let lead = |g: &mut dyn FnMut() -> C64| {
        let z = g();
        z + C64::from_polar(0.5, z.arg())
    };
    for &i in &in_s {
        q[i] = Vec2C::new(lead(&mut gauss), ZERO);
        p[i] = Covec2C::new(ZERO, lead(&mut gauss));
    }
    for &i in &off_s {
        q[i] = Vec2C::new(ZERO, lead(&mut gauss));
        if with_off_s {
            p[i] = Covec2C::new(lead(&mut gauss), ZERO);
        }
    }
    let close = |idx: &[usize], p: &mut [Covec2C], q: &[Vec2C], slot: usize| {
        let last = *idx.last().unwrap();
        let partial: C64 = idx[..idx.len() - 1]
            .iter()
            .map(|&i| p[i].0[slot] * q[i].0[1 - slot])
            .sum();
        p[last].0[slot] = -partial / q[last].0[1 - slot];
    };
    close(&in_s, &mut p, &q, 1);
    if with_off_s {
        close(&off_s, &mut p, &q, 0);
    }
    HyperConfig::new(alpha.clone(), p, q)
}

/// Label of a fixed component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentLabel {
    /// The polygon space `M(α)`.
    Polygon,
    Z(SubsetMask),
}

/// One component of the fixed locus.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentRecord {
    pub label: ComponentLabel,
    pub real_dim: usize,
    pub compact: bool,
    /// Betti numbers by degree, when known.
    pub poincare: Option<Vec<u32>>,
    /// Diffeomorphism type, recorded as metadata only.
    pub diffeo_type: Option<String>,
}

/// All components of the fixed locus of the involution.
#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub n: usize,
    pub components: Vec<ComponentRecord>,
    pub noncompact_count: usize,
    pub compact_count: usize,
    pub short_count: usize,
    pub notes: Vec<String>,
}

/// `1 + t² + … + t^{2k}` as coefficients by degree.
pub fn projective_poincare(k: usize) -> Vec<u32> {
    (0..=2 * k).map(|d| u32::from(d % 2 == 0)).collect()
}

pub fn census(alpha: &WeightVector) -> Result<Census> {
    let shorts = short_census(alpha)?;
    let n = alpha.n();
    let dim = 2 * (n - 3);
    let mut components = Vec::new();
    let has_big_short = shorts.sprime.iter().any(|s| s.len() == n - 1);
    if !has_big_short {
        components.push(ComponentRecord {
            label: ComponentLabel::Polygon,
            real_dim: dim,
            compact: true,
            poincare: None,
            diffeo_type: Some("polygon space M(alpha)".into()),
        });
    }
    for &s in &shorts.sprime {
        let compact = s.len() == n - 1;
        if 2 * (s.len() - 2) + 2 * (n - 1 - s.len()) != dim {
            return Err(Error::CensusMismatch(format!("dimension count for {s}")));
        }
        components.push(ComponentRecord {
            label: ComponentLabel::Z(s),
            real_dim: dim,
            compact,
            poincare: Some(projective_poincare(s.len() - 2)),
            diffeo_type: compact.then(|| format!("CP^{}", n - 3)),
        });
    }
    let compact_count = components.iter().filter(|c| c.compact).count();
    let noncompact_count = components.len() - compact_count;
    let expected_noncompact = (1usize << (n - 1)) - (n + 1);
    let expected_short = (1usize << (n - 1)) - 1;
    if noncompact_count != expected_noncompact {
        return Err(Error::CensusMismatch(format!(
            "{noncompact_count} non-compact components, expected {expected_noncompact}"
        )));
    }
    if compact_count != 1 {
        return Err(Error::CensusMismatch(format!(
            "{compact_count} compact components, expected 1"
        )));
    }
    if shorts.shorts.len() != expected_short {
        return Err(Error::CensusMismatch(format!(
            "{} short sets, expected {expected_short}",
            shorts.shorts.len()
        )));
    }
    Ok(Census {
        n,
        components,
        noncompact_count,
        compact_count,
        short_count: shorts.shorts.len(),
        notes: vec![
            "Poincare polynomials are those of CP^(|S|-2): even degrees only".into(),
        ],
    })
}
