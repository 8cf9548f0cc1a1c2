//! The gauge group `K = (U(2) × U(1)^n)/U(1)`, its complexification, the
//! Kempf–Ness normalization and the local charts at circle-fixed points.
//!
//! A group element is stored as `(A, e)` with `det A = 1`; `(A, e)` and
//! `(−A, −e)` act identically. The action is
//! `(p, q)·(A, e) = ((e_i⁻¹ p_i A)_i, (A⁻¹ q_i e_i)_i)`.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{hermitian_coords, traceless_part, Covec2C, Mat2, Vec2C, C64, ONE};
use crate::hyperpolygon::{
    complex_residual, is_alpha_stable, maximal_straight_sets, mu_real, perturb_on_complex_level,
    phi, HyperConfig, SubsetMask, DEFAULT_PROP_TOL,
};
use crate::{Error, Result};

/// An element `[A; e_1, …, e_n]` of `K` or of its complexification.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    pub a: Mat2,
    pub e: Vec<C64>,
}

impl GaugeElement {
    pub fn identity(n: usize) -> Self {
        Self {
            a: Mat2::identity(),
            e: vec![ONE; n],
        }
    }

    /// `(−I, −1, …, −1)`, which acts trivially.
    pub fn minus_identity(n: usize) -> Self {
        Self {
            a: -Mat2::identity(),
            e: vec![-ONE; n],
        }
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// `g·h = (A_g A_h, e_g e_h)`, so that acting by `g·h` is acting by `g`, then `h`.
    pub fn compose(&self, h: &GaugeElement) -> GaugeElement {
        GaugeElement {
            a: self.a * h.a,
            e: self.e.iter().zip(&h.e).map(|(x, y)| x * y).collect(),
        }
    }

    pub fn inverse(&self) -> GaugeElement {
        GaugeElement {
            a: self.a.inverse().expect("gauge matrix has det 1"),
            e: self.e.iter().map(|x| x.inv()).collect(),
        }
    }

    /// `A` unitary and all `|e_i| = 1`, within `tol`.
    pub fn is_compact(&self, tol: f64) -> bool {
        (self.a.adjoint() * self.a - Mat2::identity()).max_abs() <= tol
            && self.e.iter().all(|x| (x.norm() - 1.0).abs() <= tol)
    }

    /// Replaces `(A, e)` by `(−A, −e)` if needed so that `A_{11}` has
    /// nonnegative real part, ties broken by nonnegative imaginary part.
    pub fn canonical_sign(mut self) -> GaugeElement {
        let a11 = self.a.0[0][0];
        let flip = a11.re < 0.0 || (a11.re == 0.0 && a11.im < 0.0);
        if flip {
            self.a = -self.a;
            for x in &mut self.e {
                *x = -*x;
            }
        }
        self
    }

    /// A random element of the compact group.
    pub fn random_compact(n: usize, rng: &mut ChaCha8Rng) -> GaugeElement {
        let mut v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let alpha = C64::new(v[0], v[1]);
        let beta = C64::new(v[2], v[3]);
        GaugeElement {
            a: Mat2::new(alpha, -beta.conj(), beta, alpha.conj()),
            e: (0..n)
                .map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                .collect(),
        }
    }

    /// A random element of the complexified group, `scale` controlling its
    /// distance from the compact form.
    pub fn random_complex(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> GaugeElement {
        let u = GaugeElement::random_compact(n, rng);
        let x: [f64; 3] = std::array::from_fn(|_| scale * rng.sample::<f64, _>(StandardNormal));
        let s: Vec<f64> = (0..n)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        u.compose(&noncompact_step(x, &s))
    }
}

/// `(p, q)·[A; e]`.
pub fn act(cfg: &HyperConfig, g: &GaugeElement) -> HyperConfig {
    let a_inv = g.a.inverse().expect("gauge matrix has det 1");
    HyperConfig {
        alpha: cfg.alpha.clone(),
        p: cfg
            .p
            .iter()
            .zip(&g.e)
            .map(|(p, e)| p.mul_mat(&g.a).scale(e.inv()))
            .collect(),
        q: cfg
            .q
            .iter()
            .zip(&g.e)
            .map(|(q, e)| a_inv.mul_vec(q).scale(*e))
            .collect(),
    }
}

/// The Hermitian traceless matrix `x_1 σ_1 + x_2 σ_2 + x_3 σ_3`.
fn pauli(x: [f64; 3]) -> Mat2 {
    Mat2::new(
        C64::new(x[2], 0.0),
        C64::new(x[0], -x[1]),
        C64::new(x[0], x[1]),
        C64::new(-x[2], 0.0),
    )
}

/// `exp(X)` for Hermitian traceless `X`, using `X² = r² I`.
fn exp_hermitian(x: [f64; 3]) -> Mat2 {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let sinhc = if r < 1e-8 { 1.0 + r * r / 6.0 } else { r.sinh() / r };
    Mat2::identity().scale(C64::new(r.cosh(), 0.0)) + pauli(x).scale(C64::new(sinhc, 0.0))
}

/// `(exp X, e^{s_1}, …, e^{s_n})`.
fn noncompact_step(x: [f64; 3], s: &[f64]) -> GaugeElement {
    GaugeElement {
        a: exp_hermitian(x),
        e: s.iter().map(|v| C64::new(v.exp(), 0.0)).collect(),
    }
}

/// Options of [`kempf_ness_normalize`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
}

impl Default for KnOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 500,
            armijo: 1e-4,
        }
    }
}

/// Output of [`kempf_ness_normalize`].
#[derive(Clone, Debug, PartialEq)]
pub struct KnResult {
    pub cfg: HyperConfig,
    pub gauge: GaugeElement,
    /// `‖μ_R − (0, α)‖∞` of `cfg`.
    pub residual: f64,
    pub iterations: usize,
}

fn residual_vector(cfg: &HyperConfig) -> DVector<f64> {
    let mu = mu_real(cfg);
    let n = cfg.n();
    DVector::from_fn(n + 3, |k, _| {
        if k < 3 {
            mu.su2[k]
        } else {
            mu.scalars[k - 3] - cfg.alpha[k - 3]
        }
    })
}

/// Derivative of `(μ_R su(2) part, μ_R scalars)` along the non-compact
/// directions `(X, s)` at the identity.
fn jacobian(cfg: &HyperConfig) -> DMatrix<f64> {
    let n = cfg.n();
    let mut jac = DMatrix::zeros(n + 3, n + 3);
    let grams: Vec<Mat2> = cfg
        .p
        .iter()
        .zip(&cfg.q)
        .map(|(p, q)| q.outer(&q.adjoint()) + p.adjoint().outer(p))
        .collect();
    let total = grams.iter().fold(Mat2::zero(), |acc, m| acc + *m);
    for k in 0..3 {
        let mut x = [0.0; 3];
        x[k] = 1.0;
        let xm = pauli(x);
        let d = -(xm * total + total * xm);
        let coords = hermitian_coords(&traceless_part(&d));
        for r in 0..3 {
            jac[(r, k)] = coords[r];
        }
        for (i, (p, q)) in cfg.p.iter().zip(&cfg.q).enumerate() {
            let qxq = q.adjoint().pair(&xm.mul_vec(q)).re;
            let pxp = p.mul_mat(&xm).pair(&p.adjoint()).re;
            jac[(3 + i, k)] = -qxq - pxp;
        }
    }
    for (i, g) in grams.iter().enumerate() {
        let coords = hermitian_coords(&traceless_part(&g.scale(C64::new(2.0, 0.0))));
        for r in 0..3 {
            jac[(r, 3 + i)] = coords[r];
        }
        jac[(3 + i, 3 + i)] = g.trace().re;
    }
    jac
}

fn step_from(delta: &DVector<f64>, t: f64) -> GaugeElement {
    let x = [t * delta[0], t * delta[1], t * delta[2]];
    let s: Vec<f64> = delta.iter().skip(3).map(|v| t * v).collect();
    noncompact_step(x, &s)
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Moves an α-stable point of `μ_C = 0` along its complexified orbit onto
/// the real level set `μ_R = (0, α)`.
///
/// Damped Newton on `F = ‖μ_R − (0, α)‖²` over the non-compact directions
/// `(exp X, e^{s})`, with Armijo backtracking and a gradient fallback.
pub fn kempf_ness_normalize(cfg: &HyperConfig, opts: &KnOptions) -> Result<KnResult> {
    let report = is_alpha_stable(cfg)?;
    if !report.stable {
        return Err(Error::NotStable(report.violating));
    }
    let scale = cfg.q_max_abs().max(cfg.p_max_abs()).max(1.0);
    let c_res = complex_residual(cfg);
    if c_res > 1e-10 * scale * scale {
        return Err(Error::NotOnComplexLevel(c_res));
    }
    let n = cfg.n();
    let mut gauge = GaugeElement::identity(n);
    let mut cur = cfg.clone();
    let mut r = residual_vector(&cur);
    let mut iterations = 0;
    while inf_norm(&r) >= opts.tol {
        if iterations == opts.max_iters {
            return Err(Error::NoConvergence {
                iters: iterations,
                residual: inf_norm(&r),
            });
        }
        iterations += 1;
        let f0 = r.norm_squared();
        let jac = jacobian(&cur);
        let newton = jac.clone().lu().solve(&(-&r));
        let gradient = -(jac.transpose() * &r);
        let mut accepted = None;
        for dir in newton.into_iter().chain(std::iter::once(gradient)) {
            // F'(0) along the direction, 2 rᵀ J δ.
            let slope = 2.0 * r.dot(&(&jac * &dir));
            if !(slope < 0.0) {
                continue;
            }
            let mut t = 1.0;
            while t > 1e-12 {
                let step = step_from(&dir, t);
                let trial = act(&cur, &step);
                let rt = residual_vector(&trial);
                let ft = rt.norm_squared();
                if ft.is_finite() && ft <= f0 + opts.armijo * t * slope {
                    accepted = Some((step, trial, rt));
                    break;
                }
                t *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
        }
        let Some((step, trial, rt)) = accepted else {
            return Err(Error::NoConvergence {
                iters: iterations,
                residual: inf_norm(&r),
            });
        };
        gauge = gauge.compose(&step);
        cur = trial;
        r = rt;
    }
    if iterations > 0 {
        // One further full Newton step; near the solution it costs nothing
        // and takes the residual to rounding level.
        if let Some(dir) = jacobian(&cur).lu().solve(&(-&r)) {
            let step = step_from(&dir, 1.0);
            let trial = act(&cur, &step);
            if residual_vector(&trial).norm_squared() < r.norm_squared() {
                gauge = gauge.compose(&step);
            }
        }
    }
    let gauge = gauge.canonical_sign();
    let out = act(cfg, &gauge);
    let residual = inf_norm(&residual_vector(&out));
    if residual >= opts.tol {
        return Err(Error::NoConvergence {
            iters: iterations,
            residual,
        });
    }
    Ok(KnResult {
        cfg: out,
        gauge,
        residual,
        iterations,
    })
}

/// Per-index `|p_i|` and `|q_i|`; unchanged by the compact group.
pub fn norm_invariants(cfg: &HyperConfig) -> (Vec<f64>, Vec<f64>) {
    (
        cfg.p.iter().map(Covec2C::norm).collect(),
        cfg.q.iter().map(Vec2C::norm).collect(),
    )
}

/// Which kind of circle-fixed point a chart is centred at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    /// A point of `X_S`: `S` and `S^c` straight, `p = 0` on `S^c`.
    Xs(SubsetMask),
    /// A point with `p = 0`.
    Polygon,
}

/// Chart values `(z_k, w_k)` for the chart slots `3, …, n−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartCoords {
    pub z: Vec<C64>,
    pub w: Vec<C64>,
}

impl ChartCoords {
    pub fn max_abs(&self) -> f64 {
        self.z
            .iter()
            .chain(&self.w)
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn sub(&self, other: &ChartCoords) -> ChartCoords {
        ChartCoords {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a - b).collect(),
            w: self.w.iter().zip(&other.w).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A local chart of `X(α)` around a circle-fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub kind: ChartKind,
    /// `roles[k]` is the index placed in chart slot `k + 1`.
    pub roles: Vec<usize>,
    /// Uncentred chart values of the base point.
    pub base: ChartCoords,
    /// Gauge bringing the base point to normal form.
    pub base_gauge: GaugeElement,
    /// Smallest relative size of a normalization pivot at the base.
    pub pivot_margin: f64,
}

const PIVOT_TOL: f64 = 1e-8;

fn solve2(m: &Mat2, rhs: &Vec2C) -> Option<Vec2C> {
    let mm = Matrix2::new(m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]);
    let sol = mm.lu().solve(&Vector2::new(rhs.0[0], rhs.0[1]))?;
    Some(Vec2C::new(sol[0], sol[1]))
}

struct NormalForm {
    gauge: GaugeElement,
    coords: ChartCoords,
    margin: f64,
}

fn check_pivot(v: C64, scale: f64, what: &str, margin: &mut f64) -> Result<()> {
    let rel = v.norm() / scale.max(f64::MIN_POSITIVE);
    if !(rel > PIVOT_TOL) {
        return Err(Error::IndexDegenerate(what.to_string()));
    }
    *margin = margin.min(rel);
    Ok(())
}

/// Normal form for the `X_S` chart with the given slot roles and `|S| = l`.
fn xs_normal_form(cfg: &HyperConfig, roles: &[usize], l: usize) -> Result<NormalForm> {
    let n = roles.len();
    let (i1, i_n) = (roles[0], roles[n - 1]);
    let (q1, qn, p1) = (cfg.q[i1], cfg.q[i_n], cfg.p[i1]);
    let mut margin = f64::INFINITY;
    let delta = q1.wedge(&qn);
    check_pivot(delta, q1.norm() * qn.norm(), "q_1 and q_n are proportional", &mut margin)?;
    let pq = p1.pair(&qn);
    check_pivot(pq, p1.norm() * qn.norm(), "p_1 q_n vanishes", &mut margin)?;
    let e1 = (pq / delta).sqrt();
    let en = e1 / pq;
    let a = Mat2::from_columns(q1.scale(e1), qn.scale(en));
    let a_inv = a.inverse().ok_or(Error::IndexDegenerate("singular frame".into()))?;
    let mut e = vec![ONE; cfg.n()];
    e[i1] = e1;
    e[i_n] = en;
    for (slot, &i) in roles.iter().enumerate().take(n - 1).skip(1) {
        let v = a_inv.mul_vec(&cfg.q[i]);
        let comp = if slot < l { v.0[0] } else { v.0[1] };
        check_pivot(comp, v.norm(), "normalizing entry of q_i vanishes", &mut margin)?;
        e[i] = comp.inv();
    }
    let gauge = GaugeElement { a, e };
    let moved = act(cfg, &gauge);
    let (mut z, mut w) = (Vec::new(), Vec::new());
    for (slot, &i) in roles.iter().enumerate().take(n - 1).skip(2) {
        if slot < l {
            z.push(moved.p[i].0[1]);
            w.push(moved.q[i].0[1]);
        } else {
            z.push(moved.p[i].0[0]);
            w.push(moved.q[i].0[0]);
        }
    }
    Ok(NormalForm {
        gauge,
        coords: ChartCoords { z, w },
        margin,
    })
}

/// Normal form for the polygon chart with roles `(1, 2, 3, …, n)`.
fn polygon_normal_form(cfg: &HyperConfig, roles: &[usize]) -> Result<NormalForm> {
    let n = roles.len();
    let (i1, i2, i3, i_n) = (roles[0], roles[1], roles[2], roles[n - 1]);
    let (q1, q2, qn) = (cfg.q[i1], cfg.q[i2], cfg.q[i_n]);
    let mut margin = f64::INFINITY;
    let delta = q1.wedge(&qn);
    check_pivot(delta, q1.norm() * qn.norm(), "q_1 and q_n are proportional", &mut margin)?;
    let frame = Mat2::from_columns(q1, qn);
    let beta = solve2(&frame, &q2).ok_or(Error::IndexDegenerate("singular frame".into()))?;
    let (b1, bn) = (beta.0[0], beta.0[1]);
    let q2n = q2.norm();
    check_pivot(b1 * q1.norm(), q2n, "q_2 is proportional to q_n", &mut margin)?;
    check_pivot(bn * qn.norm(), q2n, "q_2 is proportional to q_1", &mut margin)?;
    let e2 = (b1 * bn * delta).inv().sqrt();
    let (e1, en) = (b1 * e2, bn * e2);
    let a = Mat2::from_columns(q1.scale(e1), qn.scale(en));
    let a_inv = a.inverse().ok_or(Error::IndexDegenerate("singular frame".into()))?;
    let mut e = vec![ONE; cfg.n()];
    e[i1] = e1;
    e[i2] = e2;
    e[i_n] = en;
    let v3 = a_inv.mul_vec(&cfg.q[i3]);
    check_pivot(v3.0[1], v3.norm(), "q_3 is proportional to q_1", &mut margin)?;
    e[i3] = v3.0[1].inv();
    for &i in roles.iter().take(n - 1).skip(3) {
        let v = a_inv.mul_vec(&cfg.q[i]);
        check_pivot(v.0[0], v.norm(), "q_i is proportional to q_n", &mut margin)?;
        e[i] = v.0[0].inv();
    }
    let gauge = GaugeElement { a, e };
    let moved = act(cfg, &gauge);
    let mut z = vec![moved.p[i3].0[0]];
    let mut w = vec![moved.q[i3].0[0]];
    for &i in roles.iter().take(n - 1).skip(3) {
        z.push(moved.p[i].0[1]);
        w.push(moved.q[i].0[1]);
    }
    Ok(NormalForm {
        gauge,
        coords: ChartCoords { z, w },
        margin,
    })
}

impl Chart {
    fn normal_form(&self, cfg: &HyperConfig) -> Result<NormalForm> {
        match self.kind {
            ChartKind::Xs(s) => xs_normal_form(cfg, &self.roles, s.len()),
            ChartKind::Polygon => polygon_normal_form(cfg, &self.roles),
        }
    }

    /// Chart values of a nearby point, centred so the base maps to zero.
    pub fn evaluate(&self, cfg: &HyperConfig) -> Result<ChartCoords> {
        Ok(self.normal_form(cfg)?.coords.sub(&self.base))
    }

    /// The gauge bringing `cfg` to the chart's normal form.
    pub fn gauge(&self, cfg: &HyperConfig) -> Result<GaugeElement> {
        Ok(self.normal_form(cfg)?.gauge.canonical_sign())
    }
}

fn xs_roles(cfg: &HyperConfig, s: SubsetMask) -> Result<Vec<usize>> {
    let n = cfg.n();
    let in_s = s.indices(n);
    let in_sc = s.complement(n).indices(n);
    let threshold = 1e-9 * cfg.q_max_abs().max(1.0);
    let with_b: Vec<usize> = in_s
        .iter()
        .copied()
        .filter(|&i| cfg.p[i].max_abs() > threshold)
        .take(2)
        .collect();
    if with_b.len() < 2 || in_sc.is_empty() {
        return Err(Error::IndexDegenerate(
            "fewer than two indices of S carry p_i != 0".into(),
        ));
    }
    let mut roles = with_b.clone();
    roles.extend(in_s.iter().filter(|i| !with_b.contains(i)));
    roles.extend(in_sc.iter());
    Ok(roles)
}

/// Builds the chart centred at a circle-fixed point.
pub fn chart_at_fixed_point(cfg: &HyperConfig, kind: ChartKind) -> Result<Chart> {
    let n = cfg.n();
    match kind {
        ChartKind::Xs(s) => {
            let sc = s.complement(n);
            let threshold = 1e-9 * cfg.q_max_abs().max(1.0);
            let classes = maximal_straight_sets(cfg, DEFAULT_PROP_TOL)?;
            let straight = |t: SubsetMask| classes.iter().any(|c| t.is_subset_of(c));
            let p_off = sc.indices(n).iter().any(|&j| cfg.p[j].max_abs() >= threshold);
            if s.len() < 2 || sc.is_empty() || !straight(s) || !straight(sc) || p_off {
                return Err(Error::NotFixed);
            }
            let roles = xs_roles(cfg, s)?;
            let nf = xs_normal_form(cfg, &roles, s.len())?;
            Ok(Chart {
                kind,
                roles,
                base: nf.coords,
                base_gauge: nf.gauge.canonical_sign(),
                pivot_margin: nf.margin,
            })
        }
        ChartKind::Polygon => {
            if !cfg.p_is_negligible() {
                return Err(Error::NotFixed);
            }
            let mut last = Error::IndexDegenerate("no feasible role assignment".into());
            for i1 in 0..n {
                for i2 in 0..n {
                    for i_n in 0..n {
                        for i3 in 0..n {
                            let chosen = [i1, i2, i_n, i3];
                            if (0..4).any(|a| (0..a).any(|b| chosen[a] == chosen[b])) {
                                continue;
                            }
                            let mut roles = vec![i1, i2, i3];
                            roles.extend((0..n).filter(|i| !chosen.contains(i)));
                            roles.push(i_n);
                            match polygon_normal_form(cfg, &roles) {
                                Ok(nf) => {
                                    return Ok(Chart {
                                        kind,
                                        roles,
                                        base: nf.coords,
                                        base_gauge: nf.gauge.canonical_sign(),
                                        pivot_margin: nf.margin,
                                    })
                                }
                                Err(e) => last = e,
                            }
                        }
                    }
                }
            }
            Err(last)
        }
    }
}

/// Fitted weight of one chart coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateWeight {
    /// `"z"` or `"w"` with its chart slot (1-based).
    pub label: String,
    pub weight: i32,
    pub residual: f64,
}

/// Measured isotropy weights of the circle action at a fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropyReport {
    /// Nonzero weights in increasing order.
    pub weights: Vec<i32>,
    pub per_coordinate: Vec<CoordinateWeight>,
    pub max_residual: f64,
    /// Set for polygon points: the count is `n − 3`, which is what the chart
    /// computation gives; a multiplicity written in terms of `|S|` has no
    /// meaning there because no index set is attached to such a point.
    pub caveat: Option<String>,
}

impl IsotropyReport {
    /// Multiplicity of each weight as `(weight, count)`, increasing.
    pub fn multiplicities(&self) -> Vec<(i32, usize)> {
        let mut out: Vec<(i32, usize)> = Vec::new();
        for &k in &self.weights {
            match out.last_mut() {
                Some((w, c)) if *w == k => *c += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }
}

const FIT_TOL: f64 = 1e-6;
const FIT_ANGLES: [f64; 2] = [0.37, 1.13];

/// Fits integer weights `k` with `chart(λ·x) = λ^k chart(x)` at a point
/// `x` near the fixed point, for two sample values of `λ`.
pub fn measure_isotropy_weights(
    cfg_fixed: &HyperConfig,
    kind: ChartKind,
    rng: &mut ChaCha8Rng,
) -> Result<IsotropyReport> {
    let chart = chart_at_fixed_point(cfg_fixed, kind)?;
    let near = perturb_on_complex_level(cfg_fixed, 1e-2, rng)?;
    let base = chart.evaluate(&near)?;
    let values: Vec<(String, C64)> = base
        .z
        .iter()
        .enumerate()
        .map(|(k, z)| (format!("z{}", k + 3), *z))
        .chain(
            base.w
                .iter()
                .enumerate()
                .map(|(k, w)| (format!("w{}", k + 3), *w)),
        )
        .collect();
    let moved: Vec<ChartCoords> = FIT_ANGLES
        .iter()
        .map(|&t| chart.evaluate(&crate::hyperpolygon::circle_act(C64::from_polar(1.0, t), &near)))
        .collect::<Result<_>>()?;
    let mut per_coordinate = Vec::new();
    let mut max_residual = 0.0_f64;
    let m = base.z.len();
    for (idx, (label, v0)) in values.into_iter().enumerate() {
        if v0.norm() < 1e-9 {
            return Err(Error::FitFailed(f64::INFINITY));
        }
        let ratios: Vec<C64> = moved
            .iter()
            .map(|c| if idx < m { c.z[idx] } else { c.w[idx - m] } / v0)
            .collect();
        let k = (ratios[0].arg() / FIT_ANGLES[0]).round() as i32;
        let residual = ratios
            .iter()
            .zip(FIT_ANGLES)
            .map(|(r, t)| (r - C64::from_polar(1.0, k as f64 * t)).norm())
            .fold(0.0, f64::max);
        max_residual = max_residual.max(residual);
        per_coordinate.push(CoordinateWeight {
            label,
            weight: k,
            residual,
        });
    }
    if max_residual > FIT_TOL {
        return Err(Error::FitFailed(max_residual));
    }
    let mut weights: Vec<i32> = per_coordinate
        .iter()
        .map(|c| c.weight)
        .filter(|k| *k != 0)
        .collect();
    weights.sort_unstable();
    let caveat = matches!(kind, ChartKind::Polygon).then(|| {
        format!(
            "polygon point: measured multiplicity of +1 is n - 3 = {}; a count written as (n-1)-|S| has no S to refer to here",
            cfg_fixed.n() - 3
        )
    });
    Ok(IsotropyReport {
        weights,
        per_coordinate,
        max_residual,
        caveat,
    })
}

/// Expected nonzero weights at a point of `X_S`.
pub fn expected_xs_weights(n: usize, s_len: usize) -> Vec<i32> {
    let mut w = vec![-1; n - 1 - s_len];
    w.extend(std::iter::repeat_n(1, s_len - 2));
    w.extend(std::iter::repeat_n(2, n - 1 - s_len));
    w
}

/// `φ` of the normalized representative; constant on complexified orbits.
pub fn orbit_phi(cfg: &HyperConfig, opts: &KnOptions) -> Result<f64> {
    Ok(phi(&kempf_ness_normalize(cfg, opts)?.cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ZERO;
    use crate::hyperpolygon::{
        level_residual, sample_complex_level, sample_polygon_level, WeightVector,
    };
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn alpha4() -> WeightVector {
        WeightVector::new(vec![1.0, 1.0, 2.0, 1.0]).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn identity_and_minus_identity_act_trivially() {
        let cfg = sample_complex_level(&alpha4(), 1).unwrap();
        assert!(act(&cfg, &GaugeElement::identity(4)).distance_inf(&cfg) < 1e-15);
        assert!(act(&cfg, &GaugeElement::minus_identity(4)).distance_inf(&cfg) < 1e-15);
    }

    #[test]
    fn exp_hermitian_has_unit_determinant() {
        let a = exp_hermitian([0.3, -1.2, 0.7]);
        assert!((a.det() - ONE).norm() < 1e-13);
        assert!((a - a.adjoint()).max_abs() < 1e-14);
        let b = exp_hermitian([-0.3, 1.2, -0.7]);
        assert!((a * b - Mat2::identity()).max_abs() < 1e-13);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let cfg = sample_complex_level(&alpha4(), 5).unwrap();
        let jac = jacobian(&cfg);
        let h = 1e-6;
        let r0 = residual_vector(&cfg);
        for col in 0..7 {
            let mut d = DVector::zeros(7);
            d[col] = 1.0;
            let rp = residual_vector(&act(&cfg, &step_from(&d, h)));
            let rm = residual_vector(&act(&cfg, &step_from(&d, -h)));
            let fd = (rp - rm) / (2.0 * h);
            for row in 0..7 {
                assert!(
                    (fd[row] - jac[(row, col)]).abs() < 1e-6 * (1.0 + r0.amax()),
                    "row {row} col {col}: {} vs {}",
                    fd[row],
                    jac[(row, col)]
                );
            }
        }
    }

    #[test]
    fn kempf_ness_reaches_level_set() {
        let cfg = sample_complex_level(&alpha4(), 9).unwrap();
        let out = kempf_ness_normalize(&cfg, &KnOptions::default()).unwrap();
        assert!(out.residual < 1e-8);
        assert!(level_residual(&out.cfg) < 1e-8);
        assert!(complex_residual(&out.cfg) < 1e-10);
        let again = kempf_ness_normalize(&out.cfg, &KnOptions::default()).unwrap();
        assert_eq!(again.iterations, 0);
        assert_eq!(again.gauge, GaugeElement::identity(4));
    }

    #[test]
    fn kempf_ness_rejects_unstable() {
        let a = alpha4();
        let q = vec![
            Vec2C::real(1.0, 0.0),
            Vec2C::real(0.0, 1.0),
            Vec2C::real(2.0, 0.0),
            Vec2C::real(1.0, 1.0),
        ];
        let cfg = HyperConfig::polygon(a, q).unwrap();
        assert!(matches!(
            kempf_ness_normalize(&cfg, &KnOptions::default()),
            Err(Error::NotStable(_))
        ));
    }

    #[test]
    fn kempf_ness_reports_non_convergence() {
        let cfg = sample_complex_level(&alpha4(), 9).unwrap();
        let opts = KnOptions {
            max_iters: 1,
            tol: 1e-300,
            ..KnOptions::default()
        };
        assert!(matches!(
            kempf_ness_normalize(&cfg, &opts),
            Err(Error::NoConvergence { iters: 1, .. })
        ));
    }

    #[test]
    fn complexified_orbit_has_one_phi() {
        let cfg = sample_complex_level(&alpha4(), 21).unwrap();
        let mut r = rng(2);
        let g = GaugeElement::random_complex(4, 0.8, &mut r);
        let other = act(&cfg, &g);
        let opts = KnOptions::default();
        let a = orbit_phi(&cfg, &opts).unwrap();
        let b = orbit_phi(&other, &opts).unwrap();
        assert!((a - b).abs() < 1e-7);
    }

    fn xs_point(seed: u64) -> (HyperConfig, SubsetMask) {
        // n = 5, S = {1,2,3} short for these weights.
        let a = WeightVector::new(vec![0.5, 0.6, 0.7, 1.3, 1.1]).unwrap();
        let s = SubsetMask::from_indices(&[0, 1, 2]);
        let mut r = rng(seed);
        let c: Vec<C64> = (0..3).map(|_| C64::new(1.0 + r.random::<f64>(), r.random())).collect();
        let mut b: Vec<C64> = (0..2).map(|_| C64::new(r.random(), 1.0)).collect();
        b.push(-(c[0] * b[0] + c[1] * b[1]) / c[2]);
        let mut p = Vec::new();
        let mut q = Vec::new();
        for i in 0..3 {
            p.push(Covec2C::new(ZERO, b[i]));
            q.push(Vec2C::new(c[i], ZERO));
        }
        for _ in 3..5 {
            p.push(Covec2C::default());
            q.push(Vec2C::new(ZERO, C64::new(1.0 + r.random::<f64>(), r.random())));
        }
        (HyperConfig::new(a, p, q).unwrap(), s)
    }

    #[test]
    fn xs_chart_is_centred_and_gauge_invariant() {
        let (cfg, s) = xs_point(3);
        assert!(complex_residual(&cfg) < 1e-14);
        let chart = chart_at_fixed_point(&cfg, ChartKind::Xs(s)).unwrap();
        assert!(chart.evaluate(&cfg).unwrap().max_abs() < 1e-14);
        let mut r = rng(8);
        let near = perturb_on_complex_level(&cfg, 1e-2, &mut r).unwrap();
        let g = GaugeElement::random_compact(5, &mut r);
        let a = chart.evaluate(&near).unwrap();
        let b = chart.evaluate(&act(&near, &g)).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-8);
    }

    #[test]
    fn xs_chart_single_p_perturbation_moves_one_z() {
        let (cfg, s) = xs_point(4);
        let chart = chart_at_fixed_point(&cfg, ChartKind::Xs(s)).unwrap();
        // chart slot 4 holds index 3, which is in S^c and not the last slot
        let j = chart.roles[3];
        assert!(!s.contains(j));
        let mut moved = cfg.clone();
        moved.p[j] = Covec2C::new(C64::new(1e-4, 2e-4), ZERO);
        let v = chart.evaluate(&moved).unwrap();
        assert!(v.w.iter().all(|w| w.norm() < 1e-15));
        assert!(v.z[0].norm() < 1e-15);
        assert!(v.z[1].norm() > 1e-5);
    }

    #[test]
    fn xs_weights_n5() {
        let (cfg, s) = xs_point(5);
        let rep = measure_isotropy_weights(&cfg, ChartKind::Xs(s), &mut rng(1)).unwrap();
        assert_eq!(rep.weights, expected_xs_weights(5, 3));
        assert!(rep.caveat.is_none());
    }

    #[test]
    fn polygon_weights_n5() {
        let a = WeightVector::new(vec![1.0, 1.1, 1.25, 0.9, 1.45]).unwrap();
        let cfg = sample_polygon_level(&a, 4).unwrap();
        let rep = measure_isotropy_weights(&cfg, ChartKind::Polygon, &mut rng(2)).unwrap();
        assert_eq!(rep.weights, vec![1, 1]);
        assert!(rep.caveat.is_some());
    }

    #[test]
    fn polygon_chart_rejects_nonzero_p() {
        let cfg = sample_complex_level(&alpha4(), 2).unwrap();
        assert_eq!(
            chart_at_fixed_point(&cfg, ChartKind::Polygon),
            Err(Error::NotFixed)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn action_is_a_group_action(seed in any::<u64>()) {
            let cfg = sample_complex_level(&alpha4(), seed).unwrap();
            let mut r = rng(seed ^ 0x5eed);
            let g = GaugeElement::random_complex(4, 0.5, &mut r);
            let h = GaugeElement::random_complex(4, 0.5, &mut r);
            let lhs = act(&act(&cfg, &g), &h);
            let rhs = act(&cfg, &g.compose(&h));
            prop_assert!(lhs.distance_inf(&rhs) < 1e-10 * (1.0 + lhs.q_max_abs() + lhs.p_max_abs()));
            let neg = GaugeElement { a: -g.a, e: g.e.iter().map(|x| -x).collect() };
            prop_assert!(act(&cfg, &neg).distance_inf(&act(&cfg, &g)) < 1e-12);
        }

        #[test]
        fn moment_maps_are_equivariant(seed in any::<u64>()) {
            let cfg = sample_complex_level(&alpha4(), seed).unwrap();
            let mut r = rng(seed.wrapping_add(1));
            let g = GaugeElement::random_compact(4, &mut r);
            let moved = act(&cfg, &g);
            let scale = 1.0 + phi(&cfg);
            prop_assert!((phi(&moved) - phi(&cfg)).abs() < 1e-12 * scale);
            let (m0, m1) = (mu_real(&cfg), mu_real(&moved));
            for (x, y) in m0.scalars.iter().zip(&m1.scalars) {
                prop_assert!((x - y).abs() < 1e-12 * scale);
            }
            let c0 = crate::hyperpolygon::mu_complex(&cfg);
            let c1 = crate::hyperpolygon::mu_complex(&moved);
            for (x, y) in c0.scalars.iter().zip(&c1.scalars) {
                prop_assert!((x - y).norm() < 1e-12);
            }
            let a_inv = g.a.inverse().unwrap();
            let conj = a_inv * c0.matrix * g.a;
            prop_assert!((conj - c1.matrix).max_abs() < 1e-10);
            let h0 = crate::algebra::su2_embed(m0.su2);
            let h1 = crate::algebra::su2_embed(m1.su2);
            prop_assert!((a_inv * h0 * g.a - h1).max_abs() < 1e-10);
        }
    }
}
