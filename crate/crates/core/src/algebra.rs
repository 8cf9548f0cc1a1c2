//! Small exact-size linear algebra shared by the rest of the crate.
//!
//! Complex 2-vectors, covectors and 2×2 matrices house the quiver data
//! `(p, q)`; [`MinkVector`] and [`Su11Isometry`] live in Minkowski space
//! `R^{2,1}` with signature `(-, -, +)`.
//!
//! # Identifications
//!
//! * `su(1,1)`: `(x, y, t) ↦ ½ [[-i t, x + i y], [x - i y, i t]]`. Under this
//!   map the Minkowski cross product becomes the commutator and the
//!   Minkowski inner product becomes `(A, B) ↦ -2 tr(AB)`.
//! * `su(2)`: `(v1, v2, v3) ↦ (i/2) [[v3, v1 + i v2], [v1 - i v2, -v3]]`.
//!   With this convention a single vector `q` with `p = 0` is sent by the
//!   real moment map to the Euclidean vector `(Re(c d̄), Im(c d̄), (|c|²-|d|²)/2)`,
//!   whose length is `|q|²/2`. So the level condition `|q|² = 2α` makes the
//!   side length exactly `α`.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::numeric::{compensated_sum, signed_dot};

pub type C64 = Complex64;

/// Euclidean 3-vector.
pub type Vec3 = [f64; 3];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Column vector `(c, d)ᵀ` in `C²`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2C(pub [C64; 2]);

/// Row vector `(a, b)` in `(C²)*`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Covec2C(pub [C64; 2]);

impl Vec2C {
    pub const fn new(c: C64, d: C64) -> Self {
        Self([c, d])
    }

    pub fn real(c: f64, d: f64) -> Self {
        Self([C64::new(c, 0.0), C64::new(d, 0.0)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Covec2C {
        Covec2C([self.0[0].conj(), self.0[1].conj()])
    }

    /// `q ⊗ p`, the matrix `q p`.
    pub fn outer(&self, p: &Covec2C) -> Mat2 {
        Mat2([
            [self.0[0] * p.0[0], self.0[0] * p.0[1]],
            [self.0[1] * p.0[0], self.0[1] * p.0[1]],
        ])
    }

    /// The covector `(d, -c)` spanning the annihilator of `self`.
    pub fn annihilator(&self) -> Covec2C {
        Covec2C([self.0[1], -self.0[0]])
    }

    /// `c_self d_other - d_self c_other`.
    pub fn wedge(&self, other: &Vec2C) -> C64 {
        self.0[0] * other.0[1] - self.0[1] * other.0[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.0[0].norm().max(self.0[1].norm())
    }
}

impl Covec2C {
    pub const fn new(a: C64, b: C64) -> Self {
        Self([a, b])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    /// Pairing with a column vector: `p q = a c + b d`.
    pub fn pair(&self, q: &Vec2C) -> C64 {
        self.0[0] * q.0[0] + self.0[1] * q.0[1]
    }

    pub fn adjoint(&self) -> Vec2C {
        Vec2C([self.0[0].conj(), self.0[1].conj()])
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &Mat2) -> Covec2C {
        Covec2C([
            self.0[0] * m.0[0][0] + self.0[1] * m.0[1][0],
            self.0[0] * m.0[0][1] + self.0[1] * m.0[1][1],
        ])
    }

    pub fn max_abs(&self) -> f64 {
        self.0[0].norm().max(self.0[1].norm())
    }
}

impl Add for Vec2C {
    type Output = Vec2C;
    fn add(self, o: Vec2C) -> Vec2C {
        Vec2C([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for Vec2C {
    type Output = Vec2C;
    fn sub(self, o: Vec2C) -> Vec2C {
        Vec2C([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Add for Covec2C {
    type Output = Covec2C;
    fn add(self, o: Covec2C) -> Covec2C {
        Covec2C([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for Covec2C {
    type Output = Covec2C;
    fn sub(self, o: Covec2C) -> Covec2C {
        Covec2C([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for Covec2C {
    type Output = Covec2C;
    fn neg(self) -> Covec2C {
        Covec2C([-self.0[0], -self.0[1]])
    }
}

/// Complex 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Self([[m00, m01], [m10, m11]])
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Self::new(a, ZERO, ZERO, b)
    }

    /// Matrix with the given columns.
    pub fn from_columns(c0: Vec2C, c1: Vec2C) -> Self {
        Self::new(c0.0[0], c1.0[0], c0.0[1], c1.0[1])
    }

    pub fn column(&self, j: usize) -> Vec2C {
        Vec2C([self.0[0][j], self.0[1][j]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.0[0][0].conj(),
            self.0[1][0].conj(),
            self.0[0][1].conj(),
            self.0[1][1].conj(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.0[0][0] * s,
            self.0[0][1] * s,
            self.0[1][0] * s,
            self.0[1][1] * s,
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        let inv = det.inv();
        Some(Self::new(
            self.0[1][1] * inv,
            -self.0[0][1] * inv,
            -self.0[1][0] * inv,
            self.0[0][0] * inv,
        ))
    }

    pub fn mul_vec(&self, v: &Vec2C) -> Vec2C {
        Vec2C([
            self.0[0][0] * v.0[0] + self.0[0][1] * v.0[1],
            self.0[1][0] * v.0[0] + self.0[1][1] * v.0[1],
        ])
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn is_nilpotent(&self, tol: f64) -> bool {
        (*self * *self).max_abs() <= tol
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.0[0][0] + o.0[0][0],
            self.0[0][1] + o.0[0][1],
            self.0[1][0] + o.0[1][0],
            self.0[1][1] + o.0[1][1],
        )
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Trace-free part `M - (tr M / 2) I`; the `(·)_0` of the moment maps.
pub fn traceless_part(m: &Mat2) -> Mat2 {
    let h = m.trace() * 0.5;
    Mat2::new(m.0[0][0] - h, m.0[0][1], m.0[1][0], m.0[1][1] - h)
}

/// Coordinates `(Re z, Im z, h)` of a traceless Hermitian matrix `[[h, z], [z̄, -h]]`.
pub fn hermitian_coords(h: &Mat2) -> Vec3 {
    [h.0[0][1].re, h.0[0][1].im, h.0[0][0].re]
}

/// `(i/2) [[v3, v1 + i v2], [v1 - i v2, -v3]]`.
pub fn su2_embed(v: Vec3) -> Mat2 {
    let half_i = I * 0.5;
    Mat2::new(
        C64::new(v[2], 0.0),
        C64::new(v[0], v[1]),
        C64::new(v[0], -v[1]),
        C64::new(-v[2], 0.0),
    )
    .scale(half_i)
}

/// Inverse of [`su2_embed`] on `su(2)`.
pub fn su2_coords(m: &Mat2) -> Vec3 {
    hermitian_coords(&m.scale(C64::new(0.0, -2.0)))
}

/// `(x, y, t) ↦ ½ [[-i t, x + i y], [x - i y, i t]]`.
pub fn su11_embed(v: MinkVector) -> Mat2 {
    Mat2::new(
        C64::new(0.0, -v.t),
        C64::new(v.x, v.y),
        C64::new(v.x, -v.y),
        C64::new(0.0, v.t),
    )
    .scale(C64::new(0.5, 0.0))
}

/// Inverse of [`su11_embed`] on `su(1,1)`.
pub fn su11_coords(m: &Mat2) -> MinkVector {
    MinkVector::new(2.0 * m.0[0][1].re, 2.0 * m.0[0][1].im, 2.0 * m.0[1][1].im)
}

pub fn vec3_add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn vec3_norm(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Causal character of a Minkowski vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CausalClass {
    LightLike,
    TimeLikeFuture,
    TimeLikePast,
    SpaceLike,
}

/// A vector `(x, y, t)` of `R^{2,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkVector {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

const SIGNATURE: [f64; 3] = [-1.0, -1.0, 1.0];

impl MinkVector {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// `v ∘ w = -x x' - y y' + t t'`, evaluated with compensated arithmetic.
    pub fn inner(&self, w: &MinkVector) -> f64 {
        signed_dot(&SIGNATURE, &self.to_array(), &w.to_array())
    }

    /// `√|v ∘ v|`.
    pub fn norm(&self) -> f64 {
        self.inner(self).abs().sqrt()
    }

    pub fn euclidean_norm(&self) -> f64 {
        vec3_norm(self.to_array())
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.t.abs())
    }

    /// Minkowski cross product, the determinant with first row `(-e1, -e2, e3)`.
    pub fn cross(&self, w: &MinkVector) -> MinkVector {
        MinkVector::new(
            -(self.y * w.t - self.t * w.y),
            self.x * w.t - self.t * w.x,
            self.x * w.y - self.y * w.x,
        )
    }

    /// Causal class; `|v∘v| <= tol·(1 + |v|²)` counts as light-like.
    pub fn causal_class(&self, tol: f64) -> CausalClass {
        let q = self.inner(self);
        let e2 = self.x * self.x + self.y * self.y + self.t * self.t;
        if q.abs() <= tol * (1.0 + e2) {
            CausalClass::LightLike
        } else if q < 0.0 {
            CausalClass::SpaceLike
        } else if self.t > 0.0 {
            CausalClass::TimeLikeFuture
        } else {
            CausalClass::TimeLikePast
        }
    }

    /// Sum with a compensated accumulator per coordinate.
    pub fn sum<'a, I: IntoIterator<Item = &'a MinkVector>>(vs: I) -> MinkVector {
        let (mut xs, mut ys, mut ts) = (Vec::new(), Vec::new(), Vec::new());
        for v in vs {
            xs.push(v.x);
            ys.push(v.y);
            ts.push(v.t);
        }
        MinkVector::new(
            compensated_sum(xs),
            compensated_sum(ys),
            compensated_sum(ts),
        )
    }
}

impl Add for MinkVector {
    type Output = MinkVector;
    fn add(self, o: MinkVector) -> MinkVector {
        MinkVector::new(self.x + o.x, self.y + o.y, self.t + o.t)
    }
}

impl Sub for MinkVector {
    type Output = MinkVector;
    fn sub(self, o: MinkVector) -> MinkVector {
        MinkVector::new(self.x - o.x, self.y - o.y, self.t - o.t)
    }
}

impl Neg for MinkVector {
    type Output = MinkVector;
    fn neg(self) -> MinkVector {
        MinkVector::new(-self.x, -self.y, -self.t)
    }
}

impl Mul<f64> for MinkVector {
    type Output = MinkVector;
    fn mul(self, s: f64) -> MinkVector {
        MinkVector::new(self.x * s, self.y * s, self.t * s)
    }
}

/// An element of the identity component of `SO(2,1)` stored as a real 3×3
/// matrix acting on `(x, y, t)` columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su11Isometry(pub [[f64; 3]; 3]);

impl Default for Su11Isometry {
    fn default() -> Self {
        Self::identity()
    }
}

impl Su11Isometry {
    pub fn identity() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Euclidean rotation by `theta` in the `(x, y)`-plane.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Boost of rapidity `phi` along the `y`-direction.
    pub fn boost(phi: f64) -> Self {
        let (ch, sh) = (phi.cosh(), phi.sinh());
        Self([[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Su11Isometry) -> Su11Isometry {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Su11Isometry(m)
    }

    pub fn apply(&self, v: &MinkVector) -> MinkVector {
        let a = v.to_array();
        let r = |i: usize| compensated_sum((0..3).map(|k| self.0[i][k] * a[k]));
        MinkVector::new(r(0), r(1), r(2))
    }

    /// `η Mᵀ η`, exact for Lorentz matrices.
    pub fn inverse(&self) -> Su11Isometry {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = SIGNATURE[i] * self.0[j][i] * SIGNATURE[j];
            }
        }
        Su11Isometry(m)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest deviation of `Mᵀ η M` from `η`.
    pub fn lorentz_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let g: f64 = (0..3)
                    .map(|k| self.0[k][i] * SIGNATURE[k] * self.0[k][j])
                    .sum();
                let target = if i == j { SIGNATURE[i] } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Maps the future cone to itself.
    pub fn is_orthochronous(&self) -> bool {
        self.0[2][2] > 0.0
    }

    /// An isometry sending `(0, 0, |v|)` to the future time-like vector `v`.
    pub fn to_future(v: &MinkVector) -> Su11Isometry {
        let m = v.norm();
        let r = v.x.hypot(v.y);
        let phi = (r / m).asinh();
        // boost(phi) sends (0,0,m) to (0, m sinh phi, m cosh phi); rotate the
        // +y axis onto the direction of (x, y).
        let psi = v.y.atan2(v.x) - std::f64::consts::FRAC_PI_2;
        Su11Isometry::rotation(psi).compose(&Su11Isometry::boost(phi))
    }

    /// An isometry sending `(|v|, 0, 0)` to the space-like vector `v`.
    pub fn to_spacelike(v: &MinkVector) -> Su11Isometry {
        let s = v.norm();
        let psi = (v.t / s).asinh();
        let (ch, sh) = (psi.cosh(), psi.sinh());
        // boost in the x–t plane, then rotation of the +x axis onto (x, y)
        let boost_x = Su11Isometry([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]]);
        Su11Isometry::rotation(v.y.atan2(v.x)).compose(&boost_x)
    }
}
