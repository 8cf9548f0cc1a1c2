//! Floating-point helpers: error-free products and compensated sums.
//!
//! Minkowski quantities of large polygons are differences of nearly equal
//! squares, so naive evaluation throws away most of the significant bits.
//! The routines here evaluate such expressions to (nearly) the exact value of
//! the stored floating-point inputs.

/// Returns `(p, e)` with `p + e == a * b` exactly.
#[inline]
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Neumaier's variant of Kahan summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Dot product `sum(w_k * a_k * b_k)` evaluated with error-free products and a
/// compensated sum. `w` carries the signature (e.g. `[-1, -1, 1]`).
pub fn signed_dot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(2 * a.len());
    for k in 0..a.len() {
        let (p, e) = two_product(a[k], b[k]);
        terms.push(w[k] * p);
        terms.push(w[k] * e);
    }
    compensated_sum(terms)
}

/// Largest absolute value in a slice (0 for an empty slice).
pub fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}
