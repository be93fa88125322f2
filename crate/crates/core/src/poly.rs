//! Univariate interpolation over a field, used to expose polynomial
//! structure of functions that are only available by evaluation.

use crate::scalar::Scalar;

/// Monomial coefficients (constant term first) of the unique polynomial of
/// degree `< nodes.len()` through `(nodes[i], values[i])`. Nodes must be
/// pairwise distinct.
pub fn interpolate<S: Scalar>(nodes: &[S], values: &[S]) -> Vec<S> {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    // Newton divided differences.
    let mut dd: Vec<S> = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = dd[i].clone() - dd[i - 1].clone();
            let den = nodes[i].clone() - nodes[i - level].clone();
            dd[i] = num / den;
        }
    }
    // Horner expansion of the Newton form into monomials.
    let mut coeffs = vec![S::zero(); n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (z - nodes[i]) + dd[i]
        let mut next = vec![S::zero(); n];
        for d in 0..n {
            if coeffs[d].is_zero() {
                continue;
            }
            if d + 1 < n {
                next[d + 1] = next[d + 1].clone() + coeffs[d].clone();
            }
            next[d] = next[d].clone() - coeffs[d].clone() * nodes[i].clone();
        }
        next[0] = next[0].clone() + dd[i].clone();
        coeffs = next;
    }
    coeffs
}

/// Degree of a coefficient vector, treating entries negligible at `tol` as
/// zero. `None` for the zero polynomial.
pub fn degree<S: Scalar>(coeffs: &[S], tol: f64) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_negligible(tol))
}

pub fn eval<S: Scalar>(coeffs: &[S], z: &S) -> S {
    coeffs
        .iter()
        .rev()
        .fold(S::zero(), |acc, c| acc * z.clone() + c.clone())
}

/// Integer nodes `0, 1, ..., n-1` offset by `shift`.
pub fn integer_nodes<S: Scalar>(n: usize, shift: i64) -> Vec<S> {
    (0..n as i64).map(|k| S::from_i64(k + shift)).collect()
}
