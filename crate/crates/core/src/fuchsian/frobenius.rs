//! Frobenius recursion at a resonant regular singular point and the
//! coefficient whose vanishing rules out logarithms.
//!
//! Around a finite pole `a` the equation is put in the standard form
//! `x^2 f'' + x P(x) f' + Q(x) f = 0` with `x = z - a`, `P = -x u1`,
//! `Q = x^2 u2`; around infinity `w = 1/z` gives `P = 2 + u1/w`,
//! `Q = u2/w^2`. For a series `f = sum c_n x^(rho + n)` one has
//! `F(rho + n) c_n = -sum_{m=1..n} [(rho + n - m) P_m + Q_m] c_{n-m}` with
//! `F(r) = r(r - 1) + P_0 r + Q_0`. When `F(rho + N) = 0` the right-hand
//! side at `n = N` is the obstruction.

use super::FuchsianCoeffs;
use crate::backlund::Extended;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, APPROX_ZERO_TOL};

/// Taylor coefficients `P_0..P_n`, `Q_0..Q_n` of the standard form.
fn standard_form<S: Scalar>(coeffs: &FuchsianCoeffs<S>, at: &Extended<S>, n: usize) -> Result<(Vec<S>, Vec<S>)> {
    let mut p = vec![S::zero(); n + 1];
    let mut q = vec![S::zero(); n + 1];
    match at {
        Extended::Finite(a) => {
            let own = coeffs.pole(a)?;
            p[0] = -own.c1.clone();
            q[0] = own.c2_second.clone();
            if n >= 1 {
                q[1] = own.c2_first.clone();
            }
            for b in coeffs.poles.iter().filter(|b| &b.at != a) {
                let beta = b.at.clone() - a.clone();
                let inv = S::one() / beta;
                let mut pow = S::one(); // inv^m
                for m in 1..=n {
                    pow = pow * inv.clone();
                    p[m] = p[m].clone() + b.c1.clone() * pow.clone();
                }
                // Q_m for m >= 2: -d1 / beta^(m-1) + d2 (m-1) / beta^m.
                let mut pow_prev = S::one(); // inv^(m-1)
                for m in 2..=n {
                    pow_prev = pow_prev * inv.clone();
                    let pow_m = pow_prev.clone() * inv.clone();
                    q[m] = q[m].clone() - b.c2_first.clone() * pow_prev.clone()
                        + b.c2_second.clone() * S::from_i64(m as i64 - 1) * pow_m;
                }
            }
        }
        Extended::Infinity => {
            let inf = coeffs.at_infinity();
            if !inf.c2_first.is_negligible(APPROX_ZERO_TOL) {
                return Err(Error::Irregular("infinity".into()));
            }
            p[0] = S::from_i64(2);
            for b in &coeffs.poles {
                let mut pow = S::one(); // b^m
                for m in 0..=n {
                    p[m] = p[m].clone() + b.c1.clone() * pow.clone();
                    let next = pow.clone() * b.at.clone();
                    q[m] = q[m].clone()
                        + b.c2_first.clone() * next.clone()
                        + b.c2_second.clone() * S::from_i64(m as i64 + 1) * pow.clone();
                    pow = next;
                }
            }
        }
    }
    Ok((p, q))
}

fn indicial_value<S: Scalar>(p0: &S, q0: &S, r: &S) -> S {
    r.clone() * (r.clone() - S::one()) + p0.clone() * r.clone() + q0.clone()
}

/// Runs the recursion from the exponent `rho` up to `rho + n` and returns
/// the obstruction coefficient. Requires `rho` and `rho + n` to be
/// exponents at `at`.
pub fn frobenius_obstruction<S: Scalar>(coeffs: &FuchsianCoeffs<S>, at: &Extended<S>, rho: &S, n: usize) -> Result<S> {
    if n == 0 {
        return Err(Error::NotResonant {
            at: describe(at),
            expected: n,
        });
    }
    let (p, q) = standard_form(coeffs, at, n)?;
    let tol = APPROX_ZERO_TOL * (1.0 + rho.to_c64().norm()).powi(2);
    let top = rho.clone() + S::from_i64(n as i64);
    if !indicial_value(&p[0], &q[0], rho).is_negligible(tol) || !indicial_value(&p[0], &q[0], &top).is_negligible(tol) {
        return Err(Error::NotResonant {
            at: describe(at),
            expected: n,
        });
    }
    let mut c = vec![S::one()];
    for k in 1..=n {
        let mut rhs = S::zero();
        for m in 1..=k {
            let r = rho.clone() + S::from_i64((k - m) as i64);
            rhs = rhs + (r * p[m].clone() + q[m].clone()) * c[k - m].clone();
        }
        if k == n {
            return Ok(rhs);
        }
        let f = indicial_value(&p[0], &q[0], &(rho.clone() + S::from_i64(k as i64)));
        c.push(-rhs / f);
    }
    unreachable!("loop returns at k = n")
}

/// Obstruction at a point with exponents `0` and `n`.
pub fn apparent_obstruction<S: Scalar>(coeffs: &FuchsianCoeffs<S>, at: &Extended<S>, n: usize) -> Result<S> {
    frobenius_obstruction(coeffs, at, &S::zero(), n)
}

fn describe<S: Scalar>(at: &Extended<S>) -> String {
    match at {
        Extended::Finite(a) => a.to_text(),
        Extended::Infinity => "inf".into(),
    }
}
