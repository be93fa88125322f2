//! Geometry of the Takano domain: the explicit solutions
//! `Q = c1 x^lambda`, `P = c2 x^(-lambda)` on the universal cover of the
//! punctured disc, the row-wise description of `|Q| < rho`, `|x P| < rho`,
//! and the curve `|Q| = mu`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weyl::Kappa;

type C = Complex64;

/// Default for the constant `M > 2` that bounds `mu`.
pub const DEFAULT_M: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TakanoParams {
    pub c1: C,
    pub c2: C,
    pub rho: f64,
    pub rho0: f64,
    pub mu: f64,
    pub m: f64,
    pub kappa: Kappa<C>,
}

impl TakanoParams {
    /// Checks the bounds on `rho0`, `c1 c2` and `mu` and the genericity of
    /// `1 - k1 - k3`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        let eta = C::new(1.0, 0.0) - self.kappa.get(1) - self.kappa.get(3);
        if eta.im == 0.0 {
            return bad(format!("1 - k1 - k3 = {eta} is real"));
        }
        if !(self.rho > 0.0 && self.rho0 > 0.0 && self.mu > 0.0) {
            return bad("rho, rho0 and mu must be positive".into());
        }
        if !(self.m > 2.0) {
            return bad(format!("M = {} must exceed 2", self.m));
        }
        let cap = self.rho.min(eta.im.abs() / 2.0).min(1.0);
        if !(self.rho0 < cap) {
            return bad(format!("rho0 = {} must be below min(rho, |Im(1 - k1 - k3)|/2, 1) = {cap}", self.rho0));
        }
        let k0 = self.kappa.get(0).norm();
        if k0 != 0.0 && !(self.rho0 < k0 / 2.0) {
            return bad(format!("rho0 = {} must be below |k0|/2 = {}", self.rho0, k0 / 2.0));
        }
        let c = (self.c1 * self.c2).norm();
        if !(c > 0.0 && c < self.rho0) {
            return bad(format!("|c1 c2| = {c} must lie in (0, rho0 = {})", self.rho0));
        }
        let mu_cap = c / (self.m * (k0 + 8.0));
        if !(self.mu < mu_cap) {
            return bad(format!("mu = {} must be below |c1 c2| / (M (|k0| + 8)) = {mu_cap}", self.mu));
        }
        Ok(())
    }
}

/// `lambda = 1 - k1 - k3 + 2 c1 c2`.
pub fn takano_lambda(params: &TakanoParams) -> C {
    C::new(1.0, 0.0) - params.kappa.get(1) - params.kappa.get(3) + 2.0 * params.c1 * params.c2
}

/// A point of the universal cover of the punctured plane, stored as
/// `(log|x|, arg x)` with unreduced argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverPoint {
    pub log_abs: f64,
    pub arg: f64,
}

impl CoverPoint {
    pub fn log(&self) -> C {
        C::new(self.log_abs, self.arg)
    }

    pub fn x(&self) -> C {
        C::from_polar(self.log_abs.exp(), self.arg)
    }
}

/// `(Q, P) = (c1 x^lambda, c2 x^(-lambda))` on the cover.
pub fn takano_qp(pt: &CoverPoint, params: &TakanoParams) -> (C, C) {
    let e = takano_lambda(params) * pt.log();
    (params.c1 * e.exp(), params.c2 * (-e).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainReport {
    /// Row of the table, by the real part of lambda.
    pub case_id: u8,
    /// Condition on `Im(lambda) arg x` (always true where the row has none).
    pub arg_ok: bool,
    /// Condition on `log|x|`.
    pub log_ok: bool,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub member: bool,
}

/// Row 1..5 according to `Re lambda > 1, = 1, in (0, 1), = 0, < 0`.
pub fn case_of(lambda: C) -> u8 {
    match lambda.re {
        r if r > 1.0 => 1,
        r if r == 1.0 => 2,
        r if r > 0.0 => 3,
        r if r == 0.0 => 4,
        _ => 5,
    }
}

/// Membership in the domain through the row of the table matching
/// `Re lambda`.
pub fn domain_membership(pt: &CoverPoint, params: &TakanoParams) -> DomainReport {
    let lambda = takano_lambda(params);
    let (re, im) = (lambda.re, lambda.im);
    let a1 = (params.rho / params.c1.norm()).ln();
    let a2 = (params.rho / params.c2.norm()).ln();
    let alpha = im * pt.arg;
    let l0 = re * a2 + (re - 1.0) * a1;
    let l1 = (alpha + a1) / re;
    let l2 = (alpha - a2) / (re - 1.0);
    let ell = pt.log_abs;
    let case_id = case_of(lambda);
    let (arg_ok, log_ok) = match case_id {
        1 => (alpha < l0, l2 < ell && ell < l1),
        2 => (alpha < l0, ell < l1),
        3 => (true, ell < l1.min(l2)),
        4 => (alpha > l0, ell < l2),
        _ => (alpha > l0, l1 < ell && ell < l2),
    };
    DomainReport {
        case_id,
        arg_ok,
        log_ok,
        l0,
        l1,
        l2,
        member: arg_ok && log_ok,
    }
}

/// The defining inequalities `|Q| < rho` and `|x P| < rho`, evaluated
/// directly.
pub fn brute_force_member(pt: &CoverPoint, params: &TakanoParams) -> bool {
    let (q, p) = takano_qp(pt, params);
    q.norm() < params.rho && (pt.x() * p).norm() < params.rho
}

/// `n_points` points of the curve `Re(lambda) log|x| - Im(lambda) arg x =
/// log(mu/|c1|)` with `|x| < mu rho / |c1 c2|`, spaced evenly in `log|x|`
/// over `span` below the bound (a margin of `span / n_points` is kept).
pub fn gamma_curve(params: &TakanoParams, n_points: usize, span: f64) -> Result<Vec<CoverPoint>> {
    params.validate().map_err(|e| Error::EmptyCurve(e.to_string()))?;
    if n_points == 0 || !(span > 0.0) {
        return Err(Error::EmptyCurve("need at least one point and a positive span".into()));
    }
    let lambda = takano_lambda(params);
    let g = (params.mu / params.c1.norm()).ln();
    let top = (params.mu * params.rho / (params.c1 * params.c2).norm()).ln();
    let step = span / n_points as f64;
    let mut out = Vec::with_capacity(n_points);
    for m in 0..n_points {
        let log_abs = top - step * (m as f64 + 1.0);
        let arg = (lambda.re * log_abs - g) / lambda.im;
        let pt = CoverPoint { log_abs, arg };
        if !domain_membership(&pt, params).member {
            return Err(Error::EmptyCurve(format!("curve point {pt:?} lies outside the domain")));
        }
        out.push(pt);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k1: C, k3: C, c1: C, c2: C) -> TakanoParams {
        let k2 = C::new(0.1, 0.0);
        let k0 = C::new(0.05, 0.3);
        let k4 = C::new(1.0, 0.0) - 2.0 * k0 - k1 - k2 - k3;
        TakanoParams {
            c1,
            c2,
            rho: 0.5,
            rho0: 0.1,
            mu: 1e-4,
            m: DEFAULT_M,
            kappa: Kappa::new([k0, k1, k2, k3, k4]).unwrap(),
        }
    }

    #[test]
    fn lambda_example() {
        let p = params(C::new(0.0, 0.0), C::new(0.0, 1.0), C::new(0.1, 0.0), C::new(0.1, 0.0));
        let l = takano_lambda(&p);
        assert!((l - C::new(1.02, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn boundary_is_not_member() {
        // rho = |c1|, arg = 0, log|x| = 0 gives |Q| = rho exactly.
        let mut p = params(C::new(0.5, 0.0), C::new(0.0, 0.4), C::new(0.5, 0.0), C::new(0.0, 0.01));
        p.rho = 0.5;
        let pt = CoverPoint { log_abs: 0.0, arg: 0.0 };
        assert_eq!(takano_qp(&pt, &p).0.norm(), 0.5);
        assert!(!domain_membership(&pt, &p).member);
        assert!(!brute_force_member(&pt, &p));
    }
}
