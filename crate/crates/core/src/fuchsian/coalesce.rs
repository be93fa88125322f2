//! Coalescence `t_k -> t_j` of two singular points of the three-point
//! equation: the limiting coefficients `w1, w2`, the quantities `L, M, N`,
//! the discriminant `Delta` of the exponents at the merged point and the
//! polynomial `D = -t_ij Delta`.

use num_complex::Complex64;

use super::{FuchsianCoeffs, Pole};
use crate::backlund::ExtendedState;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weyl::Kappa;

/// An ordering `(i, j, k)` of `{1, 2, 3}`: `t_k` merges into `t_j`, `t_i`
/// stays apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    i: usize,
    j: usize,
    k: usize,
}

impl Triple {
    pub fn new(i: usize, j: usize, k: usize) -> Result<Self> {
        let mut v = [i, j, k];
        v.sort_unstable();
        if v != [1, 2, 3] {
            return Err(Error::InvalidParameters(format!(
                "({i}, {j}, {k}) is not a permutation of (1, 2, 3)"
            )));
        }
        Ok(Triple { i, j, k })
    }

    /// The triple merging `k` into `j`.
    pub fn merging(j: usize, k: usize) -> Result<Self> {
        let i = 6usize
            .checked_sub(j + k)
            .ok_or_else(|| Error::InvalidParameters(format!("bad pair ({j}, {k})")))?;
        Self::new(i, j, k)
    }

    pub fn indices(&self) -> (usize, usize, usize) {
        (self.i, self.j, self.k)
    }
}

/// `D(q_i, q_j, p, kappa) = (k_j + k_k - 1)^2 (q_i - q_j)
///   + 4 q_j [q_i q_j p^2 - {(k_j + k_k - 1) q_i + k_i q_j} p + k0 (k0 + k4)]`.
pub fn d_poly<S: Scalar>(qi: &S, qj: &S, p: &S, kappa: &Kappa<S>, triple: Triple) -> S {
    let (i, j, k) = triple.indices();
    let s = kappa.get(j).clone() + kappa.get(k).clone() - S::one();
    let c0 = kappa.get(0).clone() * (kappa.get(0).clone() + kappa.get(4).clone());
    let inner = qi.clone() * qj.clone() * p.clone() * p.clone()
        - (s.clone() * qi.clone() + kappa.get(i).clone() * qj.clone()) * p.clone()
        + c0;
    s.clone() * s * (qi.clone() - qj.clone()) + S::from_i64(4) * qj.clone() * inner
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coalesced<S> {
    /// Poles ordered `t_i, t_j, q`.
    pub w: FuchsianCoeffs<S>,
    pub l: S,
    pub m: S,
    pub n: S,
    pub triple: Triple,
}

fn qi_qj<S: Scalar>(state: &ExtendedState<S>, triple: Triple) -> Result<(S, S, S, S, S)> {
    if !state.t.t4().is_infinite() {
        return Err(Error::FiniteT4);
    }
    let (i, j, _) = triple.indices();
    let ti = state.t.get(i).expect("finite").clone();
    let tj = state.t.get(j).expect("finite").clone();
    let qi = state.q.clone() - ti.clone();
    let qj = state.q.clone() - tj.clone();
    if qi.is_negligible(0.0) {
        return Err(Error::Chart(i));
    }
    if qj.is_negligible(0.0) {
        return Err(Error::Chart(j));
    }
    Ok((ti.clone(), tj.clone(), qi, qj, ti - tj))
}

/// Limit of the three-point equation as `t_k -> t_j` (the position of `t_k`
/// in `state` is ignored).
pub fn coalesce<S: Scalar>(state: &ExtendedState<S>, triple: Triple) -> Result<Coalesced<S>> {
    let (ti, tj, qi, qj, tij) = qi_qj(state, triple)?;
    let (i, j, k) = triple.indices();
    let kap = |m: usize| state.kappa.get(m).clone();
    let one = S::one();
    let two = S::from_i64(2);
    let p = state.p.clone();
    let c0 = kap(0) * (kap(0) + kap(4));
    let sjk = kap(j) + kap(k);
    let base = qi.clone() * qj.clone() * qj.clone() * p.clone() * p.clone();
    let l = (base.clone() - ((kap(i) - one.clone()) * qj.clone() + sjk.clone() * qi.clone()) * qj.clone() * p.clone()
        + c0.clone() * qi.clone())
        / (tij.clone() * tij.clone());
    let m = (base.clone()
        - (qi.clone() * qi.clone() + (sjk.clone() - two.clone()) * qi.clone() * qj.clone() + kap(i) * qj.clone() * qj.clone())
            * p.clone()
        + c0.clone() * qi.clone())
        / (tij.clone() * tij.clone());
    let n = (base - ((sjk.clone() - one.clone()) * qi.clone() + kap(i) * qj.clone()) * qj.clone() * p.clone()
        + c0 * qj.clone())
        / tij;
    let w = FuchsianCoeffs::new(vec![
        Pole::simple(ti, kap(i) - one.clone(), -l.clone()),
        Pole {
            at: tj,
            c1: sjk - two,
            c2_first: m.clone(),
            c2_second: n.clone(),
        },
        Pole::simple(state.q.clone(), one, p),
    ])?;
    Ok(Coalesced { w, l, m, n, triple })
}

/// `(Delta, D)` with `Delta = (k_j + k_k - 1)^2 - 4N` and `D` from
/// [`d_poly`]; they satisfy `D = -t_ij Delta`.
pub fn discriminant<S: Scalar>(state: &ExtendedState<S>, triple: Triple) -> Result<(S, S)> {
    let (_, _, qi, qj, _) = qi_qj(state, triple)?;
    let c = coalesce(state, triple)?;
    let (_, j, k) = triple.indices();
    let s = state.kappa.get(j).clone() + state.kappa.get(k).clone() - S::one();
    let delta = s.clone() * s - S::from_i64(4) * c.n;
    let d = d_poly(&qi, &qj, &state.p, &state.kappa, triple);
    Ok((delta, d))
}

/// Gauge by `(z - q)(z - t_i)^(k_i/2)(z - t_j)^((k_j + k_k)/2)`.
pub fn normalize_coalesced<S: Scalar>(c: &Coalesced<S>, state: &ExtendedState<S>) -> FuchsianCoeffs<S> {
    let (i, j, k) = c.triple.indices();
    let half = S::half();
    let kap = |m: usize| state.kappa.get(m).clone();
    c.w.gauge(&[
        (state.q.clone(), S::one()),
        (state.t.get(i).expect("finite").clone(), kap(i) * half.clone()),
        (state.t.get(j).expect("finite").clone(), (kap(j) + kap(k)) * half),
    ])
}

/// `-2 cos(pi sqrt(Delta))`; the branch of the square root does not matter.
pub fn predicted_trace(delta: Complex64) -> Complex64 {
    -2.0 * (std::f64::consts::PI * delta.sqrt()).cos()
}

/// Principal square root with `Im >= 0` (sign flipped when needed).
pub fn sqrt_upper(delta: Complex64) -> Complex64 {
    let r = delta.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backlund::{s_apply, TimeConfig};
    use crate::scalar::ExactScalar;

    fn e(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d)
    }

    #[test]
    fn worked_d_value() {
        let z = e(0, 1);
        let kappa = Kappa::new([e(1, 2), z.clone(), z.clone(), z.clone(), z]).unwrap();
        let triple = Triple::new(1, 2, 3).unwrap();
        assert_eq!(d_poly(&e(1, 1), &e(2, 1), &e(1, 1), &kappa, triple), e(25, 1));
        let kappa2 = kappa.reflect(0).unwrap();
        assert_eq!(d_poly(&e(3, 2), &e(5, 2), &e(1, 1), &kappa2, triple), e(25, 1));
        // Same numbers through the state-level maps: q_i = 1, q_j = 2 means
        // t_i = q - 1, t_j = q - 2.
        let t = TimeConfig::with_infinity([e(2, 1), e(1, 1), e(7, 1)]).unwrap();
        let st = ExtendedState::new(kappa, t, e(3, 1), e(1, 1)).unwrap();
        let (_, d) = discriminant(&st, triple).unwrap();
        let (_, d2) = discriminant(&s_apply(&st, 0).unwrap(), triple).unwrap();
        assert_eq!((d, d2), (e(25, 1), e(25, 1)));
    }

    #[test]
    fn triple_validation() {
        assert!(Triple::new(1, 1, 2).is_err());
        assert_eq!(Triple::merging(1, 3).unwrap().indices(), (2, 1, 3));
    }
}
