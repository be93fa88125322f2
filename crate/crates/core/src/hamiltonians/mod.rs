//! The single-time Hamiltonian `h`, the four-time family `H_i` and the
//! three-time family `h_i`, their gradients, the `t4 -> infinity` limit and
//! the commutation defect of Bäcklund transformations with the flows.

pub mod flow;

use crate::backlund::{s_apply, ExtendedState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weyl::Kappa;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Single,
    H4(usize),
    H3(usize),
}

impl std::fmt::Display for Which {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Which::Single => f.write_str("h-single"),
            Which::H4(i) => write!(f, "H4({i})"),
            Which::H3(i) => write!(f, "h3({i})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianValue<S> {
    pub value: S,
    pub which: Which,
}

fn check_q_off<S: Scalar>(q: &S, pts: &[S]) -> Result<()> {
    for (idx, t) in pts.iter().enumerate() {
        if (q.clone() - t.clone()).is_negligible(0.0) {
            return Err(Error::Pole(format!("q coincides with t{}", idx + 1)));
        }
    }
    Ok(())
}

fn check_distinct<S: Scalar>(pts: &[S]) -> Result<()> {
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if (pts[a].clone() - pts[b].clone()).is_negligible(0.0) {
                return Err(Error::CoincidentTimes);
            }
        }
    }
    Ok(())
}

/// The other two indices of `{1,2,3}`, in increasing order.
pub fn complement3(i: usize) -> Result<(usize, usize)> {
    match i {
        1 => Ok((2, 3)),
        2 => Ok((1, 3)),
        3 => Ok((1, 2)),
        _ => Err(Error::IndexOutOfRange(i)),
    }
}

fn complement4(i: usize) -> Result<(usize, usize, usize)> {
    match i {
        1 => Ok((2, 3, 4)),
        2 => Ok((1, 3, 4)),
        3 => Ok((1, 2, 4)),
        4 => Ok((1, 2, 3)),
        _ => Err(Error::IndexOutOfRange(i)),
    }
}

/// `x(x-1) h = q(q-1)(q-x)p^2 - {(k3-1)q(q-1) + k1(q-1)(q-x) + k2 q(q-x)}p
///             + k0(k0+k4)(q-x)`.
pub fn h_single<S: Scalar>(q: &S, p: &S, x: &S, kappa: &Kappa<S>) -> Result<S> {
    let (zero, one) = (S::zero(), S::one());
    check_distinct(&[zero.clone(), one.clone(), x.clone()])?;
    check_q_off(q, &[zero, one.clone(), x.clone()])?;
    let [k0, k1, k2, k3, k4] = kappa.as_array().clone();
    let q1 = q.clone() - one.clone();
    let qx = q.clone() - x.clone();
    let a = q.clone() * q1.clone() * qx.clone();
    let b = (k3 - one.clone()) * q.clone() * q1.clone() + k1 * q1 * qx.clone() + k2 * q.clone() * qx.clone();
    let c = k0.clone() * (k0 + k4) * qx;
    Ok((a * p.clone() * p.clone() - b * p.clone() + c) / (x.clone() * (x.clone() - one)))
}

/// Numerator of `h_i` as `A p^2 - B p + C` together with the q-derivatives
/// of `A, B, C`, and the denominator `t_ij t_ik`.
struct H3Parts<S> {
    a: S,
    b: S,
    c: S,
    da: S,
    db: S,
    dc: S,
    den: S,
}

fn h3_parts<S: Scalar>(i: usize, q: &S, t: &[S; 3], kappa: &Kappa<S>) -> Result<H3Parts<S>> {
    let (j, k) = complement3(i)?;
    check_distinct(t)?;
    check_q_off(q, t)?;
    let one = S::one();
    let tt = |m: usize| t[m - 1].clone();
    let (qi, qj, qk) = (q.clone() - tt(i), q.clone() - tt(j), q.clone() - tt(k));
    let (ki, kj, kk) = (
        kappa.get(i).clone() - one,
        kappa.get(j).clone(),
        kappa.get(k).clone(),
    );
    let c0 = kappa.get(0).clone() * (kappa.get(0).clone() + kappa.get(4).clone());
    Ok(H3Parts {
        a: qi.clone() * qj.clone() * qk.clone(),
        b: ki.clone() * qj.clone() * qk.clone()
            + kj.clone() * qk.clone() * qi.clone()
            + kk.clone() * qi.clone() * qj.clone(),
        c: c0.clone() * qi.clone(),
        da: qj.clone() * qk.clone() + qi.clone() * qk.clone() + qi.clone() * qj.clone(),
        db: ki * (qj.clone() + qk.clone()) + kj * (qk + qi.clone()) + kk * (qi + qj),
        dc: c0,
        den: (tt(i) - tt(j)) * (tt(i) - tt(k)),
    })
}

/// `(t_ij t_ik) h_i = q_i q_j q_k p^2 - {(k_i-1) q_j q_k + k_j q_k q_i
///                    + k_k q_i q_j} p + k0(k0+k4) q_i`.
pub fn h3<S: Scalar>(i: usize, q: &S, p: &S, t: &[S; 3], kappa: &Kappa<S>) -> Result<S> {
    let h = h3_parts(i, q, t, kappa)?;
    Ok((h.a * p.clone() * p.clone() - h.b * p.clone() + h.c) / h.den)
}

/// `(dh_i/dq, dh_i/dp)`.
pub fn h3_grad<S: Scalar>(i: usize, q: &S, p: &S, t: &[S; 3], kappa: &Kappa<S>) -> Result<(S, S)> {
    let h = h3_parts(i, q, t, kappa)?;
    let two = S::from_i64(2);
    let dq = (h.da * p.clone() * p.clone() - h.db * p.clone() + h.dc) / h.den.clone();
    let dp = (two * h.a * p.clone() - h.b) / h.den;
    Ok((dq, dp))
}

/// Four-time Hamiltonian `H_i`, `i` in `1..=4`.
pub fn h4<S: Scalar>(i: usize, q: &S, p: &S, t: &[S; 4], kappa: &Kappa<S>) -> Result<S> {
    let (j, k, l) = complement4(i)?;
    check_distinct(t)?;
    check_q_off(q, t)?;
    let one = S::one();
    let tt = |m: usize| t[m - 1].clone();
    let qq = |m: usize| q.clone() - tt(m);
    let (qi, qj, qk, ql) = (qq(i), qq(j), qq(k), qq(l));
    let kap = |m: usize| kappa.get(m).clone();
    let k0 = kap(0);
    let a = qi.clone() * qj.clone() * qk.clone() * ql.clone();
    let b = (kap(i) - one.clone()) * qj.clone() * qk.clone() * ql.clone()
        + kap(j) * qi.clone() * qk.clone() * ql.clone()
        + kap(k) * qi.clone() * qj.clone() * ql.clone()
        + kap(l) * qi.clone() * qj.clone() * qk.clone();
    let c = k0.clone()
        * qi.clone()
        * ((kap(i) - one) * qi
            + (kap(j) + k0.clone()) * qj
            + (kap(k) + k0.clone()) * qk
            + (kap(l) + k0) * ql);
    let den = (tt(i) - tt(j)) * (tt(i) - tt(k)) * (tt(i) - tt(l));
    Ok((a * p.clone() * p.clone() - b * p.clone() + c) / den)
}

/// The Hamiltonian `H_j` (finite `t4`) or `h_j` (`t4 = infinity`) of a
/// state; `j = 4` with infinite `t4` is identically zero.
pub fn hamiltonian_of_state<S: Scalar>(j: usize, state: &ExtendedState<S>) -> Result<HamiltonianValue<S>> {
    match state.t.all_finite() {
        Ok(t4) => Ok(HamiltonianValue {
            value: h4(j, &state.q, &state.p, &t4, &state.kappa)?,
            which: Which::H4(j),
        }),
        Err(_) => {
            let value = if j == 4 {
                S::zero()
            } else {
                h3(j, &state.q, &state.p, state.t.t123(), &state.kappa)?
            };
            Ok(HamiltonianValue {
                value,
                which: Which::H3(j),
            })
        }
    }
}

/// `H4(i) - h3(i)` for `i <= 3`, or `H4(4)`, with `t4` finite and large.
pub fn limit_defect<S: Scalar>(i: usize, q: &S, p: &S, t123: &[S; 3], t4: &S, kappa: &Kappa<S>) -> Result<S> {
    let t = [t123[0].clone(), t123[1].clone(), t123[2].clone(), t4.clone()];
    let big = h4(i, q, p, &t, kappa)?;
    if i == 4 {
        Ok(big)
    } else {
        Ok(big - h3(i, q, p, t123, kappa)?)
    }
}

/// `s_i(H_j) - H_j` without the correction term.
pub fn lemma_indep_raw<S: Scalar>(i: usize, j: usize, state: &ExtendedState<S>) -> Result<S> {
    let moved = s_apply(state, i)?;
    Ok(hamiltonian_of_state(j, &moved)?.value - hamiltonian_of_state(j, state)?.value)
}

/// `s_i(H_j) - H_j + delta_ij k_i / q_i`.
pub fn lemma_indep_defect<S: Scalar>(i: usize, j: usize, state: &ExtendedState<S>) -> Result<S> {
    let raw = lemma_indep_raw(i, j, state)?;
    match (i == j, state.t.get(i)) {
        (true, Some(ti)) => Ok(raw + state.kappa.get(i).clone() / (state.q.clone() - ti.clone())),
        // k_i / q_i vanishes when t_i is infinite.
        _ => Ok(raw),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backlund::TimeConfig;
    use crate::sample::Sampler;
    use crate::scalar::ExactScalar;

    fn e(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d)
    }

    #[test]
    fn h_single_worked_value() {
        let z = e(0, 1);
        let kappa = Kappa::new([e(1, 2), z.clone(), z.clone(), z.clone(), z]).unwrap();
        assert_eq!(h_single(&e(2, 1), &e(1, 1), &e(3, 1), &kappa).unwrap(), e(-1, 24));
    }

    #[test]
    fn h_single_poles() {
        let kappa = Kappa::<ExactScalar>::from_k0_to_k3(e(1, 3), e(1, 5), e(1, 7), e(1, 9));
        assert!(h_single(&e(1, 1), &e(1, 1), &e(3, 1), &kappa).is_err());
        assert!(h_single(&e(2, 1), &e(1, 1), &e(1, 1), &kappa).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut s = Sampler::new(5);
        let kappa = Kappa::<ExactScalar>::sample(&mut s).to_c64();
        let t = [s.exact(), s.exact(), s.exact()].map(|z| z.to_c64());
        let (q, p) = (s.exact().to_c64(), s.exact().to_c64());
        let step = 1e-5;
        for i in 1..=3 {
            let (dq, dp) = h3_grad(i, &q, &p, &t, &kappa).unwrap();
            let h = |q: num_complex::Complex64, p| h3(i, &q, &p, &t, &kappa).unwrap();
            let fq = (h(q + step, p) - h(q - step, p)) / (2.0 * step);
            let fp = (h(q, p + step) - h(q, p - step)) / (2.0 * step);
            assert!((fq - dq).norm() <= 1e-8 * dq.norm().max(1.0));
            assert!((fp - dp).norm() <= 1e-8 * dp.norm().max(1.0));
        }
    }

    #[test]
    fn state_dispatch_picks_family() {
        let mut s = Sampler::new(6);
        let st = ExtendedState::sample(&mut s, true);
        assert_eq!(hamiltonian_of_state(2, &st).unwrap().which, Which::H3(2));
        assert_eq!(hamiltonian_of_state(4, &st).unwrap().value, e(0, 1));
        let st = ExtendedState::sample(&mut s, false);
        assert_eq!(hamiltonian_of_state(4, &st).unwrap().which, Which::H4(4));
        let _ = TimeConfig::normalized(e(3, 1)).unwrap();
    }
}
