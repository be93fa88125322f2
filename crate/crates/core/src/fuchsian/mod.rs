//! Second-order Fuchsian equations `f'' - u1 f' + u2 f = 0` stored as
//! partial fractions
//!
//! ```text
//! u1 = sum c1 / (z - a),    u2 = sum [c2_first / (z - a) + c2_second / (z - a)^2]
//! ```
//!
//! over finitely many finite poles `a`; the point at infinity is described
//! by the expansion data of [`FuchsianCoeffs::at_infinity`].

pub mod coalesce;
pub mod frobenius;

use num_complex::Complex64;

use crate::backlund::{Extended, ExtendedState, TimeConfig};
use crate::error::{Error, Result};
use crate::hamiltonians::{h3, h4};
use crate::scalar::Scalar;
use crate::weyl::Kappa;

pub use frobenius::{apparent_obstruction, frobenius_obstruction};

#[derive(Debug, Clone, PartialEq)]
pub struct Pole<S> {
    pub at: S,
    pub c1: S,
    pub c2_first: S,
    pub c2_second: S,
}

impl<S: Scalar> Pole<S> {
    pub fn simple(at: S, c1: S, c2_first: S) -> Self {
        Pole {
            at,
            c1,
            c2_first,
            c2_second: S::zero(),
        }
    }
}

/// Expansion at infinity: `u1 ~ c1 / z`, `u2 ~ c2_first / z + c2_second / z^2`.
/// Infinity is at worst a regular singular point iff `c2_first = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinityData<S> {
    pub c1: S,
    pub c2_first: S,
    pub c2_second: S,
}

/// Pair of local exponents at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentPair<S> {
    pub at: Extended<S>,
    pub e_plus: S,
    pub e_minus: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianCoeffs<S> {
    pub poles: Vec<Pole<S>>,
}

impl<S: Scalar> FuchsianCoeffs<S> {
    pub fn new(poles: Vec<Pole<S>>) -> Result<Self> {
        for a in 0..poles.len() {
            for b in a + 1..poles.len() {
                if poles[a].at == poles[b].at {
                    return Err(Error::InvalidParameters(format!(
                        "duplicate pole at {}",
                        poles[a].at.to_text()
                    )));
                }
            }
        }
        Ok(FuchsianCoeffs { poles })
    }

    pub fn pole_index(&self, at: &S) -> Option<usize> {
        self.poles.iter().position(|p| &p.at == at)
    }

    pub fn pole(&self, at: &S) -> Result<&Pole<S>> {
        self.pole_index(at)
            .map(|i| &self.poles[i])
            .ok_or_else(|| Error::InvalidParameters(format!("no pole at {}", at.to_text())))
    }

    /// `(u1(z), u2(z))`.
    pub fn eval(&self, z: &S) -> (S, S) {
        let mut u1 = S::zero();
        let mut u2 = S::zero();
        for p in &self.poles {
            let d = z.clone() - p.at.clone();
            let inv = S::one() / d;
            u1 = u1 + p.c1.clone() * inv.clone();
            u2 = u2 + p.c2_first.clone() * inv.clone() + p.c2_second.clone() * inv.clone() * inv;
        }
        (u1, u2)
    }

    pub fn at_infinity(&self) -> InfinityData<S> {
        let mut c1 = S::zero();
        let mut c2_first = S::zero();
        let mut c2_second = S::zero();
        for p in &self.poles {
            c1 = c1 + p.c1.clone();
            c2_first = c2_first + p.c2_first.clone();
            c2_second = c2_second + p.c2_first.clone() * p.at.clone() + p.c2_second.clone();
        }
        InfinityData {
            c1,
            c2_first,
            c2_second,
        }
    }

    /// Coefficients `(b, c)` of the monic indicial polynomial
    /// `rho^2 + b rho + c`. At a finite pole solutions behave like
    /// `(z - a)^rho`, at infinity like `z^(-rho)`.
    pub fn indicial(&self, at: &Extended<S>) -> Result<(S, S)> {
        match at {
            Extended::Finite(a) => {
                let p = self.pole(a)?;
                Ok((-(S::one() + p.c1.clone()), p.c2_second.clone()))
            }
            Extended::Infinity => {
                let inf = self.at_infinity();
                if !inf.c2_first.is_negligible(crate::scalar::APPROX_ZERO_TOL) {
                    return Err(Error::Irregular(format!(
                        "infinity (sum of first-order residues of u2 = {})",
                        inf.c2_first.to_text()
                    )));
                }
                Ok((S::one() + inf.c1, inf.c2_second))
            }
        }
    }

    /// Whether the indicial roots at `at` are `{e1, e2}` (exactly, or to `tol`
    /// for floating backends).
    pub fn has_exponents(&self, at: &Extended<S>, e1: &S, e2: &S, tol: f64) -> Result<bool> {
        let (b, c) = self.indicial(at)?;
        let sum_ok = (b + e1.clone() + e2.clone()).is_negligible(tol);
        let prod_ok = (c - e1.clone() * e2.clone()).is_negligible(tol);
        Ok(sum_ok && prod_ok)
    }

    /// Indicial roots in floating point.
    pub fn exponents_c64(&self, at: &Extended<S>) -> Result<(Complex64, Complex64)> {
        let (b, c) = self.indicial(at)?;
        let (b, c) = (b.to_c64(), c.to_c64());
        let disc = (b * b - 4.0 * c).sqrt();
        Ok(((-b + disc) / 2.0, (-b - disc) / 2.0))
    }

    /// Transform under `f = prod (z - x)^e * F`, with `factors = [(x, e)]`.
    pub fn gauge(&self, factors: &[(S, S)]) -> FuchsianCoeffs<S> {
        let mut poles = self.poles.clone();
        for (x, _) in factors {
            if !poles.iter().any(|p| &p.at == x) {
                poles.push(Pole::simple(x.clone(), S::zero(), S::zero()));
            }
        }
        let n = poles.len();
        let a: Vec<S> = poles.iter().map(|p| p.c1.clone()).collect();
        let e: Vec<S> = poles
            .iter()
            .map(|p| {
                factors
                    .iter()
                    .filter(|(x, _)| x == &p.at)
                    .fold(S::zero(), |acc, (_, ex)| acc + ex.clone())
            })
            .collect();
        let two = S::from_i64(2);
        let mut out = poles.clone();
        for x in 0..n {
            out[x].c1 = a[x].clone() - two.clone() * e[x].clone();
            out[x].c2_second = out[x].c2_second.clone() - e[x].clone();
        }
        // u2 - g u1 + g^2 + g' with g = sum e/(z-x):
        // sum_{x,y} e_x (e_y - a_y) / ((z-x)(z-y)) - sum e_x/(z-x)^2.
        for x in 0..n {
            if e[x].is_zero() {
                continue;
            }
            for y in 0..n {
                let w = e[x].clone() * (e[y].clone() - a[y].clone());
                if w.is_zero() {
                    continue;
                }
                if x == y {
                    out[x].c2_second = out[x].c2_second.clone() + w;
                } else {
                    let r = w / (poles[x].at.clone() - poles[y].at.clone());
                    out[x].c2_first = out[x].c2_first.clone() + r.clone();
                    out[y].c2_first = out[y].c2_first.clone() - r;
                }
            }
        }
        FuchsianCoeffs { poles: out }
    }

    pub fn to_c64(&self) -> FuchsianCoeffs<Complex64> {
        FuchsianCoeffs {
            poles: self
                .poles
                .iter()
                .map(|p| Pole {
                    at: p.at.to_c64(),
                    c1: p.c1.to_c64(),
                    c2_first: p.c2_first.to_c64(),
                    c2_second: p.c2_second.to_c64(),
                })
                .collect(),
        }
    }

    /// Largest coefficient difference against `other` (same pole order).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.poles
            .iter()
            .zip(&other.poles)
            .map(|(a, b)| {
                [
                    (a.at.clone() - b.at.clone()),
                    (a.c1.clone() - b.c1.clone()),
                    (a.c2_first.clone() - b.c2_first.clone()),
                    (a.c2_second.clone() - b.c2_second.clone()),
                ]
                .iter()
                .map(|d| d.to_c64().norm())
                .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// `v1 = 1/(z-q) + sum (k_i - 1)/(z - t_i)`, `v2 = p/(z-q) - sum h_i/(z - t_i)`.
/// Poles are ordered `t1, t2, t3, q`.
pub fn build_coeff3<S: Scalar>(state: &ExtendedState<S>) -> Result<FuchsianCoeffs<S>> {
    if !state.t.t4().is_infinite() {
        return Err(Error::FiniteT4);
    }
    let t = state.t.t123();
    let mut poles = Vec::with_capacity(4);
    for i in 1..=3 {
        let h = h3(i, &state.q, &state.p, t, &state.kappa)?;
        poles.push(Pole::simple(t[i - 1].clone(), state.kappa.get(i).clone() - S::one(), -h));
    }
    poles.push(Pole::simple(state.q.clone(), S::one(), state.p.clone()));
    FuchsianCoeffs::new(poles)
}

/// Four finite points version with `H_i`; poles ordered `t1..t4, q`.
pub fn build_coeff4<S: Scalar>(state: &ExtendedState<S>) -> Result<FuchsianCoeffs<S>> {
    let t = state.t.all_finite()?;
    let mut poles = Vec::with_capacity(5);
    for i in 1..=4 {
        let h = h4(i, &state.q, &state.p, &t, &state.kappa)?;
        poles.push(Pole::simple(t[i - 1].clone(), state.kappa.get(i).clone() - S::one(), -h));
    }
    poles.push(Pole::simple(state.q.clone(), S::one(), state.p.clone()));
    FuchsianCoeffs::new(poles)
}

/// Normal form: gauge by `(z - q) prod (z - t_i)^(k_i/2)`.
pub fn normalize3<S: Scalar>(coeffs: &FuchsianCoeffs<S>, state: &ExtendedState<S>) -> FuchsianCoeffs<S> {
    let half = S::half();
    let mut factors = vec![(state.q.clone(), S::one())];
    for (idx, t) in state.t.t123().iter().enumerate() {
        factors.push((t.clone(), state.kappa.get(idx + 1).clone() * half.clone()));
    }
    coeffs.gauge(&factors)
}

/// Exponents the normal form is expected to have:
/// `+-k_i/2` at `t_i`, `+-1` at `q`, `(3 +- k4)/2` at infinity.
pub fn normal_form_exponents<S: Scalar>(state: &ExtendedState<S>) -> Vec<ExponentPair<S>> {
    let half = S::half();
    let mut out: Vec<ExponentPair<S>> = state
        .t
        .t123()
        .iter()
        .enumerate()
        .map(|(idx, t)| {
            let e = state.kappa.get(idx + 1).clone() * half.clone();
            ExponentPair {
                at: Extended::Finite(t.clone()),
                e_plus: e.clone(),
                e_minus: -e,
            }
        })
        .collect();
    out.push(ExponentPair {
        at: Extended::Finite(state.q.clone()),
        e_plus: S::one(),
        e_minus: -S::one(),
    });
    let three = S::from_i64(3);
    let k4 = state.kappa.get(4).clone();
    out.push(ExponentPair {
        at: Extended::Infinity,
        e_plus: (three.clone() + k4.clone()) * half.clone(),
        e_minus: (three - k4) * half,
    });
    out
}

/// Exponents of the unnormalized three-point equation:
/// `(0, k_i)` at `t_i`, `(0, 2)` at `q`, `(k0, k0 + k4)` at infinity.
pub fn coeff3_exponents<S: Scalar>(state: &ExtendedState<S>) -> Vec<ExponentPair<S>> {
    let mut out: Vec<ExponentPair<S>> = state
        .t
        .t123()
        .iter()
        .enumerate()
        .map(|(idx, t)| ExponentPair {
            at: Extended::Finite(t.clone()),
            e_plus: state.kappa.get(idx + 1).clone(),
            e_minus: S::zero(),
        })
        .collect();
    out.push(ExponentPair {
        at: Extended::Finite(state.q.clone()),
        e_plus: S::from_i64(2),
        e_minus: S::zero(),
    });
    let k0 = state.kappa.get(0).clone();
    out.push(ExponentPair {
        at: Extended::Infinity,
        e_plus: k0.clone() + state.kappa.get(4).clone(),
        e_minus: k0,
    });
    out
}

/// Gauge `f = (z - t_i)^(k_i) fbar` applied to the four-point equation of
/// `state`, and the state read off from the transformed coefficients.
pub fn gauge_shift<S: Scalar>(
    coeffs: &FuchsianCoeffs<S>,
    state: &ExtendedState<S>,
    i: usize,
) -> Result<(FuchsianCoeffs<S>, ExtendedState<S>)> {
    if !(1..=4).contains(&i) {
        return Err(Error::IndexOutOfRange(i));
    }
    let t = state.t.all_finite()?;
    let shifted = coeffs.gauge(&[(t[i - 1].clone(), state.kappa.get(i).clone())]);
    let read = read_off4(&shifted, &state.t)?;
    Ok((shifted, read))
}

/// Recovers `(kappa, q, p)` from coefficients of the four-point form
/// `u1 = 1/(z-q) + sum (k_i - 1)/(z - t_i)`, `u2 = p/(z-q) - ...`; `k0`
/// follows from the Fuchs relation.
pub fn read_off4<S: Scalar>(coeffs: &FuchsianCoeffs<S>, t: &TimeConfig<S>) -> Result<ExtendedState<S>> {
    let pts = t.all_finite()?;
    let mut k: [S; 5] = std::array::from_fn(|_| S::zero());
    for (idx, ti) in pts.iter().enumerate() {
        let pole = coeffs.pole(ti)?;
        if !pole.c2_second.is_negligible(crate::scalar::APPROX_ZERO_TOL) {
            return Err(Error::InvalidParameters(format!(
                "second-order pole at t{} does not fit the four-point form",
                idx + 1
            )));
        }
        k[idx + 1] = pole.c1.clone() + S::one();
    }
    let apparent: Vec<&Pole<S>> = coeffs.poles.iter().filter(|p| !pts.contains(&p.at)).collect();
    let [q_pole] = apparent.as_slice() else {
        return Err(Error::InvalidParameters(
            "expected exactly one apparent pole".into(),
        ));
    };
    let sum: S = k[1..].iter().cloned().fold(S::zero(), |a, b| a + b);
    k[0] = (S::one() - sum) * S::half();
    ExtendedState::new(Kappa::new(k)?, t.clone(), q_pole.at.clone(), q_pole.c2_first.clone())
}
