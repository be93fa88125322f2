//! Bäcklund transformations `s0..s4` on the extended phase space
//! `(kappa, t, q, p)`.

pub mod heuristic;

use crate::error::{Error, Result};
use crate::sample::Sampler;
use crate::scalar::{ExactScalar, Scalar};
use crate::weyl::{GroupWord, Kappa};

/// A finite value or the point at infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum Extended<S> {
    Finite(S),
    Infinity,
}

impl<S> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }
}

/// Positions `t1, t2, t3` of the finite singular points and `t4`, which may
/// be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig<S> {
    t: [S; 3],
    t4: Extended<S>,
}

impl<S: Scalar> TimeConfig<S> {
    pub fn new(t: [S; 3], t4: Extended<S>) -> Result<Self> {
        let mut all: Vec<&S> = t.iter().collect();
        if let Extended::Finite(v) = &t4 {
            all.push(v);
        }
        for a in 0..all.len() {
            for b in a + 1..all.len() {
                if (all[a].clone() - all[b].clone()).is_negligible(0.0) {
                    return Err(Error::CoincidentTimes);
                }
            }
        }
        Ok(TimeConfig { t, t4 })
    }

    /// `(t1, t2, t3, infinity)`.
    pub fn with_infinity(t: [S; 3]) -> Result<Self> {
        Self::new(t, Extended::Infinity)
    }

    /// `(0, 1, x, infinity)`.
    pub fn normalized(x: S) -> Result<Self> {
        Self::with_infinity([S::zero(), S::one(), x])
    }

    pub fn t123(&self) -> &[S; 3] {
        &self.t
    }

    pub fn t4(&self) -> &Extended<S> {
        &self.t4
    }

    /// `t_i` for `i` in `1..=4`; `None` when `i = 4` and `t4` is infinite.
    pub fn get(&self, i: usize) -> Option<&S> {
        match i {
            1..=3 => Some(&self.t[i - 1]),
            4 => self.t4.finite(),
            _ => None,
        }
    }

    /// All four points, failing when `t4` is infinite.
    pub fn all_finite(&self) -> Result<[S; 4]> {
        match &self.t4 {
            Extended::Finite(v) => Ok([
                self.t[0].clone(),
                self.t[1].clone(),
                self.t[2].clone(),
                v.clone(),
            ]),
            Extended::Infinity => Err(Error::Infinity),
        }
    }

    pub fn finite_points(&self) -> Vec<S> {
        let mut out = self.t.to_vec();
        if let Extended::Finite(v) = &self.t4 {
            out.push(v.clone());
        }
        out
    }

    pub fn with_t123(&self, t: [S; 3]) -> Result<Self> {
        Self::new(t, self.t4.clone())
    }
}

/// One point `(q, p)` of the chart together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState<S> {
    pub kappa: Kappa<S>,
    pub t: TimeConfig<S>,
    pub q: S,
    pub p: S,
}

impl<S: Scalar> ExtendedState<S> {
    pub fn new(kappa: Kappa<S>, t: TimeConfig<S>, q: S, p: S) -> Result<Self> {
        let state = ExtendedState { kappa, t, q, p };
        state.check_chart()?;
        Ok(state)
    }

    /// `q` must avoid every finite `t_i`.
    pub fn check_chart(&self) -> Result<()> {
        for i in 1..=4 {
            if let Some(ti) = self.t.get(i) {
                if (self.q.clone() - ti.clone()).is_negligible(0.0) {
                    return Err(Error::Chart(i));
                }
            }
        }
        Ok(())
    }

    pub fn with_qp(&self, q: S, p: S) -> Result<Self> {
        Self::new(self.kappa.clone(), self.t.clone(), q, p)
    }

    pub fn to_c64(&self) -> ExtendedState<num_complex::Complex64> {
        let t = TimeConfig {
            t: self.t.t.clone().map(|x| x.to_c64()),
            t4: match &self.t.t4 {
                Extended::Finite(v) => Extended::Finite(v.to_c64()),
                Extended::Infinity => Extended::Infinity,
            },
        };
        ExtendedState {
            kappa: self.kappa.to_c64(),
            t,
            q: self.q.to_c64(),
            p: self.p.to_c64(),
        }
    }
}

impl ExtendedState<ExactScalar> {
    /// Random exact chart point with `kappa` on the Fuchs locus, `p != 0`;
    /// `t4` is infinite or a fourth random point.
    pub fn sample(s: &mut Sampler, infinite_t4: bool) -> Self {
        let kappa = Kappa::sample(s);
        Self::sample_with_kappa(s, kappa, infinite_t4)
    }

    pub fn sample_with_kappa(s: &mut Sampler, kappa: Kappa<ExactScalar>, infinite_t4: bool) -> Self {
        let pts = s.exact_distinct(5);
        let t4 = if infinite_t4 {
            Extended::Infinity
        } else {
            Extended::Finite(pts[3].clone())
        };
        let t = TimeConfig::new([pts[0].clone(), pts[1].clone(), pts[2].clone()], t4)
            .expect("sampled points are distinct");
        ExtendedState::new(kappa, t, pts[4].clone(), s.exact_nonzero())
            .expect("sampled q avoids the time points")
    }
}

/// Applies `s_i` to the state.
pub fn s_apply<S: Scalar>(state: &ExtendedState<S>, i: usize) -> Result<ExtendedState<S>> {
    let kappa = state.kappa.reflect(i)?;
    let ki = state.kappa.get(i).clone();
    let (q, p) = if i == 0 {
        if state.p.is_negligible(0.0) {
            return Err(Error::Pole("s0 is undefined at p = 0".into()));
        }
        (state.q.clone() + ki / state.p.clone(), state.p.clone())
    } else {
        match state.t.get(i) {
            Some(ti) => {
                let qi = state.q.clone() - ti.clone();
                if qi.is_negligible(0.0) {
                    return Err(Error::Chart(i));
                }
                (state.q.clone(), state.p.clone() - ki / qi)
            }
            // t4 = infinity: s4 acts on (t, q, p) trivially.
            None => (state.q.clone(), state.p.clone()),
        }
    };
    ExtendedState::new(kappa, state.t.clone(), q, p)
}

/// Applies the letters of `w` left to right, reporting the failing letter.
pub fn s_word<S: Scalar>(state: &ExtendedState<S>, w: &GroupWord) -> Result<ExtendedState<S>> {
    let mut cur = state.clone();
    for (index, &i) in w.letters().iter().enumerate() {
        cur = s_apply(&cur, i).map_err(|e| Error::WordLetter {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(cur)
}

/// `q0 = p`, `q_i = q - t_i`; `None` stands for an infinite entry.
#[derive(Debug, Clone, PartialEq)]
pub struct QVars<S> {
    pub q: [Option<S>; 5],
}

pub fn qvars<S: Scalar>(state: &ExtendedState<S>) -> QVars<S> {
    QVars {
        q: std::array::from_fn(|i| {
            if i == 0 {
                Some(state.p.clone())
            } else {
                state.t.get(i).map(|ti| state.q.clone() - ti.clone())
            }
        }),
    }
}

/// `u_0j = 1`, `u_i0 = -1` for `i, j >= 1`, all other entries zero; with it
/// every generator reads `s_i(q_j) = q_j + (k_i / q_i) u_ij`.
pub const U_MATRIX: [[i64; 5]; 5] = [
    [0, 1, 1, 1, 1],
    [-1, 0, 0, 0, 0],
    [-1, 0, 0, 0, 0],
    [-1, 0, 0, 0, 0],
    [-1, 0, 0, 0, 0],
];

/// The unified form: `s_i` computed on q-variables through `U_MATRIX`.
pub fn s_apply_unified<S: Scalar>(qv: &QVars<S>, kappa: &Kappa<S>, i: usize) -> Result<QVars<S>> {
    if i > 4 {
        return Err(Error::IndexOutOfRange(i));
    }
    let Some(qi) = qv.q[i].clone() else {
        return Ok(qv.clone());
    };
    if qi.is_negligible(0.0) {
        return Err(Error::Pole(format!("q{i} = 0")));
    }
    let shift = kappa.get(i).clone() / qi;
    Ok(QVars {
        q: std::array::from_fn(|j| {
            qv.q[j]
                .clone()
                .map(|qj| qj + shift.clone() * S::from_i64(U_MATRIX[i][j]))
        }),
    })
}
