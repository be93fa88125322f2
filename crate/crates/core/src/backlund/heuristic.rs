//! Rediscovering `s0` from invariance of the coalescence polynomial `D`:
//! the difference `E = D(Q, P, t, sigma0(kappa)) - D(q, p, t, kappa)` is
//! expanded in `(t_i, t_j)` and the candidate substitutions `(Q, P)` that
//! kill its leading coefficients are tested.

use crate::error::{Error, Result};
use crate::fuchsian::coalesce::{d_poly, Triple};
use crate::poly::{integer_nodes, interpolate};
use crate::scalar::Scalar;
use crate::weyl::Kappa;

/// Degree bound per variable used for the expansion; `D` has degree 1 in
/// `t_i` and 2 in `t_j`, the extra nodes certify that.
pub const EXPANSION_NODES: usize = 4;

/// Coefficients `E_mn` of `t_i^m t_j^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicE<S> {
    pub coeffs: Vec<Vec<S>>,
}

impl<S: Scalar> HeuristicE<S> {
    pub fn get(&self, m: usize, n: usize) -> S {
        self.coeffs
            .get(m)
            .and_then(|row| row.get(n))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn is_identically_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().flatten().all(|c| c.is_negligible(tol))
    }

    /// Whether only the constant term survives.
    pub fn is_constant(&self, tol: f64) -> bool {
        self.coeffs.iter().enumerate().all(|(m, row)| {
            row.iter()
                .enumerate()
                .all(|(n, c)| (m, n) == (0, 0) || c.is_negligible(tol))
        })
    }
}

/// Expands `E` in `(t_i, t_j)` with `t_k = t_j`. `kappa` is not required to
/// satisfy the Fuchs relation.
pub fn heuristic_e<S: Scalar>(
    big_q: &S,
    big_p: &S,
    q: &S,
    p: &S,
    kappa: &Kappa<S>,
    triple: Triple,
) -> Result<HeuristicE<S>> {
    let sigma0 = kappa.reflect(0)?;
    let nodes: Vec<S> = integer_nodes(EXPANSION_NODES, -1);
    let e_at = |ti: &S, tj: &S| {
        let after = d_poly(
            &(big_q.clone() - ti.clone()),
            &(big_q.clone() - tj.clone()),
            big_p,
            &sigma0,
            triple,
        );
        let before = d_poly(&(q.clone() - ti.clone()), &(q.clone() - tj.clone()), p, kappa, triple);
        after - before
    };
    // Interpolate in t_j for each t_i node, then in t_i coefficient-wise.
    let per_ti: Vec<Vec<S>> = nodes
        .iter()
        .map(|ti| {
            let vals: Vec<S> = nodes.iter().map(|tj| e_at(ti, tj)).collect();
            interpolate(&nodes, &vals)
        })
        .collect();
    let mut coeffs = vec![vec![S::zero(); EXPANSION_NODES]; EXPANSION_NODES];
    for n in 0..EXPANSION_NODES {
        let column: Vec<S> = per_ti.iter().map(|c| c[n].clone()).collect();
        for (m, c) in interpolate(&nodes, &column).into_iter().enumerate() {
            coeffs[m][n] = c;
        }
    }
    Ok(HeuristicE { coeffs })
}

/// The two solutions of `E12 = E11 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// `Q = q + k0/p`, `P = p`.
    Sol1,
    /// `Q = q + (k0 + k_i + k4)/p`, `P = -p`.
    Sol2,
}

impl Candidate {
    pub fn apply<S: Scalar>(self, q: &S, p: &S, kappa: &Kappa<S>, i: usize) -> Result<(S, S)> {
        if p.is_negligible(0.0) {
            return Err(Error::Pole("candidate maps are undefined at p = 0".into()));
        }
        match self {
            Candidate::Sol1 => Ok((q.clone() + kappa.get(0).clone() / p.clone(), p.clone())),
            Candidate::Sol2 => {
                let shift = kappa.get(0).clone() + kappa.get(i).clone() + kappa.get(4).clone();
                Ok((q.clone() + shift / p.clone(), -p.clone()))
            }
        }
    }
}

pub fn heuristic_solve() -> [Candidate; 2] {
    [Candidate::Sol1, Candidate::Sol2]
}

/// `2 k_i - k_j - k_k + 1`; the second candidate needs it to vanish.
pub fn e02_condition<S: Scalar>(kappa: &Kappa<S>, triple: Triple) -> S {
    let (i, j, k) = triple.indices();
    S::from_i64(2) * kappa.get(i).clone() - kappa.get(j).clone() - kappa.get(k).clone() + S::one()
}

/// `k_i (k4 - k_i)(k4 + k_i)`.
pub fn ee_condition<S: Scalar>(kappa: &Kappa<S>, triple: Triple) -> S {
    let (i, _, _) = triple.indices();
    let ki = kappa.get(i).clone();
    let k4 = kappa.get(4).clone();
    ki.clone() * (k4.clone() - ki.clone()) * (k4 + ki)
}
