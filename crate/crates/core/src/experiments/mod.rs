//! End-to-end checks built on the Riemann-Hilbert map: invariance of the
//! global monodromy data under the Backlund group, constancy along the
//! isomonodromic flow, the coalescence limit and the Takano domain.

pub mod coalescence;
pub mod takano;

use num_complex::Complex64;
use serde::Serialize;

use crate::backlund::heuristic::Candidate;
use crate::backlund::{s_word, ExtendedState, TimeConfig};
use crate::error::{Error, Result};
use crate::hamiltonians::flow::flow;
use crate::monodromy::{default_base, loop_order, rh_map, x_distance, RhResult};
use crate::sample::Sampler;
use crate::weyl::{GroupWord, Kappa};

pub use coalescence::{coalescence_flow, CoalescenceReport, Rung};
pub use takano::{
    domain_membership, gamma_curve, takano_lambda, takano_qp, CoverPoint, DomainReport, TakanoParams,
};

type C = Complex64;

/// Threshold for invariance of `x` under a transformation.
pub const X_DEFECT_THRESHOLD: f64 = 1e-6;
/// Sampled states whose global coordinates exceed this in modulus are
/// redrawn: the cubic residual is absolute and grows like `|x|^3`.
pub const X_MODULUS_CAP: f64 = 100.0;

/// Time points used by the sampled states.
pub fn default_times() -> [C; 3] {
    [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(2.0, 0.5)]
}

/// A random chart state with `t = (0, 1, 2 + i/2, inf)`, `kappa_1..kappa_4`
/// near the real interval `(-0.4, 0.4)`, `q` between the time points and
/// `|p| >= 0.1`.
pub fn sample_state(s: &mut Sampler) -> ExtendedState<C> {
    let t = TimeConfig::with_infinity(default_times()).expect("distinct times");
    loop {
        let k: [C; 4] = std::array::from_fn(|_| s.complex_in((-0.4, 0.4), (-0.2, 0.2)));
        let k0 = (C::new(1.0, 0.0) - k[0] - k[1] - k[2] - k[3]) / 2.0;
        let kappa = Kappa::new([k0, k[0], k[1], k[2], k[3]]).expect("k0 solves the Fuchs relation");
        let q = s.complex_in((0.2, 2.2), (-0.6, 0.6));
        let p = s.complex_in((-0.5, 0.5), (-0.5, 0.5));
        if p.norm() < 0.1 || t.t123().iter().any(|ti| (q - ti).norm() < 0.2) {
            continue;
        }
        if let Ok(st) = ExtendedState::new(kappa, t.clone(), q, p) {
            return st;
        }
    }
}

/// Like [`sample_state`], redrawing states whose monodromy fails or has
/// `|x_i| > X_MODULUS_CAP`.
pub fn sample_conditioned(s: &mut Sampler, tol: f64) -> (ExtendedState<C>, RhResult) {
    loop {
        let st = sample_state(s);
        if let Ok(r) = rh_map(&st, tol) {
            if r.coords.x.iter().all(|z| z.norm() <= X_MODULUS_CAP) {
                return (st, r);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainReport {
    /// Word or candidate applied.
    pub transform: String,
    pub x: [C; 3],
    pub x_image: [C; 3],
    pub max_defect: f64,
    pub threshold: f64,
    pub pass: bool,
    pub residual: f64,
    pub residual_image: f64,
}

fn compare(transform: String, before: &RhResult, after: &RhResult) -> MainReport {
    let max_defect = x_distance(&before.coords.x, &after.coords.x);
    MainReport {
        transform,
        x: before.coords.x,
        x_image: after.coords.x,
        max_defect,
        threshold: X_DEFECT_THRESHOLD,
        pass: max_defect < X_DEFECT_THRESHOLD,
        residual: before.residual_kappa,
        residual_image: after.residual_kappa,
    }
}

/// `x(w(state))` against `x(state)`.
pub fn verify_main(state: &ExtendedState<C>, word: &GroupWord, tol: f64) -> Result<MainReport> {
    let before = rh_map(state, tol)?;
    let after = rh_map(&s_word(state, word)?, tol)?;
    Ok(compare(format!("{word}"), &before, &after))
}

/// Replaces `s0` by a candidate from the heuristic: parameters go to
/// `sigma0(kappa)` and `(q, p)` to the candidate's `(Q, P)`, with `k_i`
/// entering the second candidate.
pub fn verify_candidate(state: &ExtendedState<C>, candidate: Candidate, i: usize, tol: f64) -> Result<MainReport> {
    let before = rh_map(state, tol)?;
    let (q, p) = candidate.apply(&state.q, &state.p, &state.kappa, i)?;
    let image = ExtendedState::new(state.kappa.reflect(0)?, state.t.clone(), q, p)?;
    let after = rh_map(&image, tol)?;
    Ok(compare(format!("{candidate:?}(i={i})"), &before, &after))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsomonodromyPoint {
    pub time: C,
    pub q: C,
    pub p: C,
    pub x: [C; 3],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsomonodromyReport {
    pub points: Vec<IsomonodromyPoint>,
    /// Largest pairwise `|x(a) - x(b)|` over the evaluation points.
    pub max_defect: f64,
    pub path_length: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Flows `t3` along `x_path` and evaluates the Riemann-Hilbert map at every
/// vertex (a midpoint is added to two-point paths).
pub fn verify_isomonodromic(state: &ExtendedState<C>, x_path: &[C], tol: f64) -> Result<IsomonodromyReport> {
    let mut path = x_path.to_vec();
    if path.len() == 2 {
        path.insert(1, (path[0] + path[1]) / 2.0);
    }
    if path.is_empty() {
        return Err(Error::InvalidParameters("empty time path".into()));
    }
    let order = loop_order(state.t.t123(), default_base(state.t.t123()));
    let mut points = Vec::with_capacity(path.len());
    let mut current = state.clone();
    let mut length = 0.0;
    for (n, &target) in path.iter().enumerate() {
        if n > 0 {
            let from = path[n - 1];
            let traj = flow(&current, 3, &[from, target], tol).map_err(|e| match e {
                Error::Singularity { arclength, reason } => Error::Singularity {
                    arclength: arclength + length,
                    reason,
                },
                other => other,
            })?;
            current = traj.end_state(&current)?;
            length += (target - from).norm();
            let t = current.t.t123();
            if loop_order(t, default_base(t)) != order {
                return Err(Error::Geometry(format!(
                    "moving t3 to {target} changes the order of t1, t2, t3 about the base point"
                )));
            }
        }
        let r = rh_map(&current, tol)?;
        points.push(IsomonodromyPoint {
            time: target,
            q: current.q,
            p: current.p,
            x: r.coords.x,
            residual: r.residual_kappa,
        });
    }
    let mut max_defect: f64 = 0.0;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            max_defect = max_defect.max(x_distance(&points[a].x, &points[b].x));
        }
    }
    Ok(IsomonodromyReport {
        points,
        max_defect,
        path_length: length,
        threshold: X_DEFECT_THRESHOLD,
        pass: max_defect < X_DEFECT_THRESHOLD,
    })
}
