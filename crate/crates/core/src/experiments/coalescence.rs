//! Flowing `t_k -> t_j` and comparing the global coordinate `x_i` with
//! `-2 cos(pi sqrt(Delta))` at the current `(q, p)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::backlund::{s_apply, ExtendedState, TimeConfig};
use crate::error::{Error, Result};
use crate::fuchsian::coalesce::{discriminant, predicted_trace, Triple};
use crate::hamiltonians::flow::flow;
use crate::monodromy::{default_base, loop_order, rh_map, x_distance};
use crate::scalar::to_exact;
use crate::weyl::Kappa;

type C = Complex64;

/// Snapshots closer than this across consecutive rungs count as settled.
pub const DRIFT_THRESHOLD: f64 = 1e-3;
/// Distance (relative to `1 + |t_i - t_j|`) below which a rung counts as
/// leaving the chart: `q` near `t_i` or `t_j`, `p` near 0 or beyond the
/// inverse distance, `q + k0/p` near `t_i` or `t_j`.
pub const ACCUMULATION_GUARD: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rung {
    pub epsilon: f64,
    pub t: [C; 3],
    pub q: C,
    pub p: C,
    pub delta: C,
    pub x_i: C,
    pub predicted: C,
    /// `|x_i + 2 cos(pi sqrt(Delta))|`.
    pub difference: f64,
    /// `|x - x(start)|`, constancy along the flow.
    pub isomonodromy_defect: f64,
    /// `D = -t_ij Delta` in exact arithmetic at the snapshot.
    pub exact_d_identity: bool,
    /// `Delta(s0(snapshot)) = Delta(snapshot)` in exact arithmetic.
    pub exact_s0_invariance: bool,
    /// Drift of `(q, p)` since the previous rung.
    pub drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalescenceReport {
    pub triple: (usize, usize, usize),
    /// `1 - k_j - k_k` is not real.
    pub generic: bool,
    pub rungs: Vec<Rung>,
    /// Why the ladder stopped early, if it did.
    pub stopped: Option<String>,
    /// Differences decrease along the ladder.
    pub monotone: bool,
    /// Least-squares slope of `log difference` against `log epsilon`.
    pub slope: Option<f64>,
    /// Heuristic: the last two snapshots moved by less than the drift
    /// threshold while satisfying the chart conditions.
    pub settled: bool,
}

fn accumulation_check(state: &ExtendedState<C>, triple: Triple) -> Result<()> {
    let (i, j, _) = triple.indices();
    let (ti, tj) = (*state.t.get(i).expect("finite"), *state.t.get(j).expect("finite"));
    let scale = ACCUMULATION_GUARD * (1.0 + (ti - tj).norm());
    let fail = |reason: String| Err(Error::Accumulation { rung: 0, reason });
    for (label, t) in [(i, ti), (j, tj)] {
        if (state.q - t).norm() < scale {
            return fail(format!("q approaches t{label}"));
        }
    }
    if state.p.norm() < scale {
        return fail("p approaches 0".into());
    }
    if state.p.norm() > 1.0 / scale {
        return fail("p grows without bound".into());
    }
    let shifted = state.q + state.kappa.get(0) / state.p;
    for (label, t) in [(i, ti), (j, tj)] {
        if (shifted - t).norm() < scale {
            return fail(format!("q + k0/p approaches t{label}"));
        }
    }
    Ok(())
}

/// Snapshot in exact arithmetic; `k4` is recomputed from the Fuchs relation.
fn exact_snapshot(state: &ExtendedState<C>) -> Result<ExtendedState<crate::scalar::ExactScalar>> {
    let k = state.kappa.as_array();
    let kappa = Kappa::from_k0_to_k3(to_exact(&k[0])?, to_exact(&k[1])?, to_exact(&k[2])?, to_exact(&k[3])?);
    let t = state.t.t123();
    let t = TimeConfig::with_infinity([to_exact(&t[0])?, to_exact(&t[1])?, to_exact(&t[2])?])?;
    ExtendedState::new(kappa, t, to_exact(&state.q)?, to_exact(&state.p)?)
}

fn exact_checks(state: &ExtendedState<C>, triple: Triple) -> Result<(bool, bool)> {
    let ex = exact_snapshot(state)?;
    let (i, j, _) = triple.indices();
    let tij = ex.t.get(i).expect("finite").clone() - ex.t.get(j).expect("finite").clone();
    let (delta, d) = discriminant(&ex, triple)?;
    let identity = d == -(tij * delta.clone());
    let invariant = match s_apply(&ex, 0) {
        Ok(image) => discriminant(&image, triple)?.0 == delta,
        Err(_) => false,
    };
    Ok((identity, invariant))
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in points {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    (den > 0.0).then(|| num / den)
}

/// Moves `t_k` towards `t_j` along the segment joining them, stopping at
/// `|t_k - t_j| = epsilon` for each value of the decreasing ladder, and
/// flows `(q, p)` by the Hamiltonian of `t_k` between rungs.
pub fn coalescence_flow(state: &ExtendedState<C>, j: usize, k: usize, ladder: &[f64], tol: f64) -> Result<CoalescenceReport> {
    let triple = Triple::merging(j, k)?;
    let (i, _, _) = triple.indices();
    let tj = *state.t.get(j).ok_or(Error::IndexOutOfRange(j))?;
    let tk0 = *state.t.get(k).ok_or(Error::IndexOutOfRange(k))?;
    let gap = (tk0 - tj).norm();
    if ladder.windows(2).any(|w| w[1] >= w[0]) || ladder.iter().any(|e| !(*e > 0.0 && *e <= gap)) {
        return Err(Error::InvalidParameters(format!(
            "epsilon ladder must decrease within (0, |t{k} - t{j}| = {gap}]"
        )));
    }
    let unit = (tk0 - tj) / gap;
    let generic = (C::new(1.0, 0.0) - state.kappa.get(j) - state.kappa.get(k)).im.abs() > 1e-12;
    let start = rh_map(state, tol)?;
    let order = loop_order(state.t.t123(), default_base(state.t.t123()));
    let mut current = state.clone();
    let mut rungs: Vec<Rung> = Vec::new();
    let mut stopped = None;
    for (n, &eps) in ladder.iter().enumerate() {
        let from = *current.t.get(k).expect("finite");
        let target = tj + unit * eps;
        let step = flow(&current, k, &[from, target], tol)
            .and_then(|traj| traj.end_state(&current))
            .and_then(|st| {
                accumulation_check(&st, triple).map_err(|e| match e {
                    Error::Accumulation { reason, .. } => Error::Accumulation { rung: n, reason },
                    other => other,
                })?;
                Ok(st)
            });
        let next = match step {
            Ok(st) => st,
            Err(e) => {
                stopped = Some(format!("rung {n} (epsilon = {eps:e}): {e}"));
                break;
            }
        };
        let t_next = next.t.t123();
        if loop_order(t_next, default_base(t_next)) != order {
            stopped = Some(format!(
                "rung {n} (epsilon = {eps:e}): the order of t1, t2, t3 about the base point changed"
            ));
            break;
        }
        let r = match rh_map(&next, tol) {
            Ok(r) => r,
            Err(e) => {
                stopped = Some(format!("rung {n} (epsilon = {eps:e}): {e}"));
                break;
            }
        };
        let (delta, _) = discriminant(&next, triple)?;
        let predicted = predicted_trace(delta);
        let x_i = r.coords.x[i - 1];
        let (exact_d_identity, exact_s0_invariance) = exact_checks(&next, triple)?;
        let drift = rungs
            .last()
            .map(|prev| (next.q - prev.q).norm().max((next.p - prev.p).norm()));
        rungs.push(Rung {
            epsilon: eps,
            t: *next.t.t123(),
            q: next.q,
            p: next.p,
            delta,
            x_i,
            predicted,
            difference: (x_i - predicted).norm(),
            isomonodromy_defect: x_distance(&r.coords.x, &start.coords.x),
            exact_d_identity,
            exact_s0_invariance,
            drift,
        });
        current = next;
    }
    let monotone = rungs.len() >= 2 && rungs.windows(2).all(|w| w[1].difference < w[0].difference);
    let pts: Vec<(f64, f64)> = rungs
        .iter()
        .filter(|r| r.difference > 0.0)
        .map(|r| (r.epsilon.ln(), r.difference.ln()))
        .collect();
    let settled = rungs.last().and_then(|r| r.drift).is_some_and(|d| d < DRIFT_THRESHOLD);
    Ok(CoalescenceReport {
        triple: triple.indices(),
        generic,
        rungs,
        stopped,
        monotone,
        slope: slope(&pts),
        settled,
    })
}
