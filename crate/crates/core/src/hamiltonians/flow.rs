//! Numerical flows of the three-time Hamiltonian system along a polyline in
//! one time variable, and the PVI residual along a single-time trajectory.

use num_complex::Complex64;
use serde::Serialize;

use super::h3_grad;
use crate::backlund::{ExtendedState, TimeConfig};
use crate::error::{Error, Result};
use crate::integrate::{dopri5, Dopri5Options, StepStats};
use crate::weyl::Kappa;

/// Trajectories are abandoned once `|q|` or `|p|` exceeds this.
pub const BLOW_UP: f64 = 1e8;
/// Fraction of the initial minimal distance between time points that the
/// moving point may not cross towards another one.
pub const GUARD_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub time: Complex64,
    pub q: Complex64,
    pub p: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub tol: f64,
    /// Which of `t1, t2, t3` moves.
    pub moving: usize,
    /// Time points at the start of the flow.
    pub t_start: [Complex64; 3],
    pub path_length: f64,
    pub stats: StepStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn start(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// Time points at sample `idx`.
    pub fn times_at(&self, idx: usize) -> [Complex64; 3] {
        let mut t = self.meta.t_start;
        t[self.meta.moving - 1] = self.samples[idx].time;
        t
    }

    /// State at the end of the flow, keeping `kappa` from `initial`.
    pub fn end_state(&self, initial: &ExtendedState<Complex64>) -> Result<ExtendedState<Complex64>> {
        let last = self.samples.len() - 1;
        let t = TimeConfig::with_infinity(self.times_at(last))?;
        ExtendedState::new(initial.kappa.clone(), t, self.end().q, self.end().p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_time,im_time,re_q,im_q,re_p,im_p\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e}\n",
                s.time.re, s.time.im, s.q.re, s.q.im, s.p.re, s.p.im
            ));
        }
        out
    }

    pub fn meta_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tol": self.meta.tol,
            "moving": self.meta.moving,
            "t_start": self.meta.t_start.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "path_length": self.meta.path_length,
            "samples": self.samples.len(),
            "steps": self.meta.stats,
        })
    }
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    let u = if len2 == 0.0 {
        0.0
    } else {
        (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0)
    };
    ((a + d * u - z).norm(), u * len2.sqrt())
}

/// Flows `(q, p)` under the Hamiltonian `h_m` while `t_m` follows the
/// polyline `path` (whose first point must be the current `t_m`). Requires
/// `t4 = infinity`.
pub fn flow(state: &ExtendedState<Complex64>, moving: usize, path: &[Complex64], tol: f64) -> Result<Trajectory> {
    if !(1..=3).contains(&moving) {
        return Err(Error::IndexOutOfRange(moving));
    }
    if !state.t.t4().is_infinite() {
        return Err(Error::FiniteT4);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameters(format!("tolerance must be positive, got {tol}")));
    }
    let t0 = *state.t.t123();
    let start = *path
        .first()
        .ok_or_else(|| Error::InvalidParameters("empty time path".into()))?;
    let scale = t0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if (start - t0[moving - 1]).norm() > 1e-12 * scale {
        return Err(Error::InvalidParameters(format!(
            "path starts at {start} but t{moving} = {}",
            t0[moving - 1]
        )));
    }
    let mut min_dist = f64::INFINITY;
    for a in 0..3 {
        for b in a + 1..3 {
            min_dist = min_dist.min((t0[a] - t0[b]).norm());
        }
    }
    let guard = GUARD_FRACTION * min_dist;

    // Geometry check of the whole path before integrating.
    let mut travelled = 0.0;
    for w in path.windows(2) {
        for (idx, other) in t0.iter().enumerate() {
            if idx + 1 == moving {
                continue;
            }
            let (d, along) = segment_distance(w[0], w[1], *other);
            if d < guard {
                return Err(Error::Singularity {
                    arclength: travelled + along,
                    reason: format!("t{moving} comes within {d:.3e} of t{}", idx + 1),
                });
            }
        }
        travelled += (w[1] - w[0]).norm();
    }

    let kappa = &state.kappa;
    let mut samples = vec![Sample {
        time: start,
        q: state.q,
        p: state.p,
    }];
    let mut stats = StepStats::default();
    let mut y = [state.q, state.p];
    let mut offset = 0.0;
    let opts = Dopri5Options::with_tol(tol);
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        let dir = (b - a) / len;
        let times = |s: f64| {
            let mut t = t0;
            t[moving - 1] = a + dir * s;
            t
        };
        let rhs = |s: f64, y: &[Complex64; 2]| {
            let (dq, dp) = h3_grad(moving, &y[0], &y[1], &times(s), kappa)?;
            Ok([dp * dir, -dq * dir])
        };
        let observe = |s: f64, y: &[Complex64; 2]| {
            let arclength = offset + s;
            if !(y[0].norm() < BLOW_UP && y[1].norm() < BLOW_UP) {
                return Err(Error::Singularity {
                    arclength,
                    reason: format!("|q| or |p| exceeded {BLOW_UP:e}"),
                });
            }
            let t = times(s);
            for (idx, ti) in t.iter().enumerate() {
                if (y[0] - ti).norm() < 1e-10 * scale {
                    return Err(Error::Singularity {
                        arclength,
                        reason: format!("q reached t{}", idx + 1),
                    });
                }
            }
            samples.push(Sample {
                time: t[moving - 1],
                q: y[0],
                p: y[1],
            });
            Ok(())
        };
        let (end, st) = dopri5(rhs, 0.0, len, y, &opts, observe).map_err(|e| match e {
            Error::Step { arclength } => Error::Step {
                arclength: arclength + offset,
            },
            other => other,
        })?;
        y = end;
        stats.merge(st);
        offset += len;
    }
    Ok(Trajectory {
        samples,
        meta: TrajectoryMeta {
            tol,
            moving,
            t_start: t0,
            path_length: offset,
            stats,
        },
    })
}

/// Defect `q_xx - RHS` of PVI at one point, given `q, q_x, q_xx`.
pub fn pvi_defect_at(q: Complex64, qx: Complex64, qxx: Complex64, x: Complex64, kappa: &Kappa<Complex64>) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let [_, k1, k2, k3, k4] = *kappa.as_array();
    let (q1, qmx, x1) = (q - one, q - x, x - one);
    let first = 0.5 * (one / q + one / q1 + one / qmx) * qx * qx;
    let second = -(one / x + one / x1 + one / qmx) * qx;
    let bracket = k4 * k4 - k1 * k1 * x / (q * q) + k2 * k2 * x1 / (q1 * q1) + (one - k3 * k3) * x * x1 / (qmx * qmx);
    let third = q * q1 * qmx / (2.0 * x * x * x1 * x1) * bracket;
    qxx - (first + second + third)
}

/// `(q_x, q_xx)` from the single-time Hamiltonian vector field; `q_xx` by
/// the chain rule along the flow.
pub fn single_time_derivatives(q: Complex64, p: Complex64, x: Complex64, kappa: &Kappa<Complex64>) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let [k0, k1, k2, k3, k4] = *kappa.as_array();
    let den = x * (x - one);
    let den_x = 2.0 * x - one;
    let a = q * (q - one) * (q - x);
    let a_q = (q - one) * (q - x) + q * (q - x) + q * (q - one);
    let a_x = -q * (q - one);
    let b = (k3 - one) * q * (q - one) + k1 * (q - one) * (q - x) + k2 * q * (q - x);
    let b_q = (k3 - one) * (2.0 * q - one) + k1 * (2.0 * q - one - x) + k2 * (2.0 * q - x);
    let b_x = -k1 * (q - one) - k2 * q;
    let c_q = k0 * (k0 + k4);
    let qx = (2.0 * a * p - b) / den;
    let px = -(a_q * p * p - b_q * p + c_q) / den;
    let g_p = 2.0 * a / den;
    let g_q = (2.0 * a_q * p - b_q) / den;
    let g_x = (2.0 * a_x * p - b_x) / den - (2.0 * a * p - b) * den_x / (den * den);
    (qx, g_x + g_q * qx + g_p * px)
}

/// Maximal PVI defect over the samples of a single-time trajectory
/// (`t = (0, 1, x)`, `x = t3` moving).
pub fn pvi_residual(traj: &Trajectory, kappa: &Kappa<Complex64>) -> Result<f64> {
    let t = traj.meta.t_start;
    if traj.meta.moving != 3 || t[0] != Complex64::new(0.0, 0.0) || t[1] != Complex64::new(1.0, 0.0) {
        return Err(Error::InvalidParameters(
            "PVI residual needs t = (0, 1, x) with x moving".into(),
        ));
    }
    if traj.samples.len() < 5 {
        return Err(Error::InvalidParameters(format!(
            "PVI residual needs at least 5 samples, got {}",
            traj.samples.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for s in &traj.samples {
        let (qx, qxx) = single_time_derivatives(s.q, s.p, s.time, kappa);
        let d = pvi_defect_at(s.q, qx, qxx, s.time, kappa).norm();
        if !d.is_finite() {
            return Err(Error::Pole(format!("PVI defect not finite at x = {}", s.time)));
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state() -> ExtendedState<Complex64> {
        let kappa = Kappa::from_k0_to_k3(c(0.2, 0.1), c(0.3, -0.1), c(-0.2, 0.05), c(0.1, 0.2));
        let t = TimeConfig::normalized(c(2.0, 0.5)).unwrap();
        ExtendedState::new(kappa, t, c(1.3, -0.4), c(0.4, 0.2)).unwrap()
    }

    #[test]
    fn zero_length_path_is_initial_point() {
        let st = state();
        let tr = flow(&st, 3, &[c(2.0, 0.5)], 1e-9).unwrap();
        assert_eq!(tr.samples.len(), 1);
        assert_eq!(tr.end().q, st.q);
    }

    #[test]
    fn forward_then_back_returns() {
        let st = state();
        let path = [c(2.0, 0.5), c(2.5, 0.8), c(2.0, 0.5)];
        let tr = flow(&st, 3, &path, 1e-10).unwrap();
        assert!((tr.end().q - st.q).norm() < 1e-9);
        assert!((tr.end().p - st.p).norm() < 1e-9);
    }

    #[test]
    fn path_through_fixed_point_is_rejected() {
        let st = state();
        let res = flow(&st, 3, &[c(2.0, 0.5), c(1.0, 0.0)], 1e-9);
        assert!(matches!(res, Err(Error::Singularity { .. })));
        let res = flow(&st, 3, &[c(2.1, 0.5)], 1e-9);
        assert!(matches!(res, Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn pvi_defect_without_derivatives() {
        let st = state();
        let (q, x) = (st.q, c(2.0, 0.5));
        let d = pvi_defect_at(q, c(0.0, 0.0), c(0.0, 0.0), x, &st.kappa);
        let [_, k1, k2, k3, k4] = *st.kappa.as_array();
        let one = c(1.0, 0.0);
        let rest = q * (q - one) * (q - x) / (2.0 * x * x * (x - one) * (x - one))
            * (k4 * k4 - k1 * k1 * x / (q * q)
                + k2 * k2 * (x - one) / ((q - one) * (q - one))
                + (one - k3 * k3) * x * (x - one) / ((q - x) * (q - x)));
        assert!((d + rest).norm() < 1e-14);
    }
}
