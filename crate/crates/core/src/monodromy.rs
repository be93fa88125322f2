//! Numerical Riemann-Hilbert map. The normal form of the three-point
//! equation is transported around loops based at a point above all `t_i`;
//! the monodromy matrices give local traces, the global coordinates
//! `x_i = Tr(M_j M_k)` and the cubic surface residual.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::backlund::{ExtendedState, TimeConfig};
use crate::error::{Error, Result};
use crate::fuchsian::{build_coeff3, normalize3, FuchsianCoeffs};
use crate::integrate::{dopri5, Dopri5Options, StepStats};
use crate::weyl::{theta_from_traces, theta_of_kappa, LocalTraces, ThetaVec};

type C = Complex64;

/// Fraction of the minimal pairwise distance used as guard radius.
pub const GUARD_FRACTION: f64 = 0.1;
/// Ratio between the transport tolerance and the user tolerance.
pub const INNER_TOL_FACTOR: f64 = 1e-3;
/// Radius of the loop about infinity relative to the largest point.
pub const OUTER_RADIUS_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Piece {
    Segment { a: C, b: C },
    /// Arc `center + radius e^{i(start + s)}`, `s` from 0 to `sweep`.
    Arc { center: C, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => (b - a).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point and unit tangent at arclength `s`.
    pub fn at(&self, s: f64) -> (C, C) {
        match *self {
            Piece::Segment { a, b } => {
                let d = (b - a) / (b - a).norm();
                (a + d * s, d)
            }
            Piece::Arc { center, radius, start, sweep } => {
                let sign = sweep.signum();
                let phi = start + sign * s / radius;
                let e = C::from_polar(1.0, phi);
                (center + e * radius, C::i() * e * sign)
            }
        }
    }

    pub fn start_point(&self) -> C {
        self.at(0.0).0
    }

    pub fn end_point(&self) -> C {
        match *self {
            Piece::Segment { b, .. } => b,
            Piece::Arc { center, radius, start, sweep } => center + C::from_polar(radius, start + sweep),
        }
    }

    /// Polyline through the piece, fine enough for winding numbers.
    fn polyline(&self) -> Vec<C> {
        match *self {
            Piece::Segment { a, b } => vec![a, b],
            Piece::Arc { sweep, .. } => {
                let n = ((sweep.abs() / TAU) * 256.0).ceil().max(8.0) as usize;
                let len = self.length();
                (0..=n).map(|m| self.at(len * m as f64 / n as f64).0).collect()
            }
        }
    }
}

/// What a loop goes around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LoopTarget {
    /// One of `t1, t2, t3`.
    Point(usize),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Winding {
    pub label: String,
    pub at: C,
    pub winding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopPath {
    pub base_point: C,
    pub pieces: Vec<Piece>,
    pub encircles: LoopTarget,
    /// Winding numbers about `t1, t2, t3, q`.
    pub windings: Vec<Winding>,
    /// Smallest distance from the path to any of `t1, t2, t3, q`.
    pub clearance: f64,
}

impl LoopPath {
    pub fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    pub fn is_closed(&self) -> bool {
        let (Some(first), Some(last)) = (self.pieces.first(), self.pieces.last()) else {
            return true;
        };
        let scale = 1.0 + self.base_point.norm();
        (first.start_point() - self.base_point).norm() < 1e-12 * scale
            && (last.end_point() - self.base_point).norm() < 1e-9 * scale
    }
}

fn winding_number(pieces: &[Piece], z: C) -> f64 {
    let mut total = 0.0;
    for piece in pieces {
        let pts = piece.polyline();
        for w in pts.windows(2) {
            total += ((w[1] - z) / (w[0] - z)).arg();
        }
    }
    total / TAU
}

fn clearance(pieces: &[Piece], points: &[C]) -> f64 {
    let mut best = f64::INFINITY;
    for piece in pieces {
        match *piece {
            Piece::Segment { a, b } => {
                for &z in points {
                    best = best.min(segment_distance(a, b, z).0);
                }
            }
            Piece::Arc { .. } => {
                for p in piece.polyline() {
                    for &z in points {
                        best = best.min((p - z).norm());
                    }
                }
            }
        }
    }
    best
}

/// Distance from `z` to the segment `[a, b]` and the arclength of the
/// closest point.
fn segment_distance(a: C, b: C, z: C) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    let u = if len2 == 0.0 {
        0.0
    } else {
        (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0)
    };
    ((a + d * u - z).norm(), u * len2.sqrt())
}

/// Segment from `a` to `b` that goes around `q` on a small arc if needed;
/// fails if it comes too close to any of `avoid`.
fn routed_segment(a: C, b: C, q: C, detour: f64, avoid: &[(String, C)], guard: f64) -> Result<Vec<Piece>> {
    for (label, z) in avoid {
        let (d, _) = segment_distance(a, b, *z);
        if d < guard {
            return Err(Error::Geometry(format!(
                "segment {a} -> {b} passes within {d:.3e} of {label} (guard {guard:.3e})"
            )));
        }
    }
    let (d, along) = segment_distance(a, b, q);
    if d >= detour {
        return Ok(vec![Piece::Segment { a, b }]);
    }
    let len = (b - a).norm();
    let dir = (b - a) / len;
    let half = (detour * detour - d * d).sqrt();
    let (u1, u2) = (along - half, along + half);
    if u1 <= 0.0 || u2 >= len {
        return Err(Error::Geometry(format!("segment endpoint {a} or {b} too close to q")));
    }
    let (p1, p2) = (a + dir * u1, a + dir * u2);
    let start = (p1 - q).arg();
    let mut sweep = (p2 - q).arg() - start;
    if sweep > PI {
        sweep -= TAU;
    } else if sweep <= -PI {
        sweep += TAU;
    }
    Ok(vec![
        Piece::Segment { a, b: p1 },
        Piece::Arc {
            center: q,
            radius: detour,
            start,
            sweep,
        },
        Piece::Segment { a: p2, b },
    ])
}

/// Base point depending on `t1, t2, t3` only: above all of them at a
/// distance comparable to their spread.
pub fn default_base(t: &[C; 3]) -> C {
    let mut spread: f64 = 0.0;
    for a in 0..3 {
        for b in a + 1..3 {
            spread = spread.max((t[a] - t[b]).norm());
        }
    }
    let re = (t[0].re + t[1].re + t[2].re) / 3.0;
    let top = t.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
    C::new(re, top + spread.max(1.0))
}

/// Order in which the loops compose to the inverse of the loop about
/// infinity: by angle about the base, starting from the upward direction.
pub fn loop_order(t: &[C; 3], base: C) -> [usize; 3] {
    let key = |z: C| ((z - base).arg() - PI / 2.0).rem_euclid(TAU);
    let mut idx = [1usize, 2, 3];
    idx.sort_by(|&a, &b| key(t[a - 1]).total_cmp(&key(t[b - 1])));
    idx
}

/// Guard radius `0.1 * min distance` among `t1, t2, t3, q, base`.
pub fn guard_radius(t: &[C; 3], q: C, base: C) -> f64 {
    let pts = [t[0], t[1], t[2], q, base];
    let mut m = f64::INFINITY;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            m = m.min((pts[a] - pts[b]).norm());
        }
    }
    GUARD_FRACTION * m
}

/// The loops `gamma_1, gamma_2, gamma_3` about `t_i` and `gamma_4` about
/// infinity, all based at `base`.
pub fn standard_loops(t: &TimeConfig<C>, q: C, base: C) -> Result<[LoopPath; 4]> {
    if !t.t4().is_infinite() {
        return Err(Error::FiniteT4);
    }
    let t = *t.t123();
    if t.iter().any(|z| z.im >= base.im) {
        return Err(Error::Geometry(format!("base point {base} must lie above t1, t2, t3")));
    }
    let guard = guard_radius(&t, q, base);
    if !(guard > 0.0) {
        return Err(Error::Geometry("base point coincides with a singular point".into()));
    }
    let radius = 2.0 * guard;
    let detour = 3.0 * guard;
    let labelled: Vec<(String, C)> = (0..3).map(|m| (format!("t{}", m + 1), t[m])).collect();
    let all = [t[0], t[1], t[2], q];

    let mut loops = Vec::with_capacity(4);
    for i in 1..=3 {
        let center = t[i - 1];
        let start = (base - center).arg();
        let on_circle = center + C::from_polar(radius, start);
        let others: Vec<(String, C)> = labelled.iter().filter(|(_, z)| *z != center).cloned().collect();
        let mut pieces = routed_segment(base, on_circle, q, detour, &others, guard)?;
        pieces.push(Piece::Arc {
            center,
            radius,
            start,
            sweep: TAU,
        });
        pieces.extend(
            routed_segment(base, on_circle, q, detour, &others, guard)?
                .into_iter()
                .rev()
                .map(reverse),
        );
        loops.push(certify(base, pieces, LoopTarget::Point(i), &all, guard)?);
    }

    let big = OUTER_RADIUS_FACTOR * all.iter().chain([&base]).map(|z| z.norm()).fold(1.0, f64::max);
    let top = C::new(base.re, (big * big - base.re * base.re).sqrt());
    let up = routed_segment(base, top, q, detour, &labelled, guard)?;
    let mut pieces = up.clone();
    pieces.push(Piece::Arc {
        center: C::new(0.0, 0.0),
        radius: big,
        start: top.arg(),
        sweep: -TAU,
    });
    pieces.extend(up.into_iter().rev().map(reverse));
    loops.push(certify(base, pieces, LoopTarget::Infinity, &all, guard)?);

    Ok(loops.try_into().expect("four loops"))
}

fn reverse(p: Piece) -> Piece {
    match p {
        Piece::Segment { a, b } => Piece::Segment { a: b, b: a },
        Piece::Arc { center, radius, start, sweep } => Piece::Arc {
            center,
            radius,
            start: start + sweep,
            sweep: -sweep,
        },
    }
}

fn certify(base: C, pieces: Vec<Piece>, target: LoopTarget, points: &[C; 4], guard: f64) -> Result<LoopPath> {
    let labels = ["t1", "t2", "t3", "q"];
    let windings: Vec<Winding> = points
        .iter()
        .zip(labels)
        .map(|(&z, label)| Winding {
            label: label.into(),
            at: z,
            winding: winding_number(&pieces, z),
        })
        .collect();
    for (idx, w) in windings.iter().enumerate() {
        let expected = match target {
            LoopTarget::Point(i) => f64::from(u8::from(idx + 1 == i)),
            LoopTarget::Infinity => -1.0,
        };
        if (w.winding - expected).abs() > 1e-6 {
            return Err(Error::Geometry(format!(
                "loop about {target:?} winds {:.6} times about {} (expected {expected})",
                w.winding, w.label
            )));
        }
    }
    let clearance = clearance(&pieces, points);
    if clearance < guard * (1.0 - 1e-9) {
        return Err(Error::Geometry(format!(
            "loop about {target:?} has clearance {clearance:.3e} below guard {guard:.3e}"
        )));
    }
    let path = LoopPath {
        base_point: base,
        pieces,
        encircles: target,
        windings,
        clearance,
    };
    if !path.is_closed() {
        return Err(Error::Geometry(format!("loop about {target:?} is not closed")));
    }
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monodromy2x2 {
    pub m11: C,
    pub m12: C,
    pub m21: C,
    pub m22: C,
}

impl Monodromy2x2 {
    pub fn new(m11: C, m12: C, m21: C, m22: C) -> Self {
        Monodromy2x2 { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        Self::new(o, z, z, o)
    }

    pub fn det(&self) -> C {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> C {
        self.m11 + self.m22
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)
    }

    /// Largest entrywise difference.
    pub fn dist(&self, o: &Self) -> f64 {
        [self.m11 - o.m11, self.m12 - o.m12, self.m21 - o.m21, self.m22 - o.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.mul(self).mul(&g.inverse())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transport {
    pub matrix: Monodromy2x2,
    pub det_defect: f64,
    pub stats: StepStats,
}

/// Monodromy of `f'' - V1 f' + V2 f = 0` along `path`: the matrix taking
/// the frame `(f, f')` at the base point (identity) to its continuation.
pub fn transport(coeffs: &FuchsianCoeffs<C>, path: &LoopPath, tol: f64) -> Result<Transport> {
    let min_pole = coeffs
        .poles
        .iter()
        .map(|p| clearance(&path.pieces, &[p.at]))
        .fold(f64::INFINITY, f64::min);
    if !(min_pole > 0.0) {
        return Err(Error::Geometry("path runs through a pole".into()));
    }
    let inner = (tol * INNER_TOL_FACTOR).max(1e-14);
    let opts = Dopri5Options::with_tol(inner);
    let mut y = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)];
    let mut stats = StepStats::default();
    let mut offset = 0.0;
    for piece in &path.pieces {
        let len = piece.length();
        let rhs = |s: f64, y: &[C; 4]| {
            let (z, dz) = piece.at(s);
            let (v1, v2) = coeffs.eval(&z);
            // Rows of Y are (f1, f2) and (f1', f2').
            Ok([y[2] * dz, y[3] * dz, (v1 * y[2] - v2 * y[0]) * dz, (v1 * y[3] - v2 * y[1]) * dz])
        };
        let (end, st) = dopri5(rhs, 0.0, len, y, &opts, |_, _| Ok(())).map_err(|e| match e {
            Error::Step { arclength } => Error::Step {
                arclength: arclength + offset,
            },
            other => other,
        })?;
        y = end;
        stats.merge(st);
        offset += len;
    }
    let matrix = Monodromy2x2::new(y[0], y[1], y[2], y[3]);
    let det_defect = (matrix.det() - 1.0).norm();
    if det_defect > 10.0 * tol {
        return Err(Error::Accuracy(format!(
            "det(M) - 1 = {det_defect:.3e} exceeds 10 * tol = {:.3e}",
            10.0 * tol
        )));
    }
    Ok(Transport {
        matrix,
        det_defect,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyData {
    /// `M1, M2, M3` about `t_i` and `M4` about infinity.
    pub matrices: [Monodromy2x2; 4],
    /// Indices in the order for which `M4 M_c M_b M_a = I`.
    pub order: [usize; 3],
    pub base_point: C,
    pub guard: f64,
    pub det_defects: [f64; 4],
    /// `|M4 M_c M_b M_a - I|`.
    pub product_defect: f64,
    /// `|M4 - (M_c M_b M_a)^{-1}|`: the loop about infinity against the
    /// inverse product.
    pub gamma4_agreement: f64,
    pub stats: StepStats,
}

/// Monodromy of the normal form of the three-point equation of `state`.
pub fn monodromy_matrices(state: &ExtendedState<C>, tol: f64) -> Result<MonodromyData> {
    let base = default_base(state.t.t123());
    monodromy_matrices_at(state, base, tol)
}

pub fn monodromy_matrices_at(state: &ExtendedState<C>, base: C, tol: f64) -> Result<MonodromyData> {
    let coeffs = normalize3(&build_coeff3(state)?, state);
    let loops = standard_loops(&state.t, state.q, base)?;
    let mut stats = StepStats::default();
    let mut ms = [Monodromy2x2::identity(); 4];
    let mut dets = [0.0; 4];
    let results: Vec<Result<Transport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = loops
            .iter()
            .map(|l| scope.spawn(|| transport(&coeffs, l, tol)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("transport thread")).collect()
    });
    for (m, r) in results.into_iter().enumerate() {
        let tr = r?;
        ms[m] = tr.matrix;
        dets[m] = tr.det_defect;
        stats.merge(tr.stats);
    }
    let order = loop_order(state.t.t123(), base);
    let prod = ms[order[2] - 1].mul(&ms[order[1] - 1]).mul(&ms[order[0] - 1]);
    let product_defect = ms[3].mul(&prod).dist(&Monodromy2x2::identity());
    let gamma4_agreement = ms[3].dist(&prod.inverse());
    Ok(MonodromyData {
        matrices: ms,
        order,
        base_point: base,
        guard: guard_radius(state.t.t123(), state.q, base),
        det_defects: dets,
        product_defect,
        gamma4_agreement,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceCoords {
    pub x: [C; 3],
    /// Measured local traces `Tr M1 .. Tr M4`.
    pub a: [C; 4],
    pub theta: ThetaVec<C>,
}

/// `x1 = Tr(M2 M3)`, `x2 = Tr(M3 M1)`, `x3 = Tr(M1 M2)`; theta from the
/// measured local traces.
pub fn trace_coords(ms: &[Monodromy2x2; 4]) -> TraceCoords {
    let x = [
        ms[1].mul(&ms[2]).trace(),
        ms[2].mul(&ms[0]).trace(),
        ms[0].mul(&ms[1]).trace(),
    ];
    let a = [ms[0].trace(), ms[1].trace(), ms[2].trace(), ms[3].trace()];
    TraceCoords {
        x,
        a,
        theta: theta_from_traces(&LocalTraces { a }),
    }
}

/// `x1 x2 x3 + x1^2 + x2^2 + x3^2 - th1 x1 - th2 x2 - th3 x3 + th4`.
pub fn cubic_value(x: &[C; 3], th: &ThetaVec<C>) -> C {
    let t = &th.th;
    x[0] * x[1] * x[2] + x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - t[0] * x[0] - t[1] * x[1] - t[2] * x[2] + t[3]
}

pub fn cubic_residual(x: &TraceCoords) -> f64 {
    cubic_value(&x.x, &x.theta).norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhResult {
    pub coords: TraceCoords,
    /// Theta computed from kappa.
    pub theta_kappa: ThetaVec<C>,
    /// Cubic residual with the measured theta.
    pub residual: f64,
    /// Cubic residual with theta from kappa.
    pub residual_kappa: f64,
    /// `|Tr M_i - a_i(kappa)|`.
    pub trace_defects: [f64; 4],
    pub monodromy: MonodromyData,
}

/// The Riemann-Hilbert map `state -> (x1, x2, x3)` with certificates.
pub fn rh_map(state: &ExtendedState<C>, tol: f64) -> Result<RhResult> {
    rh_map_from(state, monodromy_matrices(state, tol)?)
}

pub fn rh_map_at(state: &ExtendedState<C>, base: C, tol: f64) -> Result<RhResult> {
    rh_map_from(state, monodromy_matrices_at(state, base, tol)?)
}

fn rh_map_from(state: &ExtendedState<C>, monodromy: MonodromyData) -> Result<RhResult> {
    let coords = trace_coords(&monodromy.matrices);
    let theta_kappa = theta_of_kappa(&state.kappa);
    let expected = crate::weyl::local_traces(&state.kappa).a;
    let trace_defects = std::array::from_fn(|m| (coords.a[m] - expected[m]).norm());
    Ok(RhResult {
        residual: cubic_residual(&coords),
        residual_kappa: cubic_value(&coords.x, &theta_kappa).norm(),
        coords,
        theta_kappa,
        trace_defects,
        monodromy,
    })
}

/// Largest `|x_i - y_i|`.
pub fn x_distance(a: &[C; 3], b: &[C; 3]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}
