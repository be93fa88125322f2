//! Adaptive Dormand-Prince 5(4) integrator for complex-valued systems along
//! a real parameter (arclength of a path in the complex plane).

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    /// Local error bound per step, used both as absolute and relative scale.
    pub tol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Dopri5Options {
    pub fn with_tol(tol: f64) -> Self {
        Dopri5Options {
            tol,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl StepStats {
    pub fn merge(&mut self, other: StepStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State<const N: usize> = [Complex64; N];

fn comb<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    std::array::from_fn(|i| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        y[i] + acc * h
    })
}

fn finite<const N: usize>(y: &State<N>) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Integrates `y' = f(s, y)` from `s0` to `s1 >= s0`. `f` may fail (the
/// error is propagated); a non-finite value is treated as a step rejection.
/// `observe` runs after every accepted step and may abort the integration.
pub fn dopri5<const N: usize, F, O>(
    mut f: F,
    s0: f64,
    s1: f64,
    y0: State<N>,
    opts: &Dopri5Options,
    mut observe: O,
) -> Result<(State<N>, StepStats)>
where
    F: FnMut(f64, &State<N>) -> Result<State<N>>,
    O: FnMut(f64, &State<N>) -> Result<()>,
{
    let mut stats = StepStats::default();
    let span = s1 - s0;
    if span <= 0.0 {
        return Ok((y0, stats));
    }
    let tol = opts.tol;
    let mut s = s0;
    let mut y = y0;
    let mut k1 = f(s, &y)?;
    stats.evaluations += 1;
    let mut h = opts
        .h_init
        .unwrap_or_else(|| {
            let ynorm = y.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
            let fnorm = k1.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-10);
            0.01 * (ynorm / fnorm) * tol.powf(0.2).max(1e-3)
        })
        .min(span)
        .min(opts.h_max);
    let h_min = 1e-14 * span.max(1.0);

    while s < s1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Step { arclength: s });
        }
        let last = s + h >= s1;
        if last {
            h = s1 - s;
        }
        let k2 = f(s + C2 * h, &comb(&y, h, &[(A21, &k1)]))?;
        let k3 = f(s + C3 * h, &comb(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(s + C4 * h, &comb(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(
            s + C5 * h,
            &comb(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            s + h,
            &comb(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = comb(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(s + h, &y_new)?;
        stats.evaluations += 6;

        let mut err: f64 = 0.0;
        let mut ok = finite(&y_new) && finite(&k7);
        if ok {
            for i in 0..N {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                    * h;
                let sc = tol + tol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / sc);
            }
            ok = err.is_finite();
        }

        if ok && err <= 1.0 {
            s = if last { s1 } else { s + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            observe(s, &y)?;
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(opts.h_max);
        } else {
            stats.rejected += 1;
            let factor = if ok { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= factor;
            if h < h_min {
                return Err(Error::Step { arclength: s });
            }
        }
    }
    Ok((y, stats))
}
