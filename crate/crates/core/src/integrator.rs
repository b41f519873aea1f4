//! Embedded Dormand–Prince 5(4) stepping for small complex linear systems.
//!
//! The transfer module only ever integrates smooth pieces: every
//! coefficient jump is a forced mesh node, so the stepper never steps
//! across a discontinuity.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and 4th order weights.
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 - -92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

fn axpy<const N: usize>(y: &[C; N], h: f64, terms: &[(f64, &[C; N])]) -> [C; N] {
    let mut out = *y;
    for (c, k) in terms {
        let s = h * c;
        for i in 0..N {
            out[i] += k[i] * s;
        }
    }
    out
}

/// One Dormand–Prince step: returns the 5th order update and the
/// embedded error estimate.
fn step<const N: usize, F>(f: &mut F, x: f64, y: &[C; N], h: f64) -> ([C; N], [C; N])
where
    F: FnMut(f64, &[C; N]) -> [C; N],
{
    let k1 = f(x, y);
    let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        x + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        x + h,
        &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y5 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(x + h, &y5);
    let mut err = [C::new(0.0, 0.0); N];
    for i in 0..N {
        err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
    }
    (y5, err)
}

/// Adaptive integration of `y' = f(x, y)` from `a` to `b`.
///
/// `outputs` (increasing, inside `[a, b]`) are hit exactly and reported to
/// `sink`; `mesh`, when given, collects every accepted step end point so
/// the same discretization can be replayed with [`integrate_on_mesh`].
pub fn integrate<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    y0: [C; N],
    h_max: f64,
    tol: Tolerance,
    outputs: &[f64],
    sink: &mut dyn FnMut(f64, &[C; N]),
    mut mesh: Option<&mut Vec<f64>>,
) -> Result<[C; N]>
where
    F: FnMut(f64, &[C; N]) -> [C; N],
{
    let span = b - a;
    if span <= 0.0 {
        return Ok(y0);
    }
    let h_max = h_max.min(span);
    let mut x = a;
    let mut y = y0;
    let mut h = (span / 8.0).min(h_max);
    let mut next_out = outputs.iter().copied().filter(|&o| o > a && o <= b).peekable();
    let min_step = 1e-14 * a.abs().max(b.abs()).max(1.0);
    while x < b {
        let target = next_out.peek().copied().unwrap_or(b);
        let mut hs = h.min(target - x);
        // Avoid leaving a sliver before the target.
        if target - (x + hs) < 1e-3 * hs {
            hs = target - x;
        }
        if hs < min_step && target - x >= min_step {
            return Err(Error::StepUnderflow { x });
        }
        let (y_new, err) = step(&mut f, x, &y, hs);
        let mut e = 0.0f64;
        for i in 0..N {
            let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            e = e.max(err[i].norm() / sc);
        }
        if !e.is_finite() {
            if y_new.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) && hs <= min_step {
                return Err(Error::NonFinite { x });
            }
            h = hs * 0.1;
            continue;
        }
        if e <= 1.0 {
            let reached_target = hs == target - x;
            x = if reached_target { target } else { x + hs };
            y = y_new;
            if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::NonFinite { x });
            }
            if let Some(m) = mesh.as_deref_mut() {
                m.push(x);
            }
            if reached_target && next_out.peek().is_some() {
                sink(x, &y);
                next_out.next();
            }
            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            // A step shortened to land on a target says nothing about h.
            if !(reached_target && hs < h) {
                h = (hs * fac).min(h_max);
            }
        } else {
            h = hs * (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            if h < min_step {
                return Err(Error::StepUnderflow { x });
            }
        }
    }
    Ok(y)
}

/// Replays Dormand–Prince steps on a fixed mesh `x0 < x1 < ...`.
pub fn integrate_on_mesh<const N: usize, F>(mut f: F, mesh: &[f64], y0: [C; N]) -> [C; N]
where
    F: FnMut(f64, &[C; N]) -> [C; N],
{
    let mut y = y0;
    for w in mesh.windows(2) {
        y = step(&mut f, w[0], &y, w[1] - w[0]).0;
    }
    y
}
