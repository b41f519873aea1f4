//! Sign-change bracketing on refined grids, and bisection.

use crate::error::Result;

pub const INITIAL_GRID: usize = 512;
pub const GRID_CAP: usize = 1 << 16;

/// A bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign (or one of
/// them exactly zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub a: f64,
    pub b: f64,
    pub fa: f64,
    pub fb: f64,
}

fn sign_changes(xs: &[f64], fs: &[f64]) -> Vec<Bracket> {
    let mut out = Vec::new();
    for i in 0..xs.len() - 1 {
        let (fa, fb) = (fs[i], fs[i + 1]);
        // A grid value that is exactly zero belongs to the bracket on its left.
        if (fa < 0.0 && fb >= 0.0) || (fa > 0.0 && fb <= 0.0) || (i == 0 && fa == 0.0) {
            out.push(Bracket { a: xs[i], b: xs[i + 1], fa, fb });
        }
    }
    out
}

/// Brackets every sign change of `f` on `[lo, hi]`.
///
/// Starts from [`INITIAL_GRID`] points and halves the spacing until two
/// consecutive refinements add no sign change, or the grid reaches
/// [`GRID_CAP`] points. Sign changes narrower than the final spacing can
/// be missed.
pub fn bracket_sign_changes<F>(mut f: F, lo: f64, hi: f64) -> Result<Vec<Bracket>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut n = INITIAL_GRID;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let mut fs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut found = sign_changes(&xs, &fs);
    let mut quiet = 0;
    while quiet < 2 && 2 * n - 1 <= GRID_CAP {
        let mut nx = Vec::with_capacity(2 * n - 1);
        let mut nf = Vec::with_capacity(2 * n - 1);
        for i in 0..n - 1 {
            nx.push(xs[i]);
            nf.push(fs[i]);
            let m = 0.5 * (xs[i] + xs[i + 1]);
            nx.push(m);
            nf.push(f(m)?);
        }
        nx.push(xs[n - 1]);
        nf.push(fs[n - 1]);
        xs = nx;
        fs = nf;
        n = xs.len();
        let refined = sign_changes(&xs, &fs);
        quiet = if refined.len() > found.len() { 0 } else { quiet + 1 };
        found = refined;
    }
    Ok(found)
}

/// Bisects a bracket until its width is below `xtol` (or the midpoint
/// stops moving).
pub fn bisect<F>(mut f: F, br: Bracket, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let Bracket { mut a, mut b, mut fa, fb } = br;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// All sign-change roots of `f` on `[lo, hi]`, sorted.
pub fn find_roots<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let brackets = bracket_sign_changes(&mut f, lo, hi)?;
    brackets.into_iter().map(|br| bisect(&mut f, br, xtol)).collect()
}
