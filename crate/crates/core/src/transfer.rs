//! Fundamental solutions, monodromy and discriminant.
//!
//! `c(·, z)` and `s(·, z)` solve `-y'' + q y = z ω y` with
//! `c(0) = s'(0) = 1`, `c'(0) = s(0) = 0`. They are integrated as a first
//! order system on the pieces between coefficient breakpoints; near the
//! anchor of a power segment the piece is graded geometrically and the
//! innermost sliver is bridged with a first-order Magnus step built from
//! the exact integrals of q and ω.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{PeriodicCoefficients, PiecewiseSegment, SegmentKind, PERIOD};
use crate::error::{Error, Result};
use crate::integrator::{self, Tolerance};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Halvings toward a power anchor before the Magnus sliver takes over.
const GRADING_LEVELS: i32 = 40;

/// Gauss–Legendre panel length used for products of solutions.
const PANEL: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub z: C,
    pub c: C,
    pub s: C,
    pub cp: C,
    pub sp: C,
}

impl Monodromy {
    pub fn det(&self) -> C {
        self.c * self.sp - self.cp * self.s
    }

    /// Δ(z) = (c(2π) + s'(2π)) / 2.
    pub fn half_trace(&self) -> C {
        (self.c + self.sp) * 0.5
    }

    pub fn max_entry(&self) -> f64 {
        [self.c, self.s, self.cp, self.sp]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Scale of the products entering `det`, for relative comparisons.
    pub fn det_scale(&self) -> f64 {
        ((self.c * self.sp).norm() + (self.cp * self.s).norm()).max(1.0)
    }

    fn product(later: &Monodromy, earlier: &Monodromy) -> Monodromy {
        Monodromy {
            z: later.z,
            c: later.c * earlier.c + later.s * earlier.cp,
            s: later.c * earlier.s + later.s * earlier.sp,
            cp: later.cp * earlier.c + later.sp * earlier.cp,
            sp: later.cp * earlier.s + later.sp * earlier.sp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionTrace {
    pub z: C,
    pub grid: Vec<f64>,
    pub c: Vec<C>,
    pub cp: Vec<C>,
    pub s: Vec<C>,
    pub sp: Vec<C>,
}

impl SolutionTrace {
    /// Pointwise `c s' - c' s`.
    pub fn wronskians(&self) -> Vec<C> {
        (0..self.grid.len())
            .map(|i| self.c[i] * self.sp[i] - self.cp[i] * self.s[i])
            .collect()
    }

    pub fn monodromy(&self) -> Monodromy {
        let n = self.grid.len() - 1;
        Monodromy {
            z: self.z,
            c: self.c[n],
            s: self.s[n],
            cp: self.cp[n],
            sp: self.sp[n],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantValue {
    pub z: C,
    pub delta: C,
    pub delta_dot: Option<C>,
}

#[derive(Debug, Clone, Copy)]
enum PieceKind {
    Smooth,
    /// Magnus bridge over a sliver touching a power anchor.
    Sliver,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    q: PiecewiseSegment,
    w: PiecewiseSegment,
    kind: PieceKind,
    h_max: f64,
}

impl Piece {
    fn g(&self, x: f64, z: C) -> C {
        C::new(self.q.value(x), 0.0) - z * self.w.value(x)
    }
}

fn anchor_of(seg: &PiecewiseSegment) -> Option<f64> {
    match seg.kind {
        SegmentKind::Power { anchor, .. } => Some(anchor),
        SegmentKind::Constant(_) => None,
    }
}

fn build_pieces(coeffs: &PeriodicCoefficients) -> Vec<Piece> {
    let nodes = coeffs.mesh_nodes();
    let mut pieces = Vec::new();
    for win in nodes.windows(2) {
        let (a, b) = (win[0], win[1]);
        let mid = 0.5 * (a + b);
        let q = coeffs.q().segments()[coeffs.q().segment_index(mid)];
        let w = coeffs.w().segments()[coeffs.w().segment_index(mid)];
        let near = |p: f64| {
            [anchor_of(&q), anchor_of(&w)]
                .iter()
                .flatten()
                .any(|&anc| (anc - p).abs() <= 1e-12)
        };
        let smooth = |a: f64, b: f64| Piece {
            a,
            b,
            q,
            w,
            kind: PieceKind::Smooth,
            h_max: f64::INFINITY,
        };
        match (near(a), near(b)) {
            (false, false) => pieces.push(smooth(a, b)),
            (left, right) => {
                let (ga, gb) = match (left, right) {
                    (true, true) => (mid, mid),
                    (true, false) => (b, b),
                    _ => (a, a),
                };
                if left {
                    let len = ga - a;
                    let eps = len * 2f64.powi(-GRADING_LEVELS);
                    pieces.push(Piece {
                        a,
                        b: a + eps,
                        q,
                        w,
                        kind: PieceKind::Sliver,
                        h_max: f64::INFINITY,
                    });
                    for k in (0..GRADING_LEVELS).rev() {
                        let lo = a + len * 2f64.powi(-k - 1);
                        let hi = if k == 0 { ga } else { a + len * 2f64.powi(-k) };
                        pieces.push(Piece {
                            h_max: 0.5 * (lo - a),
                            ..smooth(lo, hi)
                        });
                    }
                }
                if right {
                    let len = b - gb;
                    let eps = len * 2f64.powi(-GRADING_LEVELS);
                    for k in 0..GRADING_LEVELS {
                        let lo = if k == 0 { gb } else { b - len * 2f64.powi(-k) };
                        let hi = b - len * 2f64.powi(-k - 1);
                        pieces.push(Piece {
                            h_max: 0.5 * (b - hi),
                            ..smooth(lo, hi)
                        });
                    }
                    pieces.push(Piece {
                        a: b - eps,
                        b,
                        q,
                        w,
                        kind: PieceKind::Sliver,
                        h_max: f64::INFINITY,
                    });
                }
            }
        }
    }
    pieces
}

/// First-order Magnus propagator over a sliver and its z-derivative.
fn sliver_propagator(p: &Piece, z: C) -> ([C; 4], [C; 4]) {
    let eps = p.b - p.a;
    let wi = p.w.integral(p.a, p.b);
    let g = C::new(p.q.integral(p.a, p.b), 0.0) - z * wi;
    let eg = g * eps;
    let ch = ONE + eg * 0.5;
    let sh = ONE + eg / 6.0;
    // Entries in the order (c, s, c', s') of a 2×2 matrix.
    let e = [ch, sh * eps, g * sh, ch];
    let de = [
        C::new(-0.5 * eps * wi, 0.0),
        C::new(-eps * eps * wi / 6.0, 0.0),
        -(ONE + eg / 3.0) * wi,
        C::new(-0.5 * eps * wi, 0.0),
    ];
    (e, de)
}

/// State layout: `[c, c', s, s']` then the z-derivatives in the same order.
fn rhs4(g: C) -> impl Fn(&[C; 4]) -> [C; 4] {
    move |y| [y[1], g * y[0], y[3], g * y[2]]
}

fn apply_matrix(m: &[C; 4], y0: C, y1: C) -> (C, C) {
    (m[0] * y0 + m[1] * y1, m[2] * y0 + m[3] * y1)
}

/// Precomputed integration layout for one set of coefficients.
#[derive(Debug, Clone)]
pub struct Transfer<'a> {
    coeffs: &'a PeriodicCoefficients,
    pieces: Vec<Piece>,
    tol: Tolerance,
}

/// Step meshes recorded by an adaptive run, replayable at other `z`.
#[derive(Debug, Clone)]
pub struct FrozenMesh {
    meshes: Vec<Vec<f64>>,
}

impl<'a> Transfer<'a> {
    pub fn new(coeffs: &'a PeriodicCoefficients) -> Self {
        Self::with_tolerance(coeffs, Tolerance::default())
    }

    pub fn with_tolerance(coeffs: &'a PeriodicCoefficients, tol: Tolerance) -> Self {
        Self {
            coeffs,
            pieces: build_pieces(coeffs),
            tol,
        }
    }

    pub fn coeffs(&self) -> &PeriodicCoefficients {
        self.coeffs
    }

    fn run4(
        &self,
        z: C,
        outputs: &[f64],
        sink: &mut dyn FnMut(f64, &[C; 4]),
        mut record: Option<&mut FrozenMesh>,
    ) -> Result<[C; 4]> {
        let mut y = [ONE, ZERO, ZERO, ONE];
        for p in &self.pieces {
            match p.kind {
                PieceKind::Sliver => {
                    let (e, _) = sliver_propagator(p, z);
                    let (c, cp) = apply_matrix(&e, y[0], y[1]);
                    let (s, sp) = apply_matrix(&e, y[2], y[3]);
                    y = [c, cp, s, sp];
                    // Slivers are ~1e-12 wide: report their end state.
                    for &o in outputs.iter().filter(|&&o| o > p.a && o <= p.b) {
                        sink(o, &y);
                    }
                    if let Some(r) = record.as_deref_mut() {
                        r.meshes.push(Vec::new());
                    }
                }
                PieceKind::Smooth => {
                    let f = |x: f64, y: &[C; 4]| rhs4(p.g(x, z))(y);
                    let lo = outputs.partition_point(|&o| o <= p.a);
                    let hi = outputs.partition_point(|&o| o <= p.b);
                    let mut mesh = vec![p.a];
                    y = integrator::integrate(
                        f,
                        p.a,
                        p.b,
                        y,
                        p.h_max,
                        self.tol,
                        &outputs[lo..hi],
                        sink,
                        record.is_some().then_some(&mut mesh),
                    )?;
                    if let Some(r) = record.as_deref_mut() {
                        r.meshes.push(mesh);
                    }
                }
            }
        }
        Ok(y)
    }

    fn run8(&self, z: C, frozen: Option<&FrozenMesh>) -> Result<[C; 8]> {
        let mut y = [ONE, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ZERO];
        for (i, p) in self.pieces.iter().enumerate() {
            match p.kind {
                PieceKind::Sliver => {
                    let (e, de) = sliver_propagator(p, z);
                    let (c, cp) = apply_matrix(&e, y[0], y[1]);
                    let (s, sp) = apply_matrix(&e, y[2], y[3]);
                    let (dc1, dcp1) = apply_matrix(&e, y[4], y[5]);
                    let (dc2, dcp2) = apply_matrix(&de, y[0], y[1]);
                    let (ds1, dsp1) = apply_matrix(&e, y[6], y[7]);
                    let (ds2, dsp2) = apply_matrix(&de, y[2], y[3]);
                    y = [c, cp, s, sp, dc1 + dc2, dcp1 + dcp2, ds1 + ds2, dsp1 + dsp2];
                }
                PieceKind::Smooth => {
                    let f = |x: f64, y: &[C; 8]| {
                        let g = p.g(x, z);
                        let w = p.w.value(x);
                        [
                            y[1],
                            g * y[0],
                            y[3],
                            g * y[2],
                            y[5],
                            g * y[4] - y[0] * w,
                            y[7],
                            g * y[6] - y[2] * w,
                        ]
                    };
                    y = match frozen {
                        Some(m) => integrator::integrate_on_mesh(f, &m.meshes[i], y),
                        None => integrator::integrate(
                            f,
                            p.a,
                            p.b,
                            y,
                            p.h_max,
                            self.tol,
                            &[],
                            &mut |_, _| {},
                            None,
                        )?,
                    };
                }
            }
        }
        Ok(y)
    }

    pub fn monodromy(&self, z: C) -> Result<Monodromy> {
        let y = self.run4(z, &[], &mut |_, _| {}, None)?;
        Ok(Monodromy {
            z,
            c: y[0],
            cp: y[1],
            s: y[2],
            sp: y[3],
        })
    }

    /// Monodromy and its z-derivative from the variational system.
    pub fn monodromy_with_derivative(&self, z: C) -> Result<(Monodromy, Monodromy)> {
        self.monodromy_with_derivative_on(z, None)
    }

    fn monodromy_with_derivative_on(
        &self,
        z: C,
        frozen: Option<&FrozenMesh>,
    ) -> Result<(Monodromy, Monodromy)> {
        let y = self.run8(z, frozen)?;
        let m = Monodromy {
            z,
            c: y[0],
            cp: y[1],
            s: y[2],
            sp: y[3],
        };
        let dm = Monodromy {
            z,
            c: y[4],
            cp: y[5],
            s: y[6],
            sp: y[7],
        };
        Ok((m, dm))
    }

    pub fn discriminant(&self, z: C) -> Result<DiscriminantValue> {
        let m = self.monodromy(z)?;
        Ok(DiscriminantValue {
            z,
            delta: m.half_trace(),
            delta_dot: None,
        })
    }

    /// Δ and Δ• together (variational system).
    pub fn discriminant_with_derivative(&self, z: C) -> Result<DiscriminantValue> {
        let (m, dm) = self.monodromy_with_derivative(z)?;
        Ok(DiscriminantValue {
            z,
            delta: m.half_trace(),
            delta_dot: Some(dm.half_trace()),
        })
    }

    /// Records the adaptive step meshes chosen at `z`.
    pub fn freeze_mesh(&self, z: C) -> Result<FrozenMesh> {
        let mut frozen = FrozenMesh { meshes: Vec::new() };
        self.run4(z, &[], &mut |_, _| {}, Some(&mut frozen))?;
        Ok(frozen)
    }

    /// Δ and Δ• computed on a frozen mesh. The result is a smooth function
    /// of `z`, which makes it usable under finite differences.
    pub fn discriminant_on_mesh(&self, z: C, mesh: &FrozenMesh) -> Result<DiscriminantValue> {
        let (m, dm) = self.monodromy_with_derivative_on(z, Some(mesh))?;
        Ok(DiscriminantValue {
            z,
            delta: m.half_trace(),
            delta_dot: Some(dm.half_trace()),
        })
    }

    /// Solution values at `grid` (increasing, inside `[0, 2π]`, starting at 0).
    pub fn trace_on(&self, z: C, grid: &[f64]) -> Result<SolutionTrace> {
        let n = grid.len();
        let mut trace = SolutionTrace {
            z,
            grid: grid.to_vec(),
            c: Vec::with_capacity(n),
            cp: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
            sp: Vec::with_capacity(n),
        };
        let mut push = |y: &[C; 4]| {
            trace.c.push(y[0]);
            trace.cp.push(y[1]);
            trace.s.push(y[2]);
            trace.sp.push(y[3]);
        };
        let inner: Vec<f64> = grid.iter().copied().filter(|&x| x > 0.0).collect();
        if grid.first() == Some(&0.0) {
            push(&[ONE, ZERO, ZERO, ONE]);
        }
        let mut collected: Vec<(f64, [C; 4])> = Vec::with_capacity(inner.len());
        let last = self.run4(z, &inner, &mut |x, y| collected.push((x, *y)), None)?;
        // Output points that coincide with piece ends are reported by the
        // following piece start; pick them up from the collected stream or the end state.
        let mut it = collected.into_iter().peekable();
        for &x in &inner {
            match it.peek() {
                Some(&(xo, y)) if xo == x => {
                    push(&y);
                    it.next();
                }
                _ if x == PERIOD => push(&last),
                _ => return Err(Error::Precondition(format!("grid point {x} was not reached"))),
            }
        }
        Ok(trace)
    }

    /// `[∫ c²ω, ∫ c s ω, ∫ s²ω]` over the cell, by Gauss–Legendre panels on
    /// the solution, together with the monodromy.
    pub fn weighted_products(&self, z: C) -> Result<([C; 3], Monodromy)> {
        let (nodes, weights) = gauss_legendre_8();
        let mut acc = [ZERO; 3];
        let mut y = [ONE, ZERO, ZERO, ONE];
        for p in &self.pieces {
            match p.kind {
                PieceKind::Sliver => {
                    // Solution is essentially constant over the sliver.
                    let wi = p.w.integral(p.a, p.b);
                    acc[0] += y[0] * y[0] * wi;
                    acc[1] += y[0] * y[2] * wi;
                    acc[2] += y[2] * y[2] * wi;
                    let (e, _) = sliver_propagator(p, z);
                    let (c, cp) = apply_matrix(&e, y[0], y[1]);
                    let (s, sp) = apply_matrix(&e, y[2], y[3]);
                    y = [c, cp, s, sp];
                }
                PieceKind::Smooth => {
                    let panels = ((p.b - p.a) / PANEL).ceil().max(1.0) as usize;
                    let len = (p.b - p.a) / panels as f64;
                    let mut outs = Vec::with_capacity(panels * 8);
                    let mut wts = Vec::with_capacity(panels * 8);
                    for k in 0..panels {
                        let lo = p.a + k as f64 * len;
                        for (t, wt) in nodes.iter().zip(weights.iter()) {
                            let x = lo + 0.5 * len * (1.0 + t);
                            outs.push(x);
                            wts.push(0.5 * len * wt * p.w.value(x));
                        }
                    }
                    let mut idx = 0;
                    let f = |x: f64, y: &[C; 4]| rhs4(p.g(x, z))(y);
                    y = integrator::integrate(
                        f,
                        p.a,
                        p.b,
                        y,
                        p.h_max,
                        self.tol,
                        &outs,
                        &mut |_, v| {
                            let wt = wts[idx];
                            acc[0] += v[0] * v[0] * wt;
                            acc[1] += v[0] * v[2] * wt;
                            acc[2] += v[2] * v[2] * wt;
                            idx += 1;
                        },
                        None,
                    )?;
                }
            }
        }
        let m = Monodromy {
            z,
            c: y[0],
            cp: y[1],
            s: y[2],
            sp: y[3],
        };
        Ok((acc, m))
    }
}

pub(crate) fn gauss_legendre_8() -> ([f64; 8], [f64; 8]) {
    let x = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    let w = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    (
        [-x[3], -x[2], -x[1], -x[0], x[0], x[1], x[2], x[3]],
        [w[3], w[2], w[1], w[0], w[0], w[1], w[2], w[3]],
    )
}

/// Uniform grid of `resolution` points on `[0, 2π]` merged with the
/// coefficient breakpoints.
pub fn refined_grid(coeffs: &PeriodicCoefficients, resolution: usize) -> Vec<f64> {
    let n = resolution.max(2);
    let mut grid: Vec<f64> = (0..n).map(|i| PERIOD * i as f64 / (n - 1) as f64).collect();
    grid[n - 1] = PERIOD;
    grid.extend(coeffs.mesh_nodes());
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    grid
}

pub fn fundamental_solutions(
    coeffs: &PeriodicCoefficients,
    z: C,
    resolution: usize,
) -> Result<SolutionTrace> {
    if resolution < 2 {
        return Err(Error::Parameter(format!("resolution must be >= 2, got {resolution}")));
    }
    Transfer::new(coeffs).trace_on(z, &refined_grid(coeffs, resolution))
}

pub fn monodromy(coeffs: &PeriodicCoefficients, z: C) -> Result<Monodromy> {
    Transfer::new(coeffs).monodromy(z)
}

pub fn discriminant(coeffs: &PeriodicCoefficients, z: C) -> Result<DiscriminantValue> {
    Transfer::new(coeffs).discriminant(z)
}

/// Δ•(z) from the variational system.
pub fn discriminant_derivative(coeffs: &PeriodicCoefficients, z: C) -> Result<C> {
    Ok(Transfer::new(coeffs)
        .discriminant_with_derivative(z)?
        .delta_dot
        .expect("variational run returns a derivative"))
}

/// Δ•(z) = -(s(2π, z)/2) ∫₀^{2π} ψ₊ ψ₋ ω dx, the integral form used as a
/// cross-check of [`discriminant_derivative`]. Requires `z ∉ σ(L_D)`.
pub fn discriminant_derivative_integral_form(coeffs: &PeriodicCoefficients, z: C) -> Result<C> {
    let ([cc, cs, ss], m) = Transfer::new(coeffs).weighted_products(z)?;
    if m.s.norm() <= 1e-12 * m.max_entry() {
        return Err(Error::DirichletEigenvalue { z, s_abs: m.s.norm() });
    }
    // m₊ + m₋ and m₊ m₋ do not depend on the square-root branch.
    let sum = (m.sp - m.c) / m.s;
    let prod = -m.cp / m.s;
    let psi_product = cc + sum * cs + prod * ss;
    Ok(-m.s * 0.5 * psi_product)
}

// ---------------------------------------------------------------------------
// Closed-form propagation for piecewise-constant coefficients

/// `cos(kℓ)` and `sin(kℓ)/k` as entire functions of `k² ℓ²`.
fn cell_functions(k2: C, len: f64) -> (C, C) {
    let u = k2 * (len * len);
    if u.norm() < 1.0 {
        let mut cos = ONE;
        let mut sinc = ONE;
        let mut term_c = ONE;
        let mut term_s = ONE;
        for n in 1..30 {
            let nf = n as f64;
            term_c = -term_c * u / ((2.0 * nf - 1.0) * (2.0 * nf));
            term_s = -term_s * u / ((2.0 * nf) * (2.0 * nf + 1.0));
            cos += term_c;
            sinc += term_s;
            if term_c.norm() < 1e-18 && term_s.norm() < 1e-18 {
                break;
            }
        }
        (cos, sinc * len)
    } else if k2.im == 0.0 {
        let k2 = k2.re;
        if k2 > 0.0 {
            let k = k2.sqrt();
            let kl = k * len;
            (C::new(kl.cos(), 0.0), C::new(kl.sin() / k, 0.0))
        } else {
            let kappa = (-k2).sqrt();
            let kl = kappa * len;
            (C::new(kl.cosh(), 0.0), C::new(kl.sinh() / kappa, 0.0))
        }
    } else {
        let k = k2.sqrt();
        ((k * len).cos(), (k * len).sin() / k)
    }
}

/// Exact monodromy for piecewise-constant q and ω, as the product of the
/// closed-form cell matrices.
pub fn exact_monodromy_pc(coeffs: &PeriodicCoefficients, z: C) -> Result<Monodromy> {
    for seg in coeffs.q().segments().iter().chain(coeffs.w().segments()) {
        if !seg.is_constant() {
            return Err(Error::NotPiecewiseConstant { lo: seg.lo, hi: seg.hi });
        }
    }
    let nodes = coeffs.mesh_nodes();
    let mut m = Monodromy { z, c: ONE, s: ZERO, cp: ZERO, sp: ONE };
    for win in nodes.windows(2) {
        let (a, b) = (win[0], win[1]);
        let mid = 0.5 * (a + b);
        let w = coeffs.w().value(mid);
        let v = coeffs.q().value(mid);
        let k2 = z * w - v;
        let (cos, sinc) = cell_functions(k2, b - a);
        let cell = Monodromy { z, c: cos, s: sinc, cp: -k2 * sinc, sp: cos };
        m = Monodromy::product(&cell, &m);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{builtin_model, Sign};
    use std::f64::consts::PI;

    fn cz(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn zero_spectral_parameter_gives_linear_solutions() {
        for name in ["const", "sgn_sin"] {
            let c = builtin_model(name, &[]).unwrap();
            let tr = fundamental_solutions(&c, cz(0.0), 33).unwrap();
            for (i, &x) in tr.grid.iter().enumerate() {
                assert!((tr.c[i] - 1.0).norm() < 1e-12);
                assert!((tr.s[i] - x).norm() < 1e-12);
            }
            let m = monodromy(&c, cz(0.0)).unwrap();
            assert!((m.c - 1.0).norm() < 1e-12 && (m.s - PERIOD).norm() < 1e-12);
            assert!(m.cp.norm() < 1e-12 && (m.sp - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_starts_with_initial_data_and_hits_breakpoints() {
        let c = builtin_model("shifted_sgn", &[1.0]).unwrap();
        let tr = fundamental_solutions(&c, C::new(2.0, 0.5), 10).unwrap();
        assert_eq!(tr.grid[0], 0.0);
        assert_eq!((tr.c[0], tr.cp[0], tr.s[0], tr.sp[0]), (ONE, ZERO, ZERO, ONE));
        assert!(tr.grid.contains(&1.0) && tr.grid.contains(&PI));
        assert_eq!(*tr.grid.last().unwrap(), PERIOD);
        for w in tr.wronskians() {
            assert!((w - 1.0).norm() < 1e-9);
        }
        assert!(matches!(fundamental_solutions(&c, cz(1.0), 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn constant_model_at_one_is_trigonometric() {
        let c = builtin_model("const", &[]).unwrap();
        let tr = fundamental_solutions(&c, cz(1.0), 50).unwrap();
        for (i, &x) in tr.grid.iter().enumerate() {
            assert!((tr.c[i].re - x.cos()).abs() < 1e-8);
            assert!((tr.s[i].re - x.sin()).abs() < 1e-8);
        }
        let m = monodromy(&c, cz(1.0)).unwrap();
        assert!((m.c - 1.0).norm() < 1e-8 && m.s.norm() < 1e-8);
        assert!(m.cp.norm() < 1e-8 && (m.sp - 1.0).norm() < 1e-8);
    }

    #[test]
    fn exact_oracle_trivial_cases() {
        for name in ["const", "sgn_sin"] {
            let m = exact_monodromy_pc(&builtin_model(name, &[]).unwrap(), cz(0.0)).unwrap();
            assert_eq!((m.c, m.s, m.cp, m.sp), (ONE, cz(PERIOD), ZERO, ONE));
        }
    }

    #[test]
    fn exact_oracle_sgn_sin_at_one() {
        // Hand product: hyperbolic cell on [π, 2π] times trigonometric cell
        // on [0, π] (= -I): M = -[[cosh π, sinh π], [sinh π, cosh π]].
        let ch = 11.591_953_275_521_519;
        let sh = 11.548_739_357_257_748;
        let m = exact_monodromy_pc(&builtin_model("sgn_sin", &[]).unwrap(), cz(1.0)).unwrap();
        assert!((m.c.re + ch).abs() < 1e-12 && (m.sp.re + ch).abs() < 1e-12);
        assert!((m.s.re + sh).abs() < 1e-12 && (m.cp.re + sh).abs() < 1e-12);
        let d = discriminant(&builtin_model("sgn_sin", &[]).unwrap(), cz(1.0)).unwrap();
        assert!((d.delta.re + ch).abs() < 1e-8 * ch);
    }

    #[test]
    fn exact_oracle_rejects_power_segments() {
        let q = vec![PiecewiseSegment::constant(0.0, PERIOD, 0.0)];
        let w = vec![
            PiecewiseSegment::power(0.0, PI, 1.0, 0.5, 0.0, Sign::Plus),
            PiecewiseSegment::constant(PI, PERIOD, -1.0),
        ];
        let c = PeriodicCoefficients::new("p", q, w).unwrap();
        assert!(matches!(exact_monodromy_pc(&c, cz(1.0)), Err(Error::NotPiecewiseConstant { .. })));
    }

    #[test]
    fn integrator_matches_oracle_at_four() {
        let c = builtin_model("sgn_sin", &[]).unwrap();
        let a = monodromy(&c, cz(4.0)).unwrap();
        let b = exact_monodromy_pc(&c, cz(4.0)).unwrap();
        for (x, y) in [(a.c, b.c), (a.s, b.s), (a.cp, b.cp), (a.sp, b.sp)] {
            assert!((x - y).norm() < 1e-8 * y.norm().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn constant_model_discriminant_and_derivative() {
        let c = builtin_model("const", &[]).unwrap();
        let d = Transfer::new(&c).discriminant_with_derivative(cz(0.25)).unwrap();
        assert!((d.delta + 1.0).norm() < 1e-8);
        assert!(d.delta_dot.unwrap().norm() < 1e-8);
        // Δ(z) = cos(2π√z) ⇒ Δ•(z) = -π sin(2π√z)/√z
        for z in [0.1, 0.7, 2.3] {
            let expect = -PI * (PERIOD * f64::sqrt(z)).sin() / z.sqrt();
            let got = discriminant_derivative(&c, cz(z)).unwrap();
            assert!((got.re - expect).abs() < 1e-8, "{z}: {got} vs {expect}");
        }
    }

    #[test]
    fn derivative_at_zero_for_examples() {
        let s = builtin_model("sgn_sin", &[]).unwrap();
        assert!(discriminant_derivative(&s, cz(0.0)).unwrap().norm() < 1e-8);
        let a = builtin_model("shifted_sgn", &[PI / 2.0]).unwrap();
        // -π ∫ω with ∫ω = -π.
        let d = discriminant_derivative(&a, cz(0.0)).unwrap();
        assert!((d.re - PI * PI).abs() < 1e-6, "{d}");
    }

    #[test]
    fn integral_form_matches_variational_derivative() {
        let a = builtin_model("shifted_sgn", &[1.2]).unwrap();
        for z in [C::new(0.3, 0.0), C::new(-1.5, 0.2), C::new(2.0, -0.7)] {
            let var = discriminant_derivative(&a, z).unwrap();
            let int = discriminant_derivative_integral_form(&a, z).unwrap();
            assert!((var - int).norm() < 1e-7 * var.norm().max(1.0), "{z}: {var} vs {int}");
        }
        let c = builtin_model("const", &[]).unwrap();
        assert!(matches!(
            discriminant_derivative_integral_form(&c, cz(0.25)),
            Err(Error::DirichletEigenvalue { .. })
        ));
    }

    #[test]
    fn frozen_mesh_reproduces_adaptive_values() {
        let c = builtin_model("sgn_sin", &[]).unwrap();
        let t = Transfer::new(&c);
        let z = cz(3.3);
        let mesh = t.freeze_mesh(z).unwrap();
        let a = t.discriminant_with_derivative(z).unwrap();
        let b = t.discriminant_on_mesh(z, &mesh).unwrap();
        // The recorded mesh comes from the 4-state run, so agreement is at
        // integration accuracy rather than bitwise.
        assert!((a.delta - b.delta).norm() < 1e-9 * a.delta.norm().max(1.0));
        let (da, db) = (a.delta_dot.unwrap(), b.delta_dot.unwrap());
        assert!((da - db).norm() < 1e-9 * da.norm().max(1.0));
    }

    fn power_model(beta: f64) -> PeriodicCoefficients {
        let q = vec![PiecewiseSegment::constant(0.0, PERIOD, 0.0)];
        let w = vec![
            PiecewiseSegment::power(0.0, PI, 1.0, beta, PI, Sign::Plus),
            PiecewiseSegment::power(PI, PERIOD, 1.0, beta, PI, Sign::Minus),
        ];
        PeriodicCoefficients::new("pow", q, w).unwrap()
    }

    #[test]
    fn power_exponent_zero_matches_constant_oracle() {
        let p = power_model(0.0);
        let s = builtin_model("sgn_sin", &[]).unwrap();
        for z in [cz(2.0), C::new(-1.0, 0.5)] {
            let a = discriminant(&p, z).unwrap().delta;
            let b = exact_monodromy_pc(&s, z).unwrap().half_trace();
            assert!((a - b).norm() < 1e-8 * b.norm().max(1.0));
        }
    }

    #[test]
    fn singular_power_weight_keeps_unit_determinant() {
        let p = power_model(-0.5);
        let t = Transfer::new(&p);
        for z in [cz(1.5), C::new(-2.0, 1.0)] {
            let (m, _) = t.monodromy_with_derivative(z).unwrap();
            assert!((m.det() - 1.0).norm() < 1e-9 * m.det_scale(), "{}", m.det());
        }
        // z = 0 is weight independent.
        let m = t.monodromy(cz(0.0)).unwrap();
        assert!((m.s - PERIOD).norm() < 1e-10);
        // Derivative at zero equals -π ∫ω for q ≡ 0 (here ∫ω = 0 by oddness).
        let d = discriminant_derivative(&p, cz(0.0)).unwrap();
        assert!(d.norm() < 1e-8, "{d}");
    }

    #[test]
    fn singular_power_weight_derivative_against_finite_differences() {
        let p = power_model(-0.5);
        let t = Transfer::new(&p);
        let z = 0.8;
        let mesh = t.freeze_mesh(cz(z)).unwrap();
        let h = 1e-4;
        let f = |x: f64| t.discriminant_on_mesh(cz(x), &mesh).unwrap().delta.re;
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        let var = discriminant_derivative(&p, cz(z)).unwrap().re;
        assert!((fd - var).abs() < 1e-6 * var.abs().max(1.0), "{fd} vs {var}");
    }
}
