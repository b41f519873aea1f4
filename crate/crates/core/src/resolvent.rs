//! Finite-difference discretization of the quasi-periodic problems L(t)
//! and resolvent-norm probes near the real axis.
//!
//! With `T` the periodic second-difference matrix for `-y'' + q y` (corner
//! entries carry `e^{±it}`) and `W = diag ω(nodes)`, the operator `W⁻¹T` is
//! symmetrized to `S = J |W|^{-1/2} T |W|^{-1/2}`, `J = sgn W`. Euclidean
//! norms of `S` correspond to norms in `L²(|ω|)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{PeriodicCoefficients, PERIOD};
use crate::error::{Error, Result};
use crate::linalg::{inverse_norm, shift_invert_eigenvalues, BandMatrix};

type C = Complex64;

pub const MIN_NODES: usize = 16;
/// Inverse iteration limits for `1/σ_min`.
const POWER_MAX_ITER: usize = 500;
const POWER_RTOL: f64 = 1e-10;
/// Krylov dimension for the near-zero eigenvalue search.
const KRYLOV_DIM: usize = 40;
/// Eigenvalues with modulus below this count as the cluster at 0 when
/// measuring the discretization splitting.
pub const ZERO_CLUSTER: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub t: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
    pub weight_signs: Vec<f64>,
    /// `S[j][j]`, `S[j][j-1 mod n]`, `S[j][j+1 mod n]`.
    pub diag: Vec<C>,
    pub lower: Vec<C>,
    pub upper: Vec<C>,
}

pub fn discretize_quasiperiodic(coeffs: &PeriodicCoefficients, t: f64, n: usize) -> Result<DiscreteOperator> {
    if n < MIN_NODES {
        return Err(Error::Parameter(format!("grid size {n} < {MIN_NODES}")));
    }
    if !(0.0..PERIOD).contains(&t) {
        return Err(Error::Parameter(format!("quasimomentum {t} outside [0, 2pi)")));
    }
    let h = PERIOD / n as f64;
    let nodes: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * h).collect();
    let w: Vec<f64> = nodes.iter().map(|&x| coeffs.w().value(x)).collect();
    if let Some(j) = w.iter().position(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::Resolvent(format!("weight is {} at node x = {}", w[j], nodes[j])));
    }
    let inv_sqrt: Vec<f64> = w.iter().map(|v| 1.0 / v.abs().sqrt()).collect();
    let signs: Vec<f64> = w.iter().map(|v| v.signum()).collect();
    let off = -1.0 / (h * h);
    let phase = C::from_polar(1.0, t);
    let mut diag = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for j in 0..n {
        let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
        // f(x + 2π) = e^{-it} f(x): wrapping forward picks up e^{-it}.
        let t_lo = if j == 0 { phase * off } else { C::new(off, 0.0) };
        let t_up = if j == n - 1 { phase.conj() * off } else { C::new(off, 0.0) };
        let s = signs[j] * inv_sqrt[j];
        diag.push(C::new(s * (2.0 / (h * h) + coeffs.q().value(nodes[j])) * inv_sqrt[j], 0.0));
        lower.push(t_lo * (s * inv_sqrt[jm]));
        upper.push(t_up * (s * inv_sqrt[jp]));
    }
    Ok(DiscreteOperator { t, n, h, nodes, weight_signs: signs, diag, lower, upper })
}

/// Position of original index `j` in the zigzag order `0, n-1, 1, n-2, ...`,
/// which turns the cyclic tridiagonal pattern into bandwidth 2.
fn zigzag(j: usize, n: usize) -> usize {
    if 2 * j < n {
        2 * j
    } else {
        2 * (n - 1 - j) + 1
    }
}

impl DiscreteOperator {
    pub fn to_dense(&self) -> DMatrix<C> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] += self.diag[j];
            m[(j, (j + n - 1) % n)] += self.lower[j];
            m[(j, (j + 1) % n)] += self.upper[j];
        }
        m
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        let n = self.n;
        (0..n)
            .map(|j| self.diag[j] * x[j] + self.lower[j] * x[(j + n - 1) % n] + self.upper[j] * x[(j + 1) % n])
            .collect()
    }

    /// `S - z I` in zigzag order.
    fn shifted_band(&self, z: C) -> BandMatrix {
        let n = self.n;
        let mut b = BandMatrix::zeros(n, 2, 2);
        for j in 0..n {
            let r = zigzag(j, n);
            let add = |b: &mut BandMatrix, c: usize, v: C| {
                let cur = b.get(r, c);
                b.set(r, c, cur + v);
            };
            add(&mut b, r, self.diag[j] - z);
            add(&mut b, zigzag((j + n - 1) % n, n), self.lower[j]);
            add(&mut b, zigzag((j + 1) % n, n), self.upper[j]);
        }
        b
    }

    /// `‖(S - z)⁻¹‖₂`.
    pub fn resolvent_norm(&self, z: C) -> Result<f64> {
        inverse_norm(&self.shifted_band(z), POWER_MAX_ITER, POWER_RTOL)
    }

    /// Up to `k` eigenvalues closest to `shift` (which must not be an
    /// eigenvalue).
    pub fn eigenvalues_near(&self, shift: C, k: usize) -> Result<Vec<C>> {
        let n = self.n;
        let lu = self.shifted_band(shift).factor()?;
        let solve = |x: &mut [C]| {
            let mut y = vec![C::new(0.0, 0.0); n];
            for j in 0..n {
                y[zigzag(j, n)] = x[j];
            }
            lu.solve_in_place(&mut y);
            for j in 0..n {
                x[j] = y[zigzag(j, n)];
            }
        };
        shift_invert_eigenvalues(n, shift, KRYLOV_DIM, k, &solve)
    }

    /// Spread of the eigenvalue cluster at 0: the largest distance between
    /// two eigenvalues of modulus < [`ZERO_CLUSTER`], or the modulus of a
    /// lone one. Zero when no eigenvalue is that close.
    pub fn zero_splitting(&self) -> Result<f64> {
        let shift = C::new(0.0, 1e-3);
        let ev = self.eigenvalues_near(shift, 4)?;
        let cluster: Vec<C> = ev.into_iter().filter(|l| l.norm() < ZERO_CLUSTER).collect();
        Ok(match cluster.len() {
            0 => 0.0,
            1 => cluster[0].norm(),
            _ => {
                let mut d: f64 = 0.0;
                for a in &cluster {
                    for b in &cluster {
                        d = d.max((a - b).norm());
                    }
                }
                d
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventProbeResult {
    pub t: f64,
    pub n: usize,
    /// `(y, ‖(S - iy)⁻¹‖)`.
    pub samples: Vec<(f64, f64)>,
    pub fitted_exponent: f64,
    pub fit_window: (f64, f64),
    pub discretization_scale: f64,
}

/// Least-squares slope of `ln norm` against `ln(1/y)`.
pub fn fit_exponent(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(y, v)| (-y.ln(), v.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Geometric grid from `hi` down to `lo` with `count` points.
pub fn geometric_grid(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    (0..count)
        .map(|k| hi * (lo / hi).powf(k as f64 / (count - 1) as f64))
        .collect()
}

pub fn resolvent_norm_curve(
    coeffs: &PeriodicCoefficients,
    t: f64,
    y_values: &[f64],
    n: usize,
) -> Result<ResolventProbeResult> {
    if y_values.len() < 2 {
        return Err(Error::Parameter("need at least two y values".into()));
    }
    if y_values.iter().any(|&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::Parameter("y values must be positive".into()));
    }
    if y_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("y values must be sorted descending".into()));
    }
    let op = discretize_quasiperiodic(coeffs, t, n)?;
    let scale = op.zero_splitting()?;
    let y_min = *y_values.last().unwrap();
    if y_min < 10.0 * scale {
        return Err(Error::Parameter(format!(
            "smallest y = {y_min} is below 10x the discretization scale {scale}"
        )));
    }
    let samples = y_values
        .iter()
        .map(|&y| Ok((y, op.resolvent_norm(C::new(0.0, y))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResolventProbeResult {
        t,
        n,
        fitted_exponent: fit_exponent(&samples),
        fit_window: (y_min, y_values[0]),
        samples,
        discretization_scale: scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssSupResult {
    pub z: C,
    pub t_values: Vec<f64>,
    pub norms: Vec<f64>,
    pub value: f64,
    pub argmax_t: f64,
}

/// `max_t ‖(L(t) - z)⁻¹‖` over `t_samples` uniform quasimomenta.
///
/// In the continuum the resolvent norm of the operator on the whole line
/// is the essential supremum over `t` of these norms; the uniform grid
/// approximates it from below.
pub fn esssup_at(coeffs: &PeriodicCoefficients, z: C, t_samples: usize, n: usize) -> Result<EssSupResult> {
    if t_samples < 8 {
        return Err(Error::Parameter(format!("t_samples = {t_samples} < 8")));
    }
    let t_values: Vec<f64> = (0..t_samples).map(|k| 2.0 * PI * k as f64 / t_samples as f64).collect();
    let norms = t_values
        .iter()
        .map(|&t| discretize_quasiperiodic(coeffs, t, n)?.resolvent_norm(z))
        .collect::<Result<Vec<_>>>()?;
    let (imax, &value) = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("t grid is nonempty");
    Ok(EssSupResult { z, argmax_t: t_values[imax], t_values, norms, value })
}

pub fn esssup_probe(coeffs: &PeriodicCoefficients, y: f64, t_samples: usize, n: usize) -> Result<EssSupResult> {
    if !(y > 0.0) {
        return Err(Error::Parameter(format!("y = {y} must be positive")));
    }
    esssup_at(coeffs, C::new(0.0, y), t_samples, n)
}
