//! Floquet multipliers, Weyl coefficients and Floquet solutions.
//!
//! All square-root branch decisions live here. Off the spectrum the
//! multiplier of modulus < 1 is labelled ρ₊; on the spectrum (|ρ±| = 1) a
//! hint from a neighbouring point keeps the labelling continuous.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{PeriodicCoefficients, PERIOD};
use crate::error::{Error, Result};
use crate::transfer::{refined_grid, Monodromy, Transfer};

type C = Complex64;

/// `|1 - Δ²|` below this merges m₊ and m₋.
pub const DEGENERATE_THRESHOLD: f64 = 1e-12;

/// `|s(2π, z)|` relative to the largest monodromy entry below this is
/// treated as a Dirichlet eigenvalue.
pub const DIRICHLET_THRESHOLD: f64 = 1e-9;

/// Tolerance for "Δ(0) = 1" when extracting the periodic solution at 0.
pub const PERIODIC_AT_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetData {
    pub z: C,
    pub rho_plus: C,
    pub rho_minus: C,
    pub m_plus: C,
    pub m_minus: C,
    /// `W(ψ₊, ψ₋)` evaluated from the endpoint values at x = 2π.
    pub wronskian: C,
    /// m₊ and m₋ were merged at a band edge.
    pub degenerate: bool,
}

/// Roots `ρ₊, ρ₋` of `ρ² - 2Δρ + 1 = 0` with `|ρ₊| ≤ 1 ≤ |ρ₋|`.
pub fn floquet_multipliers(delta: C, branch_hint: Option<C>) -> (C, C) {
    let r = (C::new(1.0, 0.0) - delta * delta).sqrt();
    let a = delta + C::i() * r;
    let b = delta - C::i() * r;
    let (na, nb) = (a.norm(), b.norm());
    if (na - nb).abs() > 1e-12 * na.max(nb) {
        // Take the small root as the reciprocal of the large one.
        let big = if na > nb { a } else { b };
        return (big.inv(), big);
    }
    match branch_hint {
        Some(h) if (b - h).norm() < (a - h).norm() => (b, a),
        Some(_) => (a, b),
        None if a.im >= 0.0 => (a, b),
        None => (b, a),
    }
}

/// Weyl coefficients `m± = (ρ± - c(2π))/s(2π)`.
pub fn weyl_coefficients(mono: &Monodromy) -> Result<(C, C)> {
    let d = floquet_data(mono, None)?;
    Ok((d.m_plus, d.m_minus))
}

pub fn floquet_data(mono: &Monodromy, branch_hint: Option<C>) -> Result<FloquetData> {
    let s_abs = mono.s.norm();
    if s_abs <= DIRICHLET_THRESHOLD * mono.max_entry() {
        return Err(Error::DirichletEigenvalue { z: mono.z, s_abs });
    }
    let delta = mono.half_trace();
    let (rho_plus, rho_minus) = floquet_multipliers(delta, branch_hint);
    let degenerate = (C::new(1.0, 0.0) - delta * delta).norm() < DEGENERATE_THRESHOLD;
    let (m_plus, m_minus) = if degenerate {
        let m = (mono.sp - mono.c) / (mono.s * 2.0);
        (m, m)
    } else {
        // ρ₋ - c = s' - ρ₊ avoids cancellation when ρ₋ is large.
        ((rho_plus - mono.c) / mono.s, (mono.sp - rho_plus) / mono.s)
    };
    let psi = |m: C| (mono.c + m * mono.s, mono.cp + m * mono.sp);
    let (p, pp) = psi(m_plus);
    let (q, qp) = psi(m_minus);
    Ok(FloquetData {
        z: mono.z,
        rho_plus,
        rho_minus,
        m_plus,
        m_minus,
        wronskian: p * qp - pp * q,
        degenerate,
    })
}

/// Floquet data along a curve of spectral parameters, threading the
/// previous ρ₊ as the branch hint.
pub fn floquet_data_along(coeffs: &PeriodicCoefficients, curve: &[C]) -> Result<Vec<FloquetData>> {
    let t = Transfer::new(coeffs);
    let mut hint = None;
    curve
        .iter()
        .map(|&z| {
            let d = floquet_data(&t.monodromy(z)?, hint)?;
            hint = Some(d.rho_plus);
            Ok(d)
        })
        .collect()
}

/// Floquet solutions on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetSolutions {
    pub data: FloquetData,
    pub grid: Vec<f64>,
    pub psi_plus: Vec<C>,
    pub psi_minus: Vec<C>,
    pub psi_plus_prime: Vec<C>,
    pub psi_minus_prime: Vec<C>,
}

impl FloquetSolutions {
    pub fn wronskians(&self) -> Vec<C> {
        (0..self.grid.len())
            .map(|i| {
                self.psi_plus[i] * self.psi_minus_prime[i]
                    - self.psi_plus_prime[i] * self.psi_minus[i]
            })
            .collect()
    }
}

/// `ψ±(x, z) = c(x, z) + m±(z) s(x, z)` on `grid` (which must start at 0).
///
/// A solution that decays from 0 to 2π (`|ρ| < 1`) is not formed from
/// `c + m s`, which cancels badly when `|ρ|` is small. It is integrated
/// from 2π backwards instead, as a solution of the reflected problem with
/// data `ρ (1, -m)`.
pub fn floquet_solutions(coeffs: &PeriodicCoefficients, z: C, grid: &[f64]) -> Result<FloquetSolutions> {
    if grid.first() != Some(&0.0) {
        return Err(Error::Parameter("grid must start at 0".into()));
    }
    let t = Transfer::new(coeffs);
    let mono = t.monodromy(z)?;
    let data = floquet_data(&mono, None)?;
    let trace = t.trace_on(z, grid)?;

    let reflected = coeffs.reflected();
    let back_grid: Vec<f64> = grid.iter().rev().map(|&x| (PERIOD - x).max(0.0)).collect();
    let mut back = None;
    let mut solution = |m: C, rho: C| -> Result<(Vec<C>, Vec<C>)> {
        if rho.norm() >= 1.0 {
            let combine = |a: &[C], b: &[C]| a.iter().zip(b).map(|(x, y)| x + m * y).collect();
            return Ok((combine(&trace.c, &trace.s), combine(&trace.cp, &trace.sp)));
        }
        if back.is_none() {
            back = Some(Transfer::new(&reflected).trace_on(z, &back_grid)?);
        }
        let b = back.as_ref().unwrap();
        let n = grid.len();
        // Rescaled so that ψ(0) = 1 holds exactly.
        let scale = rho / (rho * (b.c[n - 1] - m * b.s[n - 1]));
        let psi = (0..n).map(|i| scale * (b.c[n - 1 - i] - m * b.s[n - 1 - i])).collect();
        let dpsi = (0..n).map(|i| -scale * (b.cp[n - 1 - i] - m * b.sp[n - 1 - i])).collect();
        Ok((psi, dpsi))
    };
    let (psi_plus, psi_plus_prime) = solution(data.m_plus, data.rho_plus)?;
    let (psi_minus, psi_minus_prime) = solution(data.m_minus, data.rho_minus)?;
    Ok(FloquetSolutions {
        data,
        grid: grid.to_vec(),
        psi_plus,
        psi_minus,
        psi_plus_prime,
        psi_minus_prime,
    })
}

/// The real periodic solution ψ₊(·, 0) when 0 is a periodic eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSolution {
    pub m_plus: f64,
    pub grid: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_prime: Vec<f64>,
}

pub fn periodic_solution_at_zero(coeffs: &PeriodicCoefficients, resolution: usize) -> Result<PeriodicSolution> {
    let t = Transfer::new(coeffs);
    let zero = C::new(0.0, 0.0);
    let mono = t.monodromy(zero)?;
    let delta = mono.half_trace().re;
    if (delta - 1.0).abs() > PERIODIC_AT_ZERO_TOL {
        return Err(Error::NotPeriodicAtZero { delta });
    }
    if mono.s.norm() <= DIRICHLET_THRESHOLD * mono.max_entry() {
        return Err(Error::DirichletEigenvalue { z: zero, s_abs: mono.s.norm() });
    }
    let m = ((mono.sp - mono.c) / (mono.s * 2.0)).re;
    let grid = refined_grid(coeffs, resolution);
    let trace = t.trace_on(zero, &grid)?;
    Ok(PeriodicSolution {
        m_plus: m,
        psi: (0..grid.len()).map(|i| trace.c[i].re + m * trace.s[i].re).collect(),
        psi_prime: (0..grid.len()).map(|i| trace.cp[i].re + m * trace.sp[i].re).collect(),
        grid,
    })
}
