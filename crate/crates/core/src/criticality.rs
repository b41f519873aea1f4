//! J-positivity, classification of the critical points 0 and ∞, and the
//! similarity verdict.
//!
//! 0 is singular exactly when it is a periodic eigenvalue with `Δ•(0) = 0`,
//! equivalently when `∫ ψ₊(x,0)² ω(x) dx = 0`. ∞ is regular when every
//! turning point of ω is simple; a non-simple turning point around which
//! ω is odd makes it singular.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bands::LevelScan;
use crate::coeffs::{detect_turning_points, weight_period_integral, PeriodicCoefficients, TurningPoint, PERIOD};
use crate::error::{Error, Result};
use crate::transfer::Transfer;

type C = Complex64;

/// Default tolerance for "Δ(0) = 1" and "Δ•(0) = 0".
pub const DEFAULT_TOL: f64 = 1e-8;
/// Hill bottoms at or above this count as nonnegative.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Relative tolerance of the Δ•(0) / criterion-integral cross-check.
pub const CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub hill_bottom: f64,
    /// `∫₀^{2π} q dx`.
    pub q_mean: f64,
}

/// Decides positivity of `-d²/dx² + q` on the line (weight 1) through the
/// bottom of its spectrum, the smallest root of `Δ_H(λ) = 1`.
pub fn check_j_positivity(coeffs: &PeriodicCoefficients) -> Result<PositivityReport> {
    let q = coeffs.q();
    let q_mean = q.period_integral();
    if q.is_zero() {
        return Ok(PositivityReport { positive: true, hill_bottom: 0.0, q_mean });
    }
    let hill = coeffs.with_unit_weight();
    // Constant test function: bottom ≤ mean of q. Below min q - 1 the
    // operator is strictly positive-definite after the shift.
    let up = q_mean / PERIOD + 1.0;
    let min_q = q.min_value();
    let lo = if min_q.is_finite() { min_q - 1.0 } else { up - 1e6 };
    let scan = LevelScan::new(&hill, (lo, up))?;
    let bottom = scan
        .roots(1.0)?
        .first()
        .map(|r| r.lambda)
        .ok_or(Error::ScanCap { cap: lo })?;
    Ok(PositivityReport { positive: bottom >= -POSITIVITY_TOL, hill_bottom: bottom, q_mean })
}

/// `∫₀^{2π} ψ₊(x,0)² ω(x) dx` with `ψ₊(0,0) = 1`.
pub fn criterion_integral(coeffs: &PeriodicCoefficients) -> Result<f64> {
    criterion_integral_with(coeffs, DEFAULT_TOL)
}

pub fn criterion_integral_with(coeffs: &PeriodicCoefficients, tol: f64) -> Result<f64> {
    let t = Transfer::new(coeffs);
    let zero = C::new(0.0, 0.0);
    let ([cc, cs, ss], m) = t.weighted_products(zero)?;
    let delta = m.half_trace().re;
    if (delta - 1.0).abs() > tol {
        return Err(Error::NotPeriodicAtZero { delta });
    }
    if coeffs.q().is_zero() {
        // ψ₊ ≡ 1.
        return Ok(weight_period_integral(coeffs));
    }
    if m.s.norm() <= crate::floquet::DIRICHLET_THRESHOLD * m.max_entry() {
        return Err(Error::DirichletEigenvalue { z: zero, s_abs: m.s.norm() });
    }
    let mp = ((m.sp - m.c) / (m.s * 2.0)).re;
    Ok(cc.re + 2.0 * mp * cs.re + mp * mp * ss.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroStatus {
    NotInSpectrum,
    BandEdgeRegular,
    CriticalSingular,
    /// Classification was not attempted or failed; see the notes.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfinityStatus {
    Regular,
    Singular,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

impl ZeroStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroStatus::NotInSpectrum => "not_in_spectrum",
            ZeroStatus::BandEdgeRegular => "band_edge_regular",
            ZeroStatus::CriticalSingular => "critical_singular",
            ZeroStatus::Undetermined => "undetermined",
        }
    }
}

impl InfinityStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            InfinityStatus::Regular => "regular",
            InfinityStatus::Singular => "singular",
            InfinityStatus::Undetermined => "undetermined",
        }
    }
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroClassification {
    pub status: ZeroStatus,
    pub delta_zero: f64,
    pub delta_dot_zero: f64,
    pub s_2pi_zero: f64,
    pub criterion_integral: Option<f64>,
    /// `|Δ•(0) + s(2π,0)·I/2|` when 0 is a periodic eigenvalue.
    pub consistency_residual: Option<f64>,
    pub near_critical: bool,
}

pub fn classify_zero(coeffs: &PeriodicCoefficients) -> Result<ZeroClassification> {
    classify_zero_with(coeffs, DEFAULT_TOL)
}

pub fn classify_zero_with(coeffs: &PeriodicCoefficients, tol: f64) -> Result<ZeroClassification> {
    let t = Transfer::new(coeffs);
    let (m, dm) = t.monodromy_with_derivative(C::new(0.0, 0.0))?;
    let delta_zero = m.half_trace().re;
    let delta_dot_zero = dm.half_trace().re;
    let s_2pi_zero = m.s.re;
    let excess = delta_zero - 1.0;
    if excess < -tol {
        return Err(Error::InconsistentInput(format!(
            "Delta(0) = {delta_zero} < 1 contradicts J-positivity"
        )));
    }
    let near = |v: f64| v >= tol && v <= 10.0 * tol;
    if excess > tol {
        return Ok(ZeroClassification {
            status: ZeroStatus::NotInSpectrum,
            delta_zero,
            delta_dot_zero,
            s_2pi_zero,
            criterion_integral: None,
            consistency_residual: None,
            near_critical: near(excess),
        });
    }
    let integral = criterion_integral_with(coeffs, tol)?;
    let residual = (delta_dot_zero + 0.5 * s_2pi_zero * integral).abs();
    if residual > CONSISTENCY_TOL * (1.0 + delta_dot_zero.abs()) {
        return Err(Error::InconsistentInput(format!(
            "Delta'(0) = {delta_dot_zero} disagrees with -s(2pi,0) I / 2 = {} (I = {integral})",
            -0.5 * s_2pi_zero * integral
        )));
    }
    let status = if delta_dot_zero.abs() > tol {
        ZeroStatus::BandEdgeRegular
    } else {
        ZeroStatus::CriticalSingular
    };
    Ok(ZeroClassification {
        status,
        delta_zero,
        delta_dot_zero,
        s_2pi_zero,
        criterion_integral: Some(integral),
        consistency_residual: Some(residual),
        near_critical: near(excess.abs()) || near(delta_dot_zero.abs()),
    })
}

pub fn classify_infinity(coeffs: &PeriodicCoefficients) -> InfinityStatus {
    classify_turning_points(&detect_turning_points(coeffs))
}

fn classify_turning_points(tps: &[TurningPoint]) -> InfinityStatus {
    if tps.iter().all(|tp| tp.simple) {
        InfinityStatus::Regular
    } else if tps.iter().any(|tp| !tp.simple && tp.odd_locally) {
        InfinityStatus::Singular
    } else {
        InfinityStatus::Undetermined
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub delta_zero: Option<f64>,
    pub delta_dot_zero: Option<f64>,
    pub s_2pi_zero: Option<f64>,
    pub criterion_integral: Option<f64>,
    pub consistency_residual: Option<f64>,
    pub near_critical: bool,
    pub tolerance: f64,
    pub turning_points: Vec<TurningPoint>,
    pub positivity: Option<PositivityReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub label: String,
    pub zero_status: ZeroStatus,
    pub infinity_status: InfinityStatus,
    pub similar_to_selfadjoint: Verdict,
    pub diagnostics: Diagnostics,
}

impl CriticalityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

pub fn similarity_verdict(coeffs: &PeriodicCoefficients) -> CriticalityReport {
    similarity_verdict_with(coeffs, DEFAULT_TOL)
}

/// Runs the positivity check and both classifiers. Every failure ends up
/// in the report as an undetermined status with a note.
pub fn similarity_verdict_with(coeffs: &PeriodicCoefficients, tol: f64) -> CriticalityReport {
    let turning_points = detect_turning_points(coeffs);
    let infinity_status = classify_turning_points(&turning_points);
    let mut diag = Diagnostics {
        delta_zero: None,
        delta_dot_zero: None,
        s_2pi_zero: None,
        criterion_integral: None,
        consistency_residual: None,
        near_critical: false,
        tolerance: tol,
        turning_points,
        positivity: None,
        notes: Vec::new(),
    };
    if infinity_status == InfinityStatus::Undetermined {
        diag.notes
            .push("a non-simple turning point is not locally odd; no verdict for infinity".into());
    }

    let zero_status = match check_j_positivity(coeffs) {
        Err(e) => {
            diag.notes.push(format!("positivity check failed: {e}"));
            ZeroStatus::Undetermined
        }
        Ok(p) if !p.positive => {
            diag.positivity = Some(p);
            diag.notes.push(format!(
                "operator is not J-positive (Hill bottom {}); classification skipped",
                p.hill_bottom
            ));
            ZeroStatus::Undetermined
        }
        Ok(p) => {
            diag.positivity = Some(p);
            match classify_zero_with(coeffs, tol) {
                Ok(z) => {
                    diag.delta_zero = Some(z.delta_zero);
                    diag.delta_dot_zero = Some(z.delta_dot_zero);
                    diag.s_2pi_zero = Some(z.s_2pi_zero);
                    diag.criterion_integral = z.criterion_integral;
                    diag.consistency_residual = z.consistency_residual;
                    diag.near_critical = z.near_critical;
                    if z.near_critical {
                        diag.notes.push("near-critical: a classifying quantity lies within [tol, 10 tol]".into());
                    }
                    z.status
                }
                Err(e) => {
                    diag.notes.push(format!("zero classification failed: {e}"));
                    ZeroStatus::Undetermined
                }
            }
        }
    };

    let verdict = if zero_status == ZeroStatus::CriticalSingular || infinity_status == InfinityStatus::Singular {
        Verdict::No
    } else if zero_status == ZeroStatus::Undetermined || infinity_status == InfinityStatus::Undetermined {
        Verdict::Undetermined
    } else {
        Verdict::Yes
    };
    CriticalityReport {
        label: coeffs.label.clone(),
        zero_status,
        infinity_status,
        similar_to_selfadjoint: verdict,
        diagnostics: diag,
    }
}
