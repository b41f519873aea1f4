//! Dirichlet spectrum, quasi-momentum eigenvalues and the band spectrum.
//!
//! Roots of `Δ(λ) = γ` are found piece by piece between consecutive
//! stationary points of Δ (roots of Δ•), where Δ is monotone and each piece
//! holds at most one root. A stationary point at which `Δ = γ` within
//! [`TANGENCY_TOL`] is a double root.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::PeriodicCoefficients;
use crate::criticality::check_j_positivity;
use crate::error::{Error, Result};
use crate::roots::{bisect, bracket_sign_changes, find_roots, Bracket};
use crate::transfer::Transfer;

type C = Complex64;

pub const DEFAULT_WINDOW: (f64, f64) = (-50.0, 50.0);
/// Bisection width for Dirichlet eigenvalues.
pub const DIRICHLET_XTOL: f64 = 1e-10;
/// `|Δ(λ*) - γ|` at a stationary point below this counts as a tangency.
pub const TANGENCY_TOL: f64 = 1e-8;
/// Largest half-width the interlacing report extends its window to.
pub const INTERLACING_WINDOW_CAP: f64 = 1280.0;

fn real(x: f64) -> C {
    C::new(x, 0.0)
}

fn check_window(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Parameter(format!("window [{lo}, {hi}] must be bounded and nonempty")));
    }
    Ok(())
}

fn root_xtol(x: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs().max(1.0)
}

/// Real roots of `s(2π, ·)` in `[lo, hi]`.
pub fn dirichlet_spectrum(coeffs: &PeriodicCoefficients, window: (f64, f64)) -> Result<Vec<f64>> {
    check_window(window.0, window.1)?;
    let t = Transfer::new(coeffs);
    find_roots(|x| Ok(t.monodromy(real(x))?.s.re), window.0, window.1, DIRICHLET_XTOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub lambda: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRoot {
    pub lambda: f64,
    pub multiplicity: u8,
}

/// Real-axis analysis of Δ on a window: stationary points computed once,
/// then level sets `Δ = γ` on demand.
pub struct LevelScan<'a> {
    transfer: Transfer<'a>,
    window: (f64, f64),
    stationary: Vec<StationaryPoint>,
}

impl<'a> LevelScan<'a> {
    pub fn new(coeffs: &'a PeriodicCoefficients, window: (f64, f64)) -> Result<Self> {
        check_window(window.0, window.1)?;
        let transfer = Transfer::new(coeffs);
        let dd = |x: f64| -> Result<f64> {
            Ok(transfer.discriminant_with_derivative(real(x))?.delta_dot.unwrap_or_default().re)
        };
        let brackets = bracket_sign_changes(dd, window.0, window.1)?;
        let mut stationary = Vec::with_capacity(brackets.len());
        for br in brackets {
            let lambda = bisect(dd, br, root_xtol(br.a))?;
            let delta = transfer.discriminant(real(lambda))?.delta.re;
            stationary.push(StationaryPoint { lambda, delta });
        }
        Ok(Self { transfer, window, stationary })
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn transfer(&self) -> &Transfer<'a> {
        &self.transfer
    }

    pub fn stationary_points(&self) -> &[StationaryPoint] {
        &self.stationary
    }

    pub fn delta(&self, x: f64) -> Result<f64> {
        Ok(self.transfer.discriminant(real(x))?.delta.re)
    }

    pub fn delta_dot(&self, x: f64) -> Result<f64> {
        Ok(self.transfer.discriminant_with_derivative(real(x))?.delta_dot.unwrap_or_default().re)
    }

    /// Δ•• by central differences of Δ• on a mesh frozen at `x`.
    pub fn delta_ddot(&self, x: f64) -> Result<f64> {
        let mesh = self.transfer.freeze_mesh(real(x))?;
        let h = 1e-4 * x.abs().max(1.0);
        let at = |y: f64| -> Result<f64> {
            Ok(self.transfer.discriminant_on_mesh(real(y), &mesh)?.delta_dot.unwrap_or_default().re)
        };
        Ok((at(x + h)? - at(x - h)?) / (2.0 * h))
    }

    /// Roots of `Δ(λ) = γ` in the window, sorted, with multiplicity.
    pub fn roots(&self, gamma: f64) -> Result<Vec<LevelRoot>> {
        let (lo, hi) = self.window;
        let f = |x: f64| -> Result<f64> { Ok(self.delta(x)? - gamma) };
        // Piece end points: window ends and stationary points; `tangent`
        // marks stationary points that are themselves double roots.
        let mut nodes: Vec<(f64, f64, bool)> = vec![(lo, f(lo)?, false)];
        for s in &self.stationary {
            let v = s.delta - gamma;
            nodes.push((s.lambda, v, v.abs() <= TANGENCY_TOL));
        }
        nodes.push((hi, f(hi)?, false));

        let mut out = Vec::new();
        for (i, w) in nodes.windows(2).enumerate() {
            let ((a, fa, ta), (b, fb, tb)) = (w[0], w[1]);
            if ta {
                out.push(LevelRoot { lambda: a, multiplicity: 2 });
            }
            if ta || tb {
                continue;
            }
            if fa == 0.0 && i == 0 {
                out.push(LevelRoot { lambda: a, multiplicity: 1 });
            } else if (fa < 0.0 && fb >= 0.0) || (fa > 0.0 && fb <= 0.0) {
                let x = bisect(f, Bracket { a, b, fa, fb }, root_xtol(a.abs().max(b.abs())))?;
                out.push(LevelRoot { lambda: x, multiplicity: 1 });
            }
        }
        Ok(out)
    }
}

/// Real solutions of `Δ(λ) = cos t`, repeated according to multiplicity.
pub fn quasi_momentum_eigenvalues(coeffs: &PeriodicCoefficients, t: f64, window: (f64, f64)) -> Result<Vec<f64>> {
    let scan = LevelScan::new(coeffs, window)?;
    Ok(expand(&scan.roots(t.cos())?))
}

fn expand(roots: &[LevelRoot]) -> Vec<f64> {
    roots
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.lambda, r.multiplicity as usize))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Periodic,
    Antiperiodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

/// `λ_n^±(0)` (periodic) or `λ_n^±(π)` (antiperiodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub kind: EdgeKind,
    pub index: usize,
    pub side: Side,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Plus => '+',
            Side::Minus => '-',
        };
        let t = match self.kind {
            EdgeKind::Periodic => "0",
            EdgeKind::Antiperiodic => "pi",
        };
        write!(f, "lambda{}{}({})", self.index, side, t)
    }
}

/// Labels the roots of `Δ = ±1` by order from 0 on each side.
///
/// A simple root at 0 sits on the negative side when `Δ•(0) > 0` and on
/// the positive side when `Δ•(0) < 0`; a double root at 0 is both
/// `λ₁⁻` and `λ₁⁺`. Output is sorted by λ, negative-side copy first.
fn label_roots(roots: &[LevelRoot], kind: EdgeKind, delta_dot_zero: f64) -> Vec<(f64, EdgeLabel)> {
    let zero_tol = 1e-9;
    let mut minus: Vec<f64> = Vec::new();
    let mut plus: Vec<f64> = Vec::new();
    for r in roots {
        if r.lambda.abs() <= zero_tol {
            match r.multiplicity {
                2 => {
                    minus.push(r.lambda);
                    plus.push(r.lambda);
                }
                _ if delta_dot_zero > 0.0 => minus.push(r.lambda),
                _ => plus.push(r.lambda),
            }
        } else {
            let side = if r.lambda < 0.0 { &mut minus } else { &mut plus };
            for _ in 0..r.multiplicity {
                side.push(r.lambda);
            }
        }
    }
    let mut out: Vec<(f64, EdgeLabel)> = Vec::new();
    for (i, &x) in minus.iter().rev().enumerate() {
        out.push((x, EdgeLabel { kind, index: i + 1, side: Side::Minus }));
    }
    out.reverse();
    for (i, &x) in plus.iter().enumerate() {
        out.push((x, EdgeLabel { kind, index: i + 1, side: Side::Plus }));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub lo_label: Option<EdgeLabel>,
    pub hi_label: Option<EdgeLabel>,
    /// The lower end is the search window's edge, not a band edge.
    pub truncated_lo: bool,
    pub truncated_hi: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpectrum {
    pub bands: Vec<Band>,
    pub search_window: (f64, f64),
}

impl BandSpectrum {
    pub fn is_truncated(&self) -> bool {
        self.bands.iter().any(|b| b.truncated_lo || b.truncated_hi)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.bands.iter().any(|b| x >= b.lo - tol && x <= b.hi + tol)
    }
}

/// Labeled edges of both kinds, sorted by λ.
fn labeled_edges(scan: &LevelScan) -> Result<Vec<(f64, EdgeLabel)>> {
    let periodic = scan.roots(1.0)?;
    let anti = scan.roots(-1.0)?;
    let dd0 = if periodic.iter().any(|r| r.lambda.abs() <= 1e-9) {
        scan.delta_dot(0.0)?
    } else {
        0.0
    };
    let mut edges = label_roots(&periodic, EdgeKind::Periodic, dd0);
    edges.extend(label_roots(&anti, EdgeKind::Antiperiodic, dd0));
    // Stable: keeps the negative-side copy of a double root first.
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(edges)
}

pub fn compute_bands(coeffs: &PeriodicCoefficients, window: (f64, f64)) -> Result<BandSpectrum> {
    let scan = LevelScan::new(coeffs, window)?;
    bands_from_scan(&scan)
}

pub fn bands_from_scan(scan: &LevelScan) -> Result<BandSpectrum> {
    let (lo, hi) = scan.window();
    let edges = labeled_edges(scan)?;

    // Group equal λ (double roots) into points carrying their labels.
    let mut points: Vec<(f64, Vec<EdgeLabel>)> = Vec::new();
    for (x, l) in edges {
        match points.last_mut() {
            Some((y, labels)) if *y == x => labels.push(l),
            _ => points.push((x, vec![l])),
        }
    }

    let in_band = |a: f64, b: f64| -> Result<bool> { Ok(scan.delta(0.5 * (a + b))?.abs() <= 1.0) };
    let mut bands = Vec::new();
    let mut covered = vec![false; points.len()];
    // Intervals between consecutive points, plus the two window stubs.
    let mut cuts: Vec<(f64, Option<usize>)> = vec![(lo, None)];
    cuts.extend(points.iter().enumerate().filter(|(_, p)| p.0 > lo && p.0 < hi).map(|(i, p)| (p.0, Some(i))));
    cuts.push((hi, None));
    for w in cuts.windows(2) {
        let ((a, ia), (b, ib)) = (w[0], w[1]);
        if b <= a || !in_band(a, b)? {
            continue;
        }
        if let Some(i) = ia {
            covered[i] = true;
        }
        if let Some(i) = ib {
            covered[i] = true;
        }
        bands.push(Band {
            lo: a,
            hi: b,
            lo_label: ia.map(|i| *points[i].1.last().unwrap()),
            hi_label: ib.map(|i| points[i].1[0]),
            truncated_lo: ia.is_none(),
            truncated_hi: ib.is_none(),
        });
    }
    // A tangency with gaps on both sides is a one-point band.
    for (i, (x, labels)) in points.iter().enumerate() {
        if !covered[i] && labels.len() == 2 {
            bands.push(Band {
                lo: *x,
                hi: *x,
                lo_label: Some(labels[0]),
                hi_label: Some(labels[1]),
                truncated_lo: false,
                truncated_hi: false,
            });
        }
    }
    bands.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Ok(BandSpectrum { bands, search_window: (lo, hi) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOutcome {
    Pass,
    Fail,
    /// Both sides agree to root-finding resolution, so a strict
    /// inequality can be neither confirmed nor refuted.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub description: String,
    pub lhs: f64,
    pub rhs: f64,
    pub outcome: CheckOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryCheck {
    pub lambda: f64,
    pub delta: f64,
    pub delta_ddot: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingReport {
    /// "i": Δ(0) > 1; "ii": Δ(0) = 1, Δ•(0) ≠ 0; "iii": Δ(0) = 1, Δ•(0) = 0.
    pub case: String,
    pub delta_zero: f64,
    pub delta_dot_zero: f64,
    pub s_2pi_zero: f64,
    pub window: (f64, f64),
    pub periodic_plus: Vec<f64>,
    pub periodic_minus: Vec<f64>,
    pub antiperiodic_plus: Vec<f64>,
    pub antiperiodic_minus: Vec<f64>,
    pub checks: Vec<InequalityCheck>,
    pub stationary: Vec<StationaryCheck>,
}

impl InterlacingReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome == CheckOutcome::Pass) && self.stationary.iter().all(|s| s.passed)
    }

    /// No inequality is violated, though some may be unresolved.
    pub fn no_failures(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != CheckOutcome::Fail) && self.stationary.iter().all(|s| s.passed)
    }
}

fn side_values(edges: &[(f64, EdgeLabel)], kind: EdgeKind, side: Side) -> Vec<f64> {
    let mut v: Vec<(usize, f64)> = edges
        .iter()
        .filter(|(_, l)| l.kind == kind && l.side == side)
        .map(|(x, l)| (l.index, *x))
        .collect();
    v.sort_by_key(|p| p.0);
    v.into_iter().map(|p| p.1).collect()
}

/// The chain `p1 < a1 ≤ a2 < p2 ≤ p3 < a3 ≤ a4 < ...` truncated to
/// indices ≤ count, as (name, value) pairs and the relations between them
/// (`true` = strict).
fn chain(p: &[f64], a: &[f64], count: usize, side: char) -> (Vec<(String, f64)>, Vec<bool>) {
    let mut items = Vec::new();
    let mut strict = Vec::new();
    let (mut ip, mut ia) = (0, 0);
    // Pattern of kinds: p a a p p a a p p ...
    let mut k = 0;
    loop {
        let is_p = matches!(k % 4, 0 | 3);
        let (idx, vals, t) = if is_p { (&mut ip, p, "0") } else { (&mut ia, a, "pi") };
        if *idx >= count {
            break;
        }
        items.push((format!("lambda{}{}({})", *idx + 1, side, t), vals[*idx]));
        *idx += 1;
        if items.len() > 1 {
            // Strict between different kinds, weak within a pair.
            strict.push(k % 2 == 1);
        }
        k += 1;
    }
    (items, strict)
}

fn check(description: String, lhs: f64, rhs: f64, passed: bool) -> InequalityCheck {
    let outcome = if passed { CheckOutcome::Pass } else { CheckOutcome::Fail };
    InequalityCheck { description, lhs, rhs, outcome }
}

/// Resolution of computed eigenvalues near `x`: differences below this
/// are indistinguishable from 0.
fn resolution(x: f64) -> f64 {
    64.0 * f64::EPSILON * x.abs().max(1.0)
}

fn chain_checks(items: &[(String, f64)], strict: &[bool], ascending: bool) -> Vec<InequalityCheck> {
    let mut out = Vec::new();
    for (i, w) in items.windows(2).enumerate() {
        let ((ln, lv), (rn, rv)) = (&w[0], &w[1]);
        let (small, large) = if ascending { (lv, rv) } else { (rv, lv) };
        let res = resolution(*large).max(resolution(*small));
        let gap = large - small;
        let (op, outcome) = if strict[i] {
            let o = if gap > res {
                CheckOutcome::Pass
            } else if gap >= -res {
                CheckOutcome::Unresolved
            } else {
                CheckOutcome::Fail
            };
            ("<", o)
        } else {
            ("<=", if gap >= -res { CheckOutcome::Pass } else { CheckOutcome::Fail })
        };
        let desc = if ascending {
            format!("{ln} {op} {rn}")
        } else {
            format!("{rn} {op} {ln}")
        };
        out.push(InequalityCheck { description: desc, lhs: *small, rhs: *large, outcome });
    }
    out
}

/// Verifies the ordering of periodic and antiperiodic eigenvalues on both
/// sides of 0, the sign conditions at 0, and the behaviour of Δ at its
/// stationary points.
pub fn interlacing_report(coeffs: &PeriodicCoefficients, count: usize) -> Result<InterlacingReport> {
    let signs: Vec<f64> = coeffs.w().segments().iter().map(|s| s.sign()).collect();
    if !(signs.iter().any(|&s| s > 0.0) && signs.iter().any(|&s| s < 0.0)) {
        return Err(Error::Precondition("weight does not change sign".into()));
    }
    let pos = check_j_positivity(coeffs)?;
    if !pos.positive {
        return Err(Error::Precondition(format!(
            "operator is not J-positive (Hill bottom {})",
            pos.hill_bottom
        )));
    }
    if count == 0 {
        return Err(Error::Parameter("count must be positive".into()));
    }

    let mut half = 20.0;
    let (scan, edges) = loop {
        let scan = LevelScan::new(coeffs, (-half, half))?;
        let edges = labeled_edges(&scan)?;
        let enough = [EdgeKind::Periodic, EdgeKind::Antiperiodic]
            .iter()
            .flat_map(|&k| [Side::Plus, Side::Minus].map(|s| side_values(&edges, k, s).len()))
            .min()
            .unwrap_or(0);
        if enough >= count {
            break (scan, edges);
        }
        if half >= INTERLACING_WINDOW_CAP {
            return Err(Error::InsufficientEigenvalues { found: enough, wanted: count, lo: -half, hi: half });
        }
        half *= 2.0;
    };

    let t = scan.transfer();
    let (m0, dm0) = t.monodromy_with_derivative(real(0.0))?;
    let delta_zero = m0.half_trace().re;
    let delta_dot_zero = dm0.half_trace().re;
    let s_2pi_zero = m0.s.re;
    let tol = crate::criticality::DEFAULT_TOL;
    let case = if delta_zero > 1.0 + tol {
        "i"
    } else if delta_dot_zero.abs() > tol {
        "ii"
    } else {
        "iii"
    };

    let pp = side_values(&edges, EdgeKind::Periodic, Side::Plus);
    let pm = side_values(&edges, EdgeKind::Periodic, Side::Minus);
    let ap = side_values(&edges, EdgeKind::Antiperiodic, Side::Plus);
    let am = side_values(&edges, EdgeKind::Antiperiodic, Side::Minus);

    let mut checks = vec![
        check("Delta(0) >= 1".into(), 1.0, delta_zero, delta_zero >= 1.0 - tol),
        check("s(2pi, 0) > 0".into(), 0.0, s_2pi_zero, s_2pi_zero > 0.0),
        check("lambda1-(0) <= 0".into(), pm[0], 0.0, pm[0] <= 1e-9),
        check("0 <= lambda1+(0)".into(), 0.0, pp[0], pp[0] >= -1e-9),
    ];
    let (items, strict) = chain(&pp, &ap, count, '+');
    checks.extend(chain_checks(&items, &strict, true));
    let (items, strict) = chain(&pm, &am, count, '-');
    checks.extend(chain_checks(&items, &strict, false));

    let mut stationary = Vec::new();
    for s in scan.stationary_points() {
        let ddot = scan.delta_ddot(s.lambda)?;
        stationary.push(StationaryCheck {
            lambda: s.lambda,
            delta: s.delta,
            delta_ddot: ddot,
            passed: s.delta.abs() >= 1.0 - tol && s.delta * ddot < 0.0,
        });
    }

    Ok(InterlacingReport {
        case: case.into(),
        delta_zero,
        delta_dot_zero,
        s_2pi_zero,
        window: scan.window(),
        periodic_plus: pp.into_iter().take(count).collect(),
        periodic_minus: pm.into_iter().take(count).collect(),
        antiperiodic_plus: ap.into_iter().take(count).collect(),
        antiperiodic_minus: am.into_iter().take(count).collect(),
        checks,
        stationary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::builtin_model;

    #[test]
    fn chain_pattern() {
        let p = [1.0, 4.0, 5.0];
        let a = [2.0, 3.0, 6.0];
        let (items, strict) = chain(&p, &a, 3, '+');
        let names: Vec<&str> = items.iter().map(|i| i.0.as_str()).collect();
        assert_eq!(
            names,
            ["lambda1+(0)", "lambda1+(pi)", "lambda2+(pi)", "lambda2+(0)", "lambda3+(0)", "lambda3+(pi)"]
        );
        assert_eq!(strict, [true, false, true, false, true]);
        assert!(chain_checks(&items, &strict, true).iter().all(|c| c.outcome == CheckOutcome::Pass));
        let close = [1.0, 1.0 + 1e-15];
        let c = chain_checks(&[("a".into(), close[0]), ("b".into(), close[1])], &[true], true);
        assert_eq!(c[0].outcome, CheckOutcome::Unresolved);
    }

    #[test]
    fn labels_at_zero() {
        let roots = [
            LevelRoot { lambda: -2.0, multiplicity: 1 },
            LevelRoot { lambda: 0.0, multiplicity: 1 },
            LevelRoot { lambda: 3.0, multiplicity: 2 },
        ];
        let l = label_roots(&roots, EdgeKind::Periodic, 1.0);
        let s: Vec<String> = l.iter().map(|p| p.1.to_string()).collect();
        assert_eq!(s, ["lambda2-(0)", "lambda1-(0)", "lambda1+(0)", "lambda2+(0)"]);
        let l = label_roots(&roots, EdgeKind::Periodic, -1.0);
        assert_eq!(l[1].1.side, Side::Plus);
        let double = [LevelRoot { lambda: 0.0, multiplicity: 2 }];
        let l = label_roots(&double, EdgeKind::Periodic, 0.0);
        assert_eq!((l[0].1.side, l[1].1.side), (Side::Minus, Side::Plus));
    }

    #[test]
    fn dirichlet_spectrum_of_constant_model() {
        let r = dirichlet_spectrum(&builtin_model("const", &[]).unwrap(), (0.0, 2.0)).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.25).abs() < 1e-9 && (r[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_is_not_dirichlet_for_sgn_sin() {
        let r = dirichlet_spectrum(&builtin_model("sgn_sin", &[]).unwrap(), (-0.01, 0.01)).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn periodic_eigenvalues_of_constant_model() {
        let ev = quasi_momentum_eigenvalues(&builtin_model("const", &[]).unwrap(), 0.0, (-0.1, 4.5)).unwrap();
        let expect = [0.0, 1.0, 1.0, 4.0, 4.0];
        assert_eq!(ev.len(), 5, "{ev:?}");
        for (x, e) in ev.iter().zip(expect) {
            assert!((x - e).abs() < 1e-7, "{ev:?}");
        }
    }

    #[test]
    fn antiperiodic_eigenvalues_of_constant_model() {
        let ev = quasi_momentum_eigenvalues(&builtin_model("const", &[]).unwrap(), std::f64::consts::PI, (0.0, 2.5))
            .unwrap();
        let expect = [0.25, 0.25, 2.25, 2.25];
        assert_eq!(ev.len(), 4, "{ev:?}");
        for (x, e) in ev.iter().zip(expect) {
            assert!((x - e).abs() < 1e-7, "{ev:?}");
        }
    }

    #[test]
    fn sgn_sin_has_double_periodic_eigenvalue_at_zero() {
        let ev = quasi_momentum_eigenvalues(&builtin_model("sgn_sin", &[]).unwrap(), 0.0, (-0.5, 0.5)).unwrap();
        assert_eq!(ev.len(), 2, "{ev:?}");
        assert!(ev.iter().all(|x| x.abs() < 1e-7));
    }

    #[test]
    fn constant_model_bands_touch() {
        let b = compute_bands(&builtin_model("const", &[]).unwrap(), (-0.1, 4.5)).unwrap();
        let edges = [(0.0, 0.25), (0.25, 1.0), (1.0, 2.25), (2.25, 4.0), (4.0, 4.5)];
        assert_eq!(b.bands.len(), 5, "{:?}", b.bands);
        for (band, (lo, hi)) in b.bands.iter().zip(edges) {
            assert!((band.lo - lo).abs() < 1e-7 && (band.hi - hi).abs() < 1e-7, "{band:?}");
        }
        assert!(b.bands[4].truncated_hi && !b.bands[3].truncated_hi);
        assert_eq!(b.bands[0].lo_label.unwrap().to_string(), "lambda1+(0)");
        assert_eq!(b.bands[1].lo_label.unwrap().to_string(), "lambda2+(pi)");
        assert_eq!(b.bands[2].lo_label.unwrap().to_string(), "lambda3+(0)");
    }

    #[test]
    fn sgn_sin_bands_are_symmetric() {
        let b = compute_bands(&builtin_model("sgn_sin", &[]).unwrap(), (-5.0, 5.0)).unwrap();
        let n = b.bands.len();
        assert!(n >= 4);
        for i in 0..n {
            let (x, y) = (&b.bands[i], &b.bands[n - 1 - i]);
            assert!((x.lo + y.hi).abs() < 1e-8 && (x.hi + y.lo).abs() < 1e-8, "{x:?} {y:?}");
        }
    }

    #[test]
    fn interlacing_needs_sign_change() {
        let r = interlacing_report(&builtin_model("const", &[]).unwrap(), 3);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
