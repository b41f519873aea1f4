//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails. Tolerances and runtime budgets are fixed below.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use floquet_core::bands::{compute_bands, interlacing_report, quasi_momentum_eigenvalues, LevelScan};
use floquet_core::criticality::{criterion_integral, similarity_verdict, InfinityStatus, Verdict, ZeroStatus};
use floquet_core::floquet::{floquet_multipliers, floquet_solutions};
use floquet_core::resolvent::{esssup_at, geometric_grid, resolvent_norm_curve};
use floquet_core::transfer::{exact_monodromy_pc, Transfer};
use floquet_core::{builtin_model, Complex64 as C, PeriodicCoefficients, Result};

const IDENTITY_TOL: f64 = 1e-9;
const WRONSKIAN_TOL: f64 = 1e-7;
const ORACLE_TOL: f64 = 1e-8;
const DERIVATIVE_TOL: f64 = 1e-6;
const EXAMPLE_INTEGRAL_TOL: f64 = 1e-10;
const EXAMPLE_DISCRIMINANT_TOL: f64 = 1e-8;
const SHIFTED_INTEGRAL_TOL: f64 = 1e-9;
const BAND_TOL: f64 = 1e-8;
const SINGULAR_EXPONENT: (f64, f64) = (1.7, 2.3);
const REGULAR_EXPONENT_MAX: f64 = 1.3;
const SELF_ADJOINT_REL: f64 = 0.10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn models() -> Vec<PeriodicCoefficients> {
    vec![
        builtin_model("sgn_sin", &[]).unwrap(),
        builtin_model("shifted_sgn", &[PI / 2.0]).unwrap(),
        builtin_model("const", &[]).unwrap(),
    ]
}

/// 10 × 10 grid on [-10, 10] × [-5, 5], shifted off the real axis.
fn complex_samples() -> Vec<C> {
    let mut zs = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            zs.push(C::new(-10.0 + 20.0 * (i as f64 + 0.5) / 10.0, -5.0 + 10.0 * (j as f64 + 0.37) / 10.0));
        }
    }
    zs
}

fn identities() -> Result<Outcome> {
    let mut worst_det = 0.0f64;
    let mut worst_rho = 0.0f64;
    for m in models() {
        let t = Transfer::new(&m);
        for z in complex_samples() {
            let mono = t.monodromy(z)?;
            worst_det = worst_det.max((mono.det() - 1.0).norm() / mono.det_scale());
            let (rp, rm) = floquet_multipliers(mono.half_trace(), None);
            worst_rho = worst_rho.max((rp * rm - 1.0).norm() / rm.norm().max(1.0));
        }
    }

    // Wronskian of the Floquet solutions: constant in x, equal to m₋ − m₊
    // and to −2i√(1 − Δ²)/s(2π) on the branch selected by ρ₊.
    let grid: Vec<f64> = (0..=64).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
    let mut worst_w = 0.0f64;
    for m in models() {
        for k in 0..7 {
            let z = C::new(-4.5 + 1.5 * k as f64, 0.5 + 0.25 * k as f64);
            let sol = floquet_solutions(&m, z, &grid)?;
            let d = sol.data;
            let mono = Transfer::new(&m).monodromy(z)?;
            let delta = mono.half_trace();
            let root = (C::new(1.0, 0.0) - delta * delta).sqrt();
            let i_root = C::new(0.0, 1.0) * root;
            let sigma = if (d.rho_plus - (delta + i_root)).norm() <= (d.rho_plus - (delta - i_root)).norm() {
                1.0
            } else {
                -1.0
            };
            let closed = -2.0 * sigma * i_root / mono.s;
            let target = d.m_minus - d.m_plus;
            let scale = target.norm().max(1.0);
            for w in sol.wronskians() {
                worst_w = worst_w.max((w - target).norm() / scale);
            }
            worst_w = worst_w.max((closed - target).norm() / scale);
        }
    }
    ok(
        worst_det <= IDENTITY_TOL && worst_rho <= IDENTITY_TOL && worst_w <= WRONSKIAN_TOL,
        format!(
            "det rel {worst_det:.2e}, rho+rho- rel {worst_rho:.2e} (tol {IDENTITY_TOL:e}); wronskian rel {worst_w:.2e} (tol {WRONSKIAN_TOL:e}), 21 points"
        ),
    )
}

fn oracle() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for m in models().into_iter().take(2) {
        let t = Transfer::new(&m);
        for z in complex_samples() {
            let num = t.monodromy(z)?.half_trace();
            let exact = exact_monodromy_pc(&m, z)?.half_trace();
            worst = worst.max((num - exact).norm() / exact.norm().max(1.0));
        }
    }
    ok(worst <= ORACLE_TOL, format!("max |dDelta|/max(1,|Delta|) = {worst:.2e} (tol {ORACLE_TOL:e}), 200 samples"))
}

/// Richardson extrapolation of central differences of Δ.
fn richardson(t: &Transfer<'_>, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> {
        let p = t.discriminant(C::new(x + h, 0.0))?.delta.re;
        let m = t.discriminant(C::new(x - h, 0.0))?.delta.re;
        Ok((p - m) / (2.0 * h))
    };
    Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
}

fn derivative() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for m in models().into_iter().take(2) {
        let t = Transfer::new(&m);
        for k in 0..10 {
            let x = -4.75 + k as f64;
            let var = t.discriminant_with_derivative(C::new(x, 0.0))?.delta_dot.unwrap().re;
            let fd = richardson(&t, x, 1e-2)?;
            worst = worst.max((var - fd).abs() / var.abs().max(1.0));
        }
    }

    // Δ•(0) = −½ s(2π, 0) ∫ ψ₊(·, 0)² ω, against the closed forms 0 and π².
    let mut ident = Vec::new();
    for (m, expected) in models().into_iter().take(2).zip([0.0, PI * PI]) {
        let t = Transfer::new(&m);
        let v = t.discriminant_with_derivative(C::new(0.0, 0.0))?;
        let lhs = v.delta_dot.unwrap().re;
        let s = t.monodromy(C::new(0.0, 0.0))?.s.re;
        let rhs = -0.5 * s * criterion_integral(&m)?;
        ident.push((lhs, rhs, expected));
    }
    let ident_ok = ident
        .iter()
        .all(|&(l, r, e)| (l - r).abs() <= DERIVATIVE_TOL && (l - e).abs() <= DERIVATIVE_TOL);
    ok(
        worst <= DERIVATIVE_TOL && ident_ok,
        format!(
            "variational vs Richardson rel {worst:.2e} on 20 points; identity sgn_sin {:.3e} = {:.3e}, shifted_sgn(pi/2) {:.9} = {:.9} (pi^2 = {:.9}) (tol {DERIVATIVE_TOL:e})",
            ident[0].0, ident[0].1, ident[1].0, ident[1].1, PI * PI
        ),
    )
}

fn example_sgn_sin() -> Result<Outcome> {
    let m = builtin_model("sgn_sin", &[]).unwrap();
    let r = similarity_verdict(&m);
    let d = &r.diagnostics;
    let integral = d.criterion_integral.unwrap_or(f64::NAN);
    let delta = d.delta_zero.unwrap_or(f64::NAN);
    let delta_dot = d.delta_dot_zero.unwrap_or(f64::NAN);
    let passed = integral.abs() <= EXAMPLE_INTEGRAL_TOL
        && (delta - 1.0).abs() <= EXAMPLE_DISCRIMINANT_TOL
        && delta_dot.abs() <= EXAMPLE_DISCRIMINANT_TOL
        && r.zero_status == ZeroStatus::CriticalSingular
        && r.infinity_status == InfinityStatus::Regular
        && r.similar_to_selfadjoint == Verdict::No;
    ok(
        passed,
        format!(
            "integral {integral:.2e}, Delta(0)-1 {:.2e}, Delta'(0) {:.2e}, {} / {} / {}",
            delta - 1.0,
            delta_dot,
            r.zero_status.as_str(),
            r.infinity_status.as_str(),
            r.similar_to_selfadjoint.as_str()
        ),
    )
}

fn example_shifted() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for a in [0.1, 0.5, PI / 2.0, 2.0] {
        let m = builtin_model("shifted_sgn", &[a]).unwrap();
        let r = similarity_verdict(&m);
        let integral = r.diagnostics.criterion_integral.unwrap_or(f64::NAN);
        let err = (integral + 2.0 * a).abs();
        passed &= err <= SHIFTED_INTEGRAL_TOL && r.similar_to_selfadjoint == Verdict::Yes;
        parts.push(format!("a={a:.4}: err {err:.1e} {}", r.similar_to_selfadjoint.as_str()));
    }
    ok(passed, format!("{} (tol {SHIFTED_INTEGRAL_TOL:e})", parts.join(", ")))
}

fn interlacing() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, p) in [("sgn_sin", vec![]), ("shifted_sgn", vec![PI / 2.0])] {
        let m = builtin_model(name, &p).unwrap();
        let r = interlacing_report(&m, 3)?;
        let scan = LevelScan::new(&m, (-20.0, 20.0))?;
        let mut stationary_ok = true;
        for s in scan.stationary_points() {
            stationary_ok &= s.delta * scan.delta_ddot(s.lambda)? < 0.0;
        }
        let failed = r.checks.iter().filter(|c| c.outcome != floquet_core::bands::CheckOutcome::Pass).count();
        passed &= r.all_passed() && stationary_ok;
        parts.push(format!(
            "{name}: case {}, {}/{} inequalities, {} stationary points {}",
            r.case,
            r.checks.len() - failed,
            r.checks.len(),
            scan.stationary_points().len(),
            if stationary_ok { "ok" } else { "violated" }
        ));
    }
    ok(passed, parts.join("; "))
}

fn probe() -> Result<Outcome> {
    let ys = geometric_grid(1e-1, 1e-2, 12);
    let sing = resolvent_norm_curve(&builtin_model("sgn_sin", &[]).unwrap(), 0.0, &ys, 2048)?;
    let reg = resolvent_norm_curve(&builtin_model("shifted_sgn", &[PI / 2.0]).unwrap(), 0.0, &ys, 2048)?;
    let (lo, hi) = SINGULAR_EXPONENT;
    ok(
        (lo..=hi).contains(&sing.fitted_exponent) && reg.fitted_exponent <= REGULAR_EXPONENT_MAX,
        format!(
            "sgn_sin exponent {:.4} in [{lo}, {hi}], shifted_sgn(pi/2) exponent {:.4} <= {REGULAR_EXPONENT_MAX}",
            sing.fitted_exponent, reg.fitted_exponent
        ),
    )
}

fn band_union() -> Result<Outcome> {
    let window = (-10.0, 10.0);
    let mut count = 0;
    let mut outside = Vec::new();
    for m in models() {
        let bands = compute_bands(&m, window)?;
        for t in [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI] {
            for ev in quasi_momentum_eigenvalues(&m, t, window)? {
                count += 1;
                if !bands.contains(ev, BAND_TOL) {
                    outside.push(format!("{} t={t:.3} {ev}", m.label));
                }
            }
        }
    }
    ok(outside.is_empty(), format!("{count} eigenvalues checked, {} outside bands (tol {BAND_TOL:e}) {outside:?}", outside.len()))
}

fn self_adjoint() -> Result<Outcome> {
    let m = builtin_model("const", &[]).unwrap();
    let mut worst = 0.0f64;
    for z in [C::new(-1.0, 0.5), C::new(0.0, 1.0), C::new(0.0, 2.0), C::new(1.0, 0.5), C::new(4.0, 1.0)] {
        // Spectrum of -y'' on the line is [0, ∞).
        let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
        let norm = esssup_at(&m, z, 16, 1024)?.value;
        worst = worst.max((norm * dist - 1.0).abs());
    }
    ok(worst <= SELF_ADJOINT_REL, format!("max |norm*dist - 1| = {worst:.3e} (tol {SELF_ADJOINT_REL}), 5 points"))
}

fn main() {
    type Criterion = (&'static str, u64, fn() -> Result<Outcome>);
    let criteria: [Criterion; 9] = [
        ("floquet identities", 10, identities),
        ("piecewise-constant oracle", 10, oracle),
        ("discriminant derivative", 10, derivative),
        ("sgn_sin example", 5, example_sgn_sin),
        ("shifted_sgn example", 10, example_shifted),
        ("interlacing and stationary points", 30, interlacing),
        ("resolvent growth exponent", 120, probe),
        ("band union", 30, band_union),
        ("self-adjoint resolvent", 10, self_adjoint),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (passed, detail) = match result {
            Ok(o) => (o.passed && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {} {}: {} [{:.2}s / {budget}s] {detail}",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
