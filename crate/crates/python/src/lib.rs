//! Python bindings: `import floquet`.

use floquet_core::bands::{compute_bands, dirichlet_spectrum, quasi_momentum_eigenvalues};
use floquet_core::coeffs::{parse_coefficient_spec, to_coefficient_spec};
use floquet_core::criticality::{self, CriticalityReport};
use floquet_core::floquet::floquet_data;
use floquet_core::resolvent::{geometric_grid, resolvent_norm_curve};
use floquet_core::transfer::Transfer;
use floquet_core::{builtin_model, Complex64, Error, PeriodicCoefficients};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// Periodic coefficients q and ω of `-y'' + q y = z ω y` on [0, 2π).
#[pyclass(name = "Coefficients", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyCoefficients {
    inner: PeriodicCoefficients,
}

#[pymethods]
impl PyCoefficients {
    /// A named model: "sgn_sin", "shifted_sgn" (one parameter a) or "const".
    #[staticmethod]
    #[pyo3(signature = (name, params = Vec::new()))]
    fn builtin(name: &str, params: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: builtin_model(name, &params).map_err(to_py)? })
    }

    /// Parses a JSON coefficient document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_coefficient_spec(text).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        to_coefficient_spec(&self.inner)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    /// Coefficient values `(q(x), ω(x))`.
    fn values(&self, x: f64) -> (f64, f64) {
        (self.inner.q().value(x), self.inner.w().value(x))
    }

    fn __repr__(&self) -> String {
        format!("Coefficients({:?})", self.inner.label)
    }
}

/// Monodromy entries `(c, s, c', s')` at x = 2π.
#[pyfunction]
fn monodromy(coeffs: &PyCoefficients, z: Complex64) -> PyResult<(Complex64, Complex64, Complex64, Complex64)> {
    let m = Transfer::new(&coeffs.inner).monodromy(z).map_err(to_py)?;
    Ok((m.c, m.s, m.cp, m.sp))
}

/// `(Δ(z), Δ•(z))`.
#[pyfunction]
fn discriminant(coeffs: &PyCoefficients, z: Complex64) -> PyResult<(Complex64, Complex64)> {
    let d = Transfer::new(&coeffs.inner).discriminant_with_derivative(z).map_err(to_py)?;
    Ok((d.delta, d.delta_dot.unwrap_or_default()))
}

/// `(ρ₊, ρ₋, m₊, m₋)` at z.
#[pyfunction(name = "floquet")]
fn floquet_at(coeffs: &PyCoefficients, z: Complex64) -> PyResult<(Complex64, Complex64, Complex64, Complex64)> {
    let m = Transfer::new(&coeffs.inner).monodromy(z).map_err(to_py)?;
    let d = floquet_data(&m, None).map_err(to_py)?;
    Ok((d.rho_plus, d.rho_minus, d.m_plus, d.m_minus))
}

/// Band intervals `(lo, hi)` meeting the window `[lo, hi]`.
#[pyfunction]
fn bands(coeffs: &PyCoefficients, lo: f64, hi: f64) -> PyResult<Vec<(f64, f64)>> {
    let spec = compute_bands(&coeffs.inner, (lo, hi)).map_err(to_py)?;
    Ok(spec.bands.iter().map(|b| (b.lo, b.hi)).collect())
}

#[pyfunction]
fn dirichlet(coeffs: &PyCoefficients, lo: f64, hi: f64) -> PyResult<Vec<f64>> {
    dirichlet_spectrum(&coeffs.inner, (lo, hi)).map_err(to_py)
}

/// Eigenvalues of the problem with `f(0) = e^{it} f(2π)`, with multiplicity.
#[pyfunction(name = "quasi_momentum_eigenvalues")]
fn quasi_momentum_eigenvalues_in(coeffs: &PyCoefficients, t: f64, lo: f64, hi: f64) -> PyResult<Vec<f64>> {
    quasi_momentum_eigenvalues(&coeffs.inner, t, (lo, hi)).map_err(to_py)
}

#[pyclass(name = "CriticalityReport", frozen)]
pub struct PyReport {
    inner: CriticalityReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn zero_status(&self) -> &'static str {
        self.inner.zero_status.as_str()
    }

    #[getter]
    fn infinity_status(&self) -> &'static str {
        self.inner.infinity_status.as_str()
    }

    #[getter]
    fn similar_to_selfadjoint(&self) -> &'static str {
        self.inner.similar_to_selfadjoint.as_str()
    }

    #[getter]
    fn criterion_integral(&self) -> Option<f64> {
        self.inner.diagnostics.criterion_integral
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.diagnostics.notes.clone()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }
}

/// Positivity check, classification of 0 and ∞, and the similarity verdict.
#[pyfunction]
#[pyo3(signature = (coeffs, tol = criticality::DEFAULT_TOL))]
fn classify(coeffs: &PyCoefficients, tol: f64) -> PyReport {
    PyReport { inner: criticality::similarity_verdict_with(&coeffs.inner, tol) }
}

/// Resolvent norms `‖(S - iy)⁻¹‖` on geometric y samples and the fitted
/// growth exponent.
#[pyfunction]
#[pyo3(signature = (coeffs, t = 0.0, n = 2048, ymin = 1e-2, ymax = 1e-1, steps = 12))]
fn probe(
    coeffs: &PyCoefficients,
    t: f64,
    n: usize,
    ymin: f64,
    ymax: f64,
    steps: usize,
) -> PyResult<(Vec<(f64, f64)>, f64)> {
    let ys = geometric_grid(ymax, ymin, steps);
    let r = resolvent_norm_curve(&coeffs.inner, t, &ys, n).map_err(to_py)?;
    Ok((r.samples, r.fitted_exponent))
}

#[pymodule(name = "floquet")]
pub fn floquet_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoefficients>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(monodromy, m)?)?;
    m.add_function(wrap_pyfunction!(discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(floquet_at, m)?)?;
    m.add_function(wrap_pyfunction!(bands, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet, m)?)?;
    m.add_function(wrap_pyfunction!(quasi_momentum_eigenvalues_in, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    Ok(())
}
