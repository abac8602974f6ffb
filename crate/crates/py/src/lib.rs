//! Python bindings: the main types and operations behind a thin string/dict
//! surface. Rationals cross the boundary as "p/q" strings, high-precision
//! values as decimal strings at the requested digit count, reports as dicts.

use eisterm::calculus::{constant_term, verify_identity};
use eisterm::constants::{
    c_mr, c_r_routes, d_mr, dec_string, golden_table, transfer_const, Route, TransferKind,
};
use eisterm::factor::{
    dnorm_series, factor_series, lambda_m as lambda_m_impl, make_factor, pz_eval, FactorKind,
};
use eisterm::precision::{parse_rational, PrecisionContext};
use eisterm::xi::{xi_conv, xi_series};
use eisterm::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn ctx_for(digits: u32) -> PyResult<PrecisionContext> {
    if digits < 20 {
        return Err(PyValueError::new_err("digits must be >= 20"));
    }
    Ok(PrecisionContext::new(digits))
}

fn err_py(e: Error) -> PyErr {
    match e {
        Error::Usage(m) | Error::Domain(m) | Error::Range(m) => PyValueError::new_err(m),
        Error::Precision(m) | Error::Internal(m) => PyRuntimeError::new_err(m),
    }
}

fn kind_of(name: &str) -> PyResult<FactorKind> {
    Ok(match name {
        "F" | "f" => FactorKind::F,
        "G" | "g" => FactorKind::G,
        "H" | "h" => FactorKind::H,
        "beta" => FactorKind::Beta,
        "sph" => FactorKind::Sph,
        _ => return Err(PyValueError::new_err(format!("unknown factor kind '{name}'"))),
    })
}

/// Laurent data of ξ at a rational center: (lead_exp, [coefficient strings]).
#[pyfunction]
#[pyo3(signature = (at, order = 0, digits = 50))]
fn xi(at: &str, order: i64, digits: u32) -> PyResult<(i64, Vec<String>)> {
    let ctx = ctx_for(digits)?;
    let center = parse_rational(at).map_err(err_py)?;
    let s = xi_series(&center, order, &ctx).map_err(err_py)?;
    let mut coeffs = Vec::new();
    for k in s.lead_exp()..=s.trunc_order() {
        coeffs.push(dec_string(
            &s.coeff(k).map_err(err_py)?.real().clone(),
            digits,
        ));
    }
    Ok((s.lead_exp(), coeffs))
}

/// ξ(n) under the residue convention, as a decimal string.
#[pyfunction]
#[pyo3(signature = (at, digits = 50))]
fn xi_value(at: &str, digits: u32) -> PyResult<String> {
    let ctx = ctx_for(digits)?;
    let n = parse_rational(at).map_err(err_py)?;
    let v = xi_conv(&n, &ctx).map_err(err_py)?;
    Ok(dec_string(&v, digits))
}

/// Canonical rendering of a named factor product.
#[pyfunction]
#[pyo3(signature = (kind, m, r = 0))]
fn factor_text(kind: &str, m: i64, r: i64) -> PyResult<String> {
    let f = make_factor(kind_of(kind)?, m, r).map_err(err_py)?;
    Ok(f.to_string())
}

/// Laurent data of a named factor product at a rational point.
#[pyfunction]
#[pyo3(signature = (kind, m, r, at, order = 1, digits = 50))]
fn factor_laurent(
    kind: &str,
    m: i64,
    r: i64,
    at: &str,
    order: i64,
    digits: u32,
) -> PyResult<(i64, Vec<String>)> {
    let ctx = ctx_for(digits)?;
    let f = make_factor(kind_of(kind)?, m, r).map_err(err_py)?;
    let s0 = parse_rational(at).map_err(err_py)?;
    let s = factor_series(&f, &s0, order, &ctx).map_err(err_py)?;
    let mut coeffs = Vec::new();
    for k in s.lead_exp()..=s.trunc_order() {
        coeffs.push(dec_string(
            &s.coeff(k).map_err(err_py)?.real().clone(),
            digits,
        ));
    }
    Ok((s.lead_exp(), coeffs))
}

/// Exact value of the regularizing polynomial, as a "p/q" string.
#[pyfunction]
fn pz(m: i64, r: i64, at: &str) -> PyResult<String> {
    let s = parse_rational(at).map_err(err_py)?;
    Ok(pz_eval(m, r, &s).map_err(err_py)?.to_string())
}

#[pyfunction]
#[pyo3(signature = (m, digits = 50))]
fn lambda_m(m: i64, digits: u32) -> PyResult<String> {
    let ctx = ctx_for(digits)?;
    Ok(dec_string(&lambda_m_impl(m, &ctx).map_err(err_py)?, digits))
}

/// Doubling normalizer d_m^S at a point: (lead_exp, [coefficients]).
#[pyfunction]
#[pyo3(signature = (m, at, primes = vec![], order = 0, digits = 50))]
fn dnorm(m: i64, at: &str, primes: Vec<u64>, order: i64, digits: u32) -> PyResult<(i64, Vec<String>)> {
    let ctx = ctx_for(digits)?;
    let s0 = parse_rational(at).map_err(err_py)?;
    let s = dnorm_series(m, &s0, &primes, order, &ctx).map_err(err_py)?;
    let mut coeffs = Vec::new();
    for k in s.lead_exp()..=s.trunc_order() {
        coeffs.push(dec_string(
            &s.coeff(k).map_err(err_py)?.real().clone(),
            digits,
        ));
    }
    Ok((s.lead_exp(), coeffs))
}

/// One named constant: dict {name, m, r, digits, value, d_power}.
#[pyfunction]
#[pyo3(signature = (name, m = 0, r = 0, digits = 50))]
fn constant(py: Python<'_>, name: &str, m: i64, r: i64, digits: u32) -> PyResult<PyObject> {
    let ctx = ctx_for(digits)?;
    let c = match name {
        "c" => c_mr(m, r, Route::Closed, &ctx).map_err(err_py)?,
        "cr" => {
            let (v, _) = c_r_routes(r, &ctx).map_err(err_py)?;
            let d = PyDict::new(py);
            d.set_item("name", "cr")?;
            d.set_item("m", 2 * r + 1)?;
            d.set_item("r", r)?;
            d.set_item("digits", digits)?;
            d.set_item("value", dec_string(&v, digits))?;
            d.set_item("d_power", "0")?;
            return Ok(d.into());
        }
        "d" => d_mr(m, r, &ctx).map_err(err_py)?,
        "a" => transfer_const(TransferKind::A, m, r, &ctx).map_err(err_py)?,
        "b" => transfer_const(TransferKind::B, m, r, &ctx).map_err(err_py)?,
        "kappa" => transfer_const(TransferKind::Kappa, m, r, &ctx).map_err(err_py)?,
        _ => return Err(PyValueError::new_err(format!("unknown constant '{name}'"))),
    };
    let d = PyDict::new(py);
    d.set_item("name", c.name)?;
    d.set_item("m", c.m)?;
    d.set_item("r", c.r)?;
    d.set_item("digits", digits)?;
    d.set_item("value", dec_string(&c.value, digits))?;
    d.set_item("d_power", c.d_power.to_string())?;
    Ok(d.into())
}

/// The deterministic golden table, as a JSON string.
#[pyfunction]
#[pyo3(signature = (max_m = 10, max_r = 4, digits = 50))]
fn golden_json(max_m: i64, max_r: i64, digits: u32) -> PyResult<String> {
    let ctx = ctx_for(digits)?;
    let t = golden_table(&ctx, max_m, max_r).map_err(err_py)?;
    serde_json::to_string_pretty(&t).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Re-derive one identity; returns the full report as a dict.
#[pyfunction]
#[pyo3(signature = (id, m = None, r = None, digits = 50))]
fn verify(py: Python<'_>, id: &str, m: Option<i64>, r: Option<i64>, digits: u32) -> PyResult<PyObject> {
    let ctx = ctx_for(digits)?;
    let rep = verify_identity(id, m, r, &ctx).map_err(err_py)?;
    let d = PyDict::new(py);
    d.set_item("id", &rep.id)?;
    d.set_item("m", rep.m)?;
    d.set_item("r", rep.r)?;
    d.set_item("digits", rep.digits)?;
    d.set_item("pass", rep.pass)?;
    let buckets: Vec<(String, u8, String)> = rep
        .buckets
        .iter()
        .map(|b| (b.exponent.clone(), b.logdeg, b.residual.clone()))
        .collect();
    d.set_item("buckets", buckets)?;
    let derived = PyDict::new(py);
    for (k, v) in &rep.derived {
        derived.set_item(k, v)?;
    }
    d.set_item("derived", derived)?;
    let comps: Vec<(String, String, String, bool)> = rep
        .comparisons
        .iter()
        .map(|c| (c.name.clone(), c.engine.clone(), c.reference.clone(), c.pass))
        .collect();
    d.set_item("comparisons", comps)?;
    d.set_item("notes", rep.notes.clone())?;
    Ok(d.into())
}

/// Structure of the rank-one constant term: list of
/// (alpha, beta, factor, family_m, family_r, family_shift).
#[pyfunction]
fn constant_term_terms(m: i64, r: i64) -> PyResult<Vec<(i64, String, String, i64, i64, String)>> {
    let terms = constant_term(m, r).map_err(err_py)?;
    Ok(terms
        .into_iter()
        .map(|t| {
            (
                t.alpha,
                t.beta.to_string(),
                t.factor.to_string(),
                t.family.m,
                t.family.r,
                t.family.arg_shift.to_string(),
            )
        })
        .collect())
}

#[pymodule]
fn eisterm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(xi_value, m)?)?;
    m.add_function(wrap_pyfunction!(factor_text, m)?)?;
    m.add_function(wrap_pyfunction!(factor_laurent, m)?)?;
    m.add_function(wrap_pyfunction!(pz, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_m, m)?)?;
    m.add_function(wrap_pyfunction!(dnorm, m)?)?;
    m.add_function(wrap_pyfunction!(constant, m)?)?;
    m.add_function(wrap_pyfunction!(golden_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(constant_term_terms, m)?)?;
    Ok(())
}
