//! Python bindings: exact region queries, lemma suites, Reed–Solomon
//! erasure coding and exact code simulation.

use eacq_core::codes::{block_erasure_for, code_from_spec, fixture_names as core_fixture_names, simulate as core_simulate, RSCode};
use eacq_core::lemmas::{run_suite, Suite};
use eacq_core::region::{parse_rational, IidParams, RateTriple, RegionParams, SingletonParams};
use eacq_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Verification(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn params(n: Option<usize>, d: Option<usize>, q: usize, delta: Option<&str>) -> PyResult<RegionParams> {
    match (n, d, delta) {
        (Some(n), Some(d), None) => Ok(RegionParams::Singleton(SingletonParams::new(n, d, q).map_err(to_py)?)),
        (None, None, Some(delta)) => {
            let delta = parse_rational(delta).map_err(to_py)?;
            Ok(RegionParams::Iid(IidParams::new(q, delta).map_err(to_py)?))
        }
        _ => Err(PyValueError::new_err("give either n and d, or delta")),
    }
}

/// Feasible t′ interval of `triple` ("C,Q,E" in units of log q), or None.
#[pyfunction]
#[pyo3(signature = (triple, n=None, d=None, q=2, delta=None))]
fn membership(triple: &str, n: Option<usize>, d: Option<usize>, q: usize, delta: Option<&str>) -> PyResult<Option<(String, String)>> {
    let p = params(n, d, q, delta)?;
    let x: RateTriple = triple.parse().map_err(to_py)?;
    Ok(p.membership(&x).interval.map(|(a, b)| (a.to_string(), b.to_string())))
}

/// Irredundant inequalities [cC, cQ, cE, rhs] as rational strings.
#[pyfunction]
#[pyo3(signature = (n=None, d=None, q=2, delta=None))]
fn hrep(n: Option<usize>, d: Option<usize>, q: usize, delta: Option<&str>) -> PyResult<Vec<Vec<String>>> {
    let p = params(n, d, q, delta)?;
    Ok(p.hrep().rows().iter().map(|r| r.to_strings().to_vec()).collect())
}

/// The apex endpoints (a0, a1) as rational-string triples.
#[pyfunction]
#[pyo3(signature = (n=None, d=None, q=2, delta=None))]
fn apex(n: Option<usize>, d: Option<usize>, q: usize, delta: Option<&str>) -> PyResult<([String; 3], [String; 3])> {
    let g = params(n, d, q, delta)?.geometry();
    Ok((g.a0.to_strings(), g.a1.to_strings()))
}

/// Run a lemma suite; returns (pass, checks, worst excess in bits).
#[pyfunction]
#[pyo3(signature = (suite, trials=100, seed=0))]
fn lemma_suite(suite: &str, trials: usize, seed: u64) -> PyResult<(bool, usize, f64)> {
    let mut pass = true;
    let mut checks = 0;
    let mut worst = f64::NEG_INFINITY;
    for s in Suite::parse(suite).map_err(to_py)? {
        let r = run_suite(s, trials, seed, None).map_err(to_py)?;
        pass &= r.pass();
        checks += r.checks;
        worst = worst.max(r.worst_excess);
    }
    Ok((pass, checks, worst))
}

/// Reed–Solomon codeword of `msg` (coefficients, constant term first).
#[pyfunction]
fn rs_encode(q: u64, n: usize, k: usize, msg: Vec<u64>) -> PyResult<Vec<u64>> {
    RSCode::new(q, n, k).and_then(|c| c.encode(&msg)).map_err(to_py)
}

/// Recover the message from a word with erasures marked as None.
#[pyfunction]
fn rs_erasure_decode(q: u64, n: usize, k: usize, received: Vec<Option<u64>>) -> PyResult<Vec<u64>> {
    RSCode::new(q, n, k).and_then(|c| c.erasure_decode(&received)).map_err(to_py)
}

#[pyfunction]
fn fixture_names() -> Vec<String> {
    core_fixture_names().into_iter().map(String::from).collect()
}

/// Simulate a code (rs:q,n,k, eaq:n,d,q, <protocol>:q or a fixture) with
/// `erasures` uniform erasures (default d − 1); returns the JSON report.
#[pyfunction]
#[pyo3(signature = (code, erasures=None))]
fn simulate(code: &str, erasures: Option<usize>) -> PyResult<String> {
    let (code, q) = code_from_spec(code).map_err(to_py)?;
    let w = erasures.unwrap_or_else(|| code.params().map_or(0, |p| p.d.saturating_sub(1)));
    let ch = block_erasure_for(&code, w).map_err(to_py)?;
    let report = core_simulate(&code, &ch).and_then(|r| r.report(&code, q)).map_err(to_py)?;
    Ok(report.to_string())
}

#[pymodule]
fn eacq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(hrep, m)?)?;
    m.add_function(wrap_pyfunction!(apex, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_suite, m)?)?;
    m.add_function(wrap_pyfunction!(rs_encode, m)?)?;
    m.add_function(wrap_pyfunction!(rs_erasure_decode, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
