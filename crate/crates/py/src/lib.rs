//! Python bindings. Graphs cross the boundary as `(n, [(u, v), ...])` with
//! 0-indexed vertices.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qchrom::chromatic::{self, Colorability};
use qchrom::io::{self, Certificate};
use qchrom::{game, ks, reps, Error, Graph};

const BUDGET: u64 = 10_000_000;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn graph(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Graph> {
    Graph::new(n, &edges).map_err(py_err)
}

fn params(seed: u64) -> reps::SearchParams {
    reps::SearchParams {
        seed,
        ..Default::default()
    }
}

/// Returns `(chi, assignment)`.
#[pyfunction]
#[pyo3(signature = (n, edges, budget = BUDGET))]
fn chromatic_number(n: usize, edges: Vec<(usize, usize)>, budget: u64) -> PyResult<(usize, Vec<usize>)> {
    let r = chromatic::chromatic_number(&graph(n, edges)?, budget).map_err(py_err)?;
    Ok((r.chi, r.certificate.assignment))
}

/// Returns `(omega, clique)`.
#[pyfunction]
#[pyo3(signature = (n, edges, budget = BUDGET))]
fn clique_number(n: usize, edges: Vec<(usize, usize)>, budget: u64) -> PyResult<(usize, Vec<usize>)> {
    let r = chromatic::clique_number(&graph(n, edges)?, budget).map_err(py_err)?;
    Ok((r.size, r.clique))
}

/// A coloring with at most `colors` colors, or `None` if there is none.
#[pyfunction]
#[pyo3(signature = (n, edges, colors, budget = BUDGET))]
fn is_colorable(n: usize, edges: Vec<(usize, usize)>, colors: usize, budget: u64) -> PyResult<Option<Vec<usize>>> {
    match chromatic::is_c_colorable(&graph(n, edges)?, colors, budget).map_err(py_err)? {
        Colorability::Yes(cert) => Ok(Some(cert.assignment)),
        Colorability::No { .. } => Ok(None),
        Colorability::BudgetExceeded { nodes } => Err(PyRuntimeError::new_err(format!(
            "budget exhausted after {nodes} nodes"
        ))),
    }
}

/// Returns `(lower, upper)` bounds on the orthogonal rank.
#[pyfunction]
#[pyo3(signature = (n, edges, seed = 0))]
fn xi_bounds(n: usize, edges: Vec<(usize, usize)>, seed: u64) -> PyResult<(usize, usize)> {
    let b = reps::xi_bounds(&graph(n, edges)?, &params(seed)).map_err(py_err)?;
    Ok((b.lower, b.upper))
}

#[pyfunction]
#[pyo3(signature = (n, edges, cmax, seed = 0))]
fn chi_q1_upper(n: usize, edges: Vec<(usize, usize)>, cmax: usize, seed: u64) -> PyResult<Option<usize>> {
    let r = reps::chi_q1_upper_via_product(&graph(n, edges)?, cmax, &params(seed), BUDGET).map_err(py_err)?;
    Ok(r.map(|b| b.colors))
}

/// `set` is a bundled name or the text of a vector-set JSON file.
#[pyfunction]
#[pyo3(signature = (set, weak = false))]
fn ks_check<'py>(py: Python<'py>, set: &str, weak: bool) -> PyResult<Bound<'py, PyDict>> {
    let vs = if ks::BUNDLED.contains(&set) {
        ks::bundled(set)
    } else {
        io::parse_vector_set(set).map(|(v, _)| v)
    }
    .map_err(py_err)?;
    let d = if weak { ks::weak_ks_check(&vs) } else { ks::ks_check(&vs) }.map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("rays", vs.len())?;
    out.set_item("is_ks", d.is_ks)?;
    out.set_item("is_weak_ks", d.is_weak_ks)?;
    out.set_item("holds", d.holds())?;
    out.set_item("witness", d.witness)?;
    Ok(out)
}

#[pyfunction]
fn hadamard_graph(bits: usize) -> PyResult<(usize, Vec<(usize, usize)>)> {
    let g = Graph::hadamard(bits).map_err(py_err)?;
    Ok((g.vertex_count(), g.edges().to_vec()))
}

/// Builds the rank-1 quantum coloring of `G_bits` and runs the verifier on it.
#[pyfunction]
#[pyo3(signature = (bits, tol = qchrom::DEFAULT_TOL))]
fn hadamard_coloring_valid(bits: usize, tol: f64) -> PyResult<bool> {
    let qc = reps::hadamard_quantum_coloring(bits).map_err(py_err)?;
    let g = Graph::hadamard(bits).map_err(py_err)?;
    reps::verify_quantum_coloring(&g, &qc, tol).map_err(py_err)
}

/// Best deterministic strategy with `colors` colors: `(won, total)` question pairs.
#[pyfunction]
fn max_classical_win(n: usize, edges: Vec<(usize, usize)>, colors: usize) -> PyResult<(u64, u64)> {
    let (won, total, _) = game::max_classical_win_count(&graph(n, edges)?, colors).map_err(py_err)?;
    Ok((won, total))
}

/// Re-verifies a coloring, orthrep, matrixrep or qcoloring certificate file.
#[pyfunction]
#[pyo3(signature = (n, edges, certificate, tol = qchrom::DEFAULT_TOL))]
fn verify_certificate(n: usize, edges: Vec<(usize, usize)>, certificate: &str, tol: f64) -> PyResult<bool> {
    let g = graph(n, edges)?;
    let (cert, _) = io::parse_certificate(certificate).map_err(py_err)?;
    match &cert {
        Certificate::Coloring(c) => chromatic::verify_coloring(&g, c),
        Certificate::OrthRep(r) => reps::verify_orthogonal_representation(&g, r, tol),
        Certificate::MatrixRep(r) => reps::verify_matrix_representation(&g, r, tol),
        Certificate::QColoring(q) => reps::verify_quantum_coloring(&g, q, tol),
        other => {
            return Err(PyValueError::new_err(format!(
                "cannot verify a {} certificate against a graph",
                other.kind()
            )))
        }
    }
    .map_err(py_err)
}

/// Returns `(n, edges)`; warnings are dropped.
#[pyfunction]
fn parse_dimacs(text: &str) -> PyResult<(usize, Vec<(usize, usize)>)> {
    let (g, _) = io::parse_dimacs(text).map_err(py_err)?;
    Ok((g.vertex_count(), g.edges().to_vec()))
}

#[pymodule]
pub fn qchrom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(chromatic_number, m)?)?;
    m.add_function(wrap_pyfunction!(clique_number, m)?)?;
    m.add_function(wrap_pyfunction!(is_colorable, m)?)?;
    m.add_function(wrap_pyfunction!(xi_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(chi_q1_upper, m)?)?;
    m.add_function(wrap_pyfunction!(ks_check, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_graph, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_coloring_valid, m)?)?;
    m.add_function(wrap_pyfunction!(max_classical_win, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_dimacs, m)?)?;
    Ok(())
}
