//! `import heursynth`: load instances, search with the built-in heuristics
//! and validate plans. Results come back as the same JSON the CLI prints.

use std::path::PathBuf;

use heursynth_core::{load_instance_file, load_instance_str, Algorithm, HeuristicSpec, Limits, TaskModel};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn model(instance: &str) -> PyResult<TaskModel> {
    let loaded = if instance.trim_start().starts_with('{') {
        load_instance_str(instance)
    } else {
        load_instance_file(&PathBuf::from(instance))
    };
    loaded.map_err(|e| PyValueError::new_err(e.to_string()))
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    match name {
        "bfs" => Ok(Algorithm::Bfs),
        "gbfs" => Ok(Algorithm::Gbfs),
        other => Err(PyValueError::new_err(format!("unknown algorithm {other:?} (bfs or gbfs)"))),
    }
}

/// Domain name of an instance (a path or inline JSON).
#[pyfunction]
fn domain_of(instance: &str) -> PyResult<String> {
    Ok(model(instance)?.domain_name().to_string())
}

/// Searches an instance; returns the result JSON string.
#[pyfunction]
#[pyo3(signature = (instance, algorithm="gbfs", heuristic="hmd", time_limit=60.0, memory_mb=4096, max_expansions=None))]
fn solve(
    py: Python<'_>,
    instance: &str,
    algorithm: &str,
    heuristic: &str,
    time_limit: f64,
    memory_mb: u64,
    max_expansions: Option<u64>,
) -> PyResult<String> {
    let m = model(instance)?;
    let alg = self::algorithm(algorithm)?;
    let spec: HeuristicSpec = heuristic.parse().map_err(PyValueError::new_err)?;
    let mut limits = Limits::new(time_limit, memory_mb << 20);
    if let Some(n) = max_expansions {
        limits = limits.with_max_expansions(n);
    }
    let result = py.detach(|| m.search(alg, &spec, &limits)).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(result.to_json())
}

/// Replays `plan`; returns (valid, report JSON).
#[pyfunction]
fn validate(instance: &str, plan: Vec<String>) -> PyResult<(bool, String)> {
    let report = model(instance)?.validate(&plan);
    let json = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((report.is_valid(), json))
}

/// h^md of the initial state.
#[pyfunction]
fn initial_hmd(instance: &str) -> PyResult<f64> {
    model(instance)?.initial_hmd().map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn heursynth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(domain_of, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(initial_hmd, m)?)?;
    Ok(())
}
