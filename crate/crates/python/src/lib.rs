//! Python bindings. Instances and results cross the boundary as the same
//! JSON documents the command-line tool reads and writes.

use bendext::cli_io::{generate as gen_instance, render_svg as render, solution_svg_options, to_json_pretty, DrawingDoc, Family, GenSpec};
use bendext::extension_solver::{solve as solve_instance, SolveError, Verdict};
use bendext::geometry_core::Rational;
use bendext::instance_model::Instance;
use bendext::verifier::{grid_oracle, oracle_budget_from_env, validate_drawing, OracleResult};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn input_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn solve_err(e: SolveError) -> PyErr {
    if e.is_internal() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        input_err(e)
    }
}

fn instance(json: &str) -> PyResult<Instance> {
    Instance::from_json(json).map_err(input_err)
}

/// Solves an instance and returns the drawing document as JSON.
#[pyfunction]
fn solve(instance_json: &str) -> PyResult<String> {
    let inst = instance(instance_json)?;
    let sol = solve_instance(&inst).map_err(solve_err)?;
    Ok(DrawingDoc::from_solution(&sol).to_json())
}

/// Validates a drawing document against an instance; returns the report
/// as JSON.
#[pyfunction]
fn verify(instance_json: &str, drawing_json: &str) -> PyResult<String> {
    let inst = instance(instance_json)?;
    let doc = DrawingDoc::from_json(drawing_json).map_err(input_err)?;
    Ok(to_json_pretty(&validate_drawing(&inst, &doc.drawing())))
}

/// Generates an instance as canonical JSON.
#[pyfunction]
#[pyo3(signature = (family, n, m, seed, outer_bend_prob = "0"))]
fn generate(family: &str, n: usize, m: usize, seed: u64, outer_bend_prob: &str) -> PyResult<String> {
    let family: Family = family.parse().map_err(input_err)?;
    let p: Rational = outer_bend_prob.parse().map_err(input_err)?;
    let inst = gen_instance(&GenSpec::new(family, n, m, seed).with_outer_bends(p)).map_err(input_err)?;
    Ok(inst.to_json())
}

/// Grid search; returns the drawing document as JSON, or `None` when no
/// grid drawing exists.
#[pyfunction]
#[pyo3(signature = (instance_json, resolution, budget = None))]
fn oracle(instance_json: &str, resolution: u32, budget: Option<u64>) -> PyResult<Option<String>> {
    let inst = instance(instance_json)?;
    let budget = budget.unwrap_or_else(oracle_budget_from_env);
    match grid_oracle(&inst, resolution, budget).map_err(input_err)? {
        OracleResult::Found(d) => Ok(Some(
            DrawingDoc {
                chords: d.chords,
                verdict: None,
                witness: None,
            }
            .to_json(),
        )),
        OracleResult::NotFound => Ok(None),
    }
}

/// SVG picture of the solver's answer for an instance.
#[pyfunction]
fn solution_svg(instance_json: &str) -> PyResult<String> {
    let inst = instance(instance_json)?;
    let sol = solve_instance(&inst).map_err(solve_err)?;
    let drawing = match &sol.verdict {
        Verdict::Yes(d) => Some(d),
        Verdict::No(_) => None,
    };
    Ok(render(&inst, drawing, &solution_svg_options(&inst, &sol)))
}

#[pymodule]
fn bendext_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(solution_svg, m)?)?;
    Ok(())
}
