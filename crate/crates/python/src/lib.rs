//! Python bindings: systems, solver plans, solving and benchmarking.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sparseres::bridge::{self, BridgeError};
use sparseres::geom::{convex_hull, lattice_points as lattice, minkowski_sum, Displacement};
use sparseres::library;
use sparseres::oracle;
use sparseres::poly::{parse_system, CoefficientAssignment, SystemTemplate};
use sparseres::resgen::{self, GenConfig, ResgenError, SolverPlan, Variant};
use sparseres::runtime::{self, RuntimeError, UnitNormal};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn resgen_err(e: ResgenError) -> PyErr {
    match e {
        ResgenError::NoSolver(_) | ResgenError::Exhausted { .. } => runtime_err(e),
        _ => value_err(e),
    }
}

fn solve_err(e: RuntimeError) -> PyErr {
    match e {
        RuntimeError::Poly(_) => value_err(e),
        _ => runtime_err(e),
    }
}

fn bridge_err(e: BridgeError) -> PyErr {
    match e {
        BridgeError::Poly(_) | BridgeError::PlanParse { .. } | BridgeError::InvalidPlan(_) => value_err(e),
        _ => runtime_err(e),
    }
}

fn coeffs(map: BTreeMap<String, f64>) -> CoefficientAssignment {
    CoefficientAssignment(map)
}

/// A polynomial system with named coefficient slots.
#[pyclass(name = "System", module = "sparseres_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystem {
    inner: SystemTemplate,
}

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_system(text).map(|inner| PySystem { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn library(name: &str) -> PyResult<Self> {
        library::get(name)
            .map(|inner| PySystem { inner })
            .ok_or_else(|| PyValueError::new_err(format!("no built-in system `{name}`")))
    }

    #[staticmethod]
    fn library_names() -> Vec<&'static str> {
        library::names()
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.var_names.clone()
    }

    #[getter]
    fn slots(&self) -> Vec<String> {
        self.inner.slots()
    }

    #[getter]
    fn roots(&self) -> Option<usize> {
        self.inner.roots
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Reference roots by Sylvester elimination.
    fn oracle_roots(&self, coefficients: BTreeMap<String, f64>) -> PyResult<Vec<Vec<Complex64>>> {
        oracle::system_roots(&self.inner, &coeffs(coefficients))
            .map(|r| r.points)
            .map_err(runtime_err)
    }

    /// Action matrix from the system's action hint.
    #[pyo3(signature = (coefficients, seed = 1))]
    fn action_matrix(&self, coefficients: BTreeMap<String, f64>, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        let am = bridge::build_from_hint(&self.inner, seed).map_err(bridge_err)?;
        let m = bridge::extract_action_matrix(&am, &coeffs(coefficients)).map_err(bridge_err)?;
        Ok(m.matrix.to_rows())
    }

    fn __repr__(&self) -> String {
        format!(
            "System(variables={:?}, polynomials={})",
            self.inner.var_names,
            self.inner.polys.len()
        )
    }
}

/// A generated resultant solver.
#[pyclass(name = "Plan", module = "sparseres_py", frozen)]
struct PyPlan {
    inner: SolverPlan,
}

#[pymethods]
impl PyPlan {
    #[staticmethod]
    #[pyo3(signature = (system, seed = 1, variant = "both", hidden = None, max_subset = None))]
    fn generate(
        system: &PySystem,
        seed: u64,
        variant: &str,
        hidden: Option<&str>,
        max_subset: Option<usize>,
    ) -> PyResult<Self> {
        let variants =
            Variant::parse_list(variant).ok_or_else(|| PyValueError::new_err(format!("unknown variant `{variant}`")))?;
        let hidden = match hidden {
            Some(h) => Some(
                system
                    .inner
                    .var_index(h)
                    .ok_or_else(|| PyValueError::new_err(format!("unknown variable `{h}`")))?,
            ),
            None => None,
        };
        let cfg = GenConfig {
            seed,
            variants,
            hidden,
            max_subset,
            ..GenConfig::default()
        };
        resgen::generate(&system.inner, &cfg)
            .map(|inner| PyPlan { inner })
            .map_err(resgen_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        resgen::load_plan(text).map(|inner| PyPlan { inner }).map_err(resgen_err)
    }

    fn to_json(&self) -> String {
        resgen::emit_plan(&self.inner)
    }

    /// (upper-block rows, columns)
    #[getter]
    fn size(&self) -> (usize, usize) {
        self.inner.size()
    }

    #[getter]
    fn n_solutions(&self) -> usize {
        self.inner.n_solutions()
    }

    #[getter]
    fn hidden(&self) -> String {
        self.inner.system.var_names[self.inner.hidden].clone()
    }

    #[getter]
    fn variant(&self) -> &'static str {
        match self.inner.variant {
            Variant::V1 => "v1",
            Variant::V2 => "v2",
        }
    }

    #[getter]
    fn system(&self) -> PySystem {
        PySystem {
            inner: self.inner.system.clone(),
        }
    }

    /// Roots as dicts with keys point, eigvalue, residual, is_real.
    #[pyo3(signature = (coefficients, tol = runtime::REAL_TOL))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        coefficients: BTreeMap<String, f64>,
        tol: f64,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let sol = runtime::solve_instance(&self.inner, &coeffs(coefficients), tol).map_err(solve_err)?;
        sol.roots
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("point", r.point.clone())?;
                d.set_item("eigvalue", r.eigvalue)?;
                d.set_item("residual", r.residual)?;
                d.set_item("is_real", r.is_real)?;
                Ok(d)
            })
            .collect()
    }

    /// Benchmark report as a JSON string.
    #[pyo3(signature = (trials, seed = 1, tol = runtime::FAIL_THRESHOLD))]
    fn bench(&self, py: Python<'_>, trials: usize, seed: u64, tol: f64) -> PyResult<String> {
        if trials == 0 {
            return Err(PyValueError::new_err("trials must be at least 1"));
        }
        let plan = &self.inner;
        let rep = py.detach(|| runtime::benchmark(plan, &UnitNormal::for_plan(plan, seed), trials, tol, false));
        Ok(rep.to_json())
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.inner.size();
        format!("Plan(size={a}x{b}, n_solutions={}, hidden={})", self.inner.n_solutions(), self.hidden())
    }
}

/// Integer points of the displaced Minkowski sum of the hulls of `supports`.
#[pyfunction]
fn lattice_points(supports: Vec<Vec<Vec<i64>>>, signs: Vec<i8>, magnitude: f64) -> PyResult<Vec<Vec<i64>>> {
    let n = signs.len();
    if supports.is_empty() || supports.iter().flatten().any(|p| p.len() != n) {
        return Err(PyValueError::new_err("every point needs one coordinate per sign"));
    }
    let polys: Vec<_> = supports.iter().map(|s| convex_hull(s)).collect();
    Ok(lattice(&minkowski_sum(&polys), &Displacement::new(signs, magnitude)))
}

/// Roots of sum c_i x^i.
#[pyfunction]
fn univariate_roots(coefficients: Vec<f64>) -> PyResult<Vec<Complex64>> {
    oracle::univariate_roots(&coefficients).map_err(value_err)
}

/// Equivalence check in one direction: "am-res", "res-am" or "res-alt-am".
#[pyfunction]
#[pyo3(signature = (system, direction, trials = 100, seed = 1))]
fn compare(system: &PySystem, direction: &str, trials: usize, seed: u64) -> PyResult<(bool, bool, f64)> {
    let sys = &system.inner;
    let (am, res) = match direction {
        "am-res" => {
            let am = bridge::build_from_hint(sys, seed).map_err(bridge_err)?;
            let res = bridge::am_to_res(&am).map_err(bridge_err)?;
            (am, res)
        }
        "res-am" | "res-alt-am" => {
            let variant = if direction == "res-am" { Variant::V1 } else { Variant::V2 };
            let hidden = sys.action.as_ref().and_then(|h| sys.var_index(&h.action_var));
            let cfg = GenConfig {
                seed,
                variants: vec![variant],
                hidden,
                ..GenConfig::default()
            };
            let res = resgen::generate(sys, &cfg).map_err(resgen_err)?;
            let am = bridge::res_to_am(&res).map_err(bridge_err)?;
            (am, res)
        }
        other => return Err(PyValueError::new_err(format!("unknown direction `{other}`"))),
    };
    let rep = bridge::check_equivalence(&am, &res, trials, seed);
    Ok((rep.equivalent, rep.size_match, rep.max_rel_diff))
}

#[pymodule]
fn sparseres_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyPlan>()?;
    m.add_function(wrap_pyfunction!(lattice_points, m)?)?;
    m.add_function(wrap_pyfunction!(univariate_roots, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
