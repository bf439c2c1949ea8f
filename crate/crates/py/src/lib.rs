use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use oddsym::bv::{delta0, delta_sharp, delta_vol, VolumeForm};
use oddsym::cli::{parse_expr, run, Manifest};
use oddsym::darboux::darboux_pipeline;
use oddsym::forms::{tau_sharp, tau_sharp_inverse, DifferentialForm};
use oddsym::symplectic::{bracket, Structure};
use oddsym::{ChartSpec, SMatrix, SuperExpr, SymbolTable, Table};

fn err(e: oddsym::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A chart `(x, θ)` with optional aux odd constants and function symbols.
#[pyclass(frozen)]
struct Chart {
    table: Table,
}

impl Chart {
    fn parse(&self, text: &str) -> PyResult<SuperExpr> {
        parse_expr(text, &self.table).map_err(err)
    }
}

#[pymethods]
impl Chart {
    #[new]
    #[pyo3(signature = (n=None, even=None, odd=None, aux=Vec::new(), functions=Vec::new()))]
    fn new(
        n: Option<usize>,
        even: Option<Vec<String>>,
        odd: Option<Vec<String>>,
        aux: Vec<String>,
        functions: Vec<String>,
    ) -> PyResult<Chart> {
        let (even, odd) = match (n, even, odd) {
            (Some(n), None, None) => ((1..=n).map(|i| format!("x{i}")).collect(), (1..=n).map(|i| format!("th{i}")).collect()),
            (_, Some(e), Some(o)) => (e, o),
            _ => return Err(PyValueError::new_err("give either n or both even and odd")),
        };
        let table =
            SymbolTable::new(ChartSpec { chart: "U".into(), even, odd, aux, functions, ..Default::default() }).map_err(err)?;
        Ok(Chart { table })
    }

    #[getter]
    fn n(&self) -> usize {
        self.table.n()
    }

    /// Canonical text of an expression.
    fn normalize(&self, text: &str) -> PyResult<String> {
        Ok(self.parse(text)?.render())
    }

    fn bracket(&self, f: &str, g: &str) -> PyResult<String> {
        Ok(bracket(&self.parse(f)?, &self.parse(g)?).map_err(err)?.render())
    }

    fn delta0(&self, f: &str) -> PyResult<String> {
        Ok(delta0(&self.parse(f)?).render())
    }

    fn delta_vol(&self, f: &str, rho: &str) -> PyResult<String> {
        let dv = VolumeForm::new(self.parse(rho)?).map_err(err)?;
        Ok(delta_vol(&self.parse(f)?, &dv).map_err(err)?.render())
    }

    fn delta_sharp(&self, s: &str) -> PyResult<String> {
        Ok(delta_sharp(&self.parse(s)?).render())
    }

    /// Semidensity coefficient of a form written in the frame odds.
    fn tau_sharp(&self, w: &str) -> PyResult<String> {
        let w = DifferentialForm::new(self.parse(w)?).map_err(err)?;
        Ok(tau_sharp(&w).map_err(err)?.render())
    }

    fn tau_sharp_inverse(&self, s: &str) -> PyResult<String> {
        Ok(tau_sharp_inverse(&self.parse(s)?).map_err(err)?.render())
    }

    /// Darboux coordinates for a bracket matrix given row by row.
    fn darboux(&self, bracket: Vec<Vec<String>>) -> PyResult<Vec<String>> {
        let n2 = 2 * self.table.n();
        if bracket.len() != n2 || bracket.iter().any(|r| r.len() != n2) {
            return Err(PyValueError::new_err(format!("bracket must be {n2}x{n2}")));
        }
        let m = SMatrix::try_from_fn(&self.table, n2, n2, |a, b| parse_expr(&bracket[a][b], &self.table)).map_err(err)?;
        let res = darboux_pipeline(&Structure { omega: m }).map_err(err)?;
        if !res.canonical {
            return Err(PyValueError::new_err("pipeline did not reach canonical coordinates"));
        }
        Ok(res.map.targets.iter().map(SuperExpr::render).collect())
    }
}

/// Runs a manifest command; returns `(exit_code, json_report)`.
#[pyfunction]
#[pyo3(signature = (manifest, command, suite=None))]
fn run_manifest(manifest: &str, command: &str, suite: Option<&str>) -> PyResult<(i32, String)> {
    let m = Manifest::from_json(manifest).map_err(err)?;
    let rep = run(m, Some(command), suite).map_err(err)?;
    Ok((rep.exit_code(), rep.to_json()))
}

#[pymodule]
#[pyo3(name = "oddsym")]
fn oddsym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Chart>()?;
    m.add_function(wrap_pyfunction!(run_manifest, m)?)?;
    Ok(())
}
