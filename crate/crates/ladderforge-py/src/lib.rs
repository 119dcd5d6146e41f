//! Python bindings. States come back as nested lists indexed [n1][n2];
//! reports that already have a JSON form are returned as JSON strings.

use ladderforge::algebra::{self, HamiltonianParams, LadderCoeffs};
use ladderforge::chen::{self, PQParams};
use ladderforge::eigenstates::{self, Branch, EigenstateRequest};
use ladderforge::fock::{self, FockCutoff, TwoModeState};
use ladderforge::{spectra, Error};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(ladderforge_py, Refusal, PyException, "The library refused a request outside its domain.");
create_exception!(ladderforge_py, CutoffError, PyException, "The requested object does not fit the cutoff.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::CutoffOverflow(_) | Error::DegreeTooLarge { .. } => CutoffError::new_err(e.to_string()),
        e if e.is_refusal() => Refusal::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn cutoff(c: (usize, usize)) -> FockCutoff {
    FockCutoff::new(c.0, c.1)
}

fn grid(v: &TwoModeState) -> Vec<Vec<Complex64>> {
    let cut = v.cutoff();
    (0..=cut.n1_max)
        .map(|n1| (0..=cut.n2_max).map(|n2| v.amp(n1, n2)).collect())
        .collect()
}

#[pyclass(name = "Hamiltonian", from_py_object)]
#[derive(Clone)]
pub struct PyHamiltonian {
    inner: HamiltonianParams,
}

#[pymethods]
impl PyHamiltonian {
    #[new]
    #[pyo3(signature = (beta0, beta_plus, beta3, gamma1 = Complex64::new(0.0, 0.0), gamma2 = Complex64::new(0.0, 0.0), h0 = 0.0))]
    fn new(beta0: f64, beta_plus: Complex64, beta3: f64, gamma1: Complex64, gamma2: Complex64, h0: f64) -> Self {
        let mut inner = HamiltonianParams::new(beta0, beta_plus, beta3).with_gamma(gamma1, gamma2);
        inner.h0 = h0;
        Self { inner }
    }

    #[getter]
    fn beta0(&self) -> f64 {
        self.inner.beta0
    }

    #[getter]
    fn beta_plus(&self) -> Complex64 {
        self.inner.beta_plus
    }

    #[getter]
    fn beta3(&self) -> f64 {
        self.inner.beta3
    }

    /// 4|β₊|² + β₃²
    #[getter]
    fn b2(&self) -> f64 {
        self.inner.b2()
    }

    fn classify(&self) -> String {
        format!("{:?}", algebra::classify(&self.inner))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("Hamiltonian(beta0={}, beta_plus={}, beta3={}, gamma1={}, gamma2={}, h0={})", p.beta0, p.beta_plus, p.beta3, p.gamma1, p.gamma2, p.h0)
    }
}

#[pyclass(name = "Ladder", from_py_object)]
#[derive(Clone)]
pub struct PyLadder {
    inner: LadderCoeffs,
}

#[pymethods]
impl PyLadder {
    #[new]
    #[pyo3(signature = (mu1 = Complex64::new(0.0, 0.0), mu2 = Complex64::new(0.0, 0.0), nu1 = Complex64::new(0.0, 0.0), nu2 = Complex64::new(0.0, 0.0), alpha_plus = Complex64::new(0.0, 0.0), alpha_minus = Complex64::new(0.0, 0.0), alpha3 = Complex64::new(0.0, 0.0), a0 = Complex64::new(0.0, 0.0)))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        mu1: Complex64,
        mu2: Complex64,
        nu1: Complex64,
        nu2: Complex64,
        alpha_plus: Complex64,
        alpha_minus: Complex64,
        alpha3: Complex64,
        a0: Complex64,
    ) -> Self {
        Self { inner: LadderCoeffs { mu1, mu2, nu1, nu2, alpha_plus, alpha_minus, alpha3, a0 } }
    }

    /// Coefficients in the order μ₁ μ₂ ν₁ ν₂ α₊ α₋ α₃ a₀.
    fn coefficients(&self) -> Vec<Complex64> {
        self.inner.as_array().to_vec()
    }

    fn normalizable(&self) -> bool {
        self.inner.normalizable()
    }

    /// ‖P([H,A] + A)P‖ on the degree interior of the cutoff.
    #[pyo3(signature = (h, cutoff = (14, 14), degree = 3))]
    fn residual(&self, h: &PyHamiltonian, cutoff: (usize, usize), degree: usize) -> PyResult<f64> {
        let g = fock::build_generators(self::cutoff(cutoff));
        let hm = algebra::build_hamiltonian(&h.inner, &g);
        algebra::verify_ladder(&hm, &algebra::build_ladder(&self.inner, &g), degree).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Ladder({:?})", self.inner.as_array())
    }
}

/// Classification tag, basis ladders and the names of their free parameters.
#[pyfunction]
fn solve_ladder(h: &PyHamiltonian) -> (String, Vec<PyLadder>, Vec<String>) {
    let rep = algebra::solve_ladder(&h.inner);
    let ladders = rep.coeffs.iter().map(|c| PyLadder { inner: *c }).collect();
    (format!("{:?}", rep.tag), ladders, rep.free_parameters)
}

/// Combination of the solver basis with the given values (missing ones are 1).
#[pyfunction]
#[pyo3(signature = (h, values = Vec::new()))]
fn bind(h: &PyHamiltonian, values: Vec<Complex64>) -> PyResult<PyLadder> {
    let rep = algebra::solve_ladder(&h.inner);
    if rep.coeffs.is_empty() {
        return Err(to_py(Error::NoLadderExists));
    }
    Ok(PyLadder { inner: algebra::bind(&rep, &values) })
}

/// (relation, residual) pairs of the generator algebra.
#[pyfunction]
#[pyo3(signature = (cutoff = (14, 14), degree = 2))]
fn verify_algebra(cutoff: (usize, usize), degree: usize) -> PyResult<Vec<(String, f64)>> {
    let g = fock::build_generators(self::cutoff(cutoff));
    let rel = fock::algebra_relations(&g, degree).map_err(to_py)?;
    Ok(rel.into_iter().map(|r| (r.relation, r.residual)).collect())
}

fn parse_branch(s: &str) -> PyResult<Branch> {
    match s {
        "separable" => Ok(Branch::Separable),
        "non-separable" => Ok(Branch::NonSeparable),
        "kappa" => Ok(Branch::Kappa),
        _ => Err(PyValueError::new_err(format!("unknown branch {s:?}"))),
    }
}

/// Eigenstate of the ladder with eigenvalue λ: (amplitudes[n1][n2], residual, expected energy).
#[pyfunction]
#[pyo3(signature = (h, ladder, lam, branch = "kappa", kappa = 0, cutoff = (20, 20)))]
fn eigenstate(
    h: &PyHamiltonian,
    ladder: &PyLadder,
    lam: Complex64,
    branch: &str,
    kappa: usize,
    cutoff: (usize, usize),
) -> PyResult<(Vec<Vec<Complex64>>, f64, Option<f64>)> {
    let g = fock::build_generators(self::cutoff(cutoff));
    let req = EigenstateRequest::new(algebra::classify(&h.inner), lam, parse_branch(branch)?).with_kappa(kappa);
    let c = eigenstates::construct(&h.inner, &ladder.inner, &req, &g).map_err(to_py)?;
    let a = algebra::build_ladder(&ladder.inner, &g);
    let r = eigenstates::verify_eigenstate(&a, &c.state, lam, 2).map_err(to_py)?;
    Ok((grid(&c.state), r, c.expected_energy))
}

/// Raising chains over the κ-grounds with formula and oracle energies, as JSON.
#[pyfunction]
#[pyo3(signature = (h, ladder, kappas = vec![0, 1, 2], n_max = 4, cutoff = (14, 14)))]
fn spectrum(h: &PyHamiltonian, ladder: &PyLadder, kappas: Vec<usize>, n_max: usize, cutoff: (usize, usize)) -> PyResult<String> {
    let g = fock::build_generators(self::cutoff(cutoff));
    let rep = spectra::family_spectrum(&h.inner, &ladder.inner, &kappas, n_max, 2, &g).map_err(to_py)?;
    rep.to_json().map_err(to_py)
}

/// Sorted eigenvalues of H on the truncation-safe subspace.
#[pyfunction]
#[pyo3(signature = (h, cutoff = (14, 14), degree = 2))]
fn oracle_spectrum(h: &PyHamiltonian, cutoff: (usize, usize), degree: usize) -> PyResult<Vec<f64>> {
    let g = fock::build_generators(self::cutoff(cutoff));
    spectra::diagonalize_oracle(&algebra::build_hamiltonian(&h.inner, &g), degree).map_err(to_py)
}

/// Chen ground of the p:q oscillator with energy κ, as amplitudes[n1][n2].
#[pyfunction]
#[pyo3(signature = (p, q, kappa, alpha_plus = Complex64::new(1.0, 0.0), alpha_minus = Complex64::new(1.0, 0.0), cutoff = (20, 20)))]
fn chen_ground(
    p: u32,
    q: u32,
    kappa: usize,
    alpha_plus: Complex64,
    alpha_minus: Complex64,
    cutoff: (usize, usize),
) -> PyResult<Vec<Vec<Complex64>>> {
    let pq = PQParams::new(p, q, alpha_plus, alpha_minus).map_err(to_py)?;
    let g = fock::build_generators(self::cutoff(cutoff));
    Ok(grid(&chen::chen_ground(&pq, kappa, &g).map_err(to_py)?))
}

/// Whether the p:q spectrum on the cutoff matches the Louck counting, plus the full check as JSON.
#[pyfunction]
#[pyo3(signature = (p, q, cutoff = (20, 20)))]
fn louck_check(p: u32, q: u32, cutoff: (usize, usize)) -> PyResult<(bool, String)> {
    let one = Complex64::new(1.0, 0.0);
    let pq = PQParams::new(p, q, one, one).map_err(to_py)?;
    let chk = chen::louck_multiset_check(&pq, self::cutoff(cutoff)).map_err(to_py)?;
    let json = serde_json::to_string(&chk).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((chk.matches, json))
}

/// Runs the command-line tool in-process and returns its exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    ladderforge::cli::main_with_args(std::iter::once("ladderforge".to_string()).chain(args))
}

#[pymodule]
fn ladderforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("Refusal", m.py().get_type::<Refusal>())?;
    m.add("CutoffError", m.py().get_type::<CutoffError>())?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyLadder>()?;
    m.add_function(wrap_pyfunction!(solve_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(bind, m)?)?;
    m.add_function(wrap_pyfunction!(verify_algebra, m)?)?;
    m.add_function(wrap_pyfunction!(eigenstate, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(chen_ground, m)?)?;
    m.add_function(wrap_pyfunction!(louck_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
