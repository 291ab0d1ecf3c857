//! Python bindings for the reduction and verification library.
//!
//! Exposes the graded state vector, the reduced density matrix, the
//! amplitude kernels, and the two verification suites. Library errors
//! surface as ValueError.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use idemrdm::{
    equivalence_suite, gns_restriction_check, inner_product, ssr_project, von_neumann_entropy,
    Bipartition, OccupationState, Orbital, Side, SquareMatrix, Statistics,
};

fn to_py(err: idemrdm::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_statistics(name: &str) -> PyResult<Statistics> {
    match name {
        "boson" => Ok(Statistics::Boson),
        "fermion" => Ok(Statistics::Fermion),
        _ => Err(PyValueError::new_err(format!(
            "statistics must be \"boson\" or \"fermion\", got {:?}",
            name
        ))),
    }
}

fn statistics_name(stats: Statistics) -> &'static str {
    match stats {
        Statistics::Boson => "boson",
        Statistics::Fermion => "fermion",
    }
}

fn parse_side(name: &str) -> PyResult<Side> {
    match name {
        "L" | "left" => Ok(Side::Left),
        "R" | "right" => Ok(Side::Right),
        _ => Err(PyValueError::new_err(format!(
            "trace side must be \"L\" or \"R\", got {:?}",
            name
        ))),
    }
}

fn square(rows: Vec<Vec<Complex64>>) -> PyResult<SquareMatrix> {
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for row in &rows {
        if row.len() != n {
            return Err(PyValueError::new_err(format!(
                "matrix must be square, row of length {} in an order-{} matrix",
                row.len(),
                n
            )));
        }
        entries.extend_from_slice(row);
    }
    SquareMatrix::new(n, entries).map_err(to_py)
}

fn orbital_list(lists: Vec<Vec<Complex64>>) -> PyResult<Vec<Orbital>> {
    lists
        .into_iter()
        .map(|amps| Orbital::new(amps).map_err(to_py))
        .collect()
}

/// A many-particle state: complex amplitudes over occupation-number basis
/// states, graded by particle count.
///
/// Usage from Python:
///
///     from idemrdm_py import State
///     amp = 1 / 2**0.5
///     psi = State("fermion", 8, [([0, 1, 4], amp), ([0, 2, 5], amp)])
///     rho = psi.reduced([0, 1, 2, 3], trace="R")
///     print(rho.entropy())
#[pyclass]
struct State {
    inner: idemrdm::GradedVector,
}

#[pymethods]
impl State {
    /// Build a state from (orbital id list, amplitude) terms.
    ///
    /// Orbital lists must be in canonical order: non-decreasing for bosons,
    /// strictly increasing for fermions.
    #[new]
    fn new(statistics: &str, dim: usize, terms: Vec<(Vec<usize>, Complex64)>) -> PyResult<Self> {
        let stats = parse_statistics(statistics)?;
        let mut pairs = Vec::with_capacity(terms.len());
        for (ids, amp) in terms {
            let occ = OccupationState::new(ids, stats, dim).map_err(to_py)?;
            pairs.push((occ, amp));
        }
        let inner = idemrdm::GradedVector::from_terms(stats, dim, pairs).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn statistics(&self) -> &'static str {
        statistics_name(self.inner.statistics())
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn max_grade(&self) -> usize {
        self.inner.max_grade()
    }

    /// The nonzero terms as (orbital ids, amplitude) pairs, canonically
    /// ordered.
    fn terms(&self) -> Vec<(Vec<usize>, Complex64)> {
        self.inner
            .terms()
            .iter()
            .map(|(occ, amp)| (occ.ids().to_vec(), *amp))
            .collect()
    }

    fn normalized(&self) -> PyResult<State> {
        Ok(State {
            inner: self.inner.normalized().map_err(to_py)?,
        })
    }

    /// Inner product with another state, antilinear in self.
    fn inner(&self, other: &State) -> PyResult<Complex64> {
        inner_product(&self.inner, &other.inner).map_err(to_py)
    }

    /// Reduced density matrix after tracing out one side of the mode split
    /// given by `left_modes`.
    #[pyo3(signature = (left_modes, trace="R"))]
    fn reduced(&self, left_modes: Vec<usize>, trace: &str) -> PyResult<DensityMatrix> {
        let side = parse_side(trace)?;
        let bip = Bipartition::new(self.inner.dim(), left_modes).map_err(to_py)?;
        let rho = idemrdm::reduced_density_matrix(&self.inner, &bip, side).map_err(to_py)?;
        Ok(DensityMatrix { inner: rho })
    }

    fn __repr__(&self) -> String {
        format!(
            "State({}, dim={}, terms={})",
            self.statistics(),
            self.inner.dim(),
            self.inner.terms().len()
        )
    }
}

/// A reduced density matrix over occupation-number basis labels.
#[pyclass]
struct DensityMatrix {
    inner: idemrdm::DensityMatrix,
}

#[pymethods]
impl DensityMatrix {
    fn statistics(&self) -> &'static str {
        statistics_name(self.inner.statistics())
    }

    /// Occupation labels indexing the rows and columns.
    fn basis(&self) -> Vec<Vec<usize>> {
        self.inner
            .basis()
            .iter()
            .map(|occ| occ.ids().to_vec())
            .collect()
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let n = self.inner.dimension();
        (0..n)
            .map(|i| (0..n).map(|j| self.inner.entry(i, j)).collect())
            .collect()
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// Eigenvalues in ascending order.
    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.inner.eigenvalues().map_err(to_py)
    }

    /// Von Neumann entropy in bits.
    fn entropy(&self) -> PyResult<f64> {
        von_neumann_entropy(&self.inner).map_err(to_py)
    }

    /// Copy with coherences between superselection sectors removed.
    fn ssr_projected(&self) -> DensityMatrix {
        DensityMatrix {
            inner: ssr_project(&self.inner),
        }
    }

    /// Raises ValueError unless Hermitian, positive, and unit-trace.
    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(to_py)
    }

    fn max_abs_diff(&self, other: &DensityMatrix) -> PyResult<f64> {
        self.inner.max_abs_diff(&other.inner).map_err(to_py)
    }

    fn spectral_distance(&self, other: &DensityMatrix) -> PyResult<f64> {
        self.inner.spectral_distance(&other.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "DensityMatrix({}, dimension={}, trace={:.6})",
            self.statistics(),
            self.inner.dimension(),
            self.inner.trace()
        )
    }
}

/// Overlap of two product states given as lists of orbital amplitude
/// vectors: the permanent (bosons) or determinant (fermions) of the Gram
/// matrix.
#[pyfunction]
fn transition_amplitude(
    statistics: &str,
    bra: Vec<Vec<Complex64>>,
    ket: Vec<Vec<Complex64>>,
) -> PyResult<Complex64> {
    let stats = parse_statistics(statistics)?;
    let bra = orbital_list(bra)?;
    let ket = orbital_list(ket)?;
    idemrdm::transition_amplitude(&bra, &ket, stats).map_err(to_py)
}

/// Matrix permanent by Gray-code subset enumeration.
#[pyfunction]
fn permanent(rows: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    idemrdm::permanent_ryser(&square(rows)?).map_err(to_py)
}

/// Matrix permanent by exhaustive expansion; cross-check for small orders.
#[pyfunction]
fn permanent_naive(rows: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    idemrdm::permanent_naive(&square(rows)?).map_err(to_py)
}

/// Determinant by LU elimination with partial pivoting.
#[pyfunction]
fn determinant(rows: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    idemrdm::determinant(&square(rows)?).map_err(to_py)
}

/// Runs the cross-formalism equivalence suite on random instances and
/// returns (max entrywise residual, max spectral residual).
#[pyfunction]
#[pyo3(signature = (instances=100, seed=0, max_particles=4))]
fn verify_equivalence(instances: usize, seed: u64, max_particles: usize) -> PyResult<(f64, f64)> {
    let outcome = equivalence_suite(instances, seed, max_particles).map_err(to_py)?;
    Ok((outcome.max_entry_residual, outcome.max_spectral_residual))
}

/// Compares restricted and lifted expectations of random local observables
/// on a pure state; returns (max residual, pass).
#[pyfunction]
#[pyo3(signature = (state, left_modes, trials=50, seed=0, tolerance=1e-10))]
fn verify_gns(
    state: &State,
    left_modes: Vec<usize>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> PyResult<(f64, bool)> {
    let bip = Bipartition::new(state.inner.dim(), left_modes).map_err(to_py)?;
    let components = [(1.0, state.inner.clone())];
    let report =
        gns_restriction_check(&components, &bip, trials, seed, tolerance).map_err(to_py)?;
    Ok((report.max_residual, report.pass))
}

#[pymodule]
fn idemrdm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<State>()?;
    m.add_class::<DensityMatrix>()?;
    m.add_function(wrap_pyfunction!(transition_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(permanent, m)?)?;
    m.add_function(wrap_pyfunction!(permanent_naive, m)?)?;
    m.add_function(wrap_pyfunction!(determinant, m)?)?;
    m.add_function(wrap_pyfunction!(verify_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(verify_gns, m)?)?;
    Ok(())
}
