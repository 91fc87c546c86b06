use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use artkit::art::{QuadRule, RayQuadSpec};
use artkit::cli::registry::{self, SuiteConfig};
use artkit::fields::{self as fields, AbsorptionSpec, TemporalProfile};
use artkit::geometry::{make_sphere_grid, Direction, Grid3, Point3};
use artkit::ArtError;

fn err(e: ArtError) -> PyErr {
    match e {
        ArtError::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn point(p: (f64, f64, f64)) -> Point3 {
    Point3::new(p.0, p.1, p.2)
}

fn direction(d: (f64, f64, f64)) -> PyResult<Direction> {
    Direction::new(d.0, d.1, d.2).map_err(err)
}

fn quad(step: Option<f64>, rule: &str) -> PyResult<RayQuadSpec> {
    let rule = match rule {
        "simpson" => QuadRule::Simpson,
        "gauss" => QuadRule::GaussPanel4,
        other => return Err(PyValueError::new_err(format!("unknown rule '{other}'"))),
    };
    let q = RayQuadSpec::default().with_rule(rule);
    match step {
        Some(h) => q.with_step(h).map_err(err),
        None => Ok(q),
    }
}

/// Source f(t, x, ξ).
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PhaseField {
    inner: fields::PhaseField,
}

#[pymethods]
impl PhaseField {
    #[staticmethod]
    #[pyo3(signature = (center, width, amplitude = Complex64::new(1.0, 0.0)))]
    fn gaussian(center: (f64, f64, f64), width: f64, amplitude: Complex64) -> PyResult<Self> {
        let inner = fields::PhaseField::gaussian(point(center), width, amplitude).map_err(err)?;
        Ok(PhaseField { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (center, radius, amplitude = Complex64::new(1.0, 0.0)))]
    fn ball_bump(center: (f64, f64, f64), radius: f64, amplitude: Complex64) -> PyResult<Self> {
        let inner = fields::PhaseField::ball_bump(point(center), radius, amplitude).map_err(err)?;
        Ok(PhaseField { inner })
    }

    /// ⟨w(x), ξ^rank⟩ with a gaussian-profiled generating tensor.
    #[staticmethod]
    fn tensor(rank: usize, center: (f64, f64, f64), width: f64) -> PyResult<Self> {
        let w = registry::tensor_phantom(rank, point(center), width).map_err(err)?;
        Ok(PhaseField {
            inner: fields::PhaseField::tensor_generated(w),
        })
    }

    #[staticmethod]
    fn zero() -> Self {
        PhaseField {
            inner: fields::PhaseField::zero(),
        }
    }

    /// Multiply by a causal gaussian pulse in time.
    fn with_pulse(&self, center: f64, width: f64) -> PyResult<Self> {
        let inner = self
            .inner
            .clone()
            .with_time(TemporalProfile::GaussianPulse { center, width })
            .map_err(err)?;
        Ok(PhaseField { inner })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn eval(&self, t: f64, x: (f64, f64, f64), xi: (f64, f64, f64)) -> PyResult<Complex64> {
        Ok(self.inner.eval(t, &point(x), &direction(xi)?))
    }

    fn __repr__(&self) -> String {
        format!("PhaseField({:?})", self.inner)
    }
}

/// Sampled field on a regular grid, as stored in ARTK files.
#[pyclass(frozen)]
pub struct GridField {
    inner: fields::GridField,
}

#[pymethods]
impl GridField {
    #[staticmethod]
    #[pyo3(signature = (f, dims, half, nt = None, dt = 0.05))]
    fn sample(
        f: &PhaseField,
        dims: usize,
        half: f64,
        nt: Option<usize>,
        dt: f64,
    ) -> PyResult<Self> {
        let g = Grid3::cube(Point3::ORIGIN, half, dims).map_err(err)?;
        let inner = fields::sample_grid(&f.inner, g, nt.map(|n| (n, dt))).map_err(err)?;
        Ok(GridField { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(GridField {
            inner: fields::load_grid(path).map_err(err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        fields::save_grid(&self.inner, path).map_err(err)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        let [a, b, c] = self.inner.grid.dims;
        (a, b, c)
    }

    #[getter]
    fn nt(&self) -> usize {
        self.inner.nt
    }

    /// Flat values: time, then component, then node with x fastest.
    fn values(&self) -> Vec<Complex64> {
        self.inner.data.clone()
    }
}

fn absorption(alpha: Complex64) -> PyResult<AbsorptionSpec> {
    AbsorptionSpec::constant(alpha).map_err(err)
}

/// u_k(x, ξ) for constant α.
#[pyfunction]
#[pyo3(signature = (k, f, alpha, x, xi, step = None, rule = "simpson"))]
fn art_k(
    k: usize,
    f: &PhaseField,
    alpha: Complex64,
    x: (f64, f64, f64),
    xi: (f64, f64, f64),
    step: Option<f64>,
    rule: &str,
) -> PyResult<Complex64> {
    artkit::art::art_k(
        k,
        &f.inner,
        &absorption(alpha)?,
        &point(x),
        &direction(xi)?,
        &quad(step, rule)?,
    )
    .map_err(err)
}

/// u_k(t, x, ξ) for constant α.
#[pyfunction]
#[pyo3(signature = (k, f, alpha, t, x, xi, step = None))]
fn art_k_time(
    k: usize,
    f: &PhaseField,
    alpha: Complex64,
    t: f64,
    x: (f64, f64, f64),
    xi: (f64, f64, f64),
    step: Option<f64>,
) -> PyResult<Complex64> {
    let q = quad(step, "simpson")?;
    artkit::art::art_k_time(
        k,
        &f.inner,
        &absorption(alpha)?,
        t,
        &point(x),
        &direction(xi)?,
        &q,
    )
    .map_err(err)
}

/// Components of E_kp(x) in canonical order.
#[pyfunction]
#[pyo3(signature = (k, p, f, alpha, x, sphere = (8, 16), step = 0.02))]
fn angular_moment(
    k: usize,
    p: usize,
    f: &PhaseField,
    alpha: Complex64,
    x: (f64, f64, f64),
    sphere: (usize, usize),
    step: f64,
) -> PyResult<Vec<Complex64>> {
    let sg = make_sphere_grid(sphere.0, sphere.1).map_err(err)?;
    let q = quad(Some(step), "gauss")?;
    let e =
        artkit::moments::angular_moment(k, p, &f.inner, &absorption(alpha)?, &point(x), &sg, &q)
            .map_err(err)?;
    Ok(e.components().to_vec())
}

/// E_k0(x) as a lattice sum over a cube of `dims` nodes and half width `half`.
#[pyfunction]
#[pyo3(signature = (k, f, alpha, x, dims = 33, half = 0.5))]
fn volume_potential(
    k: usize,
    f: &PhaseField,
    alpha: Complex64,
    x: (f64, f64, f64),
    dims: usize,
    half: f64,
) -> PyResult<Complex64> {
    let g = Grid3::cube(Point3::ORIGIN, half, dims).map_err(err)?;
    artkit::moments::volume_potential(k, &f.inner, alpha, &g, &point(x)).map_err(err)
}

/// E_20 of the phantom on a cube grid.
#[pyfunction]
fn e20_grid(f: &PhaseField, alpha: Complex64, dims: usize, half: f64) -> PyResult<GridField> {
    let g = Grid3::cube(Point3::ORIGIN, half, dims).map_err(err)?;
    let fs = fields::sample_grid(&f.inner, g, None)
        .map_err(err)?
        .frame(0);
    let e = artkit::moments::volume_potential_grid(2, &fs, alpha).map_err(err)?;
    Ok(GridField {
        inner: fields::GridField::stationary(e),
    })
}

/// f ≈ (Δ − α²)²(E_20/(8πα)) on the grid shrunk by two nodes.
#[pyfunction]
fn reconstruct(e20: &GridField, alpha: Complex64) -> PyResult<GridField> {
    let inner = artkit::moments::reconstruct_prop44(&e20.inner, alpha).map_err(err)?;
    Ok(GridField { inner })
}

/// (a, b, c) with ΔG_k = a·G_{k−2} + b·G_{k−1} + c·G_k.
#[pyfunction]
fn g_coefficients(k: usize, alpha: Complex64) -> PyResult<(Complex64, Complex64, Complex64)> {
    let [a, b, c] = artkit::moments::g_radial_apply(k, alpha).map_err(err)?;
    Ok((a, b, c))
}

#[pyfunction]
fn identities() -> Vec<&'static str> {
    registry::names()
}

/// Run an identity check; returns (all_passed, rows) with one dict per row.
#[pyfunction]
#[pyo3(signature = (identity, quick = true, seed = 1, k = None, alpha = None))]
fn verify<'py>(
    py: Python<'py>,
    identity: &str,
    quick: bool,
    seed: u64,
    k: Option<usize>,
    alpha: Option<Complex64>,
) -> PyResult<(bool, Vec<Bound<'py, pyo3::types::PyDict>>)> {
    let cfg = SuiteConfig {
        quick,
        seed,
        k,
        alpha,
        ..SuiteConfig::default()
    };
    let rows = py.detach(|| registry::run(identity, &cfg)).map_err(err)?;
    let ok = rows.iter().all(|r| r.passed());
    let dicts = rows
        .iter()
        .map(|r| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("identity", &r.identity)?;
            d.set_item("k", r.k)?;
            d.set_item("p", r.p)?;
            d.set_item("n", r.n)?;
            d.set_item("grid", &r.grid)?;
            d.set_item("residual_max", r.residual_max)?;
            d.set_item("residual_l2", r.residual_l2)?;
            d.set_item("tolerance", r.tolerance)?;
            d.set_item("pass", r.verdict.as_str())?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    Ok((ok, dicts))
}

#[pymodule]
fn artkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PhaseField>()?;
    m.add_class::<GridField>()?;
    m.add_function(wrap_pyfunction!(art_k, m)?)?;
    m.add_function(wrap_pyfunction!(art_k_time, m)?)?;
    m.add_function(wrap_pyfunction!(angular_moment, m)?)?;
    m.add_function(wrap_pyfunction!(volume_potential, m)?)?;
    m.add_function(wrap_pyfunction!(e20_grid, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(g_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(identities, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
