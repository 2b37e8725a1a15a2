//! Python bindings for `packlab-core`.
//!
//! ```python
//! import packlab
//! cfg = packlab.sample_poisson(2, 8.0, 1.0, seed=7)
//! res = packlab.decimate(cfg, 0.5)
//! print(len(cfg), res.tau_len, res.bounds.lower1)
//! ```

use packlab_core::decimate::{self as dec, DecimationMode};
use packlab_core::pointfield::{self as pf, Convention};
use packlab_core::{lattice2d, moments, proxgraph, schmidt, vcover};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: packlab_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for packlab_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn convention(name: &str) -> PyResult<Convention> {
    name.parse().py()
}

/// Box `[-N, N)^n` with a metric convention, `"torus"` or `"clipped"`.
#[pyclass(name = "BoxSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBoxSpec(pf::BoxSpec);

#[pymethods]
impl PyBoxSpec {
    #[new]
    #[pyo3(signature = (dim, half_side, convention = "torus"))]
    fn new(dim: usize, half_side: f64, convention: &str) -> PyResult<Self> {
        Ok(PyBoxSpec(
            pf::BoxSpec::new(dim, half_side, self::convention(convention)?).py()?,
        ))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn half_side(&self) -> f64 {
        self.0.half_side()
    }

    #[getter]
    fn convention(&self) -> String {
        self.0.convention().to_string()
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.0.volume()
    }

    fn distance(&self, p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
        if p.len() != self.0.dim() || q.len() != self.0.dim() {
            return Err(PyValueError::new_err("points must have the box dimension"));
        }
        Ok(self.0.distance(&p, &q))
    }

    fn __repr__(&self) -> String {
        format!(
            "BoxSpec(dim={}, half_side={}, convention='{}')",
            self.0.dim(),
            self.0.half_side(),
            self.0.convention()
        )
    }
}

/// A finite point set in a box.
#[pyclass(name = "PointConfiguration", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoints(pf::PointConfiguration);

#[pymethods]
impl PyPoints {
    #[new]
    fn new(box_spec: &PyBoxSpec, points: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyPoints(pf::PointConfiguration::new(box_spec.0, &points).py()?))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyPoints(pf::PointConfiguration::from_text(text).py()?))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn box_spec(&self) -> PyBoxSpec {
        PyBoxSpec(*self.0.box_spec())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn point(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.0.len() {
            return Err(PyValueError::new_err(format!("index {i} out of range")));
        }
        Ok(self.0.point(i).to_vec())
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.0.points().map(<[f64]>::to_vec).collect()
    }

    fn min_spacing(&self) -> PyResult<f64> {
        pf::min_spacing(&self.0).py()
    }

    fn packing_density_torus(&self) -> PyResult<f64> {
        pf::packing_density_torus(&self.0).py()
    }

    /// Hit-or-miss estimate of the clipped density: `(value, stderr)`.
    fn packing_density_clipped_mc(&self, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let e = pf::packing_density_clipped_mc(&self.0, samples, seed).py()?;
        Ok((e.value, e.stderr))
    }

    fn __repr__(&self) -> String {
        format!("PointConfiguration(dim={}, len={})", self.0.dim(), self.0.len())
    }
}

#[pyclass(name = "Census", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyCensus {
    m: usize,
    m1: usize,
    m2: usize,
    m3: usize,
    components: usize,
}

impl From<&proxgraph::ComponentCensus> for PyCensus {
    fn from(c: &proxgraph::ComponentCensus) -> Self {
        PyCensus {
            m: c.m,
            m1: c.m1,
            m2: c.m2,
            m3: c.m3,
            components: c.components.len(),
        }
    }
}

/// Proximity graph: an edge between every pair at distance `<= threshold`.
#[pyclass(name = "ProximityGraph", frozen, skip_from_py_object)]
struct PyGraph(proxgraph::ProximityGraph);

#[pymethods]
impl PyGraph {
    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.0.threshold()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    fn census(&self) -> PyCensus {
        PyCensus::from(&proxgraph::component_census(&self.0))
    }

    fn to_edge_list(&self) -> String {
        self.0.to_edge_list()
    }
}

#[pyclass(name = "TauBounds", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyTauBounds {
    upper1: f64,
    upper2: f64,
    lower1: f64,
    lower2: f64,
    lower2_valid: bool,
}

#[pyclass(name = "Decimation", frozen, get_all, skip_from_py_object)]
struct PyDecimation {
    tau: PyPoints,
    kept: Vec<usize>,
    removed: Vec<usize>,
    census: PyCensus,
    bounds: PyTauBounds,
    all_exact: bool,
    certified: bool,
}

#[pymethods]
impl PyDecimation {
    #[getter]
    fn tau_len(&self) -> usize {
        self.kept.len()
    }
}

#[pyclass(name = "NuBounds", frozen, get_all, skip_from_py_object)]
struct PyNuBounds {
    volume: f64,
    nu1: f64,
    nu2: f64,
    nu3: f64,
    rhs13: f64,
    rhs14: f64,
    rhs15: f64,
}

#[pyclass(name = "CdfBracket", frozen, get_all, skip_from_py_object)]
struct PyCdfBracket {
    lower: f64,
    upper: f64,
    remainder: f64,
    width: f64,
}

#[pyclass(name = "Estimate", frozen, get_all, skip_from_py_object)]
struct PyEstimate {
    mean: f64,
    variance: f64,
    stderr: f64,
    trials: usize,
}

#[pyfunction]
#[pyo3(signature = (dim, half_side, intensity, seed, convention = "torus"))]
fn sample_poisson(dim: usize, half_side: f64, intensity: f64, seed: u64, convention: &str) -> PyResult<PyPoints> {
    let bx = pf::BoxSpec::new(dim, half_side, self::convention(convention)?).py()?;
    Ok(PyPoints(pf::sample_poisson(&bx, intensity, seed).py()?))
}

#[pyfunction]
fn ball_volume(n: usize, r: f64) -> PyResult<f64> {
    pf::ball_volume(n, r).py()
}

#[pyfunction]
fn build_graph(config: &PyPoints, d: f64) -> PyResult<PyGraph> {
    Ok(PyGraph(proxgraph::build_graph(&config.0, d).py()?))
}

fn simple_graph(vertex_count: usize, edges: Vec<(usize, usize)>) -> PyResult<vcover::SimpleGraph> {
    vcover::SimpleGraph::new(vertex_count, &edges).py()
}

/// Lexicographically smallest minimum vertex cover: `(size, cover)`.
#[pyfunction]
fn min_vertex_cover(vertex_count: usize, edges: Vec<(usize, usize)>) -> PyResult<(usize, Vec<usize>)> {
    let c = vcover::min_vertex_cover(&simple_graph(vertex_count, edges)?).py()?;
    Ok((c.size, c.cover))
}

/// Cover of a connected graph by crossing out non-end vertices: `(size, cover)`.
#[pyfunction]
fn constructive_cover(vertex_count: usize, edges: Vec<(usize, usize)>) -> PyResult<(usize, Vec<usize>)> {
    let c = vcover::constructive_cover(&simple_graph(vertex_count, edges)?).py()?;
    Ok((c.size, c.cover))
}

/// Exhaustive check of the cover-number bounds; returns `(passed, violations)`.
#[pyfunction]
fn verify_cover_bounds(py: Python<'_>, max_v: usize) -> PyResult<(bool, usize)> {
    let report = py.detach(|| vcover::verify_cover_bounds(max_v)).py()?;
    Ok((report.passed(), report.violations.len()))
}

#[pyfunction]
#[pyo3(signature = (config, d, mode = "auto"))]
fn decimate(config: &PyPoints, d: f64, mode: &str) -> PyResult<PyDecimation> {
    let mode: DecimationMode = mode.parse().py()?;
    let r = dec::decimate(&config.0, d, mode).py()?;
    let b = r.bounds;
    Ok(PyDecimation {
        certified: r.check_bounds().certified(),
        census: PyCensus::from(&r.census),
        bounds: PyTauBounds {
            upper1: b.upper1,
            upper2: b.upper2,
            lower1: b.lower1,
            lower2: b.lower2,
            lower2_valid: b.lower2_valid,
        },
        all_exact: r.all_exact,
        tau: PyPoints(r.tau),
        kept: r.kept,
        removed: r.removed,
    })
}

#[pyfunction]
fn nu_bounds(n: usize, d: f64) -> PyResult<PyNuBounds> {
    let b = dec::nu_bounds(n, d).py()?;
    Ok(PyNuBounds {
        volume: b.volume,
        nu1: b.nu1,
        nu2: b.nu2,
        nu3: b.nu3,
        rhs13: b.rhs13,
        rhs14: b.rhs14,
        rhs15: b.rhs15,
    })
}

#[pyfunction]
fn explicit_lower(n: usize, nu: f64) -> PyResult<f64> {
    dec::explicit_lower(n, nu).py()
}

/// Max-min dispersion over `k`-subsets: `(best_min_distance, subset, density)`.
#[pyfunction]
fn delta_nu_exact(config: &PyPoints, k: usize) -> PyResult<(f64, Vec<usize>, f64)> {
    let r = dec::delta_nu_exact(&config.0, k).py()?;
    Ok((r.best_min_distance, r.subset, r.density))
}

type CurveTuple = (f64, f64, String, f64, f64, f64, String);

/// Finite-box decimated density rows as
/// `(d, nu_target, bound_kind, rhs, mean_density, stderr, flag)`.
#[pyfunction]
#[pyo3(signature = (dim, d_grid, half_side, trials, seed, epsilon_band = 0.1))]
fn estimate_d_curve(
    py: Python<'_>,
    dim: usize,
    d_grid: Vec<f64>,
    half_side: f64,
    trials: usize,
    seed: u64,
    epsilon_band: f64,
) -> PyResult<Vec<CurveTuple>> {
    let mut params = dec::CurveParams::new(dim, d_grid, half_side, trials, seed);
    params.epsilon_band = epsilon_band;
    let rows = py.detach(|| dec::estimate_d_curve(&params)).py()?;
    Ok(rows
        .iter()
        .map(|r| {
            (
                r.d,
                r.nu_target,
                r.bound_kind.as_str().to_string(),
                r.rhs,
                r.mean_density,
                r.stderr,
                r.flag(),
            )
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (n, half_side, d, intensity = 1.0))]
fn expected_m(n: usize, half_side: f64, d: f64, intensity: f64) -> PyResult<f64> {
    moments::expected_m(n, half_side, d, intensity).py()
}

#[pyfunction]
fn expected_m1_bracket(n: usize, half_side: f64, d: f64) -> PyResult<(f64, f64)> {
    let b = moments::expected_m1_bracket(n, half_side, d).py()?;
    Ok((b.lo, b.hi))
}

/// Monte Carlo estimate of the edge count `M` (or `M1` with `isolated=True`).
#[pyfunction]
#[pyo3(signature = (n, half_side, d, trials, seed, intensity = 1.0, isolated = false))]
#[allow(clippy::too_many_arguments)]
fn mc_edge_count(
    py: Python<'_>,
    n: usize,
    half_side: f64,
    d: f64,
    trials: usize,
    seed: u64,
    intensity: f64,
    isolated: bool,
) -> PyResult<PyEstimate> {
    let bx = pf::BoxSpec::torus(n, half_side).py()?;
    let e = py
        .detach(|| {
            if isolated {
                moments::mc_estimate(
                    |c: &pf::PointConfiguration| moments::isolated_edges(c, d),
                    &bx,
                    intensity,
                    trials,
                    seed,
                )
            } else {
                moments::mc_estimate(
                    |c: &pf::PointConfiguration| moments::edge_count(c, d),
                    &bx,
                    intensity,
                    trials,
                    seed,
                )
            }
        })
        .py()?;
    Ok(PyEstimate {
        mean: e.mean,
        variance: e.variance,
        stderr: e.stderr,
        trials: e.trials,
    })
}

/// `Var(M) / (2N)^n` per box size, and the max/min spread.
#[pyfunction]
fn variance_scaling_check(
    py: Python<'_>,
    n: usize,
    d: f64,
    half_sides: Vec<f64>,
    trials: usize,
    seed: u64,
) -> PyResult<(Vec<f64>, f64)> {
    let s = py
        .detach(|| moments::variance_scaling_check(n, d, &half_sides, trials, seed))
        .py()?;
    Ok((s.rows.iter().map(|r| r.ratio).collect(), s.spread))
}

/// Exceedance fractions per box size.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn concentration_check(
    py: Python<'_>,
    n: usize,
    d: f64,
    half_sides: Vec<f64>,
    delta: f64,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let rows = py
        .detach(|| moments::concentration_check(n, d, &half_sides, delta, epsilon, trials, seed))
        .py()?;
    Ok(rows.iter().map(|r| r.fraction).collect())
}

/// `count` Haar-random planar lattices as `(x, y, delta)` triples.
#[pyfunction]
fn sample_modular(count: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    lattice2d::sample_modular_batch(count, seed)
        .0
        .iter()
        .map(|s| (s.x, s.y, s.delta))
        .collect()
}

#[pyfunction]
fn lattice_density(x: f64, y: f64) -> PyResult<f64> {
    lattice2d::lattice_density(x, y).py()
}

#[pyfunction]
fn pdf_delta(a: f64) -> PyResult<f64> {
    lattice2d::pdf_delta(a).py()
}

#[pyfunction]
fn cdf_delta(a: f64) -> PyResult<f64> {
    lattice2d::cdf_delta(a).py()
}

/// `(mean, variance, max)` of the planar lattice density.
#[pyfunction]
fn delta_moments() -> (f64, f64, f64) {
    let m = lattice2d::delta_moments();
    (m.mean, m.variance, m.max)
}

#[pyfunction]
fn limit_cdf(x: f64) -> PyResult<f64> {
    schmidt::limit_cdf(x).py()
}

#[pyfunction]
fn remainder_bound(n: usize, vol: f64) -> PyResult<f64> {
    schmidt::remainder_bound(n, vol).py()
}

#[pyfunction]
fn fn_bracket(n: usize, x: f64) -> PyResult<PyCdfBracket> {
    let b = schmidt::fn_bracket(n, x).py()?;
    Ok(PyCdfBracket {
        lower: b.lower,
        upper: b.upper,
        remainder: b.remainder,
        width: b.width,
    })
}

#[pyfunction]
fn min_distance_for_density(n: usize, x: f64) -> PyResult<f64> {
    schmidt::min_distance_for_density(n, x).py()
}

#[pymodule]
fn packlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", packlab_core::VERSION)?;
    m.add_class::<PyBoxSpec>()?;
    m.add_class::<PyPoints>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCensus>()?;
    m.add_class::<PyTauBounds>()?;
    m.add_class::<PyDecimation>()?;
    m.add_class::<PyNuBounds>()?;
    m.add_class::<PyCdfBracket>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(sample_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(build_graph, m)?)?;
    m.add_function(wrap_pyfunction!(min_vertex_cover, m)?)?;
    m.add_function(wrap_pyfunction!(constructive_cover, m)?)?;
    m.add_function(wrap_pyfunction!(verify_cover_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(decimate, m)?)?;
    m.add_function(wrap_pyfunction!(nu_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(explicit_lower, m)?)?;
    m.add_function(wrap_pyfunction!(delta_nu_exact, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_d_curve, m)?)?;
    m.add_function(wrap_pyfunction!(expected_m, m)?)?;
    m.add_function(wrap_pyfunction!(expected_m1_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(mc_edge_count, m)?)?;
    m.add_function(wrap_pyfunction!(variance_scaling_check, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_check, m)?)?;
    m.add_function(wrap_pyfunction!(sample_modular, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_density, m)?)?;
    m.add_function(wrap_pyfunction!(pdf_delta, m)?)?;
    m.add_function(wrap_pyfunction!(cdf_delta, m)?)?;
    m.add_function(wrap_pyfunction!(delta_moments, m)?)?;
    m.add_function(wrap_pyfunction!(limit_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(remainder_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fn_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(min_distance_for_density, m)?)?;
    Ok(())
}
