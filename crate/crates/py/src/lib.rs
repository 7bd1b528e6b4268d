//! Python bindings. Points are `(x, y)` tuples, covariances `(xx, xy, yy)`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hullwalk::asymptotics::{self, Dominant};
use hullwalk::geometry::{self, ConvexPolygon};
use hullwalk::montecarlo::{self, ExperimentConfig, Functional};
use hullwalk::oracle::{self, DiscreteEnsembleSpec};
use hullwalk::stats::{self, NormalityTest};
use hullwalk::walks::{Covariance, StepDistribution};
use hullwalk::Point2;

type Xy = (f64, f64);

fn err(e: hullwalk::Error) -> PyErr {
    use hullwalk::Error::*;
    match e {
        Domain(_) | AssumptionViolated(_) | Degenerate(_) | Parse { .. } | BudgetExceeded { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn pt((x, y): Xy) -> Point2 {
    Point2::new(x, y)
}

fn hull(points: &[Xy]) -> PyResult<ConvexPolygon> {
    let pts: Vec<Point2> = points.iter().copied().map(pt).collect();
    geometry::convex_hull(&pts).map_err(err)
}

fn xy_list(poly: &ConvexPolygon) -> Vec<Xy> {
    poly.vertices().iter().map(|p| (p.x, p.y)).collect()
}

/// Counterclockwise hull vertices of a point list.
#[pyfunction]
fn convex_hull(points: Vec<Xy>) -> PyResult<Vec<Xy>> {
    Ok(xy_list(&hull(&points)?))
}

/// Perimeter of the hull of `points` (a segment counts twice).
#[pyfunction]
fn perimeter(points: Vec<Xy>) -> PyResult<f64> {
    Ok(geometry::perimeter(&hull(&points)?))
}

#[pyfunction]
fn diameter(points: Vec<Xy>) -> PyResult<f64> {
    Ok(geometry::diameter(&hull(&points)?))
}

#[pyfunction]
fn area(points: Vec<Xy>) -> PyResult<f64> {
    Ok(geometry::area(&hull(&points)?))
}

/// Hausdorff distance between the hulls of two point lists.
#[pyfunction]
fn hausdorff(a: Vec<Xy>, b: Vec<Xy>) -> PyResult<f64> {
    Ok(geometry::hausdorff(&hull(&a)?, &hull(&b)?))
}

#[pyclass(frozen, get_all, module = "hullwalk")]
struct DriftGeometry {
    mu1: Xy,
    mu2: Xy,
    theta1: f64,
    theta2: f64,
    theta0: Option<f64>,
    e_perp: Option<Xy>,
    a1_holds: bool,
    a2_holds: bool,
    /// `"walk1"`, `"walk2"`, `"difference"`, or `None` when A2 fails.
    dominant: Option<String>,
    warnings: Vec<String>,
}

#[pymethods]
impl DriftGeometry {
    fn __repr__(&self) -> String {
        format!(
            "DriftGeometry(mu1={:?}, mu2={:?}, a1_holds={}, dominant={:?})",
            self.mu1, self.mu2, self.a1_holds, self.dominant
        )
    }
}

#[pyfunction]
fn drift_geometry(mu1: Xy, mu2: Xy) -> PyResult<DriftGeometry> {
    let g = asymptotics::drift_geometry(pt(mu1), pt(mu2)).map_err(err)?;
    let dominant = g.dominant().map(|d| {
        match d {
            Dominant::Walk1 => "walk1",
            Dominant::Walk2 => "walk2",
            Dominant::Difference => "difference",
        }
        .to_string()
    });
    Ok(DriftGeometry {
        mu1,
        mu2,
        theta1: g.theta1,
        theta2: g.theta2,
        theta0: g.theta0,
        e_perp: g.e_perp.map(|e| (e.x, e.y)),
        a1_holds: g.a1_holds,
        a2_holds: dominant.is_some(),
        dominant,
        warnings: g.warnings,
    })
}

/// `(vertices, perimeter, diameter)` of the hull of the origin and the drifts.
#[pyfunction]
fn limit_shape(drifts: Vec<Xy>) -> PyResult<(Vec<Xy>, f64, f64)> {
    let d: Vec<Point2> = drifts.into_iter().map(pt).collect();
    let s = asymptotics::limit_shape(&d).map_err(err)?;
    Ok((xy_list(&s.polygon), s.per, s.diam))
}

fn gaussian(mu: Xy, cov: (f64, f64, f64)) -> PyResult<StepDistribution> {
    StepDistribution::gaussian(pt(mu), Covariance::new(cov.0, cov.1, cov.2)).map_err(err)
}

/// `(sigma_L^2, sigma_D^2)`; an entry is `None` when its assumption fails.
#[pyfunction]
#[pyo3(signature = (mu1, mu2, cov1 = (1.0, 0.0, 1.0), cov2 = (1.0, 0.0, 1.0)))]
fn variance_constants(
    mu1: Xy,
    mu2: Xy,
    cov1: (f64, f64, f64),
    cov2: (f64, f64, f64),
) -> PyResult<(Option<f64>, Option<f64>)> {
    let (d1, d2) = (gaussian(mu1, cov1)?, gaussian(mu2, cov2)?);
    let g = asymptotics::drift_geometry(pt(mu1), pt(mu2)).map_err(err)?;
    let keep = |r: hullwalk::Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(hullwalk::Error::AssumptionViolated(_)) => Ok(None),
        Err(e) => Err(err(e)),
    };
    Ok((
        keep(asymptotics::sigma_l2(&d1, &d2, &g))?,
        keep(asymptotics::sigma_d2(&d1, &d2, &g))?,
    ))
}

/// Perimeters and diameters of `reps` independent two-walk hulls.
#[pyclass(frozen, module = "hullwalk")]
struct SampleSet {
    inner: montecarlo::SampleSet,
}

#[pymethods]
impl SampleSet {
    #[getter]
    fn perimeters(&self) -> Vec<f64> {
        self.inner.values(Functional::Perimeter)
    }

    #[getter]
    fn diameters(&self) -> Vec<f64> {
        self.inner.values(Functional::Diameter)
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.config.n
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.config.master_seed
    }

    /// CSV text with header `rep,n,L,D`.
    fn to_csv(&self) -> PyResult<String> {
        hullwalk::io::samples_csv_string(&self.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }
}

/// Gaussian walks with covariance `sigma_k * I`, or a full `cov_k` when given.
#[pyfunction]
#[pyo3(signature = (mu1, mu2, steps, reps, seed, sigma1 = 1.0, sigma2 = 1.0, cov1 = None, cov2 = None, workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    mu1: Xy,
    mu2: Xy,
    steps: usize,
    reps: usize,
    seed: u64,
    sigma1: f64,
    sigma2: f64,
    cov1: Option<(f64, f64, f64)>,
    cov2: Option<(f64, f64, f64)>,
    workers: Option<usize>,
) -> PyResult<SampleSet> {
    let d1 = gaussian(mu1, cov1.unwrap_or((sigma1, 0.0, sigma1)))?;
    let d2 = gaussian(mu2, cov2.unwrap_or((sigma2, 0.0, sigma2)))?;
    let cfg = ExperimentConfig::new(vec![d1, d2], steps, reps, seed);
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let inner = py
        .detach(|| montecarlo::with_workers(workers, || montecarlo::run_experiment(&cfg)))
        .map_err(err)?
        .map_err(err)?;
    Ok(SampleSet { inner })
}

/// Normality p-value with mean and variance estimated from the sample.
#[pyfunction]
#[pyo3(signature = (samples, test = "anderson-darling"))]
fn normality_pvalue(samples: Vec<f64>, test: &str) -> PyResult<f64> {
    let test = match test {
        "anderson-darling" => NormalityTest::AndersonDarling,
        "lilliefors" => NormalityTest::Lilliefors,
        other => return Err(PyValueError::new_err(format!("unknown test `{other}`"))),
    };
    Ok(stats::run_test(test, &samples).map_err(err)?.p_value)
}

/// Exact moments and the decomposition report of a discrete ensemble given
/// as JSON (`{"n": 2, "walks": [{"support": [[[1, 0], 0.5], ...]}, ...]}`),
/// returned as a JSON string.
#[pyfunction]
fn oracle_report(py: Python<'_>, spec_json: &str) -> PyResult<String> {
    let spec = DiscreteEnsembleSpec::from_json(spec_json).map_err(err)?;
    let (exact, mds) = py
        .detach(|| Ok::<_, hullwalk::Error>((oracle::enumerate_exact(&spec)?, oracle::mds_check(&spec)?)))
        .map_err(err)?;
    let doc = serde_json::json!({ "exact": exact, "decomposition": mds });
    Ok(doc.to_string())
}

#[pymodule(name = "hullwalk")]
fn hullwalk_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<DriftGeometry>()?;
    m.add_class::<SampleSet>()?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(perimeter, m)?)?;
    m.add_function(wrap_pyfunction!(diameter, m)?)?;
    m.add_function(wrap_pyfunction!(area, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(drift_geometry, m)?)?;
    m.add_function(wrap_pyfunction!(limit_shape, m)?)?;
    m.add_function(wrap_pyfunction!(variance_constants, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(normality_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_report, m)?)?;
    Ok(())
}
