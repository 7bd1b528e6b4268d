//! Replicated experiments and convergence diagnostics.
//!
//! Replication `r` draws walk `k` from `RngStream::for_walk(master_seed, r, k)`,
//! and results are collected in replication order, so every output is
//! bit-identical for any number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    approx_sum_diameter_at, approx_sum_perimeter_at, drift_geometry, limit_shape, DriftGeometry,
};
use crate::error::{Error, Result};
use crate::geometry::{diameter, hausdorff, perimeter, range_profile, AngleGrid, Point2};
use crate::walks::{hull_of_ensemble, Ensemble, StepDistribution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Perimeter,
    Diameter,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::Perimeter => "L",
            Functional::Diameter => "D",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub distributions: Vec<StepDistribution>,
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn new(distributions: Vec<StepDistribution>, n: usize, reps: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            distributions,
            n,
            reps,
            master_seed,
            n_grid: None,
        }
    }

    /// Two gaussian walks with covariances `s1 * I` and `s2 * I`.
    pub fn two_walk_isotropic(
        mu1: Point2,
        mu2: Point2,
        s1: f64,
        s2: f64,
        n: usize,
        reps: usize,
        master_seed: u64,
    ) -> Result<Self> {
        Ok(ExperimentConfig::new(
            vec![StepDistribution::isotropic(mu1, s1)?, StepDistribution::isotropic(mu2, s2)?],
            n,
            reps,
            master_seed,
        ))
    }

    pub fn with_n_grid(mut self, n_grid: Vec<usize>) -> Self {
        self.n_grid = Some(n_grid);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.distributions.is_empty() {
            return Err(Error::domain("at least one walk is required"));
        }
        if self.n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if self.reps == 0 {
            return Err(Error::domain("reps must be at least 1"));
        }
        if let Some(g) = &self.n_grid {
            if g.is_empty() {
                return Err(Error::domain("n_grid is empty"));
            }
            if g[0] == 0 || g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain("n_grid must be positive and strictly increasing"));
            }
        }
        Ok(())
    }

    fn grid(&self) -> Result<&[usize]> {
        self.validate()?;
        self.n_grid
            .as_deref()
            .ok_or_else(|| Error::domain("this diagnostic needs an n_grid"))
    }

    fn geometry(&self) -> Result<DriftGeometry> {
        if self.distributions.len() != 2 {
            return Err(Error::domain("this diagnostic needs exactly two walks"));
        }
        drift_geometry(self.distributions[0].mean(), self.distributions[1].mean())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub rep: u64,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Unbiased sample variance; 0 for a single replication.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Summary {
        let n = xs.len() as f64;
        let (min, max) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if min == max {
            return Summary { mean: min, variance: 0.0, min, max };
        }
        let mean = xs.iter().sum::<f64>() / n;
        let variance = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Summary { mean, variance, min, max }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    pub summary_l: Summary,
    pub summary_d: Summary,
}

impl SampleSet {
    pub fn from_records(config: ExperimentConfig, records: Vec<Record>) -> Self {
        let l: Vec<f64> = records.iter().map(|r| r.l).collect();
        let d: Vec<f64> = records.iter().map(|r| r.d).collect();
        SampleSet {
            config,
            summary_l: Summary::of(&l),
            summary_d: Summary::of(&d),
            records,
        }
    }

    pub fn values(&self, f: Functional) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| match f {
                Functional::Perimeter => r.l,
                Functional::Diameter => r.d,
            })
            .collect()
    }
}

/// Run `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let records = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let ens = Ensemble::generate(&cfg.distributions, cfg.n, cfg.master_seed, rep)?;
            let hull = hull_of_ensemble(&ens, cfg.n)?;
            Ok(Record {
                rep,
                n: cfg.n,
                l: perimeter(&hull),
                d: diameter(&hull),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet::from_records(cfg.clone(), records))
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SllnPoint {
    pub n: usize,
    pub hausdorff: f64,
    pub perimeter_error: f64,
    pub diameter_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SllnCurve {
    pub points: Vec<SllnPoint>,
    /// Count of (replication, consecutive n) pairs where `L_n` or `D_n` decreased.
    pub monotone_violations: usize,
}

/// Medians over replications of the distance between `hull / n` and the
/// limit shape, measured on prefixes of one trajectory per replication.
pub fn slln_curve(cfg: &ExperimentConfig) -> Result<SllnCurve> {
    let grid = cfg.grid()?.to_vec();
    let means: Vec<Point2> = cfg.distributions.iter().map(|d| d.mean()).collect();
    let limit = limit_shape(&means)?;
    let n_max = *grid.last().expect("nonempty grid");
    let per_rep: Vec<Vec<(f64, f64, f64, f64, f64)>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let ens = Ensemble::generate(&cfg.distributions, n_max, cfg.master_seed, rep)?;
            grid.iter()
                .map(|&n| {
                    let hull = hull_of_ensemble(&ens, n)?;
                    let (l, d) = (perimeter(&hull), diameter(&hull));
                    let inv = 1.0 / n as f64;
                    let h = hausdorff(&hull.scaled(inv), &limit.polygon);
                    Ok((h, (l * inv - limit.per).abs(), (d * inv - limit.diam).abs(), l, d))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let monotone_violations = per_rep
        .iter()
        .map(|row| row.windows(2).filter(|w| w[1].3 < w[0].3 || w[1].4 < w[0].4).count())
        .sum();
    let points = grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let col = |f: fn(&(f64, f64, f64, f64, f64)) -> f64| {
                median(&per_rep.iter().map(|row| f(&row[k])).collect::<Vec<_>>())
            };
            SllnPoint {
                n,
                hausdorff: col(|t| t.0),
                perimeter_error: col(|t| t.1),
                diameter_error: col(|t| t.2),
            }
        })
        .collect();
    Ok(SllnCurve { points, monotone_violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRatio {
    pub var_l_over_n: f64,
    pub var_d_over_n: f64,
}

pub fn variance_ratio(samples: &SampleSet) -> Result<VarianceRatio> {
    if samples.records.len() < 2 {
        return Err(Error::domain("variance needs at least two replications"));
    }
    let n = samples.config.n as f64;
    Ok(VarianceRatio {
        var_l_over_n: samples.summary_l.variance / n,
        var_d_over_n: samples.summary_d.variance / n,
    })
}

/// `(x - sample mean) / sqrt(sigma2 * n)`; the sample mean stands in for the
/// unknown expectation.
pub fn standardize(samples: &SampleSet, f: Functional, sigma2: f64) -> Result<Vec<f64>> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::domain(format!("sigma^2 must be positive, got {sigma2}")));
    }
    let xs = samples.values(f);
    let mean = Summary::of(&xs).mean;
    let scale = (sigma2 * samples.config.n as f64).sqrt();
    Ok(xs.iter().map(|x| (x - mean) / scale).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2Point {
    pub n: usize,
    pub second_moment: f64,
}

/// Per `n`: empirical second moment of `n^{-1/2} (X_n - A_n)` centred by its
/// replication mean, where `A_n` is the linear approximation sum.
///
/// The residual is centred as a whole. Centring `X_n` alone would leave the
/// sampling error of the mean of `A_n` in the statistic, a floor of about
/// `sigma^2 / reps` that hides the decay.
pub fn l2_error_curve(cfg: &ExperimentConfig, f: Functional) -> Result<Vec<L2Point>> {
    let grid = cfg.grid()?.to_vec();
    let g = cfg.geometry()?;
    let n_max = *grid.last().expect("nonempty grid");
    let per_rep: Vec<Vec<f64>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let ens = Ensemble::generate(&cfg.distributions, n_max, cfg.master_seed, rep)?;
            grid.iter()
                .map(|&n| {
                    let hull = hull_of_ensemble(&ens, n)?;
                    Ok(match f {
                        Functional::Perimeter => {
                            perimeter(&hull) - approx_sum_perimeter_at(&ens, &g, n)?
                        }
                        Functional::Diameter => diameter(&hull) - approx_sum_diameter_at(&ens, &g, n)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if cfg.reps < 2 {
        return Err(Error::domain("the residual moment needs at least two replications"));
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let col: Vec<f64> = per_rep.iter().map(|row| row[k]).collect();
            L2Point {
                n,
                second_moment: Summary::of(&col).variance / n as f64,
            }
        })
        .collect())
}

/// Outcome of comparing the range functions of an ensemble and its resampling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResamplingBound {
    /// `max_theta |R_n(theta) - R_n^{(i)}(theta)|` over the angle grid.
    pub sup_delta: f64,
    /// `2 * sum_k (|Z_i^k| + |Z~_i^k|)`.
    pub bound: f64,
    /// `|L_n - L_n^{(i)}|`.
    pub perimeter_delta: f64,
    /// `pi * bound`, the bound integrated over `[0, pi]`.
    pub perimeter_bound: f64,
    pub holds: bool,
}

/// Angle count used by [`resampling_bound_check`].
pub const BOUND_GRID: usize = 4096;

pub fn resampling_bound_check(ens: &Ensemble, i: usize, resampled: &Ensemble) -> Result<ResamplingBound> {
    let n = ens.steps();
    if i == 0 || i > n || resampled.steps() != n || resampled.walk_count() != ens.walk_count() {
        return Err(Error::domain("resampled ensemble does not match the original"));
    }
    let grid = AngleGrid::new(BOUND_GRID)?;
    let (h, hr) = (hull_of_ensemble(ens, n)?, hull_of_ensemble(resampled, n)?);
    let (r, rr) = (range_profile(&h, &grid), range_profile(&hr, &grid));
    let sup_delta = r.iter().zip(&rr).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let bound = 2.0
        * ens
            .walks()
            .iter()
            .zip(resampled.walks())
            .map(|(a, b)| a.increments()[i - 1].norm() + b.increments()[i - 1].norm())
            .sum::<f64>();
    let perimeter_delta = (perimeter(&h) - perimeter(&hr)).abs();
    let perimeter_bound = std::f64::consts::PI * bound;
    // rounding slack proportional to the hull size
    let slack = 1e-9 * (1.0 + r.iter().chain(&rr).fold(0.0f64, |m, v| m.max(*v)));
    let holds = sup_delta <= bound + slack && perimeter_delta <= perimeter_bound + slack;
    Ok(ResamplingBound {
        sup_delta,
        bound,
        perimeter_delta,
        perimeter_bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::walks::resample_at;
    use std::f64::consts::SQRT_2;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn det_cfg(n: usize, reps: usize) -> ExperimentConfig {
        ExperimentConfig::new(
            vec![
                StepDistribution::deterministic(p(1.0, 0.0)),
                StepDistribution::deterministic(p(0.0, 1.0)),
            ],
            n,
            reps,
            1,
        )
    }

    #[test]
    fn deterministic_experiment() {
        let s = run_experiment(&det_cfg(50, 10)).unwrap();
        assert_eq!(s.records.len(), 10);
        assert!(s.records.iter().all(|r| r.l == s.records[0].l && r.d == s.records[0].d));
        assert_eq!(s.summary_l.variance, 0.0);
        assert!((s.records[0].l - 50.0 * (2.0 + SQRT_2)).abs() < 1e-10);
        let v = variance_ratio(&s).unwrap();
        assert_eq!((v.var_l_over_n, v.var_d_over_n), (0.0, 0.0));
        assert!(standardize(&s, Functional::Perimeter, 1.0).unwrap().iter().all(|&z| z == 0.0));
    }

    #[test]
    fn repeat_runs_identical_across_workers() {
        let cfg = ExperimentConfig::two_walk_isotropic(p(1.0, 0.0), p(0.0, 1.0), 1.0, 1.0, 300, 16, 9)
            .unwrap();
        let a = with_workers(1, || run_experiment(&cfg)).unwrap().unwrap();
        let b = with_workers(4, || run_experiment(&cfg)).unwrap().unwrap();
        let c = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn summary_recomputes_from_records() {
        let cfg = ExperimentConfig::two_walk_isotropic(p(1.0, 0.0), p(0.0, 1.0), 1.0, 1.0, 200, 30, 2)
            .unwrap();
        let s = run_experiment(&cfg).unwrap();
        let l: Vec<f64> = s.records.iter().map(|r| r.l).collect();
        let m = l.iter().sum::<f64>() / 30.0;
        let v = l.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 29.0;
        assert!((s.summary_l.mean - m).abs() <= 1e-9 * m);
        assert!((s.summary_l.variance - v).abs() <= 1e-9 * v);
    }

    #[test]
    fn scale_equivariance_with_shared_seeds() {
        let cfg = ExperimentConfig::two_walk_isotropic(p(1.0, 0.2), p(-0.3, 1.0), 1.5, 0.7, 200, 8, 5)
            .unwrap();
        for c in [2.0, 3.0] {
            let mut scaled = cfg.clone();
            scaled.distributions = cfg.distributions.iter().map(|d| d.scaled(c).unwrap()).collect();
            let (a, b) = (run_experiment(&cfg).unwrap(), run_experiment(&scaled).unwrap());
            for (x, y) in a.records.iter().zip(&b.records) {
                assert!((y.l - c * x.l).abs() <= 1e-12 * y.l);
                assert!((y.d - c * x.d).abs() <= 1e-12 * y.d);
            }
        }
    }

    #[test]
    fn standardize_is_shift_invariant() {
        let cfg = ExperimentConfig::two_walk_isotropic(p(1.0, 0.0), p(0.0, 1.0), 1.0, 1.0, 100, 20, 3)
            .unwrap();
        let s = run_experiment(&cfg).unwrap();
        let mut shifted = s.clone();
        for r in &mut shifted.records {
            r.l += 1000.0;
        }
        let (a, b) = (
            standardize(&s, Functional::Perimeter, 2.0).unwrap(),
            standardize(&shifted, Functional::Perimeter, 2.0).unwrap(),
        );
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!(standardize(&s, Functional::Perimeter, 0.0).is_err());
    }

    #[test]
    fn slln_deterministic_and_zero_drift() {
        let c = slln_curve(&det_cfg(1, 3).with_n_grid(vec![10, 100, 1000])).unwrap();
        for pt in &c.points {
            assert!(pt.hausdorff < 1e-12 && pt.perimeter_error < 1e-12 && pt.diameter_error < 1e-12);
        }
        assert_eq!(c.monotone_violations, 0);

        let cfg = ExperimentConfig::two_walk_isotropic(Point2::ORIGIN, Point2::ORIGIN, 1.0, 1.0, 1, 9, 4)
            .unwrap()
            .with_n_grid(vec![100, 1000, 10000]);
        let c = slln_curve(&cfg).unwrap();
        assert!(c.points.windows(2).all(|w| w[1].hausdorff < w[0].hausdorff));
        // against the origin the distance is the largest |S_j| / n
        let ens = Ensemble::generate(&cfg.distributions, 100, 4, 0).unwrap();
        let far = ens
            .walks()
            .iter()
            .flat_map(|w| w.partial_sums().iter().map(|s| s.norm()))
            .fold(0.0, f64::max);
        let hull = hull_of_ensemble(&ens, 100).unwrap().scaled(0.01);
        let origin = crate::geometry::ConvexPolygon::point(Point2::ORIGIN);
        assert!((hausdorff(&hull, &origin) - far / 100.0).abs() < 1e-12);
    }

    #[test]
    fn l2_curve_deterministic_is_zero() {
        let c = l2_error_curve(&det_cfg(1, 4).with_n_grid(vec![10, 100]), Functional::Perimeter).unwrap();
        assert!(c.iter().all(|pt| pt.second_moment.abs() < 1e-20));
        let c = l2_error_curve(&det_cfg(1, 4).with_n_grid(vec![10, 100]), Functional::Diameter).unwrap();
        assert!(c.iter().all(|pt| pt.second_moment.abs() < 1e-20));
    }

    #[test]
    fn l2_curve_rejects_assumption_violations() {
        let cfg = ExperimentConfig::two_walk_isotropic(p(100.0, 0.0), Point2::ORIGIN, 1.0, 1.0, 1, 4, 0)
            .unwrap()
            .with_n_grid(vec![10]);
        assert!(l2_error_curve(&cfg, Functional::Perimeter).is_err());
    }

    #[test]
    fn resampling_bound_small_batch() {
        let d = vec![
            StepDistribution::isotropic(p(1.0, 0.0), 1.0).unwrap(),
            StepDistribution::isotropic(p(0.0, 1.0), 1.0).unwrap(),
        ];
        let mut rng = RngStream::new(1, 0);
        for rep in 0..50 {
            let ens = Ensemble::generate(&d, 100, 77, rep).unwrap();
            let i = 1 + (rng.next_u64() % 100) as usize;
            let res = resample_at(&ens, i, &mut rng).unwrap();
            let r = resampling_bound_check(&ens, i, &res).unwrap();
            assert!(r.holds, "{r:?}");
        }
        let det = Ensemble::generate(&det_cfg(1, 1).distributions, 100, 0, 0).unwrap();
        let res = resample_at(&det, 5, &mut rng).unwrap();
        let r = resampling_bound_check(&det, 5, &res).unwrap();
        assert_eq!(r.sup_delta, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn invalid_configs() {
        assert!(run_experiment(&det_cfg(0, 1)).is_err());
        assert!(run_experiment(&det_cfg(1, 0)).is_err());
        assert!(slln_curve(&det_cfg(1, 1)).is_err());
        assert!(slln_curve(&det_cfg(1, 1).with_n_grid(vec![10, 5])).is_err());
    }
}
