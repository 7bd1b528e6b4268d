use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::normality::{run_test, NormalityTest};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::montecarlo::{run_experiment, ExperimentConfig, Functional};
use crate::rng::derive_path;

/// Cells with `-ln(avg p)` above this value count as rejecting normality.
pub const NEGLOG_THRESHOLD: f64 = 2.0;

pub const DEFAULT_SIGMAS: [f64; 8] = [0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 500.0];

/// How the per-repeat p-values of a cell are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// `-ln(mean p)`.
    #[default]
    MeanThenLog,
    /// `mean(-ln p)`; not the default.
    LogThenMean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mu1: Point2,
    pub mu2: Point2,
    /// Variance multipliers: walk `k` has covariance `sigma_k * I`.
    pub sigma_values: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub repeats: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub averaging: Averaging,
    #[serde(default)]
    pub test: NormalityTest,
}

impl GridSpec {
    pub fn new(mu1: Point2, mu2: Point2) -> Self {
        GridSpec {
            mu1,
            mu2,
            sigma_values: DEFAULT_SIGMAS.to_vec(),
            n: 10_000,
            reps: 1000,
            repeats: 5,
            master_seed: 0,
            averaging: Averaging::default(),
            test: NormalityTest::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_values.is_empty() {
            return Err(Error::domain("sigma_values is empty"));
        }
        if let Some(s) = self.sigma_values.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
            return Err(Error::domain(format!("invalid variance multiplier {s}")));
        }
        if self.n == 0 || self.reps == 0 || self.repeats == 0 {
            return Err(Error::domain("n, reps and repeats must be positive"));
        }
        Ok(())
    }

    /// Seed of repeat `r` of cell `(i, j)`.
    pub fn cell_seed(&self, i: usize, j: usize, r: usize) -> u64 {
        derive_path(self.master_seed, &[i as u64, j as u64, r as u64])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub sigma1: f64,
    pub sigma2: f64,
    /// Per-repeat p-values; `None` where the test rejected its input.
    pub p_l: Vec<Option<f64>>,
    pub p_d: Vec<Option<f64>>,
    /// `None` marks an invalid cell (some repeat had a degenerate sample).
    pub avg_p_l: Option<f64>,
    pub neglog_l: Option<f64>,
    pub avg_p_d: Option<f64>,
    pub neglog_d: Option<f64>,
}

impl GridCell {
    pub fn neglog(&self, f: Functional) -> Option<f64> {
        match f {
            Functional::Perimeter => self.neglog_l,
            Functional::Diameter => self.neglog_d,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValueGrid {
    pub spec: GridSpec,
    /// `cells[i][j]` has `sigma1 = sigma_values[i]`, `sigma2 = sigma_values[j]`.
    pub cells: Vec<Vec<GridCell>>,
}

impl PValueGrid {
    pub fn cell(&self, sigma1: f64, sigma2: f64) -> Option<&GridCell> {
        self.cells
            .iter()
            .flatten()
            .find(|c| c.sigma1 == sigma1 && c.sigma2 == sigma2)
    }
}

fn combine(ps: &[Option<f64>], averaging: Averaging) -> (Option<f64>, Option<f64>) {
    let Some(ps) = ps.iter().copied().collect::<Option<Vec<f64>>>() else {
        return (None, None);
    };
    let k = ps.len() as f64;
    let avg = ps.iter().sum::<f64>() / k;
    let neglog = match averaging {
        Averaging::MeanThenLog => -avg.ln(),
        Averaging::LogThenMean => ps.iter().map(|p| -p.ln()).sum::<f64>() / k,
    };
    (Some(avg), Some(neglog))
}

pub fn pvalue_grid(spec: &GridSpec) -> Result<PValueGrid> {
    spec.validate()?;
    let s = &spec.sigma_values;
    let jobs: Vec<(usize, usize, usize)> = (0..s.len())
        .flat_map(|i| (0..s.len()).flat_map(move |j| (0..spec.repeats).map(move |r| (i, j, r))))
        .collect();
    let pvals: Vec<(Option<f64>, Option<f64>)> = jobs
        .par_iter()
        .map(|&(i, j, r)| {
            let cfg = ExperimentConfig::two_walk_isotropic(
                spec.mu1,
                spec.mu2,
                s[i],
                s[j],
                spec.n,
                spec.reps,
                spec.cell_seed(i, j, r),
            )?;
            let set = run_experiment(&cfg)?;
            let p = |f| run_test(spec.test, &set.values(f)).ok().map(|t| t.p_value);
            Ok((p(Functional::Perimeter), p(Functional::Diameter)))
        })
        .collect::<Result<Vec<_>>>()?;

    let cells = (0..s.len())
        .map(|i| {
            (0..s.len())
                .map(|j| {
                    let base = (i * s.len() + j) * spec.repeats;
                    let chunk = &pvals[base..base + spec.repeats];
                    let p_l: Vec<_> = chunk.iter().map(|c| c.0).collect();
                    let p_d: Vec<_> = chunk.iter().map(|c| c.1).collect();
                    let (avg_p_l, neglog_l) = combine(&p_l, spec.averaging);
                    let (avg_p_d, neglog_d) = combine(&p_d, spec.averaging);
                    GridCell {
                        sigma1: s[i],
                        sigma2: s[j],
                        p_l,
                        p_d,
                        avg_p_l,
                        neglog_l,
                        avg_p_d,
                        neglog_d,
                    }
                })
                .collect()
        })
        .collect();
    Ok(PValueGrid {
        spec: spec.clone(),
        cells,
    })
}
