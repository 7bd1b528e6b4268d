//! Exact enumeration over small discrete ensembles.
//!
//! Every joint step sequence of every walk is listed with its probability, so
//! expectations, variances and the martingale-difference decomposition of the
//! perimeter and diameter can be checked without sampling error.
//!
//! Outcomes are indexed step-major: the joint outcome of all walks at step 1
//! is the most significant digit, and within one step walk 0 is the most
//! significant sub-digit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, diameter, perimeter, Point2};
use crate::walks::{Ensemble, StepDistribution, WalkPath};

/// Maximal number of weighted outcomes.
pub const OUTCOME_CAP: u128 = 1_000_000;
/// Maximal number of inner terms of the martingale-difference check.
pub const INNER_CAP: u128 = 100_000_000;
/// Relative tolerance of the decomposition identities.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

fn csum(iter: impl IntoIterator<Item = f64>) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Walks with finite step supports, run for `n` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteEnsembleSpec {
    n: usize,
    walks: Vec<StepDistribution>,
}

/// File form: `{"n": 2, "walks": [{"support": [[[1, 0], 0.5], [[0, 1], 0.5]]}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteEnsembleFile {
    pub n: usize,
    pub walks: Vec<SupportFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportFile {
    pub support: Vec<([f64; 2], f64)>,
}

impl DiscreteEnsembleSpec {
    pub fn new(n: usize, walks: Vec<StepDistribution>) -> Result<Self> {
        if walks.is_empty() {
            return Err(Error::domain("at least one walk is required"));
        }
        if walks.iter().any(|w| !w.is_discrete()) {
            return Err(Error::domain("exact enumeration needs discrete step laws"));
        }
        let spec = DiscreteEnsembleSpec { n, walks };
        spec.check_budget(spec.outcome_count(), OUTCOME_CAP)?;
        Ok(spec)
    }

    pub fn from_file(file: &DiscreteEnsembleFile) -> Result<Self> {
        let walks = file
            .walks
            .iter()
            .map(|w| {
                StepDistribution::discrete(
                    w.support.iter().map(|&([x, y], p)| (Point2::new(x, y), p)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteEnsembleSpec::new(file.n, walks)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        DiscreteEnsembleSpec::from_file(&serde_json::from_str(text)?)
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn walks(&self) -> &[StepDistribution] {
        &self.walks
    }

    /// Number `J` of joint outcomes of one step of all walks.
    pub fn joint_size(&self) -> u128 {
        self.walks
            .iter()
            .map(|w| w.support().map_or(1, |s| s.len()) as u128)
            .product()
    }

    /// `J^n`, saturating.
    pub fn outcome_count(&self) -> u128 {
        let j = self.joint_size();
        (0..self.n).fold(1u128, |acc, _| acc.saturating_mul(j))
    }

    fn check_budget(&self, count: u128, cap: u128) -> Result<()> {
        if count > cap {
            Err(Error::BudgetExceeded { count, cap })
        } else {
            Ok(())
        }
    }

    /// Joint step atoms: increments of every walk and their probability.
    fn joint_atoms(&self) -> Vec<(Vec<Point2>, f64)> {
        let mut atoms = vec![(Vec::new(), 1.0)];
        for w in &self.walks {
            let support = w.support().expect("discrete law");
            atoms = atoms
                .into_iter()
                .flat_map(|(zs, p)| {
                    support.iter().map(move |&(z, q)| {
                        let mut next = zs.clone();
                        next.push(z);
                        (next, p * q)
                    })
                })
                .collect();
        }
        atoms
    }

    /// Digits `a_1..a_n` of outcome `index`.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        let j = self.joint_size() as usize;
        let mut digits = vec![0; self.n];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = rest % j;
            rest /= j;
        }
        digits
    }

    /// The ensemble realised by outcome `index`.
    pub fn outcome_ensemble(&self, index: usize) -> Result<Ensemble> {
        let atoms = self.joint_atoms();
        if index as u128 >= self.outcome_count() {
            return Err(Error::domain(format!("outcome index {index} out of range")));
        }
        let digits = self.digits(index);
        let walks = (0..self.walks.len())
            .map(|k| WalkPath::from_increments(digits.iter().map(|&a| atoms[a].0[k]).collect()))
            .collect();
        Ensemble::from_walks(self.walks.clone(), walks)
    }
}

/// Perimeter, diameter and probability of every outcome.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    pub joint_size: usize,
    pub steps: usize,
    pub joint_probs: Vec<f64>,
    pub prob: Vec<f64>,
    pub perimeter: Vec<f64>,
    pub diameter: Vec<f64>,
}

impl OutcomeTable {
    pub fn build(spec: &DiscreteEnsembleSpec) -> Result<Self> {
        spec.check_budget(spec.outcome_count(), OUTCOME_CAP)?;
        let atoms = spec.joint_atoms();
        let j = atoms.len();
        let total = spec.outcome_count() as usize;
        let m = spec.walks.len();
        let rows: Vec<(f64, f64, f64)> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let digits = spec.digits(idx);
                let mut pts = Vec::with_capacity(1 + m * digits.len());
                pts.push(Point2::ORIGIN);
                let mut prob = 1.0;
                for &a in &digits {
                    prob *= atoms[a].1;
                }
                for k in 0..m {
                    let mut s = Point2::ORIGIN;
                    for &a in &digits {
                        s += atoms[a].0[k];
                        pts.push(s);
                    }
                }
                let hull = convex_hull(&pts).expect("finite support points");
                (prob, perimeter(&hull), diameter(&hull))
            })
            .collect();
        Ok(OutcomeTable {
            joint_size: j,
            steps: spec.n,
            joint_probs: atoms.iter().map(|a| a.1).collect(),
            prob: rows.iter().map(|r| r.0).collect(),
            perimeter: rows.iter().map(|r| r.1).collect(),
            diameter: rows.iter().map(|r| r.2).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Probabilities of all digit strings of length `len`.
    fn block_probs(&self, len: usize) -> Vec<f64> {
        let mut out = vec![1.0];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|&p| self.joint_probs.iter().map(move |&q| p * q))
                .collect();
        }
        out
    }

    fn mean(&self, values: &[f64]) -> f64 {
        csum(self.prob.iter().zip(values).map(|(p, v)| p * v))
    }

    fn variance(&self, values: &[f64]) -> f64 {
        let mu = self.mean(values);
        csum(self.prob.iter().zip(values).map(|(p, v)| p * (v - mu) * (v - mu)))
    }

    /// `E[F - F^{(i)} | Z_1..Z_i]` for every prefix of length `i` (1-based),
    /// by summing over the resampled increment and the future steps.
    pub fn martingale_difference(&self, values: &[f64], i: usize) -> Vec<f64> {
        let j = self.joint_size;
        let future_len = self.steps - i;
        let future = self.block_probs(future_len);
        let block = future.len();
        let prefixes = self.len() / block;
        (0..prefixes)
            .into_par_iter()
            .map(|prefix| {
                let prev = prefix / j;
                let mut acc = CompensatedSum::default();
                for (f, &pf) in future.iter().enumerate() {
                    let own = values[prefix * block + f];
                    let resampled = csum(
                        self.joint_probs
                            .iter()
                            .enumerate()
                            .map(|(z, &pz)| pz * values[(prev * j + z) * block + f]),
                    );
                    acc.add(pf * (own - resampled));
                }
                acc.value()
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub outcomes: u64,
    pub e_l: f64,
    pub var_l: f64,
    pub e_d: f64,
    pub var_d: f64,
}

pub fn enumerate_exact(spec: &DiscreteEnsembleSpec) -> Result<ExactMoments> {
    let t = OutcomeTable::build(spec)?;
    Ok(moments(&t))
}

fn moments(t: &OutcomeTable) -> ExactMoments {
    ExactMoments {
        outcomes: t.len() as u64,
        e_l: t.mean(&t.perimeter),
        var_l: t.variance(&t.perimeter),
        e_d: t.mean(&t.diameter),
        var_d: t.variance(&t.diameter),
    }
}

/// Decomposition check of one functional (perimeter or diameter).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub mean: f64,
    pub variance: f64,
    /// `E[M_i^2]` for `i = 1..n`.
    pub second_moments: Vec<f64>,
    /// `max_omega |F - E F - sum_i M_i|`.
    pub max_pointwise_residual: f64,
    /// `|Var F - sum_i E[M_i^2]|`.
    pub variance_residual: f64,
    /// `max_i |E M_i|`.
    pub max_abs_mean: f64,
    /// `max_{i != j} |E[M_i M_j]|`.
    pub max_abs_cross: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdsReport {
    pub steps: usize,
    pub walks: usize,
    pub outcomes: u64,
    pub tolerance: f64,
    pub perimeter: DecompositionReport,
    pub diameter: DecompositionReport,
    /// `max_i` of the moment discrepancy between `F` and `F^{(i)}`.
    pub resampling_invariance_residual: f64,
    pub passed: bool,
}

fn decompose(t: &OutcomeTable, values: &[f64]) -> DecompositionReport {
    let n = t.steps;
    let mean = t.mean(values);
    let variance = t.variance(values);
    let diffs: Vec<Vec<f64>> = (1..=n)
        .map(|i| {
            let per_prefix = t.martingale_difference(values, i);
            let block = t.len() / per_prefix.len();
            (0..t.len()).map(|w| per_prefix[w / block]).collect()
        })
        .collect();

    let expect = |f: &dyn Fn(usize) -> f64| csum((0..t.len()).map(|w| t.prob[w] * f(w)));

    let max_pointwise_residual = (0..t.len())
        .map(|w| {
            let total = csum(diffs.iter().map(|d| d[w]));
            (values[w] - mean - total).abs()
        })
        .fold(0.0, f64::max);
    let second_moments: Vec<f64> = diffs.iter().map(|d| expect(&|w| d[w] * d[w])).collect();
    let variance_residual = (variance - csum(second_moments.iter().cloned())).abs();
    let max_abs_mean = diffs
        .iter()
        .map(|d| expect(&|w| d[w]).abs())
        .fold(0.0, f64::max);
    let mut max_abs_cross = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            max_abs_cross = max_abs_cross.max(expect(&|w| diffs[a][w] * diffs[b][w]).abs());
        }
    }

    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let level_tol = IDENTITY_TOL * scale;
    // the floor only matters for (near) zero variance
    let square_tol = IDENTITY_TOL * variance.max(1e-12 * scale * scale);
    let passed = max_pointwise_residual <= level_tol
        && variance_residual <= square_tol
        && max_abs_mean <= level_tol
        && max_abs_cross <= square_tol;

    DecompositionReport {
        mean,
        variance,
        second_moments,
        max_pointwise_residual,
        variance_residual,
        max_abs_mean,
        max_abs_cross,
        passed,
    }
}

/// Largest discrepancy in the first two moments between `F` and `F^{(i)}`.
fn resampling_invariance(t: &OutcomeTable, values: &[f64]) -> f64 {
    let j = t.joint_size;
    let mut worst = 0.0f64;
    for i in 1..=t.steps {
        let block = j.pow((t.steps - i) as u32);
        let (mut m1, mut m2) = (CompensatedSum::default(), CompensatedSum::default());
        for w in 0..t.len() {
            let prefix = w / block;
            let f = w % block;
            let prev = prefix / j;
            for (z, &pz) in t.joint_probs.iter().enumerate() {
                let v = values[(prev * j + z) * block + f];
                m1.add(t.prob[w] * pz * v);
                m2.add(t.prob[w] * pz * v * v);
            }
        }
        let mu = t.mean(values);
        let sq = csum(t.prob.iter().zip(values).map(|(p, v)| p * v * v));
        worst = worst.max((m1.value() - mu).abs()).max((m2.value() - sq).abs());
    }
    worst
}

pub fn mds_check(spec: &DiscreteEnsembleSpec) -> Result<MdsReport> {
    let j = spec.joint_size();
    let inner = spec
        .outcome_count()
        .saturating_mul(j + 1)
        .saturating_mul(spec.n.max(1) as u128);
    spec.check_budget(inner, INNER_CAP)?;
    let t = OutcomeTable::build(spec)?;
    let perimeter = decompose(&t, &t.perimeter);
    let diameter = decompose(&t, &t.diameter);
    let resampling_invariance_residual =
        resampling_invariance(&t, &t.perimeter).max(resampling_invariance(&t, &t.diameter));
    let scale = t.perimeter.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let passed = perimeter.passed
        && diameter.passed
        && resampling_invariance_residual <= IDENTITY_TOL * scale * scale;
    Ok(MdsReport {
        steps: spec.n,
        walks: spec.walks.len(),
        outcomes: t.len() as u64,
        tolerance: IDENTITY_TOL,
        perimeter,
        diameter,
        resampling_invariance_residual,
        passed,
    })
}
