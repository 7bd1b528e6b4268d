//! Step laws, walk paths, multi-walk ensembles and resampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexPolygon, Point2};
use crate::rng::RngStream;

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Covariance {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Covariance {
    pub const ZERO: Covariance = Covariance { xx: 0.0, xy: 0.0, yy: 0.0 };

    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Covariance { xx, xy, yy }
    }

    /// `sigma * I`. Note that `sigma` multiplies the identity directly: it is
    /// the per-coordinate variance, not a standard deviation.
    pub fn isotropic(sigma: f64) -> Self {
        Covariance { xx: sigma, xy: 0.0, yy: sigma }
    }

    pub fn apply(&self, e: Point2) -> Point2 {
        Point2::new(self.xx * e.x + self.xy * e.y, self.xy * e.x + self.yy * e.y)
    }

    /// Quadratic form `e^T Sigma e`.
    pub fn quad(&self, e: Point2) -> f64 {
        self.apply(e).dot(e)
    }

    /// Bilinear form `a^T Sigma b`.
    pub fn bilinear(&self, a: Point2, b: Point2) -> f64 {
        self.apply(a).dot(b)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Covariance { xx: c * self.xx, xy: c * self.xy, yy: c * self.yy }
    }

    /// `R Sigma R^T` for the rotation `R` by `phi`.
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let xx = c * c * self.xx - 2.0 * s * c * self.xy + s * s * self.yy;
        let yy = s * s * self.xx + 2.0 * s * c * self.xy + c * c * self.yy;
        let xy = s * c * (self.xx - self.yy) + (c * c - s * s) * self.xy;
        Covariance { xx, xy, yy }
    }

    pub fn add(&self, other: &Covariance) -> Self {
        Covariance {
            xx: self.xx + other.xx,
            xy: self.xy + other.xy,
            yy: self.yy + other.yy,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let r = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mean - r, mean + r)
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }

    pub fn check_psd(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::domain("covariance entries must be finite"));
        }
        let (lo, hi) = self.eigenvalues();
        if lo < -1e-12 * hi.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::domain(format!(
                "covariance is not positive semi-definite (eigenvalues {lo}, {hi})"
            )));
        }
        Ok(())
    }

    /// A matrix `A` with `A A^T = Sigma`: Cholesky when `Sigma` is positive
    /// definite, a symmetric eigen-decomposition square root otherwise.
    pub fn factor(&self) -> [[f64; 2]; 2] {
        if self.xx > 0.0 {
            let l11 = self.xx.sqrt();
            let l21 = self.xy / l11;
            let rem = self.yy - l21 * l21;
            if rem > 0.0 {
                return [[l11, 0.0], [l21, rem.sqrt()]];
            }
        }
        let (lo, hi) = self.eigenvalues();
        let (lo, hi) = (lo.max(0.0), hi.max(0.0));
        // unit eigenvector for the larger eigenvalue
        let v = if self.xy != 0.0 {
            let raw = Point2::new(hi - self.yy, self.xy);
            raw * (1.0 / raw.norm())
        } else if self.xx >= self.yy {
            Point2::new(1.0, 0.0)
        } else {
            Point2::new(0.0, 1.0)
        };
        let w = v.perp();
        let (a, b) = (hi.sqrt(), lo.sqrt());
        [[v.x * a, w.x * b], [v.y * a, w.y * b]]
    }
}

/// Serialized form of a [`StepDistribution`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum StepSpec {
    Gaussian { mean: Point2, covariance: Covariance },
    Discrete { support: Vec<(Point2, f64)> },
}

#[derive(Clone, Debug, PartialEq)]
enum Law {
    Gaussian { factor: [[f64; 2]; 2] },
    Discrete { support: Vec<(Point2, f64)>, cumulative: Vec<f64> },
}

/// The iid increment law of one walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepSpec", into = "StepSpec")]
pub struct StepDistribution {
    mean: Point2,
    covariance: Covariance,
    law: Law,
}

impl StepDistribution {
    pub fn gaussian(mean: Point2, covariance: Covariance) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::domain("drift must be finite"));
        }
        covariance.check_psd()?;
        Ok(StepDistribution {
            mean,
            covariance,
            law: Law::Gaussian { factor: covariance.factor() },
        })
    }

    /// Gaussian steps with covariance `sigma * I`.
    pub fn isotropic(mean: Point2, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::domain(format!("variance multiplier must be >= 0, got {sigma}")));
        }
        StepDistribution::gaussian(mean, Covariance::isotropic(sigma))
    }

    /// The constant step `step`.
    pub fn deterministic(step: Point2) -> Self {
        StepDistribution {
            mean: step,
            covariance: Covariance::ZERO,
            law: Law::Gaussian { factor: [[0.0; 2]; 2] },
        }
    }

    /// Finite support with positive probabilities summing to one.
    pub fn discrete(support: Vec<(Point2, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::domain("discrete support is empty"));
        }
        for (p, w) in &support {
            if !p.is_finite() || !(*w > 0.0) || !w.is_finite() {
                return Err(Error::domain(format!("invalid support atom {p:?} with weight {w}")));
            }
        }
        let total: f64 = support.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        let mean = support
            .iter()
            .fold(Point2::ORIGIN, |acc, &(p, w)| acc + p * w);
        let mut cov = Covariance::ZERO;
        for &(p, w) in &support {
            let d = p - mean;
            cov.xx += w * d.x * d.x;
            cov.xy += w * d.x * d.y;
            cov.yy += w * d.y * d.y;
        }
        let mut acc = 0.0;
        let cumulative = support
            .iter()
            .map(|(_, w)| {
                acc += w;
                acc
            })
            .collect();
        Ok(StepDistribution {
            mean,
            covariance: cov,
            law: Law::Discrete { support, cumulative },
        })
    }

    pub fn mean(&self) -> Point2 {
        self.mean
    }

    pub fn covariance(&self) -> Covariance {
        self.covariance
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.law, Law::Discrete { .. })
    }

    /// Atoms of a discrete law; `None` for gaussian steps.
    pub fn support(&self) -> Option<&[(Point2, f64)]> {
        match &self.law {
            Law::Discrete { support, .. } => Some(support),
            Law::Gaussian { .. } => None,
        }
    }

    /// Same law with every step multiplied by `c` (mean by `c`, covariance by `c^2`).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        match &self.law {
            Law::Gaussian { .. } => {
                StepDistribution::gaussian(self.mean * c, self.covariance.scaled(c * c))
            }
            Law::Discrete { support, .. } => {
                StepDistribution::discrete(support.iter().map(|&(p, w)| (p * c, w)).collect())
            }
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> Point2 {
        sample_step(self, rng)
    }
}

impl TryFrom<StepSpec> for StepDistribution {
    type Error = Error;

    fn try_from(spec: StepSpec) -> Result<Self> {
        match spec {
            StepSpec::Gaussian { mean, covariance } => StepDistribution::gaussian(mean, covariance),
            StepSpec::Discrete { support } => StepDistribution::discrete(support),
        }
    }
}

impl From<StepDistribution> for StepSpec {
    fn from(d: StepDistribution) -> Self {
        match d.law {
            Law::Gaussian { .. } => StepSpec::Gaussian {
                mean: d.mean,
                covariance: d.covariance,
            },
            Law::Discrete { support, .. } => StepSpec::Discrete { support },
        }
    }
}

/// One increment: gaussian via polar Box-Muller and the covariance factor,
/// discrete via inverse CDF on the cumulative weights.
pub fn sample_step(dist: &StepDistribution, rng: &mut RngStream) -> Point2 {
    match &dist.law {
        Law::Gaussian { factor } => {
            let (u, v) = rng.normal_pair();
            dist.mean
                + Point2::new(
                    factor[0][0] * u + factor[0][1] * v,
                    factor[1][0] * u + factor[1][1] * v,
                )
        }
        Law::Discrete { support, cumulative } => {
            let u = rng.uniform();
            let idx = cumulative.partition_point(|&c| c <= u).min(support.len() - 1);
            support[idx].0
        }
    }
}

/// Increments `Z_1..Z_n` and partial sums `S_0 = 0, S_1, .., S_n` of one walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkPath {
    increments: Vec<Point2>,
    partial_sums: Vec<Point2>,
}

impl WalkPath {
    pub fn from_increments(increments: Vec<Point2>) -> Self {
        let mut partial_sums = Vec::with_capacity(increments.len() + 1);
        let mut s = Point2::ORIGIN;
        partial_sums.push(s);
        for &z in &increments {
            s += z;
            partial_sums.push(s);
        }
        WalkPath { increments, partial_sums }
    }

    /// Number of steps `n`.
    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    /// `Z_1..Z_n`; `increments()[i - 1]` is `Z_i`.
    pub fn increments(&self) -> &[Point2] {
        &self.increments
    }

    /// `S_0..S_n`.
    pub fn partial_sums(&self) -> &[Point2] {
        &self.partial_sums
    }

    pub fn endpoint(&self) -> Point2 {
        *self.partial_sums.last().expect("S_0 always present")
    }
}

pub fn generate_walk(dist: &StepDistribution, n: usize, rng: &mut RngStream) -> WalkPath {
    WalkPath::from_increments((0..n).map(|_| sample_step(dist, rng)).collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLineage {
    pub master_seed: u64,
    pub replication: u64,
}

/// `m >= 1` independent walks of equal length together with their laws.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    walks: Vec<WalkPath>,
    distributions: Vec<StepDistribution>,
    lineage: SeedLineage,
}

impl Ensemble {
    /// Walk `k` draws from stream `RngStream::for_walk(master_seed, replication, k)`.
    pub fn generate(
        distributions: &[StepDistribution],
        n: usize,
        master_seed: u64,
        replication: u64,
    ) -> Result<Self> {
        if distributions.is_empty() {
            return Err(Error::domain("an ensemble needs at least one walk"));
        }
        let walks = distributions
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let mut rng = RngStream::for_walk(master_seed, replication, k as u64);
                generate_walk(d, n, &mut rng)
            })
            .collect();
        Ok(Ensemble {
            walks,
            distributions: distributions.to_vec(),
            lineage: SeedLineage { master_seed, replication },
        })
    }

    pub fn from_walks(distributions: Vec<StepDistribution>, walks: Vec<WalkPath>) -> Result<Self> {
        if walks.is_empty() || walks.len() != distributions.len() {
            return Err(Error::domain(format!(
                "{} walks for {} distributions",
                walks.len(),
                distributions.len()
            )));
        }
        let n = walks[0].steps();
        if walks.iter().any(|w| w.steps() != n) {
            return Err(Error::domain("walks of an ensemble must have equal length"));
        }
        Ok(Ensemble {
            walks,
            distributions,
            lineage: SeedLineage::default(),
        })
    }

    pub fn walks(&self) -> &[WalkPath] {
        &self.walks
    }

    pub fn distributions(&self) -> &[StepDistribution] {
        &self.distributions
    }

    pub fn lineage(&self) -> SeedLineage {
        self.lineage
    }

    pub fn walk_count(&self) -> usize {
        self.walks.len()
    }

    pub fn steps(&self) -> usize {
        self.walks[0].steps()
    }

    /// All `S_j^{(k)}` with `j <= upto`, the origin listed once.
    pub fn points_upto(&self, upto: usize) -> Result<Vec<Point2>> {
        if upto > self.steps() {
            return Err(Error::domain(format!(
                "upto = {upto} exceeds the walk length {}",
                self.steps()
            )));
        }
        let mut pts = Vec::with_capacity(1 + self.walks.len() * upto);
        pts.push(Point2::ORIGIN);
        for w in &self.walks {
            pts.extend_from_slice(&w.partial_sums()[1..=upto]);
        }
        Ok(pts)
    }

    /// Replace `Z_i^{(k)}` by `replacements[k]` in every walk.
    ///
    /// Positions follow `S_j - Z_i + Z~_i` for `j >= i` literally, so the
    /// shift `S_j^{(k,i)} - S_j^{(k)}` is the same vector for every `j >= i`.
    pub fn resample_with(&self, i: usize, replacements: &[Point2]) -> Result<Ensemble> {
        let n = self.steps();
        if i == 0 || i > n {
            return Err(Error::domain(format!("resampling index {i} outside 1..={n}")));
        }
        if replacements.len() != self.walks.len() {
            return Err(Error::domain("one replacement increment per walk is required"));
        }
        let walks = self
            .walks
            .iter()
            .zip(replacements)
            .map(|(w, &fresh)| {
                let shift = fresh - w.increments[i - 1];
                let mut increments = w.increments.clone();
                increments[i - 1] = fresh;
                let partial_sums = w
                    .partial_sums
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| if j < i { s } else { s + shift })
                    .collect();
                WalkPath { increments, partial_sums }
            })
            .collect();
        Ok(Ensemble {
            walks,
            distributions: self.distributions.clone(),
            lineage: self.lineage,
        })
    }
}

/// The ensemble resampled at time `i`: every walk's `i`-th increment is
/// replaced by a fresh independent draw from its own law (drawn from `rng`
/// in walk order).
pub fn resample_at(ens: &Ensemble, i: usize, rng: &mut RngStream) -> Result<Ensemble> {
    let n = ens.steps();
    if i == 0 || i > n {
        return Err(Error::domain(format!("resampling index {i} outside 1..={n}")));
    }
    let fresh: Vec<Point2> = ens.distributions.iter().map(|d| sample_step(d, rng)).collect();
    ens.resample_with(i, &fresh)
}

/// Convex hull of all partial sums up to step `upto` of every walk.
pub fn hull_of_ensemble(ens: &Ensemble, upto: usize) -> Result<ConvexPolygon> {
    convex_hull(&ens.points_upto(upto)?)
}
