//! Limit objects of the two-walk hull: drift geometry, assumption checks, the
//! limit triangle, the variance constants and the linear approximation sums.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, diameter, perimeter, ConvexPolygon, Point2};
use crate::walks::{Ensemble, StepDistribution};

/// Relative tolerance for the zero and unique-maximum checks on drift norms.
pub const NORM_TOL: f64 = 1e-9;
/// Relative margin below which a satisfied assumption is reported as near-degenerate.
pub const NEAR_DEGENERATE: f64 = 1e-3;

/// Which of `|mu1|`, `|mu2|`, `|mu1 - mu2|` is the unique maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominant {
    Walk1,
    Walk2,
    Difference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A2Status {
    Unique(Dominant),
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftGeometry {
    pub mu1: Point2,
    pub mu2: Point2,
    pub theta1: f64,
    pub theta2: f64,
    /// Angle in `[0, pi)` at which both drifts have equal projection;
    /// `None` when `mu1 = mu2`.
    pub theta0: Option<f64>,
    /// Unit normal of `e_theta0`, signed so that `e_perp . e_theta1 >= 0`.
    pub e_perp: Option<Point2>,
    pub a1_holds: bool,
    pub a2: A2Status,
    pub warnings: Vec<String>,
}

impl DriftGeometry {
    pub fn e_theta1(&self) -> Point2 {
        Point2::unit(self.theta1)
    }

    pub fn e_theta2(&self) -> Point2 {
        Point2::unit(self.theta2)
    }

    pub fn dominant(&self) -> Option<Dominant> {
        match self.a2 {
            A2Status::Unique(d) => Some(d),
            A2Status::Violated => None,
        }
    }

    fn require_a1(&self) -> Result<Point2> {
        match (self.a1_holds, self.e_perp) {
            (true, Some(e)) => Ok(e),
            _ => Err(Error::AssumptionViolated(format!(
                "A1 fails: 0 is among mu1 = {:?}, mu2 = {:?}, mu1 - mu2",
                self.mu1, self.mu2
            ))),
        }
    }

    fn require_a2(&self) -> Result<Dominant> {
        self.require_a1()?;
        self.dominant().ok_or_else(|| {
            Error::AssumptionViolated(format!(
                "A2 fails: |mu1|, |mu2|, |mu1 - mu2| have no unique maximum for mu1 = {:?}, mu2 = {:?}",
                self.mu1, self.mu2
            ))
        })
    }
}

pub fn drift_geometry(mu1: Point2, mu2: Point2) -> Result<DriftGeometry> {
    if !mu1.is_finite() || !mu2.is_finite() {
        return Err(Error::domain("drift vectors must be finite"));
    }
    let mut warnings = Vec::new();
    let diff = mu1 - mu2;
    let norms = [mu1.norm(), mu2.norm(), diff.norm()];
    let scale = norms.iter().cloned().fold(0.0, f64::max);

    for (name, (v, n)) in ["mu1", "mu2"].iter().zip([(mu1, norms[0]), (mu2, norms[1])]) {
        if v == Point2::ORIGIN {
            warnings.push(format!("{name} is the zero vector; its polar angle is taken as 0"));
        } else if n <= NORM_TOL * scale {
            warnings.push(format!("{name} is numerically zero; its polar angle is unreliable"));
        }
    }
    let theta1 = mu1.angle();
    let theta2 = mu2.angle();

    let a1_holds = scale > 0.0 && norms.iter().all(|&n| n > NORM_TOL * scale);
    if a1_holds && norms.iter().any(|&n| n < NEAR_DEGENERATE * scale) {
        warnings.push("A1 holds but a drift norm is near zero".into());
    }

    let mut sorted = norms;
    sorted.sort_by(f64::total_cmp);
    let a2 = if scale > 0.0 && sorted[2] - sorted[1] > NORM_TOL * sorted[2] {
        let idx = (0..3).find(|&k| norms[k] == sorted[2]).unwrap_or(0);
        if sorted[2] - sorted[1] < NEAR_DEGENERATE * sorted[2] {
            warnings.push("A2 holds but the two largest drift norms nearly tie".into());
        }
        A2Status::Unique([Dominant::Walk1, Dominant::Walk2, Dominant::Difference][idx])
    } else {
        A2Status::Violated
    };

    let (theta0, e_perp) = if diff == Point2::ORIGIN {
        warnings.push("mu1 = mu2: the equal-projection angle is undefined".into());
        (None, None)
    } else {
        let theta0 = (diff.angle() + 0.5 * PI).rem_euclid(PI);
        let u = diff * (1.0 / diff.norm());
        let along1 = u.dot(Point2::unit(theta1));
        let e = if along1.abs() <= 1e-12 {
            warnings.push(
                "e_perp . e_theta1 vanishes; sign chosen so that e_perp . e_theta2 <= 0".into(),
            );
            if u.dot(Point2::unit(theta2)) <= 0.0 {
                u
            } else {
                -u
            }
        } else if along1 > 0.0 {
            u
        } else {
            -u
        };
        (Some(theta0), Some(e))
    };

    Ok(DriftGeometry {
        mu1,
        mu2,
        theta1,
        theta2,
        theta0,
        e_perp,
        a1_holds,
        a2,
        warnings,
    })
}

/// `chull{0, mu_1, .., mu_m}` with its perimeter and diameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitShape {
    pub polygon: ConvexPolygon,
    pub per: f64,
    pub diam: f64,
}

pub fn limit_shape(drifts: &[Point2]) -> Result<LimitShape> {
    let mut pts = Vec::with_capacity(drifts.len() + 1);
    pts.push(Point2::ORIGIN);
    pts.extend_from_slice(drifts);
    let polygon = convex_hull(&pts)?;
    Ok(LimitShape {
        per: perimeter(&polygon),
        diam: diameter(&polygon),
        polygon,
    })
}

/// Limit of `Var[L_n] / n`.
pub fn sigma_l2(d1: &StepDistribution, d2: &StepDistribution, g: &DriftGeometry) -> Result<f64> {
    let ep = g.require_a1()?;
    let (e1, e2) = (g.e_theta1(), g.e_theta2());
    let (s1, s2) = (d1.covariance(), d2.covariance());
    let walk1 = s1.quad(e1) + s1.quad(ep) + 2.0 * s1.apply(e1).dot(ep);
    let walk2 = s2.quad(e2) + s2.quad(ep) - 2.0 * s2.apply(e2).dot(ep);
    Ok((walk1 + walk2).max(0.0))
}

/// Limit of `Var[D_n] / n`, by the dominant term of A2.
pub fn sigma_d2(d1: &StepDistribution, d2: &StepDistribution, g: &DriftGeometry) -> Result<f64> {
    let v = match g.require_a2()? {
        Dominant::Walk1 => d1.covariance().quad(g.e_theta1()),
        Dominant::Walk2 => d2.covariance().quad(g.e_theta2()),
        Dominant::Difference => d1
            .covariance()
            .add(&d2.covariance())
            .quad(difference_direction(g)),
    };
    Ok(v.max(0.0))
}

fn difference_direction(g: &DriftGeometry) -> Point2 {
    let d = g.mu1 - g.mu2;
    d * (1.0 / d.norm())
}

fn two_walks(ens: &Ensemble, upto: usize) -> Result<()> {
    if ens.walk_count() != 2 {
        return Err(Error::domain(format!(
            "approximation sums need exactly two walks, got {}",
            ens.walk_count()
        )));
    }
    if upto > ens.steps() {
        return Err(Error::domain(format!(
            "upto = {upto} exceeds the walk length {}",
            ens.steps()
        )));
    }
    Ok(())
}

/// `sum_i [(Z_i^1 - mu1).(e_perp + e_theta1) + (Z_i^2 - mu2).(e_theta2 - e_perp)]` over all steps.
pub fn approx_sum_perimeter(ens: &Ensemble, g: &DriftGeometry) -> Result<f64> {
    approx_sum_perimeter_at(ens, g, ens.steps())
}

/// The perimeter approximation sum over the first `upto` steps.
pub fn approx_sum_perimeter_at(ens: &Ensemble, g: &DriftGeometry, upto: usize) -> Result<f64> {
    let ep = g.require_a1()?;
    two_walks(ens, upto)?;
    let a = ep + g.e_theta1();
    let b = g.e_theta2() - ep;
    let (z1, z2) = (ens.walks()[0].increments(), ens.walks()[1].increments());
    Ok((0..upto)
        .map(|i| (z1[i] - g.mu1).dot(a) + (z2[i] - g.mu2).dot(b))
        .sum())
}

/// Centered projection of the dominant displacement over all steps.
pub fn approx_sum_diameter(ens: &Ensemble, g: &DriftGeometry) -> Result<f64> {
    approx_sum_diameter_at(ens, g, ens.steps())
}

/// The diameter approximation sum over the first `upto` steps.
pub fn approx_sum_diameter_at(ens: &Ensemble, g: &DriftGeometry, upto: usize) -> Result<f64> {
    let dom = g.require_a2()?;
    two_walks(ens, upto)?;
    let (z1, z2) = (ens.walks()[0].increments(), ens.walks()[1].increments());
    let term: Box<dyn Fn(usize) -> f64> = match dom {
        Dominant::Walk1 => {
            let e = g.e_theta1();
            Box::new(move |i| (z1[i] - g.mu1).dot(e))
        }
        Dominant::Walk2 => {
            let e = g.e_theta2();
            Box::new(move |i| (z2[i] - g.mu2).dot(e))
        }
        Dominant::Difference => {
            let e = difference_direction(g);
            Box::new(move |i| ((z1[i] - g.mu1) - (z2[i] - g.mu2)).dot(e))
        }
    };
    Ok((0..upto).map(term).sum())
}
