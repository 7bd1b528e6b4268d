use super::{ConvexPolygon, Point2};
use crate::error::{Error, Result};

/// Relative tolerance of the orientation predicate.
const ORIENT_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Orientation of the triple `(a, b, c)`.
///
/// `scale` is the magnitude of the coordinates involved (typically the largest
/// absolute coordinate of the whole input). Cross products within
/// `1e-12 * scale * (|b - a| + |c - a|)` of zero count as collinear, which
/// dominates the rounding error of the subtraction-then-cross evaluation.
pub fn orientation(a: Point2, b: Point2, c: Point2, scale: f64) -> Orientation {
    let ab = b - a;
    let ac = c - a;
    let det = ab.cross(ac);
    let tol = ORIENT_EPS * scale * (ab.max_abs() + ac.max_abs()) + f64::MIN_POSITIVE;
    if det > tol {
        Orientation::CounterClockwise
    } else if det < -tol {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Convex hull by Andrew's monotone chain.
///
/// Interior points and points on the relative interior of hull edges are
/// dropped, so the result is strictly convex. All-equal input yields a
/// one-vertex polygon and collinear input a two-vertex segment.
pub fn convex_hull(points: &[Point2]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::domain("convex hull of an empty point set"));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::domain(format!("point {i} is not finite")));
    }

    let mut pts = points.to_vec();
    pts.sort_unstable_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() == 1 {
        return Ok(ConvexPolygon::point(pts[0]));
    }

    let scale = pts.iter().fold(0.0f64, |m, p| m.max(p.max_abs()));
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len().min(64));

    let push_chain = |hull: &mut Vec<Point2>, p: Point2, floor: usize| {
        while hull.len() >= floor + 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if orientation(a, b, p, scale) == Orientation::CounterClockwise {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    };

    for &p in &pts {
        push_chain(&mut hull, p, 0);
    }
    let lower_len = hull.len();
    for &p in pts.iter().rev().skip(1) {
        push_chain(&mut hull, p, lower_len - 1);
    }
    // last point repeats the first
    hull.pop();

    Ok(ConvexPolygon::from_vertices_unchecked(hull))
}
