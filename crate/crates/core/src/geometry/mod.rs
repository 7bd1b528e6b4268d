//! Planar convex geometry on `f64` coordinates.
//!
//! Every operation here is a pure function of immutable inputs. Polygons are
//! stored counterclockwise and strictly convex; a hull may degenerate to a
//! single point or a segment, and all functionals give those cases the value
//! consistent with the Cauchy integral (a segment of length `l` has perimeter
//! `2l`, a point has perimeter 0).

mod hausdorff;
mod hull;
mod measure;
mod point;

pub use hausdorff::{distance_to_polygon, hausdorff};
pub use hull::{convex_hull, orientation, Orientation};
pub use measure::{
    area, cauchy_diameter, cauchy_perimeter, diameter, diameter_brute_force, perimeter,
    range_fn, range_profile, support,
};
pub use point::Point2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counterclockwise, strictly convex vertex list of a convex hull.
///
/// `len() == 1` is a point, `len() == 2` a segment with distinct endpoints.
/// For three or more vertices every consecutive triple turns left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Build a polygon from vertices already in strictly convex ccw order.
    pub fn from_ccw_vertices(vertices: Vec<Point2>) -> Result<Self> {
        let poly = ConvexPolygon { vertices };
        poly.validate()?;
        Ok(poly)
    }

    pub(crate) fn from_vertices_unchecked(vertices: Vec<Point2>) -> Self {
        debug_assert!(!vertices.is_empty());
        ConvexPolygon { vertices }
    }

    pub fn point(p: Point2) -> Self {
        ConvexPolygon { vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Never true; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    /// Image under `p -> c * p`. A zero factor collapses to the origin.
    pub fn scaled(&self, c: f64) -> Self {
        if c == 0.0 {
            return ConvexPolygon::point(Point2::ORIGIN);
        }
        // negative factors are a point reflection, which preserves ccw order
        let vertices = self.vertices.iter().map(|&v| v * c).collect();
        ConvexPolygon { vertices }
    }

    /// Image under a rotation by `phi` about the origin followed by a translation.
    pub fn rigid_motion(&self, phi: f64, shift: Point2) -> Self {
        ConvexPolygon {
            vertices: self
                .vertices
                .iter()
                .map(|v| v.rotated(phi) + shift)
                .collect(),
        }
    }

    /// Signed distance of `p` to the boundary: negative inside, positive outside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let d = distance_to_polygon(p, self);
        if d > 0.0 {
            return d;
        }
        if self.vertices.len() < 3 {
            return 0.0;
        }
        let n = self.vertices.len();
        let mut inner = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b - a;
            let dist = e.cross(p - a) / e.norm();
            inner = inner.min(dist);
        }
        -inner
    }

    fn validate(&self) -> Result<()> {
        let v = &self.vertices;
        if v.is_empty() {
            return Err(Error::domain("polygon needs at least one vertex"));
        }
        if v.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("polygon vertex is not finite"));
        }
        match v.len() {
            1 => Ok(()),
            2 if v[0] == v[1] => Err(Error::domain("segment endpoints coincide")),
            2 => Ok(()),
            n => {
                for i in 0..n {
                    let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
                    if (b - a).cross(c - b) <= 0.0 {
                        return Err(Error::domain(format!(
                            "vertices {i}..{} are not in strictly convex ccw order",
                            i + 2
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

impl TryFrom<Vec<Point2>> for ConvexPolygon {
    type Error = Error;

    fn try_from(vertices: Vec<Point2>) -> Result<Self> {
        ConvexPolygon::from_ccw_vertices(vertices)
    }
}

impl From<ConvexPolygon> for Vec<Point2> {
    fn from(poly: ConvexPolygon) -> Self {
        poly.vertices
    }
}

/// Uniform discretisation `theta_j = j * pi / count`, `j = 0..=count`, of `[0, pi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleGrid {
    count: usize,
}

impl AngleGrid {
    pub fn new(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::domain(format!("angle grid needs count >= 2, got {count}")));
        }
        Ok(AngleGrid { count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        std::f64::consts::PI / self.count as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    /// All `count + 1` nodes including both endpoints.
    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.count).map(move |j| self.angle(j))
    }
}
