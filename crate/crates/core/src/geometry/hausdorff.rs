use super::{ConvexPolygon, Point2};

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Euclidean distance from `p` to the (filled) convex polygon; 0 inside.
pub fn distance_to_polygon(p: Point2, poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    match v.len() {
        1 => p.distance(v[0]),
        2 => point_segment_distance(p, v[0], v[1]),
        n => {
            let inside = (0..n).all(|i| (v[(i + 1) % n] - v[i]).cross(p - v[i]) >= 0.0);
            if inside {
                return 0.0;
            }
            (0..n)
                .map(|i| point_segment_distance(p, v[i], v[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn directed(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    a.vertices()
        .iter()
        .map(|&p| distance_to_polygon(p, b))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two convex polygons.
///
/// The distance to a convex set is a convex function, so each directed
/// supremum is attained at a vertex.
pub fn hausdorff(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    directed(a, b).max(directed(b, a))
}
