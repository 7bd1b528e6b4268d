use super::{AngleGrid, ConvexPolygon, Point2};

/// Boundary length. A segment counts both sides (`2 * length`), a point is 0.
pub fn perimeter(poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    let n = v.len();
    if n == 1 {
        return 0.0;
    }
    // the cyclic edge sum of a two-vertex polygon is already 2 * length
    (0..n).map(|i| v[i].distance(v[(i + 1) % n])).sum()
}

/// Largest vertex-pair distance, by rotating calipers.
pub fn diameter(poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    let n = v.len();
    if n <= 3 {
        return diameter_brute_force(poly);
    }
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let edge = b - a;
        let mut steps = 0;
        while steps < n && edge.cross(v[(j + 1) % n] - a) > edge.cross(v[j] - a) {
            j = (j + 1) % n;
            steps += 1;
        }
        let k = (j + 1) % n;
        best = best
            .max((a - v[j]).norm_sq())
            .max((b - v[j]).norm_sq())
            .max((a - v[k]).norm_sq())
            .max((b - v[k]).norm_sq());
    }
    best.sqrt()
}

/// Quadratic pairwise maximum; the reference for [`diameter`].
pub fn diameter_brute_force(poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    let mut best = 0.0f64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.max((v[i] - v[j]).norm_sq());
        }
    }
    best.sqrt()
}

/// Shoelace area; zero for points and segments.
pub fn area(poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let origin = v[0];
    let twice: f64 = (1..n - 1)
        .map(|i| (v[i] - origin).cross(v[i + 1] - origin))
        .sum();
    0.5 * twice.abs()
}

/// Maximal and minimal projection `(M(theta), m(theta))` of the vertices onto `e_theta`.
pub fn support(poly: &ConvexPolygon, theta: f64) -> (f64, f64) {
    let e = Point2::unit(theta);
    poly.vertices()
        .iter()
        .map(|v| v.dot(e))
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), p| {
            (hi.max(p), lo.min(p))
        })
}

/// Parametrized range function `R(theta) = M(theta) - m(theta)`.
pub fn range_fn(poly: &ConvexPolygon, theta: f64) -> f64 {
    let (hi, lo) = support(poly, theta);
    (hi - lo).max(0.0)
}

/// `R(theta_j)` for every node of `grid`, in `O(V + count)`.
///
/// The maximising vertex moves counterclockwise as the angle increases, so
/// both extreme vertices are tracked by hill-climbing from the previous node.
pub fn range_profile(poly: &ConvexPolygon, grid: &AngleGrid) -> Vec<f64> {
    let v = poly.vertices();
    let n = v.len();
    let mut out = Vec::with_capacity(grid.count() + 1);
    if n == 1 {
        out.resize(grid.count() + 1, 0.0);
        return out;
    }

    let argmax = |e: Point2| {
        (0..n)
            .max_by(|&a, &b| v[a].dot(e).total_cmp(&v[b].dot(e)))
            .unwrap_or(0)
    };
    let climb = |mut i: usize, e: Point2| {
        for _ in 0..n {
            let next = (i + 1) % n;
            if v[next].dot(e) > v[i].dot(e) {
                i = next;
            } else {
                break;
            }
        }
        i
    };

    let e0 = Point2::unit(0.0);
    let mut hi = argmax(e0);
    let mut lo = argmax(-e0);
    for theta in grid.angles() {
        let e = Point2::unit(theta);
        hi = climb(hi, e);
        lo = climb(lo, -e);
        out.push((v[hi].dot(e) - v[lo].dot(e)).max(0.0));
    }
    out
}

/// Composite quadrature of the Cauchy integral `int_0^pi R(theta) dtheta`.
///
/// Simpson's rule on an even panel count; for odd counts the last three
/// panels use Simpson's 3/8 rule.
pub fn cauchy_perimeter(poly: &ConvexPolygon, grid: &AngleGrid) -> f64 {
    let f = range_profile(poly, grid);
    let h = grid.step();
    let count = grid.count();
    let simpson_panels = if count.is_multiple_of(2) { count } else { count - 3 };

    let mut acc = 0.0;
    if simpson_panels > 0 {
        let mut s = f[0] + f[simpson_panels];
        for (j, &fj) in f.iter().enumerate().take(simpson_panels).skip(1) {
            s += if j % 2 == 1 { 4.0 * fj } else { 2.0 * fj };
        }
        acc += s * h / 3.0;
    }
    if simpson_panels < count {
        let k = simpson_panels;
        acc += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    }
    acc
}

/// `max_j R(theta_j)`, a lower bound on the diameter.
///
/// The deficit is at most `diam * (pi / count)^2 / 2`.
pub fn cauchy_diameter(poly: &ConvexPolygon, grid: &AngleGrid) -> f64 {
    range_profile(poly, grid)
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::convex_hull;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn poly(v: &[(f64, f64)]) -> ConvexPolygon {
        convex_hull(&v.iter().map(|&p| p.into()).collect::<Vec<Point2>>()).unwrap()
    }

    fn unit_square() -> ConvexPolygon {
        poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn perimeter_examples() {
        assert_eq!(perimeter(&unit_square()), 4.0);
        assert_eq!(perimeter(&poly(&[(0.0, 0.0), (1.0, 0.0)])), 2.0);
        let tri = perimeter(&poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]));
        assert!((tri - (2.0 + SQRT_2)).abs() < 1e-15);
        assert_eq!(perimeter(&poly(&[(3.0, 3.0)])), 0.0);
    }

    #[test]
    fn segment_perimeter_matches_cauchy_integral_of_abs_cos() {
        // int_0^pi |cos t| dt = 2, evaluated independently of range_profile
        let m = 200_000;
        let h = PI / m as f64;
        let mid: f64 = (0..m).map(|j| ((j as f64 + 0.5) * h).cos().abs()).sum::<f64>() * h;
        assert!((mid - 2.0).abs() < 1e-8);
        assert_eq!(perimeter(&poly(&[(0.0, 0.0), (1.0, 0.0)])), 2.0);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&unit_square()), SQRT_2);
        assert_eq!(diameter(&poly(&[(1.0, 1.0)])), 0.0);
        assert_eq!(diameter(&poly(&[(0.0, 0.0), (3.0, 4.0)])), 5.0);
    }

    #[test]
    fn area_examples() {
        assert_eq!(area(&unit_square()), 1.0);
        assert_eq!(area(&poly(&[(0.0, 0.0), (1.0, 0.0)])), 0.0);
        assert_eq!(area(&poly(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)])), 2.0);
    }

    #[test]
    fn support_examples() {
        let sq = unit_square();
        assert_eq!(support(&sq, 0.0), (1.0, 0.0));
        let (hi, lo) = support(&sq, FRAC_PI_4);
        assert!((hi - SQRT_2).abs() < 1e-15);
        assert!(lo.abs() < 1e-15);
        assert_eq!(range_fn(&sq, 0.0), 1.0);
        assert!((range_fn(&sq, FRAC_PI_4) - SQRT_2).abs() < 1e-15);
        let seg = poly(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(range_fn(&seg, FRAC_PI_2) < 1e-16);
    }

    #[test]
    fn range_profile_matches_direct_support() {
        let p = poly(&[
            (0.3, -1.0),
            (2.0, 0.1),
            (1.1, 1.9),
            (-0.7, 1.2),
            (-1.4, -0.2),
            (0.2, 0.4),
        ]);
        let grid = AngleGrid::new(97).unwrap();
        let profile = range_profile(&p, &grid);
        for (j, theta) in grid.angles().enumerate() {
            assert!((profile[j] - range_fn(&p, theta)).abs() < 1e-13, "node {j}");
        }
    }

    #[test]
    fn cauchy_quadrature_examples() {
        let fine = AngleGrid::new(1 << 14).unwrap();
        assert!((cauchy_perimeter(&unit_square(), &fine) - 4.0).abs() < 1e-6);
        let seg = poly(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!((cauchy_perimeter(&seg, &fine) - 2.0).abs() < 1e-4);
        // odd panel counts use the 3/8 tail
        let odd = AngleGrid::new((1 << 14) + 1).unwrap();
        assert!((cauchy_perimeter(&unit_square(), &odd) - 4.0).abs() < 1e-6);
        let three = AngleGrid::new(3).unwrap();
        assert!(cauchy_perimeter(&unit_square(), &three).is_finite());
    }

    #[test]
    fn cauchy_diameter_examples() {
        let four = AngleGrid::new(4).unwrap();
        assert!((cauchy_diameter(&unit_square(), &four) - SQRT_2).abs() < 1e-15);
        let seg = poly(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(cauchy_diameter(&seg, &AngleGrid::new(7).unwrap()), 1.0);
    }
}
