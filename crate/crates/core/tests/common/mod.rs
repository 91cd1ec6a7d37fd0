//! Shared fixtures for the integration tests.

use rand::Rng;
use stit_core::geometry::Polygon2;

/// Random convex polygon: the convex hull of `n` points drawn uniformly
/// from the disc of the given radius about `center`. Retries until the hull
/// is non-degenerate (at least 3 vertices and visible area).
pub fn random_convex_polygon<R: Rng>(
    rng: &mut R,
    n: usize,
    radius: f64,
    center: [f64; 2],
) -> Polygon2 {
    assert!(n >= 3);
    loop {
        let mut pts: Vec<[f64; 2]> = Vec::with_capacity(n);
        while pts.len() < n {
            let x = rng.gen_range(-radius..radius);
            let y = rng.gen_range(-radius..radius);
            if x * x + y * y <= radius * radius {
                pts.push([center[0] + x, center[1] + y]);
            }
        }
        let hull = convex_hull(&mut pts);
        if hull.len() < 3 {
            continue;
        }
        if let Ok(poly) = Polygon2::from_vertices(hull) {
            if poly.area() > 1e-3 * radius * radius {
                return poly;
            }
        }
    }
}

/// Andrew's monotone chain; returns the hull in counter-clockwise order.
fn convex_hull(pts: &mut [[f64; 2]]) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter() {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
