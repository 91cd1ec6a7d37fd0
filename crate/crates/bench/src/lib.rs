//! Shared fixtures for the criterion benchmarks.
//!
//! The benchmark targets live in `benches/`; this library only holds the
//! deterministic geometry builders they share so the bench file stays
//! focused on what is being measured.

use stit_core::geometry::Polygon2;

/// Convex `n`-gon inscribed in the circle of radius `r` about the origin.
pub fn regular_polygon(n: usize, r: f64) -> Polygon2 {
    let verts: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let phi = std::f64::consts::TAU * (i as f64) / (n as f64);
            [r * phi.cos(), r * phi.sin()]
        })
        .collect();
    Polygon2::from_vertices(verts).expect("regular polygon is convex and non-degenerate")
}
