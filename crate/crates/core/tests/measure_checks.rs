//! Integration checks of the hyperplane-measure layer against independent
//! oracles: quadrature vs closed forms on random bodies, exact axis-model
//! arithmetic, conditional-sampler laws, and separating-class values.

mod common;

use common::random_convex_polygon;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stit_core::geometry::{ConvexPolytope, Polygon2};
use stit_core::stats::binom_stderr;
use stit_core::{HyperplaneMeasure, SeparatingFamily};

fn rect(cx: f64, cy: f64, w: f64, h: f64) -> Polygon2 {
    Polygon2::from_vertices(vec![
        [cx - w / 2.0, cy - h / 2.0],
        [cx + w / 2.0, cy - h / 2.0],
        [cx + w / 2.0, cy + h / 2.0],
        [cx - w / 2.0, cy + h / 2.0],
    ])
    .unwrap()
}

/// The closed-form isotropic hitting measure agrees with the adaptive
/// quadrature route on random convex polygons, centered or not.
#[test]
fn quadrature_matches_closed_form_on_random_polygons() {
    let iso = HyperplaneMeasure::isotropic_perimeter(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..20 {
        let center = [0.4 * (k % 5) as f64 - 0.8, 0.3 * (k % 3) as f64];
        let poly = ConvexPolytope::Planar(random_convex_polygon(&mut rng, 10, 1.2, center));
        let closed = iso.lambda_hit(&poly);
        let quad = iso.lambda_hit_quadrature(&poly).unwrap();
        assert!(
            (closed - quad).abs() <= 1e-8 * closed.max(1.0),
            "polygon {k}: closed {closed} vs quadrature {quad}"
        );
    }
}

/// Axis model with γ = 2ℓ: Λ([w×h]) = w + h exactly, wherever the rectangle
/// sits (the ±u atom pairs make the measure translation invariant even
/// though offsets are parameterized on α ≥ 0 only).
#[test]
fn axis_measure_is_width_plus_height_everywhere() {
    let axis = HyperplaneMeasure::axis_unit(2).unwrap();
    for (cx, cy, w, h) in [
        (0.0, 0.0, 2.0, 2.0),
        (0.0, 0.0, 3.0, 0.5),
        (5.0, -7.0, 3.0, 0.5),
        (100.0, 100.0, 0.25, 4.0),
        (-2.5, 0.75, 1.0, 1.0),
    ] {
        let k = ConvexPolytope::Planar(rect(cx, cy, w, h));
        assert!(
            (axis.lambda_hit(&k) - (w + h)).abs() <= 1e-12 * (w + h),
            "rect at ({cx},{cy}) size {w}x{h}: got {}",
            axis.lambda_hit(&k)
        );
    }
}

/// Direction marginal of the conditional sampler on a 10 × 0.1 rectangle:
/// the chance that the sampled normal lies within π/4 of the long axis is
/// (19.8·√2 + 0.4)/40.4 ≈ 0.7030057 — the density is proportional to the
/// admissible-offset length 10|cos φ| + 0.1|sin φ| (up to normalization),
/// and the value follows by direct integration over the four quarter-arcs.
#[test]
fn thin_rectangle_direction_marginal() {
    let iso = HyperplaneMeasure::isotropic_perimeter(2).unwrap();
    let k = ConvexPolytope::Planar(rect(0.0, 0.0, 10.0, 0.1));
    let n = 40_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(314159);
    let mut along_long_axis = 0usize;
    for _ in 0..n {
        let h = iso.sample_conditional(&k, &mut rng).unwrap();
        let u = h.normal().coords();
        if u[0].abs() >= u[1].abs() {
            along_long_axis += 1;
        }
    }
    let oracle = (19.8 * 2.0f64.sqrt() + 0.4) / 40.4;
    let p_hat = along_long_axis as f64 / n as f64;
    let sigma = binom_stderr(oracle, n);
    assert!(
        (p_hat - oracle).abs() <= 3.0 * sigma,
        "marginal {p_hat} vs oracle {oracle} (3σ = {})",
        3.0 * sigma
    );
}

/// Every hyperplane drawn from the conditional law hits the body it was
/// conditioned on, under both direction models.
#[test]
fn conditional_samples_hit_their_body() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let poly = ConvexPolytope::Planar(random_convex_polygon(&mut rng, 9, 1.0, [0.6, -0.4]));
    for measure in [
        HyperplaneMeasure::axis_unit(2).unwrap(),
        HyperplaneMeasure::isotropic_perimeter(2).unwrap(),
    ] {
        for _ in 0..5_000 {
            let h = measure.sample_conditional(&poly, &mut rng).unwrap();
            assert!(h.hits(&poly), "sampled hyperplane misses its body");
        }
    }
}

/// For K' ⊆ K, the fraction of Λ^K-sampled hyperplanes that also hit K'
/// converges to Λ([K'])/Λ([K]): the sampler and the evaluator describe the
/// same measure.
#[test]
fn sampler_agrees_with_evaluator_on_sub_bodies() {
    let big = ConvexPolytope::Planar(rect(0.0, 0.0, 4.0, 4.0));
    let small = ConvexPolytope::Planar(rect(-0.75, 0.7, 1.5, 2.0));
    for (name, measure, n) in [
        ("axis", HyperplaneMeasure::axis_unit(2).unwrap(), 30_000usize),
        (
            "isotropic",
            HyperplaneMeasure::isotropic_perimeter(2).unwrap(),
            20_000usize,
        ),
    ] {
        let ratio = measure.lambda_hit(&small) / measure.lambda_hit(&big);
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let mut hits = 0usize;
        for _ in 0..n {
            let h = measure.sample_conditional(&big, &mut rng).unwrap();
            if h.hits(&small) {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / n as f64;
        let sigma = binom_stderr(ratio, n);
        assert!(
            (p_hat - ratio).abs() <= 3.0 * sigma,
            "{name}: sampled sub-body rate {p_hat} vs measure ratio {ratio}"
        );
    }
}

/// Separating-class measures in closed form: each of the 2ℓ classes of the
/// pair [-a,a]² ⊂ [-b,b]² has the same measure by symmetry; the axis model
/// gives b - a per class, the isotropic model (γ/π)(√(2(a²+b²)) - (a+b)).
#[test]
fn separating_class_closed_forms() {
    for (a, b) in [(1.0, 2.0), (1.0, 4.0), (0.5, 3.5)] {
        let family = SeparatingFamily::new(a, b, 2).unwrap();

        let axis = HyperplaneMeasure::axis_unit(2).unwrap();
        let values = family.class_measures(&axis);
        assert_eq!(values.len(), 4);
        for v in &values {
            assert!(
                (v - (b - a)).abs() <= 1e-9,
                "axis class measure {v} vs {b} - {a}"
            );
        }
        assert!((family.min_class_measure(&axis).unwrap() - (b - a)).abs() <= 1e-9);

        let iso = HyperplaneMeasure::isotropic_perimeter(2).unwrap();
        let expect = 2.0 * ((2.0 * (a * a + b * b)).sqrt() - (a + b));
        for v in family.class_measures(&iso) {
            assert!(
                (v - expect).abs() <= 1e-9,
                "isotropic class measure {v} vs closed form {expect} at a={a}, b={b}"
            );
        }
    }
}

/// Hyperplanes sampled from the conditional law on the outer window land in
/// at most one separating class, and those that do separate match the class
/// they are filed under.
#[test]
fn sampled_hyperplanes_classify_consistently() {
    let (a, b) = (1.0, 2.0);
    let family = SeparatingFamily::new(a, b, 2).unwrap();
    let outer = family.outer_window().to_polytope();
    let iso = HyperplaneMeasure::isotropic_perimeter(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut separated = 0usize;
    for _ in 0..5_000 {
        let h = iso.sample_conditional(&outer, &mut rng).unwrap();
        let classes = family.classify(&h);
        assert!(
            classes.len() <= 1,
            "hyperplane filed under {} classes",
            classes.len()
        );
        separated += classes.len();
    }
    // The classes have positive measure, so some samples must separate.
    assert!(separated > 0, "no sampled hyperplane separated any facet pair");
}
