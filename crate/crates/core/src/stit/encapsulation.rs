//! Detecting when the growing tessellation walls an inner window off.
//!
//! Against nested windows W' = [-a, a]^ℓ ⊂ W = [-b, b]^ℓ, two first-passage
//! times of a run in W are tracked per replicate:
//!
//! * the encapsulation time — the first moment the cell containing the
//!   origin lies strictly inside W (no facet on ∂W) while still covering all
//!   of W'; from then on, what happens outside that cell can never influence
//!   the tessellation seen inside W';
//! * the first inner hit — the first moment any cut crosses the interior of
//!   W', i.e. the restriction of the tessellation to W' stops being trivial.
//!
//! The probability of {encapsulated before s, W' still untouched at s} has
//! the product lower bound e^{-sΛ([W'])}·(1 - e^{-sL})^{2ℓ}: the inner window
//! survives an exponential clock of rate Λ([W']), and each of the 2ℓ
//! separating classes (measure ≥ L each) independently delivers at least one
//! cut that walls off the matching facet direction.

use crate::error::Result;
use crate::geometry::{segment_meets_open_box, ConvexPolytope, Hyperplane, SupportSet, Window};
use crate::measure::{HyperplaneMeasure, SeparatingFamily};
use crate::stit::{simulate_observed, JumpEvent, JumpObserver};
use crate::EPS;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// First-passage times observed along one run.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct EncapsulationRecord {
    /// First time the origin cell is strictly inside the simulation window
    /// while still covering the inner window.
    pub encapsulated_at: Option<f64>,
    /// First time a cut crosses the open inner window.
    pub inner_hit_at: Option<f64>,
}

impl EncapsulationRecord {
    /// The event behind the product bound, evaluated at horizon `s`:
    /// encapsulated strictly before `s` with the inner window still whole.
    pub fn walled_off_untouched(&self, s: f64) -> bool {
        matches!(self.encapsulated_at, Some(t) if t < s)
            && !matches!(self.inner_hit_at, Some(t) if t <= s)
    }
}

/// Observer computing an [`EncapsulationRecord`] along a run.
pub struct EncapsulationObserver {
    inner: Window,
    inner_poly: ConvexPolytope,
    record: EncapsulationRecord,
}

impl EncapsulationObserver {
    pub fn new(inner: Window) -> Self {
        EncapsulationObserver {
            inner,
            inner_poly: inner.to_polytope(),
            record: EncapsulationRecord::default(),
        }
    }

    pub fn record(&self) -> EncapsulationRecord {
        self.record
    }
}

impl JumpObserver for EncapsulationObserver {
    fn on_jump(&mut self, ev: &JumpEvent) {
        if self.record.inner_hit_at.is_none() {
            let hit = match ev.chord {
                Some(ch) => segment_meets_open_box(ch, [0.0, 0.0], self.inner.half()),
                None => cut_meets_open_body(ev.parent_geom, ev.hyperplane, &self.inner_poly),
            };
            if hit {
                self.record.inner_hit_at = Some(ev.time);
            }
        }
        if self.record.encapsulated_at.is_none() && ev.zero_cell_after != ev.zero_cell_before {
            let z = ev.minus.1;
            if !z.has_window_facet() && cell_covers_window(z, &self.inner) {
                self.record.encapsulated_at = Some(ev.time);
            }
        }
    }
}

/// Dimension-generic fallback: does the cut, within its parent cell, cross
/// the interior of `inner`?
fn cut_meets_open_body(
    parent: &ConvexPolytope,
    h: &Hyperplane,
    inner: &ConvexPolytope,
) -> bool {
    match parent.intersect(inner) {
        None => false,
        Some(q) => {
            let lo = q.inf_support(h.normal().coords());
            let hi = q.support(h.normal().coords());
            lo < h.offset() - EPS && hi > h.offset() + EPS
        }
    }
}

/// W' ⊆ C, decided on the 2^ℓ corners (enough, both sets being convex).
fn cell_covers_window(cell: &ConvexPolytope, w: &Window) -> bool {
    let dim = w.dim();
    let a = w.half();
    (0..(1u32 << dim)).all(|mask| {
        let corner: Vec<f64> = (0..dim)
            .map(|i| if mask >> i & 1 == 1 { a } else { -a })
            .collect();
        cell.contains(&corner)
    })
}

/// The analytic lower bound e^{-sΛ([W'])}·(1 - e^{-sL(a,b)})^{2ℓ}.
pub fn encapsulation_lower_bound(
    measure: &HyperplaneMeasure,
    family: &SeparatingFamily,
    s: f64,
) -> Result<f64> {
    let lam_inner = measure.lambda_hit(&family.inner_window().to_polytope());
    let big_l = family.min_class_measure(measure)?;
    let classes = family.class_count() as i32;
    Ok((-s * lam_inner).exp() * (1.0 - (-s * big_l).exp()).powi(classes))
}

/// Monte Carlo estimate of P(walled off before `s` with W' untouched), with
/// its binomial standard error. Simulates in the outer window of `family`.
pub fn estimate_encapsulation<R: Rng>(
    measure: &HyperplaneMeasure,
    family: &SeparatingFamily,
    s: f64,
    replicates: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let outer = family.outer_window();
    let mut hits = 0usize;
    for _ in 0..replicates {
        let mut obs = EncapsulationObserver::new(family.inner_window());
        simulate_observed(measure, &outer, s, rng, &mut obs)?;
        if obs.record().walled_off_untouched(s) {
            hits += 1;
        }
    }
    let p = hits as f64 / replicates as f64;
    Ok((p, crate::stats::binom_stderr(p, replicates)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn segment_box_tests() {
        let o = [0.0, 0.0];
        // Crossing the middle.
        assert!(segment_meets_open_box(&[[-2.0, 0.0], [2.0, 0.0]], o, 1.0));
        // Entirely outside.
        assert!(!segment_meets_open_box(&[[2.0, -2.0], [2.0, 2.0]], o, 1.0));
        // Along an edge: touches the boundary, misses the interior.
        assert!(!segment_meets_open_box(&[[1.0, -2.0], [1.0, 2.0]], o, 1.0));
        // Ends inside.
        assert!(segment_meets_open_box(&[[0.5, 0.5], [3.0, 3.0]], o, 1.0));
        // Clips a corner region.
        assert!(segment_meets_open_box(&[[0.0, 1.8], [1.8, 0.0]], o, 1.0));
        // Near-miss past the corner.
        assert!(!segment_meets_open_box(&[[0.0, 2.5], [2.5, 0.0]], o, 1.0));
        // Off-center box.
        assert!(segment_meets_open_box(&[[2.0, 2.0], [4.0, 4.0]], [3.0, 3.0], 0.5));
        assert!(!segment_meets_open_box(&[[2.0, 4.0], [4.0, 4.0]], [3.0, 3.0], 0.5));
    }

    #[test]
    fn analytic_bound_reference_value() {
        // Axis model, a = 1, b = 4, s = 1: Λ([W']) = 4, L = 3, so the bound
        // is e⁻⁴(1 - e⁻³)⁴.
        let m = HyperplaneMeasure::axis_unit(2).unwrap();
        let fam = SeparatingFamily::new(1.0, 4.0, 2).unwrap();
        let b = encapsulation_lower_bound(&m, &fam, 1.0).unwrap();
        let expect = (-4.0f64).exp() * (1.0 - (-3.0f64).exp()).powi(4);
        assert!((b - expect).abs() < 1e-12);
        assert!((b - 0.014931581823).abs() < 1e-9, "{b}");
    }

    #[test]
    fn scripted_cuts_drive_the_detector() {
        // Replay, straight into the observer, the division of [-4,4]² by the
        // four cuts x = ±2, y = ±2, keeping the origin fragment each time.
        // The record must fire at the fourth cut (the first moment the
        // origin cell loses all window facets) and never see an inner hit
        // against W' = [-1,1]².
        use crate::geometry::Direction;
        let mut obs = EncapsulationObserver::new(Window::new(1.0, 2).unwrap());
        let mut zero = Window::new(4.0, 2).unwrap().to_polytope();
        let mut zero_id = 0usize;
        let cuts = [
            (Direction::axis(0, 2), 2.0),
            (Direction::axis(0, 2).neg(), 2.0),
            (Direction::axis(1, 2), 2.0),
            (Direction::axis(1, 2).neg(), 2.0),
        ];
        for (i, (u, alpha)) in cuts.iter().enumerate() {
            let h = Hyperplane::new(u.clone(), *alpha).unwrap();
            let tag = crate::geometry::FacetTag::Cut(i as u64 + 1);
            let (plus, minus) = zero.split(&h, tag).unwrap();
            let ev = JumpEvent {
                index: i as u64 + 1,
                time: 0.1 * (i as f64 + 1.0),
                parent: zero_id,
                parent_geom: &zero,
                hyperplane: &h,
                plus: (2 * i + 1, &plus),
                minus: (2 * i + 2, &minus),
                chord: None,
                zero_cell_before: zero_id,
                zero_cell_after: 2 * i + 2,
            };
            obs.on_jump(&ev);
            zero_id = 2 * i + 2;
            zero = minus;
        }
        let rec = obs.record();
        assert_eq!(rec.inner_hit_at, None);
        assert!((rec.encapsulated_at.unwrap() - 0.4).abs() < 1e-12);
        assert!(rec.walled_off_untouched(0.5));
        assert!(!rec.walled_off_untouched(0.3));
    }

    #[test]
    fn inner_hit_is_detected() {
        // A cut through the middle of W' registers as an inner hit and
        // blocks the walled-off event.
        use crate::geometry::Direction;
        let mut obs = EncapsulationObserver::new(Window::new(1.0, 2).unwrap());
        let zero = Window::new(4.0, 2).unwrap().to_polytope();
        let h = Hyperplane::new(Direction::axis(1, 2), 0.5).unwrap();
        let (plus, minus) = zero
            .split(&h, crate::geometry::FacetTag::Cut(1))
            .unwrap();
        let chord = [[-4.0, 0.5], [4.0, 0.5]];
        let ev = JumpEvent {
            index: 1,
            time: 0.05,
            parent: 0,
            parent_geom: &zero,
            hyperplane: &h,
            plus: (1, &plus),
            minus: (2, &minus),
            chord: Some(&chord),
            zero_cell_before: 0,
            zero_cell_after: 2,
        };
        obs.on_jump(&ev);
        assert_eq!(obs.record().inner_hit_at, Some(0.05));
        assert!(!obs.record().walled_off_untouched(1.0));
    }

    #[test]
    fn monte_carlo_respects_the_bound_small_n() {
        let m = HyperplaneMeasure::axis_unit(2).unwrap();
        let fam = SeparatingFamily::new(1.0, 4.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (p, se) = estimate_encapsulation(&m, &fam, 1.0, 2000, &mut rng).unwrap();
        let bound = encapsulation_lower_bound(&m, &fam, 1.0).unwrap();
        assert!(
            p >= bound - 3.0 * se.max(1e-3),
            "p = {p}, bound = {bound}, se = {se}"
        );
    }
}
