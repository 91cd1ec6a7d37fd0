//! The cell-division process.
//!
//! A window starts as a single cell. Each cell C, independently, waits an
//! exponential time with rate Λ([C]) and is then divided by a hyperplane
//! drawn from the normalized restriction of Λ to the hyperplanes hitting C.
//! Both fragments restart afresh. The implementation runs the equivalent
//! global-clock chain: wait Exp(ζ) with ζ = Σ Λ([Cᵢ]) over live cells, pick
//! the dividing cell with probability Λ([Cᵢ])/ζ, divide, update ζ.

mod encapsulation;
mod weights;

pub use encapsulation::{
    encapsulation_lower_bound, estimate_encapsulation, EncapsulationObserver,
    EncapsulationRecord,
};
pub use weights::CellWeights;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolytope, FacetTag, Hyperplane, Window};
use crate::measure::HyperplaneMeasure;
use crate::nesting::Tessellation;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Hard cap on the number of cell slots a single run may allocate.
pub const MAX_CELLS: usize = 10_000_000;
/// Cap on consecutive degenerate (vertex-grazing) division attempts.
pub const MAX_RESAMPLE: usize = 10_000;

/// One division event.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpRecord {
    /// 1-based jump index; the cut facets carry it as their tag.
    pub index: u64,
    pub time: f64,
    /// Id of the divided cell.
    pub parent: usize,
    pub hyperplane: Hyperplane,
    /// Child ids, (H⁺ side, H⁻ side) = (2·index - 1, 2·index).
    pub children: (usize, usize),
    /// Endpoints of the cut inside the parent (planar runs only).
    pub chord: Option<[[f64; 2]; 2]>,
}

/// A cell slot; geometry is dropped when the cell divides.
#[derive(Clone, Debug)]
pub struct CellSlot {
    pub geom: Option<ConvexPolytope>,
    /// Cached Λ([C]) (kept after division for audit).
    pub rate: f64,
    pub parent: Option<usize>,
    pub born: f64,
}

/// Everything an observer may inspect about one division, by reference.
pub struct JumpEvent<'a> {
    pub index: u64,
    pub time: f64,
    pub parent: usize,
    pub parent_geom: &'a ConvexPolytope,
    pub hyperplane: &'a Hyperplane,
    pub plus: (usize, &'a ConvexPolytope),
    pub minus: (usize, &'a ConvexPolytope),
    pub chord: Option<&'a [[f64; 2]; 2]>,
    pub zero_cell_before: usize,
    pub zero_cell_after: usize,
}

/// Per-jump callback driven synchronously by the simulator.
pub trait JumpObserver {
    fn on_jump(&mut self, ev: &JumpEvent);
}

/// The do-nothing observer.
pub struct NoopObserver;

impl JumpObserver for NoopObserver {
    fn on_jump(&mut self, _ev: &JumpEvent) {}
}

/// Adapter turning a closure into an observer.
pub struct FnObserver<F: FnMut(&JumpEvent)>(pub F);

impl<F: FnMut(&JumpEvent)> JumpObserver for FnObserver<F> {
    fn on_jump(&mut self, ev: &JumpEvent) {
        (self.0)(ev)
    }
}

/// Running state of the division process in a window.
#[derive(Clone, Debug)]
pub struct TessellationState {
    window: Window,
    cells: Vec<CellSlot>,
    weights: CellWeights,
    jumps: Vec<JumpRecord>,
    jump_count: u64,
    clock: f64,
    zero_cell: usize,
    live: usize,
    log_jumps: bool,
}

impl TessellationState {
    /// Fresh state: the window as the single cell, clock at zero.
    pub fn new(measure: &HyperplaneMeasure, window: &Window) -> Result<Self> {
        if measure.dim() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                got: measure.dim(),
            });
        }
        let geom = window.to_polytope();
        let rate = measure.lambda_hit(&geom);
        if !(rate > 0.0) {
            return Err(Error::invalid("window has zero hitting measure"));
        }
        let mut weights = CellWeights::new();
        weights.push(rate);
        Ok(TessellationState {
            window: *window,
            cells: vec![CellSlot {
                geom: Some(geom),
                rate,
                parent: None,
                born: 0.0,
            }],
            weights,
            jumps: Vec::new(),
            jump_count: 0,
            clock: 0.0,
            zero_cell: 0,
            live: 1,
            log_jumps: true,
        })
    }

    /// Disables the jump log (observers still fire); long unattended runs
    /// use this to keep memory flat.
    pub fn set_jump_logging(&mut self, on: bool) {
        self.log_jumps = on;
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn time(&self) -> f64 {
        self.clock
    }

    /// Total division rate ζ = Σ Λ([Cᵢ]) over live cells (cached).
    pub fn zeta(&self) -> f64 {
        self.weights.total()
    }

    /// ζ recomputed from live-cell geometry; audits the cached value.
    pub fn zeta_recomputed(&self, measure: &HyperplaneMeasure) -> f64 {
        self.live_cells()
            .map(|(_, g)| measure.lambda_hit(g))
            .sum()
    }

    pub fn jump_count(&self) -> u64 {
        self.jump_count
    }

    pub fn jumps(&self) -> &[JumpRecord] {
        &self.jumps
    }

    pub fn cell_slots(&self) -> &[CellSlot] {
        &self.cells
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn live_cells(&self) -> impl Iterator<Item = (usize, &ConvexPolytope)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.geom.as_ref().map(|g| (i, g)))
    }

    /// Total volume of live cells (equals the window volume up to rounding).
    pub fn live_volume(&self) -> f64 {
        self.live_cells().map(|(_, g)| g.volume()).sum()
    }

    pub fn zero_cell_id(&self) -> usize {
        self.zero_cell
    }

    pub fn zero_cell(&self) -> &ConvexPolytope {
        self.cells[self.zero_cell]
            .geom
            .as_ref()
            .expect("zero cell is live by construction")
    }

    /// Runs the chain for `dt` more time units.
    pub fn advance<R: Rng>(
        &mut self,
        measure: &HyperplaneMeasure,
        dt: f64,
        rng: &mut R,
        observer: &mut dyn JumpObserver,
    ) -> Result<()> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::invalid("time increment must be finite and ≥ 0"));
        }
        let target = self.clock + dt;
        loop {
            let zeta = self.weights.total();
            debug_assert!(zeta > 0.0);
            let wait = -(1.0 - rng.gen::<f64>()).ln() / zeta;
            if self.clock + wait > target {
                self.clock = target;
                return Ok(());
            }
            self.clock += wait;
            let victim = self.weights.sample(rng.gen::<f64>() * zeta);
            self.divide(measure, victim, rng, observer)?;
        }
    }

    fn divide<R: Rng>(
        &mut self,
        measure: &HyperplaneMeasure,
        victim: usize,
        rng: &mut R,
        observer: &mut dyn JumpObserver,
    ) -> Result<()> {
        if self.cells.len() + 2 > MAX_CELLS {
            return Err(Error::ExplosionGuard {
                cells: self.cells.len(),
                cap: MAX_CELLS,
            });
        }
        let parent_geom = self.cells[victim]
            .geom
            .take()
            .expect("sampled a retired cell");
        let jump_index = self.jump_count + 1;
        let tag = FacetTag::Cut(jump_index);

        // Degenerate cuts (vertex grazes within ε) are a null event of the
        // continuous law; resample rather than splitting unstably.
        let mut outcome = None;
        for _ in 0..MAX_RESAMPLE {
            let h = measure.sample_conditional(&parent_geom, rng)?;
            if let Some(parts) = split_cell(&parent_geom, &h, tag) {
                outcome = Some((h, parts));
                break;
            }
        }
        let (hyperplane, (plus, minus, chord)) = match outcome {
            Some(v) => v,
            None => return Err(Error::RejectionLoopExceeded(MAX_RESAMPLE)),
        };

        debug_assert!(
            (plus.volume() + minus.volume() - parent_geom.volume()).abs()
                <= 1e-9 * parent_geom.volume().max(1.0),
            "split does not conserve volume"
        );

        let rate_plus = measure.lambda_hit(&plus);
        let rate_minus = measure.lambda_hit(&minus);
        // Cutting a convex body can only increase the total rate: each
        // fragment is hit by every hyperplane hitting both, and the cut
        // hyperplane itself gains positive measure.
        debug_assert!(
            rate_plus + rate_minus >= self.cells[victim].rate - 1e-9,
            "division decreased the total rate"
        );

        let plus_id = self.cells.len();
        let minus_id = plus_id + 1;
        debug_assert_eq!(plus_id as u64, 2 * jump_index - 1);
        self.weights.set(victim, 0.0);
        self.cells.push(CellSlot {
            geom: Some(plus),
            rate: rate_plus,
            parent: Some(victim),
            born: self.clock,
        });
        self.cells.push(CellSlot {
            geom: Some(minus),
            rate: rate_minus,
            parent: Some(victim),
            born: self.clock,
        });
        self.weights.push(rate_plus);
        self.weights.push(rate_minus);
        self.live += 1;
        self.jump_count = jump_index;

        let zero_before = self.zero_cell;
        if victim == zero_before {
            // The origin satisfies ⟨0, u⟩ = 0 ≤ α, so it lands in the H⁻
            // fragment (cuts through the origin are a null event).
            self.zero_cell = minus_id;
            debug_assert!(self.cells[minus_id]
                .geom
                .as_ref()
                .unwrap()
                .contains(&vec![0.0; self.window.dim()]));
        }

        let ev = JumpEvent {
            index: jump_index,
            time: self.clock,
            parent: victim,
            parent_geom: &parent_geom,
            hyperplane: &hyperplane,
            plus: (plus_id, self.cells[plus_id].geom.as_ref().unwrap()),
            minus: (minus_id, self.cells[minus_id].geom.as_ref().unwrap()),
            chord: chord.as_ref(),
            zero_cell_before: zero_before,
            zero_cell_after: self.zero_cell,
        };
        observer.on_jump(&ev);

        if self.log_jumps {
            self.jumps.push(JumpRecord {
                index: jump_index,
                time: self.clock,
                parent: victim,
                hyperplane,
                children: (plus_id, minus_id),
                chord,
            });
        }
        Ok(())
    }

    /// Freezes the live cells into a static tessellation.
    pub fn to_tessellation(&self) -> Tessellation {
        Tessellation::new(
            self.window.to_polytope(),
            self.live_cells().map(|(_, g)| g.clone()).collect(),
        )
    }
}

/// Child pair plus, in the planar case, the dividing chord's endpoints.
type SplitParts = (ConvexPolytope, ConvexPolytope, Option<[[f64; 2]; 2]>);

fn split_cell(geom: &ConvexPolytope, h: &Hyperplane, tag: FacetTag) -> Option<SplitParts> {
    match geom {
        ConvexPolytope::Planar(p) => {
            let u = h.normal().coords();
            p.split_with_chord([u[0], u[1]], h.offset(), tag).map(|(a, b, ch)| {
                (
                    ConvexPolytope::Planar(a),
                    ConvexPolytope::Planar(b),
                    Some(ch),
                )
            })
        }
        ConvexPolytope::General(p) => p
            .split(h, tag)
            .map(|(a, b)| (ConvexPolytope::General(a), ConvexPolytope::General(b), None)),
    }
}

/// Runs the process from a fresh window for `t` time units.
pub fn simulate<R: Rng>(
    measure: &HyperplaneMeasure,
    window: &Window,
    t: f64,
    rng: &mut R,
) -> Result<TessellationState> {
    simulate_observed(measure, window, t, rng, &mut NoopObserver)
}

/// Runs the process with a per-jump observer.
pub fn simulate_observed<R: Rng>(
    measure: &HyperplaneMeasure,
    window: &Window,
    t: f64,
    rng: &mut R,
    observer: &mut dyn JumpObserver,
) -> Result<TessellationState> {
    let mut state = TessellationState::new(measure, window)?;
    state.advance(measure, t, rng, observer)?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn axis2() -> HyperplaneMeasure {
        HyperplaneMeasure::axis_unit(2).unwrap()
    }

    #[test]
    fn fresh_state_is_the_window() {
        let m = axis2();
        let w = Window::new(1.0, 2).unwrap();
        let s = TessellationState::new(&m, &w).unwrap();
        assert_eq!(s.live_count(), 1);
        assert!((s.zeta() - 4.0).abs() < 1e-12);
        assert_eq!(s.zero_cell_id(), 0);
    }

    #[test]
    fn invariants_along_a_run() {
        let m = axis2();
        let w = Window::new(2.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = simulate(&m, &w, 1.0, &mut rng).unwrap();
        assert!(s.jump_count() > 0, "a few jumps are expected at t = 1");
        assert_eq!(s.live_count() as u64, s.jump_count() + 1);
        assert_eq!(s.cell_slots().len() as u64, 2 * s.jump_count() + 1);
        // Volume conservation.
        assert!((s.live_volume() - w.volume()).abs() < 1e-9 * w.volume());
        // Cached ζ agrees with a recomputation from geometry.
        assert!((s.zeta() - s.zeta_recomputed(&m)).abs() < 1e-9 * s.zeta());
        // The zero cell contains the origin.
        assert!(s.zero_cell().contains(&[0.0, 0.0]));
        // Jump times increase and children ids follow the 2j-1, 2j rule.
        let mut prev = 0.0;
        for j in s.jumps() {
            assert!(j.time >= prev);
            prev = j.time;
            assert_eq!(j.children.0 as u64, 2 * j.index - 1);
            assert_eq!(j.children.1 as u64, 2 * j.index);
        }
    }

    #[test]
    fn first_division_splits_rate_as_expected() {
        // Dividing [-2,2]² by any axis cut yields fragments whose rates sum
        // to 8 + 4 = 12 under the unit axis model (the shared side counts
        // twice, the cut side appears in both fragments).
        let m = axis2();
        let w = Window::new(2.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut s = TessellationState::new(&m, &w).unwrap();
            // Advance until exactly one jump happens.
            while s.jump_count() == 0 {
                s.advance(&m, 0.05, &mut rng, &mut NoopObserver).unwrap();
            }
            if s.jump_count() == 1 {
                assert!((s.zeta() - 12.0).abs() < 1e-9, "zeta = {}", s.zeta());
            }
        }
    }

    #[test]
    fn observer_sees_every_jump() {
        let m = axis2();
        let w = Window::new(1.5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut seen = Vec::new();
        let mut obs = FnObserver(|ev: &JumpEvent| {
            seen.push(ev.index);
            assert!(ev.plus.1.volume() > 0.0 && ev.minus.1.volume() > 0.0);
            assert!(ev.chord.is_some());
        });
        let s = simulate_observed(&m, &w, 0.8, &mut rng, &mut obs).unwrap();
        assert_eq!(seen.len() as u64, s.jump_count());
        assert!(seen.windows(2).all(|w| w[1] == w[0] + 1));
    }

    #[test]
    fn determinism_per_seed() {
        let m = axis2();
        let w = Window::new(2.0, 2).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let s = simulate(&m, &w, 0.7, &mut rng).unwrap();
            (s.jump_count(), s.zeta(), s.time())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn three_dimensional_smoke() {
        let m = HyperplaneMeasure::axis_unit(3).unwrap();
        let w = Window::new(1.0, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = simulate(&m, &w, 0.6, &mut rng).unwrap();
        assert_eq!(s.live_count() as u64, s.jump_count() + 1);
        assert!((s.live_volume() - 8.0).abs() < 1e-8);
        assert!(s.zero_cell().contains(&[0.0, 0.0, 0.0]));
    }

    #[test]
    fn jump_log_can_be_disabled() {
        let m = axis2();
        let w = Window::new(2.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut s = TessellationState::new(&m, &w).unwrap();
        s.set_jump_logging(false);
        s.advance(&m, 1.0, &mut rng, &mut NoopObserver).unwrap();
        assert!(s.jump_count() > 0);
        assert!(s.jumps().is_empty());
    }
}
