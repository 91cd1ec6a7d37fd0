//! Static tessellations and the iteration (nesting) operation.
//!
//! A [`Tessellation`] is a window together with the convex cells tiling it.
//! Iteration refines each cell by an independently drawn tessellation of the
//! same window, clipped to the cell — the operation under which the
//! cell-division process is stable in distribution: running for time t + s
//! equals running for time t and nesting independent time-s copies, and
//! running for time 2t then shrinking the window and the picture by half
//! equals running for time t.

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolytope, Window};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tessellation {
    window: ConvexPolytope,
    cells: Vec<ConvexPolytope>,
}

impl Tessellation {
    pub fn new(window: ConvexPolytope, cells: Vec<ConvexPolytope>) -> Self {
        debug_assert!(!cells.is_empty(), "a tessellation has at least one cell");
        Tessellation { window, cells }
    }

    pub fn window(&self) -> &ConvexPolytope {
        &self.window
    }

    pub fn cells(&self) -> &[ConvexPolytope] {
        &self.cells
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(ConvexPolytope::volume).sum()
    }

    /// The cell containing the origin, if any cell does.
    pub fn zero_cell(&self) -> Option<&ConvexPolytope> {
        let origin = vec![0.0; self.dim()];
        self.cells.iter().find(|c| c.contains(&origin))
    }

    pub fn zero_cell_volume(&self) -> f64 {
        self.zero_cell().map_or(0.0, ConvexPolytope::volume)
    }

    /// Total length of cell boundaries interior to the window (planar only):
    /// interior edges are shared by two cells, window edges by one.
    pub fn interior_edge_length(&self) -> Option<f64> {
        let wp = self.window.as_planar()?;
        let total: f64 = self
            .cells
            .iter()
            .map(|c| c.as_planar().map(|p| p.perimeter()))
            .sum::<Option<f64>>()?;
        Some((total - wp.perimeter()) / 2.0)
    }

    /// Deterministic cell numbering: the origin cell first, the rest by
    /// centroid distance from the origin with lexicographic tie-breaks.
    pub fn numbered_order(&self) -> Vec<usize> {
        let origin = vec![0.0; self.dim()];
        let mut keyed: Vec<(bool, f64, Vec<f64>, usize)> = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let cen = c.centroid();
                let d2: f64 = cen.iter().map(|x| x * x).sum();
                (!c.contains(&origin), d2, cen.to_vec(), i)
            })
            .collect();
        keyed.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.partial_cmp(&b.1).unwrap())
                .then_with(|| a.2.partial_cmp(&b.2).unwrap())
        });
        keyed.into_iter().map(|k| k.3).collect()
    }

    /// Homothety x ↦ r·x applied to the window and every cell.
    pub fn rescale(&self, r: f64) -> Tessellation {
        Tessellation {
            window: self.window.scale(r),
            cells: self.cells.iter().map(|c| c.scale(r)).collect(),
        }
    }

    /// Restriction to a smaller window: cells are clipped, empty pieces
    /// dropped; fresh boundary facets carry the clip window's facet tags.
    pub fn clip_to_window(&self, w: &Window) -> Tessellation {
        let wp = w.to_polytope();
        let cells = self
            .cells
            .iter()
            .filter_map(|c| c.intersect(&wp))
            .collect();
        Tessellation::new(wp, cells)
    }

    /// Iteration: refine cell number k (in [`numbered_order`](Self::numbered_order))
    /// by `fillings[k]` clipped to it. Errors if fewer fillings than cells
    /// are supplied; extras are ignored.
    pub fn nest(&self, fillings: &[Tessellation]) -> Result<Tessellation> {
        if fillings.len() < self.cells.len() {
            return Err(Error::NestingSupplyExhausted(self.cells.len()));
        }
        let mut out = Vec::with_capacity(self.cells.len() * 2);
        for (rank, &idx) in self.numbered_order().iter().enumerate() {
            let frame_cell = &self.cells[idx];
            let filling = &fillings[rank];
            let mut pieces: Vec<ConvexPolytope> = filling
                .cells
                .iter()
                .filter_map(|s| s.intersect(frame_cell))
                .collect();
            if pieces.is_empty() {
                // The filling must tile the frame cell; at worst the cell
                // survives unrefined (filling had one cell covering it).
                pieces.push(frame_cell.clone());
            }
            out.extend(pieces);
        }
        Ok(Tessellation::new(self.window.clone(), out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Direction, FacetTag, Hyperplane};

    fn window2(half: f64) -> Window {
        Window::new(half, 2).unwrap()
    }

    /// The window split by one axis cut ⟨x, u⟩ = α.
    fn split_window(half: f64, axis: usize, alpha: f64) -> Tessellation {
        let wp = window2(half).to_polytope();
        let h = Hyperplane::new(Direction::axis(axis, 2), alpha).unwrap();
        let (plus, minus) = wp.split(&h, FacetTag::Cut(1)).unwrap();
        Tessellation::new(wp, vec![plus, minus])
    }

    #[test]
    fn summaries_of_a_hand_tessellation() {
        let t = split_window(1.0, 0, 0.5);
        assert_eq!(t.cell_count(), 2);
        assert!((t.total_volume() - 4.0).abs() < 1e-12);
        // Zero cell is the x ≤ 0.5 fragment: area 3.
        assert!((t.zero_cell_volume() - 3.0).abs() < 1e-12);
        // One interior chord of length 2.
        assert!((t.interior_edge_length().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn numbering_starts_at_the_origin_cell() {
        let t = split_window(1.0, 0, 0.5);
        let order = t.numbered_order();
        assert_eq!(order.len(), 2);
        assert!(t.cells()[order[0]].contains(&[0.0, 0.0]));
        // The H⁻ fragment (index 1) holds the origin.
        assert_eq!(order, vec![1, 0]);
    }

    #[test]
    fn rescale_scales_volumes_quadratically() {
        let t = split_window(1.0, 0, 0.5);
        let s = t.rescale(3.0);
        assert!((s.total_volume() - 36.0).abs() < 1e-12);
        assert!((s.zero_cell_volume() - 27.0).abs() < 1e-12);
        assert!((s.interior_edge_length().unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn clipping_keeps_only_inner_material() {
        let t = split_window(2.0, 0, 0.5);
        let c = t.clip_to_window(&window2(1.0));
        assert_eq!(c.cell_count(), 2);
        assert!((c.total_volume() - 4.0).abs() < 1e-12);
        // Clip of a cut far outside the small window drops nothing visible.
        let far = split_window(2.0, 0, 1.5);
        let c = far.clip_to_window(&window2(1.0));
        assert_eq!(c.cell_count(), 1);
        assert!((c.total_volume() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn nesting_recounts_cells() {
        // Frame: split at x = 0 (2 cells). Fillings: splits at y = 0 and
        // y = 0.5. Result: 4 cells, volume conserved, and the piece counts
        // match intersecting by hand.
        let frame = split_window(1.0, 0, 0.0);
        let f1 = split_window(1.0, 1, 0.0);
        let f2 = split_window(1.0, 1, 0.5);
        let nested = frame.nest(&[f1, f2]).unwrap();
        assert_eq!(nested.cell_count(), 4);
        assert!((nested.total_volume() - 4.0).abs() < 1e-12);
        let mut areas: Vec<f64> = nested.cells().iter().map(|c| c.volume()).collect();
        areas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Rank 0 is the x ≤ 0 cell (centroid tie broken lexicographically),
        // split at y = 0 into two 1×1 pieces; the x ≥ 0 cell is split at
        // y = 0.5 into 1×0.5 and 1×1.5.
        let expect = [0.5, 1.0, 1.0, 1.5];
        for (a, e) in areas.iter().zip(expect) {
            assert!((a - e).abs() < 1e-12, "{areas:?}");
        }
    }

    #[test]
    fn nesting_requires_enough_fillings() {
        let frame = split_window(1.0, 0, 0.0);
        let f1 = split_window(1.0, 1, 0.0);
        match frame.nest(&[f1]) {
            Err(Error::NestingSupplyExhausted(n)) => assert_eq!(n, 2),
            other => panic!("expected supply exhaustion, got {other:?}"),
        }
    }
}
