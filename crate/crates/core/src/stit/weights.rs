//! Dynamic categorical sampling over cell rates.
//!
//! A complete binary tree over the next power of two keeps subtree sums, so
//! inserting a cell, retiring one, and drawing an index proportionally to its
//! weight are all O(log n). Sums are recomputed bottom-up on every update
//! (child + child, never incremental deltas), so the root never drifts from
//! the leaves by more than accumulated rounding of a single path.

#[derive(Clone, Debug)]
pub struct CellWeights {
    len: usize,
    cap: usize,
    tree: Vec<f64>,
}

impl Default for CellWeights {
    fn default() -> Self {
        Self::new()
    }
}

impl CellWeights {
    pub fn new() -> Self {
        CellWeights {
            len: 0,
            cap: 1,
            tree: vec![0.0; 2],
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        let cap = n.next_power_of_two().max(1);
        CellWeights {
            len: 0,
            cap,
            tree: vec![0.0; 2 * cap],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sum of all weights.
    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        assert!(i < self.len, "index out of range");
        self.tree[self.cap + i]
    }

    /// Appends a weight, returning its index.
    pub fn push(&mut self, w: f64) -> usize {
        debug_assert!(w >= 0.0 && w.is_finite());
        if self.len == self.cap {
            self.grow();
        }
        let i = self.len;
        self.len += 1;
        self.tree[self.cap + i] = w;
        self.refresh_path(i);
        i
    }

    /// Overwrites the weight at `i` (0 retires a cell permanently).
    pub fn set(&mut self, i: usize, w: f64) {
        assert!(i < self.len, "index out of range");
        debug_assert!(w >= 0.0 && w.is_finite());
        self.tree[self.cap + i] = w;
        self.refresh_path(i);
    }

    /// The smallest index whose prefix sum exceeds `x`, for x ∈ [0, total).
    /// Zero-weight entries are never returned. Out-of-range draws (possible
    /// through rounding at the right edge) clamp to the last positive entry.
    pub fn sample(&self, x: f64) -> usize {
        debug_assert!(x >= 0.0);
        let mut node = 1;
        let mut x = x;
        while node < self.cap {
            let left = 2 * node;
            if x < self.tree[left] {
                node = left;
            } else {
                x -= self.tree[left];
                node = left + 1;
            }
        }
        let mut i = node - self.cap;
        if i >= self.len || self.tree[self.cap + i] <= 0.0 {
            i = (0..self.len)
                .rev()
                .find(|&j| self.tree[self.cap + j] > 0.0)
                .expect("sample from an all-zero weight set");
        }
        i
    }

    fn grow(&mut self) {
        let new_cap = self.cap * 2;
        let mut tree = vec![0.0; 2 * new_cap];
        tree[new_cap..new_cap + self.len].copy_from_slice(&self.tree[self.cap..self.cap + self.len]);
        for node in (1..new_cap).rev() {
            tree[node] = tree[2 * node] + tree[2 * node + 1];
        }
        self.cap = new_cap;
        self.tree = tree;
    }

    fn refresh_path(&mut self, i: usize) {
        let mut node = (self.cap + i) / 2;
        while node >= 1 {
            self.tree[node] = self.tree[2 * node] + self.tree[2 * node + 1];
            node /= 2;
        }
    }
}
