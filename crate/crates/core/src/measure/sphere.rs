//! Deterministic low-discrepancy point sets on S^{ℓ-1}, used for the
//! directional integrals in dimensions where no closed form or 1-D
//! quadrature applies.

use crate::geometry::{norm, Coords};
use crate::stats::inv_norm_cdf;
use smallvec::SmallVec;

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Van der Corput radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let mut f = 1.0 / b as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * f;
        i /= b;
        f /= b as f64;
    }
    out
}

/// Halton points pushed through the inverse normal CDF and radially
/// projected: a uniform low-discrepancy set on the sphere.
pub fn qmc_sphere_nodes(dim: usize, n: usize) -> Vec<Coords> {
    assert!(dim >= 2 && dim <= PRIMES.len(), "sphere nodes support 2 ≤ ℓ ≤ 8");
    let mut nodes = Vec::with_capacity(n);
    let mut i = 1u64;
    while nodes.len() < n {
        let mut v: Coords = SmallVec::with_capacity(dim);
        for &prime in &PRIMES[..dim] {
            // Clamp away from the endpoints; the inverse CDF diverges there.
            let u = radical_inverse(i, prime).clamp(1e-12, 1.0 - 1e-12);
            v.push(inv_norm_cdf(u));
        }
        i += 1;
        let len = norm(&v);
        if len < 1e-9 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= len;
        }
        nodes.push(v);
    }
    nodes
}
