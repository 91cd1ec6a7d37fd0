//! Adaptive Simpson quadrature for the directional integrals. Integrands are
//! piecewise-smooth support-function expressions; adaptive bisection isolates
//! the kinks.

pub const MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to the given absolute tolerance.
///
/// The error estimate is blind to structure the five seed nodes cannot see:
/// an integrand whose period divides (b−a)/4 aliases to a constant and
/// terminates immediately. Split periodic integrands into sub-period panels
/// first ([`integrate_circle`] does exactly that for full-circle integrals).
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(&mut f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
}

/// Integrates a 2π-periodic integrand over one period. The initial panel
/// grid keeps narrow support cones from being missed by the first probes.
pub fn integrate_circle<F: FnMut(f64) -> f64>(mut f: F, tol: f64) -> f64 {
    const PANELS: usize = 16;
    let step = std::f64::consts::TAU / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let a = i as f64 * step;
        total += adaptive_simpson(&mut f, a, a + step, tol / PANELS as f64);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}
