//! Analytic upper bounds on the β-coefficient between nested windows.
//!
//! The bound combines three ingredients evaluated at a nesting horizon
//! 0 < s < t:
//!
//! * the encapsulation product E = e^{-sΛ([W'])}·(1 - e^{-sL})^{2ℓ} — the
//!   probability floor for "the origin cell walls W' off within s while W'
//!   stays whole";
//! * a cap M on the total division rate ζ(Y_t ∧ W') with its tail
//!   probability p_tail = P(ζ ≥ M);
//! * exponential tilting factors e^{±sM} trading the cap against the
//!   horizon.
//!
//! Two bracket forms are provided: the sharp max form and an algebraically
//! simpler sum form that dominates it pointwise. Both are clamped into
//! [0, 1] at the end — β itself never exceeds 1, so values above 1 merely
//! mean the bound is vacuous at those parameters.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Inputs to the β upper bounds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BetaBoundInputs {
    /// Nesting horizon s (strictly between 0 and the observation time).
    pub s: f64,
    /// Rate cap M.
    pub m_cap: f64,
    /// Tail probability P(ζ(Y_t ∧ W') ≥ M).
    pub p_tail: f64,
    /// Hitting measure of the inner window, Λ([W']).
    pub lambda_inner: f64,
    /// Smallest separating-class measure L(a, b).
    pub big_l: f64,
    /// Number of separating classes, 2ℓ.
    pub classes: usize,
}

impl BetaBoundInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::invalid("horizon s must be positive and finite"));
        }
        if !(self.m_cap > 0.0) {
            return Err(Error::invalid("rate cap M must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p_tail) {
            return Err(Error::invalid("p_tail must lie in [0, 1]"));
        }
        if !(self.lambda_inner > 0.0) || !(self.big_l > 0.0) {
            return Err(Error::invalid("Λ([W']) and L must be positive"));
        }
        if self.classes == 0 || !self.classes.is_multiple_of(2) {
            return Err(Error::invalid("class count must be a positive even 2ℓ"));
        }
        Ok(())
    }

    /// The encapsulation product E = e^{-sΛ([W'])}·(1 - e^{-sL})^{2ℓ}.
    pub fn encapsulation_term(&self) -> f64 {
        (-self.s * self.lambda_inner).exp()
            * (1.0 - (-self.s * self.big_l).exp()).powi(self.classes as i32)
    }
}

/// Max-form bracket, before clamping:
/// p + (1-p)·[1 - E·e^{-sM} + max(e^{sM} - 1, 2 - e^{-sM} - E)].
pub fn beta_upper_bound_raw(inp: &BetaBoundInputs) -> f64 {
    let e = inp.encapsulation_term();
    let sm = inp.s * inp.m_cap;
    let bracket = 1.0 - e * (-sm).exp() + (sm.exp() - 1.0).max(2.0 - (-sm).exp() - e);
    inp.p_tail + (1.0 - inp.p_tail) * bracket
}

/// Max-form upper bound, clamped into [0, 1].
pub fn beta_upper_bound(inp: &BetaBoundInputs) -> f64 {
    beta_upper_bound_raw(inp).clamp(0.0, 1.0)
}

/// Sum-form bracket, before clamping:
/// p + (1-p)·[2 + e^{sM} - e^{-sM} - (1 + e^{-sM})·E].
pub fn beta_upper_bound_simplified_raw(inp: &BetaBoundInputs) -> f64 {
    let e = inp.encapsulation_term();
    let sm = inp.s * inp.m_cap;
    let bracket = 2.0 + sm.exp() - (-sm).exp() - (1.0 + (-sm).exp()) * e;
    inp.p_tail + (1.0 - inp.p_tail) * bracket
}

/// Sum-form upper bound, clamped into [0, 1]. Dominates the max form
/// pointwise, so it is never the better bound — it exists as the cheap
/// cross-check.
pub fn beta_upper_bound_simplified(inp: &BetaBoundInputs) -> f64 {
    beta_upper_bound_simplified_raw(inp).clamp(0.0, 1.0)
}

/// The exactly solvable no-division case: conditioned on {Y_t ∧ W' is still
/// one cell}, the rate is deterministically ζ = Λ([W']), and the three
/// tilting factors in the bound's derivation collapse to
/// (1, e^{-sΛ([W'])}, e^{+sΛ([W'])}) — an indicator factor, the tilted
/// expectation, and its compensator — whose product is exactly 1.
pub fn no_jump_chain(lambda_inner: f64, s: f64) -> (f64, f64, f64) {
    (
        1.0,
        (-s * lambda_inner).exp(),
        (s * lambda_inner).exp(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(s: f64, lam: f64, l: f64, m: f64, p: f64) -> BetaBoundInputs {
        BetaBoundInputs {
            s,
            m_cap: m,
            p_tail: p,
            lambda_inner: lam,
            big_l: l,
            classes: 4,
        }
    }

    #[test]
    fn worked_example_clamps_to_one() {
        // sΛ = 0.4, sL = 0.3, sM = 0.2, p_tail = 0.05, ℓ = 2:
        // E = e^{-0.4}(1 - e^{-0.3})⁴, bracket pieces 0.99752... and
        // 1.17824..., raw total ≈ 2.117 → clamped to 1.
        let inp = inputs(1.0, 0.4, 0.3, 0.2, 0.05);
        inp.validate().unwrap();
        let raw = beta_upper_bound_raw(&inp);
        assert!((raw - 2.117).abs() < 1e-3, "raw = {raw}");
        assert_eq!(beta_upper_bound(&inp), 1.0);
    }

    #[test]
    fn vanishing_horizon_is_vacuous() {
        // s → 0: E → 0, both exponentials → 1, bracket → 2.
        let inp = inputs(1e-12, 0.4, 0.3, 0.2, 0.05);
        let raw = beta_upper_bound_raw(&inp);
        assert!((raw - (0.05 + 0.95 * 2.0)).abs() < 1e-9, "{raw}");
        assert_eq!(beta_upper_bound(&inp), 1.0);
    }

    #[test]
    fn sum_form_dominates_max_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let inp = BetaBoundInputs {
                s: rng.gen::<f64>() * 2.0 + 1e-6,
                m_cap: rng.gen::<f64>() * 5.0 + 1e-6,
                p_tail: rng.gen::<f64>(),
                lambda_inner: rng.gen::<f64>() * 10.0 + 1e-6,
                big_l: rng.gen::<f64>() * 10.0 + 1e-6,
                classes: 2 * (1 + rng.gen_range(0..3)),
            };
            let max_form = beta_upper_bound_raw(&inp);
            let sum_form = beta_upper_bound_simplified_raw(&inp);
            assert!(
                sum_form >= max_form - 1e-12,
                "sum {sum_form} < max {max_form} at {inp:?}"
            );
        }
    }

    #[test]
    fn saturated_tail_saturates_the_bound() {
        let inp = inputs(0.5, 2.0, 1.0, 3.0, 1.0);
        assert_eq!(beta_upper_bound_simplified(&inp), 1.0);
        assert_eq!(beta_upper_bound(&inp), 1.0);
    }

    #[test]
    fn sum_form_at_zero_cap_only_keeps_the_encapsulation_term() {
        // sM = 0 collapses the sum bracket to 2(1 - E).
        let mut inp = inputs(1.0, 0.4, 0.3, 1e-300, 0.0);
        inp.m_cap = 1e-300;
        let e = inp.encapsulation_term();
        let raw = beta_upper_bound_simplified_raw(&inp);
        assert!((raw - 2.0 * (1.0 - e)).abs() < 1e-12);
    }

    #[test]
    fn bounds_fall_as_separation_grows() {
        // Larger L (larger b) can only help: both bounds are non-increasing
        // in L with everything else fixed.
        let mut last_max = f64::INFINITY;
        let mut last_sum = f64::INFINITY;
        for l in [0.1, 0.3, 1.0, 3.0, 10.0] {
            let inp = inputs(0.8, 1.5, l, 2.0, 0.01);
            let v = beta_upper_bound_raw(&inp);
            let w = beta_upper_bound_simplified_raw(&inp);
            assert!(v <= last_max + 1e-12 && w <= last_sum + 1e-12);
            last_max = v;
            last_sum = w;
        }
    }

    #[test]
    fn no_jump_chain_reference_values() {
        let (a, b, c) = no_jump_chain(4.0, 0.1);
        assert_eq!(a, 1.0);
        assert!((b - 0.670320046).abs() < 1e-9);
        assert!((c - 1.491824698).abs() < 1e-9);
        assert!((a * b * c - 1.0).abs() < 1e-12);
    }
}
