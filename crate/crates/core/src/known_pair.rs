//! Discrimination of two known pure states with equal priors under a weak or
//! strong error margin.
//!
//! The states are `|ψ_i⟩ = cos(θ/2)|0⟩ ± sin(θ/2)|1⟩` with overlap `c = cos θ`.
//! The optimal measurement has three outcomes (label 1, label 2, abstain) and
//! the two conclusive elements are `E_i = μ|φ_i⟩⟨φ_i|` with
//! `|φ_i⟩ = cos(φ/2)|0⟩ ± sin(φ/2)|1⟩`, so the whole POVM is fixed by the
//! angle `φ ∈ [π/2, π]` and `μ = 1/(1 − cos φ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::numeric::bisect_increasing;
use crate::{Error, Result};

/// Margins within this distance below the critical margin use the plateau
/// branch.
pub const PLATEAU_EPS: f64 = 1e-14;

/// Modulus of the inner product of the two hypothesis states.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Overlap(f64);

impl Overlap {
    pub fn new(c: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&c) {
            Ok(Self(c))
        } else {
            Err(Error::InvalidOverlap(c))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Angle `θ = arccos c` in `[0, π/2]`.
    pub fn theta(self) -> f64 {
        self.0.acos()
    }
}

/// An error margin in `[0, 1]`. Whether it is weak or strong is carried by the
/// function it is passed to.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Margin(f64);

impl Margin {
    pub fn new(r: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&r) {
            Ok(Self(r))
        } else {
            Err(Error::InvalidMargin(r))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Clamps `r` into `[0, 1]`; for values produced by arithmetic that may
    /// drift by a few ulps.
    pub(crate) fn saturating(r: f64) -> Self {
        Self(r.clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarginKind {
    /// Bound on the average error probability.
    Weak,
    /// Bound on each conditional probability of a wrong label.
    Strong,
}

impl std::fmt::Display for MarginKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MarginKind::Weak => f.write_str("weak"),
            MarginKind::Strong => f.write_str("strong"),
        }
    }
}

impl std::str::FromStr for MarginKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(MarginKind::Weak),
            "strong" => Ok(MarginKind::Strong),
            other => Err(Error::InvalidArgument(format!(
                "margin kind must be `weak` or `strong`, got `{other}`"
            ))),
        }
    }
}

/// The extremal three-outcome POVM in one two-dimensional block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmAngles {
    pub phi: f64,
    pub mu: f64,
}

impl PovmAngles {
    /// Builds the angles for `φ`, taking `μ` from the extremality of `E_0 ≥ 0`.
    pub fn from_phi(phi: f64) -> Self {
        Self {
            phi,
            mu: 1.0 / (1.0 - phi.cos()),
        }
    }

    fn from_half_tan(half_tan: f64) -> Self {
        Self::from_phi(2.0 * half_tan.atan())
    }

    fn von_neumann() -> Self {
        Self {
            phi: FRAC_PI_2,
            mu: 1.0,
        }
    }
}

/// Success, error and abstention probabilities of a measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeTriple {
    pub p_success: f64,
    pub p_error: f64,
    pub p_abstain: f64,
}

impl OutcomeTriple {
    /// Probability that a conclusive answer is wrong.
    pub fn conditional_error(&self) -> f64 {
        let conclusive = self.p_success + self.p_error;
        if conclusive > 0.0 {
            self.p_error / conclusive
        } else {
            0.0
        }
    }
}

/// `r_c = ½(1 − √(1 − c²))`, the margin beyond which the optimal measurement is
/// the minimum-error (von Neumann) one.
pub fn critical_margin(c: Overlap) -> Margin {
    let c = c.value();
    Margin::saturating(0.5 * (1.0 - (1.0 - c * c).sqrt()))
}

/// Minimum-error (Helstrom) success probability `½(1 + √(1 − c²))`.
pub fn helstrom_success(c: Overlap) -> f64 {
    let c = c.value();
    0.5 * (1.0 + (1.0 - c * c).sqrt())
}

fn on_plateau(c: Overlap, r: Margin) -> bool {
    r.value() >= critical_margin(c).value() - PLATEAU_EPS
}

/// Optimal success probability when the average error may not exceed `r`.
pub fn weak_success(c: Overlap, r: Margin) -> f64 {
    if on_plateau(c, r) {
        return helstrom_success(c);
    }
    let root = r.value().sqrt() + (1.0 - c.value()).sqrt();
    root * root
}

/// Optimal success probability when each conditional error may not exceed `r`.
pub fn strong_success(c: Overlap, r: Margin) -> f64 {
    if on_plateau(c, r) {
        return helstrom_success(c);
    }
    // r < r_c ≤ ½ here, so the denominator is strictly negative.
    let (r, keep) = (r.value(), (1.0 - r.value()).sqrt());
    debug_assert!(r < 0.5);
    let ratio = keep / (r.sqrt() - keep);
    ratio * ratio * (1.0 - c.value())
}

/// Optimal POVM angles under a weak margin.
pub fn weak_phi(c: Overlap, r: Margin) -> PovmAngles {
    if on_plateau(c, r) {
        return PovmAngles::von_neumann();
    }
    let c = c.value();
    PovmAngles::from_half_tan((1.0 + c).sqrt() / ((1.0 - c).sqrt() + 2.0 * r.value().sqrt()))
}

/// Optimal POVM angles under a strong margin.
///
/// Identical states (`c = 1`) make every conclusive pair of elements parallel,
/// so the angle carries no information about the margin and an
/// [`Error::AmbiguousParametrization`] is returned.
pub fn strong_phi(c: Overlap, r: Margin) -> Result<PovmAngles> {
    if c.value() >= 1.0 {
        return Err(Error::AmbiguousParametrization);
    }
    if on_plateau(c, r) {
        return Ok(PovmAngles::von_neumann());
    }
    let (c, r) = (c.value(), r.value());
    let (keep, err) = ((1.0 - r).sqrt(), r.sqrt());
    let half_tan = (keep - err) / (keep + err) * ((1.0 + c) / (1.0 - c)).sqrt();
    Ok(PovmAngles::from_half_tan(half_tan))
}

/// Outcome probabilities of the symmetric POVM `angles` on the state pair with
/// overlap `c`: `P_s = μ cos²((φ−θ)/2)`, `P_e = μ cos²((φ+θ)/2)`.
pub fn outcome_probabilities(c: Overlap, angles: PovmAngles) -> OutcomeTriple {
    let theta = c.theta();
    let p_success = angles.mu * (0.5 * (angles.phi - theta)).cos().powi(2);
    let p_error = angles.mu * (0.5 * (angles.phi + theta)).cos().powi(2);
    OutcomeTriple {
        p_success,
        p_error,
        p_abstain: 1.0 - p_success - p_error,
    }
}

/// Strong margin `r^W / (P_s^W(r^W) + r^W)` met by the optimal weak-margin
/// measurement.
pub fn weak_to_strong_margin(c: Overlap, rw: Margin) -> Margin {
    if rw.value() == 0.0 {
        return rw;
    }
    let rw = rw.value();
    Margin::saturating(rw / (weak_success(c, Margin(rw)) + rw))
}

/// Inverse of [`weak_to_strong_margin`] on `[0, r_c]`.
///
/// Margins at or above `r_c` map to `r_c`. For identical states every positive
/// weak margin yields the strong margin ½, so strong margins in `(0, ½)` have
/// no preimage and are reported as ambiguous.
pub fn strong_to_weak_margin(c: Overlap, rs: Margin) -> Result<Margin> {
    let rc = critical_margin(c).value();
    if rs.value() == 0.0 {
        return Ok(rs);
    }
    if rs.value() >= rc {
        return Ok(Margin(rc));
    }
    if c.value() >= 1.0 {
        return Err(Error::AmbiguousParametrization);
    }
    let rw = bisect_increasing(
        |x| weak_to_strong_margin(c, Margin(x)).value(),
        rs.value(),
        0.0,
        rc,
        "inverting the strong margin",
    )?;
    Ok(Margin(rw))
}

/// The abstain-or-guess strategy for identical states: answer uniformly at
/// random with probability `2r` and abstain otherwise, so success and error
/// both equal `r` (capped at ½).
pub fn identical_states_outcome(rw: Margin) -> OutcomeTriple {
    let r = rw.value().min(0.5);
    OutcomeTriple {
        p_success: r,
        p_error: r,
        p_abstain: 1.0 - 2.0 * r,
    }
}

/// `φ` at which `E_1` is orthogonal to `|ψ_2⟩` (the unambiguous measurement).
pub fn unambiguous_phi(c: Overlap) -> f64 {
    PI - c.theta()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ov(c: f64) -> Overlap {
        Overlap::new(c).unwrap()
    }

    fn mg(r: f64) -> Margin {
        Margin::new(r).unwrap()
    }

    /// Brute-force maximisation of `P_s` over a fine `φ` grid under the given
    /// constraint; independent of the closed forms.
    fn grid_argmax(c: f64, feasible: impl Fn(&OutcomeTriple) -> bool) -> (f64, f64) {
        let steps = 400_000;
        let mut best = (f64::NAN, -1.0);
        for i in 0..=steps {
            let phi = FRAC_PI_2 + FRAC_PI_2 * i as f64 / steps as f64;
            let out = outcome_probabilities(ov(c), PovmAngles::from_phi(phi));
            if feasible(&out) && out.p_success > best.1 {
                best = (phi, out.p_success);
            }
        }
        best
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert_eq!(Overlap::new(1.5), Err(Error::InvalidOverlap(1.5)));
        assert!(Overlap::new(-0.1).is_err());
        assert!(Overlap::new(f64::NAN).is_err());
        assert_eq!(Margin::new(-1e-3), Err(Error::InvalidMargin(-1e-3)));
        assert!(Margin::new(1.0).is_ok());
    }

    #[test]
    fn critical_margin_examples() {
        assert_eq!(critical_margin(ov(0.0)).value(), 0.0);
        assert_eq!(critical_margin(ov(1.0)).value(), 0.5);
        assert!((critical_margin(ov(0.6)).value() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn weak_success_examples() {
        assert!((weak_success(ov(0.6), mg(0.0)) - 0.4).abs() < 1e-15);
        assert!((weak_success(ov(0.6), mg(0.25)) - 0.9).abs() < 1e-15);
        let (_, oracle) = grid_argmax(0.6, |o| o.p_error <= 0.04);
        let closed = weak_success(ov(0.6), mg(0.04));
        assert!((closed - 0.692_982_212_813_470_5).abs() < 1e-12);
        assert!((closed - oracle).abs() < 1e-5, "{closed} vs grid {oracle}");
    }

    #[test]
    fn strong_success_examples() {
        assert!((strong_success(ov(0.6), mg(0.0)) - 0.4).abs() < 1e-15);
        assert!((strong_success(ov(0.6), mg(0.1)) - 0.9).abs() < 1e-12);
        // First branch evaluated directly at r = r_c: continuity with the plateau.
        let r: f64 = 0.1;
        let ratio = (1.0 - r).sqrt() / (r.sqrt() - (1.0 - r).sqrt());
        assert!((ratio * ratio * 0.4 - 0.9).abs() < 1e-12);
        let (_, oracle) = grid_argmax(0.6, |o| o.conditional_error() <= 0.05);
        let closed = strong_success(ov(0.6), mg(0.05));
        assert!((closed - 0.673_627_357_845_118).abs() < 1e-12);
        assert!((closed - oracle).abs() < 1e-5, "{closed} vs grid {oracle}");
    }

    #[test]
    fn weak_phi_examples() {
        let a = weak_phi(ov(0.6), mg(0.0));
        assert!((a.phi - (PI - 0.6f64.acos())).abs() < 1e-12);
        assert!((a.phi - 2.214_297_435_588_181).abs() < 1e-12);
        assert_eq!(
            weak_phi(ov(0.6), mg(0.25)),
            PovmAngles {
                phi: FRAC_PI_2,
                mu: 1.0
            }
        );
        let a = weak_phi(ov(0.6), mg(0.04));
        assert!((a.phi - 1.772_476_867_961_977).abs() < 1e-12);
        let (phi, _) = grid_argmax(0.6, |o| o.p_error <= 0.04);
        assert!((a.phi - phi).abs() < 1e-5);
    }

    #[test]
    fn weak_phi_identical_states_abstains() {
        let a = weak_phi(ov(1.0), mg(0.0));
        assert!((a.phi - PI).abs() < 1e-15);
        assert!((a.mu - 0.5).abs() < 1e-15);
        let out = outcome_probabilities(ov(1.0), a);
        assert!(out.p_success.abs() < 1e-15 && out.p_error.abs() < 1e-15);
    }

    #[test]
    fn strong_phi_examples() {
        let weak = weak_phi(ov(0.6), mg(0.0));
        let strong = strong_phi(ov(0.6), mg(0.0)).unwrap();
        assert!((weak.phi - strong.phi).abs() < 1e-12);
        let at_rc = strong_phi(ov(0.6), mg(0.1)).unwrap();
        assert!((at_rc.phi - FRAC_PI_2).abs() < 1e-7);
        let a = strong_phi(ov(0.6), mg(0.05)).unwrap();
        let (phi, _) = grid_argmax(0.6, |o| o.conditional_error() <= 0.05);
        assert!((a.phi - phi).abs() < 1e-5, "{} vs grid {phi}", a.phi);
        assert_eq!(
            strong_phi(ov(1.0), mg(0.2)),
            Err(Error::AmbiguousParametrization)
        );
    }

    #[test]
    fn outcome_probability_examples() {
        let out = outcome_probabilities(
            ov(0.0),
            PovmAngles {
                phi: FRAC_PI_2,
                mu: 1.0,
            },
        );
        assert!((out.p_success - 1.0).abs() < 1e-15);
        assert!(out.p_error.abs() < 1e-15);
        assert!(out.p_abstain.abs() < 1e-15);

        let out = outcome_probabilities(ov(1.0), PovmAngles { phi: PI, mu: 0.5 });
        assert!((out.p_success - out.p_error).abs() < 1e-15);
        assert!((out.p_abstain - (1.0 - 2.0 * out.p_success)).abs() < 1e-15);

        let out = outcome_probabilities(ov(0.6), weak_phi(ov(0.6), mg(0.04)));
        assert!((out.p_error - 0.04).abs() < 1e-10);
        assert!((out.p_success - 0.692_982_212_813_470_5).abs() < 1e-10);
    }

    #[test]
    fn margin_conversion_examples() {
        assert_eq!(weak_to_strong_margin(ov(0.3), mg(0.0)).value(), 0.0);
        assert_eq!(weak_to_strong_margin(ov(1.0), mg(0.0)).value(), 0.0);
        assert!((weak_to_strong_margin(ov(0.6), mg(0.1)).value() - 0.1).abs() < 1e-15);
        let rs = weak_to_strong_margin(ov(0.6), mg(0.04)).value();
        assert!((rs - 0.054_571_583_458_300_38).abs() < 1e-12);

        assert_eq!(
            strong_to_weak_margin(ov(0.3), mg(0.0)).unwrap().value(),
            0.0
        );
        assert!((strong_to_weak_margin(ov(0.6), mg(0.1)).unwrap().value() - 0.1).abs() < 1e-15);
        let rw = strong_to_weak_margin(ov(0.6), mg(0.054_571))
            .unwrap()
            .value();
        assert!((rw - 0.04).abs() < 1e-5);
        let rw = strong_to_weak_margin(ov(0.6), mg(rs)).unwrap().value();
        assert!((rw - 0.04).abs() < 1e-9);
    }

    #[test]
    fn identical_states_conversions() {
        assert!((weak_to_strong_margin(ov(1.0), mg(0.2)).value() - 0.5).abs() < 1e-15);
        assert_eq!(
            strong_to_weak_margin(ov(1.0), mg(0.2)),
            Err(Error::AmbiguousParametrization)
        );
        assert_eq!(
            strong_to_weak_margin(ov(1.0), mg(0.5)).unwrap().value(),
            0.5
        );
        let out = identical_states_outcome(mg(0.3));
        assert_eq!((out.p_success, out.p_error), (0.3, 0.3));
        assert!((out.p_abstain - 0.4).abs() < 1e-15);
    }

    #[test]
    fn beyond_critical_clamps_to_plateau() {
        let c = ov(0.8);
        let plateau = helstrom_success(c);
        for r in [0.3, 0.5, 1.0] {
            assert_eq!(weak_success(c, mg(r)), plateau);
            assert_eq!(strong_success(c, mg(r)), plateau);
        }
    }

    proptest! {
        #[test]
        fn weak_saturates_margin(c in 0.0f64..1.0, frac in 0.0f64..=1.0) {
            let c = ov(c);
            let r = mg(frac * critical_margin(c).value());
            let out = outcome_probabilities(c, weak_phi(c, r));
            prop_assert!((out.p_error - r.value()).abs() <= 1e-10);
            prop_assert!((out.p_success - weak_success(c, r)).abs() <= 1e-10);
            prop_assert!(weak_success(c, r) + r.value() <= 1.0 + 1e-12);
        }

        #[test]
        fn strong_saturates_conditional_error(c in 0.0f64..0.999, frac in 0.001f64..=1.0) {
            let c = ov(c);
            let r = mg(frac * critical_margin(c).value());
            let out = outcome_probabilities(c, strong_phi(c, r).unwrap());
            prop_assert!((out.conditional_error() - r.value()).abs() <= 1e-10);
            prop_assert!((out.p_success - strong_success(c, r)).abs() <= 1e-10);
        }

        #[test]
        fn successes_strictly_increase(c in 0.01f64..0.99, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let c = ov(c);
            let rc = critical_margin(c).value();
            let (lo, hi) = (a.min(b) * rc, a.max(b) * rc);
            prop_assume!(hi - lo > 1e-9);
            prop_assert!(weak_success(c, mg(lo)) < weak_success(c, mg(hi)));
            prop_assert!(strong_success(c, mg(lo)) < strong_success(c, mg(hi)));
        }

        #[test]
        fn continuous_at_critical_margin(c in 0.0f64..0.999) {
            let c = ov(c);
            let rc = critical_margin(c).value();
            // first branches evaluated at r_c itself, bypassing the plateau guard
            let weak_root = rc.sqrt() + (1.0 - c.value()).sqrt();
            prop_assert!((weak_root * weak_root - helstrom_success(c)).abs() <= 1e-12);
            let ratio = (1.0 - rc).sqrt() / (rc.sqrt() - (1.0 - rc).sqrt());
            prop_assert!((ratio * ratio * (1.0 - c.value()) - helstrom_success(c)).abs() <= 1e-12);
            prop_assert_eq!(weak_success(c, Margin(rc)), helstrom_success(c));
        }

        #[test]
        fn margin_maps_are_inverse(c in 0.0f64..0.999, frac in 0.0f64..=1.0) {
            let c = ov(c);
            let rw = mg(frac * critical_margin(c).value());
            let rs = weak_to_strong_margin(c, rw);
            let back = strong_to_weak_margin(c, rs).unwrap();
            prop_assert!((back.value() - rw.value()).abs() <= 1e-9);
            prop_assert!((weak_to_strong_margin(c, back).value() - rs.value()).abs() <= 1e-12);
            prop_assert!(rs.value() >= rw.value() - 1e-15);
        }
    }
}
