use std::f64::consts::{FRAC_PI_2, PI};

use crate::known_pair::{
    outcome_probabilities, unambiguous_phi, Margin, MarginKind, OutcomeTriple, Overlap, PovmAngles,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmScan {
    pub best_phi: f64,
    pub best_success: f64,
}

const GOLDEN_ITER: usize = 200;
/// Absorbs the ~1e-33 rounding residue of `P_e` at the unambiguous angle.
const FEASIBILITY_SLACK: f64 = 1e-30;

fn feasible(out: &OutcomeTriple, r: f64, kind: MarginKind) -> bool {
    match kind {
        MarginKind::Weak => out.p_error <= r + FEASIBILITY_SLACK,
        MarginKind::Strong => out.conditional_error() <= r + FEASIBILITY_SLACK,
    }
}

/// Brute-force search for the best symmetric three-outcome POVM.
///
/// Scans `φ ∈ [π/2, π]` with step at most `grid_step` (plus the angle at which
/// `E_1 ⊥ |ψ_2⟩`, the only feasible point when `r = 0`), keeps the largest
/// success among angles meeting the margin, then refines by a golden-section
/// pass over the neighbouring grid cells.
pub fn povm_scan(c: Overlap, r: Margin, kind: MarginKind, grid_step: f64) -> Result<PovmScan> {
    if !(grid_step > 0.0 && grid_step <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "grid step must lie in (0, 1e-3], got {grid_step}"
        )));
    }
    let r = r.value();
    let objective = |phi: f64| {
        let out = outcome_probabilities(c, PovmAngles::from_phi(phi));
        feasible(&out, r, kind).then_some(out.p_success)
    };

    let intervals = (FRAC_PI_2 / grid_step).ceil() as usize;
    let step = FRAC_PI_2 / intervals as f64;
    let mut best: Option<(f64, f64)> = None;
    let candidates = (0..=intervals)
        .map(|i| FRAC_PI_2 + step * i as f64)
        .chain(std::iter::once(unambiguous_phi(c).clamp(FRAC_PI_2, PI)));
    for phi in candidates {
        if let Some(success) = objective(phi) {
            if best.is_none_or(|(_, s)| success > s) {
                best = Some((phi, success));
            }
        }
    }
    let (phi_star, success_star) = best.ok_or(Error::EmptyFeasibleSet)?;

    // Golden-section refinement; infeasible points rank below every feasible
    // one and are pushed away from the known feasible point.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((phi_star - step).max(FRAC_PI_2), (phi_star + step).min(PI));
    let mut refined = (phi_star, success_star);
    for _ in 0..GOLDEN_ITER {
        if b - a <= f64::EPSILON * PI {
            break;
        }
        let x1 = b - inv_phi * (b - a);
        let x2 = a + inv_phi * (b - a);
        let (f1, f2) = (objective(x1), objective(x2));
        for (x, f) in [(x1, f1), (x2, f2)] {
            if let Some(s) = f {
                if s > refined.1 {
                    refined = (x, s);
                }
            }
        }
        let keep_left = match (f1, f2) {
            (Some(s1), Some(s2)) => s1 >= s2,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => x2 >= phi_star,
        };
        if keep_left {
            b = x2;
        } else {
            a = x1;
        }
    }
    Ok(PovmScan {
        best_phi: refined.0,
        best_success: refined.1,
    })
}
