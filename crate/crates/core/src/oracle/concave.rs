use crate::known_pair::{weak_success, Margin};
use crate::program_machine::{global_critical_margin, JordanSpectrum};
use crate::{Error, Result};

/// Maximiser of `Σ p_α P^W_α(r_α)` over the box `0 ≤ r_α ≤ r_{c,α}` with
/// `Σ p_α r_α = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveSolution {
    pub margins: Vec<f64>,
    pub success: f64,
    /// Lagrange multiplier of the budget constraint (common marginal gain).
    pub multiplier: f64,
}

const INNER_ITER: usize = 100;
const OUTER_MAX_ITER: usize = 400;

/// Marginal gain `d/dr (√r + √(1−c))² = 1 + √(1−c)/√r` below the critical margin.
fn marginal(c: f64, r: f64) -> f64 {
    1.0 + (1.0 - c).sqrt() / r.sqrt()
}

/// Largest margin in `[0, r_c]` whose marginal gain is still at least `lambda`.
fn block_response(c: f64, r_crit: f64, lambda: f64) -> f64 {
    if c >= 1.0 {
        // linear block: slope exactly 1, nothing is spent on it while λ > 1
        return 0.0;
    }
    if marginal(c, r_crit) >= lambda {
        return r_crit;
    }
    let (mut lo, mut hi) = (0.0, r_crit);
    for _ in 0..INNER_ITER {
        let mid = 0.5 * (lo + hi);
        if marginal(c, mid) >= lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn demand(spectrum: &JordanSpectrum, lambda: f64) -> f64 {
    spectrum
        .overlaps()
        .iter()
        .zip(spectrum.critical_margins())
        .zip(spectrum.weights())
        .map(|((&c, &rc), &p)| p * block_response(c, rc, lambda))
        .sum()
}

/// Solves the separable concave budget problem by bisection on the Lagrange
/// multiplier of the KKT conditions.
///
/// Every block with `c < 1` has a strictly decreasing marginal gain, so for a
/// multiplier `λ > 1` its optimal margin is where the gain drops to `λ`
/// (clipped to the box). Blocks with `c = 1` have constant gain 1 and only
/// receive budget once every other block is at its upper bound.
pub fn concave_allocate(spectrum: &JordanSpectrum, r: Margin) -> Result<ConcaveSolution> {
    let budget = r.value();
    let critical = global_critical_margin(spectrum).value();
    if budget > critical + 1e-15 {
        return Err(Error::Infeasible {
            margin: budget,
            critical,
        });
    }
    let budget = budget.min(critical);
    let blocks = spectrum.blocks();
    let (c, rc, p) = (
        spectrum.overlaps(),
        spectrum.critical_margins(),
        spectrum.weights(),
    );

    let (margins, multiplier) = if budget == 0.0 {
        (vec![0.0; blocks], f64::INFINITY)
    } else {
        let saturated: f64 = (0..blocks)
            .filter(|&i| c[i] < 1.0)
            .map(|i| p[i] * rc[i])
            .sum();
        if budget >= saturated {
            let mut margins: Vec<f64> = (0..blocks)
                .map(|i| if c[i] < 1.0 { rc[i] } else { 0.0 })
                .collect();
            let mut rest = budget - saturated;
            for i in (0..blocks).filter(|&i| c[i] >= 1.0) {
                let take = (rest / p[i]).min(rc[i]);
                margins[i] = take;
                rest -= take * p[i];
            }
            (margins, 1.0)
        } else {
            let mut hi = 2.0;
            while demand(spectrum, hi) > budget {
                hi = 1.0 + 2.0 * (hi - 1.0);
                if !hi.is_finite() {
                    return Err(Error::NoConvergence("bracketing the Lagrange multiplier"));
                }
            }
            let mut lo = 1.0;
            for _ in 0..OUTER_MAX_ITER {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if demand(spectrum, mid) > budget {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let lambda = 0.5 * (lo + hi);
            let margins = (0..blocks)
                .map(|i| block_response(c[i], rc[i], lambda))
                .collect();
            (margins, lambda)
        }
    };

    let success = margins
        .iter()
        .enumerate()
        .map(|(i, &m)| p[i] * weak_success(spectrum.overlap(i + 1), Margin::saturating(m)))
        .sum();
    Ok(ConcaveSolution {
        margins,
        success,
        multiplier,
    })
}
