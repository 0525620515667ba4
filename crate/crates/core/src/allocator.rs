//! Optimal distribution of a global error margin across Jordan blocks.
//!
//! Under a weak global margin `R` the optimal block margins are proportional
//! to `1 − c_α` until the block with the smallest overlap reaches its critical
//! margin; from then on that block stays frozen and the remaining budget is
//! redistributed among the others. The blocks freeze in order of increasing
//! `α` at the breakpoints `R_1 < R_2 < … < R_{n+1} = R_c` of the saturation
//! ladder, and on `R_{β−1} ≤ R ≤ R_β`
//!
//! ```text
//! r_α = r_{c,α}                          α < β
//! r_α = (1 − c_α)(R − ξ_β) / χ_β         α ≥ β
//! P_s = P^sat_β + (√(R − ξ_β) + √χ_β)²
//! ```
//!
//! with `ξ_β = Σ_{α<β} p_α r_{c,α}`, `χ_β = Σ_{α≥β} p_α(1 − c_α)` and
//! `P^sat_β = ½ Σ_{α<β} p_α(1 + √(1 − c_α²))`.
//!
//! A strong global margin `R^S` is handled through the equivalent weak margin
//! `R^W`, the unique solution of `R^S = R^W / (P_s(R^W) + R^W)`.

use crate::known_pair::{
    identical_states_outcome, strong_success, weak_to_strong_margin, Margin, MarginKind,
};
use crate::numeric::bisect_increasing;
use crate::program_machine::{global_critical_margin, JordanSpectrum};
use crate::{Error, Result};

/// Breakpoints and partial sums of the piecewise optimal weak allocation.
///
/// `β` ranges over `1..=n+1`; accessors take the 1-based `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationLadder {
    /// `R_0 = 0, R_1, …, R_{n+1} = R_c`.
    breakpoints: Vec<f64>,
    xi: Vec<f64>,
    chi: Vec<f64>,
    /// `P^sat_β` for `β = 1..=n+2`; the last entry is the minimum-error value.
    saturated: Vec<f64>,
    /// `R^S_β = R_β / (P_s(R_β) + R_β)`, same indexing as `breakpoints`.
    strong_breakpoints: Vec<f64>,
    /// Weight of the last block, which absorbs the margin on the final piece.
    last_weight: f64,
}

impl SaturationLadder {
    pub fn new(spectrum: &JordanSpectrum) -> Self {
        let (c, p, rc) = (
            spectrum.overlaps(),
            spectrum.weights(),
            spectrum.critical_margins(),
        );
        let blocks = spectrum.blocks();

        let mut xi = Vec::with_capacity(blocks);
        let mut saturated = Vec::with_capacity(blocks + 1);
        let (mut xi_acc, mut sat_acc) = (0.0, 0.0);
        for alpha in 0..blocks {
            xi.push(xi_acc);
            saturated.push(sat_acc);
            xi_acc += p[alpha] * rc[alpha];
            sat_acc += 0.5 * p[alpha] * (1.0 + (1.0 - c[alpha] * c[alpha]).sqrt());
        }
        saturated.push(sat_acc);

        let mut chi = vec![0.0; blocks];
        let mut chi_acc = 0.0;
        for alpha in (0..blocks).rev() {
            chi_acc += p[alpha] * (1.0 - c[alpha]);
            chi[alpha] = chi_acc;
        }
        // c_{n+1} = 1 exactly, so the tail sum over the last block is zero.
        chi[blocks - 1] = 0.0;

        let mut breakpoints = Vec::with_capacity(blocks + 1);
        breakpoints.push(0.0);
        for beta in 0..blocks - 1 {
            breakpoints.push(rc[beta] / (1.0 - c[beta]) * chi[beta] + xi[beta]);
        }
        breakpoints.push(xi[blocks - 1] + p[blocks - 1] * rc[blocks - 1]);

        let mut ladder = Self {
            breakpoints,
            xi,
            chi,
            saturated,
            strong_breakpoints: Vec::new(),
            last_weight: p[blocks - 1],
        };
        ladder.strong_breakpoints = (0..=blocks)
            .map(|beta| {
                let r = ladder.breakpoints[beta];
                if r == 0.0 {
                    return 0.0;
                }
                let piece = beta.max(1);
                r / (ladder.success_in_piece(piece, r) + r)
            })
            .collect();
        ladder
    }

    /// Number of Jordan blocks `n + 1`.
    pub fn blocks(&self) -> usize {
        self.xi.len()
    }

    /// `R_β` for `β = 0..=n+1`.
    pub fn breakpoint(&self, beta: usize) -> f64 {
        self.breakpoints[beta]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `R^S_β` for `β = 0..=n+1`.
    pub fn strong_breakpoint(&self, beta: usize) -> f64 {
        self.strong_breakpoints[beta]
    }

    pub fn strong_breakpoints(&self) -> &[f64] {
        &self.strong_breakpoints
    }

    pub fn xi(&self, beta: usize) -> f64 {
        self.xi[beta - 1]
    }

    pub fn chi(&self, beta: usize) -> f64 {
        self.chi[beta - 1]
    }

    /// `P^sat_β` for `β = 1..=n+2`.
    pub fn saturated_success(&self, beta: usize) -> f64 {
        self.saturated[beta - 1]
    }

    /// Global critical margin `R_c`.
    pub fn critical(&self) -> f64 {
        self.breakpoints[self.blocks()]
    }

    /// Success probability at the minimum-error plateau.
    pub fn plateau_success(&self) -> f64 {
        self.saturated[self.blocks()]
    }

    /// Index `β` of the piece containing the weak margin `r`: the smallest
    /// `β` with `r ≤ R_β`, or `n + 2` once every block is critical.
    pub fn locate(&self, r: f64) -> usize {
        let blocks = self.blocks();
        if r >= self.critical() {
            return blocks + 1;
        }
        (1..=blocks)
            .find(|&beta| r <= self.breakpoints[beta])
            .unwrap_or(blocks + 1)
    }

    /// Evaluates the piece-`β` success formula at `r` (meaningful on
    /// `R_{β−1} ≤ r ≤ R_β`; `β = n+2` is the plateau).
    pub fn success_in_piece(&self, beta: usize, r: f64) -> f64 {
        if beta > self.blocks() {
            return self.plateau_success();
        }
        let slack = (r - self.xi(beta)).max(0.0);
        let root = slack.sqrt() + self.chi(beta).sqrt();
        self.saturated_success(beta) + root * root
    }

    /// Optimal weak success probability at global margin `r`.
    pub fn success(&self, r: f64) -> f64 {
        self.success_in_piece(self.locate(r), r)
    }

    /// Weak margin of block `alpha` on piece `beta` at global margin `r`.
    fn block_margin(&self, spectrum: &JordanSpectrum, beta: usize, alpha: usize, r: f64) -> f64 {
        if alpha < beta {
            return spectrum.critical_margin(alpha);
        }
        let slack = (r - self.xi(beta)).max(0.0);
        let chi = self.chi(beta);
        let margin = if chi > 0.0 {
            (1.0 - spectrum.overlaps()[alpha - 1]) * slack / chi
        } else {
            slack / self.last_weight
        };
        margin.min(spectrum.critical_margin(alpha))
    }
}

/// Builds the saturation ladder of `spectrum`.
pub fn build_ladder(spectrum: &JordanSpectrum) -> SaturationLadder {
    SaturationLadder::new(spectrum)
}

/// An optimal assignment of per-block margins for one global margin.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginAllocation {
    /// The requested global margin, of kind `kind`.
    pub global_margin: f64,
    pub kind: MarginKind,
    /// Equivalent global weak margin `R^W` (equal to `global_margin` for weak
    /// allocations below `R_c`).
    pub weak_margin: f64,
    /// Blocks `α < beta` are frozen at their critical margins.
    pub beta: usize,
    pub r_weak: Vec<f64>,
    /// Per-block strong margins; the fully symmetric last block is reported
    /// at its critical value ½.
    pub r_strong: Vec<f64>,
    pub success: f64,
    pub error: f64,
    pub abstain: f64,
    /// Set when the requested margin exceeded `R_c` and was clamped.
    pub clamped: bool,
}

impl MarginAllocation {
    /// Whether block `alpha` (1-based) is frozen at its critical margin.
    pub fn is_frozen(&self, alpha: usize) -> bool {
        alpha < self.beta
    }

    pub fn frozen_count(&self) -> usize {
        self.beta - 1
    }
}

/// Ladder plus spectrum, for repeated allocations on one port configuration.
#[derive(Debug, Clone)]
pub struct MarginAllocator {
    spectrum: JordanSpectrum,
    ladder: SaturationLadder,
}

/// Interior samples per piece used to confirm that `R^S(R^W)` increases.
const MONOTONICITY_SAMPLES: usize = 8;

impl MarginAllocator {
    /// Builds the ladder and checks on a sample grid that the weak-to-strong
    /// global margin map increases on every piece.
    pub fn new(spectrum: JordanSpectrum) -> Result<Self> {
        let ladder = SaturationLadder::new(&spectrum);
        debug_assert!(
            (ladder.critical() - global_critical_margin(&spectrum).value()).abs() < 1e-12
        );
        for beta in 1..=ladder.blocks() {
            let (lo, hi) = (ladder.breakpoint(beta - 1), ladder.breakpoint(beta));
            let mut previous = f64::NEG_INFINITY;
            for k in 0..=MONOTONICITY_SAMPLES {
                let r = lo + (hi - lo) * k as f64 / MONOTONICITY_SAMPLES as f64;
                let rs = strong_of_weak(&ladder, beta, r);
                if rs < previous {
                    return Err(Error::NoConvergence(
                        "checking that the strong global margin increases with the weak one",
                    ));
                }
                previous = rs;
            }
        }
        Ok(Self { spectrum, ladder })
    }

    pub fn spectrum(&self) -> &JordanSpectrum {
        &self.spectrum
    }

    pub fn ladder(&self) -> &SaturationLadder {
        &self.ladder
    }

    pub fn weak(&self, r: Margin) -> MarginAllocation {
        let r = r.value();
        let beta = self.ladder.locate(r);
        let weak_margin = r.min(self.ladder.critical());
        self.assemble(MarginKind::Weak, r, weak_margin, beta)
    }

    pub fn strong(&self, rs: Margin) -> Result<MarginAllocation> {
        let ladder = &self.ladder;
        let rs = rs.value();
        let blocks = ladder.blocks();
        if rs >= ladder.strong_breakpoint(blocks) {
            return Ok(self.assemble(MarginKind::Strong, rs, ladder.critical(), blocks + 1));
        }
        let beta = (1..=blocks)
            .find(|&beta| rs <= ladder.strong_breakpoint(beta))
            .unwrap_or(blocks);
        let weak_margin = bisect_increasing(
            |r| strong_of_weak(ladder, beta, r),
            rs,
            ladder.breakpoint(beta - 1),
            ladder.breakpoint(beta),
            "inverting the global strong margin",
        )?;
        Ok(self.assemble(MarginKind::Strong, rs, weak_margin, beta))
    }

    fn assemble(
        &self,
        kind: MarginKind,
        global_margin: f64,
        weak_margin: f64,
        beta: usize,
    ) -> MarginAllocation {
        let spectrum = &self.spectrum;
        let blocks = spectrum.blocks();
        let r_weak: Vec<f64> = (1..=blocks)
            .map(|alpha| self.ladder.block_margin(spectrum, beta, alpha, weak_margin))
            .collect();
        let r_strong = r_weak
            .iter()
            .enumerate()
            .map(|(i, &rw)| {
                let c = spectrum.overlap(i + 1);
                if c.value() >= 1.0 {
                    0.5
                } else {
                    weak_to_strong_margin(c, Margin::saturating(rw)).value()
                }
            })
            .collect();
        let success = self.ladder.success_in_piece(beta, weak_margin);
        // the weak constraint is saturated: the average error equals R^W
        let error = weak_margin;
        MarginAllocation {
            global_margin,
            kind,
            weak_margin,
            beta,
            r_weak,
            r_strong,
            success,
            error,
            abstain: 1.0 - success - error,
            clamped: global_margin > self.ladder.critical(),
        }
    }

    pub fn weak_success(&self, r: Margin) -> f64 {
        self.ladder.success(r.value())
    }

    pub fn strong_success(&self, rs: Margin) -> Result<f64> {
        Ok(self.strong(rs)?.success)
    }

    /// Upper end of the sampled curves, `min(1, 1.2 R_c)`.
    pub fn curve_extent(&self) -> f64 {
        (1.2 * self.ladder.critical()).min(1.0)
    }

    /// Uniform grid of `samples` margins on `[0, curve_extent]` merged with
    /// the extra points, sorted and deduplicated.
    pub fn curve_margins(&self, samples: usize, extra: &[f64]) -> Result<Vec<f64>> {
        if samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "a curve needs at least 2 samples, got {samples}"
            )));
        }
        let upper = self.curve_extent();
        let mut margins: Vec<f64> = (0..samples)
            .map(|i| upper * i as f64 / (samples - 1) as f64)
            .chain(extra.iter().copied())
            .collect();
        margins.sort_by(f64::total_cmp);
        margins.dedup();
        Ok(margins)
    }

    pub fn weak_curve(&self, samples: usize) -> Result<Vec<(f64, f64)>> {
        let margins = self.curve_margins(samples, &self.ladder.breakpoints()[1..])?;
        Ok(margins
            .into_iter()
            .map(|r| (r, self.ladder.success(r)))
            .collect())
    }

    pub fn strong_curve(&self, samples: usize) -> Result<Vec<(f64, f64)>> {
        let margins = self.curve_margins(samples, &self.ladder.strong_breakpoints()[1..])?;
        margins
            .into_iter()
            .map(|r| Ok((r, self.strong_success(Margin::saturating(r))?)))
            .collect()
    }
}

fn strong_of_weak(ladder: &SaturationLadder, beta: usize, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    r / (ladder.success_in_piece(beta, r) + r)
}

/// Optimal weak-margin allocation at global margin `r`; margins above `R_c`
/// are clamped to the minimum-error plateau.
pub fn allocate_weak(spectrum: &JordanSpectrum, r: Margin) -> MarginAllocation {
    let ladder = SaturationLadder::new(spectrum);
    let allocator = MarginAllocator {
        spectrum: spectrum.clone(),
        ladder,
    };
    allocator.weak(r)
}

/// Optimal success probability under a weak global margin.
pub fn weak_success_global(spectrum: &JordanSpectrum, r: Margin) -> f64 {
    SaturationLadder::new(spectrum).success(r.value())
}

/// Optimal allocation under a strong global margin.
pub fn strong_global(spectrum: &JordanSpectrum, rs: Margin) -> Result<MarginAllocation> {
    MarginAllocator::new(spectrum.clone())?.strong(rs)
}

/// Residual of the strong condition
/// `Σ_α p_α P_{s,α}(r^S_α) [R − (1 − R) r^S_α / (1 − r^S_α)]`, where `R` is the
/// allocation's global margin. It vanishes for optimal strong allocations.
///
/// The fully symmetric block has conditional error ½ whenever it answers, so
/// its success is taken from its weak margin.
pub fn strong_condition_residual(spectrum: &JordanSpectrum, alloc: &MarginAllocation) -> f64 {
    let r = alloc.global_margin;
    (1..=spectrum.blocks())
        .map(|alpha| {
            let c = spectrum.overlap(alpha);
            let (rw, rs) = (alloc.r_weak[alpha - 1], alloc.r_strong[alpha - 1]);
            let block_success = if c.value() >= 1.0 {
                identical_states_outcome(Margin::saturating(rw)).p_success
            } else {
                strong_success(c, Margin::saturating(rs))
            };
            spectrum.weight(alpha) * block_success * (r - (1.0 - r) * rs / (1.0 - rs))
        })
        .sum()
}

/// `(R, P_s)` samples of the weak success curve including every breakpoint.
pub fn weak_curve(spectrum: &JordanSpectrum, samples: usize) -> Result<Vec<(f64, f64)>> {
    MarginAllocator::new(spectrum.clone())?.weak_curve(samples)
}

/// `(R, P_s)` samples of the strong success curve including every strong
/// breakpoint.
pub fn strong_curve(spectrum: &JordanSpectrum, samples: usize) -> Result<Vec<(f64, f64)>> {
    MarginAllocator::new(spectrum.clone())?.strong_curve(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::known_pair::weak_success;
    use crate::program_machine::{minimum_error_baseline, unambiguous_baseline, PortConfig};
    use proptest::prelude::*;

    fn spectrum(n: u32, nprime: u32) -> JordanSpectrum {
        JordanSpectrum::new(PortConfig::new(n, nprime).unwrap()).unwrap()
    }

    fn allocator(n: u32, nprime: u32) -> MarginAllocator {
        MarginAllocator::new(spectrum(n, nprime)).unwrap()
    }

    fn mg(r: f64) -> Margin {
        Margin::new(r).unwrap()
    }

    #[test]
    fn ladder_examples() {
        let s = spectrum(9, 2);
        let ladder = build_ladder(&s);
        assert_eq!(ladder.xi(1), 0.0);
        assert!((ladder.chi(1) - 0.45).abs() < 1e-15);
        assert_eq!(ladder.chi(10), 0.0);
        let r1 = s.critical_margin(1) / (1.0 - 1.0 / 55.0) * 0.45;
        assert!((ladder.breakpoint(1) - r1).abs() < 1e-15);
        assert!((ladder.breakpoint(1) - 3.788e-5).abs() < 1e-8);
        assert!((ladder.critical() - 0.153_809_696_075_423_16).abs() < 1e-12);
        assert!((ladder.xi(10) + s.weight(10) * 0.5 - ladder.critical()).abs() < 1e-15);
        assert!(ladder.breakpoints().windows(2).all(|w| w[0] < w[1]));
        assert!(ladder.strong_breakpoints().windows(2).all(|w| w[0] < w[1]));
        assert!((ladder.strong_breakpoint(10) - ladder.critical()).abs() < 1e-12);
    }

    #[test]
    fn weak_allocation_endpoints() {
        let s = spectrum(9, 2);
        let zero = allocate_weak(&s, mg(0.0));
        assert!(zero.r_weak.iter().all(|&r| r == 0.0));
        assert!((zero.success - 0.45).abs() < 1e-12);
        assert_eq!(zero.beta, 1);

        let me = minimum_error_baseline(s.config()).unwrap();
        for r in [build_ladder(&s).critical(), 0.2, 1.0] {
            let a = allocate_weak(&s, mg(r));
            assert!((a.success - me).abs() < 1e-12);
            assert_eq!(a.beta, s.blocks() + 1);
            assert_eq!(a.clamped, r > 0.16);
            assert!(a.abstain.abs() < 1e-12);
        }
    }

    #[test]
    fn eleven_two_freezes_five_blocks() {
        let s = spectrum(11, 2);
        let a = allocate_weak(&s, mg(0.0055));
        assert_eq!(a.frozen_count(), 5);
        for alpha in 1..=5 {
            assert_eq!(a.r_weak[alpha - 1], s.critical_margin(alpha));
        }
        for alpha in 6..=12 {
            assert!(a.r_weak[alpha - 1] < s.critical_margin(alpha));
        }
        assert_eq!(a.r_weak[11], 0.0);
        let unfrozen = &a.r_strong[5..11];
        assert!(unfrozen.iter().all(|r| (r - unfrozen[0]).abs() < 1e-9));
        assert_eq!(a.r_strong[11], 0.5);
    }

    #[test]
    fn global_success_examples() {
        let s = spectrum(9, 2);
        assert!((weak_success_global(&s, mg(0.0)) - 0.45).abs() < 1e-15);
        assert!(weak_success_global(&s, mg(0.05)) >= 0.675);
        let me = minimum_error_baseline(s.config()).unwrap();
        let rc = build_ladder(&s).critical();
        assert!((weak_success_global(&s, mg(rc)) - me).abs() < 1e-12);
    }

    #[test]
    fn strong_allocation_examples() {
        let s = spectrum(9, 2);
        let ua = unambiguous_baseline(s.config());
        let zero = strong_global(&s, mg(0.0)).unwrap();
        assert_eq!(zero.weak_margin, 0.0);
        assert!((zero.success - ua).abs() < 1e-15);
        assert_eq!(strong_condition_residual(&s, &zero), 0.0);

        let me = minimum_error_baseline(s.config()).unwrap();
        let rc = build_ladder(&s).critical();
        for r in [rc, 0.3] {
            assert!((strong_global(&s, mg(r)).unwrap().success - me).abs() < 1e-12);
        }

        let ladder = build_ladder(&s);
        let rs = 0.5 * ladder.strong_breakpoint(1);
        let a = strong_global(&s, mg(rs)).unwrap();
        assert_eq!(a.beta, 1);
        let ratio = (1.0 - rs).sqrt() / (rs.sqrt() - (1.0 - rs).sqrt());
        assert!((a.success - ratio * ratio * ua).abs() < 1e-12);
        assert!(a.r_strong[..9].iter().all(|r| (r - rs).abs() < 1e-12));
    }

    #[test]
    fn strong_breakpoints_map_through_success() {
        let s = spectrum(9, 2);
        let ladder = build_ladder(&s);
        for beta in 1..=s.blocks() {
            let r = ladder.breakpoint(beta);
            let want = r / (ladder.success(r) + r);
            assert!((ladder.strong_breakpoint(beta) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn residual_vanishes_on_optimal_strong_allocations() {
        let s = spectrum(11, 2);
        let alloc = allocator(11, 2);
        let rc = alloc.ladder().critical();
        for k in 1..20 {
            let a = alloc.strong(mg(rc * k as f64 / 20.0)).unwrap();
            assert!(strong_condition_residual(&s, &a).abs() < 1e-9);
        }
    }

    #[test]
    fn curves_include_breakpoints_and_join() {
        let alloc = allocator(9, 2);
        let weak = alloc.weak_curve(64).unwrap();
        let strong = alloc.strong_curve(64).unwrap();
        let margins: Vec<f64> = weak.iter().map(|p| p.0).collect();
        for &b in &alloc.ladder().breakpoints()[1..] {
            assert!(margins.contains(&b));
        }
        let strong_margins: Vec<f64> = strong.iter().map(|p| p.0).collect();
        for &b in &alloc.ladder().strong_breakpoints()[1..] {
            assert!(strong_margins.contains(&b));
        }
        assert_eq!(weak[0].0, 0.0);
        assert!((weak[0].1 - 0.45).abs() < 1e-15);
        assert!((strong[0].1 - 0.45).abs() < 1e-15);
        let (last_w, last_s) = (weak.last().unwrap(), strong.last().unwrap());
        assert!((last_w.1 - last_s.1).abs() < 1e-12);
        assert!(weak_curve(&spectrum(9, 2), 1).is_err());
    }

    #[test]
    fn linear_stretch_before_plateau() {
        let alloc = allocator(9, 2);
        let ladder = alloc.ladder();
        let (rn, rc) = (ladder.breakpoint(9), ladder.critical());
        let base = ladder.success(rn);
        for k in 0..=10 {
            let r = rn + (rc - rn) * k as f64 / 10.0;
            assert!((ladder.success(r) - base - (r - rn)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn allocation_invariants(n in 1u32..=14, nprime in 1u32..=5, frac in 0.0f64..=1.0) {
            let s = spectrum(n, nprime);
            let ladder = build_ladder(&s);
            let r = frac * ladder.critical();
            let a = allocate_weak(&s, mg(r));
            let constraint: f64 = s.weights().iter().zip(&a.r_weak).map(|(p, r)| p * r).sum();
            prop_assert!((constraint - r).abs() <= 1e-10);
            for alpha in 1..=s.blocks() {
                let (rw, rc) = (a.r_weak[alpha - 1], s.critical_margin(alpha));
                if a.is_frozen(alpha) {
                    prop_assert_eq!(rw, rc);
                } else {
                    prop_assert!(rw <= rc + 1e-15);
                }
            }
            // freeze set is a prefix: every unfrozen block is strictly below critical
            // except possibly the boundary block β at an exact breakpoint
            for alpha in a.beta + 1..=s.blocks() {
                prop_assert!(a.r_weak[alpha - 1] < s.critical_margin(alpha));
            }
            let direct: f64 = (1..=s.blocks())
                .map(|alpha| {
                    let c = s.overlap(alpha);
                    let rw = Margin::saturating(a.r_weak[alpha - 1]);
                    s.weight(alpha) * if c.value() >= 1.0 { rw.value() } else { weak_success(c, rw) }
                })
                .sum();
            prop_assert!((direct - a.success).abs() <= 1e-12);
            prop_assert!((a.success + a.error + a.abstain - 1.0).abs() <= 1e-10);
            if r <= ladder.breakpoint(s.blocks() - 1) {
                prop_assert_eq!(a.r_weak[s.blocks() - 1], 0.0);
            }
        }

        #[test]
        fn continuous_at_breakpoints(n in 1u32..=14, nprime in 1u32..=5) {
            let ladder = build_ladder(&spectrum(n, nprime));
            for beta in 1..=ladder.blocks() {
                let r = ladder.breakpoint(beta);
                let left = ladder.success_in_piece(beta, r);
                let right = ladder.success_in_piece(beta + 1, r);
                prop_assert!((left - right).abs() <= 1e-10, "beta={} {} vs {}", beta, left, right);
            }
        }

        #[test]
        fn strong_profile_is_flat(n in 1u32..=12, nprime in 1u32..=4, frac in 0.001f64..0.999) {
            let s = spectrum(n, nprime);
            let alloc = MarginAllocator::new(s.clone()).unwrap();
            let a = alloc.strong(mg(frac * alloc.ladder().critical())).unwrap();
            let unfrozen: Vec<f64> = (a.beta..s.blocks()).map(|alpha| a.r_strong[alpha - 1]).collect();
            for r in &unfrozen {
                prop_assert!((r - unfrozen[0]).abs() <= 1e-9);
            }
            prop_assert!(strong_condition_residual(&s, &a).abs() <= 1e-9);
            let weak = alloc.weak(mg(a.weak_margin));
            prop_assert!((weak.success - a.success).abs() <= 1e-12);
            prop_assert!(a.success <= alloc.weak_success(mg(a.global_margin)) + 1e-12);
        }
    }
}
