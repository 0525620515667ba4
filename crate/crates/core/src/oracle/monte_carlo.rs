//! End-to-end sampling check: draw Haar-random program pairs, prepare the
//! actual port states, and measure them with the block-diagonal POVM built
//! from the numeric Jordan bases.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::dense::{build_sigma, jordan_pairs, BINNING_TOL};
use crate::allocator::allocate_weak;
use crate::known_pair::{weak_phi, Margin, OutcomeTriple};
use crate::program_machine::{JordanSpectrum, PortConfig};
use crate::{Error, Result};

/// Generator used for every sampled quantity; trial `i` draws from stream `i`
/// of a generator seeded with the user seed.
pub const RNG_ALGORITHM: &str = "chacha20/seed_from_u64/stream=trial";
pub const MIN_TRIALS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    /// Averages over the sampled pairs.
    pub outcome: OutcomeTriple,
    pub std_error_success: f64,
    pub std_error_error: f64,
    pub std_error_abstain: f64,
    /// Largest per-trial error probability (exactly zero for `R = 0`).
    pub max_error: f64,
    /// Largest per-trial abstention probability (exactly zero for `R ≥ R_c`).
    pub max_abstain: f64,
    /// Closed-form success probability of the same allocation.
    pub analytic_success: f64,
    /// Closed-form error probability (the saturated weak margin).
    pub analytic_error: f64,
    pub trials: usize,
    pub seed: u64,
    pub rng: &'static str,
}

/// Haar-random qubit: two independent standard complex normals, normalized.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 2] {
    let mut draw = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let (a, b) = (draw(), draw());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / norm, b / norm]
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Mean and standard error of `|⟨ψ₁|ψ₂⟩|²` over `samples` Haar pairs.
pub fn haar_overlap_moment(samples: usize, seed: u64) -> (f64, f64) {
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (a, b) = (haar_qubit(&mut rng), haar_qubit(&mut rng));
            (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
        })
        .collect();
    mean_and_std_error(&values)
}

fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Rank-one POVM component `weight · |vector⟩⟨vector|`.
struct RankOne {
    weight: f64,
    vector: DVector<Complex64>,
}

impl RankOne {
    fn expectation(&self, state: &DVector<Complex64>) -> f64 {
        self.weight * self.vector.dotc(state).norm_sqr()
    }
}

struct BlockPovm {
    label_one: Vec<RankOne>,
    label_two: Vec<RankOne>,
}

impl BlockPovm {
    fn probabilities(&self, state: &DVector<Complex64>) -> (f64, f64) {
        (
            self.label_one.iter().map(|e| e.expectation(state)).sum(),
            self.label_two.iter().map(|e| e.expectation(state)).sum(),
        )
    }
}

fn assemble_povm(
    config: PortConfig,
    spectrum: &JordanSpectrum,
    margins: &[f64],
) -> Result<BlockPovm> {
    let (sigma1, sigma2) = build_sigma(config)?;
    let pairs = jordan_pairs(&sigma1, &sigma2)?;
    let mut povm = BlockPovm {
        label_one: Vec::new(),
        label_two: Vec::new(),
    };
    for (k, &s) in pairs.overlaps.iter().enumerate() {
        let alpha = spectrum
            .overlaps()
            .iter()
            .position(|&c| (c - s).abs() <= BINNING_TOL)
            .map(|i| i + 1)
            .ok_or_else(|| {
                Error::BinningAmbiguity(format!("singular value {s} matches no block overlap"))
            })?;
        let c = spectrum.overlap(alpha);
        let r = Margin::saturating(margins[alpha - 1]);
        let a = pairs.first.column(k).into_owned();
        let b = pairs.second.column(k).into_owned();
        if c.value() >= 1.0 {
            // abstain, or answer at random with probability 2r
            povm.label_one.push(RankOne {
                weight: r.value(),
                vector: a.clone(),
            });
            povm.label_two.push(RankOne {
                weight: r.value(),
                vector: a,
            });
            continue;
        }
        let even = (&a + &b).normalize();
        let odd = (&a - &b).normalize();
        let angles = weak_phi(c, r);
        let (cos, sin) = ((0.5 * angles.phi).cos(), (0.5 * angles.phi).sin());
        povm.label_one.push(RankOne {
            weight: angles.mu,
            vector: &even * Complex64::from(cos) + &odd * Complex64::from(sin),
        });
        povm.label_two.push(RankOne {
            weight: angles.mu,
            vector: &even * Complex64::from(cos) - &odd * Complex64::from(sin),
        });
    }
    Ok(povm)
}

fn product_state(factors: &[([Complex64; 2], u32)]) -> DVector<Complex64> {
    let mut state = vec![Complex64::new(1.0, 0.0)];
    for (qubit, copies) in factors {
        for _ in 0..*copies {
            state = state
                .iter()
                .flat_map(|amp| [amp * qubit[0], amp * qubit[1]])
                .collect();
        }
    }
    DVector::from_vec(state)
}

/// Averages the exact outcome probabilities of the optimal weak-margin POVM
/// over `trials` Haar-random program pairs.
///
/// Trials run in parallel; trial `i` uses its own generator stream, so the
/// result depends only on `(config, margin, trials, seed)`.
pub fn monte_carlo_check(
    config: PortConfig,
    margin: Margin,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_TRIALS} trials are required, got {trials}"
        )));
    }
    let spectrum = JordanSpectrum::new(config)?;
    let allocation = allocate_weak(&spectrum, margin);
    let povm = assemble_povm(config, &spectrum, &allocation.r_weak)?;
    let (n, nprime) = (config.n(), config.nprime());

    let samples: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (psi1, psi2) = (haar_qubit(&mut rng), haar_qubit(&mut rng));
            let first = product_state(&[(psi1, n), (psi1, nprime), (psi2, n)]);
            let second = product_state(&[(psi1, n), (psi2, nprime), (psi2, n)]);
            let (one_first, two_first) = povm.probabilities(&first);
            let (one_second, two_second) = povm.probabilities(&second);
            let success = 0.5 * (one_first + two_second);
            let error = 0.5 * (two_first + one_second);
            let norm = 0.5 * (first.norm_squared() + second.norm_squared());
            (success, error, norm - success - error)
        })
        .collect();

    let column = |pick: fn(&(f64, f64, f64)) -> f64| samples.iter().map(pick).collect::<Vec<f64>>();
    let (success, se_success) = mean_and_std_error(&column(|t| t.0));
    let errors = column(|t| t.1);
    let abstains = column(|t| t.2);
    let (error, se_error) = mean_and_std_error(&errors);
    let (abstain, se_abstain) = mean_and_std_error(&abstains);
    Ok(MonteCarloReport {
        outcome: OutcomeTriple {
            p_success: success,
            p_error: error,
            p_abstain: abstain,
        },
        std_error_success: se_success,
        std_error_error: se_error,
        std_error_abstain: se_abstain,
        max_error: errors.iter().fold(0.0, |m, v| m.max(v.abs())),
        max_abstain: abstains.iter().fold(0.0, |m, v| m.max(v.abs())),
        analytic_success: allocation.success,
        analytic_error: allocation.error,
        trials,
        seed,
        rng: RNG_ALGORITHM,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, nprime: u32) -> PortConfig {
        PortConfig::new(n, nprime).unwrap()
    }

    #[test]
    fn haar_states_are_normalized() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..100 {
            let q = haar_qubit(&mut rng);
            assert!((q[0].norm_sqr() + q[1].norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn haar_second_moment() {
        let (mean, se) = haar_overlap_moment(20_000, 3);
        assert!((mean - 0.5).abs() <= 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn product_state_ordering() {
        let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let one = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let s = product_state(&[(one, 1), (zero, 1), (one, 1)]);
        assert_eq!(s.len(), 8);
        assert_eq!(s[0b101], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unambiguous_povm_never_errs() {
        let report =
            monte_carlo_check(cfg(1, 1), Margin::new(0.0).unwrap(), MIN_TRIALS, 42).unwrap();
        assert!(report.max_error <= 1e-10);
        let dev = (report.outcome.p_success - 1.0 / 6.0).abs();
        assert!(
            dev <= 3.0 * report.std_error_success,
            "{dev} vs {}",
            report.std_error_success
        );
    }

    #[test]
    fn is_reproducible() {
        let r = Margin::new(0.05).unwrap();
        let a = monte_carlo_check(cfg(1, 1), r, MIN_TRIALS, 9).unwrap();
        let b = monte_carlo_check(cfg(1, 1), r, MIN_TRIALS, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_too_few_trials() {
        assert!(monte_carlo_check(cfg(1, 1), Margin::new(0.0).unwrap(), 10, 1).is_err());
    }
}
