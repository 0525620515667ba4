//! Block structure of the programmable discriminator.
//!
//! Averaged over the unknown program states, the two port patterns become
//! flat states on `Sym(AB) ⊗ Sym(C)` and `Sym(A) ⊗ Sym(BC)`. Their supports
//! split into Jordan blocks labelled by total angular momentum
//! `j = α + n'/2 − 1`, `α = 1..=n+1`; inside each block the problem is known
//! pair discrimination with overlap `c_α`, and the block carries weight `p_α`.
//!
//! Block indices `α` are 1-based throughout the public API.

use crate::known_pair::{critical_margin, Margin, Overlap};
use crate::{Error, Result};

/// Largest supported `n + n'`.
pub const MAX_TOTAL_COPIES: u32 = 300;

/// Copies per program port (`n`, ports A and C) and in the data port (`n'`, port B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PortConfig {
    n: u32,
    nprime: u32,
}

impl PortConfig {
    pub fn new(n: u32, nprime: u32) -> Result<Self> {
        if n == 0 || nprime == 0 {
            return Err(Error::InvalidPortConfig { n, nprime });
        }
        Ok(Self { n, nprime })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nprime(&self) -> u32 {
        self.nprime
    }

    /// Number of Jordan blocks, `n + 1`.
    pub fn blocks(&self) -> usize {
        self.n as usize + 1
    }

    pub fn total_qubits(&self) -> u32 {
        2 * self.n + self.nprime
    }

    /// Spin of each program port, `n/2`.
    pub fn j_program(&self) -> f64 {
        f64::from(self.n) / 2.0
    }

    /// Spin of the data port, `n'/2`.
    pub fn j_data(&self) -> f64 {
        f64::from(self.nprime) / 2.0
    }

    /// `d_A = d_C = n + 1`.
    pub fn d_program(&self) -> u32 {
        self.n + 1
    }

    /// `d_AB = d_BC = n + n' + 1`.
    pub fn d_joint(&self) -> u32 {
        self.n + self.nprime + 1
    }

    fn check_range(&self) -> Result<()> {
        let total = self.n + self.nprime;
        if total > MAX_TOTAL_COPIES {
            return Err(Error::Overflow {
                total,
                max: MAX_TOTAL_COPIES,
            });
        }
        Ok(())
    }
}

/// Block overlaps `c_α = C(n'+α−1, n') / C(n+n', n')`, ascending, ending at 1.
///
/// Evaluated downward from `c_{n+1} = 1` through `c_α = c_{α+1}·α/(n'+α)`.
pub fn overlaps(config: PortConfig) -> Result<Vec<f64>> {
    config.check_range()?;
    let blocks = config.blocks();
    let nprime = f64::from(config.nprime);
    let mut c = vec![1.0; blocks];
    for alpha in (1..blocks).rev() {
        let a = alpha as f64;
        c[alpha - 1] = c[alpha] * a / (nprime + a);
    }
    Ok(c)
}

/// Block weights `p_α = (2α + n' − 1) / ((n+1)(n+n'+1))`.
pub fn weights(config: PortConfig) -> Vec<f64> {
    let norm = f64::from(config.d_program()) * f64::from(config.d_joint());
    (1..=config.blocks())
        .map(|alpha| (2.0 * alpha as f64 + f64::from(config.nprime) - 1.0) / norm)
        .collect()
}

/// Success probability of optimal unambiguous programmable discrimination,
/// `n n' / ((n+1)(n'+2))`.
pub fn unambiguous_baseline(config: PortConfig) -> f64 {
    let (n, nprime) = (f64::from(config.n), f64::from(config.nprime));
    n * nprime / ((n + 1.0) * (nprime + 2.0))
}

/// Success probability of optimal minimum-error programmable discrimination.
///
/// The factorial ratio `(n'+k)! n! / ((n'+n)! k!) = Π_{i=k+1..n} i/(n'+i)` is
/// carried as a running product from `k = n`, where it is exactly 1; growing
/// it from `k = 0` instead leaves a rounding residue in the last term that
/// `√(1 − x²)` magnifies to ~1e-8.
pub fn minimum_error_baseline(config: PortConfig) -> Result<f64> {
    config.check_range()?;
    let (n, nprime) = (f64::from(config.n), f64::from(config.nprime));
    let norm = (n + 1.0) * (n + nprime + 1.0);
    let mut ratio: f64 = 1.0;
    let mut sum = 0.0;
    for k in (0..=config.n).rev() {
        let k = f64::from(k);
        let weight = (nprime + 2.0 * k + 1.0) / norm;
        sum += weight * (1.0 - ratio * ratio).max(0.0).sqrt();
        ratio *= k / (nprime + k);
    }
    Ok(0.5 + 0.5 * sum)
}

/// Overlaps, weights and critical margins of every Jordan block.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpectrum {
    config: PortConfig,
    c: Vec<f64>,
    p: Vec<f64>,
    r_crit: Vec<f64>,
}

impl JordanSpectrum {
    pub fn new(config: PortConfig) -> Result<Self> {
        let c = overlaps(config)?;
        let p = weights(config);
        let r_crit = c
            .iter()
            .map(|&c| Overlap::new(c).map(|c| critical_margin(c).value()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            c,
            p,
            r_crit,
        })
    }

    pub fn config(&self) -> PortConfig {
        self.config
    }

    pub fn blocks(&self) -> usize {
        self.c.len()
    }

    /// Overlaps `c_α`, indexed from 0 for `α = 1`.
    pub fn overlaps(&self) -> &[f64] {
        &self.c
    }

    pub fn weights(&self) -> &[f64] {
        &self.p
    }

    pub fn critical_margins(&self) -> &[f64] {
        &self.r_crit
    }

    /// Overlap of block `alpha` (1-based).
    pub fn overlap(&self, alpha: usize) -> Overlap {
        Overlap::new(self.c[alpha - 1]).expect("overlaps lie in [0, 1]")
    }

    pub fn weight(&self, alpha: usize) -> f64 {
        self.p[alpha - 1]
    }

    pub fn critical_margin(&self, alpha: usize) -> f64 {
        self.r_crit[alpha - 1]
    }

    /// Total angular momentum of block `alpha`.
    pub fn j_of_alpha(&self, alpha: usize) -> f64 {
        alpha as f64 + self.config.j_data() - 1.0
    }

    /// Degeneracy `2j + 1 = 2α + n' − 1` of block `alpha`.
    pub fn multiplicity(&self, alpha: usize) -> usize {
        2 * alpha + self.config.nprime as usize - 1
    }
}

/// Global critical margin `R_c = Σ_α p_α r_{c,α}`.
pub fn global_critical_margin(spectrum: &JordanSpectrum) -> Margin {
    let rc = spectrum
        .p
        .iter()
        .zip(&spectrum.r_crit)
        .map(|(p, r)| p * r)
        .sum();
    Margin::saturating(rc)
}
