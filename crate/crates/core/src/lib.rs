//! Optimal programmable discrimination of two unknown qubit states with an
//! error margin.
//!
//! A programmable discriminator receives `n` copies of each of two unknown
//! pure qubit states through two program ports and `n'` copies of one of them
//! through a data port, and must tell which program the data matches. Allowing
//! a margin on the error rate interpolates between unambiguous discrimination
//! (zero error, some abstention) and minimum-error discrimination (no
//! abstention).
//!
//! The crate is layered:
//!
//! - [`known_pair`]: closed forms for two *known* states with weak and strong
//!   margins, plus the three-outcome POVM parametrization.
//! - [`program_machine`]: the Jordan-block structure of the averaged port
//!   states (block overlaps and weights) and the two baseline schemes.
//! - [`allocator`]: optimal distribution of a global margin across Jordan
//!   blocks through the saturation ladder, for both margin kinds.
//! - [`oracle`]: independent numerical checks (generic concave solver, POVM
//!   angle scans, dense construction of the averaged states, Monte Carlo).
//!
//! ```
//! use progdisc::{allocator, program_machine::{JordanSpectrum, PortConfig}, Margin};
//!
//! let spectrum = JordanSpectrum::new(PortConfig::new(9, 2)?)?;
//! let ua = allocator::weak_success_global(&spectrum, Margin::new(0.0)?);
//! let boosted = allocator::weak_success_global(&spectrum, Margin::new(0.05)?);
//! assert!((ua - 0.45).abs() < 1e-12);
//! assert!(boosted / ua > 1.5);
//! # Ok::<(), progdisc::Error>(())
//! ```

pub mod allocator;
mod error;
pub mod known_pair;
pub(crate) mod numeric;
pub mod oracle;
pub mod program_machine;

pub use error::{Error, Result};
pub use known_pair::{Margin, MarginKind, OutcomeTriple, Overlap, PovmAngles};
