//! Numerical laboratory for Piatetski-Shapiro-type primes `⌊h(n)⌋`, Green
//! measures on `Z_N`, exponential sums and three-term progressions.

pub mod dd;
pub mod error;
pub mod hfun;
pub mod numeric;
pub mod quad;
pub mod sieve;
pub mod zn_fourier;
pub mod measures;
pub mod expsums;
pub mod roth_harness;
pub mod checks;

pub use error::{Error, Result};
pub use hfun::{FunctionRecord, FunctionSpec, InverseSpec, Kind, KindParams};
pub use sieve::{PrimeTable, PsPrimeSet};
