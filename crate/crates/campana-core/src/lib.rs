//! Exact-enumeration and circle-method-prediction engine for points with
//! m-full coordinates on diagonal hypersurfaces
//! `c_0 x_0^k + ... + c_n x_n^k = 0`.
//!
//! The crate has two halves that check each other:
//!
//! * exact counting ([`counting`], [`inclusion_exclusion`]) — enumeration of
//!   primitive solutions whose coordinates are m_i-full, meet-in-the-middle
//!   and histogram-convolution counters, and the inclusion–exclusion layer
//!   relating primitive and constrained counts;
//! * analytic prediction ([`circle`]) — singular series, singular integral,
//!   minor-arc diagnostics and the predicted leading term `C * B^(k*Gamma)`,
//!   every ingredient cross-checked against a brute-force oracle.
//!
//! The `campana` binary exposes all of it as batch subcommands.

pub mod arith;
pub mod circle;
pub mod cli;
pub mod counting;
pub mod error;
pub mod inclusion_exclusion;
pub mod orbifold;

pub use error::{Error, Result};

/// Artifact version echoed into every output record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
