//! Information-theoretic bounds for ensembles of LDPC codes over memoryless
//! binary-input output-symmetric (MBIOS) channels.
//!
//! The crate computes
//!
//! - upper bounds on achievable rates under ML decoding, both from the full
//!   soft LLR statistics and from a two-level (hard-decision) quantization,
//! - lower bounds on the conditional entropy of the codeword and on the bit
//!   error probability,
//! - lower bounds on the average check degree and parity-check density
//!   required to reach a given fraction of capacity,
//! - the same rate bound for punctured ensembles, modelled as transmission
//!   over parallel channels built from erasure cascades,
//!
//! and inverts these bounds over the channel parameter to obtain threshold
//! Eb/N0 values ([`solver`]).
//!
//! ```
//! use ldpc_bounds::{bounds, channels::MbiosChannel, ensembles::DegreePair};
//!
//! let reg36 = DegreePair::from_pairs(&[(3, 1.0)], &[(6, 1.0)]).unwrap();
//! let gamma = reg36.check_node_distribution();
//! let bec = MbiosChannel::bec(0.4).unwrap();
//! let report = bounds::rate_upper_bound(&bec, &gamma, &Default::default(), &Default::default()).unwrap();
//! assert!((report.value - (1.0 - 0.4 / (1.0 - 0.6f64.powi(6)))).abs() < 1e-10);
//! ```

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channels;
pub mod ensembles;
mod error;
pub mod quad;
pub mod roots;
pub mod solver;

pub use error::{Error, Result};
