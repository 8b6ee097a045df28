//! Signed log-likelihoods of the classical exponential families and the
//! Gaussian, Gamma and exponential bounds on their tail probabilities.
//!
//! [`families`] holds the seven families in mean parametrization,
//! [`bounds`] turns the domination and intersection inequalities into bound
//! values, [`oracles`] computes exact reference values independently of the
//! signed log-likelihood, and [`checkers`] sweeps grids comparing the two.

// `!(a < b)` is used deliberately so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bounds;
pub mod checkers;
pub mod error;
pub mod families;
pub mod oracles;
pub mod qq;
pub mod specialfn;

pub use bounds::{Domination, GammaBracket, TailBracket};
pub use checkers::{CheckConfig, CheckKind, CheckReport, Verdict};
pub use error::{Error, Result};
pub use families::{FamilyDescriptor, Params, SignedLL, SupportPoint};
pub use oracles::{GridSpec, Spacing};
pub use qq::{QQReference, QQRow, QQSeries};
