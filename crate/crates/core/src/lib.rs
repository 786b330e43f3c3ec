//! Discrimination of noisy displaced number states in a truncated Fock
//! basis.
//!
//! A displaced number state (DNS) is D(μ)|k⟩; its noisy counterpart ρ(μ,k)
//! is a k-fold photon-added thermal state displaced by μ. This crate
//! constructs those states, computes the minimum discrimination error
//! probability (Helstrom bound) for pairs of them by closed form and by
//! eigendecomposition, and models the Kennedy receiver with threshold
//! detection, which attains the bound for equal-displacement pairs.
//!
//! Modules:
//! - [`specfun`]: log-factorials, log-binomials, generalized Laguerre
//!   polynomials.
//! - [`fock`]: truncated Fock-space linear algebra and operators.
//! - [`states`]: number/coherent/thermal states, noiseless and noisy DNS.
//! - [`discrimination`]: Helstrom bound by three routes.
//! - [`receiver`]: Kennedy threshold receiver, analytic optimum, Monte
//!   Carlo.
//! - [`oracle`]: independent brute-force constructions for validation.

pub mod discrimination;
pub mod error;
pub mod fock;
pub mod oracle;
pub mod receiver;
pub mod specfun;
pub mod states;

pub use discrimination::{DiscriminationProblem, EigenvalueSpectrum};
pub use error::{Error, Result};
pub use fock::{DensityMatrix, EigenSystem, FockVector};
pub use receiver::{Hypothesis, ReceiverConfig};
pub use states::DnsParams;
