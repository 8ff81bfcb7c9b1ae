//! Shift-register accelerated lazy random walks on the hypercube `{0,1}^n`.
//!
//! Two chains are provided. `Q1` flips a uniformly chosen coordinate with
//! probability 1/2 and then applies the shift register
//! `f(x) = (x_2, ..., x_n, x_1 ⊕ ... ⊕ x_n)`; `Q2` does the same with a
//! fixed middle coordinate and turns `n` steps into an exact uniform sampler.
//!
//! The crate offers exact distribution evolution for small `n`, Fourier and
//! weight-class bounds, Monte Carlo weight statistics, GF(2) linear algebra,
//! and reporting helpers shared with the `shiftwalk` command-line tool.

pub mod chains;
pub mod distribution;
pub mod error;
pub mod exact_sampler;
pub mod gf2;
pub mod par;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod verify;
pub mod weight_stats;

pub use chains::{Chain, ChainKind, DrivingSequence, Trajectory};
pub use distribution::DistributionVector;
pub use error::{Error, Result};
pub use gf2::{BitVector, Gf2Matrix};
pub use par::Execution;
