//! Simulation toolkit for quantum-assisted block matching.
//!
//! A dense state-vector simulator with depolarizing noise drives two
//! distance estimators (a swap test on amplitude-encoded blocks and a QFT
//! subtractor on basis-encoded pixels), which plug into full and
//! hierarchical block search over grayscale images.

pub mod encoding;
pub mod error;
pub mod harness;
pub mod image;
pub mod noise;
pub mod qft;
pub mod rng;
pub mod sim;
pub mod swap;

pub use error::{Error, Result};
