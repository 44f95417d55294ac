//! Numerical core for unpaired image-to-illustration translation.
//!
//! Everything here is pure computation over in-memory arrays: the GANILLA
//! generator and its two ablation variants, the 70×70 patch discriminator,
//! the cycle-consistent training step, and the style/content scoring
//! arithmetic. Backpropagation is written by hand, layer by layer, so the
//! crate runs without `std` (an allocator is required). File formats, the
//! training loop driver, and the command line live in the `ganilla` crate.
#![no_std]
#![deny(unsafe_op_in_unsafe_fn)]

extern crate alloc;

pub mod classifier;
pub mod discriminator;
pub mod error;
pub mod eval;
pub mod generator;
pub mod gradcheck;
pub mod image;
pub mod image_pool;
pub mod loss;
pub mod nn;
pub mod optim;
pub mod params;
pub mod rng;
pub mod scalar;
pub mod schedule;
pub mod synth;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use tensor::Tensor;
