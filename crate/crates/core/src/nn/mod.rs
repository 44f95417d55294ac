//! Layers with hand-written forward and backward passes.
//!
//! Every layer follows the same contract: `forward` reads parameters from a
//! [`ParamStore`](crate::params::ParamStore) and returns the output plus
//! whatever the adjoint needs; `backward` consumes an upstream gradient,
//! accumulates parameter gradients into [`Grads`](crate::params::Grads),
//! and returns the gradient with respect to the layer input.

pub mod conv;
pub mod graph;
pub mod norm;
pub mod ops;

pub use conv::{Conv2d, ConvTranspose2d, Padding};
pub use graph::{LayerDesc, LayerGraph, LayerKind};
pub use norm::InstanceNorm;
