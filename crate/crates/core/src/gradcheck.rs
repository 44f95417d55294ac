//! Central finite-difference checks of hand-written backward passes.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::params::{Grads, ParamStore};
use crate::tensor::Tensor;

/// Gradients below this magnitude are compared absolutely.
pub const DENOM_FLOOR: f64 = 1e-4;

/// One-sided slopes disagreeing by more than this (relative) mean the
/// `±h` interval straddles a ReLU or max-pool hinge.
const KINK_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GradSample {
    pub index: usize,
    pub name: String,
    pub analytic: f64,
    pub numeric: f64,
}

impl GradSample {
    pub fn rel_error(&self) -> f64 {
        let denom = self.analytic.abs().max(self.numeric.abs()).max(DENOM_FLOOR);
        (self.analytic - self.numeric).abs() / denom
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub samples: Vec<GradSample>,
    /// Draws rejected because the difference quotient crossed a hinge.
    pub kinks: usize,
}

impl GradCheck {
    pub fn worst(&self) -> Option<&GradSample> {
        self.samples
            .iter()
            .max_by(|a, b| a.rel_error().total_cmp(&b.rel_error()))
    }

    pub fn max_rel_error(&self) -> f64 {
        self.worst().map_or(0.0, GradSample::rel_error)
    }
}

/// Fixed random projection `L = Σ out·r`, so `dL/dout = r`.
pub fn projection<R: Rng + ?Sized>(shape: [usize; 4], rng: &mut R) -> Tensor<f64> {
    Tensor::from_fn(shape, |_| rng.random_range(-1.0..1.0))
}

pub fn project(out: &Tensor<f64>, r: &Tensor<f64>) -> f64 {
    out.data().iter().zip(r.data()).map(|(a, b)| a * b).sum()
}

/// Compares `grads` against `(L(p + h) − L(p − h)) / 2h` at `count` distinct
/// flat parameter indices drawn uniformly. `loss` evaluates the scalar loss
/// for the current contents of `store`.
///
/// A draw whose forward and backward one-sided slopes disagree sits on a
/// piecewise-linear hinge, where no difference quotient is meaningful; it
/// is counted in [`GradCheck::kinks`] and replaced by another draw. A wrong
/// analytic gradient does not make the loss itself kinked, so this cannot
/// hide a backward-pass error.
pub fn check_params<R: Rng + ?Sized>(
    store: &mut ParamStore<f64>,
    grads: &Grads<f64>,
    count: usize,
    h: f64,
    rng: &mut R,
    mut loss: impl FnMut(&ParamStore<f64>) -> f64,
) -> GradCheck {
    let total = store.numel();
    let want = count.min(total);
    let base = loss(store);
    let mut tried: Vec<usize> = Vec::new();
    let mut samples = Vec::with_capacity(want);
    let mut kinks = 0;
    while samples.len() < want && tried.len() < total {
        let index = rng.random_range(0..total);
        if tried.contains(&index) {
            continue;
        }
        tried.push(index);
        let orig = store.flat_get(index);
        store.flat_set(index, orig + h);
        let up = loss(store);
        store.flat_set(index, orig - h);
        let down = loss(store);
        store.flat_set(index, orig);
        let (fwd, bwd) = ((up - base) / h, (base - down) / h);
        let noise = 8.0 * f64::EPSILON * base.abs().max(1.0) / h;
        if (fwd - bwd).abs() > KINK_TOL * fwd.abs().max(bwd.abs()) + noise {
            kinks += 1;
            continue;
        }
        samples.push(GradSample {
            index,
            name: store.flat_name(index).to_string(),
            analytic: grads.flat_get(index),
            numeric: (up - down) / (2.0 * h),
        });
    }
    GradCheck { samples, kinks }
}
