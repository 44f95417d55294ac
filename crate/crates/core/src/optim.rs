use alloc::vec;
use alloc::vec::Vec;

use crate::params::{Grads, ParamStore};
use crate::scalar::Scalar;

pub const ADAM_EPS: f64 = 1e-8;

/// Adam with bias correction. Moments are kept per parameter tensor in the
/// owning store's order.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub beta1: f64,
    pub beta2: f64,
    /// Number of updates applied so far.
    pub t: u64,
    pub m: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(store: &ParamStore<T>, beta1: f64, beta2: f64) -> Self {
        let zeros: Vec<Vec<T>> = store.iter().map(|p| vec![T::zero(); p.numel()]).collect();
        Self {
            beta1,
            beta2,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn step(&mut self, store: &mut ParamStore<T>, grads: &Grads<T>, lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - libm::pow(self.beta1, self.t as f64);
        let bc2 = 1.0 - libm::pow(self.beta2, self.t as f64);
        let b1 = T::lit(self.beta1);
        let b2 = T::lit(self.beta2);
        let one = T::one();
        let step = T::lit(lr / bc1);
        let inv_bc2 = T::lit(1.0 / bc2);
        let eps = T::lit(ADAM_EPS);
        for (((p, g), m), v) in store
            .iter_mut()
            .zip(grads.iter())
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            for (((w, &g), m), v) in p.data.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                *m = b1 * *m + (one - b1) * g;
                *v = b2 * *v + (one - b2) * g * g;
                *w -= step * *m / ((*v * inv_bc2).sqrt() + eps);
            }
        }
    }
}
