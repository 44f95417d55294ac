//! History buffer of generated images shown to the discriminators.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct ImagePool<T> {
    capacity: usize,
    buffer: Vec<Tensor<T>>,
}

impl<T: Scalar> ImagePool<T> {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            buffer: Vec::with_capacity(capacity),
        }
    }

    /// Rebuilds a pool from saved contents; the buffer is truncated to `capacity`.
    pub fn from_parts(capacity: usize, mut buffer: Vec<Tensor<T>>) -> Self {
        buffer.truncate(capacity);
        Self { capacity, buffer }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn images(&self) -> &[Tensor<T>] {
        &self.buffer
    }

    /// For each image of `fresh`: while the pool is filling, store it and
    /// return it; afterwards, with probability ½ return a uniformly drawn
    /// stored image and keep the fresh one in its slot, otherwise return
    /// the fresh image.
    pub fn query<R: Rng + ?Sized>(&mut self, fresh: &Tensor<T>, rng: &mut R) -> Result<Tensor<T>> {
        if self.capacity == 0 {
            return Ok(fresh.clone());
        }
        let mut out = Vec::with_capacity(fresh.batch());
        for i in 0..fresh.batch() {
            let img = fresh.select(i);
            if self.buffer.len() < self.capacity {
                self.buffer.push(img.clone());
                out.push(img);
            } else if rng.random::<f64>() > 0.5 {
                let slot = rng.random_range(0..self.buffer.len());
                out.push(core::mem::replace(&mut self.buffer[slot], img));
            } else {
                out.push(img);
            }
        }
        Tensor::stack(&out)
    }
}
