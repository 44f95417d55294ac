//! Flat, ordered parameter storage shared by every network.
//!
//! Layers never own their weights; they hold a [`ParamId`] into the
//! network's [`ParamStore`]. Gradients live in a separate [`Grads`] buffer
//! of identical layout, so a network can be run forward several times in
//! one training step while gradients from every pass accumulate in one
//! place.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Param<T> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<T>,
}

impl<T> Param<T> {
    pub fn numel(&self) -> usize {
        self.data.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamStore<T> {
    params: Vec<Param<T>>,
}

/// How freshly created parameters are filled.
#[derive(Debug, Clone, Copy)]
pub enum Init {
    Zeros,
    Ones,
    /// Normal with mean 0 and the given standard deviation.
    Normal(f64),
}

impl<T: Scalar> ParamStore<T> {
    pub fn new() -> Self {
        Self { params: Vec::new() }
    }

    pub fn add<R: Rng + ?Sized>(
        &mut self,
        name: String,
        shape: Vec<usize>,
        init: Init,
        rng: &mut R,
    ) -> ParamId {
        let numel = shape.iter().product();
        let data = match init {
            Init::Zeros => vec![T::zero(); numel],
            Init::Ones => vec![T::one(); numel],
            Init::Normal(std) => {
                let dist = Normal::new(0.0, std).expect("finite std");
                (0..numel).map(|_| T::lit(dist.sample(rng))).collect()
            }
        };
        self.params.push(Param { name, shape, data });
        ParamId(self.params.len() - 1)
    }

    #[inline]
    pub fn get(&self, id: ParamId) -> &[T] {
        &self.params[id.0].data
    }

    #[inline]
    pub fn get_mut(&mut self, id: ParamId) -> &mut [T] {
        &mut self.params[id.0].data
    }

    pub fn iter(&self) -> impl Iterator<Item = &Param<T>> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Param<T>> {
        self.params.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalars.
    pub fn numel(&self) -> usize {
        self.params.iter().map(Param::numel).sum()
    }

    pub fn zero_grads(&self) -> Grads<T> {
        Grads {
            bufs: self
                .params
                .iter()
                .map(|p| vec![T::zero(); p.numel()])
                .collect(),
        }
    }

    /// Scalar `index` of the flattened concatenation of all parameters.
    pub fn flat_get(&self, index: usize) -> T {
        let (p, o) = self.locate(index);
        self.params[p].data[o]
    }

    pub fn flat_set(&mut self, index: usize, v: T) {
        let (p, o) = self.locate(index);
        self.params[p].data[o] = v;
    }

    /// Parameter name owning flat scalar `index`.
    pub fn flat_name(&self, index: usize) -> &str {
        &self.params[self.locate(index).0].name
    }

    fn locate(&self, mut index: usize) -> (usize, usize) {
        for (i, p) in self.params.iter().enumerate() {
            if index < p.numel() {
                return (i, index);
            }
            index -= p.numel();
        }
        panic!("flat parameter index out of range");
    }

    pub fn cast<U: Scalar>(&self) -> ParamStore<U> {
        ParamStore {
            params: self
                .params
                .iter()
                .map(|p| Param {
                    name: p.name.clone(),
                    shape: p.shape.clone(),
                    data: p.data.iter().map(|v| U::lit(v.as_f64())).collect(),
                })
                .collect(),
        }
    }
}

/// Gradient buffers laid out like the owning [`ParamStore`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grads<T> {
    bufs: Vec<Vec<T>>,
}

impl<T: Scalar> Grads<T> {
    #[inline]
    pub fn get(&self, id: ParamId) -> &[T] {
        &self.bufs[id.0]
    }

    #[inline]
    pub fn get_mut(&mut self, id: ParamId) -> &mut [T] {
        &mut self.bufs[id.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<T>> {
        self.bufs.iter()
    }

    pub fn clear(&mut self) {
        for b in &mut self.bufs {
            b.fill(T::zero());
        }
    }

    pub fn flat_get(&self, mut index: usize) -> T {
        for b in &self.bufs {
            if index < b.len() {
                return b[index];
            }
            index -= b.len();
        }
        panic!("flat gradient index out of range");
    }

    pub fn all_zero(&self) -> bool {
        self.bufs.iter().flatten().all(|v| *v == T::zero())
    }
}
