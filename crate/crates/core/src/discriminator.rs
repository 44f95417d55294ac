//! 70×70 patch discriminator.
//!
//! Default stack: 4×4 convs C64s2 → C128s2 → C256s2 → C512s1 → C1s1, all
//! with zero padding 1, leaky ReLU (0.2) after every layer but the last,
//! instance norm on every layer but the first and the last. Each output
//! unit sees a 70×70 input patch.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::conv::conv_out_len;
use crate::nn::norm::NormCache;
use crate::nn::{ops, Conv2d, InstanceNorm, LayerGraph, Padding};
use crate::params::{Grads, ParamStore};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

pub const LEAKY_SLOPE: f64 = 0.2;
const PAD: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvLayerSpec {
    pub kernel: usize,
    pub stride: usize,
    pub out_width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminatorSpec {
    pub in_channels: usize,
    pub conv_layers: Vec<ConvLayerSpec>,
}

impl Default for DiscriminatorSpec {
    fn default() -> Self {
        Self::with_base_width(64)
    }
}

impl DiscriminatorSpec {
    /// Canonical five-layer stack with widths `base·(1, 2, 4, 8)` and a
    /// single-channel output layer.
    pub fn with_base_width(base: usize) -> Self {
        let l = |stride, out_width| ConvLayerSpec {
            kernel: 4,
            stride,
            out_width,
        };
        Self {
            in_channels: 3,
            conv_layers: vec![
                l(2, base),
                l(2, base * 2),
                l(2, base * 4),
                l(1, base * 8),
                l(1, 1),
            ],
        }
    }

    pub fn base_width(&self) -> usize {
        self.conv_layers.first().map_or(0, |l| l.out_width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.conv_layers.is_empty() {
            return Err(Error::config("discriminator needs at least one conv layer"));
        }
        if self.in_channels == 0 {
            return Err(Error::config("discriminator in_channels must be positive"));
        }
        for (i, l) in self.conv_layers.iter().enumerate() {
            if l.kernel == 0 || l.stride == 0 || l.out_width == 0 {
                return Err(Error::config(format!(
                    "discriminator layer {i}: kernel, stride and width must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn receptive_field(&self) -> Result<usize> {
        let layers: Vec<(usize, usize)> = self
            .conv_layers
            .iter()
            .map(|l| (l.kernel, l.stride))
            .collect();
        compute_receptive_field(&layers)
    }

    /// Output spatial size for an `h×w` input, `None` if the stack does not fit.
    pub fn output_hw(&self, h: usize, w: usize) -> Option<(usize, usize)> {
        let mut hw = (h, w);
        for l in &self.conv_layers {
            hw = (
                conv_out_len(hw.0, l.kernel, l.stride, PAD)?,
                conv_out_len(hw.1, l.kernel, l.stride, PAD)?,
            );
            if hw.0 == 0 || hw.1 == 0 {
                return None;
            }
        }
        Some(hw)
    }
}

/// Receptive field of one output unit of a conv stack given as
/// `(kernel, stride)` pairs: `rf += (k − 1)·jump; jump *= s`.
pub fn compute_receptive_field(layers: &[(usize, usize)]) -> Result<usize> {
    if layers.is_empty() {
        return Err(Error::input("receptive field of an empty layer list"));
    }
    let mut rf = 1;
    let mut jump = 1;
    for &(k, s) in layers {
        if k == 0 || s == 0 {
            return Err(Error::input(format!(
                "kernel and stride must be positive, got ({k}, {s})"
            )));
        }
        rf += (k - 1) * jump;
        jump *= s;
    }
    Ok(rf)
}

#[derive(Debug, Clone)]
struct Stage {
    conv: Conv2d,
    norm: Option<InstanceNorm>,
    leaky: bool,
}

#[derive(Debug, Clone)]
struct StageCache<T> {
    input: Tensor<T>,
    norm: Option<NormCache<T>>,
    /// Pre-activation, kept for the leaky-ReLU adjoint.
    pre: Option<Tensor<T>>,
}

#[derive(Debug, Clone)]
pub struct DiscriminatorCache<T> {
    stages: Vec<StageCache<T>>,
    output: Tensor<T>,
}

impl<T> DiscriminatorCache<T> {
    pub fn output(&self) -> &Tensor<T> {
        &self.output
    }
}

#[derive(Debug, Clone)]
pub struct DiscriminatorNet<T> {
    spec: DiscriminatorSpec,
    stages: Vec<Stage>,
    graph: LayerGraph,
    pub params: ParamStore<T>,
}

impl<T: Scalar> DiscriminatorNet<T> {
    pub fn build<R: Rng + ?Sized>(spec: &DiscriminatorSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let mut store = ParamStore::new();
        let mut graph = LayerGraph::default();
        let last = spec.conv_layers.len() - 1;
        let mut in_ch = spec.in_channels;
        let mut input = alloc::string::String::from("input");
        let mut stages = Vec::with_capacity(spec.conv_layers.len());
        for (i, l) in spec.conv_layers.iter().enumerate() {
            let name = format!("d{}.conv", i + 1);
            let conv = Conv2d::new(
                &mut store,
                &name,
                in_ch,
                l.out_width,
                l.kernel,
                l.stride,
                PAD,
                Padding::Zero,
                rng,
            );
            graph.conv(&name, &conv, &[&input]);
            input = name;
            let norm = (i != 0 && i != last).then(|| {
                let nname = format!("d{}.norm", i + 1);
                let n = InstanceNorm::new(&mut store, &nname, l.out_width, rng);
                graph.norm(&nname, &n, &input);
                input = nname;
                n
            });
            stages.push(Stage {
                conv,
                norm,
                leaky: i != last,
            });
            in_ch = l.out_width;
        }
        Ok(Self {
            spec: spec.clone(),
            stages,
            graph,
            params: store,
        })
    }

    pub fn spec(&self) -> &DiscriminatorSpec {
        &self.spec
    }

    pub fn graph(&self) -> &LayerGraph {
        &self.graph
    }

    pub fn count_parameters(&self) -> usize {
        self.params.numel()
    }

    pub fn forward(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        Ok(self.forward_cached(x)?.output)
    }

    pub fn forward_cached(&self, x: &Tensor<T>) -> Result<DiscriminatorCache<T>> {
        let [n, c, h, w] = x.shape();
        if n == 0 || c != self.spec.in_channels {
            return Err(Error::shape(format!(
                "discriminator expects [N≥1, {}, H, W], got {:?}",
                self.spec.in_channels,
                x.shape()
            )));
        }
        if self.spec.output_hw(h, w).is_none() {
            return Err(Error::shape(format!(
                "{h}x{w} input is too small for the discriminator conv stack"
            )));
        }
        let p = &self.params;
        let mut cur = x.clone();
        let mut stages = Vec::with_capacity(self.stages.len());
        for st in &self.stages {
            let mut h = st.conv.forward(p, &cur)?;
            let mut norm = None;
            if let Some(nl) = &st.norm {
                let (y, nc) = nl.forward(p, &h);
                h = y;
                norm = Some(nc);
            }
            let (next, pre) = if st.leaky {
                (ops::leaky_relu(&h, LEAKY_SLOPE), Some(h))
            } else {
                (h, None)
            };
            stages.push(StageCache {
                input: core::mem::replace(&mut cur, next),
                norm,
                pre,
            });
        }
        Ok(DiscriminatorCache {
            stages,
            output: cur,
        })
    }

    /// Accumulates parameter gradients into `grads` and returns the gradient
    /// with respect to the discriminator input.
    pub fn backward(
        &self,
        cache: &DiscriminatorCache<T>,
        dout: &Tensor<T>,
        grads: &mut Grads<T>,
    ) -> Tensor<T> {
        let p = &self.params;
        let mut d = dout.clone();
        for (st, c) in self.stages.iter().zip(&cache.stages).rev() {
            if let Some(pre) = &c.pre {
                d = ops::leaky_relu_backward(pre, &d, LEAKY_SLOPE);
            }
            if let (Some(nl), Some(nc)) = (&st.norm, &c.norm) {
                d = nl.backward(p, grads, nc, &d);
            }
            d = st.conv.backward(p, grads, &c.input, &d);
        }
        d
    }
}
