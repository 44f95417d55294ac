//! The GANILLA generator and its two ablation variants.
//!
//! Downsampling is a modified ResNet-18: a 7×7 stride-2 stem with instance
//! norm, ReLU and 3×3 stride-2 max pooling, then four layers of two residual
//! blocks. In the GANILLA blocks the block input is *concatenated* to the
//! block output and a 1×1 conv restores the width; Layers II–IV halve the
//! resolution on their first block.
//!
//! Upsampling sums 1×1 lateral projections of every layer output while
//! walking back from Layer-IV with nearest ×2 upsampling, then recovers the
//! stem and pool strides with two more ×2 steps before a 7×7 conv and tanh.
//!
//! Variants:
//! * [`Variant::Ablation1AdditiveDown`] swaps the concatenative blocks for
//!   the additive blocks of the original ResNet-18.
//! * [`Variant::Ablation2DeconvUp`] feeds only the Layer-IV output into a
//!   cascade of stride-2 transposed convolutions (no long skips).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::norm::NormCache;
use crate::nn::ops;
use crate::nn::{Conv2d, ConvTranspose2d, InstanceNorm, LayerGraph, LayerKind, Padding};
use crate::params::{Grads, ParamStore};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Total downsampling factor: stem stride, pool stride, three stride-2 layers.
pub const SIZE_MULTIPLE: usize = 32;

/// Number of stride-2 transposed convs in the ablation-2 head.
const DECONV_STAGES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Ganilla,
    Ablation1AdditiveDown,
    Ablation2DeconvUp,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::Ganilla,
        Variant::Ablation1AdditiveDown,
        Variant::Ablation2DeconvUp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Ganilla => "ganilla",
            Variant::Ablation1AdditiveDown => "ablation1_additive_down",
            Variant::Ablation2DeconvUp => "ablation2_deconv_up",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown generator variant `{s}` (expected ganilla, ablation1_additive_down or ablation2_deconv_up)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Instance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub variant: Variant,
    pub stem_width: usize,
    /// Widths of Layer-I..Layer-IV.
    pub layer_widths: [usize; 4],
    /// Width of every upsampling-stage feature map.
    pub fpn_width: usize,
    pub norm: NormKind,
    pub padding: Padding,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            variant: Variant::Ganilla,
            stem_width: 64,
            layer_widths: [64, 128, 256, 256],
            fpn_width: 128,
            norm: NormKind::Instance,
            padding: Padding::Reflect,
        }
    }
}

impl GeneratorSpec {
    pub fn with_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    /// Width-4 network used for gradient checks and fast tests.
    pub fn tiny(variant: Variant) -> Self {
        Self {
            variant,
            stem_width: 4,
            layer_widths: [4, 4, 4, 4],
            fpn_width: 4,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stem_width == 0 {
            return Err(Error::config("stem_width must be positive"));
        }
        if let Some(i) = self.layer_widths.iter().position(|&w| w == 0) {
            return Err(Error::config(format!("layer_widths[{i}] must be positive")));
        }
        if self.fpn_width == 0 {
            return Err(Error::config("fpn_width must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct ResBlock {
    conv1: Conv2d,
    norm1: InstanceNorm,
    conv2: Conv2d,
    norm2: InstanceNorm,
    /// 1×1 projection of the block input when stride or width changes.
    proj: Option<Conv2d>,
    /// 1×1 reduction `2C → C` after concatenation; `None` for additive blocks.
    reduce: Option<Conv2d>,
}

#[derive(Debug, Clone)]
struct BlockCache<T> {
    x: Tensor<T>,
    n1: NormCache<T>,
    a1: Tensor<T>,
    n2: NormCache<T>,
    cat: Option<Tensor<T>>,
    out: Tensor<T>,
}

impl ResBlock {
    #[allow(clippy::too_many_arguments)]
    fn new<T: Scalar, R: Rng + ?Sized>(
        store: &mut ParamStore<T>,
        graph: &mut LayerGraph,
        name: &str,
        input: &str,
        in_ch: usize,
        out_ch: usize,
        stride: usize,
        concatenative: bool,
        padding: Padding,
        rng: &mut R,
    ) -> Self {
        let n = |s: &str| format!("{name}.{s}");
        let conv1 = Conv2d::new(
            store,
            &n("conv1"),
            in_ch,
            out_ch,
            3,
            stride,
            1,
            padding,
            rng,
        );
        graph.conv(&n("conv1"), &conv1, &[input]);
        let norm1 = InstanceNorm::new(store, &n("norm1"), out_ch, rng);
        graph.norm(&n("norm1"), &norm1, &n("conv1"));
        let conv2 = Conv2d::new(store, &n("conv2"), out_ch, out_ch, 3, 1, 1, padding, rng);
        graph.conv(&n("conv2"), &conv2, &[&n("norm1")]);
        let norm2 = InstanceNorm::new(store, &n("norm2"), out_ch, rng);
        graph.norm(&n("norm2"), &norm2, &n("conv2"));
        let proj = (stride != 1 || in_ch != out_ch).then(|| {
            let p = Conv2d::new(
                store,
                &n("proj"),
                in_ch,
                out_ch,
                1,
                stride,
                0,
                Padding::Zero,
                rng,
            );
            graph.conv(&n("proj"), &p, &[input]);
            p
        });
        let skip = if proj.is_some() {
            n("proj")
        } else {
            input.to_string()
        };
        let reduce = if concatenative {
            graph.op(
                &n("concat"),
                LayerKind::Concat,
                0,
                1,
                2 * out_ch,
                2 * out_ch,
                &[&n("norm2"), &skip],
            );
            let r = Conv2d::new(
                store,
                &n("reduce"),
                2 * out_ch,
                out_ch,
                1,
                1,
                0,
                Padding::Zero,
                rng,
            );
            graph.conv(&n("reduce"), &r, &[&n("concat")]);
            Some(r)
        } else {
            graph.op(
                &n("add"),
                LayerKind::Add,
                0,
                1,
                out_ch,
                out_ch,
                &[&n("norm2"), &skip],
            );
            None
        };
        Self {
            conv1,
            norm1,
            conv2,
            norm2,
            proj,
            reduce,
        }
    }

    fn forward<T: Scalar>(&self, p: &ParamStore<T>, x: Tensor<T>) -> Result<BlockCache<T>> {
        let h1 = self.conv1.forward(p, &x)?;
        let (h1, n1) = self.norm1.forward(p, &h1);
        let a1 = ops::relu(&h1);
        let h2 = self.conv2.forward(p, &a1)?;
        let (h2, n2) = self.norm2.forward(p, &h2);
        let skip = match &self.proj {
            Some(proj) => proj.forward(p, &x)?,
            None => x.clone(),
        };
        let (cat, out) = match &self.reduce {
            Some(reduce) => {
                let cat = ops::concat(&h2, &skip);
                let out = ops::relu(&reduce.forward(p, &cat)?);
                (Some(cat), out)
            }
            None => (None, ops::relu(&ops::add(&h2, &skip))),
        };
        Ok(BlockCache {
            x,
            n1,
            a1,
            n2,
            cat,
            out,
        })
    }

    fn backward<T: Scalar>(
        &self,
        p: &ParamStore<T>,
        g: &mut Grads<T>,
        c: &BlockCache<T>,
        dout: &Tensor<T>,
    ) -> Tensor<T> {
        let dpre = ops::relu_backward(&c.out, dout);
        let (dh2, dskip) = match (&self.reduce, &c.cat) {
            (Some(reduce), Some(cat)) => {
                let dcat = reduce.backward(p, g, cat, &dpre);
                ops::split(&dcat, self.norm2.channels)
            }
            _ => (dpre.clone(), dpre),
        };
        let mut dx = match &self.proj {
            Some(proj) => proj.backward(p, g, &c.x, &dskip),
            None => dskip,
        };
        let d = self.norm2.backward(p, g, &c.n2, &dh2);
        let d = self.conv2.backward(p, g, &c.a1, &d);
        let d = ops::relu_backward(&c.a1, &d);
        let d = self.norm1.backward(p, g, &c.n1, &d);
        dx.add_assign(&self.conv1.backward(p, g, &c.x, &d));
        dx
    }
}

#[derive(Debug, Clone)]
enum Head {
    /// Lateral 1×1 convs for Layer-I..Layer-IV.
    Pyramid { laterals: Vec<Conv2d> },
    Deconv {
        stages: Vec<(ConvTranspose2d, InstanceNorm)>,
    },
}

#[derive(Debug, Clone)]
enum HeadCache<T> {
    Pyramid,
    Deconv {
        inputs: Vec<Tensor<T>>,
        norms: Vec<NormCache<T>>,
        acts: Vec<Tensor<T>>,
    },
}

/// Intermediate activations of one generator forward pass, consumed by
/// [`GeneratorNet::backward`].
#[derive(Debug, Clone)]
pub struct GeneratorCache<T> {
    input: Tensor<T>,
    stem_norm: NormCache<T>,
    stem_act: Tensor<T>,
    pool_arg: Vec<u32>,
    blocks: Vec<BlockCache<T>>,
    head: HeadCache<T>,
    final_in: Tensor<T>,
    output: Tensor<T>,
}

impl<T> GeneratorCache<T> {
    pub fn output(&self) -> &Tensor<T> {
        &self.output
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorNet<T> {
    spec: GeneratorSpec,
    stem_conv: Conv2d,
    stem_norm: InstanceNorm,
    /// Four layers, two blocks each, flattened in order.
    blocks: Vec<ResBlock>,
    head: Head,
    out_conv: Conv2d,
    graph: LayerGraph,
    pub params: ParamStore<T>,
}

impl<T: Scalar> GeneratorNet<T> {
    /// Builds the layer graph for `spec` with freshly initialized weights
    /// (conv weights ~ N(0, 0.02), biases 0, norm scale 1 / shift 0).
    pub fn build<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let mut store = ParamStore::new();
        let mut graph = LayerGraph::default();
        let pad = spec.padding;

        let stem_conv = Conv2d::new(
            &mut store,
            "stem.conv",
            3,
            spec.stem_width,
            7,
            2,
            3,
            pad,
            rng,
        );
        graph.conv("stem.conv", &stem_conv, &["input"]);
        let stem_norm = InstanceNorm::new(&mut store, "stem.norm", spec.stem_width, rng);
        graph.norm("stem.norm", &stem_norm, "stem.conv");
        graph.op(
            "stem.pool",
            LayerKind::MaxPool,
            3,
            2,
            spec.stem_width,
            spec.stem_width,
            &["stem.norm"],
        );

        let concatenative = spec.variant != Variant::Ablation1AdditiveDown;
        let mut blocks = Vec::with_capacity(8);
        let mut in_ch = spec.stem_width;
        let mut input = String::from("stem.pool");
        for (li, &width) in spec.layer_widths.iter().enumerate() {
            for bi in 0..2 {
                let stride = if li > 0 && bi == 0 { 2 } else { 1 };
                let name = format!("layer{}.block{}", li + 1, bi);
                blocks.push(ResBlock::new(
                    &mut store,
                    &mut graph,
                    &name,
                    &input,
                    in_ch,
                    width,
                    stride,
                    concatenative,
                    pad,
                    rng,
                ));
                in_ch = width;
                input = name;
            }
            // Downstream consumers refer to a layer's output as `layerN`.
            input = format!("layer{}", li + 1);
        }

        let fpn = spec.fpn_width;
        let (head, head_out) = match spec.variant {
            Variant::Ganilla | Variant::Ablation1AdditiveDown => {
                let mut laterals = Vec::with_capacity(4);
                for (li, &width) in spec.layer_widths.iter().enumerate() {
                    let name = format!("up.lateral{}", li + 1);
                    let c = Conv2d::new(&mut store, &name, width, fpn, 1, 1, 0, Padding::Zero, rng);
                    laterals.push(c);
                }
                graph.conv("up.lateral4", &laterals[3], &["layer4"]);
                let mut prev = String::from("up.lateral4");
                for li in (0..3).rev() {
                    let up = format!("up.upsample{}", li + 1);
                    graph.op(&up, LayerKind::Upsample, 0, 2, fpn, fpn, &[&prev]);
                    let lat = format!("up.lateral{}", li + 1);
                    graph.conv(&lat, &laterals[li], &[&format!("layer{}", li + 1)]);
                    let sum = format!("up.sum{}", li + 1);
                    graph.op(&sum, LayerKind::Add, 0, 1, fpn, fpn, &[&up, &lat]);
                    prev = sum;
                }
                graph.op(
                    "up.restore_pool",
                    LayerKind::Upsample,
                    0,
                    2,
                    fpn,
                    fpn,
                    &[&prev],
                );
                graph.op(
                    "up.restore_stem",
                    LayerKind::Upsample,
                    0,
                    2,
                    fpn,
                    fpn,
                    &["up.restore_pool"],
                );
                (Head::Pyramid { laterals }, String::from("up.restore_stem"))
            }
            Variant::Ablation2DeconvUp => {
                let mut stages = Vec::with_capacity(DECONV_STAGES);
                let mut ch = spec.layer_widths[3];
                let mut prev = String::from("layer4");
                for i in 0..DECONV_STAGES {
                    let name = format!("up.deconv{}", i + 1);
                    let d = ConvTranspose2d::new(&mut store, &name, ch, fpn, 3, 2, 1, 1, rng);
                    graph.deconv(&name, &d, &[&prev]);
                    let nname = format!("up.norm{}", i + 1);
                    let n = InstanceNorm::new(&mut store, &nname, fpn, rng);
                    graph.norm(&nname, &n, &name);
                    stages.push((d, n));
                    ch = fpn;
                    prev = nname;
                }
                (Head::Deconv { stages }, prev)
            }
        };
        let out_conv = Conv2d::new(&mut store, "out.conv", fpn, 3, 7, 1, 3, pad, rng);
        graph.conv("out.conv", &out_conv, &[&head_out]);

        Ok(Self {
            spec: spec.clone(),
            stem_conv,
            stem_norm,
            blocks,
            head,
            out_conv,
            graph,
            params: store,
        })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn graph(&self) -> &LayerGraph {
        &self.graph
    }

    /// Exact number of scalar parameters, norm affine terms included.
    pub fn count_parameters(&self) -> usize {
        self.params.numel()
    }

    /// Spatial size after the stem conv, the pool, and each of the four layers.
    pub fn downsampling_trace(&self, size: usize) -> Vec<(&'static str, usize)> {
        let stem = (size + 2 * 3 - 7) / 2 + 1;
        let pool = (stem + 2 - 3) / 2 + 1;
        let mut out = vec![("stem", stem), ("pool", pool)];
        let mut s = pool;
        for (i, name) in ["layer1", "layer2", "layer3", "layer4"]
            .into_iter()
            .enumerate()
        {
            if i > 0 {
                s = (s + 2 - 3) / 2 + 1;
            }
            out.push((name, s));
        }
        out
    }

    pub fn check_input(&self, x: &Tensor<T>) -> Result<()> {
        let [n, c, h, w] = x.shape();
        if n == 0 {
            return Err(Error::shape("empty batch"));
        }
        if c != 3 {
            return Err(Error::shape(format!("expected 3 channels, got {c}")));
        }
        for (dim, v) in [("height", h), ("width", w)] {
            if v == 0 || v % SIZE_MULTIPLE != 0 {
                return Err(Error::shape(format!(
                    "{dim} {v} is not a positive multiple of {SIZE_MULTIPLE}"
                )));
            }
        }
        if !x.all_finite() {
            return Err(Error::input("generator input contains non-finite values"));
        }
        Ok(())
    }

    pub fn forward(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        Ok(self.forward_cached(x)?.output)
    }

    pub fn forward_cached(&self, x: &Tensor<T>) -> Result<GeneratorCache<T>> {
        self.check_input(x)?;
        let p = &self.params;
        let h = self.stem_conv.forward(p, x)?;
        let (h, stem_norm) = self.stem_norm.forward(p, &h);
        let stem_act = ops::relu(&h);
        let (mut h, pool_arg) = ops::max_pool(&stem_act, 3, 2, 1);

        let mut blocks = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let cache = block.forward(p, h)?;
            h = cache.out.clone();
            blocks.push(cache);
        }

        let (head, final_in) = match &self.head {
            Head::Pyramid { laterals } => {
                let mut acc = laterals[3].forward(p, &blocks[7].out)?;
                for li in (0..3).rev() {
                    acc = ops::upsample2(&acc);
                    acc.add_assign(&laterals[li].forward(p, &blocks[2 * li + 1].out)?);
                }
                let up = ops::upsample2(&ops::upsample2(&acc));
                (HeadCache::Pyramid, up)
            }
            Head::Deconv { stages } => {
                let mut inputs = Vec::with_capacity(stages.len());
                let mut norms = Vec::with_capacity(stages.len());
                let mut acts = Vec::with_capacity(stages.len());
                let mut cur = blocks[7].out.clone();
                for (deconv, norm) in stages {
                    let d = deconv.forward(p, &cur)?;
                    let (d, nc) = norm.forward(p, &d);
                    let a = ops::relu(&d);
                    inputs.push(core::mem::replace(&mut cur, a.clone()));
                    norms.push(nc);
                    acts.push(a);
                }
                (
                    HeadCache::Deconv {
                        inputs,
                        norms,
                        acts,
                    },
                    cur,
                )
            }
        };
        let output = ops::tanh(&self.out_conv.forward(p, &final_in)?);
        Ok(GeneratorCache {
            input: x.clone(),
            stem_norm,
            stem_act,
            pool_arg,
            blocks,
            head,
            final_in,
            output,
        })
    }

    /// Accumulates parameter gradients for `d output` into `grads` and
    /// returns the gradient with respect to the generator input.
    pub fn backward(
        &self,
        cache: &GeneratorCache<T>,
        dout: &Tensor<T>,
        grads: &mut Grads<T>,
    ) -> Tensor<T> {
        let p = &self.params;
        let d = ops::tanh_backward(&cache.output, dout);
        let d = self.out_conv.backward(p, grads, &cache.final_in, &d);

        // Gradients arriving at each layer output from the head.
        let mut dlayer: [Option<Tensor<T>>; 4] = [None, None, None, None];
        match (&self.head, &cache.head) {
            (Head::Pyramid { laterals }, HeadCache::Pyramid) => {
                let mut dacc = ops::upsample2_backward(&ops::upsample2_backward(&d));
                for (li, lateral) in laterals.iter().enumerate() {
                    let c = &cache.blocks[2 * li + 1].out;
                    dlayer[li] = Some(lateral.backward(p, grads, c, &dacc));
                    if li < 3 {
                        dacc = ops::upsample2_backward(&dacc);
                    }
                }
            }
            (
                Head::Deconv { stages },
                HeadCache::Deconv {
                    inputs,
                    norms,
                    acts,
                },
            ) => {
                let mut d = d;
                for (i, (deconv, norm)) in stages.iter().enumerate().rev() {
                    d = ops::relu_backward(&acts[i], &d);
                    d = norm.backward(p, grads, &norms[i], &d);
                    d = deconv.backward(p, grads, &inputs[i], &d);
                }
                dlayer[3] = Some(d);
            }
            _ => unreachable!("cache built by a different head"),
        }

        let mut d: Option<Tensor<T>> = None;
        for (bi, block) in self.blocks.iter().enumerate().rev() {
            if bi % 2 == 1 {
                if let Some(extra) = dlayer[bi / 2].take() {
                    d = Some(match d {
                        Some(mut acc) => {
                            acc.add_assign(&extra);
                            acc
                        }
                        None => extra,
                    });
                }
            }
            let dout = d.take().expect("layer-IV gradient always present");
            d = Some(block.backward(p, grads, &cache.blocks[bi], &dout));
        }
        let d = d.expect("eight blocks");
        let d = ops::max_pool_backward(cache.stem_act.shape(), &cache.pool_arg, &d);
        let d = ops::relu_backward(&cache.stem_act, &d);
        let d = self.stem_norm.backward(p, grads, &cache.stem_norm, &d);
        self.stem_conv.backward(p, grads, &cache.input, &d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn invalid_widths_rejected() {
        let mut spec = GeneratorSpec::default();
        spec.layer_widths[2] = 0;
        let err = GeneratorNet::<f32>::build(&spec, &mut rng()).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("layer_widths[2]")));
        let spec = GeneratorSpec {
            fpn_width: 0,
            ..GeneratorSpec::default()
        };
        assert!(GeneratorNet::<f32>::build(&spec, &mut rng()).is_err());
    }

    #[test]
    fn unknown_variant_rejected() {
        assert!("cyclegan".parse::<Variant>().is_err());
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
    }

    #[test]
    fn eight_blocks_in_four_layers() {
        let net = GeneratorNet::<f32>::build(&GeneratorSpec::default(), &mut rng()).unwrap();
        for li in 1..=4 {
            let blocks: Vec<_> = net
                .graph()
                .layers
                .iter()
                .filter(|l| {
                    l.name.starts_with(&format!("layer{li}.block")) && l.name.ends_with(".conv1")
                })
                .collect();
            assert_eq!(blocks.len(), 2, "layer{li}");
            assert_eq!(blocks[0].stride, if li == 1 { 1 } else { 2 });
            assert_eq!(blocks[1].stride, 1);
        }
    }

    #[test]
    fn graph_and_store_agree_on_count() {
        for v in Variant::ALL {
            let net = GeneratorNet::<f32>::build(&GeneratorSpec::tiny(v), &mut rng()).unwrap();
            assert_eq!(net.graph().param_count(), net.count_parameters());
        }
    }

    #[test]
    fn rejects_sizes_not_multiple_of_32() {
        let net =
            GeneratorNet::<f32>::build(&GeneratorSpec::tiny(Variant::Ganilla), &mut rng()).unwrap();
        let err = net.forward(&Tensor::zeros([1, 3, 48, 64])).unwrap_err();
        assert!(matches!(err, Error::Shape(ref m) if m.contains("height 48")));
        let err = net.forward(&Tensor::zeros([1, 3, 64, 40])).unwrap_err();
        assert!(matches!(err, Error::Shape(ref m) if m.contains("width 40")));
    }

    #[test]
    fn zeros_input_gives_bounded_output() {
        for v in Variant::ALL {
            let net = GeneratorNet::<f32>::build(&GeneratorSpec::tiny(v), &mut rng()).unwrap();
            let y = net.forward(&Tensor::zeros([1, 3, 32, 32])).unwrap();
            assert_eq!(y.shape(), [1, 3, 32, 32]);
            assert!(y.data().iter().all(|v| v.is_finite() && v.abs() <= 1.0));
        }
    }

    #[test]
    fn zero_padding_variant_builds() {
        let spec = GeneratorSpec {
            padding: Padding::Zero,
            ..GeneratorSpec::tiny(Variant::Ganilla)
        };
        let net = GeneratorNet::<f64>::build(&spec, &mut rng()).unwrap();
        assert_eq!(
            net.forward(&Tensor::zeros([2, 3, 64, 32])).unwrap().shape(),
            [2, 3, 64, 32]
        );
    }
}
