//! Compact from-scratch image classifier: a stack of 3×3 stride-2 conv +
//! ReLU blocks, global average pooling and a linear head.
//!
//! There is no normalization layer, so absolute colour survives into the
//! pooled features.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::image::random_patch;
use crate::loss::softmax_cross_entropy;
use crate::nn::{ops, Conv2d, LayerGraph, LayerKind, Padding};
use crate::optim::Adam;
use crate::params::{Grads, ParamStore};
use crate::rng::seeded;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifierSpec {
    pub in_channels: usize,
    /// Output width of each conv block; every block halves the resolution.
    pub widths: Vec<usize>,
    pub classes: usize,
}

impl ClassifierSpec {
    pub fn new(classes: usize) -> Self {
        Self {
            in_channels: 3,
            widths: vec![16, 32, 64, 64],
            classes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::config(format!(
                "a classifier needs at least 2 classes, got {}",
                self.classes
            )));
        }
        if self.in_channels == 0 || self.widths.is_empty() || self.widths.contains(&0) {
            return Err(Error::config(
                "classifier widths must be positive and non-empty",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ClassifierCache<T> {
    inputs: Vec<Tensor<T>>,
    activations: Vec<Tensor<T>>,
    pooled: Tensor<T>,
    logits: Tensor<T>,
}

impl<T> ClassifierCache<T> {
    pub fn logits(&self) -> &Tensor<T> {
        &self.logits
    }
}

#[derive(Debug, Clone)]
pub struct ConvClassifier<T> {
    spec: ClassifierSpec,
    blocks: Vec<Conv2d>,
    head: Conv2d,
    graph: LayerGraph,
    pub params: ParamStore<T>,
}

impl<T: Scalar> ConvClassifier<T> {
    /// Random initialization. Conv weights use He scaling, which a stack
    /// without normalization needs to keep activations alive.
    pub fn build<R: Rng + ?Sized>(spec: &ClassifierSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let mut store = ParamStore::new();
        let mut graph = LayerGraph::default();
        let mut blocks = Vec::with_capacity(spec.widths.len());
        let mut in_ch = spec.in_channels;
        let mut input = alloc::string::String::from("input");
        for (i, &w) in spec.widths.iter().enumerate() {
            let name = format!("block{}.conv", i + 1);
            let conv = Conv2d::new(&mut store, &name, in_ch, w, 3, 2, 1, Padding::Zero, rng);
            graph.conv(&name, &conv, &[&input]);
            input = name;
            blocks.push(conv);
            in_ch = w;
        }
        graph.op(
            "pool",
            LayerKind::GlobalAvgPool,
            0,
            1,
            in_ch,
            in_ch,
            &[&input],
        );
        let head = Conv2d::new(
            &mut store,
            "head",
            in_ch,
            spec.classes,
            1,
            1,
            0,
            Padding::Zero,
            rng,
        );
        graph.conv("head", &head, &["pool"]);
        if let Some(l) = graph.layers.last_mut() {
            l.kind = LayerKind::Linear;
        }
        for conv in blocks.iter().chain(core::iter::once(&head)) {
            let fan_in = (conv.in_ch * conv.kernel * conv.kernel) as f64;
            let gain = libm::sqrt(2.0 / fan_in) / crate::nn::conv::INIT_STD;
            for v in store.get_mut(conv.weight) {
                *v *= T::lit(gain);
            }
        }
        Ok(Self {
            spec: spec.clone(),
            blocks,
            head,
            graph,
            params: store,
        })
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn graph(&self) -> &LayerGraph {
        &self.graph
    }

    pub fn classes(&self) -> usize {
        self.spec.classes
    }

    pub fn forward_cached(&self, x: &Tensor<T>) -> Result<ClassifierCache<T>> {
        if x.channels() != self.spec.in_channels || x.batch() == 0 {
            return Err(Error::shape(format!(
                "classifier expects [N≥1, {}, H, W], got {:?}",
                self.spec.in_channels,
                x.shape()
            )));
        }
        let p = &self.params;
        let mut inputs = Vec::with_capacity(self.blocks.len());
        let mut activations = Vec::with_capacity(self.blocks.len());
        let mut cur = x.clone();
        for conv in &self.blocks {
            let y = ops::relu(&conv.forward(p, &cur)?);
            inputs.push(core::mem::replace(&mut cur, y.clone()));
            activations.push(y);
        }
        let pooled = ops::global_avg_pool(&cur);
        let logits = self.head.forward(p, &pooled)?;
        Ok(ClassifierCache {
            inputs,
            activations,
            pooled,
            logits,
        })
    }

    /// `[N, classes, 1, 1]` logits.
    pub fn logits(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        Ok(self.forward_cached(x)?.logits)
    }

    pub fn backward(&self, cache: &ClassifierCache<T>, dlogits: &Tensor<T>, grads: &mut Grads<T>) {
        let p = &self.params;
        let d = self.head.backward(p, grads, &cache.pooled, dlogits);
        let last = cache.activations.last().expect("at least one block");
        let mut d = ops::global_avg_pool_backward(last.shape(), &d);
        for (i, conv) in self.blocks.iter().enumerate().rev() {
            d = ops::relu_backward(&cache.activations[i], &d);
            d = conv.backward(p, grads, &cache.inputs[i], &d);
        }
    }

    /// Arg-max class per sample; ties go to the lowest index.
    pub fn predict_batch(&self, x: &Tensor<T>) -> Result<Vec<usize>> {
        let logits = self.logits(x)?;
        Ok((0..logits.batch())
            .map(|n| {
                let row = logits.sample(n);
                let mut best = 0;
                for (j, v) in row.iter().enumerate() {
                    if *v > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    /// Fraction of each class's images held out for evaluation. A class
    /// with a single image is used for both.
    pub holdout_fraction: f64,
    /// Patch draws per held-out image when training on patches.
    pub eval_draws: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            steps: 300,
            batch_size: 16,
            lr: 0.002,
            seed: 0,
            holdout_fraction: 0.25,
            eval_draws: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub loss_trace: Vec<f64>,
    pub train_counts: Vec<usize>,
    pub held_out_counts: Vec<usize>,
    /// Percent.
    pub held_out_accuracy: f64,
}

type Split<'a, T> = (Vec<(&'a Tensor<T>, usize)>, Vec<(&'a Tensor<T>, usize)>);

fn split_classes<'a, T>(classes: &'a [Vec<Tensor<T>>], fraction: f64) -> Split<'a, T> {
    let mut train = Vec::new();
    let mut held = Vec::new();
    for (label, imgs) in classes.iter().enumerate() {
        if imgs.len() == 1 {
            train.push((&imgs[0], label));
            held.push((&imgs[0], label));
            continue;
        }
        let n_held = (libm::ceil(imgs.len() as f64 * fraction) as usize).clamp(1, imgs.len() - 1);
        let cut = imgs.len() - n_held;
        train.extend(imgs[..cut].iter().map(|t| (t, label)));
        held.extend(imgs[cut..].iter().map(|t| (t, label)));
    }
    (train, held)
}

fn count(items: &[(&Tensor<impl Scalar>, usize)], classes: usize) -> Vec<usize> {
    let mut c = vec![0; classes];
    for &(_, l) in items {
        c[l] += 1;
    }
    c
}

fn view<T: Scalar, R: Rng + ?Sized>(
    img: &Tensor<T>,
    patch: Option<usize>,
    rng: &mut R,
) -> Result<Tensor<T>> {
    match patch {
        Some(p) => Ok(random_patch(img, p, rng)?.0),
        None => Ok(img.clone()),
    }
}

/// Trains `net` on `classes[label]` image lists (`[1, 3, H, W]` each) with
/// Adam and softmax cross-entropy. With `patch` set every training and
/// evaluation view is a random `patch×patch` crop.
pub fn fit<T: Scalar>(
    net: &mut ConvClassifier<T>,
    classes: &[Vec<Tensor<T>>],
    patch: Option<usize>,
    cfg: &FitConfig,
) -> Result<FitReport> {
    if classes.len() != net.classes() {
        return Err(Error::input(format!(
            "{} image classes supplied to a {}-class classifier",
            classes.len(),
            net.classes()
        )));
    }
    if let Some(empty) = classes.iter().position(|c| c.is_empty()) {
        return Err(Error::input(format!("class {empty} has no images")));
    }
    if cfg.batch_size == 0 || cfg.lr <= 0.0 {
        return Err(Error::config("batch_size and lr must be positive"));
    }
    let (train, held) = split_classes(classes, cfg.holdout_fraction);
    let mut rng = seeded(cfg.seed);
    let mut opt = Adam::new(&net.params, 0.9, 0.999);
    let mut grads = net.params.zero_grads();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut cursor = order.len();
    let mut loss_trace = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        let mut batch = Vec::with_capacity(cfg.batch_size);
        let mut labels = Vec::with_capacity(cfg.batch_size);
        for _ in 0..cfg.batch_size {
            if cursor == order.len() {
                order.shuffle(&mut rng);
                cursor = 0;
            }
            let (img, label) = train[order[cursor]];
            cursor += 1;
            batch.push(view(img, patch, &mut rng)?);
            labels.push(label);
        }
        let x = Tensor::stack(&batch)?;
        let cache = net.forward_cached(&x)?;
        let (loss, dlogits) = softmax_cross_entropy(cache.logits(), &labels)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { term: "classifier" });
        }
        grads.clear();
        net.backward(&cache, &dlogits, &mut grads);
        opt.step(&mut net.params, &grads, cfg.lr);
        loss_trace.push(loss);
    }
    let held_out_accuracy = accuracy(net, &held, patch, cfg.eval_draws, cfg.seed ^ 0x5eed)?;
    Ok(FitReport {
        loss_trace,
        train_counts: count(&train, classes.len()),
        held_out_counts: count(&held, classes.len()),
        held_out_accuracy,
    })
}

/// Percent of correct predictions; with `patch` set each image contributes
/// `draws` independent crops.
pub fn accuracy<T: Scalar>(
    net: &ConvClassifier<T>,
    items: &[(&Tensor<T>, usize)],
    patch: Option<usize>,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::input("accuracy over an empty set"));
    }
    let mut rng = seeded(seed);
    let draws = if patch.is_some() { draws.max(1) } else { 1 };
    let mut correct = 0usize;
    let mut total = 0usize;
    for &(img, label) in items {
        let views: Vec<Tensor<T>> = (0..draws)
            .map(|_| view(img, patch, &mut rng))
            .collect::<Result<_>>()?;
        let pred = net.predict_batch(&Tensor::stack(&views)?)?;
        correct += pred.iter().filter(|&&p| p == label).count();
        total += pred.len();
    }
    Ok(100.0 * correct as f64 / total as f64)
}

/// Held-out accuracy of `net` on the same split `fit` would use.
pub fn held_out_accuracy<T: Scalar>(
    net: &ConvClassifier<T>,
    classes: &[Vec<Tensor<T>>],
    patch: Option<usize>,
    cfg: &FitConfig,
) -> Result<f64> {
    let (_, held) = split_classes(classes, cfg.holdout_fraction);
    accuracy(net, &held, patch, cfg.eval_draws, cfg.seed ^ 0x5eed)
}
