//! Style and content scoring of translated images.
//!
//! The style classifier sees small random patches and separates each
//! illustrator style from natural images. The content classifier sees whole
//! images and separates the scene classes from a negative "illustration"
//! class. A method's final score averages the two accuracies.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::classifier::{fit, ClassifierSpec, ConvClassifier, FitConfig, FitReport};
use crate::error::{Error, Result};
use crate::image::random_patch;
use crate::rng::seeded;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

pub const DEFAULT_PATCH: usize = 100;
pub const DEFAULT_PATCHES_PER_IMAGE: usize = 10;

/// Anything that maps a batch of `[N, 3, H, W]` images to class ids.
pub trait Classifier {
    fn num_classes(&self) -> usize;
    fn predict(&self, batch: &Tensor<f32>) -> Result<Vec<usize>>;
}

impl Classifier for ConvClassifier<f32> {
    fn num_classes(&self) -> usize {
        self.classes()
    }

    fn predict(&self, batch: &Tensor<f32>) -> Result<Vec<usize>> {
        self.predict_batch(batch)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StyleClassifierSpec {
    pub n_styles: usize,
    pub patch: usize,
    pub backbone: ClassifierSpec,
}

impl Default for StyleClassifierSpec {
    fn default() -> Self {
        Self::new(10, DEFAULT_PATCH)
    }
}

impl StyleClassifierSpec {
    pub fn new(n_styles: usize, patch: usize) -> Self {
        Self {
            n_styles,
            patch,
            backbone: ClassifierSpec::new(n_styles + 1),
        }
    }

    pub fn classes(&self) -> usize {
        self.n_styles + 1
    }

    /// Index of the natural-image class.
    pub fn natural_class(&self) -> usize {
        self.n_styles
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes() < 2 {
            return Err(Error::config("style classifier needs at least one style"));
        }
        if self.patch == 0 || self.patch > 256 {
            return Err(Error::config(format!(
                "style patch must be in 1..=256, got {}",
                self.patch
            )));
        }
        if self.backbone.classes != self.classes() {
            return Err(Error::config(format!(
                "backbone has {} classes, style classifier needs {}",
                self.backbone.classes,
                self.classes()
            )));
        }
        self.backbone.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentClassifierSpec {
    pub n_scenes: usize,
    pub backbone: ClassifierSpec,
}

impl Default for ContentClassifierSpec {
    fn default() -> Self {
        Self::new(10)
    }
}

impl ContentClassifierSpec {
    pub fn new(n_scenes: usize) -> Self {
        Self {
            n_scenes,
            backbone: ClassifierSpec::new(n_scenes + 1),
        }
    }

    pub fn classes(&self) -> usize {
        self.n_scenes + 1
    }

    /// Index of the negative illustration class.
    pub fn negative_class(&self) -> usize {
        self.n_scenes
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes() < 2 {
            return Err(Error::config(
                "content classifier needs at least one scene class",
            ));
        }
        if self.backbone.classes != self.classes() {
            return Err(Error::config(format!(
                "backbone has {} classes, content classifier needs {}",
                self.backbone.classes,
                self.classes()
            )));
        }
        self.backbone.validate()
    }
}

/// Trains the patch-level style classifier. `style_sets[i]` holds the
/// images of style `i`; natural images form the last class.
pub fn train_style_classifier(
    style_sets: &[Vec<Tensor<f32>>],
    natural: &[Tensor<f32>],
    spec: &StyleClassifierSpec,
    cfg: &FitConfig,
) -> Result<(ConvClassifier<f32>, FitReport)> {
    spec.validate()?;
    if style_sets.len() != spec.n_styles {
        return Err(Error::input(format!(
            "{} style sets for {} styles",
            style_sets.len(),
            spec.n_styles
        )));
    }
    let mut classes: Vec<Vec<Tensor<f32>>> = style_sets.to_vec();
    classes.push(natural.to_vec());
    let mut net = ConvClassifier::build(&spec.backbone, &mut seeded(cfg.seed))?;
    let report = fit(&mut net, &classes, Some(spec.patch), cfg)?;
    Ok((net, report))
}

/// Trains the whole-image content classifier. `scene_sets[i]` holds the
/// images of scene class `i`; `negatives` form the last class.
pub fn train_content_classifier(
    scene_sets: &[Vec<Tensor<f32>>],
    negatives: &[Tensor<f32>],
    spec: &ContentClassifierSpec,
    cfg: &FitConfig,
) -> Result<(ConvClassifier<f32>, FitReport)> {
    spec.validate()?;
    if scene_sets.len() != spec.n_scenes {
        return Err(Error::input(format!(
            "{} scene sets for {} scene classes",
            scene_sets.len(),
            spec.n_scenes
        )));
    }
    let mut classes: Vec<Vec<Tensor<f32>>> = scene_sets.to_vec();
    classes.push(negatives.to_vec());
    let mut net = ConvClassifier::build(&spec.backbone, &mut seeded(cfg.seed))?;
    let report = fit(&mut net, &classes, None, cfg)?;
    Ok((net, report))
}

/// A translated image with the scene label of its source, when known.
#[derive(Debug, Clone)]
pub struct Generated {
    pub name: String,
    pub image: Tensor<f32>,
    pub scene: Option<usize>,
}

/// Patch-sampling seed derived from the image content alone, so a score
/// does not depend on the order images are visited in.
fn content_seed<T: Scalar>(img: &Tensor<T>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in img.data() {
        for b in v.as_f64().to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Most frequent id; ties go to the lowest id.
pub fn majority_vote(votes: &[usize], classes: usize) -> usize {
    let mut counts = vec![0usize; classes.max(1)];
    for &v in votes {
        if v < counts.len() {
            counts[v] += 1;
        }
    }
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Percent of images whose patch-majority prediction is `target_style`.
pub fn style_score<C: Classifier + ?Sized>(
    images: &[Generated],
    classifier: &C,
    target_style: usize,
    patch: usize,
    patches_per_image: usize,
) -> Result<f64> {
    if images.is_empty() {
        return Err(Error::input("style score of an empty image set"));
    }
    if patches_per_image == 0 {
        return Err(Error::config("patches_per_image must be positive"));
    }
    let mut hits = 0usize;
    for g in images {
        let mut rng = seeded(content_seed(&g.image));
        let patches: Vec<Tensor<f32>> = (0..patches_per_image)
            .map(|_| random_patch(&g.image, patch, &mut rng).map(|(p, _)| p))
            .collect::<Result<_>>()?;
        let votes = classifier.predict(&Tensor::stack(&patches)?)?;
        if majority_vote(&votes, classifier.num_classes()) == target_style {
            hits += 1;
        }
    }
    Ok(100.0 * hits as f64 / images.len() as f64)
}

/// What counts as a preserved scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContentRule {
    /// The prediction equals the source scene label.
    #[default]
    CorrectClass,
    /// Any prediction other than the negative class.
    NotNegative,
}

/// Percent of images classified as their source scene. A prediction of the
/// negative class is always wrong.
pub fn content_score<C: Classifier + ?Sized>(
    images: &[Generated],
    classifier: &C,
    negative_class: usize,
    rule: ContentRule,
) -> Result<f64> {
    if images.is_empty() {
        return Err(Error::input("content score of an empty image set"));
    }
    let mut hits = 0usize;
    for g in images {
        let label = g
            .scene
            .ok_or_else(|| Error::input(format!("{} has no scene label", g.name)))?;
        let pred = classifier.predict(&g.image)?[0];
        let ok = match rule {
            ContentRule::CorrectClass => pred == label && pred != negative_class,
            ContentRule::NotNegative => pred != negative_class,
        };
        hits += ok as usize;
    }
    Ok(100.0 * hits as f64 / images.len() as f64)
}

/// Rounds to `decimals` places, sending exact halves to the even neighbour.
/// Values within 1e-9 of a half (in scaled units) count as halves, so
/// decimal inputs such as 68.25 tie regardless of their binary error.
pub fn round_half_even(x: f64, decimals: u32) -> f64 {
    let scale = libm::pow(10.0, decimals as f64);
    let s = x * scale;
    let fl = libm::floor(s);
    let frac = s - fl;
    let r = if (frac - 0.5).abs() < 1e-9 {
        if libm::fmod(fl, 2.0) == 0.0 {
            fl
        } else {
            fl + 1.0
        }
    } else {
        libm::round(s)
    };
    r / scale
}

/// Mean of content and style accuracy, one decimal, halves to even.
pub fn final_score(content_acc: f64, style_acc: f64) -> f64 {
    round_half_even((content_acc + style_acc) / 2.0, 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub style_id: String,
    pub content_acc: f64,
    pub style_acc: f64,
    pub final_score: f64,
}

impl EvalReport {
    pub fn new(style_id: impl Into<String>, content_acc: f64, style_acc: f64) -> Result<Self> {
        let style_id = style_id.into();
        if style_id.is_empty() {
            return Err(Error::input("empty style id"));
        }
        for (name, v) in [("content_acc", content_acc), ("style_acc", style_acc)] {
            if !(0.0..=100.0).contains(&v) {
                return Err(Error::input(format!("{name} {v} outside [0, 100]")));
            }
        }
        Ok(Self {
            style_id,
            content_acc,
            style_acc,
            final_score: final_score(content_acc, style_acc),
        })
    }
}

pub const AVG_ROW: &str = "Avg";

/// Per-style rows followed by an `Avg` row of column means; the Avg final
/// score is computed from those means.
pub fn report_with_average(rows: &[EvalReport]) -> Result<Vec<EvalReport>> {
    if rows.is_empty() {
        return Err(Error::input("no per-style reports"));
    }
    let n = rows.len() as f64;
    let content = rows.iter().map(|r| r.content_acc).sum::<f64>() / n;
    let style = rows.iter().map(|r| r.style_acc).sum::<f64>() / n;
    let mut out = rows.to_vec();
    out.push(EvalReport::new(AVG_ROW, content, style)?);
    Ok(out)
}
