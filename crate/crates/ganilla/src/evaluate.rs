//! Classifier training from image folders, scoring of translated images and
//! report tables.
//!
//! Classifier training data:
//! ```text
//! root/styles/<style_id>/*.png   illustrations of each style
//! root/scenes/*.png              natural images
//! root/scenes/labels.csv         filename,class_id (filenames relative to scenes/)
//! ```
//! The style classifier's last class is "natural" (all scene images); the
//! content classifier's last class is the negative "illustration" class
//! (all style images).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use ganilla_core::classifier::{ClassifierSpec, ConvClassifier, FitReport};
use ganilla_core::eval::{
    content_score, report_with_average, style_score, train_content_classifier,
    train_style_classifier, ContentClassifierSpec, EvalReport, Generated, StyleClassifierSpec,
};
use ganilla_core::rng::seeded;
use ganilla_core::Tensor;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::dataset::{list_images, load_tensor, read_labels, LABELS};
use crate::translate::read_manifest;

pub const STYLE_KIND: &str = "style-classifier";
pub const CONTENT_KIND: &str = "content-classifier";
pub const STYLE_FILE: &str = "style.clf";
pub const CONTENT_FILE: &str = "content.clf";
pub const SUMMARY_FILE: &str = "classifiers.json";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_TXT: &str = "report.txt";

/// A trained classifier with everything needed to apply it.
#[derive(Debug, Clone)]
pub struct LoadedClassifier {
    pub kind: String,
    pub net: ConvClassifier<f32>,
    /// Input side length.
    pub size: usize,
    /// Style ids in class order (style classifier only).
    pub style_ids: Vec<String>,
    pub patch: usize,
    pub held_out_accuracy: f64,
}

impl LoadedClassifier {
    fn to_checkpoint(&self) -> Checkpoint {
        let spec = self.net.spec();
        let mut ck = Checkpoint::new(
            &self.kind,
            json!({
                "in_channels": spec.in_channels,
                "widths": spec.widths,
                "classes": spec.classes,
                "size": self.size,
                "style_ids": self.style_ids,
                "patch": self.patch,
                "held_out_accuracy": self.held_out_accuracy,
            }),
        );
        ck.push_store("C", &self.net.params);
        ck
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_checkpoint().save(path)
    }

    pub fn load(path: &Path, kind: &str) -> Result<Self> {
        let ck = Checkpoint::load(path)?;
        ck.expect_kind(kind)
            .with_context(|| format!("{}", path.display()))?;
        let meta = |k: &str| {
            ck.meta
                .get(k)
                .cloned()
                .ok_or_else(|| anyhow!("{}: metadata lacks `{k}`", path.display()))
        };
        let spec = ClassifierSpec {
            in_channels: serde_json::from_value(meta("in_channels")?)?,
            widths: serde_json::from_value(meta("widths")?)?,
            classes: serde_json::from_value(meta("classes")?)?,
        };
        let mut net = ConvClassifier::build(&spec, &mut seeded(0))?;
        ck.fill_store("C", &mut net.params)?;
        Ok(Self {
            kind: kind.to_string(),
            net,
            size: serde_json::from_value(meta("size")?)?,
            style_ids: serde_json::from_value(meta("style_ids")?)?,
            patch: serde_json::from_value(meta("patch")?)?,
            held_out_accuracy: serde_json::from_value(meta("held_out_accuracy")?)?,
        })
    }
}

/// Images of the classifier training tree, resized to `size`.
#[derive(Debug, Clone)]
pub struct EvalSets {
    pub style_ids: Vec<String>,
    pub styles: Vec<Vec<Tensor<f32>>>,
    /// Indexed by scene class.
    pub scenes: Vec<Vec<Tensor<f32>>>,
}

impl EvalSets {
    /// All scene images, round-robin over scene classes so that any tail
    /// slice (the held-out split) covers every class.
    pub fn natural(&self) -> Vec<Tensor<f32>> {
        let longest = self.scenes.iter().map(Vec::len).max().unwrap_or(0);
        (0..longest)
            .flat_map(|i| self.scenes.iter().filter_map(move |c| c.get(i)))
            .cloned()
            .collect()
    }

    pub fn illustrations(&self) -> Vec<Tensor<f32>> {
        self.styles.iter().flatten().cloned().collect()
    }
}

pub fn load_eval_sets(root: &Path, size: usize) -> Result<EvalSets> {
    let styles_dir = root.join(crate::toy::STYLES_DIR);
    let mut style_dirs: Vec<PathBuf> = fs::read_dir(&styles_dir)
        .with_context(|| format!("missing directory {}", styles_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    style_dirs.sort();
    if style_dirs.is_empty() {
        bail!("no style folders in {}", styles_dir.display());
    }
    let mut style_ids = Vec::new();
    let mut styles = Vec::new();
    for dir in &style_dirs {
        let files = list_images(dir)?;
        if files.is_empty() {
            bail!("no images in {}", dir.display());
        }
        style_ids.push(
            dir.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned(),
        );
        styles.push(
            files
                .iter()
                .map(|p| load_tensor(p, size))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let scenes_dir = root.join(crate::toy::SCENES_DIR);
    let labels = read_labels(&scenes_dir.join(LABELS))?;
    let n_scenes = labels.values().max().map_or(0, |m| m + 1);
    let mut scenes = vec![Vec::new(); n_scenes];
    for (name, &class) in &labels {
        scenes[class].push(load_tensor(&scenes_dir.join(name), size)?);
    }
    if let Some(empty) = scenes.iter().position(Vec::is_empty) {
        bail!(
            "scene class {empty} has no images in {}",
            scenes_dir.display()
        );
    }
    Ok(EvalSets {
        style_ids,
        styles,
        scenes,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub style_ids: Vec<String>,
    pub n_scenes: usize,
    pub style_held_out_accuracy: f64,
    pub content_held_out_accuracy: f64,
    pub style_train_images: usize,
    pub content_train_images: usize,
}

fn train_images(r: &FitReport) -> usize {
    r.train_counts.iter().sum()
}

/// Trains both classifiers on `sets` and writes them to `out_dir`.
pub fn train_classifiers(
    cfg: &RunConfig,
    sets: &EvalSets,
    out_dir: &Path,
) -> Result<(LoadedClassifier, LoadedClassifier, ClassifierSummary)> {
    cfg.validate()?;
    let e = &cfg.eval;
    let fit = e.fit_config();
    let n_styles = sets.styles.len();
    let style_spec = StyleClassifierSpec {
        n_styles,
        patch: e.style_patch,
        backbone: cfg.classifier_spec(n_styles + 1),
    };
    ensure!(
        e.style_patch <= e.clf_size,
        "style_patch {} exceeds clf_size {}",
        e.style_patch,
        e.clf_size
    );
    let (style_net, style_rep) =
        train_style_classifier(&sets.styles, &sets.natural(), &style_spec, &fit)?;
    log::info!(
        "style classifier: {} classes, held-out patch accuracy {:.1}%",
        n_styles + 1,
        style_rep.held_out_accuracy
    );
    let n_scenes = sets.scenes.len();
    let content_spec = ContentClassifierSpec {
        n_scenes,
        backbone: cfg.classifier_spec(n_scenes + 1),
    };
    let (content_net, content_rep) =
        train_content_classifier(&sets.scenes, &sets.illustrations(), &content_spec, &fit)?;
    log::info!(
        "content classifier: {} classes, held-out accuracy {:.1}%",
        n_scenes + 1,
        content_rep.held_out_accuracy
    );
    let style = LoadedClassifier {
        kind: STYLE_KIND.into(),
        net: style_net,
        size: e.clf_size,
        style_ids: sets.style_ids.clone(),
        patch: e.style_patch,
        held_out_accuracy: style_rep.held_out_accuracy,
    };
    let content = LoadedClassifier {
        kind: CONTENT_KIND.into(),
        net: content_net,
        size: e.clf_size,
        style_ids: Vec::new(),
        patch: 0,
        held_out_accuracy: content_rep.held_out_accuracy,
    };
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    style.save(&out_dir.join(STYLE_FILE))?;
    content.save(&out_dir.join(CONTENT_FILE))?;
    let summary = ClassifierSummary {
        style_ids: sets.style_ids.clone(),
        n_scenes,
        style_held_out_accuracy: style_rep.held_out_accuracy,
        content_held_out_accuracy: content_rep.held_out_accuracy,
        style_train_images: train_images(&style_rep),
        content_train_images: train_images(&content_rep),
    };
    fs::write(
        out_dir.join(SUMMARY_FILE),
        serde_json::to_string_pretty(&summary)?,
    )?;
    Ok((style, content, summary))
}

/// One report row per target style found in the manifests.
pub fn score_manifests(
    cfg: &RunConfig,
    style: &LoadedClassifier,
    content: &LoadedClassifier,
    manifests: &[PathBuf],
) -> Result<Vec<EvalReport>> {
    if manifests.is_empty() {
        bail!("no manifest given");
    }
    let n_scenes = content.net.classes() - 1;
    ensure!(
        style.net.classes() == style.style_ids.len() + 1,
        "style classifier has {} classes for {} style ids",
        style.net.classes(),
        style.style_ids.len()
    );
    let mut by_style: BTreeMap<String, Vec<Generated>> = BTreeMap::new();
    for m in manifests {
        let dir = m.parent().unwrap_or(Path::new("."));
        for row in read_manifest(m)? {
            if let Some(c) = row.scene_class_id {
                if c >= n_scenes {
                    bail!(
                        "{}: {} has scene class {c}, the content classifier knows {n_scenes}",
                        m.display(),
                        row.filename
                    );
                }
            }
            let image = load_tensor(&dir.join(&row.filename), content.size)?;
            by_style
                .entry(row.target_style_id.clone())
                .or_default()
                .push(Generated {
                    name: row.filename,
                    image,
                    scene: row.scene_class_id,
                });
        }
    }
    let mut rows = Vec::new();
    for (style_id, images) in &by_style {
        let target = style
            .style_ids
            .iter()
            .position(|s| s == style_id)
            .ok_or_else(|| {
                anyhow!(
                    "style {style_id} is not one of the style classifier's classes ({})",
                    style.style_ids.join(", ")
                )
            })?;
        let resized = resize_for(images, style.size)?;
        let s = style_score(
            &resized,
            &style.net,
            target,
            style.patch,
            cfg.eval.patches_per_image,
        )?;
        let c = content_score(images, &content.net, n_scenes, cfg.eval.content_rule)?;
        rows.push(EvalReport::new(style_id.clone(), c, s)?);
    }
    Ok(rows)
}

fn resize_for(images: &[Generated], size: usize) -> Result<Vec<Generated>> {
    images
        .iter()
        .map(|g| {
            if g.image.height() == size && g.image.width() == size {
                return Ok(g.clone());
            }
            let raw = ganilla_core::image::to_raw(&g.image, 0)?;
            Ok(Generated {
                image: ganilla_core::image::preprocess(&raw, size)?,
                ..g.clone()
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct ReportRow<'a> {
    style: &'a str,
    content_acc: String,
    style_acc: String,
    #[serde(rename = "final")]
    final_: String,
}

/// Writes `report.csv` and `report.txt` (per-style rows plus `Avg`).
pub fn emit_report(rows: &[EvalReport], out_dir: &Path) -> Result<Vec<EvalReport>> {
    let all = report_with_average(rows)?;
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut w = csv::Writer::from_path(out_dir.join(REPORT_CSV))?;
    for r in &all {
        w.serialize(ReportRow {
            style: &r.style_id,
            content_acc: format!("{:.2}", r.content_acc),
            style_acc: format!("{:.2}", r.style_acc),
            final_: format!("{:.1}", r.final_score),
        })?;
    }
    w.flush()?;
    fs::write(out_dir.join(REPORT_TXT), text_table(&all))?;
    Ok(all)
}

pub fn text_table(rows: &[EvalReport]) -> String {
    let width = rows
        .iter()
        .map(|r| r.style_id.len())
        .chain([5])
        .max()
        .unwrap_or(5);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<width$}  {:>11}  {:>9}  {:>9}",
        "Style", "Content (%)", "Style (%)", "Final (%)"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<width$}  {:>11.2}  {:>9.2}  {:>9.1}",
            r.style_id, r.content_acc, r.style_acc, r.final_score
        );
    }
    s
}
