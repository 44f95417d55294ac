//! Unpaired two-domain datasets on disk.
//!
//! ```text
//! root/
//!   trainA/   source-domain training images (natural)
//!   trainB/   target-domain training images (illustrations)
//!   testA/    source-domain inputs for translation
//!   labels.csv  optional: filename,class_id with filename relative to root
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ganilla_core::image::preprocess;
use ganilla_core::Tensor;
use serde::{Deserialize, Serialize};

use crate::imageio::{is_image, read_image, EXTENSIONS};

pub const SOURCE_TRAIN: &str = "trainA";
pub const TARGET_TRAIN: &str = "trainB";
pub const SOURCE_TEST: &str = "testA";
pub const LABELS: &str = "labels.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPair {
    pub root: PathBuf,
    pub source_train: Vec<PathBuf>,
    pub target_train: Vec<PathBuf>,
    pub source_test: Vec<PathBuf>,
    /// Scene class per source image, keyed by `dir/file` relative to root.
    pub source_labels: BTreeMap<String, usize>,
    pub target_style_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelRow {
    pub filename: String,
    pub class_id: usize,
}

/// Sorted image files directly inside `dir`, one per file stem. When a stem
/// appears under several extensions (`a.png`, `a.jpg`) the extension listed
/// first in [`EXTENSIONS`] wins.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        bail!("missing directory {}", dir.display());
    }
    let mut by_stem: BTreeMap<String, PathBuf> = BTreeMap::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry
            .with_context(|| format!("cannot list {}", dir.display()))?
            .path();
        if !(path.is_file() && is_image(&path)) {
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match by_stem.get(&stem) {
            Some(kept) if extension_rank(kept) <= extension_rank(&path) => {
                log::warn!("{} duplicates {}; skipped", path.display(), kept.display());
            }
            Some(kept) => {
                log::warn!("{} duplicates {}; skipped", kept.display(), path.display());
                by_stem.insert(stem, path);
            }
            None => {
                by_stem.insert(stem, path);
            }
        }
    }
    let mut out: Vec<PathBuf> = by_stem.into_values().collect();
    out.sort();
    Ok(out)
}

fn extension_rank(path: &Path) -> (usize, String) {
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_default();
    let lower = ext.to_ascii_lowercase();
    let rank = EXTENSIONS
        .iter()
        .position(|e| *e == lower)
        .unwrap_or(EXTENSIONS.len());
    (rank, ext)
}

/// `dir/file` key of `path` relative to `root`, always with `/`.
pub fn relative_key(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn read_labels(path: &Path) -> Result<BTreeMap<String, usize>> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, row) in rdr.deserialize::<LabelRow>().enumerate() {
        let row = row.with_context(|| format!("{}: bad row {}", path.display(), i + 2))?;
        if out.insert(row.filename.clone(), row.class_id).is_some() {
            bail!("{}: {} labeled twice", path.display(), row.filename);
        }
    }
    Ok(out)
}

pub fn write_labels(path: &Path, labels: &BTreeMap<String, usize>) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for (filename, &class_id) in labels {
        w.serialize(LabelRow {
            filename: filename.clone(),
            class_id,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_unpaired_dataset(root: &Path, style_id: &str) -> Result<DomainPair> {
    if style_id.trim().is_empty() {
        bail!("target style id must be non-empty");
    }
    let mut lists = Vec::new();
    for sub in [SOURCE_TRAIN, TARGET_TRAIN, SOURCE_TEST] {
        let dir = root.join(sub);
        let files = list_images(&dir)?;
        if files.is_empty() && sub != SOURCE_TEST {
            bail!("no images in {}", dir.display());
        }
        for f in &files {
            fs::File::open(f).with_context(|| format!("unreadable file {}", f.display()))?;
        }
        lists.push(files);
    }
    let source_test = lists.pop().unwrap_or_default();
    let target_train = lists.pop().unwrap_or_default();
    let source_train = lists.pop().unwrap_or_default();

    let labels_path = root.join(LABELS);
    let source_labels = if labels_path.is_file() {
        let labels = read_labels(&labels_path)?;
        let known: std::collections::BTreeSet<String> = source_train
            .iter()
            .chain(&source_test)
            .map(|p| relative_key(root, p))
            .collect();
        if let Some(missing) = labels.keys().find(|k| !known.contains(*k)) {
            bail!(
                "{}: {missing} is not an image under {SOURCE_TRAIN}/ or {SOURCE_TEST}/",
                labels_path.display()
            );
        }
        labels
    } else {
        BTreeMap::new()
    };
    Ok(DomainPair {
        root: root.to_path_buf(),
        source_train,
        target_train,
        source_test,
        source_labels,
        target_style_id: style_id.to_string(),
    })
}

impl DomainPair {
    pub fn label_of(&self, path: &Path) -> Option<usize> {
        self.source_labels
            .get(&relative_key(&self.root, path))
            .copied()
    }
}

pub fn load_tensor(path: &Path, size: usize) -> Result<Tensor<f32>> {
    let raw = read_image(path)?;
    preprocess(&raw, size).with_context(|| format!("cannot preprocess {}", path.display()))
}
