//! Applies a trained source→target generator to a directory of images.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ganilla_core::generator::GeneratorNet;
use ganilla_core::image::to_raw;
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::dataset::{list_images, load_tensor, read_labels, relative_key, LABELS};
use crate::imageio::write_png;
use crate::trainer::checkpoint_config;

pub const MANIFEST: &str = "manifest.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    /// Relative to the manifest's directory.
    pub filename: String,
    pub source_filename: String,
    pub scene_class_id: Option<usize>,
    pub target_style_id: String,
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    rdr.deserialize()
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad manifest {}", path.display()))
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Scene labels for the inputs: an explicit `labels.csv` (keys relative to
/// its own directory) or, failing that, `labels.csv` next to `input_dir`.
fn input_labels(
    input_dir: &Path,
    labels: Option<&Path>,
) -> Result<Option<(PathBuf, BTreeMap<String, usize>)>> {
    let path = match labels {
        Some(p) => p.to_path_buf(),
        None => match input_dir.parent() {
            Some(parent) if parent.join(LABELS).is_file() => parent.join(LABELS),
            _ => return Ok(None),
        },
    };
    let root = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok(Some((root, read_labels(&path)?)))
}

pub fn translate_dir(
    checkpoint: &Path,
    input_dir: &Path,
    output_dir: &Path,
    labels: Option<&Path>,
) -> Result<Vec<ManifestRow>> {
    if !checkpoint.is_file() {
        bail!("checkpoint {} not found", checkpoint.display());
    }
    let ck = Checkpoint::load(checkpoint)?;
    let cfg = checkpoint_config(&ck)?;
    let mut g = GeneratorNet::<f32>::build(&cfg.generator, &mut ganilla_core::rng::seeded(0))?;
    ck.fill_store("G", &mut g.params)?;

    let inputs = list_images(input_dir)?;
    if inputs.is_empty() {
        bail!("no images in {}", input_dir.display());
    }
    let labels = input_labels(input_dir, labels)?;
    let mut stems = BTreeSet::new();
    fs::create_dir_all(output_dir)
        .with_context(|| format!("cannot create {}", output_dir.display()))?;
    let mut rows = Vec::with_capacity(inputs.len());
    for path in &inputs {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !stems.insert(stem.clone()) {
            bail!("two inputs share the output name {stem}.png");
        }
        let x = load_tensor(path, cfg.load_size)?;
        let y = g
            .forward(&x)
            .with_context(|| format!("cannot translate {}", path.display()))?;
        let filename = format!("{stem}.png");
        write_png(&output_dir.join(&filename), &to_raw(&y, 0)?)?;
        let scene_class_id = labels
            .as_ref()
            .and_then(|(root, map)| map.get(&relative_key(root, path)).copied());
        rows.push(ManifestRow {
            filename,
            source_filename: relative_key(input_dir, path),
            scene_class_id,
            target_style_id: cfg.style_id.clone(),
        });
    }
    write_manifest(&output_dir.join(MANIFEST), &rows)?;
    log::info!(
        "translated {} images into {}",
        rows.len(),
        output_dir.display()
    );
    Ok(rows)
}
