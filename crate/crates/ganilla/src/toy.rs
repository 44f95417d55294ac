//! Writes the synthetic toy domains to disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ganilla_core::rng::seeded;
use ganilla_core::synth::{illustration, natural_scene, SCENE_CLASSES};
use rand::seq::SliceRandom;

use crate::dataset::{write_labels, LABELS, SOURCE_TEST, SOURCE_TRAIN, TARGET_TRAIN};
use crate::imageio::write_png;

/// Side length of every synthetic image.
pub const TOY_SIZE: usize = 128;

/// Style id of the `k`-th synthetic illustration style.
pub fn style_id(k: usize) -> String {
    format!("S{k}")
}

fn prepare(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let probe = out.join(".write-probe");
    fs::write(&probe, b"").with_context(|| format!("{} is not writable", out.display()))?;
    fs::remove_file(&probe).ok();
    Ok(())
}

/// Scene classes cycling through all ten, in seeded order.
fn scene_classes(n: usize, rng: &mut ganilla_core::rng::TrainRng) -> Vec<usize> {
    let mut classes: Vec<usize> = (0..n).map(|i| i % SCENE_CLASSES).collect();
    classes.shuffle(rng);
    classes
}

/// `n` natural scenes (the last `n / 4` under `testA/`, the rest under
/// `trainA/`, all labeled in `labels.csv`) and `n` illustrations of style
/// `S0` under `trainB/`.
pub fn synth_toy_domains(seed: u64, n: usize, out: &Path) -> Result<()> {
    if n == 0 {
        bail!("need at least one image per domain");
    }
    prepare(out)?;
    let mut rng = seeded(seed);
    let n_test = n / 4;
    let mut labels = BTreeMap::new();
    for (i, class) in scene_classes(n, &mut rng).into_iter().enumerate() {
        let img = natural_scene(class, TOY_SIZE, &mut rng);
        let sub = if i < n - n_test {
            SOURCE_TRAIN
        } else {
            SOURCE_TEST
        };
        let name = format!("scene_{i:04}.png");
        write_png(&out.join(sub).join(&name), &img)?;
        labels.insert(format!("{sub}/{name}"), class);
    }
    for i in 0..n {
        let img = illustration(0, TOY_SIZE, &mut rng);
        write_png(
            &out.join(TARGET_TRAIN).join(format!("illu_{i:04}.png")),
            &img,
        )?;
    }
    fs::create_dir_all(out.join(SOURCE_TEST))?;
    write_labels(&out.join(LABELS), &labels)
}

pub const STYLES_DIR: &str = "styles";
pub const SCENES_DIR: &str = "scenes";

/// Classifier training sets: `styles/S<k>/` with `per_style` illustrations
/// each, and `scenes/` with `per_scene` natural images of every scene class
/// plus `scenes/labels.csv` (filenames relative to the `scenes` directory).
pub fn synth_eval_sets(
    seed: u64,
    n_styles: usize,
    per_style: usize,
    per_scene: usize,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    if n_styles == 0 || per_style == 0 || per_scene == 0 {
        bail!("eval sets need at least one style, one image per style and per scene");
    }
    prepare(out)?;
    let mut rng = seeded(seed ^ 0xe7a1);
    let mut written = Vec::new();
    for k in 0..n_styles {
        for i in 0..per_style {
            let p = out
                .join(STYLES_DIR)
                .join(style_id(k))
                .join(format!("illu_{i:04}.png"));
            write_png(&p, &illustration(k, TOY_SIZE, &mut rng))?;
            written.push(p);
        }
    }
    let mut labels = BTreeMap::new();
    for i in 0..per_scene * SCENE_CLASSES {
        let class = i % SCENE_CLASSES;
        let name = format!("scene_{i:04}.png");
        let p = out.join(SCENES_DIR).join(&name);
        write_png(&p, &natural_scene(class, TOY_SIZE, &mut rng))?;
        labels.insert(name, class);
        written.push(p);
    }
    write_labels(&out.join(SCENES_DIR).join(LABELS), &labels)?;
    Ok(written)
}
