#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use ganilla::config::RunConfig;
use ganilla::imageio::write_png;
use ganilla_core::image::RawImage;

/// Narrow networks at 64px: every test run finishes in seconds.
pub fn tiny_config(epochs: usize) -> RunConfig {
    let mut cfg = RunConfig::default();
    for kv in [
        "load_size=64",
        "stem_width=8",
        "layer_widths=8,8,8,8",
        "fpn_width=8",
        "disc_base_width=8",
        "seed=11",
    ] {
        cfg.apply_override(kv).unwrap();
    }
    cfg.train.epochs = epochs;
    cfg
}

/// Overrides matching [`tiny_config`], for the binary.
pub const TINY_ARGS: &[&str] = &[
    "--set",
    "load_size=64",
    "--set",
    "stem_width=8",
    "--set",
    "layer_widths=8,8,8,8",
    "--set",
    "fpn_width=8",
    "--set",
    "disc_base_width=8",
];

pub fn constant_png(path: &Path, size: usize, rgb: [u8; 3]) {
    write_png(path, &RawImage::from_fn(size, size, |_, _| rgb)).unwrap();
}

/// Every file under `dir`, relative path and bytes, sorted.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}
