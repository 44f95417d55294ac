//! Versioned binary container for parameters and training state.
//!
//! Layout: the 8-byte magic `GNLACKPT`, a little-endian `u32` format
//! version, a little-endian `u64` header length, the UTF-8 JSON header,
//! then every tensor's `f32` values little-endian in header order.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use ganilla_core::params::ParamStore;
use serde::{Deserialize, Serialize};

pub const MAGIC: &[u8; 8] = b"GNLACKPT";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    kind: String,
    meta: serde_json::Value,
    tensors: Vec<TensorEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub kind: String,
    pub meta: serde_json::Value,
    pub tensors: Vec<(TensorEntry, Vec<f32>)>,
}

impl Checkpoint {
    pub fn new(kind: &str, meta: serde_json::Value) -> Self {
        Self {
            kind: kind.to_string(),
            meta,
            tensors: Vec::new(),
        }
    }

    pub fn push(&mut self, name: String, shape: Vec<usize>, data: Vec<f32>) {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        self.tensors.push((TensorEntry { name, shape }, data));
    }

    pub fn push_store(&mut self, prefix: &str, store: &ParamStore<f32>) {
        for p in store.iter() {
            self.push(
                format!("{prefix}/{}", p.name),
                p.shape.clone(),
                p.data.clone(),
            );
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        let header = Header {
            kind: self.kind.clone(),
            meta: self.meta.clone(),
            tensors: self.tensors.iter().map(|(e, _)| e.clone()).collect(),
        };
        let json = serde_json::to_vec(&header)?;
        // Write to a sibling and rename, so a crash never leaves half a file.
        let tmp = path.with_extension("partial");
        let file =
            fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
        let mut w = BufWriter::new(file);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(json.len() as u64).to_le_bytes())?;
        w.write_all(&json)?;
        for (_, data) in &self.tensors {
            for v in data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.into_inner()
            .map_err(|e| anyhow!("cannot write {}: {}", tmp.display(), e.error()))?
            .sync_all()?;
        fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .with_context(|| format!("cannot read checkpoint {}", path.display()))?;
        Self::from_bytes(&bytes).with_context(|| format!("bad checkpoint {}", path.display()))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        ensure!(
            bytes.len() >= 20 && &bytes[..8] == MAGIC,
            "not a checkpoint file"
        );
        let version = u32::from_le_bytes(bytes[8..12].try_into()?);
        ensure!(
            version == VERSION,
            "unsupported checkpoint version {version}"
        );
        let hlen = u64::from_le_bytes(bytes[12..20].try_into()?) as usize;
        let body = &bytes[20..];
        ensure!(body.len() >= hlen, "truncated header");
        let header: Header = serde_json::from_slice(&body[..hlen])?;
        let mut rest = &body[hlen..];
        let mut tensors = Vec::with_capacity(header.tensors.len());
        for e in header.tensors {
            let n: usize = e.shape.iter().product();
            ensure!(rest.len() >= 4 * n, "truncated data for {}", e.name);
            let data = rest[..4 * n]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            rest = &rest[4 * n..];
            tensors.push((e, data));
        }
        ensure!(rest.is_empty(), "{} trailing bytes", rest.len());
        Ok(Self {
            kind: header.kind,
            meta: header.meta,
            tensors,
        })
    }

    pub fn expect_kind(&self, kind: &str) -> Result<()> {
        if self.kind != kind {
            bail!("expected a {kind} checkpoint, found {}", self.kind);
        }
        Ok(())
    }

    pub fn index(&self) -> HashMap<&str, (&[usize], &[f32])> {
        self.tensors
            .iter()
            .map(|(e, d)| (e.name.as_str(), (e.shape.as_slice(), d.as_slice())))
            .collect()
    }

    /// Copies `prefix/<name>` into every parameter of `store`.
    pub fn fill_store(&self, prefix: &str, store: &mut ParamStore<f32>) -> Result<()> {
        let index = self.index();
        for p in store.iter_mut() {
            let key = format!("{prefix}/{}", p.name);
            let (shape, data) = index
                .get(key.as_str())
                .ok_or_else(|| anyhow!("checkpoint lacks {key}"))?;
            ensure!(
                *shape == p.shape.as_slice(),
                "{key}: checkpoint shape {shape:?}, model shape {:?}",
                p.shape
            );
            p.data.copy_from_slice(data);
        }
        Ok(())
    }

    pub fn meta_str(&self, key: &str) -> Result<&str> {
        self.meta
            .get(key)
            .and_then(|v| v.as_str())
            .ok_or_else(|| anyhow!("checkpoint metadata lacks `{key}`"))
    }

    pub fn meta_u64(&self, key: &str) -> Result<u64> {
        self.meta
            .get(key)
            .and_then(|v| v.as_u64())
            .ok_or_else(|| anyhow!("checkpoint metadata lacks `{key}`"))
    }
}
