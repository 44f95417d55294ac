use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::nn::{Conv2d, ConvTranspose2d, InstanceNorm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv,
    ConvTranspose,
    InstanceNorm,
    MaxPool,
    Upsample,
    Add,
    Concat,
    GlobalAvgPool,
    Linear,
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            LayerKind::Conv => "conv",
            LayerKind::ConvTranspose => "deconv",
            LayerKind::InstanceNorm => "instnorm",
            LayerKind::MaxPool => "maxpool",
            LayerKind::Upsample => "upsample",
            LayerKind::Add => "add",
            LayerKind::Concat => "concat",
            LayerKind::GlobalAvgPool => "avgpool",
            LayerKind::Linear => "linear",
        })
    }
}

/// One line of a network's structural description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerDesc {
    pub name: String,
    pub kind: LayerKind,
    /// 0 for layers without a spatial kernel.
    pub kernel: usize,
    pub stride: usize,
    pub in_ch: usize,
    pub out_ch: usize,
    pub params: usize,
    /// Names of the layers (or `input`) feeding this one.
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LayerGraph {
    pub layers: Vec<LayerDesc>,
}

impl LayerGraph {
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.params).sum()
    }

    pub fn get(&self, name: &str) -> Option<&LayerDesc> {
        self.layers.iter().find(|l| l.name == name)
    }

    /// Human-readable dump, one layer per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for l in &self.layers {
            let kernel = if l.kernel == 0 {
                "-".to_string()
            } else {
                alloc::format!("{}x{}", l.kernel, l.kernel)
            };
            let _ = writeln!(
                out,
                "{:<30} {:<9} {:>5} s{:<2} {:>4}->{:<4} {:>9}  <- {}",
                l.name,
                l.kind,
                kernel,
                l.stride,
                l.in_ch,
                l.out_ch,
                l.params,
                l.inputs.join(",")
            );
        }
        out
    }

    /// FNV-1a hash of the dump; equal graphs have equal fingerprints.
    pub fn fingerprint(&self) -> u64 {
        self.dump().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    pub(crate) fn push(&mut self, desc: LayerDesc) {
        self.layers.push(desc);
    }

    pub(crate) fn conv(&mut self, name: &str, conv: &Conv2d, inputs: &[&str]) {
        self.push(LayerDesc {
            name: name.to_string(),
            kind: LayerKind::Conv,
            kernel: conv.kernel,
            stride: conv.stride,
            in_ch: conv.in_ch,
            out_ch: conv.out_ch,
            params: conv.param_count(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        });
    }

    pub(crate) fn deconv(&mut self, name: &str, conv: &ConvTranspose2d, inputs: &[&str]) {
        self.push(LayerDesc {
            name: name.to_string(),
            kind: LayerKind::ConvTranspose,
            kernel: conv.kernel,
            stride: conv.stride,
            in_ch: conv.in_ch,
            out_ch: conv.out_ch,
            params: conv.param_count(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        });
    }

    pub(crate) fn norm(&mut self, name: &str, norm: &InstanceNorm, input: &str) {
        self.push(LayerDesc {
            name: name.to_string(),
            kind: LayerKind::InstanceNorm,
            kernel: 0,
            stride: 1,
            in_ch: norm.channels,
            out_ch: norm.channels,
            params: norm.param_count(),
            inputs: alloc::vec![input.to_string()],
        });
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn op(
        &mut self,
        name: &str,
        kind: LayerKind,
        kernel: usize,
        stride: usize,
        in_ch: usize,
        out_ch: usize,
        inputs: &[&str],
    ) {
        self.push(LayerDesc {
            name: name.to_string(),
            kind,
            kernel,
            stride,
            in_ch,
            out_ch,
            params: 0,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        });
    }
}
