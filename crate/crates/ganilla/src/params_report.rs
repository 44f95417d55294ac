//! Per-layer parameter tables for the generator variants.

use std::fmt::Write as _;

use anyhow::Result;
use ganilla_core::generator::{GeneratorNet, GeneratorSpec, Variant};
use ganilla_core::rng::seeded;

/// Published generator size, in millions of parameters.
pub const REFERENCE_MILLIONS: f64 = 7.2;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamsSummary {
    pub variant: Variant,
    pub total: usize,
    pub millions: f64,
    /// Signed percent difference from [`REFERENCE_MILLIONS`].
    pub discrepancy_pct: f64,
    pub table: String,
}

pub fn summarize(spec: &GeneratorSpec) -> Result<ParamsSummary> {
    let net = GeneratorNet::<f32>::build(spec, &mut seeded(0))?;
    let total = net.count_parameters();
    let millions = total as f64 / 1e6;
    let discrepancy_pct = 100.0 * (millions - REFERENCE_MILLIONS) / REFERENCE_MILLIONS;
    let mut table = String::new();
    let _ = writeln!(table, "variant {}", spec.variant);
    table.push_str(&net.graph().dump());
    let _ = writeln!(
        table,
        "total {total} parameters = {millions:.3}M (reference {REFERENCE_MILLIONS}M, {discrepancy_pct:+.1}%)"
    );
    Ok(ParamsSummary {
        variant: spec.variant,
        total,
        millions,
        discrepancy_pct,
        table,
    })
}

/// One summary per requested variant, all built from `base` widths.
pub fn report(base: &GeneratorSpec, variants: &[Variant]) -> Result<Vec<ParamsSummary>> {
    variants
        .iter()
        .map(|&variant| {
            summarize(&GeneratorSpec {
                variant,
                ..base.clone()
            })
        })
        .collect()
}
