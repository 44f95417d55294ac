//! Training objectives. Each loss returns its value together with the
//! gradient with respect to its first argument.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GanLoss {
    /// `mean((s − t)²)`
    LeastSquares,
    /// Binary cross-entropy with the raw scores as logits.
    CrossEntropy,
}

impl GanLoss {
    pub fn as_str(self) -> &'static str {
        match self {
            GanLoss::LeastSquares => "least_squares",
            GanLoss::CrossEntropy => "cross_entropy",
        }
    }
}

impl fmt::Display for GanLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GanLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "least_squares" => Ok(GanLoss::LeastSquares),
            "cross_entropy" => Ok(GanLoss::CrossEntropy),
            _ => Err(Error::config(format!(
                "unknown gan_loss `{s}` (expected least_squares or cross_entropy)"
            ))),
        }
    }
}

/// Adversarial loss of a patch score map against an all-real (`t = 1`) or
/// all-fake (`t = 0`) target.
pub fn adversarial_loss<T: Scalar>(
    scores: &Tensor<T>,
    target_is_real: bool,
    kind: GanLoss,
) -> (f64, Tensor<T>) {
    let n = scores.len() as f64;
    let t = if target_is_real { 1.0 } else { 0.0 };
    let mut grad = Tensor::zeros(scores.shape());
    let mut total = 0.0;
    for (g, &s) in grad.data_mut().iter_mut().zip(scores.data()) {
        let s = s.as_f64();
        let (l, d) = match kind {
            GanLoss::LeastSquares => ((s - t) * (s - t), 2.0 * (s - t)),
            GanLoss::CrossEntropy => {
                // max(s, 0) − s·t + ln(1 + e^{−|s|}), stable for large |s|
                let l = s.max(0.0) - s * t + libm::log1p(libm::exp(-s.abs()));
                let sig = 1.0 / (1.0 + libm::exp(-s));
                (l, sig - t)
            }
        };
        total += l;
        *g = T::lit(d / n);
    }
    (total / n, grad)
}

/// Mean absolute difference and its gradient with respect to `a`.
pub fn l1_loss<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<(f64, Tensor<T>)> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!(
            "L1 operands differ in shape: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let n = a.len() as f64;
    let inv = T::lit(1.0 / n);
    let mut grad = Tensor::zeros(a.shape());
    let mut total = 0.0;
    for ((g, &x), &y) in grad.data_mut().iter_mut().zip(a.data()).zip(b.data()) {
        let d = x - y;
        total += d.as_f64().abs();
        *g = if d > T::zero() {
            inv
        } else if d < T::zero() {
            -inv
        } else {
            T::zero()
        };
    }
    Ok((total / n, grad))
}

/// L1 cycle-consistency loss between an image batch and its reconstruction.
pub fn cycle_loss<T: Scalar>(x: &Tensor<T>, reconstructed: &Tensor<T>) -> Result<f64> {
    Ok(l1_loss(reconstructed, x)?.0)
}

/// L1 identity loss between a target-domain batch and the generator's
/// output on it.
pub fn identity_loss<T: Scalar>(y: &Tensor<T>, translated: &Tensor<T>) -> Result<f64> {
    Ok(l1_loss(translated, y)?.0)
}

/// The six loss terms of one generator update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeneratorLossParts {
    pub adv_g: f64,
    pub adv_f: f64,
    pub cycle_src: f64,
    pub cycle_tgt: f64,
    pub idt_src: f64,
    pub idt_tgt: f64,
}

/// `adv_G + adv_F + λ_cyc·(cyc_src + cyc_tgt) + λ_idt·(idt_src + idt_tgt)`.
pub fn total_generator_objective(
    parts: &GeneratorLossParts,
    lambda_cycle: f64,
    lambda_identity: f64,
) -> f64 {
    parts.adv_g
        + parts.adv_f
        + lambda_cycle * (parts.cycle_src + parts.cycle_tgt)
        + lambda_identity * (parts.idt_src + parts.idt_tgt)
}

/// Mean softmax cross-entropy of `[N, K, 1, 1]` logits against class
/// indices, with the gradient with respect to the logits.
pub fn softmax_cross_entropy<T: Scalar>(
    logits: &Tensor<T>,
    labels: &[usize],
) -> Result<(f64, Tensor<T>)> {
    let [n, k, h, w] = logits.shape();
    if h != 1 || w != 1 || labels.len() != n {
        return Err(Error::shape(format!(
            "cross-entropy expects [{}, K, 1, 1] logits, got {:?}",
            labels.len(),
            logits.shape()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::input(format!(
            "label {bad} out of range for {k} classes"
        )));
    }
    let mut grad = Tensor::zeros(logits.shape());
    let mut total = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        let row: Vec<f64> = logits.sample(i).iter().map(|v| v.as_f64()).collect();
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = row.iter().map(|&v| libm::exp(v - max)).collect();
        let z: f64 = exps.iter().sum();
        total += libm::log(z) + max - row[label];
        for (j, g) in grad.sample_mut(i).iter_mut().enumerate() {
            let p = exps[j] / z;
            let t = if j == label { 1.0 } else { 0.0 };
            *g = T::lit((p - t) / n as f64);
        }
    }
    Ok((total / n as f64, grad))
}
