use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::params::{Grads, Init, ParamId, ParamStore};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

pub const EPS: f64 = 1e-5;

/// Per-sample, per-channel normalization with learned scale and shift.
/// No running statistics: training and inference compute the same thing.
#[derive(Debug, Clone)]
pub struct InstanceNorm {
    pub gamma: ParamId,
    pub beta: ParamId,
    pub channels: usize,
}

#[derive(Debug, Clone)]
pub struct NormCache<T> {
    xhat: Tensor<T>,
    inv_std: Vec<T>,
}

impl InstanceNorm {
    pub fn new<T: Scalar, R: Rng + ?Sized>(
        store: &mut ParamStore<T>,
        name: &str,
        channels: usize,
        rng: &mut R,
    ) -> Self {
        let gamma = store.add(format!("{name}.weight"), vec![channels], Init::Ones, rng);
        let beta = store.add(format!("{name}.bias"), vec![channels], Init::Zeros, rng);
        Self {
            gamma,
            beta,
            channels,
        }
    }

    pub fn param_count(&self) -> usize {
        2 * self.channels
    }

    pub fn forward<T: Scalar>(
        &self,
        store: &ParamStore<T>,
        x: &Tensor<T>,
    ) -> (Tensor<T>, NormCache<T>) {
        let [n, c, h, w] = x.shape();
        debug_assert_eq!(c, self.channels);
        let hw = h * w;
        let inv_hw = T::lit(1.0 / hw as f64);
        let eps = T::lit(EPS);
        let gamma = store.get(self.gamma);
        let beta = store.get(self.beta);
        let mut xhat = x.clone();
        let mut y = Tensor::zeros(x.shape());
        let mut inv_std = Vec::with_capacity(n * c);
        for (plane_idx, (xh, yp)) in xhat
            .data_mut()
            .chunks_exact_mut(hw)
            .zip(y.data_mut().chunks_exact_mut(hw))
            .enumerate()
        {
            let ch = plane_idx % c;
            let mean = xh.iter().copied().sum::<T>() * inv_hw;
            let var = xh.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() * inv_hw;
            let istd = T::one() / (var + eps).sqrt();
            inv_std.push(istd);
            for (v, o) in xh.iter_mut().zip(yp.iter_mut()) {
                *v = (*v - mean) * istd;
                *o = gamma[ch] * *v + beta[ch];
            }
        }
        (y, NormCache { xhat, inv_std })
    }

    pub fn backward<T: Scalar>(
        &self,
        store: &ParamStore<T>,
        grads: &mut Grads<T>,
        cache: &NormCache<T>,
        dy: &Tensor<T>,
    ) -> Tensor<T> {
        let [_, c, h, w] = dy.shape();
        let hw = h * w;
        let inv_hw = T::lit(1.0 / hw as f64);
        let gamma = store.get(self.gamma);
        let mut dgamma = vec![T::zero(); c];
        let mut dbeta = vec![T::zero(); c];
        let mut dx = Tensor::zeros(dy.shape());
        for (plane_idx, ((dyp, xh), dxp)) in dy
            .data()
            .chunks_exact(hw)
            .zip(cache.xhat.data().chunks_exact(hw))
            .zip(dx.data_mut().chunks_exact_mut(hw))
            .enumerate()
        {
            let ch = plane_idx % c;
            let mut sum_dy = T::zero();
            let mut sum_dy_xhat = T::zero();
            for (&g, &xv) in dyp.iter().zip(xh) {
                sum_dy += g;
                sum_dy_xhat += g * xv;
            }
            dgamma[ch] += sum_dy_xhat;
            dbeta[ch] += sum_dy;
            // dx = γ/σ · (dy − mean(dy) − x̂·mean(dy·x̂))
            let scale = gamma[ch] * cache.inv_std[plane_idx];
            let m_dy = sum_dy * inv_hw;
            let m_dyx = sum_dy_xhat * inv_hw;
            for ((o, &g), &xv) in dxp.iter_mut().zip(dyp).zip(xh) {
                *o = scale * (g - m_dy - xv * m_dyx);
            }
        }
        for (a, b) in grads.get_mut(self.gamma).iter_mut().zip(dgamma) {
            *a += b;
        }
        for (a, b) in grads.get_mut(self.beta).iter_mut().zip(dbeta) {
            *a += b;
        }
        dx
    }
}
