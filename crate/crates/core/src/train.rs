//! One cycle-consistent adversarial training step over the two
//! generator/discriminator couples.
//!
//! `G` maps source → target and is judged by `D_Y`; `F` maps target →
//! source and is judged by `D_X`. Each step first updates both generators
//! on the joint objective, then each discriminator on real images versus
//! pooled fakes.

use alloc::format;

use crate::discriminator::{DiscriminatorNet, DiscriminatorSpec};
use crate::error::{Error, Result};
use crate::generator::{GeneratorNet, GeneratorSpec};
use crate::image_pool::ImagePool;
use crate::loss::{
    adversarial_loss, l1_loss, total_generator_objective, GanLoss, GeneratorLossParts,
};
use crate::optim::Adam;
use crate::rng::{seeded, TrainRng};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub batch_size: usize,
    pub lambda_cycle: f64,
    pub lambda_identity: f64,
    pub gan_loss: GanLoss,
    pub pool_size: usize,
    pub seed: u64,
    pub decay_start_epoch: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            lr: 0.0002,
            beta1: 0.5,
            beta2: 0.999,
            batch_size: 1,
            lambda_cycle: 10.0,
            lambda_identity: 5.0,
            gan_loss: GanLoss::LeastSquares,
            pool_size: 50,
            seed: 0,
            decay_start_epoch: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1"));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::config("lr must be a positive number"));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::config(format!("{name} must lie in [0, 1)")));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be at least 1"));
        }
        for (name, l) in [
            ("lambda_cycle", self.lambda_cycle),
            ("lambda_identity", self.lambda_identity),
        ] {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::config(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }
}

/// Loss terms of one step. Generator terms are unweighted.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepMetrics {
    pub adv_g: f64,
    pub adv_f: f64,
    pub d_x: f64,
    pub d_y: f64,
    pub cycle_src: f64,
    pub cycle_tgt: f64,
    pub idt_src: f64,
    pub idt_tgt: f64,
}

impl StepMetrics {
    pub fn cycle(&self) -> f64 {
        self.cycle_src + self.cycle_tgt
    }

    pub fn identity(&self) -> f64 {
        self.idt_src + self.idt_tgt
    }

    pub fn generator_parts(&self) -> GeneratorLossParts {
        GeneratorLossParts {
            adv_g: self.adv_g,
            adv_f: self.adv_f,
            cycle_src: self.cycle_src,
            cycle_tgt: self.cycle_tgt,
            idt_src: self.idt_src,
            idt_tgt: self.idt_tgt,
        }
    }
}

fn finite(term: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteLoss { term })
    }
}

fn scaled<T: Scalar>(mut t: Tensor<T>, s: f64) -> Tensor<T> {
    t.scale(T::lit(s));
    t
}

/// Parameters, optimizer moments, pools and rng of a training run.
#[derive(Debug, Clone)]
pub struct TrainState<T> {
    pub config: TrainConfig,
    /// source → target
    pub g: GeneratorNet<T>,
    /// target → source
    pub f: GeneratorNet<T>,
    /// judges target-domain images
    pub d_y: DiscriminatorNet<T>,
    /// judges source-domain images
    pub d_x: DiscriminatorNet<T>,
    pub opt_g: Adam<T>,
    pub opt_f: Adam<T>,
    pub opt_d_y: Adam<T>,
    pub opt_d_x: Adam<T>,
    /// Completed epochs.
    pub epoch: usize,
    /// Completed steps.
    pub step: u64,
    pub pool_x: ImagePool<T>,
    pub pool_y: ImagePool<T>,
    pub rng: TrainRng,
    /// Learning rate applied by the next update.
    pub lr: f64,
}

impl<T: Scalar> TrainState<T> {
    /// Fresh state; networks are initialized from `config.seed` in the order
    /// G, F, D_Y, D_X and the same generator then drives pools and shuffles.
    pub fn new(
        config: TrainConfig,
        gen_spec: &GeneratorSpec,
        disc_spec: &DiscriminatorSpec,
    ) -> Result<Self> {
        config.validate()?;
        let mut rng = seeded(config.seed);
        let g = GeneratorNet::build(gen_spec, &mut rng)?;
        let f = GeneratorNet::build(gen_spec, &mut rng)?;
        let d_y = DiscriminatorNet::build(disc_spec, &mut rng)?;
        let d_x = DiscriminatorNet::build(disc_spec, &mut rng)?;
        let (b1, b2) = (config.beta1, config.beta2);
        Ok(Self {
            opt_g: Adam::new(&g.params, b1, b2),
            opt_f: Adam::new(&f.params, b1, b2),
            opt_d_y: Adam::new(&d_y.params, b1, b2),
            opt_d_x: Adam::new(&d_x.params, b1, b2),
            pool_x: ImagePool::new(config.pool_size),
            pool_y: ImagePool::new(config.pool_size),
            lr: config.lr,
            config,
            g,
            f,
            d_y,
            d_x,
            epoch: 0,
            step: 0,
            rng,
        })
    }

    fn check_pair(&self, x: &Tensor<T>, y: &Tensor<T>) -> Result<()> {
        if x.shape() != y.shape() {
            return Err(Error::shape(format!(
                "source batch {:?} and target batch {:?} differ",
                x.shape(),
                y.shape()
            )));
        }
        self.g.check_input(x)?;
        self.g.check_input(y)
    }

    /// One joint Adam update of G and F. Returns the loss terms and the
    /// fakes `(G(x), F(y))` computed before the update.
    pub fn generator_update(
        &mut self,
        x: &Tensor<T>,
        y: &Tensor<T>,
    ) -> Result<(GeneratorLossParts, Tensor<T>, Tensor<T>)> {
        self.check_pair(x, y)?;
        let cfg = &self.config;
        let (lc, li) = (cfg.lambda_cycle, cfg.lambda_identity);

        let fwd_fake_y = self.g.forward_cached(x)?;
        let fwd_rec_x = self.f.forward_cached(fwd_fake_y.output())?;
        let fwd_fake_x = self.f.forward_cached(y)?;
        let fwd_rec_y = self.g.forward_cached(fwd_fake_x.output())?;

        let mut scratch_dy = self.d_y.params.zero_grads();
        let dy_cache = self.d_y.forward_cached(fwd_fake_y.output())?;
        let (adv_g, dscore) = adversarial_loss(dy_cache.output(), true, cfg.gan_loss);
        let mut d_fake_y = self.d_y.backward(&dy_cache, &dscore, &mut scratch_dy);

        let mut scratch_dx = self.d_x.params.zero_grads();
        let dx_cache = self.d_x.forward_cached(fwd_fake_x.output())?;
        let (adv_f, dscore) = adversarial_loss(dx_cache.output(), true, cfg.gan_loss);
        let mut d_fake_x = self.d_x.backward(&dx_cache, &dscore, &mut scratch_dx);

        let (cycle_src, d_rec_x) = l1_loss(fwd_rec_x.output(), x)?;
        let (cycle_tgt, d_rec_y) = l1_loss(fwd_rec_y.output(), y)?;

        let mut parts = GeneratorLossParts {
            adv_g: finite("adv_G", adv_g)?,
            adv_f: finite("adv_F", adv_f)?,
            cycle_src: finite("cycle_src", cycle_src)?,
            cycle_tgt: finite("cycle_tgt", cycle_tgt)?,
            idt_src: 0.0,
            idt_tgt: 0.0,
        };

        let mut grads_g = self.g.params.zero_grads();
        let mut grads_f = self.f.params.zero_grads();

        d_fake_y.add_assign(
            &self
                .f
                .backward(&fwd_rec_x, &scaled(d_rec_x, lc), &mut grads_f),
        );
        self.g.backward(&fwd_fake_y, &d_fake_y, &mut grads_g);
        d_fake_x.add_assign(
            &self
                .g
                .backward(&fwd_rec_y, &scaled(d_rec_y, lc), &mut grads_g),
        );
        self.f.backward(&fwd_fake_x, &d_fake_x, &mut grads_f);

        if li > 0.0 {
            let fwd_idt_y = self.g.forward_cached(y)?;
            let (idt_tgt, d) = l1_loss(fwd_idt_y.output(), y)?;
            parts.idt_tgt = finite("idt_tgt", idt_tgt)?;
            self.g.backward(&fwd_idt_y, &scaled(d, li), &mut grads_g);

            let fwd_idt_x = self.f.forward_cached(x)?;
            let (idt_src, d) = l1_loss(fwd_idt_x.output(), x)?;
            parts.idt_src = finite("idt_src", idt_src)?;
            self.f.backward(&fwd_idt_x, &scaled(d, li), &mut grads_f);
        }
        finite("generator_total", total_generator_objective(&parts, lc, li))?;

        self.opt_g.step(&mut self.g.params, &grads_g, self.lr);
        self.opt_f.step(&mut self.f.params, &grads_f, self.lr);

        let fake_y = fwd_fake_y.output().clone();
        let fake_x = fwd_fake_x.output().clone();
        Ok((parts, fake_y, fake_x))
    }

    /// Updates `D_Y` on (y, pooled G(x)) and `D_X` on (x, pooled F(y)).
    /// Each discriminator minimizes half the sum of its real and fake terms.
    pub fn discriminator_update(
        &mut self,
        x: &Tensor<T>,
        y: &Tensor<T>,
        fake_x: &Tensor<T>,
        fake_y: &Tensor<T>,
    ) -> Result<(f64, f64)> {
        let kind = self.config.gan_loss;
        let pooled_y = self.pool_y.query(fake_y, &mut self.rng)?;
        let pooled_x = self.pool_x.query(fake_x, &mut self.rng)?;

        let step = |d: &DiscriminatorNet<T>, real: &Tensor<T>, fake: &Tensor<T>, term| {
            let mut grads = d.params.zero_grads();
            let c = d.forward_cached(real)?;
            let (l_real, g) = adversarial_loss(c.output(), true, kind);
            d.backward(&c, &scaled(g, 0.5), &mut grads);
            let c = d.forward_cached(fake)?;
            let (l_fake, g) = adversarial_loss(c.output(), false, kind);
            d.backward(&c, &scaled(g, 0.5), &mut grads);
            finite(term, 0.5 * (l_real + l_fake)).map(|l| (l, grads))
        };
        let (d_y, grads_y) = step(&self.d_y, y, &pooled_y, "D_Y")?;
        let (d_x, grads_x) = step(&self.d_x, x, &pooled_x, "D_X")?;
        self.opt_d_y.step(&mut self.d_y.params, &grads_y, self.lr);
        self.opt_d_x.step(&mut self.d_x.params, &grads_x, self.lr);
        Ok((d_x, d_y))
    }

    /// Generator update followed by both discriminator updates.
    pub fn train_step(&mut self, x: &Tensor<T>, y: &Tensor<T>) -> Result<StepMetrics> {
        let (parts, fake_y, fake_x) = self.generator_update(x, y)?;
        let (d_x, d_y) = self.discriminator_update(x, y, &fake_x, &fake_y)?;
        self.step += 1;
        Ok(StepMetrics {
            adv_g: parts.adv_g,
            adv_f: parts.adv_f,
            d_x,
            d_y,
            cycle_src: parts.cycle_src,
            cycle_tgt: parts.cycle_tgt,
            idt_src: parts.idt_src,
            idt_tgt: parts.idt_tgt,
        })
    }
}
