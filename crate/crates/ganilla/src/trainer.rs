//! Epoch loop around the core training step: data order, learning-rate
//! schedule, metrics log, checkpoints, sample grids and resumption.
//!
//! Run directory:
//! ```text
//! config.txt              effective configuration
//! metrics.csv             one row per step
//! checkpoints/epoch_NNNN.ckpt, checkpoints/latest.ckpt
//! samples/epoch_NNNN.png  rows of input | G(input) | F(G(input))
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use ganilla_core::image::to_raw;
use ganilla_core::image_pool::ImagePool;
use ganilla_core::optim::Adam;
use ganilla_core::params::ParamStore;
use ganilla_core::rng::RngState;
use ganilla_core::schedule::lr_schedule;
use ganilla_core::train::{StepMetrics, TrainState};
use ganilla_core::Tensor;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::dataset::{load_tensor, DomainPair};
use crate::imageio::{grid, write_png};

pub const TRAIN_KIND: &str = "ganilla-train";
pub const CONFIG_ECHO: &str = "config.txt";
pub const METRICS: &str = "metrics.csv";
pub const CHECKPOINTS: &str = "checkpoints";
pub const LATEST: &str = "latest.ckpt";
pub const SAMPLES: &str = "samples";
const SAMPLE_ROWS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub step: u64,
    pub epoch: usize,
    #[serde(rename = "adv_G")]
    pub adv_g: f64,
    #[serde(rename = "adv_F")]
    pub adv_f: f64,
    #[serde(rename = "d_X")]
    pub d_x: f64,
    #[serde(rename = "d_Y")]
    pub d_y: f64,
    pub cyc: f64,
    pub idt: f64,
    pub lr: f64,
}

impl MetricsRow {
    fn new(step: u64, epoch: usize, m: &StepMetrics, lr: f64) -> Self {
        Self {
            step,
            epoch,
            adv_g: m.adv_g,
            adv_f: m.adv_f,
            d_x: m.d_x,
            d_y: m.d_y,
            cyc: m.cycle(),
            idt: m.identity(),
            lr,
        }
    }

    pub fn values(&self) -> [f64; 7] {
        [
            self.adv_g, self.adv_f, self.d_x, self.d_y, self.cyc, self.idt, self.lr,
        ]
    }
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    rdr.deserialize()
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad metrics file {}", path.display()))
}

fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean cycle term of each epoch, in epoch order.
pub fn epoch_cycle_means(rows: &[MetricsRow]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64, usize)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((e, s, n)) if *e == r.epoch => {
                *s += r.cyc;
                *n += 1;
            }
            _ => out.push((r.epoch, r.cyc, 1)),
        }
    }
    out.into_iter().map(|(e, s, n)| (e, s / n as f64)).collect()
}

pub fn new_state(cfg: &RunConfig) -> Result<TrainState<f32>> {
    Ok(TrainState::new(
        cfg.train.clone(),
        &cfg.generator,
        &cfg.discriminator_spec(),
    )?)
}

const NETS: [&str; 4] = ["G", "F", "D_Y", "D_X"];

fn stores(st: &TrainState<f32>) -> [(&ParamStore<f32>, &Adam<f32>); 4] {
    [
        (&st.g.params, &st.opt_g),
        (&st.f.params, &st.opt_f),
        (&st.d_y.params, &st.opt_d_y),
        (&st.d_x.params, &st.opt_d_x),
    ]
}

pub fn state_checkpoint(cfg: &RunConfig, st: &TrainState<f32>) -> Checkpoint {
    let rng = RngState::capture(&st.rng);
    let adam_t: Vec<u64> = stores(st).iter().map(|(_, o)| o.t).collect();
    let mut ck = Checkpoint::new(
        TRAIN_KIND,
        json!({
            "config": cfg.echo(),
            "epoch": st.epoch,
            "step": st.step,
            "lr": st.lr,
            "adam_t": adam_t,
            "rng_seed": hex::encode(rng.seed),
            "rng_stream": rng.stream,
            "rng_word_pos": rng.word_pos.to_string(),
            "pool_x": st.pool_x.len(),
            "pool_y": st.pool_y.len(),
        }),
    );
    for (name, (store, opt)) in NETS.iter().zip(stores(st)) {
        ck.push_store(name, store);
        for (p, (m, v)) in store.iter().zip(opt.m.iter().zip(&opt.v)) {
            ck.push(
                format!("opt_{name}/m/{}", p.name),
                p.shape.clone(),
                m.clone(),
            );
            ck.push(
                format!("opt_{name}/v/{}", p.name),
                p.shape.clone(),
                v.clone(),
            );
        }
    }
    for (tag, pool) in [("pool_x", &st.pool_x), ("pool_y", &st.pool_y)] {
        for (i, img) in pool.images().iter().enumerate() {
            ck.push(
                format!("{tag}/{i}"),
                img.shape().to_vec(),
                img.data().to_vec(),
            );
        }
    }
    ck
}

/// The configuration echoed into a training checkpoint.
pub fn checkpoint_config(ck: &Checkpoint) -> Result<RunConfig> {
    ck.expect_kind(TRAIN_KIND)?;
    let mut cfg = RunConfig::default();
    cfg.apply_text(ck.meta_str("config")?)?;
    Ok(cfg)
}

pub fn restore_state(cfg: &RunConfig, ck: &Checkpoint) -> Result<TrainState<f32>> {
    ck.expect_kind(TRAIN_KIND)?;
    let mut st = new_state(cfg)?;
    let index = ck.index();
    let adam_t: Vec<u64> = serde_json::from_value(
        ck.meta
            .get("adam_t")
            .cloned()
            .ok_or_else(|| anyhow!("checkpoint metadata lacks `adam_t`"))?,
    )?;
    ensure!(adam_t.len() == 4, "expected four optimizer step counts");
    let parts = [
        (&mut st.g.params, &mut st.opt_g),
        (&mut st.f.params, &mut st.opt_f),
        (&mut st.d_y.params, &mut st.opt_d_y),
        (&mut st.d_x.params, &mut st.opt_d_x),
    ];
    for ((name, (store, opt)), t) in NETS.iter().zip(parts).zip(adam_t) {
        ck.fill_store(name, store)?;
        opt.t = t;
        for (p, (m, v)) in store.iter().zip(opt.m.iter_mut().zip(opt.v.iter_mut())) {
            for (which, dst) in [("m", m), ("v", v)] {
                let key = format!("opt_{name}/{which}/{}", p.name);
                let (_, data) = index
                    .get(key.as_str())
                    .ok_or_else(|| anyhow!("checkpoint lacks {key}"))?;
                ensure!(data.len() == dst.len(), "{key}: length mismatch");
                dst.copy_from_slice(data);
            }
        }
    }
    for (tag, pool) in [("pool_x", &mut st.pool_x), ("pool_y", &mut st.pool_y)] {
        let n = ck.meta_u64(tag)? as usize;
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let key = format!("{tag}/{i}");
            let (shape, data) = index
                .get(key.as_str())
                .ok_or_else(|| anyhow!("checkpoint lacks {key}"))?;
            let shape: [usize; 4] = (*shape)
                .try_into()
                .map_err(|_| anyhow!("{key}: expected a rank-4 image"))?;
            images.push(Tensor::from_vec(shape, data.to_vec())?);
        }
        *pool = ImagePool::from_parts(cfg.train.pool_size, images);
    }
    let seed: [u8; 32] = hex::decode(ck.meta_str("rng_seed")?)?
        .try_into()
        .map_err(|_| anyhow!("rng seed must be 32 bytes"))?;
    st.rng = RngState {
        seed,
        stream: ck.meta_u64("rng_stream")?,
        word_pos: ck.meta_str("rng_word_pos")?.parse()?,
    }
    .restore();
    st.epoch = ck.meta_u64("epoch")? as usize;
    st.step = ck.meta_u64("step")?;
    st.lr = ck
        .meta
        .get("lr")
        .and_then(|v| v.as_f64())
        .ok_or_else(|| anyhow!("checkpoint metadata lacks `lr`"))?;
    Ok(st)
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub run_dir: PathBuf,
    pub state: TrainState<f32>,
    /// Every step of the run so far, including steps before a resume.
    pub metrics: Vec<MetricsRow>,
    /// Checkpoint files written by this invocation.
    pub checkpoints: Vec<PathBuf>,
    /// `false` when `halt_after` stopped the run early.
    pub finished: bool,
}

fn load_batch(paths: &[PathBuf], cfg: &RunConfig, rng: &mut impl Rng) -> Result<Tensor<f32>> {
    let mut imgs = Vec::with_capacity(paths.len());
    for p in paths {
        let t = load_tensor(p, cfg.load_size)?;
        imgs.push(if cfg.flip && rng.random::<bool>() {
            t.flip_horizontal()
        } else {
            t
        });
    }
    Ok(Tensor::stack(&imgs)?)
}

fn write_samples(
    st: &TrainState<f32>,
    cfg: &RunConfig,
    data: &DomainPair,
    path: &Path,
) -> Result<()> {
    let pool = if data.source_test.is_empty() {
        &data.source_train
    } else {
        &data.source_test
    };
    let mut rows = Vec::new();
    for p in pool.iter().take(SAMPLE_ROWS) {
        let x = load_tensor(p, cfg.load_size)?;
        let fake = st.g.forward(&x)?;
        let rec = st.f.forward(&fake)?;
        rows.push(vec![to_raw(&x, 0)?, to_raw(&fake, 0)?, to_raw(&rec, 0)?]);
    }
    match grid(&rows) {
        Some(img) => write_png(path, &img),
        None => Ok(()),
    }
}

fn save_checkpoint(cfg: &RunConfig, st: &TrainState<f32>, run_dir: &Path) -> Result<PathBuf> {
    let dir = run_dir.join(CHECKPOINTS);
    let ck = state_checkpoint(cfg, st);
    let path = dir.join(format!("epoch_{:04}.ckpt", st.epoch));
    ck.save(&path)?;
    ck.save(&dir.join(LATEST))?;
    Ok(path)
}

/// Trains from scratch, or from `resume` when given, until `cfg.train.epochs`
/// or until `cfg.halt_after` epochs have run in this call.
pub fn train_loop(
    cfg: &RunConfig,
    data: &DomainPair,
    run_dir: &Path,
    resume: Option<&Path>,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let pairs = data.source_train.len().min(data.target_train.len());
    if pairs == 0 {
        bail!("both training domains need at least one image");
    }
    let batch = cfg.train.batch_size;
    if batch > pairs {
        bail!("batch_size {batch} exceeds the smaller domain ({pairs} images)");
    }
    fs::create_dir_all(run_dir).with_context(|| format!("cannot create {}", run_dir.display()))?;
    fs::write(run_dir.join(CONFIG_ECHO), cfg.echo())
        .with_context(|| format!("cannot write {}", run_dir.join(CONFIG_ECHO).display()))?;

    let metrics_path = run_dir.join(METRICS);
    let (mut st, mut metrics) = match resume {
        Some(path) => {
            let st = restore_state(cfg, &Checkpoint::load(path)?)?;
            let mut rows = if metrics_path.is_file() {
                read_metrics(&metrics_path)?
            } else {
                Vec::new()
            };
            // Steps logged after the checkpoint are about to be replayed.
            rows.retain(|r| r.step <= st.step);
            (st, rows)
        }
        None => (new_state(cfg)?, Vec::new()),
    };
    write_metrics(&metrics_path, &metrics)?;

    let epochs = cfg.train.epochs;
    let steps_per_epoch = pairs / batch;
    let mut checkpoints = Vec::new();
    let mut ran = 0;
    while st.epoch < epochs {
        let epoch = st.epoch;
        st.lr = lr_schedule(epoch, cfg.train.lr, epochs, cfg.train.decay_start_epoch);
        let mut order_a: Vec<usize> = (0..data.source_train.len()).collect();
        let mut order_b: Vec<usize> = (0..data.target_train.len()).collect();
        order_a.shuffle(&mut st.rng);
        order_b.shuffle(&mut st.rng);
        let first = metrics.len();
        for s in 0..steps_per_epoch {
            let pick = |order: &[usize], list: &[PathBuf]| -> Vec<PathBuf> {
                order[s * batch..(s + 1) * batch]
                    .iter()
                    .map(|&i| list[i].clone())
                    .collect()
            };
            let xa = pick(&order_a, &data.source_train);
            let yb = pick(&order_b, &data.target_train);
            let x = load_batch(&xa, cfg, &mut st.rng)?;
            let y = load_batch(&yb, cfg, &mut st.rng)?;
            let m = st
                .train_step(&x, &y)
                .with_context(|| format!("epoch {} step {}", epoch + 1, st.step + 1))?;
            metrics.push(MetricsRow::new(st.step, epoch + 1, &m, st.lr));
        }
        st.epoch += 1;
        ran += 1;
        write_metrics(&metrics_path, &metrics)?;
        let cyc = metrics[first..].iter().map(|r| r.cyc).sum::<f64>() / steps_per_epoch as f64;
        log::info!(
            "epoch {}/{epochs}: {steps_per_epoch} steps, mean cycle {cyc:.4}, lr {:.3e}",
            st.epoch,
            st.lr
        );
        let halting = cfg.halt_after > 0 && ran == cfg.halt_after && st.epoch < epochs;
        if st.epoch % cfg.checkpoint_every == 0 || st.epoch == epochs || halting {
            checkpoints.push(save_checkpoint(cfg, &st, run_dir)?);
        }
        if st.epoch % cfg.sample_every == 0 || st.epoch == epochs {
            let p = run_dir
                .join(SAMPLES)
                .join(format!("epoch_{:04}.png", st.epoch));
            write_samples(&st, cfg, data, &p)?;
        }
        if halting {
            log::info!("halting after {ran} epochs at epoch {}", st.epoch);
            return Ok(TrainOutcome {
                run_dir: run_dir.to_path_buf(),
                state: st,
                metrics,
                checkpoints,
                finished: false,
            });
        }
    }
    Ok(TrainOutcome {
        run_dir: run_dir.to_path_buf(),
        state: st,
        metrics,
        checkpoints,
        finished: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(epoch: usize, cyc: f64) -> MetricsRow {
        MetricsRow {
            step: 0,
            epoch,
            adv_g: 0.0,
            adv_f: 0.0,
            d_x: 0.0,
            d_y: 0.0,
            cyc,
            idt: 0.0,
            lr: 0.0,
        }
    }

    #[test]
    fn epoch_means_group_consecutive_rows() {
        let rows = [row(1, 1.0), row(1, 3.0), row(2, 0.5)];
        assert_eq!(epoch_cycle_means(&rows), vec![(1, 2.0), (2, 0.5)]);
    }

    #[test]
    fn metrics_header_names() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_metrics(&p, &[row(1, 0.25)]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("step,epoch,adv_G,adv_F,d_X,d_Y,cyc,idt,lr\n"));
        assert_eq!(read_metrics(&p).unwrap(), vec![row(1, 0.25)]);
    }
}
