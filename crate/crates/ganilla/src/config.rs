//! Plain-text `key = value` run configuration.
//!
//! Precedence is command line over config file over defaults. The echo
//! written to every run directory lists every key, so feeding it back as
//! `--config` reproduces the run.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ganilla_core::classifier::{ClassifierSpec, FitConfig};
use ganilla_core::discriminator::DiscriminatorSpec;
use ganilla_core::eval::{ContentRule, DEFAULT_PATCH, DEFAULT_PATCHES_PER_IMAGE};
use ganilla_core::generator::{GeneratorSpec, Variant, SIZE_MULTIPLE};
use ganilla_core::loss::GanLoss;
use ganilla_core::nn::Padding;
use ganilla_core::train::TrainConfig;

/// A rejected key, value or combination. The binary exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<ganilla_core::Error> for ConfigError {
    fn from(e: ganilla_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn bad(key: &str, value: &str, why: impl fmt::Display) -> ConfigError {
    ConfigError(format!("{key} = {value:?}: {why}"))
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e| bad(key, value, e))
}

fn list(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    value.split(',').map(|v| num(key, v)).collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSettings {
    pub clf_widths: Vec<usize>,
    pub clf_steps: usize,
    pub clf_batch: usize,
    pub clf_lr: f64,
    pub clf_holdout: f64,
    pub clf_seed: u64,
    /// Side length images are resized to before classification.
    pub clf_size: usize,
    pub style_patch: usize,
    pub patches_per_image: usize,
    pub content_rule: ContentRule,
}

impl Default for EvalSettings {
    fn default() -> Self {
        let fit = FitConfig::default();
        Self {
            clf_widths: ClassifierSpec::new(2).widths,
            clf_steps: fit.steps,
            clf_batch: fit.batch_size,
            clf_lr: fit.lr,
            clf_holdout: fit.holdout_fraction,
            clf_seed: fit.seed,
            clf_size: 256,
            style_patch: DEFAULT_PATCH,
            patches_per_image: DEFAULT_PATCHES_PER_IMAGE,
            content_rule: ContentRule::CorrectClass,
        }
    }
}

impl EvalSettings {
    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            steps: self.clf_steps,
            batch_size: self.clf_batch,
            lr: self.clf_lr,
            seed: self.clf_seed,
            holdout_fraction: self.clf_holdout,
            ..FitConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub generator: GeneratorSpec,
    pub disc_base_width: usize,
    pub train: TrainConfig,
    /// Training and translation resolution.
    pub load_size: usize,
    /// Random horizontal flips of training images.
    pub flip: bool,
    pub checkpoint_every: usize,
    pub sample_every: usize,
    /// Stop this invocation after that many epochs (0: run to the end).
    pub halt_after: usize,
    pub data_root: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub style_id: String,
    pub eval: EvalSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            generator: GeneratorSpec::default(),
            disc_base_width: 64,
            train: TrainConfig::default(),
            load_size: 256,
            flip: false,
            checkpoint_every: 10,
            sample_every: 10,
            halt_after: 0,
            data_root: None,
            out: None,
            style_id: "S0".into(),
            eval: EvalSettings::default(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "variant",
    "stem_width",
    "layer_widths",
    "fpn_width",
    "padding",
    "disc_base_width",
    "epochs",
    "lr",
    "beta1",
    "beta2",
    "batch_size",
    "lambda_cycle",
    "lambda_identity",
    "gan_loss",
    "pool_size",
    "seed",
    "decay_start_epoch",
    "load_size",
    "flip",
    "checkpoint_every",
    "sample_every",
    "halt_after",
    "data_root",
    "out",
    "style_id",
    "clf_widths",
    "clf_steps",
    "clf_batch",
    "clf_lr",
    "clf_holdout",
    "clf_seed",
    "clf_size",
    "style_patch",
    "patches_per_image",
    "content_rule",
];

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

fn path_opt(value: &str) -> Option<PathBuf> {
    let v = value.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        let g = &mut self.generator;
        let t = &mut self.train;
        let e = &mut self.eval;
        match key {
            "variant" => g.variant = v.parse::<Variant>()?,
            "stem_width" => g.stem_width = num(key, v)?,
            "layer_widths" => {
                let w = list(key, v)?;
                g.layer_widths = w
                    .try_into()
                    .map_err(|_| bad(key, v, "expected four comma-separated widths"))?;
            }
            "fpn_width" => g.fpn_width = num(key, v)?,
            "padding" => {
                g.padding = match v {
                    "reflect" => Padding::Reflect,
                    "zero" => Padding::Zero,
                    _ => return Err(bad(key, v, "expected reflect or zero")),
                }
            }
            "disc_base_width" => self.disc_base_width = num(key, v)?,
            "epochs" => t.epochs = num(key, v)?,
            "lr" => t.lr = num(key, v)?,
            "beta1" => t.beta1 = num(key, v)?,
            "beta2" => t.beta2 = num(key, v)?,
            "batch_size" => t.batch_size = num(key, v)?,
            "lambda_cycle" => t.lambda_cycle = num(key, v)?,
            "lambda_identity" => t.lambda_identity = num(key, v)?,
            "gan_loss" => {
                t.gan_loss = match v {
                    "least_squares" => GanLoss::LeastSquares,
                    "cross_entropy" => GanLoss::CrossEntropy,
                    _ => return Err(bad(key, v, "expected least_squares or cross_entropy")),
                }
            }
            "pool_size" => t.pool_size = num(key, v)?,
            "seed" => t.seed = num(key, v)?,
            "decay_start_epoch" => t.decay_start_epoch = num(key, v)?,
            "load_size" => self.load_size = num(key, v)?,
            "flip" => self.flip = parse_bool(key, v)?,
            "checkpoint_every" => self.checkpoint_every = num(key, v)?,
            "sample_every" => self.sample_every = num(key, v)?,
            "halt_after" => self.halt_after = num(key, v)?,
            "data_root" => self.data_root = path_opt(v),
            "out" => self.out = path_opt(v),
            "style_id" => self.style_id = v.to_string(),
            "clf_widths" => e.clf_widths = list(key, v)?,
            "clf_steps" => e.clf_steps = num(key, v)?,
            "clf_batch" => e.clf_batch = num(key, v)?,
            "clf_lr" => e.clf_lr = num(key, v)?,
            "clf_holdout" => e.clf_holdout = num(key, v)?,
            "clf_seed" => e.clf_seed = num(key, v)?,
            "clf_size" => e.clf_size = num(key, v)?,
            "style_patch" => e.style_patch = num(key, v)?,
            "patches_per_image" => e.patches_per_image = num(key, v)?,
            "content_rule" => {
                e.content_rule = match v {
                    "correct_class" => ContentRule::CorrectClass,
                    "not_negative" => ContentRule::NotNegative,
                    _ => return Err(bad(key, v, "expected correct_class or not_negative")),
                }
            }
            _ => return Err(ConfigError(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let g = &self.generator;
        let t = &self.train;
        let e = &self.eval;
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map_or(String::new(), |p| p.display().to_string())
        };
        Some(match key {
            "variant" => g.variant.to_string(),
            "stem_width" => g.stem_width.to_string(),
            "layer_widths" => join(&g.layer_widths),
            "fpn_width" => g.fpn_width.to_string(),
            "padding" => match g.padding {
                Padding::Reflect => "reflect".into(),
                Padding::Zero => "zero".into(),
            },
            "disc_base_width" => self.disc_base_width.to_string(),
            "epochs" => t.epochs.to_string(),
            "lr" => t.lr.to_string(),
            "beta1" => t.beta1.to_string(),
            "beta2" => t.beta2.to_string(),
            "batch_size" => t.batch_size.to_string(),
            "lambda_cycle" => t.lambda_cycle.to_string(),
            "lambda_identity" => t.lambda_identity.to_string(),
            "gan_loss" => match t.gan_loss {
                GanLoss::LeastSquares => "least_squares".into(),
                GanLoss::CrossEntropy => "cross_entropy".into(),
            },
            "pool_size" => t.pool_size.to_string(),
            "seed" => t.seed.to_string(),
            "decay_start_epoch" => t.decay_start_epoch.to_string(),
            "load_size" => self.load_size.to_string(),
            "flip" => self.flip.to_string(),
            "checkpoint_every" => self.checkpoint_every.to_string(),
            "sample_every" => self.sample_every.to_string(),
            "halt_after" => self.halt_after.to_string(),
            "data_root" => path(&self.data_root),
            "out" => path(&self.out),
            "style_id" => self.style_id.clone(),
            "clf_widths" => join(&e.clf_widths),
            "clf_steps" => e.clf_steps.to_string(),
            "clf_batch" => e.clf_batch.to_string(),
            "clf_lr" => e.clf_lr.to_string(),
            "clf_holdout" => e.clf_holdout.to_string(),
            "clf_seed" => e.clf_seed.to_string(),
            "clf_size" => e.clf_size.to_string(),
            "style_patch" => e.style_patch.to_string(),
            "patches_per_image" => e.patches_per_image.to_string(),
            "content_rule" => match e.content_rule {
                ContentRule::CorrectClass => "correct_class".into(),
                ContentRule::NotNegative => "not_negative".into(),
            },
            _ => return None,
        })
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v)
                .map_err(|e| ConfigError(format!("line {}: {}", i + 1, e.0)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
            .map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), ConfigError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("override {kv:?} is not key=value")))?;
        self.set(k.trim(), v)
    }

    /// Every key with its effective value, one `key = value` line each.
    pub fn echo(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap_or_default()))
            .collect()
    }

    pub fn discriminator_spec(&self) -> DiscriminatorSpec {
        DiscriminatorSpec::with_base_width(self.disc_base_width)
    }

    pub fn classifier_spec(&self, classes: usize) -> ClassifierSpec {
        ClassifierSpec {
            widths: self.eval.clf_widths.clone(),
            ..ClassifierSpec::new(classes)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.generator.validate()?;
        self.train.validate()?;
        if self.disc_base_width == 0 {
            return Err(ConfigError("disc_base_width must be positive".into()));
        }
        if self.load_size == 0 || !self.load_size.is_multiple_of(SIZE_MULTIPLE) {
            return Err(ConfigError(format!(
                "load_size {} is not a positive multiple of {SIZE_MULTIPLE}",
                self.load_size
            )));
        }
        if self
            .discriminator_spec()
            .output_hw(self.load_size, self.load_size)
            .is_none()
        {
            return Err(ConfigError(format!(
                "load_size {} is too small for the discriminator",
                self.load_size
            )));
        }
        if self.checkpoint_every == 0 || self.sample_every == 0 {
            return Err(ConfigError(
                "checkpoint_every and sample_every must be at least 1".into(),
            ));
        }
        if self.style_id.trim().is_empty() || self.style_id.contains(',') {
            return Err(ConfigError(
                "style_id must be non-empty and comma-free".into(),
            ));
        }
        let e = &self.eval;
        if e.clf_widths.is_empty() || e.clf_widths.contains(&0) {
            return Err(ConfigError("clf_widths must list positive widths".into()));
        }
        if e.clf_steps == 0 || e.clf_batch == 0 {
            return Err(ConfigError(
                "clf_steps and clf_batch must be at least 1".into(),
            ));
        }
        if !(e.clf_lr.is_finite() && e.clf_lr > 0.0) {
            return Err(ConfigError("clf_lr must be a positive number".into()));
        }
        if !(0.0..1.0).contains(&e.clf_holdout) {
            return Err(ConfigError("clf_holdout must lie in [0, 1)".into()));
        }
        if e.clf_size == 0 {
            return Err(ConfigError("clf_size must be positive".into()));
        }
        if e.style_patch == 0 || e.style_patch > e.clf_size.min(256) {
            return Err(ConfigError(format!(
                "style_patch {} must lie in 1..={}",
                e.style_patch,
                e.clf_size.min(256)
            )));
        }
        if e.patches_per_image == 0 {
            return Err(ConfigError("patches_per_image must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_round_trips_through_the_echo() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "variant = ablation2_deconv_up\nlayer_widths = 8,16,32,32\nlr = 0.00031\n\
             flip = true\ndata_root = /tmp/x\ncontent_rule = not_negative\n",
        )
        .unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&cfg.echo()).unwrap();
        assert_eq!(back, cfg);
        for k in KEYS {
            assert!(cfg.get(k).is_some(), "{k}");
        }
    }

    #[test]
    fn defaults_echo_reference_training_settings() {
        let echo = RunConfig::default().echo();
        assert!(echo.contains("epochs = 200\n"));
        assert!(echo.contains("lr = 0.0002\n"));
    }

    #[test]
    fn rejections_name_the_field() {
        let mut cfg = RunConfig::default();
        let e = cfg.set("epochs", "many").unwrap_err();
        assert!(e.0.contains("epochs"));
        assert!(cfg.set("nope", "1").unwrap_err().0.contains("nope"));
        assert!(cfg.apply_text("lr 3").unwrap_err().0.contains("line 1"));
        cfg.set("load_size", "100").unwrap();
        assert!(cfg.validate().unwrap_err().0.contains("load_size"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# toy\n\nepochs = 3 # short\n").unwrap();
        assert_eq!(cfg.train.epochs, 3);
    }
}
