//! Command-line surface. `main.rs` only forwards to [`run`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ganilla_core::generator::Variant;

use crate::checkpoint::Checkpoint;
use crate::config::{ConfigError, RunConfig};
use crate::dataset::load_unpaired_dataset;
use crate::evaluate::{
    emit_report, load_eval_sets, score_manifests, text_table, train_classifiers, LoadedClassifier,
    CONTENT_FILE, CONTENT_KIND, STYLE_FILE, STYLE_KIND,
};
use crate::params_report::report;
use crate::toy::{synth_eval_sets, synth_toy_domains};
use crate::trainer::{checkpoint_config, train_loop};
use crate::translate::translate_dir;

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ganilla",
    version,
    about = "Unpaired image-to-illustration translation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command that reads a run configuration.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Plain-text `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Generator variant: ganilla, ablation1_additive_down or ablation2_deconv_up.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub data_root: Option<PathBuf>,
    /// Any config key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl ConfigArgs {
    /// Applies the config file, then the command-line values, on top of `base`.
    pub fn resolve(&self, base: RunConfig, out: Option<&Path>) -> Result<RunConfig, ConfigError> {
        let mut cfg = base;
        if let Some(f) = &self.config {
            cfg.apply_file(f)?;
        }
        let path = |p: &Path| p.to_string_lossy().into_owned();
        let named = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("variant", self.variant.clone()),
            ("epochs", self.epochs.map(|v| v.to_string())),
            ("lr", self.lr.map(|v| v.to_string())),
            ("data_root", self.data_root.as_deref().map(path)),
            ("out", out.map(path)),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        for kv in &self.set {
            cfg.apply_override(kv)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train both translation directions on an unpaired dataset.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Run directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Resume from this training checkpoint; its config is the base.
        #[arg(long, alias = "resume")]
        checkpoint: Option<PathBuf>,
    },
    /// Translate a directory of images with a trained generator.
    Translate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Scene labels (`filename,class_id`, relative to the file's directory).
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Evaluation classifiers and scores.
    Eval {
        #[command(subcommand)]
        command: EvalCommand,
    },
    /// Per-layer and total generator parameter counts.
    Params {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Print every variant.
        #[arg(long)]
        all: bool,
    },
    /// Write the synthetic toy domains.
    SynthData {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Images per domain.
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write classifier training sets here.
        #[arg(long)]
        eval_out: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        styles: usize,
        #[arg(long, default_value_t = 20)]
        per_style: usize,
        #[arg(long, default_value_t = 4)]
        per_scene: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Train the style and content classifiers.
    TrainClassifiers {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Directory with `styles/<id>/` and `scenes/` (defaults to data_root).
        #[arg(long)]
        eval_data: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score translated images listed in manifests.
    Score {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Directory holding the trained classifiers.
        #[arg(long)]
        classifiers: PathBuf,
        #[arg(long = "manifest", required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Status 2 for configuration errors, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<ConfigError>()) {
        EXIT_CONFIG
    } else {
        EXIT_RUNTIME
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            cfg,
            out,
            checkpoint,
        } => {
            let base = match &checkpoint {
                Some(ck) => checkpoint_config(&Checkpoint::load(ck)?)?,
                None => RunConfig::default(),
            };
            let cfg = cfg.resolve(base, out.as_deref())?;
            let Some(root) = cfg.data_root.clone() else {
                return Err(ConfigError("data_root is required for training".into()).into());
            };
            let Some(run_dir) = cfg.out.clone() else {
                return Err(ConfigError("out is required for training".into()).into());
            };
            let data = load_unpaired_dataset(&root, &cfg.style_id)?;
            let outcome = train_loop(&cfg, &data, &run_dir, checkpoint.as_deref())?;
            println!(
                "trained to epoch {} ({} steps) in {}",
                outcome.state.epoch,
                outcome.state.step,
                run_dir.display()
            );
        }
        Command::Translate {
            checkpoint,
            input,
            out,
            labels,
        } => {
            let rows = translate_dir(&checkpoint, &input, &out, labels.as_deref())?;
            println!("translated {} images into {}", rows.len(), out.display());
        }
        Command::Eval { command } => match command {
            EvalCommand::TrainClassifiers {
                cfg,
                eval_data,
                out,
            } => {
                let cfg = cfg.resolve(RunConfig::default(), None)?;
                let root = eval_data.or_else(|| cfg.data_root.clone()).ok_or_else(|| {
                    ConfigError("give --eval-data or data_root for classifier training".into())
                })?;
                let sets = load_eval_sets(&root, cfg.eval.clf_size)?;
                let (_, _, summary) = train_classifiers(&cfg, &sets, &out)?;
                println!(
                    "style classifier {:.1}% held-out, content classifier {:.1}% held-out",
                    summary.style_held_out_accuracy, summary.content_held_out_accuracy
                );
            }
            EvalCommand::Score {
                cfg,
                classifiers,
                manifests,
                out,
            } => {
                let cfg = cfg.resolve(RunConfig::default(), None)?;
                let style = LoadedClassifier::load(&classifiers.join(STYLE_FILE), STYLE_KIND)?;
                let content =
                    LoadedClassifier::load(&classifiers.join(CONTENT_FILE), CONTENT_KIND)?;
                let rows = score_manifests(&cfg, &style, &content, &manifests)?;
                let all = emit_report(&rows, &out)?;
                print!("{}", text_table(&all));
            }
        },
        Command::Params { cfg, all } => {
            let cfg = cfg.resolve(RunConfig::default(), None)?;
            let variants: Vec<Variant> = if all {
                Variant::ALL.to_vec()
            } else {
                vec![cfg.generator.variant]
            };
            for s in report(&cfg.generator, &variants)? {
                println!("{}", s.table);
            }
        }
        Command::SynthData {
            seed,
            n,
            out,
            eval_out,
            styles,
            per_style,
            per_scene,
        } => {
            synth_toy_domains(seed, n, &out)
                .with_context(|| format!("cannot synthesize into {}", out.display()))?;
            println!("wrote {n}+{n} toy images to {}", out.display());
            if let Some(dir) = eval_out {
                if styles == 0 {
                    bail!("--styles must be at least 1");
                }
                let files = synth_eval_sets(seed, styles, per_style, per_scene, &dir)?;
                println!(
                    "wrote {} classifier images to {}",
                    files.len(),
                    dir.display()
                );
            }
        }
    }
    Ok(())
}
