//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test -p ganilla --test acceptance` runs it; the custom harness
//! prints every line without `--nocapture`. The process exits non-zero when
//! a criterion fails that is not listed in `KNOWN_FAILURES`.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ganilla::checkpoint::Checkpoint;
use ganilla::config::RunConfig;
use ganilla::dataset::load_unpaired_dataset;
use ganilla::evaluate::{
    emit_report, load_eval_sets, score_manifests, train_classifiers, EvalSets, LoadedClassifier,
};
use ganilla::toy::{synth_eval_sets, synth_toy_domains};
use ganilla::trainer::{
    checkpoint_config, epoch_cycle_means, train_loop, MetricsRow, CHECKPOINTS, LATEST,
};
use ganilla::translate::translate_dir;
use ganilla_core::classifier::{held_out_accuracy, ConvClassifier, FitReport};
use ganilla_core::discriminator::{DiscriminatorNet, DiscriminatorSpec};
use ganilla_core::eval::{final_score, report_with_average, EvalReport, AVG_ROW};
use ganilla_core::generator::{GeneratorNet, GeneratorSpec, Variant};
use ganilla_core::gradcheck::{check_params, project, projection, GradCheck};
use ganilla_core::loss::{
    adversarial_loss, cycle_loss, identity_loss, total_generator_objective, GanLoss,
    GeneratorLossParts,
};
use ganilla_core::nn::graph::{LayerDesc, LayerGraph, LayerKind};
use ganilla_core::rng::seeded;
use ganilla_core::Tensor;
use rand::Rng;

/// Criteria that cannot pass as specified; each has a ledger entry.
const KNOWN_FAILURES: &[u32] = &[6, 7];

const PARAM_TOLERANCE: f64 = 0.30;
const REFERENCE_PARAMS: f64 = 7.2e6;
const GRAD_TOL: f64 = 1e-3;
const GRAD_STEP: f64 = 1e-6;
const GRAD_SAMPLES: usize = 60;
const LOSS_TOL: f64 = 1e-9;
const AVG_TOL: f64 = 0.05;
const CYCLE_RATIO: f64 = 0.5;
const TRACE_TOL: f64 = 1e-6;
const CLF_ACCURACY: f64 = 90.0;
/// Width of the chance band in binomial standard deviations.
const CHANCE_SIGMAS: f64 = 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run(id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    let tag = if pass { "PASS" } else { "FAIL" };
    let known = if !pass && KNOWN_FAILURES.contains(&id) {
        " [known]"
    } else {
        ""
    };
    let time_note = if in_time { "" } else { " over time limit" };
    println!(
        "{tag}{known} criterion {id:>2} {title} ({:.1}s of {}s{time_note}): {}",
        took.as_secs_f64(),
        limit.as_secs(),
        out.detail
    );
    pass
}

fn tensor(shape: [usize; 4], seed: u64) -> Tensor<f64> {
    let mut rng = seeded(seed);
    Tensor::from_fn(shape, |_| rng.random_range(-1.0..1.0))
}

/// Per-layer arithmetic of the generator, independent of its builder.
fn param_oracle(spec: &GeneratorSpec) -> usize {
    let conv = |cin: usize, cout: usize, k: usize| cin * cout * k * k + cout;
    let norm = |c: usize| 2 * c;
    let (stem, fpn) = (spec.stem_width, spec.fpn_width);
    let mut n = conv(3, stem, 7) + norm(stem);
    let mut cin = stem;
    for (i, &c) in spec.layer_widths.iter().enumerate() {
        for b in 0..2 {
            let strided = i > 0 && b == 0;
            n += 2 * norm(c) + conv(cin, c, 3) + conv(c, c, 3);
            if strided || cin != c {
                n += conv(cin, c, 1);
            }
            if spec.variant != Variant::Ablation1AdditiveDown {
                n += conv(2 * c, c, 1);
            }
            cin = c;
        }
    }
    n += match spec.variant {
        Variant::Ablation2DeconvUp => {
            conv(spec.layer_widths[3], fpn, 3) + norm(fpn) + 4 * (conv(fpn, fpn, 3) + norm(fpn))
        }
        _ => spec.layer_widths.iter().map(|&w| conv(w, fpn, 1)).sum(),
    };
    n + conv(fpn, 3, 7)
}

fn criterion_1() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_ganilla"))
        .arg("params")
        .env("RUST_LOG", "warn")
        .output()
        .expect("run ganilla params");
    let text = String::from_utf8_lossy(&out.stdout);
    let Some(total_line) = text.lines().find(|l| l.starts_with("total ")) else {
        return check(false, "no total line printed");
    };
    let printed: usize = total_line
        .split_whitespace()
        .nth(1)
        .and_then(|t| t.parse().ok())
        .unwrap_or(0);
    let oracle = param_oracle(&GeneratorSpec::default());
    let rel = (printed as f64 - REFERENCE_PARAMS) / REFERENCE_PARAMS;
    let shows_gap = total_line.contains("7.2M") && total_line.contains('%');
    check(
        out.status.success() && printed == oracle && rel.abs() <= PARAM_TOLERANCE && shows_gap,
        format!(
            "printed {printed}, oracle {oracle}, {:+.1}% from 7.2M (limit ±{:.0}%)",
            100.0 * rel,
            100.0 * PARAM_TOLERANCE
        ),
    )
}

fn criterion_2() -> Outcome {
    match DiscriminatorSpec::default().receptive_field() {
        Ok(rf) => check(rf == 70, format!("receptive field {rf}")),
        Err(e) => check(false, e.to_string()),
    }
}

fn criterion_3() -> Outcome {
    let net = GeneratorNet::<f32>::build(&GeneratorSpec::default(), &mut seeded(1)).unwrap();
    let sizes = [32, 64, 128, 256];
    let mut rng = seeded(33);
    for case in 0..20 {
        let n = rng.random_range(1..=2);
        let h = sizes[rng.random_range(0..4)];
        let w = sizes[rng.random_range(0..4)];
        let x = Tensor::from_fn([n, 3, h, w], |_| rng.random_range(-1.0f32..=1.0));
        let y = match net.forward(&x) {
            Ok(y) => y,
            Err(e) => return check(false, format!("case {case} {:?}: {e}", x.shape())),
        };
        if y.shape() != x.shape() || !y.data().iter().all(|v| (-1.0..=1.0).contains(v)) {
            return check(
                false,
                format!("case {case}: {:?} -> {:?}", x.shape(), y.shape()),
            );
        }
    }
    let trace: Vec<usize> = net
        .downsampling_trace(256)
        .iter()
        .map(|&(_, s)| s)
        .collect();
    let expect = [128, 64, 64, 32, 16, 8];
    check(
        trace == expect,
        format!("20 shapes preserved in [-1,1]; trace {trace:?}"),
    )
}

fn gradcheck_summary(what: &str, c: &GradCheck) -> (bool, String) {
    let worst = c.max_rel_error();
    (
        c.samples.len() >= 50 && worst < GRAD_TOL,
        format!("{what} {} params, max rel {worst:.1e}", c.samples.len()),
    )
}

fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, v) in Variant::ALL.into_iter().enumerate() {
        let seed = 10 * i as u64;
        let mut net =
            GeneratorNet::<f64>::build(&GeneratorSpec::tiny(v), &mut seeded(seed)).unwrap();
        let x = tensor([1, 3, 64, 64], seed + 1);
        let r = projection([1, 3, 64, 64], &mut seeded(seed + 2));
        let cache = net.forward_cached(&x).unwrap();
        let mut grads = net.params.zero_grads();
        net.backward(&cache, &r, &mut grads);
        let shell = net.clone();
        let c = check_params(
            &mut net.params,
            &grads,
            GRAD_SAMPLES,
            GRAD_STEP,
            &mut seeded(seed + 3),
            |p| {
                let mut n = shell.clone();
                n.params = p.clone();
                project(&n.forward(&x).unwrap(), &r)
            },
        );
        let (pass, s) = gradcheck_summary(v.as_str(), &c);
        ok &= pass;
        parts.push(s);
    }
    let mut d =
        DiscriminatorNet::<f64>::build(&DiscriminatorSpec::with_base_width(4), &mut seeded(3))
            .unwrap();
    let x = tensor([2, 3, 32, 32], 4);
    let r = projection(d.forward(&x).unwrap().shape(), &mut seeded(5));
    let cache = d.forward_cached(&x).unwrap();
    let mut grads = d.params.zero_grads();
    d.backward(&cache, &r, &mut grads);
    let shell = d.clone();
    let c = check_params(
        &mut d.params,
        &grads,
        GRAD_SAMPLES,
        GRAD_STEP,
        &mut seeded(6),
        |p| {
            let mut n = shell.clone();
            n.params = p.clone();
            project(&n.forward(&x).unwrap(), &r)
        },
    );
    let (pass, s) = gradcheck_summary("discriminator", &c);
    ok &= pass;
    parts.push(s);
    check(ok, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let x = tensor([2, 3, 16, 16], 1);
    let cyc = cycle_loss(&x, &x).unwrap();
    // An identity generator hands back its input unchanged.
    let idt = identity_loss(&x, &x.clone()).unwrap();
    let ones = Tensor::<f64>::from_fn([2, 1, 6, 6], |_| 1.0);
    let zeros = Tensor::<f64>::from_fn([2, 1, 6, 6], |_| 0.0);
    let adv = [
        adversarial_loss(&ones, true, GanLoss::LeastSquares).0,
        adversarial_loss(&zeros, false, GanLoss::LeastSquares).0,
    ];
    let y = tensor([2, 3, 16, 16], 2);
    let parts = GeneratorLossParts {
        adv_g: 0.7,
        adv_f: 0.4,
        cycle_src: cycle_loss(&x, &y).unwrap(),
        cycle_tgt: 0.3,
        idt_src: identity_loss(&y, &x).unwrap(),
        idt_tgt: 0.05,
    };
    let mut worst: f64 = 0.0;
    for (lc, li) in [(10.0, 5.0), (0.0, 0.0), (3.5, 0.25)] {
        let h = 1e-3;
        let dc = (total_generator_objective(&parts, lc + h, li)
            - total_generator_objective(&parts, lc - h, li))
            / (2.0 * h);
        let di = (total_generator_objective(&parts, lc, li + h)
            - total_generator_objective(&parts, lc, li - h))
            / (2.0 * h);
        worst = worst
            .max((dc - (parts.cycle_src + parts.cycle_tgt)).abs())
            .max((di - (parts.idt_src + parts.idt_tgt)).abs());
    }
    let pass = cyc == 0.0 && idt == 0.0 && adv == [0.0, 0.0] && worst < LOSS_TOL;
    check(
        pass,
        format!("cycle {cyc}, identity {idt}, adversarial {adv:?}, slope error {worst:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let as_row = final_score(41.2, 95.3);
    let avg_row = final_score(20.0, 84.5);
    let rows = vec![
        EvalReport::new("AS", 41.2, 95.3).unwrap(),
        EvalReport::new("KH", 12.4, 80.1).unwrap(),
        EvalReport::new("BP", 6.4, 78.1).unwrap(),
    ];
    let all = report_with_average(&rows).unwrap();
    let avg = all.last().unwrap();
    let mean = |f: fn(&EvalReport) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let avg_ok = avg.style_id == AVG_ROW
        && (avg.content_acc - mean(|r| r.content_acc)).abs() <= AVG_TOL
        && (avg.style_acc - mean(|r| r.style_acc)).abs() <= AVG_TOL
        && (avg.final_score - mean(|r| r.final_score)).abs() <= AVG_TOL;
    check(
        as_row == 68.3 && avg_row == 52.2 && avg_ok,
        format!(
            "final(41.2, 95.3) = {as_row} (want 68.3), final(20.0, 84.5) = {avg_row} (want 52.2), Avg row {}",
            if avg_ok { "matches column means" } else { "off" }
        ),
    )
}

/// Width-8 networks at 64px for the determinism runs.
fn tiny_config(epochs: usize) -> RunConfig {
    let mut cfg = RunConfig::default();
    for kv in [
        "load_size=64",
        "stem_width=8",
        "layer_widths=8,8,8,8",
        "fpn_width=8",
        "disc_base_width=8",
        "seed=5",
    ] {
        cfg.apply_override(kv).unwrap();
    }
    cfg.train.epochs = epochs;
    cfg
}

fn max_trace_gap(a: &[MetricsRow], b: &[MetricsRow]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut gap: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        if (x.step, x.epoch) != (y.step, y.epoch) {
            return None;
        }
        for (u, v) in x.values().iter().zip(y.values()) {
            gap = gap.max((u - v).abs());
        }
    }
    Some(gap)
}

fn criterion_8(work: &Path) -> Outcome {
    let toy = work.join("c8_toy");
    synth_toy_domains(7, 8, &toy).unwrap();
    let data = load_unpaired_dataset(&toy, "S0").unwrap();
    let cfg = tiny_config(2);
    let a = train_loop(&cfg, &data, &work.join("c8_a"), None).unwrap();
    let b = train_loop(&cfg, &data, &work.join("c8_b"), None).unwrap();
    let mut halting = cfg.clone();
    halting.halt_after = 1;
    let dir = work.join("c8_c");
    train_loop(&halting, &data, &dir, None).unwrap();
    let ck_path = dir.join(CHECKPOINTS).join(LATEST);
    let resumed_cfg = checkpoint_config(&Checkpoint::load(&ck_path).unwrap()).unwrap();
    let c = train_loop(&resumed_cfg, &data, &dir, Some(&ck_path)).unwrap();
    match (
        max_trace_gap(&a.metrics, &b.metrics),
        max_trace_gap(&a.metrics, &c.metrics),
    ) {
        (Some(rep), Some(res)) => check(
            rep <= TRACE_TOL && res <= TRACE_TOL,
            format!(
                "{} steps; repeat gap {rep:.1e}, resume gap {res:.1e} (limit {TRACE_TOL:.0e})",
                a.metrics.len()
            ),
        ),
        _ => check(false, "traces differ in length or step numbering"),
    }
}

/// Up-stage graph expected for the deconvolution variant: five stride-2
/// deconvolutions, each followed by instance norm, fed by Layer-IV alone.
fn expected_deconv_stage(spec: &GeneratorSpec) -> LayerGraph {
    let fpn = spec.fpn_width;
    let mut layers = Vec::new();
    let mut prev = "layer4".to_string();
    let mut cin = spec.layer_widths[3];
    for i in 1..=5 {
        let d = format!("up.deconv{i}");
        layers.push(LayerDesc {
            name: d.clone(),
            kind: LayerKind::ConvTranspose,
            kernel: 3,
            stride: 2,
            in_ch: cin,
            out_ch: fpn,
            params: cin * fpn * 9 + fpn,
            inputs: vec![prev.clone()],
        });
        let n = format!("up.norm{i}");
        layers.push(LayerDesc {
            name: n.clone(),
            kind: LayerKind::InstanceNorm,
            kernel: 0,
            stride: 1,
            in_ch: fpn,
            out_ch: fpn,
            params: 2 * fpn,
            inputs: vec![d],
        });
        prev = n;
        cin = fpn;
    }
    LayerGraph { layers }
}

fn up_stage(g: &LayerGraph) -> LayerGraph {
    LayerGraph {
        layers: g
            .layers
            .iter()
            .filter(|l| l.name.starts_with("up."))
            .cloned()
            .collect(),
    }
}

fn criterion_9() -> Outcome {
    let mut counts = Vec::new();
    let mut graphs = Vec::new();
    for v in Variant::ALL {
        match GeneratorNet::<f32>::build(&GeneratorSpec::with_variant(v), &mut seeded(0)) {
            Ok(net) => {
                counts.push(net.count_parameters());
                graphs.push(net.graph().clone());
            }
            Err(e) => return check(false, format!("{v}: {e}")),
        }
    }
    let distinct = counts.iter().collect::<BTreeSet<_>>().len() == 3;
    let fingerprints: BTreeSet<u64> = graphs.iter().map(LayerGraph::fingerprint).collect();
    let spec = GeneratorSpec::with_variant(Variant::Ablation2DeconvUp);
    let up = up_stage(&graphs[2]);
    let fp_match = up.fingerprint() == expected_deconv_stage(&spec).fingerprint();
    let external: BTreeSet<&str> = up
        .layers
        .iter()
        .flat_map(|l| l.inputs.iter().map(String::as_str))
        .filter(|i| !i.starts_with("up."))
        .collect();
    let only_l4 = external.len() == 1 && external.contains("layer4");
    check(
        distinct && fingerprints.len() == 3 && fp_match && only_l4,
        format!(
            "counts {counts:?}; ablation2 up-stage fingerprint {} expected, external inputs {external:?}",
            if fp_match { "matches" } else { "differs from" }
        ),
    )
}

/// Range of accuracies a label-blind predictor can reach on the held-out
/// split, widened by binomial noise.
fn chance_band(report: &FitReport, draws: usize) -> (f64, f64) {
    let total: usize = report.held_out_counts.iter().sum();
    let shares: Vec<f64> = report
        .held_out_counts
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect();
    let lo = shares.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = shares.iter().cloned().fold(0.0, f64::max);
    let n = (total * draws) as f64;
    let slack = CHANCE_SIGMAS * (hi * (1.0 - hi) / n).sqrt().max(0.5 / n);
    (100.0 * (lo - slack).max(0.0), 100.0 * (hi + slack).min(1.0))
}

fn toy_eval_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    for kv in [
        "clf_size=64",
        "style_patch=32",
        "clf_steps=300",
        "clf_seed=3",
    ] {
        cfg.apply_override(kv).unwrap();
    }
    cfg
}

struct ToyClassifiers {
    style: LoadedClassifier,
    content: LoadedClassifier,
}

fn criterion_10(work: &Path, keep: &mut Option<ToyClassifiers>) -> Outcome {
    let ev = work.join("eval_sets");
    synth_eval_sets(7, 3, 12, 4, &ev).unwrap();
    let cfg = toy_eval_config();
    let sets: EvalSets = load_eval_sets(&ev, cfg.eval.clf_size).unwrap();
    let (style, content, summary) = train_classifiers(&cfg, &sets, &work.join("clf")).unwrap();
    let fit = cfg.eval.fit_config();

    // Untrained networks of the same shape, scored on the same held-out split.
    let mut style_classes = sets.styles.clone();
    style_classes.push(sets.natural());
    let mut content_classes = sets.scenes.clone();
    content_classes.push(sets.illustrations());
    let fresh = |classes: usize| {
        ConvClassifier::<f32>::build(&cfg.classifier_spec(classes), &mut seeded(99)).unwrap()
    };
    let style_rand = held_out_accuracy(
        &fresh(style_classes.len()),
        &style_classes,
        Some(cfg.eval.style_patch),
        &fit,
    )
    .unwrap();
    let content_rand =
        held_out_accuracy(&fresh(content_classes.len()), &content_classes, None, &fit).unwrap();
    let held = |classes: &[Vec<Tensor<f32>>]| FitReport {
        loss_trace: Vec::new(),
        train_counts: Vec::new(),
        held_out_counts: classes
            .iter()
            .map(|c| {
                if c.len() == 1 {
                    1
                } else {
                    ((c.len() as f64 * fit.holdout_fraction).ceil() as usize).clamp(1, c.len() - 1)
                }
            })
            .collect(),
        held_out_accuracy: 0.0,
    };
    let sb = chance_band(&held(&style_classes), fit.eval_draws);
    let cb = chance_band(&held(&content_classes), 1);
    let in_band = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
    let pass = summary.style_held_out_accuracy > CLF_ACCURACY
        && summary.content_held_out_accuracy > CLF_ACCURACY
        && in_band(style_rand, sb)
        && in_band(content_rand, cb);
    *keep = Some(ToyClassifiers { style, content });
    check(
        pass,
        format!(
            "trained style {:.1}% content {:.1}% (need >{CLF_ACCURACY}); untrained style {style_rand:.1}% in [{:.1}, {:.1}], content {content_rand:.1}% in [{:.1}, {:.1}]",
            summary.style_held_out_accuracy, summary.content_held_out_accuracy, sb.0, sb.1, cb.0, cb.1
        ),
    )
}

/// Toy translation networks for the end-to-end run.
fn end_to_end_config() -> RunConfig {
    let mut cfg = toy_eval_config();
    for kv in [
        "load_size=64",
        "stem_width=32",
        "layer_widths=32,64,128,128",
        "fpn_width=64",
        "disc_base_width=64",
        "epochs=5",
        "seed=7",
        "patches_per_image=10",
    ] {
        cfg.apply_override(kv).unwrap();
    }
    cfg
}

fn criterion_7(work: &Path, clf: Option<&ToyClassifiers>) -> Outcome {
    let toy = work.join("c7_toy");
    synth_toy_domains(7, 32, &toy).unwrap();
    let data = load_unpaired_dataset(&toy, "S0").unwrap();
    let cfg = end_to_end_config();
    let out = match train_loop(&cfg, &data, &work.join("c7_run"), None) {
        Ok(o) => o,
        Err(e) => return check(false, format!("training failed: {e:#}")),
    };
    let ckpt = work.join("c7_run").join(CHECKPOINTS).join(LATEST);
    let gen = work.join("c7_gen");
    let rows = translate_dir(&ckpt, &toy.join("testA"), &gen, None).unwrap();
    let owned;
    let clf = match clf {
        Some(c) => c,
        None => {
            let ev = work.join("c7_eval_sets");
            synth_eval_sets(7, 3, 12, 4, &ev).unwrap();
            let sets = load_eval_sets(&ev, cfg.eval.clf_size).unwrap();
            let (style, content, _) = train_classifiers(&cfg, &sets, &work.join("c7_clf")).unwrap();
            owned = ToyClassifiers { style, content };
            &owned
        }
    };
    let report = score_manifests(&cfg, &clf.style, &clf.content, &[gen.join("manifest.csv")])
        .and_then(|r| emit_report(&r, &work.join("c7_report")));
    let complete = match &report {
        Ok(all) => {
            all.len() == 2
                && all[0].style_id == "S0"
                && all[1].style_id == AVG_ROW
                && all.iter().all(|r| {
                    [r.content_acc, r.style_acc, r.final_score]
                        .iter()
                        .all(|v| (0.0..=100.0).contains(v))
                })
        }
        Err(_) => false,
    };
    let means = epoch_cycle_means(&out.metrics);
    let (first, last) = (means[0].1, means[means.len() - 1].1);
    let ratio = last / first;
    let row = report
        .as_ref()
        .map(|r| {
            format!(
                "content {:.1}% style {:.1}% final {:.1}%",
                r[0].content_acc, r[0].style_acc, r[0].final_score
            )
        })
        .unwrap_or_else(|e| e.to_string());
    check(
        complete && rows.len() == data.source_test.len() && ratio < CYCLE_RATIO,
        format!(
            "{} epochs x {} steps; cycle means {:?}; ratio {ratio:.3} (need <{CYCLE_RATIO}); report {}: {row}",
            means.len(),
            out.metrics.len() / means.len(),
            means.iter().map(|&(_, m)| (m * 1e4).round() / 1e4).collect::<Vec<_>>(),
            if complete { "complete" } else { "incomplete" }
        ),
    )
}

fn main() {
    // Plain `cargo test` passes harness flags such as `--nocapture`; a name
    // filter that matches nothing here skips the suite.
    let args: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    if args.iter().any(|a| !"acceptance".contains(a.as_str())) {
        return;
    }
    let work = tempfile::tempdir().expect("temp dir");
    let w = work.path();
    let secs = Duration::from_secs;
    let mut results = vec![
        (1, run(1, "parameter count", secs(5), criterion_1)),
        (2, run(2, "receptive field", secs(1), criterion_2)),
        (3, run(3, "shape contract", secs(60), criterion_3)),
        (4, run(4, "gradient checks", secs(300), criterion_4)),
        (5, run(5, "loss identities", secs(10), criterion_5)),
        (6, run(6, "scoring arithmetic", secs(1), criterion_6)),
    ];
    let mut clf = None;
    let c10 = run(10, "classifier protocol", secs(600), || {
        criterion_10(w, &mut clf)
    });
    results.push((
        7,
        run(7, "desk-scale end to end", secs(1800), || {
            criterion_7(w, clf.as_ref())
        }),
    ));
    results.push((
        8,
        run(8, "determinism and resume", secs(600), || criterion_8(w)),
    ));
    results.push((9, run(9, "ablation distinctness", secs(30), criterion_9)));
    results.push((10, c10));

    let failed: Vec<u32> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let unexpected: Vec<u32> = failed
        .iter()
        .copied()
        .filter(|id| !KNOWN_FAILURES.contains(id))
        .collect();
    println!(
        "acceptance: {} of {} criteria pass; failing {failed:?}; unexpected {unexpected:?}",
        results.len() - failed.len(),
        results.len()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
