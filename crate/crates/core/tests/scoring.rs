use ganilla_core::classifier::{held_out_accuracy, ConvClassifier, FitConfig};
use ganilla_core::eval::{
    content_score, final_score, style_score, train_content_classifier, train_style_classifier,
    Classifier, ContentClassifierSpec, ContentRule, Generated, StyleClassifierSpec,
};
use ganilla_core::image::preprocess;
use ganilla_core::rng::seeded;
use ganilla_core::synth::{illustration, natural_scene, SCENE_CLASSES};
use ganilla_core::{Result, Tensor};

/// Returns a fixed prediction per image, keyed by the image's constant value.
struct Lookup(Vec<usize>, usize);

impl Classifier for Lookup {
    fn num_classes(&self) -> usize {
        self.1
    }
    fn predict(&self, batch: &Tensor<f32>) -> Result<Vec<usize>> {
        Ok((0..batch.batch())
            .map(|n| self.0[batch.sample(n)[0] as usize])
            .collect())
    }
}

fn constant_images(labels: &[usize]) -> Vec<Generated> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| Generated {
            name: format!("{i}.png"),
            image: Tensor::full([1, 3, 12, 12], i as f32),
            scene: Some(l),
        })
        .collect()
}

#[test]
fn style_counting_oracle() {
    let imgs = constant_images(&[0, 0, 0, 0]);
    let stub = Lookup(vec![2, 2, 5, 2], 6);
    assert_eq!(style_score(&imgs, &stub, 2, 6, 10).unwrap(), 75.0);
}

#[test]
fn content_counting_oracle() {
    let imgs = constant_images(&[0, 1, 2, 3, 4]);
    let stub = Lookup(vec![0, 9, 2, 10, 10], 11);
    assert_eq!(
        content_score(&imgs, &stub, 10, ContentRule::CorrectClass).unwrap(),
        40.0
    );
    assert_eq!(
        content_score(&imgs, &stub, 10, ContentRule::NotNegative).unwrap(),
        60.0
    );
    let truth = Lookup(vec![0, 1, 2, 3, 4], 11);
    assert_eq!(
        content_score(&imgs, &truth, 10, ContentRule::CorrectClass).unwrap(),
        100.0
    );
}

#[test]
fn published_average_row() {
    assert_eq!(final_score(20.0, 84.5), 52.2);
}

fn toy_styles(
    n_styles: usize,
    per_class: usize,
    size: usize,
) -> (Vec<Vec<Tensor<f32>>>, Vec<Tensor<f32>>) {
    let mut rng = seeded(21);
    let styles = (0..n_styles)
        .map(|s| {
            (0..per_class)
                .map(|_| preprocess(&illustration(s, size, &mut rng), size).unwrap())
                .collect()
        })
        .collect();
    let natural = (0..per_class)
        .map(|i| preprocess(&natural_scene(i % SCENE_CLASSES, size, &mut rng), size).unwrap())
        .collect();
    (styles, natural)
}

#[test]
fn style_classifier_separates_toy_palettes() {
    let (styles, natural) = toy_styles(3, 8, 48);
    let spec = StyleClassifierSpec::new(3, 24);
    let cfg = FitConfig {
        steps: 250,
        seed: 5,
        ..FitConfig::default()
    };
    let (net, report) = train_style_classifier(&styles, &natural, &spec, &cfg).unwrap();
    assert!(
        report.held_out_accuracy > 90.0,
        "held-out {}",
        report.held_out_accuracy
    );

    let mut classes = styles.clone();
    classes.push(natural.clone());
    let fresh = ConvClassifier::<f32>::build(&spec.backbone, &mut seeded(77)).unwrap();
    let chance = held_out_accuracy(&fresh, &classes, Some(24), &cfg).unwrap();
    let draws = report.held_out_counts.iter().sum::<usize>() * cfg.eval_draws;
    let p = 1.0 / spec.classes() as f64;
    let band = 3.0 * (p * (1.0 - p) / draws as f64).sqrt() * 100.0;
    assert!(
        (chance - 100.0 * p).abs() <= band,
        "untrained {chance} vs {}±{band}",
        100.0 * p
    );

    let (net2, report2) = train_style_classifier(&styles, &natural, &spec, &cfg).unwrap();
    for (a, b) in report.loss_trace.iter().zip(&report2.loss_trace) {
        assert!((a - b).abs() < 1e-6);
    }
    assert_eq!(net.params, net2.params);
}

#[test]
fn style_classifier_needs_two_nonempty_classes() {
    let (styles, _) = toy_styles(1, 2, 32);
    let spec = StyleClassifierSpec::new(1, 16);
    assert!(train_style_classifier(&styles, &[], &spec, &FitConfig::default()).is_err());
    assert!(StyleClassifierSpec::new(0, 16).validate().is_err());
    assert!(ContentClassifierSpec::new(0).validate().is_err());
}

#[test]
fn content_classifier_separates_toy_scenes() {
    let size = 32;
    let mut rng = seeded(8);
    let scenes: Vec<Vec<Tensor<f32>>> = (0..SCENE_CLASSES)
        .map(|c| {
            (0..8)
                .map(|_| preprocess(&natural_scene(c, size, &mut rng), size).unwrap())
                .collect()
        })
        .collect();
    let negatives: Vec<Tensor<f32>> = (0..8)
        .map(|i| preprocess(&illustration(i % 3, size, &mut rng), size).unwrap())
        .collect();
    let spec = ContentClassifierSpec::new(SCENE_CLASSES);
    let cfg = FitConfig {
        steps: 300,
        seed: 2,
        ..FitConfig::default()
    };
    let (_, report) = train_content_classifier(&scenes, &negatives, &spec, &cfg).unwrap();
    assert_eq!(
        report.train_counts.iter().sum::<usize>() + report.held_out_counts.iter().sum::<usize>(),
        88
    );
    assert!(
        report.held_out_accuracy > 90.0,
        "held-out {}",
        report.held_out_accuracy
    );
}
