use ganilla_core::discriminator::{DiscriminatorNet, DiscriminatorSpec};
use ganilla_core::generator::{GeneratorNet, GeneratorSpec, Variant};
use ganilla_core::image::{preprocess, random_patch, RawImage};
use ganilla_core::loss::{cycle_loss, l1_loss};
use ganilla_core::rng::seeded;
use ganilla_core::Tensor;
use rand::Rng;

/// Per-layer arithmetic, written out independently of the network builder.
fn param_oracle(variant: Variant, stem: usize, widths: [usize; 4], fpn: usize) -> usize {
    let conv = |cin: usize, cout: usize, k: usize| cin * cout * k * k + cout;
    let norm = |c: usize| 2 * c;
    let mut n = conv(3, stem, 7) + norm(stem);
    let mut cin = stem;
    for (i, &c) in widths.iter().enumerate() {
        for b in 0..2 {
            let stride = if i > 0 && b == 0 { 2 } else { 1 };
            n += conv(cin, c, 3) + norm(c) + conv(c, c, 3) + norm(c);
            if stride != 1 || cin != c {
                n += conv(cin, c, 1);
            }
            if variant != Variant::Ablation1AdditiveDown {
                n += conv(2 * c, c, 1);
            }
            cin = c;
        }
    }
    if variant == Variant::Ablation2DeconvUp {
        let mut cin = widths[3];
        for _ in 0..5 {
            n += conv(cin, fpn, 3) + norm(fpn);
            cin = fpn;
        }
    } else {
        n += widths.iter().map(|&w| conv(w, fpn, 1)).sum::<usize>();
    }
    n + conv(fpn, 3, 7)
}

#[test]
fn parameter_counts_match_layer_arithmetic() {
    for v in Variant::ALL {
        let net =
            GeneratorNet::<f32>::build(&GeneratorSpec::with_variant(v), &mut seeded(0)).unwrap();
        assert_eq!(
            net.count_parameters(),
            param_oracle(v, 64, [64, 128, 256, 256], 128),
            "{v}"
        );
        assert_eq!(net.graph().param_count(), net.count_parameters());
    }
    let net = GeneratorNet::<f32>::build(&GeneratorSpec::default(), &mut seeded(0)).unwrap();
    assert_eq!(net.count_parameters(), 5_929_475);
}

#[test]
fn discriminator_parameter_count() {
    let net =
        DiscriminatorNet::<f32>::build(&DiscriminatorSpec::default(), &mut seeded(0)).unwrap();
    let conv = |cin: usize, cout: usize| cin * cout * 16 + cout;
    let oracle = conv(3, 64)
        + conv(64, 128)
        + 256
        + conv(128, 256)
        + 512
        + conv(256, 512)
        + 1024
        + conv(512, 1);
    assert_eq!(net.count_parameters(), oracle);
}

#[test]
fn patch_map_sizes() {
    let spec = DiscriminatorSpec::default();
    assert_eq!(spec.output_hw(256, 256), Some((30, 30)));
    assert_eq!(spec.output_hw(70, 70), Some((6, 6)));
}

#[test]
fn downsampling_trace_for_256() {
    let net =
        GeneratorNet::<f32>::build(&GeneratorSpec::tiny(Variant::Ganilla), &mut seeded(0)).unwrap();
    let sizes: Vec<usize> = net
        .downsampling_trace(256)
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    assert_eq!(sizes, [128, 64, 64, 32, 16, 8]);
}

/// Separable tent-filter resampler with clamped source coordinates.
fn bilinear_oracle(src: &[f64], n: usize, m: usize) -> Vec<f64> {
    let weights = |o: usize| -> Vec<f64> {
        let s = ((o as f64 + 0.5) * n as f64 / m as f64 - 0.5).clamp(0.0, (n - 1) as f64);
        (0..n)
            .map(|i| (1.0 - (s - i as f64).abs()).max(0.0))
            .collect()
    };
    let mut out = vec![0.0; m * m];
    for oy in 0..m {
        let wy = weights(oy);
        for ox in 0..m {
            let wx = weights(ox);
            let mut acc = 0.0;
            for (y, &a) in wy.iter().enumerate().filter(|(_, a)| **a > 0.0) {
                for (x, &b) in wx.iter().enumerate().filter(|(_, b)| **b > 0.0) {
                    acc += a * b * src[y * n + x];
                }
            }
            out[oy * m + ox] = acc;
        }
    }
    out
}

#[test]
fn bilinear_downsample_matches_oracle() {
    let img = RawImage::from_fn(512, 512, |x, y| {
        [(x / 2) as u8, (y / 2) as u8, ((x + 3 * y) % 256) as u8]
    });
    let t: Tensor<f64> = preprocess(&img, 256).unwrap();
    for c in 0..3 {
        let plane: Vec<f64> = img.pixels()[c..]
            .iter()
            .step_by(3)
            .map(|&v| v as f64)
            .collect();
        let want = bilinear_oracle(&plane, 512, 256);
        for (y, x) in [(0, 0), (0, 255), (255, 0), (255, 255), (100, 37)] {
            let expect = want[y * 256 + x] / 127.5 - 1.0;
            assert!(
                (t.get([0, c, y, x]) - expect).abs() < 1e-6,
                "c{c} ({y},{x})"
            );
        }
    }
}

#[test]
fn upsampling_matches_oracle() {
    let img = RawImage::from_fn(5, 5, |x, y| [(x * 40) as u8, (y * 50) as u8, 7]);
    let t: Tensor<f64> = preprocess(&img, 13).unwrap();
    let plane: Vec<f64> = img.pixels()[0..]
        .iter()
        .step_by(3)
        .map(|&v| v as f64)
        .collect();
    let want = bilinear_oracle(&plane, 5, 13);
    for (i, w) in want.iter().enumerate() {
        assert!((t.data()[i] - (w / 127.5 - 1.0)).abs() < 1e-9);
    }
}

#[test]
fn patch_offsets_bounded_and_uniform() {
    let img = Tensor::<f32>::from_fn([1, 1, 256, 256], |[_, _, y, x]| (y * 256 + x) as f32);
    let mut rng = seeded(11);
    let draws = 10_000;
    let mut rows = vec![0usize; 157];
    let mut cols = vec![0usize; 157];
    for i in 0..draws {
        let (p, (y0, x0)) = random_patch(&img, 100, &mut rng).unwrap();
        assert!(y0 <= 156 && x0 <= 156);
        rows[y0] += 1;
        cols[x0] += 1;
        if i % 500 == 0 {
            assert_eq!(p.shape(), [1, 1, 100, 100]);
            assert_eq!(p.get([0, 0, 0, 0]), img.get([0, 0, y0, x0]));
            assert_eq!(p.get([0, 0, 99, 42]), img.get([0, 0, y0 + 99, x0 + 42]));
        }
    }
    let p = 1.0 / 157.0;
    let mean = draws as f64 * p;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for counts in [&rows, &cols] {
        for &c in counts.iter() {
            assert!(
                (c as f64 - mean).abs() < 5.0 * sigma,
                "{c} vs {mean}±{sigma}"
            );
        }
    }
}

#[test]
fn l1_matches_brute_force_mean() {
    let mut rng = seeded(3);
    let a = Tensor::<f64>::from_fn([2, 3, 5, 4], |_| rng.random_range(-1.0..1.0));
    let b = Tensor::<f64>::from_fn([2, 3, 5, 4], |_| rng.random_range(-1.0..1.0));
    let mut sum = 0.0;
    for n in 0..2 {
        for c in 0..3 {
            for y in 0..5 {
                for x in 0..4 {
                    sum += (a.get([n, c, y, x]) - b.get([n, c, y, x])).abs();
                }
            }
        }
    }
    let oracle = sum / 120.0;
    assert!((cycle_loss(&a, &b).unwrap() - oracle).abs() < 1e-12);
    assert!((l1_loss(&a, &b).unwrap().0 - oracle).abs() < 1e-12);
    assert_eq!(
        cycle_loss(
            &Tensor::<f64>::zeros([1, 3, 2, 2]),
            &Tensor::full([1, 3, 2, 2], 1.0)
        )
        .unwrap(),
        1.0
    );
    assert!(cycle_loss(&a, &Tensor::zeros([1, 3, 5, 4])).is_err());
}
