//! Procedural stand-ins for the two domains, small enough for desk-scale
//! end-to-end runs.
//!
//! Natural-like images are smooth sky/ground gradients with per-pixel
//! texture and a class-specific arrangement of objects, one of
//! [`SCENE_CLASSES`] scene classes. Illustration-like images use a flat
//! five-colour palette per style and dark outlines around every region.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::image::RawImage;

pub const SCENE_CLASSES: usize = 10;

pub const SCENE_NAMES: [&str; SCENE_CLASSES] = [
    "mountain", "forest", "coast", "desert", "field", "city", "snow", "lake", "canyon", "sunset",
];

type Rgb = [f64; 3];

/// Sky top, sky bottom, ground.
const SCENE_COLORS: [[Rgb; 3]; SCENE_CLASSES] = [
    [[70., 110., 190.], [170., 200., 235.], [95., 90., 85.]],
    [[120., 170., 210.], [190., 215., 225.], [30., 90., 35.]],
    [[60., 150., 220.], [200., 230., 250.], [20., 80., 160.]],
    [[150., 190., 230.], [240., 225., 190.], [220., 180., 110.]],
    [[90., 160., 230.], [210., 230., 245.], [140., 190., 60.]],
    [[110., 120., 140.], [180., 180., 185.], [70., 70., 75.]],
    [[180., 200., 220.], [235., 240., 245.], [245., 248., 252.]],
    [[80., 140., 200.], [190., 215., 235.], [50., 120., 70.]],
    [[200., 120., 70.], [240., 190., 130.], [160., 70., 40.]],
    [[60., 40., 110.], [250., 140., 60.], [40., 30., 50.]],
];

fn clamp_u8(v: f64) -> u8 {
    v.clamp(0.0, 255.0) as u8
}

fn jitter<R: Rng + ?Sized>(c: Rgb, amount: f64, rng: &mut R) -> Rgb {
    c.map(|v| v + rng.random_range(-amount..=amount))
}

fn mix(a: Rgb, b: Rgb, t: f64) -> Rgb {
    [0, 1, 2].map(|i| a[i] + (b[i] - a[i]) * t)
}

fn hsv(h: f64, s: f64, v: f64) -> Rgb {
    let h = (h - libm::floor(h)) * 6.0;
    let i = libm::floor(h) as usize % 6;
    let f = h - libm::floor(h);
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [r * 255.0, g * 255.0, b * 255.0]
}

#[derive(Clone, Copy)]
enum Shape {
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Rect {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
    },
    /// Upward triangle with apex `(cx, top)` and base on `bottom`.
    Peak {
        cx: f64,
        top: f64,
        bottom: f64,
        half: f64,
    },
}

impl Shape {
    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Circle { cx, cy, r } => (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r,
            Shape::Rect { x0, y0, x1, y1 } => x >= x0 && x <= x1 && y >= y0 && y <= y1,
            Shape::Peak {
                cx,
                top,
                bottom,
                half,
            } => {
                if y < top || y > bottom {
                    return false;
                }
                let w = half * (y - top) / (bottom - top);
                (x - cx).abs() <= w
            }
        }
    }
}

/// Class-specific objects in unit coordinates, with their colours.
fn scene_objects<R: Rng + ?Sized>(class: usize, horizon: f64, rng: &mut R) -> Vec<(Shape, Rgb)> {
    let mut out = Vec::new();
    let u = |rng: &mut R, a: f64, b: f64| rng.random_range(a..b);
    match class {
        0 => {
            for _ in 0..3 {
                let cx = u(rng, 0.1, 0.9);
                let top = u(rng, 0.1, horizon - 0.15);
                out.push((
                    Shape::Peak {
                        cx,
                        top,
                        bottom: horizon + 0.02,
                        half: u(rng, 0.2, 0.35),
                    },
                    jitter([110., 105., 115.], 15.0, rng),
                ));
                out.push((
                    Shape::Peak {
                        cx,
                        top,
                        bottom: top + 0.08,
                        half: 0.07,
                    },
                    [245., 245., 250.],
                ));
            }
        }
        1 => {
            for _ in 0..14 {
                let cx = u(rng, 0.0, 1.0);
                let top = u(rng, 0.15, horizon - 0.05);
                out.push((
                    Shape::Peak {
                        cx,
                        top,
                        bottom: horizon + 0.1,
                        half: u(rng, 0.04, 0.08),
                    },
                    jitter([25., 70., 30.], 12.0, rng),
                ));
            }
        }
        2 => {
            out.push((
                Shape::Rect {
                    x0: 0.0,
                    y0: horizon + 0.15,
                    x1: 1.0,
                    y1: 1.0,
                },
                jitter([225., 205., 160.], 10.0, rng),
            ));
            for i in 0..4 {
                let y = horizon + 0.03 + 0.03 * i as f64;
                out.push((
                    Shape::Rect {
                        x0: u(rng, 0.0, 0.4),
                        y0: y,
                        x1: u(rng, 0.6, 1.0),
                        y1: y + 0.008,
                    },
                    [230., 240., 250.],
                ));
            }
        }
        3 => {
            for _ in 0..3 {
                out.push((
                    Shape::Circle {
                        cx: u(rng, 0.0, 1.0),
                        cy: horizon + u(rng, 0.25, 0.45),
                        r: u(rng, 0.3, 0.45),
                    },
                    jitter([200., 155., 90.], 10.0, rng),
                ));
            }
        }
        4 => {
            let mut y = horizon + 0.04;
            while y < 1.0 {
                out.push((
                    Shape::Rect {
                        x0: 0.0,
                        y0: y,
                        x1: 1.0,
                        y1: y + 0.025,
                    },
                    jitter([220., 200., 70.], 15.0, rng),
                ));
                y += 0.08;
            }
        }
        5 => {
            let mut x = 0.0;
            while x < 1.0 {
                let w = u(rng, 0.08, 0.16);
                let top = u(rng, 0.15, horizon - 0.05);
                out.push((
                    Shape::Rect {
                        x0: x,
                        y0: top,
                        x1: x + w,
                        y1: horizon + 0.05,
                    },
                    jitter([90., 90., 105.], 20.0, rng),
                ));
                x += w + 0.02;
            }
        }
        6 => {
            for _ in 0..60 {
                out.push((
                    Shape::Circle {
                        cx: u(rng, 0.0, 1.0),
                        cy: u(rng, 0.0, horizon),
                        r: 0.012,
                    },
                    [252., 252., 255.],
                ));
            }
        }
        7 => {
            out.push((
                Shape::Rect {
                    x0: u(rng, 0.05, 0.2),
                    y0: horizon + 0.1,
                    x1: u(rng, 0.8, 0.95),
                    y1: horizon + u(rng, 0.3, 0.4),
                },
                jitter([40., 110., 190.], 10.0, rng),
            ));
        }
        8 => {
            for i in 0..4 {
                let y = horizon + 0.06 * i as f64;
                out.push((
                    Shape::Rect {
                        x0: 0.0,
                        y0: y,
                        x1: 1.0,
                        y1: y + 0.03,
                    },
                    jitter([185., 95., 55.], 12.0, rng),
                ));
            }
            out.push((
                Shape::Peak {
                    cx: u(rng, 0.3, 0.7),
                    top: horizon - 0.05,
                    bottom: 1.0,
                    half: 0.15,
                },
                jitter([120., 50., 30.], 10.0, rng),
            ));
        }
        _ => {
            out.push((
                Shape::Circle {
                    cx: u(rng, 0.3, 0.7),
                    cy: horizon - 0.05,
                    r: u(rng, 0.1, 0.16),
                },
                jitter([255., 210., 90.], 8.0, rng),
            ));
        }
    }
    out
}

/// A natural-like image of scene `class`.
pub fn natural_scene<R: Rng + ?Sized>(class: usize, size: usize, rng: &mut R) -> RawImage {
    let class = class % SCENE_CLASSES;
    let [top, bottom, ground] = SCENE_COLORS[class];
    let top = jitter(top, 12.0, rng);
    let bottom = jitter(bottom, 12.0, rng);
    let ground = jitter(ground, 12.0, rng);
    let horizon = rng.random_range(0.45..0.65);
    let objects = scene_objects(class, horizon, rng);
    // Low-frequency shading plus per-pixel grain.
    let (fx, fy) = (rng.random_range(2.0..6.0), rng.random_range(2.0..6.0));
    let (px, py) = (rng.random_range(0.0..6.3), rng.random_range(0.0..6.3));
    let noise: Vec<f64> = (0..size * size)
        .map(|_| rng.random_range(-9.0..9.0))
        .collect();
    let s = size as f64;
    RawImage::from_fn(size, size, |x, y| {
        let (u, v) = ((x as f64 + 0.5) / s, (y as f64 + 0.5) / s);
        let mut c = if v < horizon {
            mix(top, bottom, v / horizon)
        } else {
            mix(
                ground,
                mix(ground, [0.0; 3], 0.35),
                (v - horizon) / (1.0 - horizon),
            )
        };
        for (shape, color) in &objects {
            if shape.contains(u, v) {
                c = *color;
            }
        }
        let shade = 8.0 * libm::sin(fx * u * TAU + px) * libm::sin(fy * v * TAU + py);
        let grain = noise[y * size + x];
        c.map(|ch| clamp_u8(ch + shade + grain))
    })
}

/// Five flat colours for illustration style `style`.
pub fn style_palette(style: usize) -> [Rgb; 5] {
    let base = (style as f64 * 0.381_966) % 1.0;
    [0usize, 1, 2, 3, 4].map(|i| {
        let h = base + (i as f64 - 2.0) * 0.05;
        let s = 0.55 + 0.1 * (i % 3) as f64;
        let v = 0.95 - 0.08 * i as f64;
        hsv(h, s, v)
    })
}

/// An illustration-like image in style `style`: flat palette regions with
/// dark outlines, no texture.
pub fn illustration<R: Rng + ?Sized>(style: usize, size: usize, rng: &mut R) -> RawImage {
    let palette = style_palette(style);
    let n_shapes = rng.random_range(5..10);
    let mut shapes = Vec::with_capacity(n_shapes);
    for _ in 0..n_shapes {
        let shape = match rng.random_range(0..3) {
            0 => Shape::Circle {
                cx: rng.random_range(0.0..1.0),
                cy: rng.random_range(0.0..1.0),
                r: rng.random_range(0.08..0.3),
            },
            1 => {
                let (x0, y0) = (rng.random_range(0.0..0.8), rng.random_range(0.0..0.8));
                Shape::Rect {
                    x0,
                    y0,
                    x1: x0 + rng.random_range(0.1..0.5),
                    y1: y0 + rng.random_range(0.1..0.5),
                }
            }
            _ => {
                let top = rng.random_range(0.0..0.6);
                Shape::Peak {
                    cx: rng.random_range(0.0..1.0),
                    top,
                    bottom: top + rng.random_range(0.2..0.5),
                    half: rng.random_range(0.1..0.3),
                }
            }
        };
        shapes.push((shape, 1 + rng.random_range(0..palette.len() - 1)));
    }
    let s = size as f64;
    let mut labels = vec![0usize; size * size];
    let mut region = vec![0usize; size * size];
    for y in 0..size {
        for x in 0..size {
            let (u, v) = ((x as f64 + 0.5) / s, (y as f64 + 0.5) / s);
            for (i, (shape, color)) in shapes.iter().enumerate() {
                if shape.contains(u, v) {
                    labels[y * size + x] = *color;
                    region[y * size + x] = i + 1;
                }
            }
        }
    }
    let outline = (size / 64).max(1);
    RawImage::from_fn(size, size, |x, y| {
        let r = region[y * size + x];
        let edge = (y.saturating_sub(outline)..=(y + outline).min(size - 1)).any(|yy| {
            (x.saturating_sub(outline)..=(x + outline).min(size - 1))
                .any(|xx| region[yy * size + xx] != r)
        });
        if edge {
            [20, 18, 22]
        } else {
            palette[labels[y * size + x]].map(clamp_u8)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn deterministic_under_seed() {
        let a = natural_scene(3, 48, &mut seeded(1));
        let b = natural_scene(3, 48, &mut seeded(1));
        assert_eq!(a, b);
        let a = illustration(2, 48, &mut seeded(1));
        let b = illustration(2, 48, &mut seeded(1));
        assert_eq!(a, b);
    }

    #[test]
    fn illustrations_use_few_colours() {
        let img = illustration(0, 64, &mut seeded(4));
        let mut colours: Vec<[u8; 3]> = Vec::new();
        for y in 0..64 {
            for x in 0..64 {
                let c = img.get(x, y);
                if !colours.contains(&c) {
                    colours.push(c);
                }
            }
        }
        assert!(colours.len() <= 6, "{} colours", colours.len());
    }

    #[test]
    fn palettes_differ_between_styles() {
        assert_ne!(style_palette(0), style_palette(1));
        assert_ne!(style_palette(1), style_palette(2));
    }
}
