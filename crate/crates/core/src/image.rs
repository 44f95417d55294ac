//! 8-bit images and their conversion to and from network tensors.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Interleaved RGB pixels, row-major `[height, width, 3]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RawImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::input(format!("degenerate {width}x{height} image")));
        }
        if pixels.len() != width * height * 3 {
            return Err(Error::input(format!(
                "{} bytes do not describe a {width}x{height} RGB image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Self {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let o = (y * self.width + x) * 3;
        [self.pixels[o], self.pixels[o + 1], self.pixels[o + 2]]
    }
}

/// Bilinear resampling of one `h×w` plane to `oh×ow` with half-pixel
/// centres and edge clamping.
pub fn resize_bilinear(src: &[f64], h: usize, w: usize, oh: usize, ow: usize) -> Vec<f64> {
    let taps = |out: usize, inp: usize| -> Vec<(usize, usize, f64)> {
        let scale = inp as f64 / out as f64;
        (0..out)
            .map(|o| {
                let s = ((o as f64 + 0.5) * scale - 0.5).max(0.0);
                let i0 = (s as usize).min(inp - 1);
                let i1 = (i0 + 1).min(inp - 1);
                (i0, i1, s - i0 as f64)
            })
            .collect()
    };
    let ys = taps(oh, h);
    let xs = taps(ow, w);
    let mut out = Vec::with_capacity(oh * ow);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            // a + (b − a)·f keeps constant regions exact
            let (a, b) = (src[y0 * w + x0], src[y0 * w + x1]);
            let top = a + (b - a) * fx;
            let (a, b) = (src[y1 * w + x0], src[y1 * w + x1]);
            let bot = a + (b - a) * fx;
            out.push(top + (bot - top) * fy);
        }
    }
    out
}

/// Resizes to `size×size` and maps `[0, 255]` linearly onto `[-1, 1]`,
/// producing a `[1, 3, size, size]` tensor.
pub fn preprocess<T: Scalar>(img: &RawImage, size: usize) -> Result<Tensor<T>> {
    if size == 0 {
        return Err(Error::input("target size must be positive"));
    }
    let (w, h) = (img.width, img.height);
    let mut data = Vec::with_capacity(3 * size * size);
    for c in 0..3 {
        let plane: Vec<f64> = img.pixels[c..]
            .iter()
            .step_by(3)
            .map(|&v| v as f64)
            .collect();
        let resized = if (h, w) == (size, size) {
            plane
        } else {
            resize_bilinear(&plane, h, w, size, size)
        };
        data.extend(resized.into_iter().map(|v| T::lit(v / 127.5 - 1.0)));
    }
    Tensor::from_vec([1, 3, size, size], data)
}

/// Inverse value mapping `[-1, 1] → [0, 255]` (rounded, clamped) of sample
/// `n` of an image batch.
pub fn to_raw<T: Scalar>(t: &Tensor<T>, n: usize) -> Result<RawImage> {
    let [_, c, h, w] = t.shape();
    if c != 3 {
        return Err(Error::shape(format!("expected 3 channels, got {c}")));
    }
    let s = t.sample(n);
    let plane = h * w;
    Ok(RawImage::from_fn(w, h, |x, y| {
        let mut px = [0u8; 3];
        for (ch, p) in px.iter_mut().enumerate() {
            let v = s[ch * plane + y * w + x].as_f64();
            *p = libm::round((v.clamp(-1.0, 1.0) + 1.0) * 127.5) as u8;
        }
        px
    }))
}

/// Uniformly placed `patch×patch` crop of a `[1, 3, H, W]` image. Returns
/// the crop and its top-left offset `(y, x)`.
pub fn random_patch<T: Scalar, R: Rng + ?Sized>(
    img: &Tensor<T>,
    patch: usize,
    rng: &mut R,
) -> Result<(Tensor<T>, (usize, usize))> {
    let [_, _, h, w] = img.shape();
    if patch == 0 || patch > h || patch > w {
        return Err(Error::input(format!(
            "patch size {patch} does not fit a {h}x{w} image"
        )));
    }
    let y0 = rng.random_range(0..=h - patch);
    let x0 = rng.random_range(0..=w - patch);
    Ok((img.crop(y0, x0, patch, patch)?, (y0, x0)))
}
