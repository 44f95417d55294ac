//! Parameter-free layers and their adjoints.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;
use crate::tensor::Tensor;

pub fn relu<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(|v| if v > T::zero() { v } else { T::zero() })
}

/// `y` is the forward output.
pub fn relu_backward<T: Scalar>(y: &Tensor<T>, dy: &Tensor<T>) -> Tensor<T> {
    let mut dx = dy.clone();
    for (g, &v) in dx.data_mut().iter_mut().zip(y.data()) {
        if v <= T::zero() {
            *g = T::zero();
        }
    }
    dx
}

pub fn leaky_relu<T: Scalar>(x: &Tensor<T>, slope: f64) -> Tensor<T> {
    let s = T::lit(slope);
    x.map(|v| if v > T::zero() { v } else { v * s })
}

/// `x` is the forward input.
pub fn leaky_relu_backward<T: Scalar>(x: &Tensor<T>, dy: &Tensor<T>, slope: f64) -> Tensor<T> {
    let s = T::lit(slope);
    let mut dx = dy.clone();
    for (g, &v) in dx.data_mut().iter_mut().zip(x.data()) {
        if v <= T::zero() {
            *g *= s;
        }
    }
    dx
}

pub fn tanh<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(|v| v.tanh())
}

/// `y` is the forward output.
pub fn tanh_backward<T: Scalar>(y: &Tensor<T>, dy: &Tensor<T>) -> Tensor<T> {
    let mut dx = dy.clone();
    for (g, &v) in dx.data_mut().iter_mut().zip(y.data()) {
        *g *= T::one() - v * v;
    }
    dx
}

/// Max pooling with `-inf` padding. Returns the output and, per output
/// element, the flat in-plane index of the winning input.
pub fn max_pool<T: Scalar>(
    x: &Tensor<T>,
    kernel: usize,
    stride: usize,
    pad: usize,
) -> (Tensor<T>, Vec<u32>) {
    let [n, c, h, w] = x.shape();
    let oh = (h + 2 * pad - kernel) / stride + 1;
    let ow = (w + 2 * pad - kernel) / stride + 1;
    let mut y = Tensor::zeros([n, c, oh, ow]);
    let mut arg = Vec::with_capacity(n * c * oh * ow);
    for (src, dst) in x
        .data()
        .chunks_exact(h * w)
        .zip(y.data_mut().chunks_exact_mut(oh * ow))
    {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = T::neg_infinity();
                let mut best_i = 0u32;
                for ky in 0..kernel {
                    let iy = (oy * stride + ky) as isize - pad as isize;
                    if iy < 0 || iy >= h as isize {
                        continue;
                    }
                    for kx in 0..kernel {
                        let ix = (ox * stride + kx) as isize - pad as isize;
                        if ix < 0 || ix >= w as isize {
                            continue;
                        }
                        let i = iy as usize * w + ix as usize;
                        if src[i] > best {
                            best = src[i];
                            best_i = i as u32;
                        }
                    }
                }
                dst[oy * ow + ox] = best;
                arg.push(best_i);
            }
        }
    }
    (y, arg)
}

pub fn max_pool_backward<T: Scalar>(
    in_shape: [usize; 4],
    argmax: &[u32],
    dy: &Tensor<T>,
) -> Tensor<T> {
    let [_, _, h, w] = in_shape;
    let [_, _, oh, ow] = dy.shape();
    let mut dx = Tensor::zeros(in_shape);
    for ((dst, g), arg) in dx
        .data_mut()
        .chunks_exact_mut(h * w)
        .zip(dy.data().chunks_exact(oh * ow))
        .zip(argmax.chunks_exact(oh * ow))
    {
        for (&gv, &i) in g.iter().zip(arg) {
            dst[i as usize] += gv;
        }
    }
    dx
}

/// Nearest-neighbour ×2 upsampling.
pub fn upsample2<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    let [n, c, h, w] = x.shape();
    let mut y = Tensor::zeros([n, c, 2 * h, 2 * w]);
    for (src, dst) in x
        .data()
        .chunks_exact(h * w)
        .zip(y.data_mut().chunks_exact_mut(4 * h * w))
    {
        for yy in 0..2 * h {
            let srow = &src[(yy / 2) * w..(yy / 2 + 1) * w];
            for (xx, d) in dst[yy * 2 * w..(yy + 1) * 2 * w].iter_mut().enumerate() {
                *d = srow[xx / 2];
            }
        }
    }
    y
}

pub fn upsample2_backward<T: Scalar>(dy: &Tensor<T>) -> Tensor<T> {
    let [n, c, h2, w2] = dy.shape();
    let (h, w) = (h2 / 2, w2 / 2);
    let mut dx = Tensor::zeros([n, c, h, w]);
    for (src, dst) in dy
        .data()
        .chunks_exact(h2 * w2)
        .zip(dx.data_mut().chunks_exact_mut(h * w))
    {
        for yy in 0..h2 {
            for xx in 0..w2 {
                dst[(yy / 2) * w + xx / 2] += src[yy * w2 + xx];
            }
        }
    }
    dx
}

/// Channel-wise concatenation `[a; b]`.
pub fn concat<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Tensor<T> {
    let [n, ca, h, w] = a.shape();
    let cb = b.channels();
    debug_assert_eq!(b.shape(), [n, cb, h, w]);
    let mut data = Vec::with_capacity(n * (ca + cb) * h * w);
    for i in 0..n {
        data.extend_from_slice(a.sample(i));
        data.extend_from_slice(b.sample(i));
    }
    Tensor::from_vec([n, ca + cb, h, w], data).expect("consistent concat shape")
}

/// Splits a concatenated gradient back into its `[a; b]` parts.
pub fn split<T: Scalar>(d: &Tensor<T>, ca: usize) -> (Tensor<T>, Tensor<T>) {
    let [n, c, h, w] = d.shape();
    let cb = c - ca;
    let mut da = Vec::with_capacity(n * ca * h * w);
    let mut db = Vec::with_capacity(n * cb * h * w);
    for i in 0..n {
        let s = d.sample(i);
        da.extend_from_slice(&s[..ca * h * w]);
        db.extend_from_slice(&s[ca * h * w..]);
    }
    (
        Tensor::from_vec([n, ca, h, w], da).expect("split"),
        Tensor::from_vec([n, cb, h, w], db).expect("split"),
    )
}

pub fn add<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Tensor<T> {
    let mut out = a.clone();
    out.add_assign(b);
    out
}

pub fn global_avg_pool<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    let [n, c, h, w] = x.shape();
    let inv = T::lit(1.0 / (h * w) as f64);
    let data = x
        .data()
        .chunks_exact(h * w)
        .map(|p| p.iter().copied().sum::<T>() * inv)
        .collect();
    Tensor::from_vec([n, c, 1, 1], data).expect("pooled shape")
}

pub fn global_avg_pool_backward<T: Scalar>(in_shape: [usize; 4], dy: &Tensor<T>) -> Tensor<T> {
    let [_, _, h, w] = in_shape;
    let inv = T::lit(1.0 / (h * w) as f64);
    let mut data = vec![T::zero(); in_shape.iter().product()];
    for (plane, &g) in data.chunks_exact_mut(h * w).zip(dy.data()) {
        plane.fill(g * inv);
    }
    Tensor::from_vec(in_shape, data).expect("pool grad shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_pool_halves_even_sizes() {
        let x = Tensor::<f32>::from_fn([1, 1, 8, 8], |[_, _, y, x]| (y * 8 + x) as f32);
        let (y, arg) = max_pool(&x, 3, 2, 1);
        assert_eq!(y.shape(), [1, 1, 4, 4]);
        // bottom-right window covers rows/cols 5..=7
        assert_eq!(y.get([0, 0, 3, 3]), 63.0);
        assert_eq!(arg[15], 63);
        let dx = max_pool_backward(x.shape(), &arg, &Tensor::full([1, 1, 4, 4], 1.0));
        assert_eq!(dx.data().iter().sum::<f32>(), 16.0);
    }

    #[test]
    fn upsample_adjoint_sums_blocks() {
        let x = Tensor::<f64>::from_fn([1, 2, 2, 3], |[_, c, y, x]| (c * 10 + y * 3 + x) as f64);
        let y = upsample2(&x);
        assert_eq!(y.shape(), [1, 2, 4, 6]);
        assert_eq!(y.get([0, 1, 3, 5]), x.get([0, 1, 1, 2]));
        let back = upsample2_backward(&y);
        for (a, b) in back.data().iter().zip(x.data()) {
            assert_eq!(*a, 4.0 * b);
        }
    }

    #[test]
    fn concat_then_split_is_identity() {
        let a = Tensor::<f32>::from_fn([2, 2, 3, 3], |[n, c, y, x]| (n + c + y + x) as f32);
        let b = Tensor::<f32>::from_fn([2, 3, 3, 3], |[n, c, y, x]| (n * c * y * x) as f32);
        let cat = concat(&a, &b);
        assert_eq!(cat.shape(), [2, 5, 3, 3]);
        let (ra, rb) = split(&cat, 2);
        assert_eq!(ra, a);
        assert_eq!(rb, b);
    }
}
