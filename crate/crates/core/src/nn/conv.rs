use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::{Grads, Init, ParamId, ParamStore};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Border handling for convolutions with `pad > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    Zero,
    /// Mirror without repeating the edge sample. A length-1 axis mirrors
    /// onto itself.
    Reflect,
}

/// Standard deviation of the normal initializer for conv weights.
pub const INIT_STD: f64 = 0.02;

pub fn conv_out_len(input: usize, kernel: usize, stride: usize, pad: usize) -> Option<usize> {
    (input + 2 * pad)
        .checked_sub(kernel)
        .map(|span| span / stride + 1)
}

fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

/// For every kernel tap `kk` and output coordinate `o`, the source
/// coordinate on the unpadded input axis (`None` = zero padding).
/// Entry `kk * out_len + o`.
fn axis_map(
    in_len: usize,
    out_len: usize,
    kernel: usize,
    stride: usize,
    pad: usize,
    mode: Padding,
) -> Vec<Option<u32>> {
    let mut map = Vec::with_capacity(kernel * out_len);
    for kk in 0..kernel {
        for o in 0..out_len {
            let i = (o * stride + kk) as isize - pad as isize;
            let src = if i >= 0 && (i as usize) < in_len {
                Some(i as u32)
            } else {
                match mode {
                    Padding::Zero => None,
                    Padding::Reflect => Some(reflect(i, in_len) as u32),
                }
            };
            map.push(src);
        }
    }
    map
}

/// Geometry of one sliding-window pass over a `[c, h, w]` plane stack.
#[derive(Debug, Clone)]
pub(crate) struct Window {
    channels: usize,
    in_h: usize,
    in_w: usize,
    out_h: usize,
    out_w: usize,
    kernel: usize,
    stride: usize,
    ymap: Vec<Option<u32>>,
    xmap: Vec<Option<u32>>,
    /// Per horizontal tap: output columns `lo..hi` read the unpadded input
    /// directly, starting at column `src`.
    xrun: Vec<Run>,
}

#[derive(Debug, Clone, Copy)]
struct Run {
    lo: usize,
    hi: usize,
    src: usize,
}

fn interior_runs(
    in_len: usize,
    out_len: usize,
    kernel: usize,
    stride: usize,
    pad: usize,
) -> Vec<Run> {
    (0..kernel)
        .map(|kk| {
            // o·stride + kk − pad ∈ [0, in_len)
            let lo = pad.saturating_sub(kk).div_ceil(stride);
            let hi = ((in_len + pad).saturating_sub(kk).div_ceil(stride)).min(out_len);
            let hi = hi.max(lo);
            Run {
                lo,
                hi,
                src: (lo * stride + kk).saturating_sub(pad),
            }
        })
        .collect()
}

impl Window {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        channels: usize,
        in_h: usize,
        in_w: usize,
        out_h: usize,
        out_w: usize,
        kernel: usize,
        stride: usize,
        pad: usize,
        mode: Padding,
    ) -> Self {
        Self {
            channels,
            in_h,
            in_w,
            out_h,
            out_w,
            kernel,
            stride,
            ymap: axis_map(in_h, out_h, kernel, stride, pad, mode),
            xmap: axis_map(in_w, out_w, kernel, stride, pad, mode),
            xrun: interior_runs(in_w, out_w, kernel, stride, pad),
        }
    }

    /// Unfolds `x` (`[c, in_h, in_w]`) into `[c·k·k, out_h·out_w]`.
    pub(crate) fn im2col<T: Scalar>(&self, x: &[T], cols: &mut [T]) {
        self.im2col_rows(x, cols, 0, self.out_h);
    }

    /// [`Window::im2col`] restricted to output rows `oy0..oy1`; `cols` is
    /// `[c·k·k, (oy1 − oy0)·out_w]`.
    pub(crate) fn im2col_rows<T: Scalar>(&self, x: &[T], cols: &mut [T], oy0: usize, oy1: usize) {
        let (k, ow, oh) = (self.kernel, self.out_w, self.out_h);
        let band = (oy1 - oy0) * ow;
        let plane = self.in_h * self.in_w;
        let mut row = 0;
        for c in 0..self.channels {
            let src = &x[c * plane..(c + 1) * plane];
            for ky in 0..k {
                for kx in 0..k {
                    let dst = &mut cols[row * band..(row + 1) * band];
                    let xm = &self.xmap[kx * ow..(kx + 1) * ow];
                    for oy in oy0..oy1 {
                        let line = &mut dst[(oy - oy0) * ow..(oy - oy0 + 1) * ow];
                        match self.ymap[ky * oh + oy] {
                            None => line.fill(T::zero()),
                            Some(iy) => {
                                let srow = &src[iy as usize * self.in_w..][..self.in_w];
                                let run = self.xrun[kx];
                                for ox in (0..run.lo).chain(run.hi..ow) {
                                    line[ox] = match xm[ox] {
                                        Some(ix) => srow[ix as usize],
                                        None => T::zero(),
                                    };
                                }
                                let inner = &mut line[run.lo..run.hi];
                                if self.stride == 1 {
                                    inner.copy_from_slice(&srow[run.src..run.src + inner.len()]);
                                } else {
                                    for (d, s) in inner
                                        .iter_mut()
                                        .zip(srow[run.src..].iter().step_by(self.stride))
                                    {
                                        *d = *s;
                                    }
                                }
                            }
                        }
                    }
                    row += 1;
                }
            }
        }
    }

    /// Adjoint of [`Window::im2col`]: scatters-and-adds `cols` into `dx`.
    pub(crate) fn col2im<T: Scalar>(&self, cols: &[T], dx: &mut [T]) {
        self.col2im_rows(cols, dx, 0, self.out_h);
    }

    pub(crate) fn col2im_rows<T: Scalar>(&self, cols: &[T], dx: &mut [T], oy0: usize, oy1: usize) {
        let (k, ow, oh) = (self.kernel, self.out_w, self.out_h);
        let band = (oy1 - oy0) * ow;
        let plane = self.in_h * self.in_w;
        let mut row = 0;
        for c in 0..self.channels {
            let dst = &mut dx[c * plane..(c + 1) * plane];
            for ky in 0..k {
                for kx in 0..k {
                    let src = &cols[row * band..(row + 1) * band];
                    let xm = &self.xmap[kx * ow..(kx + 1) * ow];
                    for oy in oy0..oy1 {
                        if let Some(iy) = self.ymap[ky * oh + oy] {
                            let drow = &mut dst[iy as usize * self.in_w..][..self.in_w];
                            let line = &src[(oy - oy0) * ow..(oy - oy0 + 1) * ow];
                            let run = self.xrun[kx];
                            for ox in (0..run.lo).chain(run.hi..ow) {
                                if let Some(ix) = xm[ox] {
                                    drow[ix as usize] += line[ox];
                                }
                            }
                            let inner = &line[run.lo..run.hi];
                            if self.stride == 1 {
                                for (d, s) in
                                    drow[run.src..run.src + inner.len()].iter_mut().zip(inner)
                                {
                                    *d += *s;
                                }
                            } else {
                                for (d, s) in
                                    drow[run.src..].iter_mut().step_by(self.stride).zip(inner)
                                {
                                    *d += *s;
                                }
                            }
                        }
                    }
                    row += 1;
                }
            }
        }
    }

    /// Output rows per im2col band, keeping the unfolded buffer near 1 MiB.
    fn band_rows(&self) -> usize {
        let kdim = self.channels * self.kernel * self.kernel;
        ((1usize << 18) / (kdim * self.out_w).max(1)).clamp(1, self.out_h.max(1))
    }

    /// `(oy0, oy1)` row bands covering the output plane.
    pub(crate) fn bands(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let step = self.band_rows();
        (0..self.out_h)
            .step_by(step)
            .map(move |o| (o, (o + step).min(self.out_h)))
    }
}

/// Output-channel count at or below which direct loops beat GEMM packing.
const THIN: usize = 4;

fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    for (d, s) in y.iter_mut().zip(x) {
        *d += a * *s;
    }
}

/// Eight-lane accumulation so the reduction vectorizes.
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 8];
    let (ac, bc) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail = ac
        .remainder()
        .iter()
        .zip(bc.remainder())
        .fold(T::zero(), |t, (x, y)| t + *x * *y);
    for (x, y) in ac.zip(bc) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    acc.iter().fold(tail, |t, v| t + *v)
}

/// 2-D convolution, weight `[out, in, k, k]`, optional bias `[out]`.
#[derive(Debug, Clone)]
pub struct Conv2d {
    pub weight: ParamId,
    pub bias: Option<ParamId>,
    pub in_ch: usize,
    pub out_ch: usize,
    pub kernel: usize,
    pub stride: usize,
    pub pad: usize,
    pub padding: Padding,
}

impl Conv2d {
    #[allow(clippy::too_many_arguments)]
    pub fn new<T: Scalar, R: Rng + ?Sized>(
        store: &mut ParamStore<T>,
        name: &str,
        in_ch: usize,
        out_ch: usize,
        kernel: usize,
        stride: usize,
        pad: usize,
        padding: Padding,
        rng: &mut R,
    ) -> Self {
        let weight = store.add(
            format!("{name}.weight"),
            vec![out_ch, in_ch, kernel, kernel],
            Init::Normal(INIT_STD),
            rng,
        );
        let bias = Some(store.add(format!("{name}.bias"), vec![out_ch], Init::Zeros, rng));
        Self {
            weight,
            bias,
            in_ch,
            out_ch,
            kernel,
            stride,
            pad,
            padding,
        }
    }

    pub fn param_count(&self) -> usize {
        self.kernel * self.kernel * self.in_ch * self.out_ch
            + if self.bias.is_some() { self.out_ch } else { 0 }
    }

    pub fn out_hw(&self, h: usize, w: usize) -> Result<(usize, usize)> {
        match (
            conv_out_len(h, self.kernel, self.stride, self.pad),
            conv_out_len(w, self.kernel, self.stride, self.pad),
        ) {
            (Some(oh), Some(ow)) if oh > 0 && ow > 0 => Ok((oh, ow)),
            _ => Err(Error::shape(format!(
                "{}x{} input too small for {}x{} kernel with padding {}",
                h, w, self.kernel, self.kernel, self.pad
            ))),
        }
    }

    fn is_pointwise(&self) -> bool {
        self.kernel == 1 && self.stride == 1 && self.pad == 0
    }

    fn window(&self, h: usize, w: usize, oh: usize, ow: usize) -> Window {
        Window::new(
            self.in_ch,
            h,
            w,
            oh,
            ow,
            self.kernel,
            self.stride,
            self.pad,
            self.padding,
        )
    }

    pub fn forward<T: Scalar>(&self, store: &ParamStore<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
        let [n, c, h, w] = x.shape();
        if c != self.in_ch {
            return Err(Error::shape(format!(
                "conv expects {} input channels, got {}",
                self.in_ch, c
            )));
        }
        let (oh, ow) = self.out_hw(h, w)?;
        let p = oh * ow;
        let kdim = self.in_ch * self.kernel * self.kernel;
        let weight = store.get(self.weight);
        let mut y = Tensor::zeros([n, self.out_ch, oh, ow]);
        let win = self.window(h, w, oh, ow);
        let pointwise = self.is_pointwise();
        let mut cols = Vec::new();
        for i in 0..n {
            let xs = x.sample(i);
            let ys = y.sample_mut(i);
            if let Some(bias) = self.bias {
                for (row, &bv) in ys.chunks_exact_mut(p).zip(store.get(bias)) {
                    row.fill(bv);
                }
            }
            if pointwise {
                T::gemm(
                    self.out_ch,
                    kdim,
                    p,
                    T::one(),
                    weight,
                    (kdim as isize, 1),
                    xs,
                    (p as isize, 1),
                    T::one(),
                    ys,
                    (p as isize, 1),
                );
                continue;
            }
            for (oy0, oy1) in win.bands() {
                let band = (oy1 - oy0) * ow;
                cols.resize(kdim * band, T::zero());
                win.im2col_rows(xs, &mut cols, oy0, oy1);
                if self.out_ch <= THIN {
                    for (co, wrow) in weight.chunks_exact(kdim).enumerate() {
                        let yrow = &mut ys[co * p + oy0 * ow..][..band];
                        for (&a, crow) in wrow.iter().zip(cols.chunks_exact(band)) {
                            axpy(a, crow, yrow);
                        }
                    }
                    continue;
                }
                T::gemm(
                    self.out_ch,
                    kdim,
                    band,
                    T::one(),
                    weight,
                    (kdim as isize, 1),
                    &cols,
                    (band as isize, 1),
                    T::one(),
                    &mut ys[oy0 * ow..],
                    (p as isize, 1),
                );
            }
        }
        Ok(y)
    }

    /// Accumulates weight/bias gradients and returns the input gradient.
    pub fn backward<T: Scalar>(
        &self,
        store: &ParamStore<T>,
        grads: &mut Grads<T>,
        x: &Tensor<T>,
        dy: &Tensor<T>,
    ) -> Tensor<T> {
        let [n, _, h, w] = x.shape();
        let [_, _, oh, ow] = dy.shape();
        let p = oh * ow;
        let kdim = self.in_ch * self.kernel * self.kernel;
        let weight = store.get(self.weight);
        let win = self.window(h, w, oh, ow);
        let pointwise = self.is_pointwise();
        let mut cols = Vec::new();
        let mut dcols = Vec::new();
        let mut dx = Tensor::zeros(x.shape());
        for i in 0..n {
            let dys = dy.sample(i);
            if let Some(bias) = self.bias {
                let db = grads.get_mut(bias);
                for (g, row) in db.iter_mut().zip(dys.chunks_exact(p)) {
                    *g += row.iter().copied().sum::<T>();
                }
            }
            if pointwise {
                // dW += dy · xᵀ
                T::gemm(
                    self.out_ch,
                    p,
                    kdim,
                    T::one(),
                    dys,
                    (p as isize, 1),
                    x.sample(i),
                    (1, p as isize),
                    T::one(),
                    grads.get_mut(self.weight),
                    (kdim as isize, 1),
                );
                // dx = Wᵀ · dy
                T::gemm(
                    kdim,
                    self.out_ch,
                    p,
                    T::one(),
                    weight,
                    (1, kdim as isize),
                    dys,
                    (p as isize, 1),
                    T::zero(),
                    dx.sample_mut(i),
                    (p as isize, 1),
                );
                continue;
            }
            for (oy0, oy1) in win.bands() {
                let band = (oy1 - oy0) * ow;
                let dyb = &dys[oy0 * ow..];
                cols.resize(kdim * band, T::zero());
                dcols.resize(kdim * band, T::zero());
                win.im2col_rows(x.sample(i), &mut cols, oy0, oy1);
                if self.out_ch <= THIN {
                    dcols.fill(T::zero());
                    let dw = grads.get_mut(self.weight);
                    for co in 0..self.out_ch {
                        let dyrow = &dyb[co * p..][..band];
                        let dwrow = &mut dw[co * kdim..(co + 1) * kdim];
                        let wrow = &weight[co * kdim..(co + 1) * kdim];
                        for (r, (crow, dcrow)) in cols
                            .chunks_exact(band)
                            .zip(dcols.chunks_exact_mut(band))
                            .enumerate()
                        {
                            dwrow[r] += dot(dyrow, crow);
                            axpy(wrow[r], dyrow, dcrow);
                        }
                    }
                    win.col2im_rows(&dcols, dx.sample_mut(i), oy0, oy1);
                    continue;
                }
                // dW += dy · colsᵀ
                T::gemm(
                    self.out_ch,
                    band,
                    kdim,
                    T::one(),
                    dyb,
                    (p as isize, 1),
                    &cols,
                    (1, band as isize),
                    T::one(),
                    grads.get_mut(self.weight),
                    (kdim as isize, 1),
                );
                // dcols = Wᵀ · dy
                T::gemm(
                    kdim,
                    self.out_ch,
                    band,
                    T::one(),
                    weight,
                    (1, kdim as isize),
                    dyb,
                    (p as isize, 1),
                    T::zero(),
                    &mut dcols,
                    (band as isize, 1),
                );
                win.col2im_rows(&dcols, dx.sample_mut(i), oy0, oy1);
            }
        }
        dx
    }
}

/// Transposed convolution (weight `[in, out, k, k]`), the adjoint of a
/// zero-padded [`Conv2d`] plus `output_padding` extra rows/cols.
#[derive(Debug, Clone)]
pub struct ConvTranspose2d {
    pub weight: ParamId,
    pub bias: ParamId,
    pub in_ch: usize,
    pub out_ch: usize,
    pub kernel: usize,
    pub stride: usize,
    pub pad: usize,
    pub output_padding: usize,
}

impl ConvTranspose2d {
    #[allow(clippy::too_many_arguments)]
    pub fn new<T: Scalar, R: Rng + ?Sized>(
        store: &mut ParamStore<T>,
        name: &str,
        in_ch: usize,
        out_ch: usize,
        kernel: usize,
        stride: usize,
        pad: usize,
        output_padding: usize,
        rng: &mut R,
    ) -> Self {
        let weight = store.add(
            format!("{name}.weight"),
            vec![in_ch, out_ch, kernel, kernel],
            Init::Normal(INIT_STD),
            rng,
        );
        let bias = store.add(format!("{name}.bias"), vec![out_ch], Init::Zeros, rng);
        Self {
            weight,
            bias,
            in_ch,
            out_ch,
            kernel,
            stride,
            pad,
            output_padding,
        }
    }

    pub fn param_count(&self) -> usize {
        self.kernel * self.kernel * self.in_ch * self.out_ch + self.out_ch
    }

    pub fn out_len(&self, input: usize) -> usize {
        (input - 1) * self.stride + self.kernel + self.output_padding - 2 * self.pad
    }

    fn window(&self, h: usize, w: usize, oh: usize, ow: usize) -> Window {
        // Sliding window over the *output* plane whose result grid is the input grid.
        Window::new(
            self.out_ch,
            oh,
            ow,
            h,
            w,
            self.kernel,
            self.stride,
            self.pad,
            Padding::Zero,
        )
    }

    pub fn forward<T: Scalar>(&self, store: &ParamStore<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
        let [n, c, h, w] = x.shape();
        if c != self.in_ch {
            return Err(Error::shape(format!(
                "transposed conv expects {} input channels, got {}",
                self.in_ch, c
            )));
        }
        let (oh, ow) = (self.out_len(h), self.out_len(w));
        let p = h * w;
        let kdim = self.out_ch * self.kernel * self.kernel;
        let weight = store.get(self.weight);
        let win = self.window(h, w, oh, ow);
        let mut cols = vec![T::zero(); kdim * p];
        let mut y = Tensor::zeros([n, self.out_ch, oh, ow]);
        for i in 0..n {
            T::gemm(
                kdim,
                self.in_ch,
                p,
                T::one(),
                weight,
                (1, kdim as isize),
                x.sample(i),
                (p as isize, 1),
                T::zero(),
                &mut cols,
                (p as isize, 1),
            );
            let ys = y.sample_mut(i);
            win.col2im(&cols, ys);
            for (row, &bv) in ys.chunks_exact_mut(oh * ow).zip(store.get(self.bias)) {
                for v in row {
                    *v += bv;
                }
            }
        }
        Ok(y)
    }

    pub fn backward<T: Scalar>(
        &self,
        store: &ParamStore<T>,
        grads: &mut Grads<T>,
        x: &Tensor<T>,
        dy: &Tensor<T>,
    ) -> Tensor<T> {
        let [n, _, h, w] = x.shape();
        let [_, _, oh, ow] = dy.shape();
        let p = h * w;
        let kdim = self.out_ch * self.kernel * self.kernel;
        let weight = store.get(self.weight);
        let win = self.window(h, w, oh, ow);
        let mut dcols = vec![T::zero(); kdim * p];
        let mut dx = Tensor::zeros(x.shape());
        for i in 0..n {
            let dys = dy.sample(i);
            let db = grads.get_mut(self.bias);
            for (g, row) in db.iter_mut().zip(dys.chunks_exact(oh * ow)) {
                *g += row.iter().copied().sum::<T>();
            }
            win.im2col(dys, &mut dcols);
            // dW += x · dcolsᵀ
            T::gemm(
                self.in_ch,
                p,
                kdim,
                T::one(),
                x.sample(i),
                (p as isize, 1),
                &dcols,
                (1, p as isize),
                T::one(),
                grads.get_mut(self.weight),
                (kdim as isize, 1),
            );
            // dx = W · dcols
            T::gemm(
                self.in_ch,
                kdim,
                p,
                T::one(),
                weight,
                (kdim as isize, 1),
                &dcols,
                (p as isize, 1),
                T::zero(),
                dx.sample_mut(i),
                (p as isize, 1),
            );
        }
        dx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct 7-loop convolution, independent of im2col/gemm.
    fn naive_conv(conv: &Conv2d, store: &ParamStore<f64>, x: &Tensor<f64>) -> Tensor<f64> {
        let [n, _, h, w] = x.shape();
        let (oh, ow) = conv.out_hw(h, w).unwrap();
        let wt = store.get(conv.weight);
        let b = store.get(conv.bias.unwrap());
        let k = conv.kernel;
        Tensor::from_fn([n, conv.out_ch, oh, ow], |[s, o, y, xx]| {
            let mut acc = b[o];
            for c in 0..conv.in_ch {
                for ky in 0..k {
                    for kx in 0..k {
                        let iy = (y * conv.stride + ky) as isize - conv.pad as isize;
                        let ix = (xx * conv.stride + kx) as isize - conv.pad as isize;
                        let v = match conv.padding {
                            Padding::Zero => {
                                if iy < 0 || ix < 0 || iy >= h as isize || ix >= w as isize {
                                    0.0
                                } else {
                                    x.get([s, c, iy as usize, ix as usize])
                                }
                            }
                            Padding::Reflect => x.get([s, c, reflect(iy, h), reflect(ix, w)]),
                        };
                        acc += wt[((o * conv.in_ch + c) * k + ky) * k + kx] * v;
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn reflect_indices() {
        let got: Vec<usize> = (-3..7).map(|i| reflect(i, 4)).collect();
        assert_eq!(got, [3, 2, 1, 0, 1, 2, 3, 2, 1, 0]);
        assert_eq!(reflect(-1, 1), 0);
        assert_eq!(reflect(1, 1), 0);
    }

    #[test]
    fn conv_matches_naive_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (k, s, pad, mode) in [
            (3, 1, 1, Padding::Reflect),
            (3, 2, 1, Padding::Zero),
            (7, 2, 3, Padding::Reflect),
            (4, 2, 1, Padding::Zero),
            (1, 1, 0, Padding::Zero),
            (1, 2, 0, Padding::Zero),
        ] {
            let mut store = ParamStore::<f64>::new();
            let conv = Conv2d::new(&mut store, "c", 3, 5, k, s, pad, mode, &mut rng);
            for v in store.get_mut(conv.bias.unwrap()) {
                *v = rng.random::<f64>();
            }
            let x = Tensor::from_fn([2, 3, 9, 8], |_| rng.random::<f64>() - 0.5);
            let fast = conv.forward(&store, &x).unwrap();
            let slow = naive_conv(&conv, &store, &x);
            assert_eq!(fast.shape(), slow.shape());
            for (a, b) in fast.data().iter().zip(slow.data()) {
                assert!((a - b).abs() < 1e-12, "k={k} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn transposed_conv_doubles_resolution_and_is_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut store = ParamStore::<f64>::new();
        let up = ConvTranspose2d::new(&mut store, "up", 3, 2, 3, 2, 1, 1, &mut rng);
        let x = Tensor::from_fn([1, 3, 4, 5], |_| rng.random::<f64>() - 0.5);
        let y = up.forward(&store, &x).unwrap();
        assert_eq!(y.shape(), [1, 2, 8, 10]);

        // <up(x) - b, v> == <x, convᵀ(v)>: compare against a conv sharing the weights.
        let mut cstore = ParamStore::<f64>::new();
        let conv = Conv2d::new(&mut cstore, "c", 2, 3, 3, 2, 1, Padding::Zero, &mut rng);
        let wt = store.get(up.weight).to_vec();
        cstore.get_mut(conv.weight).copy_from_slice(&wt);
        cstore.get_mut(conv.bias.unwrap()).fill(0.0);
        let v = Tensor::from_fn([1, 2, 8, 10], |_| rng.random::<f64>() - 0.5);
        let cv = conv.forward(&cstore, &v).unwrap();
        let lhs: f64 = y.data().iter().zip(v.data()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.data().iter().zip(cv.data()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    /// Both layers are affine, so central differences are exact up to rounding.
    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut store = ParamStore::<f64>::new();
        let conv = Conv2d::new(&mut store, "c", 2, 3, 3, 2, 1, Padding::Reflect, &mut rng);
        let up = ConvTranspose2d::new(&mut store, "u", 3, 2, 3, 2, 1, 1, &mut rng);
        let x = Tensor::from_fn([2, 2, 6, 6], |_| rng.random::<f64>() - 0.5);
        let r = Tensor::from_fn([2, 2, 6, 6], |_| rng.random::<f64>() - 0.5);
        let loss = |s: &ParamStore<f64>, x: &Tensor<f64>| -> f64 {
            let y = up.forward(s, &conv.forward(s, x).unwrap()).unwrap();
            y.data().iter().zip(r.data()).map(|(a, b)| a * b).sum()
        };
        let mid = conv.forward(&store, &x).unwrap();
        let mut grads = store.zero_grads();
        let dmid = up.backward(&store, &mut grads, &mid, &r);
        let dx = conv.backward(&store, &mut grads, &x, &dmid);
        let h = 1e-6;
        for i in 0..store.numel() {
            let orig = store.flat_get(i);
            store.flat_set(i, orig + h);
            let a = loss(&store, &x);
            store.flat_set(i, orig - h);
            let b = loss(&store, &x);
            store.flat_set(i, orig);
            let num = (a - b) / (2.0 * h);
            assert!(
                (num - grads.flat_get(i)).abs() < 1e-7,
                "{}: {num} vs {}",
                store.flat_name(i),
                grads.flat_get(i)
            );
        }
        let mut xp = x.clone();
        for i in 0..x.len() {
            let orig = xp.data()[i];
            xp.data_mut()[i] = orig + h;
            let a = loss(&store, &xp);
            xp.data_mut()[i] = orig - h;
            let b = loss(&store, &xp);
            xp.data_mut()[i] = orig;
            assert!(((a - b) / (2.0 * h) - dx.data()[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn too_small_input_is_a_shape_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut store = ParamStore::<f32>::new();
        let conv = Conv2d::new(&mut store, "c", 1, 1, 4, 1, 1, Padding::Zero, &mut rng);
        let x = Tensor::zeros([1, 1, 1, 1]);
        assert!(matches!(conv.forward(&store, &x), Err(Error::Shape(_))));
    }
}
