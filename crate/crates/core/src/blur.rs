//! Separable Gaussian blur with clamp-to-edge borders.

use rayon::prelude::*;

use crate::frame::{clamp01, recycle, scratch, Frame};
use crate::{Error, Result};

/// Normalized Gaussian weights for offsets `-r..=r`, `r = ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let denom = 2.0 * sigma * sigma;
    let mut weights: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / denom).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Blurs `frame` with an isotropic Gaussian of standard deviation `sigma`
/// pixels. `sigma == 0` returns an identical copy.
///
/// Taps that fall outside the frame are folded onto the edge pixel, so the
/// cost per pixel is bounded by the frame size even for very wide kernels.
pub fn gaussian_blur(frame: &Frame, sigma: f64) -> Result<Frame> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::param(
            "sigma",
            format!("must be finite and >= 0, got {sigma}"),
        ));
    }
    if sigma == 0.0 {
        return Ok(frame.clone());
    }
    let kernel = Kernel::new(&gaussian_kernel(sigma));
    let (w, h) = (frame.width(), frame.height());
    let stride = 3 * w;
    let src = frame.as_flat();
    let r = kernel.radius;
    let row = |j: usize| &src[j * stride..(j + 1) * stride];

    // Vertical pass in bands of rows and strips of columns, so the rows a
    // strip reads stay in cache while the band is computed.
    let mut vertical = scratch(w * h);
    vertical
        .as_flattened_mut()
        .par_chunks_mut(stride * BAND_ROWS)
        .enumerate()
        .for_each(|(band, block)| {
            // Tap pairs for each interior row of the band, shared by every strip.
            let pairs: Vec<Vec<(&[f32], &[f32], f32)>> = (0..block.len() / stride)
                .map(|i| band * BAND_ROWS + i)
                .map(|y| match y >= r && y + r < h {
                    true => (1..=r).map(|d| (row(y - d), row(y + d), kernel.weights[r + d])).collect(),
                    false => Vec::new(),
                })
                .collect();
            let mut taps: Vec<(usize, f32)> = Vec::new();
            for s in (0..stride).step_by(STRIP) {
                let e = (s + STRIP).min(stride);
                for (i, dst) in block.chunks_mut(stride).enumerate() {
                    let y = band * BAND_ROWS + i;
                    let dst = &mut dst[s..e];
                    if y >= r && y + r < h {
                        symmetric_taps(dst, row(y), &pairs[i], kernel.weights[r], s);
                    } else {
                        taps.clear();
                        kernel.accumulate(y, h, |j, wk| taps.push((j, wk)));
                        dst.fill(0.0);
                        for &(j, wk) in &taps {
                            for (d, v) in dst.iter_mut().zip(&row(j)[s..e]) {
                                *d += wk * v;
                            }
                        }
                    }
                }
            }
        });

    let mut out = scratch(w * h);
    out.par_chunks_mut(w)
        .zip(vertical.par_chunks(w))
        .for_each(|(dst, column)| {
            let (dst, column) = (dst.as_flattened_mut(), column.as_flattened());
            let inner = r.min(w)..w.saturating_sub(r).max(r.min(w));
            for x in (0..inner.start).chain(inner.end..w) {
                let mut acc = [0f32; 3];
                kernel.accumulate(x, w, |j, wk| {
                    for c in 0..3 {
                        acc[c] += wk * column[3 * j + c];
                    }
                });
                dst[3 * x..3 * x + 3].copy_from_slice(&acc);
            }
            if !inner.is_empty() {
                let (lo, hi) = (3 * inner.start, 3 * inner.end);
                let pairs: Vec<(&[f32], &[f32], f32)> = (1..=r)
                    .map(|d| (&column[lo - 3 * d..], &column[lo + 3 * d..], kernel.weights[r + d]))
                    .collect();
                symmetric_taps(&mut dst[lo..hi], &column[lo..], &pairs, kernel.weights[r], 0);
            }
            for v in dst.iter_mut() {
                *v = clamp01(*v);
            }
        });
    recycle(vertical);
    Ok(Frame::from_clamped(w, h, out))
}

const BAND_ROWS: usize = 16;
const STRIP: usize = 256;

/// `dst[i] = center_w * center[o + i] + sum over pairs of w * (a[o + i] + b[o + i])`
/// for offset `o`.
///
/// Dispatches to a copy compiled for wider vectors when the CPU has them;
/// every lane performs the same operations in the same order, so the result
/// does not depend on the path taken.
fn symmetric_taps(dst: &mut [f32], center: &[f32], pairs: &[(&[f32], &[f32], f32)], center_w: f32, o: usize) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            unsafe { symmetric_taps_avx2(dst, center, pairs, center_w, o) };
            return;
        }
    }
    symmetric_taps_generic(dst, center, pairs, center_w, o)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn symmetric_taps_avx2(dst: &mut [f32], center: &[f32], pairs: &[(&[f32], &[f32], f32)], center_w: f32, o: usize) {
    symmetric_taps_generic(dst, center, pairs, center_w, o)
}

/// Accumulates in registers a block at a time.
#[inline(always)]
fn symmetric_taps_generic(dst: &mut [f32], center: &[f32], pairs: &[(&[f32], &[f32], f32)], center_w: f32, o: usize) {
    const LANES: usize = 32;
    let n = dst.len();
    assert!(center.len() >= o + n && pairs.iter().all(|(a, b, _)| a.len() >= o + n && b.len() >= o + n));
    let center = &center[o..o + n];
    let blocks = n / LANES * LANES;
    for i in (0..blocks).step_by(LANES) {
        let c: &[f32; LANES] = center[i..i + LANES].try_into().unwrap();
        let mut acc = c.map(|v| center_w * v);
        for &(a, b, wk) in pairs {
            // SAFETY: every pair slice holds at least `o + n >= o + i + LANES` values.
            let (a, b) = unsafe { (a.as_ptr().add(o + i), b.as_ptr().add(o + i)) };
            for (l, acc) in acc.iter_mut().enumerate() {
                // SAFETY: as above, `l < LANES`.
                *acc += wk * unsafe { *a.add(l) + *b.add(l) };
            }
        }
        dst[i..i + LANES].copy_from_slice(&acc);
    }
    for i in blocks..n {
        let mut acc = center_w * center[i];
        for &(a, b, wk) in pairs {
            acc += wk * (a[o + i] + b[o + i]);
        }
        dst[i] = acc;
    }
}

/// Kernel weights with prefix sums for edge folding.
struct Kernel {
    weights: Vec<f32>,
    /// `cumulative[k]` is the weight of taps `0..k`.
    cumulative: Vec<f32>,
    radius: usize,
}

impl Kernel {
    fn new(weights: &[f64]) -> Self {
        let mut cumulative = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0f64;
        cumulative.push(0.0);
        for &wk in weights {
            acc += wk;
            cumulative.push(acc as f32);
        }
        Kernel {
            weights: weights.iter().map(|&v| v as f32).collect(),
            cumulative,
            radius: weights.len() / 2,
        }
    }

    /// Weight of taps landing before index 0 for output `i`.
    fn below(&self, i: usize) -> f32 {
        self.cumulative[self.radius.saturating_sub(i)]
    }

    /// Weight of taps landing at or past index `n` for output `i`.
    fn above(&self, i: usize, n: usize) -> f32 {
        let inside = (n + self.radius - i).min(self.weights.len());
        self.cumulative[self.weights.len()] - self.cumulative[inside]
    }

    /// Calls `f(j, weight)` for every source index `j` in `0..n` feeding
    /// output `i`, with out-of-range taps folded onto the ends.
    fn accumulate(&self, i: usize, n: usize, mut f: impl FnMut(usize, f32)) {
        let lo = i.saturating_sub(self.radius);
        let hi = (i + self.radius).min(n - 1);
        for j in lo..=hi {
            let mut wk = self.weights[j + self.radius - i];
            if j == 0 {
                wk += self.below(i);
            }
            if j == n - 1 {
                wk += self.above(i, n);
            }
            f(j, wk);
        }
    }
}
