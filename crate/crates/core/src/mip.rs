//! Box-filtered mip pyramid with trilinear sampling.

use crate::frame::{lerp_rgb, scratch, Frame, Rgb};

/// Level `L` has `ceil(w / 2^L) x ceil(h / 2^L)` texels, each the exact mean
/// of the source pixels in its `2^L x 2^L` block. The coarsest level is 1x1
/// and holds the global mean.
#[derive(Debug, Clone)]
pub struct MipPyramid<'a> {
    source: &'a Frame,
    /// Levels 1 and up.
    levels: Vec<Frame>,
}

impl<'a> MipPyramid<'a> {
    pub fn new(frame: &'a Frame) -> Self {
        let (w, h) = (frame.width(), frame.height());
        let mut levels = Vec::new();
        if w == 1 && h == 1 {
            return MipPyramid { source: frame, levels };
        }
        // Level 1 straight from the source in f32; its block sums seed the
        // coarser levels in f64.
        let (lw, lh) = (w.div_ceil(2), h.div_ceil(2));
        let mut first = scratch(lw * lh);
        for (ty, dst) in first.chunks_mut(lw).enumerate() {
            let top = frame.row(2 * ty);
            let bottom = frame.row((2 * ty + 1).min(h - 1));
            let pairs = w / 2;
            for ((d, t), b) in dst.iter_mut().zip(top.chunks_exact(2)).zip(bottom.chunks_exact(2)) {
                for c in 0..3 {
                    d[c] = (t[0][c] + t[1][c] + b[0][c] + b[1][c]) * 0.25;
                }
            }
            if pairs < lw {
                let (t, b) = (top[w - 1], bottom[w - 1]);
                dst[pairs] = std::array::from_fn(|c| (t[c] + b[c]) * 0.5);
            }
        }
        // An odd height repeats the last row above, which averages to itself.
        let first = Frame::from_clamped(lw, lh, first);
        levels.push(first);
        if lw == 1 && lh == 1 {
            return MipPyramid { source: frame, levels };
        }
        let first = &levels[0];
        let (nw, nh) = (lw.div_ceil(2), lh.div_ceil(2));
        let mut next = vec![[0f64; 3]; nw * nh];
        for y in 0..lh {
            let ny = block_extent(y, 1, h);
            let row = &mut next[(y / 2) * nw..(y / 2 + 1) * nw];
            for (x, p) in first.row(y).iter().enumerate() {
                let n = ny * block_extent(x, 1, w);
                let d = &mut row[x / 2];
                for c in 0..3 {
                    d[c] += p[c] as f64 * n;
                }
            }
        }
        let (mut lw, mut lh, mut sums) = (nw, nh, next);
        let mut level = 2;
        loop {
            levels.push(means(&sums, lw, lh, level, (w, h)));
            if lw == 1 && lh == 1 {
                break;
            }
            let (nw, nh) = (lw.div_ceil(2), lh.div_ceil(2));
            let mut next = vec![[0f64; 3]; nw * nh];
            for y in 0..lh {
                for x in 0..lw {
                    let (s, d) = (sums[y * lw + x], &mut next[(y / 2) * nw + x / 2]);
                    for c in 0..3 {
                        d[c] += s[c];
                    }
                }
            }
            (lw, lh, sums) = (nw, nh, next);
            level += 1;
        }
        MipPyramid { source: frame, levels }
    }

    pub fn level_count(&self) -> usize {
        self.levels.len() + 1
    }

    /// Index of the 1x1 level.
    pub fn coarsest(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, lod: usize) -> &Frame {
        match lod.min(self.coarsest()) {
            0 => self.source,
            l => &self.levels[l - 1],
        }
    }

    /// Samples at source-pixel coordinates `(x, y)` and level of detail `lod`.
    /// Fractional `lod` blends the two adjacent levels; values beyond the
    /// coarsest level clamp to it.
    #[inline]
    pub fn sample(&self, x: f32, y: f32, lod: f32) -> Rgb {
        let lod = lod.clamp(0.0, self.coarsest() as f32);
        let lo = lod as usize;
        let frac = lod - lo as f32;
        let a = self.sample_level(lo, x, y);
        if frac == 0.0 {
            return a;
        }
        let b = self.sample_level(lo + 1, x, y);
        lerp_rgb(a, b, frac)
    }

    #[inline]
    fn sample_level(&self, level: usize, x: f32, y: f32) -> Rgb {
        // Exact: the scale is a power of two.
        let inv = 1.0 / (1u64 << level) as f32;
        self.level(level).sample(x * inv, y * inv)
    }
}

/// Texel means of a level from its block sums; edge blocks are clipped to
/// the `w x h` source.
fn means(sums: &[[f64; 3]], lw: usize, lh: usize, level: usize, (w, h): (usize, usize)) -> Frame {
    let texels = sums
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let n = block_extent(i % lw, level, w) * block_extent(i / lw, level, h);
            [(s[0] / n) as f32, (s[1] / n) as f32, (s[2] / n) as f32]
        })
        .collect();
    Frame::from_data(lw, lh, texels).expect("non-empty level")
}

/// Source pixels covered along one axis by texel `i` of `level`.
fn block_extent(i: usize, level: usize, n: usize) -> f64 {
    let block = 1usize << level;
    block.min(n - i * block) as f64
}
