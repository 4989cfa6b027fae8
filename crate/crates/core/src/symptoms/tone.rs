//! Per-pixel tone shaders: contrast sensitivity and cataract clouding.

use rayon::prelude::*;

use super::{shader_seed, Cataract, ContrastSens, RenderContext, ShaderCache};
use crate::frame::{clamp01, mix_rgb, Frame};

/// Exponent floor that keeps `0^gamma` defined at `gamma = 0`.
pub const MIN_GAMMA: f64 = 0.01;

/// Gray level that cataract clouding converges to.
pub const CATARACT_VEIL: f32 = 0.65;

const FROSTING_SALT: u64 = 0xC47A;

/// Per channel: contrast about 0.5, then the brightness offset, clamp, then
/// the gamma exponent.
pub(super) fn contrast_sensitivity(
    frame: &Frame,
    _ctx: &RenderContext,
    cfg: &ContrastSens,
    _: &mut ShaderCache,
) -> Frame {
    adjust_contrast(frame.clone(), cfg)
}

/// [`contrast_sensitivity`] on a frame the caller no longer needs.
pub(super) fn adjust_contrast(mut out: Frame, cfg: &ContrastSens) -> Frame {
    if cfg.brightness == 0.0 && cfg.contrast == 0.0 && cfg.gamma == 1.0 {
        return out;
    }
    // The closed form folded into one multiply-add in f32.
    let gain = (1.0 + cfg.contrast) as f32;
    let offset = (0.5 - 0.5 * (1.0 + cfg.contrast) + cfg.brightness) as f32;
    let gamma = cfg.gamma.max(MIN_GAMMA) as f32;
    let table = (cfg.gamma != 1.0).then(|| GammaTable::new(gamma));
    out.pixels_mut().par_chunks_mut(4096).for_each(|chunk| {
        let chunk = chunk.as_flattened_mut();
        for v in chunk.iter_mut() {
            *v = clamp01(*v * gain + offset);
        }
        if let Some(table) = &table {
            table.apply(chunk);
        }
    });
    out
}

const GAMMA_SEGMENT_BITS: u32 = 12;

/// `v^gamma` on `[0, 1]` from the float's exponent and a table over the
/// mantissa, linearly interpolated. Relative error stays near f32 rounding.
struct GammaTable {
    gamma: f32,
    mantissa: Box<[f32; (1 << GAMMA_SEGMENT_BITS) + 1]>,
    /// `2^((e - 127) * gamma)` for biased exponent `e`.
    scale: [f32; 128],
}

impl GammaTable {
    fn new(gamma: f32) -> Self {
        let g = gamma as f64;
        let n = 1usize << GAMMA_SEGMENT_BITS;
        GammaTable {
            gamma,
            mantissa: Box::new(std::array::from_fn(|i| (1.0 + i as f64 / n as f64).powf(g) as f32)),
            scale: std::array::from_fn(|e| ((e as f64 - 127.0) * g).exp2() as f32),
        }
    }

    fn apply(&self, values: &mut [f32]) {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx2") {
                // SAFETY: the feature was detected at runtime.
                unsafe { self.apply_avx2(values) };
                return;
            }
        }
        for v in values {
            *v = self.pow(*v);
        }
    }

    /// Eight lanes at a time with gathers; the same operations in the same
    /// order as [`GammaTable::pow`].
    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn apply_avx2(&self, values: &mut [f32]) {
        use std::arch::x86_64::*;
        let shift = 23 - GAMMA_SEGMENT_BITS as i32;
        let mantissa = self.mantissa.as_ptr();
        let scale = self.scale.as_ptr();
        let mut chunks = values.chunks_exact_mut(8);
        for chunk in &mut chunks {
            let bits = _mm256_loadu_si256(chunk.as_ptr().cast());
            let e = _mm256_srli_epi32::<23>(bits);
            let outside = _mm256_or_si256(
                _mm256_cmpeq_epi32(e, _mm256_setzero_si256()),
                _mm256_cmpgt_epi32(e, _mm256_set1_epi32(127)),
            );
            if _mm256_movemask_epi8(outside) != 0 {
                for v in chunk {
                    *v = self.pow(*v);
                }
                continue;
            }
            let m = _mm256_and_si256(bits, _mm256_set1_epi32(0x7F_FFFF));
            let i = _mm256_srl_epi32(m, _mm_cvtsi32_si128(shift));
            let t = _mm256_mul_ps(
                _mm256_cvtepi32_ps(_mm256_and_si256(m, _mm256_set1_epi32((1 << shift) - 1))),
                _mm256_set1_ps(1.0 / (1u32 << shift) as f32),
            );
            // SAFETY: `i < 2^GAMMA_SEGMENT_BITS` indexes the mantissa table
            // with one entry to spare, and `1 <= e <= 127` indexes `scale`.
            let a = _mm256_i32gather_ps::<4>(mantissa, i);
            let b = _mm256_i32gather_ps::<4>(mantissa.add(1), i);
            let s = _mm256_i32gather_ps::<4>(scale, e);
            let r = _mm256_mul_ps(_mm256_add_ps(a, _mm256_mul_ps(_mm256_sub_ps(b, a), t)), s);
            _mm256_storeu_ps(chunk.as_mut_ptr(), r);
        }
        for v in chunks.into_remainder() {
            *v = self.pow(*v);
        }
    }

    #[inline]
    fn pow(&self, v: f32) -> f32 {
        let bits = v.to_bits();
        let e = (bits >> 23) as usize;
        if e == 0 || e > 127 {
            // Zero, subnormals and anything outside the clamped range.
            return v.powf(self.gamma);
        }
        let m = bits & 0x7F_FFFF;
        let shift = 23 - GAMMA_SEGMENT_BITS;
        let i = (m >> shift) as usize;
        let t = (m & ((1 << shift) - 1)) as f32 * (1.0 / (1u32 << shift) as f32);
        let (a, b) = (self.mantissa[i], self.mantissa[i + 1]);
        (a + (b - a) * t) * self.scale[e]
    }
}

pub(super) fn cataracts(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &Cataract,
    cache: &mut ShaderCache,
) -> Frame {
    let veil = (0.6 * cfg.severity) as f32;
    let clouded = if veil == 0.0 {
        frame.clone()
    } else {
        frame.map(|_, _, p| mix_rgb(p, [CATARACT_VEIL; 3], veil))
    };
    if cfg.frosting == 0.0 {
        return clouded;
    }

    let m = frame.width().min(frame.height()) as f64;
    let amplitude = cfg.frosting * 0.01 * m;
    // Grain of roughly four pixels, independent of resolution.
    let noise = cache.noise(shader_seed(ctx.seed, FROSTING_SALT), 2, m / 4.0);
    Frame::generate(frame.width(), frame.height(), |x, y| {
        let (u, v) = ((x as f64 + 0.5) / m, (y as f64 + 0.5) / m);
        let dx = amplitude * noise.value(u, v, 0.0);
        let dy = amplitude * noise.value(u + 17.31, v + 9.77, 0.0);
        clouded.sample(
            (x as f64 + 0.5 - dx) as f32,
            (y as f64 + 0.5 - dy) as f32,
        )
    })
}
