//! Field loss: level-of-detail scotomas and the gray foveal occluder.

use rayon::prelude::*;

use super::{CentralLoss, FovealDarkness, PeripheralLoss, RenderContext, ShaderCache};
use crate::frame::{clamp_rgb, Frame};
use crate::mip::MipPyramid;

/// Major-to-minor axis ratio of the central scotoma (horizontal major axis).
pub const CENTRAL_ELLIPSE_ASPECT: f64 = 4.0 / 3.0;

/// Width of the blur ramp outside the peripheral tunnel, fraction of full screen.
pub const PERIPHERAL_RAMP: f64 = 0.25;

/// Gray used by occluding shaders.
pub const OCCLUDER_GRAY: f32 = 0.5;

#[inline]
pub(super) fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

pub(super) fn central(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &CentralLoss,
    _: &mut ShaderCache,
) -> Frame {
    let semi_major = cfg.size * frame.full_size() / 2.0;
    if semi_major == 0.0 {
        return frame.clone();
    }
    let semi_minor = semi_major / CENTRAL_ELLIPSE_ASPECT;
    let (gx, gy) = ctx.gaze_in(frame);
    let pyramid = MipPyramid::new(frame);
    let max_lod = pyramid.coarsest() as f64;

    let mut out = frame.clone();
    let w = frame.width();
    let (y0, y1) = span(gy, semi_minor);
    let y1 = y1.min(frame.height());
    if y0 >= y1 {
        return out;
    }
    out.pixels_mut()[y0 * w..y1 * w]
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(i, row)| {
            let cy = (y0 + i) as f64 + 0.5;
            let ry = ((cy - gy) / semi_minor).powi(2);
            if ry >= 1.0 {
                return;
            }
            // Columns whose centers can fall inside the ellipse on this row.
            let (x0, x1) = span(gx, semi_major * (1.0 - ry).sqrt());
            for x in x0..x1.min(w) {
                let cx = x as f64 + 0.5;
                let r = (((cx - gx) / semi_major).powi(2) + ry).sqrt();
                if r >= 1.0 {
                    continue;
                }
                let lod = max_lod * (1.0 - smoothstep(r));
                row[x] = clamp_rgb(pyramid.sample(cx as f32, cy as f32, lod as f32));
            }
        });
    out
}

/// Pixel indices whose centers may lie within `half` of `center`.
pub(super) fn span(center: f64, half: f64) -> (usize, usize) {
    let lo = (center - half - 1.0).floor().max(0.0) as usize;
    let hi = (center + half + 1.0).ceil().max(0.0) as usize;
    (lo, hi)
}

pub(super) fn peripheral(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &PeripheralLoss,
    _: &mut ShaderCache,
) -> Frame {
    let (w, h) = (frame.width() as f64, frame.height() as f64);
    // The full-size tunnel reaches every pixel from any gaze inside the frame.
    let radius = cfg.size * (w * w + h * h).sqrt();
    let (gx, gy) = ctx.gaze_in(frame);
    let max_dist = [(0.0, 0.0), (w, 0.0), (0.0, h), (w, h)]
        .iter()
        .map(|(x, y)| ((x - gx).powi(2) + (y - gy).powi(2)).sqrt())
        .fold(0.0, f64::max);
    if radius >= max_dist {
        return frame.clone();
    }
    let ramp = PERIPHERAL_RAMP * frame.full_size();
    let pyramid = MipPyramid::new(frame);
    let max_lod = pyramid.coarsest() as f64;

    frame.map(|x, y, px| {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        let r = ((cx - gx).powi(2) + (cy - gy).powi(2)).sqrt();
        if r <= radius {
            return px;
        }
        let lod = max_lod * smoothstep((r - radius) / ramp);
        pyramid.sample(cx as f32, cy as f32, lod as f32)
    })
}

/// Occluder opacity at distance `r` from the center of a disk of radius
/// `radius`: full inside `(1 - fade) * radius`, then a linear ramp to zero.
pub fn foveal_alpha(r: f64, radius: f64, fade: f64, opacity: f64) -> f64 {
    if r >= radius {
        return 0.0;
    }
    let inner = (1.0 - fade) * radius;
    let ramp = if r < inner {
        1.0
    } else {
        ((radius - r) / (fade * radius)).clamp(0.0, 1.0)
    };
    opacity * ramp
}

pub(super) fn foveal_darkness(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &FovealDarkness,
    _: &mut ShaderCache,
) -> Frame {
    let radius = cfg.size * frame.full_size() / 2.0;
    if radius == 0.0 || cfg.opacity == 0.0 {
        return frame.clone();
    }
    let (gx, gy) = ctx.gaze_in(frame);
    let mut out = frame.clone();
    out.update_region(span(gx, radius), span(gy, radius), |x, y, px| {
        let r = ((x as f64 + 0.5 - gx).powi(2) + (y as f64 + 0.5 - gy).powi(2)).sqrt();
        let a = foveal_alpha(r, radius, cfg.fade, cfg.opacity) as f32;
        if a == 0.0 {
            px
        } else {
            crate::frame::mix_rgb(px, [OCCLUDER_GRAY; 3], a)
        }
    });
    out
}
