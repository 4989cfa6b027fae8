//! Teichopsia: a scintillating zig-zag arc beside the point of gaze.

use super::{shader_seed, RenderContext, ShaderCache, Teichopsia};
use crate::frame::{clamp_rgb, lerp_rgb, Frame, Rgb};
use crate::rng;

/// Arc anchor offset to the right of the gaze, fraction of width.
pub const ANCHOR_OFFSET: f64 = 0.15;
/// Arc radius, fraction of `min(w, h)`.
pub const ARC_RADIUS: f64 = 0.12;
/// Half the angular extent of the arc, radians.
pub const ARC_HALF_ANGLE: f64 = 0.6 * std::f64::consts::PI;
pub const TEETH: usize = 14;
/// Hue rotation period, seconds.
pub const PERIOD: f64 = 1.0;

const TEICH_SALT: u64 = 0x7E1C;

/// Zig-zag vertices relative to the anchor, in pixels.
pub fn arc_polyline(seed: u64, width: usize, height: usize) -> Vec<(f64, f64)> {
    let m = width.min(height) as f64;
    let radius = ARC_RADIUS * m;
    let mut r = rng::SplitMix64::new(shader_seed(seed, TEICH_SALT));
    let n = 2 * TEETH;
    (0..=n)
        .map(|i| {
            let a = -ARC_HALF_ANGLE + 2.0 * ARC_HALF_ANGLE * i as f64 / n as f64;
            let tooth = if i % 2 == 0 { 0.92 } else { 1.08 };
            let jitter = 1.0 + 0.04 * (r.next_f64() - 0.5);
            let rr = radius * tooth * jitter;
            (rr * a.cos(), rr * a.sin())
        })
        .collect()
}

/// Distance from `p` to segment `a-b` and the segment parameter of the
/// closest point.
fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (ex, ey) = (b.0 - a.0, b.1 - a.1);
    let len2 = ex * ex + ey * ey;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * ex + (p.1 - a.1) * ey) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * ex - p.0, a.1 + t * ey - p.1);
    ((qx * qx + qy * qy).sqrt(), t)
}

/// Hue rotation about the gray axis (the CSS `hue-rotate` matrix).
fn hue_rotate(p: Rgb, angle: f64) -> Rgb {
    let (c, s) = (angle.cos() as f32, angle.sin() as f32);
    let m = [
        [
            0.213 + c * 0.787 - s * 0.213,
            0.715 - c * 0.715 - s * 0.715,
            0.072 - c * 0.072 + s * 0.928,
        ],
        [
            0.213 - c * 0.213 + s * 0.143,
            0.715 + c * 0.285 + s * 0.140,
            0.072 - c * 0.072 - s * 0.283,
        ],
        [
            0.213 - c * 0.213 - s * 0.787,
            0.715 - c * 0.715 + s * 0.715,
            0.072 + c * 0.928 + s * 0.072,
        ],
    ];
    let row = |r: [f32; 3]| r[0] * p[0] + r[1] * p[1] + r[2] * p[2];
    clamp_rgb([row(m[0]), row(m[1]), row(m[2])])
}

/// Fully saturated hue, `h` in turns.
fn rainbow(h: f64) -> Rgb {
    let tau = std::f64::consts::TAU;
    let ch = |offset: f64| (0.5 + 0.5 * (tau * (h + offset)).cos()) as f32;
    [ch(0.0), ch(-1.0 / 3.0), ch(1.0 / 3.0)]
}

pub(super) fn render(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &Teichopsia,
    _: &mut ShaderCache,
) -> Frame {
    if cfg.strength == 0.0 {
        return frame.clone();
    }
    let (w, h) = (frame.width(), frame.height());
    let (gx, gy) = ctx.gaze_in(frame);
    let anchor = (gx + ANCHOR_OFFSET * w as f64, gy);
    let points: Vec<(f64, f64)> = arc_polyline(ctx.seed, w, h)
        .into_iter()
        .map(|(x, y)| (anchor.0 + x, anchor.1 + y))
        .collect();
    let band = (0.01 * w.min(h) as f64).max(1.5);
    let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
    for p in &points {
        lo = (lo.0.min(p.0 - band), lo.1.min(p.1 - band));
        hi = (hi.0.max(p.0 + band), hi.1.max(p.1 + band));
    }
    let segments = points.len() - 1;
    let t = if ctx.time.is_finite() { ctx.time } else { 0.0 };
    let strength = cfg.strength;

    frame.map(|x, y, px| {
        let p = (x as f64 + 0.5, y as f64 + 0.5);
        if p.0 < lo.0 || p.0 > hi.0 || p.1 < lo.1 || p.1 > hi.1 {
            return px;
        }
        let (mut dist, mut along) = (f64::MAX, 0.0);
        for i in 0..segments {
            let (d, s) = segment_distance(p, points[i], points[i + 1]);
            if d < dist {
                dist = d;
                along = (i as f64 + s) / segments as f64;
            }
        }
        if dist >= band {
            return px;
        }
        let q = dist / band;
        let mask = 1.0 - q * q * (3.0 - 2.0 * q);
        // The hue travels along the arc and cycles once per period.
        let turns = t / PERIOD + 3.0 * along;
        let rotated = hue_rotate(px, std::f64::consts::TAU * turns);
        let effect = lerp_rgb(rotated, rainbow(turns), 0.4);
        lerp_rgb(px, effect, (strength * mask) as f32)
    })
}
