//! Geometric shaders: every output pixel is a bilinear read of the input at a
//! displaced position.

use super::{
    shader_seed, Distortion, DoubleVision, InFilling, MetamorphOverlay, MetamorphPoint, Nystagmus,
    RenderContext, ShaderCache,
};
use crate::frame::{lerp_rgb, Frame, Rgb};

/// Band half-width of the pointwise metamorphopsia lines, fraction of height.
pub const METAMORPH_BAND: f64 = 0.02;
/// Peak displacement on the line itself, fraction of height.
pub const METAMORPH_PEAK: f64 = 0.01;
/// Gray painted inside the distortion's inner radius.
pub const DISTORTION_CORE: f32 = 0.5;
/// Largest noise jitter of the distortion remap, pixels.
pub const DISTORTION_JITTER: f64 = 2.0;

const DISTORTION_SALT: u64 = 0xD157;

#[inline]
fn sample(frame: &Frame, x: f64, y: f64) -> Rgb {
    frame.sample(x as f32, y as f32)
}

/// Displacement bump across a band: `peak` on the line, zero with zero slope
/// at `|s| = half_width`.
fn bump(s: f64, peak: f64, half_width: f64) -> f64 {
    let a = s.abs() / half_width;
    if a >= 1.0 {
        0.0
    } else {
        let q = 1.0 - a * a;
        peak * q * q
    }
}

/// Inverts `s -> s + bump(s)` on `[-half_width, half_width]`. The map is
/// strictly increasing because the peak is below `0.65 * half_width`.
fn unbump(out: f64, peak: f64, half_width: f64) -> f64 {
    let (mut lo, mut hi) = (-half_width, half_width);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid + bump(mid, peak, half_width) < out {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub(super) fn metamorph_pointwise(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &MetamorphPoint,
    _: &mut ShaderCache,
) -> Frame {
    let h = frame.height() as f64;
    let peak = METAMORPH_PEAK * h * cfg.strength;
    let hw = METAMORPH_BAND * h;
    if peak == 0.0 {
        return frame.clone();
    }
    let (gx, gy) = ctx.gaze_in(frame);
    frame.map(|x, y, px| {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        let (dx, dy) = (cx - gx, cy - gy);
        let near_h = dy.abs() < hw;
        let near_v = dx.abs() < hw;
        if !near_h && !near_v {
            return px;
        }
        // Vertical displacement across the horizontal line, horizontal across
        // the vertical one.
        let sy = if near_h { gy + unbump(dy, peak, hw) } else { cy };
        let sx = if near_v { gx + unbump(dx, peak, hw) } else { cx };
        sample(frame, sx, sy)
    })
}

/// Horizontal offset in pixels at time `t`: a sawtooth rising to the
/// amplitude over `speed` seconds.
pub fn nystagmus_offset(width: usize, cfg: &Nystagmus, t: f64) -> f64 {
    if cfg.speed == 0.0 || !t.is_finite() {
        return 0.0;
    }
    let phase = t / cfg.speed;
    cfg.amplitude / 100.0 * width as f64 * (phase - phase.floor())
}

pub(super) fn nystagmus(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &Nystagmus,
    _: &mut ShaderCache,
) -> Frame {
    let o = nystagmus_offset(frame.width(), cfg, ctx.time);
    if o == 0.0 {
        return frame.clone();
    }
    frame.map(|x, y, _| sample(frame, x as f64 + 0.5 - o, y as f64 + 0.5))
}

pub(super) fn metamorph_overlay(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &MetamorphOverlay,
    _: &mut ShaderCache,
) -> Frame {
    let (w, h) = (frame.width() as f64, frame.height() as f64);
    let amp = cfg.amplitude * 0.05 * w.min(h);
    if amp == 0.0 {
        return frame.clone();
    }
    let tau = std::f64::consts::TAU;
    let k = cfg.frequency * 10.0;
    let shift = cfg.speed * ctx.time;
    frame.map(|x, y, _| {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        let dx = amp * (tau * (k * cy / h + shift)).sin();
        let dy = amp * (tau * (k * cx / w + shift)).sin();
        sample(frame, cx - dx, cy - dy)
    })
}

pub(super) fn in_filling(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &InFilling,
    _: &mut ShaderCache,
) -> Frame {
    let full = frame.full_size();
    let rd = cfg.size * full;
    if rd == 0.0 {
        return frame.clone();
    }
    let (gx, gy) = ctx.gaze_in(frame);
    let (ox, oy) = (gx + cfg.position_x * full, gy + cfg.position_y * full);
    let ring = 1.1 * rd;
    frame.map(|x, y, px| {
        let (dx, dy) = (x as f64 + 0.5 - ox, y as f64 + 0.5 - oy);
        let r = (dx * dx + dy * dy).sqrt();
        if r >= rd {
            return px;
        }
        let (ux, uy) = if r > 0.0 { (dx / r, dy / r) } else { (1.0, 0.0) };
        let near = sample(frame, ox + ux * ring, oy + uy * ring);
        let far = sample(frame, ox - ux * ring, oy - uy * ring);
        lerp_rgb(far, near, ((1.0 + r / rd) / 2.0) as f32)
    })
}

pub(super) fn double_vision(
    frame: &Frame,
    _: &RenderContext,
    cfg: &DoubleVision,
    _: &mut ShaderCache,
) -> Frame {
    let d = cfg.displacement * frame.full_size();
    if d == 0.0 {
        return frame.clone();
    }
    frame.map(|x, y, _| {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        let a = sample(frame, cx - d, cy);
        let b = sample(frame, cx + d, cy);
        [
            0.5 * a[0] + 0.5 * b[0],
            0.5 * a[1] + 0.5 * b[1],
            0.5 * a[2] + 0.5 * b[2],
        ]
    })
}

/// Radius the distortion reads from for an output pixel at radius `r`.
pub fn distortion_source_radius(r: f64, radius: f64, suction: f64) -> f64 {
    if r >= radius || radius == 0.0 {
        return r;
    }
    radius * (r / radius).powf(1.0 + 4.0 * suction)
}

pub(super) fn distortion(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &Distortion,
    cache: &mut ShaderCache,
) -> Frame {
    let full = frame.full_size();
    let radius = cfg.radius * full;
    let inner = cfg.inner_radius * full;
    let identity = cfg.suction == 0.0 && cfg.inner_radius == 0.0 && cfg.noise == 0.0;
    if identity || radius == 0.0 {
        return frame.clone();
    }
    let (gx, gy) = ctx.gaze_in(frame);
    let m = frame.width().min(frame.height()) as f64;
    let noise = (cfg.noise > 0.0)
        .then(|| cache.noise(shader_seed(ctx.seed, DISTORTION_SALT), 2, m / 8.0));
    let jitter = cfg.noise * DISTORTION_JITTER;
    frame.map(|x, y, px| {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        let (dx, dy) = (cx - gx, cy - gy);
        let r = (dx * dx + dy * dy).sqrt();
        if r >= radius {
            return px;
        }
        if r < inner {
            return [DISTORTION_CORE; 3];
        }
        let scale = if r > 0.0 {
            distortion_source_radius(r, radius, cfg.suction) / r
        } else {
            0.0
        };
        let (mut sx, mut sy) = (gx + dx * scale, gy + dy * scale);
        if let Some(n) = &noise {
            // Anchored to the gaze point so the warp travels with the eye.
            let (u, v) = (dx / m, dy / m);
            sx += jitter * n.value(u, v, ctx.time);
            sy += jitter * n.value(u + 23.17, v + 5.41, ctx.time);
        }
        sample(frame, sx, sy)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symptoms as s;

    fn ctx_at(f: &Frame, gaze: (f64, f64), t: f64) -> RenderContext {
        let mut c = RenderContext::centered(f, 5);
        c.gaze = gaze;
        c.time = t;
        c
    }

    fn brightest(f: &Frame) -> (usize, usize) {
        let mut best = (0, 0);
        for y in 0..f.height() {
            for x in 0..f.width() {
                if f.get(x, y)[0] > f.get(best.0, best.1)[0] {
                    best = (x, y);
                }
            }
        }
        best
    }

    #[test]
    fn bump_inverse_round_trips() {
        let (peak, hw) = (1.0, 2.0);
        for k in -100..=100 {
            let s = k as f64 * 0.0199;
            let out = s + bump(s, peak, hw);
            assert!((unbump(out, peak, hw) - s).abs() < 1e-9);
        }
    }

    #[test]
    fn pointwise_shifts_line_pixel_by_peak() {
        let mut f = Frame::filled(100, 100, [0.0; 3]).unwrap();
        f.set(20, 50, [1.0; 3]);
        let out = s::metamorph_pointwise(&f, &ctx_at(&f, (50.5, 50.5), 0.0), &MetamorphPoint { strength: 1.0 })
            .unwrap();
        // Peak displacement is 0.01 * 100 = 1 px downwards.
        assert_eq!(brightest(&out), (20, 51));
        assert!(out.get(20, 51)[0] > 0.99);
    }

    #[test]
    fn pointwise_far_pixels_untouched() {
        let f = Frame::from_fn(80, 80, |x, y| [((x * y) % 7) as f32 / 6.0; 3]).unwrap();
        let out = s::metamorph_pointwise(&f, &ctx_at(&f, (40.0, 40.0), 0.0), &MetamorphPoint { strength: 1.0 })
            .unwrap();
        for y in 0..80 {
            for x in 0..80 {
                let far = (x as f64 + 0.5 - 40.0).abs() >= 1.6 && (y as f64 + 0.5 - 40.0).abs() >= 1.6;
                if far {
                    assert_eq!(out.get(x, y), f.get(x, y));
                }
            }
        }
    }

    #[test]
    fn nystagmus_sawtooth() {
        let f = Frame::from_fn(200, 4, |x, _| [x as f32 / 199.0; 3]).unwrap();
        let cfg = Nystagmus {
            speed: 0.4,
            amplitude: 10.0,
        };
        let out = s::nystagmus(&f, &ctx_at(&f, (0.0, 0.0), 0.2), &cfg).unwrap();
        for x in 10..200 {
            assert_eq!(out.get(x, 1), f.get(x - 10, 1));
        }
        assert_eq!(s::nystagmus(&f, &ctx_at(&f, (0.0, 0.0), 0.0), &cfg).unwrap(), f);
        let still = Nystagmus { speed: 0.0, ..cfg };
        assert_eq!(s::nystagmus(&f, &ctx_at(&f, (0.0, 0.0), 0.3), &still).unwrap(), f);
    }

    #[test]
    fn overlay_displaces_line_at_sine_peak() {
        // min(w,h) = 120, amplitude 0.5 -> A = 3 px.
        let (w, h) = (160, 120);
        let mut f = Frame::filled(w, h, [0.0; 3]).unwrap();
        for y in 0..h {
            f.set(80, y, [1.0; 3]);
        }
        // frequency 0.1 -> one period over the height; the sine peaks where
        // y/h = 0.25, i.e. at the center of row 29.5 -> use row 29 with t
        // chosen so the phase at y = 29.5 is exactly pi/2.
        let cfg = MetamorphOverlay {
            speed: 1.0,
            frequency: 0.1,
            amplitude: 0.5,
        };
        let t = 0.25 - 29.5 / 120.0;
        let out = s::metamorph_overlay(&f, &ctx_at(&f, (0.0, 0.0), t), &cfg).unwrap();
        let row: Vec<f32> = (0..w).map(|x| out.get(x, 29)[0]).collect();
        let peak = (0..w).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        assert_eq!(peak, 83);
    }

    #[test]
    fn double_vision_splits_column() {
        let mut f = Frame::filled(100, 10, [0.0; 3]).unwrap();
        for y in 0..10 {
            f.set(50, y, [1.0; 3]);
        }
        let cfg = DoubleVision { displacement: 0.05 };
        let out = s::double_vision(&f, &ctx_at(&f, (0.0, 0.0), 0.0), &cfg).unwrap();
        for x in 0..100 {
            let want = if x == 45 || x == 55 { 0.5 } else { 0.0 };
            assert_eq!(out.get(x, 3)[0], want, "x={x}");
        }
    }

    #[test]
    fn double_vision_keeps_column_constant_images() {
        let f = Frame::from_fn(64, 16, |_, y| [y as f32 / 15.0, 0.3, 0.9]).unwrap();
        let out = s::double_vision(&f, &ctx_at(&f, (0.0, 0.0), 0.0), &DoubleVision { displacement: 0.2 }).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn distortion_remap_formula() {
        let r = distortion_source_radius(50.0, 100.0, 0.25);
        assert!((r - 25.0).abs() < 1e-12);
        assert_eq!(distortion_source_radius(150.0, 100.0, 0.9), 150.0);
        assert_eq!(distortion_source_radius(30.0, 100.0, 0.0), 30.0);
    }

    #[test]
    fn distortion_core_is_gray_and_outside_untouched() {
        let f = Frame::from_fn(100, 100, |x, y| [((x + 2 * y) % 9) as f32 / 8.0; 3]).unwrap();
        let cfg = Distortion {
            radius: 0.2,
            suction: 0.5,
            inner_radius: 0.05,
            noise: 0.5,
        };
        let out = s::distortion(&f, &ctx_at(&f, (50.0, 50.0), 1.0), &cfg).unwrap();
        assert_eq!(out.get(50, 50), [0.5; 3]);
        assert_eq!(out.get(5, 5), f.get(5, 5));
        assert_eq!(out.get(80, 50), f.get(80, 50));
    }

    #[test]
    fn in_filling_hides_center_dot() {
        let mut f = Frame::filled(100, 100, [0.1; 3]).unwrap();
        f.set(50, 50, [1.0; 3]);
        let cfg = InFilling {
            size: 0.1,
            position_x: 0.0,
            position_y: 0.0,
        };
        let out = s::in_filling(&f, &ctx_at(&f, (50.5, 50.5), 0.0), &cfg).unwrap();
        for y in 42..59 {
            for x in 42..59 {
                assert!((out.get(x, y)[0] - 0.1).abs() < 1e-6, "({x},{y})");
            }
        }
    }
}
