//! Retinopathy floaters: noise-shaped dark or light blobs that drift around
//! the point of gaze.

use std::sync::Arc;

use super::params::{ParamField, ParamValue};
use super::{shader_seed, RenderContext, Retinopathy, ShaderCache};
use crate::frame::{mix_rgb, Frame};
use crate::noise::NoiseField;
use crate::rng;

/// Base floater radius range before scaling, in units of `0.01 * min(w, h) / 4`.
pub const BASE_RADIUS: (f64, f64) = (2.0, 12.0);
/// Angular speed of the centered ring at `speed = 1`, radians per second.
pub const ORBIT_RATE: f64 = 1.0;
/// Drift speed at `speed = 1`, fraction of full screen per second.
pub const DRIFT_RATE: f64 = 0.05;

const FLOATER_SALT: u64 = 0xF10A;
const SHAPE_SALT: u64 = 0x5BA9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloaterColor {
    Black,
    White,
}

impl FloaterColor {
    pub const OPTIONS: &'static [&'static str] = &["black", "white"];

    pub fn as_str(self) -> &'static str {
        match self {
            FloaterColor::Black => "black",
            FloaterColor::White => "white",
        }
    }

    fn value(self) -> f32 {
        match self {
            FloaterColor::Black => 0.0,
            FloaterColor::White => 1.0,
        }
    }
}

impl ParamField for FloaterColor {
    fn to_value(&self) -> ParamValue {
        ParamValue::Choice(self.as_str())
    }
    fn from_value(v: ParamValue) -> Option<Self> {
        match v {
            ParamValue::Choice("black") => Some(FloaterColor::Black),
            ParamValue::Choice("white") => Some(FloaterColor::White),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(super) struct LayoutKey {
    seed: u64,
    count: u32,
}

/// Resolution-independent draw of one floater; all fields in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct Floater {
    u: f64,
    v: f64,
    size: f64,
    heading: f64,
    rate: f64,
    phase: f64,
}

fn layout(seed: u64, count: u32) -> Vec<Floater> {
    (0..count as u64)
        .map(|i| {
            let mut r = rng::stream(seed, 1, i);
            Floater {
                u: r.next_f64(),
                v: r.next_f64(),
                size: r.next_f64(),
                heading: r.next_f64(),
                rate: r.next_f64(),
                phase: r.next_f64(),
            }
        })
        .collect()
}

impl ShaderCache {
    fn floater_layout(&mut self, seed: u64, count: u32) -> Arc<Vec<Floater>> {
        self.floaters
            .entry(LayoutKey { seed, count })
            .or_insert_with(|| Arc::new(layout(seed, count)))
            .clone()
    }
}

/// One blob as drawn into a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloaterInstance {
    /// Pixel coordinates.
    pub center: (f64, f64),
    /// Pixels.
    pub radius: f64,
    /// Offset into the shape noise, keeps blobs distinct.
    pub shape_offset: f64,
}

fn instances(
    floaters: &[Floater],
    width: usize,
    height: usize,
    ctx: &RenderContext,
    cfg: &Retinopathy,
) -> Vec<FloaterInstance> {
    let (w, h) = (width as f64, height as f64);
    let full = w.max(h);
    let (gx, gy) = {
        let fix = |v: f64, max: f64| if v.is_finite() { v.clamp(0.0, max) } else { max / 2.0 };
        (fix(ctx.gaze.0, w), fix(ctx.gaze.1, h))
    };
    let unit = 0.01 * w.min(h) / 4.0 * cfg.floater_size;
    let ring = cfg.circle_radius * full;
    let t = if ctx.time.is_finite() { ctx.time } else { 0.0 };
    let tau = std::f64::consts::TAU;
    floaters
        .iter()
        .map(|f| {
            // Per-floater speed between 0.5x and 1.5x of the nominal rate.
            let rate = cfg.speed * (0.5 + f.rate);
            let center = if cfg.centering {
                let rho = ring * f.u.sqrt();
                let theta = tau * f.v + ORBIT_RATE * rate * t;
                (gx + rho * theta.cos(), gy + rho * theta.sin())
            } else {
                let drift = DRIFT_RATE * full * rate * t;
                let (hx, hy) = ((tau * f.heading).cos(), (tau * f.heading).sin());
                let wrap = |p: f64, len: f64| (p + len / 2.0).rem_euclid(len) - len / 2.0;
                (
                    gx + wrap(f.u * w + drift * hx, w),
                    gy + wrap(f.v * h + drift * hy, h),
                )
            };
            FloaterInstance {
                center,
                radius: unit * (BASE_RADIUS.0 + (BASE_RADIUS.1 - BASE_RADIUS.0) * f.size),
                shape_offset: 97.0 * f.phase,
            }
        })
        .collect()
}

/// The blobs `render` draws for a `width x height` frame, in draw order.
pub fn floater_draw_list(
    width: usize,
    height: usize,
    ctx: &RenderContext,
    cfg: &Retinopathy,
) -> Vec<FloaterInstance> {
    let floaters = layout(shader_seed(ctx.seed, FLOATER_SALT), cfg.density as u32);
    instances(&floaters, width, height, ctx, cfg)
}

pub(super) fn render(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &Retinopathy,
    cache: &mut ShaderCache,
) -> Frame {
    if cfg.density == 0.0 || cfg.opacity == 0.0 {
        return frame.clone();
    }
    let floaters = cache.floater_layout(shader_seed(ctx.seed, FLOATER_SALT), cfg.density as u32);
    let shape: Arc<NoiseField> = cache.noise(shader_seed(ctx.seed, SHAPE_SALT), 2, 1.5);
    let list = instances(&floaters, frame.width(), frame.height(), ctx, cfg);
    let color = [cfg.color.value(); 3];
    let opacity = cfg.opacity;

    let mut out = frame.clone();
    let (w, h) = (frame.width() as isize, frame.height() as isize);
    for f in &list {
        let (cx, cy) = f.center;
        let r = f.radius;
        let x0 = ((cx - r).floor() as isize).max(0);
        let x1 = ((cx + r).ceil() as isize).min(w - 1);
        let y0 = ((cy - r).floor() as isize).max(0);
        let y1 = ((cy + r).ceil() as isize).min(h - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let dx = (x as f64 + 0.5 - cx) / r;
                let dy = (y as f64 + 0.5 - cy) / r;
                let d2 = dx * dx + dy * dy;
                if d2 >= 1.0 {
                    continue;
                }
                let falloff = (1.0 - d2) * (1.0 - d2);
                let n = shape.value(dx + f.shape_offset, dy, 0.0);
                let alpha = (opacity * falloff * (0.5 + n).clamp(0.0, 1.0)) as f32;
                if alpha > 0.0 {
                    let (xu, yu) = (x as usize, y as usize);
                    out.set(xu, yu, mix_rgb(out.get(xu, yu), color, alpha));
                }
            }
        }
    }
    out
}
