//! Flickering stars: short-lived spots of reduced detail.
//!
//! Spots spawn on a seeded schedule: one per 0.25 s slot at a random offset
//! within the slot (4 per second on average), each alive for 0.5 s.

use super::{shader_seed, FlickeringStars, RenderContext, ShaderCache};
use crate::frame::Frame;
use crate::mip::MipPyramid;
use crate::rng;

pub const SPAWN_INTERVAL: f64 = 0.25;
pub const LIFETIME: f64 = 0.5;
/// Level of detail at a spot's center.
pub const SPOT_LOD: f64 = 3.0;

const FLICKER_SALT: u64 = 0xF11C;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spot {
    pub spawn: f64,
    pub center: (f64, f64),
    pub radius: f64,
}

/// Spots alive at time `t` for a `width x height` frame.
pub fn live_spots(seed: u64, t: f64, width: usize, height: usize, max_radius: f64) -> Vec<Spot> {
    if max_radius <= 0.0 || !t.is_finite() || t < 0.0 {
        return Vec::new();
    }
    let seed = shader_seed(seed, FLICKER_SALT);
    let last = (t / SPAWN_INTERVAL).floor() as i64;
    let first = (((t - LIFETIME) / SPAWN_INTERVAL).floor() as i64).max(0);
    (first..=last)
        .filter_map(|slot| {
            let mut r = rng::stream(seed, 0, slot as u64);
            let spawn = (slot as f64 + r.next_f64()) * SPAWN_INTERVAL;
            let center = (r.next_f64() * width as f64, r.next_f64() * height as f64);
            // (0, max_radius]
            let radius = max_radius * (1.0 - r.next_f64());
            (spawn <= t && t < spawn + LIFETIME).then_some(Spot {
                spawn,
                center,
                radius,
            })
        })
        .collect()
}

pub(super) fn render(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &FlickeringStars,
    _: &mut ShaderCache,
) -> Frame {
    let max_radius = cfg.radius * frame.full_size();
    let spots = live_spots(ctx.seed, ctx.time, frame.width(), frame.height(), max_radius);
    if spots.is_empty() {
        return frame.clone();
    }
    let pyramid = MipPyramid::new(frame);
    frame.map(|x, y, px| {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        let lod = spots
            .iter()
            .filter_map(|s| {
                let d = ((cx - s.center.0).powi(2) + (cy - s.center.1).powi(2)).sqrt();
                (d < s.radius).then(|| SPOT_LOD * (1.0 - cfg.fade * d / s.radius))
            })
            .fold(0.0, f64::max);
        if lod == 0.0 {
            px
        } else {
            pyramid.sample(cx as f32, cy as f32, lod as f32)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_deterministic_and_bounded() {
        for k in 0..200 {
            let t = k as f64 * 0.037;
            let a = live_spots(9, t, 320, 200, 20.0);
            assert_eq!(a, live_spots(9, t, 320, 200, 20.0));
            assert!(a.len() <= 3);
            for s in &a {
                assert!(s.radius > 0.0 && s.radius <= 20.0);
                assert!(s.spawn <= t && t < s.spawn + LIFETIME);
            }
        }
    }

    #[test]
    fn average_rate_is_four_per_second() {
        // Each slot spawns exactly one spot; count spawn times in [0, 100).
        let mut spawns = std::collections::BTreeSet::new();
        for k in 0..4000 {
            for s in live_spots(3, k as f64 * 0.025, 100, 100, 5.0) {
                spawns.insert(s.spawn.to_bits());
            }
        }
        let n = spawns.len() as f64;
        assert!((n / 100.0 - 4.0).abs() < 0.1, "{n}");
    }
}
