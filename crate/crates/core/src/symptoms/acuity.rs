//! Resolution shaders: hyperopic blur, glare bloom and mosaic detail loss.

use super::{DetailLoss, Glare, Hyperopia, RenderContext, ShaderCache};
use crate::blur::gaussian_blur;
use crate::frame::{clamp01, lerp_rgb, Frame};

/// Blur standard deviation in pixels for an acuity of `cpd` cycles/degree.
///
/// The Nyquist-matched kernel `ppd / (2 cpd)` is reduced in quadrature by the
/// one-pixel sampling blur the display already imposes, so acuities the
/// display cannot resolve anyway leave the image untouched.
pub fn hyperopia_sigma(pixels_per_degree: f64, cpd: f64) -> f64 {
    let nominal = pixels_per_degree / (2.0 * cpd);
    (nominal * nominal - 1.0).max(0.0).sqrt()
}

pub(super) fn hyperopia(
    frame: &Frame,
    ctx: &RenderContext,
    cfg: &Hyperopia,
    _: &mut ShaderCache,
) -> Frame {
    let sigma = hyperopia_sigma(ctx.pixels_per_degree(), cfg.cpd);
    gaussian_blur(frame, sigma).expect("sigma is finite for validated geometry")
}

pub(super) fn glare(frame: &Frame, _: &RenderContext, cfg: &Glare, _: &mut ShaderCache) -> Frame {
    if cfg.intensity == 0.0 || cfg.threshold >= 1.0 {
        return frame.clone();
    }
    let th = cfg.threshold as f32;
    let mask = frame.map(|_, _, p| p.map(|v| (v - th).max(0.0) / (1.0 - th)));
    let sigma = cfg.blur * 0.02 * frame.width() as f64;
    let bloom = gaussian_blur(&mask, sigma).expect("sigma in range");
    let k = cfg.intensity as f32;
    frame.map(|x, y, p| {
        let b = bloom.get(x, y);
        [
            clamp01(p[0] + k * b[0]),
            clamp01(p[1] + k * b[1]),
            clamp01(p[2] + k * b[2]),
        ]
    })
}

/// Piecewise-linear interpolation weights from pixel centers onto cell
/// centers along one axis: `(left cell, right cell, t)` per pixel.
fn axis_weights(len: usize, cell: f64) -> (usize, Vec<(usize, usize, f32)>) {
    let cells = ((len as f64 - 0.5) / cell).floor() as usize + 1;
    let centers: Vec<f64> = (0..cells)
        .map(|i| {
            let lo = i as f64 * cell;
            let hi = ((i + 1) as f64 * cell).min(len as f64);
            (lo + hi) / 2.0
        })
        .collect();
    let weights = (0..len)
        .map(|p| {
            let c = p as f64 + 0.5;
            let i = centers.partition_point(|&m| m <= c);
            if i == 0 {
                (0, 0, 0.0)
            } else if i == cells {
                (cells - 1, cells - 1, 0.0)
            } else {
                let t = (c - centers[i - 1]) / (centers[i] - centers[i - 1]);
                (i - 1, i, t as f32)
            }
        })
        .collect();
    (cells, weights)
}

pub(super) fn detail_loss(
    frame: &Frame,
    _: &RenderContext,
    cfg: &DetailLoss,
    _: &mut ShaderCache,
) -> Frame {
    let full = frame.full_size();
    if cfg.clusters >= full {
        return frame.clone();
    }
    let cell = full / cfg.clusters;
    let (w, h) = (frame.width(), frame.height());
    let (nx, wx) = axis_weights(w, cell);
    let (ny, wy) = axis_weights(h, cell);

    let mut sums = vec![[0f64; 3]; nx * ny];
    let mut counts = vec![0u32; nx * ny];
    for y in 0..h {
        let cy = ((y as f64 + 0.5) / cell) as usize;
        for (x, p) in frame.row(y).iter().enumerate() {
            let i = cy * nx + ((x as f64 + 0.5) / cell) as usize;
            for c in 0..3 {
                sums[i][c] += p[c] as f64;
            }
            counts[i] += 1;
        }
    }
    let cluster: Vec<[f32; 3]> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| s.map(|v| (v / n.max(1) as f64) as f32))
        .collect();

    Frame::generate(w, h, |x, y| {
        let (x0, x1, tx) = wx[x];
        let (y0, y1, ty) = wy[y];
        let top = lerp_rgb(cluster[y0 * nx + x0], cluster[y0 * nx + x1], tx);
        let bottom = lerp_rgb(cluster[y1 * nx + x0], cluster[y1 * nx + x1], tx);
        lerp_rgb(top, bottom, ty)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symptoms::{detail_loss as run_detail, glare as run_glare, hyperopia as run_hyp};

    fn ctx(f: &Frame) -> RenderContext {
        RenderContext::centered(f, 1)
    }

    #[test]
    fn sigma_vanishes_at_display_limit() {
        assert_eq!(hyperopia_sigma(44.95, 30.0), 0.0);
        let s = hyperopia_sigma(45.0, 5.0);
        assert!((s - (4.5f64 * 4.5 - 1.0).sqrt()).abs() < 1e-12);
        assert!(hyperopia_sigma(45.0, 0.01) > 2000.0);
    }

    #[test]
    fn sigma_is_monotone_in_cpd() {
        let mut last = f64::INFINITY;
        for k in 1..=3000 {
            let s = hyperopia_sigma(45.0, k as f64 * 0.01);
            assert!(s <= last);
            last = s;
        }
    }

    #[test]
    fn strongest_blur_approaches_mean() {
        let f = Frame::from_fn(64, 48, |x, y| [((x * 7 + y * 3) % 11) as f32 / 10.0; 3]).unwrap();
        let out = run_hyp(&f, &ctx(&f), &Hyperopia { cpd: 0.01 }).unwrap();
        let mean = f.mean()[0];
        for y in 16..32 {
            for x in 16..48 {
                assert!((out.get(x, y)[0] - mean).abs() < 0.01);
            }
        }
    }

    #[test]
    fn glare_leaves_black_black() {
        let f = Frame::filled(40, 30, [0.0; 3]).unwrap();
        let g = Glare {
            intensity: 1.0,
            blur: 1.0,
            threshold: 0.2,
        };
        assert_eq!(run_glare(&f, &ctx(&f), &g).unwrap(), f);
    }

    #[test]
    fn glare_threshold_one_is_identity() {
        let f = Frame::from_fn(20, 20, |x, _| [x as f32 / 19.0; 3]).unwrap();
        let g = Glare {
            intensity: 1.0,
            blur: 0.5,
            threshold: 1.0,
        };
        assert_eq!(run_glare(&f, &ctx(&f), &g).unwrap(), f);
    }

    #[test]
    fn glare_brightens_around_highlight() {
        let mut f = Frame::filled(50, 50, [0.1; 3]).unwrap();
        f.set(25, 25, [1.0; 3]);
        let g = Glare {
            intensity: 1.0,
            blur: 0.5,
            threshold: 0.5,
        };
        let out = run_glare(&f, &ctx(&f), &g).unwrap();
        assert!(out.get(26, 25)[0] > 0.1);
        assert_eq!(out.get(0, 0)[0], 0.1);
    }

    #[test]
    fn detail_loss_cluster_center_keeps_tone() {
        let f = Frame::from_fn(100, 100, |x, _| if x < 50 { [0.2; 3] } else { [0.8; 3] }).unwrap();
        let out = run_detail(&f, &ctx(&f), &DetailLoss { clusters: 10.0 }).unwrap();
        for y in [4, 5, 50, 95] {
            assert_eq!(out.get(5, y), [0.2; 3]);
            assert_eq!(out.get(94, y), [0.8; 3]);
        }
        // Between the two middle cluster centers the tones blend.
        let mid = out.get(50, 50)[0];
        assert!(mid > 0.2 && mid < 0.8);
    }

    #[test]
    fn detail_loss_degenerate_grid_is_identity() {
        let f = Frame::from_fn(30, 20, |x, y| [(x ^ y) as f32 / 31.0; 3]).unwrap();
        let out = run_detail(&f, &ctx(&f), &DetailLoss { clusters: 30.0 }).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn detail_loss_handles_partial_cells() {
        let f = Frame::from_fn(37, 23, |x, y| [((x + y) % 5) as f32 / 4.0; 3]).unwrap();
        let out = run_detail(&f, &ctx(&f), &DetailLoss { clusters: 10.0 }).unwrap();
        assert_eq!((out.width(), out.height()), (37, 23));
        let u = Frame::filled(37, 23, [0.3; 3]).unwrap();
        let out = run_detail(&u, &ctx(&u), &DetailLoss { clusters: 10.0 }).unwrap();
        assert!(out.max_abs_diff(&u) < 1e-6);
    }
}
