use std::path::Path;

use image::imageops::{self, FilterType};

use crate::frame::Frame;
use crate::io::{self, from_rgb8, to_rgb8};
use crate::{Error, Result};

/// Neutral gray around a letterboxed plate.
pub const PLATE_BACKGROUND: f32 = 0.5;

/// Centers `plate` on a `width x height` gray canvas. Plates that do not fit
/// are first downscaled with a triangle (bilinear) filter in sRGB space,
/// preserving aspect ratio; plates that fit are copied unchanged.
pub fn letterbox(plate: &Frame, width: u32, height: u32) -> Result<Frame> {
    if width == 0 || height == 0 {
        return Err(Error::Assessment("display size must be positive".into()));
    }
    let (pw, ph) = (plate.width() as u32, plate.height() as u32);
    let fitted = if pw <= width && ph <= height {
        plate.clone()
    } else {
        let scale = (width as f64 / pw as f64).min(height as f64 / ph as f64);
        let nw = ((pw as f64 * scale).round() as u32).clamp(1, width);
        let nh = ((ph as f64 * scale).round() as u32).clamp(1, height);
        from_rgb8(&imageops::resize(&to_rgb8(plate), nw, nh, FilterType::Triangle))
    };
    let mut out = Frame::filled(width as usize, height as usize, [PLATE_BACKGROUND; 3])?;
    let x0 = (width as usize - fitted.width()) / 2;
    let y0 = (height as usize - fitted.height()) / 2;
    for y in 0..fitted.height() {
        for x in 0..fitted.width() {
            out.set(x0 + x, y0 + y, fitted.get(x, y));
        }
    }
    Ok(out)
}

/// Loads an externally supplied test plate and letterboxes it.
pub fn display_plate(path: impl AsRef<Path>, width: u32, height: u32) -> Result<Frame> {
    letterbox(&io::read_image(path)?, width, height)
}
