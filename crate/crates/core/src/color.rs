//! sRGB transfer function and luminance helpers.
//!
//! Kernels run in linear light; 8-bit sRGB exists only at the IO boundary.

use std::sync::OnceLock;

use crate::frame::Rgb;

/// Rec. 709 / sRGB relative luminance weights.
pub const LUMA_709: [f32; 3] = [0.2126, 0.7152, 0.0722];

fn decode_table() -> &'static [f32; 256] {
    static TABLE: OnceLock<[f32; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0f32; 256];
        for (i, v) in t.iter_mut().enumerate() {
            *v = srgb_to_linear_f64(i as f64 / 255.0) as f32;
        }
        t
    })
}

pub fn srgb_to_linear_f64(s: f64) -> f64 {
    if s <= 0.04045 {
        s / 12.92
    } else {
        ((s + 0.055) / 1.055).powf(2.4)
    }
}

pub fn linear_to_srgb_f64(l: f64) -> f64 {
    if l <= 0.003_130_8 {
        l * 12.92
    } else {
        1.055 * l.powf(1.0 / 2.4) - 0.055
    }
}

#[inline]
pub fn decode_u8(v: u8) -> f32 {
    decode_table()[v as usize]
}

/// Linear value to 8-bit sRGB, rounding to nearest.
#[inline]
pub fn encode_u8(l: f32) -> u8 {
    let l = crate::frame::clamp01(l) as f64;
    (linear_to_srgb_f64(l) * 255.0).round() as u8
}

pub fn decode_rgb8(px: [u8; 3]) -> Rgb {
    [decode_u8(px[0]), decode_u8(px[1]), decode_u8(px[2])]
}

pub fn encode_rgb8(px: Rgb) -> [u8; 3] {
    [encode_u8(px[0]), encode_u8(px[1]), encode_u8(px[2])]
}

#[inline]
pub fn luminance(px: Rgb) -> f32 {
    LUMA_709[0] * px[0] + LUMA_709[1] * px[1] + LUMA_709[2] * px[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_8bit_value_round_trips() {
        for v in 0..=255u8 {
            assert_eq!(encode_u8(decode_u8(v)), v, "value {v}");
        }
    }

    #[test]
    fn transfer_endpoints() {
        assert_eq!(decode_u8(0), 0.0);
        assert_eq!(decode_u8(255), 1.0);
        assert!((decode_u8(188) - 0.5029).abs() < 1e-3);
    }
}
