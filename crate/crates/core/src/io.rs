//! Image IO: 8-bit sRGB PNG via `image`, binary PPM (P6) by hand.

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage};

use crate::color::{decode_rgb8, encode_rgb8};
use crate::frame::Frame;
use crate::{Error, Result};

/// Largest raster accepted from untrusted input (32 megapixels).
pub const MAX_PIXELS: u64 = 32_000_000;

pub fn read_image(path: impl AsRef<Path>) -> Result<Frame> {
    let bytes = std::fs::read(path.as_ref())?;
    decode_image(&bytes)
}

/// Decodes PNG or P6 PPM bytes into a linear frame. Alpha is discarded.
pub fn decode_image(bytes: &[u8]) -> Result<Frame> {
    if bytes.starts_with(b"P6") {
        return decode_ppm(bytes);
    }
    let (w, h) = image_dimensions(bytes)?;
    if (w as u64) * (h as u64) > MAX_PIXELS {
        return Err(Error::Decode(format!(
            "{w}x{h} exceeds the {MAX_PIXELS}-pixel limit"
        )));
    }
    let img = image::load_from_memory(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    Ok(from_rgb8(&img.to_rgb8()))
}

/// Reads only the header of a PNG/PPM buffer.
pub fn image_dimensions(bytes: &[u8]) -> Result<(u32, u32)> {
    if bytes.starts_with(b"P6") {
        let (w, h, _, _) = ppm_header(bytes)?;
        return Ok((w as u32, h as u32));
    }
    image::ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::Decode(e.to_string()))?
        .into_dimensions()
        .map_err(|e| Error::Decode(e.to_string()))
}

pub fn from_rgb8(img: &RgbImage) -> Frame {
    let pixels = img.pixels().map(|p| decode_rgb8(p.0)).collect();
    Frame::from_data(img.width() as usize, img.height() as usize, pixels)
        .expect("decoded images are non-empty")
}

pub fn to_rgb8(frame: &Frame) -> RgbImage {
    let mut buf = Vec::with_capacity(frame.width() * frame.height() * 3);
    for px in frame.pixels() {
        buf.extend_from_slice(&encode_rgb8(*px));
    }
    RgbImage::from_raw(frame.width() as u32, frame.height() as u32, buf)
        .expect("buffer matches dimensions")
}

pub fn encode_png(frame: &Frame) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    to_rgb8(frame)
        .write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(out.into_inner())
}

/// Writes PNG, or PPM when the extension is `.ppm`.
pub fn write_image(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_ppm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
    let bytes = if is_ppm {
        encode_ppm(frame)
    } else {
        encode_png(frame)?
    };
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    for px in frame.pixels() {
        out.extend_from_slice(&encode_rgb8(*px));
    }
    out
}

pub fn decode_ppm(bytes: &[u8]) -> Result<Frame> {
    let (w, h, maxval, offset) = ppm_header(bytes)?;
    if maxval != 255 {
        return Err(Error::Decode(format!("unsupported PPM maxval {maxval}")));
    }
    if (w as u64) * (h as u64) > MAX_PIXELS {
        return Err(Error::Decode(format!("{w}x{h} exceeds the pixel limit")));
    }
    let body = &bytes[offset..];
    if body.len() < w * h * 3 {
        return Err(Error::Decode("truncated PPM body".into()));
    }
    let pixels = body[..w * h * 3]
        .chunks_exact(3)
        .map(|c| decode_rgb8([c[0], c[1], c[2]]))
        .collect();
    Frame::from_data(w, h, pixels)
}

/// Returns `(width, height, maxval, body_offset)`.
fn ppm_header(bytes: &[u8]) -> Result<(usize, usize, usize, usize)> {
    let mut fields = Vec::with_capacity(3);
    let mut i = 2;
    while fields.len() < 3 {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(Error::Decode("malformed PPM header".into()));
        }
        let text = std::str::from_utf8(&bytes[start..i]).expect("ascii digits");
        fields.push(
            text.parse::<usize>()
                .map_err(|e| Error::Decode(format!("PPM header: {e}")))?,
        );
    }
    // Exactly one whitespace byte separates the header from the raster.
    if i >= bytes.len() || !bytes[i].is_ascii_whitespace() {
        return Err(Error::Decode("malformed PPM header".into()));
    }
    if fields[0] == 0 || fields[1] == 0 {
        return Err(Error::Decode("PPM with zero dimension".into()));
    }
    Ok((fields[0], fields[1], fields[2], i + 1))
}
