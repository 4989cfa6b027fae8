//! Linear-light RGB raster.

use std::sync::Mutex;

use rayon::prelude::*;

use crate::{Error, Result};

/// One linear-light pixel, channels in `[0, 1]`.
pub type Rgb = [f32; 3];

/// Row-major raster of linear RGB triples.
///
/// Continuous coordinates place the center of pixel `(i, j)` at
/// `(i + 0.5, j + 0.5)`. Reads outside the raster clamp to the nearest edge
/// pixel.
#[derive(Debug, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<Rgb>,
}

impl Frame {
    pub fn filled(width: usize, height: usize, value: Rgb) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = scratch(width * height);
        data.fill(clamp_rgb(value));
        Ok(Frame {
            width,
            height,
            data,
        })
    }

    pub fn from_data(width: usize, height: usize, data: Vec<Rgb>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::param(
                "data",
                format!("expected {} pixels, got {}", width * height, data.len()),
            ));
        }
        let mut frame = Frame {
            width,
            height,
            data,
        };
        frame.clamp();
        Ok(frame)
    }

    /// [`Frame::from_data`] for pixels already in `[0, 1]`.
    pub(crate) fn from_clamped(width: usize, height: usize, data: Vec<Rgb>) -> Self {
        debug_assert!(width * height == data.len() && width > 0 && height > 0);
        debug_assert!(data.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        Frame {
            width,
            height,
            data,
        }
    }

    /// Builds a frame by evaluating `f(x, y)` for every pixel, rows in parallel.
    /// Results are clamped to `[0, 1]`.
    pub fn from_fn<F>(width: usize, height: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Rgb + Sync,
    {
        check_dims(width, height)?;
        Ok(Self::generate(width, height, f))
    }

    /// Same as [`Frame::from_fn`] for dimensions already known to be valid.
    pub(crate) fn generate<F>(width: usize, height: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> Rgb + Sync,
    {
        let mut data = scratch(width * height);
        data.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
            for (x, px) in row.iter_mut().enumerate() {
                *px = clamp_rgb(f(x, y));
            }
        });
        Frame {
            width,
            height,
            data,
        }
    }

    /// Same dimensions, every pixel rewritten by `f(x, y, source)`.
    pub fn map<F>(&self, f: F) -> Frame
    where
        F: Fn(usize, usize, Rgb) -> Rgb + Sync,
    {
        Self::generate(self.width, self.height, |x, y| f(x, y, self.get(x, y)))
    }

    /// Rewrites the pixels in columns `x0..x1` of rows `y0..y1` in place with
    /// `f(x, y, source)`; the range is clipped to the frame.
    pub fn update_region<F>(&mut self, (x0, x1): (usize, usize), (y0, y1): (usize, usize), f: F)
    where
        F: Fn(usize, usize, Rgb) -> Rgb + Sync,
    {
        let (x1, y1) = (x1.min(self.width), y1.min(self.height));
        if x0 >= x1 || y0 >= y1 {
            return;
        }
        let w = self.width;
        self.data[y0 * w..y1 * w]
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(i, row)| {
                for (x, px) in row[x0..x1].iter_mut().enumerate() {
                    *px = clamp_rgb(f(x0 + x, y0 + i, *px));
                }
            });
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `max(width, height)`: the pixel length that "full-screen size" maps to.
    pub fn full_size(&self) -> f64 {
        self.width.max(self.height) as f64
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.data
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.data
    }

    pub fn into_pixels(mut self) -> Vec<Rgb> {
        std::mem::take(&mut self.data)
    }

    pub fn as_flat(&self) -> &[f32] {
        self.data.as_flattened()
    }

    pub fn row(&self, y: usize) -> &[Rgb] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: Rgb) {
        self.data[y * self.width + x] = clamp_rgb(value);
    }

    /// Pixel read with clamp-to-edge for signed indices.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> Rgb {
        let xi = x.clamp(0, self.width as isize - 1) as usize;
        let yi = y.clamp(0, self.height as isize - 1) as usize;
        self.get(xi, yi)
    }

    /// Bilinear read at continuous coordinates, clamp-to-edge.
    ///
    /// Sampling exactly at a pixel center returns that pixel unchanged.
    #[inline]
    pub fn sample(&self, x: f32, y: f32) -> Rgb {
        let u = x - 0.5;
        let v = y - 0.5;
        let (x0, y0) = (floor_index(u), floor_index(v));
        let fx = u - x0 as f32;
        let fy = v - y0 as f32;
        let (w, h) = (self.width as isize, self.height as isize);
        if x0 >= 0 && y0 >= 0 && x0 + 1 < w && y0 + 1 < h {
            let i = (y0 * w + x0) as usize;
            let (w, d) = (w as usize, &self.data);
            let top = lerp_rgb(d[i], d[i + 1], fx);
            if fy == 0.0 {
                return top;
            }
            return lerp_rgb(top, lerp_rgb(d[i + w], d[i + w + 1], fx), fy);
        }
        let top = lerp_rgb(self.get_clamped(x0, y0), self.get_clamped(x0 + 1, y0), fx);
        if fy == 0.0 {
            return top;
        }
        let bottom = lerp_rgb(
            self.get_clamped(x0, y0 + 1),
            self.get_clamped(x0 + 1, y0 + 1),
            fy,
        );
        lerp_rgb(top, bottom, fy)
    }

    pub fn clamp(&mut self) {
        for v in self.data.as_flattened_mut() {
            *v = clamp01(*v);
        }
    }

    pub fn mean(&self) -> Rgb {
        let mut acc = [0f64; 3];
        for px in &self.data {
            for c in 0..3 {
                acc[c] += px[c] as f64;
            }
        }
        let n = self.data.len() as f64;
        [(acc[0] / n) as f32, (acc[1] / n) as f32, (acc[2] / n) as f32]
    }

    /// Largest per-channel absolute difference against another frame of the
    /// same size.
    pub fn max_abs_diff(&self, other: &Frame) -> f32 {
        assert_eq!(
            (self.width, self.height),
            (other.width, other.height),
            "frame size mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .flat_map(|(a, b)| (0..3).map(move |c| (a[c] - b[c]).abs()))
            .fold(0.0, f32::max)
    }
}

impl Clone for Frame {
    fn clone(&self) -> Self {
        let mut data = scratch(self.data.len());
        data.copy_from_slice(&self.data);
        Frame {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

impl Drop for Frame {
    fn drop(&mut self) {
        recycle(std::mem::take(&mut self.data));
    }
}

// Freed frame buffers are kept for reuse. Shader chains allocate a full
// frame per stage, and on some hosts faulting in fresh pages costs more
// than the shader itself.
const POOL_MIN_PIXELS: usize = 1 << 16;
const POOL_MAX_BYTES: usize = 256 << 20;

static POOL: Mutex<Vec<Vec<Rgb>>> = Mutex::new(Vec::new());

/// A buffer of `len` pixels with unspecified contents; callers overwrite
/// every element.
pub(crate) fn scratch(len: usize) -> Vec<Rgb> {
    if len >= POOL_MIN_PIXELS {
        let mut pool = POOL.lock().unwrap_or_else(|e| e.into_inner());
        let best = pool
            .iter()
            .enumerate()
            // A much larger buffer would be shortened here and need zero
            // filling when it next serves a full frame.
            .filter(|(_, v)| v.capacity() >= len && v.capacity() - len <= len / 4)
            .min_by_key(|(_, v)| v.capacity())
            .map(|(i, _)| i);
        if let Some(i) = best {
            let mut v = pool.swap_remove(i);
            drop(pool);
            v.resize(len, [0.0; 3]);
            return v;
        }
    }
    vec![[0.0; 3]; len]
}

/// Returns a buffer from [`scratch`] to the pool.
pub(crate) fn recycle(v: Vec<Rgb>) {
    if v.capacity() < POOL_MIN_PIXELS {
        return;
    }
    let bytes = |v: &Vec<Rgb>| v.capacity() * std::mem::size_of::<Rgb>();
    let mut pool = POOL.lock().unwrap_or_else(|e| e.into_inner());
    let held: usize = pool.iter().map(bytes).sum();
    if held + bytes(&v) <= POOL_MAX_BYTES {
        pool.push(v);
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::param(
            "dimensions",
            format!("frame must be at least 1x1, got {width}x{height}"),
        ));
    }
    Ok(())
}

/// `v.floor() as isize` without a libm call on targets lacking a rounding
/// instruction.
#[inline]
fn floor_index(v: f32) -> isize {
    let i = v as isize;
    if (i as f32) > v {
        i - 1
    } else {
        i
    }
}

#[inline]
pub fn clamp01(v: f32) -> f32 {
    // NaN maps to 0 so a bad kernel can never leak non-finite values.
    let v = if v > 0.0 { v } else { 0.0 };
    if v < 1.0 {
        v
    } else {
        1.0
    }
}

#[inline]
pub fn clamp_rgb(px: Rgb) -> Rgb {
    [clamp01(px[0]), clamp01(px[1]), clamp01(px[2])]
}

/// `a + (b - a) * t`; returns `a` bit-exactly when `t == 0` or `a == b`.
#[inline]
pub fn lerp_rgb(a: Rgb, b: Rgb, t: f32) -> Rgb {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

/// `a * (1 - t) + b * t`; returns `b` bit-exactly when `t == 1`.
#[inline]
pub fn mix_rgb(a: Rgb, b: Rgb, t: f32) -> Rgb {
    let s = 1.0 - t;
    [
        a[0] * s + b[0] * t,
        a[1] * s + b[1] * t,
        a[2] * s + b[2] * t,
    ]
}
