use super::fill_rect;
use super::font::{sloan_glyph, SLOAN_LETTERS};
use crate::frame::Frame;
use crate::rng;
use crate::{Error, Result};

/// Mid-gray background; contrasts are Weber contrasts against it.
pub const CHART_BACKGROUND: f32 = 0.5;

/// Smallest luminance step the chart will draw.
const MIN_STEP: f64 = 1.0 / 255.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastChartSpec {
    pub width: u32,
    pub height: u32,
    /// Requested rows; fewer are drawn if the contrast underflows.
    pub triplets: u32,
    /// Contrast decrease per row, log10 units.
    pub contrast_step: f64,
    /// Letter height in pixels; rounded down to a multiple of 5.
    pub letter_px: u32,
    pub seed: u64,
}

impl ContrastChartSpec {
    pub fn new(width: u32, height: u32, triplets: u32) -> Self {
        ContrastChartSpec {
            width,
            height,
            triplets,
            contrast_step: 0.15,
            letter_px: 60,
            seed: 0,
        }
    }

    /// Weber contrast magnitude of row `k`.
    pub fn contrast(&self, k: u32) -> f64 {
        10f64.powf(-(k as f64) * self.contrast_step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastChart {
    pub frame: Frame,
    /// Contrast of each drawn row; its length is the row count.
    pub contrasts: Vec<f64>,
    pub letters: Vec<[char; 3]>,
    /// Pixel rows `[top, bottom)` of each triplet.
    pub row_spans: Vec<(u32, u32)>,
}

/// Rows of three letters on gray, each row dimmer by `contrast_step`.
pub fn render_contrast_chart(spec: &ContrastChartSpec) -> Result<ContrastChart> {
    if spec.triplets == 0 {
        return Err(Error::Assessment("at least one triplet is required".into()));
    }
    if !(spec.contrast_step.is_finite() && spec.contrast_step >= 0.0) {
        return Err(Error::Assessment(format!(
            "contrast step must be finite and >= 0, got {}",
            spec.contrast_step
        )));
    }
    let unit = spec.letter_px / 5;
    if unit == 0 {
        return Err(Error::Assessment("letters must be at least 5 px tall".into()));
    }
    let letter = (5 * unit) as i64;
    let gap = letter / 2;
    let row_pitch = letter + gap;
    let (w, h) = (spec.width as i64, spec.height as i64);

    let mut contrasts = Vec::new();
    for k in 0..spec.triplets {
        let c = spec.contrast(k);
        if CHART_BACKGROUND as f64 * c < MIN_STEP {
            log::info!("contrast chart stops after {k} triplets: contrast {c:.4} underflows");
            break;
        }
        contrasts.push(c);
    }
    let rows = contrasts.len() as i64;
    let needed_h = rows * row_pitch + gap;
    let needed_w = 3 * letter + 4 * gap;
    if needed_h > h || needed_w > w {
        return Err(Error::Assessment(format!(
            "{rows} triplets of {letter}px letters need {needed_w}x{needed_h} px, chart is {w}x{h}"
        )));
    }

    let mut frame = Frame::filled(w as usize, h as usize, [CHART_BACKGROUND; 3])?;
    let top = (h - needed_h) / 2 + gap;
    let left = (w - (3 * letter + 2 * gap)) / 2;
    let mut letters = Vec::new();
    let mut row_spans = Vec::new();
    for (k, &c) in contrasts.iter().enumerate() {
        let lum = (CHART_BACKGROUND as f64 * (1.0 - c)) as f32;
        let mut r = rng::stream(spec.seed, 0, k as u64);
        let mut pool = SLOAN_LETTERS.to_vec();
        let mut triplet = [' '; 3];
        for slot in &mut triplet {
            *slot = pool.remove(r.below(pool.len() as u64) as usize);
        }
        let y0 = top + k as i64 * row_pitch;
        for (i, ch) in triplet.iter().enumerate() {
            let x0 = left + i as i64 * (letter + gap);
            let glyph = sloan_glyph(*ch).expect("Sloan letter");
            for (gy, row) in glyph.iter().enumerate() {
                for (gx, &ink) in row.iter().enumerate() {
                    if ink {
                        let (px, py) = (x0 + gx as i64 * unit as i64, y0 + gy as i64 * unit as i64);
                        fill_rect(&mut frame, px, py, px + unit as i64, py + unit as i64, [lum; 3]);
                    }
                }
            }
        }
        letters.push(triplet);
        row_spans.push((y0 as u32, (y0 + letter) as u32));
    }
    Ok(ContrastChart {
        frame,
        contrasts,
        letters,
        row_spans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_is_black_and_third_half_contrast() {
        let spec = ContrastChartSpec::new(800, 900, 8);
        let chart = render_contrast_chart(&spec).unwrap();
        assert_eq!(chart.contrasts.len(), 8);
        assert_eq!(chart.contrasts[0], 1.0);
        assert!((chart.contrasts[2] - 0.501187).abs() < 1e-6);
        let (y0, y1) = chart.row_spans[0];
        let darkest = (y0..y1)
            .flat_map(|y| (0..800).map(move |x| (x, y)))
            .map(|(x, y)| chart.frame.get(x, y as usize)[0])
            .fold(1.0f32, f32::min);
        assert_eq!(darkest, 0.0);
    }

    #[test]
    fn underflow_stops_rows() {
        let mut spec = ContrastChartSpec::new(800, 2000, 20);
        spec.letter_px = 20;
        let chart = render_contrast_chart(&spec).unwrap();
        // 0.5 * 10^(-0.15 k) >= 1/255 holds for k <= 14.
        assert_eq!(chart.contrasts.len(), 15);
    }

    #[test]
    fn letters_are_distinct_and_seeded() {
        let spec = ContrastChartSpec::new(800, 900, 5);
        let a = render_contrast_chart(&spec).unwrap();
        assert_eq!(a, render_contrast_chart(&spec).unwrap());
        for t in &a.letters {
            assert!(t[0] != t[1] && t[1] != t[2] && t[0] != t[2]);
        }
    }

    #[test]
    fn chart_too_small() {
        assert!(render_contrast_chart(&ContrastChartSpec::new(100, 100, 8)).is_err());
    }
}
