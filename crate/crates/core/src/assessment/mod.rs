//! Assessment charts: an inverted Amsler grid sized by viewing geometry, a
//! letter-triplet contrast chart, and letterboxed display of test plates.

mod amsler;
mod contrast;
mod font;
mod plate;

pub use amsler::{amsler_cell_pitch, render_amsler, AmslerSpec, AnnotationSession, Polyline};
pub use contrast::{render_contrast_chart, ContrastChart, ContrastChartSpec, CHART_BACKGROUND};
pub use font::{sloan_glyph, SLOAN_LETTERS};
pub use plate::{display_plate, letterbox, PLATE_BACKGROUND};

use crate::frame::{Frame, Rgb};

/// Fills the axis-aligned rectangle `[x0, x1) x [y0, y1)`, clipped to the frame.
pub(crate) fn fill_rect(frame: &mut Frame, x0: i64, y0: i64, x1: i64, y1: i64, color: Rgb) {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    for y in y0.max(0)..y1.min(h) {
        for x in x0.max(0)..x1.min(w) {
            frame.set(x as usize, y as usize, color);
        }
    }
}
