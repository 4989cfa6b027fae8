use serde::{Deserialize, Serialize};

use super::fill_rect;
use crate::frame::{Frame, Rgb};
use crate::geometry::ViewingGeometry;
use crate::{Error, Result};

const GRID: Rgb = [1.0; 3];
const BACKGROUND: Rgb = [0.0; 3];
const ANNOTATION: Rgb = [0.5; 3];

/// A labeled freehand stroke; points are normalized frame coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub label: String,
    pub points: Vec<[f64; 2]>,
}

/// Annotation import/export document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSession {
    pub polylines: Vec<Polyline>,
}

impl AnnotationSession {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("annotations serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Assessment(format!("annotation session: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmslerSpec {
    /// Also fixes the output size: one frame pixel per screen pixel.
    pub geometry: ViewingGeometry,
    /// Grid half-extent, degrees on each side of fixation.
    pub grid_extent_degrees: f64,
    pub line_width_px: u32,
    pub annotations: Vec<Polyline>,
}

impl AmslerSpec {
    pub fn new(geometry: ViewingGeometry) -> Self {
        AmslerSpec {
            geometry,
            grid_extent_degrees: 10.0,
            line_width_px: 1,
            annotations: Vec::new(),
        }
    }
}

/// Pixels per grid cell; one cell subtends one degree.
pub fn amsler_cell_pitch(geometry: &ViewingGeometry) -> u32 {
    (geometry.pixels_per_degree().round() as u32).max(1)
}

fn draw_segment(frame: &mut Frame, a: (f64, f64), b: (f64, f64), half_width: f64, color: Rgb) {
    let (x0, x1) = (a.0.min(b.0) - half_width, a.0.max(b.0) + half_width);
    let (y0, y1) = (a.1.min(b.1) - half_width, a.1.max(b.1) + half_width);
    let (ex, ey) = (b.0 - a.0, b.1 - a.1);
    let len2 = ex * ex + ey * ey;
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    for y in (y0.floor() as i64).max(0)..=(y1.ceil() as i64).min(h - 1) {
        for x in (x0.floor() as i64).max(0)..=(x1.ceil() as i64).min(w - 1) {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let t = if len2 > 0.0 {
                (((px - a.0) * ex + (py - a.1) * ey) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (dx, dy) = (a.0 + t * ex - px, a.1 + t * ey - py);
            if dx * dx + dy * dy <= half_width * half_width {
                frame.set(x as usize, y as usize, color);
            }
        }
    }
}

/// White grid on black, centered on a fixation dot, with annotations in gray.
pub fn render_amsler(spec: &AmslerSpec) -> Result<Frame> {
    spec.geometry.validate()?;
    if !(spec.grid_extent_degrees.is_finite() && spec.grid_extent_degrees >= 1.0) {
        return Err(Error::Assessment(format!(
            "grid extent must be at least 1 degree, got {}",
            spec.grid_extent_degrees
        )));
    }
    let w = spec.geometry.screen_width_px as i64;
    let h = spec.geometry.screen_height_px as i64;
    let pitch = amsler_cell_pitch(&spec.geometry) as i64;
    let cells = spec.grid_extent_degrees.round() as i64;
    let lw = spec.line_width_px.max(1) as i64;
    let side = 2 * cells * pitch + lw;
    if side > w || side > h {
        return Err(Error::Assessment(format!(
            "a {cells}-degree grid at {pitch} px/cell needs {side}x{side} px, screen is {w}x{h}"
        )));
    }

    let mut frame = Frame::filled(w as usize, h as usize, BACKGROUND)?;
    let (cx, cy) = (w / 2, h / 2);
    let (gx0, gy0) = (cx - cells * pitch - lw / 2, cy - cells * pitch - lw / 2);
    for k in 0..=2 * cells {
        let off = k * pitch;
        fill_rect(&mut frame, gx0 + off, gy0, gx0 + off + lw, gy0 + side, GRID);
        fill_rect(&mut frame, gx0, gy0 + off, gx0 + side, gy0 + off + lw, GRID);
    }
    // Fixation dot.
    let r = (pitch as f64 / 8.0).max(2.0);
    let center = (cx as f64 + (lw % 2) as f64 * 0.5, cy as f64 + (lw % 2) as f64 * 0.5);
    draw_segment(&mut frame, center, center, r, GRID);

    for line in &spec.annotations {
        let pts: Vec<(f64, f64)> = line
            .points
            .iter()
            .map(|p| (p[0] * w as f64, p[1] * h as f64))
            .collect();
        match pts.len() {
            0 => {}
            1 => draw_segment(&mut frame, pts[0], pts[0], 1.5, ANNOTATION),
            _ => {
                for seg in pts.windows(2) {
                    draw_segment(&mut frame, seg[0], seg[1], 1.5, ANNOTATION);
                }
            }
        }
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry(w: u32, h: u32, distance: f64) -> ViewingGeometry {
        ViewingGeometry::new(w, h, 0.233e-3, distance).unwrap()
    }

    #[test]
    fn pitch_at_reference_geometry() {
        assert_eq!(amsler_cell_pitch(&geometry(2560, 1440, 0.60)), 45);
        assert_eq!(amsler_cell_pitch(&geometry(2560, 1440, 1.20)), 90);
    }

    #[test]
    fn grid_lines_are_one_pitch_apart() {
        let f = render_amsler(&AmslerSpec::new(geometry(1200, 1000, 0.60))).unwrap();
        // Scan a row just below the top grid line, away from the dot.
        let y = 500 - 10 * 45 + 5;
        let xs: Vec<usize> = (0..1200).filter(|&x| f.get(x, y)[0] == 1.0).collect();
        assert_eq!(xs.len(), 21);
        assert!(xs.windows(2).all(|p| p[1] - p[0] == 45));
        assert_eq!(f.get(0, 0), BACKGROUND);
        assert_eq!(f.get(600, 500), GRID);
    }

    #[test]
    fn too_small_screen_is_an_error() {
        assert!(render_amsler(&AmslerSpec::new(geometry(800, 600, 0.60))).is_err());
    }

    #[test]
    fn annotations_draw_gray_and_round_trip() {
        let session = AnnotationSession {
            polylines: vec![Polyline {
                label: "wavy".into(),
                points: vec![[0.45, 0.52], [0.55, 0.52]],
            }],
        };
        let back = AnnotationSession::from_json(&session.to_json()).unwrap();
        assert_eq!(back, session);
        let mut spec = AmslerSpec::new(geometry(1200, 1000, 0.60));
        spec.annotations = back.polylines;
        let f = render_amsler(&spec).unwrap();
        assert_eq!(f.get(600, 520), ANNOTATION);
    }
}
