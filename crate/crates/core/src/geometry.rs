//! Screen and viewing-distance geometry.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical viewing setup used to convert visual angle to screen pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewingGeometry {
    pub screen_width_px: u32,
    pub screen_height_px: u32,
    /// Meters per pixel.
    pub pixel_pitch: f64,
    /// Eye-to-screen distance in meters.
    pub viewing_distance: f64,
}

impl Default for ViewingGeometry {
    /// 27" 2560x1440 panel viewed from 60 cm.
    fn default() -> Self {
        ViewingGeometry {
            screen_width_px: 2560,
            screen_height_px: 1440,
            pixel_pitch: 0.233e-3,
            viewing_distance: 0.60,
        }
    }
}

impl ViewingGeometry {
    pub fn new(
        screen_width_px: u32,
        screen_height_px: u32,
        pixel_pitch: f64,
        viewing_distance: f64,
    ) -> Result<Self> {
        let g = ViewingGeometry {
            screen_width_px,
            screen_height_px,
            pixel_pitch,
            viewing_distance,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.screen_width_px == 0 || self.screen_height_px == 0 {
            return Err(Error::param("geometry.screen", "screen size must be positive"));
        }
        for (name, v) in [
            ("geometry.pixel_pitch", self.pixel_pitch),
            ("geometry.viewing_distance", self.viewing_distance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Same optics with a different screen raster size.
    pub fn with_screen(self, width: usize, height: usize) -> Self {
        ViewingGeometry {
            screen_width_px: width as u32,
            screen_height_px: height as u32,
            ..self
        }
    }

    /// Pixels subtending one degree of visual angle at the screen center.
    pub fn pixels_per_degree(&self) -> f64 {
        2.0 * self.viewing_distance * 0.5f64.to_radians().tan() / self.pixel_pitch
    }
}
