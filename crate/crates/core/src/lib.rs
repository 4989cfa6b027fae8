//! Vision impairment simulation engine.
//!
//! Every symptom is a pure function of a [`Frame`], a [`RenderContext`] and
//! its parameter record. Symptoms are composed by the [`pipeline`], steered by
//! gaze from the [`gaze`] module, persisted as [`profiles`], and calibrated
//! against the charts in [`assessment`].

pub mod assessment;
pub mod blur;
pub mod color;
mod error;
pub mod frame;
pub mod gaze;
pub mod geometry;
pub mod io;
pub mod mip;
pub mod noise;
pub mod pipeline;
pub mod profiles;
pub mod rng;
pub mod symptoms;

pub use error::{Error, Result};
pub use frame::{Frame, Rgb};
pub use geometry::ViewingGeometry;
pub use pipeline::{SessionState, StackEntry, SymptomStack, ValidationReport, Violation};
pub use profiles::Profile;
pub use symptoms::{RenderContext, SymptomConfig, SymptomKind};
