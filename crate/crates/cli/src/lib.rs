//! Front ends for the simulation engine: the `visim` command line and the
//! local HTTP render service. Both render through [`render::render_frame`],
//! so identical requests produce identical bytes.

pub mod cli;
pub mod render;
pub mod schema;
pub mod service;
