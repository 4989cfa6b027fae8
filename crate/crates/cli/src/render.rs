use visim_core::io::encode_png;
use visim_core::pipeline::render;
use visim_core::{Frame, Profile, RenderContext, Result, SessionState, ViewingGeometry};

/// Context for a frame with gaze given in normalized coordinates, clamped
/// into `[0, 1]^2`.
pub fn context_for(frame: &Frame, gaze: (f64, f64), time: f64, seed: u64) -> RenderContext {
    let clamp = |v: f64| if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.5 };
    RenderContext {
        gaze: (
            clamp(gaze.0) * frame.width() as f64,
            clamp(gaze.1) * frame.height() as f64,
        ),
        time,
        geometry: ViewingGeometry::default().with_screen(frame.width(), frame.height()),
        seed,
    }
}

/// Renders `profile` over `frame`. Without an explicit session a fresh one
/// seeded from the profile is used.
pub fn render_frame(
    frame: &Frame,
    profile: &Profile,
    gaze: (f64, f64),
    time: f64,
    session: Option<&mut SessionState>,
) -> Result<Frame> {
    let mut fresh;
    let state = match session {
        Some(s) => s,
        None => {
            fresh = SessionState::new(profile.seed);
            &mut fresh
        }
    };
    let ctx = context_for(frame, gaze, time, state.seed);
    render(frame, &profile.stack, &ctx, state)
}

pub fn render_png(frame: &Frame, profile: &Profile, gaze: (f64, f64), time: f64) -> Result<Vec<u8>> {
    encode_png(&render_frame(frame, profile, gaze, time, None)?)
}
