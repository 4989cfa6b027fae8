//! The symptom shaders.
//!
//! Each shader maps `(Frame, RenderContext, record) -> Frame`, is pure, and
//! returns its input bit-exactly at its neutral parameters. Sizes marked
//! "fraction of full screen" are multiplied by `max(width, height)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::frame::Frame;
use crate::geometry::ViewingGeometry;
use crate::noise::NoiseField;
use crate::{Error, Result};

mod acuity;
mod cvd;
mod displacement;
mod field_loss;
mod flicker;
mod floaters;
pub mod params;
mod records;
mod teichopsia;
mod tone;

pub use acuity::hyperopia_sigma;
pub use cvd::{cvd_matrix, CvdType};
pub use displacement::distortion_source_radius;
pub use floaters::{floater_draw_list, FloaterColor, FloaterInstance};
pub use params::{ParamKind, ParamSpec, ParamValue, Violation};
pub use records::*;

/// Everything a gaze-contingent or temporal shader may read besides the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderContext {
    /// Point of gaze in pixel coordinates.
    pub gaze: (f64, f64),
    /// Seconds since session start.
    pub time: f64,
    pub geometry: ViewingGeometry,
    pub seed: u64,
}

impl RenderContext {
    pub fn new(gaze: (f64, f64), time: f64, geometry: ViewingGeometry, seed: u64) -> Self {
        RenderContext {
            gaze,
            time,
            geometry,
            seed,
        }
    }

    /// Gaze at the frame center, time zero, default geometry.
    pub fn centered(frame: &Frame, seed: u64) -> Self {
        RenderContext {
            gaze: (frame.width() as f64 / 2.0, frame.height() as f64 / 2.0),
            time: 0.0,
            geometry: ViewingGeometry::default().with_screen(frame.width(), frame.height()),
            seed,
        }
    }

    /// Gaze clamped into the frame; non-finite coordinates fall back to the
    /// frame center.
    pub fn gaze_in(&self, frame: &Frame) -> (f64, f64) {
        let (w, h) = (frame.width() as f64, frame.height() as f64);
        let fix = |v: f64, max: f64| if v.is_finite() { v.clamp(0.0, max) } else { max / 2.0 };
        (fix(self.gaze.0, w), fix(self.gaze.1, h))
    }

    pub fn pixels_per_degree(&self) -> f64 {
        self.geometry.pixels_per_degree()
    }
}

/// Memoized seed-derived data (noise permutations, floater layouts) reused
/// across frames of one session.
#[derive(Debug, Default)]
pub struct ShaderCache {
    noise: HashMap<(u64, u32, u64), Arc<NoiseField>>,
    floaters: HashMap<floaters::LayoutKey, Arc<Vec<floaters::Floater>>>,
}

impl ShaderCache {
    pub(crate) fn noise(&mut self, seed: u64, octaves: u32, frequency: f64) -> Arc<NoiseField> {
        self.noise
            .entry((seed, octaves, frequency.to_bits()))
            .or_insert_with(|| {
                Arc::new(NoiseField::new(seed, octaves, frequency).expect("valid noise constants"))
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.noise.len() + self.floaters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Salted per-shader seed so that shaders sharing a session seed draw
/// independent streams.
pub(crate) fn shader_seed(seed: u64, salt: u64) -> u64 {
    crate::rng::mix64(seed ^ crate::rng::mix64(salt))
}

macro_rules! symptom_table {
    ($(
        $variant:ident($record:ident) {
            tag: $tag:literal,
            name: $display:literal,
            gaze: $gaze:literal,
            temporal: $temporal:literal,
            op: $op:ident => $render:path $(,)?
        }
    )*) => {
        /// The shader catalog.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        #[serde(rename_all = "snake_case")]
        pub enum SymptomKind { $($variant),* }

        impl SymptomKind {
            pub const ALL: &'static [SymptomKind] = &[$(SymptomKind::$variant),*];

            /// Document tag, e.g. `hyperopia`.
            pub fn tag(self) -> &'static str {
                match self { $(SymptomKind::$variant => $tag),* }
            }

            pub fn display_name(self) -> &'static str {
                match self { $(SymptomKind::$variant => $display),* }
            }

            /// Parameter record name used in validation messages.
            pub fn record_name(self) -> &'static str {
                match self { $(SymptomKind::$variant => stringify!($record)),* }
            }

            /// Whether the effect is anchored to the point of gaze.
            pub fn gaze_contingent(self) -> bool {
                match self { $(SymptomKind::$variant => $gaze),* }
            }

            /// Whether the output depends on `RenderContext::time`.
            pub fn temporal(self) -> bool {
                match self { $(SymptomKind::$variant => $temporal),* }
            }

            pub fn params(self) -> &'static [ParamSpec] {
                match self { $(SymptomKind::$variant => $record::PARAMS),* }
            }

            pub fn from_tag(tag: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|k| k.tag() == tag)
            }
        }

        /// Parameters for one shader.
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub enum SymptomConfig { $($variant($record)),* }

        impl SymptomConfig {
            pub fn kind(&self) -> SymptomKind {
                match self { $(SymptomConfig::$variant(_) => SymptomKind::$variant),* }
            }

            /// Parameter values in schema order.
            pub fn values(&self) -> Vec<ParamValue> {
                match self { $(SymptomConfig::$variant(c) => c.values()),* }
            }

            pub fn from_values(kind: SymptomKind, values: &[ParamValue]) -> Option<Self> {
                match kind {
                    $(SymptomKind::$variant => $record::from_values(values).map(SymptomConfig::$variant)),*
                }
            }

            pub fn default_for(kind: SymptomKind) -> Self {
                match kind { $(SymptomKind::$variant => SymptomConfig::$variant($record::default())),* }
            }

            pub(crate) fn render_unchecked(&self, frame: &Frame, ctx: &RenderContext, cache: &mut ShaderCache) -> Frame {
                match self { $(SymptomConfig::$variant(c) => $render(frame, ctx, c, cache)),* }
            }
        }

        $(
            #[doc = concat!("Applies the ", $display, " shader.")]
            pub fn $op(frame: &Frame, ctx: &RenderContext, config: &$record) -> Result<Frame> {
                SymptomConfig::$variant(*config).apply(frame, ctx)
            }

            impl From<$record> for SymptomConfig {
                fn from(c: $record) -> Self {
                    SymptomConfig::$variant(c)
                }
            }
        )*
    };
}

symptom_table! {
    CentralVisionLoss(CentralLoss) {
        tag: "central_vision_loss", name: "Vision loss, central", gaze: true, temporal: false,
        op: central_vision_loss => field_loss::central,
    }
    Hyperopia(Hyperopia) {
        tag: "hyperopia", name: "Hyperopia", gaze: false, temporal: false,
        op: hyperopia => acuity::hyperopia,
    }
    Cvd(Cvd) {
        tag: "cvd", name: "Color vision deficiency", gaze: false, temporal: false,
        op: cvd => cvd::render,
    }
    ContrastSensitivity(ContrastSens) {
        tag: "contrast_sensitivity", name: "Contrast sensitivity", gaze: false, temporal: false,
        op: contrast_sensitivity => tone::contrast_sensitivity,
    }
    MetamorphPointwise(MetamorphPoint) {
        tag: "metamorph_pointwise", name: "Metamorphopsia, pointwise", gaze: true, temporal: false,
        op: metamorph_pointwise => displacement::metamorph_pointwise,
    }
    Nystagmus(Nystagmus) {
        tag: "nystagmus", name: "Nystagmus", gaze: false, temporal: true,
        op: nystagmus => displacement::nystagmus,
    }
    Retinopathy(Retinopathy) {
        tag: "retinopathy", name: "Retinopathy / floaters", gaze: true, temporal: true,
        op: retinopathy => floaters::render,
    }
    Teichopsia(Teichopsia) {
        tag: "teichopsia", name: "Teichopsia", gaze: true, temporal: true,
        op: teichopsia => teichopsia::render,
    }
    MetamorphOverlay(MetamorphOverlay) {
        tag: "metamorph_overlay", name: "Metamorphopsia, overlay", gaze: false, temporal: true,
        op: metamorph_overlay => displacement::metamorph_overlay,
    }
    Glare(Glare) {
        tag: "glare", name: "Glare vision / photophobia", gaze: false, temporal: false,
        op: glare => acuity::glare,
    }
    PeripheralVisionLoss(PeripheralLoss) {
        tag: "peripheral_vision_loss", name: "Vision loss, peripheral", gaze: true, temporal: false,
        op: peripheral_vision_loss => field_loss::peripheral,
    }
    Cataracts(Cataract) {
        tag: "cataracts", name: "Cataracts", gaze: false, temporal: false,
        op: cataracts => tone::cataracts,
    }
    InFilling(InFilling) {
        tag: "in_filling", name: "In-filling", gaze: true, temporal: false,
        op: in_filling => displacement::in_filling,
    }
    DoubleVision(DoubleVision) {
        tag: "double_vision", name: "Double vision", gaze: false, temporal: false,
        op: double_vision => displacement::double_vision,
    }
    Distortion(Distortion) {
        tag: "distortion", name: "Distortion", gaze: true, temporal: true,
        op: distortion => displacement::distortion,
    }
    FovealDarkness(FovealDarkness) {
        tag: "foveal_darkness", name: "Foveal darkness", gaze: true, temporal: false,
        op: foveal_darkness => field_loss::foveal_darkness,
    }
    FlickeringStars(FlickeringStars) {
        tag: "flickering_stars", name: "Flickering stars", gaze: false, temporal: true,
        op: flickering_stars => flicker::render,
    }
    DetailLoss(DetailLoss) {
        tag: "detail_loss", name: "Detail loss", gaze: false, temporal: false,
        op: detail_loss => acuity::detail_loss,
    }
}

impl SymptomKind {
    /// Shaders that participants found unconvincing; the UI shows a notice.
    pub fn disclaimer(self) -> Option<&'static str> {
        match self {
            SymptomKind::MetamorphPointwise | SymptomKind::MetamorphOverlay => Some(
                "Participants with macular conditions described a vortex-shaped displacement \
                 rather than this effect; treat it as an approximation.",
            ),
            _ => None,
        }
    }
}

impl SymptomConfig {
    /// Parameters set so the shader reproduces its input exactly.
    ///
    /// Hyperopia and detail loss have no exact neutral inside their ranges;
    /// their weakest settings are returned, which are identities for
    /// resolutions up to 60 px/degree and frames up to 1000 px respectively.
    pub fn neutral(kind: SymptomKind) -> Self {
        let values: Vec<ParamValue> = kind
            .params()
            .iter()
            .map(|p| p.neutral.unwrap_or(p.default))
            .collect();
        Self::from_values(kind, &values).expect("schema neutrals match field types")
    }

    /// An in-range config drawn from `next`, which yields uniforms in
    /// `[0, 1)`. Used for fuzzing and randomized checks.
    pub fn sample(kind: SymptomKind, mut next: impl FnMut() -> f64) -> Self {
        let values: Vec<ParamValue> = kind
            .params()
            .iter()
            .map(|p| match p.kind {
                ParamKind::Number { min, max, integer } => {
                    let v = min + (max - min) * next();
                    ParamValue::Number(if integer { v.floor() } else { v })
                }
                ParamKind::Bool => ParamValue::Bool(next() < 0.5),
                ParamKind::Choice { options } => {
                    let i = ((next() * options.len() as f64) as usize).min(options.len() - 1);
                    ParamValue::Choice(options[i])
                }
            })
            .collect();
        let mut config = Self::from_values(kind, &values).expect("sampled values match schema");
        if let SymptomConfig::Distortion(d) = &mut config {
            d.inner_radius = d.inner_radius.min(d.radius);
        }
        config
    }

    /// Every range or relational violation; empty means renderable.
    pub fn violations(&self) -> Vec<Violation> {
        let kind = self.kind();
        let mut out: Vec<Violation> = kind
            .params()
            .iter()
            .zip(self.values())
            .filter_map(|(spec, value)| {
                spec.check(value).map(|reason| Violation {
                    entry: None,
                    symptom: kind.record_name(),
                    field: spec.name,
                    value: value.to_string(),
                    allowed: spec.allowed(),
                    reason,
                })
            })
            .collect();
        if let SymptomConfig::Distortion(d) = self {
            if d.inner_radius > d.radius {
                out.push(Violation {
                    entry: None,
                    symptom: kind.record_name(),
                    field: "inner_radius",
                    value: d.inner_radius.to_string(),
                    allowed: format!("[0,{}]", d.radius),
                    reason: "must not exceed radius".to_string(),
                });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidParameter {
                name: format!("{}.{}", v.symptom, v.field),
                reason: format!("{} ∈ {} required, got {}", v.field, v.allowed, v.value),
            }),
        }
    }

    /// Validates, then renders.
    pub fn apply(&self, frame: &Frame, ctx: &RenderContext) -> Result<Frame> {
        self.apply_cached(frame, ctx, &mut ShaderCache::default())
    }

    /// As [`SymptomConfig::apply`], reusing seed-derived data from `cache`.
    pub fn apply_cached(
        &self,
        frame: &Frame,
        ctx: &RenderContext,
        cache: &mut ShaderCache,
    ) -> Result<Frame> {
        self.validate()?;
        Ok(self.render_unchecked(frame, ctx, cache))
    }

    /// As `render_unchecked`, taking ownership of a frame the caller is done
    /// with so per-pixel shaders can rewrite it in place.
    pub(crate) fn render_owned(&self, frame: Frame, ctx: &RenderContext, cache: &mut ShaderCache) -> Frame {
        match self {
            SymptomConfig::ContrastSensitivity(c) => tone::adjust_contrast(frame, c),
            other => other.render_unchecked(&frame, ctx, cache),
        }
    }
}
