use serde_json::{json, Value};
use visim_core::profiles::FORMAT_VERSION;
use visim_core::symptoms::CvdType;
use visim_core::SymptomKind;

/// Machine-readable catalog of every symptom and its parameters; the UI
/// builds its controls from this document alone.
pub fn symptom_schema() -> Value {
    let symptoms: Vec<Value> = SymptomKind::ALL
        .iter()
        .map(|&k| {
            let mut entry = json!({
                "type": k.tag(),
                "name": k.display_name(),
                "record": k.record_name(),
                "gaze_contingent": k.gaze_contingent(),
                "temporal": k.temporal(),
                "params": k.params(),
            });
            if let Some(text) = k.disclaimer() {
                entry["disclaimer"] = json!(text);
            }
            entry
        })
        .collect();
    json!({
        "format_version": FORMAT_VERSION,
        "symptoms": symptoms,
        "cvd_types": CvdType::OPTIONS,
    })
}
