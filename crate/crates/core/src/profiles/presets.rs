//! Built-in profiles reconstructed from participants' sketches of their own
//! vision. The contents are qualitative approximations.

use super::Profile;
use crate::pipeline::SymptomStack;
use crate::symptoms::{
    CentralLoss, ContrastSens, DetailLoss, Distortion, FloaterColor, FovealDarkness, Hyperopia,
    PeripheralLoss, Retinopathy,
};

fn make(name: &str, notes: &str, stack: SymptomStack) -> Profile {
    Profile {
        name: name.to_string(),
        stack,
        seed: 1,
        notes: format!("Qualitative reconstruction: {notes}"),
    }
}

/// Presets `P1` to `P7`.
pub fn presets() -> Vec<Profile> {
    vec![
        make(
            "P1",
            "everything pulled inwards toward the center.",
            SymptomStack::default().with(Distortion {
                radius: 0.2,
                suction: 0.7,
                inner_radius: 0.01,
                noise: 0.2,
            }),
        ),
        make(
            "P2",
            "bright and blurry with a gray spot.",
            SymptomStack::default()
                .with(Hyperopia { cpd: 4.0 })
                .with(ContrastSens {
                    brightness: 0.3,
                    contrast: -0.2,
                    gamma: 1.0,
                })
                .with(FovealDarkness {
                    size: 0.12,
                    fade: 0.6,
                    opacity: 0.7,
                }),
        ),
        make(
            "P3",
            "blur in the center and the periphery under a gray veil.",
            SymptomStack::default()
                .with(CentralLoss { size: 0.15 })
                .with(PeripheralLoss { size: 0.35 })
                .with(ContrastSens {
                    brightness: 0.1,
                    contrast: -0.4,
                    gamma: 1.0,
                }),
        ),
        make(
            "P4",
            "blurry, with a dark, blurry spot in the center.",
            SymptomStack::default()
                .with(Hyperopia { cpd: 3.0 })
                .with(FovealDarkness {
                    size: 0.15,
                    fade: 0.5,
                    opacity: 0.9,
                }),
        ),
        make(
            "P5",
            "heavy pixelation.",
            SymptomStack::default().with(DetailLoss { clusters: 40.0 }),
        ),
        make(
            "P6",
            "extremely bright with a dark spot.",
            SymptomStack::default()
                .with(ContrastSens {
                    brightness: 0.6,
                    contrast: 0.3,
                    gamma: 0.8,
                })
                .with(FovealDarkness {
                    size: 0.1,
                    fade: 0.3,
                    opacity: 1.0,
                }),
        ),
        make(
            "P7",
            "smaller, denser white dots centered in the middle.",
            SymptomStack::default().with(Retinopathy {
                color: FloaterColor::White,
                opacity: 0.9,
                density: 600.0,
                speed: 0.1,
                centering: true,
                circle_radius: 0.15,
                floater_size: 0.6,
            }),
        ),
    ]
}

pub fn preset(name: &str) -> Option<Profile> {
    presets().into_iter().find(|p| p.name.eq_ignore_ascii_case(name))
}
