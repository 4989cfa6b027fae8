use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use visim_core::assessment::amsler_cell_pitch;
use visim_core::blur::gaussian_blur;
use visim_core::gaze::{GazeSample, GazeSmoother};
use visim_core::pipeline::{render, validate, StackEntry};
use visim_core::profiles::{canonical::round6, interpolate, CyclePlan};
use visim_core::symptoms::{cvd_matrix, CvdType, ParamValue};
use visim_core::{
    Frame, Profile, RenderContext, SessionState, SymptomConfig, SymptomKind, SymptomStack,
    ViewingGeometry,
};

fn textured(w: usize, h: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..w * h)
        .map(|_| [rng.random::<f32>(), rng.random::<f32>(), rng.random::<f32>()])
        .collect();
    Frame::from_data(w, h, data).unwrap()
}

fn config(kind: SymptomKind, seed: u64) -> SymptomConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SymptomConfig::sample(kind, || rng.random::<f64>())
}

fn kind_strategy() -> impl Strategy<Value = SymptomKind> {
    (0..SymptomKind::ALL.len()).prop_map(|i| SymptomKind::ALL[i])
}

fn ctx(frame: &Frame, gaze: (f64, f64), time: f64, seed: u64) -> RenderContext {
    RenderContext {
        gaze,
        time,
        seed,
        ..RenderContext::centered(frame, seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shader_output_stays_in_unit_range_and_is_deterministic(
        kind in kind_strategy(), seed in any::<u64>(), t in 0.0f64..10.0,
        gx in 0.0f64..48.0, gy in 0.0f64..40.0,
    ) {
        let f = textured(48, 40, seed);
        let c = config(kind, seed);
        let ctx = ctx(&f, (gx, gy), t, seed);
        let a = c.apply(&f, &ctx).unwrap();
        prop_assert_eq!((a.width(), a.height()), (48, 40));
        prop_assert!(a.as_flat().iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(&a, &c.apply(&f, &ctx).unwrap());
    }

    #[test]
    fn non_gaze_shaders_ignore_gaze(
        kind in kind_strategy(), seed in any::<u64>(),
        g1 in (0.0f64..48.0, 0.0f64..40.0), g2 in (0.0f64..48.0, 0.0f64..40.0),
    ) {
        prop_assume!(!kind.gaze_contingent());
        let f = textured(48, 40, seed);
        let c = config(kind, seed);
        let a = c.apply(&f, &ctx(&f, g1, 1.5, 3)).unwrap();
        let b = c.apply(&f, &ctx(&f, g2, 1.5, 3)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn non_temporal_shaders_ignore_time(
        kind in kind_strategy(), seed in any::<u64>(), t1 in 0.0f64..100.0, t2 in 0.0f64..100.0,
    ) {
        prop_assume!(!kind.temporal());
        let f = textured(40, 32, seed);
        let c = config(kind, seed);
        let a = c.apply(&f, &ctx(&f, (20.0, 16.0), t1, 3)).unwrap();
        let b = c.apply(&f, &ctx(&f, (20.0, 16.0), t2, 3)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn neutral_parameters_are_identity(kind in kind_strategy(), seed in any::<u64>()) {
        let f = textured(37, 29, seed);
        let out = SymptomConfig::neutral(kind).apply(&f, &ctx(&f, (10.0, 20.0), 2.0, seed)).unwrap();
        prop_assert_eq!(out, f);
    }

    #[test]
    fn uniform_frames_survive_smooth_shaders(
        kind in kind_strategy(), seed in any::<u64>(), v in 0.0f32..1.0,
    ) {
        // Shaders that only move, blur or average pixels keep a constant image.
        let moves_only = matches!(
            kind,
            SymptomKind::CentralVisionLoss | SymptomKind::Hyperopia | SymptomKind::MetamorphPointwise
                | SymptomKind::Nystagmus | SymptomKind::MetamorphOverlay | SymptomKind::PeripheralVisionLoss
                | SymptomKind::InFilling | SymptomKind::DoubleVision | SymptomKind::FlickeringStars
                | SymptomKind::DetailLoss
        );
        prop_assume!(moves_only);
        let f = Frame::filled(40, 30, [v; 3]).unwrap();
        let out = config(kind, seed).apply(&f, &ctx(&f, (20.0, 15.0), 0.7, seed)).unwrap();
        prop_assert!(out.max_abs_diff(&f) < 1e-6);
    }

    #[test]
    fn out_of_range_values_are_rejected(kind in kind_strategy(), seed in any::<u64>(), eps in 1e-9f64..10.0) {
        let base = config(kind, seed);
        for (i, spec) in kind.params().iter().enumerate() {
            if let visim_core::symptoms::ParamKind::Number { min, max, .. } = spec.kind {
                for bad in [min - eps, max + eps] {
                    let mut values = base.values();
                    values[i] = ParamValue::Number(bad);
                    let c = SymptomConfig::from_values(kind, &values).unwrap();
                    prop_assert!(c.violations().iter().any(|v| v.field == spec.name));
                }
            }
        }
    }

    #[test]
    fn cvd_preserves_gray(kind_i in 0usize..4, severity in 0.0f64..=100.0, v in 0.0f32..=1.0) {
        let m = cvd_matrix(CvdType::ALL[kind_i], severity);
        for row in m {
            let out = row.iter().map(|&c| c as f32 * v).sum::<f32>();
            prop_assert!((out - v).abs() <= 1.0 / 255.0);
        }
    }

    #[test]
    fn blur_preserves_interior_constant_mean(v in 0.0f32..1.0, sigma in 0.1f64..4.0) {
        let f = Frame::filled(64, 64, [v; 3]).unwrap();
        let out = gaussian_blur(&f, sigma).unwrap();
        prop_assert!((out.mean()[0] - v).abs() < 1e-6);
    }

    #[test]
    fn amsler_pitch_matches_trig(distance in 0.2f64..3.0, pitch_mm in 0.1f64..0.6) {
        let g = ViewingGeometry::new(1920, 1080, pitch_mm * 1e-3, distance).unwrap();
        let oracle = 2.0 * distance * (0.5f64).to_radians().tan() / (pitch_mm * 1e-3);
        prop_assert!((amsler_cell_pitch(&g) as f64 - oracle).abs() <= 0.5 + 1e-9);
    }

    #[test]
    fn profile_round_trip(kinds in proptest::collection::vec(kind_strategy(), 0..6), seed in any::<u64>(), enabled in any::<bool>()) {
        let mut entries = Vec::new();
        for (i, &k) in kinds.iter().enumerate() {
            // Documents keep six significant digits.
            let values: Vec<ParamValue> = config(k, seed.wrapping_add(i as u64))
                .values()
                .into_iter()
                .map(|v| match v { ParamValue::Number(n) => ParamValue::Number(round6(n)), o => o })
                .collect();
            let mut c = SymptomConfig::from_values(k, &values).unwrap();
            if let SymptomConfig::Distortion(d) = &mut c {
                d.inner_radius = d.inner_radius.min(d.radius);
            }
            entries.push(StackEntry { config: c, enabled: enabled || i % 2 == 0 });
        }
        let p = Profile { name: "r".into(), stack: SymptomStack::new(entries), seed, notes: "n".into() };
        prop_assert!(validate(&p.stack).is_ok());
        let text = p.to_json();
        let back = Profile::from_json(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn interpolation_validates(ka in kind_strategy(), kb in kind_strategy(), seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let a = Profile::new("a", SymptomStack::default().with(config(ka, seed)), 1);
        let b = Profile::new("b", SymptomStack::default().with(config(kb, seed ^ 1)), 1);
        let s = interpolate(&a, &b, alpha).unwrap();
        prop_assert!(validate(&s).is_ok());
    }

    #[test]
    fn self_interpolation_renders_identically(kind in kind_strategy(), seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let f = textured(32, 24, seed);
        let a = Profile::new("a", SymptomStack::default().with(config(kind, seed)), 1);
        let s = interpolate(&a, &a, alpha).unwrap();
        let c = ctx(&f, (16.0, 12.0), 0.5, 1);
        prop_assert_eq!(
            render(&f, &s, &c, &mut SessionState::new(5)).unwrap(),
            render(&f, &a.stack, &c, &mut SessionState::new(5)).unwrap()
        );
    }

    #[test]
    fn toggled_off_equals_removed(ka in kind_strategy(), kb in kind_strategy(), seed in any::<u64>()) {
        let f = textured(32, 24, seed);
        let c = ctx(&f, (16.0, 12.0), 0.5, 1);
        let with_off = SymptomStack::new(vec![
            StackEntry::new(config(ka, seed)),
            StackEntry::disabled(config(kb, seed ^ 7)),
        ]);
        let removed = SymptomStack::default().with(config(ka, seed));
        prop_assert_eq!(
            render(&f, &with_off, &c, &mut SessionState::new(2)).unwrap(),
            render(&f, &removed, &c, &mut SessionState::new(2)).unwrap()
        );
    }

    #[test]
    fn cycle_has_no_back_to_back_repeats(n in 2usize..6, seed in any::<u64>()) {
        let profiles = (0..n).map(|i| Profile::new(format!("p{i}"), SymptomStack::default(), 0)).collect();
        let plan = CyclePlan::new(profiles, 1.0, 0.5, seed).unwrap();
        for k in 0..100 {
            prop_assert_ne!(plan.sequence(k), plan.sequence(k + 1));
        }
    }

    #[test]
    fn rebuilt_session_reproduces_temporal_output(seed in any::<u64>(), t in 0.0f64..20.0) {
        let f = textured(40, 30, 9);
        let stack = SymptomStack::default()
            .with(config(SymptomKind::Retinopathy, seed))
            .with(config(SymptomKind::FlickeringStars, seed))
            .with(config(SymptomKind::Distortion, seed));
        let c = ctx(&f, (20.0, 15.0), t, 0);
        let a = render(&f, &stack, &c, &mut SessionState::new(seed)).unwrap();
        let b = render(&f, &stack, &c, &mut SessionState::new(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn smoother_halves_noise_for_any_seed(seed in any::<u64>()) {
        use rand_distr::{Distribution, Normal};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.02).unwrap();
        let mut k = GazeSmoother::default();
        let (mut raw, mut out) = (Vec::new(), Vec::new());
        for i in 0..1000 {
            let x = 0.5 + noise.sample(&mut rng);
            raw.push(x);
            out.push(k.smooth(GazeSample::new(i as f64 / 60.0, x, 0.5)).unwrap().x);
        }
        let sd = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        };
        prop_assert!(sd(&out) <= 0.5 * sd(&raw));
    }
}
