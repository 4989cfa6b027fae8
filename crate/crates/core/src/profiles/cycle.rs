//! Blending between profiles and the randomized profile cycle.

use super::Profile;
use crate::pipeline::{StackEntry, SymptomStack};
use crate::rng;
use crate::symptoms::{ParamKind, ParamValue, SymptomConfig};
use crate::{Error, Result};

/// `(1 - t) a + t b`, exact at both ends and when `a == b`.
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if a == b {
        a
    } else {
        (1.0 - t) * a + t * b
    }
}

fn blend(a: &SymptomConfig, b: &SymptomConfig, alpha: f64) -> SymptomConfig {
    let kind = a.kind();
    let values: Vec<ParamValue> = kind
        .params()
        .iter()
        .zip(a.values().into_iter().zip(b.values()))
        .map(|(spec, (va, vb))| match (spec.kind, va, vb) {
            (ParamKind::Number { integer, .. }, ParamValue::Number(x), ParamValue::Number(y)) => {
                let v = lerp(x, y, alpha);
                ParamValue::Number(if integer { v.round() } else { v })
            }
            _ => {
                if alpha < 0.5 {
                    va
                } else {
                    vb
                }
            }
        })
        .collect();
    SymptomConfig::from_values(kind, &values).expect("blend keeps field types")
}

/// Neutral values for parameters that have one, `config`'s own elsewhere.
fn neutralized(config: &SymptomConfig) -> SymptomConfig {
    let kind = config.kind();
    let values: Vec<ParamValue> = kind
        .params()
        .iter()
        .zip(config.values())
        .map(|(spec, v)| spec.neutral.unwrap_or(v))
        .collect();
    SymptomConfig::from_values(kind, &values).expect("neutral keeps field types")
}

fn effective(stack: &SymptomStack) -> Vec<(SymptomConfig, bool)> {
    stack
        .entries
        .iter()
        .map(|e| (e.config, e.enabled && stack.global_enabled))
        .collect()
}

/// Blends two profiles. Entries of the same symptom are paired in order of
/// occurrence; unpaired entries fade toward (or from) their neutral
/// parameters. Booleans and choices switch at `alpha = 0.5`. At `alpha = 0`
/// the result renders exactly like `a`, at `alpha = 1` exactly like `b`.
pub fn interpolate(a: &Profile, b: &Profile, alpha: f64) -> Result<SymptomStack> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("must be in [0,1], got {alpha}")));
    }
    let ea = effective(&a.stack);
    let mut eb: Vec<Option<(SymptomConfig, bool)>> = effective(&b.stack).into_iter().map(Some).collect();
    let weight_a = alpha < 1.0;
    let weight_b = alpha > 0.0;
    let mut entries = Vec::new();

    for (ca, on_a) in ea {
        let partner = eb
            .iter_mut()
            .find(|slot| matches!(slot, Some((c, _)) if c.kind() == ca.kind()))
            .and_then(Option::take);
        let entry = match partner {
            Some((cb, on_b)) => {
                // A disabled side contributes its neutral parameters.
                let from = if on_a { ca } else { neutralized(&cb) };
                let to = if on_b { cb } else { neutralized(&ca) };
                StackEntry {
                    config: blend(&from, &to, alpha),
                    enabled: (on_a && weight_a) || (on_b && weight_b),
                }
            }
            None => StackEntry {
                config: blend(&ca, &neutralized(&ca), alpha),
                enabled: on_a && weight_a,
            },
        };
        entries.push(entry);
    }
    for (cb, on_b) in eb.into_iter().flatten() {
        entries.push(StackEntry {
            config: blend(&neutralized(&cb), &cb, alpha),
            enabled: on_b && weight_b,
        });
    }
    Ok(SymptomStack::new(entries))
}

/// Where a cycle is at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    /// Index of the dwell/transition period.
    pub cycle: u64,
    /// Indices into the plan's profiles.
    pub current: usize,
    pub next: usize,
    pub current_name: String,
    pub next_name: String,
    /// Blend weight of `next`; zero during the dwell.
    pub alpha: f64,
}

/// Dwell on one profile, then blend over `transition` seconds into the next,
/// in a seeded order that never repeats a profile back-to-back.
#[derive(Debug, Clone)]
pub struct CyclePlan {
    profiles: Vec<Profile>,
    dwell: f64,
    transition: f64,
    rng_seed: u64,
}

impl CyclePlan {
    pub fn new(profiles: Vec<Profile>, dwell: f64, transition: f64, rng_seed: u64) -> Result<Self> {
        if profiles.len() < 2 {
            return Err(Error::param(
                "profiles",
                format!("a cycle needs at least 2 profiles, got {}", profiles.len()),
            ));
        }
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(dwell) || !ok(transition) || dwell + transition <= 0.0 {
            return Err(Error::param(
                "dwell/transition",
                "must be finite, non-negative and not both zero",
            ));
        }
        Ok(CyclePlan {
            profiles,
            dwell,
            transition,
            rng_seed,
        })
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    /// Profile index shown in period `k`.
    pub fn sequence(&self, k: u64) -> usize {
        let n = self.profiles.len() as u64;
        let mut current = rng::stream(self.rng_seed, 0, 0).next_u64() % n;
        for i in 0..k {
            let hop = 1 + rng::stream(self.rng_seed, 1, i).next_u64() % (n - 1);
            current = (current + hop) % n;
        }
        current as usize
    }

    /// The stack to render at `t` seconds and a description of the phase.
    pub fn next_phase(&self, t: f64) -> Result<(SymptomStack, Phase)> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param("t", format!("must be finite and >= 0, got {t}")));
        }
        let period = self.dwell + self.transition;
        let cycle = (t / period).floor() as u64;
        let local = t - cycle as f64 * period;
        let alpha = if local < self.dwell {
            0.0
        } else {
            ((local - self.dwell) / self.transition).clamp(0.0, 1.0)
        };
        let (ci, ni) = (self.sequence(cycle), self.sequence(cycle + 1));
        let (a, b) = (&self.profiles[ci], &self.profiles[ni]);
        let stack = if alpha == 0.0 {
            a.stack.clone()
        } else {
            interpolate(a, b, alpha)?
        };
        Ok((
            stack,
            Phase {
                cycle,
                current: ci,
                next: ni,
                current_name: a.name.clone(),
                next_name: b.name.clone(),
                alpha,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symptoms::{FovealDarkness, Hyperopia};

    fn hyp(cpd: f64) -> Profile {
        Profile::new(format!("cpd{cpd}"), SymptomStack::default().with(Hyperopia { cpd }), 1)
    }

    #[test]
    fn midpoint_of_shared_symptom() {
        let s = interpolate(&hyp(10.0), &hyp(2.0), 0.5).unwrap();
        assert_eq!(s.entries[0].config, SymptomConfig::Hyperopia(Hyperopia { cpd: 6.0 }));
    }

    #[test]
    fn endpoints_reproduce_inputs() {
        let a = hyp(10.0);
        let b = Profile::new(
            "b",
            SymptomStack::default().with(FovealDarkness::default()),
            2,
        );
        let s0 = interpolate(&a, &b, 0.0).unwrap();
        let active0: Vec<_> = s0.active().copied().collect();
        assert_eq!(active0, vec![SymptomConfig::Hyperopia(Hyperopia { cpd: 10.0 })]);
        let s1 = interpolate(&a, &b, 1.0).unwrap();
        let active1: Vec<_> = s1.active().copied().collect();
        assert_eq!(active1, vec![SymptomConfig::FovealDarkness(FovealDarkness::default())]);
        assert!(interpolate(&a, &b, 1.5).is_err());
    }

    #[test]
    fn self_interpolation_is_identity() {
        let a = hyp(7.3);
        for k in 0..=10 {
            let s = interpolate(&a, &a, k as f64 / 10.0).unwrap();
            assert_eq!(s, a.stack);
        }
    }

    #[test]
    fn cycle_never_repeats() {
        let plan = CyclePlan::new(vec![hyp(1.0), hyp(2.0), hyp(3.0)], 2.0, 1.0, 99).unwrap();
        for k in 0..100 {
            assert_ne!(plan.sequence(k), plan.sequence(k + 1));
        }
        let (stack, phase) = plan.next_phase(0.5).unwrap();
        assert_eq!(phase.alpha, 0.0);
        assert_eq!(stack, plan.profiles()[plan.sequence(0)].stack);
        let (_, mid) = plan.next_phase(2.5).unwrap();
        assert!((mid.alpha - 0.5).abs() < 1e-12);
        assert!(CyclePlan::new(vec![hyp(1.0)], 1.0, 1.0, 0).is_err());
        assert!(plan.next_phase(-1.0).is_err());
    }
}
