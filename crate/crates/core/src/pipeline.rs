//! Ordered composition of symptom shaders with per-session state.

use std::fmt;

use serde::Serialize;

use crate::frame::Frame;
use crate::symptoms::{RenderContext, ShaderCache, SymptomConfig};
use crate::{Error, Result};

pub use crate::symptoms::Violation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackEntry {
    pub config: SymptomConfig,
    pub enabled: bool,
}

impl StackEntry {
    pub fn new(config: impl Into<SymptomConfig>) -> Self {
        StackEntry {
            config: config.into(),
            enabled: true,
        }
    }

    pub fn disabled(config: impl Into<SymptomConfig>) -> Self {
        StackEntry {
            config: config.into(),
            enabled: false,
        }
    }
}

/// Shaders applied in list order, each to the previous output.
#[derive(Debug, Clone, PartialEq)]
pub struct SymptomStack {
    pub entries: Vec<StackEntry>,
    /// When false the stack renders as the identity.
    pub global_enabled: bool,
}

impl Default for SymptomStack {
    fn default() -> Self {
        SymptomStack {
            entries: Vec::new(),
            global_enabled: true,
        }
    }
}

impl SymptomStack {
    pub fn new(entries: Vec<StackEntry>) -> Self {
        SymptomStack {
            entries,
            global_enabled: true,
        }
    }

    pub fn push(&mut self, config: impl Into<SymptomConfig>) -> &mut Self {
        self.entries.push(StackEntry::new(config));
        self
    }

    pub fn with(mut self, config: impl Into<SymptomConfig>) -> Self {
        self.push(config);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Entries that `render` would apply.
    pub fn active(&self) -> impl Iterator<Item = &SymptomConfig> {
        self.entries
            .iter()
            .filter(move |e| self.global_enabled && e.enabled)
            .map(|e| &e.config)
    }
}

/// Every violation in a stack; empty means renderable.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every entry, including disabled ones, so that toggling an entry on
/// can never surface a new error.
pub fn validate(stack: &SymptomStack) -> ValidationReport {
    let violations = stack
        .entries
        .iter()
        .enumerate()
        .flat_map(|(i, e)| {
            e.config.violations().into_iter().map(move |mut v| {
                v.entry = Some(i);
                v
            })
        })
        .collect();
    ValidationReport { violations }
}

/// Mutable state of one rendering session: the seed every shader derives its
/// randomness from, the last rendered time, and memoized seed-derived data.
#[derive(Debug)]
pub struct SessionState {
    pub seed: u64,
    /// Wall-clock origin of the session in seconds; informational only.
    pub start_time: f64,
    last_time: Option<f64>,
    cache: ShaderCache,
}

impl SessionState {
    pub fn new(seed: u64) -> Self {
        Self::with_start(seed, 0.0)
    }

    pub fn with_start(seed: u64, start_time: f64) -> Self {
        SessionState {
            seed,
            start_time,
            last_time: None,
            cache: ShaderCache::default(),
        }
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last_time
    }

    pub fn cached_items(&self) -> usize {
        self.cache.len()
    }
}

/// Applies the enabled entries of `stack` in order. `state.seed` replaces
/// `ctx.seed`; `ctx.time` must not decrease within a session.
pub fn render(
    frame: &Frame,
    stack: &SymptomStack,
    ctx: &RenderContext,
    state: &mut SessionState,
) -> Result<Frame> {
    let report = validate(stack);
    if !report.is_ok() {
        return Err(Error::Validation(report));
    }
    if !ctx.time.is_finite() {
        return Err(Error::param("time", format!("must be finite, got {}", ctx.time)));
    }
    if let Some(last) = state.last_time {
        if ctx.time < last {
            return Err(Error::OutOfSequence {
                last,
                got: ctx.time,
            });
        }
    }
    ctx.geometry.validate()?;
    state.last_time = Some(ctx.time);

    let ctx = RenderContext {
        seed: state.seed,
        ..*ctx
    };
    let mut current: Option<Frame> = None;
    for config in stack.active() {
        current = Some(match current.take() {
            Some(owned) => config.render_owned(owned, &ctx, &mut state.cache),
            None => config.render_unchecked(frame, &ctx, &mut state.cache),
        });
    }
    Ok(current.unwrap_or_else(|| frame.clone()))
}
