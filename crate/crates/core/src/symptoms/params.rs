//! Parameter schema shared by validation, profile IO, interpolation and the
//! service's `/symptoms` endpoint.

use std::fmt;

use serde::Serialize;

/// A single parameter value in its schema-neutral form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Bool(bool),
    Choice(&'static str),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Choice(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamKind {
    Number { min: f64, max: f64, integer: bool },
    Bool,
    Choice { options: &'static [&'static str] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    #[serde(flatten)]
    pub kind: ParamKind,
    pub default: ParamValue,
    /// Value at which the parameter no longer contributes to the effect.
    /// `None` for parameters that only shape an effect.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neutral: Option<ParamValue>,
    pub unit: &'static str,
    /// Not one of the tabulated shader parameters; optional in documents.
    pub extended: bool,
}

impl ParamSpec {
    pub const fn number(name: &'static str, min: f64, max: f64, default: f64) -> Self {
        ParamSpec {
            name,
            kind: ParamKind::Number {
                min,
                max,
                integer: false,
            },
            default: ParamValue::Number(default),
            neutral: None,
            unit: "",
            extended: false,
        }
    }

    pub const fn boolean(name: &'static str, default: bool) -> Self {
        ParamSpec {
            name,
            kind: ParamKind::Bool,
            default: ParamValue::Bool(default),
            neutral: None,
            unit: "",
            extended: false,
        }
    }

    pub const fn choice(
        name: &'static str,
        options: &'static [&'static str],
        default: &'static str,
    ) -> Self {
        ParamSpec {
            name,
            kind: ParamKind::Choice { options },
            default: ParamValue::Choice(default),
            neutral: None,
            unit: "",
            extended: false,
        }
    }

    pub const fn neutral(mut self, v: f64) -> Self {
        self.neutral = Some(ParamValue::Number(v));
        self
    }

    pub const fn integer(mut self) -> Self {
        if let ParamKind::Number { min, max, .. } = self.kind {
            self.kind = ParamKind::Number {
                min,
                max,
                integer: true,
            };
        }
        self
    }

    pub const fn unit(mut self, unit: &'static str) -> Self {
        self.unit = unit;
        self
    }

    pub const fn extended(mut self) -> Self {
        self.extended = true;
        self
    }

    /// Allowed interval rendered as `[min,max]`, or the option list.
    pub fn allowed(&self) -> String {
        match self.kind {
            ParamKind::Number { min, max, .. } => format!("[{min},{max}]"),
            ParamKind::Bool => "{false,true}".to_string(),
            ParamKind::Choice { options } => format!("{{{}}}", options.join(",")),
        }
    }

    /// Why `value` is not acceptable for this parameter, if it is not.
    pub fn check(&self, value: ParamValue) -> Option<String> {
        match (self.kind, value) {
            (ParamKind::Number { min, max, integer }, ParamValue::Number(v)) => {
                if !v.is_finite() || v < min || v > max {
                    Some(format!("outside {}", self.allowed()))
                } else if integer && v.fract() != 0.0 {
                    Some("must be a whole number".to_string())
                } else {
                    None
                }
            }
            (ParamKind::Bool, ParamValue::Bool(_)) => None,
            (ParamKind::Choice { options }, ParamValue::Choice(c)) => {
                (!options.contains(&c)).then(|| format!("not one of {}", self.allowed()))
            }
            _ => Some(format!("wrong kind, expected {:?}", self.kind)),
        }
    }

    /// Resolves a choice string to the schema's static option.
    pub fn option(&self, text: &str) -> Option<&'static str> {
        match self.kind {
            ParamKind::Choice { options } => options.iter().copied().find(|o| *o == text),
            _ => None,
        }
    }
}

/// Conversion between typed config fields and [`ParamValue`].
pub trait ParamField: Sized {
    fn to_value(&self) -> ParamValue;
    fn from_value(v: ParamValue) -> Option<Self>;
}

impl ParamField for f64 {
    fn to_value(&self) -> ParamValue {
        ParamValue::Number(*self)
    }
    fn from_value(v: ParamValue) -> Option<Self> {
        match v {
            ParamValue::Number(n) => Some(n),
            _ => None,
        }
    }
}

impl ParamField for bool {
    fn to_value(&self) -> ParamValue {
        ParamValue::Bool(*self)
    }
    fn from_value(v: ParamValue) -> Option<Self> {
        match v {
            ParamValue::Bool(b) => Some(b),
            _ => None,
        }
    }
}

/// One out-of-range or malformed parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Position in the symptom stack, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<usize>,
    /// Parameter record name, e.g. `Hyperopia`.
    pub symptom: &'static str,
    pub field: &'static str,
    pub value: String,
    pub allowed: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.entry {
            write!(f, "entry {i}: ")?;
        }
        write!(
            f,
            "{}.{} ∈ {} (got {}: {})",
            self.symptom, self.field, self.allowed, self.value, self.reason
        )
    }
}

/// Declares a parameter record: the struct, its schema, and conversions to
/// and from schema values. Field order is schema order.
macro_rules! param_record {
    (
        $(#[$meta:meta])*
        $name:ident {
            $( $(#[$fmeta:meta])* $field:ident : $ty:ty = $spec:expr ),* $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name {
            $( $(#[$fmeta])* pub $field: $ty, )*
        }

        impl $name {
            pub const PARAMS: &'static [$crate::symptoms::params::ParamSpec] = &[$($spec),*];

            pub fn values(&self) -> Vec<$crate::symptoms::params::ParamValue> {
                vec![$($crate::symptoms::params::ParamField::to_value(&self.$field)),*]
            }

            pub fn from_values(values: &[$crate::symptoms::params::ParamValue]) -> Option<Self> {
                #[allow(unused_mut, unused_variables)]
                let mut it = values.iter().copied();
                Some($name {
                    $( $field: <$ty as $crate::symptoms::params::ParamField>::from_value(it.next()?)?, )*
                })
            }
        }

        impl Default for $name {
            fn default() -> Self {
                let defaults: Vec<_> = Self::PARAMS.iter().map(|p| p.default).collect();
                Self::from_values(&defaults).expect("schema defaults match field types")
            }
        }
    };
}

pub(crate) use param_record;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_checks() {
        let spec = ParamSpec::number("cpd", 0.01, 30.0, 5.0);
        assert!(spec.check(ParamValue::Number(0.01)).is_none());
        assert!(spec.check(ParamValue::Number(30.0)).is_none());
        assert!(spec.check(ParamValue::Number(31.0)).is_some());
        assert!(spec.check(ParamValue::Number(f64::NAN)).is_some());
        assert!(spec.check(ParamValue::Bool(true)).is_some());
        assert_eq!(spec.allowed(), "[0.01,30]");
    }

    #[test]
    fn integer_checks() {
        let spec = ParamSpec::number("density", 0.0, 2500.0, 10.0).integer();
        assert!(spec.check(ParamValue::Number(12.0)).is_none());
        assert!(spec.check(ParamValue::Number(12.5)).is_some());
    }

    #[test]
    fn choice_resolution() {
        let spec = ParamSpec::choice("color", &["black", "white"], "black");
        assert_eq!(spec.option("white"), Some("white"));
        assert_eq!(spec.option("grey"), None);
        assert!(spec.check(ParamValue::Choice("grey")).is_some());
    }
}
