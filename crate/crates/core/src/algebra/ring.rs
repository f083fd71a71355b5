use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the absolute value of any exponent.
pub const DEFAULT_MAX_EXPONENT: u32 = 1 << 12;

/// Shared handle to a ring description. Elements keep one of these.
pub type Ring = Arc<GradedRingSpec>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    Z,
    Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: String,
    pub deg: i64,
    #[serde(default)]
    pub invertible: bool,
}

impl Generator {
    pub fn new(name: impl Into<String>, deg: i64) -> Self {
        Self { name: name.into(), deg, invertible: false }
    }

    pub fn laurent(name: impl Into<String>, deg: i64) -> Self {
        Self { name: name.into(), deg, invertible: true }
    }
}

/// A commutative graded ring `base[g_1, .., g_k]` (some generators Laurent),
/// together with the degree window every stored element is truncated to.
///
/// A ring without generators is the base ring concentrated in degree zero;
/// homogeneity checks elsewhere in the crate are waived for it, so that
/// classical rational-valued genera (Todd, L, Â) can be written down directly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RingSpecJson", into = "RingSpecJson")]
pub struct GradedRingSpec {
    generators: Vec<Generator>,
    base: Base,
    window: (i64, i64),
    max_exponent: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RingSpecJson {
    generators: Vec<Generator>,
    base: Base,
    window: [i64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_exponent: Option<u32>,
}

impl TryFrom<RingSpecJson> for GradedRingSpec {
    type Error = Error;

    fn try_from(j: RingSpecJson) -> Result<Self> {
        let mut spec = GradedRingSpec::new(j.generators, j.base, (j.window[0], j.window[1]))?;
        if let Some(m) = j.max_exponent {
            spec.max_exponent = m;
        }
        Ok(spec)
    }
}

impl From<GradedRingSpec> for RingSpecJson {
    fn from(s: GradedRingSpec) -> Self {
        RingSpecJson {
            generators: s.generators,
            base: s.base,
            window: [s.window.0, s.window.1],
            max_exponent: (s.max_exponent != DEFAULT_MAX_EXPONENT).then_some(s.max_exponent),
        }
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl GradedRingSpec {
    pub fn new(generators: Vec<Generator>, base: Base, window: (i64, i64)) -> Result<Self> {
        let mut seen = HashSet::new();
        for g in &generators {
            if !valid_name(&g.name) {
                return Err(Error::InvalidRing(format!("bad generator name `{}`", g.name)));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::InvalidRing(format!("duplicate generator `{}`", g.name)));
            }
            if g.deg == 0 && !g.invertible {
                return Err(Error::InvalidRing(format!(
                    "generator `{}` has degree 0 but is not a unit",
                    g.name
                )));
            }
        }
        if window.0 > 0 || window.1 < 0 {
            return Err(Error::InvalidRing(format!(
                "window [{}, {}] must contain degree 0",
                window.0, window.1
            )));
        }
        Ok(Self { generators, base, window, max_exponent: DEFAULT_MAX_EXPONENT })
    }

    /// `Q` with no generators.
    pub fn rationals() -> Ring {
        Arc::new(Self::new(vec![], Base::Q, (0, 0)).expect("valid"))
    }

    /// `Z` with no generators.
    pub fn integers() -> Ring {
        Arc::new(Self::new(vec![], Base::Z, (0, 0)).expect("valid"))
    }

    /// Polynomial ring `Q[CP1, .., CPn]` with `deg CPk = -2k`, window `[-2n', 0]`.
    pub fn cobordism_rational(n: usize, lowest_degree: i64) -> Ring {
        let gens = (1..=n).map(|k| Generator::new(format!("CP{k}"), -2 * k as i64)).collect();
        Arc::new(Self::new(gens, Base::Q, (lowest_degree.min(0), 0)).expect("valid"))
    }

    pub fn with_max_exponent(mut self, bound: u32) -> Self {
        self.max_exponent = bound;
        self
    }

    pub fn into_ring(self) -> Ring {
        Arc::new(self)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn max_exponent(&self) -> u32 {
        self.max_exponent
    }

    pub fn is_rational(&self) -> bool {
        self.base == Base::Q
    }

    /// True when the ring carries a grading worth checking (it has generators).
    pub fn is_graded(&self) -> bool {
        !self.generators.is_empty()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn in_window(&self, deg: i64) -> bool {
        self.window.0 <= deg && deg <= self.window.1
    }

    /// Same ring except for the window.
    pub fn with_window(&self, window: (i64, i64)) -> Result<Self> {
        let mut out = Self::new(self.generators.clone(), self.base, window)?;
        out.max_exponent = self.max_exponent;
        Ok(out)
    }

    /// Same generators and window over the rationals.
    pub fn rationalized(&self) -> Self {
        Self { base: Base::Q, ..self.clone() }
    }
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn check_same(a: &Ring, b: &Ring) -> Result<()> {
    if same_ring(a, b) {
        Ok(())
    } else {
        Err(Error::RingMismatch(format!(
            "{:?} vs {:?}",
            a.generators.iter().map(|g| &g.name).collect::<Vec<_>>(),
            b.generators.iter().map(|g| &g.name).collect::<Vec<_>>()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names() {
        let err = GradedRingSpec::new(
            vec![Generator::new("x", -2), Generator::new("x", -4)],
            Base::Q,
            (-8, 0),
        );
        assert!(matches!(err, Err(Error::InvalidRing(_))));
    }

    #[test]
    fn zero_degree_needs_unit() {
        assert!(GradedRingSpec::new(vec![Generator::new("e", 0)], Base::Z, (0, 0)).is_err());
        assert!(GradedRingSpec::new(vec![Generator::laurent("e", 0)], Base::Z, (0, 0)).is_ok());
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{"generators":[{"name":"u","deg":-2,"invertible":true}],"base":"Z","window":[-20,20]}"#;
        let spec: GradedRingSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.generators()[0].name, "u");
        assert_eq!(spec.window(), (-20, 20));
        assert_eq!(serde_json::to_string(&spec).unwrap(), text);
        let bad = r#"{"generators":[],"base":"Q","window":[0,0],"extra":1}"#;
        assert!(serde_json::from_str::<GradedRingSpec>(bad).is_err());
    }
}
