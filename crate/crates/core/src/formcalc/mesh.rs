use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported total dimension.
pub const MAX_DIM: usize = 6;

/// One factor of a product mesh. A circle of period 1 carries `n` samples at
/// `i/n`; the unit interval carries `n + 1` samples at `i/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Factor {
    Circle { n: usize },
    Interval { n: usize },
}

impl Factor {
    pub fn n(&self) -> usize {
        match *self {
            Factor::Circle { n } | Factor::Interval { n } => n,
        }
    }

    pub fn samples(&self) -> usize {
        match *self {
            Factor::Circle { n } => n,
            Factor::Interval { n } => n + 1,
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Factor::Circle { .. })
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 / self.n() as f64
    }
}

/// A product of circles with at most one interval, which must come first.
/// Points are stored row-major: the last factor varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mesh {
    factors: Vec<Factor>,
    strides: Vec<usize>,
    npts: usize,
}

impl Serialize for Mesh {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mesh {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let factors = Vec::<Factor>::deserialize(d)?;
        Mesh::build(factors).map_err(serde::de::Error::custom)
    }
}

impl Mesh {
    fn build(factors: Vec<Factor>) -> Result<Self> {
        if factors.len() > MAX_DIM {
            return Err(Error::ResourceBound(format!(
                "mesh of dimension {} exceeds {MAX_DIM}",
                factors.len()
            )));
        }
        for (k, f) in factors.iter().enumerate() {
            if f.n() < 4 {
                return Err(Error::InvalidMesh(format!("factor {k} has fewer than 4 intervals")));
            }
            if let Factor::Interval { n } = f {
                if k != 0 {
                    return Err(Error::InvalidMesh("the interval must be the first factor".into()));
                }
                if n % 2 != 0 {
                    return Err(Error::InvalidMesh("interval needs an even count for Simpson".into()));
                }
            }
        }
        let mut strides = vec![1; factors.len()];
        for k in (0..factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * factors[k + 1].samples();
        }
        let npts = factors.iter().map(Factor::samples).product();
        Ok(Self { factors, strides, npts })
    }

    pub fn new(factors: Vec<Factor>) -> Result<Arc<Self>> {
        Self::build(factors).map(Arc::new)
    }

    /// `T^dim` with `n` samples per circle.
    pub fn torus(dim: usize, n: usize) -> Result<Arc<Self>> {
        Self::new(vec![Factor::Circle { n }; dim])
    }

    /// `[0,1] x V`.
    pub fn cylinder(n_t: usize, v: &Mesh) -> Result<Arc<Self>> {
        let mut f = vec![Factor::Interval { n: n_t }];
        f.extend_from_slice(&v.factors);
        Self::new(f)
    }

    /// `self x other`.
    pub fn product(&self, other: &Mesh) -> Result<Arc<Self>> {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        Self::new(f)
    }

    /// The factors `range` as a mesh of their own.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Arc<Self>> {
        Self::new(self.factors[range].to_vec())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn npts(&self) -> usize {
        self.npts
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn has_interval(&self) -> bool {
        self.factors.first().is_some_and(|f| !f.is_circle())
    }

    /// Mask of all circle directions.
    pub fn circle_mask(&self) -> u32 {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_circle())
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    pub fn full_mask(&self) -> u32 {
        (1u32 << self.dim()) - 1
    }

    /// Sample index along factor `k` of the flat point `p`.
    pub fn index_along(&self, p: usize, k: usize) -> usize {
        (p / self.strides[k]) % self.factors[k].samples()
    }

    pub fn multi_index(&self, p: usize) -> Vec<usize> {
        (0..self.dim()).map(|k| self.index_along(p, k)).collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coordinates(&self, p: usize) -> Vec<f64> {
        (0..self.dim()).map(|k| self.factors[k].coordinate(self.index_along(p, k))).collect()
    }
}

pub(crate) fn check_same_mesh(a: &Arc<Mesh>, b: &Arc<Mesh>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::MeshMismatch(format!("{:?} vs {:?}", a.factors, b.factors)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let m = Mesh::new(vec![Factor::Interval { n: 4 }, Factor::Circle { n: 6 }]).unwrap();
        assert_eq!(m.npts(), 30);
        assert_eq!(m.strides(), [6, 1]);
        assert_eq!(m.multi_index(13), [2, 1]);
        assert_eq!(m.flat_index(&[2, 1]), 13);
        assert_eq!(m.circle_mask(), 0b10);
    }

    #[test]
    fn validation() {
        assert!(Mesh::torus(7, 4).is_err());
        assert!(Mesh::torus(2, 3).is_err());
        assert!(Mesh::new(vec![Factor::Circle { n: 8 }, Factor::Interval { n: 8 }]).is_err());
        assert!(Mesh::new(vec![Factor::Interval { n: 7 }]).is_err());
    }

    #[test]
    fn json() {
        let m = Mesh::new(vec![Factor::Interval { n: 4 }, Factor::Circle { n: 8 }]).unwrap();
        let text = serde_json::to_string(&*m).unwrap();
        assert_eq!(text, r#"[{"kind":"interval","n":4},{"kind":"circle","n":8}]"#);
        let back: Mesh = serde_json::from_str(&text).unwrap();
        assert_eq!(back, *m);
    }
}
