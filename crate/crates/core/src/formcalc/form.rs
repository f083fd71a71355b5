use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coeffs::{check_same_coeffs, CoefficientSpace};
use super::mesh::{check_same_mesh, Mesh};
use crate::algebra::{GradedElement, Ring};
use crate::error::{Error, Result};

/// A sampled differential form with values in a coefficient space.
///
/// Stored sparsely: one scalar array over the mesh points per (direction
/// mask, coefficient basis element) slot, masks listing directions in
/// increasing order. Coefficients sit to the right of the form part, so
/// `(w a) ^ (e b) = (-1)^{|a| |e|} (w ^ e)(a b)`.
#[derive(Clone, Debug)]
pub struct SampledForm {
    pub(crate) mesh: Arc<Mesh>,
    pub(crate) coeffs: Arc<CoefficientSpace>,
    pub(crate) slots: BTreeMap<(u32, usize), Vec<f64>>,
}

/// Sign of `dx_a ^ dx_b` relative to the sorted wedge, for disjoint masks.
pub(crate) fn merge_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn directions(mask: u32) -> Vec<usize> {
    (0..32).filter(|k| mask & (1 << k) != 0).collect()
}

pub(crate) fn accumulate(dst: &mut BTreeMap<(u32, usize), Vec<f64>>, key: (u32, usize), s: f64, src: &[f64]) {
    match dst.get_mut(&key) {
        Some(d) => d.par_iter_mut().zip(src.par_iter()).for_each(|(d, x)| *d += s * x),
        None => {
            dst.insert(key, src.par_iter().map(|x| s * x).collect());
        }
    }
}

impl SampledForm {
    pub fn zero(mesh: &Arc<Mesh>, coeffs: &Arc<CoefficientSpace>) -> Self {
        Self { mesh: mesh.clone(), coeffs: coeffs.clone(), slots: BTreeMap::new() }
    }

    /// The constant 0-form with value `c`.
    pub fn constant(mesh: &Arc<Mesh>, coeffs: &Arc<CoefficientSpace>, c: &GradedElement) -> Result<Self> {
        let v = coeffs.coordinates(c)?;
        let mut f = Self::zero(mesh, coeffs);
        for (b, x) in v.iter().enumerate() {
            if *x != 0.0 {
                f.slots.insert((0, b), vec![*x; mesh.npts()]);
            }
        }
        Ok(f)
    }

    pub fn one(mesh: &Arc<Mesh>, coeffs: &Arc<CoefficientSpace>) -> Self {
        let mut f = Self::zero(mesh, coeffs);
        f.slots.insert((0, coeffs.unit()), vec![1.0; mesh.npts()]);
        f
    }

    /// `g(x) dx_mask` times the basis element `b`.
    pub fn from_fn(
        mesh: &Arc<Mesh>,
        coeffs: &Arc<CoefficientSpace>,
        mask: u32,
        b: usize,
        g: impl Fn(&[f64]) -> f64 + Sync,
    ) -> Result<Self> {
        let data = (0..mesh.npts()).into_par_iter().map(|p| g(&mesh.coordinates(p))).collect();
        Self::from_slots(mesh, coeffs, BTreeMap::from([((mask, b), data)]))
    }

    /// Builds a form from raw slot arrays.
    pub fn from_slots(
        mesh: &Arc<Mesh>,
        coeffs: &Arc<CoefficientSpace>,
        slots: BTreeMap<(u32, usize), Vec<f64>>,
    ) -> Result<Self> {
        for ((m, b), v) in &slots {
            if m & !mesh.full_mask() != 0 || *b >= coeffs.dim() {
                return Err(Error::OutOfRange(format!("slot ({m:#b}, {b})")));
            }
            if v.len() != mesh.npts() {
                return Err(Error::MeshMismatch(format!("slot has {} values, expected {}", v.len(), mesh.npts())));
            }
        }
        Ok(Self { mesh: mesh.clone(), coeffs: coeffs.clone(), slots })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn coeffs(&self) -> &Arc<CoefficientSpace> {
        &self.coeffs
    }

    pub fn slots(&self) -> &BTreeMap<(u32, usize), Vec<f64>> {
        &self.slots
    }

    pub fn slot(&self, mask: u32, b: usize) -> Option<&[f64]> {
        self.slots.get(&(mask, b)).map(Vec::as_slice)
    }

    pub fn is_zero(&self) -> bool {
        self.slots.is_empty()
    }

    /// Value of slot `(mask, b)` at point `p`.
    pub fn value(&self, mask: u32, b: usize, p: usize) -> f64 {
        self.slots.get(&(mask, b)).map_or(0.0, |v| v[p])
    }

    /// The form degrees with a non-zero slot.
    pub fn form_degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self
            .slots
            .iter()
            .filter(|(_, v)| v.iter().any(|x| *x != 0.0))
            .map(|((m, _), _)| m.count_ones())
            .collect();
        d.sort();
        d.dedup();
        d
    }

    /// The part of form degree `k`.
    pub fn degree_part(&self, k: u32) -> Self {
        Self {
            mesh: self.mesh.clone(),
            coeffs: self.coeffs.clone(),
            slots: self.slots.iter().filter(|((m, _), _)| m.count_ones() == k).map(|(s, v)| (*s, v.clone())).collect(),
        }
    }

    /// Whether every non-zero slot has total degree `deg`. Always true over
    /// an ungraded coefficient ring.
    pub fn has_total_degree(&self, deg: i64) -> bool {
        !self.coeffs.is_graded()
            || self.slots.iter().all(|((m, b), v)| {
                m.count_ones() as i64 + self.coeffs.degree(*b) == deg || v.iter().all(|x| *x == 0.0)
            })
    }

    pub fn check_total_degree(&self, deg: i64, what: &str) -> Result<()> {
        if self.has_total_degree(deg) {
            Ok(())
        } else {
            Err(Error::DegreeMismatch(format!("{what} is not of total degree {deg}")))
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        check_same_mesh(&self.mesh, &other.mesh)?;
        check_same_coeffs(&self.coeffs, &other.coeffs)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (key, v) in &other.slots {
            accumulate(&mut out.slots, *key, s, v);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out.slots.values_mut() {
            v.par_iter_mut().for_each(|x| *x *= s);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Largest absolute sample.
    pub fn max_abs(&self) -> f64 {
        self.slots
            .values()
            .map(|v| v.par_iter().map(|x| x.abs()).reduce(|| 0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Largest absolute sample of `self - other`.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Multiplies by a ring element. Coefficients are of even degree in all
    /// supported rings, so the side does not matter.
    pub fn mul_element(&self, c: &GradedElement) -> Result<Self> {
        let cv = self.coeffs.coordinates(c)?;
        let mut out = Self::zero(&self.mesh, &self.coeffs);
        for ((m, a), v) in &self.slots {
            for (b, cb) in cv.iter().enumerate() {
                if *cb == 0.0 {
                    continue;
                }
                if let Some(t) = self.coeffs.product(*a, b) {
                    accumulate(&mut out.slots, (*m, t), *cb, v);
                }
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let cs = &self.coeffs;
        let mut out = Self::zero(&self.mesh, cs);
        for ((ma, a), x) in &self.slots {
            for ((mb, b), y) in &other.slots {
                if ma & mb != 0 {
                    continue;
                }
                let Some(t) = cs.product(*a, *b) else { continue };
                let koszul = if cs.degree(*a) * mb.count_ones() as i64 % 2 == 0 { 1.0 } else { -1.0 };
                let s = merge_sign(*ma, *mb) * koszul;
                let key = (ma | mb, t);
                match out.slots.get_mut(&key) {
                    Some(d) => d
                        .par_iter_mut()
                        .zip(x.par_iter().zip(y.par_iter()))
                        .for_each(|(d, (x, y))| *d += s * x * y),
                    None => {
                        out.slots.insert(key, x.par_iter().zip(y.par_iter()).map(|(x, y)| s * x * y).collect());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Re-expresses a form over the real numbers in a richer coefficient
    /// space, through the unit.
    pub fn lift(&self, coeffs: &Arc<CoefficientSpace>) -> Result<Self> {
        if self.coeffs.dim() != 1 {
            return Err(Error::RingMismatch("only scalar forms can be lifted".into()));
        }
        let slots = self.slots.iter().map(|((m, _), v)| ((*m, coeffs.unit()), v.clone())).collect();
        Ok(Self { mesh: self.mesh.clone(), coeffs: coeffs.clone(), slots })
    }

    /// Drops slots that are identically zero.
    pub fn pruned(mut self) -> Self {
        self.slots.retain(|_, v| v.iter().any(|x| *x != 0.0));
        self
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(&FormRecord::from(self))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: FormRecord =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("form json: {e}")))?;
        rec.into_form()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentRecord {
    directions: Vec<usize>,
    /// One array per coefficient basis element, in basis order.
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormRecord {
    mesh: Mesh,
    ring: crate::algebra::GradedRingSpec,
    components: Vec<ComponentRecord>,
}

impl From<&SampledForm> for FormRecord {
    fn from(f: &SampledForm) -> Self {
        let mut masks: Vec<u32> = f.slots.keys().map(|(m, _)| *m).collect();
        masks.dedup();
        FormRecord {
            mesh: (*f.mesh).clone(),
            ring: (**f.coeffs.ring()).clone(),
            components: masks
                .into_iter()
                .map(|m| ComponentRecord {
                    directions: directions(m),
                    values: (0..f.coeffs.dim())
                        .map(|b| f.slot(m, b).map_or_else(|| vec![0.0; f.mesh.npts()], <[f64]>::to_vec))
                        .collect(),
                })
                .collect(),
        }
    }
}

impl FormRecord {
    fn into_form(self) -> Result<SampledForm> {
        let mesh = Arc::new(self.mesh);
        let ring: Ring = Arc::new(self.ring);
        let coeffs = CoefficientSpace::new(&ring)?;
        let mut slots = BTreeMap::new();
        for c in self.components {
            let mut mask = 0u32;
            for d in c.directions {
                if d >= mesh.dim() || mask & (1 << d) != 0 {
                    return Err(Error::InvalidInput(format!("bad direction {d}")));
                }
                mask |= 1 << d;
            }
            if c.values.len() != coeffs.dim() {
                return Err(Error::InvalidInput("one value array per basis element is required".into()));
            }
            for (b, v) in c.values.into_iter().enumerate() {
                if v.iter().any(|x| *x != 0.0) {
                    slots.insert((mask, b), v);
                }
            }
        }
        SampledForm::from_slots(&mesh, &coeffs, slots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_signs() {
        assert_eq!(merge_sign(0b01, 0b10), 1.0);
        assert_eq!(merge_sign(0b10, 0b01), -1.0);
        assert_eq!(merge_sign(0b101, 0b010), -1.0);
        assert_eq!(merge_sign(0b110, 0b001), 1.0);
    }

    #[test]
    fn wedge_anticommutes() {
        let m = Mesh::torus(2, 4).unwrap();
        let s = CoefficientSpace::scalar();
        let dx = SampledForm::from_fn(&m, &s, 0b01, 0, |_| 1.0).unwrap();
        let dy = SampledForm::from_fn(&m, &s, 0b10, 0, |_| 1.0).unwrap();
        let xy = dx.wedge(&dy).unwrap();
        let yx = dy.wedge(&dx).unwrap();
        assert_eq!(xy.value(0b11, 0, 3), 1.0);
        assert_eq!(yx.value(0b11, 0, 3), -1.0);
        assert_eq!(dx.wedge(&dx).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let m = Mesh::torus(1, 4).unwrap();
        let s = CoefficientSpace::scalar();
        let f = SampledForm::from_fn(&m, &s, 1, 0, |x| x[0]).unwrap();
        let back = SampledForm::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back.max_diff(&f).unwrap(), 0.0);
    }
}
