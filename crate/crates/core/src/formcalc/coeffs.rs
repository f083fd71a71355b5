use std::collections::HashMap;
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::algebra::{GradedElement, GradedRingSpec, Monomial, Ring};
use crate::error::{Error, Result};

/// Largest supported coefficient basis.
pub const MAX_BASIS: usize = 256;

/// The real algebra spanned by the monomials of a graded ring whose degrees
/// lie in the ring's window, with products truncated to the window.
#[derive(Debug, PartialEq, Eq)]
pub struct CoefficientSpace {
    ring: Ring,
    basis: Vec<Monomial>,
    degrees: Vec<i64>,
    index: HashMap<Monomial, usize>,
    table: Vec<Vec<Option<usize>>>,
}

impl CoefficientSpace {
    /// Supports rings without generators and rings whose generators are all
    /// non-invertible of negative degree (so that the window cuts out a
    /// finite basis).
    pub fn new(ring: &Ring) -> Result<Arc<Self>> {
        if ring.generators().iter().any(|g| g.invertible || g.deg >= 0) {
            return Err(Error::InvalidRing(
                "coefficient spaces need non-invertible generators of negative degree".into(),
            ));
        }
        let degs: Vec<i64> = ring.generators().iter().map(|g| g.deg).collect();
        let lo = ring.window().0;
        let mut basis = Vec::new();
        let mut cur = vec![0i32; degs.len()];
        enumerate(&degs, 0, 0, lo, &mut cur, &mut basis);
        if basis.len() > MAX_BASIS {
            return Err(Error::ResourceBound(format!(
                "coefficient basis of size {} exceeds {MAX_BASIS}",
                basis.len()
            )));
        }
        basis.sort();
        let degrees: Vec<i64> = basis
            .iter()
            .map(|m| m.exponents().iter().zip(&degs).map(|(e, d)| *e as i64 * d).sum())
            .collect();
        let index: HashMap<_, _> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let table = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| {
                        let m = Monomial::from_exponents(
                            a.exponents().iter().zip(b.exponents()).map(|(x, y)| x + y).collect(),
                        );
                        index.get(&m).copied()
                    })
                    .collect()
            })
            .collect();
        Ok(Arc::new(Self { ring: ring.clone(), basis, degrees, index, table }))
    }

    /// Plain real numbers.
    pub fn scalar() -> Arc<Self> {
        Self::new(&GradedRingSpec::rationals()).expect("valid")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn degree(&self, b: usize) -> i64 {
        self.degrees[b]
    }

    pub fn is_graded(&self) -> bool {
        self.ring.is_graded()
    }

    /// Index of the unit.
    pub fn unit(&self) -> usize {
        0
    }

    pub fn product(&self, a: usize, b: usize) -> Option<usize> {
        self.table[a][b]
    }

    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn basis_label(&self, b: usize) -> String {
        GradedElement::monomial(&self.ring, self.basis[b].clone(), num_traits::One::one())
            .map(|e| e.to_string())
            .unwrap_or_default()
    }

    /// Coordinates of a ring element.
    pub fn coordinates(&self, x: &GradedElement) -> Result<Vec<f64>> {
        if x.ring() != &self.ring {
            return Err(Error::RingMismatch("element outside the coefficient ring".into()));
        }
        let mut out = vec![0.0; self.dim()];
        for (m, c) in x.terms() {
            let b = self.basis_index(m).ok_or_else(|| {
                Error::WindowTooSmall(format!("monomial of degree {} is outside the window", x.degree_of(m)))
            })?;
            out[b] = c.to_f64().unwrap_or(f64::NAN);
        }
        Ok(out)
    }
}

fn enumerate(degs: &[i64], i: usize, deg: i64, lo: i64, cur: &mut Vec<i32>, out: &mut Vec<Monomial>) {
    if i == degs.len() {
        out.push(Monomial::from_exponents(cur.clone()));
        return;
    }
    let mut d = deg;
    let mut e = 0;
    while d >= lo {
        cur[i] = e;
        enumerate(degs, i + 1, d, lo, cur, out);
        e += 1;
        d += degs[i];
        if out.len() > MAX_BASIS {
            break;
        }
    }
    cur[i] = 0;
}

pub(crate) fn check_same_coeffs(a: &Arc<CoefficientSpace>, b: &Arc<CoefficientSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.ring == b.ring {
        Ok(())
    } else {
        Err(Error::RingMismatch("forms have different coefficient spaces".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Base, Generator};

    #[test]
    fn truncated_basis() {
        let r = GradedRingSpec::new(vec![Generator::new("p1", -2), Generator::new("p2", -4)], Base::Q, (-4, 0))
            .unwrap()
            .into_ring();
        let c = CoefficientSpace::new(&r).unwrap();
        assert_eq!(c.dim(), 4);
        let labels: Vec<_> = (0..4).map(|b| c.basis_label(b)).collect();
        assert_eq!(labels, ["1", "p2", "p1", "p1^2"]);
        let p1 = c.basis_index(&Monomial::from_exponents(vec![1, 0])).unwrap();
        let p2 = c.basis_index(&Monomial::from_exponents(vec![0, 1])).unwrap();
        assert_eq!(c.product(p1, p1), Some(3));
        assert_eq!(c.product(p1, p2), None);
        assert_eq!(c.degree(p2), -4);
    }

    #[test]
    fn scalar_space() {
        let s = CoefficientSpace::scalar();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.product(0, 0), Some(0));
    }
}
