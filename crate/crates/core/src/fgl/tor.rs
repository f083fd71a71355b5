use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::classify::RingMap;
use crate::algebra::{GradedElement, QMatrix, Ring};
use crate::error::{Error, Result};

/// Upper bound on the dimension of any single graded piece.
pub const MAX_PIECE_DIM: usize = 4000;

/// A finitely presented graded module: generators of the given degrees and
/// relations given as columns (entry `i` of a column is the coefficient of
/// generator `i`).
#[derive(Clone, Debug, PartialEq)]
pub struct ModulePresentation {
    ring: Ring,
    generators: Vec<i64>,
    relations: Vec<Vec<GradedElement>>,
    relation_degrees: Vec<i64>,
}

fn check_connected(ring: &Ring, what: &str) -> Result<()> {
    if !ring.is_rational() {
        return Err(Error::NeedsRationalBase(format!("{what} must be over the rationals")));
    }
    if ring.generators().iter().any(|g| g.invertible || g.deg >= 0) {
        return Err(Error::InvalidRing(format!(
            "{what} must be connected: every generator non-invertible of negative degree"
        )));
    }
    Ok(())
}

impl ModulePresentation {
    /// Zero columns are dropped; each remaining column must be homogeneous.
    pub fn new(ring: &Ring, generators: Vec<i64>, relations: Vec<Vec<GradedElement>>) -> Result<Self> {
        check_connected(ring, "the module's ring")?;
        let mut kept = Vec::new();
        let mut degrees = Vec::new();
        for (j, col) in relations.into_iter().enumerate() {
            if col.len() != generators.len() {
                return Err(Error::InvalidInput(format!(
                    "relation {j} has {} entries for {} generators",
                    col.len(),
                    generators.len()
                )));
            }
            let mut deg = None;
            for (i, entry) in col.iter().enumerate() {
                if entry.ring() != ring {
                    return Err(Error::RingMismatch(format!("relation {j}")));
                }
                if entry.is_zero() {
                    continue;
                }
                let d = entry.homogeneous_degree().ok_or_else(|| {
                    Error::DegreeMismatch(format!("entry {i} of relation {j} is not homogeneous"))
                })? + generators[i];
                match deg {
                    None => deg = Some(d),
                    Some(e) if e == d => {}
                    Some(e) => {
                        return Err(Error::DegreeMismatch(format!(
                            "relation {j} mixes degrees {e} and {d}"
                        )))
                    }
                }
            }
            if let Some(d) = deg {
                kept.push(col);
                degrees.push(d);
            }
        }
        Ok(Self { ring: ring.clone(), generators, relations: kept, relation_degrees: degrees })
    }

    pub fn parse(ring: &Ring, generators: Vec<i64>, relations: &[Vec<String>]) -> Result<Self> {
        let rels = relations
            .iter()
            .map(|col| col.iter().map(|t| GradedElement::parse(ring, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, generators, rels)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[i64] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vec<GradedElement>] {
        &self.relations
    }

    pub fn relation_degrees(&self) -> &[i64] {
        &self.relation_degrees
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorDegree {
    pub degree: i64,
    pub dim: usize,
    pub partial: bool,
}

/// Monomials of a graded ring by degree, as exponent vectors.
struct MonomialBasis {
    degrees: Vec<i64>,
    laurent: Option<usize>,
    cache: HashMap<i64, Vec<Vec<i32>>>,
}

impl MonomialBasis {
    fn new(ring: &Ring) -> Result<Self> {
        let degrees: Vec<i64> = ring.generators().iter().map(|g| g.deg).collect();
        let laurent = ring.generators().iter().position(|g| g.invertible);
        let connected = ring.generators().iter().all(|g| !g.invertible && g.deg < 0);
        let single_laurent = ring.num_generators() == 1 && laurent.is_some() && degrees[0] != 0;
        if !connected && !single_laurent {
            return Err(Error::InvalidRing(
                "target must be connected or a single Laurent generator".into(),
            ));
        }
        Ok(Self { degrees, laurent, cache: HashMap::new() })
    }

    fn connected(&self) -> bool {
        self.laurent.is_none()
    }

    fn of_degree(&mut self, d: i64) -> Result<&[Vec<i32>]> {
        if !self.cache.contains_key(&d) {
            let list = if let Some(i) = self.laurent {
                let g = self.degrees[i];
                if d % g == 0 {
                    vec![vec![(d / g) as i32]]
                } else {
                    vec![]
                }
            } else {
                let mut out = Vec::new();
                let mut cur = vec![0i32; self.degrees.len()];
                enumerate(&self.degrees, 0, d, &mut cur, &mut out);
                out
            };
            if list.len() > MAX_PIECE_DIM {
                return Err(Error::ResourceBound(format!("ring piece of degree {d} is too large")));
            }
            self.cache.insert(d, list);
        }
        Ok(&self.cache[&d])
    }
}

fn enumerate(degs: &[i64], i: usize, rest: i64, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
    if i == degs.len() {
        if rest == 0 {
            out.push(cur.clone());
        }
        return;
    }
    // every degree is negative, so rest / deg bounds the exponent
    let mut e = 0;
    let mut r = rest;
    while r <= 0 {
        cur[i] = e;
        enumerate(degs, i + 1, r, cur, out);
        e += 1;
        r -= degs[i];
    }
    cur[i] = 0;
}

/// A sparse element: monomial exponents to coefficient.
type Sparse = HashMap<Vec<i32>, BigRational>;

fn terms_of(x: &GradedElement) -> Sparse {
    x.terms().map(|(m, c)| (m.exponents().to_vec(), c.clone())).collect()
}

fn mono_mul(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Images of monomials under the ring map, computed with exponent arithmetic
/// so that no window truncation interferes.
struct MapCache {
    images: Vec<Sparse>,
    target_gens: usize,
    cache: HashMap<Vec<i32>, Sparse>,
}

impl MapCache {
    fn image(&mut self, m: &[i32]) -> Sparse {
        if let Some(v) = self.cache.get(m) {
            return v.clone();
        }
        let mut acc: Sparse = HashMap::from([(vec![0; self.target_gens], BigRational::from_integer(1.into()))]);
        for (i, &e) in m.iter().enumerate() {
            for _ in 0..e {
                let mut next = Sparse::new();
                for (a, ca) in &acc {
                    for (b, cb) in &self.images[i] {
                        *next.entry(mono_mul(a, b)).or_insert_with(BigRational::zero) += ca * cb;
                    }
                }
                next.retain(|_, c| !c.is_zero());
                acc = next;
            }
        }
        self.cache.insert(m.to_vec(), acc.clone());
        acc
    }
}

/// Degree-wise `Tor_1(M, T)` where `T` is a ring receiving `map` from the
/// module's ring.
///
/// Computed from `F_2 -> F_1 -> F_0 -> M` with `F_2` generated by kernel
/// vectors of `F_1 -> F_0`. For a connected target the answer is exact in
/// every degree; for a Laurent target kernel generators below the window are
/// not included and every degree is flagged partial.
pub fn tor1(module: &ModulePresentation, map: &RingMap, window: (i64, i64)) -> Result<Vec<TorDegree>> {
    if map.source() != module.ring() {
        return Err(Error::RingMismatch("ring map does not start at the module's ring".into()));
    }
    let target = map.target();
    if !target.is_rational() {
        return Err(Error::NeedsRationalBase("tor1 target".into()));
    }
    if window.0 > window.1 {
        return Err(Error::OutOfRange(format!("empty window {}..{}", window.0, window.1)));
    }
    if window.1 - window.0 > 400 {
        return Err(Error::ResourceBound("window spans more than 400 degrees".into()));
    }
    let target_connected = MonomialBasis::new(target)?.connected();
    let top = module.relation_degrees.iter().copied().max().unwrap_or(window.1).max(window.1);

    // Kernel vectors of A: F_1 -> F_0 in each degree d' in [window.0, top].
    let mut src_basis = MonomialBasis::new(module.ring())?;
    let kernels = (window.0..=top)
        .map(|d| {
            let basis = &mut src_basis;
            let f1 = f1_basis(module, basis, d)?;
            let f0 = f0_basis(module, basis, d)?;
            let a = a_matrix(module, &f1, &f0);
            let ker = a.nullspace();
            Ok((d, f1, ker))
        })
        .collect::<Result<Vec<_>>>()?;

    let images: Vec<Sparse> = map.images().iter().map(terms_of).collect();
    let make_cache = || MapCache { images: images.clone(), target_gens: target.num_generators(), cache: HashMap::new() };

    // Each kernel vector becomes an F_2 generator of degree d' whose image in
    // F_1 (x) T has coordinate theta(sum_m v_{j,m} m) on generator j.
    let mut cache = make_cache();
    let mut f2_gens: Vec<(i64, Vec<Sparse>)> = Vec::new();
    for (d, f1, ker) in &kernels {
        for v in ker {
            let mut col: Vec<Sparse> = vec![Sparse::new(); module.relations.len()];
            for ((j, m), c) in f1.iter().zip(v) {
                if c.is_zero() {
                    continue;
                }
                for (t, tc) in cache.image(m) {
                    *col[*j].entry(t).or_insert_with(BigRational::zero) += tc * c;
                }
            }
            for s in &mut col {
                s.retain(|_, c| !c.is_zero());
            }
            f2_gens.push((*d, col));
        }
    }

    let degrees: Vec<i64> = (window.0..=window.1).collect();
    degrees
        .par_iter()
        .map(|&d| {
            let mut tb = MonomialBasis::new(target)?;
            let mut cache = make_cache();
            // (F_1 (x) T)_d basis: (relation j, target monomial of degree d - s_j)
            let mut f1t = Vec::new();
            for (j, &s) in module.relation_degrees.iter().enumerate() {
                for t in tb.of_degree(d - s)? {
                    f1t.push((j, t.clone()));
                }
            }
            let mut f0t = Vec::new();
            for (i, &g) in module.generators.iter().enumerate() {
                for t in tb.of_degree(d - g)? {
                    f0t.push((i, t.clone()));
                }
            }
            let f0_index: HashMap<_, _> = f0t.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
            let f1_index: HashMap<_, _> = f1t.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();

            let mut a = QMatrix::zeros(f0t.len(), f1t.len());
            for (col, (j, t)) in f1t.iter().enumerate() {
                for (i, r) in module.relations[*j].iter().enumerate() {
                    for (m, c) in r.terms() {
                        for (img, ic) in cache.image(m.exponents()) {
                            let key = (i, mono_mul(&img, t));
                            if let Some(&row) = f0_index.get(&key) {
                                let v = a.get(row, col) + c * &ic;
                                a.set(row, col, v);
                            }
                        }
                    }
                }
            }
            let mut b_cols: Vec<Vec<BigRational>> = Vec::new();
            for (dg, col) in &f2_gens {
                if *dg < d && target_connected {
                    continue;
                }
                for t in tb.of_degree(d - dg)? {
                    let mut v = vec![BigRational::zero(); f1t.len()];
                    let mut any = false;
                    for (j, s) in col.iter().enumerate() {
                        for (m, c) in s {
                            if let Some(&row) = f1_index.get(&(j, mono_mul(m, t))) {
                                v[row] += c;
                                any = true;
                            }
                        }
                    }
                    if any {
                        b_cols.push(v);
                    }
                }
            }
            let mut b = QMatrix::zeros(f1t.len(), b_cols.len());
            for (c, v) in b_cols.into_iter().enumerate() {
                for (r, x) in v.into_iter().enumerate() {
                    b.set(r, c, x);
                }
            }
            let dim = f1t.len() - a.rank() - b.rank();
            Ok(TorDegree { degree: d, dim, partial: !target_connected })
        })
        .collect()
}

fn f1_basis(m: &ModulePresentation, basis: &mut MonomialBasis, d: i64) -> Result<Vec<(usize, Vec<i32>)>> {
    let mut out = Vec::new();
    for (j, &s) in m.relation_degrees.iter().enumerate() {
        for mono in basis.of_degree(d - s)? {
            out.push((j, mono.clone()));
        }
    }
    if out.len() > MAX_PIECE_DIM {
        return Err(Error::ResourceBound(format!("F_1 in degree {d} is too large")));
    }
    Ok(out)
}

fn f0_basis(m: &ModulePresentation, basis: &mut MonomialBasis, d: i64) -> Result<Vec<(usize, Vec<i32>)>> {
    let mut out = Vec::new();
    for (i, &g) in m.generators.iter().enumerate() {
        for mono in basis.of_degree(d - g)? {
            out.push((i, mono.clone()));
        }
    }
    Ok(out)
}

fn a_matrix(m: &ModulePresentation, f1: &[(usize, Vec<i32>)], f0: &[(usize, Vec<i32>)]) -> QMatrix {
    let index: HashMap<_, _> = f0.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
    let mut a = QMatrix::zeros(f0.len(), f1.len());
    for (col, (j, mono)) in f1.iter().enumerate() {
        for (i, r) in m.relations[*j].iter().enumerate() {
            for (rm, c) in r.terms() {
                if let Some(&row) = index.get(&(i, mono_mul(rm.exponents(), mono))) {
                    let v = a.get(row, col) + c;
                    a.set(row, col, v);
                }
            }
        }
    }
    a
}
