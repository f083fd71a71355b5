use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::characteristic::CharacteristicSeries;
use crate::algebra::{GradedElement, Ring, TruncatedSeries};
use crate::error::{Error, Result};

/// Largest weight accepted by [`k_phi`].
pub const MAX_WEIGHT: u32 = 16;

/// Anything Chern classes can be evaluated in: a commutative algebra over the
/// coefficient ring of a characteristic series.
pub trait ChernAlgebra: Clone + Sync + Send {
    fn unit_like(&self) -> Self;
    fn add(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    /// Multiplication by a coefficient-ring element.
    fn scale_by(&self, c: &GradedElement) -> Result<Self>;
    /// Checks that `self` may stand in for a class of cohomological degree `deg`.
    fn check_degree(&self, deg: i64) -> Result<()>;
}

impl ChernAlgebra for GradedElement {
    fn unit_like(&self) -> Self {
        GradedElement::one(self.ring())
    }

    fn add(&self, other: &Self) -> Result<Self> {
        GradedElement::add(self, other)
    }

    fn mul(&self, other: &Self) -> Result<Self> {
        GradedElement::mul(self, other)
    }

    fn scale_by(&self, c: &GradedElement) -> Result<Self> {
        GradedElement::mul(self, c)
    }

    fn check_degree(&self, deg: i64) -> Result<()> {
        if self.respects_degree(deg) {
            Ok(())
        } else {
            Err(Error::DegreeMismatch(format!("`{self}` is not of degree {deg}")))
        }
    }
}

impl ChernAlgebra for TruncatedSeries {
    fn unit_like(&self) -> Self {
        TruncatedSeries::one(self.ring(), self.vars(), self.order())
    }

    fn add(&self, other: &Self) -> Result<Self> {
        TruncatedSeries::add(self, other)
    }

    fn mul(&self, other: &Self) -> Result<Self> {
        TruncatedSeries::mul(self, other)
    }

    fn scale_by(&self, c: &GradedElement) -> Result<Self> {
        self.scale(c)
    }

    fn check_degree(&self, deg: i64) -> Result<()> {
        let graded = self.ring().is_graded();
        for (e, c) in self.terms() {
            let var_deg: i64 = e.iter().zip(self.vars().vars()).map(|(k, v)| *k as i64 * v.deg).sum();
            let ok = if graded { c.is_homogeneous_of(deg - var_deg) } else { var_deg == deg };
            if !ok {
                return Err(Error::DegreeMismatch(format!(
                    "term {} of a class of degree {deg}",
                    self.format_monomial(e)
                )));
            }
        }
        Ok(())
    }
}

/// A polynomial in `c_1, c_2, ...`: exponent vectors (index `i` is the power
/// of `c_{i+1}`) mapped to coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernPoly {
    ring: Ring,
    terms: BTreeMap<Vec<u32>, GradedElement>,
}

impl ChernPoly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GradedElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> GradedElement {
        let mut key = exps.to_vec();
        while key.last() == Some(&0) {
            key.pop();
        }
        self.terms.get(&key).cloned().unwrap_or_else(|| GradedElement::zero(&self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Weight with `c_i` counted as `2i`.
    pub fn weight(exps: &[u32]) -> u32 {
        exps.iter().enumerate().map(|(i, e)| 2 * (i as u32 + 1) * e).sum()
    }

    pub fn format_monomial(exps: &[u32]) -> String {
        let parts: Vec<_> = exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| if *e == 1 { format!("c{}", i + 1) } else { format!("c{}^{}", i + 1, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Substitutes values for `c_1, c_2, ...`; missing values count as zero.
    pub fn evaluate<T: ChernAlgebra>(&self, unit: &T, chern: &[T]) -> Result<T> {
        let mut acc: Option<T> = None;
        'terms: for (e, c) in &self.terms {
            let mut t = unit.scale_by(c)?;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let Some(v) = chern.get(i) else { continue 'terms };
                for _ in 0..k {
                    t = t.mul(v)?;
                }
            }
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        match acc {
            Some(a) => Ok(a),
            None => unit.scale_by(&GradedElement::zero(&self.ring)),
        }
    }
}

impl fmt::Display for ChernPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<_> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.cmp(a));
        for (i, e) in keys.into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let c = &self.terms[e];
            if c.num_terms() == 1 {
                write!(f, "{c}*{}", Self::format_monomial(e))?;
            } else {
                write!(f, "({c})*{}", Self::format_monomial(e))?;
            }
        }
        Ok(())
    }
}

/// The polynomials `K_1, ..., K_N` of a characteristic series.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeSequence {
    ring: Ring,
    polys: Vec<ChernPoly>,
}

impl MultiplicativeSequence {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn max_weight(&self) -> u32 {
        self.polys.len() as u32
    }

    /// `K_n` for `1 <= n <= N`.
    pub fn k(&self, n: u32) -> &ChernPoly {
        &self.polys[n as usize - 1]
    }

    pub fn polys(&self) -> &[ChernPoly] {
        &self.polys
    }
}

/// Partitions of `n` as non-increasing part lists, in decreasing lex order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            prefix.push(p);
            rec(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Coefficient of `z^lambda` in `e_{mu_1} e_{mu_2} ...` over `lambda.len()`
/// roots: the number of ways to let each factor pick distinct roots so that
/// root `i` is picked `lambda_i` times.
fn elementary_coefficient(mu: &[u32], lambda: &[u32]) -> BigInt {
    fn rec(
        mu: &[u32],
        remaining: &mut Vec<u32>,
        memo: &mut HashMap<(usize, Vec<u32>), BigInt>,
    ) -> BigInt {
        let Some((&k, rest)) = mu.split_first() else {
            return if remaining.iter().all(|&r| r == 0) { 1.into() } else { 0.into() };
        };
        let key = (mu.len(), remaining.clone());
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut total = BigInt::from(0);
        let n = remaining.len();
        // choose a k-subset of roots with positive remaining capacity
        let mut chosen = Vec::with_capacity(k as usize);
        fn subsets(
            start: usize,
            k: u32,
            n: usize,
            chosen: &mut Vec<usize>,
            remaining: &mut Vec<u32>,
            rest: &[u32],
            memo: &mut HashMap<(usize, Vec<u32>), BigInt>,
            total: &mut BigInt,
        ) {
            if chosen.len() == k as usize {
                for &i in chosen.iter() {
                    remaining[i] -= 1;
                }
                *total += rec(rest, remaining, memo);
                for &i in chosen.iter() {
                    remaining[i] += 1;
                }
                return;
            }
            for i in start..n {
                if remaining[i] > 0 {
                    chosen.push(i);
                    subsets(i + 1, k, n, chosen, remaining, rest, memo, total);
                    chosen.pop();
                }
            }
        }
        subsets(0, k, n, &mut chosen, remaining, rest, memo, &mut total);
        memo.insert(key, total.clone());
        total
    }
    let mut remaining = lambda.to_vec();
    rec(mu, &mut remaining, &mut HashMap::new())
}

/// Exponents of `e_1^{a_1 - a_2} e_2^{a_2 - a_3} ...`, the product of
/// elementary functions whose leading monomial is `z^a`.
fn leading_e_exponents(lambda: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = (0..lambda.len())
        .map(|i| lambda[i] - lambda.get(i + 1).copied().unwrap_or(0))
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn e_exponents_to_parts(exps: &[u32]) -> Vec<u32> {
    let mut parts = Vec::new();
    for (i, &e) in exps.iter().enumerate().rev() {
        parts.extend(std::iter::repeat(i as u32 + 1).take(e as usize));
    }
    parts
}

/// `K_n`: the weight-`2n` part of `prod_{i=1..n} phi(z_i)` written in the
/// elementary symmetric functions of the roots.
fn k_n(phi: &CharacteristicSeries, n: u32) -> Result<ChernPoly> {
    let ring = phi.ring().clone();
    let parts = partitions(n);
    let pad = |p: &Vec<u32>| {
        let mut v = p.clone();
        v.resize(n as usize, 0);
        v
    };
    // Coefficient of z^lambda in prod phi(z_i) is phi_{lambda_1} phi_{lambda_2} ...
    let mut remainder: BTreeMap<Vec<u32>, GradedElement> = BTreeMap::new();
    for lambda in &parts {
        let mut c = GradedElement::one(&ring);
        for &p in lambda {
            c = c.mul(&phi.coeff(p))?;
        }
        if !c.is_zero() {
            remainder.insert(pad(lambda), c);
        }
    }
    let mut terms = BTreeMap::new();
    // Eliminate the lex-largest remaining partition until nothing is left.
    while let Some((lambda, c)) = remainder.iter().next_back().map(|(l, c)| (l.clone(), c.clone())) {
        let e_exps = leading_e_exponents(&lambda);
        let mu = e_exponents_to_parts(&e_exps);
        for other in &parts {
            let key = pad(other);
            if key > lambda {
                continue;
            }
            let m = elementary_coefficient(&mu, &key);
            if m == BigInt::from(0) {
                continue;
            }
            let delta = c.scale(&BigRational::from_integer(m))?;
            let entry = remainder.remove(&key).unwrap_or_else(|| GradedElement::zero(&ring));
            let updated = entry.sub(&delta)?;
            if !updated.is_zero() {
                remainder.insert(key, updated);
            }
        }
        terms.insert(e_exps, c);
    }
    Ok(ChernPoly { ring, terms })
}

/// The multiplicative sequence of `phi` up to weight `max_weight`.
pub fn k_phi(phi: &CharacteristicSeries, max_weight: u32) -> Result<MultiplicativeSequence> {
    if max_weight == 0 {
        return Err(Error::OutOfRange("weight bound must be at least 1".into()));
    }
    if max_weight > MAX_WEIGHT {
        return Err(Error::ResourceBound(format!(
            "weight {max_weight} exceeds the limit {MAX_WEIGHT}"
        )));
    }
    let polys = (1..=max_weight)
        .into_par_iter()
        .map(|n| k_n(phi, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiplicativeSequence { ring: phi.ring().clone(), polys })
}

/// `1 + K_1(c) + ... + K_N(c)` with `c_i = chern[i-1]` (zero when absent).
pub fn eval_sequence<T: ChernAlgebra>(k: &MultiplicativeSequence, unit: &T, chern: &[T]) -> Result<T> {
    for (i, c) in chern.iter().enumerate() {
        c.check_degree(2 * (i as i64 + 1))?;
    }
    let mut acc = unit.unit_like();
    for p in &k.polys {
        acc = acc.add(&p.evaluate(unit, chern)?)?;
    }
    Ok(acc)
}

/// The single component `K_n(c)`.
pub fn eval_weight<T: ChernAlgebra>(
    k: &MultiplicativeSequence,
    n: u32,
    unit: &T,
    chern: &[T],
) -> Result<T> {
    if n == 0 {
        return Ok(unit.unit_like());
    }
    if n > k.max_weight() {
        return Err(Error::OutOfRange(format!("weight {n} beyond {}", k.max_weight())));
    }
    for (i, c) in chern.iter().enumerate() {
        c.check_degree(2 * (i as i64 + 1))?;
    }
    k.k(n).evaluate(unit, chern)
}
