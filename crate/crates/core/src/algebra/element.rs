use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ring::{check_same, same_ring, Base, Ring};
use crate::error::{Error, Result};

/// Exponent vector over the generators of a ring. Ordered graded-lex:
/// first by the sum of exponents, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exponents(exps: Vec<i32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn total(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    fn mul(&self, other: &Monomial, bound: u32) -> Result<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            let e = *a as i64 + *b as i64;
            if e.unsigned_abs() > bound as u64 {
                return Err(Error::ExponentOverflow { exponent: e, bound });
            }
            out.push(e as i32);
        }
        Ok(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one()
}

/// Prints `p` or `p/q`.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = |_| Error::Parse { pos: 0, msg: format!("bad rational `{s}`") };
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(bad)?;
            let d: BigInt = d.trim().parse().map_err(bad)?;
            if d.is_zero() {
                return Err(Error::Parse { pos: 0, msg: "zero denominator".into() });
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(bad)?)),
    }
}

/// A finite sum of monomials with exact rational coefficients.
///
/// Zero coefficients are never stored and every monomial degree lies in the
/// ring window; anything that falls outside is dropped on construction.
#[derive(Clone, Debug)]
pub struct GradedElement {
    ring: Ring,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for GradedElement {}

impl GradedElement {
    pub fn zero(ring: &Ring) -> Self {
        Self { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, BigRational::one()).expect("1 is integral")
    }

    pub fn from_int(ring: &Ring, n: i64) -> Self {
        Self::constant(ring, BigRational::from_integer(n.into())).expect("integral")
    }

    pub fn constant(ring: &Ring, c: BigRational) -> Result<Self> {
        Self::monomial(ring, Monomial::one(ring.num_generators()), c)
    }

    pub fn generator(ring: &Ring, name: &str) -> Result<Self> {
        let idx = ring
            .generator_index(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let mut exps = vec![0; ring.num_generators()];
        exps[idx] = 1;
        Self::monomial(ring, Monomial(exps), BigRational::one())
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: BigRational) -> Result<Self> {
        let mut out = Self::zero(ring);
        out.insert_checked(m, c)?;
        Ok(out)
    }

    /// Builds an element from raw terms, validating exponents and coefficients.
    pub fn from_terms(
        ring: &Ring,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self> {
        let mut out = Self::zero(ring);
        for (m, c) in terms {
            out.insert_checked(m, c)?;
        }
        Ok(out)
    }

    fn insert_checked(&mut self, m: Monomial, c: BigRational) -> Result<()> {
        let ring = &self.ring;
        if m.0.len() != ring.num_generators() {
            return Err(Error::RingMismatch(format!(
                "exponent vector of length {} in a ring with {} generators",
                m.0.len(),
                ring.num_generators()
            )));
        }
        for (e, g) in m.0.iter().zip(ring.generators()) {
            if *e < 0 && !g.invertible {
                return Err(Error::NotInvertible(g.name.clone()));
            }
            if e.unsigned_abs() > ring.max_exponent() {
                return Err(Error::ExponentOverflow { exponent: *e as i64, bound: ring.max_exponent() });
            }
        }
        if ring.base() == Base::Z && !is_integer(&c) {
            return Err(Error::NonIntegral(fmt_rational(&c)));
        }
        self.accumulate(m, c);
        Ok(())
    }

    /// Adds `c * m` without validation; callers guarantee a valid monomial.
    fn accumulate(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() || !self.ring.in_window(self.degree_of(&m)) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&Monomial::one(self.ring.num_generators()))
    }

    /// The constant value if this element is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree_of(&self, m: &Monomial) -> i64 {
        m.0.iter().zip(self.ring.generators()).map(|(e, g)| *e as i64 * g.deg).sum()
    }

    /// Degree of a nonzero homogeneous element.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degs = self.terms.keys().map(|m| self.degree_of(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// True for zero and for homogeneous elements of degree `deg`.
    pub fn is_homogeneous_of(&self, deg: i64) -> bool {
        self.terms.keys().all(|m| self.degree_of(m) == deg)
    }

    /// Like [`Self::is_homogeneous_of`], but always true in rings without
    /// generators, where the grading is collapsed.
    pub fn respects_degree(&self, deg: i64) -> bool {
        !self.ring.is_graded() || self.is_homogeneous_of(deg)
    }

    /// Part of degree `deg`.
    pub fn degree_part(&self, deg: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| self.degree_of(m) == deg)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self { ring: self.ring.clone(), terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(&self.ring, &other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same(&self.ring, &other.ring)?;
        let bound = self.ring.max_exponent();
        let mut out = Self::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.accumulate(m1.mul(m2, bound)?, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplication by a rational; fails in a Z-based ring if the result is
    /// not integral.
    pub fn scale(&self, q: &BigRational) -> Result<Self> {
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            let v = c * q;
            if self.ring.base() == Base::Z && !is_integer(&v) {
                return Err(Error::NonIntegral(fmt_rational(&v)));
            }
            out.accumulate(m.clone(), v);
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u32) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse of a unit: a single monomial in Laurent generators with an
    /// invertible coefficient.
    pub fn try_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let gens = self.ring.generators();
        if m.0.iter().zip(gens).any(|(e, g)| *e != 0 && !g.invertible) {
            return None;
        }
        let inv = c.recip();
        if self.ring.base() == Base::Z && !is_integer(&inv) {
            return None;
        }
        let mi = Monomial(m.0.iter().map(|e| -e).collect());
        Self::monomial(&self.ring, mi, inv).ok().filter(|x| !x.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        self.try_inverse().is_some()
    }

    /// Ring map given by the images of the generators. Negative exponents
    /// need images that are units in the target.
    pub fn substitute(&self, target: &Ring, images: &[GradedElement]) -> Result<Self> {
        if images.len() != self.ring.num_generators() {
            return Err(Error::RingMismatch(format!(
                "{} images for {} generators",
                images.len(),
                self.ring.num_generators()
            )));
        }
        for img in images {
            check_same(target, &img.ring)?;
        }
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(target, c.clone())?;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let f = if e > 0 {
                    images[i].pow(e as u32)?
                } else {
                    let inv = images[i].try_inverse().ok_or_else(|| {
                        Error::NotInvertible(self.ring.generators()[i].name.clone())
                    })?;
                    inv.pow(e.unsigned_abs())?
                };
                t = t.mul(&f)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Re-homes the element in another ring with the same generators
    /// (e.g. a wider window or a rational base).
    pub fn cast(&self, target: &Ring) -> Result<Self> {
        if target.generators() != self.ring.generators() {
            return Err(Error::RingMismatch("cast between rings with different generators".into()));
        }
        Self::from_terms(target, self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_constant().and_then(|c| c.to_f64())
    }

    pub fn parse(ring: &Ring, text: &str) -> Result<Self> {
        Parser { ring, src: text, pos: 0 }.parse_sum()
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(fmt_rational(&abs));
            }
            for (e, g) in m.0.iter().zip(self.ring.generators()) {
                match e {
                    0 => {}
                    1 => factors.push(g.name.clone()),
                    _ => factors.push(format!("{}^{}", g.name, e)),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    ring: &'a Ring,
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn parse_sum(&mut self) -> Result<GradedElement> {
        let mut acc = GradedElement::zero(self.ring);
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let term = self.parse_term()?;
            acc = if sign > 0 { acc.add(&term)? } else { acc.sub(&term)? };
            self.skip_ws();
            if self.pos == self.src.len() {
                return Ok(acc);
            }
            sign = if self.eat('+') {
                1
            } else if self.eat('-') {
                -1
            } else {
                return Err(self.err("expected `+` or `-`"));
            };
        }
    }

    fn parse_term(&mut self) -> Result<GradedElement> {
        let n = self.ring.num_generators();
        let mut coeff = BigRational::one();
        let mut exps = vec![0i64; n];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = self.take_while(|c| c.is_ascii_digit()).to_string();
                    let mut q = parse_rational(&num)?;
                    if self.eat('/') {
                        self.skip_ws();
                        let den = self.take_while(|c| c.is_ascii_digit()).to_string();
                        if den.is_empty() {
                            return Err(self.err("expected denominator"));
                        }
                        q = parse_rational(&format!("{num}/{den}"))?;
                    }
                    coeff *= q;
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_').to_string();
                    let idx = self
                        .ring
                        .generator_index(&name)
                        .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                    let mut e = 1i64;
                    if self.eat('^') {
                        self.skip_ws();
                        let neg = self.eat('-');
                        self.skip_ws();
                        let digits = self.take_while(|c| c.is_ascii_digit());
                        e = digits.parse().map_err(|_| self.err("expected exponent"))?;
                        if neg {
                            e = -e;
                        }
                    }
                    exps[idx] += e;
                }
                _ => return Err(self.err("expected a number or a generator")),
            }
            if !self.eat('*') {
                break;
            }
        }
        let bound = self.ring.max_exponent() as i64;
        let exps = exps
            .into_iter()
            .map(|e| {
                if e.abs() > bound {
                    Err(Error::ExponentOverflow { exponent: e, bound: bound as u32 })
                } else {
                    Ok(e as i32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        GradedElement::monomial(self.ring, Monomial(exps), coeff)
    }
}

#[cfg(test)]
mod tests {
    use super::super::ring::{Generator, GradedRingSpec};
    use super::*;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ring_x() -> Ring {
        Arc::new(GradedRingSpec::new(vec![Generator::new("x1", -2)], Base::Q, (-8, 0)).unwrap())
    }

    fn ring_u() -> Ring {
        Arc::new(
            GradedRingSpec::new(vec![Generator::laurent("u", -2)], Base::Z, (-40, 40)).unwrap(),
        )
    }

    fn ring_xyu() -> Ring {
        Arc::new(
            GradedRingSpec::new(
                vec![Generator::new("x1", -2), Generator::new("y", -4), Generator::laurent("u", -2)],
                Base::Q,
                (-100, 100),
            )
            .unwrap(),
        )
    }

    #[test]
    fn monomial_product() {
        let r = ring_x();
        let x = GradedElement::generator(&r, "x1").unwrap();
        let x2 = x.mul(&x).unwrap();
        assert_eq!(x2.to_string(), "x1^2");
        assert_eq!(x2.homogeneous_degree(), Some(-4));
    }

    #[test]
    fn laurent_unit() {
        let r = ring_u();
        let u = GradedElement::generator(&r, "u").unwrap();
        let inv = u.try_inverse().unwrap();
        assert_eq!(inv.to_string(), "u^-1");
        assert!(u.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn difference_of_squares() {
        let r = ring_x();
        let a = GradedElement::parse(&r, "1 + x1").unwrap();
        let b = GradedElement::parse(&r, "1 - x1").unwrap();
        assert_eq!(a.mul(&b).unwrap().to_string(), "1 - x1^2");
    }

    #[test]
    fn window_truncates() {
        let r = ring_x();
        let x = GradedElement::generator(&r, "x1").unwrap();
        assert!(x.pow(5).unwrap().is_zero());
        assert!(!x.pow(4).unwrap().is_zero());
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = GradedElement::one(&ring_x());
        let b = GradedElement::one(&ring_u());
        assert!(matches!(a.add(&b), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn exponent_bound() {
        let spec = GradedRingSpec::new(vec![Generator::laurent("u", -2)], Base::Z, (-1000, 1000))
            .unwrap()
            .with_max_exponent(3);
        let r = Arc::new(spec);
        let u = GradedElement::generator(&r, "u").unwrap();
        assert!(u.pow(3).is_ok());
        assert!(matches!(u.pow(4), Err(Error::ExponentOverflow { .. })));
    }

    #[test]
    fn integer_base_rejects_fractions() {
        assert!(matches!(GradedElement::parse(&ring_u(), "1/2*u"), Err(Error::NonIntegral(_))));
        assert!(matches!(
            GradedElement::parse(&ring_x(), "x1^-1"),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn canonical_text() {
        let r = ring_xyu();
        let e = GradedElement::parse(&r, "3/2*x1^2*u^-1 - y + 2 - u*u").unwrap();
        assert_eq!(e.to_string(), "2 - y + 3/2*x1^2*u^-1 - u^2");
        assert_eq!(GradedElement::parse(&r, &e.to_string()).unwrap(), e);
    }

    #[test]
    fn substitution() {
        let r = ring_x();
        let target = ring_u();
        let e = GradedElement::parse(&r, "1 + 2*x1 + x1^2").unwrap();
        let u = GradedElement::generator(&target, "u").unwrap();
        let img = e.substitute(&target, &[u]).unwrap();
        assert_eq!(img.to_string(), "1 + 2*u + u^2");
    }

    fn arb_element() -> impl Strategy<Value = GradedElement> {
        prop::collection::vec(((-3i32..4, 0i32..3, -2i32..3), (-20i64..20, 1i64..6)), 0..6).prop_map(
            |terms| {
                let r = ring_xyu();
                GradedElement::from_terms(
                    &r,
                    terms.into_iter().map(|((a, b, c), (n, d))| {
                        (Monomial(vec![a.max(0), b, c]), q(n, d))
                    }),
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_element(), b in arb_element(), c in arb_element()) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            // No triple product leaves the window, so truncation cannot interfere.
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn degree_additivity(a in arb_element(), b in arb_element(), da in -6i64..3, db in -6i64..3) {
            let (a, b) = (a.degree_part(da), b.degree_part(db));
            let p = a.mul(&b).unwrap();
            prop_assert!(p.is_homogeneous_of(da + db));
        }

        #[test]
        fn print_parse_round_trip(a in arb_element()) {
            let text = a.to_string();
            prop_assert_eq!(GradedElement::parse(a.ring(), &text).unwrap(), a);
        }
    }
}
