use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;

use super::element::{GradedElement, Monomial};
use super::ring::{check_same, same_ring, Generator, GradedRingSpec, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesVar {
    pub name: String,
    pub deg: i64,
}

impl SeriesVar {
    pub fn new(name: impl Into<String>, deg: i64) -> Self {
        Self { name: name.into(), deg }
    }
}

/// Variables of a series together with their truncation weights
/// (degree divided by the gcd of all variable degrees).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesVars {
    vars: Vec<SeriesVar>,
    weights: Vec<u32>,
}

impl SeriesVars {
    pub fn new(vars: Vec<SeriesVar>) -> Result<Arc<Self>> {
        if vars.is_empty() {
            return Err(Error::VariableMismatch("a series needs at least one variable".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.deg <= 0 {
                return Err(Error::VariableMismatch(format!(
                    "variable `{}` must have positive degree",
                    v.name
                )));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::VariableMismatch(format!("duplicate variable `{}`", v.name)));
            }
        }
        let g = vars.iter().fold(0i64, |g, v| g.gcd(&v.deg));
        let weights = vars.iter().map(|v| (v.deg / g) as u32).collect();
        Ok(Arc::new(Self { vars, weights }))
    }

    /// Variables all of degree 2 (the usual Chern-root convention).
    pub fn degree_two(names: &[&str]) -> Arc<Self> {
        Self::new(names.iter().map(|n| SeriesVar::new(*n, 2)).collect()).expect("valid names")
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[SeriesVar] {
        &self.vars
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight_of(&self, exps: &[u32]) -> u32 {
        exps.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }
}

/// A power series in finitely many graded variables over a [`GradedElement`]
/// coefficient ring, truncated above a fixed weighted total degree `order`.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    ring: Ring,
    vars: Arc<SeriesVars>,
    coeffs: BTreeMap<Vec<u32>, GradedElement>,
    order: u32,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && same_ring(&self.ring, &other.ring)
            && self.vars == other.vars
            && self.coeffs == other.coeffs
    }
}

impl TruncatedSeries {
    pub fn zero(ring: &Ring, vars: &Arc<SeriesVars>, order: u32) -> Self {
        Self { ring: ring.clone(), vars: vars.clone(), coeffs: BTreeMap::new(), order }
    }

    pub fn constant(c: GradedElement, vars: &Arc<SeriesVars>, order: u32) -> Self {
        let mut s = Self::zero(c.ring(), vars, order);
        s.set(vec![0; vars.len()], c);
        s
    }

    pub fn one(ring: &Ring, vars: &Arc<SeriesVars>, order: u32) -> Self {
        Self::constant(GradedElement::one(ring), vars, order)
    }

    /// The `i`-th variable as a series.
    pub fn var(ring: &Ring, vars: &Arc<SeriesVars>, i: usize, order: u32) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        let mut s = Self::zero(ring, vars, order);
        s.set(exps, GradedElement::one(ring));
        s
    }

    /// Univariate series `sum_k coeffs[k] z^k`.
    pub fn univariate(
        ring: &Ring,
        vars: &Arc<SeriesVars>,
        coeffs: impl IntoIterator<Item = GradedElement>,
        order: u32,
    ) -> Result<Self> {
        if vars.len() != 1 {
            return Err(Error::VariableMismatch("expected one variable".into()));
        }
        let mut s = Self::zero(ring, vars, order);
        for (k, c) in coeffs.into_iter().enumerate() {
            check_same(ring, c.ring())?;
            s.set(vec![k as u32], c);
        }
        Ok(s)
    }

    /// Univariate series with constant rational coefficients.
    pub fn univariate_rational(
        ring: &Ring,
        vars: &Arc<SeriesVars>,
        coeffs: impl IntoIterator<Item = BigRational>,
        order: u32,
    ) -> Result<Self> {
        let elems = coeffs
            .into_iter()
            .map(|q| GradedElement::constant(ring, q))
            .collect::<Result<Vec<_>>>()?;
        Self::univariate(ring, vars, elems, order)
    }

    /// Stores a coefficient, dropping zeros and terms above the order.
    pub fn set(&mut self, exps: Vec<u32>, c: GradedElement) {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() || self.vars.weight_of(&exps) > self.order {
            self.coeffs.remove(&exps);
        } else {
            self.coeffs.insert(exps, c);
        }
    }

    fn accumulate(&mut self, exps: Vec<u32>, c: GradedElement) -> Result<()> {
        if c.is_zero() || self.vars.weight_of(&exps) > self.order {
            return Ok(());
        }
        match self.coeffs.get_mut(&exps) {
            Some(existing) => {
                let sum = existing.add(&c)?;
                if sum.is_zero() {
                    self.coeffs.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.coeffs.insert(exps, c);
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vars(&self) -> &Arc<SeriesVars> {
        &self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GradedElement)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> GradedElement {
        self.coeffs.get(exps).cloned().unwrap_or_else(|| GradedElement::zero(&self.ring))
    }

    /// Coefficient of `z^k` in a univariate series.
    pub fn coeff1(&self, k: u32) -> GradedElement {
        self.coeff(&[k])
    }

    pub fn constant_term(&self) -> GradedElement {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Lowest weighted degree present, `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().map(|e| self.vars.weight_of(e)).min()
    }

    /// Re-truncates to a lower order (or keeps the order if `order` is larger).
    pub fn truncated(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(e, _)| self.vars.weight_of(e) <= order)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Self { ring: self.ring.clone(), vars: self.vars.clone(), coeffs, order }
    }

    /// Equality of all coefficients up to the smaller of the two orders.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let o = self.order.min(other.order);
        same_ring(&self.ring, &other.ring)
            && self.vars == other.vars
            && self.truncated(o).coeffs == other.truncated(o).coeffs
    }

    /// First monomial (in increasing weight) where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Result<Option<Vec<u32>>> {
        let diff = self.sub(other)?;
        Ok(diff
            .coeffs
            .keys()
            .min_by_key(|e| (diff.vars.weight_of(e), (*e).clone()))
            .cloned())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        check_same(&self.ring, &other.ring)?;
        if self.vars != other.vars {
            return Err(Error::VariableMismatch(format!(
                "{:?} vs {:?}",
                self.var_names(),
                other.var_names()
            )));
        }
        Ok(())
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.vars().iter().map(|v| v.name.as_str()).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.truncated(other.order);
        for (e, c) in &other.coeffs {
            out.accumulate(e.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (e.clone(), c.neg())).collect();
        Self { coeffs, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.ring, &self.vars, order);
        for (e1, c1) in &self.coeffs {
            let w1 = self.vars.weight_of(e1);
            if w1 > order {
                continue;
            }
            for (e2, c2) in &other.coeffs {
                if w1 + self.vars.weight_of(e2) > order {
                    continue;
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.accumulate(e, c1.mul(c2)?)?;
            }
        }
        Ok(out)
    }

    /// Multiplication by a coefficient-ring element.
    pub fn scale(&self, c: &GradedElement) -> Result<Self> {
        check_same(&self.ring, c.ring())?;
        let mut out = Self::zero(&self.ring, &self.vars, self.order);
        for (e, x) in &self.coeffs {
            out.set(e.clone(), x.mul(c)?);
        }
        Ok(out)
    }

    pub fn scale_rational(&self, q: &BigRational) -> Result<Self> {
        let mut out = Self::zero(&self.ring, &self.vars, self.order);
        for (e, x) in &self.coeffs {
            out.set(e.clone(), x.scale(q)?);
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u32) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring, &self.vars, self.order);
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

    /// Substitutes `subs[i]` for the `i`-th variable. All substituted series
    /// share one variable set and have zero constant term.
    ///
    /// The result is exact up to the largest order the truncations of both
    /// sides determine.
    pub fn substitute(&self, subs: &[TruncatedSeries]) -> Result<Self> {
        if subs.len() != self.vars.len() {
            return Err(Error::VariableMismatch(format!(
                "{} substitutions for {} variables",
                subs.len(),
                self.vars.len()
            )));
        }
        let first = &subs[0];
        for t in subs {
            check_same(&self.ring, &t.ring)?;
            first.check_compatible(t)?;
            if !t.constant_term().is_zero() {
                return Err(Error::ConstantTerm(
                    "substituted series must have zero constant term".into(),
                ));
            }
        }
        // Terms of `self` beyond its order have weight >= order + 1; under the
        // substitution they land in weight >= ratio * (order + 1).
        let mut ratio: Option<BigRational> = None;
        for (t, w) in subs.iter().zip(self.vars.weights()) {
            if let Some(v) = t.valuation() {
                let r = BigRational::new(v.into(), (*w).into());
                ratio = Some(match ratio {
                    Some(old) if old <= r => old,
                    _ => r,
                });
            }
        }
        let mut order = subs.iter().map(|t| t.order).min().unwrap();
        if let Some(r) = ratio {
            let bound = (r * BigRational::from_integer((self.order + 1).into())).ceil();
            let bound: u32 = bound.to_integer().try_into().unwrap_or(u32::MAX);
            order = order.min(bound.saturating_sub(1));
        }
        let subs: Vec<_> = subs.iter().map(|t| t.truncated(order)).collect();

        let mut max_exp = vec![0u32; self.vars.len()];
        for e in self.coeffs.keys() {
            for (m, x) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(*x);
            }
        }
        let mut powers: Vec<Vec<TruncatedSeries>> = Vec::with_capacity(subs.len());
        for (t, &m) in subs.iter().zip(&max_exp) {
            let mut p = vec![TruncatedSeries::one(&self.ring, &t.vars, order)];
            for k in 1..=m {
                let next = if t.valuation().is_some_and(|v| v * k > order) {
                    TruncatedSeries::zero(&self.ring, &t.vars, order)
                } else {
                    p[k as usize - 1].mul(t)?
                };
                p.push(next);
            }
            powers.push(p);
        }

        let mut out = TruncatedSeries::zero(&self.ring, &first.vars, order);
        for (e, c) in &self.coeffs {
            let mut term = TruncatedSeries::constant(c.clone(), &first.vars, order);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&powers[i][k as usize])?;
                    if term.is_zero() {
                        break;
                    }
                }
            }
            for (te, tc) in term.coeffs {
                out.accumulate(te, tc)?;
            }
        }
        Ok(out)
    }

    /// Univariate composition `self(t)`.
    pub fn compose(&self, t: &TruncatedSeries) -> Result<Self> {
        self.substitute(std::slice::from_ref(t))
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let inv0 = c0.try_inverse().ok_or_else(|| {
            Error::ConstantTerm(format!("constant term `{c0}` is not a unit"))
        })?;
        // self = c0 (1 - r)  =>  1/self = c0^-1 sum_k r^k
        let normalized = self.scale(&inv0)?;
        let r = TruncatedSeries::one(&self.ring, &self.vars, self.order).sub(&normalized)?;
        let mut acc = TruncatedSeries::one(&self.ring, &self.vars, self.order);
        let mut power = acc.clone();
        for _ in 0..self.order {
            power = power.mul(&r)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.scale(&inv0)
    }

    fn require_rational(&self, what: &str) -> Result<()> {
        if self.ring.is_rational() {
            Ok(())
        } else {
            Err(Error::NeedsRationalBase(what.to_string()))
        }
    }

    /// `exp(self)` for a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        self.require_rational("exp divides by factorials")?;
        if !self.constant_term().is_zero() {
            return Err(Error::ConstantTerm("exp needs zero constant term".into()));
        }
        let mut acc = TruncatedSeries::one(&self.ring, &self.vars, self.order);
        let mut term = acc.clone();
        for k in 1..=self.order {
            term = term.mul(self)?.scale_rational(&BigRational::new(1.into(), k.into()))?;
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `log(self)` for a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        self.require_rational("log divides by integers")?;
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTerm("log needs constant term 1".into()));
        }
        let r = self.sub(&TruncatedSeries::one(&self.ring, &self.vars, self.order))?;
        let mut acc = TruncatedSeries::zero(&self.ring, &self.vars, self.order);
        let mut power = TruncatedSeries::one(&self.ring, &self.vars, self.order);
        for k in 1..=self.order {
            power = power.mul(&r)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&power.scale_rational(&BigRational::new(sign.into(), k.into()))?)?;
        }
        Ok(acc)
    }

    /// `self^q` for rational `q` and constant term 1, via `exp(q log self)`.
    pub fn pow_rational(&self, q: &BigRational) -> Result<Self> {
        self.log()?.scale_rational(q)?.exp()
    }

    /// Compositional inverse of a univariate `z + O(z^2)`.
    pub fn reversion(&self) -> Result<Self> {
        if self.vars.len() != 1 {
            return Err(Error::VariableMismatch("reversion needs one variable".into()));
        }
        if !self.constant_term().is_zero() {
            return Err(Error::ConstantTerm("reversion needs zero constant term".into()));
        }
        let lin = self.coeff1(1);
        if !lin.is_one() {
            return Err(Error::LinearCoefficient(lin.to_string()));
        }
        let mut g = TruncatedSeries::var(&self.ring, &self.vars, 0, self.order);
        for k in 2..=self.order {
            let c = self.compose(&g)?.coeff1(k);
            if !c.is_zero() {
                let mut correction = TruncatedSeries::zero(&self.ring, &self.vars, self.order);
                correction.set(vec![k], c);
                g = g.sub(&correction)?;
            }
        }
        Ok(g)
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Result<Self> {
        let w = self.vars.weights()[i];
        let mut out = Self::zero(&self.ring, &self.vars, self.order.saturating_sub(w));
        for (e, c) in &self.coeffs {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.set(ne, c.scale(&BigRational::from_integer(e[i].into()))?);
        }
        Ok(out)
    }

    /// Formal antiderivative in variable `i` with zero integration constant.
    pub fn integral(&self, i: usize) -> Result<Self> {
        self.require_rational("integration divides by integers")?;
        let w = self.vars.weights()[i];
        let mut out = Self::zero(&self.ring, &self.vars, self.order + w);
        for (e, c) in &self.coeffs {
            let mut ne = e.clone();
            ne[i] += 1;
            out.set(ne, c.scale(&BigRational::new(1.into(), (e[i] + 1).into()))?);
        }
        Ok(out)
    }

    /// Applies a map to every coefficient, landing in `target`.
    pub fn map_coefficients(
        &self,
        target: &Ring,
        mut f: impl FnMut(&GradedElement) -> Result<GradedElement>,
    ) -> Result<Self> {
        let mut out = Self::zero(target, &self.vars, self.order);
        for (e, c) in &self.coeffs {
            let img = f(c)?;
            check_same(target, img.ring())?;
            out.set(e.clone(), img);
        }
        Ok(out)
    }

    /// Same coefficients over a different variable set of equal size.
    pub fn rename_vars(&self, vars: &Arc<SeriesVars>) -> Result<Self> {
        if vars.len() != self.vars.len() || vars.weights() != self.vars.weights() {
            return Err(Error::VariableMismatch("rename needs matching weights".into()));
        }
        Ok(Self { vars: vars.clone(), ..self.clone() })
    }

    /// Embeds a series into a larger variable set: variable `i` becomes
    /// `positions[i]` of `vars`.
    pub fn embed(&self, vars: &Arc<SeriesVars>, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.vars.len() {
            return Err(Error::VariableMismatch("embedding length".into()));
        }
        let mut out = Self::zero(&self.ring, vars, self.order);
        for (e, c) in &self.coeffs {
            let mut ne = vec![0; vars.len()];
            for (i, &p) in positions.iter().enumerate() {
                if vars.weights()[p] != self.vars.weights()[i] {
                    return Err(Error::VariableMismatch("embedding changes weights".into()));
                }
                ne[p] += e[i];
            }
            out.accumulate(ne, c.clone())?;
        }
        Ok(out)
    }

    /// Parses a polynomial in the series variables with coefficients in
    /// `ring`, e.g. `x + y - u*x*y`. Terms above `order` are dropped.
    pub fn parse(ring: &Ring, vars: &Arc<SeriesVars>, text: &str, order: u32) -> Result<Self> {
        let mut gens = ring.generators().to_vec();
        for v in vars.vars() {
            if ring.generator_index(&v.name).is_some() {
                return Err(Error::VariableMismatch(format!(
                    "`{}` is both a ring generator and a series variable",
                    v.name
                )));
            }
            gens.push(Generator::new(v.name.clone(), v.deg));
        }
        let (lo, _) = ring.window();
        let ext = GradedRingSpec::new(gens, ring.base(), (lo, i64::MAX / 4))?
            .with_max_exponent(ring.max_exponent())
            .into_ring();
        let elem = GradedElement::parse(&ext, text)?;
        let k = ring.num_generators();
        let mut out = Self::zero(ring, vars, order);
        for (m, c) in elem.terms() {
            let (coeff_exps, var_exps) = m.exponents().split_at(k);
            let exps: Vec<u32> = var_exps.iter().map(|&e| e as u32).collect();
            let c = GradedElement::monomial(ring, Monomial::from_exponents(coeff_exps.to_vec()), c.clone())?;
            out.accumulate(exps, c)?;
        }
        Ok(out)
    }

    pub fn format_monomial(&self, exps: &[u32]) -> String {
        let parts: Vec<String> = exps
            .iter()
            .zip(self.vars.vars())
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| if *e == 1 { v.name.clone() } else { format!("{}^{}", v.name, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by_key(|(e, _)| (self.vars.weight_of(e), std::cmp::Reverse((*e).clone())));
        let mut first = true;
        for (e, c) in terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono = self.format_monomial(e);
            let coeff = c.to_string();
            match (mono.as_str(), c.num_terms()) {
                ("1", _) => write!(f, "{coeff}")?,
                (_, 1) if c.is_one() => write!(f, "{mono}")?,
                (_, 1) if c.neg().is_one() => write!(f, "-{mono}")?,
                (_, 1) => write!(f, "{coeff}*{mono}")?,
                _ => write!(f, "({coeff})*{mono}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(deg {})", self.order + 1)
    }
}
