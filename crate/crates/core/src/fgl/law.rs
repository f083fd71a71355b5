use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::{GradedElement, GradedRingSpec, Ring, SeriesVars, TruncatedSeries};
use crate::error::{Error, Result};

pub fn xy_vars() -> Arc<SeriesVars> {
    SeriesVars::degree_two(&["x", "y"])
}

pub fn x_var() -> Arc<SeriesVars> {
    SeriesVars::degree_two(&["x"])
}

/// A bivariate series `f(x, y)` with `deg x = deg y = 2`, meant to satisfy the
/// formal group law axioms up to its truncation order. Construction only
/// checks the shape; use [`FormalGroupLaw::validate`] for the axioms.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGroupLaw {
    f: TruncatedSeries,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub monomial: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<AxiomFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FglReport {
    pub valid: bool,
    pub order: u32,
    pub checks: Vec<AxiomCheck>,
}

fn compare(axiom: &str, lhs: &TruncatedSeries, rhs: &TruncatedSeries) -> Result<AxiomCheck> {
    let failure = lhs.first_difference(rhs)?.map(|m| AxiomFailure {
        monomial: lhs.format_monomial(&m),
        lhs: lhs.coeff(&m).to_string(),
        rhs: rhs.coeff(&m).to_string(),
    });
    Ok(AxiomCheck { axiom: axiom.into(), holds: failure.is_none(), first_failure: failure })
}

impl FormalGroupLaw {
    pub fn new(f: TruncatedSeries) -> Result<Self> {
        let v = f.vars().vars();
        if v.len() != 2 || v.iter().any(|v| v.deg != 2) {
            return Err(Error::VariableMismatch(
                "a formal group law is a series in two variables of degree 2".into(),
            ));
        }
        Ok(Self { f: f.rename_vars(&xy_vars())? })
    }

    /// Parses e.g. `x + y - u*x*y` over `ring`.
    pub fn parse(ring: &Ring, text: &str, order: u32) -> Result<Self> {
        Self::new(TruncatedSeries::parse(ring, &xy_vars(), text, order)?)
    }

    /// `x + y`.
    pub fn additive(ring: &Ring, order: u32) -> Self {
        Self::parse(ring, "x + y", order).expect("valid")
    }

    /// `x + y + c x y`.
    pub fn multiplicative(c: &GradedElement, order: u32) -> Self {
        let ring = c.ring();
        let vars = xy_vars();
        let mut f = TruncatedSeries::var(ring, &vars, 0, order)
            .add(&TruncatedSeries::var(ring, &vars, 1, order))
            .expect("same ring");
        f.set(vec![1, 1], c.clone());
        Self { f }
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.f
    }

    pub fn ring(&self) -> &Ring {
        self.f.ring()
    }

    pub fn order(&self) -> u32 {
        self.f.order()
    }

    /// `f(a, b)` for two series over a common variable set.
    pub fn apply(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.f.substitute(&[a.clone(), b.clone()])
    }

    pub fn validate(&self) -> Result<FglReport> {
        let ring = self.ring();
        let order = self.order();
        let xy = xy_vars();
        let x = TruncatedSeries::var(ring, &xy, 0, order);
        let y = TruncatedSeries::var(ring, &xy, 1, order);
        let zero = TruncatedSeries::zero(ring, &xy, order);

        let left_unit = compare("unit f(x,0) = x", &self.apply(&x, &zero)?, &x)?;
        let right_unit = compare("unit f(0,y) = y", &self.apply(&zero, &y)?, &y)?;
        let comm = compare("commutativity", &self.f, &self.apply(&y, &x)?)?;

        let xyz = SeriesVars::degree_two(&["x", "y", "z"]);
        let v: Vec<_> = (0..3).map(|i| TruncatedSeries::var(ring, &xyz, i, order)).collect();
        let lhs = self.apply(&self.apply(&v[0], &v[1])?, &v[2])?;
        let rhs = self.apply(&v[0], &self.apply(&v[1], &v[2])?)?;
        let assoc = compare("associativity", &lhs, &rhs)?;

        let checks = vec![left_unit, right_unit, comm, assoc];
        Ok(FglReport { valid: checks.iter().all(|c| c.holds), order, checks })
    }

    /// The logarithm `int_0^x dt / f_y(t, 0)`, normalized to `x + ...`.
    pub fn log(&self) -> Result<TruncatedSeries> {
        if !self.ring().is_rational() {
            return Err(Error::NeedsRationalBase("the logarithm divides by integers".into()));
        }
        let dy = self.f.derivative(1)?;
        let mut g = TruncatedSeries::zero(self.ring(), &x_var(), dy.order());
        for (e, c) in dy.terms() {
            if e[1] == 0 {
                g.set(vec![e[0]], c.clone());
            }
        }
        g.invert()?.integral(0)
    }

    /// `f = l^{-1}(l(x) + l(y))` for a logarithm `l = x + ...`.
    pub fn from_log(l: &TruncatedSeries) -> Result<Self> {
        if !l.ring().is_rational() {
            return Err(Error::NeedsRationalBase("building a law from a logarithm".into()));
        }
        if l.vars().len() != 1 {
            return Err(Error::VariableMismatch("a logarithm has one variable".into()));
        }
        let exp = l.reversion()?;
        let xy = xy_vars();
        let lx = l.rename_vars(&x_var())?.embed(&xy, &[0])?;
        let ly = l.rename_vars(&x_var())?.embed(&xy, &[1])?;
        Ok(Self { f: exp.compose(&lx.add(&ly)?)? })
    }

    /// `[m](x)`: `[0](x) = 0`, `[k+1](x) = f([k](x), x)`.
    pub fn n_series(&self, m: u32) -> Result<TruncatedSeries> {
        let x = TruncatedSeries::var(self.ring(), &x_var(), 0, self.order());
        let mut acc = TruncatedSeries::zero(self.ring(), &x_var(), self.order());
        for _ in 0..m {
            acc = self.apply(&acc, &x)?;
        }
        Ok(acc)
    }

    /// The `p`-series `[p](x)` for a prime `p`.
    pub fn p_series(&self, p: u32) -> Result<TruncatedSeries> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        self.n_series(p)
    }

    /// Coefficient-wise image under a ring map.
    pub fn push_forward(&self, map: &super::RingMap) -> Result<Self> {
        Ok(Self { f: map.apply_series(&self.f)? })
    }
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// `Q[CP1, .., CP_{N-1}]` with the law whose logarithm is
/// `sum_n CPn x^{n+1}/(n+1)`, truncated at order `N`.
pub fn universal_fgl_rational(order: u32) -> Result<FormalGroupLaw> {
    if order < 2 {
        return Err(Error::OutOfRange("universal law needs order at least 2".into()));
    }
    let n = order - 1;
    let ring = GradedRingSpec::cobordism_rational(n as usize, -2 * n as i64);
    FormalGroupLaw::from_log(&mishchenko_log(&ring, order)?)
}

/// `x + sum_{n>=1} CPn x^{n+1}/(n+1)` over a ring containing `CP1, ..`.
pub fn mishchenko_log(ring: &Ring, order: u32) -> Result<TruncatedSeries> {
    let mut log = TruncatedSeries::var(ring, &x_var(), 0, order);
    for n in 1..order {
        let cp = GradedElement::generator(ring, &format!("CP{n}"))?;
        log.set(vec![n + 1], cp.scale(&BigRational::new(1.into(), (n + 1).into()))?);
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Base, Generator};

    fn laurent_u(base: Base) -> Ring {
        GradedRingSpec::new(vec![Generator::laurent("u", -2)], base, (-40, 40)).unwrap().into_ring()
    }

    #[test]
    fn additive_and_multiplicative_are_valid() {
        let z = GradedRingSpec::integers();
        assert!(FormalGroupLaw::additive(&z, 6).validate().unwrap().valid);
        let r = laurent_u(Base::Z);
        let f = FormalGroupLaw::parse(&r, "x + y - u*x*y", 6).unwrap();
        assert!(f.validate().unwrap().valid);
    }

    #[test]
    fn unit_failure_is_reported() {
        let r = GradedRingSpec::integers();
        let f = FormalGroupLaw::parse(&r, "x + y + x^2", 4).unwrap();
        let rep = f.validate().unwrap();
        assert!(!rep.valid);
        let first = rep.checks[0].first_failure.as_ref().unwrap();
        assert_eq!(first.monomial, "x^2");
        assert_eq!((first.lhs.as_str(), first.rhs.as_str()), ("1", "0"));
    }

    #[test]
    fn logarithms() {
        let q = GradedRingSpec::rationals();
        assert_eq!(FormalGroupLaw::additive(&q, 4).log().unwrap().to_string(), "x + O(deg 5)");
        let m = FormalGroupLaw::parse(&q, "x + y - x*y", 4).unwrap();
        assert_eq!(m.log().unwrap().to_string(), "x + 1/2*x^2 + 1/3*x^3 + 1/4*x^4 + O(deg 5)");
        let l = m.log().unwrap();
        assert_eq!(FormalGroupLaw::from_log(&l).unwrap(), m);
        assert!(matches!(
            FormalGroupLaw::additive(&GradedRingSpec::integers(), 3).log(),
            Err(Error::NeedsRationalBase(_))
        ));
    }

    #[test]
    fn p_series_examples() {
        let z = GradedRingSpec::integers();
        assert_eq!(FormalGroupLaw::additive(&z, 4).p_series(3).unwrap().to_string(), "3*x + O(deg 5)");
        let m = FormalGroupLaw::parse(&z, "x + y - x*y", 4).unwrap();
        assert_eq!(m.p_series(2).unwrap().to_string(), "2*x + -x^2 + O(deg 5)");
        let r = laurent_u(Base::Z);
        let mu = FormalGroupLaw::parse(&r, "x + y - u*x*y", 4).unwrap();
        assert_eq!(mu.p_series(3).unwrap().to_string(), "3*x + -3*u*x^2 + u^2*x^3 + O(deg 5)");
        assert!(mu.p_series(4).is_err());
    }

    #[test]
    fn universal_law() {
        let f = universal_fgl_rational(4).unwrap();
        assert!(f.validate().unwrap().valid);
        assert_eq!(f.series().coeff(&[1, 1]).to_string(), "-CP1");
    }
}
