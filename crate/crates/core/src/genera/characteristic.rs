use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{Base, Generator, GradedElement, GradedRingSpec, Ring, SeriesVars, TruncatedSeries};
use crate::error::{Error, Result};

/// A normalized power series `phi(z) = 1 + phi_1 z + phi_2 z^2 + ...` with
/// `deg z = 2` and `deg phi_i = -2i`.
///
/// The series is stored in the normal-bundle convention: a closed manifold
/// `M` with stable normal bundle `N` has genus `<phi(N), [M]>`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicSeries {
    phi: TruncatedSeries,
    label: Option<String>,
}

pub fn z_var() -> Arc<SeriesVars> {
    SeriesVars::degree_two(&["z"])
}

impl CharacteristicSeries {
    pub fn new(phi: TruncatedSeries, label: Option<String>) -> Result<Self> {
        let vars = phi.vars();
        if vars.len() != 1 || vars.vars()[0].deg != 2 {
            return Err(Error::VariableMismatch(
                "a characteristic series has one variable of degree 2".into(),
            ));
        }
        if !phi.constant_term().is_one() {
            return Err(Error::ConstantTerm(format!(
                "characteristic series must start with 1, got `{}`",
                phi.constant_term()
            )));
        }
        for i in 1..=phi.order() {
            let c = phi.coeff1(i);
            if !c.respects_degree(-2 * i as i64) {
                return Err(Error::DegreeMismatch(format!(
                    "coefficient of z^{i} is `{c}`, expected degree {}",
                    -2 * i as i64
                )));
            }
        }
        Ok(Self { phi, label })
    }

    /// Builds `1 + c_1 z + ... + c_k z^k` truncated at `order`.
    pub fn from_coefficients(
        ring: &Ring,
        coeffs: &[GradedElement],
        order: u32,
        label: Option<String>,
    ) -> Result<Self> {
        let all = std::iter::once(GradedElement::one(ring)).chain(coeffs.iter().cloned());
        Self::new(TruncatedSeries::univariate(ring, &z_var(), all, order)?, label)
    }

    pub fn from_rationals(coeffs: &[BigRational], order: u32, label: Option<String>) -> Result<Self> {
        let ring = GradedRingSpec::rationals();
        let all = std::iter::once(BigRational::one()).chain(coeffs.iter().cloned());
        Self::new(TruncatedSeries::univariate_rational(&ring, &z_var(), all, order)?, label)
    }

    /// `phi = 1` over `ring`.
    pub fn trivial(ring: &Ring, order: u32) -> Self {
        Self {
            phi: TruncatedSeries::one(ring, &z_var(), order),
            label: Some("one".into()),
        }
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.phi
    }

    pub fn ring(&self) -> &Ring {
        self.phi.ring()
    }

    pub fn order(&self) -> u32 {
        self.phi.order()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// `phi_i`, zero beyond the stored terms.
    pub fn coeff(&self, i: u32) -> GradedElement {
        self.phi.coeff1(i)
    }

    /// The tangential series `1/phi`.
    pub fn tangential(&self) -> Result<TruncatedSeries> {
        self.phi.invert()
    }

    /// Same series with coefficients pushed through a ring map.
    pub fn map_coefficients(
        &self,
        target: &Ring,
        f: impl FnMut(&GradedElement) -> Result<GradedElement>,
    ) -> Result<Self> {
        Self::new(self.phi.map_coefficients(target, f)?, self.label.clone())
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn q(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Divides a series with zero constant term by its variable.
fn divide_by_z(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !s.constant_term().is_zero() {
        return Err(Error::ConstantTerm("series not divisible by z".into()));
    }
    let order = s.order().saturating_sub(1);
    let coeffs = (1..=s.order()).map(|k| s.coeff1(k)).collect::<Vec<_>>();
    TruncatedSeries::univariate(s.ring(), s.vars(), coeffs, order)
}

/// `(1 - e^{-z})/z`.
pub fn todd(order: u32) -> CharacteristicSeries {
    let coeffs: Vec<_> = (1..=order)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            q(sign, factorial(k + 1))
        })
        .collect();
    CharacteristicSeries::from_rationals(&coeffs, order, Some("todd".into())).expect("valid")
}

/// `tanh(z)/z`, whose genus is the signature.
pub fn l_genus(order: u32) -> CharacteristicSeries {
    let zero_one = rational_series(&[0, 1], order + 1);
    // tanh = sinh / cosh, both computed from exp(z) and exp(-z)
    let e = zero_one.exp().expect("rational");
    let em = zero_one.neg().exp().expect("rational");
    let half = q(1, 2);
    let sinh = e.sub(&em).unwrap().scale_rational(&half).unwrap();
    let cosh = e.add(&em).unwrap().scale_rational(&half).unwrap();
    let tanh = sinh.mul(&cosh.invert().unwrap()).unwrap();
    let phi = divide_by_z(&tanh).unwrap();
    CharacteristicSeries::new(phi, Some("l_genus".into())).expect("valid")
}

/// `sinh(z/2)/(z/2)`.
pub fn a_hat(order: u32) -> CharacteristicSeries {
    // sinh(z/2)/(z/2) = sum_k (z/2)^{2k} / (2k+1)!
    let coeffs: Vec<_> = (1..=order)
        .map(|k| {
            if k % 2 == 1 {
                BigRational::zero()
            } else {
                q(1, factorial(k + 1) * BigInt::from(2).pow(k))
            }
        })
        .collect();
    CharacteristicSeries::from_rationals(&coeffs, order, Some("a_hat".into())).expect("valid")
}

fn rational_series(coeffs: &[i64], order: u32) -> TruncatedSeries {
    TruncatedSeries::univariate_rational(
        &GradedRingSpec::rationals(),
        &z_var(),
        coeffs.iter().map(|&c| BigRational::from_integer(c.into())),
        order,
    )
    .expect("one variable")
}

/// Ring `Q[delta, epsilon]` with `deg delta = -4`, `deg epsilon = -8`.
pub fn elliptic_ring(order: u32) -> Ring {
    let low = -2 * order as i64;
    GradedRingSpec::new(
        vec![Generator::new("delta", -4), Generator::new("epsilon", -8)],
        Base::Q,
        (low.min(0), 0),
    )
    .expect("valid")
    .into_ring()
}

/// Series of the Jacobi quartic `y^2 = 1 - 2 delta t^2 + epsilon t^4`:
/// `phi(z) = g(z)/z` where `g` is the inverse of the logarithm
/// `int_0^x dt / y`.
pub fn elliptic_from(delta: &GradedElement, epsilon: &GradedElement, order: u32) -> Result<CharacteristicSeries> {
    let ring = delta.ring().clone();
    if !ring.is_rational() {
        return Err(Error::NeedsRationalBase("elliptic series".into()));
    }
    let t = z_var();
    let mut quartic = TruncatedSeries::zero(&ring, &t, order);
    quartic.set(vec![2], delta.scale(&q(-2, 1))?);
    quartic.set(vec![4], epsilon.clone());
    let integrand = TruncatedSeries::one(&ring, &t, order)
        .add(&quartic)?
        .pow_rational(&q(-1, 2))?;
    let log = integrand.integral(0)?;
    let exp = log.reversion()?;
    let phi = divide_by_z(&exp)?;
    CharacteristicSeries::new(phi, Some("elliptic".into()))
}

/// Elliptic series with formal parameters.
pub fn elliptic(order: u32) -> CharacteristicSeries {
    let ring = elliptic_ring(order);
    let d = GradedElement::generator(&ring, "delta").unwrap();
    let e = GradedElement::generator(&ring, "epsilon").unwrap();
    elliptic_from(&d, &e, order).expect("rational ring")
}

/// Elliptic series specialized to rational parameters (ungraded).
pub fn elliptic_rational(delta: BigRational, epsilon: BigRational, order: u32) -> CharacteristicSeries {
    let ring = GradedRingSpec::rationals();
    let d = GradedElement::constant(&ring, delta).unwrap();
    let e = GradedElement::constant(&ring, epsilon).unwrap();
    elliptic_from(&d, &e, order).expect("rational ring")
}

/// Looks up a catalog series by name. Accepts `one`, `todd`, `l_genus`,
/// `a_hat`, `elliptic` and `elliptic(d,e)` with rational `d`, `e`.
pub fn builtin_genus(name: &str, order: u32) -> Result<CharacteristicSeries> {
    let name = name.trim();
    match name {
        "one" => Ok(CharacteristicSeries::trivial(&GradedRingSpec::rationals(), order)),
        "todd" => Ok(todd(order)),
        "l_genus" | "L" => Ok(l_genus(order)),
        "a_hat" => Ok(a_hat(order)),
        "elliptic" => Ok(elliptic(order)),
        _ => {
            let args = name
                .strip_prefix("elliptic(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::UnknownName(name.to_string()))?;
            let parts: Vec<_> = args.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::UnknownName(name.to_string()));
            }
            let d = crate::algebra::parse_rational(parts[0])?;
            let e = crate::algebra::parse_rational(parts[1])?;
            Ok(elliptic_rational(d, e, order).with_label(name))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn todd_coefficients() {
        let t = todd(4);
        let expect = [q(1, 1), q(-1, 2), q(1, 6), q(-1, 24), q(1, 120)];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(t.coeff(k as u32).as_constant().unwrap(), *e);
        }
    }

    #[test]
    fn l_series_is_even() {
        let l = l_genus(6);
        assert_eq!(l.coeff(2).as_constant().unwrap(), q(-1, 3));
        assert_eq!(l.coeff(4).as_constant().unwrap(), q(2, 15));
        assert!(l.coeff(3).is_zero());
    }

    #[test]
    fn elliptic_at_one_is_l() {
        let e = elliptic_rational(q(1, 1), q(1, 1), 6);
        assert_eq!(e.series(), l_genus(6).series());
    }

    #[test]
    fn elliptic_degrees() {
        let e = elliptic(6);
        assert_eq!(e.coeff(2).to_string(), "-1/3*delta");
        assert!(e.coeff(4).is_homogeneous_of(-8));
    }

    #[test]
    fn rejects_bad_series() {
        let ring = GradedRingSpec::rationals();
        let s = TruncatedSeries::univariate_rational(&ring, &z_var(), [q(2, 1)], 3).unwrap();
        assert!(matches!(CharacteristicSeries::new(s, None), Err(Error::ConstantTerm(_))));
        assert!(matches!(builtin_genus("witten", 3), Err(Error::UnknownName(_))));
    }
}
