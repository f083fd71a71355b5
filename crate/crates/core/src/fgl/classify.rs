use serde::Serialize;

use super::law::{universal_fgl_rational, FormalGroupLaw};
use crate::algebra::{GradedElement, Ring, TruncatedSeries};
use crate::error::{Error, Result};
use crate::genera::GenusTable;

/// A degree-preserving ring map, given by the images of the source
/// generators.
#[derive(Clone, Debug, PartialEq)]
pub struct RingMap {
    source: Ring,
    target: Ring,
    images: Vec<GradedElement>,
}

impl RingMap {
    pub fn new(source: &Ring, target: &Ring, images: Vec<GradedElement>) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::RingMismatch(format!(
                "{} images for {} generators",
                images.len(),
                source.num_generators()
            )));
        }
        for (g, img) in source.generators().iter().zip(&images) {
            if img.ring() != target {
                return Err(Error::RingMismatch(format!("image of `{}` lives in another ring", g.name)));
            }
            if !img.respects_degree(g.deg) {
                return Err(Error::DegreeMismatch(format!(
                    "image `{img}` of `{}` is not of degree {}",
                    g.name, g.deg
                )));
            }
            if g.invertible && !img.is_unit() {
                return Err(Error::NotInvertible(format!("image of `{}`", g.name)));
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), images })
    }

    /// Parses images given as text in the target ring.
    pub fn parse(source: &Ring, target: &Ring, images: &[String]) -> Result<Self> {
        let images = images
            .iter()
            .map(|t| GradedElement::parse(target, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn images(&self) -> &[GradedElement] {
        &self.images
    }

    pub fn apply(&self, x: &GradedElement) -> Result<GradedElement> {
        if x.ring() != &self.source {
            return Err(Error::RingMismatch("element is not in the source ring".into()));
        }
        x.substitute(&self.target, &self.images)
    }

    pub fn apply_series(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        s.map_coefficients(&self.target, |c| self.apply(c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifyMismatch {
    pub monomial: String,
    pub pushed: String,
    pub target: String,
}

/// The classifying map of a law together with the universality check.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub theta: RingMap,
    /// `theta_*(f_univ)`.
    pub pushed: FormalGroupLaw,
    pub target: FormalGroupLaw,
    pub mismatch: Option<ClassifyMismatch>,
}

impl Classification {
    pub fn verified(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn finish(theta: RingMap, univ: &FormalGroupLaw, target: FormalGroupLaw) -> Result<Classification> {
    let pushed = univ.push_forward(&theta)?;
    let mismatch = pushed.series().first_difference(target.series())?.map(|m| ClassifyMismatch {
        monomial: pushed.series().format_monomial(&m),
        pushed: pushed.series().coeff(&m).to_string(),
        target: target.series().coeff(&m).to_string(),
    });
    Ok(Classification { theta, pushed, target, mismatch })
}

/// Classifies a law `g` over a rational ring: `theta(CPn)` is `n+1` times the
/// coefficient of `x^{n+1}` in the logarithm of `g`.
pub fn quillen_classify(g: &FormalGroupLaw) -> Result<Classification> {
    if !g.ring().is_rational() {
        return Err(Error::CannotClassify(
            "cannot classify over this base: the logarithm needs a rational base".into(),
        ));
    }
    let order = g.order();
    let univ = universal_fgl_rational(order.max(2))?;
    let log = g.log()?;
    let images = (1..univ.ring().num_generators() as u32 + 1)
        .map(|n| log.coeff1(n + 1).scale(&num_rational::BigRational::from_integer((n + 1).into())))
        .collect::<Result<Vec<_>>>()?;
    let theta = RingMap::new(univ.ring(), g.ring(), images)?;
    finish(theta, &univ, g.clone())
}

/// The map `CPn -> r_phi(CP^n)` of a genus table and the law it induces.
/// The target law is `theta_*(f_univ)` itself, checked against the law
/// rebuilt from the logarithm `sum r_phi(CP^n) x^{n+1}/(n+1)`.
pub fn classify_genus(table: &GenusTable, order: u32) -> Result<Classification> {
    if order < 2 {
        return Err(Error::OutOfRange("order must be at least 2".into()));
    }
    let univ = universal_fgl_rational(order)?;
    let target = table.ring().clone();
    let images = (1..order)
        .map(|n| table.value(n).cloned())
        .collect::<Result<Vec<_>>>()?;
    let theta = RingMap::new(univ.ring(), &target, images)?;
    let mut log = TruncatedSeries::var(&target, &super::law::x_var(), 0, order);
    for n in 1..order {
        let c = table.value(n)?.scale(&num_rational::BigRational::new(1.into(), (n + 1).into()))?;
        log.set(vec![n + 1], c);
    }
    let g = FormalGroupLaw::from_log(&log)?;
    finish(theta, &univ, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Base, Generator, GradedRingSpec};
    use crate::genera::{todd, CharacteristicSeries};

    #[test]
    fn classify_examples() {
        let q = GradedRingSpec::rationals();
        let add = quillen_classify(&FormalGroupLaw::additive(&q, 5)).unwrap();
        assert!(add.verified());
        assert!(add.theta.images().iter().all(GradedElement::is_zero));

        let mult = quillen_classify(&FormalGroupLaw::parse(&q, "x + y - x*y", 5).unwrap()).unwrap();
        assert!(mult.verified());
        assert!(mult.theta.images().iter().all(GradedElement::is_one));

        let r = GradedRingSpec::new(vec![Generator::laurent("u", -2)], Base::Q, (-20, 20))
            .unwrap()
            .into_ring();
        let mu = quillen_classify(&FormalGroupLaw::parse(&r, "x + y - u*x*y", 5).unwrap()).unwrap();
        assert!(mu.verified());
        let names: Vec<_> = mu.theta.images().iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["u", "u^2", "u^3", "u^4"]);
    }

    #[test]
    fn integer_base_cannot_be_classified() {
        let z = GradedRingSpec::integers();
        assert!(matches!(
            quillen_classify(&FormalGroupLaw::additive(&z, 3)),
            Err(Error::CannotClassify(_))
        ));
    }

    #[test]
    fn genus_tables_classify() {
        let t = GenusTable::from_series(&todd(8), 8).unwrap();
        let c = classify_genus(&t, 8).unwrap();
        assert!(c.verified());
        let q = GradedRingSpec::rationals();
        assert_eq!(c.pushed, FormalGroupLaw::parse(&q, "x + y - x*y", 8).unwrap());
        let zero = GenusTable::from_series(&CharacteristicSeries::trivial(&q, 8), 8).unwrap();
        assert_eq!(classify_genus(&zero, 8).unwrap().pushed, FormalGroupLaw::additive(&q, 8));
    }

    #[test]
    fn ring_map_checks_degrees() {
        let src = GradedRingSpec::cobordism_rational(1, -2);
        let tgt = GradedRingSpec::new(vec![Generator::new("v", -4)], Base::Q, (-8, 0))
            .unwrap()
            .into_ring();
        let err = RingMap::parse(&src, &tgt, &["v".into()]);
        assert!(matches!(err, Err(Error::DegreeMismatch(_))));
    }
}
