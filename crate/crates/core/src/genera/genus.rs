use num_rational::BigRational;
use rayon::prelude::*;

use super::characteristic::CharacteristicSeries;
use super::sequence::{eval_weight, k_phi};
use crate::algebra::{GradedElement, GradedRingSpec, Ring, SeriesVars, TruncatedSeries};
use crate::error::{Error, Result};

fn check_order(phi: &CharacteristicSeries, n: u32) -> Result<()> {
    if phi.order() < n {
        return Err(Error::InsufficientOrder { needed: n, have: phi.order() });
    }
    Ok(())
}

/// Genus of `CP^n`: the coefficient of `z^n` in `phi(z)^{-(n+1)}`.
pub fn genus_cpn(phi: &CharacteristicSeries, n: u32) -> Result<GradedElement> {
    check_order(phi, n)?;
    let s = phi.series().truncated(n);
    Ok(s.invert()?.pow(n + 1)?.coeff1(n))
}

/// Genus of `CP^n` computed in `R[a]/(a^{n+1})`: the normal bundle has total
/// Chern class `(1+a)^{-(n+1)}`, and the answer is the `a^n` coefficient of
/// `K_phi(c_1, .., c_n)`.
pub fn genus_cpn_via_chern(phi: &CharacteristicSeries, n: u32) -> Result<GradedElement> {
    check_order(phi, n)?;
    let ring = phi.ring();
    if n == 0 {
        return Ok(GradedElement::one(ring));
    }
    let a = SeriesVars::degree_two(&["a"]);
    let one = TruncatedSeries::one(ring, &a, n);
    let one_plus_a = one.add(&TruncatedSeries::var(ring, &a, 0, n))?;
    let total = one_plus_a.invert()?.pow(n + 1)?;
    let chern: Vec<TruncatedSeries> = (1..=n)
        .map(|i| {
            let mut c = TruncatedSeries::zero(ring, &a, n);
            c.set(vec![i], total.coeff1(i));
            c
        })
        .collect();
    let k = k_phi(phi, n)?;
    Ok(eval_weight(&k, n, &one, &chern)?.coeff1(n))
}

/// Values `r_phi(CP^n)` for `0 <= n <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenusTable {
    phi: CharacteristicSeries,
    values: Vec<GradedElement>,
}

impl GenusTable {
    pub fn from_series(phi: &CharacteristicSeries, max_n: u32) -> Result<Self> {
        check_order(phi, max_n)?;
        let values = (0..=max_n)
            .into_par_iter()
            .map(|n| genus_cpn(phi, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { phi: phi.clone(), values })
    }

    /// The table `CP^n -> [CP^n]` over `Q[CP1, .., CPN]`.
    pub fn universal(max_n: u32) -> Result<Self> {
        let ring = GradedRingSpec::cobordism_rational(max_n as usize, -2 * max_n as i64);
        let phi = universal_series(&ring, max_n)?;
        Self::from_series(&phi, max_n)
    }

    pub fn phi(&self) -> &CharacteristicSeries {
        &self.phi
    }

    pub fn ring(&self) -> &Ring {
        self.phi.ring()
    }

    pub fn max_n(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    pub fn value(&self, n: u32) -> Result<&GradedElement> {
        self.values
            .get(n as usize)
            .ok_or_else(|| Error::OutOfRange(format!("CP{n} beyond the table (max {})", self.max_n())))
    }

    pub fn values(&self) -> &[GradedElement] {
        &self.values
    }
}

/// The series whose genus sends `CP^n` to the generator `CPn`: `g(z)/z`
/// where `g` inverts `sum_n CPn x^{n+1}/(n+1)`.
pub fn universal_series(ring: &Ring, max_n: u32) -> Result<CharacteristicSeries> {
    let x = SeriesVars::degree_two(&["x"]);
    let mut log = TruncatedSeries::var(ring, &x, 0, max_n + 1);
    for n in 1..=max_n {
        let cp = GradedElement::generator(ring, &format!("CP{n}"))?;
        log.set(vec![n + 1], cp.scale(&BigRational::new(1.into(), (n + 1).into()))?);
    }
    let exp = log.reversion()?;
    let coeffs: Vec<_> = (2..=max_n + 1).map(|k| exp.coeff1(k)).collect();
    CharacteristicSeries::from_coefficients(ring, &coeffs, max_n, Some("universal".into()))
}

/// Extends `CP^n -> r_phi(CP^n)` to a ring map on `Q[CP1, CP2, ..]` and
/// applies it to `expr`.
pub fn genus_extend(table: &GenusTable, expr: &GradedElement) -> Result<GradedElement> {
    let mut images = Vec::new();
    for g in expr.ring().generators() {
        let n: u32 = g
            .name
            .strip_prefix("CP")
            .and_then(|k| k.parse().ok())
            .filter(|&k| k >= 1 && g.deg == -2 * k as i64)
            .ok_or_else(|| Error::UnknownGenerator(format!("`{}` is not a CP generator", g.name)))?;
        let used = expr.terms().any(|(m, _)| m.exponents()[images.len()] != 0);
        images.push(if used || n <= table.max_n() {
            table.value(n)?.clone()
        } else {
            GradedElement::zero(table.ring())
        });
    }
    expr.substitute(table.ring(), &images)
}
