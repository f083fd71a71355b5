use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::law::{is_prime, FormalGroupLaw};
use crate::algebra::{Base, GradedElement, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ExactThrough(u32),
    FailsAt(u32),
    Inconclusive { stage: u32, reason: String },
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::ExactThrough(n) => format!("exact-through-stage-{n}"),
            Verdict::FailsAt(n) => format!("fails-at-stage-{n}"),
            Verdict::Inconclusive { .. } => "inconclusive".into(),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub stage: u32,
    /// `v_n` reduced modulo the earlier terms of the sequence.
    pub v: String,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeReport {
    pub prime: u32,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub stages: Vec<StageReport>,
}

/// A polynomial over `F_p` in the ring generators: exponent vector to residue.
type ModP = BTreeMap<Vec<i32>, u64>;

fn reduce_mod_p(x: &GradedElement, p: u64) -> ModP {
    let pb = BigInt::from(p);
    let mut out = ModP::new();
    for (m, c) in x.terms() {
        debug_assert!(c.is_integer());
        let r = c.numer().mod_floor(&pb).to_u64().expect("small");
        if r != 0 {
            out.insert(m.exponents().to_vec(), r);
        }
    }
    out
}

/// The quotient `F_p[g_1, .., g_k] / I` (Laurent generators are units) with
/// `I` a monomial ideal on the non-invertible generators.
struct MonomialQuotient {
    laurent: Vec<bool>,
    /// Minimal generators of `I`, with Laurent exponents zeroed.
    ideal: Vec<Vec<i32>>,
    zero: bool,
}

impl MonomialQuotient {
    fn new(ring: &Ring) -> Self {
        Self {
            laurent: ring.generators().iter().map(|g| g.invertible).collect(),
            ideal: Vec::new(),
            zero: false,
        }
    }

    fn strip_units(&self, m: &[i32]) -> Vec<i32> {
        m.iter().zip(&self.laurent).map(|(&e, &u)| if u { 0 } else { e }).collect()
    }

    fn divides(a: &[i32], b: &[i32]) -> bool {
        a.iter().zip(b).all(|(x, y)| x <= y)
    }

    fn reduce(&self, x: &ModP) -> ModP {
        x.iter()
            .filter(|(m, _)| {
                let s = self.strip_units(m);
                !self.ideal.iter().any(|g| Self::divides(g, &s))
            })
            .map(|(m, c)| (m.clone(), *c))
            .collect()
    }

    /// Whether a monomial is a non-zero-divisor: it shares no variable with
    /// any minimal generator.
    fn regular(&self, m: &[i32]) -> bool {
        let s = self.strip_units(m);
        self.ideal
            .iter()
            .all(|g| g.iter().zip(&s).all(|(a, b)| *a == 0 || *b == 0))
    }

    fn add_generator(&mut self, m: &[i32]) {
        let s = self.strip_units(m);
        if s.iter().all(|&e| e == 0) {
            self.zero = true;
            return;
        }
        if self.ideal.iter().any(|g| Self::divides(g, &s)) {
            return;
        }
        self.ideal.retain(|g| !Self::divides(&s, g));
        self.ideal.push(s);
    }
}

fn fmt_modp(x: &ModP, ring: &Ring) -> String {
    if x.is_empty() {
        return "0".into();
    }
    x.iter()
        .map(|(m, c)| {
            let mut f = Vec::new();
            if *c != 1 || m.iter().all(|&e| e == 0) {
                f.push(c.to_string());
            }
            for (e, g) in m.iter().zip(ring.generators()) {
                match e {
                    0 => {}
                    1 => f.push(g.name.clone()),
                    _ => f.push(format!("{}^{}", g.name, e)),
                }
            }
            f.join("*")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn check_prime(f: &FormalGroupLaw, p: u32, stages: u32) -> Result<PrimeReport> {
    let ring = f.ring();
    let mut report = PrimeReport { prime: p, verdict: Verdict::ExactThrough(stages), reason: None, stages: vec![] };
    let stage = |n: u32, v: String, status: &str| StageReport { stage: n, v, status: status.into() };

    if ring.base() == Base::Q {
        // p is a unit, so the quotient by p is already zero.
        report.stages.push(stage(0, p.to_string(), "unit"));
        return Ok(report);
    }
    report.stages.push(stage(0, p.to_string(), "regular"));
    let mut quotient = MonomialQuotient::new(ring);
    let mut p_series = None;
    for n in 1..=stages {
        if quotient.zero {
            report.stages.push(stage(n, "-".into(), "vacuous"));
            continue;
        }
        let inconclusive = |reason: String, mut report: PrimeReport| {
            report.verdict = Verdict::Inconclusive { stage: n, reason: reason.clone() };
            report.reason = Some(reason);
            report
        };
        let pn = (p as u64).checked_pow(n).filter(|&k| k <= u32::MAX as u64);
        let Some(pn) = pn.map(|k| k as u32) else {
            return Ok(inconclusive(format!("p^{n} is too large"), report));
        };
        if f.order() < pn {
            return Ok(inconclusive(
                format!("law truncated at order {} but stage {n} needs order {pn}", f.order()),
                report,
            ));
        }
        let deg = 2 - 2 * pn as i64;
        if ring.is_graded() && !ring.in_window(deg) {
            return Ok(inconclusive(
                format!("degree {deg} of v_{n} lies outside the ring window"),
                report,
            ));
        }
        if p_series.is_none() {
            p_series = Some(f.p_series(p)?);
        }
        let coeff = p_series.as_ref().unwrap().coeff1(pn);
        let v = quotient.reduce(&reduce_mod_p(&coeff, p as u64));
        let text = fmt_modp(&v, ring);
        match v.len() {
            0 => {
                report.stages.push(stage(n, text, "zero-divisor"));
                report.verdict = Verdict::FailsAt(n);
                return Ok(report);
            }
            1 => {
                let m = v.keys().next().unwrap().clone();
                if quotient.strip_units(&m).iter().all(|&e| e == 0) {
                    report.stages.push(stage(n, text, "unit"));
                    quotient.zero = true;
                } else if quotient.regular(&m) {
                    report.stages.push(stage(n, text, "regular"));
                    quotient.add_generator(&m);
                } else {
                    report.stages.push(stage(n, text, "zero-divisor"));
                    report.verdict = Verdict::FailsAt(n);
                    return Ok(report);
                }
            }
            _ => {
                report.stages.push(stage(n, text, "unknown"));
                return Ok(inconclusive(
                    format!("v_{n} is not a monomial, outside the decidable fragment"),
                    report,
                ));
            }
        }
    }
    Ok(report)
}

/// Checks regularity of `(p, v_1, .., v_stages)` for each prime.
///
/// Decided exactly for laws over `Q[..]` (where `p` is a unit) and over
/// `Z[..]` with Laurent and polynomial generators while every `v_n` reduces
/// to a monomial; anything else is reported inconclusive.
pub fn landweber_check(f: &FormalGroupLaw, primes: &[u32], stages: u32) -> Result<Vec<PrimeReport>> {
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
    }
    if stages == 0 {
        return Err(Error::OutOfRange("at least one stage is required".into()));
    }
    primes.par_iter().map(|&p| check_prime(f, p, stages)).collect()
}

/// The order a law needs so that stages up to `stages` can be decided.
pub fn required_order(primes: &[u32], stages: u32) -> u32 {
    primes
        .iter()
        .map(|&p| (p as u64).saturating_pow(stages).min(u32::MAX as u64) as u32)
        .max()
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Generator, GradedRingSpec};

    fn u_ring(laurent: bool) -> Ring {
        let g = if laurent { Generator::laurent("u", -2) } else { Generator::new("u", -2) };
        GradedRingSpec::new(vec![g], Base::Z, (-60, 60)).unwrap().into_ring()
    }

    #[test]
    fn additive_fails_at_one() {
        let f = FormalGroupLaw::additive(&GradedRingSpec::integers(), 25);
        for r in landweber_check(&f, &[2, 3, 5], 2).unwrap() {
            assert_eq!(r.verdict, Verdict::FailsAt(1));
        }
    }

    #[test]
    fn laurent_multiplicative_is_exact() {
        let f = FormalGroupLaw::parse(&u_ring(true), "x + y - u*x*y", 25).unwrap();
        for r in landweber_check(&f, &[2, 3, 5], 2).unwrap() {
            assert_eq!(r.verdict, Verdict::ExactThrough(2));
            assert_eq!(r.stages[1].status, "unit");
        }
    }

    #[test]
    fn polynomial_multiplicative_fails_at_two() {
        let f = FormalGroupLaw::parse(&u_ring(false), "x + y - u*x*y", 25).unwrap();
        for r in landweber_check(&f, &[2, 3, 5], 2).unwrap() {
            assert_eq!(r.verdict, Verdict::FailsAt(2), "p = {}", r.prime);
            assert_eq!(r.stages[1].status, "regular");
            assert_eq!(r.stages[1].v, format!("u^{}", r.prime - 1).replace("u^1", "u"));
        }
    }

    #[test]
    fn short_truncation_is_inconclusive() {
        let f = FormalGroupLaw::parse(&u_ring(false), "x + y - u*x*y", 8).unwrap();
        let r = landweber_check(&f, &[3], 2).unwrap();
        assert!(matches!(r[0].verdict, Verdict::Inconclusive { stage: 2, .. }));
    }

    #[test]
    fn rational_base_is_exact() {
        let f = FormalGroupLaw::additive(&GradedRingSpec::rationals(), 4);
        assert_eq!(landweber_check(&f, &[2], 3).unwrap()[0].verdict, Verdict::ExactThrough(3));
    }
}
