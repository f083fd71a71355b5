use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coeffs::CoefficientSpace;
use super::form::SampledForm;
use super::mesh::{Factor, Mesh};
use crate::error::Result;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All (direction mask, basis index) slots of total degree `deg`. An
/// ungraded coefficient ring is read as 2-periodic: every form degree of the
/// parity of `deg`.
pub fn slots_of_degree(mesh: &Mesh, coeffs: &CoefficientSpace, deg: i64) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for m in 0..=mesh.full_mask() {
        let k = m.count_ones() as i64;
        if coeffs.is_graded() {
            out.extend((0..coeffs.dim()).filter(|&b| k + coeffs.degree(b) == deg).map(|b| (m, b)));
        } else if (k - deg).rem_euclid(2) == 0 {
            out.push((m, 0));
        }
    }
    out
}

/// One smooth factor of a separable random term.
enum Profile {
    Trig { a: f64, b: f64, c: f64, k: f64 },
    Cubic([f64; 4]),
}

impl Profile {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Trig { a, b, c, k } => a + b * (2.0 * PI * k * x).cos() + c * (2.0 * PI * k * x).sin(),
            Profile::Cubic(p) => p[0] + x * (p[1] + x * (p[2] + x * p[3])),
        }
    }
}

/// A random form filling the given slots. Each slot is a sum of a few
/// separable terms: trigonometric with frequencies at most `modes` along
/// circles and cubic along the interval, so the data is resolved exactly by
/// the spectral and fourth-order stencils as long as products stay below
/// the Nyquist frequency.
pub fn random_form(
    mesh: &Arc<Mesh>,
    coeffs: &Arc<CoefficientSpace>,
    slots: &[(u32, usize)],
    modes: u32,
    rng: &mut impl Rng,
) -> Result<SampledForm> {
    let mut out = SampledForm::zero(mesh, coeffs);
    for &(mask, b) in slots {
        let terms: Vec<(f64, Vec<Profile>)> = (0..3)
            .map(|_| {
                let amp = rng.gen_range(-1.0..1.0);
                let profiles = mesh
                    .factors()
                    .iter()
                    .map(|f| match f {
                        Factor::Circle { .. } => Profile::Trig {
                            a: rng.gen_range(-1.0..1.0),
                            b: rng.gen_range(-1.0..1.0),
                            c: rng.gen_range(-1.0..1.0),
                            k: rng.gen_range(1..=modes.max(1)) as f64,
                        },
                        Factor::Interval { .. } => Profile::Cubic([
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                        ]),
                    })
                    .collect();
                (amp, profiles)
            })
            .collect();
        let f = SampledForm::from_fn(mesh, coeffs, mask, b, |x| {
            terms
                .iter()
                .map(|(amp, ps)| amp * ps.iter().zip(x).map(|(p, xi)| p.eval(*xi)).product::<f64>())
                .sum()
        })?;
        out = out.add(&f)?;
    }
    Ok(out)
}

/// A random form of total degree `deg` in every available slot.
pub fn random_form_of_degree(
    mesh: &Arc<Mesh>,
    coeffs: &Arc<CoefficientSpace>,
    deg: i64,
    modes: u32,
    rng: &mut impl Rng,
) -> Result<SampledForm> {
    random_form(mesh, coeffs, &slots_of_degree(mesh, coeffs, deg), modes, rng)
}
