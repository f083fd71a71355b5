//! Sampled differential forms on products of circles and one interval.

mod calculus;
mod coeffs;
mod form;
mod mesh;
mod random;

pub use calculus::{
    closedness_residual, exterior_d, fiber_integrate, fiber_integrate_interval, partial, period_residual, periods,
    periods_unchecked,
    restrict_interval, Coord, MeshMap, Period,
};
pub use coeffs::{CoefficientSpace, MAX_BASIS};
pub use form::SampledForm;
pub use mesh::{Factor, Mesh, MAX_DIM};
pub use random::{random_form, random_form_of_degree, seeded_rng, slots_of_degree};

use crate::algebra::GradedElement;
use crate::error::Result;
use crate::genera::ChernAlgebra;

impl ChernAlgebra for SampledForm {
    fn unit_like(&self) -> Self {
        SampledForm::one(&self.mesh, &self.coeffs)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        SampledForm::add(self, other)
    }

    fn mul(&self, other: &Self) -> Result<Self> {
        self.wedge(other)
    }

    fn scale_by(&self, c: &GradedElement) -> Result<Self> {
        self.mul_element(c)
    }

    fn check_degree(&self, deg: i64) -> Result<()> {
        self.check_total_degree(deg, "form")
    }
}
