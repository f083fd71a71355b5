//! Chern-Weil forms of bundle data on product meshes, smooth orientations,
//! and the push-forward and product of smooth cycles.
//!
//! Only submersions `A x F -> A` with torus fibers are represented, so every
//! characteristic current is a smooth form and equality modulo exact forms
//! is decided by periods.

mod bundle;
mod cycles;
mod suite;

pub use bundle::{ChernForms, ComplexForm, GeometricBundle, FORM_TOL};
pub use cycles::{
    compose_orientations, cross, cup_cycles, product_alpha_rewritten, product_cycles, pushforward_cycle,
    CwContext, CycleGeometry, SmoothCycleDatum, SmoothOrientationDatum,
};
pub use suite::{
    all_suites, axioms_suite, chern_suite, pushforward_suite, transgression_suite, DemoConfig, IdentityReport,
    SuiteReport,
};
