//! Formal group laws, the Quillen classifying map, Landweber's regularity
//! criterion and degree-wise `Tor_1`.

mod classify;
mod landweber;
mod law;
mod tor;

pub use classify::{classify_genus, quillen_classify, Classification, ClassifyMismatch, RingMap};
pub use landweber::{landweber_check, required_order, PrimeReport, StageReport, Verdict};
pub use law::{
    is_prime, mishchenko_log, universal_fgl_rational, x_var, xy_vars, AxiomCheck, AxiomFailure,
    FglReport, FormalGroupLaw,
};
pub use tor::{tor1, ModulePresentation, TorDegree, MAX_PIECE_DIM};
