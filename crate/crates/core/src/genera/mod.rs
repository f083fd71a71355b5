//! Characteristic series, multiplicative sequences and genera of `CP^n`.

mod characteristic;
mod genus;
mod sequence;

pub use characteristic::{
    a_hat, builtin_genus, elliptic, elliptic_from, elliptic_rational, elliptic_ring, l_genus, todd,
    z_var, CharacteristicSeries,
};
pub use genus::{genus_cpn, genus_cpn_via_chern, genus_extend, universal_series, GenusTable};
pub use sequence::{
    eval_sequence, eval_weight, k_phi, partitions, ChernAlgebra, ChernPoly, MultiplicativeSequence,
    MAX_WEIGHT,
};
