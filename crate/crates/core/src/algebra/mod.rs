//! Exact graded rings, sparse elements and truncated power series.

pub mod element;
pub mod linalg;
pub mod ring;
pub mod series;

pub use element::{fmt_rational, parse_rational, GradedElement, Monomial};
pub use linalg::QMatrix;
pub use ring::{Base, Generator, GradedRingSpec, Ring};
pub use series::{SeriesVar, SeriesVars, TruncatedSeries};
