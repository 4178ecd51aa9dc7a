//! Exact construction and analysis of univoque graphs.
//!
//! For a non-integer base `q` in `V \ U` and the alphabet `{0, …, M}`, the
//! points of `[0, M/(q−1)]` with a unique expansion are generated by the
//! infinite paths of a finite labeled digraph `G(q)`. This crate builds that
//! graph from the symbolic description of `q` (its greedy expansion of 1),
//! using exact arithmetic in `ℚ(q)` throughout, and provides the analyses
//! that go with it: strong connectivity criteria, isomorphism and tower
//! structure along successor chains, entropy and dimension, and exact
//! counting of expansions.
//!
//! Modules, bottom up:
//!
//! * [`digits`]: words, eventually periodic sequences, lexicographic tests.
//! * [`algebraic`]: integer polynomials, root isolation, exact field elements.
//! * [`base`]: base contexts, successor chains, special points and their order.
//! * [`graph`]: the graphs, SCCs, connectivity criteria, isomorphism, towers.
//! * [`spectral`]: Perron radius, entropy, dimension.
//! * [`expansions`]: greedy / quasi-greedy expansions, expansion counting,
//!   witnesses with a prescribed number of expansions.
//! * [`oracle`]: brute-force references used to cross-check the above.

pub mod algebraic;
pub mod base;
pub mod digits;
mod digraph;
pub mod error;
pub mod expansions;
pub mod graph;
pub mod oracle;
pub mod spectral;

pub use algebraic::{AlgebraicReal, IntPoly, QField};
pub use base::{BaseContext, PointName, PointOrder, SpecialPoints};
pub use digits::{BaseClass, Digit, EpSeq, Word};
pub use error::{Error, Result};
pub use graph::{UnivoqueGraph, Variant};

/// Spectral report with double-precision radii.
pub type SpectralReport64 = spectral::SpectralReport<f64>;
/// Spectral report with single-precision radii.
pub type SpectralReport32 = spectral::SpectralReport<f32>;
/// Per-component radius breakdown with double-precision radii.
pub type ComponentReport64 = spectral::ComponentReport<f64>;
/// Perron radius estimate in double precision.
pub type Radius64 = spectral::Radius<f64>;
