//! Magnetic Schrödinger operators on weighted graphs.
//!
//! The operator acts on l²(V, ω²) as
//!
//! ```text
//! (H f)(x) = ω_x⁻² Σ_{y∼x} c_xy (f(x) − e^{iα_xy} f(y))
//! ```
//!
//! The crate builds such operators from graph data, computes holonomies and
//! gauge reductions, field norms and effective potentials over good
//! coverings, and audits a self-adjointness criterion on truncations of
//! infinite graphs such as the weighted ladder.

pub mod angle;
pub mod cli;
pub mod covering;
pub mod cycles;
pub mod eigen;
pub mod error;
pub mod esa;
pub mod family;
pub mod field;
pub mod graph;
pub mod ladder;
pub mod metric;
pub mod operator;
pub mod potential;
pub mod random;
pub mod report;

pub use error::{Error, Result};
pub use graph::{MagneticPotential, RawGraph, VertexId, WeightedGraph};
