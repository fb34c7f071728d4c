//! Exact polynomial algebra and graph checks for consensus protocols
//! `ẋᵢ = fᵢ(x)` with polynomial right-hand sides.
//!
//! * [`polyring`]: sparse rational polynomials, monomial orders, division.
//! * [`groebner`]: Buchberger's algorithm, membership, elimination.
//! * [`depgraph`]: dependency graphs, path-equivalence classes, generated
//!   protocol families.
//! * [`analysis`]: the necessary-condition battery and its report.
//! * [`simulate`]: fixed-step RK4 integration.
//! * [`protocol_io`]: the `.protocol` text format and CSV export.

pub mod analysis;
pub mod cli;
pub mod depgraph;
pub mod groebner;
pub mod polyring;
pub mod protocol;
pub mod protocol_io;
pub mod simulate;

pub use analysis::{run_all, CheckName, CheckReport, Verdict};
pub use depgraph::{build_dependency_graph, generate_protocol, DependencyGraph, ProtocolKind};
pub use groebner::{buchberger, elimination_ideal, GroebnerBasis, Ideal};
pub use polyring::{Coeff, Monomial, MonomialOrder, Polynomial, Ring};
pub use protocol::{DiagonalIdeal, Protocol};
pub use protocol_io::{format_protocol, parse_protocol};
