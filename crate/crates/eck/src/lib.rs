//! Exact F₂ computations for embedded contact knot homology.
//!
//! The crate is organised bottom-up:
//!
//! * [`f2linalg`] — sparse/bit-packed linear algebra over F₂;
//! * [`chaincx`] — graded and filtered chain complexes, homology, cones,
//!   Gaussian cancellation and spectral sequences;
//! * [`orbits`] — orbit sets, their gradings and Lefschetz signs;
//! * [`dehntwist`] — the lattice-path complex of a positive Dehn twist;
//! * [`torusknot`] — the ECK complexes of the torus knots T(2,n);
//! * [`surgery`] — the large-negative surgery formula;
//! * [`euler`] — Laurent polynomials, Euler characteristics and torsion.
//!
//! Everything is exact: homology is over F₂ and Euler characteristics are
//! integer Laurent polynomials ([`Laurent`] is the `i64` instance of the
//! generic [`euler::LaurentPolynomial`]).

pub mod chaincx;
pub mod dehntwist;
pub mod euler;
pub mod f2linalg;
pub mod orbits;
pub mod surgery;
pub mod torusknot;

pub use chaincx::{
    ChainComplex, ChainError, ChainMap, Direction, FiltrationSpec, Generator, Grading,
};
pub use dehntwist::{PathMonomial, SlopeInterval};
pub use euler::{Laurent, LaurentPolynomial, TruncatedSeries};
pub use f2linalg::{BitMatrix, F2Vector};
pub use orbits::{Orbit, OrbitKind, OrbitSet};
pub use surgery::{SurgeryResult, SurgerySpec};
pub use torusknot::TorusKnot;
