//! Fourier analysis on finite groupoids.
//!
//! The crate builds the unitary dual of a finite groupoid (irreducible
//! unitary representation bundles, obtained per transitive component by
//! commutant splitting of the isotropy group's regular representation and
//! induction along a transversal), and implements the fiberwise Fourier
//! transform calculus on top of it: inversion, Plancherel isometry,
//! convolution theorem, Schur orthogonality, isotypic projections, class
//! functions and the diagonal Plancherel theorem on the conjugacy groupoid.

pub mod builders;
pub mod checks;
pub mod fourier;
pub mod groupoid;
pub mod harmonic;
pub mod io;
pub mod linalg;
pub mod rep;
pub mod spectral;

pub use groupoid::{Arrow, FiniteGroupoid, GroupoidData, GroupoidError, Unit};

/// Default seed for all randomized algorithms.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
