//! Numerical toolkit for finite CAR (fermionic) algebras.
//!
//! The crate decides whether a state on `n` fermionic sites saturates strong
//! subadditivity of von Neumann entropy for a tripartition `A|B|C` of the
//! sites, whether it is a quantum Markov triplet, and, when it is, builds the
//! factorization `rho = x y` together with the block decomposition available
//! for even states.
//!
//! All numerical code is generic over a real scalar `T: Real` (`f32` or
//! `f64`); the aliases at the crate root fix `T = f64`, which is what every
//! default tolerance is calibrated for.
//!
//! Module map:
//!
//! - [`spectral`]: Hermitian eigendecomposition and matrix functions.
//! - [`car`]: Jordan-Wigner representation, parity, matrix units, conditional
//!   expectations.
//! - [`subalgebra`]: *-subalgebras of the full matrix algebra (closures,
//!   commutants, centers, modular-flow invariant subalgebras).
//! - [`quantum_info`]: densities, entropies, the SSA gap, cocycles.
//! - [`sufficiency`]: Petz maps and sufficiency tests for subalgebras.
//! - [`markov`]: triplet analysis, factorization and block structure.
//! - [`states`]: seeded state generators.
//! - [`report`], [`statefile`]: serialized documents and the state file format.
//! - [`selftest`]: the exact-algebra identity suite.

pub mod car;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod quantum_info;
pub mod report;
pub mod scalar;
pub mod selftest;
pub mod spectral;
pub mod statefile;
pub mod states;
pub mod subalgebra;
pub mod sufficiency;
pub mod tolerance;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub use nalgebra::Complex;

/// Dense complex matrix over the scalar `T`.
pub type CMatrix<T> = nalgebra::DMatrix<Complex<T>>;

pub type Matrix = CMatrix<f64>;
pub type Algebra = car::CarAlgebra<f64>;
pub type Regions = car::RegionPartition;
pub type Basis = subalgebra::SubalgebraBasis<f64>;
pub type State = quantum_info::StateDensity<f64>;
pub type Spectrum = spectral::SpectralDecomposition<f64>;
pub type Channel = sufficiency::QuantumChannel<f64>;
pub type Triplet = markov::TripletAnalysis<f64>;
pub type Factors = markov::Factorization<f64>;
pub type Blocks = markov::BlockDecomposition<f64>;
