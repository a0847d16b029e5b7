//! Finite-level invariants of Artin-Schreier-Witt towers of curves over
//! finite fields: ramification, differentials and the Cartier operator, mod-p
//! Dieudonne modules, Galois-module structure, zeta functions and growth laws.

pub mod curve;
pub mod derham;
pub mod error;
pub mod field;
pub mod fit;
pub mod galois;
pub mod invariants;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod ring;
pub mod semilinear;
pub mod serial;
pub mod tower;
pub mod verify;
pub mod witt;
pub mod zeta;

pub use error::{AlgebraError, CohomologyError, Error, FitError, ModelError, ZetaError};
pub use field::{field_make, FieldDesc, Fq};
pub use matrix::Matrix;
pub use poly::Poly;
pub use ratfunc::{Place, RatFunc};
pub use ring::Ring;
pub use semilinear::SemilinearMap;
