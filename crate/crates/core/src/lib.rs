//! Krylov spread complexity for quantum-optical Hamiltonians linear in
//! su(2), h(1), su(1,1) and su(3).

pub mod algebra;
pub mod error;
pub mod evolution;
pub mod lanczos;
pub mod linalg;
pub mod models;
pub mod ode;
pub mod specfun;

pub use error::{KrylovError, Result};
pub use num_complex::Complex64;
