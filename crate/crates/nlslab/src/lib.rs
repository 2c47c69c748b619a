//! A numerical laboratory for nonlinear Schrödinger equations:
//! exact breather/soliton evaluation, conserved-quantity diagnostics,
//! virial identities, pseudospectral time evolution, ground states, and a
//! regime classifier for breather nonexistence criteria.

pub mod catalog;
pub mod classifier;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod ground_state;
pub mod integrator;
pub mod model;
pub mod scenario;
pub mod virial;

pub use error::{NlsError, Result};
