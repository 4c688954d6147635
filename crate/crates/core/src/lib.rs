//! Computational core of the rigidity bench.
//!
//! * [`barcode`]: constructible sheaves on an interval, exact over GF(p).
//! * [`cones`]: round and polyhedral cones, the cut-off regions and the window ladder.
//! * [`convolution`]: the cut-off functors on barcodes and on convex indicators.
//! * [`degree`]: topological degree by signed preimage count.
//! * [`symplectic`]: residuals, coisotropy, normalization, Moser correction,
//!   Hamiltonian recovery and generating-function checks.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod barcode;
pub mod cones;
pub mod convolution;
pub mod degree;
pub mod gf;
pub(crate) mod linalg;
pub(crate) mod math;
pub mod symplectic;

pub use gf::{FieldConfig, FieldError, Matrix, Subspace};
