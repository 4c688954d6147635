//! Brute-force reference computations for the test suites.
//!
//! Everything here is written independently of `rigidity-core` and favours
//! obviously-correct enumeration over speed.

pub mod complex;
pub mod cutoff;
pub mod geometry;
pub mod isotropy;
pub mod line;
pub mod linalg;
pub mod poset;
pub mod winding;
pub mod zigzag;
