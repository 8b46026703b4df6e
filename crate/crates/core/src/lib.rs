//! Exact invariants of line arrangements in the complex projective plane.

pub mod exactfield;
pub mod linalg;
pub mod lift;
pub mod modp;
pub mod polyring;
pub mod arrangement;
pub mod combinatorics;
pub mod syzygy;
pub mod gallery;
pub mod theorems;
pub mod report;
