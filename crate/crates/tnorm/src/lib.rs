//! Exact arithmetic in Thompson's group T on reduced tree pairs, a
//! disk-backed pipeline for the cyclic trace numbers of
//! (C+C^2)(D+D^2+D^3), and moment-based estimation of group-ring operator
//! norms (Hankel/Jacobi lower bounds, density reconstruction, free-product
//! reference formulas).

pub mod action;
pub mod bridge;
pub mod config;
pub mod density;
pub mod dyadic;
pub mod element;
pub mod error;
pub mod exact;
pub mod extsort;
pub mod freeprob;
pub mod golden;
pub mod pipeline;
pub mod plmap;
pub mod ring;
pub mod selfadjoint;
pub mod specnorm;
pub mod wordfile;
pub mod tree;
pub mod verify;

pub use element::DoubleTree;
pub use error::{Error, Result};
