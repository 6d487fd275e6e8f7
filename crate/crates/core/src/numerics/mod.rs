//! Numerical kernels shared by the other modules.

mod band;
pub mod eigen;
pub mod polyfit;
pub mod quadrature;

pub use band::SymBandMatrix;
pub use eigen::{eigs_near, eigs_near_with, EigenPair, EigenStrategy};
pub use polyfit::{loglog_slope, lsq_polyfit, PolyFit};
pub use quadrature::{gauss_legendre, trapezoid_cumulative, trapezoid_periodic, GaussRule};
