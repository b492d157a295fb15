//! Exact search for perfect lattice Delaunay polytopes.

pub mod cvp;
pub mod delaunay;
pub mod equiv;
pub mod exact;
pub mod explore;
pub mod hinge;
pub mod qfunc;
pub mod ridges;
pub mod seeds;
