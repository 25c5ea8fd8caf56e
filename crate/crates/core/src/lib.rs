pub mod cli;
pub mod cohomology;
pub mod extension;
pub mod fixtures;
pub mod gauge;
pub mod group;
pub mod io;
pub mod phase;
pub mod ray;
pub mod rep;
pub mod rng;
pub mod su2;
pub mod wigner;
