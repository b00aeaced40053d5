pub mod algebra;
pub mod centers;
pub mod closing;
pub mod solver;
pub mod verifier;
pub mod cli;
