//! Symbolic regression by stack-based genetic programming, with active
//! learning strategies that decide which input point to label next.

pub mod acquisition;
pub mod al;
pub mod bench;
pub mod cli;
pub mod gp;
pub mod optim;
