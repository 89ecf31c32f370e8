//! Exact counting of Steiner trees and Hamiltonian cycles by dynamic
//! programming over nice tree decompositions, with join nodes accelerated by
//! Clifford-algebra convolutions.

pub mod checks;
pub mod cli;
pub mod clifford;
pub mod dp;
pub mod gen;
pub mod hamiltonian;
pub mod instance;
pub mod meter;
pub mod nsc;
pub mod oracle;
pub mod steiner;
pub mod ring;
pub mod subsetfn;

pub use dp::{CountError, MAX_BAG};
pub use nsc::Mode;
