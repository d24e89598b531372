//! Moments and limit laws of additive functionals on split trees.

pub mod error;
pub mod exact;
pub mod hadamard;
pub mod indicial;
pub mod limit;
pub mod montecarlo;
pub mod num;
pub mod toll;
pub mod transfer;
pub mod verify;

pub use error::{Result, SstError};
