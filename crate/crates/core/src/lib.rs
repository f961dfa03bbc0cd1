//! Potential theory on locally finite, possibly infinite, weighted graphs.
//!
//! Networks are neighbor oracles ([`network::Network`]); every computation
//! runs on a finite window materialized from the oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bratteli;
pub mod error;
pub mod input;
pub mod linalg;
pub mod models;
pub mod network;
pub mod numeric;
pub mod operators;
pub mod potential;
pub mod transfer;
pub mod walk;

pub use error::{Error, Result};
pub use network::{FiniteWindow, Network, VertexId, Window};
pub use operators::{EdgeFlow, VertexFunction};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
