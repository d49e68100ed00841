//! Structural and numerical analysis of mass-action reaction networks.

pub mod catalog;
pub mod decomp;
pub mod depone;
pub mod equilib;
pub mod error;
pub mod graph;
pub mod netio;
pub mod network;
pub mod poly;
pub mod ratlin;
pub mod salt;
pub mod verify;

pub use error::{Error, Result};
