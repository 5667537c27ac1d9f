//! Saturation throughput of overlapping IEEE 802.11 WLANs.
//!
//! [`ctmc`] captures which WLANs can be on the air together and how long each
//! stays active; [`bianchi`] solves the slotted contention among WLANs that
//! compete at the same instant; [`throughput`] combines the two. [`sim`] is a
//! slotted CSMA/CA simulator used to validate the model.

pub mod bianchi;
pub mod ctmc;
pub mod error;
pub mod scenario;
pub mod sim;
pub mod sweep;
pub mod throughput;

pub use error::{Error, Result};
pub use scenario::{ConflictGraph, PhyMacParams, Scenario, Wlan};
