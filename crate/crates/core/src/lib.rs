//! Multi-agent spatial-reuse simulator for 802.11 BSSs.
//!
//! Each BSS is an agent choosing a (carrier-sense threshold, transmit power)
//! pair every iteration. The [`mac`] module turns a joint choice into
//! throughput; [`learning`] holds the agent policies and regret bookkeeping;
//! [`engine`] runs repeated games and campaigns over random deployments.

pub mod channel;
pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod learning;
pub mod mac;
pub mod output;
pub mod rng;

pub use error::{Error, Result};
