//! Joint true-time-delay and phase-shifter precoding for wideband
//! terahertz MIMO-OFDM.
//!
//! The crate covers the channel and array model, the hybrid precoder
//! structure, a closed-form per-subarray design with its KKT certificate,
//! gain and rate metrics, sizing of the delay network, and a scenario
//! runner that writes reproducible CSV or JSON tables.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dd;
pub mod error;
pub mod format;
pub mod harness;
pub mod jointdesign;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod precoders;
pub mod qp;
pub mod sizing;

pub use error::{Error, Result};
pub use harness::{run, OutputFormat, RunOptions, Scenario};
pub use jointdesign::{design_benchmark, design_theorem1, DesignReport};
pub use model::{ChannelRealization, PathSet, SystemConfig};
pub use precoders::{AnalogDesign, PrecoderSet};
