//! Simulation of continuous-time Markov chain reaction networks under a
//! general system-size scaling, with exact (next reaction method), tau-leap
//! and coupled-pair path generation, plus biased and unbiased multilevel
//! Monte Carlo estimators and an experiment harness for variance-scaling
//! studies.

// `!(x > 0)` deliberately rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod error;
pub mod exact;
pub mod mlmc;
pub mod model;
pub mod modelfile;
pub mod parallel;
pub mod presets;
pub mod stats;
pub mod streams;
pub mod study;
pub mod tau;
pub mod trace;

pub use error::{Error, ParseError, ParseErrorKind};
pub use model::{Model, Reaction, ReactionNetwork, ScalingProfile};
pub use streams::{Stream, StreamKey};
