//! Ladder variables of symmetric lattice random walks, random walks in random
//! scenery on bonds, and walks in one-dimensional Levy random media.
//!
//! The crate simulates the control walk `S`, the cost process `C` collected
//! on the bonds it crosses, and the derived process `Y_n = omega_{S_n}` on a
//! renewal medium; it evaluates generating functions of ladder variables
//! exactly for bounded-jump walks, produces closed-form tail predictions, and
//! fits tails of simulated samples.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod citations;
pub mod ensemble;
pub mod error;
pub mod laws;
pub mod local_times;
pub mod predictions;
pub mod quad;
pub mod rng;
pub mod rwrsb;
pub mod scenery_media;
pub mod special;
pub mod spitzer;
pub mod stats;
pub mod tail;
pub mod walk;

pub use error::{Error, Result};
pub use laws::{JumpKind, JumpLaw, SceneryKind, SceneryLaw};
pub use local_times::{BondRun, LocalTimes};
pub use predictions::{SlowlyVarying, TailPrediction};
pub use rwrsb::{CostSample, CostSpec, Preset};
pub use scenery_media::{Medium, SceneryRealization};
pub use special::Estimate;
pub use tail::TailFit;
pub use walk::{LadderStats, PathRecord};
