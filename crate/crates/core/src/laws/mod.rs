//! Jump laws of the control walk and scenery laws of the costs and media.

mod jump;
mod scenery;

pub use jump::{JumpKind, JumpLaw};
pub use scenery::{SceneryKind, SceneryLaw};
