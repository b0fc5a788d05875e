pub mod bench;
pub mod content;
pub mod latex;
pub mod mathml;
pub mod metrics;
pub mod mlp;
pub mod pipeline;
pub mod semantics;
pub mod term;
pub mod tree;

pub use tree::{ExprTree, NodeId};
