//! Online log template mining with an evolving search tree.
//!
//! Each incoming line is masked, split on whitespace and routed through a
//! search tree: the root routes on the token count, internal nodes on the
//! token at a pivot position. The leaf reached holds a handful of templates;
//! the line joins the most similar one (turning disagreeing positions into
//! wildcards) or starts a new template. A leaf holding more than `phi`
//! templates is split on the position where its templates differ most, so
//! the work per line stays bounded no matter how many templates exist.
//!
//! ```
//! use ustep_core::{Miner, MinerConfig};
//!
//! let mut miner = Miner::new(MinerConfig::new(0.5, 8)).unwrap();
//! miner.process_message("Send 500 bytes");
//! let parsed = miner.process_message("Send 512 bytes");
//! assert_eq!(parsed.template_text, "Send <*> bytes");
//! assert_eq!(parsed.variables, ["512"]);
//! ```

pub mod error;
pub mod eval;
pub mod mask;
pub mod miner;
pub mod snapshot;
pub mod synth;
pub mod template;
pub mod token;
pub mod tree;

pub use error::{ConfigError, InvariantViolation, SnapshotError};
pub use mask::{preprocess, MaskRules};
pub use miner::{Miner, MinerConfig, MinerStats, ParseResult, TemplateSummary, WorkTrace};
pub use template::{sim_f, Template, TemplateId};
pub use token::{tokenize, Token, TokenizedMessage, WILDCARD_MARKER};
pub use tree::{select_pivot, Label, Node, NodeId, NodeKind, SearchTree};
