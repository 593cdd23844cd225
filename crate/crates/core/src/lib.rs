//! Standoff annotation of Reichenbach's speech, event and reference points,
//! and qualitative reasoning over them.
//!
//! The usual pipeline is [`parse_rtmml`] → [`validate`] → [`build_graph`] →
//! [`close`], after which the closed graph can be queried for relations
//! between any two time points or summarised as an event ordering.

pub mod algebra;
pub mod graph;
pub mod model;
pub mod parser;
pub mod reasoner;
pub mod timeml;
pub mod tokenizer;

pub use model::*;
pub use parser::{parse_rtmml, parse_rtmml_with, serialize_rtmml, validate, ParseOptions, ValidationReport};
pub use graph::{build_graph, BuildError, ConstraintGraph};
pub use reasoner::{anchor_report, close, event_order, oracle_minimal_labels, query_relation, ClosureResult};
pub use timeml::{import_timeml, Imported};
