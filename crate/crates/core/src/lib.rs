//! Ontology construction from French technical text, side by side with an
//! expert ontology built by specific differentiation.
//!
//! The text side extracts term candidates with POS patterns, mines a lexical
//! network, applies expert validation and projects the result onto a concept
//! taxonomy. The expert side parses a genus/differentia ontology and checks
//! its structural rules. The two meet in term alignment, concept-indexed
//! retrieval over either structure, and OWL/KIF export.

pub mod align;
pub mod corpus;
pub mod error;
pub mod export;
pub mod lexnet;
pub mod okmodel;
pub mod pipeline;
pub mod projection;
pub mod retrieval;
pub mod text;

pub use error::{Error, ParseError, Result};
