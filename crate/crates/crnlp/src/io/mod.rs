//! Text-format parsing and JSON report emission.

mod parse;
mod report;

pub use parse::{parse_document, Document, ParseError};
pub use report::*;
