//! Reading, writing and checking RTMML XML.

mod read;
mod report;
mod validate;
mod write;

pub use read::{parse_rtmml, parse_rtmml_with, ParseError, ParseOptions, Parsed};
pub use report::{Issue, IssueCode, Location, Severity, ValidationReport};
pub use validate::{is_time_value, validate};
pub use write::serialize_rtmml;
