use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    DanglingRef,
    TargetOutOfRange,
    LinkArity,
    LinkEntityKind,
    MissingTense,
    ContradictoryTense,
    DuplicateId,
    BadTimeValue,
    UnknownElement,
    UnknownAttribute,
    MissingInstance,
    EmptyExtent,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::DanglingRef => "DANGLING_REF",
            IssueCode::TargetOutOfRange => "TARGET_OUT_OF_RANGE",
            IssueCode::LinkArity => "LINK_ARITY",
            IssueCode::LinkEntityKind => "LINK_ENTITY_KIND",
            IssueCode::MissingTense => "MISSING_TENSE",
            IssueCode::ContradictoryTense => "CONTRADICTORY_TENSE",
            IssueCode::DuplicateId => "DUPLICATE_ID",
            IssueCode::BadTimeValue => "BAD_TIME_VALUE",
            IssueCode::UnknownElement => "UNKNOWN_ELEMENT",
            IssueCode::UnknownAttribute => "UNKNOWN_ATTRIBUTE",
            IssueCode::MissingInstance => "MISSING_INSTANCE",
            IssueCode::EmptyExtent => "EMPTY_EXTENT",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where an issue was found.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Document,
    Element(String),
    /// Byte offset into the source file.
    Offset(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Document => f.write_str("-"),
            Location::Element(id) => f.write_str(id),
            Location::Offset(o) => write!(f, "@{o}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: IssueCode,
    pub location: Location,
    pub message: String,
}

impl Issue {
    pub fn error(code: IssueCode, location: Location, message: impl Into<String>) -> Self {
        Issue { severity: Severity::Error, code, location, message: message.into() }
    }

    pub fn warning(code: IssueCode, location: Location, message: impl Into<String>) -> Self {
        Issue { severity: Severity::Warning, code, location, message: message.into() }
    }
}

/// `severity code location message`
impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{} {} {} {}", sev, self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn push(&mut self, issue: Issue) {
        self.issues.push(issue);
    }

    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn has_code(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    /// One issue per line.
    pub fn to_text(&self) -> String {
        self.issues.iter().map(|i| format!("{i}\n")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "valid": self.is_valid(),
            "issues": self.issues,
        })
    }
}
