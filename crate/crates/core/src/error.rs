use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One offending field, addressed by its JSON path (e.g. `requests[0].r_min`).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FieldIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}", join_issues(.0))]
    Validation(Vec<FieldIssue>),
    #[error("interval {0} is outside 1..=288")]
    IntervalOutOfRange(i64),
    #[error("infeasible: {needed} intervals required but only {available} remain")]
    Infeasible { needed: usize, available: usize },
    #[error("percentage undefined: baseline {0} is zero")]
    UndefinedPercentage(&'static str),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_issues(issues: &[FieldIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation(vec![FieldIssue {
            path: path.into(),
            message: message.into(),
        }])
    }

    /// Re-addresses every validation issue under `path`.
    pub fn at(self, path: &str) -> Self {
        match self {
            Error::Validation(issues) => Error::Validation(
                issues
                    .into_iter()
                    .map(|i| FieldIssue {
                        path: if i.path.is_empty() {
                            path.to_string()
                        } else if path.is_empty() {
                            i.path
                        } else {
                            format!("{path}.{}", i.path)
                        },
                        message: i.message,
                    })
                    .collect(),
            ),
            Error::IntervalOutOfRange(k) => {
                Error::invalid(path, format!("interval {k} is outside 1..=288"))
            }
            other => other,
        }
    }

    pub fn issues(&self) -> &[FieldIssue] {
        match self {
            Error::Validation(issues) => issues,
            _ => &[],
        }
    }

    /// Data errors (exit code 1) as opposed to I/O failures (exit code 2).
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
