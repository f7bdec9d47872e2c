use thiserror::Error;

use crate::cfmp::SpecViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("invalid node label {0:?}: labels must be nonempty and contain no whitespace")]
    InvalidLabel(String),

    #[error("duplicate node `{0}`")]
    DuplicateNode(String),

    #[error("self-loop on `{0}` is not allowed")]
    SelfLoop(String),

    #[error("{what} has size {actual}, the limit is {limit}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error(
        "set-level local independence needs pairwise disjoint sets covering every component; \
         use delta-separation on the derived graph for other triples"
    )]
    NotCovering,

    #[error("invalid CFMP specification: {}", join_violations(.0))]
    InvalidSpec(Vec<SpecViolation>),

    #[error("unknown component `{0}`")]
    UnknownComponent(String),

    #[error("invalid initial distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),
}

fn join_violations(v: &[SpecViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
