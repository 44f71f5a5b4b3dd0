use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// An (object, attribute) cell where two sources disagree (× against o).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellConflict {
    pub object: String,
    pub attribute: String,
}

impl fmt::Display for CellConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.object, self.attribute)
    }
}

fn list<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Reasons a counterexample row is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexampleError {
    #[error("premise attributes not certainly present: {}", .0.join(" "))]
    PremiseNotCertain(Vec<String>),
    #[error("attribute {0} is not certainly absent")]
    AttributeNotRefuted(String),
    #[error("counterexample conflicts with a stored object at {}", list(.0))]
    ConflictsWithPrior(Vec<CellConflict>),
    #[error("counterexample refutes implications already confirmed: {}", .0.join("; "))]
    ContradictsConfirmed(Vec<String>),
}

impl CounterexampleError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::PremiseNotCertain(_) => "E_PREMISE_NOT_CERTAIN",
            Self::AttributeNotRefuted(_) => "E_ATTRIBUTE_NOT_REFUTED",
            Self::ConflictsWithPrior(_) => "E_CONFLICTS_WITH_PRIOR",
            Self::ContradictsConfirmed(_) => "E_CONTRADICTS_CONFIRMED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("values are defined over different attribute universes")]
    UniverseMismatch,
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("duplicate {kind} name {name:?}")]
    DuplicateName { kind: &'static str, name: String },
    #[error("empty {0} name")]
    EmptyName(&'static str),
    #[error("conflicting cells: {}", list(.0))]
    Conflict(Vec<CellConflict>),
    #[error("cell ({object}, {attribute}) is unknown in a context required to be formal")]
    NotFormal { object: String, attribute: String },
    #[error("universe has {size} attributes, above the enumeration cap of {cap}; iterate with next_closure instead")]
    EnumerationCap { size: usize, cap: usize },
    #[error("background implications do not hold in the context: {}", .0.join("; "))]
    BackgroundNotValid(Vec<String>),
    #[error("implications are not satisfiable: object {object:?} is forced to have {attribute:?}")]
    Unsatisfiable { object: String, attribute: String },
    #[error("an expert group must not be empty")]
    EmptyGroup,
    #[error("duplicate expert id {0:?}")]
    DuplicateExpert(String),
    #[error("unknown expert {0:?}")]
    UnknownExpert(String),
    #[error("a question is awaiting answers")]
    QuestionOutstanding,
    #[error("no question is active")]
    NoActiveQuestion,
    #[error("attribute {0:?} is not pending for the active question")]
    AttributeNotPending(String),
    #[error("premise does not match the active question")]
    StalePremise,
    #[error("expert {expert:?} already answered attribute {attribute:?} for this premise")]
    DuplicateAnswer { expert: String, attribute: String },
    #[error("attribute {0:?} is part of the premise")]
    AttributeInPremise(String),
    #[error("invalid counterexample: {0}")]
    InvalidCounterexample(#[from] CounterexampleError),
    #[error("examples refute implications already confirmed: {}", .0.join("; "))]
    ExamplesContradict(Vec<String>),
    #[error("exploration has not finished")]
    NotDone,
    #[error("{count} experts exceed the subset cap of {cap}")]
    SubsetCap { count: usize, cap: usize },
    #[error("invalid subset schedule: {0}")]
    InvalidSchedule(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot serialize: {0}")]
    Unwritable(String),
    #[error("unsupported session schema {0:?}")]
    SessionVersion(String),
    #[error("malformed session document: {0}")]
    Session(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Machine-readable code for clients of the service.
    pub fn code(&self) -> &'static str {
        match self {
            Self::UniverseMismatch => "E_UNIVERSE_MISMATCH",
            Self::UnknownObject(_) => "E_UNKNOWN_OBJECT",
            Self::UnknownAttribute(_) => "E_UNKNOWN_ATTRIBUTE",
            Self::DuplicateName { .. } => "E_DUPLICATE_NAME",
            Self::EmptyName(_) => "E_EMPTY_NAME",
            Self::Conflict(_) => "E_CONFLICT",
            Self::NotFormal { .. } => "E_NOT_FORMAL",
            Self::EnumerationCap { .. } => "E_ENUMERATION_CAP",
            Self::BackgroundNotValid(_) => "E_BACKGROUND_NOT_VALID",
            Self::Unsatisfiable { .. } => "E_UNSATISFIABLE",
            Self::EmptyGroup => "E_EMPTY_GROUP",
            Self::DuplicateExpert(_) => "E_DUPLICATE_EXPERT",
            Self::UnknownExpert(_) => "E_UNKNOWN_EXPERT",
            Self::QuestionOutstanding => "E_QUESTION_OUTSTANDING",
            Self::NoActiveQuestion => "E_NO_ACTIVE_QUESTION",
            Self::AttributeNotPending(_) => "E_ATTRIBUTE_NOT_PENDING",
            Self::StalePremise => "E_STALE_PREMISE",
            Self::DuplicateAnswer { .. } => "E_DUPLICATE_ANSWER",
            Self::AttributeInPremise(_) => "E_ATTRIBUTE_IN_PREMISE",
            Self::InvalidCounterexample(e) => e.code(),
            Self::ExamplesContradict(_) => "E_CONTRADICTS_CONFIRMED",
            Self::NotDone => "E_NOT_DONE",
            Self::SubsetCap { .. } => "E_SUBSET_CAP",
            Self::InvalidSchedule(_) => "E_INVALID_SCHEDULE",
            Self::Parse { .. } => "E_PARSE",
            Self::Unwritable(_) => "E_UNWRITABLE",
            Self::SessionVersion(_) => "E_SESSION_VERSION",
            Self::Session(_) => "E_SESSION",
        }
    }
}
