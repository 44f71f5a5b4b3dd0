//! Attribute exploration with several partial, possibly contradicting experts.
//!
//! Contexts are three-valued (`×`, `o`, `?`). Implication bases are computed
//! relative to background knowledge, one group of experts is explored with
//! [`Exploration`], and every non-empty expert subset with
//! [`SystemExploration`].

pub mod base;
pub mod bitset;
pub mod context;
pub mod driver;
pub mod error;
pub mod expert;
pub mod exploration;
pub mod fixtures;
pub mod formats;
pub mod implication;
pub mod lattice;
pub mod log;
pub mod report;
pub mod simulated;
pub mod system;
pub mod universe;

pub use base::{canonical_base, check_satisfiable, l_completion, model_context, relative_canonical_base, MODEL_PREFIX};
pub use bitset::BitSet;
pub use context::{CellValue, FormalContext, IncompleteContext, Row};
pub use error::{CellConflict, CounterexampleError, Error, Result};
pub use expert::{is_artificial, validate_counterexample, Counterexample, ExpertRef, Verdict, ARTIFICIAL_PREFIX};
pub use exploration::{AnswerKind, AnswerRecord, Exploration, ExplorationResult, Phase, Progress, Question, QuestionRecord};
pub use implication::{next_closure, respects, Implication, ImplicationSet, DEFAULT_MODEL_CAP};
pub use lattice::{concepts, Concept};
pub use log::{merge_log, question_label, shared_context, AnswerLog, LogEntry};
pub use report::{conflict_report, ConflictReport, ReportOptions};
pub use simulated::SimulatedView;
pub use system::{
    background_for, lattice_covers, lattice_dot, lattice_text, own_generators, question_reduce, shared_lattice, SharedConcept,
    SubsetResult, SubsetSchedule, SystemExploration, TieBreak,
};
pub use universe::{AttributeSet, AttributeUniverse};
