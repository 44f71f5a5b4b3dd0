//! Text formats: `.cxt` contexts, `.imp` implication lists and JSON sessions.

pub mod artifacts;
pub mod cxt;
pub mod imp;
pub mod session;

pub use artifacts::{artifacts, file_stem, group_base, transcript_blocks};
pub use cxt::{parse_context, parse_cxt, write_cxt, CxtDocument};
pub use imp::{implication_line, parse_imp, write_imp};
pub use session::{load_session, save_session, SessionDocument, SessionState, SESSION_SCHEMA};
