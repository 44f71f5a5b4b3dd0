//! The downloadable files of a session, keyed by relative path.
//!
//! Paths are stable, so a batch run and a live session produce the same
//! layout: `accepted.imp`, `bases/{A+B}.imp` (system mode), `C.cxt`,
//! `examples/{expert}.cxt`, `transcript.txt`, `lattice.txt`, `lattice.dot`,
//! `report.txt` and `report.json`.

use std::collections::BTreeMap;

use crate::context::IncompleteContext;
use crate::driver::render_transcript;
use crate::error::Result;
use crate::exploration::QuestionRecord;
use crate::formats::cxt::write_cxt;
use crate::formats::imp::write_imp;
use crate::formats::session::SessionState;
use crate::implication::ImplicationSet;
use crate::log::{shared_context, AnswerLog};
use crate::report::{conflict_report, ReportOptions};
use crate::system::{lattice_dot, lattice_text, shared_lattice};

/// File-name-safe form of an id: characters outside `[A-Za-z0-9._-]`
/// become `_`.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect()
}

/// Transcript blocks in chronological order, the running one last.
pub fn transcript_blocks(state: &SessionState) -> Vec<(Vec<String>, Vec<QuestionRecord>)> {
    match state {
        SessionState::Group(x) => vec![(x.experts().iter().map(|e| e.id.clone()).collect(), x.transcript().to_vec())],
        SessionState::System(s) => {
            let mut blocks: Vec<_> = s
                .results()
                .iter()
                .map(|r| (r.members.clone(), r.transcript.clone()))
                .collect();
            if let (Some(x), Some(members)) = (s.exploration(), s.current_subset()) {
                blocks.push((members, x.transcript().to_vec()));
            }
            blocks
        }
    }
}

/// Accepted base of the whole expert group, as far as it got.
pub fn group_base(state: &SessionState) -> ImplicationSet {
    match state {
        SessionState::Group(x) => x.accepted().clone(),
        SessionState::System(s) => match s.results().first() {
            Some(r) if r.members.len() == s.experts().len() => r.accepted.clone(),
            _ => match (s.exploration(), s.position()) {
                (Some(x), 0) => x.accepted().clone(),
                _ => ImplicationSet::new(s.universe().clone()),
            },
        },
    }
}

fn log_and_examples(state: &SessionState) -> (&AnswerLog, &[IncompleteContext]) {
    match state {
        SessionState::Group(x) => (x.log(), x.examples()),
        SessionState::System(s) => (s.log(), s.examples()),
    }
}

pub fn artifacts(state: &SessionState) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let ids: Vec<String> = state.experts().iter().map(|e| e.id.clone()).collect();
    out.insert("accepted.imp".to_string(), write_imp(&group_base(state))?);
    if let SessionState::System(s) = state {
        for r in s.results() {
            let stem: Vec<String> = r.members.iter().map(|m| file_stem(m)).collect();
            out.insert(format!("bases/{}.imp", stem.join("+")), write_imp(&r.accepted)?);
        }
    }
    let (log, examples) = log_and_examples(state);
    let shared = shared_context(log);
    out.insert("C.cxt".to_string(), write_cxt("C", shared.as_incomplete())?);
    for (id, ctx) in ids.iter().zip(examples) {
        out.insert(format!("examples/{}.cxt", file_stem(id)), write_cxt(id, ctx)?);
    }
    out.insert("transcript.txt".to_string(), render_transcript(&ids, &transcript_blocks(state)));
    let lattice = shared_lattice(&shared);
    out.insert("lattice.txt".to_string(), lattice_text(&lattice));
    out.insert("lattice.dot".to_string(), lattice_dot(&lattice));
    let report = conflict_report(log, examples, ReportOptions::default())?;
    out.insert("report.txt".to_string(), report.to_string());
    let mut json = serde_json::to_string_pretty(&report.to_json()).expect("plain data");
    json.push('\n');
    out.insert("report.json".to_string(), json);
    Ok(out)
}
