//! Running explorations against programmatic experts, and rendering the
//! resulting transcripts.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exploration::{AnswerKind, Exploration, QuestionRecord};
use crate::expert::Verdict;
use crate::simulated::SimulatedView;
use crate::system::SystemExploration;
use crate::universe::AttributeSet;

/// Anything that can answer "does `premise ⟹ attribute` hold?".
pub trait Expert: Sync {
    fn answer(&self, premise: &AttributeSet, attribute: &str) -> Result<Verdict>;
}

impl Expert for SimulatedView {
    fn answer(&self, premise: &AttributeSet, attribute: &str) -> Result<Verdict> {
        SimulatedView::answer(self, premise, attribute)
    }
}

/// One question actually put to an expert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub expert: String,
    pub premise: AttributeSet,
    pub attribute: String,
}

fn lookup<'a, E: Expert>(panel: &'a [(String, E)], id: &str) -> Result<&'a E> {
    panel
        .iter()
        .find(|(i, _)| i == id)
        .map(|(_, e)| e)
        .ok_or_else(|| Error::UnknownExpert(id.to_string()))
}

/// Answers the open question of `x` until it closes; experts answer in
/// group order, attributes in universe order.
fn answer_open<E: Expert>(x: &mut Exploration, panel: &[(String, E)], prompts: &mut Vec<Prompt>) -> Result<()> {
    while let Some(q) = x.question() {
        let (id, attrs) = q
            .outstanding
            .iter()
            .find(|(_, a)| !a.is_empty())
            .expect("an open question has outstanding attributes");
        let m = attrs.names().next().expect("non-empty").to_string();
        let verdict = lookup(panel, id)?.answer(&q.premise, &m)?;
        prompts.push(Prompt {
            expert: id.clone(),
            premise: q.premise.clone(),
            attribute: m.clone(),
        });
        x.submit(id, &m, verdict)?;
    }
    Ok(())
}

/// Runs a group exploration to the end, returning the prompts issued.
pub fn run_exploration<E: Expert>(x: &mut Exploration, panel: &[(String, E)]) -> Result<Vec<Prompt>> {
    let mut prompts = Vec::new();
    loop {
        answer_open(x, panel, &mut prompts)?;
        if x.next_question()?.is_none() {
            return Ok(prompts);
        }
    }
}

/// Runs every remaining subset. With `jobs > 1`, subsets of equal size
/// are explored concurrently from the same starting state and merged in
/// schedule order afterwards.
pub fn run_system<E: Expert>(sys: &mut SystemExploration, panel: &[(String, E)], jobs: usize) -> Result<Vec<Prompt>> {
    let mut prompts = Vec::new();
    if let Some(x) = sys.current.as_mut() {
        prompts.extend(run_exploration(x, panel)?);
        sys.complete_current()?;
    }
    if jobs <= 1 {
        while sys.next_question()?.is_some() {
            let x = sys.current.as_mut().expect("a question is open");
            answer_open(x, panel, &mut prompts)?;
        }
        return Ok(prompts);
    }
    loop {
        let level = sys.level()?;
        if level.is_empty() {
            return Ok(prompts);
        }
        let mut slots: Vec<Option<Result<(Exploration, Vec<Prompt>)>>> = (0..level.len()).map(|_| None).collect();
        let mut work: Vec<(usize, Exploration)> = level.into_iter().map(|(_, x)| x).enumerate().collect();
        let chunk = work.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            while !work.is_empty() {
                let batch: Vec<(usize, Exploration)> = work.drain(..chunk.min(work.len())).collect();
                handles.push(scope.spawn(move || {
                    batch
                        .into_iter()
                        .map(|(i, mut x)| (i, run_exploration(&mut x, panel).map(|p| (x, p))))
                        .collect::<Vec<_>>()
                }));
            }
            for h in handles {
                for (i, r) in h.join().expect("exploration thread panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        let mut done = Vec::with_capacity(slots.len());
        for slot in slots {
            let (x, p) = slot.expect("every subset ran")?;
            prompts.extend(p);
            done.push(x);
        }
        sys.absorb_level(done)?;
    }
}

fn mark(kind: AnswerKind) -> &'static str {
    match kind {
        AnswerKind::Yes => "x",
        AnswerKind::No => ".",
        AnswerKind::Unknown => "?",
    }
}

fn set_text(set: &AttributeSet) -> String {
    if set.is_empty() {
        "∅".to_string()
    } else {
        set.to_string()
    }
}

/// A table with one block per explored expert group: each question, then
/// one line per asked attribute with every expert's mark (`x` yes, `.` no,
/// `?` unknown, empty when not answered) and the counterexamples given.
pub fn render_transcript(experts: &[String], blocks: &[(Vec<String>, Vec<QuestionRecord>)]) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["experts".to_string(), "question".to_string()];
    header.extend(experts.iter().cloned());
    header.push("counterexamples".to_string());
    rows.push(header);
    let mut separators = Vec::new();
    for (members, records) in blocks {
        if records.is_empty() {
            continue;
        }
        separators.push(rows.len());
        for (k, rec) in records.iter().enumerate() {
            let mut head = vec![
                if k == 0 { members.join(", ") } else { String::new() },
                format!("{} → {} ?", set_text(&rec.premise), rec.asked),
            ];
            head.resize(experts.len() + 3, String::new());
            rows.push(head);
            for m in rec.asked.names() {
                let mut line = vec![String::new(), format!("  → ({m})")];
                let mut cxs = Vec::new();
                for e in experts {
                    let ans = rec.answers.iter().find(|a| &a.expert == e && a.attribute == m);
                    line.push(ans.map_or(String::new(), |a| mark(a.kind).to_string()));
                }
                for a in rec.answers.iter().filter(|a| a.attribute == m) {
                    if let Some(c) = &a.counterexample {
                        cxs.push(c.clone());
                    }
                }
                line.push(cxs.join(", "));
                rows.push(line);
            }
        }
    }
    let cols = experts.len() + 3;
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let rule: String = widths
        .iter()
        .map(|w| "-".repeat(*w))
        .collect::<Vec<_>>()
        .join("-+-");
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        if separators.contains(&i) {
            let _ = writeln!(out, "{rule}");
        }
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
    }
    out
}

/// Transcript blocks of a system run, in schedule order.
pub fn system_blocks(sys: &SystemExploration) -> Vec<(Vec<String>, Vec<QuestionRecord>)> {
    sys.results()
        .iter()
        .map(|r| (r.members.clone(), r.transcript.clone()))
        .collect()
}
