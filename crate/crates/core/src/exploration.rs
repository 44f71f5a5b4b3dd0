//! Resumable exploration of the implications shared by one group of experts.
//!
//! The state machine alternates between `Advancing` (no question open) and
//! `Asking` (one premise `R` open, answers collected per expert and
//! attribute in any interleaving). Premises are visited in lectic order of
//! the sets closed under `accepted ∪ background`.

use crate::bitset::BitSet;
use crate::context::{CellValue, IncompleteContext};
use crate::error::{CounterexampleError, Error, Result};
use crate::expert::{artificial_counterexample, validate_bits, Counterexample, ExpertRef, Verdict};
use crate::implication::{next_closure_bits, Implication, ImplicationSet};
use crate::log::AnswerLog;
use crate::universe::{AttributeSet, AttributeUniverse};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Asking,
    Advancing,
    Done,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Asking => "asking",
            Phase::Advancing => "advancing",
            Phase::Done => "done",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        match s {
            "asking" => Some(Phase::Asking),
            "advancing" => Some(Phase::Advancing),
            "done" => Some(Phase::Done),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnswerKind {
    Yes,
    No,
    Unknown,
}

impl AnswerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnswerKind::Yes => "yes",
            AnswerKind::No => "no",
            AnswerKind::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<AnswerKind> {
        match s {
            "yes" => Some(AnswerKind::Yes),
            "no" => Some(AnswerKind::No),
            "unknown" => Some(AnswerKind::Unknown),
            _ => None,
        }
    }
}

/// One answer as it entered the exploration. `inferred` answers were
/// derived from the expert's earlier confirmations and never prompted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerRecord {
    pub expert: String,
    pub attribute: String,
    pub kind: AnswerKind,
    pub counterexample: Option<String>,
    pub inferred: bool,
}

/// A premise as asked: the attributes pending at ask time, the answers in
/// arrival order, and the implication accepted when it closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionRecord {
    pub premise: AttributeSet,
    pub asked: AttributeSet,
    pub answers: Vec<AnswerRecord>,
    pub accepted: Option<Implication>,
}

/// The open question as seen by clients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub premise: AttributeSet,
    pub pending: AttributeSet,
    /// Per expert, pending attributes still unanswered.
    pub outstanding: Vec<(String, AttributeSet)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Active {
    pub(crate) premise: BitSet,
    pub(crate) asked: BitSet,
    pub(crate) pending: BitSet,
    pub(crate) answered: Vec<BitSet>,
    pub(crate) yes: Vec<BitSet>,
}

/// What a submission did to the open question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Progress {
    Open,
    /// The question closed; carries the accepted implication, if any.
    Closed(Option<Implication>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplorationResult {
    pub accepted: ImplicationSet,
    pub examples: Vec<IncompleteContext>,
    pub log: AnswerLog,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exploration {
    pub(crate) universe: AttributeUniverse,
    pub(crate) experts: Vec<ExpertRef>,
    pub(crate) examples: Vec<IncompleteContext>,
    pub(crate) background: ImplicationSet,
    pub(crate) prior: Vec<ImplicationSet>,
    pub(crate) accepted: ImplicationSet,
    pub(crate) log: AnswerLog,
    pub(crate) current: BitSet,
    pub(crate) phase: Phase,
    pub(crate) active: Option<Active>,
    pub(crate) transcript: Vec<QuestionRecord>,
}

impl Exploration {
    /// Sets up an exploration at `R = background(∅)`; call
    /// [`next_question`](Self::next_question) to emit the first question.
    pub fn start(
        universe: AttributeUniverse,
        experts: Vec<ExpertRef>,
        examples: Vec<IncompleteContext>,
        background: ImplicationSet,
    ) -> Result<Self> {
        if experts.is_empty() {
            return Err(Error::EmptyGroup);
        }
        for (i, e) in experts.iter().enumerate() {
            if experts[..i].iter().any(|o| o.id == e.id) {
                return Err(Error::DuplicateExpert(e.id.clone()));
            }
        }
        if examples.len() != experts.len() {
            return Err(Error::UniverseMismatch);
        }
        for ctx in &examples {
            universe.ensure_same(ctx.universe())?;
        }
        universe.ensure_same(background.universe())?;
        let ids = experts.iter().map(|e| e.id.clone()).collect();
        let current = background.close_bits(&BitSet::empty(universe.len()));
        let phase = if current.is_full() {
            Phase::Done
        } else {
            Phase::Advancing
        };
        Ok(Self {
            prior: vec![ImplicationSet::new(universe.clone()); experts.len()],
            accepted: ImplicationSet::new(universe.clone()),
            log: AnswerLog::new(universe.clone(), ids),
            universe,
            experts,
            examples,
            background,
            current,
            phase,
            active: None,
            transcript: Vec::new(),
        })
    }

    /// Implications each expert confirmed before this exploration; answers
    /// they entail are filled in without prompting.
    pub fn with_confirmed(mut self, confirmed: Vec<ImplicationSet>) -> Result<Self> {
        if confirmed.len() != self.experts.len() {
            return Err(Error::UniverseMismatch);
        }
        for c in &confirmed {
            self.universe.ensure_same(c.universe())?;
        }
        self.prior = confirmed;
        Ok(self)
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn experts(&self) -> &[ExpertRef] {
        &self.experts
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    pub fn examples(&self) -> &[IncompleteContext] {
        &self.examples
    }

    pub fn background(&self) -> &ImplicationSet {
        &self.background
    }

    pub fn accepted(&self) -> &ImplicationSet {
        &self.accepted
    }

    pub fn log(&self) -> &AnswerLog {
        &self.log
    }

    pub fn transcript(&self) -> &[QuestionRecord] {
        &self.transcript
    }

    pub fn current_premise(&self) -> AttributeSet {
        self.set(self.current.clone())
    }

    fn set(&self, bits: BitSet) -> AttributeSet {
        AttributeSet::from_bits(self.universe.clone(), bits)
    }

    fn expert_index(&self, id: &str) -> Result<usize> {
        self.experts
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::UnknownExpert(id.to_string()))
    }

    /// Everything `expert` has confirmed: prior knowledge and × cells of this log.
    pub fn confirmed(&self, expert: usize) -> ImplicationSet {
        let mut out = self.prior[expert].clone();
        out.extend(&self.log.confirmed(expert)).expect("same universe");
        out
    }

    /// The open question, if any.
    pub fn question(&self) -> Option<Question> {
        let a = self.active.as_ref()?;
        Some(Question {
            premise: self.set(a.premise.clone()),
            pending: self.set(a.pending.clone()),
            outstanding: self
                .experts
                .iter()
                .zip(&a.answered)
                .map(|(e, done)| (e.id.clone(), self.set(a.pending.difference(done))))
                .collect(),
        })
    }

    fn pending_for(&self, premise: &BitSet) -> BitSet {
        let max = IncompleteContext::stacked_max_conclusion(&self.universe, &self.examples, premise);
        max.difference(premise)
    }

    fn closing_set(&self) -> ImplicationSet {
        self.accepted.union(&self.background).expect("same universe")
    }

    fn advance(&mut self) {
        let all = self.closing_set();
        match next_closure_bits(&self.current, &|x: &BitSet| all.close_bits(x)) {
            Some(next) => {
                self.current = next;
                self.phase = if self.current.is_full() {
                    Phase::Done
                } else {
                    Phase::Advancing
                };
            }
            None => self.phase = Phase::Done,
        }
    }

    /// Emits the next question, skipping premises with nothing to ask and
    /// questions fully answered by earlier confirmations. `None` when done.
    pub fn next_question(&mut self) -> Result<Option<Question>> {
        loop {
            match self.phase {
                Phase::Asking => return Err(Error::QuestionOutstanding),
                Phase::Done => return Ok(None),
                Phase::Advancing => {}
            }
            if self.current.is_full() {
                self.phase = Phase::Done;
                return Ok(None);
            }
            let pending = self.pending_for(&self.current);
            if pending.is_empty() {
                self.advance();
                continue;
            }
            self.open(pending);
            if self.is_complete() {
                self.close();
                continue;
            }
            self.phase = Phase::Asking;
            return Ok(self.question());
        }
    }

    fn open(&mut self, pending: BitSet) {
        let n = self.experts.len();
        let w = self.universe.len();
        for m in pending.iter() {
            self.log.ensure(&self.current, m);
        }
        self.active = Some(Active {
            premise: self.current.clone(),
            asked: pending.clone(),
            pending: pending.clone(),
            answered: vec![BitSet::empty(w); n],
            yes: vec![BitSet::empty(w); n],
        });
        self.transcript.push(QuestionRecord {
            premise: self.set(self.current.clone()),
            asked: self.set(pending.clone()),
            answers: Vec::new(),
            accepted: None,
        });
        for e in 0..n {
            let entailed = self.confirmed(e).close_bits(&self.current);
            for m in pending.intersection(&entailed).iter() {
                self.record_yes(e, m, true);
            }
        }
    }

    fn record_yes(&mut self, e: usize, m: usize, inferred: bool) {
        let a = self.active.as_mut().expect("question open");
        a.answered[e].insert(m);
        a.yes[e].insert(m);
        let premise = a.premise.clone();
        self.log.set(&premise, m, e, CellValue::Cross);
        self.push_answer(e, m, AnswerKind::Yes, None, inferred);
    }

    fn push_answer(&mut self, e: usize, m: usize, kind: AnswerKind, cx: Option<String>, inferred: bool) {
        let record = AnswerRecord {
            expert: self.experts[e].id.clone(),
            attribute: self.universe.name(m).to_string(),
            kind,
            counterexample: cx,
            inferred,
        };
        self.transcript.last_mut().expect("question open").answers.push(record);
    }

    fn is_complete(&self) -> bool {
        let a = self.active.as_ref().expect("question open");
        a.answered.iter().all(|done| a.pending.is_subset(done))
    }

    fn close(&mut self) {
        let a = self.active.take().expect("question open");
        let mut conclusion = a.premise.clone();
        for m in a.pending.iter() {
            if a.yes.iter().all(|y| y.contains(m)) {
                conclusion.insert(m);
            }
        }
        let accepted = (conclusion != a.premise).then(|| {
            let imp = Implication::from_bits(&self.universe, a.premise.clone(), conclusion);
            self.accepted.push(imp.clone()).expect("same universe");
            imp
        });
        self.transcript.last_mut().expect("question open").accepted = accepted;
        self.phase = Phase::Advancing;
        self.advance();
    }

    fn recompute(&mut self) -> Progress {
        let premise = self.active.as_ref().expect("question open").premise.clone();
        let pending = self.pending_for(&premise);
        self.active.as_mut().expect("question open").pending = pending;
        self.check_closed()
    }

    fn check_closed(&mut self) -> Progress {
        if !self.is_complete() {
            return Progress::Open;
        }
        self.close();
        Progress::Closed(self.transcript.last().and_then(|q| q.accepted.clone()))
    }

    /// Implications in `theory` that `row` certainly violates.
    fn refuted(&self, theory: &ImplicationSet, row: &crate::context::Row) -> Vec<String> {
        theory
            .iter()
            .filter(|imp| {
                imp.premise().bits().is_subset(row.certain())
                    && !imp.conclusion().bits().intersection(row.blanks()).is_empty()
            })
            .map(|imp| imp.normalized().to_string())
            .collect()
    }

    fn confirmed_or_given(&self, e: usize) -> ImplicationSet {
        let mut all = self.confirmed(e);
        all.extend(&self.closing_set()).expect("same universe");
        all
    }

    /// Submits an answer to the open question checking that `premise`
    /// still names it.
    pub fn submit_at(
        &mut self,
        expert: &str,
        premise: &AttributeSet,
        attribute: &str,
        verdict: Verdict,
    ) -> Result<Progress> {
        self.universe.ensure_same(premise.universe())?;
        match &self.active {
            Some(a) if &a.premise == premise.bits() => self.submit(expert, attribute, verdict),
            Some(_) => Err(Error::StalePremise),
            None => Err(Error::NoActiveQuestion),
        }
    }

    /// Records `expert`'s verdict on `R ⟹ attribute` for the open premise `R`.
    pub fn submit(&mut self, expert: &str, attribute: &str, verdict: Verdict) -> Result<Progress> {
        let Some(a) = &self.active else {
            return Err(Error::NoActiveQuestion);
        };
        let e = self.expert_index(expert)?;
        let m = self.universe.index_of(attribute)?;
        if a.premise.contains(m) {
            return Err(Error::AttributeInPremise(attribute.to_string()));
        }
        if a.answered[e].contains(m) {
            return Err(Error::DuplicateAnswer {
                expert: expert.to_string(),
                attribute: attribute.to_string(),
            });
        }
        if !a.pending.contains(m) {
            return Err(Error::AttributeNotPending(attribute.to_string()));
        }
        let premise = a.premise.clone();
        match verdict {
            Verdict::Yes => {
                self.record_yes(e, m, false);
                Ok(self.check_closed())
            }
            Verdict::No(cx) => {
                if cx.row.width() != self.universe.len() {
                    return Err(Error::UniverseMismatch);
                }
                validate_bits(&cx, &premise, m, &self.examples[e])?;
                let refuted = self.refuted(&self.confirmed_or_given(e), &cx.row);
                if !refuted.is_empty() {
                    return Err(CounterexampleError::ContradictsConfirmed(refuted).into());
                }
                self.examples[e] = self.examples[e].with_row(&cx.name, cx.row)?;
                let a = self.active.as_mut().expect("question open");
                a.answered[e].insert(m);
                self.log.set(&premise, m, e, CellValue::Blank);
                self.push_answer(e, m, AnswerKind::No, Some(cx.name), false);
                Ok(self.recompute())
            }
            Verdict::Unknown => {
                let cx = artificial_counterexample(&self.universe, &premise, m);
                self.examples[e] = self.examples[e].with_row(&cx.name, cx.row)?;
                let a = self.active.as_mut().expect("question open");
                a.answered[e].insert(m);
                self.log.ensure(&premise, m);
                self.push_answer(e, m, AnswerKind::Unknown, Some(cx.name), false);
                Ok(self.recompute())
            }
        }
    }

    /// Merges further examples of `expert` by supremum. An open question may
    /// lose pending attributes and close.
    pub fn add_examples(&mut self, expert: &str, ctx: &IncompleteContext) -> Result<Progress> {
        let e = self.expert_index(expert)?;
        self.universe.ensure_same(ctx.universe())?;
        let theory = self.confirmed_or_given(e);
        let refuted: Vec<String> = ctx
            .rows()
            .iter()
            .flat_map(|row| self.refuted(&theory, row))
            .collect();
        if !refuted.is_empty() {
            return Err(Error::ExamplesContradict(refuted));
        }
        self.examples[e] = self.examples[e].supremum(ctx)?;
        if self.active.is_some() {
            Ok(self.recompute())
        } else {
            Ok(Progress::Open)
        }
    }

    /// Accepted base, final examples and answer log.
    pub fn result(&self) -> Result<ExplorationResult> {
        if !self.is_done() {
            return Err(Error::NotDone);
        }
        Ok(self.snapshot())
    }

    /// The same triple as [`result`](Self::result), available in any phase.
    pub fn snapshot(&self) -> ExplorationResult {
        ExplorationResult {
            accepted: self.accepted.clone(),
            examples: self.examples.clone(),
            log: self.log.clone(),
        }
    }
}

/// Convenience for tests and drivers: a `NO` verdict from marks.
pub fn no(name: &str, row: crate::context::Row) -> Verdict {
    Verdict::No(Counterexample::new(name, row))
}
