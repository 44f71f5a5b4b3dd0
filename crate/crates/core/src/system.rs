//! Exploration of the whole system of shared implications: one exploration
//! per expert subset, supersets first, each reusing what larger groups
//! already settled.

use std::cmp::Ordering;

use crate::bitset::BitSet;
use crate::context::{CellValue, FormalContext, IncompleteContext};
use crate::error::{Error, Result};
use crate::expert::{is_artificial, ExpertRef, Verdict};
use crate::exploration::{Exploration, Progress, Question, QuestionRecord};
use crate::formats::imp::parse_implication_line;
use crate::implication::ImplicationSet;
use crate::lattice::concepts;
use crate::log::{merge_log, AnswerLog};
use crate::universe::{AttributeSet, AttributeUniverse};

/// Largest expert set explored exhaustively.
pub const DEFAULT_SUBSET_CAP: usize = 8;

/// How subsets of equal size are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lexicographic on the sorted member ids.
    #[default]
    Lexicographic,
    /// The reverse of [`TieBreak::Lexicographic`].
    ReverseLexicographic,
}

/// An order of expert subsets in which every superset precedes its subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSchedule {
    experts: Vec<String>,
    subsets: Vec<Vec<usize>>,
}

fn cmp_ids(experts: &[String], a: &[usize], b: &[usize]) -> Ordering {
    let key = |s: &[usize]| {
        let mut ids: Vec<&str> = s.iter().map(|&i| experts[i].as_str()).collect();
        ids.sort_unstable();
        ids
    };
    key(a).cmp(&key(b))
}

impl SubsetSchedule {
    /// All non-empty subsets by decreasing size, ties broken by `tie`.
    pub fn full(experts: &[String], tie: TieBreak) -> Result<Self> {
        Self::full_capped(experts, tie, DEFAULT_SUBSET_CAP)
    }

    pub fn full_capped(experts: &[String], tie: TieBreak, cap: usize) -> Result<Self> {
        check_ids(experts)?;
        if experts.len() > cap {
            return Err(Error::SubsetCap {
                count: experts.len(),
                cap,
            });
        }
        let n = experts.len();
        let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
        subsets.sort_by(|a, b| {
            b.len().cmp(&a.len()).then_with(|| match tie {
                TieBreak::Lexicographic => cmp_ids(experts, a, b),
                TieBreak::ReverseLexicographic => cmp_ids(experts, b, a),
            })
        });
        Ok(Self {
            experts: experts.to_vec(),
            subsets,
        })
    }

    /// A user-chosen list of subsets; must respect `⊇`.
    pub fn custom(experts: &[String], subsets: &[Vec<String>]) -> Result<Self> {
        check_ids(experts)?;
        let mut out = Vec::with_capacity(subsets.len());
        for s in subsets {
            if s.is_empty() {
                return Err(Error::InvalidSchedule("empty subset".into()));
            }
            let mut idx = Vec::with_capacity(s.len());
            for id in s {
                let i = experts
                    .iter()
                    .position(|e| e == id)
                    .ok_or_else(|| Error::UnknownExpert(id.clone()))?;
                if idx.contains(&i) {
                    return Err(Error::InvalidSchedule(format!("expert {id:?} listed twice in a subset")));
                }
                idx.push(i);
            }
            idx.sort_unstable();
            if out.contains(&idx) {
                return Err(Error::InvalidSchedule(format!("subset {{{}}} listed twice", s.join(", "))));
            }
            out.push(idx);
        }
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                if a.len() < b.len() && a.iter().all(|x| b.contains(x)) {
                    return Err(Error::InvalidSchedule(format!(
                        "subset {{{}}} precedes its superset {{{}}}",
                        names(experts, a).join(", "),
                        names(experts, b).join(", ")
                    )));
                }
            }
        }
        Ok(Self {
            experts: experts.to_vec(),
            subsets: out,
        })
    }

    pub fn experts(&self) -> &[String] {
        &self.experts
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Member indices of each subset, ascending.
    pub fn indices(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// Member ids of each subset, in expert order.
    pub fn subsets(&self) -> Vec<Vec<String>> {
        self.subsets.iter().map(|s| names(&self.experts, s)).collect()
    }
}

fn check_ids(experts: &[String]) -> Result<()> {
    if experts.is_empty() {
        return Err(Error::EmptyGroup);
    }
    for (i, e) in experts.iter().enumerate() {
        if experts[..i].contains(e) {
            return Err(Error::DuplicateExpert(e.clone()));
        }
    }
    Ok(())
}

fn names(experts: &[String], idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| experts[i].clone()).collect()
}

fn member_indices(log: &AnswerLog, subset: &[String]) -> Result<Vec<usize>> {
    subset.iter().map(|id| log.expert_index(id)).collect()
}

/// Implications every member of `subset` confirmed in `log`.
pub fn background_for(log: &AnswerLog, subset: &[String]) -> Result<ImplicationSet> {
    if subset.is_empty() {
        return Err(Error::EmptyGroup);
    }
    Ok(log.confirmed_by_all(&member_indices(log, subset)?))
}

fn has_real_counterexample(ctx: &IncompleteContext, premise: &BitSet, m: usize) -> bool {
    ctx.objects()
        .iter()
        .zip(ctx.rows())
        .any(|(name, row)| !is_artificial(name) && premise.is_subset(row.certain()) && row.blanks().contains(m))
}

/// Fills `?` cells of the log: `×` when the expert's confirmed
/// implications entail the question, `o` when the expert holds a real
/// counterexample. Artificial counterexamples never settle a cell.
///
/// `examples[i]` belongs to the `i`-th expert of the log.
pub fn question_reduce(log: &AnswerLog, examples: &[IncompleteContext]) -> Result<AnswerLog> {
    if examples.len() != log.experts().len() {
        return Err(Error::UniverseMismatch);
    }
    for ctx in examples {
        log.universe().ensure_same(ctx.universe())?;
    }
    let mut out = log.clone();
    loop {
        let mut changed = false;
        for e in 0..out.experts().len() {
            let confirmed = out.confirmed(e);
            let updates: Vec<(BitSet, usize, CellValue)> = out
                .entries()
                .iter()
                .filter(|entry| entry.cells()[e] == CellValue::Unknown)
                .filter_map(|entry| {
                    let (p, m) = (entry.premise(), entry.attribute());
                    let entailed = confirmed.close_bits(p).contains(m);
                    let refuted = has_real_counterexample(&examples[e], p, m);
                    match (entailed, refuted) {
                        (true, false) => Some((p.clone(), m, CellValue::Cross)),
                        (false, true) => Some((p.clone(), m, CellValue::Blank)),
                        _ => None,
                    }
                })
                .collect();
            for (p, m, v) in updates {
                out.set(&p, m, e, v);
                changed = true;
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}

/// A concept of the context of shared implications: the expert set and the
/// questions certified for all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedConcept {
    pub experts: Vec<String>,
    pub generators: Vec<String>,
}

impl SharedConcept {
    /// The generators read back as implications over `universe`.
    pub fn implications(&self, universe: &AttributeUniverse) -> Result<ImplicationSet> {
        let mut out = ImplicationSet::new(universe.clone());
        for (i, label) in self.generators.iter().enumerate() {
            out.push(parse_implication_line(universe, label, i + 1)?)?;
        }
        Ok(out)
    }
}

/// Concepts of the (certain) context of shared implications, in lectic
/// order of their expert sets.
pub fn shared_lattice(shared: &FormalContext) -> Vec<SharedConcept> {
    concepts(shared)
        .into_iter()
        .map(|c| SharedConcept {
            experts: c.intent.names().map(str::to_string).collect(),
            generators: c.extent,
        })
        .collect()
}

fn is_strict_subset(a: &[String], b: &[String]) -> bool {
    a.len() < b.len() && a.iter().all(|x| b.contains(x))
}

/// Indices `(upper, lower)` of covering pairs; the upper concept has fewer
/// experts and more generators.
pub fn lattice_covers(concepts: &[SharedConcept]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, a) in concepts.iter().enumerate() {
        for (j, b) in concepts.iter().enumerate() {
            if is_strict_subset(&a.experts, &b.experts)
                && !concepts
                    .iter()
                    .any(|c| is_strict_subset(&a.experts, &c.experts) && is_strict_subset(&c.experts, &b.experts))
            {
                out.push((i, j));
            }
        }
    }
    out
}

/// Generators whose object concept is `concepts[i]`: those not held by any
/// concept with more experts.
pub fn own_generators(concepts: &[SharedConcept], i: usize) -> Vec<&str> {
    let c = &concepts[i];
    c.generators
        .iter()
        .filter(|g| {
            !concepts
                .iter()
                .any(|d| is_strict_subset(&c.experts, &d.experts) && d.generators.contains(g))
        })
        .map(String::as_str)
        .collect()
}

fn expert_label(experts: &[String]) -> String {
    format!("{{{}}}", experts.join(", "))
}

/// One block per concept: its expert set, then every generator.
pub fn lattice_text(concepts: &[SharedConcept]) -> String {
    let mut out = String::new();
    for (i, c) in concepts.iter().enumerate() {
        out.push_str(&format!("concept {i}: experts {}\n", expert_label(&c.experts)));
        for g in &c.generators {
            out.push_str(&format!("  {g}\n"));
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Hasse diagram in DOT; nodes carry their expert set and the generators
/// introduced there.
pub fn lattice_dot(concepts: &[SharedConcept]) -> String {
    let mut out = String::from("digraph shared {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, c) in concepts.iter().enumerate() {
        let mut label = dot_escape(&expert_label(&c.experts));
        for g in own_generators(concepts, i) {
            label.push_str("\\n");
            label.push_str(&dot_escape(g));
        }
        out.push_str(&format!("  c{i} [label=\"{}\"];\n", label));
    }
    for (a, b) in lattice_covers(concepts) {
        out.push_str(&format!("  c{a} -> c{b};\n"));
    }
    out.push_str("}\n");
    out
}

/// Outcome of one subset exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetResult {
    pub members: Vec<String>,
    pub background: ImplicationSet,
    pub accepted: ImplicationSet,
    pub transcript: Vec<QuestionRecord>,
}

/// Resumable exploration over a [`SubsetSchedule`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemExploration {
    pub(crate) universe: AttributeUniverse,
    pub(crate) experts: Vec<ExpertRef>,
    pub(crate) examples: Vec<IncompleteContext>,
    pub(crate) log: AnswerLog,
    pub(crate) schedule: SubsetSchedule,
    pub(crate) position: usize,
    pub(crate) current: Option<Exploration>,
    pub(crate) results: Vec<SubsetResult>,
}

impl SystemExploration {
    /// `log` carries answers from earlier runs; it must be over the same
    /// experts, in the same order.
    pub fn start(
        universe: AttributeUniverse,
        experts: Vec<ExpertRef>,
        examples: Vec<IncompleteContext>,
        log: Option<AnswerLog>,
        schedule: SubsetSchedule,
    ) -> Result<Self> {
        let ids: Vec<String> = experts.iter().map(|e| e.id.clone()).collect();
        check_ids(&ids)?;
        if schedule.experts() != ids.as_slice() || examples.len() != ids.len() {
            return Err(Error::InvalidSchedule("schedule experts differ from the session's".into()));
        }
        for ctx in &examples {
            universe.ensure_same(ctx.universe())?;
        }
        let log = match log {
            Some(l) => {
                universe.ensure_same(l.universe())?;
                if l.experts() != ids.as_slice() {
                    return Err(Error::InvalidSchedule("log experts differ from the session's".into()));
                }
                l
            }
            None => AnswerLog::new(universe.clone(), ids),
        };
        Ok(Self {
            universe,
            experts,
            examples,
            log,
            schedule,
            position: 0,
            current: None,
            results: Vec::new(),
        })
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn experts(&self) -> &[ExpertRef] {
        &self.experts
    }

    pub fn schedule(&self) -> &SubsetSchedule {
        &self.schedule
    }

    /// Index of the subset being (or about to be) explored.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn examples(&self) -> &[IncompleteContext] {
        &self.examples
    }

    pub fn log(&self) -> &AnswerLog {
        &self.log
    }

    pub fn results(&self) -> &[SubsetResult] {
        &self.results
    }

    pub fn exploration(&self) -> Option<&Exploration> {
        self.current.as_ref()
    }

    pub fn is_done(&self) -> bool {
        self.current.is_none() && self.position >= self.schedule.len()
    }

    pub fn current_subset(&self) -> Option<Vec<String>> {
        self.schedule
            .indices()
            .get(self.position)
            .map(|s| names(self.schedule.experts(), s))
    }

    /// The exploration for the subset at schedule position `pos`, seeded
    /// from the present state of the system.
    fn exploration_for(&self, pos: usize) -> Result<Exploration> {
        let members = &self.schedule.indices()[pos];
        let ids = names(self.schedule.experts(), members);
        let background = background_for(&self.log, &ids)?;
        let experts = members.iter().map(|&i| self.experts[i].clone()).collect();
        let examples = members.iter().map(|&i| self.examples[i].clone()).collect();
        let confirmed = members.iter().map(|&i| self.log.confirmed(i)).collect();
        Exploration::start(self.universe.clone(), experts, examples, background)?.with_confirmed(confirmed)
    }

    /// Merges a finished subset exploration into the examples and the log,
    /// then `?`-reduces.
    fn absorb(&mut self, pos: usize, done: Exploration) -> Result<()> {
        let members = self.schedule.indices()[pos].clone();
        let snap = done.snapshot();
        for (k, &i) in members.iter().enumerate() {
            self.examples[i] = self.examples[i].supremum(&snap.examples[k])?;
        }
        let merged = merge_log(&self.log, &snap.log)?;
        self.log = question_reduce(&merged, &self.examples)?;
        self.results.push(SubsetResult {
            members: names(self.schedule.experts(), &members),
            background: done.background().clone(),
            accepted: snap.accepted,
            transcript: done.transcript().to_vec(),
        });
        Ok(())
    }

    /// The next question of the running subset exploration, moving on to
    /// later subsets as explorations finish. Returns the subset with it.
    pub fn next_question(&mut self) -> Result<Option<(Vec<String>, Question)>> {
        loop {
            if self.current.is_none() {
                if self.position >= self.schedule.len() {
                    return Ok(None);
                }
                self.current = Some(self.exploration_for(self.position)?);
            }
            let x = self.current.as_mut().expect("running");
            if let Some(q) = x.question() {
                return Ok(Some((self.current_subset().expect("running"), q)));
            }
            if let Some(q) = x.next_question()? {
                return Ok(Some((self.current_subset().expect("running"), q)));
            }
            let done = self.current.take().expect("running");
            let pos = self.position;
            self.absorb(pos, done)?;
            self.position += 1;
        }
    }

    /// Merges the running exploration once it is done.
    pub(crate) fn complete_current(&mut self) -> Result<()> {
        if self.current.as_ref().is_some_and(Exploration::is_done) {
            let done = self.current.take().expect("running");
            let pos = self.position;
            self.absorb(pos, done)?;
            self.position += 1;
        }
        Ok(())
    }

    pub fn submit(&mut self, expert: &str, attribute: &str, verdict: Verdict) -> Result<Progress> {
        self.current
            .as_mut()
            .ok_or(Error::NoActiveQuestion)?
            .submit(expert, attribute, verdict)
    }

    pub fn submit_at(
        &mut self,
        expert: &str,
        premise: &AttributeSet,
        attribute: &str,
        verdict: Verdict,
    ) -> Result<Progress> {
        self.current
            .as_mut()
            .ok_or(Error::NoActiveQuestion)?
            .submit_at(expert, premise, attribute, verdict)
    }

    /// Merges further examples for `expert`, into the running exploration
    /// if the expert takes part in it.
    pub fn add_examples(&mut self, expert: &str, ctx: &IncompleteContext) -> Result<Progress> {
        if let Some(x) = self.current.as_mut() {
            if x.experts().iter().any(|e| e.id == expert) {
                return x.add_examples(expert, ctx);
            }
        }
        let e = self.log.expert_index(expert)?;
        self.universe.ensure_same(ctx.universe())?;
        let confirmed = self.log.confirmed(e);
        let refuted: Vec<String> = confirmed
            .iter()
            .filter(|imp| {
                ctx.rows().iter().any(|row| {
                    imp.premise().bits().is_subset(row.certain())
                        && !imp.conclusion().bits().intersection(row.blanks()).is_empty()
                })
            })
            .map(|imp| imp.normalized().to_string())
            .collect();
        if !refuted.is_empty() {
            return Err(Error::ExamplesContradict(refuted));
        }
        self.examples[e] = self.examples[e].supremum(ctx)?;
        self.log = question_reduce(&self.log, &self.examples)?;
        Ok(Progress::Open)
    }

    /// Fresh explorations for the run of equal-size subsets starting at the
    /// current position, all seeded from the same state. Only valid between
    /// subsets; pair with [`absorb_level`](Self::absorb_level).
    pub fn level(&self) -> Result<Vec<(Vec<String>, Exploration)>> {
        if self.current.is_some() {
            return Err(Error::QuestionOutstanding);
        }
        let idx = self.schedule.indices();
        let Some(first) = idx.get(self.position) else {
            return Ok(Vec::new());
        };
        let size = first.len();
        (self.position..idx.len())
            .take_while(|&p| idx[p].len() == size)
            .map(|p| Ok((names(self.schedule.experts(), &idx[p]), self.exploration_for(p)?)))
            .collect()
    }

    /// Merges finished explorations returned by [`level`](Self::level), in
    /// schedule order.
    pub fn absorb_level(&mut self, explorations: Vec<Exploration>) -> Result<()> {
        if self.current.is_some() {
            return Err(Error::QuestionOutstanding);
        }
        for x in explorations {
            if !x.is_done() {
                return Err(Error::NotDone);
            }
            let pos = self.position;
            self.absorb(pos, x)?;
            self.position += 1;
        }
        Ok(())
    }

    /// The certain context of shared implications.
    pub fn shared_context(&self) -> FormalContext {
        crate::log::shared_context(&self.log)
    }

    pub fn shared_lattice(&self) -> Vec<SharedConcept> {
        shared_lattice(&self.shared_context())
    }
}
