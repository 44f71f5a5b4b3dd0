//! The answer log: questions `R ⟹ m` against experts, with ×/o/? cells.

use std::collections::HashMap;

use crate::bitset::BitSet;
use crate::context::{CellValue, FormalContext, IncompleteContext, Row};
use crate::error::{CellConflict, Error, Result};
use crate::implication::{Implication, ImplicationSet};
use crate::universe::AttributeUniverse;

/// One logged question and the experts' cells for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub(crate) premise: BitSet,
    pub(crate) attribute: usize,
    pub(crate) cells: Vec<CellValue>,
}

impl LogEntry {
    pub fn premise(&self) -> &BitSet {
        &self.premise
    }

    pub fn attribute(&self) -> usize {
        self.attribute
    }

    pub fn cells(&self) -> &[CellValue] {
        &self.cells
    }

    pub(crate) fn conclusion(&self) -> BitSet {
        let mut c = self.premise.clone();
        c.insert(self.attribute);
        c
    }
}

/// Label of a question: `"19 21 -> 22"`, or `"-> 19"` for an empty premise.
pub fn question_label(universe: &AttributeUniverse, premise: &BitSet, m: usize) -> String {
    let p = universe.render(premise);
    if p.is_empty() {
        format!("-> {}", universe.name(m))
    } else {
        format!("{p} -> {}", universe.name(m))
    }
}

/// Context of asked questions against experts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerLog {
    universe: AttributeUniverse,
    experts: Vec<String>,
    entries: Vec<LogEntry>,
    index: HashMap<(BitSet, usize), usize>,
}

impl AnswerLog {
    pub fn new(universe: AttributeUniverse, experts: Vec<String>) -> Self {
        Self {
            universe,
            experts,
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn experts(&self) -> &[String] {
        &self.experts
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn expert_index(&self, id: &str) -> Result<usize> {
        self.experts
            .iter()
            .position(|e| e == id)
            .ok_or_else(|| Error::UnknownExpert(id.to_string()))
    }

    pub fn label(&self, entry: &LogEntry) -> String {
        question_label(&self.universe, &entry.premise, entry.attribute)
    }

    pub fn implication(&self, entry: &LogEntry) -> Implication {
        Implication::from_bits(&self.universe, entry.premise.clone(), entry.conclusion())
    }

    pub(crate) fn find(&self, premise: &BitSet, m: usize) -> Option<&LogEntry> {
        self.index.get(&(premise.clone(), m)).map(|i| &self.entries[*i])
    }

    /// Cell of `expert` for question `premise ⟹ attribute`, `Unknown` if never logged.
    pub fn cell(&self, premise: &crate::AttributeSet, attribute: &str, expert: &str) -> Result<CellValue> {
        self.universe.ensure_same(premise.universe())?;
        let m = self.universe.index_of(attribute)?;
        let e = self.expert_index(expert)?;
        Ok(self
            .find(premise.bits(), m)
            .map_or(CellValue::Unknown, |entry| entry.cells[e]))
    }

    /// Adds the question with all cells unknown if it is not logged yet.
    pub(crate) fn ensure(&mut self, premise: &BitSet, m: usize) -> usize {
        let key = (premise.clone(), m);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.entries.len();
        self.entries.push(LogEntry {
            premise: premise.clone(),
            attribute: m,
            cells: vec![CellValue::Unknown; self.experts.len()],
        });
        self.index.insert(key, i);
        i
    }

    pub(crate) fn push_entry(&mut self, entry: LogEntry) -> Result<()> {
        if entry.cells.len() != self.experts.len() {
            return Err(Error::UniverseMismatch);
        }
        let key = (entry.premise.clone(), entry.attribute);
        if self.index.contains_key(&key) {
            return Err(Error::DuplicateName {
                kind: "question",
                name: self.label(&entry),
            });
        }
        self.index.insert(key, self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub(crate) fn set(&mut self, premise: &BitSet, m: usize, expert: usize, value: CellValue) {
        let i = self.ensure(premise, m);
        self.entries[i].cells[expert] = value;
    }

    /// Implications `expert` confirmed (× cells), in log order.
    pub fn confirmed(&self, expert: usize) -> ImplicationSet {
        let mut out = ImplicationSet::new(self.universe.clone());
        for e in self.entries.iter().filter(|e| e.cells[expert] == CellValue::Cross) {
            out.push(self.implication(e)).expect("same universe");
        }
        out
    }

    /// Implications confirmed by every expert of `members` (`Ẽ^□` in the log).
    pub fn confirmed_by_all(&self, members: &[usize]) -> ImplicationSet {
        let mut out = ImplicationSet::new(self.universe.clone());
        for e in &self.entries {
            if members.iter().all(|&x| e.cells[x] == CellValue::Cross) {
                out.push(self.implication(e)).expect("same universe");
            }
        }
        out
    }

    /// Re-expresses the log over a larger expert list; missing experts get `?`.
    pub fn widen(&self, experts: &[String]) -> Result<AnswerLog> {
        let map: Vec<usize> = self
            .experts
            .iter()
            .map(|id| {
                experts
                    .iter()
                    .position(|e| e == id)
                    .ok_or_else(|| Error::UnknownExpert(id.clone()))
            })
            .collect::<Result<_>>()?;
        let mut out = AnswerLog::new(self.universe.clone(), experts.to_vec());
        for e in &self.entries {
            let mut cells = vec![CellValue::Unknown; experts.len()];
            for (from, &to) in map.iter().enumerate() {
                cells[to] = e.cells[from];
            }
            out.push_entry(LogEntry {
                premise: e.premise.clone(),
                attribute: e.attribute,
                cells,
            })?;
        }
        Ok(out)
    }

    /// The log as an incomplete context over questions × experts.
    pub fn to_context(&self) -> IncompleteContext {
        let experts = AttributeUniverse::new(self.experts.clone()).expect("expert ids are distinct");
        let rows = self
            .entries
            .iter()
            .map(|e| (self.label(e), Row::from_cells(&e.cells)));
        IncompleteContext::from_rows(experts, rows).expect("question labels are distinct")
    }
}

/// Cell-wise supremum of two logs, keyed by question; the second log may
/// cover a subset of the first's experts.
pub fn merge_log(base: &AnswerLog, other: &AnswerLog) -> Result<AnswerLog> {
    base.universe.ensure_same(&other.universe)?;
    let other = if other.experts == base.experts {
        other.clone()
    } else {
        other.widen(&base.experts)?
    };
    let mut out = base.clone();
    let mut conflicts = Vec::new();
    for entry in &other.entries {
        let i = out.ensure(&entry.premise, entry.attribute);
        for (x, v) in entry.cells.iter().enumerate() {
            match out.entries[i].cells[x].sup(*v) {
                Some(s) => out.entries[i].cells[x] = s,
                None => conflicts.push(CellConflict {
                    object: other.label(entry),
                    attribute: other.experts[x].clone(),
                }),
            }
        }
    }
    if conflicts.is_empty() {
        Ok(out)
    } else {
        Err(Error::Conflict(conflicts))
    }
}

/// The certain part of the context of shared implications: × cells only.
pub fn shared_context(log: &AnswerLog) -> FormalContext {
    let experts = AttributeUniverse::new(log.experts.clone()).expect("expert ids are distinct");
    let rows = log
        .entries
        .iter()
        .map(|e| {
            let crosses = BitSet::from_indices(
                e.cells.len(),
                e.cells
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c == CellValue::Cross)
                    .map(|(i, _)| i),
            );
            (log.label(e), crosses)
        })
        .collect();
    FormalContext::from_bit_rows(experts, rows).expect("question labels are distinct")
}
