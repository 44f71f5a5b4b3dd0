//! Listing of disagreements worth discussing after an exploration.

use std::fmt;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::context::{CellValue, IncompleteContext};
use crate::error::{Error, Result};
use crate::expert::is_artificial;
use crate::log::AnswerLog;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// A question counts as accepted by most experts when strictly more
    /// than this fraction confirmed it.
    pub majority: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { majority: 0.5 }
    }
}

/// A question refuted only through "I do not know".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArtificialOnly {
    pub question: String,
    pub experts: Vec<String>,
}

/// A question most, but not all, experts confirmed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MostlyAccepted {
    pub question: String,
    pub confirmed: Vec<String>,
    pub dissenting: Vec<String>,
}

/// One object-attribute pair that experts record differently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControversialCell {
    pub object: String,
    pub attribute: String,
    pub has: Vec<String>,
    pub lacks: Vec<String>,
}

/// An implication one expert confirmed and another refuted with a real object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Contradiction {
    pub confirming: String,
    pub refuting: String,
    pub question: String,
    pub counterexamples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ConflictReport {
    pub artificial_only: Vec<ArtificialOnly>,
    pub mostly_accepted: Vec<MostlyAccepted>,
    pub controversial_cells: Vec<ControversialCell>,
    pub contradictions: Vec<Contradiction>,
}

impl ConflictReport {
    pub fn is_empty(&self) -> bool {
        self.artificial_only.is_empty()
            && self.mostly_accepted.is_empty()
            && self.controversial_cells.is_empty()
            && self.contradictions.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

fn counterexamples(ctx: &IncompleteContext, premise: &BitSet, m: usize) -> (Vec<String>, Vec<String>) {
    let (mut real, mut artificial) = (Vec::new(), Vec::new());
    for (name, row) in ctx.objects().iter().zip(ctx.rows()) {
        if premise.is_subset(row.certain()) && row.blanks().contains(m) {
            if is_artificial(name) {
                artificial.push(name.clone());
            } else {
                real.push(name.clone());
            }
        }
    }
    (real, artificial)
}

/// Builds the report from the merged log and the experts' examples;
/// `examples[i]` belongs to the `i`-th expert of the log.
pub fn conflict_report(log: &AnswerLog, examples: &[IncompleteContext], options: ReportOptions) -> Result<ConflictReport> {
    let experts = log.experts();
    if examples.len() != experts.len() {
        return Err(Error::UniverseMismatch);
    }
    for ctx in examples {
        log.universe().ensure_same(ctx.universe())?;
    }
    let mut report = ConflictReport::default();
    let n = experts.len();

    for entry in log.entries() {
        let question = log.label(entry);
        let (p, m) = (entry.premise(), entry.attribute());
        let found: Vec<(Vec<String>, Vec<String>)> = examples.iter().map(|ctx| counterexamples(ctx, p, m)).collect();

        let holders: Vec<usize> = (0..n).filter(|&e| !found[e].0.is_empty() || !found[e].1.is_empty()).collect();
        if !holders.is_empty() && holders.iter().all(|&e| found[e].0.is_empty()) {
            report.artificial_only.push(ArtificialOnly {
                question: question.clone(),
                experts: holders.iter().map(|&e| experts[e].clone()).collect(),
            });
        }

        let confirmed: Vec<usize> = (0..n).filter(|&e| entry.cells()[e] == CellValue::Cross).collect();
        if confirmed.len() < n && confirmed.len() as f64 > options.majority * n as f64 {
            report.mostly_accepted.push(MostlyAccepted {
                question: question.clone(),
                confirmed: confirmed.iter().map(|&e| experts[e].clone()).collect(),
                dissenting: (0..n)
                    .filter(|e| !confirmed.contains(e))
                    .map(|e| experts[e].clone())
                    .collect(),
            });
        }

        for &i in &confirmed {
            for (j, (real, _)) in found.iter().enumerate() {
                if j != i && !real.is_empty() {
                    report.contradictions.push(Contradiction {
                        confirming: experts[i].clone(),
                        refuting: experts[j].clone(),
                        question: question.clone(),
                        counterexamples: real.clone(),
                    });
                }
            }
        }
    }

    // objects in first-seen order over the experts' contexts
    let mut objects: Vec<&str> = Vec::new();
    for ctx in examples {
        for name in ctx.objects() {
            if !objects.contains(&name.as_str()) {
                objects.push(name);
            }
        }
    }
    let universe = log.universe();
    for object in objects {
        for m in 0..universe.len() {
            let (mut has, mut lacks) = (Vec::new(), Vec::new());
            for (e, ctx) in examples.iter().enumerate() {
                match ctx.row(object).map(|r| r.get(m)) {
                    Some(CellValue::Cross) => has.push(experts[e].clone()),
                    Some(CellValue::Blank) => lacks.push(experts[e].clone()),
                    _ => {}
                }
            }
            if !has.is_empty() && !lacks.is_empty() {
                report.controversial_cells.push(ControversialCell {
                    object: object.to_string(),
                    attribute: universe.name(m).to_string(),
                    has,
                    lacks,
                });
            }
        }
    }
    Ok(report)
}

fn section<T>(f: &mut fmt::Formatter<'_>, title: &str, items: &[T], line: impl Fn(&T) -> String) -> fmt::Result {
    writeln!(f, "{title}")?;
    if items.is_empty() {
        writeln!(f, "  none")?;
    }
    for item in items {
        writeln!(f, "  {}", line(item))?;
    }
    Ok(())
}

impl fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        section(f, "(a) refuted only by unknown answers", &self.artificial_only, |x| {
            format!("{}  [{}]", x.question, x.experts.join(", "))
        })?;
        section(f, "(b) accepted by most experts", &self.mostly_accepted, |x| {
            format!(
                "{}  confirmed: {}; dissenting: {}",
                x.question,
                x.confirmed.join(", "),
                x.dissenting.join(", ")
            )
        })?;
        section(f, "(c) controversial object attributes", &self.controversial_cells, |x| {
            format!(
                "{} / {}  has: {}; lacks: {}",
                x.object,
                x.attribute,
                x.has.join(", "),
                x.lacks.join(", ")
            )
        })?;
        section(f, "(d) contradicting experts", &self.contradictions, |x| {
            format!(
                "{} confirmed {}, refuted by {} via {}",
                x.confirming,
                x.question,
                x.refuting,
                x.counterexamples.join(", ")
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::AttributeUniverse;

    fn setup() -> (AttributeUniverse, AnswerLog) {
        let u = AttributeUniverse::new(["18", "19", "20", "21", "22"]).unwrap();
        let log = AnswerLog::new(u.clone(), ["APP", "CON", "ORP", "SYS"].map(String::from).to_vec());
        (u, log)
    }

    #[test]
    fn majority_and_contradiction() {
        let (u, mut log) = setup();
        let p = u.set(["20", "21", "22"]).unwrap().bits().clone();
        for e in 0..3 {
            log.set(&p, 0, e, CellValue::Cross);
        }
        log.set(&p, 0, 3, CellValue::Blank);
        let empty = IncompleteContext::empty(u.clone());
        let sys = IncompleteContext::from_marks(u.clone(), &[("S31", "oxxxx")]).unwrap();
        let examples = vec![empty.clone(), empty.clone(), empty, sys];
        let r = conflict_report(&log, &examples, ReportOptions::default()).unwrap();
        assert_eq!(r.mostly_accepted.len(), 1);
        assert_eq!(r.mostly_accepted[0].dissenting, ["SYS"]);
        assert_eq!(r.contradictions.len(), 3);
        assert_eq!(r.contradictions[0].counterexamples, ["S31"]);
        assert!(r.artificial_only.is_empty() && r.controversial_cells.is_empty());
    }

    #[test]
    fn flipped_objects_and_artificial_refutations() {
        let (u, mut log) = setup();
        log.ensure(&BitSet::empty(5), 0);
        let a = IncompleteContext::from_marks(u.clone(), &[("X", "x????"), ("q:∅:18", "o????")]).unwrap();
        let b = IncompleteContext::from_marks(u.clone(), &[("X", "o????")]).unwrap();
        let empty = IncompleteContext::empty(u);
        let r = conflict_report(&log, &[a, b, empty.clone(), empty], ReportOptions::default()).unwrap();
        assert_eq!(r.controversial_cells.len(), 1);
        assert_eq!(r.controversial_cells[0].has, ["APP"]);
        // CON holds the real object X lacking 18, so the question is not only artificially refuted
        assert!(r.artificial_only.is_empty());
        let text = r.to_string();
        assert!(text.contains("(c) controversial object attributes\n  X / 18"));
    }

    #[test]
    fn single_expert_has_no_conflicts() {
        let u = AttributeUniverse::new(["a"]).unwrap();
        let mut log = AnswerLog::new(u.clone(), vec!["E".into()]);
        log.set(&BitSet::empty(1), 0, 0, CellValue::Cross);
        let r = conflict_report(&log, &[IncompleteContext::empty(u)], ReportOptions::default()).unwrap();
        assert!(r.is_empty());
        assert!(r.to_string().contains("none"));
    }
}
