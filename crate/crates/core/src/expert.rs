//! Experts, their verdicts, and counterexample validation.

use serde::{Deserialize, Serialize};

use crate::base::set_label;
use crate::bitset::BitSet;
use crate::context::{CellValue, IncompleteContext, Row};
use crate::error::{CellConflict, CounterexampleError};
use crate::universe::{AttributeSet, AttributeUniverse};

/// Prefix reserved for artificial counterexamples recording "I do not know".
pub const ARTIFICIAL_PREFIX: &str = "q:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpertRef {
    pub id: String,
    pub name: String,
}

impl ExpertRef {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Self {
            name: id.clone(),
            id,
        }
    }

    pub fn named(id: impl Into<String>, name: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
        }
    }
}

/// A named object row offered as a counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub name: String,
    pub row: Row,
}

impl Counterexample {
    pub fn new(name: impl Into<String>, row: Row) -> Self {
        Self {
            name: name.into(),
            row,
        }
    }
}

/// An expert's answer to "does `premise ⟹ m` hold?".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(Counterexample),
    Unknown,
}

/// Name of the artificial counterexample for `premise ⟹ m`.
pub fn artificial_name(universe: &AttributeUniverse, premise: &BitSet, m: usize) -> String {
    format!(
        "{ARTIFICIAL_PREFIX}{}:{}",
        set_label(universe, premise),
        universe.name(m)
    )
}

pub fn is_artificial(object: &str) -> bool {
    object.starts_with(ARTIFICIAL_PREFIX)
}

/// Premise attributes ×, `m` o, everything else ?.
pub(crate) fn artificial_counterexample(universe: &AttributeUniverse, premise: &BitSet, m: usize) -> Counterexample {
    let mut row = Row::unknown(universe.len());
    for a in premise.iter() {
        row.set(a, CellValue::Cross);
    }
    row.set(m, CellValue::Blank);
    Counterexample::new(artificial_name(universe, premise, m), row)
}

pub(crate) fn validate_bits(
    cx: &Counterexample,
    premise: &BitSet,
    m: usize,
    existing: &IncompleteContext,
) -> Result<(), CounterexampleError> {
    let universe = existing.universe();
    let missing = premise.difference(cx.row.certain());
    if !missing.is_empty() {
        return Err(CounterexampleError::PremiseNotCertain(
            missing.iter().map(|i| universe.name(i).to_string()).collect(),
        ));
    }
    if cx.row.get(m) != CellValue::Blank {
        return Err(CounterexampleError::AttributeNotRefuted(universe.name(m).to_string()));
    }
    if let Some(prior) = existing.row(&cx.name) {
        let clash = prior.clashes(&cx.row);
        if !clash.is_empty() {
            return Err(CounterexampleError::ConflictsWithPrior(
                clash
                    .iter()
                    .map(|i| CellConflict {
                        object: cx.name.clone(),
                        attribute: universe.name(i).to_string(),
                    })
                    .collect(),
            ));
        }
    }
    Ok(())
}

/// Checks that `cx` certainly has `premise`, certainly lacks `attribute`,
/// and agrees with any stored object of the same name.
pub fn validate_counterexample(
    cx: &Counterexample,
    premise: &AttributeSet,
    attribute: &str,
    existing: &IncompleteContext,
) -> crate::Result<()> {
    existing.universe().ensure_same(premise.universe())?;
    if cx.row.width() != existing.universe().len() {
        return Err(crate::Error::UniverseMismatch);
    }
    let m = existing.universe().index_of(attribute)?;
    validate_bits(cx, premise.bits(), m, existing)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (AttributeUniverse, IncompleteContext) {
        let u = AttributeUniverse::new(["18", "19", "20", "21", "22"]).unwrap();
        let ctx = IncompleteContext::from_marks(u.clone(), &[("A16", "xo?ox")]).unwrap();
        (u, ctx)
    }

    fn cx(name: &str, marks: &str) -> Counterexample {
        let cells: Vec<CellValue> = marks.chars().map(|c| CellValue::from_mark(c).unwrap()).collect();
        Counterexample::new(name, Row::from_cells(&cells))
    }

    #[test]
    fn accepts_a_proper_counterexample() {
        let (u, ctx) = setup();
        let r = u.set(["18", "22"]).unwrap();
        assert!(validate_counterexample(&cx("g", "xo??x"), &r, "19", &ctx).is_ok());
    }

    #[test]
    fn error_codes() {
        let (u, ctx) = setup();
        let r = u.set(["18", "22"]).unwrap();
        let e = validate_counterexample(&cx("g", "x???x"), &r, "19", &ctx).unwrap_err();
        assert_eq!(e.code(), "E_ATTRIBUTE_NOT_REFUTED");
        let e = validate_counterexample(&cx("g", "?o??x"), &r, "19", &ctx).unwrap_err();
        assert_eq!(e.code(), "E_PREMISE_NOT_CERTAIN");
        // stored A16 has 21=o; flipping it to x clashes
        let e = validate_counterexample(&cx("A16", "xo?xx"), &r, "19", &ctx).unwrap_err();
        assert_eq!(e.code(), "E_CONFLICTS_WITH_PRIOR");
    }

    #[test]
    fn artificial_rows() {
        let (u, _) = setup();
        let c = artificial_counterexample(&u, &BitSet::empty(5), 0);
        assert_eq!(c.name, "q:∅:18");
        assert_eq!(format!("{:?}", c.row), "Row(o????)");
        let p = u.set(["18", "22"]).unwrap();
        assert_eq!(artificial_name(&u, p.bits(), 1), "q:18 22:19");
        assert!(is_artificial("q:18 22:19"));
    }
}
