//! Deterministic expert oracles built from a view `(context, theory)`.

use crate::base::{check_satisfiable, model_name};
use crate::context::{IncompleteContext, Row};
use crate::error::{Error, Result};
use crate::expert::{Counterexample, Verdict};
use crate::implication::ImplicationSet;
use crate::universe::AttributeSet;

/// An expert's view. In complete mode the theory is taken to be the whole
/// truth, so every non-entailed attribute gets a witness and `UNKNOWN` is
/// never answered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatedView {
    context: IncompleteContext,
    theory: ImplicationSet,
    complete: bool,
}

impl SimulatedView {
    /// A partial view; fails if the theory forces an attribute some object
    /// certainly lacks.
    pub fn partial(context: IncompleteContext, theory: ImplicationSet) -> Result<Self> {
        check_satisfiable(&context, &theory)?;
        Ok(Self {
            context,
            theory,
            complete: false,
        })
    }

    pub fn complete(context: IncompleteContext, theory: ImplicationSet) -> Result<Self> {
        Ok(Self {
            complete: true,
            ..Self::partial(context, theory)?
        })
    }

    /// A complete view given by its theory alone.
    pub fn from_theory(theory: ImplicationSet) -> Self {
        Self {
            context: IncompleteContext::empty(theory.universe().clone()),
            theory,
            complete: true,
        }
    }

    pub fn context(&self) -> &IncompleteContext {
        &self.context
    }

    pub fn theory(&self) -> &ImplicationSet {
        &self.theory
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Answers `premise ⟹ attribute`: `YES` if entailed, else the first
    /// stored counterexample, else a model witness (complete mode) or
    /// `UNKNOWN`.
    pub fn answer(&self, premise: &AttributeSet, attribute: &str) -> Result<Verdict> {
        let universe = self.theory.universe();
        universe.ensure_same(premise.universe())?;
        let m = universe.index_of(attribute)?;
        if premise.contains_index(m) {
            return Err(Error::AttributeInPremise(attribute.to_string()));
        }
        let closed = self.theory.close_bits(premise.bits());
        if closed.contains(m) {
            return Ok(Verdict::Yes);
        }
        let stored = self
            .context
            .objects()
            .iter()
            .zip(self.context.rows())
            .find(|(_, row)| premise.bits().is_subset(row.certain()) && row.blanks().contains(m));
        if let Some((name, row)) = stored {
            return Ok(Verdict::No(Counterexample::new(name.clone(), row.clone())));
        }
        if self.complete {
            let name = model_name(universe, &closed);
            return Ok(Verdict::No(Counterexample::new(name, Row::formal(closed))));
        }
        Ok(Verdict::Unknown)
    }
}
