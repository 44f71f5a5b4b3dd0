//! Canonical bases relative to background implications, and L-completions.

use std::collections::HashSet;

use crate::bitset::BitSet;
use crate::context::{FormalContext, IncompleteContext};
use crate::error::{Error, Result};
use crate::implication::{next_closure_bits, Implication, ImplicationSet};
use crate::universe::AttributeUniverse;

/// Prefix reserved for objects standing for models of a theory.
pub const MODEL_PREFIX: &str = "model:";

/// Label of an attribute set inside generated object names: names separated
/// by spaces, `∅` for the empty set.
pub(crate) fn set_label(universe: &AttributeUniverse, bits: &BitSet) -> String {
    if bits.is_empty() {
        "∅".to_string()
    } else {
        universe.render(bits)
    }
}

pub(crate) fn model_name(universe: &AttributeUniverse, bits: &BitSet) -> String {
    format!("{MODEL_PREFIX}{}", set_label(universe, bits))
}

/// Canonical base of `ctx` relative to `background`: one implication
/// `P → P''` per `background`-pseudo-intent `P`, premises in lectic order.
///
/// With an empty background this is the Duquenne–Guigues base.
pub fn relative_canonical_base(ctx: &FormalContext, background: &ImplicationSet) -> Result<ImplicationSet> {
    let universe = ctx.universe().clone();
    universe.ensure_same(background.universe())?;
    let violated: Vec<String> = background
        .iter()
        .filter(|imp| !imp.holds_in(ctx).unwrap_or(false))
        .map(ToString::to_string)
        .collect();
    if !violated.is_empty() {
        return Err(Error::BackgroundNotValid(violated));
    }

    let mut base = ImplicationSet::new(universe.clone());
    let mut all = background.clone();
    let mut current = Some(all.close_bits(&BitSet::empty(universe.len())));
    while let Some(premise) = current {
        let closed = ctx.double_prime_bits(&premise);
        if closed != premise {
            let imp = Implication::from_bits(&universe, premise.clone(), closed);
            base.push(imp.clone())?;
            all.push(imp)?;
        }
        current = next_closure_bits(&premise, &|x: &BitSet| all.close_bits(x));
    }
    Ok(base)
}

/// Duquenne–Guigues base of `ctx`.
pub fn canonical_base(ctx: &FormalContext) -> Result<ImplicationSet> {
    relative_canonical_base(ctx, &ImplicationSet::new(ctx.universe().clone()))
}

/// Checks `closure(L, g^□) ⊆ g^◇` for every object, naming the first violation.
pub fn check_satisfiable(ctx: &IncompleteContext, theory: &ImplicationSet) -> Result<()> {
    ctx.universe().ensure_same(theory.universe())?;
    for (name, row) in ctx.objects().iter().zip(ctx.rows()) {
        let forced = theory.close_bits(row.certain());
        if let Some(m) = forced.intersection(row.blanks()).iter().next() {
            return Err(Error::Unsatisfiable {
                object: name.clone(),
                attribute: ctx.universe().name(m).to_string(),
            });
        }
    }
    Ok(())
}

/// The L-completion: each object gets the row `closure(L, g^□)`, and one
/// object named `model:{attributes}` is added per model of `L` not yet
/// realized as a row.
pub fn l_completion(ctx: &IncompleteContext, theory: &ImplicationSet) -> Result<FormalContext> {
    check_satisfiable(ctx, theory)?;
    let universe = ctx.universe().clone();
    if universe.len() > crate::implication::DEFAULT_MODEL_CAP {
        return Err(Error::EnumerationCap {
            size: universe.len(),
            cap: crate::implication::DEFAULT_MODEL_CAP,
        });
    }
    let mut rows: Vec<(String, BitSet)> = ctx
        .objects()
        .iter()
        .zip(ctx.rows())
        .map(|(name, row)| (name.clone(), theory.close_bits(row.certain())))
        .collect();
    let realized: HashSet<BitSet> = rows.iter().map(|(_, b)| b.clone()).collect();
    for model in theory.model_bits() {
        if !realized.contains(&model) {
            rows.push((model_name(&universe, &model), model));
        }
    }
    FormalContext::from_bit_rows(universe, rows)
}

/// The context `(Mod L, M, ∋)` of a theory.
pub fn model_context(theory: &ImplicationSet) -> Result<FormalContext> {
    l_completion(&IncompleteContext::empty(theory.universe().clone()), theory)
}
