//! Concept enumeration with NextClosure over `B ↦ B''`.

use crate::bitset::BitSet;
use crate::context::FormalContext;
use crate::implication::next_closure_bits;
use crate::universe::AttributeSet;

/// A formal concept `(extent, intent)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub extent: Vec<String>,
    pub intent: AttributeSet,
}

/// All concepts of `ctx`, in lectic order of their intents.
pub fn concepts(ctx: &FormalContext) -> Vec<Concept> {
    let close = |b: &BitSet| ctx.double_prime_bits(b);
    let mut out = Vec::new();
    let mut current = Some(close(&BitSet::empty(ctx.universe().len())));
    while let Some(intent) = current {
        current = next_closure_bits(&intent, &close);
        let extent = ctx.as_incomplete().certain_extent_bits(&intent);
        out.push(Concept {
            extent: ctx.as_incomplete().names_of(&extent),
            intent: AttributeSet::from_bits(ctx.universe().clone(), intent),
        });
    }
    out
}
