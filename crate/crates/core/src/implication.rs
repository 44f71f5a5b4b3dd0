//! Attribute implications, their closure operator and NextClosure.

use std::fmt;

use crate::bitset::BitSet;
use crate::context::{FormalContext, IncompleteContext};
use crate::error::{Error, Result};
use crate::universe::{AttributeSet, AttributeUniverse};

/// Default cap on `|M|` for [`ImplicationSet::models`].
pub const DEFAULT_MODEL_CAP: usize = 20;

/// `premise ⟹ conclusion` over one universe.
#[derive(Clone, PartialEq, Eq)]
pub struct Implication {
    premise: AttributeSet,
    conclusion: AttributeSet,
}

impl Implication {
    pub fn new(premise: AttributeSet, conclusion: AttributeSet) -> Result<Self> {
        premise.universe().ensure_same(conclusion.universe())?;
        Ok(Self {
            premise,
            conclusion,
        })
    }

    /// Builds an implication from attribute names.
    pub fn parse_names<S: AsRef<str>>(
        universe: &AttributeUniverse,
        premise: &[S],
        conclusion: &[S],
    ) -> Result<Self> {
        Self::new(
            universe.set(premise.iter().map(AsRef::as_ref))?,
            universe.set(conclusion.iter().map(AsRef::as_ref))?,
        )
    }

    pub(crate) fn from_bits(universe: &AttributeUniverse, premise: BitSet, conclusion: BitSet) -> Self {
        Self {
            premise: AttributeSet::from_bits(universe.clone(), premise),
            conclusion: AttributeSet::from_bits(universe.clone(), conclusion),
        }
    }

    pub fn premise(&self) -> &AttributeSet {
        &self.premise
    }

    pub fn conclusion(&self) -> &AttributeSet {
        &self.conclusion
    }

    pub fn universe(&self) -> &AttributeUniverse {
        self.premise.universe()
    }

    /// Display form `premise → conclusion \ premise`.
    pub fn normalized(&self) -> Implication {
        Self::from_bits(
            self.universe(),
            self.premise.bits().clone(),
            self.conclusion.bits().difference(self.premise.bits()),
        )
    }

    /// Whether `set` respects this implication (`A ⊄ T` or `B ⊆ T`).
    pub fn respected_by(&self, set: &AttributeSet) -> Result<bool> {
        self.universe().ensure_same(set.universe())?;
        Ok(self.respected_by_bits(set.bits()))
    }

    pub(crate) fn respected_by_bits(&self, set: &BitSet) -> bool {
        !self.premise.bits().is_subset(set) || self.conclusion.bits().is_subset(set)
    }

    /// Whether the implication holds in a formal context.
    pub fn holds_in(&self, ctx: &FormalContext) -> Result<bool> {
        self.universe().ensure_same(ctx.universe())?;
        Ok(ctx.intents().all(|row| self.respected_by_bits(row)))
    }

    /// Whether the implication is satisfiable in an incomplete context
    /// (`conclusion ⊆ premise^□◇`).
    pub fn satisfiable_in(&self, ctx: &IncompleteContext) -> Result<bool> {
        self.universe().ensure_same(ctx.universe())?;
        Ok(self
            .conclusion
            .bits()
            .is_subset(&ctx.max_conclusion_bits(self.premise.bits())))
    }
}

/// Free-function form of [`Implication::respected_by`].
pub fn respects(set: &AttributeSet, imp: &Implication) -> Result<bool> {
    imp.respected_by(set)
}

impl fmt::Display for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.normalized();
        let p = self.universe().render(n.premise.bits());
        let c = self.universe().render(n.conclusion.bits());
        if p.is_empty() {
            write!(f, "∅ → ({c})")
        } else {
            write!(f, "({p}) → ({c})")
        }
    }
}

impl fmt::Debug for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An ordered list of implications over one universe.
#[derive(Clone, PartialEq, Eq)]
pub struct ImplicationSet {
    universe: AttributeUniverse,
    items: Vec<Implication>,
}

impl fmt::Debug for ImplicationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.items).finish()
    }
}

impl ImplicationSet {
    pub fn new(universe: AttributeUniverse) -> Self {
        Self {
            universe,
            items: Vec::new(),
        }
    }

    pub fn from_implications<I>(universe: AttributeUniverse, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = Implication>,
    {
        let mut set = Self::new(universe);
        for imp in items {
            set.push(imp)?;
        }
        Ok(set)
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn push(&mut self, imp: Implication) -> Result<()> {
        self.universe.ensure_same(imp.universe())?;
        self.items.push(imp);
        Ok(())
    }

    pub fn extend(&mut self, other: &ImplicationSet) -> Result<()> {
        self.universe.ensure_same(&other.universe)?;
        self.items.extend(other.items.iter().cloned());
        Ok(())
    }

    pub fn union(&self, other: &ImplicationSet) -> Result<ImplicationSet> {
        let mut out = self.clone();
        out.extend(other)?;
        Ok(out)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Implication> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Normalized conclusions, trivial members and duplicates removed,
    /// first occurrence kept.
    pub fn normalized(&self) -> ImplicationSet {
        let mut out = ImplicationSet::new(self.universe.clone());
        for imp in &self.items {
            let n = imp.normalized();
            if !n.conclusion.is_empty() && !out.items.contains(&n) {
                out.items.push(n);
            }
        }
        out
    }

    /// Smallest superset of `set` respecting every implication.
    pub fn closure(&self, set: &AttributeSet) -> Result<AttributeSet> {
        self.universe.ensure_same(set.universe())?;
        Ok(AttributeSet::from_bits(
            self.universe.clone(),
            self.close_bits(set.bits()),
        ))
    }

    /// Round-based fixpoint: every round fires each applicable rule.
    pub(crate) fn close_bits(&self, set: &BitSet) -> BitSet {
        let mut x = set.clone();
        loop {
            let mut changed = false;
            for imp in &self.items {
                if imp.premise.bits().is_subset(&x) && !imp.conclusion.bits().is_subset(&x) {
                    x.union_with(imp.conclusion.bits());
                    changed = true;
                }
            }
            if !changed {
                return x;
            }
        }
    }

    pub fn follows(&self, imp: &Implication) -> Result<bool> {
        self.universe.ensure_same(imp.universe())?;
        Ok(self.follows_bits(imp.premise.bits(), imp.conclusion.bits()))
    }

    pub(crate) fn follows_bits(&self, premise: &BitSet, conclusion: &BitSet) -> bool {
        conclusion.is_subset(&self.close_bits(premise))
    }

    /// Whether both sets induce the same closure operator.
    pub fn equivalent(&self, other: &ImplicationSet) -> Result<bool> {
        self.universe.ensure_same(&other.universe)?;
        Ok(self.iter().all(|i| other.follows_bits(i.premise.bits(), i.conclusion.bits()))
            && other.iter().all(|i| self.follows_bits(i.premise.bits(), i.conclusion.bits())))
    }

    /// Every closed set, in lectic order, enumerated with NextClosure.
    pub fn models(&self) -> Result<Vec<AttributeSet>> {
        self.models_capped(DEFAULT_MODEL_CAP)
    }

    pub fn models_capped(&self, cap: usize) -> Result<Vec<AttributeSet>> {
        if self.universe.len() > cap {
            return Err(Error::EnumerationCap {
                size: self.universe.len(),
                cap,
            });
        }
        Ok(self
            .model_bits()
            .into_iter()
            .map(|b| AttributeSet::from_bits(self.universe.clone(), b))
            .collect())
    }

    pub(crate) fn model_bits(&self) -> Vec<BitSet> {
        let close = |x: &BitSet| self.close_bits(x);
        let mut out = Vec::new();
        let mut current = Some(close(&BitSet::empty(self.universe.len())));
        while let Some(a) = current {
            current = next_closure_bits(&a, &close);
            out.push(a);
        }
        out
    }
}

impl<'a> IntoIterator for &'a ImplicationSet {
    type Item = &'a Implication;
    type IntoIter = std::slice::Iter<'a, Implication>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Lectically next closed set after `set`, or `None` when `set` is the last.
///
/// `close` must be a closure operator on the universe of `set`.
pub fn next_closure<F>(set: &AttributeSet, close: F) -> Option<AttributeSet>
where
    F: Fn(&AttributeSet) -> AttributeSet,
{
    let universe = set.universe().clone();
    let bit_close = |b: &BitSet| close(&AttributeSet::from_bits(universe.clone(), b.clone())).bits().clone();
    next_closure_bits(set.bits(), &bit_close).map(|b| AttributeSet::from_bits(universe.clone(), b))
}

pub(crate) fn next_closure_bits<F>(set: &BitSet, close: &F) -> Option<BitSet>
where
    F: Fn(&BitSet) -> BitSet,
{
    let n = set.capacity();
    let mut a = set.clone();
    for i in (0..n).rev() {
        if a.contains(i) {
            a.remove(i);
        } else {
            let mut candidate = a.clone();
            candidate.insert(i);
            let b = close(&candidate);
            // b must add nothing below i
            let mut added = b.difference(&a);
            added.truncate_below(i);
            if added.is_empty() {
                return Some(b);
            }
        }
    }
    None
}
