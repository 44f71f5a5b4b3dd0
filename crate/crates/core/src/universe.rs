//! Attribute universes and attribute sets.
//!
//! The creation order of a universe's names is its linear order, and every
//! lectic computation in the crate uses it.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

#[derive(Debug)]
struct UniverseInner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// An ordered, immutable list of distinct attribute names.
#[derive(Clone)]
pub struct AttributeUniverse(Arc<UniverseInner>);

impl AttributeUniverse {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let index = index_names(&names, "attribute")?;
        Ok(Self(Arc::new(UniverseInner { names, index })))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn empty_set(&self) -> AttributeSet {
        AttributeSet::from_bits(self.clone(), BitSet::empty(self.len()))
    }

    pub fn full_set(&self) -> AttributeSet {
        AttributeSet::from_bits(self.clone(), BitSet::full(self.len()))
    }

    /// Builds a set from attribute names.
    pub fn set<I, S>(&self, names: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = BitSet::empty(self.len());
        for n in names {
            bits.insert(self.index_of(n.as_ref())?);
        }
        Ok(AttributeSet::from_bits(self.clone(), bits))
    }

    pub fn ensure_same(&self, other: &AttributeUniverse) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }

    /// Space-separated names of the members of `bits`, in universe order.
    pub(crate) fn render(&self, bits: &BitSet) -> String {
        bits.iter()
            .map(|i| self.name(i))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl PartialEq for AttributeUniverse {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for AttributeUniverse {}

impl fmt::Debug for AttributeUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

pub(crate) fn index_names(names: &[String], kind: &'static str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(Error::EmptyName(kind));
        }
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::DuplicateName {
                kind,
                name: n.clone(),
            });
        }
    }
    Ok(index)
}

/// A subset of an attribute universe.
#[derive(Clone, PartialEq, Eq)]
pub struct AttributeSet {
    universe: AttributeUniverse,
    bits: BitSet,
}

impl AttributeSet {
    pub(crate) fn from_bits(universe: AttributeUniverse, bits: BitSet) -> Self {
        debug_assert_eq!(universe.len(), bits.capacity());
        Self { universe, bits }
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn contains(&self, name: &str) -> bool {
        self.universe
            .index_of(name)
            .map(|i| self.bits.contains(i))
            .unwrap_or(false)
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.bits.iter().map(|i| self.universe.name(i))
    }

    fn check(&self, other: &AttributeSet) -> Result<()> {
        self.universe.ensure_same(&other.universe)
    }

    pub fn union(&self, other: &AttributeSet) -> Result<AttributeSet> {
        self.check(other)?;
        Ok(Self::from_bits(self.universe.clone(), self.bits.union(&other.bits)))
    }

    pub fn intersection(&self, other: &AttributeSet) -> Result<AttributeSet> {
        self.check(other)?;
        Ok(Self::from_bits(
            self.universe.clone(),
            self.bits.intersection(&other.bits),
        ))
    }

    pub fn difference(&self, other: &AttributeSet) -> Result<AttributeSet> {
        self.check(other)?;
        Ok(Self::from_bits(
            self.universe.clone(),
            self.bits.difference(&other.bits),
        ))
    }

    pub fn is_subset(&self, other: &AttributeSet) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    pub fn lectic_cmp(&self, other: &AttributeSet) -> Result<Ordering> {
        self.check(other)?;
        Ok(self.bits.lectic_cmp(&other.bits))
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.universe.render(&self.bits))
    }
}

impl fmt::Debug for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.names()).finish()
    }
}
