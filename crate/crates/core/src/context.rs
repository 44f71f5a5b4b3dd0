//! Formal and incomplete (three-valued) contexts.

use std::collections::HashMap;
use std::fmt;

use crate::bitset::BitSet;
use crate::error::{CellConflict, Error, Result};
use crate::universe::{index_names, AttributeSet, AttributeUniverse};

/// Incidence value of an incomplete context.
///
/// In the information order `Unknown` lies below both `Cross` and `Blank`,
/// which are incomparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellValue {
    Cross,
    Blank,
    Unknown,
}

impl CellValue {
    pub fn info_leq(self, other: CellValue) -> bool {
        self == other || self == CellValue::Unknown
    }

    /// Least upper bound in the information order, `None` for × against o.
    pub fn sup(self, other: CellValue) -> Option<CellValue> {
        match (self, other) {
            (a, b) if a == b => Some(a),
            (CellValue::Unknown, b) => Some(b),
            (a, CellValue::Unknown) => Some(a),
            _ => None,
        }
    }

    /// Symbol used by the session format.
    pub fn mark(self) -> char {
        match self {
            CellValue::Cross => 'x',
            CellValue::Blank => 'o',
            CellValue::Unknown => '?',
        }
    }

    pub fn from_mark(c: char) -> Option<CellValue> {
        match c {
            'x' => Some(CellValue::Cross),
            'o' => Some(CellValue::Blank),
            '?' => Some(CellValue::Unknown),
            _ => None,
        }
    }
}

/// One object's row (the cross and blank sets are disjoint; the rest is unknown).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Row {
    crosses: BitSet,
    blanks: BitSet,
}

impl Row {
    pub fn unknown(width: usize) -> Self {
        Self {
            crosses: BitSet::empty(width),
            blanks: BitSet::empty(width),
        }
    }

    /// A complete row having exactly `crosses`.
    pub fn formal(crosses: BitSet) -> Self {
        let mut blanks = BitSet::full(crosses.capacity());
        blanks.difference_with(&crosses);
        Self { crosses, blanks }
    }

    pub fn from_cells(cells: &[CellValue]) -> Self {
        let mut r = Self::unknown(cells.len());
        for (i, c) in cells.iter().enumerate() {
            r.set(i, *c);
        }
        r
    }

    pub fn width(&self) -> usize {
        self.crosses.capacity()
    }

    pub fn get(&self, i: usize) -> CellValue {
        if self.crosses.contains(i) {
            CellValue::Cross
        } else if self.blanks.contains(i) {
            CellValue::Blank
        } else {
            CellValue::Unknown
        }
    }

    pub fn set(&mut self, i: usize, v: CellValue) {
        self.crosses.remove(i);
        self.blanks.remove(i);
        match v {
            CellValue::Cross => self.crosses.insert(i),
            CellValue::Blank => self.blanks.insert(i),
            CellValue::Unknown => {}
        }
    }

    pub fn cells(&self) -> Vec<CellValue> {
        (0..self.width()).map(|i| self.get(i)).collect()
    }

    /// Attributes the object certainly has (`g^□`).
    pub fn certain(&self) -> &BitSet {
        &self.crosses
    }

    pub fn blanks(&self) -> &BitSet {
        &self.blanks
    }

    /// Attributes the object possibly has (`g^◇`).
    pub fn possible(&self) -> BitSet {
        let mut p = BitSet::full(self.width());
        p.difference_with(&self.blanks);
        p
    }

    pub fn is_complete(&self) -> bool {
        self.crosses.count() + self.blanks.count() == self.width()
    }

    pub fn info_leq(&self, other: &Row) -> bool {
        self.crosses.is_subset(&other.crosses) && self.blanks.is_subset(&other.blanks)
    }

    /// Indices where one row has × and the other o.
    pub fn clashes(&self, other: &Row) -> BitSet {
        let mut a = self.crosses.intersection(&other.blanks);
        a.union_with(&self.blanks.intersection(&other.crosses));
        a
    }

    pub fn sup(&self, other: &Row) -> Option<Row> {
        if !self.clashes(other).is_empty() {
            return None;
        }
        Some(Row {
            crosses: self.crosses.union(&other.crosses),
            blanks: self.blanks.union(&other.blanks),
        })
    }
}

impl fmt::Debug for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.cells().into_iter().map(CellValue::mark).collect();
        write!(f, "Row({s})")
    }
}

/// A three-valued context `G × M → {×, o, ?}`.
#[derive(Clone)]
pub struct IncompleteContext {
    universe: AttributeUniverse,
    objects: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Row>,
}

impl PartialEq for IncompleteContext {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.objects == other.objects && self.rows == other.rows
    }
}

impl Eq for IncompleteContext {}

impl fmt::Debug for IncompleteContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.objects.iter().zip(&self.rows))
            .finish()
    }
}

impl IncompleteContext {
    /// A context without objects.
    pub fn empty(universe: AttributeUniverse) -> Self {
        Self {
            universe,
            objects: Vec::new(),
            index: HashMap::new(),
            rows: Vec::new(),
        }
    }

    pub fn from_rows<I, S>(universe: AttributeUniverse, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Row)>,
        S: Into<String>,
    {
        let (objects, rows): (Vec<String>, Vec<Row>) =
            rows.into_iter().map(|(n, r)| (n.into(), r)).unzip();
        if rows.iter().any(|r| r.width() != universe.len()) {
            return Err(Error::UniverseMismatch);
        }
        let index = index_names(&objects, "object")?;
        Ok(Self {
            universe,
            objects,
            index,
            rows,
        })
    }

    /// Convenience constructor from `(name, "x?o…")` rows using session marks.
    pub fn from_marks(universe: AttributeUniverse, rows: &[(&str, &str)]) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (name, marks) in rows {
            let cells: Option<Vec<CellValue>> = marks.chars().map(CellValue::from_mark).collect();
            let cells = cells.ok_or_else(|| Error::parse(0, 0, format!("bad marks {marks:?}")))?;
            out.push((name.to_string(), Row::from_cells(&cells)));
        }
        Self::from_rows(universe, out)
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn row(&self, name: &str) -> Option<&Row> {
        self.index.get(name).map(|i| &self.rows[*i])
    }

    pub fn cell(&self, object: &str, attribute: &str) -> Result<CellValue> {
        let g = self.object_index(object)?;
        let m = self.universe.index_of(attribute)?;
        Ok(self.rows[g].get(m))
    }

    pub fn is_formal(&self) -> bool {
        self.rows.iter().all(Row::is_complete)
    }

    pub fn into_formal(self) -> Result<FormalContext> {
        for (name, row) in self.objects.iter().zip(&self.rows) {
            if let Some(m) = (0..row.width()).find(|m| row.get(*m) == CellValue::Unknown) {
                return Err(Error::NotFormal {
                    object: name.clone(),
                    attribute: self.universe.name(m).to_string(),
                });
            }
        }
        Ok(FormalContext(self))
    }

    pub(crate) fn resolve<S: AsRef<str>>(&self, objs: &[S]) -> Result<BitSet> {
        let mut bits = BitSet::empty(self.len());
        for o in objs {
            bits.insert(self.object_index(o.as_ref())?);
        }
        Ok(bits)
    }

    pub(crate) fn names_of(&self, objs: &BitSet) -> Vec<String> {
        objs.iter().map(|i| self.objects[i].clone()).collect()
    }

    pub(crate) fn certain_intent_bits(&self, objs: &BitSet) -> BitSet {
        let mut acc = BitSet::full(self.universe.len());
        for g in objs.iter() {
            acc.intersect_with(self.rows[g].certain());
        }
        acc
    }

    pub(crate) fn possible_intent_bits(&self, objs: &BitSet) -> BitSet {
        let mut acc = BitSet::full(self.universe.len());
        for g in objs.iter() {
            acc.difference_with(self.rows[g].blanks());
        }
        acc
    }

    pub(crate) fn certain_extent_bits(&self, attrs: &BitSet) -> BitSet {
        BitSet::from_indices(
            self.len(),
            (0..self.len()).filter(|g| attrs.is_subset(self.rows[*g].certain())),
        )
    }

    pub(crate) fn possible_extent_bits(&self, attrs: &BitSet) -> BitSet {
        BitSet::from_indices(
            self.len(),
            (0..self.len()).filter(|g| attrs.intersection(self.rows[*g].blanks()).is_empty()),
        )
    }

    /// `R^□◇`: attributes every object certainly having `attrs` possibly has.
    pub(crate) fn max_conclusion_bits(&self, attrs: &BitSet) -> BitSet {
        let mut acc = BitSet::full(self.universe.len());
        for row in &self.rows {
            if attrs.is_subset(row.certain()) {
                acc.difference_with(row.blanks());
            }
        }
        acc
    }

    /// Attributes certainly shared by all of `objs` (`A^□`).
    pub fn certain_intent<S: AsRef<str>>(&self, objs: &[S]) -> Result<AttributeSet> {
        let bits = self.resolve(objs)?;
        Ok(AttributeSet::from_bits(
            self.universe.clone(),
            self.certain_intent_bits(&bits),
        ))
    }

    /// Attributes possibly shared by all of `objs` (`A^◇`).
    pub fn possible_intent<S: AsRef<str>>(&self, objs: &[S]) -> Result<AttributeSet> {
        let bits = self.resolve(objs)?;
        Ok(AttributeSet::from_bits(
            self.universe.clone(),
            self.possible_intent_bits(&bits),
        ))
    }

    pub fn certain_extent(&self, attrs: &AttributeSet) -> Result<Vec<String>> {
        self.universe.ensure_same(attrs.universe())?;
        Ok(self.names_of(&self.certain_extent_bits(attrs.bits())))
    }

    pub fn possible_extent(&self, attrs: &AttributeSet) -> Result<Vec<String>> {
        self.universe.ensure_same(attrs.universe())?;
        Ok(self.names_of(&self.possible_extent_bits(attrs.bits())))
    }

    /// `R^□◇`, the largest satisfiable conclusion for premise `r`.
    pub fn max_satisfiable_conclusion(&self, r: &AttributeSet) -> Result<AttributeSet> {
        self.universe.ensure_same(r.universe())?;
        Ok(AttributeSet::from_bits(
            self.universe.clone(),
            self.max_conclusion_bits(r.bits()),
        ))
    }

    /// Whether `other` contains at least as much information as `self`.
    pub fn information_leq(&self, other: &IncompleteContext) -> Result<bool> {
        self.universe.ensure_same(&other.universe)?;
        Ok(self.objects.iter().zip(&self.rows).all(|(name, row)| {
            other.row(name).is_some_and(|o| row.info_leq(o))
        }))
    }

    /// Cell-wise supremum; fails listing every × against o cell.
    pub fn supremum(&self, other: &IncompleteContext) -> Result<IncompleteContext> {
        self.universe.ensure_same(&other.universe)?;
        let mut out = self.clone();
        let mut conflicts = Vec::new();
        for (name, row) in other.objects.iter().zip(&other.rows) {
            match out.index.get(name) {
                Some(&g) => {
                    let clash = out.rows[g].clashes(row);
                    if clash.is_empty() {
                        out.rows[g] = out.rows[g].sup(row).expect("no clash");
                    } else {
                        conflicts.extend(clash.iter().map(|m| CellConflict {
                            object: name.clone(),
                            attribute: self.universe.name(m).to_string(),
                        }));
                    }
                }
                None => out.push_unchecked(name.clone(), row.clone()),
            }
        }
        if conflicts.is_empty() {
            Ok(out)
        } else {
            Err(Error::Conflict(conflicts))
        }
    }

    /// Supremum with a single named row.
    pub fn with_row(&self, name: &str, row: Row) -> Result<IncompleteContext> {
        let single = IncompleteContext::from_rows(self.universe.clone(), [(name, row)])?;
        self.supremum(&single)
    }

    fn push_unchecked(&mut self, name: String, row: Row) {
        self.index.insert(name.clone(), self.objects.len());
        self.objects.push(name);
        self.rows.push(row);
    }

    /// Stacks contexts over one universe; objects become `"{i}:{name}"`
    /// with `i` the 1-based position of the input.
    pub fn subposition(contexts: &[IncompleteContext]) -> Result<IncompleteContext> {
        let first = contexts.first().ok_or(Error::EmptyGroup)?;
        let mut out = IncompleteContext::empty(first.universe.clone());
        for (i, ctx) in contexts.iter().enumerate() {
            first.universe.ensure_same(&ctx.universe)?;
            for (name, row) in ctx.objects.iter().zip(&ctx.rows) {
                out.push_unchecked(format!("{}:{}", i + 1, name), row.clone());
            }
        }
        Ok(out)
    }

    /// `R^□◇` over the stacked rows of several contexts, without building
    /// the renamed subposition.
    pub(crate) fn stacked_max_conclusion<'a, I>(universe: &AttributeUniverse, contexts: I, attrs: &BitSet) -> BitSet
    where
        I: IntoIterator<Item = &'a IncompleteContext>,
    {
        let mut acc = BitSet::full(universe.len());
        for ctx in contexts {
            for row in &ctx.rows {
                if attrs.is_subset(row.certain()) {
                    acc.difference_with(row.blanks());
                }
            }
        }
        acc
    }
}

/// A context without unknown cells.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormalContext(IncompleteContext);

impl FormalContext {
    /// Builds a formal context from object intents given as attribute names.
    pub fn from_intents<S: AsRef<str>>(
        universe: AttributeUniverse,
        rows: &[(&str, &[S])],
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (name, attrs) in rows {
            let set = universe.set(attrs.iter().map(AsRef::as_ref))?;
            out.push((name.to_string(), Row::formal(set.bits().clone())));
        }
        Ok(Self(IncompleteContext::from_rows(universe, out)?))
    }

    pub(crate) fn from_bit_rows(universe: AttributeUniverse, rows: Vec<(String, BitSet)>) -> Result<Self> {
        let rows = rows.into_iter().map(|(n, b)| (n, Row::formal(b)));
        Ok(Self(IncompleteContext::from_rows(universe, rows)?))
    }

    pub fn as_incomplete(&self) -> &IncompleteContext {
        &self.0
    }

    pub fn into_incomplete(self) -> IncompleteContext {
        self.0
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.0.universe
    }

    pub fn objects(&self) -> &[String] {
        &self.0.objects
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Object intents, in object order.
    pub fn intents(&self) -> impl Iterator<Item = &BitSet> + '_ {
        self.0.rows.iter().map(Row::certain)
    }

    /// `A'`: attributes common to all of `objs`; all of M for no objects.
    pub fn derive_attributes<S: AsRef<str>>(&self, objs: &[S]) -> Result<AttributeSet> {
        self.0.certain_intent(objs)
    }

    /// `B'`: objects having every attribute of `attrs`.
    pub fn derive_objects(&self, attrs: &AttributeSet) -> Result<Vec<String>> {
        self.0.certain_extent(attrs)
    }

    pub(crate) fn double_prime_bits(&self, attrs: &BitSet) -> BitSet {
        let mut acc = BitSet::full(self.universe().len());
        for row in &self.0.rows {
            if attrs.is_subset(row.certain()) {
                acc.intersect_with(row.certain());
            }
        }
        acc
    }

    /// `B''`.
    pub fn double_prime(&self, attrs: &AttributeSet) -> Result<AttributeSet> {
        self.universe().ensure_same(attrs.universe())?;
        Ok(AttributeSet::from_bits(
            self.universe().clone(),
            self.double_prime_bits(attrs.bits()),
        ))
    }

    pub fn subposition(contexts: &[FormalContext]) -> Result<FormalContext> {
        let inner: Vec<IncompleteContext> = contexts.iter().map(|c| c.0.clone()).collect();
        Ok(FormalContext(IncompleteContext::subposition(&inner)?))
    }
}

impl From<FormalContext> for IncompleteContext {
    fn from(c: FormalContext) -> Self {
        c.0
    }
}
