//! Burmeister-style context files with `?` for unknown cells.
//!
//! ```text
//! B
//! <name>
//! <|G|>
//! <|M|>
//! <object names, one per line>
//! <attribute names, one per line>
//! <|G| rows over X . ?>
//! ```
//!
//! One blank line after `|M|`, as written by other FCA tools, is accepted
//! on input; output never contains it.

use crate::context::{CellValue, IncompleteContext, Row};
use crate::error::{Error, Result};
use crate::universe::AttributeUniverse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CxtDocument {
    pub name: String,
    pub context: IncompleteContext,
}

fn symbol(v: CellValue) -> char {
    match v {
        CellValue::Cross => 'X',
        CellValue::Blank => '.',
        CellValue::Unknown => '?',
    }
}

fn cell(c: char) -> Option<CellValue> {
    match c {
        'X' => Some(CellValue::Cross),
        '.' => Some(CellValue::Blank),
        '?' => Some(CellValue::Unknown),
        _ => None,
    }
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    next: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Result<Self> {
        let mut lines: Vec<&str> = text.split('\n').collect();
        // a final LF ends the last line rather than starting an empty one
        if lines.last() == Some(&"") {
            lines.pop();
        }
        for (i, l) in lines.iter().enumerate() {
            if let Some(col) = l.find('\r') {
                return Err(Error::parse(i + 1, col + 1, "carriage return; lines must end with LF"));
            }
        }
        Ok(Self { lines, next: 0 })
    }

    fn line_no(&self) -> usize {
        self.next + 1
    }

    fn take(&mut self, what: &str) -> Result<&'a str> {
        let l = self
            .lines
            .get(self.next)
            .ok_or_else(|| Error::parse(self.next + 1, 1, format!("unexpected end of file, expected {what}")))?;
        self.next += 1;
        Ok(l)
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let line = self.line_no();
        let l = self.take(what)?;
        if l.is_empty() || !l.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(line, 1, format!("expected {what} as a decimal number")));
        }
        l.parse()
            .map_err(|_| Error::parse(line, 1, format!("{what} out of range")))
    }

    fn names(&mut self, n: usize, what: &'static str) -> Result<Vec<String>> {
        let mut out: Vec<String> = Vec::with_capacity(n);
        for _ in 0..n {
            let line = self.line_no();
            let l = self.take(what)?;
            if l.is_empty() {
                return Err(Error::parse(line, 1, format!("empty {what}")));
            }
            if out.iter().any(|o| o == l) {
                return Err(Error::parse(line, 1, format!("duplicate {what} {l:?}")));
            }
            out.push(l.to_string());
        }
        Ok(out)
    }
}

/// Parses a context document, keeping object and attribute order.
pub fn parse_cxt(text: &str) -> Result<CxtDocument> {
    let mut lines = Lines::new(text)?;
    if lines.take("header")? != "B" {
        return Err(Error::parse(1, 1, "expected header line \"B\""));
    }
    let name = lines.take("context name")?.to_string();
    let g = lines.count("object count")?;
    let m = lines.count("attribute count")?;
    if lines.lines.get(lines.next) == Some(&"") {
        lines.next += 1;
    }
    let objects = lines.names(g, "object name")?;
    let attributes = lines.names(m, "attribute name")?;
    let universe = AttributeUniverse::new(attributes)?;
    let mut rows = Vec::with_capacity(g);
    for i in 0..g {
        let line = lines.line_no();
        let l = lines.take("incidence row")?;
        let mut cells = Vec::with_capacity(m);
        for (col, c) in l.chars().enumerate() {
            let v = cell(c).ok_or_else(|| {
                Error::parse(line, col + 1, format!("illegal cell {c:?}; expected X, . or ?"))
            })?;
            cells.push(v);
        }
        if cells.len() != m {
            return Err(Error::parse(
                line,
                cells.len().min(m) + 1,
                format!("row {} of object {:?} has {} cells, expected {m}", i + 1, objects[i], cells.len()),
            ));
        }
        rows.push((objects[i].clone(), Row::from_cells(&cells)));
    }
    if lines.next < lines.lines.len() {
        return Err(Error::parse(lines.line_no(), 1, "trailing content after the last row"));
    }
    let context = IncompleteContext::from_rows(universe, rows)?;
    Ok(CxtDocument { name, context })
}

/// Parses a context document and drops its name.
pub fn parse_context(text: &str) -> Result<IncompleteContext> {
    parse_cxt(text).map(|d| d.context)
}

/// Canonical text of a context. Names must not contain line breaks.
pub fn write_cxt(name: &str, ctx: &IncompleteContext) -> Result<String> {
    let universe = ctx.universe();
    let bad = |s: &str| s.contains('\n') || s.contains('\r');
    if bad(name) {
        return Err(Error::Unwritable("context name contains a line break".into()));
    }
    if let Some(n) = ctx.objects().iter().chain(universe.names()).find(|n| bad(n)) {
        return Err(Error::Unwritable(format!("name {n:?} contains a line break")));
    }
    let mut out = format!("B\n{name}\n{}\n{}\n", ctx.len(), universe.len());
    for n in ctx.objects().iter().chain(universe.names()) {
        out.push_str(n);
        out.push('\n');
    }
    for row in ctx.rows() {
        out.extend((0..row.width()).map(|i| symbol(row.get(i))));
        out.push('\n');
    }
    Ok(out)
}
