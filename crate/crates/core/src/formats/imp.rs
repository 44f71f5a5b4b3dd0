//! Implication lists: one `a b -> c d` per line, `-> c` for an empty premise.
//!
//! Blank lines and lines starting with `#` are ignored on input. Output
//! lists conclusions without premise attributes, names in universe order.

use crate::error::{Error, Result};
use crate::implication::{Implication, ImplicationSet};
use crate::universe::AttributeUniverse;

/// Parses one implication line; `line` is used in error positions.
pub(crate) fn parse_implication_line(universe: &AttributeUniverse, text: &str, line: usize) -> Result<Implication> {
    let mut sides: [Vec<&str>; 2] = [Vec::new(), Vec::new()];
    let mut side = 0;
    let mut arrows = 0;
    let mut col = 1;
    for piece in text.split(' ') {
        if piece.is_empty() {
            col += 1;
            continue;
        }
        if let Some(c) = piece.find(|c: char| c.is_whitespace()) {
            return Err(Error::parse(line, col + c, "names are separated by single spaces"));
        }
        if piece == "->" {
            arrows += 1;
            if arrows > 1 {
                return Err(Error::parse(line, col, "more than one \"->\""));
            }
            side = 1;
        } else {
            if universe.index_of(piece).is_err() {
                return Err(Error::parse(line, col, format!("unknown attribute {piece:?}")));
            }
            if sides[side].contains(&piece) {
                return Err(Error::parse(line, col, format!("attribute {piece:?} repeated")));
            }
            sides[side].push(piece);
        }
        col += piece.chars().count() + 1;
    }
    if arrows == 0 {
        return Err(Error::parse(line, 1, "missing \"->\""));
    }
    Implication::parse_names(universe, &sides[0], &sides[1])
}

pub fn parse_imp(text: &str, universe: &AttributeUniverse) -> Result<ImplicationSet> {
    let mut out = ImplicationSet::new(universe.clone());
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    for (i, l) in lines.iter().enumerate() {
        if let Some(col) = l.find('\r') {
            return Err(Error::parse(i + 1, col + 1, "carriage return; lines must end with LF"));
        }
        let trimmed = l.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(parse_implication_line(universe, l, i + 1)?)?;
    }
    Ok(out)
}

/// One normalized line, without the trailing newline.
pub fn implication_line(imp: &Implication) -> String {
    let n = imp.normalized();
    let p: Vec<&str> = n.premise().names().collect();
    let c: Vec<&str> = n.conclusion().names().collect();
    match (p.is_empty(), c.is_empty()) {
        (true, true) => "->".to_string(),
        (true, false) => format!("-> {}", c.join(" ")),
        (false, true) => format!("{} ->", p.join(" ")),
        (false, false) => format!("{} -> {}", p.join(" "), c.join(" ")),
    }
}

/// Canonical text; attribute names containing whitespace or equal to
/// `->` cannot be written.
pub fn write_imp(set: &ImplicationSet) -> Result<String> {
    if let Some(n) = set
        .universe()
        .names()
        .iter()
        .find(|n| n.as_str() == "->" || n.starts_with('#') || n.contains(char::is_whitespace))
    {
        return Err(Error::Unwritable(format!("attribute name {n:?} cannot appear in an implication file")));
    }
    let mut out = String::new();
    for imp in set {
        out.push_str(&implication_line(imp));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe() -> AttributeUniverse {
        AttributeUniverse::new(["18", "19", "20", "21", "22"]).unwrap()
    }

    const ORP: &str = "-> 19\n19 20 -> 18 21 22\n19 21 -> 18 20 22\n";

    #[test]
    fn orp_round_trip() {
        let set = parse_imp(ORP, &universe()).unwrap();
        assert_eq!(set.len(), 3);
        assert!(set.iter().next().unwrap().premise().is_empty());
        assert_eq!(write_imp(&set).unwrap(), ORP);
    }

    #[test]
    fn empty_list_is_empty_file() {
        let set = parse_imp("", &universe()).unwrap();
        assert!(set.is_empty());
        assert_eq!(write_imp(&set).unwrap(), "");
    }

    #[test]
    fn comments_and_normalization() {
        let set = parse_imp("# ORP\n\n20 19 -> 19 22 18 21\n", &universe()).unwrap();
        assert_eq!(write_imp(&set).unwrap(), "19 20 -> 18 21 22\n");
    }

    #[test]
    fn errors_carry_positions() {
        let u = universe();
        assert_eq!(
            parse_imp("18 -> 99\n", &u).unwrap_err(),
            Error::parse(1, 7, "unknown attribute \"99\"")
        );
        assert!(matches!(parse_imp("18 19\n", &u), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_imp("-> 18\n18 -> -> 19\n", &u), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_imp("18 18 -> 19\n", &u), Err(Error::Parse { .. })));
    }
}
