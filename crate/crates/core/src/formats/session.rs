//! JSON session documents (`fcax-session/1`) holding a complete, resumable
//! exploration state.
//!
//! Objects are written with sorted keys and two-space indentation, so equal
//! states serialize to equal bytes.

use serde_json::{json, Map, Value};

use crate::bitset::BitSet;
use crate::context::{CellValue, IncompleteContext, Row};
use crate::error::{Error, Result};
use crate::expert::ExpertRef;
use crate::exploration::{Active, AnswerKind, AnswerRecord, Exploration, Phase, QuestionRecord};
use crate::implication::{Implication, ImplicationSet};
use crate::log::{AnswerLog, LogEntry};
use crate::system::{SubsetResult, SubsetSchedule, SystemExploration};
use crate::universe::{AttributeSet, AttributeUniverse};

pub const SESSION_SCHEMA: &str = "fcax-session/1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionState {
    Group(Exploration),
    System(SystemExploration),
}

impl SessionState {
    pub fn universe(&self) -> &AttributeUniverse {
        match self {
            SessionState::Group(x) => x.universe(),
            SessionState::System(s) => s.universe(),
        }
    }

    pub fn experts(&self) -> &[ExpertRef] {
        match self {
            SessionState::Group(x) => x.experts(),
            SessionState::System(s) => s.experts(),
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            SessionState::Group(_) => "group",
            SessionState::System(_) => "system",
        }
    }
}

/// A session state plus free-form metadata kept verbatim (the service
/// stores ids, tokens and timestamps there).
#[derive(Debug, Clone, PartialEq)]
pub struct SessionDocument {
    pub state: SessionState,
    pub meta: Map<String, Value>,
}

impl SessionDocument {
    pub fn new(state: SessionState) -> Self {
        Self {
            state,
            meta: Map::new(),
        }
    }
}

pub fn save_session(doc: &SessionDocument) -> String {
    let state = &doc.state;
    let universe = state.universe();
    let mut root = Map::new();
    root.insert("schema".into(), json!(SESSION_SCHEMA));
    root.insert("mode".into(), json!(state.mode()));
    root.insert("attributes".into(), json!(universe.names()));
    root.insert("experts".into(), Value::Array(state.experts().iter().map(expert_json).collect()));
    root.insert("meta".into(), Value::Object(doc.meta.clone()));
    match state {
        SessionState::Group(x) => root.insert("group".into(), exploration_json(x)),
        SessionState::System(s) => root.insert("system".into(), system_json(s)),
    };
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("plain data");
    text.push('\n');
    text
}

pub fn load_session(text: &str) -> Result<SessionDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Session(e.to_string()))?;
    let r = Obj::new(&root, "document")?;
    let schema = r.str("schema")?;
    if schema != SESSION_SCHEMA {
        return Err(Error::SessionVersion(schema.to_string()));
    }
    let universe = AttributeUniverse::new(r.strings("attributes")?)?;
    let experts: Vec<ExpertRef> = r.array("experts")?.iter().map(expert_from).collect::<Result<_>>()?;
    let meta = match r.get("meta")? {
        Value::Object(m) => m.clone(),
        _ => return Err(bad("meta must be an object")),
    };
    let state = match r.str("mode")? {
        "group" => SessionState::Group(exploration_from(&universe, r.get("group")?)?),
        "system" => SessionState::System(system_from(&universe, &experts, r.get("system")?)?),
        other => return Err(bad(format!("unknown mode {other:?}"))),
    };
    if state.experts() != experts.as_slice() {
        return Err(bad("expert list differs from the state's"));
    }
    Ok(SessionDocument { state, meta })
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Session(msg.into())
}

/// Checked access to a JSON object; every key must be present.
struct Obj<'a> {
    map: &'a Map<String, Value>,
    what: &'static str,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, what: &'static str) -> Result<Self> {
        match v {
            Value::Object(map) => Ok(Self { map, what }),
            _ => Err(bad(format!("{what} must be an object"))),
        }
    }

    fn get(&self, key: &str) -> Result<&'a Value> {
        self.map
            .get(key)
            .ok_or_else(|| bad(format!("{} lacks field {key:?}", self.what)))
    }

    fn str(&self, key: &str) -> Result<&'a str> {
        self.get(key)?
            .as_str()
            .ok_or_else(|| bad(format!("{}.{key} must be a string", self.what)))
    }

    fn opt_str(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key)? {
            Value::Null => Ok(None),
            Value::String(s) => Ok(Some(s)),
            _ => Err(bad(format!("{}.{key} must be a string or null", self.what))),
        }
    }

    fn bool(&self, key: &str) -> Result<bool> {
        self.get(key)?
            .as_bool()
            .ok_or_else(|| bad(format!("{}.{key} must be a boolean", self.what)))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)?
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| bad(format!("{}.{key} must be a non-negative integer", self.what)))
    }

    fn array(&self, key: &str) -> Result<&'a Vec<Value>> {
        self.get(key)?
            .as_array()
            .ok_or_else(|| bad(format!("{}.{key} must be an array", self.what)))
    }

    fn strings(&self, key: &str) -> Result<Vec<String>> {
        strings(self.get(key)?, key)
    }
}

fn strings(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array of strings")))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| bad(format!("{what} must be an array of strings")))
        })
        .collect()
}

fn expert_json(e: &ExpertRef) -> Value {
    json!({"id": e.id, "name": e.name})
}

fn expert_from(v: &Value) -> Result<ExpertRef> {
    let o = Obj::new(v, "expert")?;
    Ok(ExpertRef::named(o.str("id")?, o.str("name")?))
}

fn set_json(universe: &AttributeUniverse, bits: &BitSet) -> Value {
    json!(bits.iter().map(|i| universe.name(i)).collect::<Vec<_>>())
}

fn set_from(universe: &AttributeUniverse, v: &Value, what: &str) -> Result<BitSet> {
    let names = strings(v, what)?;
    let mut bits = BitSet::empty(universe.len());
    for n in &names {
        let i = universe.index_of(n)?;
        if bits.contains(i) {
            return Err(bad(format!("{what} repeats {n:?}")));
        }
        bits.insert(i);
    }
    // only canonical (universe-ordered) lists read back byte-identically
    if names.len() > 1 && bits.iter().map(|i| universe.name(i)).ne(names.iter().map(String::as_str)) {
        return Err(bad(format!("{what} is not in attribute order")));
    }
    Ok(bits)
}

fn attr_set_from(universe: &AttributeUniverse, v: &Value, what: &str) -> Result<AttributeSet> {
    Ok(AttributeSet::from_bits(universe.clone(), set_from(universe, v, what)?))
}

fn marks(cells: &[CellValue]) -> String {
    cells.iter().map(|c| c.mark()).collect()
}

fn cells_from(s: &str, width: usize, what: &str) -> Result<Vec<CellValue>> {
    let cells: Option<Vec<CellValue>> = s.chars().map(CellValue::from_mark).collect();
    let cells = cells.ok_or_else(|| bad(format!("{what} has a cell other than x, o, ?")))?;
    if cells.len() != width {
        return Err(bad(format!("{what} has {} cells, expected {width}", cells.len())));
    }
    Ok(cells)
}

fn context_json(ctx: &IncompleteContext) -> Value {
    Value::Array(
        ctx.objects()
            .iter()
            .zip(ctx.rows())
            .map(|(n, r)| json!({"name": n, "cells": marks(&r.cells())}))
            .collect(),
    )
}

fn context_from(universe: &AttributeUniverse, v: &Value) -> Result<IncompleteContext> {
    let rows = v.as_array().ok_or_else(|| bad("examples must be arrays of objects"))?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let o = Obj::new(r, "object")?;
        let cells = cells_from(o.str("cells")?, universe.len(), "object row")?;
        out.push((o.str("name")?.to_string(), Row::from_cells(&cells)));
    }
    IncompleteContext::from_rows(universe.clone(), out)
}

fn implication_json(imp: &Implication) -> Value {
    let u = imp.universe();
    json!({
        "premise": set_json(u, imp.premise().bits()),
        "conclusion": set_json(u, imp.conclusion().bits()),
    })
}

fn implication_from(universe: &AttributeUniverse, v: &Value) -> Result<Implication> {
    let o = Obj::new(v, "implication")?;
    Implication::new(
        attr_set_from(universe, o.get("premise")?, "premise")?,
        attr_set_from(universe, o.get("conclusion")?, "conclusion")?,
    )
}

fn implications_json(set: &ImplicationSet) -> Value {
    Value::Array(set.iter().map(implication_json).collect())
}

fn implications_from(universe: &AttributeUniverse, v: &Value) -> Result<ImplicationSet> {
    let items = v.as_array().ok_or_else(|| bad("implication list must be an array"))?;
    let mut out = ImplicationSet::new(universe.clone());
    for i in items {
        out.push(implication_from(universe, i)?)?;
    }
    Ok(out)
}

fn log_json(log: &AnswerLog) -> Value {
    let u = log.universe();
    json!({
        "experts": log.experts(),
        "entries": log.entries().iter().map(|e| json!({
            "premise": set_json(u, e.premise()),
            "attribute": u.name(e.attribute()),
            "cells": marks(e.cells()),
        })).collect::<Vec<_>>(),
    })
}

fn log_from(universe: &AttributeUniverse, v: &Value) -> Result<AnswerLog> {
    let o = Obj::new(v, "log")?;
    let experts = o.strings("experts")?;
    let n = experts.len();
    let mut log = AnswerLog::new(universe.clone(), experts);
    for e in o.array("entries")? {
        let eo = Obj::new(e, "log entry")?;
        log.push_entry(LogEntry {
            premise: set_from(universe, eo.get("premise")?, "premise")?,
            attribute: universe.index_of(eo.str("attribute")?)?,
            cells: cells_from(eo.str("cells")?, n, "log entry")?,
        })?;
    }
    Ok(log)
}

fn record_json(r: &QuestionRecord) -> Value {
    let u = r.premise.universe();
    json!({
        "premise": set_json(u, r.premise.bits()),
        "asked": set_json(u, r.asked.bits()),
        "accepted": r.accepted.as_ref().map_or(Value::Null, implication_json),
        "answers": r.answers.iter().map(|a| json!({
            "expert": a.expert,
            "attribute": a.attribute,
            "kind": a.kind.as_str(),
            "counterexample": a.counterexample,
            "inferred": a.inferred,
        })).collect::<Vec<_>>(),
    })
}

fn record_from(universe: &AttributeUniverse, v: &Value) -> Result<QuestionRecord> {
    let o = Obj::new(v, "transcript record")?;
    let accepted = match o.get("accepted")? {
        Value::Null => None,
        other => Some(implication_from(universe, other)?),
    };
    let mut answers = Vec::new();
    for a in o.array("answers")? {
        let ao = Obj::new(a, "answer")?;
        let kind = ao.str("kind")?;
        answers.push(AnswerRecord {
            expert: ao.str("expert")?.to_string(),
            attribute: ao.str("attribute")?.to_string(),
            kind: AnswerKind::parse(kind).ok_or_else(|| bad(format!("unknown answer kind {kind:?}")))?,
            counterexample: ao.opt_str("counterexample")?.map(str::to_string),
            inferred: ao.bool("inferred")?,
        });
    }
    Ok(QuestionRecord {
        premise: attr_set_from(universe, o.get("premise")?, "premise")?,
        asked: attr_set_from(universe, o.get("asked")?, "asked")?,
        answers,
        accepted,
    })
}

fn exploration_json(x: &Exploration) -> Value {
    let u = &x.universe;
    let sets = |v: &[BitSet]| Value::Array(v.iter().map(|b| set_json(u, b)).collect());
    json!({
        "experts": x.experts.iter().map(expert_json).collect::<Vec<_>>(),
        "examples": x.examples.iter().map(context_json).collect::<Vec<_>>(),
        "background": implications_json(&x.background),
        "prior": x.prior.iter().map(implications_json).collect::<Vec<_>>(),
        "accepted": implications_json(&x.accepted),
        "log": log_json(&x.log),
        "current": set_json(u, &x.current),
        "phase": x.phase.as_str(),
        "active": x.active.as_ref().map_or(Value::Null, |a| json!({
            "premise": set_json(u, &a.premise),
            "asked": set_json(u, &a.asked),
            "pending": set_json(u, &a.pending),
            "answered": sets(&a.answered),
            "yes": sets(&a.yes),
        })),
        "transcript": x.transcript.iter().map(record_json).collect::<Vec<_>>(),
    })
}

fn exploration_from(universe: &AttributeUniverse, v: &Value) -> Result<Exploration> {
    let o = Obj::new(v, "exploration")?;
    let experts: Vec<ExpertRef> = o.array("experts")?.iter().map(expert_from).collect::<Result<_>>()?;
    let examples: Vec<IncompleteContext> = o
        .array("examples")?
        .iter()
        .map(|c| context_from(universe, c))
        .collect::<Result<_>>()?;
    let background = implications_from(universe, o.get("background")?)?;
    let prior: Vec<ImplicationSet> = o
        .array("prior")?
        .iter()
        .map(|p| implications_from(universe, p))
        .collect::<Result<_>>()?;
    let mut x = Exploration::start(universe.clone(), experts, examples, background)?.with_confirmed(prior)?;
    x.accepted = implications_from(universe, o.get("accepted")?)?;
    x.log = log_from(universe, o.get("log")?)?;
    let ids: Vec<&str> = x.experts.iter().map(|e| e.id.as_str()).collect();
    if x.log.experts().iter().map(String::as_str).ne(ids.iter().copied()) {
        return Err(bad("log experts differ from the exploration's"));
    }
    x.current = set_from(universe, o.get("current")?, "current")?;
    let phase = o.str("phase")?;
    x.phase = Phase::parse(phase).ok_or_else(|| bad(format!("unknown phase {phase:?}")))?;
    x.active = match o.get("active")? {
        Value::Null => None,
        a => {
            let ao = Obj::new(a, "active question")?;
            let sets = |key: &str| -> Result<Vec<BitSet>> {
                let v = ao.array(key)?;
                if v.len() != ids.len() {
                    return Err(bad(format!("active.{key} needs one entry per expert")));
                }
                v.iter().map(|s| set_from(universe, s, key)).collect()
            };
            Some(Active {
                premise: set_from(universe, ao.get("premise")?, "premise")?,
                asked: set_from(universe, ao.get("asked")?, "asked")?,
                pending: set_from(universe, ao.get("pending")?, "pending")?,
                answered: sets("answered")?,
                yes: sets("yes")?,
            })
        }
    };
    if (x.phase == Phase::Asking) != x.active.is_some() {
        return Err(bad("phase and active question disagree"));
    }
    x.transcript = o
        .array("transcript")?
        .iter()
        .map(|r| record_from(universe, r))
        .collect::<Result<_>>()?;
    Ok(x)
}

fn result_json(r: &SubsetResult) -> Value {
    json!({
        "members": r.members,
        "background": implications_json(&r.background),
        "accepted": implications_json(&r.accepted),
        "transcript": r.transcript.iter().map(record_json).collect::<Vec<_>>(),
    })
}

fn result_from(universe: &AttributeUniverse, v: &Value) -> Result<SubsetResult> {
    let o = Obj::new(v, "subset result")?;
    Ok(SubsetResult {
        members: o.strings("members")?,
        background: implications_from(universe, o.get("background")?)?,
        accepted: implications_from(universe, o.get("accepted")?)?,
        transcript: o
            .array("transcript")?
            .iter()
            .map(|r| record_from(universe, r))
            .collect::<Result<_>>()?,
    })
}

fn system_json(s: &SystemExploration) -> Value {
    json!({
        "examples": s.examples.iter().map(context_json).collect::<Vec<_>>(),
        "log": log_json(&s.log),
        "schedule": s.schedule.subsets(),
        "position": s.position,
        "current": s.current.as_ref().map_or(Value::Null, exploration_json),
        "results": s.results.iter().map(result_json).collect::<Vec<_>>(),
    })
}

fn system_from(universe: &AttributeUniverse, experts: &[ExpertRef], v: &Value) -> Result<SystemExploration> {
    let o = Obj::new(v, "system")?;
    let ids: Vec<String> = experts.iter().map(|e| e.id.clone()).collect();
    let subsets: Vec<Vec<String>> = o
        .array("schedule")?
        .iter()
        .map(|s| strings(s, "schedule subset"))
        .collect::<Result<_>>()?;
    let schedule = SubsetSchedule::custom(&ids, &subsets)?;
    if schedule.subsets() != subsets {
        return Err(bad("schedule subsets must list members in expert order"));
    }
    let examples = o
        .array("examples")?
        .iter()
        .map(|c| context_from(universe, c))
        .collect::<Result<_>>()?;
    let log = log_from(universe, o.get("log")?)?;
    let mut s = SystemExploration::start(universe.clone(), experts.to_vec(), examples, Some(log), schedule)?;
    s.position = o.usize("position")?;
    if s.position > s.schedule.len() {
        return Err(bad("schedule position out of range"));
    }
    s.current = match o.get("current")? {
        Value::Null => None,
        c => Some(exploration_from(universe, c)?),
    };
    s.results = o
        .array("results")?
        .iter()
        .map(|r| result_from(universe, r))
        .collect::<Result<_>>()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expert::Verdict;
    use crate::system::TieBreak;

    fn group() -> Exploration {
        let u = AttributeUniverse::new(["a", "b", "c"]).unwrap();
        let experts = vec![ExpertRef::new("E1"), ExpertRef::named("E2", "Second")];
        let mut x = Exploration::start(
            u.clone(),
            experts,
            vec![IncompleteContext::empty(u.clone()); 2],
            ImplicationSet::new(u),
        )
        .unwrap();
        x.next_question().unwrap();
        x.submit("E1", "a", Verdict::Unknown).unwrap();
        x.submit("E2", "b", Verdict::Yes).unwrap();
        x
    }

    #[test]
    fn group_round_trip_is_byte_identical() {
        let mut doc = SessionDocument::new(SessionState::Group(group()));
        doc.meta.insert("id".into(), json!("s1"));
        let text = save_session(&doc);
        let back = load_session(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(save_session(&back), text);
        assert!(text.contains("\"schema\": \"fcax-session/1\""));
    }

    #[test]
    fn system_round_trip() {
        let u = AttributeUniverse::new(["a", "b"]).unwrap();
        let experts = vec![ExpertRef::new("A"), ExpertRef::new("B")];
        let ids: Vec<String> = experts.iter().map(|e| e.id.clone()).collect();
        let schedule = SubsetSchedule::full(&ids, TieBreak::Lexicographic).unwrap();
        let mut s = SystemExploration::start(u.clone(), experts, vec![IncompleteContext::empty(u); 2], None, schedule)
            .unwrap();
        s.next_question().unwrap();
        s.submit("A", "a", Verdict::Yes).unwrap();
        let doc = SessionDocument::new(SessionState::System(s));
        let text = save_session(&doc);
        let back = load_session(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(save_session(&back), text);
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = save_session(&SessionDocument::new(SessionState::Group(group())))
            .replace("fcax-session/1", "fcax-session/2");
        assert_eq!(load_session(&text).unwrap_err(), Error::SessionVersion("fcax-session/2".into()));
        assert!(matches!(load_session("{}"), Err(Error::Session(_))));
    }
}
