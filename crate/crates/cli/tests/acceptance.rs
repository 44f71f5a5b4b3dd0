//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured time against its limit. Run with `--nocapture` to see them.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use common::*;
use fcax_core::driver::{run_exploration, run_system, Expert, Prompt};
use fcax_core::fixtures::{bsi_bases, bsi_universe, bsi_views, BSI_ATTRIBUTES, BSI_SHARED};
use fcax_core::formats::{
    implication_line, load_session, parse_cxt, parse_imp, save_session, write_cxt, write_imp, SessionDocument,
    SessionState,
};
use fcax_core::{
    background_for, l_completion, model_context, relative_canonical_base, AttributeUniverse, Exploration, ExpertRef,
    FormalContext, Implication, ImplicationSet, IncompleteContext, SimulatedView, SubsetSchedule, SystemExploration,
    TieBreak, Verdict,
};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const IDS: [&str; 4] = ["APP.1.1", "CON.1", "ORP.1", "SYS.1.1"];

fn ids() -> Vec<String> {
    IDS.map(String::from).to_vec()
}

fn sorted_lines(set: &ImplicationSet) -> Vec<String> {
    let mut l: Vec<String> = set.normalized().iter().map(implication_line).collect();
    l.sort();
    l
}

fn no_repeats(prompts: &[Prompt]) -> Result<(), String> {
    let mut seen = HashSet::new();
    for p in prompts {
        if !seen.insert((p.expert.clone(), p.premise.to_string(), p.attribute.clone())) {
            return Err(format!("{} asked {} -> {} twice", p.expert, p.premise, p.attribute));
        }
    }
    Ok(())
}

fn group_run(u: &AttributeUniverse, views: &[(String, SimulatedView)]) -> (Exploration, Vec<Prompt>) {
    let experts = views.iter().map(|(id, _)| ExpertRef::new(id.clone())).collect();
    let examples = vec![IncompleteContext::empty(u.clone()); views.len()];
    let mut x = Exploration::start(u.clone(), experts, examples, ImplicationSet::new(u.clone())).unwrap();
    let prompts = run_exploration(&mut x, views).unwrap();
    (x, prompts)
}

fn system_run(u: &AttributeUniverse, views: &[(String, SimulatedView)], tie: TieBreak) -> (SystemExploration, Vec<Prompt>) {
    let members: Vec<String> = views.iter().map(|(id, _)| id.clone()).collect();
    let experts = members.iter().map(|id| ExpertRef::new(id.clone())).collect();
    let schedule = SubsetSchedule::full(&members, tie).unwrap();
    let examples = vec![IncompleteContext::empty(u.clone()); views.len()];
    let mut sys = SystemExploration::start(u.clone(), experts, examples, None, schedule).unwrap();
    let prompts = run_system(&mut sys, views, 1).unwrap();
    (sys, prompts)
}

fn random_panel(rng: &mut ChaCha8Rng, u: &AttributeUniverse, k: usize) -> Vec<(String, SimulatedView)> {
    (0..k).map(|i| (format!("e{i}"), random_expert(rng, u))).collect()
}

fn completed_subposition(views: &[(String, SimulatedView)]) -> FormalContext {
    let parts: Vec<FormalContext> = views
        .iter()
        .map(|(_, v)| l_completion(v.context(), v.theory()).unwrap())
        .collect();
    FormalContext::subposition(&parts).unwrap()
}

fn printed_bases_reproduced() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let u = bsi_universe();
    let mut slowest = Duration::ZERO;
    for (id, printed) in bsi_bases(&u) {
        let start = Instant::now();
        let path = dir.path().join(format!("{id}.cxt"));
        std::fs::write(&path, write_cxt(&id, model_context(&printed).unwrap().as_incomplete()).unwrap()).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_fcax"))
            .args(["base", "--context", &path.display().to_string()])
            .output()
            .unwrap();
        ensure!(out.status.success(), "{id}: {}", String::from_utf8_lossy(&out.stderr));
        let got = parse_imp(&String::from_utf8(out.stdout).unwrap(), &u).unwrap();
        slowest = slowest.max(start.elapsed());
        ensure!(got.equivalent(&printed).unwrap(), "{id}: closure differs");
        ensure!(sorted_lines(&got) == sorted_lines(&printed), "{id}: {:?} vs {:?}", sorted_lines(&got), sorted_lines(&printed));
        ensure!(start.elapsed() < Duration::from_secs(1), "{id}: {:?}", start.elapsed());
    }
    Ok(format!("4 views, slowest {slowest:?}"))
}

fn full_group_base() -> Outcome {
    let u = bsi_universe();
    let (x, prompts) = group_run(&u, &bsi_views(&u));
    no_repeats(&prompts)?;
    let expected: Vec<(&[&str], &[&str])> = vec![
        (&["19", "21"], &["22"]),
        (&["19", "20", "21", "22"], &["18"]),
        (&["18", "22"], &["19"]),
        (&["18", "21"], &["20"]),
        (&["18", "19", "20", "22"], &["21"]),
    ];
    let expected = ImplicationSet::from_implications(
        u.clone(),
        expected.into_iter().map(|(p, c)| Implication::parse_names(&u, p, c).unwrap()),
    )
    .unwrap();
    ensure!(sorted_lines(&expected) == sorted_lines(&parse_imp(BSI_SHARED, &u).unwrap()), "fixture drifted");
    ensure!(
        sorted_lines(x.accepted()) == sorted_lines(&expected),
        "accepted {:?}",
        sorted_lines(x.accepted())
    );
    Ok(format!("{} implications, {} prompts", x.accepted().len(), prompts.len()))
}

fn subset_spot_checks() -> Outcome {
    let u = bsi_universe();
    let (sys, prompts) = system_run(&u, &bsi_views(&u), TieBreak::ReverseLexicographic);
    no_repeats(&prompts)?;
    ensure!(sys.results().len() == 15, "{} subsets explored", sys.results().len());
    let certified = |premise: &[&str], m: &str| -> Vec<String> {
        let imp = Implication::parse_names(&u, premise, &[m]).unwrap();
        ids()
            .into_iter()
            .filter(|e| background_for(sys.log(), &[e.clone()]).unwrap().follows(&imp).unwrap())
            .collect()
    };
    let a = certified(&["18", "20"], "21");
    ensure!(a == ["APP.1.1", "ORP.1"], "(18 20) -> (21) certified for {a:?}");
    let b = certified(&["22"], "21");
    ensure!(b.is_empty(), "(22) -> (21) certified for {b:?}");
    // the subset exploration of exactly these two certifies it as shared
    let pair = background_for(sys.log(), &["APP.1.1".into(), "ORP.1".into()]).unwrap();
    ensure!(pair.follows(&Implication::parse_names(&u, &["18", "20"], &["21"]).unwrap()).unwrap(), "pair");
    Ok(format!("15 subsets, {} prompts", prompts.len()))
}

fn oracle_equivalence() -> Outcome {
    let mut mismatches = Vec::new();
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = universe(rng.gen_range(1..=5));
        let k = rng.gen_range(1..=3);
        let views = random_panel(&mut rng, &u, k);
        let (x, prompts) = group_run(&u, &views);
        no_repeats(&prompts)?;
        let oracle = relative_canonical_base(&completed_subposition(&views), &ImplicationSet::new(u.clone())).unwrap();
        let rows = intents(&completed_subposition(&views));
        let n = u.len();
        let close = |p: Mask| context_closure(&rows, n, p);
        let brute: Vec<(Mask, Mask)> = pseudo_intents(n, &close, &[]).into_iter().map(|p| (p, close(p) & !p)).collect();
        let got = rules(&x.accepted().normalized());
        if got != rules(&oracle.normalized()) || got != brute {
            mismatches.push(seed);
            continue;
        }
        let examples = IncompleteContext::subposition(x.examples()).unwrap();
        for r in 0..=full(n) {
            let closed = x.accepted().closure(&set(&u, r)).unwrap();
            if closed != examples.max_satisfiable_conclusion(&set(&u, r)).unwrap() {
                mismatches.push(seed);
                break;
            }
        }
    }
    ensure!(mismatches.is_empty(), "mismatching seeds {mismatches:?}");
    Ok("200 instances, 0 mismatches".into())
}

fn shared_iff_valid_in_completion() -> Outcome {
    let mut checked = 0usize;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let u = universe(rng.gen_range(1..=5));
        let k = rng.gen_range(1..=3);
        let views = random_panel(&mut rng, &u, k);
        let rows = intents(&completed_subposition(&views));
        let n = u.len();
        let theories: Vec<Vec<(Mask, Mask)>> = views.iter().map(|(_, v)| rules(v.theory())).collect();
        for p in 0..=full(n) {
            for m in 0..n {
                let everywhere = theories.iter().all(|t| rule_closure(t, p) >> m & 1 == 1);
                let holds = context_closure(&rows, n, p) >> m & 1 == 1;
                ensure!(everywhere == holds, "seed {seed}: premise {p:b}, attribute {m}");
                checked += 1;
            }
        }
    }
    Ok(format!("100 instances, {checked} implications, 0 mismatches"))
}

fn canonical_base_brute_force() -> Outcome {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = universe(rng.gen_range(1..=5));
        let ctx = random_formal(&mut rng, &u, 6);
        let rows = intents(&ctx);
        let n = u.len();
        let close = |x: Mask| context_closure(&rows, n, x);
        let got = rules(&relative_canonical_base(&ctx, &ImplicationSet::new(u.clone())).unwrap());
        for (p, c) in &got {
            ensure!(subset(*c, close(*p)), "seed {seed}: unsound {p:b} -> {c:b}");
        }
        for (p, m) in valid_unit_implications(n, &close) {
            ensure!(rule_closure(&got, p) >> m & 1 == 1, "seed {seed}: misses {p:b} -> {m}");
        }
        for k in 0..got.len() {
            let rest: Vec<(Mask, Mask)> = got.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, r)| *r).collect();
            ensure!(!subset(got[k].1, rule_closure(&rest, got[k].0)), "seed {seed}: member {k} redundant");
        }
    }
    Ok("200 contexts, 0 failures".into())
}

fn no_repeated_prompts() -> Outcome {
    let mut runs = 0usize;
    let mut prompts = 0usize;
    let u = bsi_universe();
    for tie in [TieBreak::Lexicographic, TieBreak::ReverseLexicographic] {
        let (_, p) = system_run(&u, &bsi_views(&u), tie);
        no_repeats(&p)?;
        runs += 1;
        prompts += p.len();
    }
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = universe(rng.gen_range(1..=5));
        let k = rng.gen_range(1..=3);
        let views = random_panel(&mut rng, &u, k);
        let (_, p) = system_run(&u, &views, TieBreak::Lexicographic);
        no_repeats(&p).map_err(|e| format!("seed {seed}: {e}"))?;
        runs += 1;
        prompts += p.len();
    }
    Ok(format!("{runs} system runs, {prompts} prompts, 0 violations"))
}

fn random_session(seed: u64) -> SessionDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = universe(rng.gen_range(1..=5));
    let k = rng.gen_range(1..=3);
    let views = random_panel(&mut rng, &u, k);
    let experts: Vec<ExpertRef> = views.iter().map(|(id, _)| ExpertRef::named(id.clone(), format!("Expert {id}"))).collect();
    let examples: Vec<IncompleteContext> = views.iter().map(|(_, v)| v.context().clone()).collect();
    let steps = rng.gen_range(0..40);
    let answer = |q: &fcax_core::Question| {
        let (id, attrs) = q.outstanding.iter().find(|(_, a)| !a.is_empty()).unwrap().clone();
        let m = attrs.names().next().unwrap().to_string();
        let v = Expert::answer(&views.iter().find(|(v, _)| *v == id).unwrap().1, &q.premise, &m).unwrap();
        (id, m, v)
    };
    let state = if rng.gen_bool(0.5) {
        let mut x = Exploration::start(u.clone(), experts, examples, ImplicationSet::new(u.clone())).unwrap();
        for _ in 0..steps {
            let q = match x.question() {
                Some(q) => q,
                None => match x.next_question().unwrap() {
                    Some(q) => q,
                    None => break,
                },
            };
            let (id, m, v) = answer(&q);
            x.submit(&id, &m, v).unwrap();
        }
        SessionState::Group(x)
    } else {
        let members: Vec<String> = views.iter().map(|(id, _)| id.clone()).collect();
        let schedule = SubsetSchedule::full(&members, TieBreak::Lexicographic).unwrap();
        let mut s = SystemExploration::start(u.clone(), experts, examples, None, schedule).unwrap();
        for _ in 0..steps {
            let Some((_, q)) = s.next_question().unwrap() else { break };
            let (id, m, v) = answer(&q);
            s.submit(&id, &m, v).unwrap();
        }
        SessionState::System(s)
    };
    let mut doc = SessionDocument::new(state);
    doc.meta.insert("seed".into(), json!(seed));
    doc
}

fn format_round_trips() -> Outcome {
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = universe(rng.gen_range(0..=6));
        let ctx = random_incomplete(&mut rng, &u, 6);
        let text = write_cxt("k", &ctx).unwrap();
        let doc = parse_cxt(&text).map_err(|e| format!("context {seed}: {e}"))?;
        ensure!(write_cxt(&doc.name, &doc.context).unwrap() == text, "context {seed} changed");

        let l = random_theory(&mut rng, &u, 8);
        let text = write_imp(&l).unwrap();
        let back = parse_imp(&text, &u).map_err(|e| format!("implications {seed}: {e}"))?;
        ensure!(write_imp(&back).unwrap() == text, "implications {seed} changed");

        let session = random_session(seed);
        let text = save_session(&session);
        let back = load_session(&text).map_err(|e| format!("session {seed}: {e}"))?;
        ensure!(save_session(&back) == text, "session {seed} changed");
    }
    Ok("1000 contexts, 1000 implication sets, 1000 sessions".into())
}

async fn call(app: &axum::Router, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header(fcax_service::TOKEN_HEADER, t);
    }
    let body = body.map_or_else(Body::empty, |b| Body::from(b.to_string()));
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn parse(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

async fn service_replay_async() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let u = bsi_universe();
    let views = bsi_views(&u);
    let mut app = fcax_service::router(fcax_service::AppState::open(dir.path()).unwrap());
    let create = json!({ "attributes": BSI_ATTRIBUTES, "experts": IDS, "mode": "group" });
    let (status, out) = call(&app, "POST", "/sessions", None, Some(create)).await;
    ensure!(status == StatusCode::CREATED, "create: {status}");
    let out = parse(&out);
    let id = out["id"].as_str().unwrap().to_string();
    let tokens = out["tokens"].clone();
    let state_uri = format!("/sessions/{id}");
    let mut answered = 0usize;
    let mut reloads = 0usize;
    loop {
        if answered > 0 && answered % 10 == 0 {
            let (_, before) = call(&app, "GET", &state_uri, None, None).await;
            drop(app);
            app = fcax_service::router(fcax_service::AppState::open(dir.path()).unwrap());
            let (_, after) = call(&app, "GET", &state_uri, None, None).await;
            ensure!(before == after, "state changed across reload after {answered} answers");
            reloads += 1;
        }
        let (_, state) = call(&app, "GET", &state_uri, None, None).await;
        let state = parse(&state);
        let Some(outstanding) = state["question"]["outstanding"].as_object() else { break };
        let (expert, attr) = IDS
            .iter()
            .find_map(|e| {
                let a = outstanding.get(*e)?.as_array()?.first()?.as_str()?;
                Some((e.to_string(), a.to_string()))
            })
            .ok_or("open question without outstanding attributes")?;
        let premise_names: Vec<&str> = state["question"]["premise"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        let premise = u.set(premise_names).unwrap();
        let verdict = Expert::answer(&views.iter().find(|(v, _)| *v == expert).unwrap().1, &premise, &attr).unwrap();
        let mut body = json!({ "expert": expert, "premise": state["question"]["premise"], "attribute": attr, "ticket": state["ticket"] });
        match &verdict {
            Verdict::Yes => body["verdict"] = json!("yes"),
            Verdict::Unknown => body["verdict"] = json!("unknown"),
            Verdict::No(cx) => {
                body["verdict"] = json!("no");
                let cells: Vec<String> = cx.row.cells().iter().map(|c| c.mark().to_string()).collect();
                body["counterexample"] = json!({ "name": cx.name, "cells": cells });
            }
        }
        let (status, resp) = call(&app, "POST", &format!("{state_uri}/answers"), tokens[&expert].as_str(), Some(body.clone())).await;
        ensure!(status == StatusCode::OK, "answer rejected: {}", String::from_utf8_lossy(&resp));
        let (status, _) = call(&app, "POST", &format!("{state_uri}/answers"), tokens[&expert].as_str(), Some(body)).await;
        ensure!(status == StatusCode::CONFLICT, "replayed answer got {status}");
        answered += 1;
    }
    let (_, results) = call(&app, "GET", &format!("{state_uri}/results"), None, None).await;
    let results = parse(&results);
    ensure!(results["in_progress"] == json!(false), "not finished");
    let (x, _) = group_run(&u, &views);
    let local: Vec<String> = x.accepted().normalized().iter().map(implication_line).collect();
    ensure!(results["accepted"] == json!(local), "service {} vs in-process {local:?}", results["accepted"]);
    Ok(format!("{answered} answers, {reloads} reloads"))
}

fn service_replay() -> Outcome {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(service_replay_async())
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("printed bases reproduced from their model contexts", Duration::from_secs(4), printed_bases_reproduced),
        ("full-group shared base", Duration::from_secs(1), full_group_base),
        ("subset spot checks", Duration::from_secs(5), subset_spot_checks),
        ("exploration equals the oracle base", Duration::from_secs(60), oracle_equivalence),
        ("shared iff valid in the completed subposition", Duration::from_secs(60), shared_iff_valid_in_completion),
        ("canonical base against brute force", Duration::from_secs(60), canonical_base_brute_force),
        ("no repeated prompts", Duration::from_secs(60), no_repeated_prompts),
        ("format round trips", Duration::from_secs(60), format_round_trips),
        ("service replay with restarts", Duration::from_secs(60), service_replay),
    ];
    let mut failed = Vec::new();
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name}  ({took:.2?} of {limit:?})  {detail}"),
            Err(why) => {
                println!("FAIL  {name}  ({took:.2?} of {limit:?})  {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
