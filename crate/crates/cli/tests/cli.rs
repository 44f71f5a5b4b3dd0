#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use fcax_core::fixtures::{bsi_bases, bsi_universe, BSI_BASES};
use fcax_core::formats::{parse_imp, write_cxt, write_imp};
use fcax_core::model_context;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fcax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcax")).args(args).output().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/bsi")
}

fn bsi_view_args() -> Vec<String> {
    let f = fixtures();
    BSI_BASES
        .iter()
        .flat_map(|(id, _)| {
            [
                "--view".to_string(),
                format!("{id}={}:{}", f.join("attributes.cxt").display(), f.join(format!("{id}.imp")).display()),
            ]
        })
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn base_of_the_orp_model_context_is_its_printed_base() {
    let dir = tempfile::tempdir().unwrap();
    let u = bsi_universe();
    let (_, orp) = bsi_bases(&u).into_iter().find(|(id, _)| id == "ORP.1").unwrap();
    let ctx = write(dir.path(), "orp.cxt", &write_cxt("orp", model_context(&orp).unwrap().as_incomplete()).unwrap());
    let printed = ok(&fcax(&["base", "--context", &ctx]));
    assert_eq!(printed, "-> 19\n19 21 -> 18 20 22\n19 20 -> 18 21 22\n");
    let own = write(dir.path(), "orp.imp", &printed);
    assert_eq!(ok(&fcax(&["base", "--context", &ctx, "--background", &own])), "");
}

#[test]
fn base_matches_the_brute_force_oracle() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = universe(rng.gen_range(1..=5));
        let ctx = random_formal(&mut rng, &u, 6);
        let path = write(dir.path(), "k.cxt", &write_cxt("k", ctx.as_incomplete()).unwrap());
        let printed = ok(&fcax(&["base", "--context", &path]));
        let rows = intents(&ctx);
        let n = u.len();
        let close = |x: Mask| context_closure(&rows, n, x);
        let got = rules(&parse_imp(&printed, &u).unwrap());
        let expected: Vec<(Mask, Mask)> = pseudo_intents(n, &close, &[])
            .into_iter()
            .map(|p| (p, close(p) & !p))
            .collect();
        assert_eq!(got, expected, "seed {seed}");
    }
}

#[test]
fn base_rejects_incomplete_contexts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "k.cxt", "B\nk\n1\n2\n\ng\na\nb\nX?\n");
    let out = fcax(&["base", "--context", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("formal"));
}

#[test]
fn explore_without_views_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fcax(&["explore", "--out", &dir.path().display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn one_view_explores_to_its_canonical_base() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let u = universe(rng.gen_range(1..=5));
        let ctx = random_formal(&mut rng, &u, 6);
        let path = write(dir.path(), "k.cxt", &write_cxt("k", ctx.as_incomplete()).unwrap());
        let out = dir.path().join(format!("run{seed}"));
        ok(&fcax(&["explore", "--view", &format!("e={path}"), "--out", &out.display().to_string()]));
        let accepted = std::fs::read_to_string(out.join("accepted.imp")).unwrap();
        let expected = write_imp(&fcax_core::canonical_base(&ctx).unwrap().normalized()).unwrap();
        assert_eq!(accepted, expected, "seed {seed}");
    }
}

#[test]
fn system_run_output_is_deterministic_and_parallel_safe() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args: Vec<String> = vec!["explore".into(), "--mode".into(), "system".into(), "--complete".into()];
        args.extend(bsi_view_args());
        args.extend(extra.iter().map(|s| s.to_string()));
        args.extend(["--out".into(), out.display().to_string()]);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        ok(&fcax(&refs));
        out
    };
    let a = run("a", &[]);
    let b = run("b", &[]);
    let c = run("c", &["--jobs", "4"]);
    let files: Vec<PathBuf> = walk(&a);
    assert!(files.len() > 20);
    for f in &files {
        let rel = f.strip_prefix(&a).unwrap();
        assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.join(rel)).unwrap(), "{}", rel.display());
    }
    // parallel runs certify the same implications
    let text = |p: &Path| std::fs::read_to_string(p).unwrap();
    assert_eq!(text(&a.join("accepted.imp")), text(&c.join("accepted.imp")));
    let lattice = ok(&fcax(&["lattice", "--shared", &a.join("C.cxt").display().to_string()]));
    let block = lattice
        .split("concept ")
        .find(|b| b.contains("experts {APP.1.1, ORP.1}\n"))
        .expect("concept for APP.1.1 and ORP.1");
    assert!(block.lines().any(|l| l.trim() == "18 20 -> 21"), "{block}");
    let report = ok(&fcax(&["report", "--session", &a.display().to_string()]));
    assert!(report
        .lines()
        .any(|l| l.contains("20 21 22 -> 18") && l.contains("dissenting: SYS.1.1")));
    let json: serde_json::Value =
        serde_json::from_str(&ok(&fcax(&["report", "--session", &a.display().to_string(), "--format", "json"]))).unwrap();
    assert!(json.is_object());
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn lattice_of_small_shared_contexts() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "c.cxt", "B\nC\n0\n0\n\n");
    assert_eq!(ok(&fcax(&["lattice", "--shared", &empty])), "concept 0: experts {}\n");

    // two experts: q1 shared, q2 only for e1, q3 for nobody
    let toy = write(dir.path(), "t.cxt", "B\nC\n3\n2\n\na -> b\nb -> a\n-> a\ne1\ne2\nXX\nX.\n..\n");
    let text = ok(&fcax(&["lattice", "--shared", &toy]));
    assert_eq!(
        text,
        "concept 0: experts {}\n  a -> b\n  b -> a\n  -> a\nconcept 1: experts {e1}\n  a -> b\n  b -> a\nconcept 2: experts {e1, e2}\n  a -> b\n"
    );
    let dot = ok(&fcax(&["lattice", "--shared", &toy, "--format", "dot"]));
    assert!(dot.starts_with("digraph shared {"));
    assert!(dot.contains("c0 -> c1;") && dot.contains("c1 -> c2;") && !dot.contains("c0 -> c2;"));
}

#[test]
fn report_sections() {
    let dir = tempfile::tempdir().unwrap();
    let agree = write(dir.path(), "a.cxt", "B\nA\n1\n2\n\ng\na\nb\nXX\n");
    let out = dir.path().join("quiet");
    ok(&fcax(&["explore", "--view", &format!("e1={agree}"), "--view", &format!("e2={agree}"), "--out", &out.display().to_string()]));
    let text = ok(&fcax(&["report", "--session", &out.display().to_string()]));
    assert_eq!(text.matches("  none\n").count(), 4, "{text}");

    // the same object name with opposite cells in two views
    let left = write(dir.path(), "l.cxt", "B\nL\n1\n2\n\ng\na\nb\nX.\n");
    let right = write(dir.path(), "r.cxt", "B\nR\n1\n2\n\ng\na\nb\n.X\n");
    let out = dir.path().join("flipped");
    ok(&fcax(&["explore", "--view", &format!("e1={left}"), "--view", &format!("e2={right}"), "--out", &out.display().to_string()]));
    let text = ok(&fcax(&["report", "--session", &out.display().to_string()]));
    let c = text.split("(c)").nth(1).unwrap().split("(d)").next().unwrap();
    assert!(c.contains('g') && !c.contains("none"), "{text}");
}

#[test]
fn explore_rejects_mismatched_views() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.cxt", "B\nA\n0\n1\n\na\n");
    let b = write(dir.path(), "b.cxt", "B\nB\n0\n1\n\nb\n");
    let out = fcax(&["explore", "--view", &format!("x={a}"), "--view", &format!("y={b}"), "--out", &dir.path().join("o").display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}
