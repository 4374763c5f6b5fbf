//! Acceptance criteria 1 to 8, one line each. Exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use foliage::baire::{Class, CompactCode, Point, SetExpr};
use foliage::config::{parse_config, RunConfig};
use foliage::driver::{cmd_run, cmd_verify_laws};
use foliage::laws::{default_compacts, run_suites, shoot_lemma_check, LawConfig};
use foliage::pipeline::{hybrid_checks, pipeline_run, PiHybrid, PiNode, PipelineState, ShootCase, StdLazy, Trunc};
use foliage::report::{CheckRecord, Report};
use foliage::seq::Seq;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_pass<'a>(records: impl IntoIterator<Item = &'a CheckRecord>) -> Result<usize, String> {
    let mut n = 0;
    for r in records {
        ensure(r.passed(), || format!("{} failed: {} {:?}", r.id, r.detail, r.params))?;
        n += 1;
    }
    Ok(n)
}

fn param(r: &CheckRecord, key: &str) -> u64 {
    r.params.get(key).and_then(|v| v.as_u64()).unwrap_or(0)
}

fn one<'a>(report: &'a Report, id: &str) -> Result<&'a CheckRecord, String> {
    let found: Vec<&CheckRecord> = report.find(id).collect();
    match found[..] {
        [r] => Ok(r),
        _ => Err(format!("expected one {id} record, found {}", found.len())),
    }
}

fn criterion_1() -> Verdict {
    let report = run_suites(&["lemma-2.6"], &LawConfig::default()).map_err(|e| e.to_string())?;
    all_pass(&report.records)?;
    // Labeled rooted forests on n nodes: (n + 1)^(n - 1).
    let forests = |n: u64| if n == 0 { 1 } else { (n + 1).pow(n as u32 - 1) };
    let e = one(&report, "enumerator")?;
    ensure(param(e, "count_3") == forests(3), || format!("count_3 = {}", param(e, "count_3")))?;
    let total: u64 = (0..=5).map(forests).sum();
    for c in "abcdefgh".chars() {
        let r = one(&report, &format!("lemma-2.6({c})"))?;
        ensure(param(r, "instances") == total, || format!("({c}) saw {} forests, want {total}", param(r, "instances")))?;
    }
    Ok(format!("{total} labeled forests, 16 on three nodes"))
}

fn criterion_2() -> Verdict {
    let report = run_suites(&["prop-5.8", "prop-5.10(a)"], &LawConfig::default()).map_err(|e| e.to_string())?;
    all_pass(&report.records)?;
    let axioms = one(&report, "prop-5.8")?;
    let closure = one(&report, "remark-5.7")?;
    let sons = one(&report, "prop-5.10(a)")?;
    ensure(param(axioms, "instances") > 0 && param(closure, "instances") == param(axioms, "instances"), || {
        "closure oracle did not see every family".into()
    })?;
    Ok(format!(
        "{} families, {} son checks",
        param(axioms, "instances"),
        param(sons, "applicable")
    ))
}

fn criterion_3() -> Verdict {
    let cfg = LawConfig::default();
    let report = run_suites(&["prop-5.17"], &cfg).map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for tier in [1, 2] {
        for c in ["a", "b", "c", "d", "d,strict"] {
            let id = format!("prop-5.17({c})");
            let r = report
                .find(&id)
                .find(|r| param(r, "tier") == tier)
                .ok_or_else(|| format!("no tier {tier} record for {id}"))?;
            all_pass([r])?;
            if c == "a" {
                counts.push(param(r, "instances"));
            }
        }
    }
    ensure(counts[1] == cfg.tier2_samples as u64, || format!("tier 2 ran {} instances", counts[1]))?;
    Ok(format!("{} tier-1 and {} tier-2 instances", counts[0], counts[1]))
}

fn criterion_4() -> Verdict {
    let cfg = LawConfig {
        compacts: vec![CompactCode::zero(), CompactCode::branching(2, 2)],
        trunc: Trunc::new(4, 4, 2),
        ..LawConfig::default()
    };
    let report = run_suites(&["a*", "e*", "b5"], &cfg).map_err(|e| e.to_string())?;
    all_pass(&report.records)?;
    for compact in 0..2u64 {
        let ids: BTreeSet<&str> = report
            .records
            .iter()
            .filter(|r| r.params.get("compact").and_then(|v| v.as_u64()) == Some(compact))
            .map(|r| r.id.as_str())
            .collect();
        let want: Vec<String> = (1..=11).map(|i| format!("a{i}")).chain((1..=7).map(|i| format!("e{i}"))).chain(["b5".into()]).collect();
        for id in &want {
            ensure(ids.contains(id.as_str()), || format!("compact {compact} lacks {id}"))?;
        }
    }
    Ok(format!("{} blueprint records", report.records.len()))
}

fn criterion_5() -> Verdict {
    let compacts = default_compacts();
    let trunc = Trunc::new(4, 4, 2);
    let mut total = 0;
    for k in 1..=3 {
        let run = pipeline_run(&compacts[..k], k, trunc).map_err(|e| e.to_string())?;
        total += all_pass(&run.records)?;
        for stage in 0..k as u64 {
            for g in 1..=6 {
                let id = format!("g{g}");
                ensure(
                    run.records.iter().any(|r| r.id == id && param(r, "stage") == stage),
                    || format!("{k} compacts: no {id} after stage {stage}"),
                )?;
            }
        }
        let exact = run.records.iter().filter(|r| r.id == "g6").all(|r| r.params["exact"] == true);
        ensure(exact, || format!("{k} compacts: loss not exactly the removed set"))?;
    }
    Ok(format!("{total} stage checks over 1, 2 and 3 compacts"))
}

/// `Y = ω^ω \ {0^ω}` at truncation 4/4/2.
fn punctured() -> PipelineState {
    pipeline_run(&[CompactCode::zero()], 1, Trunc::new(4, 4, 2))
        .expect("one-point removal runs")
        .state
}

fn criterion_6() -> Verdict {
    let h = PiHybrid::new(&punctured());
    let records = hybrid_checks(&h, 5, 4, 50, 0).map_err(|e| e.to_string())?;
    all_pass(&records)?;
    let find = |id: &str| records.iter().find(|r| r.id == id).ok_or_else(|| format!("no {id} record"));
    for id in ["pi-rooted", "pi-splittable", "pi-avoids-loss", "pi-confined"] {
        find(id)?;
    }
    ensure(param(find("pi-locally-strict")?, "interior") > 0, || "no interior node was checked".into())?;

    let w = h.materialize(5, 4).map_err(|e| e.to_string())?;
    let skel = w.foliage.skeleton();
    ensure(skel.least().map(|i| w.node(i)) == Some(&PiNode::Supp(Seq::empty())), || "not rooted at the empty sequence".into())?;

    let zero = Point::new(Seq::empty());
    let probe = Seq::zeros(5);
    let mut split = 0;
    for n in &w.nodes {
        let leaf = w.leaf(n);
        ensure(!leaf.contains(&zero), || format!("leaf of {n:?} holds the removed point"))?;
        match leaf.classify(&probe) {
            Class::Inside => return Err(format!("leaf of {n:?} covers {probe}")),
            Class::Split => split += 1,
            Class::Outside => {}
        }
    }

    for b in skel.branches() {
        let fruit = b.iter().fold(SetExpr::Full, |acc, &i| SetExpr::inter(acc, w.leaf(w.node(i)).clone()));
        let top = b.iter().copied().max_by_key(|&i| skel.height_of(i).unwrap()).unwrap();
        let coord = w.node(top).coordinate();
        let confined = (0..=coord.len()).rev().find(|&l| fruit.subset_exact(&SetExpr::cyl(coord.restrict(l))));
        let l = confined.ok_or_else(|| format!("fruit of the branch at {coord} lies in no cylinder"))?;
        ensure(l + 2 >= b.len(), || format!("branch of {} nodes at {coord} only confined to length {l}", b.len()))?;
    }
    Ok(format!(
        "{} nodes, {} branches, {} leaves split at {probe}, none inside",
        w.nodes.len(),
        skel.branches().len(),
        split
    ))
}

fn criterion_7() -> Verdict {
    let h = PiHybrid::new(&punctured());
    let samples = h.sample_pairs(0, 50, 5, 4);
    ensure(samples.len() == 50, || format!("only {} samples", samples.len()))?;
    let certs = h.shoots_into_check(&samples, 4).map_err(|e| e.to_string())?;
    let mut cases = BTreeSet::new();
    for (case, cert) in &certs {
        ensure(cert.holds(), || format!("certificate for {} fails: {}", cert.target, cert.refinement.detail))?;
        let embed = |n: &PiNode| match n {
            PiNode::Supp(s) => Some(s.clone()),
            PiNode::Imp { .. } => None,
        };
        shoot_lemma_check(&h, &cert.witness, &StdLazy, &cert.target, &cert.exceptions, embed, 4)?;
        cases.insert(*case);
    }
    ensure(cases.contains(&ShootCase::Support) && cases.contains(&ShootCase::Blueprint), || {
        format!("cases covered: {cases:?}")
    })?;
    let support = certs.iter().filter(|(c, _)| *c == ShootCase::Support).count();
    Ok(format!("{support} support and {} blueprint certificates", certs.len() - support))
}

fn criterion_8() -> Verdict {
    let text = r#"{"pipeline": {"compacts": [{"table": {}, "depth": 0}, {"table": {"": [0, 1], "0": [0, 1], "1": [0, 1]}, "depth": 2}]}, "seed": 11, "suites": ["pi-refines", "lemma-about-shoots"]}"#;
    let cfg: RunConfig = parse_config(text).map_err(|e| e.to_string())?;
    let a = cmd_run(&cfg).map_err(|e| e.to_string())?;
    let b = cmd_run(&cfg).map_err(|e| e.to_string())?;
    ensure(a.report.to_json() == b.report.to_json(), || "run reports differ".into())?;
    ensure(a.dot() == b.dot() && a.json() == b.json(), || "exports differ".into())?;
    let x = cmd_verify_laws(&cfg).map_err(|e| e.to_string())?.to_json();
    let y = cmd_verify_laws(&cfg).map_err(|e| e.to_string())?.to_json();
    ensure(x == y, || "law reports differ".into())?;
    Ok(format!("{} bytes of run report, {} of law report", a.report.to_json().len(), x.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("order laws on forests up to five nodes", criterion_1),
        ("hybrid axioms and closure oracle", criterion_2),
        ("foliage hybrid preservation", criterion_3),
        ("blueprint fidelity", criterion_4),
        ("pipeline invariants", criterion_5),
        ("end-to-end tree on the punctured space", criterion_6),
        ("shoots-into certificates", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let took = start.elapsed();
        let secs = Duration::as_secs_f64(&took);
        match verdict {
            Ok(note) => println!("criterion {}: PASS {name} ({note}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
