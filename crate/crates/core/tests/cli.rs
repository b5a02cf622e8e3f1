use std::process::Command;

use finalg::cli::{run_document, RunOptions};
use finalg::dsl::*;
use finalg::report::Report;
use proptest::prelude::*;
use serde_json::{json, Value};

const GREEN3: &str = include_str!("data/green3.fa");
const TOUR: &str = include_str!("data/tour.fa");

fn run(src: &str, opts: &RunOptions) -> Report {
    run_document(&parse(src).unwrap(), opts)
}

fn output<'a>(r: &'a Report, command: &str, target: &str) -> &'a Value {
    let hit = r.results.iter().find(|x| x.command == command && x.target.as_deref() == Some(target)).unwrap();
    assert!(hit.ok, "{command} {target}: {:?}", hit.error);
    &hit.output
}

#[test]
fn green_source_builds_dimension_eight() {
    let r = run(GREEN3, &RunOptions::default());
    assert!(r.is_ok());
    assert_eq!(output(&r, "dims", "G3")["dim"], json!("8"));
    assert_eq!(output(&r, "gldim", "G3")["gldim"], json!("3"));
}

#[test]
fn documented_command_examples() {
    let r = run(TOUR, &RunOptions::default());
    assert!(r.is_ok(), "{}", r.to_text());
    assert_eq!(output(&r, "gldim", "G4")["gldim"], json!("4"));
    assert_eq!(output(&r, "chi", "F")["matrix"], json!([["2", "3"], ["1", "2"]]));
    let real = output(&r, "realize", "R");
    assert_eq!(real["factors"], json!("3"));
    assert_eq!(real["chi"], json!([["0", "-1"], ["1", "0"]]));
    assert_eq!(real["chi_equals_input"], json!(true));
    assert_eq!(output(&r, "cohomology", "D")["dims"], json!({"-1": "0", "0": "2"}));
    assert_eq!(output(&r, "gldim", "KK")["gldim"], json!("5"));
    assert_eq!(output(&r, "gamma", "KK")["gldim"], json!("5"));
}

#[test]
fn reports_are_deterministic() {
    let opts = RunOptions::default();
    let a = run(TOUR, &opts).to_json();
    let b = run(TOUR, &opts).to_json();
    assert_eq!(a, b);
    let par = run(TOUR, &RunOptions { parallel: true, ..RunOptions::default() }).to_json();
    assert_eq!(a, par);
    let back = Report::from_json(&a).unwrap();
    assert_eq!(back.to_json(), a);
}

#[test]
fn report_all_and_cmd_filter() {
    let src = "algebra G2 = green(k=2)\nmatrix M = [[1,1],[0,1]]\n";
    let r = run(src, &RunOptions::default());
    let names: Vec<(&str, &str)> = r.results.iter().map(|x| (x.command.as_str(), x.target.as_deref().unwrap())).collect();
    assert!(names.contains(&("gldim", "G2")) && names.contains(&("factor-sl", "M")));
    assert!(r.is_ok(), "{}", r.to_text());
    let only = run(src, &RunOptions { only: Some("chi".into()), ..RunOptions::default() });
    assert_eq!(only.results.len(), 1);
    assert_eq!(output(&only, "chi", "G2")["matrix"], json!([["2", "1"], ["1", "1"]]));
}

#[test]
fn seed_override_replaces_document_seeds() {
    let gamma = |src: &str, seed: Option<u64>| {
        let r = run(src, &RunOptions { seed_override: seed, only: Some("gamma".into()), ..RunOptions::default() });
        output(&r, "gamma", "F")["family"].clone()
    };
    let doc = |s: u64| format!("family F = rfamily(n=3, m=2, k=1, seed={s})\n");
    assert_ne!(gamma(&doc(1), None), gamma(&doc(2), None));
    assert_eq!(gamma(&doc(1), Some(2)), gamma(&doc(2), None));
}

#[test]
fn computation_errors_are_reported() {
    let r = run("matrix M = [[2,0],[0,1]]\nrun factor-sl M\nrun realize M\n", &RunOptions::default());
    assert!(!r.is_ok());
    assert!(r.results.iter().all(|x| !x.ok && x.error.is_some()));
    // a truncation that leaves a nonzero path of the bound length
    let src = "quiver Q { vertices 1; arrow x: 1 -> 1 deg 0; }\nrelations I on Q { x*x*x = 0; } trunc 2\n\
               algebra A = quotient(Q, I)\nrun dims A\n";
    let r = run(src, &RunOptions::default());
    assert!(r.results[0].error.as_ref().unwrap().contains("could not be built"));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finalg"))
}

fn write_temp(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("finalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn exit_codes_and_json_output() {
    let good = write_temp("good.fa", GREEN3);
    let out_json = good.with_extension("json");
    let st = bin().arg("run").arg(&good).arg("--json").arg(&out_json).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let report = Report::from_json(&std::fs::read_to_string(&out_json).unwrap()).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!(String::from_utf8(st.stdout).unwrap(), report.to_text());

    let bad = write_temp("bad.fa", "quiver Q { vertices 2; arrow c1: 1 -> }\n");
    let st = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8(st.stderr).unwrap().contains(":1:"));

    let failing = write_temp("fail.fa", "matrix M = [[2,0],[0,1]]\nrun factor-sl M\n");
    assert_eq!(bin().arg("run").arg(&failing).output().unwrap().status.code(), Some(1));

    let st = bin().arg("run").arg(&good).arg("--cmd").arg("chi").env("FINALG_SEED", "5").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert_eq!(String::from_utf8(st.stdout).unwrap(), "== chi G3 ==\n  matrix  [[2, 3], [1, 2]]\n");
}

#[test]
fn fmt_prints_canonical_form() {
    let p = write_temp("fmt.fa", "algebra  A=green( k = 2 )   # comment\nrun gldim A   bound = 4\n");
    let st = bin().arg("fmt").arg(&p).output().unwrap();
    assert_eq!(String::from_utf8(st.stdout).unwrap(), "algebra A = green(k=2)\nrun gldim A bound=4\n");
}

// canonical documents built from random statements

fn lincomb(words: Vec<String>) -> impl Strategy<Value = LinComb> {
    let n = words.len();
    prop::collection::vec((-3i64..=3, 1i64..=3, 0..n), 1..4).prop_map(move |terms| {
        let mut out: LinComb = Vec::new();
        for (num, den, w) in terms {
            if num == 0 || out.iter().any(|(_, p)| *p == words[w]) {
                continue;
            }
            out.push((finalg::exactmat::qfrac(num, den), words[w].clone()));
        }
        if out.is_empty() {
            out.push((finalg::exactmat::qfrac(1, 1), words[0].clone()));
        }
        out
    })
}

fn doc_strategy() -> impl Strategy<Value = WorkspaceDoc> {
    let arrows = prop::collection::vec((1usize..=2, 1usize..=2, -2i64..=2), 1..4);
    (arrows, prop::option::of(1usize..6), 0usize..4, prop::collection::vec(prop::collection::vec(-9i64..=9, 2), 2))
        .prop_flat_map(|(arrows, trunc, k, mrows)| {
            let decls: Vec<ArrowDecl> = arrows
                .iter()
                .enumerate()
                .map(|(i, &(s, t, d))| ArrowDecl { name: format!("x{}", i + 1), source: s, target: t, degree: d })
                .collect();
            let words: Vec<String> = decls.iter().map(|a| a.name.clone()).chain(["e1".to_string(), "e2".to_string()]).collect();
            (Just(decls), Just(trunc), Just(k), Just(mrows), prop::collection::vec(lincomb(words), 1..3))
        })
        .prop_map(|(arrows, trunc, k, mrows, relations)| {
            let stmt = |kind| Stmt { line: 0, col: 0, kind };
            let rows = mrows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect();
            WorkspaceDoc {
                stmts: vec![
                    stmt(StmtKind::Quiver { name: "Q".into(), vertices: 2, arrows }),
                    stmt(StmtKind::Relations { name: "I".into(), quiver: "Q".into(), relations, trunc }),
                    stmt(StmtKind::Algebra {
                        name: "A".into(),
                        expr: AlgebraExpr::Quotient { quiver: "Q".into(), relations: Some("I".into()), differential: vec![] },
                    }),
                    stmt(StmtKind::Algebra { name: "G".into(), expr: AlgebraExpr::Green { k } }),
                    stmt(StmtKind::Family { name: "F".into(), expr: FamilyExpr::Random { n: 3, m: 2, k: 1, seed: k as u64 } }),
                    stmt(StmtKind::Matrix { name: "M".into(), rows }),
                    stmt(StmtKind::Run { command: "gldim".into(), target: Some("A".into()), args: vec![("bound".into(), Arg::Int(k.into()))] }),
                    stmt(StmtKind::Run { command: "factor-sl".into(), target: Some("M".into()), args: vec![] }),
                ],
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_print_round_trip(doc in doc_strategy()) {
        let text = doc.to_string();
        let parsed = parse(&text).unwrap();
        prop_assert_eq!(parsed.to_string(), text.clone());
        let kinds: Vec<&StmtKind> = parsed.stmts.iter().map(|s| &s.kind).collect();
        let expected: Vec<&StmtKind> = doc.stmts.iter().map(|s| &s.kind).collect();
        prop_assert_eq!(kinds, expected);
    }
}

#[test]
fn schema_document_lists_every_command() {
    let schema: Value = serde_json::from_str(include_str!("../../../docs/report.schema.json")).unwrap();
    let listed: Vec<&str> =
        schema["$defs"]["result"]["properties"]["command"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let expected: Vec<&str> = COMMANDS.iter().copied().filter(|c| *c != "report-all").collect();
    assert_eq!(listed, expected);
    for c in expected {
        assert!(schema["$defs"]["outputs"].get(c).is_some(), "{c}");
    }
}
