use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, Output};

use dpl::semantics::{from_json, satisfies, validate_structure, VStructure};
use dpl::syntax::parse_formula_open;
use graphviz_rust::dot_structures::{Attribute, EdgeTy, Graph, Id, Stmt, Vertex};

fn dpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpl"))
        .args(args)
        .output()
        .expect("run dpl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn text(id: &Id) -> String {
    match id {
        Id::Escaped(s) => s[1..s.len() - 1]
            .replace("\\\"", "\"")
            .replace("\\\\", "\\"),
        Id::Plain(s) | Id::Html(s) | Id::Anonymous(s) => s.clone(),
    }
}

fn attrs(list: &[Attribute]) -> BTreeMap<String, String> {
    list.iter().map(|Attribute(k, v)| (text(k), text(v))).collect()
}

fn split(s: &str, sep: &str) -> BTreeSet<String> {
    s.split(sep).filter(|x| !x.is_empty()).map(str::to_string).collect()
}

/// What a DOT file says about a model: per world its propositions and
/// permitted events, and the labeled transitions by world name.
#[derive(Debug, PartialEq, Eq)]
struct DotView {
    worlds: BTreeMap<String, (BTreeSet<String>, BTreeSet<String>)>,
    edges: BTreeSet<(String, String, String)>,
}

fn parse_dot(path: &Path) -> DotView {
    let source = std::fs::read_to_string(path).unwrap();
    let Graph::DiGraph { stmts, .. } = graphviz_rust::parse(&source).expect("valid DOT") else {
        panic!("not a digraph");
    };
    let mut names = BTreeMap::new();
    let mut worlds = BTreeMap::new();
    let mut edges = BTreeSet::new();
    for stmt in &stmts {
        match stmt {
            Stmt::Node(n) => {
                let a = attrs(&n.attributes);
                names.insert(text(&n.id.0), a["world"].clone());
                worlds.insert(
                    a["world"].clone(),
                    (split(&a["props"], ", "), split(&a["permitted"], "; ")),
                );
            }
            Stmt::Edge(e) => {
                let EdgeTy::Pair(Vertex::N(from), Vertex::N(to)) = &e.ty else {
                    panic!("unexpected edge shape");
                };
                let label = attrs(&e.attributes)["label"].clone();
                edges.insert((text(&from.0), label, text(&to.0)));
            }
            _ => {}
        }
    }
    let edges = edges
        .into_iter()
        .map(|(f, l, t)| (names[&f].clone(), l, names[&t].clone()))
        .collect();
    DotView { worlds, edges }
}

fn view_of(m: &VStructure) -> DotView {
    let worlds = m
        .worlds
        .iter()
        .enumerate()
        .map(|(w, name)| {
            let props = m
                .propositions
                .iter()
                .filter(|(_, ws)| ws.contains(&w))
                .map(|(p, _)| p.clone())
                .collect();
            let permitted = m
                .permitted
                .iter()
                .filter(|(pw, _)| *pw == w)
                .map(|&(_, e)| m.events[e].clone())
                .collect();
            (name.clone(), (props, permitted))
        })
        .collect();
    let edges = m
        .transitions
        .iter()
        .map(|&(w, e, v)| (m.worlds[w].clone(), m.events[e].clone(), m.worlds[v].clone()))
        .collect();
    DotView { worlds, edges }
}

#[test]
fn command_examples() {
    let o = dpl(&["prove", "--global", "([a]p && <a>q) -> <a>(p && q)"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "VALID\n"));

    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("cm.dot");
    let o = dpl(&["prove", "--global", "--dot", dot.to_str().unwrap(), "<a>p -> [a]p"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "INVALID\n"));
    let view = parse_dot(&dot);
    assert_eq!((view.worlds.len(), view.edges.len()), (3, 2));

    let o = dpl(&["atoms", "--vocab", "a,b", "a"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "a & !b\na & b\n"));
}

#[test]
fn dot_and_json_describe_the_same_model() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("m.dot");
    let json = dir.path().join("m.json");
    for (cmd, mode, formula) in [
        ("prove", "--global", "<a>p -> [a]p"),
        ("prove", "--global", "[a + b]p <-> [U]p"),
        ("sat", "--global", "P(a) && ~Pw(a) && <b>q"),
        ("sat", "--global", "<a>p && ~[a]p && Pw(b) && ~P(a + b)"),
        ("prove", "--vocab=a,b,c", "[a+b]p <-> [U]p"),
        ("sat", "--vocab=a,b", "a != b && <a & !b>(p && P(U)) && <b>~p"),
    ] {
        let f = parse_formula_open(formula).unwrap();
        let o = dpl(&[
            "-q",
            cmd,
            mode,
            "--dot",
            dot.to_str().unwrap(),
            "--json",
            json.to_str().unwrap(),
            formula,
        ]);
        assert!(matches!(o.status.code(), Some(0 | 1)), "{formula}: {}", stderr(&o));
        let m = from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(validate_structure(&m), Ok(()), "{formula}");
        let holds = satisfies(&m, 0, &f).unwrap();
        assert_eq!(holds, cmd == "sat", "{formula}");
        assert_eq!(parse_dot(&dot), view_of(&m), "{formula}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["prove", "-v", "--global", "(<a>p || Pw(b)) -> [a + b]p"];
    let first = dpl(&args);
    let second = dpl(&args);
    assert_eq!(first.stdout, second.stdout);
    let quiet = dpl(&["-q", "prove", "p -> p"]);
    assert!(quiet.stderr.is_empty());
    assert!(stderr(&dpl(&["prove", "p -> p"])).starts_with("dpl "));
}

#[test]
fn exit_codes() {
    assert_eq!(dpl(&["sat", "--vocab", "a", "<a>p && ~[a]p"]).status.code(), Some(1));
    assert_eq!(dpl(&["sat", "false"]).status.code(), Some(1));
    assert_eq!(dpl(&["sat", "<a>p && ~[a]p"]).status.code(), Some(0));
    // Usage and parse errors.
    for args in [
        &["prove"][..],
        &["prove", "--global", "--vocab", "a", "p"],
        &["prove", "[a]p &&"],
        &["prove", "--vocab", "a", "[b]p"],
        &["prove", "_x -> _x"],
        &["prove", "[a](a = b)"],
        &["frobnicate"],
    ] {
        let o = dpl(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    // Resource limits.
    assert_eq!(dpl(&["prove", "--max-fresh", "1", "<a>p -> [a]p"]).status.code(), Some(3));
    let wide: Vec<String> = (0..25).map(|i| format!("x{i}")).collect();
    let wide = wide.join(",");
    assert_eq!(dpl(&["prove", "--vocab", &wide, "p -> p"]).status.code(), Some(3));
    // Help is not an error.
    assert_eq!(dpl(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_point_at_the_problem() {
    let o = dpl(&["-q", "prove", "[a]p && (q"]);
    let err = stderr(&o);
    assert!(err.contains("line 1, column 11"), "{err}");
    assert!(err.contains("[a]p && (q\n"), "{err}");
    assert!(err.lines().any(|l| l.trim_end().ends_with('^')), "{err}");
}

#[test]
fn batch_mode_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("batch.txt");
    let mut lines = vec!["# valid and invalid formulae".to_string()];
    for i in 0..12 {
        lines.push(if i % 3 == 0 {
            format!("<a>p{i} -> [a]p{i}")
        } else {
            format!("([a]p{i} && <a>q) -> <a>(p{i} && q)  # axiom")
        });
    }
    std::fs::write(&file, lines.join("\n")).unwrap();
    let path = file.to_str().unwrap();
    let seq = dpl(&["-q", "prove", "-f", path]);
    let par = dpl(&["-q", "prove", "-f", path, "--jobs", "4"]);
    assert_eq!(seq.status.code(), Some(1));
    assert_eq!(seq.stdout, par.stdout);
    let out = stdout(&seq);
    let verdicts: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    let expected: Vec<&str> = (0..12).map(|i| if i % 3 == 0 { "INVALID" } else { "VALID" }).collect();
    assert_eq!(verdicts, expected);

    std::fs::write(&file, "p -> p\n[a]p &&\n<a>p -> [a]p\n").unwrap();
    let o = dpl(&["-q", "prove", "-f", path]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));

    assert_eq!(dpl(&["prove", "-f", path, "--dot", "x.dot"]).status.code(), Some(2));
}

#[test]
fn traces_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("t.json");
    let txt = dir.path().join("t.txt");
    let o = dpl(&[
        "-q",
        "prove",
        "--trace",
        json.to_str().unwrap(),
        "--trace-text",
        txt.to_str().unwrap(),
        "P(a + b) -> P(a)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(trace["root"].is_object());
    assert!(std::fs::read_to_string(&txt).unwrap().contains("closed"));
}

#[test]
fn atoms_under_equations() {
    let o = dpl(&["-q", "atoms", "--vocab", "a,b,c", "--eq", "a = b", "a + c"]);
    // Ascending bit pattern, a being the lowest bit.
    assert_eq!(stdout(&o), "a & b & !c\n!a & !b & c\na & b & c\n");
    let o = dpl(&["-q", "atoms", "--eq", "a & b = 0", "U"]);
    assert_eq!(stdout(&o), "a & !b\n!a & b\n");
    assert_eq!(dpl(&["-q", "atoms", "--eq", "p", "a"]).status.code(), Some(2));
}
