//! Printer/parser fidelity on random syntax trees and on the bundled corpus.

use bvalid::harness::BUNDLED_MACHINES;
use bvalid::laws::bundled_corpus;
use bvalid::syntax::*;

mod common;
use common::{depth_of, Gen};

#[test]
fn random_trees_survive_print_and_parse() {
    let mut g = Gen::new(0x5eed);
    let mut failures = Vec::new();
    for i in 0..1000 {
        if i % 2 == 0 {
            let p = g.pred(6);
            assert!(depth_of(Child::Pred(&p)) <= 6);
            let text = print_pred(&p);
            match parse_pred(&text) {
                Ok(q) if q == p => {}
                Ok(q) => failures.push(format!("{text}\n  reprinted as {}", print_pred(&q))),
                Err(e) => failures.push(format!("{text}\n  {e}")),
            }
        } else {
            let e = g.expr(6);
            assert!(depth_of(Child::Expr(&e)) <= 6);
            let text = print_expr(&e);
            match parse_expr(&text) {
                Ok(f) if f == e => {}
                Ok(f) => failures.push(format!("{text}\n  reprinted as {}", print_expr(&f))),
                Err(err) => failures.push(format!("{text}\n  {err}")),
            }
        }
    }
    assert!(failures.is_empty(), "{} of 1000 failed:\n{}", failures.len(), failures[..failures.len().min(10)].join("\n"));
}

fn corpus_texts() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = bundled_corpus().into_iter().map(|l| (l.name, l.text)).collect();
    out.extend(BUNDLED_MACHINES.iter().map(|(n, t)| (n.to_string(), t.to_string())));
    out
}

#[test]
fn corpus_print_is_idempotent_and_faithful() {
    for (name, text) in corpus_texts() {
        let rep = roundtrip_check(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(rep.pass, "{name}: {:?}", rep.divergence);
        let a = parse_any(&text).unwrap();
        assert_eq!(parse_any(&print_ast(&a)).unwrap(), a, "{name}");
    }
}

#[test]
fn positions_lie_within_the_input() {
    for (name, text) in corpus_texts() {
        let lines: Vec<&str> = text.lines().collect();
        let inside = |p: Pos| {
            p.line >= 1
                && (p.line as usize) <= lines.len()
                && p.col >= 1
                && (p.col as usize) <= lines[p.line as usize - 1].chars().count() + 1
        };
        let mut check = |c: Child<'_>| assert!(inside(c.pos()), "{name}: node at {} outside input", c.pos());
        match parse_any(&text).unwrap() {
            Ast::Pred(p) => Child::Pred(&p).walk(&mut check),
            Ast::Expr(e) => Child::Expr(&e).walk(&mut check),
            Ast::Machine(m) => {
                Child::Pred(&m.properties).walk(&mut check);
                for a in &m.assertions {
                    Child::Pred(a).walk(&mut check);
                }
            }
        }
    }
}
