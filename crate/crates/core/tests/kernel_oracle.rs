//! Kernel operators against brute-force comprehension definitions over a
//! carrier of size 2.

use bvalid::kernel::{ops, EvalContext};
use bvalid::value::{enumerate_type, BType, Scope, Value};

mod common;
use common::oracle;

fn assert_none(bad: Vec<String>) {
    assert!(bad.is_empty(), "{} discrepancies:\n{}", bad.len(), bad.join("\n"));
}

#[test]
fn binary_set_operators() {
    assert_none(oracle::binary_set_operators());
}

#[test]
fn unary_set_operators() {
    assert_none(oracle::unary_set_operators());
}

#[test]
fn relation_operators() {
    assert_none(oracle::relation_operators());
}

#[test]
fn function_spaces() {
    assert_none(oracle::function_spaces());
}

fn relations() -> (EvalContext, Vec<Value>) {
    let scope = Scope::default().with_carrier("EL", 2);
    let t = BType::pow(BType::prod(BType::Enum("EL".into()), BType::Enum("EL".into())));
    let rels = enumerate_type(&t, &scope).unwrap();
    (EvalContext::new(scope), rels)
}

#[test]
fn commutative_operators_commute() {
    let (ctx, rels) = relations();
    for a in &rels {
        for b in &rels {
            assert_eq!(ops::union(&ctx, a, b).unwrap(), ops::union(&ctx, b, a).unwrap());
            assert_eq!(ops::inter(&ctx, a, b).unwrap(), ops::inter(&ctx, b, a).unwrap());
        }
    }
    for x in -3..=3 {
        for y in -3..=3 {
            let (a, b) = (Value::int(x), Value::int(y));
            assert_eq!(ops::plus(&ctx, &a, &b).unwrap(), ops::plus(&ctx, &b, &a).unwrap());
            assert_eq!(ops::times(&ctx, &a, &b).unwrap(), ops::times(&ctx, &b, &a).unwrap());
        }
    }
}

#[test]
fn outputs_are_canonical() {
    let (ctx, rels) = relations();
    for a in &rels {
        for b in &rels {
            for v in [
                ops::union(&ctx, a, b),
                ops::compose(&ctx, a, b),
                ops::override_(&ctx, a, b),
                ops::inverse(&ctx, a),
            ] {
                assert!(v.unwrap().is_canonical());
            }
        }
    }
}
