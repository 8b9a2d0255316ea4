//! Brute-force comprehension definitions of the kernel set and relation
//! operators over a carrier of size 2.

use bvalid::kernel::{ops, EvalContext, EvalError};
use bvalid::syntax::ArrowKind;
use bvalid::value::{enumerate_type, BType, Scope, Value};

fn el() -> BType {
    BType::Enum("EL".into())
}

fn rel_t() -> BType {
    BType::prod(el(), el())
}

struct World {
    ctx: EvalContext,
    elems: Vec<Value>,
    pairs: Vec<Value>,
    subsets: Vec<Value>,
    relations: Vec<Value>,
    families: Vec<Value>,
}

fn world() -> World {
    let scope = Scope::default().with_carrier("EL", 2);
    let all = |t: &BType| enumerate_type(t, &scope).unwrap();
    World {
        elems: all(&el()),
        pairs: all(&rel_t()),
        subsets: all(&BType::pow(el())),
        relations: all(&BType::pow(rel_t())),
        families: all(&BType::pow(BType::pow(el()))),
        ctx: EvalContext::new(scope),
    }
}

fn has(s: &Value, x: &Value) -> bool {
    s.as_set().unwrap().iter().any(|y| y == x)
}

fn comp<'a>(universe: impl IntoIterator<Item = &'a Value>, keep: impl Fn(&Value) -> bool) -> Value {
    Value::set(universe.into_iter().filter(|x| keep(x)).cloned())
}

fn fst(p: &Value) -> &Value {
    p.as_pair().unwrap().0
}

fn snd(p: &Value) -> &Value {
    p.as_pair().unwrap().1
}

fn is_undef<T>(r: &Result<T, EvalError>) -> bool {
    matches!(r, Err(EvalError::Undef { .. }))
}

fn check(what: &str, args: &[&Value], got: Result<Value, EvalError>, want: Option<Value>, bad: &mut Vec<String>) {
    let ok = match (&got, &want) {
        (Ok(g), Some(w)) => g == w,
        (Err(_), None) => is_undef(&got),
        _ => false,
    };
    if !ok {
        bad.push(format!("{what}{args:?}: kernel {got:?}, oracle {want:?}"));
    }
}

pub fn binary_set_operators() -> Vec<String> {
    let w = world();
    let mut bad = Vec::new();
    for universe in [&w.elems, &w.pairs] {
        let sets = if universe.len() == 2 { &w.subsets } else { &w.relations };
        for a in sets {
            for b in sets {
                check("union", &[a, b], ops::union(&w.ctx, a, b), Some(comp(universe, |x| has(a, x) || has(b, x))), &mut bad);
                check("inter", &[a, b], ops::inter(&w.ctx, a, b), Some(comp(universe, |x| has(a, x) && has(b, x))), &mut bad);
                check("difference", &[a, b], ops::difference(&w.ctx, a, b), Some(comp(universe, |x| has(a, x) && !has(b, x))), &mut bad);
                let sub = universe.iter().all(|x| !has(a, x) || has(b, x));
                if ops::subset(&w.ctx, a, b).unwrap() != sub {
                    bad.push(format!("subset {a:?} {b:?}"));
                }
            }
        }
    }
    for a in &w.subsets {
        for b in &w.subsets {
            let want = comp(&w.pairs, |p| has(a, fst(p)) && has(b, snd(p)));
            check("product", &[a, b], ops::product(&w.ctx, a, b), Some(want), &mut bad);
        }
    }
    bad
}

pub fn unary_set_operators() -> Vec<String> {
    let w = world();
    let mut bad = Vec::new();
    for a in &w.subsets {
        let inside = |s: &Value| w.elems.iter().all(|x| !has(s, x) || has(a, x));
        let nonempty = |s: &Value| w.elems.iter().any(|x| has(s, x));
        check("POW", &[a], ops::pow(&w.ctx, a), Some(comp(&w.subsets, inside)), &mut bad);
        check("POW1", &[a], ops::pow1(&w.ctx, a), Some(comp(&w.subsets, |s| inside(s) && nonempty(s))), &mut bad);
        check("FIN", &[a], ops::fin(&w.ctx, a), Some(comp(&w.subsets, inside)), &mut bad);
        check("FIN1", &[a], ops::fin1(&w.ctx, a), Some(comp(&w.subsets, |s| inside(s) && nonempty(s))), &mut bad);
        let n = w.elems.iter().filter(|x| has(a, x)).count() as i64;
        check("card", &[a], ops::card(&w.ctx, a), Some(Value::int(n)), &mut bad);
        check("id", &[a], ops::identity(&w.ctx, a), Some(comp(&w.pairs, |p| fst(p) == snd(p) && has(a, fst(p)))), &mut bad);
    }
    for fam in &w.families {
        let members: Vec<&Value> = w.subsets.iter().filter(|s| has(fam, s)).collect();
        let union = comp(&w.elems, |x| members.iter().any(|s| has(s, x)));
        check("union", &[fam], ops::general_union(&w.ctx, fam), Some(union), &mut bad);
        let inter = (!members.is_empty()).then(|| comp(&w.elems, |x| members.iter().all(|s| has(s, x))));
        check("inter", &[fam], ops::general_inter(&w.ctx, fam), inter, &mut bad);
    }
    bad
}

pub fn relation_operators() -> Vec<String> {
    let w = world();
    let mut bad = Vec::new();
    for r in &w.relations {
        let dom = comp(&w.elems, |x| w.elems.iter().any(|y| has(r, &Value::pair(x.clone(), y.clone()))));
        let ran = comp(&w.elems, |y| w.elems.iter().any(|x| has(r, &Value::pair(x.clone(), y.clone()))));
        check("dom", &[r], ops::dom(&w.ctx, r), Some(dom.clone()), &mut bad);
        check("ran", &[r], ops::ran(&w.ctx, r), Some(ran), &mut bad);
        let inv = comp(&w.pairs, |p| has(r, &Value::pair(snd(p).clone(), fst(p).clone())));
        check("inverse", &[r], ops::inverse(&w.ctx, r), Some(inv), &mut bad);
        for s in &w.relations {
            let composed = comp(&w.pairs, |p| {
                w.elems.iter().any(|y| {
                    has(r, &Value::pair(fst(p).clone(), y.clone())) && has(s, &Value::pair(y.clone(), snd(p).clone()))
                })
            });
            check("composition", &[r, s], ops::compose(&w.ctx, r, s), Some(composed), &mut bad);
            let dom_s: Vec<&Value> = w.pairs.iter().filter(|p| has(s, p)).map(fst).collect();
            let over = comp(&w.pairs, |p| has(s, p) || (has(r, p) && !dom_s.contains(&fst(p))));
            check("override", &[r, s], ops::override_(&w.ctx, r, s), Some(over), &mut bad);
        }
        for a in &w.subsets {
            let keep = |f: fn(&Value) -> &Value, inside: bool| comp(&w.pairs, move |p| has(r, p) && has(a, f(p)) == inside);
            check("domain_restriction", &[a, r], ops::dom_restrict(&w.ctx, a, r), Some(keep(fst, true)), &mut bad);
            check("domain_subtraction", &[a, r], ops::dom_subtract(&w.ctx, a, r), Some(keep(fst, false)), &mut bad);
            check("range_restriction", &[r, a], ops::ran_restrict(&w.ctx, r, a), Some(keep(snd, true)), &mut bad);
            check("range_subtraction", &[r, a], ops::ran_subtract(&w.ctx, r, a), Some(keep(snd, false)), &mut bad);
            let image =
                comp(&w.elems, |y| w.elems.iter().any(|x| has(a, x) && has(r, &Value::pair(x.clone(), y.clone()))));
            check("image", &[r, a], ops::image(&w.ctx, r, a), Some(image), &mut bad);
        }
        for x in &w.elems {
            let images: Vec<&Value> = w.elems.iter().filter(|y| has(r, &Value::pair(x.clone(), (*y).clone()))).collect();
            let want = (images.len() == 1).then(|| images[0].clone());
            check("apply", &[r, x], ops::apply(&w.ctx, r, x), want, &mut bad);
        }
    }
    bad
}

fn kind_holds(w: &World, r: &Value, d: &Value, c: &Value, kind: ArrowKind) -> bool {
    let related = |x: &Value, y: &Value| has(r, &Value::pair(x.clone(), y.clone()));
    let in_sig = w.pairs.iter().all(|p| !has(r, p) || (has(d, fst(p)) && has(c, snd(p))));
    let functional = w.elems.iter().all(|x| w.elems.iter().filter(|y| related(x, y)).count() <= 1);
    let total = w.elems.iter().filter(|x| has(d, x)).all(|x| w.elems.iter().any(|y| related(x, y)));
    let injective = w.elems.iter().all(|y| w.elems.iter().filter(|x| related(x, y)).count() <= 1);
    let surjective = w.elems.iter().filter(|y| has(c, y)).all(|y| w.elems.iter().any(|x| related(x, y)));
    in_sig
        && match kind {
            ArrowKind::Relation => true,
            ArrowKind::Partial => functional,
            ArrowKind::Total => functional && total,
            ArrowKind::PartialInjection => functional && injective,
            ArrowKind::TotalInjection => functional && total && injective,
            ArrowKind::PartialSurjection => functional && surjective,
            ArrowKind::TotalSurjection => functional && total && surjective,
            ArrowKind::Bijection => functional && total && injective && surjective,
        }
}

pub fn function_spaces() -> Vec<String> {
    let w = world();
    let mut bad = Vec::new();
    for &kind in ArrowKind::ALL.iter() {
        for d in &w.subsets {
            for c in &w.subsets {
                for r in &w.relations {
                    let got = ops::is_function_kind(&w.ctx, r, d, c, kind).unwrap();
                    if got != kind_holds(&w, r, d, c, kind) {
                        bad.push(format!("{kind:?} {r:?} {d:?} {c:?}: kernel {got}"));
                    }
                }
                let want = comp(&w.relations, |r| kind_holds(&w, r, d, c, kind));
                check(&format!("{kind:?} set"), &[d, c], ops::arrow_set(&w.ctx, d, c, kind), Some(want), &mut bad);
            }
        }
    }
    bad
}

/// Every discrepancy between kernel and oracle.
pub fn all_discrepancies() -> Vec<String> {
    let mut out = binary_set_operators();
    out.extend(unary_set_operators());
    out.extend(relation_operators());
    out.extend(function_spaces());
    out
}
