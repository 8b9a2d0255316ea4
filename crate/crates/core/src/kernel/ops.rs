//! The operator implementations.
//!
//! Every function records the branch it leaves through. Type-impossible
//! arguments go to the operator's internal-error branch.

use super::catalog::Branch as B;
use super::{EvalContext, EvalError, KResult, MutationId};
use crate::syntax::{ArrowKind, Builtin, CmpOp};
use crate::value::{enumerate_type, subsets_by_size, BType, SetV, Value};

fn set<'a>(ctx: &EvalContext, v: &'a Value, b: B) -> KResult<&'a SetV> {
    match v {
        Value::Set(s) => Ok(s),
        other => ctx.internal(b, format!("expected a set, got {other}")),
    }
}

fn int(ctx: &EvalContext, v: &Value, b: B) -> KResult<i64> {
    match v {
        Value::Int(n) => Ok(*n),
        other => ctx.internal(b, format!("expected an integer, got {other}")),
    }
}

fn pair<'a>(ctx: &EvalContext, v: &'a Value, b: B) -> KResult<(&'a Value, &'a Value)> {
    match v {
        Value::Pair(p) => Ok((&p.0, &p.1)),
        other => ctx.internal(b, format!("expected a pair, got {other}")),
    }
}

fn pairs<'a>(ctx: &EvalContext, r: &'a SetV, b: B) -> KResult<Vec<(&'a Value, &'a Value)>> {
    r.iter().map(|v| pair(ctx, v, b)).collect()
}

fn done(ctx: &EvalContext, b: B, v: Value) -> KResult {
    ctx.hit(b);
    Ok(v)
}

fn sized(ctx: &EvalContext, n: usize) -> KResult<()> {
    ctx.tick(1 + n as u64)
}

/// Refuses to materialise more than the enumeration limit.
fn check_size(ctx: &EvalContext, size: u128) -> KResult<()> {
    if size > ctx.scope.enum_limit as u128 {
        return Err(EvalError::Timeout);
    }
    ctx.tick(size.min(u64::MAX as u128) as u64)
}

fn merge(a: &[Value], b: &[Value], keep_a: bool, keep_b: bool, keep_both: bool) -> Vec<Value> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                if keep_a {
                    out.push(a[i].clone());
                }
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                if keep_b {
                    out.push(b[j].clone());
                }
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if keep_both {
                    out.push(a[i].clone());
                }
                i += 1;
                j += 1;
            }
        }
    }
    if keep_a {
        out.extend_from_slice(&a[i..]);
    }
    if keep_b {
        out.extend_from_slice(&b[j..]);
    }
    out
}

fn union_raw(a: &SetV, b: &SetV) -> SetV {
    SetV::from_sorted(merge(a.as_slice(), b.as_slice(), true, true, true))
}

fn inter_raw(a: &SetV, b: &SetV) -> SetV {
    SetV::from_sorted(merge(a.as_slice(), b.as_slice(), false, false, true))
}

fn diff_raw(a: &SetV, b: &SetV) -> SetV {
    SetV::from_sorted(merge(a.as_slice(), b.as_slice(), true, false, false))
}

// ----- sets -----

pub fn union(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = (set(ctx, a, B::UnionType)?, set(ctx, b, B::UnionType)?);
    sized(ctx, x.len() + y.len())?;
    done(ctx, B::UnionOk, Value::Set(union_raw(x, y)))
}

pub fn inter(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = (set(ctx, a, B::InterType)?, set(ctx, b, B::InterType)?);
    sized(ctx, x.len() + y.len())?;
    let r = if ctx.mutated(MutationId::M1) { diff_raw(x, y) } else { inter_raw(x, y) };
    done(ctx, B::InterOk, Value::Set(r))
}

pub fn difference(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = (set(ctx, a, B::SetDiffType)?, set(ctx, b, B::SetDiffType)?);
    sized(ctx, x.len() + y.len())?;
    done(ctx, B::SetDiffOk, Value::Set(diff_raw(x, y)))
}

pub fn product(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = (set(ctx, a, B::ProductType)?, set(ctx, b, B::ProductType)?);
    sized(ctx, x.len() * y.len())?;
    let mut out = Vec::with_capacity(x.len() * y.len());
    for l in x.iter() {
        for r in y.iter() {
            out.push(Value::pair(l.clone(), r.clone()));
        }
    }
    done(ctx, B::ProductOk, Value::Set(SetV::from_sorted(out)))
}

fn all_subsets(ctx: &EvalContext, s: &SetV, nonempty: bool) -> KResult<Vec<Value>> {
    let n = s.len();
    if n >= 64 {
        return Err(EvalError::Timeout);
    }
    check_size(ctx, 1u128 << n)?;
    let mut out = subsets_by_size(s.as_slice(), n);
    if nonempty {
        out.remove(0);
    }
    Ok(out)
}

fn power_family(ctx: &EvalContext, a: &Value, nonempty: bool, ok: B, ty: B) -> KResult {
    let s = set(ctx, a, ty)?;
    let subs = all_subsets(ctx, s, nonempty)?;
    done(ctx, ok, Value::Set(SetV::from_sorted(subs)))
}

pub fn pow(ctx: &EvalContext, a: &Value) -> KResult {
    power_family(ctx, a, false, B::PowOk, B::PowType)
}

pub fn pow1(ctx: &EvalContext, a: &Value) -> KResult {
    power_family(ctx, a, true, B::Pow1Ok, B::Pow1Type)
}

/// Within a finite scope every subset is finite, so FIN coincides with POW.
pub fn fin(ctx: &EvalContext, a: &Value) -> KResult {
    power_family(ctx, a, false, B::FinOk, B::FinType)
}

pub fn fin1(ctx: &EvalContext, a: &Value) -> KResult {
    power_family(ctx, a, true, B::Fin1Ok, B::Fin1Type)
}

pub fn general_union(ctx: &EvalContext, a: &Value) -> KResult {
    let outer = set(ctx, a, B::GenUnionType)?;
    let mut acc = SetV::empty();
    for m in outer.iter() {
        let s = set(ctx, m, B::GenUnionType)?;
        sized(ctx, s.len())?;
        acc = union_raw(&acc, s);
    }
    done(ctx, B::GenUnionOk, Value::Set(acc))
}

pub fn general_inter(ctx: &EvalContext, a: &Value) -> KResult {
    let outer = set(ctx, a, B::GenInterType)?;
    let mut it = outer.iter();
    let Some(first) = it.next() else {
        return ctx.undef(B::GenInterEmpty, "inter of the empty set");
    };
    let mut acc = set(ctx, first, B::GenInterType)?.clone();
    for m in it {
        let s = set(ctx, m, B::GenInterType)?;
        sized(ctx, s.len())?;
        acc = inter_raw(&acc, s);
    }
    done(ctx, B::GenInterOk, Value::Set(acc))
}

pub fn card(ctx: &EvalContext, a: &Value) -> KResult {
    let s = set(ctx, a, B::CardType)?;
    ctx.tick(1)?;
    done(ctx, B::CardOk, Value::Int(s.len() as i64))
}

pub fn min(ctx: &EvalContext, a: &Value) -> KResult {
    let s = set(ctx, a, B::MinType)?;
    ctx.tick(1)?;
    match s.as_slice().first() {
        None => ctx.undef(B::MinEmpty, "min of the empty set"),
        Some(v) => {
            int(ctx, v, B::MinType)?;
            done(ctx, B::MinOk, v.clone())
        }
    }
}

pub fn max(ctx: &EvalContext, a: &Value) -> KResult {
    let s = set(ctx, a, B::MaxType)?;
    ctx.tick(1)?;
    match s.as_slice().last() {
        None => ctx.undef(B::MaxEmpty, "max of the empty set"),
        Some(v) => {
            int(ctx, v, B::MaxType)?;
            done(ctx, B::MaxOk, v.clone())
        }
    }
}

pub fn interval(ctx: &EvalContext, lo: &Value, hi: &Value) -> KResult {
    let (l, h) = (int(ctx, lo, B::IntervalType)?, int(ctx, hi, B::IntervalType)?);
    if l > h {
        ctx.tick(1)?;
        return done(ctx, B::IntervalEmpty, Value::empty_set());
    }
    check_size(ctx, (h as i128 - l as i128 + 1) as u128)?;
    done(ctx, B::IntervalOk, Value::Set(SetV::from_sorted((l..=h).map(Value::Int).collect())))
}

// ----- relations -----

pub fn dom(ctx: &EvalContext, r: &Value) -> KResult {
    let ps = pairs(ctx, set(ctx, r, B::DomType)?, B::DomType)?;
    sized(ctx, ps.len())?;
    done(ctx, B::DomOk, Value::Set(SetV::from_vec(ps.into_iter().map(|(x, _)| x.clone()).collect())))
}

pub fn ran(ctx: &EvalContext, r: &Value) -> KResult {
    let ps = pairs(ctx, set(ctx, r, B::RanType)?, B::RanType)?;
    sized(ctx, ps.len())?;
    done(ctx, B::RanOk, Value::Set(SetV::from_vec(ps.into_iter().map(|(_, y)| y.clone()).collect())))
}

pub fn inverse(ctx: &EvalContext, r: &Value) -> KResult {
    let ps = pairs(ctx, set(ctx, r, B::InverseType)?, B::InverseType)?;
    sized(ctx, ps.len())?;
    let out = ps.into_iter().map(|(x, y)| Value::pair(y.clone(), x.clone())).collect();
    done(ctx, B::InverseOk, Value::Set(SetV::from_vec(out)))
}

pub fn identity(ctx: &EvalContext, s: &Value) -> KResult {
    let s = set(ctx, s, B::IdType)?;
    sized(ctx, s.len())?;
    let out = s.iter().map(|x| Value::pair(x.clone(), x.clone())).collect();
    done(ctx, B::IdOk, Value::Set(SetV::from_sorted(out)))
}

pub fn compose(ctx: &EvalContext, r: &Value, s: &Value) -> KResult {
    let rp = pairs(ctx, set(ctx, r, B::ComposeType)?, B::ComposeType)?;
    let sp = pairs(ctx, set(ctx, s, B::ComposeType)?, B::ComposeType)?;
    sized(ctx, rp.len() * sp.len())?;
    let mut out = Vec::new();
    for (x, y) in &rp {
        for (y2, z) in &sp {
            if y == y2 {
                out.push(Value::pair((*x).clone(), (*z).clone()));
            }
        }
    }
    done(ctx, B::ComposeOk, Value::Set(SetV::from_vec(out)))
}

pub fn override_(ctx: &EvalContext, r: &Value, s: &Value) -> KResult {
    let rs = set(ctx, r, B::OverrideType)?;
    let ss = set(ctx, s, B::OverrideType)?;
    let sp = pairs(ctx, ss, B::OverrideType)?;
    sized(ctx, rs.len() + ss.len())?;
    let overridden = SetV::from_vec(sp.iter().map(|(x, _)| (*x).clone()).collect());
    let mut out: Vec<Value> = Vec::new();
    for v in rs.iter() {
        let (x, _) = pair(ctx, v, B::OverrideType)?;
        if !overridden.contains(x) {
            out.push(v.clone());
        }
    }
    let kept = SetV::from_sorted(out);
    done(ctx, B::OverrideOk, Value::Set(union_raw(&kept, ss)))
}

fn restrict(ctx: &EvalContext, r: &Value, s: &Value, on_domain: bool, keep: bool, ok: B, ty: B) -> KResult {
    let rs = set(ctx, r, ty)?;
    let filter = set(ctx, s, ty)?;
    sized(ctx, rs.len())?;
    let mut out = Vec::new();
    for v in rs.iter() {
        let (x, y) = pair(ctx, v, ty)?;
        let key = if on_domain { x } else { y };
        if filter.contains(key) == keep {
            out.push(v.clone());
        }
    }
    done(ctx, ok, Value::Set(SetV::from_sorted(out)))
}

/// `s <| r`
pub fn dom_restrict(ctx: &EvalContext, s: &Value, r: &Value) -> KResult {
    restrict(ctx, r, s, true, true, B::DomRestrictOk, B::DomRestrictType)
}

/// `r |> s`
pub fn ran_restrict(ctx: &EvalContext, r: &Value, s: &Value) -> KResult {
    restrict(ctx, r, s, false, true, B::RanRestrictOk, B::RanRestrictType)
}

/// `s <<| r`
pub fn dom_subtract(ctx: &EvalContext, s: &Value, r: &Value) -> KResult {
    restrict(ctx, r, s, true, false, B::DomSubtractOk, B::DomSubtractType)
}

/// `r |>> s`
pub fn ran_subtract(ctx: &EvalContext, r: &Value, s: &Value) -> KResult {
    restrict(ctx, r, s, false, false, B::RanSubtractOk, B::RanSubtractType)
}

pub fn image(ctx: &EvalContext, r: &Value, s: &Value) -> KResult {
    let rp = pairs(ctx, set(ctx, r, B::ImageType)?, B::ImageType)?;
    let filter = set(ctx, s, B::ImageType)?;
    sized(ctx, rp.len())?;
    let out = rp.into_iter().filter(|(x, _)| filter.contains(x)).map(|(_, y)| y.clone()).collect();
    done(ctx, B::ImageOk, Value::Set(SetV::from_vec(out)))
}

pub fn apply(ctx: &EvalContext, f: &Value, x: &Value) -> KResult {
    let fp = pairs(ctx, set(ctx, f, B::ApplyType)?, B::ApplyType)?;
    sized(ctx, fp.len())?;
    let mut images = fp.into_iter().filter(|(a, _)| *a == x).map(|(_, b)| b);
    match (images.next(), images.next()) {
        (None, _) => ctx.undef(B::ApplyOutsideDomain, format!("function applied outside its domain at {x}")),
        (Some(_), Some(_)) => ctx.undef(B::ApplyNotFunctional, format!("relation is not functional at {x}")),
        (Some(y), None) => done(ctx, B::ApplyOk, y.clone()),
    }
}

fn flags(kind: ArrowKind) -> (bool, bool, bool, bool) {
    // (functional, total, injective, surjective)
    match kind {
        ArrowKind::Relation => (false, false, false, false),
        ArrowKind::Partial => (true, false, false, false),
        ArrowKind::Total => (true, true, false, false),
        ArrowKind::PartialInjection => (true, false, true, false),
        ArrowKind::TotalInjection => (true, true, true, false),
        ArrowKind::PartialSurjection => (true, false, false, true),
        ArrowKind::TotalSurjection => (true, true, false, true),
        ArrowKind::Bijection => (true, true, true, true),
    }
}

/// Whether `r` belongs to the `kind` arrow from `d` to `c`.
pub fn is_function_kind(ctx: &EvalContext, r: &Value, d: &Value, c: &Value, kind: ArrowKind) -> KResult<bool> {
    let rs = set(ctx, r, B::FnType)?;
    let ds = set(ctx, d, B::FnType)?;
    let cs = set(ctx, c, B::FnType)?;
    let ps = pairs(ctx, rs, B::FnType)?;
    sized(ctx, ps.len())?;
    let domain_bound = if ctx.mutated(MutationId::M3) { cs } else { ds };
    if !ps.iter().all(|(x, y)| domain_bound.contains(x) && cs.contains(y)) {
        ctx.hit(B::FnOutsideSignature);
        return Ok(false);
    }
    let (functional, total, injective, surjective) = flags(kind);
    // pairs are sorted, so equal left components are adjacent
    if functional && ps.windows(2).any(|w| w[0].0 == w[1].0) {
        ctx.hit(B::FnNotFunctional);
        return Ok(false);
    }
    if total {
        let dom = SetV::from_vec(ps.iter().map(|(x, _)| (*x).clone()).collect());
        if dom != *ds {
            ctx.hit(B::FnNotTotal);
            return Ok(false);
        }
    }
    if injective {
        let mut rights: Vec<&Value> = ps.iter().map(|(_, y)| *y).collect();
        rights.sort();
        if rights.windows(2).any(|w| w[0] == w[1]) {
            ctx.hit(B::FnNotInjective);
            return Ok(false);
        }
    }
    if surjective {
        let ran = SetV::from_vec(ps.iter().map(|(_, y)| (*y).clone()).collect());
        if ran != *cs {
            ctx.hit(B::FnNotSurjective);
            return Ok(false);
        }
    }
    ctx.hit(B::FnOk);
    Ok(true)
}

/// The set of all `kind` relations from `d` to `c`.
pub fn arrow_set(ctx: &EvalContext, d: &Value, c: &Value, kind: ArrowKind) -> KResult {
    let ds = set(ctx, d, B::ArrowSetType)?;
    let cs = set(ctx, c, B::ArrowSetType)?;
    let prod = product(ctx, d, c)?;
    let Value::Set(ps) = &prod else { unreachable!("product yields a set") };
    let _ = (ds, cs);
    let mut out = Vec::new();
    for r in all_subsets(ctx, ps, false)? {
        if is_function_kind(ctx, &r, d, c, kind)? {
            out.push(r);
        }
    }
    done(ctx, B::ArrowSetOk, Value::Set(SetV::from_sorted(out)))
}

// ----- arithmetic -----

fn arith2(ctx: &EvalContext, a: &Value, b: &Value, ty: B) -> KResult<(i64, i64)> {
    ctx.tick(1)?;
    Ok((int(ctx, a, ty)?, int(ctx, b, ty)?))
}

fn checked(ctx: &EvalContext, r: Option<i64>, ok: B, overflow: B) -> KResult {
    match r {
        Some(n) => done(ctx, ok, Value::Int(n)),
        None => ctx.internal(overflow, "integer overflow"),
    }
}

pub fn plus(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = arith2(ctx, a, b, B::PlusType)?;
    checked(ctx, x.checked_add(y), B::PlusOk, B::PlusOverflow)
}

pub fn minus(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = arith2(ctx, a, b, B::MinusType)?;
    checked(ctx, x.checked_sub(y), B::MinusOk, B::MinusOverflow)
}

pub fn times(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = arith2(ctx, a, b, B::TimesType)?;
    let r = x.checked_mul(y);
    let r = if ctx.mutated(MutationId::M2) && x == 3 && y == 3 { r.map(|n| n + 1) } else { r };
    checked(ctx, r, B::TimesOk, B::TimesOverflow)
}

/// Integer division truncating toward zero.
pub fn div(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = arith2(ctx, a, b, B::DivType)?;
    if y == 0 {
        return ctx.undef(B::DivByZero, "division by zero");
    }
    checked(ctx, x.checked_div(y), B::DivOk, B::DivOverflow)
}

/// Defined for a non-negative dividend and a positive divisor.
pub fn modulo(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = arith2(ctx, a, b, B::ModType)?;
    if y == 0 {
        return ctx.undef(B::ModByZero, "modulo by zero");
    }
    if x < 0 || y < 0 {
        return ctx.undef(B::ModNegative, "mod with a negative operand");
    }
    done(ctx, B::ModOk, Value::Int(x % y))
}

/// `0**0 = 1`; a negative exponent is undefined.
pub fn power(ctx: &EvalContext, a: &Value, b: &Value) -> KResult {
    let (x, y) = arith2(ctx, a, b, B::PowerType)?;
    if y < 0 {
        return ctx.undef(B::PowerNegative, "negative exponent");
    }
    let r = u32::try_from(y).ok().and_then(|e| x.checked_pow(e));
    checked(ctx, r, B::PowerOk, B::PowerOverflow)
}

pub fn negate(ctx: &EvalContext, a: &Value) -> KResult {
    ctx.tick(1)?;
    let x = int(ctx, a, B::NegateType)?;
    checked(ctx, x.checked_neg(), B::NegateOk, B::NegateOverflow)
}

// ----- sequences -----

/// Elements of a sequence in index order, or `None` if `v` is a set of pairs
/// whose domain is not `1..n`.
fn as_seq<'a>(ctx: &EvalContext, v: &'a Value, ty: B) -> KResult<Option<Vec<&'a Value>>> {
    let s = set(ctx, v, ty)?;
    sized(ctx, s.len())?;
    let mut out = Vec::with_capacity(s.len());
    for (i, m) in s.iter().enumerate() {
        let (k, x) = pair(ctx, m, ty)?;
        match k {
            Value::Int(n) if *n == i as i64 + 1 => out.push(x),
            Value::Int(_) => return Ok(None),
            other => return ctx.internal(ty, format!("sequence index {other} is not an integer")),
        }
    }
    Ok(Some(out))
}

pub fn is_sequence(ctx: &EvalContext, v: &Value) -> KResult<bool> {
    Ok(as_seq(ctx, v, B::SeqSetType)?.is_some())
}

fn seq_value<'a>(items: impl IntoIterator<Item = &'a Value>) -> Value {
    Value::Set(SetV::from_sorted(
        items.into_iter().enumerate().map(|(i, x)| Value::pair(Value::Int(i as i64 + 1), x.clone())).collect(),
    ))
}

fn seq_arg<'a>(ctx: &EvalContext, v: &'a Value, not_seq: B, ty: B) -> KResult<Vec<&'a Value>> {
    match as_seq(ctx, v, ty)? {
        Some(items) => Ok(items),
        None => ctx.undef(not_seq, "argument is not a sequence"),
    }
}

pub fn size(ctx: &EvalContext, s: &Value) -> KResult {
    let items = seq_arg(ctx, s, B::SizeNotSeq, B::SizeType)?;
    done(ctx, B::SizeOk, Value::Int(items.len() as i64))
}

pub fn concat(ctx: &EvalContext, s: &Value, t: &Value) -> KResult {
    let mut a = seq_arg(ctx, s, B::ConcatNotSeq, B::ConcatType)?;
    let b = seq_arg(ctx, t, B::ConcatNotSeq, B::ConcatType)?;
    a.extend(b);
    done(ctx, B::ConcatOk, seq_value(a))
}

fn nonempty_seq<'a>(ctx: &EvalContext, s: &'a Value, not_seq: B, empty: B, ty: B, what: &str) -> KResult<Vec<&'a Value>> {
    let items = seq_arg(ctx, s, not_seq, ty)?;
    if items.is_empty() {
        return ctx.undef(empty, format!("{what} of the empty sequence"));
    }
    Ok(items)
}

pub fn first(ctx: &EvalContext, s: &Value) -> KResult {
    let items = nonempty_seq(ctx, s, B::FirstNotSeq, B::FirstEmpty, B::FirstType, "first")?;
    done(ctx, B::FirstOk, items[0].clone())
}

pub fn last(ctx: &EvalContext, s: &Value) -> KResult {
    let items = nonempty_seq(ctx, s, B::LastNotSeq, B::LastEmpty, B::LastType, "last")?;
    done(ctx, B::LastOk, items[items.len() - 1].clone())
}

pub fn front(ctx: &EvalContext, s: &Value) -> KResult {
    let items = nonempty_seq(ctx, s, B::FrontNotSeq, B::FrontEmpty, B::FrontType, "front")?;
    done(ctx, B::FrontOk, seq_value(items[..items.len() - 1].iter().copied()))
}

pub fn tail(ctx: &EvalContext, s: &Value) -> KResult {
    let items = nonempty_seq(ctx, s, B::TailNotSeq, B::TailEmpty, B::TailType, "tail")?;
    done(ctx, B::TailOk, seq_value(items[1..].iter().copied()))
}

pub fn rev(ctx: &EvalContext, s: &Value) -> KResult {
    let items = seq_arg(ctx, s, B::RevNotSeq, B::RevType)?;
    done(ctx, B::RevOk, seq_value(items.into_iter().rev()))
}

/// Sequences over `s` of length at most the scope's set-cardinality cap.
pub fn seq_set(ctx: &EvalContext, s: &Value) -> KResult {
    let base = set(ctx, s, B::SeqSetType)?;
    let cap = ctx.scope.max_set_card;
    let total: u128 = (0..=cap as u32).map(|k| (base.len() as u128).saturating_pow(k)).sum();
    check_size(ctx, total)?;
    let mut out = Vec::new();
    let mut layer: Vec<Vec<&Value>> = vec![vec![]];
    for _ in 0..=cap {
        let mut next = Vec::new();
        for prefix in &layer {
            out.push(seq_value(prefix.iter().copied()));
            for x in base.iter() {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        layer = next;
    }
    done(ctx, B::SeqSetOk, Value::Set(SetV::from_vec(out)))
}

// ----- atomic predicates -----
//
// Positive and negative tests are written independently: the positive ones
// use the canonical order (binary search, derived equality) while the
// negative ones scan for a distinguishing witness.

fn truth(ctx: &EvalContext, r: bool, t: B, f: B) -> KResult<bool> {
    ctx.hit(if r { t } else { f });
    Ok(r)
}

pub fn member(ctx: &EvalContext, x: &Value, s: &Value) -> KResult<bool> {
    let s = set(ctx, s, B::MemberType)?;
    ctx.tick(1)?;
    let mut r = s.contains(x);
    if ctx.mutated(MutationId::M5) && s.len() == 1 {
        r = !r;
    }
    truth(ctx, r, B::MemberTrue, B::MemberFalse)
}

/// True iff every member of `s` is distinguishable from `x`.
pub fn non_member(ctx: &EvalContext, x: &Value, s: &Value) -> KResult<bool> {
    let s = set(ctx, s, B::NonMemberType)?;
    sized(ctx, s.len())?;
    for m in s.iter() {
        if !differs(ctx, m, x, B::NonMemberType)? {
            return truth(ctx, false, B::NonMemberTrue, B::NonMemberFalse);
        }
    }
    truth(ctx, true, B::NonMemberTrue, B::NonMemberFalse)
}

pub fn equal(ctx: &EvalContext, a: &Value, b: &Value) -> KResult<bool> {
    ctx.tick(1)?;
    truth(ctx, a == b, B::EqualTrue, B::EqualFalse)
}

/// True iff a distinguishing position between `a` and `b` exists.
pub fn distinct(ctx: &EvalContext, a: &Value, b: &Value) -> KResult<bool> {
    ctx.tick(1)?;
    let r = differs(ctx, a, b, B::DistinctType)?;
    truth(ctx, r, B::DistinctTrue, B::DistinctFalse)
}

fn differs(ctx: &EvalContext, a: &Value, b: &Value, ty: B) -> KResult<bool> {
    Ok(match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => x != y,
        (Value::Int(x), Value::Int(y)) => x != y,
        (Value::Elem { carrier: c1, index: i1 }, Value::Elem { carrier: c2, index: i2 }) => {
            if c1 != c2 {
                return ctx.internal(ty, format!("elements of carriers {c1} and {c2} compared"));
            }
            i1 != i2
        }
        (Value::Pair(p), Value::Pair(q)) => differs(ctx, &p.0, &q.0, ty)? || differs(ctx, &p.1, &q.1, ty)?,
        (Value::Set(s), Value::Set(t)) => {
            if s.len() != t.len() {
                return Ok(true);
            }
            for (x, y) in s.iter().zip(t.iter()) {
                if differs(ctx, x, y, ty)? {
                    return Ok(true);
                }
            }
            false
        }
        (x, y) => return ctx.internal(ty, format!("values {x} and {y} of different kinds compared")),
    })
}

pub fn subset(ctx: &EvalContext, a: &Value, b: &Value) -> KResult<bool> {
    let (x, y) = (set(ctx, a, B::SubsetType)?, set(ctx, b, B::SubsetType)?);
    sized(ctx, x.len())?;
    truth(ctx, x.iter().all(|v| y.contains(v)), B::SubsetTrue, B::SubsetFalse)
}

/// True iff some member of `a` is distinguishable from every member of `b`.
pub fn non_subset(ctx: &EvalContext, a: &Value, b: &Value) -> KResult<bool> {
    let (x, y) = (set(ctx, a, B::NonSubsetType)?, set(ctx, b, B::NonSubsetType)?);
    sized(ctx, x.len() * y.len().max(1))?;
    for v in x.iter() {
        let mut all_differ = true;
        for w in y.iter() {
            if !differs(ctx, v, w, B::NonSubsetType)? {
                all_differ = false;
                break;
            }
        }
        if all_differ {
            return truth(ctx, true, B::NonSubsetTrue, B::NonSubsetFalse);
        }
    }
    truth(ctx, false, B::NonSubsetTrue, B::NonSubsetFalse)
}

pub fn int_compare(ctx: &EvalContext, op: CmpOp, a: &Value, b: &Value) -> KResult<bool> {
    let (x, y) = arith2(ctx, a, b, B::IntCompareType)?;
    let r = match op {
        CmpOp::Lt => x < y,
        CmpOp::Le => x <= y,
        CmpOp::Gt => x > y,
        CmpOp::Ge => x >= y,
        other => return ctx.internal(B::IntCompareType, format!("{} is not an integer comparison", other.symbol())),
    };
    truth(ctx, r, B::IntCompareTrue, B::IntCompareFalse)
}

// ----- builtins and enumeration -----

pub fn builtin(ctx: &EvalContext, b: Builtin) -> KResult {
    let s = &ctx.scope;
    let ints = |lo: i64| Value::Set(SetV::from_sorted((lo.max(s.int_lo)..=s.int_hi).map(Value::Int).collect()));
    let (branch, v) = match b {
        Builtin::Integer | Builtin::Int => (B::BuiltinInt, ints(s.int_lo)),
        Builtin::Natural | Builtin::Nat => (B::BuiltinNat, ints(0)),
        Builtin::Natural1 | Builtin::Nat1 => (B::BuiltinNat, ints(1)),
        Builtin::BoolSet => (B::BuiltinBool, Value::set([Value::Bool(false), Value::Bool(true)])),
        Builtin::MaxInt => (B::BuiltinInt, Value::Int(s.int_hi)),
        Builtin::MinInt => (B::BuiltinInt, Value::Int(s.int_lo)),
    };
    sized(ctx, (s.int_hi - s.int_lo) as usize)?;
    done(ctx, branch, v)
}

/// Every value of `t` within scope, in canonical order.
pub fn enum_type(ctx: &EvalContext, t: &BType) -> KResult<Vec<Value>> {
    let all = enumerate_type(t, &ctx.scope).map_err(|_| EvalError::Timeout)?;
    sized(ctx, all.len())?;
    ctx.hit(B::EnumTypeOk);
    if ctx.mutated(MutationId::M4) {
        return Ok(all.into_iter().enumerate().filter(|(i, _)| i % 3 != 2).map(|(_, v)| v).collect());
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Scope;

    fn ctx() -> EvalContext {
        EvalContext::new(Scope::default())
    }

    fn ints(xs: &[i64]) -> Value {
        Value::int_set(xs.iter().copied())
    }

    fn rel(ps: &[(i64, i64)]) -> Value {
        Value::set(ps.iter().map(|&(a, b)| Value::pair(Value::int(a), Value::int(b))))
    }

    #[test]
    fn union_of_singletons() {
        assert_eq!(union(&ctx(), &ints(&[1]), &ints(&[2])).unwrap(), ints(&[1, 2]));
    }

    #[test]
    fn general_union_example() {
        let u = Value::set([ints(&[0, 5, 2, 4]), ints(&[2, 4, 5]), ints(&[2, 1, 7, 5])]);
        assert_eq!(general_union(&ctx(), &u).unwrap(), ints(&[0, 1, 2, 4, 5, 7]));
    }

    #[test]
    fn division_by_zero_is_undefined() {
        assert!(matches!(div(&ctx(), &Value::int(2), &Value::int(0)), Err(EvalError::Undef { .. })));
        assert_eq!(div(&ctx(), &Value::int(-7), &Value::int(2)).unwrap(), Value::int(-3));
    }

    #[test]
    fn pow1_of_empty() {
        assert_eq!(pow1(&ctx(), &Value::empty_set()).unwrap(), Value::empty_set());
        assert_eq!(pow(&ctx(), &ints(&[1, 2])).unwrap().as_set().unwrap().len(), 4);
    }

    #[test]
    fn override_example() {
        let r = override_(&ctx(), &rel(&[(1, 2), (3, 4)]), &rel(&[(1, 9)])).unwrap();
        assert_eq!(r, rel(&[(1, 9), (3, 4)]));
    }

    #[test]
    fn function_kinds() {
        let c = ctx();
        assert!(is_function_kind(&c, &rel(&[(1, 2)]), &ints(&[1, 3]), &ints(&[2]), ArrowKind::Partial).unwrap());
        assert!(!is_function_kind(&c, &rel(&[(1, 2), (1, 3)]), &ints(&[1]), &ints(&[2, 3]), ArrowKind::Partial).unwrap());
        assert!(!is_function_kind(&c, &rel(&[(1, 2)]), &ints(&[1, 3]), &ints(&[2]), ArrowKind::Total).unwrap());
    }

    #[test]
    fn mutations_change_results() {
        let m1 = ctx().with_mutation(Some(MutationId::M1));
        assert_eq!(inter(&m1, &ints(&[1, 2]), &ints(&[2, 3])).unwrap(), ints(&[1]));
        let m2 = ctx().with_mutation(Some(MutationId::M2));
        assert_eq!(times(&m2, &Value::int(3), &Value::int(3)).unwrap(), Value::int(10));
        assert_eq!(times(&m2, &Value::int(3), &Value::int(2)).unwrap(), Value::int(6));
        let m5 = ctx().with_mutation(Some(MutationId::M5));
        let aa = Value::elem("ID", 0);
        assert!(!member(&m5, &aa, &Value::set([aa.clone()])).unwrap());
        assert!(member(&ctx(), &aa, &Value::set([aa.clone()])).unwrap());
    }

    #[test]
    fn sequences() {
        let c = ctx();
        let s = seq_value([&Value::int(5), &Value::int(6)]);
        assert_eq!(size(&c, &s).unwrap(), Value::int(2));
        assert_eq!(first(&c, &s).unwrap(), Value::int(5));
        assert_eq!(rev(&c, &s).unwrap(), seq_value([&Value::int(6), &Value::int(5)]));
        assert!(matches!(first(&c, &Value::empty_set()), Err(EvalError::Undef { .. })));
        assert!(matches!(size(&c, &rel(&[(2, 1)])), Err(EvalError::Undef { .. })));
        let all = seq_set(&c, &ints(&[0, 1])).unwrap();
        assert_eq!(all.as_set().unwrap().len(), 1 + 2 + 4 + 8 + 16);
    }

    #[test]
    fn negative_atoms_agree_with_positive() {
        let c = ctx();
        let a = ints(&[1, 2]);
        for x in [Value::int(1), Value::int(3)] {
            assert_eq!(member(&c, &x, &a).unwrap(), !non_member(&c, &x, &a).unwrap());
        }
        assert!(non_subset(&c, &ints(&[1, 3]), &a).unwrap());
        assert!(!non_subset(&c, &ints(&[1]), &a).unwrap());
        assert!(distinct(&c, &a, &ints(&[1])).unwrap());
    }

    #[test]
    fn kind_mismatch_is_internal() {
        let c = ctx();
        assert!(matches!(union(&c, &Value::int(1), &ints(&[])), Err(EvalError::Internal(_))));
    }

    #[test]
    fn m4_skips_enumerated_values() {
        let c = ctx().with_mutation(Some(MutationId::M4));
        let v = enum_type(&c, &BType::Int).unwrap();
        assert_eq!(v, [-3, -2, 0, 1, 3].map(Value::int));
    }
}
