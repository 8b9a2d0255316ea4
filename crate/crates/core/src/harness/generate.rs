//! Deriving many unit tests from one known operator fact.

use serde::Serialize;

use super::HarnessError;
use crate::eval::{eval_expr, evaluate, solve, Classification, Env, Prepared, SolveError};
use crate::kernel::{EvalContext, MutationId, OpId};
use crate::syntax::*;
use crate::typecheck::TypeEnv;
use crate::value::{enumerate_type, BType, Scope, Value};

/// An operator applied to concrete arguments with its known result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedFact {
    pub op: OpId,
    pub args: Vec<Value>,
    pub expected: Value,
}

impl SeedFact {
    pub fn new(op: OpId, args: Vec<Value>, expected: Value) -> Self {
        SeedFact { op, args, expected }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TestKind {
    /// The predicate must classify as true.
    Forward,
    /// Solving the predicate for `var` must yield `expected` among its
    /// solutions.
    Solve { var: String, var_type: BType, expected: Value },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCase {
    pub name: String,
    pub text: String,
    #[serde(skip)]
    pub pred: Pred,
    pub kind: TestKind,
}

/// Type of a value; empty sets default to sets of integers.
fn value_type(v: &Value) -> BType {
    match v {
        Value::Bool(_) => BType::Bool,
        Value::Int(_) => BType::Int,
        Value::Elem { carrier, .. } => BType::Enum(carrier.to_string()),
        Value::Pair(p) => BType::prod(value_type(&p.0), value_type(&p.1)),
        Value::Set(s) => BType::pow(s.iter().next().map(value_type).unwrap_or(BType::Int)),
    }
}

fn literal(v: &Value) -> Expr {
    match v {
        Value::Bool(b) => Expr::synth(ExprKind::Bool(*b)),
        Value::Int(n) if *n < 0 => Expr::unary(UnOp::Neg, Expr::int(-n)),
        Value::Int(n) => Expr::int(*n),
        Value::Elem { carrier, index } => Expr::ident(&format!("{}{}", carrier.to_lowercase(), index + 1)),
        Value::Pair(p) => Expr::binary(BinOp::Maplet, literal(&p.0), literal(&p.1)),
        Value::Set(s) if s.is_empty() => {
            let BType::Pow(inner) = value_type(v) else { unreachable!() };
            Expr::binary(BinOp::Inter, Expr::synth(ExprKind::EmptySet), type_to_expr(&inner))
        }
        Value::Set(s) => Expr::synth(ExprKind::SetEnum(s.iter().map(literal).collect())),
    }
}

/// Syntactic renderings of one argument value.
fn representations(v: &Value) -> Vec<(String, Expr)> {
    let Value::Set(s) = v else { return vec![("literal".into(), literal(v))] };
    if s.is_empty() {
        return vec![("literal".into(), literal(v))];
    }
    let elems: Vec<Value> = s.iter().cloned().collect();
    let mut orders: Vec<Vec<Value>> = vec![elems.clone()];
    let mut rev = elems.clone();
    rev.reverse();
    let mut rot = elems.clone();
    rot.rotate_left(1);
    for o in [rev, rot] {
        if !orders.contains(&o) {
            orders.push(o);
        }
    }
    let mut out: Vec<(String, Expr)> = orders
        .into_iter()
        .enumerate()
        .map(|(i, o)| (format!("order{i}"), Expr::synth(ExprKind::SetEnum(o.iter().map(literal).collect()))))
        .collect();
    let ints: Option<Vec<i64>> = elems.iter().map(Value::as_int).collect();
    if let Some(ints) = ints {
        if ints.windows(2).all(|w| w[1] == w[0] + 1) {
            let lo = ints[0];
            let hi = ints[ints.len() - 1];
            out.push(("interval".into(), Expr::binary(BinOp::Interval, literal(&Value::Int(lo)), literal(&Value::Int(hi)))));
        }
    }
    let BType::Pow(inner) = value_type(v) else { unreachable!() };
    let x = "gx".to_string();
    let alternatives = elems
        .iter()
        .map(|e| Pred::cmp(CmpOp::Eq, Expr::ident(&x), literal(e)))
        .reduce(Pred::or)
        .expect("non-empty");
    let body = Pred::and(Pred::cmp(CmpOp::In, Expr::ident(&x), type_to_expr(&inner)), alternatives);
    out.push(("comprehension".into(), Expr::synth(ExprKind::Comprehension { vars: vec![x], body: Box::new(body) })));
    out
}

/// Builds `op(args)` as an expression, or `None` for operators without a
/// generator.
fn apply_op(op: OpId, args: &[Expr]) -> Option<Expr> {
    let bin = |b: BinOp| Some(Expr::binary(b, args[0].clone(), args[1].clone()));
    let un = |u: UnOp| Some(Expr::unary(u, args[0].clone()));
    match (op, args.len()) {
        (OpId::Union, 2) => bin(BinOp::Union),
        (OpId::Inter, 2) => bin(BinOp::Inter),
        (OpId::SetDiff, 2) => bin(BinOp::SetDiff),
        (OpId::Product, 2) => bin(BinOp::Times),
        (OpId::Interval, 2) => bin(BinOp::Interval),
        (OpId::Compose, 2) => bin(BinOp::Compose),
        (OpId::Override, 2) => bin(BinOp::Override),
        (OpId::DomRestrict, 2) => bin(BinOp::DomRestrict),
        (OpId::RanRestrict, 2) => bin(BinOp::RanRestrict),
        (OpId::DomSubtract, 2) => bin(BinOp::DomSubtract),
        (OpId::RanSubtract, 2) => bin(BinOp::RanSubtract),
        (OpId::Plus, 2) => bin(BinOp::Plus),
        (OpId::Minus, 2) => bin(BinOp::Minus),
        (OpId::Times, 2) => bin(BinOp::Times),
        (OpId::Div, 2) => bin(BinOp::Div),
        (OpId::Mod, 2) => bin(BinOp::Mod),
        (OpId::Power, 2) => bin(BinOp::Power),
        (OpId::Concat, 2) => bin(BinOp::Concat),
        (OpId::Image, 2) => Some(Expr::synth(ExprKind::Image(Box::new(args[0].clone()), Box::new(args[1].clone())))),
        (OpId::Apply, 2) => Some(Expr::synth(ExprKind::Apply(Box::new(args[0].clone()), Box::new(args[1].clone())))),
        (OpId::PowerSet, 1) => un(UnOp::Pow),
        (OpId::PowerSet1, 1) => un(UnOp::Pow1),
        (OpId::FinSet, 1) => un(UnOp::Fin),
        (OpId::FinSet1, 1) => un(UnOp::Fin1),
        (OpId::GenUnion, 1) => un(UnOp::GenUnion),
        (OpId::GenInter, 1) => un(UnOp::GenInter),
        (OpId::Card, 1) => un(UnOp::Card),
        (OpId::Min, 1) => un(UnOp::Min),
        (OpId::Max, 1) => un(UnOp::Max),
        (OpId::Dom, 1) => un(UnOp::Dom),
        (OpId::Ran, 1) => un(UnOp::Ran),
        (OpId::Inverse, 1) => un(UnOp::Inverse),
        (OpId::Identity, 1) => un(UnOp::Id),
        (OpId::Negate, 1) => un(UnOp::Neg),
        (OpId::Size, 1) => un(UnOp::Size),
        (OpId::First, 1) => un(UnOp::First),
        (OpId::Last, 1) => un(UnOp::Last),
        (OpId::Front, 1) => un(UnOp::Front),
        (OpId::Tail, 1) => un(UnOp::Tail),
        (OpId::Rev, 1) => un(UnOp::Rev),
        (OpId::SeqSet, 1) => un(UnOp::Seq),
        _ => None,
    }
}

/// Largest variable type a solve variant may enumerate.
const MAX_SOLVE_DOMAIN: u128 = 10_000;

const SOLVE_VAR: &str = "xx";

/// Cartesian product of argument representations, argument swaps for
/// commutative operators, and forward plus per-argument solve directions.
pub fn gen_unit_tests(seed: &SeedFact, scope: &Scope) -> Result<Vec<TestCase>, HarnessError> {
    let info = seed.op.info();
    let placeholder: Vec<Expr> = seed.args.iter().map(literal).collect();
    if seed.args.len() != info.arity as usize || apply_op(seed.op, &placeholder).is_none() {
        return Err(HarnessError::UnsupportedOperator(info.name.to_string()));
    }
    let reps: Vec<Vec<(String, Expr)>> = seed.args.iter().map(representations).collect();
    let expected = literal(&seed.expected);
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for r in &reps {
        combos = combos.into_iter().flat_map(|c| (0..r.len()).map(move |i| [c.clone(), vec![i]].concat())).collect();
    }
    let mut orders: Vec<Vec<usize>> = vec![(0..seed.args.len()).collect()];
    if info.commutative && seed.args.len() == 2 && seed.args[0] != seed.args[1] {
        orders.push(vec![1, 0]);
    }
    let mut out = Vec::new();
    for order in &orders {
        let swapped = order[0] != 0;
        for combo in &combos {
            let label: Vec<&str> = combo.iter().enumerate().map(|(a, &i)| reps[a][i].0.as_str()).collect();
            let label = format!("{}{}[{}]", info.name, if swapped { " swapped" } else { "" }, label.join(","));
            let exprs: Vec<Expr> = combo.iter().enumerate().map(|(a, &i)| reps[a][i].1.clone()).collect();
            let ordered: Vec<Expr> = order.iter().map(|&a| exprs[a].clone()).collect();
            let pred = Pred::cmp(CmpOp::Eq, apply_op(seed.op, &ordered).expect("checked"), expected.clone());
            out.push(TestCase { name: format!("{label} forward"), text: print_pred(&pred), pred, kind: TestKind::Forward });
            for (pos, &arg) in order.iter().enumerate() {
                let t = value_type(&seed.args[arg]);
                if scope.type_size(&t) > MAX_SOLVE_DOMAIN {
                    continue;
                }
                let in_scope = enumerate_type(&t, scope).map(|vs| vs.contains(&seed.args[arg])).unwrap_or(false);
                if !in_scope {
                    continue;
                }
                let mut with_var = ordered.clone();
                with_var[pos] = Expr::ident(SOLVE_VAR);
                let pred = Pred::cmp(CmpOp::Eq, apply_op(seed.op, &with_var).expect("checked"), expected.clone());
                out.push(TestCase {
                    name: format!("{label} solve argument {}", pos + 1),
                    text: print_pred(&pred),
                    pred,
                    kind: TestKind::Solve { var: SOLVE_VAR.into(), var_type: t, expected: seed.args[arg].clone() },
                });
            }
        }
    }
    Ok(out)
}

/// Runs one generated test. `Err` describes why it failed.
pub fn run_test(t: &TestCase, ctx: &EvalContext) -> Result<(), String> {
    match &t.kind {
        TestKind::Forward => {
            let prep = Prepared::pred(&t.pred, &TypeEnv::new()).map_err(|e| e.to_string())?;
            let ev = evaluate(&prep, &Env::new(), ctx).map_err(|e| e.to_string())?;
            if ev.classification == Classification::TrueP {
                Ok(())
            } else {
                Err(format!("classified {}", ev.classification))
            }
        }
        TestKind::Solve { var, var_type, expected } => {
            let env = TypeEnv::new().with_var(var, var_type.clone());
            let prep = Prepared::pred(&t.pred, &env).map_err(|e| e.to_string())?;
            let solver = solve(&prep, &[(var.clone(), var_type.clone())], &Env::new(), ctx).map_err(|e| e.to_string())?;
            let mut found = false;
            for r in solver {
                match r {
                    Ok(env) if env.get(var) == Some(expected) => found = true,
                    Ok(_) | Err(SolveError::Undefined(_)) => {}
                    Err(e) => return Err(e.to_string()),
                }
            }
            if found {
                Ok(())
            } else {
                Err(format!("{var} = {expected} is not among the solutions"))
            }
        }
    }
}

/// Parses a seed written as `op(arg, ...) == result`, where `op` is a
/// catalog operator name and every argument is a constant expression.
pub fn parse_seed(text: &str, scope: &Scope) -> Result<SeedFact, String> {
    let (call, result) = text.rsplit_once("==").ok_or("expected `op(args) == result`")?;
    let call = call.trim();
    let open = call.find('(').ok_or("expected `(` after the operator name")?;
    let name = call[..open].trim();
    let op = OpId::from_name(name).ok_or_else(|| format!("unknown operator {name:?}"))?;
    let inner = call[open + 1..].strip_suffix(')').ok_or("expected `)` closing the arguments")?;
    let ctx = EvalContext::new(scope.clone());
    let value = |src: &str| -> Result<Value, String> {
        let e = parse_expr(src.trim()).map_err(|e| e.to_string())?;
        let prep = Prepared::expr(&e, &TypeEnv::new()).map_err(|e| e.to_string())?;
        eval_expr(&prep, &Env::new(), &ctx).map_err(|e| e.to_string())
    };
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                args.push(value(&inner[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !inner.trim().is_empty() {
        args.push(value(&inner[start..])?);
    }
    if args.len() != op.info().arity as usize {
        return Err(format!("{name} takes {} arguments, found {}", op.info().arity, args.len()));
    }
    Ok(SeedFact::new(op, args, value(result)?))
}

/// The seed facts the generated suite starts from.
pub fn default_seeds() -> Vec<SeedFact> {
    let s = |xs: &[i64]| Value::int_set(xs.iter().copied());
    let i = Value::int;
    let rel = |ps: &[(i64, i64)]| Value::set(ps.iter().map(|&(a, b)| Value::pair(i(a), i(b))));
    let sq = |xs: &[i64]| Value::set(xs.iter().enumerate().map(|(k, &x)| Value::pair(i(k as i64 + 1), i(x))));
    vec![
        SeedFact::new(OpId::Union, vec![s(&[1]), s(&[2])], s(&[1, 2])),
        SeedFact::new(OpId::Inter, vec![s(&[1, 2]), s(&[2, 3])], s(&[2])),
        SeedFact::new(OpId::SetDiff, vec![s(&[1, 2]), s(&[2])], s(&[1])),
        SeedFact::new(OpId::Product, vec![s(&[1]), s(&[2, 3])], rel(&[(1, 2), (1, 3)])),
        SeedFact::new(OpId::Card, vec![s(&[])], i(0)),
        SeedFact::new(OpId::Card, vec![s(&[1, 2, 3])], i(3)),
        SeedFact::new(OpId::PowerSet, vec![s(&[1])], Value::set([s(&[]), s(&[1])])),
        SeedFact::new(OpId::PowerSet1, vec![s(&[1, 2])], Value::set([s(&[1]), s(&[2]), s(&[1, 2])])),
        SeedFact::new(OpId::GenUnion, vec![Value::set([s(&[1]), s(&[2, 3])])], s(&[1, 2, 3])),
        SeedFact::new(OpId::GenInter, vec![Value::set([s(&[1, 2]), s(&[2, 3])])], s(&[2])),
        SeedFact::new(OpId::Min, vec![s(&[-1, 2])], i(-1)),
        SeedFact::new(OpId::Max, vec![s(&[-1, 2])], i(2)),
        SeedFact::new(OpId::Interval, vec![i(1), i(3)], s(&[1, 2, 3])),
        SeedFact::new(OpId::Dom, vec![rel(&[(1, 2), (3, 2)])], s(&[1, 3])),
        SeedFact::new(OpId::Ran, vec![rel(&[(1, 2), (3, 2)])], s(&[2])),
        SeedFact::new(OpId::Inverse, vec![rel(&[(1, 2)])], rel(&[(2, 1)])),
        SeedFact::new(OpId::Identity, vec![s(&[1, 2])], rel(&[(1, 1), (2, 2)])),
        SeedFact::new(OpId::Compose, vec![rel(&[(1, 2)]), rel(&[(2, 3)])], rel(&[(1, 3)])),
        SeedFact::new(OpId::Override, vec![rel(&[(1, 2), (2, 2)]), rel(&[(1, 3)])], rel(&[(1, 3), (2, 2)])),
        SeedFact::new(OpId::DomRestrict, vec![s(&[1]), rel(&[(1, 2), (3, 2)])], rel(&[(1, 2)])),
        SeedFact::new(OpId::RanRestrict, vec![rel(&[(1, 2), (3, 1)]), s(&[1])], rel(&[(3, 1)])),
        SeedFact::new(OpId::DomSubtract, vec![s(&[1]), rel(&[(1, 2), (3, 2)])], rel(&[(3, 2)])),
        SeedFact::new(OpId::RanSubtract, vec![rel(&[(1, 2), (3, 1)]), s(&[1])], rel(&[(1, 2)])),
        SeedFact::new(OpId::Image, vec![rel(&[(1, 2), (1, 3), (2, 1)]), s(&[1])], s(&[2, 3])),
        SeedFact::new(OpId::Apply, vec![rel(&[(1, 2), (3, 1)]), i(3)], i(1)),
        SeedFact::new(OpId::Plus, vec![i(2), i(-3)], i(-1)),
        SeedFact::new(OpId::Minus, vec![i(1), i(3)], i(-2)),
        SeedFact::new(OpId::Times, vec![i(3), i(3)], i(9)),
        SeedFact::new(OpId::Times, vec![i(-2), i(3)], i(-6)),
        SeedFact::new(OpId::Div, vec![i(3), i(2)], i(1)),
        SeedFact::new(OpId::Mod, vec![i(3), i(2)], i(1)),
        SeedFact::new(OpId::Power, vec![i(2), i(3)], i(8)),
        SeedFact::new(OpId::Negate, vec![i(2)], i(-2)),
        SeedFact::new(OpId::Size, vec![sq(&[3, 1])], i(2)),
        SeedFact::new(OpId::Concat, vec![sq(&[1]), sq(&[2])], sq(&[1, 2])),
        SeedFact::new(OpId::First, vec![sq(&[3, 1])], i(3)),
        SeedFact::new(OpId::Last, vec![sq(&[3, 1])], i(1)),
        SeedFact::new(OpId::Front, vec![sq(&[3, 1])], sq(&[3])),
        SeedFact::new(OpId::Tail, vec![sq(&[3, 1])], sq(&[1])),
        SeedFact::new(OpId::Rev, vec![sq(&[3, 1])], sq(&[1, 3])),
    ]
}

/// Every test generated from [`default_seeds`].
pub fn default_tests(scope: &Scope) -> Vec<TestCase> {
    default_seeds().iter().flat_map(|s| gen_unit_tests(s, scope).expect("default seeds are supported")).collect()
}

/// One-line description of a test for failure listings.
pub fn describe(t: &TestCase, m: Option<MutationId>) -> String {
    match m {
        Some(m) => format!("{} under {m}: {}", t.name, t.text),
        None => format!("{}: {}", t.name, t.text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed_union() -> SeedFact {
        SeedFact::new(OpId::Union, vec![Value::int_set([1]), Value::int_set([2])], Value::int_set([1, 2]))
    }

    #[test]
    fn seeds_parse_from_text() {
        let scope = Scope::default();
        assert_eq!(parse_seed("union({1}, {2}) == {1,2}", &scope).unwrap(), seed_union());
        let s = parse_seed("apply({1|->2, 3|->1}, 3) == 1", &scope).unwrap();
        assert_eq!((s.op, s.args.len()), (OpId::Apply, 2));
        assert!(parse_seed("union({1}) == {1}", &scope).is_err());
        assert!(parse_seed("frobnicate(1) == 1", &scope).is_err());
    }

    #[test]
    fn union_seed_yields_many_sound_tests() {
        let scope = Scope::default();
        let tests = gen_unit_tests(&seed_union(), &scope).unwrap();
        assert!(tests.len() >= 24, "{}", tests.len());
        let ctx = EvalContext::new(scope);
        for t in &tests {
            run_test(t, &ctx).unwrap_or_else(|e| panic!("{}: {e}", t.text));
        }
        assert!(tests.iter().any(|t| t.name.contains("swapped")));
        assert!(tests.iter().any(|t| t.text.contains("..")));
    }

    #[test]
    fn non_commutative_has_no_swaps() {
        let seed = SeedFact::new(OpId::SetDiff, vec![Value::int_set([1, 2]), Value::int_set([2])], Value::int_set([1]));
        let tests = gen_unit_tests(&seed, &Scope::default()).unwrap();
        assert!(!tests.iter().any(|t| t.name.contains("swapped")));
    }

    #[test]
    fn empty_argument_has_one_representation() {
        let seed = SeedFact::new(OpId::Card, vec![Value::empty_set()], Value::int(0));
        let tests = gen_unit_tests(&seed, &Scope::default()).unwrap();
        assert_eq!(tests.len(), 2);
        assert_eq!(tests[0].kind, TestKind::Forward);
        assert!(matches!(tests[1].kind, TestKind::Solve { .. }));
    }

    #[test]
    fn unsupported_operator() {
        let seed = SeedFact::new(OpId::Member, vec![Value::int(1), Value::int_set([1])], Value::Bool(true));
        assert!(matches!(gen_unit_tests(&seed, &Scope::default()), Err(HarnessError::UnsupportedOperator(_))));
    }

    #[test]
    fn default_seeds_are_sound() {
        let scope = Scope::default();
        let ctx = EvalContext::new(scope.clone());
        let tests = default_tests(&scope);
        for t in &tests {
            run_test(t, &ctx).unwrap_or_else(|e| panic!("{}: {e}", describe(t, None)));
        }
    }
}
