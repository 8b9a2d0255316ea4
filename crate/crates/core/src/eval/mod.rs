//! Dual-chain predicate evaluation.
//!
//! Every predicate is evaluated twice: the positive chain succeeds iff the
//! predicate holds, the negative chain succeeds iff its negation holds. The
//! two are joined by [`classify`].

pub mod machine;
pub mod reference;
pub mod solve;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::kernel::{ops, EvalContext, EvalError, KResult, Polarity};
use crate::syntax::*;
use crate::typecheck::{infer, infer_with_unknowns, TypeEnv, TypeError, TypedAst};
use crate::value::{BType, Scope, SetV, Value};

pub use machine::{check_machine, MachineError, MachineReport};
pub use solve::{solve, SolveError, Solver};

/// Result of one chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Outcome {
    True,
    False,
    /// The chain hit an undefined subterm.
    Fail { pos: Option<Pos>, reason: String },
    Timeout,
}

impl Outcome {
    fn from_bool(b: bool) -> Outcome {
        if b {
            Outcome::True
        } else {
            Outcome::False
        }
    }

    fn fail(e: EvalError) -> Result<Outcome, EvalError> {
        match e {
            EvalError::Undef { reason, pos } => Ok(Outcome::Fail { pos, reason }),
            EvalError::Timeout => Ok(Outcome::Timeout),
            internal @ EvalError::Internal(_) => Err(internal),
        }
    }

    pub fn succeeded(&self) -> bool {
        matches!(self, Outcome::True)
    }
}

/// Joint verdict of the two chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Classification {
    BugBothTrueFalse,
    TrueP,
    FalseP,
    NotWellDefined,
    ProbablyTrue,
    FalseOrUndefined,
    ProbablyFalse,
    TrueOrUndefined,
    Unknown,
}

impl Classification {
    pub const ALL: [Classification; 9] = [
        Classification::BugBothTrueFalse,
        Classification::TrueP,
        Classification::FalseP,
        Classification::NotWellDefined,
        Classification::ProbablyTrue,
        Classification::FalseOrUndefined,
        Classification::ProbablyFalse,
        Classification::TrueOrUndefined,
        Classification::Unknown,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Classification::BugBothTrueFalse => "bug: both true and false",
            Classification::TrueP => "true",
            Classification::FalseP => "false",
            Classification::NotWellDefined => "unknown / not well-defined",
            Classification::ProbablyTrue => "probably true",
            Classification::FalseOrUndefined => "false or undefined",
            Classification::ProbablyFalse => "probably false",
            Classification::TrueOrUndefined => "true or undefined",
            Classification::Unknown => "unknown",
        }
    }

    /// Verdict string used in machine assertion reports.
    pub fn verdict(self) -> &'static str {
        match self {
            Classification::TrueP => "true",
            Classification::FalseP => "false",
            Classification::NotWellDefined | Classification::Unknown => "unknown",
            Classification::BugBothTrueFalse => "both_true_false",
            Classification::ProbablyTrue => "probably_true",
            Classification::FalseOrUndefined => "false_or_undefined",
            Classification::ProbablyFalse => "probably_false",
            Classification::TrueOrUndefined => "true_or_undefined",
        }
    }

    pub fn involves_timeout(self) -> bool {
        matches!(
            self,
            Classification::ProbablyTrue
                | Classification::FalseOrUndefined
                | Classification::ProbablyFalse
                | Classification::TrueOrUndefined
                | Classification::Unknown
        )
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The nine-row table. `Fail` counts as the chain not succeeding.
pub fn classify(pos: &Outcome, neg: &Outcome) -> Classification {
    use Classification::*;
    #[derive(PartialEq)]
    enum S {
        T,
        F,
        X,
    }
    let s = |o: &Outcome| match o {
        Outcome::True => S::T,
        Outcome::False | Outcome::Fail { .. } => S::F,
        Outcome::Timeout => S::X,
    };
    match (s(pos), s(neg)) {
        (S::T, S::T) => BugBothTrueFalse,
        (S::T, S::F) => TrueP,
        (S::F, S::T) => FalseP,
        (S::F, S::F) => NotWellDefined,
        (S::T, S::X) => ProbablyTrue,
        (S::F, S::X) => FalseOrUndefined,
        (S::X, S::T) => ProbablyFalse,
        (S::X, S::F) => TrueOrUndefined,
        (S::X, S::X) => Unknown,
    }
}

/// Variable bindings, in binding order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Env {
    bindings: Vec<(String, Value)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, Value)>>(pairs: I) -> Self {
        let mut env = Env::new();
        for (k, v) in pairs {
            env.bind(&k, v);
        }
        env
    }

    pub fn bind(&mut self, name: &str, v: Value) {
        match self.bindings.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = v,
            None => self.bindings.push((name.to_string(), v)),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// `SS={el1}, TT={}` using the scope's element names.
    pub fn render(&self, scope: &Scope) -> String {
        self.bindings.iter().map(|(n, v)| format!("{n}={}", scope.render(v))).collect::<Vec<_>>().join(", ")
    }
}

/// A type-checked expression, predicate or machine ready for evaluation.
#[derive(Debug, Clone)]
pub struct Prepared {
    // Boxed inside an Arc so node addresses stay fixed; `binder_types` is
    // keyed by them.
    ast: Arc<Ast>,
    binder_types: HashMap<usize, Vec<BType>>,
    pub free_types: BTreeMap<String, BType>,
    pub carriers: BTreeMap<String, Vec<String>>,
}

fn node_key(c: Child<'_>) -> usize {
    match c {
        Child::Expr(e) => e as *const Expr as usize,
        Child::Pred(p) => p as *const Pred as usize,
    }
}

impl Prepared {
    pub fn from_typed(typed: TypedAst, env: &TypeEnv) -> Prepared {
        let ast = Arc::new(typed.ast);
        let mut binder_types = HashMap::new();
        let mut next = typed.binder_types.into_iter().map(|(_, t)| t);
        let mut carriers = env.carriers.clone();
        let mut visit = |c: Child<'_>| {
            if let Some(vars) = c.binders() {
                let tys: Vec<BType> = vars.iter().map(|_| next.next().expect("binder typed")).collect();
                binder_types.insert(node_key(c), tys);
            }
        };
        match &*ast {
            Ast::Expr(e) => Child::Expr(e).walk(&mut visit),
            Ast::Pred(p) => Child::Pred(p).walk(&mut visit),
            Ast::Machine(m) => {
                Child::Pred(&m.properties).walk(&mut visit);
                for a in &m.assertions {
                    Child::Pred(a).walk(&mut visit);
                }
                for d in &m.sets {
                    carriers.insert(d.name.clone(), d.elems.clone());
                }
            }
        }
        let mut free_types = typed.free_types;
        for (n, t) in &env.vars {
            free_types.entry(n.clone()).or_insert_with(|| t.clone());
        }
        Prepared { ast, binder_types, free_types, carriers }
    }

    /// Type-checks `p`; free identifiers must be typed in `env`.
    pub fn pred(p: &Pred, env: &TypeEnv) -> Result<Prepared, TypeError> {
        Ok(Prepared::from_typed(infer(&Ast::Pred(p.clone()), env)?, env))
    }

    /// Type-checks `p`, inferring the types of the listed free variables.
    pub fn pred_with_unknowns(p: &Pred, env: &TypeEnv, unknowns: &[String]) -> Result<Prepared, TypeError> {
        Ok(Prepared::from_typed(infer_with_unknowns(&Ast::Pred(p.clone()), env, unknowns)?, env))
    }

    pub fn expr(e: &Expr, env: &TypeEnv) -> Result<Prepared, TypeError> {
        Ok(Prepared::from_typed(infer(&Ast::Expr(e.clone()), env)?, env))
    }

    pub fn machine(m: &Machine) -> Result<Prepared, TypeError> {
        let env = TypeEnv::new();
        Ok(Prepared::from_typed(infer(&Ast::Machine(m.clone()), &env)?, &env))
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    pub fn as_pred(&self) -> Option<&Pred> {
        match &*self.ast {
            Ast::Pred(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match &*self.ast {
            Ast::Expr(e) => Some(e),
            _ => None,
        }
    }

    pub fn binder_types(&self, node: Child<'_>) -> Option<&[BType]> {
        self.binder_types.get(&node_key(node)).map(Vec::as_slice)
    }

    /// Scope extended with the element names of enumerated carriers.
    pub fn scope_for(&self, base: &Scope) -> Scope {
        let mut s = base.clone();
        for (c, elems) in &self.carriers {
            if !elems.is_empty() {
                s = s.with_enumerated(c, elems);
            }
        }
        s
    }
}

pub(crate) struct Evaluator<'a> {
    pub ctx: &'a EvalContext,
    pub prep: &'a Prepared,
    stack: Vec<(String, Value)>,
}

fn tuple_value(vals: &[Value]) -> Value {
    let mut it = vals.iter().cloned();
    let first = it.next().expect("non-empty binder list");
    it.fold(first, Value::pair)
}

/// One independent part of a quantifier domain: the variables it covers and
/// their candidate value tuples.
struct Factor {
    vars: Vec<usize>,
    tuples: Vec<Vec<Value>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a EvalContext, prep: &'a Prepared, env: &Env) -> Self {
        Evaluator { ctx, prep, stack: env.bindings.clone() }
    }

    fn lookup(&self, name: &str) -> KResult {
        if let Some((_, v)) = self.stack.iter().rev().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        if self.prep.carriers.contains_key(name) {
            return Ok(self.ctx.scope.carrier_value(name));
        }
        for (c, elems) in &self.prep.carriers {
            if let Some(i) = elems.iter().position(|e| e == name) {
                return Ok(Value::elem(c, i as u32));
            }
        }
        if self.prep.free_types.get(name).and_then(as_carrier_type).is_some() {
            return Ok(self.ctx.scope.carrier_value(name));
        }
        Err(EvalError::Internal(format!("unbound identifier {name}")))
    }

    // ----- expressions -----

    pub fn expr(&mut self, e: &Expr) -> KResult {
        self.ctx.tick(1)?;
        self.expr_inner(e).map_err(|err| err.at(e.pos))
    }

    fn expr_inner(&mut self, e: &Expr) -> KResult {
        let ctx = self.ctx;
        match &e.kind {
            ExprKind::Ident(name) => self.lookup(name),
            ExprKind::Int(n) => Ok(Value::Int(*n)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Builtin(b) => ops::builtin(ctx, *b),
            ExprKind::EmptySet | ExprKind::EmptySeq => Ok(Value::empty_set()),
            ExprKind::SetEnum(items) => {
                let vals = items.iter().map(|i| self.expr(i)).collect::<KResult<Vec<_>>>()?;
                Ok(Value::Set(SetV::from_vec(vals)))
            }
            ExprKind::SeqEnum(items) => {
                let mut vals = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    vals.push(Value::pair(Value::Int(i as i64 + 1), self.expr(item)?));
                }
                Ok(Value::Set(SetV::from_vec(vals)))
            }
            ExprKind::Comprehension { vars, body } => {
                let tuples = self.domain(Child::Expr(e), vars, &body.conjuncts())?;
                let mut out = Vec::new();
                for t in tuples {
                    self.push(vars, &t);
                    let r = self.pos(body);
                    self.pop(vars.len());
                    if embedded(r?)? {
                        out.push(tuple_value(&t));
                    }
                }
                Ok(Value::Set(SetV::from_vec(out)))
            }
            ExprKind::Lambda { vars, pred, body } => {
                let tuples = self.domain(Child::Expr(e), vars, &pred.conjuncts())?;
                let mut out = Vec::new();
                for t in tuples {
                    self.push(vars, &t);
                    let r = self.pos(pred).and_then(embedded).and_then(|keep| {
                        if keep {
                            self.expr(body).map(Some)
                        } else {
                            Ok(None)
                        }
                    });
                    self.pop(vars.len());
                    if let Some(v) = r? {
                        out.push(Value::pair(tuple_value(&t), v));
                    }
                }
                Ok(Value::Set(SetV::from_vec(out)))
            }
            ExprKind::BoolOf(p) => {
                let r = self.pos(p)?;
                Ok(Value::Bool(embedded(r)?))
            }
            ExprKind::Unary(op, arg) => {
                let a = self.expr(arg)?;
                match op {
                    UnOp::Neg => ops::negate(ctx, &a),
                    UnOp::Inverse => ops::inverse(ctx, &a),
                    UnOp::Pow => ops::pow(ctx, &a),
                    UnOp::Pow1 => ops::pow1(ctx, &a),
                    UnOp::Fin => ops::fin(ctx, &a),
                    UnOp::Fin1 => ops::fin1(ctx, &a),
                    UnOp::Dom => ops::dom(ctx, &a),
                    UnOp::Ran => ops::ran(ctx, &a),
                    UnOp::Card => ops::card(ctx, &a),
                    UnOp::GenUnion => ops::general_union(ctx, &a),
                    UnOp::GenInter => ops::general_inter(ctx, &a),
                    UnOp::Min => ops::min(ctx, &a),
                    UnOp::Max => ops::max(ctx, &a),
                    UnOp::Id => ops::identity(ctx, &a),
                    UnOp::Size => ops::size(ctx, &a),
                    UnOp::First => ops::first(ctx, &a),
                    UnOp::Last => ops::last(ctx, &a),
                    UnOp::Front => ops::front(ctx, &a),
                    UnOp::Tail => ops::tail(ctx, &a),
                    UnOp::Rev => ops::rev(ctx, &a),
                    UnOp::Seq => ops::seq_set(ctx, &a),
                }
            }
            ExprKind::Binary(op, l, r) => {
                let a = self.expr(l)?;
                let b = self.expr(r)?;
                binary(ctx, *op, &a, &b)
            }
            ExprKind::Apply(f, x) => {
                let fv = self.expr(f)?;
                let xv = self.expr(x)?;
                ops::apply(ctx, &fv, &xv)
            }
            ExprKind::Image(r, s) => {
                let rv = self.expr(r)?;
                let sv = self.expr(s)?;
                ops::image(ctx, &rv, &sv)
            }
        }
    }

    fn push(&mut self, vars: &[String], vals: &[Value]) {
        for (n, v) in vars.iter().zip(vals) {
            self.stack.push((n.clone(), v.clone()));
        }
    }

    fn pop(&mut self, n: usize) {
        let len = self.stack.len();
        self.stack.truncate(len - n);
    }

    /// Candidate tuples for a binder. Leading `x : E` conjuncts whose set
    /// does not mention the bound variables restrict the domain; anything
    /// else ranges over the variable's type.
    fn domain(&mut self, node: Child<'_>, vars: &[String], conjuncts: &[&Pred]) -> KResult<Vec<Vec<Value>>> {
        let types = self
            .prep
            .binder_types(node)
            .ok_or_else(|| EvalError::Internal("binder without types".into()))?
            .to_vec();
        let mut factors: Vec<Factor> = Vec::new();
        let mut covered = vec![false; vars.len()];
        for c in conjuncts {
            let Some((idx, set_expr)) = guard_shape(c, vars) else { break };
            if idx.iter().any(|&i| covered[i]) {
                continue;
            }
            let members = match self.expr(set_expr) {
                Ok(Value::Set(s)) => s,
                Ok(_) => return Err(EvalError::Internal("guard is not a set".into())),
                Err(EvalError::Undef { .. }) => continue,
                Err(other) => return Err(other),
            };
            let tuples = if idx.len() == 1 {
                members.iter().map(|v| vec![v.clone()]).collect()
            } else {
                members
                    .iter()
                    .filter_map(|v| v.as_pair().map(|(a, b)| vec![a.clone(), b.clone()]))
                    .collect()
            };
            for &i in &idx {
                covered[i] = true;
            }
            factors.push(Factor { vars: idx, tuples });
        }
        for (i, t) in types.iter().enumerate() {
            if !covered[i] {
                let vals = ops::enum_type(self.ctx, t)?;
                factors.push(Factor { vars: vec![i], tuples: vals.into_iter().map(|v| vec![v]).collect() });
            }
        }
        factors.sort_by_key(|f| f.vars[0]);
        let total: u128 = factors.iter().map(|f| f.tuples.len() as u128).product();
        if total > self.ctx.scope.enum_limit as u128 {
            return Err(EvalError::Timeout);
        }
        self.ctx.tick(total as u64)?;
        let mut out = vec![vec![Value::Bool(false); vars.len()]];
        for f in &factors {
            let mut next = Vec::with_capacity(out.len() * f.tuples.len());
            for partial in &out {
                for t in &f.tuples {
                    let mut row = partial.clone();
                    for (k, &i) in f.vars.iter().enumerate() {
                        row[i] = t[k].clone();
                    }
                    next.push(row);
                }
            }
            out = next;
        }
        Ok(out)
    }

    // ----- predicates -----

    fn operands(&mut self, l: &Expr, r: &Expr) -> KResult<(Value, Value)> {
        let a = self.expr(l)?;
        let b = self.expr(r)?;
        Ok((a, b))
    }

    pub fn pos(&mut self, p: &Pred) -> Result<Outcome, EvalError> {
        if let Err(e) = self.ctx.tick(1) {
            return Outcome::fail(e);
        }
        match &p.kind {
            PredKind::And(l, r) => match self.pos(l)? {
                Outcome::True => self.pos(r),
                other => Ok(other),
            },
            PredKind::Or(l, r) => match self.pos(l)? {
                Outcome::False => self.pos(r),
                other => Ok(other),
            },
            PredKind::Implies(l, r) => match self.pos(l)? {
                Outcome::True => self.pos(r),
                Outcome::False => Ok(Outcome::True),
                other => Ok(other),
            },
            PredKind::Equiv(l, r) => {
                let a = self.pos(l)?;
                if !matches!(a, Outcome::True | Outcome::False) {
                    return Ok(a);
                }
                let b = self.pos(r)?;
                if !matches!(b, Outcome::True | Outcome::False) {
                    return Ok(b);
                }
                Ok(Outcome::from_bool(a == b))
            }
            PredKind::Not(inner) => self.neg(inner),
            PredKind::ForAll { vars, body } => {
                let guards = match &body.kind {
                    PredKind::Implies(g, _) => g.conjuncts(),
                    _ => vec![],
                };
                self.quantify(Child::Pred(p), vars, &guards, body, Polarity::Pos, true)
            }
            PredKind::Exists { vars, body } => {
                self.quantify(Child::Pred(p), vars, &body.conjuncts(), body, Polarity::Pos, false)
            }
            PredKind::Compare(op, l, r) => self.atom(*op, l, r, p.pos, Polarity::Pos),
        }
    }

    pub fn neg(&mut self, p: &Pred) -> Result<Outcome, EvalError> {
        if let Err(e) = self.ctx.tick(1) {
            return Outcome::fail(e);
        }
        match &p.kind {
            // not(P & Q) = not P or not Q
            PredKind::And(l, r) => match self.neg(l)? {
                Outcome::False => self.neg(r),
                other => Ok(other),
            },
            // not(P or Q) = not P & not Q
            PredKind::Or(l, r) => match self.neg(l)? {
                Outcome::True => self.neg(r),
                other => Ok(other),
            },
            // not(P => Q) = P & not Q
            PredKind::Implies(l, r) => match self.pos(l)? {
                Outcome::True => self.neg(r),
                other => Ok(other),
            },
            // not(P <=> Q) = (P <=> not Q)
            PredKind::Equiv(l, r) => {
                let a = self.pos(l)?;
                if !matches!(a, Outcome::True | Outcome::False) {
                    return Ok(a);
                }
                let b = self.neg(r)?;
                if !matches!(b, Outcome::True | Outcome::False) {
                    return Ok(b);
                }
                Ok(Outcome::from_bool(a == b))
            }
            PredKind::Not(inner) => self.pos(inner),
            // not(!x.P) = #x.not P
            PredKind::ForAll { vars, body } => {
                let guards = match &body.kind {
                    PredKind::Implies(g, _) => g.conjuncts(),
                    _ => vec![],
                };
                self.quantify(Child::Pred(p), vars, &guards, body, Polarity::Neg, false)
            }
            // not(#x.P) = !x.not P
            PredKind::Exists { vars, body } => {
                self.quantify(Child::Pred(p), vars, &body.conjuncts(), body, Polarity::Neg, true)
            }
            PredKind::Compare(op, l, r) => self.atom(*op, l, r, p.pos, Polarity::Neg),
        }
    }

    /// Runs `body` in the given polarity for every candidate; `all` demands
    /// success everywhere, otherwise one success suffices.
    fn quantify(
        &mut self,
        node: Child<'_>,
        vars: &[String],
        guards: &[&Pred],
        body: &Pred,
        polarity: Polarity,
        all: bool,
    ) -> Result<Outcome, EvalError> {
        let tuples = match self.domain(node, vars, guards) {
            Ok(t) => t,
            Err(e) => return Outcome::fail(e),
        };
        for t in tuples {
            self.push(vars, &t);
            let r = match polarity {
                Polarity::Pos => self.pos(body),
                Polarity::Neg => self.neg(body),
            };
            self.pop(vars.len());
            match r? {
                Outcome::True if !all => return Ok(Outcome::True),
                Outcome::False if all => return Ok(Outcome::False),
                Outcome::True | Outcome::False => {}
                other => return Ok(other),
            }
        }
        Ok(Outcome::from_bool(all))
    }

    fn atom(&mut self, op: CmpOp, l: &Expr, r: &Expr, at: Pos, polarity: Polarity) -> Result<Outcome, EvalError> {
        let positive = polarity == Polarity::Pos;
        let r = match op {
            CmpOp::In => self.membership(l, r, positive),
            CmpOp::NotIn => self.membership(l, r, !positive),
            _ => self.comparison(op, l, r, positive),
        };
        match r {
            Ok(b) => Ok(Outcome::from_bool(b)),
            Err(e) => Outcome::fail(e.at(at)),
        }
    }

    fn comparison(&mut self, op: CmpOp, l: &Expr, r: &Expr, positive: bool) -> KResult<bool> {
        let ctx = self.ctx;
        let (a, b) = self.operands(l, r)?;
        let (op, positive) = match op {
            CmpOp::Neq => (CmpOp::Eq, !positive),
            CmpOp::NotSubset => (CmpOp::Subset, !positive),
            CmpOp::NotStrictSubset => (CmpOp::StrictSubset, !positive),
            other => (other, positive),
        };
        match (op, positive) {
            (CmpOp::Eq, true) => ops::equal(ctx, &a, &b),
            (CmpOp::Eq, false) => ops::distinct(ctx, &a, &b),
            (CmpOp::Subset, true) => ops::subset(ctx, &a, &b),
            (CmpOp::Subset, false) => ops::non_subset(ctx, &a, &b),
            (CmpOp::StrictSubset, true) => Ok(ops::subset(ctx, &a, &b)? && ops::distinct(ctx, &a, &b)?),
            (CmpOp::StrictSubset, false) => Ok(ops::non_subset(ctx, &a, &b)? || ops::equal(ctx, &a, &b)?),
            (cmp, true) => ops::int_compare(ctx, cmp, &a, &b),
            (cmp, false) => ops::int_compare(ctx, complement(cmp), &a, &b),
        }
    }

    /// `x : S` when `positive`, otherwise `x /: S`. Power sets, arrows and
    /// sequence sets are tested without being built.
    fn membership(&mut self, x: &Expr, s: &Expr, positive: bool) -> KResult<bool> {
        let ctx = self.ctx;
        match &s.kind {
            ExprKind::Unary(op @ (UnOp::Pow | UnOp::Pow1 | UnOp::Fin | UnOp::Fin1), base) => {
                let (xv, bv) = self.operands(x, base)?;
                let nonempty_required = matches!(op, UnOp::Pow1 | UnOp::Fin1);
                let empty = xv.as_set().is_some_and(SetV::is_empty);
                if positive {
                    Ok(ops::subset(ctx, &xv, &bv)? && !(nonempty_required && empty))
                } else {
                    Ok((nonempty_required && empty) || ops::non_subset(ctx, &xv, &bv)?)
                }
            }
            ExprKind::Binary(BinOp::Arrow(kind), d, c) => {
                let xv = self.expr(x)?;
                let (dv, cv) = self.operands(d, c)?;
                Ok(ops::is_function_kind(ctx, &xv, &dv, &cv, *kind)? == positive)
            }
            ExprKind::Unary(UnOp::Seq, base) => {
                let (xv, bv) = self.operands(x, base)?;
                let holds = ops::is_sequence(ctx, &xv)? && ops::subset(ctx, &ops::ran(ctx, &xv)?, &bv)?;
                Ok(holds == positive)
            }
            _ => {
                let (xv, sv) = self.operands(x, s)?;
                if positive {
                    ops::member(ctx, &xv, &sv)
                } else {
                    ops::non_member(ctx, &xv, &sv)
                }
            }
        }
    }
}

fn as_carrier_type(t: &BType) -> Option<&str> {
    match t {
        BType::Pow(inner) => match &**inner {
            BType::Enum(c) => Some(c),
            _ => None,
        },
        _ => None,
    }
}

fn complement(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Lt => CmpOp::Ge,
        CmpOp::Le => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Le,
        CmpOp::Ge => CmpOp::Lt,
        other => other,
    }
}

/// A predicate inside an expression is decided by the positive chain alone.
fn embedded(o: Outcome) -> KResult<bool> {
    match o {
        Outcome::True => Ok(true),
        Outcome::False => Ok(false),
        Outcome::Fail { reason, pos } => Err(EvalError::Undef { reason, pos }),
        Outcome::Timeout => Err(EvalError::Timeout),
    }
}

/// `x : E` or `x|->y : E` over bound variables, with `E` free of them.
fn guard_shape<'p>(c: &'p Pred, vars: &[String]) -> Option<(Vec<usize>, &'p Expr)> {
    let PredKind::Compare(CmpOp::In, lhs, set_expr) = &c.kind else { return None };
    let free = set_expr.free_vars();
    if vars.iter().any(|v| free.contains(v)) {
        return None;
    }
    let var_index = |e: &Expr| match &e.kind {
        ExprKind::Ident(n) => vars.iter().position(|v| v == n),
        _ => None,
    };
    match &lhs.kind {
        ExprKind::Ident(_) => var_index(lhs).map(|i| (vec![i], &**set_expr)),
        ExprKind::Binary(BinOp::Maplet, a, b) => {
            let (i, j) = (var_index(a)?, var_index(b)?);
            (i != j).then(|| (vec![i, j], &**set_expr))
        }
        _ => None,
    }
}

pub(crate) fn binary(ctx: &EvalContext, op: BinOp, a: &Value, b: &Value) -> KResult {
    match op {
        BinOp::Union => ops::union(ctx, a, b),
        BinOp::Inter => ops::inter(ctx, a, b),
        BinOp::SetDiff => ops::difference(ctx, a, b),
        BinOp::Override => ops::override_(ctx, a, b),
        BinOp::DomRestrict => ops::dom_restrict(ctx, a, b),
        BinOp::RanRestrict => ops::ran_restrict(ctx, a, b),
        BinOp::DomSubtract => ops::dom_subtract(ctx, a, b),
        BinOp::RanSubtract => ops::ran_subtract(ctx, a, b),
        BinOp::Compose => ops::compose(ctx, a, b),
        BinOp::Concat => ops::concat(ctx, a, b),
        BinOp::Arrow(k) => ops::arrow_set(ctx, a, b, k),
        BinOp::Maplet => Ok(Value::pair(a.clone(), b.clone())),
        BinOp::Interval => ops::interval(ctx, a, b),
        BinOp::Plus => ops::plus(ctx, a, b),
        BinOp::Minus => match a {
            Value::Set(_) => ops::difference(ctx, a, b),
            _ => ops::minus(ctx, a, b),
        },
        BinOp::Times => match a {
            Value::Set(_) => ops::product(ctx, a, b),
            _ => ops::times(ctx, a, b),
        },
        BinOp::Div => ops::div(ctx, a, b),
        BinOp::Mod => ops::modulo(ctx, a, b),
        BinOp::Power => ops::power(ctx, a, b),
    }
}

fn root_pred(prep: &Prepared) -> Result<&Pred, EvalError> {
    prep.as_pred().ok_or_else(|| EvalError::Internal("not a predicate".into()))
}

fn run_chain(prep: &Prepared, p: &Pred, env: &Env, ctx: &EvalContext, polarity: Polarity) -> Result<Outcome, EvalError> {
    if ctx.is_forced_timeout(polarity) {
        return Ok(Outcome::Timeout);
    }
    ctx.refuel();
    let mut ev = Evaluator::new(ctx, prep, env);
    match polarity {
        Polarity::Pos => ev.pos(p),
        Polarity::Neg => ev.neg(p),
    }
}

/// Positive chain with a full budget. Only internal errors escape.
pub fn eval_pos(prep: &Prepared, env: &Env, ctx: &EvalContext) -> Result<Outcome, EvalError> {
    run_chain(prep, root_pred(prep)?, env, ctx, Polarity::Pos)
}

/// Negative chain with a full budget.
pub fn eval_neg(prep: &Prepared, env: &Env, ctx: &EvalContext) -> Result<Outcome, EvalError> {
    run_chain(prep, root_pred(prep)?, env, ctx, Polarity::Neg)
}

pub fn eval_expr(prep: &Prepared, env: &Env, ctx: &EvalContext) -> KResult {
    let e = prep.as_expr().ok_or_else(|| EvalError::Internal("not an expression".into()))?;
    ctx.refuel();
    Evaluator::new(ctx, prep, env).expr(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub pos: Outcome,
    pub neg: Outcome,
    pub classification: Classification,
}

/// Runs both chains and classifies.
pub fn evaluate(prep: &Prepared, env: &Env, ctx: &EvalContext) -> Result<Evaluation, EvalError> {
    evaluate_node(prep, root_pred(prep)?, env, ctx)
}

/// Like [`evaluate`] for a predicate node owned by `prep`, such as one
/// assertion of a prepared machine.
pub fn evaluate_node(prep: &Prepared, p: &Pred, env: &Env, ctx: &EvalContext) -> Result<Evaluation, EvalError> {
    let pos = run_chain(prep, p, env, ctx, Polarity::Pos)?;
    let neg = run_chain(prep, p, env, ctx, Polarity::Neg)?;
    let classification = classify(&pos, &neg);
    Ok(Evaluation { pos, neg, classification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MutationId;

    fn run(src: &str) -> Evaluation {
        let p = parse_pred(src).unwrap();
        let prep = Prepared::pred(&p, &TypeEnv::new()).unwrap();
        let ctx = EvalContext::new(Scope::default());
        evaluate(&prep, &Env::new(), &ctx).unwrap()
    }

    #[test]
    fn nine_rows() {
        use Outcome::*;
        let f = Fail { pos: None, reason: String::new() };
        let cases = [
            (True, True, Classification::BugBothTrueFalse),
            (True, False, Classification::TrueP),
            (False, True, Classification::FalseP),
            (False, False, Classification::NotWellDefined),
            (True, Timeout, Classification::ProbablyTrue),
            (False, Timeout, Classification::FalseOrUndefined),
            (Timeout, True, Classification::ProbablyFalse),
            (Timeout, False, Classification::TrueOrUndefined),
            (Timeout, Timeout, Classification::Unknown),
        ];
        for (p, n, c) in cases {
            assert_eq!(classify(&p, &n), c);
        }
        assert_eq!(classify(&f, &f), Classification::NotWellDefined);
    }

    #[test]
    fn simple_truths() {
        assert_eq!(run("1..3 = {1,2,3}").classification, Classification::TrueP);
        assert_eq!(run("1 = 2").classification, Classification::FalseP);
        assert_eq!(run("2/0 = 1").classification, Classification::NotWellDefined);
        assert_eq!(run("#x.(x : 1..3 & x > 3)").classification, Classification::FalseP);
        assert_eq!(run("!x.(x : 1..3 => x > 0)").classification, Classification::TrueP);
        assert_eq!(run("union({{0,5,2,4},{2,4,5},{2,1,7,5}}) = {0,1,2,4,5,7}").classification, Classification::TrueP);
    }

    #[test]
    fn left_to_right_well_definedness() {
        assert_eq!(run("1 = 2 & 2/0 = 1").classification, Classification::FalseP);
        assert_eq!(run("2/0 = 1 & 1 = 2").classification, Classification::NotWellDefined);
        assert_eq!(run("1 = 1 or 2/0 = 1").classification, Classification::TrueP);
    }

    #[test]
    fn lambdas_and_comprehensions() {
        assert_eq!(run("%x.(x:1..3|x-1) = {1|->0,2|->1,3|->2}").classification, Classification::TrueP);
        assert_eq!(run("{x | x : 1..5 & x mod 2 = 0} = {2,4}").classification, Classification::TrueP);
        assert_eq!(run("bool(1 < 2) = TRUE").classification, Classification::TrueP);
        assert_eq!(run("{x,y | x : 1..2 & y : 1..2 & x < y} = {1|->2}").classification, Classification::TrueP);
    }

    #[test]
    fn special_membership_forms() {
        assert_eq!(run("{1|->2} : {1,3} +-> {2}").classification, Classification::TrueP);
        assert_eq!(run("{1|->2} : {1,3} --> {2}").classification, Classification::FalseP);
        assert_eq!(run("{} /: POW1({1})").classification, Classification::TrueP);
        assert_eq!(run("[1,1] : seq({1})").classification, Classification::TrueP);
        assert_eq!(run("{1} <<: {1,2}").classification, Classification::TrueP);
        assert_eq!(run("{1,2} /<<: {1,2}").classification, Classification::TrueP);
    }

    #[test]
    fn forced_timeouts() {
        let p = parse_pred("1 = 1").unwrap();
        let prep = Prepared::pred(&p, &TypeEnv::new()).unwrap();
        let mut ctx = EvalContext::new(Scope::default());
        ctx.force_timeout(Polarity::Neg);
        assert_eq!(evaluate(&prep, &Env::new(), &ctx).unwrap().classification, Classification::ProbablyTrue);
    }

    #[test]
    fn fuel_exhaustion_times_out() {
        let p = parse_pred("!x.(x : 1..1000 => x > 0)").unwrap();
        let prep = Prepared::pred(&p, &TypeEnv::new()).unwrap();
        let ctx = EvalContext::new(Scope { fuel: 100, ..Scope::default() });
        assert_eq!(evaluate(&prep, &Env::new(), &ctx).unwrap().classification, Classification::Unknown);
    }

    #[test]
    fn singleton_mutation_yields_both_true_false() {
        let env = TypeEnv::new().with_carrier("ID", &["aa".into(), "bb".into()]);
        let p = parse_pred("aa /: {bb}").unwrap();
        let prep = Prepared::pred(&p, &env).unwrap();
        let ctx = EvalContext::new(prep.scope_for(&Scope::default())).with_mutation(Some(MutationId::M5));
        assert_eq!(evaluate(&prep, &Env::new(), &ctx).unwrap().classification, Classification::BugBothTrueFalse);
    }
}
