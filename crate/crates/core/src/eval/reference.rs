//! A deliberately naive single-chain evaluator used as a test oracle.
//!
//! Predicates evaluate to `Some(true)`, `Some(false)` or `None` (undefined)
//! with left-to-right well-definedness. Quantifiers always range over the
//! whole type and every set is built explicitly.

use super::{binary, Env, Prepared};
use crate::kernel::{ops, EvalContext, EvalError, KResult};
use crate::syntax::*;
use crate::value::{enumerate_type, SetV, Value};

/// Undefined, timed out or broken.
enum Stop {
    Undef,
    Err(EvalError),
}

impl From<EvalError> for Stop {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Undef { .. } => Stop::Undef,
            other => Stop::Err(other),
        }
    }
}

type R<T> = Result<T, Stop>;

struct Naive<'a> {
    ctx: &'a EvalContext,
    prep: &'a Prepared,
    env: Vec<(String, Value)>,
}

/// Three-valued truth of the prepared predicate; timeouts and internal
/// errors are returned as errors.
pub fn truth(prep: &Prepared, env: &Env, ctx: &EvalContext) -> Result<Option<bool>, EvalError> {
    let p = prep.as_pred().ok_or_else(|| EvalError::Internal("not a predicate".into()))?;
    ctx.refuel();
    let mut n = Naive { ctx, prep, env: env.iter().map(|(k, v)| (k.to_string(), v.clone())).collect() };
    match n.pred(p) {
        Ok(b) => Ok(Some(b)),
        Err(Stop::Undef) => Ok(None),
        Err(Stop::Err(e)) => Err(e),
    }
}

/// Value of the prepared expression, `None` if undefined.
pub fn value(prep: &Prepared, env: &Env, ctx: &EvalContext) -> Result<Option<Value>, EvalError> {
    let e = prep.as_expr().ok_or_else(|| EvalError::Internal("not an expression".into()))?;
    ctx.refuel();
    let mut n = Naive { ctx, prep, env: env.iter().map(|(k, v)| (k.to_string(), v.clone())).collect() };
    match n.expr(e) {
        Ok(v) => Ok(Some(v)),
        Err(Stop::Undef) => Ok(None),
        Err(Stop::Err(e)) => Err(e),
    }
}

impl Naive<'_> {
    fn lookup(&self, name: &str) -> KResult {
        if let Some((_, v)) = self.env.iter().rev().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        for (c, elems) in &self.prep.carriers {
            if c == name {
                return Ok(self.ctx.scope.carrier_value(c));
            }
            if let Some(i) = elems.iter().position(|e| e == name) {
                return Ok(Value::elem(c, i as u32));
            }
        }
        Ok(self.ctx.scope.carrier_value(name))
    }

    fn assignments(&self, node: Child<'_>, n: usize) -> R<Vec<Vec<Value>>> {
        let types = self.prep.binder_types(node).ok_or(Stop::Err(EvalError::Internal("untyped binder".into())))?;
        let mut rows = vec![Vec::with_capacity(n)];
        for t in types {
            let vals = enumerate_type(t, &self.ctx.scope).map_err(|_| Stop::Err(EvalError::Timeout))?;
            self.ctx.tick(vals.len() as u64 * rows.len() as u64)?;
            rows = rows
                .into_iter()
                .flat_map(|r| {
                    vals.iter().map(move |v| {
                        let mut r = r.clone();
                        r.push(v.clone());
                        r
                    })
                })
                .collect();
        }
        Ok(rows)
    }

    fn with<T>(&mut self, vars: &[String], vals: &[Value], f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        for (n, v) in vars.iter().zip(vals) {
            self.env.push((n.clone(), v.clone()));
        }
        let r = f(self);
        let len = self.env.len();
        self.env.truncate(len - vars.len());
        r
    }

    fn pred(&mut self, p: &Pred) -> R<bool> {
        self.ctx.tick(1)?;
        Ok(match &p.kind {
            PredKind::And(l, r) => self.pred(l)? && self.pred(r)?,
            PredKind::Or(l, r) => self.pred(l)? || self.pred(r)?,
            PredKind::Implies(l, r) => !self.pred(l)? || self.pred(r)?,
            PredKind::Equiv(l, r) => self.pred(l)? == self.pred(r)?,
            PredKind::Not(inner) => !self.pred(inner)?,
            PredKind::ForAll { vars, body } => {
                for row in self.assignments(Child::Pred(p), vars.len())? {
                    if !self.with(vars, &row, |s| s.pred(body))? {
                        return Ok(false);
                    }
                }
                true
            }
            PredKind::Exists { vars, body } => {
                for row in self.assignments(Child::Pred(p), vars.len())? {
                    if self.with(vars, &row, |s| s.pred(body))? {
                        return Ok(true);
                    }
                }
                false
            }
            PredKind::Compare(op, l, r) => self.compare(*op, l, r)?,
        })
    }

    fn compare(&mut self, op: CmpOp, l: &Expr, r: &Expr) -> R<bool> {
        let a = self.expr(l)?;
        if matches!(op, CmpOp::In | CmpOp::NotIn) {
            if let ExprKind::Unary(UnOp::Seq, base) = &r.kind {
                let b = self.expr(base)?;
                let is_seq = ops::is_sequence(self.ctx, &a)?;
                let holds = is_seq && ops::ran(self.ctx, &a)?.as_set().unwrap().iter().all(|v| b.as_set().unwrap().contains(v));
                return Ok(holds == (op == CmpOp::In));
            }
        }
        let b = self.expr(r)?;
        let set_of = |v: &Value| v.as_set().cloned().ok_or(Stop::Err(EvalError::Internal("not a set".into())));
        let int_of = |v: &Value| v.as_int().ok_or(Stop::Err(EvalError::Internal("not an int".into())));
        Ok(match op {
            CmpOp::Eq => a == b,
            CmpOp::Neq => a != b,
            CmpOp::In => set_of(&b)?.contains(&a),
            CmpOp::NotIn => !set_of(&b)?.contains(&a),
            CmpOp::Subset | CmpOp::NotSubset | CmpOp::StrictSubset | CmpOp::NotStrictSubset => {
                let (x, y) = (set_of(&a)?, set_of(&b)?);
                let sub = x.iter().all(|v| y.contains(v));
                match op {
                    CmpOp::Subset => sub,
                    CmpOp::NotSubset => !sub,
                    CmpOp::StrictSubset => sub && x != y,
                    _ => !(sub && x != y),
                }
            }
            CmpOp::Lt => int_of(&a)? < int_of(&b)?,
            CmpOp::Le => int_of(&a)? <= int_of(&b)?,
            CmpOp::Gt => int_of(&a)? > int_of(&b)?,
            CmpOp::Ge => int_of(&a)? >= int_of(&b)?,
        })
    }

    fn tuple(vals: &[Value]) -> Value {
        let mut it = vals.iter().cloned();
        let first = it.next().expect("non-empty");
        it.fold(first, Value::pair)
    }

    fn expr(&mut self, e: &Expr) -> R<Value> {
        let ctx = self.ctx;
        ctx.tick(1)?;
        Ok(match &e.kind {
            ExprKind::Ident(n) => self.lookup(n)?,
            ExprKind::Int(n) => Value::Int(*n),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Builtin(b) => ops::builtin(ctx, *b)?,
            ExprKind::EmptySet | ExprKind::EmptySeq => Value::empty_set(),
            ExprKind::SetEnum(items) => {
                let mut vals = Vec::new();
                for i in items {
                    vals.push(self.expr(i)?);
                }
                Value::Set(SetV::from_vec(vals))
            }
            ExprKind::SeqEnum(items) => {
                let mut vals = Vec::new();
                for (k, i) in items.iter().enumerate() {
                    vals.push(Value::pair(Value::Int(k as i64 + 1), self.expr(i)?));
                }
                Value::Set(SetV::from_vec(vals))
            }
            ExprKind::Comprehension { vars, body } => {
                let mut out = Vec::new();
                for row in self.assignments(Child::Expr(e), vars.len())? {
                    if self.with(vars, &row, |s| s.pred(body))? {
                        out.push(Self::tuple(&row));
                    }
                }
                Value::Set(SetV::from_vec(out))
            }
            ExprKind::Lambda { vars, pred, body } => {
                let mut out = Vec::new();
                for row in self.assignments(Child::Expr(e), vars.len())? {
                    let entry = self.with(vars, &row, |s| {
                        if s.pred(pred)? {
                            Ok(Some(s.expr(body)?))
                        } else {
                            Ok(None)
                        }
                    })?;
                    if let Some(v) = entry {
                        out.push(Value::pair(Self::tuple(&row), v));
                    }
                }
                Value::Set(SetV::from_vec(out))
            }
            ExprKind::BoolOf(p) => Value::Bool(self.pred(p)?),
            ExprKind::Unary(op, a) => {
                let v = self.expr(a)?;
                match op {
                    UnOp::Neg => ops::negate(ctx, &v)?,
                    UnOp::Inverse => ops::inverse(ctx, &v)?,
                    UnOp::Pow | UnOp::Fin => ops::pow(ctx, &v)?,
                    UnOp::Pow1 | UnOp::Fin1 => ops::pow1(ctx, &v)?,
                    UnOp::Dom => ops::dom(ctx, &v)?,
                    UnOp::Ran => ops::ran(ctx, &v)?,
                    UnOp::Card => ops::card(ctx, &v)?,
                    UnOp::GenUnion => ops::general_union(ctx, &v)?,
                    UnOp::GenInter => ops::general_inter(ctx, &v)?,
                    UnOp::Min => ops::min(ctx, &v)?,
                    UnOp::Max => ops::max(ctx, &v)?,
                    UnOp::Id => ops::identity(ctx, &v)?,
                    UnOp::Size => ops::size(ctx, &v)?,
                    UnOp::First => ops::first(ctx, &v)?,
                    UnOp::Last => ops::last(ctx, &v)?,
                    UnOp::Front => ops::front(ctx, &v)?,
                    UnOp::Tail => ops::tail(ctx, &v)?,
                    UnOp::Rev => ops::rev(ctx, &v)?,
                    UnOp::Seq => ops::seq_set(ctx, &v)?,
                }
            }
            ExprKind::Binary(op, l, r) => {
                let a = self.expr(l)?;
                let b = self.expr(r)?;
                binary(ctx, *op, &a, &b)?
            }
            ExprKind::Apply(f, x) => {
                let fv = self.expr(f)?;
                let xv = self.expr(x)?;
                ops::apply(ctx, &fv, &xv)?
            }
            ExprKind::Image(r, s) => {
                let rv = self.expr(r)?;
                let sv = self.expr(s)?;
                ops::image(ctx, &rv, &sv)?
            }
        })
    }
}
