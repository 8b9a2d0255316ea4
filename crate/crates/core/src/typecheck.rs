//! Unification-based type inference and the typed re-ingestion cross-check.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::{Command, Stdio};

use serde::Serialize;
use thiserror::Error;

use crate::syntax::*;
use crate::value::BType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{pos}: type mismatch: expected {expected}, found {found}")]
    Mismatch { pos: Pos, expected: String, found: String },
    #[error("{pos}: unknown identifier {name}")]
    UnknownIdentifier { pos: Pos, name: String },
    #[error("{pos}: {what}")]
    Ambiguous { pos: Pos, what: String },
}

impl TypeError {
    pub fn pos(&self) -> Pos {
        match self {
            TypeError::Mismatch { pos, .. }
            | TypeError::UnknownIdentifier { pos, .. }
            | TypeError::Ambiguous { pos, .. } => *pos,
        }
    }
}

/// Identifiers visible to inference: carrier sets, their named elements, and
/// typed variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeEnv {
    pub carriers: BTreeMap<String, Vec<String>>,
    pub vars: BTreeMap<String, BType>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_var(mut self, name: &str, t: BType) -> Self {
        for c in carriers_of(&t) {
            self.carriers.entry(c).or_default();
        }
        self.vars.insert(name.to_string(), t);
        self
    }

    pub fn with_carrier(mut self, name: &str, elems: &[String]) -> Self {
        self.carriers.insert(name.to_string(), elems.to_vec());
        self
    }

    /// Only the carrier part of this environment.
    pub fn carriers_only(&self) -> TypeEnv {
        TypeEnv { carriers: self.carriers.clone(), vars: BTreeMap::new() }
    }

    fn lookup(&self, name: &str) -> Option<BType> {
        if let Some(t) = self.vars.get(name) {
            return Some(t.clone());
        }
        if self.carriers.contains_key(name) {
            return Some(BType::pow(BType::Enum(name.to_string())));
        }
        self.carriers
            .iter()
            .find(|(_, elems)| elems.iter().any(|e| e == name))
            .map(|(c, _)| BType::Enum(c.clone()))
    }

    /// Environment of a machine's SETS clause.
    pub fn for_machine(m: &Machine) -> TypeEnv {
        let mut env = TypeEnv::new();
        for d in &m.sets {
            env.carriers.insert(d.name.clone(), d.elems.clone());
        }
        env
    }
}

fn carriers_of(t: &BType) -> Vec<String> {
    let mut out = Vec::new();
    t.carriers(&mut out);
    out
}

/// Inference result: one type per expression node in preorder, one per bound
/// variable in binder order, and the types of free identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedAst {
    pub ast: Ast,
    pub node_types: Vec<BType>,
    pub binder_types: Vec<(String, BType)>,
    pub free_types: BTreeMap<String, BType>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Var(u32),
    Bool,
    Int,
    Enum(String),
    Prod(Box<Ty>, Box<Ty>),
    Pow(Box<Ty>),
}

impl Ty {
    fn pow(t: Ty) -> Ty {
        Ty::Pow(Box::new(t))
    }
    fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }
    fn from_btype(t: &BType) -> Ty {
        match t {
            BType::Bool => Ty::Bool,
            BType::Int => Ty::Int,
            BType::Enum(c) => Ty::Enum(c.clone()),
            BType::Prod(a, b) => Ty::prod(Ty::from_btype(a), Ty::from_btype(b)),
            BType::Pow(a) => Ty::pow(Ty::from_btype(a)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Overload {
    MinusOrDiff,
    TimesOrProduct,
}

struct Pending {
    kind: Overload,
    pos: Pos,
    left: Ty,
    right: Ty,
    result: Ty,
}

struct Infer<'a> {
    env: &'a TypeEnv,
    subst: Vec<Option<Ty>>,
    node_types: Vec<(Ty, Pos, bool)>,
    binder_types: Vec<(String, Ty, Pos)>,
    scopes: Vec<(String, Ty)>,
    unknowns: BTreeMap<String, Ty>,
    pending: Vec<Pending>,
}

impl<'a> Infer<'a> {
    fn new(env: &'a TypeEnv) -> Self {
        Infer {
            env,
            subst: Vec::new(),
            node_types: Vec::new(),
            binder_types: Vec::new(),
            scopes: Vec::new(),
            unknowns: BTreeMap::new(),
            pending: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Ty {
        self.subst.push(None);
        Ty::Var(self.subst.len() as u32 - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match &self.subst[*v as usize] {
                Some(inner) => self.resolve(inner),
                None => t.clone(),
            },
            Ty::Prod(a, b) => Ty::prod(self.resolve(a), self.resolve(b)),
            Ty::Pow(a) => Ty::pow(self.resolve(a)),
            other => other.clone(),
        }
    }

    fn show(&self, t: &Ty) -> String {
        fn go(t: &Ty) -> String {
            match t {
                Ty::Var(_) => "?".into(),
                Ty::Bool => "BOOL".into(),
                Ty::Int => "INTEGER".into(),
                Ty::Enum(c) => c.clone(),
                Ty::Prod(a, b) => format!("({}*{})", go(a), go(b)),
                Ty::Pow(a) => format!("POW({})", go(a)),
            }
        }
        go(&self.resolve(t))
    }

    fn occurs(&self, v: u32, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Var(w) => v == w,
            Ty::Prod(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            Ty::Pow(a) => self.occurs(v, &a),
            _ => false,
        }
    }

    fn unify_inner(&mut self, a: &Ty, b: &Ty) -> bool {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => true,
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                if self.occurs(*x, t) {
                    return false;
                }
                self.subst[*x as usize] = Some(t.clone());
                true
            }
            (Ty::Bool, Ty::Bool) | (Ty::Int, Ty::Int) => true,
            (Ty::Enum(c), Ty::Enum(d)) => c == d,
            (Ty::Prod(a1, b1), Ty::Prod(a2, b2)) => {
                self.unify_inner(a1, a2) && self.unify_inner(b1, b2)
            }
            (Ty::Pow(x), Ty::Pow(y)) => self.unify_inner(x, y),
            _ => false,
        }
    }

    /// Unifies `found` with the type `expected` by its context.
    fn unify(&mut self, expected: &Ty, found: &Ty, pos: Pos) -> Result<(), TypeError> {
        let before_e = self.show(expected);
        let before_f = self.show(found);
        if self.unify_inner(expected, found) {
            Ok(())
        } else {
            Err(TypeError::Mismatch { pos, expected: before_e, found: before_f })
        }
    }

    fn lookup(&mut self, name: &str, pos: Pos) -> Result<Ty, TypeError> {
        if let Some((_, t)) = self.scopes.iter().rev().find(|(n, _)| n == name) {
            return Ok(t.clone());
        }
        if let Some(t) = self.unknowns.get(name) {
            return Ok(t.clone());
        }
        self.env
            .lookup(name)
            .map(|t| Ty::from_btype(&t))
            .ok_or_else(|| TypeError::UnknownIdentifier { pos, name: name.to_string() })
    }

    fn bind(&mut self, vars: &[String], pos: Pos) -> Vec<Ty> {
        vars.iter()
            .map(|v| {
                let t = self.fresh();
                self.scopes.push((v.clone(), t.clone()));
                self.binder_types.push((v.clone(), t.clone(), pos));
                t
            })
            .collect()
    }

    fn unbind(&mut self, n: usize) {
        let len = self.scopes.len();
        self.scopes.truncate(len - n);
    }

    fn tuple(tys: &[Ty]) -> Ty {
        let mut it = tys.iter().cloned();
        let first = it.next().expect("binder list is non-empty");
        it.fold(first, Ty::prod)
    }

    fn pred(&mut self, p: &Pred) -> Result<(), TypeError> {
        match &p.kind {
            PredKind::And(l, r) | PredKind::Or(l, r) | PredKind::Implies(l, r) | PredKind::Equiv(l, r) => {
                self.pred(l)?;
                self.pred(r)
            }
            PredKind::Not(inner) => self.pred(inner),
            PredKind::ForAll { vars, body } | PredKind::Exists { vars, body } => {
                self.bind(vars, p.pos);
                self.pred(body)?;
                self.unbind(vars.len());
                Ok(())
            }
            PredKind::Compare(op, l, r) => {
                let lt = self.expr(l)?;
                let rt = self.expr(r)?;
                match op {
                    CmpOp::Eq | CmpOp::Neq => self.unify(&lt, &rt, r.pos),
                    CmpOp::In | CmpOp::NotIn => self.unify(&rt, &Ty::pow(lt), l.pos),
                    CmpOp::Subset | CmpOp::NotSubset | CmpOp::StrictSubset | CmpOp::NotStrictSubset => {
                        let a = self.fresh();
                        self.unify(&Ty::pow(a), &lt, l.pos)?;
                        self.unify(&lt, &rt, r.pos)
                    }
                    CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge => {
                        self.unify(&Ty::Int, &lt, l.pos)?;
                        self.unify(&Ty::Int, &rt, r.pos)
                    }
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<Ty, TypeError> {
        let slot = self.node_types.len();
        let is_empty_literal = matches!(e.kind, ExprKind::EmptySet | ExprKind::EmptySeq);
        self.node_types.push((Ty::Bool, e.pos, is_empty_literal));
        let t = self.expr_kind(e)?;
        self.node_types[slot].0 = t.clone();
        Ok(t)
    }

    fn relation(&mut self) -> (Ty, Ty, Ty) {
        let a = self.fresh();
        let b = self.fresh();
        (Ty::pow(Ty::prod(a.clone(), b.clone())), a, b)
    }

    fn expr_kind(&mut self, e: &Expr) -> Result<Ty, TypeError> {
        let pos = e.pos;
        Ok(match &e.kind {
            ExprKind::Ident(name) => self.lookup(name, pos)?,
            ExprKind::Int(_) => Ty::Int,
            ExprKind::Bool(_) => Ty::Bool,
            ExprKind::Builtin(b) => match b {
                Builtin::BoolSet => Ty::pow(Ty::Bool),
                Builtin::MaxInt | Builtin::MinInt => Ty::Int,
                _ => Ty::pow(Ty::Int),
            },
            ExprKind::EmptySet => {
                let a = self.fresh();
                Ty::pow(a)
            }
            ExprKind::EmptySeq => {
                let a = self.fresh();
                Ty::pow(Ty::prod(Ty::Int, a))
            }
            ExprKind::SetEnum(items) | ExprKind::SeqEnum(items) => {
                let a = self.fresh();
                for item in items {
                    let t = self.expr(item)?;
                    self.unify(&a, &t, item.pos)?;
                }
                if matches!(e.kind, ExprKind::SetEnum(_)) {
                    Ty::pow(a)
                } else {
                    Ty::pow(Ty::prod(Ty::Int, a))
                }
            }
            ExprKind::Comprehension { vars, body } => {
                let tys = self.bind(vars, pos);
                self.pred(body)?;
                self.unbind(vars.len());
                Ty::pow(Self::tuple(&tys))
            }
            ExprKind::Lambda { vars, pred, body } => {
                let tys = self.bind(vars, pos);
                self.pred(pred)?;
                let bt = self.expr(body)?;
                self.unbind(vars.len());
                Ty::pow(Ty::prod(Self::tuple(&tys), bt))
            }
            ExprKind::BoolOf(p) => {
                self.pred(p)?;
                Ty::Bool
            }
            ExprKind::Unary(op, arg) => {
                let at = self.expr(arg)?;
                let apos = arg.pos;
                match op {
                    UnOp::Neg => {
                        self.unify(&Ty::Int, &at, apos)?;
                        Ty::Int
                    }
                    UnOp::Inverse => {
                        let (r, a, b) = self.relation();
                        self.unify(&r, &at, apos)?;
                        Ty::pow(Ty::prod(b, a))
                    }
                    UnOp::Pow | UnOp::Pow1 | UnOp::Fin | UnOp::Fin1 => {
                        let a = self.fresh();
                        self.unify(&Ty::pow(a), &at, apos)?;
                        Ty::pow(at)
                    }
                    UnOp::Dom | UnOp::Ran => {
                        let (r, a, b) = self.relation();
                        self.unify(&r, &at, apos)?;
                        Ty::pow(if *op == UnOp::Dom { a } else { b })
                    }
                    UnOp::Card => {
                        let a = self.fresh();
                        self.unify(&Ty::pow(a), &at, apos)?;
                        Ty::Int
                    }
                    UnOp::GenUnion | UnOp::GenInter => {
                        let a = self.fresh();
                        self.unify(&Ty::pow(Ty::pow(a.clone())), &at, apos)?;
                        Ty::pow(a)
                    }
                    UnOp::Min | UnOp::Max => {
                        self.unify(&Ty::pow(Ty::Int), &at, apos)?;
                        Ty::Int
                    }
                    UnOp::Id => {
                        let a = self.fresh();
                        self.unify(&Ty::pow(a.clone()), &at, apos)?;
                        Ty::pow(Ty::prod(a.clone(), a))
                    }
                    UnOp::Size | UnOp::First | UnOp::Last | UnOp::Front | UnOp::Tail | UnOp::Rev => {
                        let a = self.fresh();
                        let seq = Ty::pow(Ty::prod(Ty::Int, a.clone()));
                        self.unify(&seq, &at, apos)?;
                        match op {
                            UnOp::Size => Ty::Int,
                            UnOp::First | UnOp::Last => a,
                            _ => seq,
                        }
                    }
                    UnOp::Seq => {
                        let a = self.fresh();
                        self.unify(&Ty::pow(a.clone()), &at, apos)?;
                        Ty::pow(Ty::pow(Ty::prod(Ty::Int, a)))
                    }
                }
            }
            ExprKind::Binary(op, l, r) => {
                let lt = self.expr(l)?;
                let rt = self.expr(r)?;
                self.binary(*op, lt, rt, l.pos, r.pos, pos)?
            }
            ExprKind::Apply(f, x) => {
                let ft = self.expr(f)?;
                let xt = self.expr(x)?;
                let (rel, a, b) = self.relation();
                self.unify(&rel, &ft, f.pos)?;
                self.unify(&a, &xt, x.pos)?;
                b
            }
            ExprKind::Image(r, s) => {
                let rt = self.expr(r)?;
                let st = self.expr(s)?;
                let (rel, a, b) = self.relation();
                self.unify(&rel, &rt, r.pos)?;
                self.unify(&Ty::pow(a), &st, s.pos)?;
                Ty::pow(b)
            }
        })
    }

    fn binary(&mut self, op: BinOp, lt: Ty, rt: Ty, lpos: Pos, rpos: Pos, pos: Pos) -> Result<Ty, TypeError> {
        Ok(match op {
            BinOp::Union | BinOp::Inter | BinOp::SetDiff => {
                let a = self.fresh();
                self.unify(&Ty::pow(a), &lt, lpos)?;
                self.unify(&lt, &rt, rpos)?;
                lt
            }
            BinOp::Override => {
                let (rel, _, _) = self.relation();
                self.unify(&rel, &lt, lpos)?;
                self.unify(&lt, &rt, rpos)?;
                lt
            }
            BinOp::DomRestrict | BinOp::DomSubtract => {
                let (rel, a, _) = self.relation();
                self.unify(&rel, &rt, rpos)?;
                self.unify(&Ty::pow(a), &lt, lpos)?;
                rt
            }
            BinOp::RanRestrict | BinOp::RanSubtract => {
                let (rel, _, b) = self.relation();
                self.unify(&rel, &lt, lpos)?;
                self.unify(&Ty::pow(b), &rt, rpos)?;
                lt
            }
            BinOp::Compose => {
                let (r1, a, b) = self.relation();
                let c = self.fresh();
                self.unify(&r1, &lt, lpos)?;
                self.unify(&Ty::pow(Ty::prod(b, c.clone())), &rt, rpos)?;
                Ty::pow(Ty::prod(a, c))
            }
            BinOp::Concat => {
                let a = self.fresh();
                let seq = Ty::pow(Ty::prod(Ty::Int, a));
                self.unify(&seq, &lt, lpos)?;
                self.unify(&seq, &rt, rpos)?;
                seq
            }
            BinOp::Arrow(_) => {
                let a = self.fresh();
                let b = self.fresh();
                self.unify(&Ty::pow(a.clone()), &lt, lpos)?;
                self.unify(&Ty::pow(b.clone()), &rt, rpos)?;
                Ty::pow(Ty::pow(Ty::prod(a, b)))
            }
            BinOp::Maplet => Ty::prod(lt, rt),
            BinOp::Interval => {
                self.unify(&Ty::Int, &lt, lpos)?;
                self.unify(&Ty::Int, &rt, rpos)?;
                Ty::pow(Ty::Int)
            }
            BinOp::Plus | BinOp::Div | BinOp::Mod | BinOp::Power => {
                self.unify(&Ty::Int, &lt, lpos)?;
                self.unify(&Ty::Int, &rt, rpos)?;
                Ty::Int
            }
            BinOp::Minus | BinOp::Times => {
                let result = self.fresh();
                let kind = if op == BinOp::Minus { Overload::MinusOrDiff } else { Overload::TimesOrProduct };
                self.pending.push(Pending { kind, pos, left: lt, right: rt, result: result.clone() });
                self.settle_pending()?;
                result
            }
        })
    }

    /// Resolves overloaded operators whose operand or result types are now
    /// known. Returns whether anything was resolved.
    fn settle_pending(&mut self) -> Result<bool, TypeError> {
        let mut progress = false;
        let mut i = 0;
        while i < self.pending.len() {
            let p = &self.pending[i];
            let shapes = [self.resolve(&p.left), self.resolve(&p.right), self.resolve(&p.result)];
            let is_int = shapes.contains(&Ty::Int)
                || (matches!(p.kind, Overload::TimesOrProduct) && matches!(shapes[2], Ty::Int));
            let is_set = shapes[..2].iter().any(|t| matches!(t, Ty::Pow(_)))
                || matches!(shapes[2], Ty::Pow(_));
            if !is_int && !is_set {
                i += 1;
                continue;
            }
            let p = self.pending.remove(i);
            progress = true;
            match (p.kind, is_int) {
                (_, true) => {
                    self.unify(&Ty::Int, &p.left, p.pos)?;
                    self.unify(&Ty::Int, &p.right, p.pos)?;
                    self.unify(&Ty::Int, &p.result, p.pos)?;
                }
                (Overload::MinusOrDiff, false) => {
                    let a = self.fresh();
                    self.unify(&Ty::pow(a), &p.left, p.pos)?;
                    self.unify(&p.left, &p.right, p.pos)?;
                    self.unify(&p.left, &p.result, p.pos)?;
                }
                (Overload::TimesOrProduct, false) => {
                    let a = self.fresh();
                    let b = self.fresh();
                    self.unify(&Ty::pow(a.clone()), &p.left, p.pos)?;
                    self.unify(&Ty::pow(b.clone()), &p.right, p.pos)?;
                    self.unify(&Ty::pow(Ty::prod(a, b)), &p.result, p.pos)?;
                }
            }
        }
        Ok(progress)
    }

    fn to_btype(&self, t: &Ty) -> Option<BType> {
        Some(match self.resolve(t) {
            Ty::Var(_) => return None,
            Ty::Bool => BType::Bool,
            Ty::Int => BType::Int,
            Ty::Enum(c) => BType::Enum(c),
            Ty::Prod(a, b) => BType::prod(self.to_btype(&a)?, self.to_btype(&b)?),
            Ty::Pow(a) => BType::pow(self.to_btype(&a)?),
        })
    }

    fn finish(mut self, ast: Ast) -> Result<TypedAst, TypeError> {
        while self.settle_pending()? {}
        if let Some(p) = self.pending.first() {
            return Err(TypeError::Ambiguous {
                pos: p.pos,
                what: "cannot tell integer from set operator".into(),
            });
        }
        let mut node_types = Vec::with_capacity(self.node_types.len());
        for (t, pos, is_empty) in &self.node_types {
            match self.to_btype(t) {
                Some(bt) => node_types.push(bt),
                None => {
                    return Err(TypeError::Ambiguous {
                        pos: *pos,
                        what: if *is_empty { "ambiguous empty set".into() } else { "ambiguous type".into() },
                    })
                }
            }
        }
        let mut binder_types = Vec::new();
        for (name, t, pos) in &self.binder_types {
            let bt = self.to_btype(t).ok_or_else(|| TypeError::Ambiguous {
                pos: *pos,
                what: format!("cannot infer type of {name}"),
            })?;
            binder_types.push((name.clone(), bt));
        }
        let mut free_types = BTreeMap::new();
        for (name, t) in &self.unknowns {
            let bt = self.to_btype(t).ok_or_else(|| TypeError::Ambiguous {
                pos: Pos::default(),
                what: format!("cannot infer type of {name}"),
            })?;
            free_types.insert(name.clone(), bt);
        }
        Ok(TypedAst { ast, node_types, binder_types, free_types })
    }
}

/// Infers types for an expression, predicate or machine.
///
/// Machine constants are inferred from their uses; any other free identifier
/// must be bound in `env`.
pub fn infer(ast: &Ast, env: &TypeEnv) -> Result<TypedAst, TypeError> {
    infer_with_unknowns(ast, env, &[])
}

/// Like [`infer`], but the identifiers in `unknowns` are free variables
/// whose types are inferred rather than looked up.
pub fn infer_with_unknowns(ast: &Ast, env: &TypeEnv, unknowns: &[String]) -> Result<TypedAst, TypeError> {
    let machine_env;
    let env = match ast {
        Ast::Machine(m) => {
            let mut e = TypeEnv::for_machine(m);
            e.carriers.extend(env.carriers.clone());
            e.vars.extend(env.vars.clone());
            machine_env = e;
            &machine_env
        }
        _ => env,
    };
    let mut inf = Infer::new(env);
    for u in unknowns {
        let t = inf.fresh();
        inf.unknowns.insert(u.clone(), t);
    }
    match ast {
        Ast::Expr(e) => {
            inf.expr(e)?;
        }
        Ast::Pred(p) => inf.pred(p)?,
        Ast::Machine(m) => {
            for c in &m.constants {
                let t = inf.fresh();
                inf.unknowns.insert(c.clone(), t);
            }
            inf.pred(&m.properties)?;
            for a in &m.assertions {
                inf.pred(a)?;
            }
        }
    }
    inf.finish(ast.clone())
}

pub fn infer_pred(p: &Pred, env: &TypeEnv) -> Result<TypedAst, TypeError> {
    infer(&Ast::Pred(p.clone()), env)
}

// ----- typed printing -----

fn annotation(vars: &[(String, BType)]) -> Option<Pred> {
    vars.iter()
        .map(|(v, t)| Pred::cmp(CmpOp::In, Expr::ident(v), type_to_expr(t)))
        .reduce(Pred::and)
}

struct Annotator<'a> {
    typed: &'a TypedAst,
    next_node: usize,
    next_binder: usize,
}

impl Annotator<'_> {
    fn binders(&mut self, vars: &[String]) -> Pred {
        let tys: Vec<(String, BType)> = vars
            .iter()
            .map(|_| {
                let b = self.typed.binder_types[self.next_binder].clone();
                self.next_binder += 1;
                b
            })
            .collect();
        annotation(&tys).expect("binder list is non-empty")
    }

    fn pred(&mut self, p: &Pred) -> Pred {
        let kind = match &p.kind {
            PredKind::And(l, r) => PredKind::And(Box::new(self.pred(l)), Box::new(self.pred(r))),
            PredKind::Or(l, r) => PredKind::Or(Box::new(self.pred(l)), Box::new(self.pred(r))),
            PredKind::Implies(l, r) => PredKind::Implies(Box::new(self.pred(l)), Box::new(self.pred(r))),
            PredKind::Equiv(l, r) => PredKind::Equiv(Box::new(self.pred(l)), Box::new(self.pred(r))),
            PredKind::Not(inner) => PredKind::Not(Box::new(self.pred(inner))),
            PredKind::ForAll { vars, body } => {
                let ann = self.binders(vars);
                let body = self.pred(body);
                PredKind::ForAll { vars: vars.clone(), body: Box::new(Pred::implies(ann, body)) }
            }
            PredKind::Exists { vars, body } => {
                let ann = self.binders(vars);
                let body = self.pred(body);
                PredKind::Exists { vars: vars.clone(), body: Box::new(Pred::and(ann, body)) }
            }
            PredKind::Compare(op, l, r) => {
                PredKind::Compare(*op, Box::new(self.expr(l)), Box::new(self.expr(r)))
            }
        };
        Pred::new(kind, p.pos)
    }

    fn expr(&mut self, e: &Expr) -> Expr {
        let my_type = self.typed.node_types[self.next_node].clone();
        self.next_node += 1;
        let kind = match &e.kind {
            ExprKind::EmptySet | ExprKind::EmptySeq => {
                let BType::Pow(member) = my_type else { unreachable!("empty literal has set type") };
                return Expr::binary(BinOp::Inter, e.clone(), type_to_expr(&member));
            }
            ExprKind::Ident(_) | ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Builtin(_) => {
                e.kind.clone()
            }
            ExprKind::SetEnum(items) => ExprKind::SetEnum(items.iter().map(|i| self.expr(i)).collect()),
            ExprKind::SeqEnum(items) => ExprKind::SeqEnum(items.iter().map(|i| self.expr(i)).collect()),
            ExprKind::Comprehension { vars, body } => {
                let ann = self.binders(vars);
                let body = self.pred(body);
                ExprKind::Comprehension { vars: vars.clone(), body: Box::new(Pred::and(ann, body)) }
            }
            ExprKind::Lambda { vars, pred, body } => {
                let ann = self.binders(vars);
                let pred = self.pred(pred);
                let body = self.expr(body);
                ExprKind::Lambda { vars: vars.clone(), pred: Box::new(Pred::and(ann, pred)), body: Box::new(body) }
            }
            ExprKind::BoolOf(p) => ExprKind::BoolOf(Box::new(self.pred(p))),
            ExprKind::Unary(op, a) => ExprKind::Unary(*op, Box::new(self.expr(a))),
            ExprKind::Binary(op, l, r) => {
                let l = self.expr(l);
                ExprKind::Binary(*op, Box::new(l), Box::new(self.expr(r)))
            }
            ExprKind::Apply(f, x) => {
                let f = self.expr(f);
                ExprKind::Apply(Box::new(f), Box::new(self.expr(x)))
            }
            ExprKind::Image(r, s) => {
                let r = self.expr(r);
                ExprKind::Image(Box::new(r), Box::new(self.expr(s)))
            }
        };
        Expr::new(kind, e.pos)
    }
}

fn free_annotation(typed: &TypedAst, names: &[String]) -> Option<Pred> {
    let vars: Vec<(String, BType)> =
        names.iter().filter_map(|n| typed.free_types.get(n).map(|t| (n.clone(), t.clone()))).collect();
    annotation(&vars)
}

/// Builds the annotated AST: every bound variable and declared free variable
/// is constrained by membership in its maximal type, and every empty literal
/// is intersected with its member type.
pub fn annotate(typed: &TypedAst) -> Ast {
    let mut a = Annotator { typed, next_node: 0, next_binder: 0 };
    match &typed.ast {
        Ast::Expr(e) => Ast::Expr(a.expr(e)),
        Ast::Pred(p) => {
            let names: Vec<String> = typed.free_types.keys().cloned().collect();
            let body = a.pred(p);
            Ast::Pred(match free_annotation(typed, &names) {
                Some(ann) => Pred::and(ann, body),
                None => body,
            })
        }
        Ast::Machine(m) => {
            let props = a.pred(&m.properties);
            let assertions = m.assertions.iter().map(|p| a.pred(p)).collect();
            let properties = match free_annotation(typed, &m.constants) {
                Some(ann) => Pred::and(ann, props),
                None => props,
            };
            Ast::Machine(Machine { properties, assertions, ..m.clone() })
        }
    }
}

/// Source text with explicit typing information inserted.
pub fn pretty_print_typed(typed: &TypedAst) -> String {
    print_ast(&annotate(typed))
}

// ----- cross-check -----

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossReport {
    /// False when the input itself is ill-typed; the check says nothing then.
    pub applicable: bool,
    pub pass: bool,
    /// Stage that failed: "parse", "infer", "typed-print", "reparse", "reinfer", "align".
    pub failed_stage: Option<String>,
    pub detail: Option<String>,
    pub typed_text: String,
    pub nodes_compared: usize,
    pub mismatches: Vec<String>,
    pub external_status: Option<i32>,
}

impl CrossReport {
    fn failed(stage: &str, detail: String, typed_text: String) -> Self {
        CrossReport {
            applicable: true,
            pass: false,
            failed_stage: Some(stage.into()),
            detail: Some(detail),
            typed_text,
            nodes_compared: 0,
            mismatches: vec![],
            external_status: None,
        }
    }
}

/// Matches original nodes against the re-parsed annotated tree, recording
/// (original index, annotated index) for every expression node.
struct Aligner {
    pairs: Vec<(usize, usize)>,
    orig_next: usize,
    typed_next: usize,
}

fn count_exprs(c: Child<'_>) -> usize {
    let mut n = 0;
    c.walk(&mut |node| {
        if matches!(node, Child::Expr(_)) {
            n += 1
        }
    });
    n
}

impl Aligner {
    fn skip(&mut self, c: Child<'_>) {
        self.typed_next += count_exprs(c);
    }

    fn strip_binder_ann<'t>(&mut self, vars: &[String], body: &'t Pred, wrap_is_implies: bool) -> Result<&'t Pred, String> {
        let (ann, rest) = match (&body.kind, wrap_is_implies) {
            (PredKind::Implies(a, r), true) | (PredKind::And(a, r), false) => (a, r),
            _ => return Err(format!("missing typing annotation for {}", vars.join(","))),
        };
        self.check_ann(ann, vars)?;
        self.skip(Child::Pred(ann));
        Ok(rest)
    }

    fn check_ann(&self, ann: &Pred, vars: &[String]) -> Result<(), String> {
        let cs = ann.conjuncts();
        let ok = cs.len() == vars.len()
            && cs.iter().zip(vars).all(|(c, v)| {
                matches!(&c.kind, PredKind::Compare(CmpOp::In, l, r)
                    if matches!(&l.kind, ExprKind::Ident(n) if n == v) && expr_to_type(r).is_some())
            });
        if ok {
            Ok(())
        } else {
            Err(format!("malformed typing annotation for {}", vars.join(",")))
        }
    }

    fn pred(&mut self, o: &Pred, t: &Pred) -> Result<(), String> {
        match (&o.kind, &t.kind) {
            (PredKind::And(a, b), PredKind::And(c, d))
            | (PredKind::Or(a, b), PredKind::Or(c, d))
            | (PredKind::Implies(a, b), PredKind::Implies(c, d))
            | (PredKind::Equiv(a, b), PredKind::Equiv(c, d)) => {
                self.pred(a, c)?;
                self.pred(b, d)
            }
            (PredKind::Not(a), PredKind::Not(b)) => self.pred(a, b),
            (PredKind::ForAll { vars: v1, body: b1 }, PredKind::ForAll { vars: v2, body: b2 })
            | (PredKind::Exists { vars: v1, body: b1 }, PredKind::Exists { vars: v2, body: b2 })
                if v1 == v2 =>
            {
                let rest = self.strip_binder_ann(v2, b2, matches!(t.kind, PredKind::ForAll { .. }))?;
                self.pred(b1, rest)
            }
            (PredKind::Compare(o1, a, b), PredKind::Compare(o2, c, d)) if o1 == o2 => {
                self.expr(a, c)?;
                self.expr(b, d)
            }
            _ => Err(format!("structure differs at {}: {} vs {}", o.pos, o, t)),
        }
    }

    fn exprs(&mut self, a: &[Expr], b: &[Expr]) -> Result<(), String> {
        if a.len() != b.len() {
            return Err("list length differs".into());
        }
        a.iter().zip(b).try_for_each(|(x, y)| self.expr(x, y))
    }

    fn expr(&mut self, o: &Expr, t: &Expr) -> Result<(), String> {
        if let (ExprKind::EmptySet | ExprKind::EmptySeq, ExprKind::Binary(BinOp::Inter, inner, ty)) = (&o.kind, &t.kind) {
            if inner.kind != o.kind || expr_to_type(ty).is_none() {
                return Err(format!("malformed empty-literal annotation at {}", o.pos));
            }
            // the Inter node itself, then the literal
            self.typed_next += 1;
            self.pairs.push((self.orig_next, self.typed_next));
            self.orig_next += 1;
            self.typed_next += 1;
            self.skip(Child::Expr(ty));
            return Ok(());
        }
        self.pairs.push((self.orig_next, self.typed_next));
        self.orig_next += 1;
        self.typed_next += 1;
        match (&o.kind, &t.kind) {
            (ExprKind::SetEnum(a), ExprKind::SetEnum(b)) | (ExprKind::SeqEnum(a), ExprKind::SeqEnum(b)) => {
                self.exprs(a, b)
            }
            (
                ExprKind::Comprehension { vars: v1, body: b1 },
                ExprKind::Comprehension { vars: v2, body: b2 },
            ) if v1 == v2 => {
                let rest = self.strip_binder_ann(v2, b2, false)?;
                self.pred(b1, rest)
            }
            (
                ExprKind::Lambda { vars: v1, pred: p1, body: e1 },
                ExprKind::Lambda { vars: v2, pred: p2, body: e2 },
            ) if v1 == v2 => {
                let rest = self.strip_binder_ann(v2, p2, false)?;
                self.pred(p1, rest)?;
                self.expr(e1, e2)
            }
            (ExprKind::BoolOf(a), ExprKind::BoolOf(b)) => self.pred(a, b),
            (ExprKind::Unary(o1, a), ExprKind::Unary(o2, b)) if o1 == o2 => self.expr(a, b),
            (ExprKind::Binary(o1, a, b), ExprKind::Binary(o2, c, d)) if o1 == o2 => {
                self.expr(a, c)?;
                self.expr(b, d)
            }
            (ExprKind::Apply(a, b), ExprKind::Apply(c, d)) | (ExprKind::Image(a, b), ExprKind::Image(c, d)) => {
                self.expr(a, c)?;
                self.expr(b, d)
            }
            (a, b) if a == b && o.children().is_empty() => Ok(()),
            _ => Err(format!("structure differs at {}: {} vs {}", o.pos, o, t)),
        }
    }
}

fn strip_top_ann<'t>(al: &mut Aligner, p: &'t Pred, names: &[String]) -> Result<&'t Pred, String> {
    if names.is_empty() {
        return Ok(p);
    }
    match &p.kind {
        PredKind::And(ann, rest) => {
            al.check_ann(ann, names)?;
            al.skip(Child::Pred(ann));
            Ok(rest)
        }
        _ => Err("missing annotation for free variables".into()),
    }
}

/// Runs an external command on `text` (via `sh -c`) and returns its exit status.
pub fn run_external(cmd: &str, text: &str) -> std::io::Result<i32> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()?;
    if let Some(mut stdin) = child.stdin.take() {
        stdin.write_all(text.as_bytes())?;
    }
    Ok(child.wait()?.code().unwrap_or(-1))
}

/// Infers, prints with typing information, re-parses the printed text with
/// only carrier declarations in scope, re-infers, and compares types node by
/// node.
pub fn crosscheck_typing(text: &str, env: &TypeEnv) -> CrossReport {
    crosscheck_typing_with(text, env, None)
}

pub fn crosscheck_typing_with(text: &str, env: &TypeEnv, external: Option<&str>) -> CrossReport {
    let ast = match parse_any(text) {
        Ok(a) => a,
        Err(e) => return CrossReport::failed("parse", e.to_string(), String::new()),
    };
    crosscheck_ast(&ast, env, external)
}

pub fn crosscheck_ast(ast: &Ast, env: &TypeEnv, external: Option<&str>) -> CrossReport {
    let free_names: Vec<String> = match ast {
        Ast::Pred(p) => p.free_vars().into_iter().filter(|v| env.vars.contains_key(v)).collect(),
        _ => vec![],
    };
    // Free variables become unknowns so the annotation is what the typed
    // run sees; the first run takes them from `env`.
    let t1 = match infer(ast, env) {
        Ok(t) => t,
        Err(e) => {
            return CrossReport {
                applicable: false,
                pass: false,
                failed_stage: Some("infer".into()),
                detail: Some(e.to_string()),
                typed_text: String::new(),
                nodes_compared: 0,
                mismatches: vec![],
                external_status: None,
            }
        }
    };
    let mut t1 = t1;
    for n in &free_names {
        t1.free_types.insert(n.clone(), env.vars[n].clone());
    }
    let typed_text = pretty_print_typed(&t1);
    let reparsed = match ast {
        Ast::Expr(_) => parse_expr(&typed_text).map(Ast::Expr),
        Ast::Pred(_) => parse_pred(&typed_text).map(Ast::Pred),
        Ast::Machine(_) => parse_machine(&typed_text).map(Ast::Machine),
    };
    let reparsed = match reparsed {
        Ok(a) => a,
        Err(e) => return CrossReport::failed("reparse", e.to_string(), typed_text),
    };
    let second_env = match ast {
        Ast::Expr(_) => env.clone(),
        _ => env.carriers_only(),
    };
    let t2 = match infer_with_unknowns(&reparsed, &second_env, &free_names) {
        Ok(t) => t,
        Err(e) => return CrossReport::failed("reinfer", e.to_string(), typed_text),
    };
    let mut al = Aligner { pairs: vec![], orig_next: 0, typed_next: 0 };
    let aligned = match (ast, &reparsed) {
        (Ast::Expr(a), Ast::Expr(b)) => al.expr(a, b),
        (Ast::Pred(a), Ast::Pred(b)) => {
            strip_top_ann(&mut al, b, &free_names).and_then(|rest| al.pred(a, rest))
        }
        (Ast::Machine(a), Ast::Machine(b)) => {
            strip_top_ann(&mut al, &b.properties, &a.constants)
                .and_then(|rest| al.pred(&a.properties, rest))
                .and_then(|_| {
                    if a.assertions.len() != b.assertions.len() {
                        return Err("assertion count differs".into());
                    }
                    a.assertions.iter().zip(&b.assertions).try_for_each(|(x, y)| al.pred(x, y))
                })
        }
        _ => Err("sort changed".into()),
    };
    if let Err(msg) = aligned {
        return CrossReport::failed("align", msg, typed_text);
    }
    let mut mismatches = Vec::new();
    if al.orig_next != t1.node_types.len() || al.typed_next != t2.node_types.len() {
        mismatches.push(format!(
            "node count mismatch: {}/{} original, {}/{} typed",
            al.orig_next,
            t1.node_types.len(),
            al.typed_next,
            t2.node_types.len()
        ));
    }
    for &(i, j) in &al.pairs {
        if t1.node_types.get(i) != t2.node_types.get(j) {
            mismatches.push(format!(
                "node {i}: {:?} vs {:?}",
                t1.node_types.get(i),
                t2.node_types.get(j)
            ));
        }
    }
    if t1.binder_types != t2.binder_types {
        mismatches.push(format!("binder types differ: {:?} vs {:?}", t1.binder_types, t2.binder_types));
    }
    for (name, t) in &t2.free_types {
        if t1.free_types.get(name) != Some(t) {
            mismatches.push(format!("free identifier {name}: {:?} vs {t}", t1.free_types.get(name)));
        }
    }
    let external_status = external.map(|cmd| run_external(cmd, &typed_text).unwrap_or(-1));
    let pass = mismatches.is_empty() && external_status.is_none_or(|s| s == 0);
    CrossReport {
        applicable: true,
        pass,
        failed_stage: if pass { None } else { Some("compare".into()) },
        detail: None,
        typed_text,
        nodes_compared: al.pairs.len(),
        mismatches,
        external_status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty_of(src: &str, env: &TypeEnv) -> BType {
        let t = infer(&Ast::Expr(parse_expr(src).unwrap()), env).unwrap();
        t.node_types[0].clone()
    }

    fn id_env() -> TypeEnv {
        TypeEnv::new().with_carrier("ID", &["aa".into(), "bb".into()])
    }

    #[test]
    fn set_literal_union() {
        assert_eq!(ty_of("{1,2} \\/ {3}", &TypeEnv::new()), BType::pow(BType::Int));
    }

    #[test]
    fn machine_property_types_constant() {
        let p = parse_pred("iv : ID & iv /= bb").unwrap();
        let t = infer_with_unknowns(&Ast::Pred(p), &id_env(), &["iv".into()]).unwrap();
        assert_eq!(t.free_types["iv"], BType::Enum("ID".into()));
    }

    #[test]
    fn int_vs_bool_mismatch() {
        let p = parse_pred("1 = TRUE").unwrap();
        assert!(matches!(infer_pred(&p, &TypeEnv::new()), Err(TypeError::Mismatch { .. })));
    }

    #[test]
    fn unknown_identifier() {
        let p = parse_pred("x = 1").unwrap();
        assert!(matches!(infer_pred(&p, &TypeEnv::new()), Err(TypeError::UnknownIdentifier { .. })));
    }

    #[test]
    fn ambiguous_empty_set() {
        let p = parse_pred("{} = {}").unwrap();
        match infer_pred(&p, &TypeEnv::new()) {
            Err(TypeError::Ambiguous { what, .. }) => assert_eq!(what, "ambiguous empty set"),
            other => panic!("{other:?}"),
        }
        assert!(infer_pred(&parse_pred("{} = {1}").unwrap(), &TypeEnv::new()).is_ok());
    }

    #[test]
    fn overloads_resolve_from_context() {
        let env = TypeEnv::new().with_var("SS", BType::pow(BType::Enum("EL".into())));
        assert_eq!(ty_of("POW(SS) - {{}}", &env), BType::pow(BType::pow(BType::Enum("EL".into()))));
        assert_eq!(ty_of("SS * {1}", &env), BType::pow(BType::prod(BType::Enum("EL".into()), BType::Int)));
        assert_eq!(ty_of("2 * 3 - 1", &env), BType::Int);
        // left operand unknown until the right one is seen
        let env2 = TypeEnv::new();
        let p = parse_pred("!(x,y).(x : INTEGER & y : INTEGER => x - y = -(y - x))").unwrap();
        assert!(infer_pred(&p, &env2).is_ok());
    }

    #[test]
    fn relations_and_sequences() {
        let env = TypeEnv::new()
            .with_var("r", BType::pow(BType::prod(BType::Int, BType::Bool)))
            .with_var("s", BType::pow(BType::prod(BType::Int, BType::Enum("EL".into()))));
        assert_eq!(ty_of("r~", &env), BType::pow(BType::prod(BType::Bool, BType::Int)));
        assert_eq!(ty_of("r[{1}]", &env), BType::pow(BType::Bool));
        assert_eq!(ty_of("first(s)", &env), BType::Enum("EL".into()));
        assert_eq!(ty_of("r;(r~)", &env), BType::pow(BType::prod(BType::Int, BType::Int)));
        assert_eq!(
            ty_of("dom(r) +-> BOOL", &env),
            BType::pow(BType::pow(BType::prod(BType::Int, BType::Bool)))
        );
        let p = parse_pred("r(1) = 2").unwrap();
        assert!(infer_pred(&p, &env).is_err());
    }

    #[test]
    fn typed_lambda_print_and_crosscheck() {
        let src = "%x.(x:1..3|x-1) = {1|->0,2|->1,3|->2}";
        let report = crosscheck_typing(src, &TypeEnv::new());
        assert!(report.pass, "{report:?}");
        assert!(report.typed_text.contains("%x.(x : INTEGER & x : 1..3 | x-1)"), "{}", report.typed_text);
    }

    #[test]
    fn typed_forall_uses_implication() {
        let r = crosscheck_typing("!x.(x : NATURAL => x >= 0)", &TypeEnv::new());
        assert!(r.pass, "{r:?}");
        assert_eq!(r.typed_text, "!x.(x : INTEGER => (x : NATURAL => x >= 0))");
    }

    #[test]
    fn empty_set_annotation() {
        let r = crosscheck_typing("{} \\/ {1} = {1}", &TypeEnv::new());
        assert!(r.pass, "{r:?}");
        assert_eq!(r.typed_text, "{}/\\INTEGER\\/{1} = {1}");
    }

    #[test]
    fn free_variables_annotated() {
        let env = TypeEnv::new()
            .with_var("SS", BType::pow(BType::Enum("EL".into())))
            .with_var("TT", BType::pow(BType::Enum("EL".into())));
        let r = crosscheck_typing("SS \\/ TT = TT \\/ SS", &env);
        assert!(r.pass, "{r:?}");
        assert!(r.typed_text.starts_with("SS : POW(EL) & TT : POW(EL) & "), "{}", r.typed_text);
    }

    #[test]
    fn machine_crosscheck() {
        let src = "MACHINE DoubleEvaluationTest\nSETS ID={aa,bb}\nCONSTANTS iv\nPROPERTIES iv : ID & iv /= bb\nASSERTIONS iv : {aa}; iv /: {bb}\nEND";
        let r = crosscheck_typing(src, &TypeEnv::new());
        assert!(r.pass, "{r:?}");
        assert!(r.typed_text.contains("PROPERTIES iv : ID & (iv : ID & iv /= bb)"), "{}", r.typed_text);
    }

    #[test]
    fn ill_typed_is_not_applicable() {
        let r = crosscheck_typing("1 = TRUE", &TypeEnv::new());
        assert!(!r.applicable);
        assert!(!r.pass);
    }

    #[test]
    fn external_command_status_recorded() {
        let ok = crosscheck_typing_with("1 = 1", &TypeEnv::new(), Some("cat > /dev/null"));
        assert_eq!(ok.external_status, Some(0));
        assert!(ok.pass);
        let bad = crosscheck_typing_with("1 = 1", &TypeEnv::new(), Some("exit 3"));
        assert_eq!(bad.external_status, Some(3));
        assert!(!bad.pass);
    }

    #[test]
    fn inference_is_deterministic() {
        let p = Ast::Pred(parse_pred("!(f,x).(f : INTEGER +-> BOOL & x : dom(f) => f(x) : ran(f))").unwrap());
        assert_eq!(infer(&p, &TypeEnv::new()), infer(&p, &TypeEnv::new()));
        let t = infer(&p, &TypeEnv::new()).unwrap();
        assert_eq!(t.binder_types[0].1, BType::pow(BType::prod(BType::Int, BType::Bool)));
    }
}
