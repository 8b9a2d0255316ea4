use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::value::BType;

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Expression node. Equality is structural and ignores positions.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

/// Predicate node. Equality is structural and ignores positions.
#[derive(Debug, Clone)]
pub struct Pred {
    pub kind: PredKind,
    pub pos: Pos,
}

impl PartialEq for Pred {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Builtin {
    Integer,
    Natural,
    Natural1,
    Int,
    Nat,
    Nat1,
    BoolSet,
    MaxInt,
    MinInt,
}

impl Builtin {
    pub fn keyword(self) -> &'static str {
        match self {
            Builtin::Integer => "INTEGER",
            Builtin::Natural => "NATURAL",
            Builtin::Natural1 => "NATURAL1",
            Builtin::Int => "INT",
            Builtin::Nat => "NAT",
            Builtin::Nat1 => "NAT1",
            Builtin::BoolSet => "BOOL",
            Builtin::MaxInt => "MAXINT",
            Builtin::MinInt => "MININT",
        }
    }

    pub const ALL: [Builtin; 9] = [
        Builtin::Integer,
        Builtin::Natural,
        Builtin::Natural1,
        Builtin::Int,
        Builtin::Nat,
        Builtin::Nat1,
        Builtin::BoolSet,
        Builtin::MaxInt,
        Builtin::MinInt,
    ];
}

/// Unary operators: prefix minus, postfix inverse, and the named builtins
/// written `name(e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UnOp {
    Neg,
    Inverse,
    Pow,
    Pow1,
    Fin,
    Fin1,
    Dom,
    Ran,
    Card,
    GenUnion,
    GenInter,
    Min,
    Max,
    Id,
    Size,
    First,
    Last,
    Front,
    Tail,
    Rev,
    Seq,
}

impl UnOp {
    /// Keyword for builtins written as calls; `None` for `-` and `~`.
    pub fn call_name(self) -> Option<&'static str> {
        Some(match self {
            UnOp::Neg | UnOp::Inverse => return None,
            UnOp::Pow => "POW",
            UnOp::Pow1 => "POW1",
            UnOp::Fin => "FIN",
            UnOp::Fin1 => "FIN1",
            UnOp::Dom => "dom",
            UnOp::Ran => "ran",
            UnOp::Card => "card",
            UnOp::GenUnion => "union",
            UnOp::GenInter => "inter",
            UnOp::Min => "min",
            UnOp::Max => "max",
            UnOp::Id => "id",
            UnOp::Size => "size",
            UnOp::First => "first",
            UnOp::Last => "last",
            UnOp::Front => "front",
            UnOp::Tail => "tail",
            UnOp::Rev => "rev",
            UnOp::Seq => "seq",
        })
    }

    pub const CALLS: [UnOp; 19] = [
        UnOp::Pow,
        UnOp::Pow1,
        UnOp::Fin,
        UnOp::Fin1,
        UnOp::Dom,
        UnOp::Ran,
        UnOp::Card,
        UnOp::GenUnion,
        UnOp::GenInter,
        UnOp::Min,
        UnOp::Max,
        UnOp::Id,
        UnOp::Size,
        UnOp::First,
        UnOp::Last,
        UnOp::Front,
        UnOp::Tail,
        UnOp::Rev,
        UnOp::Seq,
    ];

    pub fn from_call_name(name: &str) -> Option<UnOp> {
        UnOp::CALLS.iter().copied().find(|op| op.call_name() == Some(name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArrowKind {
    Relation,
    Partial,
    Total,
    PartialInjection,
    TotalInjection,
    PartialSurjection,
    TotalSurjection,
    Bijection,
}

impl ArrowKind {
    pub fn symbol(self) -> &'static str {
        match self {
            ArrowKind::Relation => "<->",
            ArrowKind::Partial => "+->",
            ArrowKind::Total => "-->",
            ArrowKind::PartialInjection => ">+>",
            ArrowKind::TotalInjection => ">->",
            ArrowKind::PartialSurjection => "+->>",
            ArrowKind::TotalSurjection => "-->>",
            ArrowKind::Bijection => ">->>",
        }
    }

    pub const ALL: [ArrowKind; 8] = [
        ArrowKind::Relation,
        ArrowKind::Partial,
        ArrowKind::Total,
        ArrowKind::PartialInjection,
        ArrowKind::TotalInjection,
        ArrowKind::PartialSurjection,
        ArrowKind::TotalSurjection,
        ArrowKind::Bijection,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinOp {
    Union,
    Inter,
    SetDiff,
    Override,
    DomRestrict,
    RanRestrict,
    DomSubtract,
    RanSubtract,
    Compose,
    Concat,
    Arrow(ArrowKind),
    Maplet,
    Interval,
    Plus,
    /// Integer subtraction or set difference, resolved by operand type.
    Minus,
    /// Integer multiplication or cartesian product, resolved by operand type.
    Times,
    Div,
    Mod,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Union => "\\/",
            BinOp::Inter => "/\\",
            BinOp::SetDiff => "\\",
            BinOp::Override => "<+",
            BinOp::DomRestrict => "<|",
            BinOp::RanRestrict => "|>",
            BinOp::DomSubtract => "<<|",
            BinOp::RanSubtract => "|>>",
            BinOp::Compose => ";",
            BinOp::Concat => "^",
            BinOp::Arrow(k) => k.symbol(),
            BinOp::Maplet => "|->",
            BinOp::Interval => "..",
            BinOp::Plus => "+",
            BinOp::Minus => "-",
            BinOp::Times => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::Power => "**",
        }
    }

    /// Binding strength and associativity.
    pub fn prec(self) -> (u8, Assoc) {
        match self {
            BinOp::Union
            | BinOp::Inter
            | BinOp::SetDiff
            | BinOp::Override
            | BinOp::DomRestrict
            | BinOp::RanRestrict
            | BinOp::DomSubtract
            | BinOp::RanSubtract
            | BinOp::Compose
            | BinOp::Concat
            | BinOp::Arrow(_) => (7, Assoc::Left),
            BinOp::Maplet => (8, Assoc::Left),
            BinOp::Interval => (9, Assoc::None),
            BinOp::Plus | BinOp::Minus => (10, Assoc::Left),
            BinOp::Times | BinOp::Div | BinOp::Mod => (11, Assoc::Left),
            BinOp::Power => (12, Assoc::Right),
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        Some(match s {
            "\\/" => BinOp::Union,
            "/\\" => BinOp::Inter,
            "\\" => BinOp::SetDiff,
            "<+" => BinOp::Override,
            "<|" => BinOp::DomRestrict,
            "|>" => BinOp::RanRestrict,
            "<<|" => BinOp::DomSubtract,
            "|>>" => BinOp::RanSubtract,
            ";" => BinOp::Compose,
            "^" => BinOp::Concat,
            "|->" => BinOp::Maplet,
            ".." => BinOp::Interval,
            "+" => BinOp::Plus,
            "-" => BinOp::Minus,
            "*" => BinOp::Times,
            "/" => BinOp::Div,
            "mod" => BinOp::Mod,
            "**" => BinOp::Power,
            other => return ArrowKind::ALL.iter().find(|k| k.symbol() == other).map(|&k| BinOp::Arrow(k)),
        })
    }
}

pub const PREC_NEG: u8 = 13;
pub const PREC_POSTFIX: u8 = 14;
pub const PREC_ATOM: u8 = 15;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Ident(String),
    /// Non-negative literal; negative numbers are `Unary(Neg, ..)`.
    Int(i64),
    Bool(bool),
    Builtin(Builtin),
    EmptySet,
    EmptySeq,
    SetEnum(Vec<Expr>),
    SeqEnum(Vec<Expr>),
    Comprehension { vars: Vec<String>, body: Box<Pred> },
    Lambda { vars: Vec<String>, pred: Box<Pred>, body: Box<Expr> },
    BoolOf(Box<Pred>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Apply(Box<Expr>, Box<Expr>),
    Image(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CmpOp {
    Eq,
    Neq,
    In,
    NotIn,
    Subset,
    NotSubset,
    StrictSubset,
    NotStrictSubset,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "/=",
            CmpOp::In => ":",
            CmpOp::NotIn => "/:",
            CmpOp::Subset => "<:",
            CmpOp::NotSubset => "/<:",
            CmpOp::StrictSubset => "<<:",
            CmpOp::NotStrictSubset => "/<<:",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub const ALL: [CmpOp; 12] = [
        CmpOp::Eq,
        CmpOp::Neq,
        CmpOp::In,
        CmpOp::NotIn,
        CmpOp::Subset,
        CmpOp::NotSubset,
        CmpOp::StrictSubset,
        CmpOp::NotStrictSubset,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
    ];

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        CmpOp::ALL.iter().copied().find(|op| op.symbol() == s)
    }
}

pub const PREC_EQUIV: u8 = 1;
pub const PREC_IMPLIES: u8 = 2;
pub const PREC_OR: u8 = 3;
pub const PREC_AND: u8 = 4;
pub const PREC_NOT: u8 = 5;
pub const PREC_CMP: u8 = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum PredKind {
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Implies(Box<Pred>, Box<Pred>),
    Equiv(Box<Pred>, Box<Pred>),
    Not(Box<Pred>),
    ForAll { vars: Vec<String>, body: Box<Pred> },
    Exists { vars: Vec<String>, body: Box<Pred> },
    Compare(CmpOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDecl {
    pub name: String,
    pub elems: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Machine {
    pub name: String,
    pub sets: Vec<SetDecl>,
    pub constants: Vec<String>,
    pub properties: Pred,
    pub assertions: Vec<Pred>,
}

/// Any parsed unit, for APIs that accept all three sorts.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Expr(Expr),
    Pred(Pred),
    Machine(Machine),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    /// Node without a meaningful source position (generated code).
    pub fn synth(kind: ExprKind) -> Self {
        Expr { kind, pos: Pos::default() }
    }

    pub fn ident(name: &str) -> Self {
        Expr::synth(ExprKind::Ident(name.to_string()))
    }

    pub fn int(n: i64) -> Self {
        if n < 0 {
            Expr::unary(UnOp::Neg, Expr::synth(ExprKind::Int(n.unsigned_abs() as i64)))
        } else {
            Expr::synth(ExprKind::Int(n))
        }
    }

    pub fn unary(op: UnOp, e: Expr) -> Self {
        Expr::synth(ExprKind::Unary(op, Box::new(e)))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::synth(ExprKind::Binary(op, Box::new(l), Box::new(r)))
    }

    /// Binding strength of this node for the printer.
    pub fn prec(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.prec().0,
            ExprKind::Unary(UnOp::Neg, _) => PREC_NEG,
            ExprKind::Unary(UnOp::Inverse, _) | ExprKind::Apply(..) | ExprKind::Image(..) => {
                PREC_POSTFIX
            }
            _ => PREC_ATOM,
        }
    }

    /// Direct sub-expressions and sub-predicates in source order.
    pub fn children(&self) -> Vec<Child<'_>> {
        match &self.kind {
            ExprKind::Ident(_)
            | ExprKind::Int(_)
            | ExprKind::Bool(_)
            | ExprKind::Builtin(_)
            | ExprKind::EmptySet
            | ExprKind::EmptySeq => vec![],
            ExprKind::SetEnum(es) | ExprKind::SeqEnum(es) => es.iter().map(Child::Expr).collect(),
            ExprKind::Comprehension { body, .. } => vec![Child::Pred(body)],
            ExprKind::Lambda { pred, body, .. } => vec![Child::Pred(pred), Child::Expr(body)],
            ExprKind::BoolOf(p) => vec![Child::Pred(p)],
            ExprKind::Unary(_, e) => vec![Child::Expr(e)],
            ExprKind::Binary(_, l, r) | ExprKind::Apply(l, r) | ExprKind::Image(l, r) => {
                vec![Child::Expr(l), Child::Expr(r)]
            }
        }
    }

    pub fn binders(&self) -> Option<&[String]> {
        match &self.kind {
            ExprKind::Comprehension { vars, .. } | ExprKind::Lambda { vars, .. } => Some(vars),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(Child::Expr(self), &mut Vec::new(), &mut out);
        out
    }
}

impl Pred {
    pub fn new(kind: PredKind, pos: Pos) -> Self {
        Pred { kind, pos }
    }

    pub fn synth(kind: PredKind) -> Self {
        Pred { kind, pos: Pos::default() }
    }

    pub fn cmp(op: CmpOp, l: Expr, r: Expr) -> Self {
        Pred::synth(PredKind::Compare(op, Box::new(l), Box::new(r)))
    }

    pub fn and(l: Pred, r: Pred) -> Self {
        Pred::synth(PredKind::And(Box::new(l), Box::new(r)))
    }

    pub fn or(l: Pred, r: Pred) -> Self {
        Pred::synth(PredKind::Or(Box::new(l), Box::new(r)))
    }

    pub fn implies(l: Pred, r: Pred) -> Self {
        Pred::synth(PredKind::Implies(Box::new(l), Box::new(r)))
    }

    pub fn negated(p: Pred) -> Self {
        Pred::synth(PredKind::Not(Box::new(p)))
    }

    pub fn prec(&self) -> u8 {
        match &self.kind {
            PredKind::Equiv(..) => PREC_EQUIV,
            PredKind::Implies(..) => PREC_IMPLIES,
            PredKind::Or(..) => PREC_OR,
            PredKind::And(..) => PREC_AND,
            PredKind::Not(_) => PREC_NOT,
            PredKind::ForAll { .. } | PredKind::Exists { .. } | PredKind::Compare(..) => PREC_CMP,
        }
    }

    pub fn children(&self) -> Vec<Child<'_>> {
        match &self.kind {
            PredKind::And(l, r) | PredKind::Or(l, r) | PredKind::Implies(l, r) | PredKind::Equiv(l, r) => {
                vec![Child::Pred(l), Child::Pred(r)]
            }
            PredKind::Not(p) => vec![Child::Pred(p)],
            PredKind::ForAll { body, .. } | PredKind::Exists { body, .. } => vec![Child::Pred(body)],
            PredKind::Compare(_, l, r) => vec![Child::Expr(l), Child::Expr(r)],
        }
    }

    pub fn binders(&self) -> Option<&[String]> {
        match &self.kind {
            PredKind::ForAll { vars, .. } | PredKind::Exists { vars, .. } => Some(vars),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(Child::Pred(self), &mut Vec::new(), &mut out);
        out
    }

    /// Top-level conjuncts, left to right.
    pub fn conjuncts(&self) -> Vec<&Pred> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Pred, out: &mut Vec<&'a Pred>) {
            if let PredKind::And(l, r) = &p.kind {
                go(l, out);
                go(r, out);
            } else {
                out.push(p);
            }
        }
        go(self, &mut out);
        out
    }
}

/// A borrowed child of an AST node.
#[derive(Debug, Clone, Copy)]
pub enum Child<'a> {
    Expr(&'a Expr),
    Pred(&'a Pred),
}

impl<'a> Child<'a> {
    pub fn pos(self) -> Pos {
        match self {
            Child::Expr(e) => e.pos,
            Child::Pred(p) => p.pos,
        }
    }

    pub fn children(self) -> Vec<Child<'a>> {
        match self {
            Child::Expr(e) => e.children(),
            Child::Pred(p) => p.children(),
        }
    }

    pub fn binders(self) -> Option<&'a [String]> {
        match self {
            Child::Expr(e) => e.binders(),
            Child::Pred(p) => p.binders(),
        }
    }

    /// Preorder traversal over all nodes.
    pub fn walk(self, f: &mut dyn FnMut(Child<'a>)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

fn collect_free(node: Child<'_>, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    if let Child::Expr(Expr { kind: ExprKind::Ident(name), .. }) = node {
        if !bound.contains(name) {
            out.insert(name.clone());
        }
        return;
    }
    let n = bound.len();
    if let Some(vars) = node.binders() {
        bound.extend(vars.iter().cloned());
    }
    for c in node.children() {
        collect_free(c, bound, out);
    }
    bound.truncate(n);
}

/// The maximal set expression denoting all values of a type, e.g. `POW(INTEGER*ID)`.
pub fn type_to_expr(t: &BType) -> Expr {
    match t {
        BType::Bool => Expr::synth(ExprKind::Builtin(Builtin::BoolSet)),
        BType::Int => Expr::synth(ExprKind::Builtin(Builtin::Integer)),
        BType::Enum(c) => Expr::ident(c),
        BType::Prod(a, b) => Expr::binary(BinOp::Times, type_to_expr(a), type_to_expr(b)),
        BType::Pow(a) => Expr::unary(UnOp::Pow, type_to_expr(a)),
    }
}

/// Inverse of [`type_to_expr`]; identifiers not naming builtins are carriers.
pub fn expr_to_type(e: &Expr) -> Option<BType> {
    match &e.kind {
        ExprKind::Builtin(Builtin::Integer) => Some(BType::Int),
        ExprKind::Builtin(Builtin::BoolSet) => Some(BType::Bool),
        ExprKind::Ident(c) => Some(BType::Enum(c.clone())),
        ExprKind::Binary(BinOp::Times, a, b) => Some(BType::prod(expr_to_type(a)?, expr_to_type(b)?)),
        ExprKind::Unary(UnOp::Pow, a) => Some(BType::pow(expr_to_type(a)?)),
        _ => None,
    }
}
