//! Helpers shared by the integration tests.

#![allow(dead_code)]

pub mod oracle;

use bvalid::syntax::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 5] = ["aa", "bb", "xx", "yy", "SS"];

const BINOPS: [BinOp; 19] = [
    BinOp::Union,
    BinOp::Inter,
    BinOp::SetDiff,
    BinOp::Override,
    BinOp::DomRestrict,
    BinOp::RanRestrict,
    BinOp::DomSubtract,
    BinOp::RanSubtract,
    BinOp::Compose,
    BinOp::Concat,
    BinOp::Maplet,
    BinOp::Interval,
    BinOp::Plus,
    BinOp::Minus,
    BinOp::Times,
    BinOp::Div,
    BinOp::Mod,
    BinOp::Power,
    BinOp::Arrow(ArrowKind::Partial),
];

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn name(&mut self) -> String {
        NAMES.choose(&mut self.rng).unwrap().to_string()
    }

    fn vars(&mut self) -> Vec<String> {
        let mut v = vec![self.name()];
        if self.rng.gen_bool(0.3) {
            let extra = self.name();
            if !v.contains(&extra) {
                v.push(extra);
            }
        }
        v
    }

    fn exprs(&mut self, depth: u32) -> Vec<Expr> {
        let n = self.rng.gen_range(1..=3);
        (0..n).map(|_| self.expr(depth)).collect()
    }

    pub fn expr(&mut self, depth: u32) -> Expr {
        let leaf = depth <= 1 || self.rng.gen_bool(0.25);
        let kind = if leaf {
            match self.rng.gen_range(0..6) {
                0 => ExprKind::Ident(self.name()),
                1 => ExprKind::Int(self.rng.gen_range(0..100)),
                2 => ExprKind::Bool(self.rng.gen()),
                3 => ExprKind::Builtin(*Builtin::ALL.choose(&mut self.rng).unwrap()),
                4 => ExprKind::EmptySet,
                _ => ExprKind::EmptySeq,
            }
        } else {
            let d = depth - 1;
            let pick = self.rng.gen_range(0..10);
            // Predicates need at least two levels.
            let pick = if d < 2 && (2..=4).contains(&pick) { 0 } else { pick };
            match pick {
                0 => ExprKind::SetEnum(self.exprs(d)),
                1 => ExprKind::SeqEnum(self.exprs(d)),
                2 => ExprKind::Comprehension { vars: self.vars(), body: Box::new(self.pred(d)) },
                3 => ExprKind::Lambda { vars: self.vars(), pred: Box::new(self.pred(d)), body: Box::new(self.expr(d)) },
                4 => ExprKind::BoolOf(Box::new(self.pred(d))),
                5 => {
                    let op = if self.rng.gen_bool(0.3) {
                        *[UnOp::Neg, UnOp::Inverse].choose(&mut self.rng).unwrap()
                    } else {
                        *UnOp::CALLS.choose(&mut self.rng).unwrap()
                    };
                    ExprKind::Unary(op, Box::new(self.expr(d)))
                }
                6 => ExprKind::Apply(Box::new(self.expr(d)), Box::new(self.expr(d))),
                7 => ExprKind::Image(Box::new(self.expr(d)), Box::new(self.expr(d))),
                _ => {
                    let mut op = *BINOPS.choose(&mut self.rng).unwrap();
                    if op == BinOp::Arrow(ArrowKind::Partial) {
                        op = BinOp::Arrow(*ArrowKind::ALL.choose(&mut self.rng).unwrap());
                    }
                    ExprKind::Binary(op, Box::new(self.expr(d)), Box::new(self.expr(d)))
                }
            }
        };
        Expr::synth(kind)
    }

    pub fn pred(&mut self, depth: u32) -> Pred {
        let leaf = depth <= 2 || self.rng.gen_bool(0.3);
        if leaf {
            let op = *CmpOp::ALL.choose(&mut self.rng).unwrap();
            return Pred::cmp(op, self.expr(depth - 1), self.expr(depth - 1));
        }
        let d = depth - 1;
        let two = |g: &mut Gen| (Box::new(g.pred(d)), Box::new(g.pred(d)));
        let kind = match self.rng.gen_range(0..8) {
            0 => {
                let (a, b) = two(self);
                PredKind::And(a, b)
            }
            1 => {
                let (a, b) = two(self);
                PredKind::Or(a, b)
            }
            2 => {
                let (a, b) = two(self);
                PredKind::Implies(a, b)
            }
            3 => {
                let (a, b) = two(self);
                PredKind::Equiv(a, b)
            }
            4 => PredKind::Not(Box::new(self.pred(d))),
            5 => PredKind::ForAll { vars: self.vars(), body: Box::new(self.pred(d)) },
            6 => PredKind::Exists { vars: self.vars(), body: Box::new(self.pred(d)) },
            _ => PredKind::Compare(*CmpOp::ALL.choose(&mut self.rng).unwrap(), Box::new(self.expr(d)), Box::new(self.expr(d))),
        };
        Pred::synth(kind)
    }
}

pub fn depth_of(node: Child<'_>) -> u32 {
    1 + node.children().into_iter().map(depth_of).max().unwrap_or(0)
}
