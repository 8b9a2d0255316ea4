//! Minimal-parentheses pretty printer.
//!
//! A child is parenthesised iff its binding strength is below what its
//! position requires. Predicate connectives and comparisons are surrounded by
//! single spaces; expression operators are written without spaces except the
//! alphabetic `mod`.

use super::ast::*;

pub fn print_expr(e: &Expr) -> String {
    let mut p = Printer::default();
    p.expr(e, 7);
    p.out
}

pub fn print_pred(pred: &Pred) -> String {
    let mut p = Printer::default();
    p.pred(pred, PREC_EQUIV);
    p.out
}

pub fn print_machine(m: &Machine) -> String {
    let mut p = Printer::default();
    p.machine(m);
    p.out
}

pub fn print_ast(a: &Ast) -> String {
    match a {
        Ast::Expr(e) => print_expr(e),
        Ast::Pred(p) => print_pred(p),
        Ast::Machine(m) => print_machine(m),
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_expr(self))
    }
}

impl std::fmt::Display for Pred {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_pred(self))
    }
}

struct Printer {
    out: String,
    semi_ok: bool,
}

impl Default for Printer {
    fn default() -> Self {
        Printer { out: String::new(), semi_ok: true }
    }
}

impl Printer {
    fn nested(&mut self, f: impl FnOnce(&mut Self)) {
        let saved = self.semi_ok;
        self.semi_ok = true;
        f(self);
        self.semi_ok = saved;
    }

    fn binders(&mut self, vars: &[String]) {
        if vars.len() == 1 {
            self.out.push_str(&vars[0]);
        } else {
            self.out.push('(');
            self.out.push_str(&vars.join(","));
            self.out.push(')');
        }
    }

    fn expr(&mut self, e: &Expr, min: u8) {
        let needs_semi_parens =
            !self.semi_ok && matches!(e.kind, ExprKind::Binary(BinOp::Compose, ..));
        if e.prec() < min || needs_semi_parens {
            self.out.push('(');
            self.nested(|p| p.expr_bare(e));
            self.out.push(')');
        } else {
            self.expr_bare(e);
        }
    }

    fn expr_list(&mut self, items: &[Expr]) {
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                self.out.push(',');
            }
            self.expr(item, 7);
        }
    }

    fn expr_bare(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Ident(name) => self.out.push_str(name),
            ExprKind::Int(n) => self.out.push_str(&n.to_string()),
            ExprKind::Bool(b) => self.out.push_str(if *b { "TRUE" } else { "FALSE" }),
            ExprKind::Builtin(b) => self.out.push_str(b.keyword()),
            ExprKind::EmptySet => self.out.push_str("{}"),
            ExprKind::EmptySeq => self.out.push_str("[]"),
            ExprKind::SetEnum(items) => {
                self.out.push('{');
                self.nested(|p| p.expr_list(items));
                self.out.push('}');
            }
            ExprKind::SeqEnum(items) => {
                self.out.push('[');
                self.nested(|p| p.expr_list(items));
                self.out.push(']');
            }
            ExprKind::Comprehension { vars, body } => {
                self.out.push('{');
                self.out.push_str(&vars.join(","));
                self.out.push_str(" | ");
                self.nested(|p| p.pred(body, PREC_EQUIV));
                self.out.push('}');
            }
            ExprKind::Lambda { vars, pred, body } => {
                self.out.push('%');
                self.binders(vars);
                self.out.push_str(".(");
                self.nested(|p| {
                    p.pred(pred, PREC_EQUIV);
                    p.out.push_str(" | ");
                    p.expr(body, 7);
                });
                self.out.push(')');
            }
            ExprKind::BoolOf(p) => {
                self.out.push_str("bool(");
                self.nested(|pr| pr.pred(p, PREC_EQUIV));
                self.out.push(')');
            }
            ExprKind::Unary(UnOp::Neg, inner) => {
                self.out.push('-');
                self.expr(inner, PREC_NEG);
            }
            ExprKind::Unary(UnOp::Inverse, inner) => {
                self.expr(inner, PREC_POSTFIX);
                self.out.push('~');
            }
            ExprKind::Unary(op, inner) => {
                self.out.push_str(op.call_name().unwrap_or("?"));
                self.out.push('(');
                self.nested(|p| p.expr(inner, 7));
                self.out.push(')');
            }
            ExprKind::Binary(op, l, r) => {
                let (prec, assoc) = op.prec();
                let (lmin, rmin) = match assoc {
                    Assoc::Left => (prec, prec + 1),
                    Assoc::Right => (prec + 1, prec),
                    Assoc::None => (prec + 1, prec + 1),
                };
                self.expr(l, lmin);
                if *op == BinOp::Mod {
                    self.out.push_str(" mod ");
                } else {
                    self.out.push_str(op.symbol());
                }
                self.expr(r, rmin);
            }
            ExprKind::Apply(f, x) => {
                self.expr(f, PREC_POSTFIX);
                self.out.push('(');
                self.nested(|p| p.expr(x, 7));
                self.out.push(')');
            }
            ExprKind::Image(r, s) => {
                self.expr(r, PREC_POSTFIX);
                self.out.push('[');
                self.nested(|p| p.expr(s, 7));
                self.out.push(']');
            }
        }
    }

    fn pred(&mut self, p: &Pred, min: u8) {
        if p.prec() < min {
            self.out.push('(');
            self.nested(|pr| pr.pred_bare(p));
            self.out.push(')');
        } else {
            self.pred_bare(p);
        }
    }

    fn infix(&mut self, sym: &str, l: &Pred, r: &Pred, lmin: u8, rmin: u8) {
        self.pred(l, lmin);
        self.out.push(' ');
        self.out.push_str(sym);
        self.out.push(' ');
        self.pred(r, rmin);
    }

    fn pred_bare(&mut self, p: &Pred) {
        match &p.kind {
            PredKind::Equiv(l, r) => self.infix("<=>", l, r, PREC_EQUIV + 1, PREC_EQUIV + 1),
            PredKind::Implies(l, r) => self.infix("=>", l, r, PREC_IMPLIES + 1, PREC_IMPLIES + 1),
            PredKind::Or(l, r) => self.infix("or", l, r, PREC_OR, PREC_OR + 1),
            PredKind::And(l, r) => self.infix("&", l, r, PREC_AND, PREC_AND + 1),
            PredKind::Not(inner) => {
                self.out.push_str("not");
                if inner.prec() < PREC_NOT {
                    self.out.push('(');
                    self.nested(|pr| pr.pred_bare(inner));
                    self.out.push(')');
                } else {
                    self.out.push(' ');
                    self.pred_bare(inner);
                }
            }
            PredKind::ForAll { vars, body } | PredKind::Exists { vars, body } => {
                self.out.push(if matches!(p.kind, PredKind::ForAll { .. }) { '!' } else { '#' });
                self.binders(vars);
                self.out.push_str(".(");
                self.nested(|pr| pr.pred(body, PREC_EQUIV));
                self.out.push(')');
            }
            PredKind::Compare(op, l, r) => {
                self.expr(l, 7);
                self.out.push(' ');
                self.out.push_str(op.symbol());
                self.out.push(' ');
                self.expr(r, 7);
            }
        }
    }

    fn machine(&mut self, m: &Machine) {
        self.out.push_str("MACHINE ");
        self.out.push_str(&m.name);
        self.out.push('\n');
        if !m.sets.is_empty() {
            self.out.push_str("SETS ");
            let decls: Vec<String> =
                m.sets.iter().map(|d| format!("{}={{{}}}", d.name, d.elems.join(","))).collect();
            self.out.push_str(&decls.join("; "));
            self.out.push('\n');
        }
        if !m.constants.is_empty() {
            self.out.push_str("CONSTANTS ");
            self.out.push_str(&m.constants.join(","));
            self.out.push('\n');
        }
        self.out.push_str("PROPERTIES ");
        self.pred(&m.properties, PREC_EQUIV);
        self.out.push('\n');
        if !m.assertions.is_empty() {
            self.out.push_str("ASSERTIONS\n");
            self.semi_ok = false;
            for (i, a) in m.assertions.iter().enumerate() {
                self.out.push_str("  ");
                self.pred(a, PREC_EQUIV);
                if i + 1 < m.assertions.len() {
                    self.out.push(';');
                }
                self.out.push('\n');
            }
            self.semi_ok = true;
        }
        self.out.push_str("END\n");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_expr, parse_pred};

    fn int(n: i64) -> Expr {
        Expr::int(n)
    }

    #[test]
    fn minimal_parentheses() {
        let a = Expr::binary(BinOp::Plus, int(1), Expr::binary(BinOp::Times, int(2), int(3)));
        assert_eq!(print_expr(&a), "1+2*3");
        let b = Expr::binary(BinOp::Times, Expr::binary(BinOp::Plus, int(1), int(2)), int(3));
        assert_eq!(print_expr(&b), "(1+2)*3");
        let c = Expr::binary(BinOp::Minus, Expr::binary(BinOp::Minus, int(5), int(2)), int(1));
        assert_eq!(print_expr(&c), "5-2-1");
        let d = Expr::binary(BinOp::Minus, int(5), Expr::binary(BinOp::Minus, int(2), int(1)));
        assert_eq!(print_expr(&d), "5-(2-1)");
    }

    #[test]
    fn negative_and_postfix() {
        assert_eq!(print_expr(&int(-3)), "-3");
        let e = parse_expr("(-x)~").unwrap();
        assert_eq!(print_expr(&e), "(-x)~");
        let f = parse_expr("-(a**2)").unwrap();
        assert_eq!(print_expr(&f), "-(a**2)");
        let g = parse_expr("a mod (b*c)").unwrap();
        assert_eq!(print_expr(&g), "a mod (b*c)");
    }

    #[test]
    fn predicate_spacing() {
        let p = parse_pred("x:S&(y=1 or z=2)").unwrap();
        assert_eq!(print_pred(&p), "x : S & (y = 1 or z = 2)");
        let q = parse_pred("not(x = 1 & y = 2)").unwrap();
        assert_eq!(print_pred(&q), "not(x = 1 & y = 2)");
        let r = parse_pred("not (x = 1)").unwrap();
        assert_eq!(print_pred(&r), "not x = 1");
        let s = parse_pred("%x.(x:1..3|x-1) = {}").unwrap();
        assert_eq!(print_pred(&s), "%x.(x : 1..3 | x-1) = {}");
    }

    #[test]
    fn law_prints_as_written() {
        let src = "dom(ff \\/ gg) = dom(ff) \\/ dom(gg)";
        assert_eq!(print_pred(&parse_pred(src).unwrap()), "dom(ff\\/gg) = dom(ff)\\/dom(gg)");
    }
}
