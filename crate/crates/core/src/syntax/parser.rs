use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::SyntaxError;

pub fn parse_pred(text: &str) -> Result<Pred, SyntaxError> {
    let mut p = Parser::new(text)?;
    let pred = p.pred()?;
    p.expect_eof()?;
    Ok(pred)
}

pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(text)?;
    let e = p.expr(7)?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_machine(text: &str) -> Result<Machine, SyntaxError> {
    let mut p = Parser::new(text)?;
    let m = p.machine()?;
    p.expect_eof()?;
    validate_machine(&m)?;
    Ok(m)
}

/// Parses a machine if the text starts with `MACHINE`, else a predicate,
/// else an expression.
pub fn parse_any(text: &str) -> Result<Ast, SyntaxError> {
    let toks = tokenize(text)?;
    if toks.first().map(|t| t.text.as_str()) == Some("MACHINE") {
        return parse_machine(text).map(Ast::Machine);
    }
    match parse_pred(text) {
        Ok(p) => Ok(Ast::Pred(p)),
        Err(pred_err) => parse_expr(text).map(Ast::Expr).map_err(|_| pred_err),
    }
}

fn validate_machine(m: &Machine) -> Result<(), SyntaxError> {
    let mut seen = BTreeSet::new();
    for decl in &m.sets {
        if !seen.insert(decl.name.clone()) {
            return Err(SyntaxError::Invalid { pos: decl.pos, msg: format!("duplicate set {}", decl.name) });
        }
        for e in &decl.elems {
            if !seen.insert(e.clone()) {
                return Err(SyntaxError::Invalid {
                    pos: decl.pos,
                    msg: format!("enumerated element {e} is not unique"),
                });
            }
        }
    }
    let used = m.properties.free_vars();
    for c in &m.constants {
        if seen.contains(c) {
            return Err(SyntaxError::Invalid {
                pos: m.properties.pos,
                msg: format!("constant {c} clashes with a set or element name"),
            });
        }
        if !used.contains(c) {
            return Err(SyntaxError::Invalid {
                pos: m.properties.pos,
                msg: format!("constant {c} does not occur in PROPERTIES"),
            });
        }
    }
    Ok(())
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    /// Whether a top-level `;` may be read as relational composition.
    semi_ok: bool,
    /// Furthest error seen, for reporting after backtracking.
    furthest: Option<SyntaxError>,
}

type PResult<T> = Result<T, SyntaxError>;

fn cmp_op(text: &str) -> Option<CmpOp> {
    CmpOp::from_symbol(text)
}

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser { toks: tokenize(text)?, i: 0, semi_ok: true, furthest: None })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.i + k).min(self.toks.len() - 1)]
    }

    fn at(&self, text: &str) -> bool {
        let t = self.peek();
        t.text == text && matches!(t.kind, TokenKind::Symbol | TokenKind::Keyword)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> SyntaxError {
        let t = self.peek();
        SyntaxError::Parse {
            pos: t.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: if t.kind == TokenKind::Eof { "end of input".into() } else { t.text.clone() },
        }
    }

    fn expect(&mut self, text: &str) -> PResult<Token> {
        if self.at(text) {
            Ok(self.bump())
        } else {
            Err(self.err(&[text]))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.err(&["end of input"]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        if self.peek().kind == TokenKind::Ident {
            let t = self.bump();
            Ok((t.text, t.pos))
        } else {
            Err(self.err(&["identifier"]))
        }
    }

    fn with_semi<T>(&mut self, ok: bool, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let saved = self.semi_ok;
        self.semi_ok = ok;
        let r = f(self);
        self.semi_ok = saved;
        r
    }

    fn note(&mut self, e: SyntaxError) {
        let further = match (&self.furthest, &e) {
            (None, _) => true,
            (Some(old), new) => new.pos() > old.pos(),
        };
        if further {
            self.furthest = Some(e);
        }
    }

    // ----- predicates -----

    fn pred(&mut self) -> PResult<Pred> {
        self.pred_nonassoc(PREC_EQUIV)
    }

    fn pred_nonassoc(&mut self, level: u8) -> PResult<Pred> {
        let (sym, next): (&str, fn(&mut Self) -> PResult<Pred>) = if level == PREC_EQUIV {
            ("<=>", |p| p.pred_nonassoc(PREC_IMPLIES))
        } else {
            ("=>", |p| p.pred_left(PREC_OR))
        };
        let lhs = next(self)?;
        if self.at(sym) {
            let pos = self.bump().pos;
            let rhs = next(self)?;
            if self.at(sym) {
                return Err(self.err(&["non-associative operator needs parentheses"]));
            }
            let kind = if level == PREC_EQUIV {
                PredKind::Equiv(Box::new(lhs), Box::new(rhs))
            } else {
                PredKind::Implies(Box::new(lhs), Box::new(rhs))
            };
            return Ok(Pred::new(kind, pos));
        }
        Ok(lhs)
    }

    fn pred_left(&mut self, level: u8) -> PResult<Pred> {
        let sym = if level == PREC_OR { "or" } else { "&" };
        let sub = |p: &mut Self| if level == PREC_OR { p.pred_left(PREC_AND) } else { p.pred_not() };
        let mut lhs = sub(self)?;
        while self.at(sym) {
            let pos = self.bump().pos;
            let rhs = sub(self)?;
            let kind = if level == PREC_OR {
                PredKind::Or(Box::new(lhs), Box::new(rhs))
            } else {
                PredKind::And(Box::new(lhs), Box::new(rhs))
            };
            lhs = Pred::new(kind, pos);
        }
        Ok(lhs)
    }

    fn pred_not(&mut self) -> PResult<Pred> {
        if self.at("not") {
            let pos = self.bump().pos;
            let inner = self.pred_not()?;
            return Ok(Pred::new(PredKind::Not(Box::new(inner)), pos));
        }
        self.pred_atom()
    }

    fn pred_atom(&mut self) -> PResult<Pred> {
        if self.at("!") || self.at("#") {
            let tok = self.bump();
            let vars = self.binder_vars()?;
            self.expect(".")?;
            self.expect("(")?;
            let body = self.with_semi(true, |p| p.pred())?;
            self.expect(")")?;
            let kind = if tok.text == "!" {
                PredKind::ForAll { vars, body: Box::new(body) }
            } else {
                PredKind::Exists { vars, body: Box::new(body) }
            };
            return Ok(Pred::new(kind, tok.pos));
        }
        if self.at("(") {
            // Either a parenthesised predicate or a comparison whose left
            // operand starts with a parenthesised expression.
            let start = self.i;
            match self.comparison() {
                Ok(p) => return Ok(p),
                Err(e) => {
                    self.note(e);
                    self.i = start;
                }
            }
            self.bump();
            let inner = self.with_semi(true, |p| p.pred());
            let inner = match inner {
                Ok(p) => p,
                Err(e) => {
                    self.note(e);
                    return Err(self.furthest.take().unwrap());
                }
            };
            if let Err(e) = self.expect(")") {
                self.note(e);
                return Err(self.furthest.take().unwrap());
            }
            self.furthest = None;
            return Ok(inner);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Pred> {
        let lhs = self.expr(7)?;
        let Some(op) = cmp_op(&self.peek().text).filter(|_| self.peek().kind == TokenKind::Symbol) else {
            return Err(self.err(&["comparison operator"]));
        };
        let pos = self.bump().pos;
        let rhs = self.expr(7)?;
        if cmp_op(&self.peek().text).is_some() && self.peek().kind == TokenKind::Symbol {
            return Err(self.err(&["non-associative comparison needs parentheses"]));
        }
        Ok(Pred::new(PredKind::Compare(op, Box::new(lhs), Box::new(rhs)), pos))
    }

    fn binder_vars(&mut self) -> PResult<Vec<String>> {
        if self.at("(") {
            self.bump();
            let mut vars = vec![self.ident()?.0];
            while self.at(",") {
                self.bump();
                vars.push(self.ident()?.0);
            }
            self.expect(")")?;
            check_distinct(&vars, self.peek().pos)?;
            Ok(vars)
        } else {
            Ok(vec![self.ident()?.0])
        }
    }

    // ----- expressions -----

    fn binop_here(&self) -> Option<BinOp> {
        let t = self.peek();
        if !matches!(t.kind, TokenKind::Symbol | TokenKind::Keyword) {
            return None;
        }
        let op = BinOp::from_symbol(&t.text)?;
        if op == BinOp::Compose && !self.semi_ok {
            return None;
        }
        Some(op)
    }

    fn expr(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = if self.at("-") {
            let pos = self.bump().pos;
            let operand = self.expr(PREC_NEG)?;
            Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(operand)), pos)
        } else {
            self.postfix()?
        };
        while let Some(op) = self.binop_here() {
            let (prec, assoc) = op.prec();
            if prec < min {
                break;
            }
            let pos = self.bump().pos;
            let rhs_min = if assoc == Assoc::Right { prec } else { prec + 1 };
            let rhs = self.expr(rhs_min)?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
            if assoc == Assoc::None && self.binop_here().map(|o| o.prec().0) == Some(prec) {
                return Err(self.err(&["non-associative operator needs parentheses"]));
            }
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        loop {
            if self.at("~") {
                let pos = self.bump().pos;
                e = Expr::new(ExprKind::Unary(UnOp::Inverse, Box::new(e)), pos);
            } else if self.at("[") {
                let pos = self.bump().pos;
                let arg = self.with_semi(true, |p| p.expr(7))?;
                self.expect("]")?;
                e = Expr::new(ExprKind::Image(Box::new(e), Box::new(arg)), pos);
            } else if self.at("(") {
                let pos = self.bump().pos;
                let arg = self.with_semi(true, |p| p.expr(7))?;
                self.expect(")")?;
                e = Expr::new(ExprKind::Apply(Box::new(e), Box::new(arg)), pos);
            } else {
                return Ok(e);
            }
        }
    }

    fn expr_list(&mut self, close: &str) -> PResult<Vec<Expr>> {
        let mut items = vec![self.expr(7)?];
        while self.at(",") {
            self.bump();
            items.push(self.expr(7)?);
        }
        self.expect(close)?;
        Ok(items)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let pos = t.pos;
        match t.kind {
            TokenKind::Int => {
                self.bump();
                let n: i64 = t.text.parse().map_err(|_| SyntaxError::Invalid {
                    pos,
                    msg: format!("integer literal {} out of range", t.text),
                })?;
                Ok(Expr::new(ExprKind::Int(n), pos))
            }
            TokenKind::Ident => {
                self.bump();
                Ok(Expr::new(ExprKind::Ident(t.text), pos))
            }
            TokenKind::Keyword => self.keyword_atom(&t),
            TokenKind::Symbol => match t.text.as_str() {
                "(" => {
                    self.bump();
                    let e = self.with_semi(true, |p| p.expr(7))?;
                    self.expect(")")?;
                    Ok(e)
                }
                "{" => {
                    self.bump();
                    self.with_semi(true, |p| p.brace_body(pos))
                }
                "[" => {
                    self.bump();
                    if self.at("]") {
                        self.bump();
                        return Ok(Expr::new(ExprKind::EmptySeq, pos));
                    }
                    let items = self.with_semi(true, |p| p.expr_list("]"))?;
                    Ok(Expr::new(ExprKind::SeqEnum(items), pos))
                }
                "%" => {
                    self.bump();
                    let vars = self.binder_vars()?;
                    self.expect(".")?;
                    self.expect("(")?;
                    let (pred, body) = self.with_semi(true, |p| {
                        let pred = p.pred()?;
                        p.expect("|")?;
                        let body = p.expr(7)?;
                        Ok((pred, body))
                    })?;
                    self.expect(")")?;
                    Ok(Expr::new(
                        ExprKind::Lambda { vars, pred: Box::new(pred), body: Box::new(body) },
                        pos,
                    ))
                }
                _ => Err(self.err(&["expression"])),
            },
            TokenKind::Eof => Err(self.err(&["expression"])),
        }
    }

    fn brace_body(&mut self, pos: Pos) -> PResult<Expr> {
        if self.at("}") {
            self.bump();
            return Ok(Expr::new(ExprKind::EmptySet, pos));
        }
        // comprehension: ident (, ident)* |
        let mut k = 0;
        let mut is_comp = false;
        while self.peek_at(k).kind == TokenKind::Ident {
            let next = &self.peek_at(k + 1).text;
            if next == "|" && self.peek_at(k + 1).kind == TokenKind::Symbol {
                is_comp = true;
                break;
            }
            if next != "," {
                break;
            }
            k += 2;
        }
        if is_comp {
            let mut vars = vec![self.ident()?.0];
            while self.at(",") {
                self.bump();
                vars.push(self.ident()?.0);
            }
            check_distinct(&vars, pos)?;
            self.expect("|")?;
            let body = self.pred()?;
            self.expect("}")?;
            return Ok(Expr::new(ExprKind::Comprehension { vars, body: Box::new(body) }, pos));
        }
        let items = self.expr_list("}")?;
        Ok(Expr::new(ExprKind::SetEnum(items), pos))
    }

    fn keyword_atom(&mut self, t: &Token) -> PResult<Expr> {
        let pos = t.pos;
        let text = t.text.as_str();
        if let Some(b) = Builtin::ALL.iter().copied().find(|b| b.keyword() == text) {
            self.bump();
            return Ok(Expr::new(ExprKind::Builtin(b), pos));
        }
        match text {
            "TRUE" | "FALSE" => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(text == "TRUE"), pos))
            }
            "bool" => {
                self.bump();
                self.expect("(")?;
                let p = self.with_semi(true, |p| p.pred())?;
                self.expect(")")?;
                Ok(Expr::new(ExprKind::BoolOf(Box::new(p)), pos))
            }
            _ => {
                let Some(op) = UnOp::from_call_name(text) else {
                    return Err(self.err(&["expression"]));
                };
                self.bump();
                self.expect("(")?;
                let arg = self.with_semi(true, |p| p.expr(7))?;
                self.expect(")")?;
                Ok(Expr::new(ExprKind::Unary(op, Box::new(arg)), pos))
            }
        }
    }

    // ----- machines -----

    fn machine(&mut self) -> PResult<Machine> {
        self.expect("MACHINE")?;
        let (name, _) = self.ident()?;
        let mut sets = Vec::new();
        if self.at("SETS") {
            self.bump();
            loop {
                let (set_name, pos) = self.ident()?;
                self.expect("=")?;
                self.expect("{")?;
                let mut elems = vec![self.ident()?.0];
                while self.at(",") {
                    self.bump();
                    elems.push(self.ident()?.0);
                }
                self.expect("}")?;
                sets.push(SetDecl { name: set_name, elems, pos });
                if self.at(";") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let mut constants = Vec::new();
        if self.at("CONSTANTS") {
            self.bump();
            constants.push(self.ident()?.0);
            while self.at(",") {
                self.bump();
                constants.push(self.ident()?.0);
            }
            check_distinct(&constants, self.peek().pos)?;
        }
        self.expect("PROPERTIES")?;
        let properties = self.pred()?;
        let mut assertions = Vec::new();
        if self.at("ASSERTIONS") {
            self.bump();
            self.semi_ok = false;
            assertions.push(self.pred()?);
            while self.at(";") {
                self.bump();
                assertions.push(self.pred()?);
            }
            self.semi_ok = true;
        }
        self.expect("END")?;
        Ok(Machine { name, sets, constants, properties, assertions })
    }
}

fn check_distinct(vars: &[String], pos: Pos) -> PResult<()> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(SyntaxError::Invalid { pos, msg: format!("variable {v} bound twice") });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn int(n: i64) -> Expr {
        Expr::int(n)
    }

    #[test]
    fn arithmetic_precedence() {
        assert_eq!(
            e("1+2*3"),
            Expr::binary(BinOp::Plus, int(1), Expr::binary(BinOp::Times, int(2), int(3)))
        );
        assert_eq!(
            e("5-2-1"),
            Expr::binary(BinOp::Minus, Expr::binary(BinOp::Minus, int(5), int(2)), int(1))
        );
        assert_eq!(
            e("2**3**2"),
            Expr::binary(BinOp::Power, int(2), Expr::binary(BinOp::Power, int(3), int(2)))
        );
        assert_eq!(
            e("-2**2"),
            Expr::binary(BinOp::Power, Expr::unary(UnOp::Neg, int(2)), int(2))
        );
    }

    #[test]
    fn example_machine_property() {
        let p = parse_pred("iv : ID & iv /= bb").unwrap();
        let expected = Pred::and(
            Pred::cmp(CmpOp::In, Expr::ident("iv"), Expr::ident("ID")),
            Pred::cmp(CmpOp::Neq, Expr::ident("iv"), Expr::ident("bb")),
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn comparisons_are_non_associative() {
        assert!(matches!(parse_pred("a = b = c"), Err(SyntaxError::Parse { .. })));
        assert!(parse_pred("(a = b) <=> (b = c)").is_ok());
        assert!(parse_pred("1..2..3 = {}").is_err());
        assert!(parse_pred("x = 1 => y = 1 => z = 1").is_err());
    }

    #[test]
    fn parenthesised_predicates_and_expressions() {
        let p = parse_pred("(a + b) * c = d").unwrap();
        assert!(matches!(p.kind, PredKind::Compare(CmpOp::Eq, ..)));
        let q = parse_pred("(a = b & c = d) or e = f").unwrap();
        assert!(matches!(q.kind, PredKind::Or(..)));
        let r = parse_pred("((1)) + 2 = 3").unwrap();
        assert!(matches!(r.kind, PredKind::Compare(..)));
    }

    #[test]
    fn binders_and_comprehensions() {
        let p = parse_pred("!(x,y).(x : S & y : S => x |-> y : r)").unwrap();
        assert!(matches!(p.kind, PredKind::ForAll { ref vars, .. } if vars.len() == 2));
        let c = e("{x | x : 1..3 & x > 1}");
        assert!(matches!(c.kind, ExprKind::Comprehension { .. }));
        let s = e("{x, y}");
        assert!(matches!(s.kind, ExprKind::SetEnum(ref v) if v.len() == 2));
        let l = e("%x.(x:1..3|x-1)");
        assert!(matches!(l.kind, ExprKind::Lambda { .. }));
        assert!(parse_pred("#(x,x).(x = 1)").is_err());
    }

    #[test]
    fn postfix_and_builtins() {
        let a = e("dom(r~)[{1}]");
        assert!(matches!(a.kind, ExprKind::Image(..)));
        let b = e("f(x)(y)");
        assert!(matches!(b.kind, ExprKind::Apply(ref f, _) if matches!(f.kind, ExprKind::Apply(..))));
        assert!(parse_expr("dom").is_err());
        assert_eq!(e("FIN(S)"), Expr::unary(UnOp::Fin, Expr::ident("S")));
        assert_eq!(e("FIN1(S)"), Expr::unary(UnOp::Fin1, Expr::ident("S")));
    }

    #[test]
    fn machine_clauses() {
        let m = parse_machine(
            "MACHINE DoubleEvaluationTest\nSETS ID={aa,bb}\nCONSTANTS iv\nPROPERTIES iv : ID & iv /= bb\nASSERTIONS iv : {aa}; iv /: {bb}\nEND",
        )
        .unwrap();
        assert_eq!(m.name, "DoubleEvaluationTest");
        assert_eq!(m.sets[0].elems, ["aa", "bb"]);
        assert_eq!(m.assertions.len(), 2);
        // composition inside brackets is fine in assertions
        let m2 = parse_machine("MACHINE M CONSTANTS r PROPERTIES r = {1|->2} ASSERTIONS (r;r) = {}; r /= {} END").unwrap();
        assert_eq!(m2.assertions.len(), 2);
    }

    #[test]
    fn machine_validation() {
        assert!(parse_machine("MACHINE M SETS A={x,y}; B={y} PROPERTIES 1=1 END").is_err());
        assert!(parse_machine("MACHINE M CONSTANTS c PROPERTIES 1=1 END").is_err());
    }

    #[test]
    fn errors_report_position() {
        match parse_pred("x = ") {
            Err(SyntaxError::Parse { pos, .. }) => assert_eq!(pos.col, 5),
            other => panic!("{other:?}"),
        }
        match parse_pred("(x = 1 & y = )") {
            Err(SyntaxError::Parse { pos, .. }) => assert_eq!(pos.col, 14),
            other => panic!("{other:?}"),
        }
    }
}
