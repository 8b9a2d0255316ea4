//! Lexing, parsing, pretty printing and parser round-trip validation.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

use serde::Serialize;
use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_any, parse_expr, parse_machine, parse_pred};
pub use printer::{print_ast, print_expr, print_machine, print_pred};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{pos}: illegal character {ch:?}")]
    Lex { pos: Pos, ch: char },
    #[error("{pos}: expected {}, found {found}", expected.join(" or "))]
    Parse { pos: Pos, expected: Vec<String>, found: String },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex { pos, .. }
            | SyntaxError::Parse { pos, .. }
            | SyntaxError::Invalid { pos, .. } => *pos,
        }
    }
}

/// Outcome of parse → print → parse → print.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub pass: bool,
    pub first_print: String,
    pub second_print: String,
    /// Human-readable description of the first difference, if any.
    pub divergence: Option<String>,
}

fn first_difference(a: &str, b: &str) -> Option<String> {
    if a == b {
        return None;
    }
    for (n, (la, lb)) in a.lines().zip(b.lines()).enumerate() {
        if la != lb {
            let col = la.chars().zip(lb.chars()).take_while(|(x, y)| x == y).count() + 1;
            return Some(format!("line {}, column {}: {:?} vs {:?}", n + 1, col, la, lb));
        }
    }
    Some(format!(
        "outputs differ in length ({} vs {} lines)",
        a.lines().count(),
        b.lines().count()
    ))
}

/// Round-trips any parsable text, dispatching on its sort.
pub fn roundtrip_check(text: &str) -> Result<RoundtripReport, SyntaxError> {
    let original = parse_any(text)?;
    let p1 = print_ast(&original);
    let reparsed = match &original {
        Ast::Machine(_) => parse_machine(&p1).map(Ast::Machine),
        Ast::Pred(_) => parse_pred(&p1).map(Ast::Pred),
        Ast::Expr(_) => parse_expr(&p1).map(Ast::Expr),
    };
    let reparsed = match reparsed {
        Ok(a) => a,
        Err(e) => {
            return Ok(RoundtripReport {
                pass: false,
                first_print: p1,
                second_print: String::new(),
                divergence: Some(format!("printed text does not re-parse: {e}")),
            })
        }
    };
    let p2 = print_ast(&reparsed);
    let mut divergence = first_difference(&p1, &p2);
    if divergence.is_none() && reparsed != original {
        divergence = Some("re-parsed tree differs structurally from the original".into());
    }
    Ok(RoundtripReport { pass: divergence.is_none(), first_print: p1, second_print: p2, divergence })
}
