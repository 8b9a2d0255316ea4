use std::ops::Range;

use super::ast::Pos;
use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Int,
    Keyword,
    Symbol,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte range of `text` in the input.
    pub span: Range<usize>,
    pub pos: Pos,
}

pub const KEYWORDS: &[&str] = &[
    "MACHINE", "SETS", "CONSTANTS", "PROPERTIES", "ASSERTIONS", "END", "or", "not", "mod", "TRUE",
    "FALSE", "BOOL", "INTEGER", "NATURAL", "NATURAL1", "INT", "NAT", "NAT1", "MAXINT", "MININT",
    "POW", "POW1", "FIN", "FIN1", "dom", "ran", "card", "union", "inter", "min", "max", "id",
    "size", "first", "last", "front", "tail", "rev", "seq", "bool",
];

// Longest first so the scan below is maximal munch.
const SYMBOLS: &[&str] = &[
    "+->>", "-->>", ">->>", "/<<:", "<=>", "|->", "<<|", "|>>", "<->", "+->", "-->", ">+>", ">->",
    "/<:", "<<:", "=>", "/=", "/:", "<:", "<=", ">=", "\\/", "/\\", "<+", "<|", "|>", "..", "**",
    "&", "!", "#", "%", "=", ":", "<", ">", "\\", ";", "+", "-", "*", "/", "~", "^", "(", ")",
    "{", "}", "[", "]", ",", ".", "|",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Splits source text into tokens. `|` directly followed by `-` stays two
/// tokens unless it forms the maplet `|->`.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        // `//` line comments
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let pos = Pos { line, col };
        let start = i;
        let kind = if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if is_keyword(&text[start..i]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            TokenKind::Int
        } else if let Some(sym) = SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            i += sym.len();
            TokenKind::Symbol
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(SyntaxError::Lex { pos, ch });
        };
        col += (i - start) as u32;
        out.push(Token { kind, text: text[start..i].to_string(), span: start..i, pos });
    }
    out.push(Token { kind: TokenKind::Eof, text: String::new(), span: i..i, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        tokenize(s).unwrap().into_iter().filter(|t| t.kind != TokenKind::Eof).map(|t| t.text).collect()
    }

    #[test]
    fn lambda_bar_minus_is_two_tokens() {
        assert_eq!(
            texts("%x.(x:1..3|x-1)"),
            ["%", "x", ".", "(", "x", ":", "1", "..", "3", "|", "x", "-", "1", ")"]
        );
        assert_eq!(texts("{x|-1<x}")[2..4], ["|", "-"]);
    }

    #[test]
    fn maplet_is_one_token() {
        assert_eq!(texts("1|->2"), ["1", "|->", "2"]);
    }

    #[test]
    fn illegal_character() {
        match tokenize("x$y") {
            Err(SyntaxError::Lex { pos, ch }) => {
                assert_eq!(ch, '$');
                assert_eq!(pos, Pos { line: 1, col: 2 });
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn maximal_munch_and_keywords() {
        assert_eq!(texts("a/<<:b"), ["a", "/<<:", "b"]);
        assert_eq!(texts("f+->>g"), ["f", "+->>", "g"]);
        assert_eq!(texts("P<=>Q"), ["P", "<=>", "Q"]);
        let toks = tokenize("FIN(x) FIN1(x)").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[0].text, "FIN");
        assert_eq!(toks[4].text, "FIN1");
    }

    #[test]
    fn token_text_is_input_slice() {
        let src = "MACHINE M\n  PROPERTIES x = 1 // note\nEND";
        for t in tokenize(src).unwrap() {
            assert_eq!(&src[t.span.clone()], t.text);
        }
        let toks = tokenize(src).unwrap();
        let props = toks.iter().find(|t| t.text == "PROPERTIES").unwrap();
        assert_eq!(props.pos, Pos { line: 2, col: 3 });
    }
}
