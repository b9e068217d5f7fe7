//! Recursive-descent parser for quantity expressions.
//!
//! ```text
//! expr     = sum ;
//! sum      = product { ("+" | "-") product } ;
//! product  = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = primary { "^" exponent } ;
//! exponent = "-" exponent | primary ;
//! primary  = number
//!          | "q" "[" integer "]"
//!          | name "(" args ")"
//!          | "(" expr ")" ;
//! args     = arg { "," arg } ;
//! arg      = expr | "[" expr { "," expr } "]" ;     (* lists: peak_gain only *)
//! number   = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//!          | "." digits [ exponent part ] ;
//! ```
//!
//! All binary operators are left associative, `^` included, so `2^3^2` is
//! `(2^3)^2`. Unary minus binds looser than `^`: `-q[0]^2` is `-(q[0]^2)`.

use std::fmt;

use thiserror::Error;

use super::ast::{BinaryOp, Builtin, Expr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number { value: f64, integer: bool },
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number { value, .. } => write!(f, "number {value}"),
            Tok::Ident(name) => write!(f, "identifier '{name}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Comma => f.write_str("','"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected {found}, expected {}", .expected.join(" or "))]
    Syntax { found: String, expected: Vec<String> },
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("'{name}' expects {expected} argument(s), got {found}")]
    Arity { name: String, expected: String, found: usize },
    #[error("parameter index must be a nonnegative integer literal, got {0}")]
    ParamIndex(String),
    #[error("invalid character '{0}'")]
    InvalidChar(char),
    #[error("malformed number '{0}'")]
    Number(String),
}

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn at(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { line: pos.line, column: pos.column, kind }
    }

    /// Expected-token set for syntax errors, empty otherwise.
    pub fn expected(&self) -> &[String] {
        match &self.kind {
            ParseErrorKind::Syntax { expected, .. } => expected,
            _ => &[],
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, pos));
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            let mut integer = true;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                integer = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                integer = false;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 =
                text.parse().map_err(|_| ParseError::at(pos, ParseErrorKind::Number(text.clone())))?;
            out.push((Tok::Number { value, integer }, pos));
            column += i - start;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            column += i - start;
            continue;
        }
        return Err(ParseError::at(pos, ParseErrorKind::InvalidChar(c)));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    at: usize,
}

const PRIMARY_START: [&str; 4] = ["number", "'q['", "function call", "'('"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::at(
            self.pos(),
            ParseErrorKind::Syntax {
                found: self.peek().to_string(),
                expected: expected.iter().map(|s| s.to_string()).collect(),
            },
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&tok.to_string()]))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.product()?);
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            base = Expr::binary(BinaryOp::Pow, base, self.exponent()?);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Number { value, .. } => {
                self.bump();
                Ok(Expr::Number(value))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, pos) = self.bump();
                if name == "q" {
                    return self.param();
                }
                let func = Builtin::from_name(&name)
                    .ok_or_else(|| ParseError::at(pos, ParseErrorKind::UnknownIdentifier(name.clone())))?;
                self.call(func, pos)
            }
            _ => Err(self.unexpected(&PRIMARY_START)),
        }
    }

    fn param(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LBracket)?;
        let pos = self.pos();
        let index = match self.peek().clone() {
            Tok::Number { value, integer: true } => {
                self.bump();
                if value > u32::MAX as f64 {
                    return Err(ParseError::at(pos, ParseErrorKind::ParamIndex(value.to_string())));
                }
                value as usize
            }
            Tok::Number { value, .. } => {
                return Err(ParseError::at(pos, ParseErrorKind::ParamIndex(value.to_string())));
            }
            Tok::RBracket | Tok::Eof => return Err(self.unexpected(&["integer"])),
            other => return Err(ParseError::at(pos, ParseErrorKind::ParamIndex(other.to_string()))),
        };
        self.expect(Tok::RBracket)?;
        Ok(Expr::Param(index))
    }

    fn list(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut items = vec![self.sum()?];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                    items.push(self.sum()?);
                }
                Tok::RBracket => {
                    self.bump();
                    return Ok(Expr::List(items));
                }
                _ => return Err(self.unexpected(&["','", "']'"])),
            }
        }
    }

    fn call(&mut self, func: Builtin, pos: Pos) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let takes_list = |i: usize| func == Builtin::PeakGain && i < 2;
        let mut args = Vec::new();
        loop {
            let arg = if takes_list(args.len()) && *self.peek() == Tok::LBracket {
                self.list()?
            } else {
                self.sum()?
            };
            args.push(arg);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    break;
                }
                _ => return Err(self.unexpected(&["','", "')'"])),
            }
        }
        if !func.arity().accepts(args.len()) {
            return Err(ParseError::at(
                pos,
                ParseErrorKind::Arity {
                    name: func.name().to_string(),
                    expected: func.arity().to_string(),
                    found: args.len(),
                },
            ));
        }
        Ok(Expr::Call { func, args })
    }
}

/// Parses a quantity expression.
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser { tokens: lex(src)?, at: 0 };
    let expr = parser.sum()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected(&["operator", "end of input"]));
    }
    Ok(expr)
}
