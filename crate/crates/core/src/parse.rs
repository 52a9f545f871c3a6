//! Recursive-descent parser for the field-file grammar.
//!
//! ```text
//! line     := label '=' expr
//! label    := 'X' digits
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | '+' unary | power
//! power    := primary ('^' exponent)?
//! exponent := ['-' | '+'] integer ('^' exponent)? | '(' exponent ')'
//! primary  := number | 'x' digits | func '(' expr ')' | ident | '(' expr ')'
//! ```
//!
//! `^` is right-associative and only takes integer exponents. The identifier
//! `t` is rejected: fields are autonomous.

use crate::error::ParseError;
use crate::expr::{Expr, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
    text: String,
}

fn tokenize(src: &str, line: usize, col_offset: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col_offset + i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                col,
                text: c.to_string(),
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                line,
                column: col,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                col,
                text,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(text.clone()),
                col,
                text,
            });
            continue;
        }
        return Err(ParseError::Syntax {
            line,
            column: col,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        col: col_offset + chars.len() + 1,
        text: "end of line".into(),
    });
    Ok(out)
}

/// Parses `x<digits>` into a 1-based index.
pub(crate) fn indexed_name(ident: &str, prefix: char) -> Option<Result<usize, ()>> {
    let rest = ident.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(match rest.parse::<usize>() {
        Ok(i) if i >= 1 => Ok(i),
        _ => Err(()),
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: token.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.error_at(&t, format!("expected {what}, found `{}`", t.text)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Caret {
            self.next();
            let n = self.exponent()?;
            Ok(Expr::Pow(Box::new(base), n))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let t = self.next();
        let (negative, t) = match t.tok {
            Tok::Minus => (true, self.next()),
            Tok::Plus => (false, self.next()),
            Tok::LParen => {
                let n = self.exponent()?;
                self.expect(Tok::RParen, "`)`")?;
                return self.chain_exponent(n, &t);
            }
            _ => (false, t),
        };
        let value = match t.tok {
            Tok::Num(v) if v.fract() == 0.0 && !t.text.contains(['.', 'e', 'E']) => v,
            Tok::Num(_) => return Err(self.error_at(&t, "exponents must be integers")),
            _ => return Err(self.error_at(&t, format!("expected integer exponent, found `{}`", t.text))),
        };
        let value = if negative { -value } else { value };
        if value.abs() > f64::from(i32::MAX) {
            return Err(self.error_at(&t, "exponent out of range"));
        }
        self.chain_exponent(value as i32, &t)
    }

    fn chain_exponent(&mut self, base: i32, at: &Token) -> Result<i32, ParseError> {
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let rhs = self.exponent()?;
        let value = u32::try_from(rhs)
            .ok()
            .and_then(|r| base.checked_pow(r))
            .ok_or_else(|| self.error_at(at, "exponent is not a representable integer"))?;
        Ok(value)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(Expr::Const(*v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    let func =
                        Func::from_name(name).ok_or_else(|| self.error_at(&t, format!("unknown function `{name}`")))?;
                    self.next();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::call(func, arg));
                }
                if name == "t" {
                    return Err(self.error_at(&t, "time `t` may not appear: fields must be autonomous"));
                }
                match indexed_name(name, 'x') {
                    Some(Ok(i)) => Ok(Expr::Var(i)),
                    Some(Err(())) => Err(self.error_at(&t, "variable indices start at x1")),
                    None if Func::from_name(name).is_some() => {
                        Err(self.error_at(&t, format!("function `{name}` needs an argument")))
                    }
                    None => Ok(Expr::Param(name.clone())),
                }
            }
            _ => Err(self.error_at(&t, format!("expected an operand, found `{}`", t.text))),
        }
    }
}

/// Parses a bare expression (no `X<i> =` label).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_expr_on_line(src, 1, 0)
}

fn parse_expr_on_line(src: &str, line: usize, col_offset: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(src, line, col_offset)?;
    let mut p = Parser { tokens, pos: 0, line };
    let e = p.expr()?;
    let t = p.next();
    if t.tok != Tok::End {
        return Err(p.error_at(&t, format!("unexpected `{}`", t.text)));
    }
    Ok(e)
}

/// One `X<i> = <expr>` line.
pub(crate) struct ComponentLine {
    pub label: usize,
    pub expr: Expr,
    pub line: usize,
}

/// Splits field text into labelled component lines, skipping comments and
/// blank lines.
pub(crate) fn component_lines(text: &str) -> Result<Vec<ComponentLine>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(ParseError::Syntax {
                line,
                column: col,
                message: "expected `X<i> = <expression>`".into(),
            });
        };
        let lhs = &content[..eq];
        let label_text = lhs.trim();
        let label_col = lhs.chars().take_while(|c| c.is_whitespace()).count() + 1;
        let label = match indexed_name(label_text, 'X') {
            Some(Ok(i)) => i,
            _ => {
                return Err(ParseError::Syntax {
                    line,
                    column: label_col,
                    message: format!("expected component label `X<i>` (i >= 1), found `{label_text}`"),
                })
            }
        };
        let rhs = &content[eq + 1..];
        let offset = content[..eq + 1].chars().count();
        let expr = parse_expr_on_line(rhs, line, offset)?;
        out.push(ComponentLine { label, expr, line });
    }
    Ok(out)
}
