//! Recursive-descent parser.
//!
//! ```text
//! formula := quant | iff
//! quant   := ("forall" | "exists") var [":" sort] "." formula
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" or)*            (right associative)
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "(" formula ")" | quant | atom
//! atom    := name "(" var (("," | ";") var)* ")" | var op var | "true" | "false"
//! op      := "=" | "!=" | "<" | "<="
//! ```
//!
//! `#` starts a comment running to the end of the line. `x < y` is the
//! relation named `<`, and `x <= y` abbreviates `x < y | x = y`.

use super::ast::Formula;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Sep,
    Dot,
    Colon,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Eq,
    Neq,
    Lt,
    Le,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Sep => "separator".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                adv(1, &mut i, &mut col);
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, n) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Imp, 2)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' | ';' => (Tok::Sep, 1),
                '.' => (Tok::Dot, 1),
                ':' => (Tok::Colon, 1),
                '!' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '=' => (Tok::Eq, 1),
                '<' => (Tok::Lt, 1),
                c if c.is_alphanumeric() || c == '_' => {
                    let mut j = i;
                    while j < chars.len()
                        && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                    {
                        j += 1;
                    }
                    (Tok::Ident(chars[i..j].iter().collect()), j - i)
                }
                c => {
                    return Err(Error::Parse {
                        line,
                        col,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        adv(n, &mut i, &mut col);
        out.push(Spanned { tok, line: l0, col: c0 });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    depth: Vec<(usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let s = &self.toks[self.pos];
        Err(Error::Parse { line: s.line, col: s.col, msg: msg.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        if *self.peek() == Tok::Eof && !self.depth.is_empty() {
            let (l, c) = *self.depth.last().unwrap();
            return self.error(format!(
                "unbalanced parenthesis: `(` opened at line {l}, column {c} is never closed"
            ));
        }
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn ident(&mut self, wanted: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(wanted),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if let Tok::Ident(s) = self.peek() {
            if s == "forall" || s == "exists" {
                return self.quant();
            }
        }
        self.iff()
    }

    fn quant(&mut self) -> Result<Formula> {
        let Tok::Ident(q) = self.bump() else { unreachable!() };
        let var = self.ident("a variable after the quantifier")?;
        let sort = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.ident("a sort name")?)
        } else {
            None
        };
        if *self.peek() != Tok::Dot {
            return self.unexpected("`.` after the quantified variable");
        }
        self.bump();
        let body = Box::new(self.formula()?);
        Ok(if q == "forall" {
            Formula::Forall { var, sort, body }
        } else {
            Formula::Exists { var, sort, body }
        })
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut f = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            f = f.iff(self.imp()?);
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula> {
        let f = self.or()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            return Ok(f.implies(self.imp()?));
        }
        Ok(f)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = f.or(self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                let s = &self.toks[self.pos];
                self.depth.push((s.line, s.col));
                self.bump();
                let f = self.formula()?;
                if *self.peek() != Tok::RParen {
                    return self.unexpected("`)`");
                }
                self.bump();
                self.depth.pop();
                Ok(f)
            }
            Tok::Ident(s) if s == "forall" || s == "exists" => self.quant(),
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Formula::Const(s == "true"))
            }
            Tok::Ident(_) => self.atom(),
            _ => self.unexpected("a formula"),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let Tok::Ident(name) = self.bump() else { unreachable!() };
        match self.peek().clone() {
            Tok::LParen => {
                let s = &self.toks[self.pos];
                self.depth.push((s.line, s.col));
                self.bump();
                let mut args = vec![self.ident("a variable")?];
                loop {
                    match self.peek() {
                        Tok::Sep => {
                            self.bump();
                            args.push(self.ident("a variable")?);
                        }
                        Tok::RParen => {
                            self.bump();
                            self.depth.pop();
                            return Ok(Formula::Atom { rel: name, args });
                        }
                        _ => return self.unexpected("`,` or `)`"),
                    }
                }
            }
            op @ (Tok::Eq | Tok::Neq | Tok::Lt | Tok::Le) => {
                self.bump();
                let rhs = self.ident("a variable")?;
                Ok(match op {
                    Tok::Eq => Formula::Eq(name, rhs),
                    Tok::Neq => Formula::Eq(name, rhs).not(),
                    Tok::Lt => Formula::Atom { rel: "<".into(), args: vec![name, rhs] },
                    _ => Formula::Atom { rel: "<".into(), args: vec![name.clone(), rhs.clone()] }
                        .or(Formula::Eq(name, rhs)),
                })
            }
            _ => self.unexpected("`(` or a comparison after a name"),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "forall" | "exists" | "true" | "false")
}

pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0, depth: Vec::new() };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        if *p.peek() == Tok::RParen {
            return p.error("unbalanced parenthesis: unexpected `)`");
        }
        return p.unexpected("end of input");
    }
    Ok(f)
}
