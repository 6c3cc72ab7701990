//! Statement splitting, tokens and the expression grammar.

use crate::diffpoly::Parity;
use crate::rational::{parse_q, Q};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

pub fn error_at(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse { line: pos.line, column: pos.column, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Q),
    Ident(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32, Pos),
    T(Box<Expr>),
    /// `e'`, `e'(m)` or `e'(t,m)`.
    Jet(Box<Expr>, u32, u32),
    Call(String, Vec<Expr>, Pos),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckOp {
    Eq,
    Ne,
    /// Equal modulo total derivatives.
    Class,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Gen { name: String, parity: Parity, weight: u32, invertible: bool },
    Base(String),
    Param { name: String, parity: Parity, nilpotency: u32 },
    Unit { name: String, expr: Expr },
    Let { name: String, expr: Expr },
    Set { left: String, right: String, expr: Expr },
    Check { lhs: Expr, op: CheckOp, rhs: Expr },
    Eval(Expr),
    /// A command line; `expect_failure` for `fails <command>`.
    Command { expect_failure: bool, args: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Located {
    pub pos: Pos,
    pub statement: Statement,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Script {
    pub statements: Vec<Located>,
}

/// Names a script may use as commands.
pub const COMMANDS: [&str; 17] = [
    "validate",
    "preset",
    "presets",
    "htwist",
    "shear",
    "wzw-verify",
    "sugawara",
    "euler-lagrange",
    "noether",
    "legendre",
    "n2-verify",
    "schouten",
    "mc-check",
    "qcoh",
    "dump",
    "fixtures",
    "eval",
];

/// Words that cannot name generators, parameters or bindings.
pub const RESERVED: [&str; 16] = [
    "T", "lam", "mu", "inv", "d", "bracket", "nprod", "lie", "euler", "gen", "base", "param", "unit", "let", "set",
    "check",
];

struct Source<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> Source<'a> {
    fn new(text: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Source { text, line_starts }
    }

    fn pos(&self, offset: usize) -> Pos {
        let line = self.line_starts.partition_point(|s| *s <= offset);
        let start = self.line_starts[line - 1];
        Pos { line, column: self.text[start..offset].chars().count() + 1 }
    }
}

/// Splits at newlines and `;` outside quotes and brackets; drops `#` comments.
fn split_statements(text: &str) -> Result<Vec<(usize, String)>> {
    let src = Source::new(text);
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = None;
    let mut depth: Vec<(char, usize)> = Vec::new();
    let mut quote: Option<usize> = None;
    let mut comment = false;
    let mut flush = |cur: &mut String, start: &mut Option<usize>| {
        if let Some(s) = start.take() {
            let t = cur.trim_end().to_string();
            if !t.is_empty() {
                out.push((s, t));
            }
        }
        cur.clear();
    };
    for (i, c) in text.char_indices() {
        if comment {
            if c == '\n' {
                comment = false;
            } else {
                // keep byte offsets aligned with the source
                if start.is_some() {
                    cur.extend(std::iter::repeat_n(' ', c.len_utf8()));
                }
                continue;
            }
        }
        if let Some(q) = quote {
            if c == '"' {
                quote = None;
            } else if c == '\n' {
                return Err(error_at(src.pos(q), "unterminated string"));
            }
            cur.push(c);
            continue;
        }
        match c {
            '#' => {
                comment = true;
                if start.is_some() {
                    cur.push(' ');
                }
                continue;
            }
            '"' => quote = Some(i),
            '(' | '{' => depth.push((c, i)),
            ')' | '}' => {
                let want = if c == ')' { '(' } else { '{' };
                match depth.pop() {
                    Some((o, _)) if o == want => {}
                    _ => return Err(error_at(src.pos(i), format!("unbalanced `{c}`"))),
                }
            }
            _ => {}
        }
        if (c == ';' || c == '\n') && depth.is_empty() {
            flush(&mut cur, &mut start);
            continue;
        }
        if start.is_none() {
            if c.is_whitespace() {
                continue;
            }
            start = Some(i);
        }
        cur.push(c);
    }
    if let Some(q) = quote {
        return Err(error_at(src.pos(q), "unterminated string"));
    }
    if let Some((c, i)) = depth.pop() {
        return Err(error_at(src.pos(i), format!("unclosed `{c}`")));
    }
    flush(&mut cur, &mut start);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Sym(&'static str),
}

fn lex(src: &Source, offset: usize, text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (b, c) = chars[i];
        let pos = src.pos(offset + b);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            // p/q literal
            if j + 1 < chars.len() && chars[j].1 == '/' && chars[j + 1].1.is_ascii_digit() {
                j += 1;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
            }
            let end = chars.get(j).map_or(text.len(), |x| x.0);
            let v = parse_q(&text[b..end]).map_err(|_| error_at(pos, "bad rational literal"))?;
            out.push((Tok::Num(v), pos));
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |x| x.0);
            out.push((Tok::Ident(text[b..end].to_string()), pos));
            i = j;
            continue;
        }
        let two = if i + 1 < chars.len() { Some((c, chars[i + 1].1)) } else { None };
        let sym: &'static str = match two {
            Some(('=', '=')) => "==",
            Some(('!', '=')) => "!=",
            _ => match c {
                '+' => "+",
                '-' => "-",
                '*' => "*",
                '^' => "^",
                '(' => "(",
                ')' => ")",
                ',' => ",",
                '{' => "{",
                '}' => "}",
                '=' => "=",
                '~' => "~",
                '\'' => "'",
                _ => return Err(error_at(pos, format!("unexpected character `{c}`"))),
            },
        };
        i += sym.len();
        out.push((Tok::Sym(sym), pos));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(error_at(self.pos(), format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok((s, pos))
            }
            _ => Err(error_at(pos, "expected an identifier")),
        }
    }

    fn uint(&mut self) -> Result<u32> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Num(v)) if v.is_integer() => {
                let n = v.to_integer().try_into().map_err(|_| error_at(pos, "integer out of range"))?;
                self.i += 1;
                Ok(n)
            }
            _ => Err(error_at(pos, "expected a non-negative integer")),
        }
    }

    fn done(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(error_at(self.pos(), "unexpected trailing input")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat("+") {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat("-") {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while self.eat("*") {
            e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "T") {
            self.i += 1;
            return Ok(Expr::T(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let e = self.postfix()?;
        let pos = self.pos();
        if self.eat("^") {
            if self.is_sym("-") {
                return Err(error_at(self.pos(), "negative exponents are written inv(x)"));
            }
            let n = self.uint()?;
            return Ok(Expr::Pow(Box::new(e), n, pos));
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.primary()?;
        while self.eat("'") {
            // the order group must follow the prime directly
            let adjacent = self.toks.get(self.i).zip(self.toks.get(self.i - 1)).is_some_and(|(a, b)| {
                a.0 == Tok::Sym("(") && a.1.line == b.1.line && a.1.column == b.1.column + 1
            });
            if adjacent {
                self.expect("(")?;
                let a = self.uint()?;
                let (tau, order) = if self.eat(",") { (a, self.uint()?) } else { (0, a) };
                self.expect(")")?;
                e = Expr::Jet(Box::new(e), tau, order);
            } else {
                e = Expr::Jet(Box::new(e), 0, 1);
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.i += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                if self.eat("(") {
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(")") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                    Ok(Expr::Call(name, args, pos))
                } else {
                    Ok(Expr::Ident(name, pos))
                }
            }
            Some(Tok::Sym("(")) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(_) => Err(error_at(pos, "expected an expression")),
            None => Err(error_at(pos, "unexpected end of input")),
        }
    }
}

fn parser_for(src: &Source, offset: usize, text: &str) -> Result<Parser> {
    let toks = lex(src, offset, text)?;
    Ok(Parser { toks, i: 0, end: src.pos(offset + text.len()) })
}

/// Parses a single expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let src = Source::new(text);
    let mut p = parser_for(&src, 0, text)?;
    let e = p.expr()?;
    p.done()?;
    Ok(e)
}

/// Whitespace-separated words; double quotes group.
pub fn split_words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_word = false;
    let mut quoted = false;
    for c in text.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                in_word = true;
            }
            c if c.is_whitespace() && !quoted => {
                if in_word {
                    out.push(std::mem::take(&mut cur));
                    in_word = false;
                }
            }
            c => {
                cur.push(c);
                in_word = true;
            }
        }
    }
    if in_word {
        out.push(cur);
    }
    out
}

fn declared_name(p: &mut Parser) -> Result<String> {
    let (name, pos) = p.ident()?;
    if RESERVED.contains(&name.as_str()) {
        return Err(error_at(pos, format!("`{name}` is reserved")));
    }
    Ok(name)
}

fn parity_word(p: &mut Parser) -> Result<Option<Parity>> {
    match p.peek() {
        Some(Tok::Ident(s)) if s == "even" || s == "odd" => {
            let odd = s == "odd";
            p.i += 1;
            Ok(Some(Parity::from_odd(odd)))
        }
        _ => Ok(None),
    }
}

fn parse_statement(src: &Source, offset: usize, text: &str) -> Result<Statement> {
    let first = text.split_whitespace().next().unwrap_or("");
    if first == "fails" || COMMANDS.contains(&first) {
        let mut args = split_words(text);
        let expect_failure = first == "fails";
        if expect_failure {
            args.remove(0);
            if args.first().is_none_or(|a| !COMMANDS.contains(&a.as_str())) {
                return Err(error_at(src.pos(offset), "`fails` must be followed by a command"));
            }
        }
        return Ok(Statement::Command { expect_failure, args });
    }
    let mut p = parser_for(src, offset, text)?;
    let keyword = match p.peek() {
        Some(Tok::Ident(s)) => s.clone(),
        _ => String::new(),
    };
    // `print` is not reserved, so `print` followed by an operator is an expression
    let is_decl = !matches!(p.toks.get(1).map(|t| &t.0), Some(Tok::Sym(_)));
    let st = match keyword.as_str() {
        "gen" => {
            p.i += 1;
            let name = declared_name(&mut p)?;
            let parity = parity_word(&mut p)?.ok_or_else(|| error_at(p.pos(), "expected `even` or `odd`"))?;
            let weight = p.uint()?;
            let invertible = matches!(p.peek(), Some(Tok::Ident(s)) if s == "unit");
            if invertible {
                let pos = p.pos();
                p.i += 1;
                if parity.is_odd() || weight != 0 {
                    return Err(error_at(pos, "only even weight-0 generators can be units"));
                }
            }
            Statement::Gen { name, parity, weight, invertible }
        }
        "base" => {
            p.i += 1;
            Statement::Base(declared_name(&mut p)?)
        }
        "param" => {
            p.i += 1;
            let name = declared_name(&mut p)?;
            let parity = parity_word(&mut p)?.unwrap_or(Parity::Even);
            let nilpotency = if p.peek().is_some() { p.uint()? } else { 0 };
            Statement::Param { name, parity, nilpotency }
        }
        "unit" => {
            p.i += 1;
            let name = declared_name(&mut p)?;
            p.expect("=")?;
            Statement::Unit { name, expr: p.expr()? }
        }
        "let" => {
            p.i += 1;
            let name = declared_name(&mut p)?;
            p.expect("=")?;
            Statement::Let { name, expr: p.expr()? }
        }
        "set" => {
            p.i += 1;
            p.expect("{")?;
            let (left, _) = p.ident()?;
            p.expect(",")?;
            let (right, _) = p.ident()?;
            p.expect("}")?;
            p.expect("=")?;
            Statement::Set { left, right, expr: p.expr()? }
        }
        "check" => {
            p.i += 1;
            let lhs = p.expr()?;
            let op = if p.eat("==") {
                CheckOp::Eq
            } else if p.eat("!=") {
                CheckOp::Ne
            } else if p.eat("~") {
                CheckOp::Class
            } else {
                return Err(error_at(p.pos(), "expected `==`, `!=` or `~`"));
            };
            Statement::Check { lhs, op, rhs: p.expr()? }
        }
        "print" if is_decl => {
            p.i += 1;
            Statement::Eval(p.expr()?)
        }
        _ => Statement::Eval(p.expr()?),
    };
    p.done()?;
    Ok(st)
}

/// Parses a script: statements end at a newline or `;`.
pub fn parse(text: &str) -> Result<Script> {
    let src = Source::new(text);
    let mut statements = Vec::new();
    for (offset, stmt) in split_statements(text)? {
        let statement = parse_statement(&src, offset, &stmt)?;
        statements.push(Located { pos: src.pos(offset), statement });
    }
    Ok(Script { statements })
}
