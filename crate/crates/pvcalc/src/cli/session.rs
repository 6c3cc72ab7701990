//! Values, expression evaluation and script state.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use num_traits::One;

use super::syntax::{error_at, CheckOp, Expr, Located, Pos, Script, Statement};
use crate::diffpoly::{Element, Parity, Signature, SignatureBuilder, Var};
use crate::geometry::{Coords, TargetForm};
use crate::models::Preset;
use crate::pva::{BracketTable, LambdaPolynomial, Pva};
use crate::rational::{to_short, Q};
use crate::{Error, Result};

/// Result of an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Elem(Element),
    Lam(LambdaPolynomial),
    Form(TargetForm),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Elem(e) => write!(f, "{e}"),
            Value::Lam(l) => write!(f, "{l}"),
            Value::Form(t) => write!(f, "{}", form_text(t)),
        }
    }
}

/// Text form of a target form in the `c*d(x1,x2)` notation.
pub fn form_text(t: &TargetForm) -> String {
    let sig = t.signature();
    let mut parts = Vec::new();
    for (idx, c) in t.components() {
        let names: Vec<&str> = idx.iter().map(|i| sig.generators[t.coords[*i]].name.as_str()).collect();
        let d = format!("d({})", names.join(","));
        let term = match c.as_constant() {
            Some(v) if v.is_one() => d,
            Some(v) if v == -Q::one() => format!("-{d}"),
            Some(v) => format!("{}*{d}", to_short(&v)),
            None if c.len() == 1 => format!("{c}*{d}"),
            None => format!("({c})*{d}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        match p.strip_prefix('-') {
            Some(rest) => out.push_str(&format!(" - {rest}")),
            None => out.push_str(&format!(" + {p}")),
        }
    }
    out
}

/// What an expression may refer to.
pub struct Scope<'a> {
    pub sig: &'a Arc<Signature>,
    pub pva: Option<&'a Pva>,
    pub vars: Option<&'a HashMap<String, Value>>,
}

impl<'a> Scope<'a> {
    pub fn new(sig: &'a Arc<Signature>) -> Self {
        Scope { sig, pva: None, vars: None }
    }

    pub fn with_pva(sig: &'a Arc<Signature>, pva: &'a Pva) -> Self {
        Scope { sig, pva: Some(pva), vars: None }
    }

    fn pva(&self, pos: Pos) -> Result<&'a Pva> {
        self.pva.ok_or_else(|| error_at(pos, "no bracket table is in scope"))
    }

    fn ident(&self, name: &str, pos: Pos) -> Result<Value> {
        if let Some(v) = self.vars.and_then(|m| m.get(name)) {
            return Ok(v.clone());
        }
        let sig = self.sig;
        if name == "lam" {
            return Ok(Value::Lam(LambdaPolynomial::monomial(Element::one(sig), 1)));
        }
        if let Some(g) = sig.generator_index(name) {
            return Ok(Value::Elem(Element::jet(sig, g, 0)));
        }
        if sig.base_index(name).is_some() {
            return Ok(Value::Elem(Element::base(sig, name)?));
        }
        if sig.parameter_index(name).is_some() {
            return Ok(Value::Elem(Element::param(sig, name)?));
        }
        if let Some(u) = sig.unit_index(name) {
            return Ok(Value::Elem(Element::var(sig, Var::Unit(u as u16))));
        }
        Err(error_at(pos, format!("unknown identifier `{name}`")))
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Num(v) => Ok(Value::Elem(Element::constant(self.sig, v.clone()))),
            Expr::Ident(name, pos) => self.ident(name, *pos),
            Expr::Neg(a) => Ok(match self.eval(a)? {
                Value::Elem(x) => Value::Elem(-&x),
                Value::Lam(l) => Value::Lam(l.neg()),
                Value::Form(f) => Value::Form(f.neg()),
            }),
            Expr::Add(a, b) => add(self.eval(a)?, self.eval(b)?, false),
            Expr::Sub(a, b) => add(self.eval(a)?, self.eval(b)?, true),
            Expr::Mul(a, b) => mul(self.eval(a)?, self.eval(b)?),
            Expr::Pow(a, n, pos) => {
                let v = self.eval(a)?;
                if let Value::Elem(x) = &v {
                    if *n >= 2 && x.parity() == Some(Parity::Odd) {
                        return Err(error_at(*pos, format!("odd element raised to the power {n}")));
                    }
                }
                let mut acc = Value::Elem(Element::one(self.sig));
                for _ in 0..*n {
                    acc = mul(acc, v.clone())?;
                }
                Ok(acc)
            }
            Expr::T(a) => match self.eval(a)? {
                Value::Elem(x) => Ok(Value::Elem(self.derivation(&x))),
                Value::Lam(l) => Ok(Value::Lam(l.map(|c| self.derivation(c)))),
                Value::Form(_) => Err(Error::InvalidArgument("T does not act on forms".into())),
            },
            Expr::Jet(a, tau, order) => match self.eval(a)? {
                Value::Elem(mut x) => {
                    for _ in 0..*tau {
                        x = x.tau_derivative();
                    }
                    // the printed jet notation, independent of any twist
                    x = x.t_pow(*order);
                    Ok(Value::Elem(x))
                }
                _ => Err(Error::InvalidArgument("jet suffix applies to elements only".into())),
            },
            Expr::Call(name, args, pos) => self.call(name, args, *pos),
        }
    }

    fn derivation(&self, x: &Element) -> Element {
        match self.pva {
            Some(p) => p.derivation(x),
            None => x.t(),
        }
    }

    pub fn element(&self, e: &Expr) -> Result<Element> {
        match self.eval(e)? {
            Value::Elem(x) => Ok(x),
            v => Err(Error::InvalidArgument(format!("expected an element, got `{v}`"))),
        }
    }

    fn call(&self, name: &str, args: &[Expr], pos: Pos) -> Result<Value> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(error_at(pos, format!("`{name}` takes {n} argument(s)")))
            }
        };
        match name {
            "bracket" => {
                arity(2)?;
                let p = self.pva(pos)?;
                Ok(Value::Lam(p.lambda_bracket(&self.element(&args[0])?, &self.element(&args[1])?)?))
            }
            "nprod" => {
                arity(3)?;
                let p = self.pva(pos)?;
                let n = self
                    .element(&args[2])?
                    .as_constant()
                    .filter(|c| c.is_integer())
                    .and_then(|c| i64::try_from(c.to_integer()).ok())
                    .ok_or_else(|| error_at(pos, "the product index must be an integer"))?;
                Ok(Value::Elem(p.nth_product(&self.element(&args[0])?, &self.element(&args[1])?, n)?))
            }
            "lie" => {
                arity(2)?;
                let p = self.pva(pos)?;
                Ok(Value::Elem(p.nth_product(&self.element(&args[0])?, &self.element(&args[1])?, 0)?))
            }
            "euler" => {
                arity(2)?;
                let Expr::Ident(g, gpos) = &args[1] else {
                    return Err(error_at(pos, "the second argument of `euler` must be a generator"));
                };
                let gi = self.sig.generator_index(g).ok_or_else(|| error_at(*gpos, format!("unknown generator `{g}`")))?;
                let a = self.element(&args[0])?;
                Ok(Value::Elem(match self.pva {
                    Some(p) => a.variational_derivative_with(gi, &|e| p.derivation(e)),
                    None => a.variational_derivative(gi),
                }))
            }
            "inv" => {
                arity(1)?;
                let Expr::Ident(x, xpos) = &args[0] else {
                    return Err(error_at(pos, "`inv` takes a generator or unit name"));
                };
                Element::inverse_of(self.sig, x).map(Value::Elem).map_err(|e| error_at(*xpos, e.to_string()))
            }
            "d" => {
                let coords = Coords::detect(self.sig).map_err(|e| error_at(pos, e.to_string()))?;
                let mut idx = Vec::new();
                for a in args {
                    let Expr::Ident(x, xpos) = a else {
                        return Err(error_at(pos, "`d` takes coordinate names"));
                    };
                    let g = self.sig.generator_index(x);
                    let i = coords
                        .x
                        .iter()
                        .position(|c| Some(*c) == g)
                        .ok_or_else(|| error_at(*xpos, format!("`{x}` is not a target coordinate")))?;
                    idx.push(i);
                }
                let f = TargetForm::zero(self.sig, &coords.x, idx.len()).with_term(&idx, &Element::one(self.sig))?;
                Ok(Value::Form(f))
            }
            _ => Err(error_at(pos, format!("unknown function `{name}`"))),
        }
    }
}

fn scale_form(f: &TargetForm, c: &Element, left: bool) -> Result<TargetForm> {
    let mut out = TargetForm::zero(f.signature(), &f.coords, f.degree);
    for (idx, x) in f.components() {
        out.add_term(idx, &if left { c * x } else { x * c })?;
    }
    Ok(out)
}

fn add(a: Value, b: Value, sub: bool) -> Result<Value> {
    let b = if sub {
        match b {
            Value::Elem(x) => Value::Elem(-&x),
            Value::Lam(l) => Value::Lam(l.neg()),
            Value::Form(f) => Value::Form(f.neg()),
        }
    } else {
        b
    };
    match (a, b) {
        (Value::Elem(x), Value::Elem(y)) => Ok(Value::Elem(x.try_add(&y)?)),
        (Value::Lam(l), Value::Lam(m)) => Ok(Value::Lam(l.add(&m))),
        (Value::Lam(l), Value::Elem(x)) | (Value::Elem(x), Value::Lam(l)) => {
            Ok(Value::Lam(l.add(&LambdaPolynomial::constant(x))))
        }
        (Value::Form(f), Value::Form(g)) => Ok(Value::Form(f.add(&g)?)),
        (Value::Form(f), Value::Elem(x)) | (Value::Elem(x), Value::Form(f)) if x.is_zero() => Ok(Value::Form(f)),
        _ => Err(Error::InvalidArgument("cannot add a form to a non-form".into())),
    }
}

fn lam_product(a: &LambdaPolynomial, b: &LambdaPolynomial) -> Result<LambdaPolynomial> {
    let mut out = LambdaPolynomial::zero(a.signature());
    for ((n, m), c) in b.terms() {
        if *m != 0 {
            return Err(Error::InvalidArgument("products of two-variable polynomials are unsupported".into()));
        }
        out.add_assign(&a.mul_right(c).shift(*n));
    }
    Ok(out)
}

fn mul(a: Value, b: Value) -> Result<Value> {
    match (a, b) {
        (Value::Elem(x), Value::Elem(y)) => Ok(Value::Elem(x.try_mul(&y)?)),
        (Value::Elem(x), Value::Lam(l)) => Ok(Value::Lam(l.mul_left(&x))),
        (Value::Lam(l), Value::Elem(x)) => Ok(Value::Lam(l.mul_right(&x))),
        (Value::Lam(l), Value::Lam(m)) => Ok(Value::Lam(lam_product(&l, &m)?)),
        (Value::Elem(x), Value::Form(f)) => Ok(Value::Form(scale_form(&f, &x, true)?)),
        (Value::Form(f), Value::Elem(x)) => Ok(Value::Form(scale_form(&f, &x, false)?)),
        (Value::Form(f), Value::Form(g)) => Ok(Value::Form(f.wedge(&g)?)),
        _ => Err(Error::InvalidArgument("cannot multiply a form by a λ-polynomial".into())),
    }
}

fn as_lambda(v: &Value) -> Option<LambdaPolynomial> {
    match v {
        Value::Lam(l) => Some(l.clone()),
        Value::Elem(x) if x.is_zero() => Some(LambdaPolynomial::zero(x.signature())),
        Value::Elem(x) => Some(LambdaPolynomial::constant(x.clone())),
        Value::Form(_) => None,
    }
}

/// Equality with elements read as constant λ-polynomials.
pub fn same_value(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Lam(_), _) | (_, Value::Lam(_)) => as_lambda(a).is_some() && as_lambda(a) == as_lambda(b),
        _ => a == b,
    }
}

/// Parses and evaluates an element over `sig` (no bracket in scope).
pub fn parse_element(sig: &Arc<Signature>, text: &str) -> Result<Element> {
    Scope::new(sig).element(&super::syntax::parse_expr(text)?)
}

/// Parses and evaluates any value with an optional PVA in scope.
pub fn parse_value(sig: &Arc<Signature>, pva: Option<&Pva>, text: &str) -> Result<Value> {
    Scope { sig, pva, vars: None }.eval(&super::syntax::parse_expr(text)?)
}

/// Parses a form in the target coordinates of `sig`.
pub fn parse_form(sig: &Arc<Signature>, degree: usize, text: &str) -> Result<TargetForm> {
    match Scope::new(sig).eval(&super::syntax::parse_expr(text)?)? {
        Value::Form(f) if f.degree == degree => Ok(f),
        Value::Elem(x) if x.is_zero() => Ok(TargetForm::zero(sig, &Coords::detect(sig)?.x, degree)),
        v => Err(Error::InvalidArgument(format!("expected a {degree}-form, got `{v}`"))),
    }
}

/// Names a preset binds on load: the four Q-generators of an N=2 model.
pub fn preset_bindings(p: &Preset) -> HashMap<String, Value> {
    let mut vars = HashMap::new();
    if let Preset::N2(m) = p {
        let g = m.generators();
        for (name, e) in [("Qmm", &g.mm), ("Qmp", &g.mp), ("Qpp", &g.pp), ("Qpm", &g.pm)] {
            vars.insert(name.to_string(), Value::Elem(e.clone()));
        }
    }
    vars
}

/// Script state: declarations, the bracket table, bindings and the active preset.
#[derive(Default)]
pub struct Session {
    builder: SignatureBuilder,
    declared: bool,
    sig: Option<Arc<Signature>>,
    table: Option<BracketTable>,
    pva: Option<Pva>,
    pub preset: Option<(String, Preset)>,
    pub vars: HashMap<String, Value>,
    pub fixtures: Option<PathBuf>,
}

/// What a statement produced: text to print and whether its check passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    pub fn pass(text: impl Into<String>) -> Self {
        Outcome { text: text.into(), passed: true }
    }

    pub fn with(text: impl Into<String>, passed: bool) -> Self {
        Outcome { text: text.into(), passed }
    }
}

impl Session {
    pub fn new() -> Self {
        Session::default()
    }

    pub fn signature(&mut self) -> Result<Arc<Signature>> {
        if let Some(s) = &self.sig {
            return Ok(s.clone());
        }
        if !self.declared {
            return Err(Error::InvalidArgument("no signature: declare generators or load a preset".into()));
        }
        let s = self.builder.clone().build()?;
        self.sig = Some(s.clone());
        Ok(s)
    }

    /// The PVA in scope, built from the table on first use.
    pub fn pva(&mut self) -> Result<Option<Pva>> {
        if self.pva.is_none() {
            if let Some(t) = &self.table {
                self.pva = Some(Pva::new(t.clone())?);
            } else if self.declared {
                let sig = self.signature()?;
                self.pva = Some(Pva::new(BracketTable::new(&sig))?);
            }
        }
        Ok(self.pva.clone())
    }

    pub fn load_preset(&mut self, name: &str, p: Preset) -> Result<()> {
        let pva = p.pva()?;
        self.sig = Some(pva.signature().clone());
        self.table = Some(pva.table().clone());
        self.pva = Some(pva);
        self.vars = preset_bindings(&p);
        self.preset = Some((name.to_string(), p));
        self.declared = false;
        Ok(())
    }

    fn declare(&mut self, pos: Pos, f: impl FnOnce(SignatureBuilder) -> SignatureBuilder) -> Result<()> {
        if self.sig.is_some() {
            return Err(error_at(pos, "declarations must precede every use of the signature"));
        }
        self.builder = f(std::mem::take(&mut self.builder));
        self.declared = true;
        // surface duplicate names at the declaration
        self.builder.clone().build().map_err(|e| error_at(pos, e.to_string()))?;
        Ok(())
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Value> {
        let sig = self.signature()?;
        let pva = self.pva()?;
        Scope { sig: &sig, pva: pva.as_ref(), vars: Some(&self.vars) }.eval(e)
    }

    /// Runs one non-command statement.
    pub fn statement(&mut self, st: &Located) -> Result<Outcome> {
        let pos = st.pos;
        match &st.statement {
            Statement::Gen { name, parity, weight, invertible } => {
                let (name, parity, weight, inv) = (name.clone(), *parity, *weight, *invertible);
                self.declare(pos, |b| if inv { b.invertible(&name) } else { b.generator(&name, parity, weight) })?;
                Ok(Outcome::pass(""))
            }
            Statement::Base(name) => {
                let name = name.clone();
                self.declare(pos, |b| b.base(&name))?;
                Ok(Outcome::pass(""))
            }
            Statement::Param { name, parity, nilpotency } => {
                let (name, parity, nilp) = (name.clone(), *parity, *nilpotency);
                self.declare(pos, |b| b.parameter(&name, parity, nilp))?;
                Ok(Outcome::pass(""))
            }
            Statement::Unit { name, expr } => {
                if self.sig.is_some() {
                    return Err(error_at(pos, "declarations must precede every use of the signature"));
                }
                let tmp = self.builder.clone().build()?;
                let poly = Scope::new(&tmp).element(expr)?;
                let mut terms: Vec<(Vec<(String, u32)>, Q)> = Vec::new();
                for (m, c) in poly.terms() {
                    let mut f = Vec::new();
                    for (v, e) in &m.0 {
                        match v {
                            Var::Jet(j) if j.order == 0 && j.tau == 0 && *e > 0 => {
                                f.push((tmp.generators[j.gen as usize].name.clone(), *e as u32))
                            }
                            _ => return Err(error_at(pos, "a unit must be a polynomial in the generators")),
                        }
                    }
                    terms.push((f, c.clone()));
                }
                let name = name.clone();
                self.declare(pos, |b| {
                    let t = terms.iter().map(|(m, c)| (m.iter().map(|(g, e)| (g.as_str(), *e)).collect(), c.clone()));
                    b.unit(&name, t.collect())
                })?;
                Ok(Outcome::pass(""))
            }
            Statement::Let { name, expr } => {
                let v = self.eval(expr)?;
                self.vars.insert(name.clone(), v);
                Ok(Outcome::pass(""))
            }
            Statement::Set { left, right, expr } => {
                let sig = self.signature()?;
                let p = match self.eval(expr)? {
                    Value::Lam(l) => l,
                    Value::Elem(x) => LambdaPolynomial::constant(x),
                    Value::Form(_) => return Err(error_at(pos, "a bracket must be a λ-polynomial")),
                };
                let table = self.table.get_or_insert_with(|| BracketTable::new(&sig));
                table.set_named(left, right, p).map_err(|e| error_at(pos, e.to_string()))?;
                self.pva = None;
                Ok(Outcome::pass(""))
            }
            Statement::Check { lhs, op, rhs } => {
                let (a, b) = (self.eval(lhs)?, self.eval(rhs)?);
                let ok = match op {
                    CheckOp::Eq => same_value(&a, &b),
                    CheckOp::Ne => !same_value(&a, &b),
                    CheckOp::Class => {
                        let (Value::Elem(x), Value::Elem(y)) = (&a, &b) else {
                            return Err(error_at(pos, "`~` compares elements"));
                        };
                        let p = self.pva()?.ok_or_else(|| error_at(pos, "no bracket table is in scope"))?;
                        p.is_trivial_class(&x.try_sub(y)?)?
                    }
                };
                let sym = match op {
                    CheckOp::Eq => "==",
                    CheckOp::Ne => "!=",
                    CheckOp::Class => "~",
                };
                let verdict = if ok { "PASS" } else { "FAIL" };
                Ok(Outcome::with(format!("check {a} {sym} {b}: {verdict}"), ok))
            }
            Statement::Eval(e) => Ok(Outcome::pass(self.eval(e)?.to_string())),
            Statement::Command { .. } => Err(error_at(pos, "commands are run by the command layer")),
        }
    }

    /// Runs a script, handing command statements to `command`. Stops at the
    /// first error; otherwise reports whether every check passed.
    pub fn run(
        &mut self,
        script: &Script,
        out: &mut dyn std::io::Write,
        command: &mut dyn FnMut(&mut Session, &[String]) -> Result<Outcome>,
    ) -> Result<bool> {
        let mut all = true;
        for st in &script.statements {
            let o = match &st.statement {
                Statement::Command { expect_failure, args } => {
                    let o = command(self, args).map_err(|e| located(st.pos, e))?;
                    if *expect_failure {
                        let verdict = if o.passed { "unexpectedly passed" } else { "failed as expected" };
                        Outcome::with(format!("{}\n{}: {verdict}", o.text, args[0]), !o.passed)
                    } else {
                        o
                    }
                }
                _ => self.statement(st).map_err(|e| located(st.pos, e))?,
            };
            all &= o.passed;
            if !o.text.is_empty() {
                writeln!(out, "{}", o.text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            }
        }
        Ok(all)
    }
}

/// Attaches a statement position to errors that lack one.
fn located(pos: Pos, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::InvalidArgument(format!("line {}: {other}", pos.line)),
    }
}
