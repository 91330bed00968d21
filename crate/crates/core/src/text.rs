//! Text syntax for differential polynomials and λ-expressions.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" (int | "(" "-"? int ")"))?
//! atom   := int | "(" expr ")" | "der(" expr ("," int)? ")"
//!         | gen "'"* | "d[" int ("," int)* "]" gen
//!         | func | "D[" func ("," gen)* "]"
//!         | param | formal variable
//! ```
//!
//! `u'` means `∂u` (one derivation only), `d[2,0]u` means `∂₁²u`, and
//! `D[f,u,v]` is `∂²f/∂u∂v` for a declared function `f`. Division is only by
//! monomials in the parameters. Printing always uses primes up to order 3 and
//! `d[..]` beyond, and the output parses back to the same value.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::diffpoly::{Algebra, DerivKey, DiffPoly, FuncSym, Monomial};
use crate::error::{Error, Result};
use crate::lambda::{Formal, LambdaExpr};
use crate::scalar::{Rational, Scalar};

fn key_text(alg: &Algebra, k: &DerivKey) -> String {
    let name = alg.gen_name(k.gen);
    if alg.dims() == 1 {
        match k.order[0] {
            n @ 0..=3 => format!("{name}{}", "'".repeat(n as usize)),
            n => format!("d[{n}]{name}"),
        }
    } else if k.is_underived() {
        name.to_string()
    } else {
        let parts: Vec<String> = k.order.iter().map(u32::to_string).collect();
        format!("d[{}]{name}", parts.join(","))
    }
}

fn func_text(alg: &Algebra, f: &FuncSym) -> String {
    if f.partials.iter().all(|&n| n == 0) {
        return f.name.to_string();
    }
    let mut s = format!("D[{}", f.name);
    for (pos, &n) in f.partials.iter().enumerate() {
        for _ in 0..n {
            s.push(',');
            s.push_str(alg.gen_name(f.args[pos]));
        }
    }
    s.push(']');
    s
}

fn with_power(base: String, e: u32) -> String {
    if e == 1 {
        base
    } else {
        format!("{base}^{e}")
    }
}

/// The monomial as a `*`-joined product; empty for `1`.
pub fn monomial_text(alg: &Algebra, m: &Monomial) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (k, e) in m.vars() {
        parts.push(with_power(key_text(alg, k), *e));
    }
    for (f, e) in m.funcs() {
        parts.push(with_power(func_text(alg, f), *e));
    }
    parts.join("*")
}

/// Appends `c·rest` to `out` as one or more signed terms.
fn push_term(out: &mut String, c: &Scalar, rest: &str) {
    let sign_and = |out: &mut String, negative: bool, body: String| {
        match (out.is_empty(), negative) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    };
    if c.len() > 1 {
        if rest.is_empty() {
            for (m, q) in c.terms() {
                let single = Scalar::monomial(q.clone(), m.clone());
                push_term(out, &single, "");
            }
        } else {
            sign_and(out, false, format!("({c})*{rest}"));
        }
        return;
    }
    let Some((q, m)) = c.as_monomial() else {
        return;
    };
    let mut parts: Vec<String> = Vec::new();
    let a = q.abs();
    if !a.is_one() || (m.is_one() && rest.is_empty()) {
        parts.push(rational_text(&a));
    }
    if !m.is_one() {
        parts.push(m.to_string());
    }
    if !rest.is_empty() {
        parts.push(rest.to_string());
    }
    sign_and(out, q.is_negative(), parts.join("*"));
}

fn rational_text(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn poly_to_text(alg: &Algebra, p: &DiffPoly) -> String {
    let mut out = String::new();
    for (m, c) in p.terms() {
        push_term(&mut out, c, &monomial_text(alg, m));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A product of formal variables as `*`-joined powers; empty for `1`.
pub fn formal_text(formal: &Formal, exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (slot, &e) in exps.iter().enumerate() {
        if e > 0 {
            parts.push(with_power(formal.var_name(slot), e));
        }
    }
    parts.join("*")
}

pub fn lambda_to_text(alg: &Algebra, formal: &Formal, e: &LambdaExpr) -> String {
    let mut out = String::new();
    for (exps, p) in e.terms() {
        let lam = formal_text(formal, exps);
        if lam.is_empty() {
            for (m, c) in p.terms() {
                push_term(&mut out, c, &monomial_text(alg, m));
            }
        } else if p.len() == 1 {
            let (m, c) = p.terms().next().unwrap();
            let mono = monomial_text(alg, m);
            let rest = if mono.is_empty() {
                lam
            } else {
                format!("{mono}*{lam}")
            };
            push_term(&mut out, c, &rest);
        } else {
            let body = format!("({})*{lam}", poly_to_text(alg, p));
            push_term(&mut out, &Scalar::one(), &body);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (off, ch) = bytes[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = bytes[start..i].iter().map(|&(_, c)| c).collect();
            out.push((off, Tok::Int(text.parse().unwrap())));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].1.is_alphanumeric() || bytes[i].1 == '_') {
                i += 1;
            }
            let text: String = bytes[start..i].iter().map(|&(_, c)| c).collect();
            out.push((off, Tok::Ident(text)));
        } else if "+-*/^()[],'".contains(ch) {
            out.push((off, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(Error::Parse {
                offset: off,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    alg: &'a Algebra,
    formal: Option<&'a Formal>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn peek_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn int(&mut self) -> Result<u32> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let v = n.to_u32();
                match v {
                    Some(v) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    None => self.err("integer too large"),
                }
            }
            _ => self.err("expected an integer"),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn expr(&mut self) -> Result<LambdaExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc += &self.term()?;
            } else if self.eat('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LambdaExpr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = &acc * &rhs;
            } else if self.peek_sym('/') {
                let at = self.offset();
                self.pos += 1;
                let rhs = self.unary()?;
                let inv = as_scalar(&rhs)
                    .ok_or(Error::Parse {
                        offset: at,
                        message: "division by a non-constant".into(),
                    })?
                    .inverse()?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<LambdaExpr> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<LambdaExpr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        if self.eat('(') {
            let neg = self.eat('-');
            let n = self.int()?;
            self.expect(')')?;
            if neg {
                let at = self.offset();
                let s = as_scalar(&base).ok_or(Error::Parse {
                    offset: at,
                    message: "negative power of a non-constant".into(),
                })?;
                return Ok(LambdaExpr::constant(DiffPoly::constant(
                    s.inverse()?.pow(n),
                )));
            }
            Ok(base.pow(n))
        } else {
            let n = self.int()?;
            Ok(base.pow(n))
        }
    }

    fn atom(&mut self) -> Result<LambdaExpr> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        match tok {
            Tok::Int(n) => {
                self.pos += 1;
                let q = Rational::from_integer(n);
                Ok(constant(Scalar::from_rational(q)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => self.err(format!("unexpected `{c}`")),
            Tok::Ident(name) => {
                self.pos += 1;
                self.named(&name)
            }
        }
    }

    fn named(&mut self, name: &str) -> Result<LambdaExpr> {
        let alg = self.alg;
        if name == "d" && self.peek_sym('[') {
            self.pos += 1;
            let mut order = Vec::new();
            loop {
                order.push(self.int()?);
                if !self.eat(',') {
                    break;
                }
            }
            self.expect(']')?;
            if alg.dims() == 1 && order.len() != 1 {
                return self.err("one derivation expected");
            }
            let g = self.ident()?;
            let Some(i) = alg.gen_index(&g) else {
                return self.err(format!("`{g}` is not a generator"));
            };
            return Ok(LambdaExpr::constant(alg.var(i, &order)?));
        }
        if name == "D" && self.peek_sym('[') {
            self.pos += 1;
            let f = self.ident()?;
            let mut partials = Vec::new();
            while self.eat(',') {
                partials.push(self.ident()?);
            }
            self.expect(']')?;
            let refs: Vec<&str> = partials.iter().map(String::as_str).collect();
            return Ok(LambdaExpr::constant(alg.func(&f, &refs)?));
        }
        if name == "der" && self.peek_sym('(') {
            self.pos += 1;
            let inner = self.expr()?;
            let alpha = if self.eat(',') {
                let k = self.int()? as usize;
                if k == 0 {
                    return self.err("derivations are numbered from 1");
                }
                k - 1
            } else {
                0
            };
            self.expect(')')?;
            return inner.try_map_coefficients(|p| alg.total_derivative(p, alpha));
        }
        if let Some(i) = alg.gen_index(name) {
            let mut n = 0;
            while self.eat('\'') {
                n += 1;
            }
            if n > 0 && alg.dims() != 1 {
                return self.err("primes need a single derivation");
            }
            let mut order = alg.zero_order();
            if n > 0 {
                order[0] = n;
            }
            return Ok(LambdaExpr::constant(alg.var(i, &order)?));
        }
        if alg.function(name).is_some() {
            return Ok(LambdaExpr::constant(alg.func(name, &[])?));
        }
        if let Some(slot) = self.formal.and_then(|f| f.parse_var(name)) {
            return Ok(LambdaExpr::var(slot));
        }
        if alg.has_param(name) {
            return Ok(constant(Scalar::param(name)));
        }
        Err(Error::UnknownParameter(name.to_string()))
    }
}

fn constant(c: Scalar) -> LambdaExpr {
    LambdaExpr::constant(DiffPoly::constant(c))
}

fn as_scalar(e: &LambdaExpr) -> Option<Scalar> {
    if e.is_zero() {
        return Some(Scalar::zero());
    }
    if e.len() != 1 {
        return None;
    }
    let (exps, p) = e.terms().next()?;
    if !exps.is_empty() {
        return None;
    }
    p.as_constant()
}

fn parse(alg: &Algebra, formal: Option<&Formal>, s: &str) -> Result<LambdaExpr> {
    let mut p = Parser {
        alg,
        formal,
        toks: tokenize(s)?,
        pos: 0,
        end: s.len(),
    };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_poly(alg: &Algebra, s: &str) -> Result<DiffPoly> {
    let e = parse(alg, None, s)?;
    Ok(e.constant_term())
}

pub fn parse_lambda(alg: &Algebra, formal: &Formal, s: &str) -> Result<LambdaExpr> {
    parse(alg, Some(formal), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> Algebra {
        Algebra::standard(2, 1, &["c", "z"])
            .unwrap()
            .with_function("g", &["u1", "u2"])
            .unwrap()
    }

    #[test]
    fn round_trip() {
        let a = alg();
        for s in [
            "u1*u2'' - 3/2*c^(-1)*d[5]u1 + 1",
            "(1 + c)*u1'^2 - z",
            "D[g,u1,u2]*u1' + g",
            "0",
        ] {
            let p = parse_poly(&a, s).unwrap();
            let t = poly_to_text(&a, &p);
            assert_eq!(parse_poly(&a, &t).unwrap(), p, "{s} -> {t}");
        }
        let p = parse_poly(&a, "u1*u2'' - 3/2*c^(-1)*d[5]u1 + 1").unwrap();
        assert_eq!(poly_to_text(&a, &p), "1 + u1*u2'' - 3/2*c^(-1)*d[5]u1");
    }

    #[test]
    fn lambda_round_trip() {
        let a = alg();
        let f = Formal::standard(1);
        let e = parse_lambda(&a, &f, "(2*lambda + der(u1))*u1 - 2*c*lambda^3").unwrap();
        let t = lambda_to_text(&a, &f, &e);
        assert_eq!(t, "u1*u1' + 2*u1*lambda - 2*c*lambda^3");
        assert_eq!(parse_lambda(&a, &f, &t).unwrap(), e);
        let g = parse_lambda(&a, &f, "(u1 + u2)*lambda*mu").unwrap();
        assert_eq!(
            parse_lambda(&a, &f, &lambda_to_text(&a, &f, &g)).unwrap(),
            g
        );
    }

    #[test]
    fn multi_derivation_and_errors() {
        let a = Algebra::standard(1, 2, &[]).unwrap();
        let p = parse_poly(&a, "d[1,2]u + der(u, 2)").unwrap();
        assert_eq!(poly_to_text(&a, &p), "d[0,1]u + d[1,2]u");
        assert!(matches!(parse_poly(&a, "u'"), Err(Error::Parse { .. })));
        assert_eq!(
            parse_poly(&a, "q"),
            Err(Error::UnknownParameter("q".into()))
        );
        assert!(matches!(parse_poly(&a, "u/u"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_poly(&a, "u +"),
            Err(Error::Parse { offset: 3, .. })
        ));
    }
}
