//! Recursive-descent parser for the polynomial and derivation text forms.
//!
//! Grammar: expr := \['-'\] term (('+'|'-') term)*; term := factor ('*'?
//! factor)*; factor := integer | var | var '^' int | '(' expr ')' | `d<var>`
//! (derivations only). Whitespace is insignificant, coefficients reduce
//! mod p, and a trailing `(mod p)` (as produced by the printers) is
//! accepted and checked.

use std::fmt;

use crate::derivation::Derivation;
use crate::poly::{Poly, Ring};

/// Syntax or name-resolution error with the byte offset of the problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

fn err<T>(offset: usize, message: impl Into<String>) -> PResult<T> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Lexer {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Lexer {
    fn new(text: &str) -> PResult<Lexer> {
        let bytes: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            match c {
                '+' => tokens.push((start, Tok::Plus)),
                '-' => tokens.push((start, Tok::Minus)),
                '*' => tokens.push((start, Tok::Star)),
                '^' => tokens.push((start, Tok::Caret)),
                '(' => tokens.push((start, Tok::LParen)),
                ')' => tokens.push((start, Tok::RParen)),
                '0'..='9' => {
                    let mut val: i64 = 0;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        val = val
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(bytes[i] as i64 - '0' as i64))
                            .ok_or(ParseError {
                                offset: start,
                                message: "integer literal too large".into(),
                            })?;
                        i += 1;
                    }
                    tokens.push((start, Tok::Int(val)));
                    continue;
                }
                c if c.is_ascii_alphabetic() => {
                    let mut name = String::new();
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_')
                    {
                        name.push(bytes[i]);
                        i += 1;
                    }
                    tokens.push((start, Tok::Ident(name)));
                    continue;
                }
                other => return err(start, format!("unexpected character `{other}`")),
            }
            i += 1;
        }
        tokens.push((text.len(), Tok::Eof));
        Ok(Lexer { tokens, pos: 0 })
    }

    fn peek(&self) -> &(usize, Tok) {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> (usize, Tok) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().1 == tok {
            self.next();
            true
        } else {
            false
        }
    }
}

/// Strip a trailing `(mod p)` and verify the modulus against the ring.
fn strip_mod_suffix<'a>(text: &'a str, ring: &Ring) -> PResult<&'a str> {
    let trimmed = text.trim_end();
    if let Some(body) = trimmed.strip_suffix(')') {
        if let Some(idx) = body.rfind("(mod") {
            let inner = body[idx + 4..].trim();
            if let Ok(p) = inner.parse::<u64>() {
                if p != ring.p() {
                    return err(
                        idx,
                        format!("modulus {} does not match the session prime {}", p, ring.p()),
                    );
                }
                return Ok(&text[..idx]);
            }
        }
    }
    Ok(text)
}

enum Factor {
    Poly(Poly),
    Differential(usize),
}

struct Parser<'r> {
    lex: Lexer,
    ring: &'r Ring,
    allow_differentials: bool,
}

impl<'r> Parser<'r> {
    fn starts_factor(tok: &Tok) -> bool {
        matches!(tok, Tok::Int(_) | Tok::Ident(_) | Tok::LParen)
    }

    fn parse_factor(&mut self) -> PResult<Factor> {
        let (offset, tok) = self.lex.next();
        match tok {
            Tok::Int(v) => Ok(Factor::Poly(Poly::constant(self.ring, v))),
            Tok::LParen => {
                let inner = self.parse_poly_expr()?;
                let (off2, tok2) = self.lex.next();
                if tok2 != Tok::RParen {
                    return err(off2, "expected `)`");
                }
                Ok(Factor::Poly(inner))
            }
            Tok::Ident(name) => {
                if let Some(idx) = self.ring.var_index(&name) {
                    let exp = self.parse_optional_exponent()?;
                    return self.monomial_factor(idx, exp, offset);
                }
                if self.allow_differentials {
                    if let Some(rest) = name.strip_prefix('d') {
                        if let Some(idx) = self.ring.var_index(rest) {
                            return Ok(Factor::Differential(idx));
                        }
                    }
                } else if name.starts_with('d')
                    && name.len() > 1
                    && self.ring.var_index(&name[1..]).is_some()
                {
                    return err(offset, format!("differential `{name}` in polynomial context"));
                }
                err(offset, format!("unknown variable `{name}`"))
            }
            Tok::Eof => err(offset, "expected a factor, found end of input"),
            other => err(offset, format!("expected a factor, found {other:?}")),
        }
    }

    fn parse_optional_exponent(&mut self) -> PResult<i64> {
        if !self.lex.eat(&Tok::Caret) {
            return Ok(1);
        }
        let negative = self.lex.eat(&Tok::Minus);
        let (offset, tok) = self.lex.next();
        match tok {
            Tok::Int(v) => Ok(if negative { -v } else { v }),
            _ => err(offset, "expected an integer exponent after `^`"),
        }
    }

    fn monomial_factor(&mut self, var: usize, exp: i64, offset: usize) -> PResult<Factor> {
        let mut e = crate::poly::ExponentVec::zeros(self.ring.nvars());
        e.0[var] = exp;
        match Poly::monomial(self.ring, e, 1) {
            Ok(p) => Ok(Factor::Poly(p)),
            Err(e) => err(offset, e.to_string()),
        }
    }

    /// One product of factors. Returns the coefficient polynomial and the
    /// differential index if one occurred.
    fn parse_term(&mut self) -> PResult<(Poly, Option<usize>)> {
        let mut coeff = Poly::constant(self.ring, 1);
        let mut diff: Option<usize> = None;
        loop {
            let offset = self.lex.peek().0;
            match self.parse_factor()? {
                Factor::Poly(p) => {
                    coeff = coeff.mul(&p).map_err(|e| ParseError {
                        offset,
                        message: e.to_string(),
                    })?;
                }
                Factor::Differential(idx) => {
                    if diff.replace(idx).is_some() {
                        return err(offset, "more than one differential in a term");
                    }
                }
            }
            if self.lex.eat(&Tok::Star) {
                continue;
            }
            if Self::starts_factor(&self.lex.peek().1) {
                continue;
            }
            return Ok((coeff, diff));
        }
    }

    fn parse_poly_expr(&mut self) -> PResult<Poly> {
        let saved = self.allow_differentials;
        self.allow_differentials = false;
        let result = self.parse_sum(|_, term, offset| match term {
            (poly, None) => Ok(poly),
            (_, Some(_)) => err(offset, "differential in polynomial context"),
        });
        self.allow_differentials = saved;
        result
    }

    fn parse_sum<T, F>(&mut self, mut handle: F) -> PResult<T>
    where
        T: Summable,
        F: FnMut(&mut Self, (Poly, Option<usize>), usize) -> PResult<T>,
    {
        let mut negate_first = false;
        if self.lex.eat(&Tok::Minus) {
            negate_first = true;
        }
        let offset = self.lex.peek().0;
        let term = self.parse_term()?;
        let mut acc = handle(self, term, offset)?;
        if negate_first {
            acc = acc.negate();
        }
        loop {
            let (_, tok) = self.lex.peek().clone();
            let negate = match tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.lex.next();
            let offset = self.lex.peek().0;
            let term = self.parse_term()?;
            let mut piece = handle(self, term, offset)?;
            if negate {
                piece = piece.negate();
            }
            acc = acc.combine(piece);
        }
        Ok(acc)
    }

    fn expect_eof(&mut self) -> PResult<()> {
        let (offset, tok) = self.lex.peek().clone();
        if tok != Tok::Eof {
            return err(offset, format!("unexpected trailing input {tok:?}"));
        }
        Ok(())
    }
}

trait Summable {
    fn negate(self) -> Self;
    fn combine(self, other: Self) -> Self;
}

impl Summable for Poly {
    fn negate(self) -> Self {
        self.neg()
    }
    fn combine(self, other: Self) -> Self {
        self.add(&other)
    }
}

impl Summable for Derivation {
    fn negate(self) -> Self {
        self.scale_const(-1)
    }
    fn combine(self, other: Self) -> Self {
        self.add(&other)
    }
}

/// Parse a polynomial in the canonical text form.
pub fn parse_poly(text: &str, ring: &Ring) -> PResult<Poly> {
    let body = strip_mod_suffix(text, ring)?;
    let mut parser = Parser {
        lex: Lexer::new(body)?,
        ring,
        allow_differentials: false,
    };
    let poly = parser.parse_poly_expr()?;
    parser.expect_eof()?;
    Ok(poly)
}

/// Parse a derivation as a sum of `<poly>*d<var>` terms.
pub fn parse_derivation(text: &str, ring: &Ring) -> PResult<Derivation> {
    let body = strip_mod_suffix(text, ring)?;
    let mut parser = Parser {
        lex: Lexer::new(body)?,
        ring,
        allow_differentials: true,
    };
    let zero = Derivation::zero(ring);
    let d = parser.parse_sum(|p, (coeff, diff), offset| match diff {
        Some(idx) => {
            let mut coeffs = vec![Poly::zero(p.ring); p.ring.nvars()];
            coeffs[idx] = coeff;
            Ok(Derivation::new(p.ring, coeffs))
        }
        None => err(offset, "derivation term lacks a differential d<var>"),
    })?;
    parser.expect_eof()?;
    Ok(zero.add(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    fn ring2(p: u64) -> Ring {
        Ring::new(p, &["x", "y"])
    }

    #[test]
    fn poly_forms() {
        let r = ring2(5);
        let f = parse_poly("x^2*y + 4*y^3", &r).unwrap();
        assert_eq!(f.to_string_bare(), "x^2*y + 4*y^3");
        // star optional, whitespace free
        let g = parse_poly("x^2y+4y^3", &r).unwrap();
        assert_eq!(f, g);
        // modulus suffix accepted and checked
        let h = parse_poly("x^2*y + 4*y^3 (mod 5)", &r).unwrap();
        assert_eq!(f, h);
        assert!(parse_poly("x (mod 7)", &r).is_err());
        // coefficients reduce mod p
        let k = parse_poly("6*x - 1", &r).unwrap();
        assert_eq!(k.to_string_bare(), "x + 4");
    }

    #[test]
    fn error_offsets() {
        let r = ring2(5);
        let e = parse_poly("x +", &r).unwrap_err();
        assert_eq!(e.offset, 3);
        let e = parse_poly("x + z", &r).unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse_poly("x + dy", &r).unwrap_err();
        assert!(e.message.contains("polynomial context"));
    }

    #[test]
    fn derivation_forms() {
        let r = ring2(3);
        let d = parse_derivation("2*x*dx + y*dy", &r).unwrap();
        assert_eq!(d, Derivation::diagonal(&r, &[2, 1]));

        let d = parse_derivation("x^2*dx + y^2*dy", &r).unwrap();
        assert_eq!(d.coeff(0).to_string_bare(), "x^2");

        let d = parse_derivation("(x + y)*dx", &r).unwrap();
        assert_eq!(d.coeff(0).to_string_bare(), "x + y");

        // misplaced or missing differentials
        assert!(parse_derivation("x + y", &r).is_err());
        assert!(parse_derivation("dx*dy", &r).is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        let r = ring2(5);
        let cases = [
            "x^2*y + 4*y^3",
            "2*x + 1",
            "x^3 + x^2*y + x*y^2 + y^3",
        ];
        for text in cases {
            let f = parse_poly(text, &r).unwrap();
            let printed = format!("{f}");
            assert_eq!(parse_poly(&printed, &r).unwrap(), f);
        }
        let deriv = [
            "x*dx + 2*y*dy",
            "(x + y)*dx + dy",
            "x^2*dx + y^2*dy",
        ];
        for text in deriv {
            let d = parse_derivation(text, &r).unwrap();
            let printed = format!("{d}");
            assert_eq!(parse_derivation(&printed, &r).unwrap(), d);
        }
    }

    #[test]
    fn laurent_exponents() {
        let r = Ring::with_laurent(5, &["u", "v"], "u");
        let f = parse_poly("u^-1 + u", &r).unwrap();
        assert_eq!(f.var_valuation(0), Some(-1));
        let plain = ring2(5);
        assert!(parse_poly("x^-1", &plain).is_err());
    }
}
