//! Tokens, coefficient expressions and generator sums shared by the scalar
//! literal parser and the model description language.
//!
//! Coefficients are polynomials in named real parameters over `Q(i)`. A
//! coefficient such as `(alpha - i*beta)/(2i)` is normalised on parse into
//! `-1/2*beta + (-1/2)i*alpha`; division is only allowed by constants.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{GaussianRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (column {})", .offset + 1)]
pub struct ParseError {
    pub message: String,
    /// Character offset into the parsed text.
    pub offset: usize,
}

impl ParseError {
    pub(crate) fn new(message: impl Into<String>, offset: usize) -> Self {
        Self { message: message.into(), offset }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Int(BigInt),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Slash,
    Star,
    Caret,
    Plus,
    Minus,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::LBracket => f.write_str("["),
            Tok::RBracket => f.write_str("]"),
            Tok::LBrace => f.write_str("{"),
            Tok::RBrace => f.write_str("}"),
            Tok::Comma => f.write_str(","),
            Tok::Slash => f.write_str("/"),
            Tok::Star => f.write_str("*"),
            Tok::Caret => f.write_str("^"),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Eq => f.write_str("="),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Int(digits.parse().expect("ascii digits")), offset: start });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), offset: start });
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '/' => Tok::Slash,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '=' => Tok::Eq,
            other => return Err(ParseError::new(format!("unexpected character '{other}'"), start)),
        };
        out.push(Token { tok, offset: start });
        i += 1;
    }
    Ok(out)
}

/// Polynomial in named parameters with `Q(i)` coefficients. Keys are sorted
/// lists of parameter names (with repetition for powers).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Vec<String>, GaussianRational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn param(name: &str) -> Self {
        let mut p = Self::zero();
        p.terms.insert(vec![name.to_string()], GaussianRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn params(&self) -> impl Iterator<Item = &String> {
        self.terms.keys().flatten()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let entry = out.terms.entry(k.clone()).or_default();
            *entry += v;
            if entry.is_zero() {
                out.terms.remove(k);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let mut key: Vec<String> = ka.iter().chain(kb).cloned().collect();
                key.sort();
                let mut term = Self::zero();
                term.terms.insert(key, va * vb);
                out = out.add(&term);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.mul(&Self::constant(c.clone()))
    }

    /// Substitutes parameter values. Unknown names are reported by name.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Rational>) -> Result<GaussianRational, String> {
        let mut total = GaussianRational::zero();
        for (mono, c) in &self.terms {
            let mut v = c.clone();
            for name in mono {
                let value = lookup(name).ok_or_else(|| name.clone())?;
                v = v * GaussianRational::real(value);
            }
            total += &v;
        }
        Ok(total)
    }

    fn single_term_text(mono: &[String], c: &GaussianRational) -> String {
        if mono.is_empty() {
            return c.to_string();
        }
        let names = mono.join("*");
        if c.is_one() {
            names
        } else if (-c).is_one() {
            format!("-{names}")
        } else {
            format!("{c}*{names}")
        }
    }

    /// True if rendering needs parentheses when used as a factor.
    pub(crate) fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }

    /// True when the canonical rendering starts with a minus sign.
    pub(crate) fn has_leading_minus(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().is_some_and(|c| c.has_leading_minus())
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // constants last reads more naturally for "alpha + 1"; keep key order for determinism
        for (idx, (mono, c)) in self.terms.iter().enumerate() {
            if idx == 0 {
                f.write_str(&Self::single_term_text(mono, c))?;
            } else if c.has_leading_minus() {
                write!(f, " - {}", Self::single_term_text(mono, &-c))?;
            } else {
                write!(f, " + {}", Self::single_term_text(mono, c))?;
            }
        }
        Ok(())
    }
}

/// A generator of the exterior algebra as it appears in source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Gen {
    /// `phiK` (holomorphic) or `cphiK` (conjugate), 1-based.
    Complex { conj: bool, index: usize },
    /// `eK`, 1-based.
    Real { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GenSpace {
    Complex(usize),
    Real(usize),
}

impl GenSpace {
    fn describe(self) -> &'static str {
        match self {
            GenSpace::Complex(_) => "phiK/cphiK",
            GenSpace::Real(_) => "eK",
        }
    }
}

/// Recognises generator identifiers: `phi3`, `cphi3`, `e3`.
pub(crate) fn classify_generator(ident: &str) -> Option<Gen> {
    let digits_after = |prefix: &str| -> Option<usize> {
        let rest = ident.strip_prefix(prefix)?;
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) && !rest.starts_with('0') {
            rest.parse().ok()
        } else {
            None
        }
    };
    if let Some(k) = digits_after("cphi") {
        return Some(Gen::Complex { conj: true, index: k });
    }
    if let Some(k) = digits_after("phi") {
        return Some(Gen::Complex { conj: false, index: k });
    }
    digits_after("e").map(|k| Gen::Real { index: k })
}

/// One `COEFF? GEN(^GEN)*` term of a sum.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GenTerm {
    pub coeff: ParamPoly,
    pub gens: Vec<Gen>,
    pub offset: usize,
}

pub(crate) struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    is_param: &'a dyn Fn(&str) -> bool,
}

impl<'a> Parser<'a> {
    pub fn new(tokens: Vec<Token>, text_len: usize, is_param: &'a dyn Fn(&str) -> bool) -> Self {
        Self { tokens, pos: 0, end: text_len, is_param }
    }

    pub fn from_text(text: &str, is_param: &'a dyn Fn(&str) -> bool) -> Result<Self, ParseError> {
        Ok(Self::new(tokenize(text)?, text.chars().count(), is_param))
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    pub fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    pub fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(ParseError::new(format!("expected '{tok}', found '{t}'"), self.offset())),
            None => Err(ParseError::new(format!("expected '{tok}', found end of input"), self.offset())),
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::new(format!("unexpected '{t}'"), self.offset())),
        }
    }

    pub fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token { tok: Tok::Ident(s), .. }) => Ok((s, offset)),
            Some(t) => Err(ParseError::new(format!("expected a name, found '{}'", t.tok), offset)),
            None => Err(ParseError::new("expected a name, found end of input", offset)),
        }
    }

    pub fn integer(&mut self) -> Result<(BigInt, usize), ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token { tok: Tok::Int(n), .. }) => Ok((n, offset)),
            Some(t) => Err(ParseError::new(format!("expected an integer, found '{}'", t.tok), offset)),
            None => Err(ParseError::new("expected an integer, found end of input", offset)),
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(Tok::Int(_)) | Some(Tok::LParen) => true,
            Some(Tok::Ident(name)) => !self.ident_is_generator(name),
            _ => false,
        }
    }

    fn ident_is_generator(&self, name: &str) -> bool {
        if classify_generator(name).is_some() {
            return true;
        }
        // compact monomial syntax phi{12,1}
        name == "phi" && matches!(self.tokens.get(self.pos + 1).map(|t| &t.tok), Some(Tok::LBrace))
    }

    /// `expr := ('+'|'-')? term (('+'|'-') term)*`
    pub fn expr(&mut self) -> Result<ParamPoly, ParseError> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.bump();
            }
            Some(Tok::Plus) => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// `term := factor (('*'|'/')? factor)*`; stops before generators.
    fn term(&mut self) -> Result<ParamPoly, ParseError> {
        let mut acc = self.factor()?;
        self.factor_tail(&mut acc)?;
        Ok(acc)
    }

    fn factor_tail(&mut self, acc: &mut ParamPoly) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    if !self.starts_factor() {
                        // `2*e1` style: the star separates the coefficient from a generator
                        return Ok(());
                    }
                    *acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let offset = self.offset();
                    let divisor = self.factor()?;
                    let c = divisor
                        .as_constant()
                        .ok_or_else(|| ParseError::new("division by a parameter expression is not supported", offset))?;
                    let inv = c.inv().map_err(|_| ParseError::new("division by zero", offset))?;
                    *acc = acc.scale(&inv);
                }
                _ if self.starts_factor() => {
                    *acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(()),
            }
        }
    }

    fn factor(&mut self) -> Result<ParamPoly, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token { tok: Tok::Int(n), .. }) => {
                Ok(ParamPoly::constant(GaussianRational::real(Rational::from_integer(n))))
            }
            Some(Token { tok: Tok::LParen, .. }) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Token { tok: Tok::Ident(name), .. }) => {
                if name == "i" {
                    Ok(ParamPoly::constant(GaussianRational::i()))
                } else if (self.is_param)(&name) {
                    Ok(ParamPoly::param(&name))
                } else {
                    Err(ParseError::new(format!("unknown name '{name}'"), offset))
                }
            }
            Some(t) => Err(ParseError::new(format!("expected a coefficient, found '{}'", t.tok), offset)),
            None => Err(ParseError::new("expected a coefficient, found end of input", offset)),
        }
    }

    fn generator(&mut self, space: GenSpace) -> Result<Vec<Gen>, ParseError> {
        let (name, offset) = self.ident()?;
        if name == "phi" && matches!(self.peek(), Some(Tok::LBrace)) {
            return self.compact_monomial(space, offset);
        }
        let gen = classify_generator(&name)
            .ok_or_else(|| ParseError::new(format!("expected a generator ({}), found '{name}'", space.describe()), offset))?;
        check_generator(gen, space, offset)?;
        Ok(vec![gen])
    }

    /// `phi{12,1}`: holomorphic digits, comma, conjugate digits.
    fn compact_monomial(&mut self, space: GenSpace, offset: usize) -> Result<Vec<Gen>, ParseError> {
        if let GenSpace::Real(_) = space {
            return Err(ParseError::new("phi{..} monomials are not allowed here", offset));
        }
        self.expect(Tok::LBrace)?;
        let digit_block = |p: &mut Self, conj: bool| -> Result<Vec<Gen>, ParseError> {
            let mut gens = Vec::new();
            if let Some(Tok::Int(_)) = p.peek() {
                let off = p.offset();
                let (n, _) = p.integer()?;
                for ch in n.to_string().chars() {
                    let index = ch.to_digit(10).expect("digit") as usize;
                    let gen = Gen::Complex { conj, index };
                    check_generator(gen, space, off)?;
                    gens.push(gen);
                }
            }
            Ok(gens)
        };
        let mut gens = digit_block(self, false)?;
        self.expect(Tok::Comma)?;
        gens.extend(digit_block(self, true)?);
        self.expect(Tok::RBrace)?;
        Ok(gens)
    }

    fn generator_product(&mut self, space: GenSpace) -> Result<Vec<Gen>, ParseError> {
        let mut gens = self.generator(space)?;
        while let Some(Tok::Caret) = self.peek() {
            self.bump();
            gens.extend(self.generator(space)?);
        }
        Ok(gens)
    }

    fn gen_term(&mut self, space: GenSpace) -> Result<GenTerm, ParseError> {
        let offset = self.offset();
        let coeff = if self.starts_factor() {
            let mut acc = self.factor()?;
            self.factor_tail(&mut acc)?;
            acc
        } else {
            ParamPoly::constant(GaussianRational::one())
        };
        let gens = match self.peek() {
            Some(Tok::Ident(name)) if self.ident_is_generator(&name.clone()) => self.generator_product(space)?,
            _ => Vec::new(),
        };
        Ok(GenTerm { coeff, gens, offset })
    }

    /// `sum := ('+'|'-')? gterm (('+'|'-') gterm)*` where a term is an optional
    /// coefficient followed by a `^`-separated product of generators. A term
    /// without generators is a constant (degree zero) term.
    pub fn generator_sum(&mut self, space: GenSpace) -> Result<Vec<GenTerm>, ParseError> {
        let mut terms = Vec::new();
        let mut negate = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let mut t = self.gen_term(space)?;
            if negate {
                t.coeff = t.coeff.neg();
            }
            terms.push(t);
            negate = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => return Ok(terms),
            };
            self.bump();
        }
    }
}

pub(crate) fn check_generator(gen: Gen, space: GenSpace, offset: usize) -> Result<(), ParseError> {
    match (gen, space) {
        (Gen::Complex { index, .. }, GenSpace::Complex(n)) | (Gen::Real { index }, GenSpace::Real(n)) => {
            if index == 0 || index > n {
                Err(ParseError::new(format!("unknown generator: index {index} outside 1..{n}"), offset))
            } else {
                Ok(())
            }
        }
        (Gen::Complex { .. }, GenSpace::Real(_)) => {
            Err(ParseError::new("expected a real coframe generator eK, found phi", offset))
        }
        (Gen::Real { .. }, GenSpace::Complex(_)) => {
            Err(ParseError::new("expected phiK or cphiK, found a real generator", offset))
        }
    }
}

/// Parses a parameter-free coefficient, consuming the whole text.
pub(crate) fn parse_constant(text: &str) -> Result<GaussianRational, ParseError> {
    let no_params = |_: &str| false;
    let mut p = Parser::from_text(text, &no_params)?;
    if p.at_end() {
        return Err(ParseError::new("empty coefficient", 0));
    }
    let poly = p.expr()?;
    p.expect_end()?;
    Ok(poly.as_constant().expect("no parameters were accepted"))
}

/// Renders a generator sum term coefficient for display in front of generators.
pub(crate) fn coefficient_prefix(coeff: &ParamPoly) -> String {
    if coeff.is_compound() {
        format!("({coeff}) ")
    } else if coeff.as_constant().is_some_and(|c| c.is_one()) {
        String::new()
    } else {
        format!("{coeff} ")
    }
}
