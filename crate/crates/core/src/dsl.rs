//! The line-oriented model description language.
//!
//! ```text
//! algebra kodaira_secondary
//! complex_dim 2
//! d phi1 = -1/2 phi1^phi2 + 1/2 phi1^cphi2
//! d phi2 = (1/2)i phi1^cphi1
//! ```
//!
//! Real-mode documents declare `real_dim`, bracket lines `[e1,e2] = -e3`,
//! `J e1 = e2` (frame) or `J* e1 = -e2` (coframe) lines and optional coframe
//! lines `phi1 = e1 + i e2`. Parameters are declared with
//! `param alpha = 1` (append `nonzero` to forbid zero) before use.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::exterior::{merge_sign, Form, MultiIndex, RealForm, RealIndex};
use crate::model::{
    AlmostComplexStructure, Coframe10, ComplexStructureEquations, Model, ModelError, RealData, RealLieAlgebra,
};
use crate::scalar::{format_rational, GaussianRational, Rational};
use crate::syntax::{
    check_generator, classify_generator, coefficient_prefix, Gen, GenSpace, GenTerm, ParamPoly, ParseError, Parser, Tok,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

/// A message tied to a 1-based line and column of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub default: Rational,
    pub nonzero: bool,
}

/// `sum_k c_k e_k` (or `e^k`), keyed by 1-based index.
pub type LinearSum = BTreeMap<usize, ParamPoly>;

/// A form over `phi, cphi` with parameter coefficients.
pub type FormSum = BTreeMap<MultiIndex, ParamPoly>;

/// Parsed model description, normalised so that rendering and parsing again
/// gives back the same document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    pub name: String,
    pub mode: Mode,
    /// `real_dim` in real mode, `complex_dim` in complex mode.
    pub dim: usize,
    pub params: Vec<ParamDecl>,
    /// `[e_i, e_j]` with `i < j`.
    pub brackets: BTreeMap<(usize, usize), LinearSum>,
    /// `J e_j` lines.
    pub j_frame: BTreeMap<usize, LinearSum>,
    /// `J* e^k` lines.
    pub j_coframe: BTreeMap<usize, LinearSum>,
    /// `phi^a` in terms of `e^j`.
    pub coframe: BTreeMap<usize, LinearSum>,
    /// `d phi^a`.
    pub differentials: BTreeMap<usize, FormSum>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{}", join_diagnostics(.0))]
    Parse(Vec<Diagnostic>),
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("parameter {name} must be nonzero")]
    Constraint { name: String },
    #[error("{0} must be real, got {1}")]
    NotReal(String, String),
    #[error("real model needs J lines, J* lines or a coframe")]
    MissingStructure,
    #[error("both J and J* lines given")]
    ConflictingStructure,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Representative(String),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n")
}

const RESERVED: [&str; 8] = ["i", "d", "J", "param", "algebra", "real_dim", "complex_dim", "nonzero"];

fn error_at(line: usize, e: &ParseError) -> Diagnostic {
    Diagnostic { severity: Severity::Error, line, column: e.offset + 1, message: e.message.clone() }
}

/// Reduces a generator word to a canonical monomial with sign; `None` when a
/// generator repeats.
fn complex_monomial(n: usize, gens: &[Gen]) -> Option<(MultiIndex, bool)> {
    let mut acc = 0u64;
    let mut negative = false;
    for g in gens {
        let bit = match *g {
            Gen::Complex { conj: false, index } => 1u64 << (index - 1),
            Gen::Complex { conj: true, index } => 1u64 << (n + index - 1),
            Gen::Real { .. } => unreachable!("checked by the parser"),
        };
        negative ^= merge_sign(acc, bit)?;
        acc |= bit;
    }
    Some((MultiIndex::from_combined(acc, n), negative))
}

fn real_monomial(gens: &[Gen]) -> Option<(Vec<usize>, bool)> {
    let mut acc = 0u64;
    let mut negative = false;
    for g in gens {
        let Gen::Real { index } = *g else { unreachable!("checked by the parser") };
        let bit = 1u64 << (index - 1);
        negative ^= merge_sign(acc, bit)?;
        acc |= bit;
    }
    Some(((0..64).filter(|b| acc & (1 << b) != 0).map(|b| b + 1).collect(), negative))
}

struct LineParser<'a> {
    line: usize,
    warnings: &'a mut Vec<Diagnostic>,
}

impl LineParser<'_> {
    fn warn(&mut self, offset: usize, message: String) {
        self.warnings.push(Diagnostic { severity: Severity::Warning, line: self.line, column: offset + 1, message });
    }

    /// Sum whose terms are single generators `e_k` (no constants).
    fn linear_sum(&mut self, terms: Vec<GenTerm>) -> Result<LinearSum, ParseError> {
        let mut out = LinearSum::new();
        for t in terms {
            match t.gens.as_slice() {
                [Gen::Real { index }] => {
                    let entry = out.entry(*index).or_default();
                    *entry = entry.add(&t.coeff);
                }
                [] if t.coeff.is_zero() => {}
                [] => return Err(ParseError::new("constant term in a sum of generators", t.offset)),
                _ => return Err(ParseError::new("expected a single generator per term", t.offset)),
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    fn form_sum(&mut self, n: usize, terms: Vec<GenTerm>, degree: Option<usize>) -> Result<FormSum, ParseError> {
        let mut out = FormSum::new();
        for t in terms {
            if t.gens.is_empty() {
                if t.coeff.is_zero() {
                    continue;
                }
                if degree.is_some_and(|d| d != 0) {
                    return Err(ParseError::new("constant term in a form of positive degree", t.offset));
                }
            }
            if let Some(d) = degree {
                if t.gens.len() != d {
                    return Err(ParseError::new(format!("expected a {d}-form, term has degree {}", t.gens.len()), t.offset));
                }
            }
            match complex_monomial(n, &t.gens) {
                Some((m, negative)) => {
                    let c = if negative { t.coeff.neg() } else { t.coeff };
                    let entry = out.entry(m).or_default();
                    *entry = entry.add(&c);
                }
                None => self.warn(t.offset, "repeated generator, term is zero".to_string()),
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

fn real_generator(p: &mut Parser, dim: usize) -> Result<usize, ParseError> {
    let (name, offset) = p.ident()?;
    match classify_generator(&name) {
        Some(g @ Gen::Real { index }) => {
            check_generator(g, GenSpace::Real(dim), offset)?;
            Ok(index)
        }
        _ => Err(ParseError::new(format!("expected a real generator eK, found '{name}'"), offset)),
    }
}

fn holomorphic_generator(p: &mut Parser, n: usize) -> Result<usize, ParseError> {
    let (name, offset) = p.ident()?;
    match classify_generator(&name) {
        Some(g @ Gen::Complex { conj: false, index }) => {
            check_generator(g, GenSpace::Complex(n), offset)?;
            Ok(index)
        }
        _ => Err(ParseError::new(format!("expected phiK, found '{name}'"), offset)),
    }
}

fn rational_literal(p: &mut Parser) -> Result<Rational, ParseError> {
    let offset = p.offset();
    let v = p.expr()?.as_constant().ok_or_else(|| ParseError::new("expected a number", offset))?;
    if !v.is_real() {
        return Err(ParseError::new("parameter values must be real", offset));
    }
    Ok(v.re().clone())
}

#[derive(Default)]
struct Builder {
    name: Option<String>,
    mode: Option<(Mode, usize)>,
    params: Vec<ParamDecl>,
    brackets: BTreeMap<(usize, usize), LinearSum>,
    j_frame: BTreeMap<usize, LinearSum>,
    j_coframe: BTreeMap<usize, LinearSum>,
    coframe: BTreeMap<usize, LinearSum>,
    differentials: BTreeMap<usize, FormSum>,
}

impl Builder {
    fn is_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| p.name == name)
    }

    fn real_dim(&self, offset: usize) -> Result<usize, ParseError> {
        match self.mode {
            Some((Mode::Real, d)) => Ok(d),
            Some((Mode::Complex, _)) => Err(ParseError::new("this line needs real_dim, not complex_dim", offset)),
            None => Err(ParseError::new("declare real_dim before this line", offset)),
        }
    }

    fn complex_dim(&self, offset: usize) -> Result<usize, ParseError> {
        match self.mode {
            Some((Mode::Complex, n)) => Ok(n),
            Some((Mode::Real, _)) => Err(ParseError::new("d lines need complex_dim, not real_dim", offset)),
            None => Err(ParseError::new("declare complex_dim before this line", offset)),
        }
    }

    fn statement(&mut self, text: &str, lp: &mut LineParser) -> Result<(), ParseError> {
        // `nonzero` would otherwise be read as a factor of the default value
        let trimmed = text.trim_end();
        let (text, nonzero) = match trimmed.strip_suffix("nonzero") {
            Some(rest) if text.trim_start().starts_with("param ") && rest.ends_with(char::is_whitespace) => (rest, true),
            _ => (text, false),
        };
        let names: Vec<String> = self.params.iter().map(|p| p.name.clone()).collect();
        let is_param = move |s: &str| names.iter().any(|n| n == s);
        let mut p = Parser::from_text(text, &is_param)?;
        let start = p.offset();
        match p.peek().cloned() {
            None => return Ok(()),
            Some(Tok::LBracket) => {
                p.bump();
                let dim = self.real_dim(start)?;
                let i = real_generator(&mut p, dim)?;
                p.expect(Tok::Comma)?;
                let j = real_generator(&mut p, dim)?;
                p.expect(Tok::RBracket)?;
                p.expect(Tok::Eq)?;
                let terms = p.generator_sum(GenSpace::Real(dim))?;
                p.expect_end()?;
                let mut sum = lp.linear_sum(terms)?;
                if i == j {
                    return Err(ParseError::new(format!("[e{i},e{i}] must be zero"), start));
                }
                let key = if i < j {
                    (i, j)
                } else {
                    sum.values_mut().for_each(|c| *c = c.neg());
                    (j, i)
                };
                if self.brackets.insert(key, sum).is_some() {
                    return Err(ParseError::new(format!("duplicate bracket [e{},e{}]", key.0, key.1), start));
                }
            }
            Some(Tok::Ident(word)) => {
                p.bump();
                match word.as_str() {
                    "algebra" => {
                        let (name, offset) = p.ident()?;
                        p.expect_end()?;
                        if self.name.replace(name).is_some() {
                            return Err(ParseError::new("duplicate algebra line", offset));
                        }
                    }
                    "real_dim" | "complex_dim" => {
                        let (value, offset) = p.integer()?;
                        p.expect_end()?;
                        let d: usize = value.try_into().ok().filter(|d| *d > 0).ok_or_else(|| {
                            ParseError::new("dimension must be a positive integer", offset)
                        })?;
                        let mode = if word == "real_dim" { Mode::Real } else { Mode::Complex };
                        if mode == Mode::Real && d % 2 == 1 {
                            return Err(ParseError::new("real dimension must be even", offset));
                        }
                        let limit = if mode == Mode::Real { 16 } else { 8 };
                        if d > limit {
                            return Err(ParseError::new(format!("dimension above {limit} is not supported"), offset));
                        }
                        if self.mode.replace((mode, d)).is_some() {
                            return Err(ParseError::new("dimension declared twice", start));
                        }
                    }
                    "param" => {
                        let (name, offset) = p.ident()?;
                        if RESERVED.contains(&name.as_str()) || classify_generator(&name).is_some() || name == "phi" {
                            return Err(ParseError::new(format!("'{name}' cannot be used as a parameter name"), offset));
                        }
                        if self.is_param(&name) {
                            return Err(ParseError::new(format!("parameter {name} declared twice"), offset));
                        }
                        p.expect(Tok::Eq)?;
                        let default = rational_literal(&mut p)?;
                        p.expect_end()?;
                        if nonzero && default.is_zero() {
                            return Err(ParseError::new(format!("default of {name} violates nonzero"), offset));
                        }
                        self.params.push(ParamDecl { name, default, nonzero });
                    }
                    "J" => {
                        let dim = self.real_dim(start)?;
                        let coframe_side = matches!(p.peek(), Some(Tok::Star));
                        if coframe_side {
                            p.bump();
                        }
                        let k = real_generator(&mut p, dim)?;
                        p.expect(Tok::Eq)?;
                        let terms = p.generator_sum(GenSpace::Real(dim))?;
                        p.expect_end()?;
                        let sum = lp.linear_sum(terms)?;
                        let table = if coframe_side { &mut self.j_coframe } else { &mut self.j_frame };
                        if table.insert(k, sum).is_some() {
                            return Err(ParseError::new(format!("duplicate J line for e{k}"), start));
                        }
                    }
                    "d" => {
                        let n = self.complex_dim(start)?;
                        let a = holomorphic_generator(&mut p, n)?;
                        p.expect(Tok::Eq)?;
                        let terms = p.generator_sum(GenSpace::Complex(n))?;
                        p.expect_end()?;
                        let sum = lp.form_sum(n, terms, Some(2))?;
                        if self.differentials.insert(a, sum).is_some() {
                            return Err(ParseError::new(format!("duplicate d-declaration for phi{a}"), start));
                        }
                    }
                    other => {
                        let Some(Gen::Complex { conj: false, index }) = classify_generator(other) else {
                            return Err(ParseError::new(format!("unknown statement '{other}'"), start));
                        };
                        let dim = self.real_dim(start)?;
                        check_generator(Gen::Complex { conj: false, index }, GenSpace::Complex(dim / 2), start)?;
                        p.expect(Tok::Eq)?;
                        let terms = p.generator_sum(GenSpace::Real(dim))?;
                        p.expect_end()?;
                        let sum = lp.linear_sum(terms)?;
                        if self.coframe.insert(index, sum).is_some() {
                            return Err(ParseError::new(format!("duplicate coframe line for phi{index}"), start));
                        }
                    }
                }
            }
            Some(t) => return Err(ParseError::new(format!("unexpected '{t}' at start of line"), start)),
        }
        Ok(())
    }
}

/// Parses a document. On success returns it with any warnings.
pub fn parse(text: &str) -> Result<(ModelDocument, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut builder = Builder::default();
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut lp = LineParser { line, warnings: &mut warnings };
        if let Err(e) = builder.statement(content, &mut lp) {
            errors.push(error_at(line, &e));
        }
    }
    let (mode, dim) = match builder.mode {
        Some(m) => m,
        None => {
            errors.push(Diagnostic {
                severity: Severity::Error,
                line: 1,
                column: 1,
                message: "missing real_dim or complex_dim".into(),
            });
            (Mode::Complex, 0)
        }
    };
    if mode == Mode::Real && dim > 0 {
        let n = dim / 2;
        let missing: Vec<usize> = (1..=n).filter(|a| !builder.coframe.contains_key(a)).collect();
        if !builder.coframe.is_empty() && !missing.is_empty() {
            errors.push(Diagnostic {
                severity: Severity::Error,
                line: 1,
                column: 1,
                message: format!("coframe lines missing for phi{}", missing[0]),
            });
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let doc = ModelDocument {
        name: builder.name.unwrap_or_else(|| "model".to_string()),
        mode,
        dim,
        params: builder.params,
        brackets: builder.brackets,
        j_frame: builder.j_frame,
        j_coframe: builder.j_coframe,
        coframe: builder.coframe,
        differentials: builder.differentials,
    };
    Ok((doc, warnings))
}

fn render_terms<'a, K: 'a>(terms: impl Iterator<Item = (&'a K, &'a ParamPoly)>, gens: impl Fn(&K) -> String) -> String {
    let mut out = String::new();
    for (idx, (k, c)) in terms.enumerate() {
        let negative = c.has_leading_minus();
        let shown = if negative { c.neg() } else { c.clone() };
        match (idx, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let g = gens(k);
        if g.is_empty() {
            out.push_str(&shown.to_string());
        } else {
            out.push_str(&coefficient_prefix(&shown));
            out.push_str(&g);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn render_linear(sum: &LinearSum) -> String {
    render_terms(sum.iter(), |k| format!("e{k}"))
}

pub fn render_form_sum(sum: &FormSum) -> String {
    render_terms(sum.iter(), |m| if *m == MultiIndex::ONE { String::new() } else { m.to_source() })
}

/// Canonical text of a document.
pub fn render(doc: &ModelDocument) -> String {
    let mut out = format!("algebra {}\n", doc.name);
    match doc.mode {
        Mode::Real => out.push_str(&format!("real_dim {}\n", doc.dim)),
        Mode::Complex => out.push_str(&format!("complex_dim {}\n", doc.dim)),
    }
    for p in &doc.params {
        let flag = if p.nonzero { " nonzero" } else { "" };
        out.push_str(&format!("param {} = {}{flag}\n", p.name, format_rational(&p.default)));
    }
    for ((i, j), sum) in &doc.brackets {
        out.push_str(&format!("[e{i},e{j}] = {}\n", render_linear(sum)));
    }
    for (k, sum) in &doc.j_frame {
        out.push_str(&format!("J e{k} = {}\n", render_linear(sum)));
    }
    for (k, sum) in &doc.j_coframe {
        out.push_str(&format!("J* e{k} = {}\n", render_linear(sum)));
    }
    for (a, sum) in &doc.coframe {
        out.push_str(&format!("phi{a} = {}\n", render_linear(sum)));
    }
    for (a, sum) in &doc.differentials {
        out.push_str(&format!("d phi{a} = {}\n", render_form_sum(sum)));
    }
    out
}

impl fmt::Display for ModelDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl ModelDocument {
    /// Complex dimension `n`.
    pub fn complex_dim(&self) -> usize {
        match self.mode {
            Mode::Real => self.dim / 2,
            Mode::Complex => self.dim,
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    /// Defaults merged with `overrides`, checking names and constraints.
    pub fn resolve_params(&self, overrides: &BTreeMap<String, Rational>) -> Result<BTreeMap<String, Rational>, DslError> {
        let mut values = BTreeMap::new();
        for name in overrides.keys() {
            if !self.params.iter().any(|p| &p.name == name) {
                return Err(DslError::UnknownParameter(name.clone()));
            }
        }
        for p in &self.params {
            let v = overrides.get(&p.name).cloned().unwrap_or_else(|| p.default.clone());
            if p.nonzero && v.is_zero() {
                return Err(DslError::Constraint { name: p.name.clone() });
            }
            values.insert(p.name.clone(), v);
        }
        Ok(values)
    }

    /// Substitutes parameters and builds the model.
    pub fn instantiate(&self, overrides: &BTreeMap<String, Rational>) -> Result<Model, DslError> {
        let values = self.resolve_params(overrides)?;
        let eval = |c: &ParamPoly| -> GaussianRational {
            c.eval(&|name| values.get(name).cloned()).expect("parameters were declared before use")
        };
        let real_eval = |c: &ParamPoly, what: &str| -> Result<Rational, DslError> {
            let v = eval(c);
            if v.is_real() {
                Ok(v.re().clone())
            } else {
                Err(DslError::NotReal(what.to_string(), v.to_string()))
            }
        };
        match self.mode {
            Mode::Complex => {
                let n = self.dim;
                let d_phi = (1..=n)
                    .map(|a| {
                        let mut f = Form::zero(n);
                        if let Some(sum) = self.differentials.get(&a) {
                            for (m, c) in sum {
                                f.add_term(*m, &eval(c));
                            }
                        }
                        f
                    })
                    .collect();
                let eqs = ComplexStructureEquations::new(n, d_phi)?;
                Ok(Model::from_equations(&self.name, values, eqs))
            }
            Mode::Real => {
                let dim = self.dim;
                let real_vec = |sum: &LinearSum, what: &str| -> Result<Vec<Rational>, DslError> {
                    let mut v = vec![Rational::zero(); dim];
                    for (k, c) in sum {
                        v[k - 1] = real_eval(c, what)?;
                    }
                    Ok(v)
                };
                let mut algebra = RealLieAlgebra::abelian(dim);
                for ((i, j), sum) in &self.brackets {
                    algebra.set_bracket(*i, *j, &real_vec(sum, &format!("[e{i},e{j}]"))?);
                }
                let coframe = if self.coframe.is_empty() {
                    None
                } else {
                    let rows = self
                        .coframe
                        .values()
                        .map(|sum| {
                            let mut v = vec![GaussianRational::zero(); dim];
                            for (k, c) in sum {
                                v[k - 1] = eval(c);
                            }
                            v
                        })
                        .collect();
                    Some(Coframe10::new(rows)?)
                };
                let lines = |table: &BTreeMap<usize, LinearSum>, star: &str| -> Result<Vec<(usize, Vec<Rational>)>, DslError> {
                    table.iter().map(|(k, sum)| Ok((*k, real_vec(sum, &format!("J{star} e{k}"))?))).collect()
                };
                let structure = match (self.j_frame.is_empty(), self.j_coframe.is_empty(), &coframe) {
                    (false, false, _) => return Err(DslError::ConflictingStructure),
                    (false, true, _) => AlmostComplexStructure::from_frame(dim, &lines(&self.j_frame, "")?)?,
                    (true, false, _) => AlmostComplexStructure::from_coframe(dim, &lines(&self.j_coframe, "*")?)?,
                    (true, true, Some(c)) => AlmostComplexStructure::from_coframe10(c)?,
                    (true, true, None) => return Err(DslError::MissingStructure),
                };
                let validation = algebra.validate();
                if !validation.is_valid() {
                    return Err(ModelError::InvalidAlgebra(validation.messages().join("; ")).into());
                }
                let real = RealData { algebra, structure, coframe };
                Ok(Model::from_real(&self.name, values, real)?)
            }
        }
    }
}

/// Parses a form written with `phi`/`cphi` generators, or with real `e`
/// generators when `substitution` is given. Parameters take the values in `params`.
pub fn parse_form(
    text: &str,
    n: usize,
    params: &BTreeMap<String, Rational>,
    coframe: Option<&Coframe10>,
) -> Result<Form, DslError> {
    let is_param = |s: &str| params.contains_key(s);
    let err = |e: ParseError| DslError::Representative(format!("{text}: {e}"));
    let mut p = Parser::from_text(text, &is_param).map_err(err)?;
    let uses_real = text.split(|c: char| !c.is_ascii_alphanumeric()).any(|w| matches!(classify_generator(w), Some(Gen::Real { .. })));
    let eval = |c: &ParamPoly| c.eval(&|name| params.get(name).cloned()).expect("names checked by the parser");
    if uses_real {
        let coframe =
            coframe.ok_or_else(|| DslError::Representative(format!("{text}: e-generators need a model with real data")))?;
        let terms = p.generator_sum(GenSpace::Real(2 * n)).map_err(err)?;
        p.expect_end().map_err(err)?;
        let mut rf = RealForm::zero(2 * n);
        for t in terms {
            if let Some((indices, negative)) = real_monomial(&t.gens) {
                let c = eval(&t.coeff);
                let idx = RealIndex::new(2 * n, &indices).expect("indices in range");
                rf.add_term(idx, &if negative { -c } else { c });
            }
        }
        Ok(coframe.substitution()?.apply(&rf))
    } else {
        let terms = p.generator_sum(GenSpace::Complex(n)).map_err(err)?;
        p.expect_end().map_err(err)?;
        let mut warnings = Vec::new();
        let mut lp = LineParser { line: 1, warnings: &mut warnings };
        let sum = lp.form_sum(n, terms, None).map_err(err)?;
        let mut f = Form::zero(n);
        for (m, c) in &sum {
            f.add_term(*m, &eval(c));
        }
        Ok(f)
    }
}

/// Names of parameters referenced anywhere in the document.
pub fn referenced_params(doc: &ModelDocument) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut collect = |c: &ParamPoly| out.extend(c.params().cloned());
    for sum in doc.brackets.values().chain(doc.j_frame.values()).chain(doc.j_coframe.values()).chain(doc.coframe.values()) {
        sum.values().for_each(&mut collect);
    }
    for sum in doc.differentials.values() {
        sum.values().for_each(&mut collect);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_traits::One;

    const CASE_E: &str = "algebra e\ncomplex_dim 2\nd phi1 = -1/2 phi1^phi2 + 1/2 phi1^cphi2\nd phi2 = (1/2)i phi1^cphi1\n";

    #[test]
    fn parses_complex_equations() {
        let (doc, warnings) = parse(CASE_E).unwrap();
        assert!(warnings.is_empty());
        let model = doc.instantiate(&BTreeMap::new()).unwrap();
        let d = model.equations.d_phi();
        let half = GaussianRational::from_fractions(1, 2, 0, 1);
        let m12 = MultiIndex::new(2, &[1, 2], &[]).unwrap();
        let m12b = MultiIndex::new(2, &[1], &[2]).unwrap();
        let m11b = MultiIndex::new(2, &[1], &[1]).unwrap();
        assert_eq!(d[0].coefficient(&m12), -half.clone());
        assert_eq!(d[0].coefficient(&m12b), half);
        assert_eq!(d[1].coefficient(&m11b), GaussianRational::from_fractions(0, 1, 1, 2));
        assert_eq!(render(&doc), CASE_E);
    }

    #[test]
    fn repeated_index_warns() {
        let (doc, warnings) = parse("complex_dim 2\nd phi1 = phi1 ^ phi1\n").unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].severity, Severity::Warning);
        assert!(doc.differentials[&1].is_empty());
    }

    #[test]
    fn bracket_line() {
        let (doc, _) = parse("real_dim 4\n[e1,e4] = e2\nJ e1 = e2\nJ e2 = -e1\nJ e3 = e4\nJ e4 = -e3\n").unwrap();
        let model = doc.instantiate(&BTreeMap::new()).unwrap();
        let alg = &model.real.unwrap().algebra;
        assert_eq!(alg.bracket(1, 4), &[rational(0, 1), rational(1, 1), rational(0, 1), rational(0, 1)]);
        assert_eq!(alg.bracket(4, 1)[1], rational(-1, 1));
    }

    #[test]
    fn diagnostics_have_positions() {
        let errs = parse("complex_dim 2\nd phi3 = 0\nd phi1 = phi1^phi2\nd phi1 = 0\n").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!((errs[0].line, errs[0].column), (2, 3));
        assert!(errs[0].message.contains("unknown generator"));
        assert_eq!(errs[1].line, 4);
        assert!(errs[1].message.contains("duplicate d-declaration"));
    }

    #[test]
    fn parameters() {
        let text = "complex_dim 2\nparam alpha = 1 nonzero\nparam beta = 1\nd phi1 = (alpha - i*beta)/(2i) phi1^cphi2\n";
        let (doc, _) = parse(text).unwrap();
        let rendered = render(&doc);
        assert_eq!(parse(&rendered).unwrap().0, doc, "{rendered}");
        let zero = BTreeMap::from([("alpha".to_string(), rational(0, 1))]);
        assert_eq!(doc.instantiate(&zero), Err(DslError::Constraint { name: "alpha".into() }));
        let unknown = BTreeMap::from([("gamma".to_string(), rational(0, 1))]);
        assert_eq!(doc.instantiate(&unknown), Err(DslError::UnknownParameter("gamma".into())));
        assert!(parse("complex_dim 2\nd phi1 = q phi1^phi2\n").unwrap_err()[0].message.contains("unknown name"));
    }

    #[test]
    fn forms_in_either_syntax() {
        let params = BTreeMap::from([("q".to_string(), rational(2, 1))]);
        let f = parse_form("phi1^phi2^cphi1 - q phi1^phi2^cphi2", 2, &params, None).unwrap();
        assert_eq!(f.coefficient(&MultiIndex::new(2, &[1, 2], &[2]).unwrap()), GaussianRational::from_integer(-2));
        let i = GaussianRational::i();
        let (o, z) = (GaussianRational::one(), GaussianRational::zero());
        let coframe = Coframe10::new(vec![vec![o.clone(), i.clone(), z.clone(), z.clone()], vec![z.clone(), z, o, i]]).unwrap();
        let g = parse_form("e1 + i e2", 2, &params, Some(&coframe)).unwrap();
        assert_eq!(g, Form::phi(2, 1));
        assert!(parse_form("e1", 2, &params, None).is_err());
    }
}
