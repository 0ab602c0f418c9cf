//! The bigraded exterior algebra over `{phi^1..phi^n, cphi^1..cphi^n}`.
//!
//! A monomial `phi^{I} ^ cphi^{J}` is stored as a pair of bit masks; the
//! holomorphic block always precedes the conjugate block and each block is
//! increasing. Signs of products follow from sorting the concatenated
//! generator list `phi^1 < .. < phi^n < cphi^1 < .. < cphi^n`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::GaussianRational;
use crate::syntax::coefficient_prefix;

/// Largest supported complex dimension.
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("bidegree ({p},{q}) out of range for n = {n}")]
    Range { n: usize, p: usize, q: usize },
    #[error("index sequence {0:?} is not strictly increasing within 1..n")]
    BadIndices(Vec<usize>),
    #[error("form is not homogeneous of bidegree ({p},{q})")]
    NotHomogeneous { p: usize, q: usize },
    #[error("coordinate vector has length {got}, expected {expected}")]
    CoordinateLength { got: usize, expected: usize },
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).map(|b| b as usize + 1).collect()
}

fn indices_to_mask(indices: &[usize], n: usize) -> Result<u32, ExteriorError> {
    let mut mask = 0u32;
    let mut last = 0;
    for &k in indices {
        if k <= last || k > n || k > MAX_DIM {
            return Err(ExteriorError::BadIndices(indices.to_vec()));
        }
        mask |= 1 << (k - 1);
        last = k;
    }
    Ok(mask)
}

/// Sign of `a ^ b` for monomials given as generator bit sets, or `None` if
/// they share a generator. `true` means the product picks up a minus sign.
pub(crate) fn merge_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        rest &= rest - 1;
        // generators of `a` above y have to move past it
        let above = if y >= 63 { 0 } else { a >> (y + 1) };
        swaps += above.count_ones();
    }
    Some(swaps % 2 == 1)
}

/// A multi-index `(I, J)` naming the monomial `phi^I ^ cphi^J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    holo: u32,
    anti: u32,
}

impl MultiIndex {
    /// The empty multi-index (the constant form `1`).
    pub const ONE: MultiIndex = MultiIndex { holo: 0, anti: 0 };

    /// Builds from 1-based strictly increasing index lists, all `<= n`.
    pub fn new(n: usize, holo: &[usize], anti: &[usize]) -> Result<Self, ExteriorError> {
        Ok(Self { holo: indices_to_mask(holo, n)?, anti: indices_to_mask(anti, n)? })
    }

    pub(crate) fn from_masks(holo: u32, anti: u32) -> Self {
        Self { holo, anti }
    }

    pub fn holo(&self) -> Vec<usize> {
        mask_to_indices(self.holo)
    }

    pub fn anti(&self) -> Vec<usize> {
        mask_to_indices(self.anti)
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.holo.count_ones() as usize, self.anti.count_ones() as usize)
    }

    pub fn degree(&self) -> usize {
        let (p, q) = self.bidegree();
        p + q
    }

    /// Bit set over the combined generator list for dimension `n`.
    pub(crate) fn combined(&self, n: usize) -> u64 {
        u64::from(self.holo) | (u64::from(self.anti) << n)
    }

    pub(crate) fn from_combined(combined: u64, n: usize) -> Self {
        let low = (1u64 << n) - 1;
        Self { holo: (combined & low) as u32, anti: (combined >> n) as u32 }
    }

    /// Generators in canonical order as `(conjugate?, 1-based index)`.
    pub fn generators(&self) -> Vec<(bool, usize)> {
        self.holo().into_iter().map(|k| (false, k)).chain(self.anti().into_iter().map(|k| (true, k))).collect()
    }

    /// Source syntax, e.g. `phi1^phi2^cphi1`; the empty index renders as `1`.
    pub fn to_source(&self) -> String {
        let gens = self.generators();
        if gens.is_empty() {
            return "1".to_string();
        }
        gens.iter()
            .map(|&(conj, k)| if conj { format!("cphi{k}") } else { format!("phi{k}") })
            .collect::<Vec<_>>()
            .join("^")
    }

    /// Typeset form, e.g. `φ^{12 1̄}`.
    pub fn pretty(&self) -> String {
        let holo: String = self.holo().iter().map(|k| k.to_string()).collect();
        let anti: String = self.anti().iter().map(|k| format!("{k}\u{0304}")).collect();
        match (holo.is_empty(), anti.is_empty()) {
            (true, true) => "1".to_string(),
            (false, true) => format!("φ^{{{holo}}}"),
            (true, false) => format!("φ^{{{anti}}}"),
            (false, false) => format!("φ^{{{holo} {anti}}}"),
        }
    }
}

fn lex_cmp(a: u32, b: u32) -> Ordering {
    mask_to_indices(a).cmp(&mask_to_indices(b))
}

/// Canonical order: total degree, then larger holomorphic degree first (so
/// `(1,0)` precedes `(0,1)`), then lexicographic on each block.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        let (p1, q1) = self.bidegree();
        let (p2, q2) = other.bidegree();
        (p1 + q1)
            .cmp(&(p2 + q2))
            .then(p2.cmp(&p1))
            .then_with(|| lex_cmp(self.holo, other.holo))
            .then_with(|| lex_cmp(self.anti, other.anti))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compact syntax `phi{12,1}`.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let holo: String = self.holo().iter().map(|k| k.to_string()).collect();
        let anti: String = self.anti().iter().map(|k| k.to_string()).collect();
        write!(f, "phi{{{holo},{anti}}}")
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim Λ^{p,q} = C(n,p) C(n,q)`.
pub fn dim_bidegree(n: usize, p: usize, q: usize) -> usize {
    binomial(n, p) * binomial(n, q)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect();
    out.sort_by(|a, b| lex_cmp(*a, *b));
    out
}

/// All multi-indices of bidegree `(p,q)` in canonical order.
pub fn basis(n: usize, p: usize, q: usize) -> Result<Vec<MultiIndex>, ExteriorError> {
    if n == 0 || n > MAX_DIM || p > n || q > n {
        return Err(ExteriorError::Range { n, p, q });
    }
    let holos = subsets_of_size(n, p);
    let antis = subsets_of_size(n, q);
    Ok(holos
        .iter()
        .flat_map(|&h| antis.iter().map(move |&a| MultiIndex::from_masks(h, a)))
        .collect())
}

/// Bidegrees of total degree `k`, `p` descending.
pub fn bidegrees_of_degree(n: usize, k: usize) -> Vec<(usize, usize)> {
    (0..=n).rev().filter(|&p| k >= p && k - p <= n).map(|p| (p, k - p)).collect()
}

/// All bidegrees in canonical order: `(0,0), (1,0), (0,1), (2,0), ...`.
pub fn all_bidegrees(n: usize) -> Vec<(usize, usize)> {
    (0..=2 * n).flat_map(|k| bidegrees_of_degree(n, k)).collect()
}

/// Sparse element of the exterior algebra with `Q(i)` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    n: usize,
    terms: BTreeMap<MultiIndex, GaussianRational>,
}

impl Form {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: GaussianRational) -> Self {
        Self::monomial(n, MultiIndex::ONE, c)
    }

    pub fn monomial(n: usize, index: MultiIndex, c: GaussianRational) -> Self {
        let mut f = Self::zero(n);
        f.add_term(index, &c);
        f
    }

    /// `phi^a` (1-based).
    pub fn phi(n: usize, a: usize) -> Self {
        Self::monomial(n, MultiIndex::from_masks(1 << (a - 1), 0), GaussianRational::one())
    }

    /// `cphi^a`, the conjugate of `phi^a`.
    pub fn phibar(n: usize, a: usize) -> Self {
        Self::monomial(n, MultiIndex::from_masks(0, 1 << (a - 1)), GaussianRational::one())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> GaussianRational {
        self.terms.get(index).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, index: MultiIndex, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(index).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&index);
        }
    }

    pub fn add(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.add(&other.scale(&-GaussianRational::one()))
    }

    pub fn scale(&self, c: &GaussianRational) -> Form {
        let mut out = Form::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    fn check_dim(&self, other: &Form) -> Result<(), ExteriorError> {
        if self.n != other.n {
            Err(ExteriorError::DimensionMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = Form::zero(n);
        for (ia, ca) in &self.terms {
            let a = ia.combined(n);
            for (ib, cb) in &other.terms {
                let b = ib.combined(n);
                if let Some(negative) = merge_sign(a, b) {
                    let mut c = ca * cb;
                    if negative {
                        c = -c;
                    }
                    out.add_term(MultiIndex::from_combined(a | b, n), &c);
                }
            }
        }
        Ok(out)
    }

    /// Antilinear conjugation: `phi^I ^ cphi^J  ->  (-1)^{pq} phi^J ^ cphi^I`.
    pub fn conjugate(&self) -> Form {
        let mut out = Form::zero(self.n);
        for (idx, c) in &self.terms {
            let (p, q) = idx.bidegree();
            let mut coeff = c.conj();
            if (p * q) % 2 == 1 {
                coeff = -coeff;
            }
            out.add_term(MultiIndex::from_masks(idx.anti, idx.holo), &coeff);
        }
        out
    }

    /// The `(p,q)` component.
    pub fn component(&self, p: usize, q: usize) -> Form {
        Form {
            n: self.n,
            terms: self.terms.iter().filter(|(k, _)| k.bidegree() == (p, q)).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Bidegrees with a nonzero component.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.terms.keys().map(|k| k.bidegree()).collect();
        out.sort_by_key(|&(p, q)| (p + q, std::cmp::Reverse(p)));
        out.dedup();
        out
    }

    /// `Some(k)` if every term has total degree `k` (the zero form has every degree).
    pub fn is_homogeneous_of_degree(&self, k: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == k)
    }

    pub fn is_homogeneous(&self, p: usize, q: usize) -> bool {
        self.terms.keys().all(|m| m.bidegree() == (p, q))
    }

    /// Coefficient vector in the canonical basis of `Λ^{p,q}`.
    pub fn coordinates(&self, p: usize, q: usize) -> Result<Vec<GaussianRational>, ExteriorError> {
        if !self.is_homogeneous(p, q) {
            return Err(ExteriorError::NotHomogeneous { p, q });
        }
        Ok(basis(self.n, p, q)?.iter().map(|m| self.coefficient(m)).collect())
    }

    pub fn from_coordinates(n: usize, p: usize, q: usize, coords: &[GaussianRational]) -> Result<Form, ExteriorError> {
        let b = basis(n, p, q)?;
        if b.len() != coords.len() {
            return Err(ExteriorError::CoordinateLength { got: coords.len(), expected: b.len() });
        }
        let mut out = Form::zero(n);
        for (m, c) in b.into_iter().zip(coords) {
            out.add_term(m, c);
        }
        Ok(out)
    }

    /// Typeset rendering, e.g. `(1/2)i φ^{1 1̄} + φ^{2}`.
    pub fn pretty(&self) -> String {
        self.render(|m| m.pretty())
    }

    fn render(&self, monomial: impl Fn(&MultiIndex) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.has_leading_minus();
            let shown = if negative { -c } else { c.clone() };
            match (idx, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if m == &MultiIndex::ONE {
                out.push_str(&shown.to_string());
            } else {
                let prefix = coefficient_prefix(&crate::syntax::ParamPoly::constant(shown));
                out.push_str(&prefix);
                out.push_str(&monomial(m));
            }
        }
        out
    }
}

/// Source syntax accepted by the model language, e.g. `phi1^phi2 - (1/2)i phi2^cphi1`.
impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|m| m.to_source()))
    }
}

/// Element of the complexified exterior algebra over a real coframe
/// `e^1..e^m`, used for real structure equations before the change of basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealForm {
    dim: usize,
    terms: BTreeMap<RealIndex, GaussianRational>,
}

/// Increasing index set of a real monomial `e^{i1..ik}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RealIndex(u32);

impl RealIndex {
    pub fn new(dim: usize, indices: &[usize]) -> Result<Self, ExteriorError> {
        indices_to_mask(indices, dim).map(RealIndex)
    }

    pub fn indices(&self) -> Vec<usize> {
        mask_to_indices(self.0)
    }

    pub fn degree(&self) -> usize {
        self.0.count_ones() as usize
    }
}

impl Ord for RealIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| lex_cmp(self.0, other.0))
    }
}

impl PartialOrd for RealIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl RealForm {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    /// `e^k` (1-based).
    pub fn e(dim: usize, k: usize) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(RealIndex(1 << (k - 1)), &GaussianRational::one());
        f
    }

    pub fn monomial(index: RealIndex, dim: usize, c: GaussianRational) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(index, &c);
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RealIndex, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, index: &RealIndex) -> GaussianRational {
        self.terms.get(index).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, index: RealIndex, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(index).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&index);
        }
    }

    pub fn add(&self, other: &RealForm) -> Result<RealForm, ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> RealForm {
        let mut out = RealForm::zero(self.dim);
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    pub fn wedge(&self, other: &RealForm) -> Result<RealForm, ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = RealForm::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(negative) = merge_sign(u64::from(a.0), u64::from(b.0)) {
                    let c = ca * cb;
                    out.add_term(RealIndex(a.0 | b.0), &if negative { -c } else { c });
                }
            }
        }
        Ok(out)
    }
}

/// Source syntax, e.g. `e1^e3^e4 + i e2^e3^e4`.
impl fmt::Display for RealForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.has_leading_minus();
            let shown = if negative { -c } else { c.clone() };
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let gens: Vec<String> = m.indices().iter().map(|k| format!("e{k}")).collect();
            if gens.is_empty() {
                write!(f, "{shown}")?;
            } else {
                let prefix = coefficient_prefix(&crate::syntax::ParamPoly::constant(shown));
                write!(f, "{prefix}{}", gens.join("^"))?;
            }
        }
        Ok(())
    }
}
