//! The five cohomologies of a bicomplex, the maps induced by the identity
//! between them, and the numerical invariants built from their dimensions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{all_bidegrees, bidegrees_of_degree, ExteriorError, Form};
use crate::linalg::{induced_map, quotient, InducedMap, LinalgError, Matrix, Quotient, Subspace, Vector};
use crate::model::Bicomplex;
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("degree {0} out of range")]
    Range(String),
    #[error("no natural map {0}")]
    UnsupportedMap(String),
    #[error("malformed key '{0}'")]
    BadKey(String),
    #[error("map {key} is not well defined: {reason}")]
    NotWellDefined { key: String, reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    DeRham,
    Dolbeault,
    ConjDolbeault,
    BottChern,
    Aeppli,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::DeRham, Kind::Dolbeault, Kind::ConjDolbeault, Kind::BottChern, Kind::Aeppli];

    /// Short code used in keys: `DR`, `DB`, `CDB`, `BC`, `A`.
    pub fn code(self) -> &'static str {
        match self {
            Kind::DeRham => "DR",
            Kind::Dolbeault => "DB",
            Kind::ConjDolbeault => "CDB",
            Kind::BottChern => "BC",
            Kind::Aeppli => "A",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::DeRham => "de_rham",
            Kind::Dolbeault => "dolbeault",
            Kind::ConjDolbeault => "conj_dolbeault",
            Kind::BottChern => "bott_chern",
            Kind::Aeppli => "aeppli",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Kind {
    type Err = CohomologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL.into_iter().find(|k| k.code() == s).ok_or_else(|| CohomologyError::BadKey(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    Bi(usize, usize),
    Total(usize),
}

impl Degree {
    pub fn total(self) -> usize {
        match self {
            Degree::Bi(p, q) => p + q,
            Degree::Total(k) => k,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Bi(p, q) => write!(f, "{p},{q}"),
            Degree::Total(k) => write!(f, "{k}"),
        }
    }
}

/// Key such as `BC:2,1` or `DR:3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub kind: Kind,
    pub degree: Degree,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.degree)
    }
}

fn parse_bidegree(s: &str, whole: &str) -> Result<(usize, usize), CohomologyError> {
    let bad = || CohomologyError::BadKey(whole.to_string());
    let (p, q) = s.split_once(',').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
}

impl FromStr for GroupKey {
    type Err = CohomologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CohomologyError::BadKey(s.to_string());
        let (kind, deg) = s.split_once(':').ok_or_else(bad)?;
        let kind: Kind = kind.trim().parse().map_err(|_| bad())?;
        let degree = if kind == Kind::DeRham {
            Degree::Total(deg.trim().parse().map_err(|_| bad())?)
        } else {
            let (p, q) = parse_bidegree(deg, s)?;
            Degree::Bi(p, q)
        };
        Ok(GroupKey { kind, degree })
    }
}

/// One cohomology group with its cocycle and coboundary spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyGroup {
    pub key: GroupKey,
    pub dim: usize,
    pub representatives: Vec<Form>,
    pub cocycles: Subspace,
    pub coboundaries: Subspace,
    quotient: Quotient,
    n: usize,
}

impl CohomologyGroup {
    fn new(b: &Bicomplex, key: GroupKey, cocycles: Subspace, coboundaries: Subspace) -> Result<Self, CohomologyError> {
        let quotient = quotient(&cocycles, &coboundaries)?;
        let representatives = quotient
            .representatives()
            .iter()
            .map(|v| vector_to_form(b, key.degree, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { key, dim: quotient.dim(), representatives, cocycles, coboundaries, quotient, n: b.n() })
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    /// Coordinates of a form in the ambient space of this group.
    pub fn coordinates(&self, form: &Form) -> Result<Vector, CohomologyError> {
        if form.n() != self.n {
            return Err(ExteriorError::DimensionMismatch(form.n(), self.n).into());
        }
        Ok(match self.key.degree {
            Degree::Bi(p, q) => form.coordinates(p, q)?,
            Degree::Total(k) => total_coordinates(self.n, form, k)?,
        })
    }

    /// Class coordinates of a cocycle in the basis of representatives.
    pub fn class_of(&self, form: &Form) -> Result<Vector, CohomologyError> {
        Ok(self.quotient.reduce(&self.coordinates(form)?)?)
    }
}

fn total_coordinates(n: usize, form: &Form, k: usize) -> Result<Vector, ExteriorError> {
    if !form.is_homogeneous_of_degree(k) {
        return Err(ExteriorError::NotHomogeneous { p: k, q: 0 });
    }
    let mut out = Vec::new();
    for (p, q) in bidegrees_of_degree(n, k) {
        out.extend(form.component(p, q).coordinates(p, q)?);
    }
    Ok(out)
}

fn vector_to_form(b: &Bicomplex, degree: Degree, v: &[GaussianRational]) -> Result<Form, ExteriorError> {
    match degree {
        Degree::Bi(p, q) => Form::from_coordinates(b.n(), p, q, v),
        Degree::Total(k) => b.total_form(v, k),
    }
}

fn check_bidegree(b: &Bicomplex, p: usize, q: usize) -> Result<(), CohomologyError> {
    if p > b.n() || q > b.n() {
        Err(CohomologyError::Range(format!("({p},{q}) for n = {}", b.n())))
    } else {
        Ok(())
    }
}

fn kernel(m: &Matrix) -> Subspace {
    m.kernel_basis()
}

/// `ker delbar / im delbar` at `(p,q)`.
pub fn dolbeault(b: &Bicomplex, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    check_bidegree(b, p, q)?;
    let cocycles = kernel(&b.delbar(p, q));
    let coboundaries = if q == 0 { Subspace::zero(b.space_dim(p, q)) } else { b.delbar(p, q - 1).image_basis() };
    CohomologyGroup::new(b, GroupKey { kind: Kind::Dolbeault, degree: Degree::Bi(p, q) }, cocycles, coboundaries)
}

/// `ker del / im del` at `(p,q)`.
pub fn conj_dolbeault(b: &Bicomplex, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    check_bidegree(b, p, q)?;
    let cocycles = kernel(&b.del(p, q));
    let coboundaries = if p == 0 { Subspace::zero(b.space_dim(p, q)) } else { b.del(p - 1, q).image_basis() };
    CohomologyGroup::new(b, GroupKey { kind: Kind::ConjDolbeault, degree: Degree::Bi(p, q) }, cocycles, coboundaries)
}

/// `(ker del ∩ ker delbar) / im del delbar` at `(p,q)`.
pub fn bott_chern(b: &Bicomplex, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    check_bidegree(b, p, q)?;
    let cocycles = kernel(&b.del(p, q)).intersection(&kernel(&b.delbar(p, q)))?;
    let coboundaries = if p == 0 || q == 0 {
        Subspace::zero(b.space_dim(p, q))
    } else {
        b.del_delbar(p - 1, q - 1).image_basis()
    };
    CohomologyGroup::new(b, GroupKey { kind: Kind::BottChern, degree: Degree::Bi(p, q) }, cocycles, coboundaries)
}

/// `ker del delbar / (im del + im delbar)` at `(p,q)`.
pub fn aeppli(b: &Bicomplex, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    check_bidegree(b, p, q)?;
    let dim = b.space_dim(p, q);
    let cocycles = kernel(&b.del_delbar(p, q));
    let im_del = if p == 0 { Subspace::zero(dim) } else { b.del(p - 1, q).image_basis() };
    let im_delbar = if q == 0 { Subspace::zero(dim) } else { b.delbar(p, q - 1).image_basis() };
    CohomologyGroup::new(b, GroupKey { kind: Kind::Aeppli, degree: Degree::Bi(p, q) }, cocycles, im_del.sum(&im_delbar)?)
}

/// `ker d / im d` on the total complex in degree `k`.
pub fn de_rham(b: &Bicomplex, k: usize) -> Result<CohomologyGroup, CohomologyError> {
    if k > 2 * b.n() {
        return Err(CohomologyError::Range(format!("{k} for n = {}", b.n())));
    }
    let cocycles = kernel(&b.total_d(k));
    let coboundaries = if k == 0 { Subspace::zero(cocycles.ambient()) } else { b.total_d(k - 1).image_basis() };
    CohomologyGroup::new(b, GroupKey { kind: Kind::DeRham, degree: Degree::Total(k) }, cocycles, coboundaries)
}

pub fn group(b: &Bicomplex, key: GroupKey) -> Result<CohomologyGroup, CohomologyError> {
    match (key.kind, key.degree) {
        (Kind::DeRham, Degree::Total(k)) => de_rham(b, k),
        (Kind::Dolbeault, Degree::Bi(p, q)) => dolbeault(b, p, q),
        (Kind::ConjDolbeault, Degree::Bi(p, q)) => conj_dolbeault(b, p, q),
        (Kind::BottChern, Degree::Bi(p, q)) => bott_chern(b, p, q),
        (Kind::Aeppli, Degree::Bi(p, q)) => aeppli(b, p, q),
        _ => Err(CohomologyError::BadKey(key.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentativeError {
    #[error("{key}: expected form {index} is not homogeneous of the group's degree")]
    WrongDegree { key: String, index: usize },
    #[error("{key}: expected form {index} ({form}) is not a cocycle")]
    NotCocycle { key: String, index: usize, form: String },
    #[error("{key}: expected classes are linearly dependent (rank {rank} of {count})")]
    Dependent { key: String, rank: usize, count: usize },
    #[error("{key}: {count} expected classes but the group has dimension {dim}")]
    WrongCount { key: String, count: usize, dim: usize },
}

/// Passes iff every form is a cocycle and their classes form a basis of the group.
pub fn verify_representatives(expected: &[Form], group: &CohomologyGroup) -> Result<(), RepresentativeError> {
    let key = group.key.to_string();
    let mut classes = Vec::new();
    for (index, form) in expected.iter().enumerate() {
        let coords = group.coordinates(form).map_err(|_| RepresentativeError::WrongDegree { key: key.clone(), index })?;
        if !group.cocycles.contains(&coords) {
            return Err(RepresentativeError::NotCocycle { key, index, form: form.to_string() });
        }
        classes.push(group.quotient.reduce(&coords).expect("cocycles reduce"));
    }
    let count = expected.len();
    if count != group.dim {
        return Err(RepresentativeError::WrongCount { key, count, dim: group.dim });
    }
    let rank = Matrix::from_rows(group.dim, &classes).expect("class vectors share a length").rank();
    if rank != count {
        return Err(RepresentativeError::Dependent { key, rank, count });
    }
    Ok(())
}

/// A natural map between two cohomologies at bidegree `(p,q)`; edges with a
/// de Rham end use the total degree `p+q` there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MapKey {
    pub src: Kind,
    pub dst: Kind,
    pub p: usize,
    pub q: usize,
}

impl MapKey {
    pub const EDGES: [(Kind, Kind); 7] = [
        (Kind::BottChern, Kind::Dolbeault),
        (Kind::BottChern, Kind::ConjDolbeault),
        (Kind::BottChern, Kind::DeRham),
        (Kind::BottChern, Kind::Aeppli),
        (Kind::Dolbeault, Kind::Aeppli),
        (Kind::ConjDolbeault, Kind::Aeppli),
        (Kind::DeRham, Kind::Aeppli),
    ];

    pub fn new(src: Kind, dst: Kind, p: usize, q: usize) -> Result<Self, CohomologyError> {
        let key = Self { src, dst, p, q };
        if Self::EDGES.contains(&(src, dst)) {
            Ok(key)
        } else {
            Err(CohomologyError::UnsupportedMap(key.to_string()))
        }
    }

    fn group_key(&self, kind: Kind) -> GroupKey {
        let degree = if kind == Kind::DeRham { Degree::Total(self.p + self.q) } else { Degree::Bi(self.p, self.q) };
        GroupKey { kind, degree }
    }

    pub fn source(&self) -> GroupKey {
        self.group_key(self.src)
    }

    pub fn target(&self) -> GroupKey {
        self.group_key(self.dst)
    }
}

impl fmt::Display for MapKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{},{}", self.src, self.dst, self.p, self.q)
    }
}

impl FromStr for MapKey {
    type Err = CohomologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CohomologyError::BadKey(s.to_string());
        let (kinds, deg) = s.split_once(':').ok_or_else(bad)?;
        let (src, dst) = kinds.split_once("->").ok_or_else(bad)?;
        let (p, q) = parse_bidegree(deg, s)?;
        MapKey::new(src.trim().parse().map_err(|_| bad())?, dst.trim().parse().map_err(|_| bad())?, p, q)
    }
}

/// Expected property of a natural map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapProperty {
    Iso,
    Injective,
    Zero,
    Noninjective,
}

impl MapProperty {
    /// The most specific label: `iso`, else `injective`, else `zero`, else `noninjective`.
    pub fn classify(map: &InducedMap) -> Self {
        if map.injective && map.surjective {
            MapProperty::Iso
        } else if map.injective {
            MapProperty::Injective
        } else if map.rank == 0 {
            MapProperty::Zero
        } else {
            MapProperty::Noninjective
        }
    }

    /// Whether `map` has this property.
    pub fn holds(self, map: &InducedMap) -> bool {
        self.holds_for(map.injective, map.surjective, map.rank)
    }

    fn holds_for(self, injective: bool, surjective: bool, rank: usize) -> bool {
        match self {
            MapProperty::Iso => injective && surjective,
            MapProperty::Injective => injective,
            MapProperty::Zero => rank == 0,
            MapProperty::Noninjective => !injective,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MapProperty::Iso => "iso",
            MapProperty::Injective => "injective",
            MapProperty::Zero => "zero",
            MapProperty::Noninjective => "noninjective",
        }
    }
}

impl fmt::Display for MapProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapProperty {
    type Err = CohomologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [MapProperty::Iso, MapProperty::Injective, MapProperty::Zero, MapProperty::Noninjective]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| CohomologyError::BadKey(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalMap {
    pub key: MapKey,
    pub map: InducedMap,
}

impl NaturalMap {
    pub fn property(&self) -> MapProperty {
        MapProperty::classify(&self.map)
    }
}

/// Matrix of the identity between the ambient spaces of the two ends.
fn raw_map(b: &Bicomplex, key: &MapKey) -> Matrix {
    let (p, q) = (key.p, key.q);
    let dim = b.space_dim(p, q);
    let k = p + q;
    let blocks = bidegrees_of_degree(b.n(), k);
    let offset: usize = blocks.iter().take_while(|&&bd| bd != (p, q)).map(|&(a, c)| b.space_dim(a, c)).sum();
    let total: usize = blocks.iter().map(|&(a, c)| b.space_dim(a, c)).sum();
    let mut m;
    match (key.src, key.dst) {
        (Kind::BottChern, Kind::DeRham) => {
            m = Matrix::zeros(total, dim);
            for i in 0..dim {
                m.set(offset + i, i, GaussianRational::from_integer(1));
            }
        }
        (Kind::DeRham, Kind::Aeppli) => {
            m = Matrix::zeros(dim, total);
            for i in 0..dim {
                m.set(i, offset + i, GaussianRational::from_integer(1));
            }
        }
        _ => m = Matrix::identity(dim),
    }
    m
}

/// All groups of a bicomplex, computed once.
#[derive(Debug, Clone)]
pub struct Cohomologies {
    bicomplex: Bicomplex,
    groups: BTreeMap<GroupKey, CohomologyGroup>,
}

impl Cohomologies {
    pub fn compute(b: &Bicomplex) -> Result<Self, CohomologyError> {
        let n = b.n();
        let mut groups = BTreeMap::new();
        for k in 0..=2 * n {
            let g = de_rham(b, k)?;
            groups.insert(g.key, g);
        }
        for (p, q) in all_bidegrees(n) {
            for g in [dolbeault(b, p, q)?, conj_dolbeault(b, p, q)?, bott_chern(b, p, q)?, aeppli(b, p, q)?] {
                groups.insert(g.key, g);
            }
        }
        Ok(Self { bicomplex: b.clone(), groups })
    }

    pub fn bicomplex(&self) -> &Bicomplex {
        &self.bicomplex
    }

    pub fn n(&self) -> usize {
        self.bicomplex.n()
    }

    pub fn get(&self, key: GroupKey) -> Result<&CohomologyGroup, CohomologyError> {
        self.groups.get(&key).ok_or_else(|| CohomologyError::Range(key.to_string()))
    }

    pub fn groups(&self) -> impl Iterator<Item = &CohomologyGroup> {
        self.groups.values()
    }

    pub fn dim(&self, kind: Kind, p: usize, q: usize) -> usize {
        self.groups[&GroupKey { kind, degree: Degree::Bi(p, q) }].dim
    }

    pub fn betti(&self) -> Vec<usize> {
        (0..=2 * self.n()).map(|k| self.groups[&GroupKey { kind: Kind::DeRham, degree: Degree::Total(k) }].dim).collect()
    }

    /// Dimensions in canonical bidegree order.
    pub fn grid(&self, kind: Kind) -> Vec<usize> {
        all_bidegrees(self.n()).into_iter().map(|(p, q)| self.dim(kind, p, q)).collect()
    }

    pub fn natural_map(&self, key: MapKey) -> Result<NaturalMap, CohomologyError> {
        induce(&self.bicomplex, key, self.get(key.source())?, self.get(key.target())?)
    }

    /// Every edge at every bidegree.
    pub fn all_maps(&self) -> Result<Vec<NaturalMap>, CohomologyError> {
        let mut out = Vec::new();
        for (p, q) in all_bidegrees(self.n()) {
            for (src, dst) in MapKey::EDGES {
                out.push(self.natural_map(MapKey::new(src, dst, p, q)?)?);
            }
        }
        Ok(out)
    }
}

pub fn natural_map(b: &Bicomplex, key: MapKey) -> Result<NaturalMap, CohomologyError> {
    induce(b, key, &group(b, key.source())?, &group(b, key.target())?)
}

fn induce(b: &Bicomplex, key: MapKey, src: &CohomologyGroup, dst: &CohomologyGroup) -> Result<NaturalMap, CohomologyError> {
    let raw = raw_map(b, &key);
    let map = induced_map(&src.quotient, &dst.quotient, &raw).map_err(|e| match e {
        LinalgError::NotWellDefined(reason) => CohomologyError::NotWellDefined { key: key.to_string(), reason },
        other => other.into(),
    })?;
    Ok(NaturalMap { key, map })
}

/// Index of `(p,q)` in canonical bidegree order.
pub fn grid_index(n: usize, p: usize, q: usize) -> usize {
    all_bidegrees(n).iter().position(|&bd| bd == (p, q)).expect("bidegree in range")
}

/// `Delta^k = sum_{p+q=k} (h_BC^{p,q} + h_A^{p,q}) - 2 b_k`.
pub fn delta(n: usize, bott_chern: &[usize], aeppli: &[usize], betti: &[usize], k: usize) -> Result<i64, CohomologyError> {
    if k > 2 * n {
        return Err(CohomologyError::Range(format!("Delta^{k} for n = {n}")));
    }
    let sum: usize =
        bidegrees_of_degree(n, k).iter().map(|&(p, q)| bott_chern[grid_index(n, p, q)] + aeppli[grid_index(n, p, q)]).sum();
    Ok(sum as i64 - 2 * betti[k] as i64)
}

/// Per-degree sums of a grid.
pub fn degree_sums(n: usize, grid: &[usize]) -> Vec<usize> {
    (0..=2 * n).map(|k| bidegrees_of_degree(n, k).iter().map(|&(p, q)| grid[grid_index(n, p, q)]).sum()).collect()
}

/// `sum_{p+q=k} h_delbar^{p,q} >= b_k` for all `k`, and whether equality holds.
pub fn frolicher_check(n: usize, hodge: &[usize], betti: &[usize]) -> (bool, bool) {
    let sums = degree_sums(n, hodge);
    (sums.iter().zip(betti).all(|(s, b)| s >= b), sums == betti)
}

/// `h^{p,q} = h^{q,p}`.
pub fn is_symmetric(n: usize, grid: &[usize]) -> bool {
    all_bidegrees(n).iter().all(|&(p, q)| grid[grid_index(n, p, q)] == grid[grid_index(n, q, p)])
}

/// `h_A^{p,q} = h_BC^{n-q,n-p}`.
pub fn duality_holds(n: usize, bott_chern: &[usize], aeppli: &[usize]) -> bool {
    all_bidegrees(n).iter().all(|&(p, q)| aeppli[grid_index(n, p, q)] == bott_chern[grid_index(n, n - q, n - p)])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSummary {
    pub rank: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl MapSummary {
    pub fn satisfies(&self, property: MapProperty) -> bool {
        property.holds_for(self.injective, self.surjective, self.rank)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub bicomplex: bool,
    pub frolicher_inequality: bool,
    pub frolicher_equality: bool,
    pub conjugation_symmetry: bool,
    pub duality: bool,
    pub delta1_zero: bool,
    pub delta_nonnegative: bool,
    pub map_composition: bool,
}

/// Everything computed for one model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub format_version: u32,
    pub model: String,
    pub label: String,
    pub params: BTreeMap<String, String>,
    pub n: usize,
    pub betti: Vec<usize>,
    pub hodge: Vec<usize>,
    pub conj_hodge: Vec<usize>,
    pub bott_chern: Vec<usize>,
    pub aeppli: Vec<usize>,
    pub delta: Vec<i64>,
    pub representatives: BTreeMap<String, Vec<String>>,
    /// Most specific property of every natural map.
    pub maps: BTreeMap<String, MapProperty>,
    pub map_details: BTreeMap<String, MapSummary>,
    pub checks: Checks,
}

impl SurfaceReport {
    pub fn grid(&self, kind: Kind) -> &[usize] {
        match kind {
            Kind::DeRham => &self.betti,
            Kind::Dolbeault => &self.hodge,
            Kind::ConjDolbeault => &self.conj_hodge,
            Kind::BottChern => &self.bott_chern,
            Kind::Aeppli => &self.aeppli,
        }
    }
}

/// BC -> DR followed by DR -> A equals BC -> A at every bidegree.
fn composition_consistent(c: &Cohomologies) -> Result<bool, CohomologyError> {
    for (p, q) in all_bidegrees(c.n()) {
        let to_dr = c.natural_map(MapKey::new(Kind::BottChern, Kind::DeRham, p, q)?)?;
        let from_dr = c.natural_map(MapKey::new(Kind::DeRham, Kind::Aeppli, p, q)?)?;
        let direct = c.natural_map(MapKey::new(Kind::BottChern, Kind::Aeppli, p, q)?)?;
        if from_dr.map.matrix.mul(&to_dr.map.matrix)? != direct.map.matrix {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Assembles grids, Delta, all natural maps and the check flags.
pub fn full_report(
    model: &str,
    label: &str,
    params: BTreeMap<String, String>,
    b: &Bicomplex,
) -> Result<(SurfaceReport, Cohomologies), CohomologyError> {
    let c = Cohomologies::compute(b)?;
    let n = c.n();
    let betti = c.betti();
    let hodge = c.grid(Kind::Dolbeault);
    let conj_hodge = c.grid(Kind::ConjDolbeault);
    let bc = c.grid(Kind::BottChern);
    let ae = c.grid(Kind::Aeppli);
    let delta = (0..=2 * n).map(|k| delta(n, &bc, &ae, &betti, k)).collect::<Result<Vec<_>, _>>()?;

    let mut representatives = BTreeMap::new();
    for g in c.groups() {
        representatives.insert(g.key.to_string(), g.representatives.iter().map(|f| f.to_string()).collect());
    }
    let mut maps = BTreeMap::new();
    let mut map_details = BTreeMap::new();
    for m in c.all_maps()? {
        let summary = MapSummary {
            rank: m.map.rank,
            source_dim: m.map.matrix.cols(),
            target_dim: m.map.matrix.rows(),
            injective: m.map.injective,
            surjective: m.map.surjective,
        };
        maps.insert(m.key.to_string(), m.property());
        map_details.insert(m.key.to_string(), summary);
    }

    let (frolicher_inequality, frolicher_equality) = frolicher_check(n, &hodge, &betti);
    let conj_swapped: Vec<usize> =
        all_bidegrees(n).iter().map(|&(p, q)| conj_hodge[grid_index(n, q, p)]).collect();
    let checks = Checks {
        bicomplex: b.verify().is_empty(),
        frolicher_inequality,
        frolicher_equality,
        conjugation_symmetry: is_symmetric(n, &bc) && is_symmetric(n, &ae) && conj_swapped == hodge,
        duality: duality_holds(n, &bc, &ae),
        delta1_zero: delta.get(1) == Some(&0),
        delta_nonnegative: delta.iter().all(|d| *d >= 0),
        map_composition: composition_consistent(&c)?,
    };
    let report = SurfaceReport {
        format_version: 1,
        model: model.to_string(),
        label: label.to_string(),
        params,
        n,
        betti,
        hodge,
        conj_hodge,
        bott_chern: bc,
        aeppli: ae,
        delta,
        representatives,
        maps,
        map_details,
        checks,
    };
    Ok((report, c))
}
