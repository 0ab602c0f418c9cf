//! Built-in models with their reference results.
//!
//! Each entry has a complex description (`complex.alg`), an optional real one
//! (`real.alg`) and the expected report (`expected.json`), all embedded at
//! build time from `data/catalog`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{delta, GroupKey, Kind, MapKey, MapProperty};
use crate::dsl::{self, DslError, ModelDocument, ParamDecl};
use crate::model::Model;
use crate::scalar::Rational;

struct Source {
    id: &'static str,
    real: Option<&'static str>,
    complex: &'static str,
    expected: &'static str,
}

macro_rules! source {
    ($id:literal) => {
        Source {
            id: $id,
            real: Some(include_str!(concat!("../data/catalog/", $id, "/real.alg"))),
            complex: include_str!(concat!("../data/catalog/", $id, "/complex.alg")),
            expected: include_str!(concat!("../data/catalog/", $id, "/expected.json")),
        }
    };
}

const SOURCES: [Source; 8] = [
    source!("torus"),
    source!("hyperelliptic"),
    source!("inoue_sm"),
    source!("kodaira_primary"),
    source!("kodaira_secondary"),
    source!("inoue_spm"),
    source!("calabi_eckmann"),
    source!("inoue_sm_halfplane"),
];

const INDEX: &str = include_str!("../data/catalog/index.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown model '{0}'")]
    UnknownId(String),
    #[error("{id}: {source}")]
    Model { id: String, source: DslError },
    #[error("{id}: broken expected data: {reason}")]
    Data { id: String, reason: String },
}

/// Reference results for one model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedReport {
    pub format_version: u32,
    /// Where each field comes from.
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
    pub betti: Vec<usize>,
    pub hodge: Vec<usize>,
    pub bott_chern: Vec<usize>,
    pub aeppli: Vec<usize>,
    pub delta: Vec<i64>,
    /// `"BC:2,1"` to DSL form strings spanning the group.
    #[serde(default)]
    pub representatives: BTreeMap<String, Vec<String>>,
    /// `"BC->DR:2,1"` to the expected property.
    #[serde(default)]
    pub maps: BTreeMap<String, MapProperty>,
}

impl ExpectedReport {
    pub fn grid(&self, kind: Kind) -> Option<&[usize]> {
        match kind {
            Kind::DeRham => Some(&self.betti),
            Kind::Dolbeault => Some(&self.hodge),
            Kind::BottChern => Some(&self.bott_chern),
            Kind::Aeppli => Some(&self.aeppli),
            Kind::ConjDolbeault => None,
        }
    }

    /// Checks shapes, keys, and that `delta` follows from the grids.
    pub fn check_consistency(&self, n: usize) -> Result<(), String> {
        let cells = (n + 1) * (n + 1);
        for (name, grid) in [("hodge", &self.hodge), ("bott_chern", &self.bott_chern), ("aeppli", &self.aeppli)] {
            if grid.len() != cells {
                return Err(format!("{name} has {} entries, expected {cells}", grid.len()));
            }
        }
        if self.betti.len() != 2 * n + 1 || self.delta.len() != 2 * n + 1 {
            return Err(format!("betti and delta need {} entries", 2 * n + 1));
        }
        for k in 0..=2 * n {
            let d = delta(n, &self.bott_chern, &self.aeppli, &self.betti, k).map_err(|e| e.to_string())?;
            if d != self.delta[k] {
                return Err(format!("delta[{k}] = {} but the grids give {d}", self.delta[k]));
            }
        }
        for key in self.representatives.keys() {
            key.parse::<GroupKey>().map_err(|e| e.to_string())?;
        }
        for key in self.maps.keys() {
            key.parse::<MapKey>().map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogInfo {
    pub id: &'static str,
    pub description: String,
    pub params: Vec<ParamDecl>,
}

/// Parsed documents of one entry.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: String,
    pub complex: ModelDocument,
    pub real: Option<ModelDocument>,
    pub expected: ExpectedReport,
}

/// An entry with parameters substituted.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: &'static str,
    pub params: BTreeMap<String, Rational>,
    /// Built from the complex structure equations.
    pub complex: Model,
    /// Built from the Lie algebra and `J`.
    pub real: Option<Model>,
}

impl Instance {
    /// The model used for computation: the complex one.
    pub fn model(&self) -> &Model {
        &self.complex
    }
}

#[derive(Deserialize)]
struct IndexLine {
    id: String,
    description: String,
}

fn descriptions() -> BTreeMap<String, String> {
    let lines: Vec<IndexLine> = serde_json::from_str(INDEX).expect("catalog index is valid json");
    lines.into_iter().map(|l| (l.id, l.description)).collect()
}

fn source(id: &str) -> Result<&'static Source, CatalogError> {
    SOURCES.iter().find(|s| s.id == id).ok_or_else(|| CatalogError::UnknownId(id.to_string()))
}

fn parse_doc(id: &str, text: &str) -> Result<ModelDocument, CatalogError> {
    dsl::parse(text).map(|(doc, _)| doc).map_err(|d| CatalogError::Model { id: id.to_string(), source: DslError::Parse(d) })
}

pub fn ids() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|s| s.id)
}

pub fn list() -> Vec<CatalogInfo> {
    let desc = descriptions();
    SOURCES
        .iter()
        .map(|s| {
            let doc = parse_doc(s.id, s.complex).expect("catalog documents parse");
            CatalogInfo { id: s.id, description: desc.get(s.id).cloned().unwrap_or_default(), params: doc.params }
        })
        .collect()
}

pub fn entry(id: &str) -> Result<CatalogEntry, CatalogError> {
    let s = source(id)?;
    let complex = parse_doc(s.id, s.complex)?;
    let real = s.real.map(|t| parse_doc(s.id, t)).transpose()?;
    Ok(CatalogEntry {
        id: s.id,
        description: descriptions().get(s.id).cloned().unwrap_or_default(),
        complex,
        real,
        expected: expected(id)?,
    })
}

pub fn expected(id: &str) -> Result<ExpectedReport, CatalogError> {
    let s = source(id)?;
    serde_json::from_str(s.expected).map_err(|e| CatalogError::Data { id: id.to_string(), reason: e.to_string() })
}

/// Instantiates `id` with `overrides` on top of the defaults.
pub fn get(id: &str, overrides: &BTreeMap<String, Rational>) -> Result<Instance, CatalogError> {
    entry(id)?.instantiate(overrides)
}

impl CatalogEntry {
    pub fn instantiate(&self, overrides: &BTreeMap<String, Rational>) -> Result<Instance, CatalogError> {
        let wrap = |e| CatalogError::Model { id: self.id.to_string(), source: e };
        let complex = self.complex.instantiate(overrides).map_err(wrap)?;
        let real = self.real.as_ref().map(|doc| doc.instantiate(overrides)).transpose().map_err(wrap)?;
        Ok(Instance { id: self.id, params: complex.params.clone(), complex, real })
    }

    /// The real document with its coframe lines removed, so that the coframe
    /// is derived from `J`.
    pub fn real_without_coframe(&self) -> Option<ModelDocument> {
        let has_j = |d: &ModelDocument| !d.j_frame.is_empty() || !d.j_coframe.is_empty();
        self.real.clone().filter(has_j).map(|mut doc| {
            doc.coframe.clear();
            doc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::Cohomologies;
    use crate::exterior::MultiIndex;
    use crate::model::complexify;
    use crate::scalar::{rational, GaussianRational};
    use crate::syntax::Parser;

    fn params(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), rational(*v, 1))).collect()
    }

    fn grids(m: &Model) -> Vec<Vec<usize>> {
        let c = Cohomologies::compute(&m.bicomplex().unwrap()).unwrap();
        let mut out = vec![c.betti()];
        out.extend([Kind::Dolbeault, Kind::ConjDolbeault, Kind::BottChern, Kind::Aeppli].into_iter().map(|k| c.grid(k)));
        out
    }

    #[test]
    fn eight_entries() {
        let l = list();
        assert_eq!(l.len(), 8);
        let spm = l.iter().find(|e| e.id == "inoue_spm").unwrap();
        assert_eq!(spm.params.len(), 1);
        assert_eq!(spm.params[0].name, "q");
        assert_eq!(spm.params[0].default, rational(1, 1));
        assert!(l.iter().find(|e| e.id == "calabi_eckmann").unwrap().params.is_empty());
        assert!(l.iter().all(|e| !e.description.is_empty()));
    }

    #[test]
    fn expected_data_is_consistent() {
        for id in ids() {
            let e = expected(id).unwrap();
            e.check_consistency(2).unwrap_or_else(|r| panic!("{id}: {r}"));
        }
        let kp = expected("kodaira_primary").unwrap();
        assert_eq!(kp.bott_chern[7], 2);
        assert_eq!(kp.representatives["BC:1,2"], vec!["phi1^cphi1^cphi2", "phi2^cphi1^cphi2"]);
        assert_eq!(expected("hyperelliptic").unwrap().delta, vec![0; 5]);
        let hp = expected("inoue_sm_halfplane").unwrap();
        assert_eq!(hp.representatives["BC:2,1"].len(), 1);
        assert_eq!(hp.maps["BC->DR:2,1"], MapProperty::Injective);
    }

    #[test]
    fn unknown_and_constraint() {
        assert!(matches!(get("nope", &BTreeMap::new()), Err(CatalogError::UnknownId(_))));
        let err = get("inoue_sm", &params(&[("alpha", 0)])).unwrap_err();
        assert!(err.to_string().contains("nonzero"), "{err}");
    }

    #[test]
    fn complexified_real_data_matches_complex_data() {
        for id in ids() {
            let inst = get(id, &BTreeMap::new()).unwrap();
            let real = inst.real.as_ref().unwrap();
            let data = real.real.as_ref().unwrap();
            let eqs = complexify(&data.algebra, &data.coframe().unwrap()).unwrap();
            assert_eq!(eqs, inst.complex.equations, "{id}");
        }
    }

    #[test]
    fn inoue_sm_coefficients() {
        let inst = get("inoue_sm", &params(&[("alpha", 1), ("beta", 0)])).unwrap();
        let d = inst.complex.equations.d_phi();
        let m22b = MultiIndex::new(2, &[2], &[2]).unwrap();
        assert_eq!(d[1].coefficient(&m22b), GaussianRational::from_fractions(0, 1, -1, 1));

        // normalised coefficient against the quotient form
        let is_param = |s: &str| s == "alpha" || s == "beta";
        let quotient = Parser::from_text("(alpha - i*beta)/(2i)", &is_param).unwrap().expr().unwrap();
        let stored = &entry("inoue_sm").unwrap().complex.differentials[&1][&MultiIndex::new(2, &[1, 2], &[]).unwrap()];
        assert_eq!(&quotient, stored);
        let normalised = Parser::from_text("(-beta - i*alpha)/2", &is_param).unwrap().expr().unwrap();
        assert_eq!(quotient, normalised);
    }

    #[test]
    fn calabi_eckmann_equations() {
        let inst = get("calabi_eckmann", &BTreeMap::new()).unwrap();
        let d = inst.complex.equations.d_phi();
        let i = GaussianRational::i();
        assert_eq!(d[0].coefficient(&MultiIndex::new(2, &[1, 2], &[]).unwrap()), i);
        assert_eq!(d[0].coefficient(&MultiIndex::new(2, &[1], &[2]).unwrap()), i);
        assert_eq!(d[1].coefficient(&MultiIndex::new(2, &[1], &[1]).unwrap()), -i);
        assert_eq!(d[0].terms().count() + d[1].terms().count(), 3);
    }

    #[test]
    fn parameter_samples_agree() {
        let base = grids(get("inoue_sm", &params(&[("alpha", 1), ("beta", 0)])).unwrap().model());
        for (a, b) in [(1, 1), (2, 3)] {
            let m = get("inoue_sm", &params(&[("alpha", a), ("beta", b)])).unwrap();
            assert_eq!(grids(m.model()), base, "alpha={a} beta={b}");
        }
        let base = grids(get("inoue_spm", &params(&[("q", 0)])).unwrap().model());
        for q in [1, -2] {
            assert_eq!(grids(get("inoue_spm", &params(&[("q", q)])).unwrap().model()), base, "q={q}");
        }
    }

    #[test]
    fn derived_coframe_spans_the_given_one() {
        for id in ids() {
            let e = entry(id).unwrap();
            let inst = e.instantiate(&BTreeMap::new()).unwrap();
            let given = inst.real.as_ref().unwrap().coframe().unwrap().unwrap();
            let doc = e.real_without_coframe().unwrap();
            let derived = doc.instantiate(&BTreeMap::new()).unwrap().coframe().unwrap().unwrap();
            assert_eq!(given.span(), derived.span(), "{id}");
        }
    }
}
