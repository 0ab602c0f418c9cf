//! Running the full pipeline, rendering reports and comparing them with
//! expected data.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::catalog::{self, CatalogError, ExpectedReport, Instance};
use crate::cohomology::{
    full_report, verify_representatives, Cohomologies, CohomologyError, Degree, GroupKey, Kind, MapKey, SurfaceReport,
};
use crate::dsl;
use crate::exterior::all_bidegrees;
use crate::model::{Coframe10, Model, ModelError};
use crate::scalar::{format_rational, Rational};

/// Label given to models that do not come from the catalog.
pub const USER_LABEL: &str = "invariant-complex cohomology";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// A report together with what is needed to check representatives against it.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: SurfaceReport,
    pub cohomologies: Cohomologies,
    pub params: BTreeMap<String, Rational>,
    pub coframe: Option<Coframe10>,
}

impl Analysis {
    pub fn context(&self) -> RepresentativeContext<'_> {
        RepresentativeContext { cohomologies: &self.cohomologies, params: &self.params, coframe: self.coframe.as_ref() }
    }
}

pub fn analyze_model(model: &Model, label: &str) -> Result<Analysis, ReportError> {
    let params = model.params.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect();
    let b = model.bicomplex()?;
    let (report, cohomologies) = full_report(&model.name, label, params, &b)?;
    let coframe = model.coframe().transpose()?;
    Ok(Analysis { report, cohomologies, params: model.params.clone(), coframe })
}

/// Computes a catalog entry from its complex structure equations. The real
/// data, when present, only supplies the coframe for `e`-syntax forms.
pub fn analyze_instance(inst: &Instance, label: &str) -> Result<Analysis, ReportError> {
    let mut a = analyze_model(inst.model(), label)?;
    if a.coframe.is_none() {
        a.coframe = inst.real.as_ref().and_then(Model::coframe).transpose()?;
    }
    Ok(a)
}

pub fn analyze_catalog(id: &str, overrides: &BTreeMap<String, Rational>) -> Result<(Analysis, ExpectedReport), ReportError> {
    let entry = catalog::entry(id)?;
    let inst = entry.instantiate(overrides)?;
    Ok((analyze_instance(&inst, &entry.description)?, entry.expected))
}

/// Computes `id` and compares it with its expected data.
pub fn check_catalog(id: &str, overrides: &BTreeMap<String, Rational>) -> Result<(Analysis, Vec<Mismatch>), ReportError> {
    let (a, expected) = analyze_catalog(id, overrides)?;
    let mismatches = diff(&a.report, &expected, Some(&a.context()));
    Ok((a, mismatches))
}

/// What representative checks need besides the report itself.
#[derive(Debug, Clone, Copy)]
pub struct RepresentativeContext<'a> {
    pub cohomologies: &'a Cohomologies,
    pub params: &'a BTreeMap<String, Rational>,
    pub coframe: Option<&'a Coframe10>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn mismatch(field: &str, message: String) -> Mismatch {
    Mismatch { field: field.to_string(), message }
}

/// Field-by-field comparison. Representatives are checked only when `ctx`
/// is given.
pub fn diff(actual: &SurfaceReport, expected: &ExpectedReport, ctx: Option<&RepresentativeContext<'_>>) -> Vec<Mismatch> {
    let mut out = Vec::new();
    let n = actual.n;
    let bidegrees = all_bidegrees(n);
    for (kind, name) in [(Kind::Dolbeault, "hodge"), (Kind::BottChern, "bott_chern"), (Kind::Aeppli, "aeppli")] {
        let want = expected.grid(kind).unwrap_or_default();
        let got = actual.grid(kind);
        if want.len() != got.len() {
            out.push(mismatch(name, format!("{name}: got {} entries, expected {}", got.len(), want.len())));
            continue;
        }
        for (i, &(p, q)) in bidegrees.iter().enumerate() {
            if got[i] != want[i] {
                out.push(mismatch(name, format!("{name}({p},{q}): got {}, expected {}", got[i], want[i])));
            }
        }
    }
    compare_seq(&mut out, "betti", &actual.betti, &expected.betti);
    compare_seq(&mut out, "delta", &actual.delta, &expected.delta);

    for (key, property) in &expected.maps {
        match actual.map_details.get(key) {
            None => out.push(mismatch("maps", format!("{key}: map not computed"))),
            Some(s) if !s.satisfies(*property) => out.push(mismatch(
                "maps",
                format!("{key}: expected {property}, got {}", actual.maps.get(key).map_or("?", |p| p.as_str())),
            )),
            _ => {}
        }
    }

    if let Some(ctx) = ctx {
        for (key, texts) in &expected.representatives {
            if let Err(msg) = check_representatives(key, texts, n, ctx) {
                out.push(mismatch("representatives", msg));
            }
        }
    }
    out
}

fn compare_seq<T: PartialEq + fmt::Display>(out: &mut Vec<Mismatch>, name: &str, got: &[T], want: &[T]) {
    if got.len() != want.len() {
        out.push(mismatch(name, format!("{name}: got {} entries, expected {}", got.len(), want.len())));
        return;
    }
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        if g != w {
            out.push(mismatch(name, format!("{name}({k}): got {g}, expected {w}")));
        }
    }
}

fn check_representatives(key: &str, texts: &[String], n: usize, ctx: &RepresentativeContext<'_>) -> Result<(), String> {
    let gk: GroupKey = key.parse().map_err(|e: CohomologyError| e.to_string())?;
    let group = ctx.cohomologies.get(gk).map_err(|e| format!("{key}: {e}"))?;
    let forms = texts
        .iter()
        .map(|t| dsl::parse_form(t, n, ctx.params, ctx.coframe))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("{key}: {e}"))?;
    verify_representatives(&forms, group).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TextOptions {
    pub representatives: bool,
    /// Every natural map instead of the Bott-Chern ones with nonzero source.
    pub all_maps: bool,
    pub color: bool,
}

const THEORIES: [(Kind, &str); 4] = [
    (Kind::Dolbeault, "Dolbeault"),
    (Kind::ConjDolbeault, "conjugate Dolbeault"),
    (Kind::BottChern, "Bott-Chern"),
    (Kind::Aeppli, "Aeppli"),
];

fn bidegree_rank(p: usize, q: usize) -> (usize, std::cmp::Reverse<usize>) {
    (p + q, std::cmp::Reverse(p))
}

/// Theory, then total degree, then `p` descending.
fn group_order(key: &str) -> impl Ord {
    key.parse::<GroupKey>().ok().map(|k| {
        let (p, q) = match k.degree {
            Degree::Bi(p, q) => (p, q),
            Degree::Total(t) => (t, 0),
        };
        (k.kind, bidegree_rank(p, q))
    })
}

fn map_order(key: &str) -> impl Ord {
    key.parse::<MapKey>().ok().map(|k| {
        let edge = MapKey::EDGES.iter().position(|&e| e == (k.src, k.dst));
        (edge, bidegree_rank(k.p, k.q))
    })
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Rows of a Hodge diamond, top to bottom, each listing `(k,0) .. (0,k)`.
pub fn diamond_rows(n: usize, grid: &[usize]) -> Vec<Vec<usize>> {
    let bidegrees = all_bidegrees(n);
    (0..=2 * n)
        .map(|k| bidegrees.iter().zip(grid).filter(|((p, q), _)| p + q == k).map(|(_, &h)| h).collect())
        .collect()
}

fn diamond(n: usize, grid: &[usize]) -> String {
    let rows = diamond_rows(n, grid);
    let w = grid.iter().map(|h| h.to_string().len()).max().unwrap_or(1);
    let mut out = String::new();
    for row in rows {
        let indent = (n + 1 - row.len()) * (w + 1) / 2;
        let cells: Vec<String> = row.iter().map(|h| format!("{h:>w$}")).collect();
        let _ = writeln!(out, "  {}{}", " ".repeat(indent), cells.join(" "));
    }
    out
}

struct Style {
    color: bool,
}

impl Style {
    fn heading(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    fn flag(&self, ok: bool) -> String {
        match (ok, self.color) {
            (true, false) => "ok".into(),
            (false, false) => "FAILED".into(),
            (true, true) => "\x1b[32mok\x1b[0m".into(),
            (false, true) => "\x1b[31mFAILED\x1b[0m".into(),
        }
    }
}

/// Fixed-width human readable report. Same input, same output.
pub fn render_text(r: &SurfaceReport, opts: &TextOptions) -> String {
    let st = Style { color: opts.color };
    let mut out = String::new();
    let _ = writeln!(out, "{} ({})", st.heading(&r.model), r.label);
    if !r.params.is_empty() {
        let ps: Vec<String> = r.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let _ = writeln!(out, "parameters: {}", ps.join(", "));
    }
    let _ = writeln!(out, "complex dimension {}", r.n);
    out.push('\n');
    for (kind, title) in THEORIES {
        let _ = writeln!(out, "{}", st.heading(title));
        out.push_str(&diamond(r.n, r.grid(kind)));
        out.push('\n');
    }
    let _ = writeln!(out, "{}", st.heading("de Rham"));
    let _ = writeln!(out, "  b = {}", join(&r.betti));
    out.push('\n');
    let _ = writeln!(out, "Δ = {}", join(&r.delta));
    out.push('\n');

    let _ = writeln!(out, "{}", st.heading("maps"));
    let mut keys: Vec<&String> = r
        .map_details
        .iter()
        .filter(|(k, s)| opts.all_maps || (k.starts_with("BC->DB") || k.starts_with("BC->DR")) && s.source_dim > 0)
        .map(|(k, _)| k)
        .collect();
    keys.sort_by_key(|k| map_order(k));
    let width = keys.iter().map(|k| k.len()).max().unwrap_or(0);
    for k in keys {
        let s = &r.map_details[k];
        let p = r.maps.get(k).map_or("?", |p| p.as_str());
        let _ = writeln!(out, "  {k:<width$}  {p:<12} rank {} ({} -> {})", s.rank, s.source_dim, s.target_dim);
    }
    out.push('\n');

    if opts.representatives {
        let _ = writeln!(out, "{}", st.heading("representatives"));
        let mut entries: Vec<_> = r.representatives.iter().filter(|(_, f)| !f.is_empty()).collect();
        entries.sort_by_key(|(k, _)| group_order(k));
        for (key, forms) in entries {
            let _ = writeln!(out, "  {key:<8} {}", forms.join(", "));
        }
        out.push('\n');
    }

    let c = &r.checks;
    let _ = writeln!(out, "{}", st.heading("checks"));
    for (name, ok) in [
        ("d^2 = 0 and anticommutation", c.bicomplex),
        ("Frolicher inequality", c.frolicher_inequality),
        ("Frolicher equality", c.frolicher_equality),
        ("conjugation symmetry", c.conjugation_symmetry),
        ("Bott-Chern/Aeppli duality", c.duality),
        ("Delta^1 = 0", c.delta1_zero),
        ("Delta >= 0", c.delta_nonnegative),
        ("BC -> DR -> A composition", c.map_composition),
    ] {
        let _ = writeln!(out, "  {name:<30}{}", st.flag(ok));
    }
    out
}

pub fn render_json(r: &SurfaceReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<SurfaceReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// `theory,p,q,dim` rows; de Rham rows put the degree in `p` and leave `q` empty.
pub fn render_csv(r: &SurfaceReport) -> String {
    let mut out = String::from("theory,p,q,dim\n");
    for kind in [Kind::Dolbeault, Kind::ConjDolbeault, Kind::BottChern, Kind::Aeppli] {
        for (&(p, q), h) in all_bidegrees(r.n).iter().zip(r.grid(kind)) {
            let _ = writeln!(out, "{},{p},{q},{h}", kind.name());
        }
    }
    for (k, b) in r.betti.iter().enumerate() {
        let _ = writeln!(out, "{},{k},,{b}", Kind::DeRham.name());
    }
    out
}
