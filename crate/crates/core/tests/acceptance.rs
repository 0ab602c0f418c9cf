//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use bicohom::catalog::{self, ExpectedReport};
use bicohom::cohomology::{
    delta, duality_holds, frolicher_check, grid_index, is_symmetric, verify_representatives, Cohomologies, GroupKey, Kind,
    MapKey, MapProperty,
};
use bicohom::dsl;
use bicohom::exterior::all_bidegrees;
use bicohom::linalg::Subspace;
use bicohom::report::diamond_rows;
use bicohom::Rational;
use common::*;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

const SOLVMANIFOLDS: [&str; 6] =
    ["torus", "hyperelliptic", "inoue_sm", "kodaira_primary", "kodaira_secondary", "inoue_spm"];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn compute(id: &str, params: &BTreeMap<String, Rational>) -> Cohomologies {
    let inst = catalog::get(id, params).unwrap();
    Cohomologies::compute(&bicomplex(&inst.complex.equations)).unwrap()
}

fn defaults(id: &str) -> Cohomologies {
    compute(id, &no_params())
}

fn expected(id: &str) -> ExpectedReport {
    catalog::expected(id).unwrap()
}

fn params(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
    pairs.iter().map(|(k, v)| (k.to_string(), Rational::from_integer((*v).into()))).collect()
}

fn pin(c: &Cohomologies, id: &str, kind: Kind, p: usize, q: usize, want: usize) -> Outcome {
    let got = c.dim(kind, p, q);
    ensure(got == want, || format!("{id} {}({p},{q}) = {got}, want {want}", kind.code()))
}

fn criterion_1() -> Outcome {
    for id in SOLVMANIFOLDS {
        let c = defaults(id);
        let e = expected(id);
        for kind in [Kind::Dolbeault, Kind::BottChern, Kind::Aeppli] {
            let got = c.grid(kind);
            let want = e.grid(kind).unwrap();
            ensure(got == want, || format!("{id} {}: {got:?} != {want:?}", kind.code()))?;
        }
    }
    let kp = defaults("kodaira_primary");
    pin(&kp, "kodaira_primary", Kind::Dolbeault, 0, 1, 2)?;
    pin(&kp, "kodaira_primary", Kind::BottChern, 0, 1, 1)?;
    pin(&kp, "kodaira_primary", Kind::BottChern, 1, 1, 3)?;
    let sm = defaults("inoue_sm");
    pin(&sm, "inoue_sm", Kind::Dolbeault, 1, 1, 0)?;
    pin(&sm, "inoue_sm", Kind::BottChern, 1, 1, 1)
}

fn criterion_2() -> Outcome {
    let literal: [[usize; 5]; 6] =
        [[1, 4, 6, 4, 1], [1, 2, 2, 2, 1], [1, 1, 0, 1, 1], [1, 3, 4, 3, 1], [1, 1, 0, 1, 1], [1, 1, 0, 1, 1]];
    for (id, want) in SOLVMANIFOLDS.iter().zip(literal) {
        let got = defaults(id).betti();
        ensure(got == want, || format!("{id} betti {got:?} != {want:?}"))?;
        let stored = expected(id).betti;
        ensure(stored == want, || format!("{id} stored betti {stored:?} != {want:?}"))?;
    }
    Ok(())
}

fn deltas(c: &Cohomologies) -> Vec<i64> {
    let (bc, ae, b) = (c.grid(Kind::BottChern), c.grid(Kind::Aeppli), c.betti());
    (0..=2 * c.n()).map(|k| delta(c.n(), &bc, &ae, &b, k).unwrap()).collect()
}

fn criterion_3() -> Outcome {
    for (i, id) in SOLVMANIFOLDS.iter().enumerate() {
        let got = deltas(&defaults(id));
        let want = if i < 2 { vec![0; 5] } else { vec![0, 0, 2, 0, 0] };
        ensure(got == want, || format!("{id} delta {got:?} != {want:?}"))?;
        ensure(expected(id).delta == want, || format!("{id} stored delta differs"))?;
    }
    for id in catalog::ids() {
        let d = deltas(&defaults(id));
        ensure(d[1] == 0, || format!("{id} delta^1 = {}", d[1]))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for id in catalog::ids() {
        let inst = catalog::get(id, &no_params()).unwrap();
        let c = Cohomologies::compute(&bicomplex(&inst.complex.equations)).unwrap();
        let coframe = inst.real.as_ref().and_then(|m| m.coframe()).transpose().map_err(|e| e.to_string())?;
        for (key, texts) in &expected(id).representatives {
            let key: GroupKey = key.parse().map_err(|e| format!("{id} {key}: {e}"))?;
            let forms = texts
                .iter()
                .map(|t| dsl::parse_form(t, c.n(), &inst.params, coframe.as_ref()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("{id}: {e}"))?;
            verify_representatives(&forms, c.get(key).unwrap()).map_err(|e| format!("{id}: {e}"))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no representatives listed".into())
}

fn criterion_5() -> Outcome {
    let id = "calabi_eckmann";
    let c = defaults(id);
    let rows = |kind| diamond_rows(2, &c.grid(kind));
    let literal = |v: &[&[usize]]| v.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    let cases = [
        (Kind::Dolbeault, literal(&[&[1], &[0, 1], &[0, 0, 0], &[1, 0], &[1]])),
        (Kind::BottChern, literal(&[&[1], &[0, 0], &[0, 1, 0], &[1, 1], &[1]])),
        (Kind::Aeppli, literal(&[&[1], &[1, 1], &[0, 1, 0], &[0, 0], &[1]])),
    ];
    for (kind, want) in cases {
        let got = rows(kind);
        ensure(got == want, || format!("{} diamond {got:?} != {want:?}", kind.code()))?;
        ensure(expected(id).grid(kind).unwrap() == c.grid(kind), || format!("{} differs from stored grid", kind.code()))?;
    }
    let b = c.betti();
    ensure(b == [1, 1, 0, 1, 1], || format!("betti {b:?}"))?;
    let h11 = c.dim(Kind::BottChern, 1, 1);
    ensure(h11 == b[2] + 1, || format!("h_BC^(1,1) = {h11}, b2 + 1 = {}", b[2] + 1))
}

fn map_property(c: &Cohomologies, key: &str) -> MapProperty {
    let key: MapKey = key.parse().unwrap();
    c.natural_map(key).unwrap().property()
}

fn criterion_6() -> Outcome {
    for id in SOLVMANIFOLDS.iter().chain(&["inoue_sm_halfplane"]) {
        let c = defaults(id);
        let to_db = map_property(&c, "BC->DB:2,1");
        ensure(to_db == MapProperty::Iso, || format!("{id} BC->DB:2,1 is {}", to_db.as_str()))?;
        let to_dr = c.natural_map("BC->DR:2,1".parse().unwrap()).unwrap();
        ensure(to_dr.map.injective, || format!("{id} BC->DR:2,1 has rank {}", to_dr.map.rank))?;
        ensure(expected(id).maps.get("BC->DB:2,1") == Some(&MapProperty::Iso), || format!("{id} stored map"))?;
    }
    let ce = defaults("calabi_eckmann");
    let zero = map_property(&ce, "BC->DB:1,2");
    ensure(zero == MapProperty::Zero, || format!("calabi_eckmann BC->DB:1,2 is {}", zero.as_str()))?;

    let inst = catalog::get("inoue_sm_halfplane", &no_params()).unwrap();
    let coframe = inst.real.as_ref().unwrap().coframe().unwrap().map_err(|e| e.to_string())?;
    let form = dsl::parse_form("e1^e3^e4 + i e2^e3^e4", 2, &inst.params, Some(&coframe)).map_err(|e| e.to_string())?;
    let eqs = &inst.complex.equations;
    ensure(eqs.d(&form).is_zero(), || format!("{form} is not closed"))?;
    let c = Cohomologies::compute(&bicomplex(eqs)).unwrap();
    let class = c.get("DR:3".parse::<GroupKey>().unwrap()).unwrap().class_of(&form).map_err(|e| e.to_string())?;
    ensure(class.iter().any(|x| !num_traits::Zero::is_zero(x)), || format!("{form} is exact"))
}

fn swap_pq(n: usize, grid: &[usize]) -> Vec<usize> {
    all_bidegrees(n).iter().map(|&(p, q)| grid[grid_index(n, q, p)]).collect()
}

fn bicomplex_properties(label: &str, b: &bicohom::model::Bicomplex, catalog_model: bool) -> Outcome {
    let failures = b.verify();
    ensure(failures.is_empty(), || format!("{label}: {}", failures[0].identity))?;
    for k in 0..2 * b.n() {
        ensure(b.total_d(k + 1).mul(&b.total_d(k)).unwrap().is_zero(), || format!("{label}: d^2 != 0 in degree {k}"))?;
    }
    let c = Cohomologies::compute(b).unwrap();
    let n = c.n();
    let (hodge, conj) = (c.grid(Kind::Dolbeault), c.grid(Kind::ConjDolbeault));
    let (bc, ae) = (c.grid(Kind::BottChern), c.grid(Kind::Aeppli));
    ensure(swap_pq(n, &conj) == hodge, || format!("{label}: conjugate Dolbeault is not the transpose"))?;
    ensure(is_symmetric(n, &bc) && is_symmetric(n, &ae), || format!("{label}: BC or A not symmetric"))?;
    let (inequality, equality) = frolicher_check(n, &hodge, &c.betti());
    ensure(inequality, || format!("{label}: Frolicher inequality fails"))?;
    if catalog_model {
        ensure(equality, || format!("{label}: Frolicher equality fails"))?;
        ensure(duality_holds(n, &bc, &ae), || format!("{label}: BC/A duality fails"))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut runner = TestRunner::deterministic();
    for i in 0..40 {
        let eqs = two_step_nilpotent().new_tree(&mut runner).unwrap().current();
        bicomplex_properties(&format!("random structure {i}"), &bicomplex(&eqs), false)?;
    }
    for id in catalog::ids() {
        bicomplex_properties(id, &bicomplex(&catalog::get(id, &no_params()).unwrap().complex.equations), true)?;
    }
    for i in 0..60 {
        let m = matrix(5, 6).new_tree(&mut runner).unwrap().current();
        ensure(m.kernel_basis().dim() + m.rank() == m.cols(), || format!("rank-nullity on matrix {i}"))?;
        ensure(m.rank() == oracle_rank(&m), || format!("rank disagrees with the oracle on matrix {i}"))?;
        let other = matrix(4, 6).new_tree(&mut runner).unwrap().current();
        if other.cols() == m.cols() {
            let (u, w) = (Subspace::from_matrix(&m), Subspace::from_matrix(&other));
            let lhs = u.sum(&w).unwrap().dim() + u.intersection(&w).unwrap().dim();
            ensure(lhs == u.dim() + w.dim(), || format!("subspace dimension formula on pair {i}"))?;
        }
    }
    let grids = |c: &Cohomologies| (c.grid(Kind::Dolbeault), c.grid(Kind::BottChern), c.grid(Kind::Aeppli), c.betti());
    for (id, samples) in [
        ("inoue_sm", vec![params(&[("alpha", 1), ("beta", 0)]), params(&[("alpha", 1), ("beta", 1)]), params(&[("alpha", 2), ("beta", 3)])]),
        ("inoue_spm", vec![params(&[("q", 0)]), params(&[("q", 1)]), params(&[("q", -2)])]),
    ] {
        let first = grids(&compute(id, &samples[0]));
        for s in &samples[1..] {
            ensure(grids(&compute(id, s)) == first, || format!("{id} grids change at {s:?}"))?;
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut compared = 0;
    for id in catalog::ids() {
        let entry = catalog::entry(id).unwrap();
        let Some(doc) = entry.real_without_coframe() else { continue };
        let direct = defaults(id);
        let real = doc.instantiate(&no_params()).map_err(|e| format!("{id}: {e}"))?;
        let derived = Cohomologies::compute(&real.bicomplex().map_err(|e| format!("{id}: {e}"))?).unwrap();
        for kind in [Kind::Dolbeault, Kind::ConjDolbeault, Kind::BottChern, Kind::Aeppli] {
            ensure(derived.grid(kind) == direct.grid(kind), || format!("{id} {} differs between paths", kind.code()))?;
        }
        ensure(derived.betti() == direct.betti(), || format!("{id} betti differs between paths"))?;
        compared += 1;
    }
    ensure(compared == 8, || format!("only {compared} entries have real data"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("Dolbeault and Bott-Chern grids", criterion_1),
        ("Betti numbers", criterion_2),
        ("non-Kahlerness degrees", criterion_3),
        ("listed representatives", criterion_4),
        ("Calabi-Eckmann surface", criterion_5),
        ("natural maps", criterion_6),
        ("property suite", criterion_7),
        ("real and complex paths agree", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let ms = start.elapsed().as_millis();
        match &outcome {
            Ok(()) => println!("criterion {} ({name}): PASS [{ms} ms]", i + 1),
            Err(e) => {
                println!("criterion {} ({name}): FAIL [{ms} ms] {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
