#![allow(dead_code)]

use std::collections::BTreeMap;

use bicohom::exterior::{all_bidegrees, basis, bidegrees_of_degree, dim_bidegree};
use bicohom::linalg::Matrix;
use bicohom::model::{build_bicomplex, Bicomplex, ComplexStructureEquations};
use bicohom::{Form, GaussianRational, MultiIndex};
use num_traits::{One, Zero};
use proptest::prelude::*;

pub fn g(a: i64, b: i64) -> GaussianRational {
    GaussianRational::from_fractions(a, 1, b, 1)
}

pub fn small_gaussian() -> impl Strategy<Value = GaussianRational> {
    (-3i64..=3, 1i64..=3, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| GaussianRational::from_fractions(a, b, c, d))
}

/// Mostly zero, so that random matrices have interesting ranks.
pub fn sparse_gaussian() -> impl Strategy<Value = GaussianRational> {
    prop_oneof![3 => Just(GaussianRational::zero()), 2 => small_gaussian()]
}

pub fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(sparse_gaussian(), r * c).prop_map(move |v| {
            let rows: Vec<Vec<GaussianRational>> = v.chunks(c).map(|x| x.to_vec()).collect();
            Matrix::from_rows(c, &rows).unwrap()
        })
    })
}

/// Rank by a plain elimination written independently of the library.
pub fn oracle_rank(m: &Matrix) -> usize {
    let mut a: Vec<Vec<GaussianRational>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, pivot);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = a[r][c].checked_div(&a[rank][c]).unwrap();
                let pivot_row = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &(&f * y);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant by cofactor expansion along the first row.
pub fn det(a: &[Vec<GaussianRational>]) -> GaussianRational {
    let n = a.len();
    if n == 0 {
        return GaussianRational::one();
    }
    let mut acc = GaussianRational::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GaussianRational>> =
            a[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &a[0][j] * &det(&minor);
        if j % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Largest `k` with a nonzero `k x k` minor.
pub fn minors_rank(m: &Matrix) -> usize {
    let max = m.rows().min(m.cols());
    for k in (1..=max).rev() {
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let sub: Vec<Vec<GaussianRational>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| m.get(r, c).clone()).collect()).collect();
                if !det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

fn hcat(a: &Matrix, b: &Matrix) -> Matrix {
    let mut cols: Vec<Vec<GaussianRational>> = (0..a.cols()).map(|c| a.column(c)).collect();
    cols.extend((0..b.cols()).map(|c| b.column(c)));
    Matrix::from_columns(a.rows(), &cols).unwrap()
}

fn vcat(a: &Matrix, b: &Matrix) -> Matrix {
    let mut rows = a.row_vectors();
    rows.extend(b.row_vectors());
    Matrix::from_rows(a.cols(), &rows).unwrap()
}

/// Dimensions of the five cohomologies from rank formulas alone.
#[derive(Debug, PartialEq, Eq)]
pub struct OracleDims {
    pub betti: Vec<usize>,
    pub hodge: Vec<usize>,
    pub conj_hodge: Vec<usize>,
    pub bott_chern: Vec<usize>,
    pub aeppli: Vec<usize>,
}

pub fn oracle_dims(b: &Bicomplex) -> OracleDims {
    let n = b.n();
    let rk = oracle_rank;
    let del = |p: isize, q: isize| if p < 0 || q < 0 { None } else { Some(b.del(p as usize, q as usize)) };
    let delbar = |p: isize, q: isize| if p < 0 || q < 0 { None } else { Some(b.delbar(p as usize, q as usize)) };
    let ddbar = |p: isize, q: isize| {
        if p < 0 || q < 0 {
            None
        } else {
            let (p, q) = (p as usize, q as usize);
            Some(b.del(p, q + 1).mul(&b.delbar(p, q)).unwrap())
        }
    };
    let r = |m: Option<Matrix>| m.map_or(0, |m| rk(&m));
    let (mut hodge, mut conj_hodge, mut bott_chern, mut aeppli) = (vec![], vec![], vec![], vec![]);
    for (p, q) in all_bidegrees(n) {
        let dim = dim_bidegree(n, p, q);
        let (p, q) = (p as isize, q as isize);
        hodge.push(dim - r(delbar(p, q)) - r(delbar(p, q - 1)));
        conj_hodge.push(dim - r(del(p, q)) - r(del(p - 1, q)));
        let both = vcat(&del(p, q).unwrap(), &delbar(p, q).unwrap());
        bott_chern.push(dim - rk(&both) - r(ddbar(p - 1, q - 1)));
        let image = match (del(p - 1, q), delbar(p, q - 1)) {
            (Some(a), Some(c)) => rk(&hcat(&a, &c)),
            (Some(a), None) => rk(&a),
            (None, Some(c)) => rk(&c),
            (None, None) => 0,
        };
        aeppli.push(dim - r(ddbar(p, q)) - image);
    }
    let betti = (0..=2 * n)
        .map(|k| {
            let dim: usize = bidegrees_of_degree(n, k).iter().map(|&(p, q)| dim_bidegree(n, p, q)).sum();
            dim - rk(&b.total_d(k)) - if k == 0 { 0 } else { rk(&b.total_d(k - 1)) }
        })
        .collect();
    OracleDims { betti, hodge, conj_hodge, bott_chern, aeppli }
}

pub fn mono(n: usize, holo: &[usize], anti: &[usize]) -> MultiIndex {
    MultiIndex::new(n, holo, anti).unwrap()
}

/// Random two-step nilpotent structures: the first `k` generators are
/// closed and the others have differentials in the (2,0) and (1,1) forms
/// built from them. Always integrable with `d^2 = 0`.
pub fn two_step_nilpotent() -> impl Strategy<Value = ComplexStructureEquations> {
    (2usize..=3).prop_flat_map(|n| {
        (1..n).prop_flat_map(move |k| {
            let pairs: Vec<(Vec<usize>, Vec<usize>)> = {
                let mut v = Vec::new();
                for i in 1..=k {
                    for j in i + 1..=k {
                        v.push((vec![i, j], vec![]));
                    }
                    for j in 1..=k {
                        v.push((vec![i], vec![j]));
                    }
                }
                v
            };
            let len = pairs.len();
            prop::collection::vec(prop::collection::vec(sparse_gaussian(), len), n - k).prop_map(move |coeffs| {
                let mut d_phi = vec![Form::zero(n); k];
                for row in coeffs {
                    let mut f = Form::zero(n);
                    for ((h, a), c) in pairs.iter().zip(row) {
                        f.add_term(mono(n, h, a), &c);
                    }
                    d_phi.push(f);
                }
                ComplexStructureEquations::new(n, d_phi).unwrap()
            })
        })
    })
}

/// Rewrites `eqs` in the coframe `psi = A phi`.
pub fn change_coframe(eqs: &ComplexStructureEquations, a: &Matrix) -> ComplexStructureEquations {
    let n = eqs.n();
    let inv = a.inverse().unwrap();
    // phi^b = sum_c inv[b][c] psi^c
    let phi_in_psi: Vec<Form> = (0..n)
        .map(|b| {
            let mut f = Form::zero(n);
            for c in 0..n {
                f.add_term(mono(n, &[c + 1], &[]), inv.get(b, c));
            }
            f
        })
        .collect();
    let substitute = |form: &Form| -> Form {
        let mut out = Form::zero(n);
        for (m, c) in form.terms() {
            let mut acc = Form::constant(n, c.clone());
            for (conj, idx) in m.generators() {
                let gen = if conj { phi_in_psi[idx - 1].conjugate() } else { phi_in_psi[idx - 1].clone() };
                acc = acc.wedge(&gen).unwrap();
            }
            out = out.add(&acc).unwrap();
        }
        out
    };
    let d_psi = (0..n)
        .map(|r| {
            let mut f = Form::zero(n);
            for b in 0..n {
                f = f.add(&eqs.d_phi()[b].scale(a.get(r, b))).unwrap();
            }
            substitute(&f)
        })
        .collect();
    ComplexStructureEquations::new(n, d_psi).unwrap()
}

pub fn invertible(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(small_gaussian(), n * n)
        .prop_map(move |v| {
            let rows: Vec<Vec<GaussianRational>> = v.chunks(n).map(|x| x.to_vec()).collect();
            Matrix::from_rows(n, &rows).unwrap()
        })
        .prop_filter("invertible", |m| m.rank() == m.rows())
}

pub fn random_form(n: usize, p: usize, q: usize) -> impl Strategy<Value = Form> {
    let b = basis(n, p, q).unwrap();
    prop::collection::vec(sparse_gaussian(), b.len()).prop_map(move |cs| Form::from_coordinates(n, p, q, &cs).unwrap())
}

pub fn bicomplex(eqs: &ComplexStructureEquations) -> Bicomplex {
    build_bicomplex(eqs).unwrap()
}

pub fn no_params() -> BTreeMap<String, bicohom::Rational> {
    BTreeMap::new()
}
