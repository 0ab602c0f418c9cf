mod common;

use bicohom::catalog;
use bicohom::cohomology::{frolicher_check, is_symmetric, Cohomologies, Kind};
use bicohom::exterior::all_bidegrees;
use bicohom::linalg::{quotient, Matrix, Subspace};
use bicohom::{Form, GaussianRational};
use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn field_axioms(a in small_gaussian(), b in small_gaussian(), c in small_gaussian()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &(-&a), GaussianRational::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
        }
    }

    #[test]
    fn conjugation_is_a_field_automorphism(a in small_gaussian(), b in small_gaussian()) {
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert!((&a * &a.conj()).is_real());
    }

    #[test]
    fn scalar_text_round_trip(a in small_gaussian()) {
        let back: GaussianRational = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }
}

fn form_any_degree(n: usize) -> impl Strategy<Value = Form> {
    let degrees: Vec<(usize, usize)> = all_bidegrees(n);
    prop::sample::select(degrees).prop_flat_map(move |(p, q)| random_form(n, p, q))
}

fn degree(f: &Form) -> usize {
    f.terms().next().map_or(0, |(m, _)| m.degree())
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn wedge_is_associative(a in form_any_degree(3), b in form_any_degree(3), c in form_any_degree(3)) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn wedge_is_graded_commutative(a in form_any_degree(3), b in form_any_degree(3)) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign = if degree(&a) * degree(&b) % 2 == 1 { -GaussianRational::one() } else { GaussianRational::one() };
        prop_assert_eq!(ab, ba.scale(&sign));
    }

    #[test]
    fn conjugation_respects_wedge(a in form_any_degree(2), b in form_any_degree(2)) {
        prop_assert_eq!(a.wedge(&b).unwrap().conjugate(), a.conjugate().wedge(&b.conjugate()).unwrap());
        prop_assert_eq!(a.conjugate().conjugate(), a);
    }
}

proptest! {
    #![proptest_config(config(160))]

    #[test]
    fn rank_matches_oracles(m in matrix(4, 4)) {
        let r = m.rank();
        prop_assert_eq!(r, oracle_rank(&m));
        prop_assert_eq!(r, minors_rank(&m));
        prop_assert_eq!(m.transpose().rank(), r);
    }

    #[test]
    fn rank_nullity(m in matrix(5, 6)) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(kernel.dim() + m.rank(), m.cols());
        for v in kernel.basis() {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(m.image_basis().dim(), m.rank());
    }

    #[test]
    fn subspace_dimension_formula(a in matrix(4, 5), b in matrix(4, 5)) {
        prop_assume!(a.cols() == b.cols());
        let u = Subspace::from_matrix(&a);
        let w = Subspace::from_matrix(&b);
        let sum = u.sum(&w).unwrap();
        let cap = u.intersection(&w).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + w.dim());
        prop_assert!(u.contains_subspace(&cap) && w.contains_subspace(&cap));
        prop_assert!(sum.contains_subspace(&u) && sum.contains_subspace(&w));
    }

    #[test]
    fn quotient_reduction(a in matrix(3, 5), b in matrix(3, 5), coeffs in prop::collection::vec(small_gaussian(), 6)) {
        prop_assume!(a.cols() == b.cols());
        let small = Subspace::from_matrix(&a);
        let big = small.sum(&Subspace::from_matrix(&b)).unwrap();
        let q = quotient(&big, &small).unwrap();
        prop_assert_eq!(q.dim(), big.dim() - small.dim());
        // v in big, w in small: [v + w] = [v]
        let combine = |basis: Vec<Vec<GaussianRational>>, cs: &[GaussianRational]| {
            let mut v = vec![GaussianRational::zero(); a.cols()];
            for (row, c) in basis.iter().zip(cs) {
                for (x, y) in v.iter_mut().zip(row) {
                    *x += &(c * y);
                }
            }
            v
        };
        let v = combine(big.basis(), &coeffs);
        let w = combine(small.basis(), &coeffs[3..]);
        let vw: Vec<GaussianRational> = v.iter().zip(&w).map(|(x, y)| x + y).collect();
        prop_assert_eq!(q.reduce(&vw).unwrap(), q.reduce(&v).unwrap());
        prop_assert!(q.is_trivial(&w));
    }

    #[test]
    fn inverse_is_two_sided(m in invertible(3)) {
        let inv = m.inverse().unwrap();
        prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(3));
        prop_assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(3));
    }
}

fn computed_dims(b: &bicohom::model::Bicomplex) -> OracleDims {
    let c = Cohomologies::compute(b).unwrap();
    OracleDims {
        betti: c.betti(),
        hodge: c.grid(Kind::Dolbeault),
        conj_hodge: c.grid(Kind::ConjDolbeault),
        bott_chern: c.grid(Kind::BottChern),
        aeppli: c.grid(Kind::Aeppli),
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn random_bicomplexes(eqs in two_step_nilpotent()) {
        let b = bicomplex(&eqs);
        let n = b.n();
        prop_assert!(b.verify().is_empty());
        for k in 0..2 * n {
            prop_assert!(b.total_d(k + 1).mul(&b.total_d(k)).unwrap().is_zero());
        }
        let dims = computed_dims(&b);
        prop_assert_eq!(&dims, &oracle_dims(&b));

        // conjugation: h_del^{p,q} = h_delbar^{q,p}, BC and A symmetric
        let swapped: Vec<usize> = all_bidegrees(n)
            .iter()
            .map(|&(p, q)| dims.conj_hodge[all_bidegrees(n).iter().position(|&x| x == (q, p)).unwrap()])
            .collect();
        prop_assert_eq!(&swapped, &dims.hodge);
        prop_assert!(is_symmetric(n, &dims.bott_chern));
        prop_assert!(is_symmetric(n, &dims.aeppli));
        prop_assert!(frolicher_check(n, &dims.hodge, &dims.betti).0);
    }

    #[test]
    fn leibniz_rule(eqs in two_step_nilpotent(), pick in 0usize..16) {
        let n = eqs.n();
        let a = Form::phi(n, 1 + pick % n).add(&Form::phibar(n, 1 + (pick / 2) % n)).unwrap();
        let b = Form::phi(n, n).wedge(&Form::phibar(n, 1)).unwrap();
        let lhs = eqs.d(&a.wedge(&b).unwrap());
        let rhs = eqs.d(&a).wedge(&b).unwrap().sub(&a.wedge(&eqs.d(&b)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn del_is_conjugate_of_delbar(eqs in two_step_nilpotent(), pq in 0usize..9) {
        let b = bicomplex(&eqs);
        let n = b.n();
        let (p, q) = all_bidegrees(n)[pq % all_bidegrees(n).len()];
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        let x = random_form(n, p, q).new_tree(&mut runner).unwrap().current();
        let del_x = Form::from_coordinates(n, p + 1, q, &b.del(p, q).mul_vec(&x.coordinates(p, q).unwrap()).unwrap());
        let cx = x.conjugate();
        let delbar_cx = b.delbar(q, p).mul_vec(&cx.coordinates(q, p).unwrap()).unwrap();
        let via_conj = Form::from_coordinates(n, q, p + 1, &delbar_cx).map(|f| f.conjugate());
        match (del_x, via_conj) {
            (Ok(a), Ok(c)) => prop_assert_eq!(a, c),
            (a, c) => prop_assert_eq!(a.is_err(), c.is_err()),
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn grids_do_not_depend_on_the_coframe(a in invertible(2), pick in 0usize..8) {
        let id = catalog::ids().nth(pick).unwrap();
        let inst = catalog::get(id, &no_params()).unwrap();
        let eqs = &inst.complex.equations;
        let changed = change_coframe(eqs, &a);
        let b1 = bicomplex(eqs);
        let b2 = bicomplex(&changed);
        prop_assert!(b2.verify().is_empty());
        prop_assert_eq!(computed_dims(&b1), computed_dims(&b2));
    }
}

#[test]
fn catalog_dims_match_rank_formulas() {
    for id in catalog::ids() {
        let inst = catalog::get(id, &no_params()).unwrap();
        let b = bicomplex(&inst.complex.equations);
        assert_eq!(computed_dims(&b), oracle_dims(&b), "{id}");
    }
}
