mod common;

use std::cmp::Ordering;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

use ptwitness::opalg::{
    antinormal_to_normal, compare_indices, enumerate_indices, indices_up_to_degree, multiply,
    MultiIndex, NormalPolynomial,
};

fn index_strategy(max: u32) -> impl Strategy<Value = MultiIndex> {
    (0..=max, 0..=max, 0..=max, 0..=max).prop_map(|(n, m, k, l)| MultiIndex::new(n, m, k, l))
}

fn coeff_strategy() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn poly_strategy(max_exp: u32, max_terms: usize) -> impl Strategy<Value = NormalPolynomial> {
    prop::collection::vec((index_strategy(max_exp), coeff_strategy()), 0..=max_terms)
        .prop_map(NormalPolynomial::from_terms)
}

fn close(p: &NormalPolynomial, q: &NormalPolynomial, tol: f64) -> bool {
    let diff = p - q;
    let ok = diff.terms().all(|(_, c)| c.norm() <= tol);
    ok
}

#[test]
fn antinormal_matches_dense_products() {
    let dim = 12;
    for n in 0..=4 {
        for m in 0..=4 {
            // aⁿ a†ᵐ
            let dense = common::dense_single(0, n, dim) * common::dense_single(m, 0, dim);
            let mut via_formula = nalgebra::DMatrix::zeros(dim, dim);
            for (u, c) in antinormal_to_normal(n, m).terms() {
                via_formula += common::dense_single(u.n, u.m, dim) * *c;
            }
            // exact on columns whose raised level stays inside the truncation
            for row in 0..dim {
                for col in 0..dim - m as usize {
                    let (x, y) = (via_formula[(row, col)], dense[(row, col)]);
                    assert!(
                        (x - y).norm() <= 1e-12 * y.norm().max(1.0),
                        "n={n} m={m} ({row},{col})"
                    );
                }
            }
        }
    }
}

#[test]
fn two_mode_product_matches_dense_oracle() {
    let mut r = rng(7);
    let dim = 10;
    for _ in 0..40 {
        let p = random_poly(&mut r, 3, 1);
        let q = random_poly(&mut r, 3, 1);
        let pq = multiply(&p, &q).unwrap();
        let lhs = dense_poly(&p, dim, dim) * dense_poly(&q, dim, dim);
        let rhs = dense_poly(&pq, dim, dim);
        let keep = dim - (p.degree() + q.degree()) as usize;
        assert!(block_agrees(&lhs, &rhs, dim, keep, 1e-10));
    }
}

#[test]
fn enumeration_is_sorted_and_complete() {
    let idx = indices_up_to_degree(5);
    assert!(idx.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(enumerate_indices(idx.len()), idx);
    // 1 + 4 + 10 + 20 + 35 + 56
    assert_eq!(idx.len(), 126);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_is_total_and_consistent(u in index_strategy(4), v in index_strategy(4), w in index_strategy(4)) {
        let uv = compare_indices(&u, &v);
        prop_assert_eq!(uv, u.cmp(&v));
        prop_assert_eq!(uv == Ordering::Equal, u == v);
        prop_assert_eq!(compare_indices(&v, &u), uv.reverse());
        if u <= v && v <= w {
            prop_assert!(u <= w);
        }
        if u.degree() < v.degree() {
            prop_assert_eq!(uv, Ordering::Less);
        }
    }

    #[test]
    fn product_is_associative(p in poly_strategy(1, 3), q in poly_strategy(1, 3), s in poly_strategy(1, 3)) {
        let left = multiply(&multiply(&p, &q).unwrap(), &s).unwrap();
        let right = multiply(&p, &multiply(&q, &s).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-9));
    }

    #[test]
    fn product_distributes(p in poly_strategy(2, 3), q in poly_strategy(2, 3), s in poly_strategy(2, 3)) {
        let left = multiply(&p, &(&q + &s)).unwrap();
        let right = &multiply(&p, &q).unwrap() + &multiply(&p, &s).unwrap();
        prop_assert!(close(&left, &right, 1e-10));
    }

    #[test]
    fn adjoint_reverses_products(p in poly_strategy(2, 3), q in poly_strategy(2, 3)) {
        let left = multiply(&p, &q).unwrap().adjoint();
        let right = multiply(&q.adjoint(), &p.adjoint()).unwrap();
        prop_assert!(close(&left, &right, 1e-10));
        prop_assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn pt_is_an_involution(p in poly_strategy(4, 5)) {
        prop_assert_eq!(p.pt_transform().pt_transform(), p.clone());
        prop_assert_eq!(p.pt_transform().degree(), p.degree());
    }

    #[test]
    fn pt_commutes_with_adjoint(p in poly_strategy(4, 5)) {
        prop_assert_eq!(p.pt_transform().adjoint(), p.adjoint().pt_transform());
    }

    #[test]
    fn render_parse_round_trip(p in poly_strategy(4, 5)) {
        let text = p.to_string();
        let back: NormalPolynomial = text.parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn antinormal_leading_term(n in 0u32..8, m in 0u32..8) {
        let p = antinormal_to_normal(n, m);
        prop_assert_eq!(p.coeff(&MultiIndex::new(m, n, 0, 0)), Complex64::new(1.0, 0.0));
        prop_assert_eq!(p.len() as u32, n.min(m) + 1);
        prop_assert!(p.terms().all(|(_, c)| c.im == 0.0 && c.re > 0.0));
    }
}
