mod common;

use std::sync::Arc;

use cobord_core::algebra::{Base, Generator, GradedElement, GradedRingSpec, Ring, SeriesVars, TruncatedSeries};
use cobord_core::genera::*;
use common::*;
use num_rational::BigRational;
use proptest::prelude::*;

#[test]
fn todd_matches_oracle() {
    let t = todd(8);
    let oracle = todd_tangential(8);
    for n in 1..=8 {
        let v = cpn_from_tangential(&oracle, n);
        assert_eq!(v, q(1, 1));
        assert_eq!(genus_cpn(&t, n as u32).unwrap().as_constant().unwrap(), v);
    }
}

#[test]
fn l_genus_matches_oracle() {
    let l = l_genus(8);
    let oracle = l_tangential(8);
    for n in 1..=8 {
        let v = cpn_from_tangential(&oracle, n);
        let expected = if n % 2 == 0 { q(1, 1) } else { q(0, 1) };
        assert_eq!(v, expected);
        assert_eq!(genus_cpn(&l, n as u32).unwrap().as_constant().unwrap(), v);
    }
}

#[test]
fn a_hat_matches_oracle() {
    let a = a_hat(8);
    let oracle = a_hat_tangential(8);
    // frozen oracle output
    let frozen = [(2, q(-1, 8)), (4, q(3, 128)), (6, q(-5, 1024)), (8, q(35, 32768))];
    for (n, v) in frozen {
        assert_eq!(cpn_from_tangential(&oracle, n), v);
        assert_eq!(genus_cpn(&a, n as u32).unwrap().as_constant().unwrap(), v);
    }
}

#[test]
fn elliptic_matches_binomial_oracle() {
    // genus(CP^n) = [t^n] (1 - 2 delta t^2 + epsilon t^4)^{-1/2}
    let e = elliptic(6);
    let ring = e.ring().clone();
    let half = q(-1, 2);
    let mut expected = vec![GradedElement::zero(&ring); 7];
    for j in 0..=3u32 {
        let term = binom(&half, j);
        for i in 0..=j {
            let n = 2 * i + 4 * (j - i);
            if n > 6 {
                continue;
            }
            let c = term.clone()
                * binom(&BigRational::from_integer(j.into()), i)
                * BigRational::from_integer(num_bigint::BigInt::from(-2).pow(i));
            let text = format!("delta^{i}*epsilon^{}", j - i);
            let mono = GradedElement::parse(&ring, &text).unwrap().scale(&c).unwrap();
            expected[n as usize] = expected[n as usize].add(&mono).unwrap();
        }
    }
    for n in 1..=6u32 {
        assert_eq!(genus_cpn(&e, n).unwrap(), expected[n as usize], "n = {n}");
    }
    assert_eq!(genus_cpn(&e, 2).unwrap().to_string(), "delta");
    assert_eq!(genus_cpn(&e, 4).unwrap().to_string(), "-1/2*epsilon + 3/2*delta^2");
}

#[test]
fn elliptic_degeneration_golden() {
    let e = elliptic_rational(q(1, 1), q(1, 1), 4);
    assert!(genus_cpn(&e, 1).unwrap().is_zero());
    assert!(genus_cpn(&e, 2).unwrap().is_one());
    assert!(genus_cpn(&e, 4).unwrap().is_one());
}

#[test]
fn builtins_cross_route() {
    for phi in [todd(6), l_genus(6), a_hat(6), elliptic(6)] {
        for n in 1..=6 {
            assert_eq!(genus_cpn(&phi, n).unwrap(), genus_cpn_via_chern(&phi, n).unwrap());
        }
    }
}

/// `Q[a1, .., a6]` with `deg a_i = -2i`.
fn coeff_ring() -> Ring {
    let gens = (1..=6).map(|i| Generator::new(format!("a{i}"), -2 * i)).collect();
    GradedRingSpec::new(gens, Base::Q, (-12, 0)).unwrap().into_ring()
}

/// `phi_i = r_i a_i + s_i a_1^i`.
fn graded_phi(rs: &[(i64, i64)]) -> CharacteristicSeries {
    let ring = coeff_ring();
    let coeffs: Vec<_> = rs
        .iter()
        .enumerate()
        .map(|(i, &(r, s))| {
            let a = GradedElement::generator(&ring, &format!("a{}", i + 1)).unwrap();
            let a1 = GradedElement::generator(&ring, "a1").unwrap().pow(i as u32 + 1).unwrap();
            a.scale(&q(r, 1)).unwrap().add(&a1.scale(&q(s, 1)).unwrap()).unwrap()
        })
        .collect();
    CharacteristicSeries::from_coefficients(&ring, &coeffs, 6, None).unwrap()
}

fn rational_phi(cs: &[(i64, i64)]) -> CharacteristicSeries {
    let coeffs: Vec<_> = cs.iter().map(|&(n, d)| q(n, d)).collect();
    CharacteristicSeries::from_rationals(&coeffs, 6, None).unwrap()
}

fn elementary(ring: &Ring, vars: &Arc<SeriesVars>, idx: &[usize], order: u32) -> Vec<TruncatedSeries> {
    // prod (1 + z_i) = sum_k e_k
    let mut total = TruncatedSeries::one(ring, vars, order);
    for &i in idx {
        let f = TruncatedSeries::one(ring, vars, order).add(&TruncatedSeries::var(ring, vars, i, order)).unwrap();
        total = total.mul(&f).unwrap();
    }
    (1..=idx.len())
        .map(|k| {
            let mut e = TruncatedSeries::zero(ring, vars, order);
            for (m, c) in total.terms() {
                if m.iter().sum::<u32>() == k as u32 {
                    e.set(m.clone(), c.clone());
                }
            }
            e
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn cross_route_random(rs in prop::collection::vec((-5i64..6, -5i64..6), 6)) {
        let phi = graded_phi(&rs);
        for n in 1..=6 {
            prop_assert_eq!(genus_cpn(&phi, n).unwrap(), genus_cpn_via_chern(&phi, n).unwrap());
        }
    }

    #[test]
    fn weighted_homogeneity(rs in prop::collection::vec((-5i64..6, -5i64..6), 6)) {
        let phi = graded_phi(&rs);
        let k = k_phi(&phi, 6).unwrap();
        for n in 1..=6u32 {
            for (exps, c) in k.k(n).terms() {
                prop_assert_eq!(ChernPoly::weight(exps), 2 * n);
                prop_assert!(c.is_homogeneous_of(-2 * n as i64));
            }
        }
    }

    #[test]
    fn whitney_concatenation(
        cs in prop::collection::vec((-6i64..7, 1i64..5), 6),
        split in (1usize..4, 1usize..4),
    ) {
        let phi = rational_phi(&cs);
        let k = k_phi(&phi, 6).unwrap();
        let ring = phi.ring().clone();
        let (p, r) = split;
        let names: Vec<String> = (0..p + r).map(|i| format!("z{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let vars = SeriesVars::degree_two(&refs);
        let one = TruncatedSeries::one(&ring, &vars, 6);
        let all: Vec<usize> = (0..p + r).collect();
        let lhs = eval_sequence(&k, &one, &elementary(&ring, &vars, &all, 6)).unwrap();
        let left = eval_sequence(&k, &one, &elementary(&ring, &vars, &all[..p], 6)).unwrap();
        let right = eval_sequence(&k, &one, &elementary(&ring, &vars, &all[p..], 6)).unwrap();
        prop_assert_eq!(lhs, left.mul(&right).unwrap());
    }

    #[test]
    fn trailing_zero_classes(cs in prop::collection::vec((-6i64..7, 1i64..5), 4)) {
        let phi = rational_phi(&cs);
        let k = k_phi(&phi, 4).unwrap();
        let ring = phi.ring().clone();
        let vars = SeriesVars::degree_two(&["x", "y"]);
        let one = TruncatedSeries::one(&ring, &vars, 4);
        let mut short = elementary(&ring, &vars, &[0, 1], 4);
        let a = eval_sequence(&k, &one, &short).unwrap();
        short.push(TruncatedSeries::zero(&ring, &vars, 4));
        short.push(TruncatedSeries::zero(&ring, &vars, 4));
        prop_assert_eq!(a, eval_sequence(&k, &one, &short).unwrap());
    }
}
