use std::f64::consts::PI;
use std::sync::Arc;

use cobord_core::algebra::{Base, Generator, GradedRingSpec};
use cobord_core::formcalc::*;
use proptest::prelude::*;

fn graded_coeffs() -> Arc<CoefficientSpace> {
    let r = GradedRingSpec::new(vec![Generator::new("p1", -2), Generator::new("p2", -4)], Base::Q, (-4, 0))
        .unwrap()
        .into_ring();
    CoefficientSpace::new(&r).unwrap()
}

fn random_mixed(mesh: &Arc<Mesh>, coeffs: &Arc<CoefficientSpace>, seed: u64) -> SampledForm {
    let mut rng = seeded_rng(seed);
    let mut slots = Vec::new();
    for m in 0..=mesh.full_mask() {
        for b in 0..coeffs.dim() {
            slots.push((m, b));
        }
    }
    random_form(mesh, coeffs, &slots, 2, &mut rng).unwrap()
}

fn random_homogeneous(mesh: &Arc<Mesh>, coeffs: &Arc<CoefficientSpace>, k: u32, seed: u64) -> SampledForm {
    let mut rng = seeded_rng(seed);
    let slots: Vec<_> = (0..=mesh.full_mask())
        .filter(|m| m.count_ones() == k)
        .flat_map(|m| (0..coeffs.dim()).map(move |b| (m, b)))
        .collect();
    random_form(mesh, coeffs, &slots, 2, &mut rng).unwrap()
}

#[test]
fn wedge_is_pointwise() {
    let m = Mesh::torus(2, 16).unwrap();
    let s = CoefficientSpace::scalar();
    let f = SampledForm::from_fn(&m, &s, 0b01, 0, |x| (2.0 * PI * x[0]).sin()).unwrap();
    let g = SampledForm::from_fn(&m, &s, 0b10, 0, |x| (2.0 * PI * x[1]).cos()).unwrap();
    let want = SampledForm::from_fn(&m, &s, 0b11, 0, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()).unwrap();
    assert_eq!(f.wedge(&g).unwrap().max_diff(&want).unwrap(), 0.0);
}

#[test]
fn derivative_examples() {
    let m = Mesh::torus(1, 32).unwrap();
    let s = CoefficientSpace::scalar();
    let f = SampledForm::from_fn(&m, &s, 0, 0, |x| (2.0 * PI * x[0]).sin()).unwrap();
    let want = SampledForm::from_fn(&m, &s, 1, 0, |x| 2.0 * PI * (2.0 * PI * x[0]).cos()).unwrap();
    assert!(exterior_d(&f).max_diff(&want).unwrap() <= 1e-10);
    let t2 = Mesh::torus(2, 8).unwrap();
    assert_eq!(exterior_d(&SampledForm::one(&t2, &s)).max_abs(), 0.0);
    let top = SampledForm::from_fn(&t2, &s, 0b11, 0, |_| 1.0).unwrap();
    assert_eq!(exterior_d(&top).max_abs(), 0.0);
}

#[test]
fn fiber_integration_examples() {
    let s = CoefficientSpace::scalar();
    let t2 = Mesh::torus(2, 8).unwrap();
    let top = SampledForm::from_fn(&t2, &s, 0b11, 0, |_| 1.0).unwrap();
    let pt = fiber_integrate(&top, 2).unwrap();
    assert!((pt.value(0, 0, 0) - 1.0).abs() < 1e-15);

    let t4 = Mesh::torus(4, 4).unwrap();
    let w = SampledForm::from_fn(&t4, &s, 0b1100, 0, |_| 5.0).unwrap();
    let base = fiber_integrate(&w, 2).unwrap();
    assert_eq!(base.mesh().dim(), 2);
    let five = SampledForm::from_fn(base.mesh(), &s, 0, 0, |_| 5.0).unwrap();
    assert!(base.max_diff(&five).unwrap() < 1e-14);

    let partial_fiber = SampledForm::from_fn(&t4, &s, 0b0111, 0, |_| 1.0).unwrap();
    assert_eq!(fiber_integrate(&partial_fiber, 2).unwrap().max_abs(), 0.0);

    let cyl = Mesh::new(vec![Factor::Interval { n: 8 }, Factor::Circle { n: 8 }]).unwrap();
    assert!(fiber_integrate(&SampledForm::one(&cyl, &s), 2).is_err());
}

#[test]
fn interval_integration_examples() {
    let s = CoefficientSpace::scalar();
    let cyl = Mesh::new(vec![Factor::Interval { n: 8 }, Factor::Circle { n: 8 }]).unwrap();
    let pulled = SampledForm::from_fn(&cyl, &s, 0b10, 0, |x| x[1].cos()).unwrap();
    assert_eq!(fiber_integrate_interval(&pulled).unwrap().max_abs(), 0.0);
    let beta = SampledForm::from_fn(&cyl, &s, 0b11, 0, |x| (2.0 * PI * x[1]).cos()).unwrap();
    let want = SampledForm::from_fn(&Mesh::torus(1, 8).unwrap(), &s, 1, 0, |x| (2.0 * PI * x[0]).cos()).unwrap();
    assert!(fiber_integrate_interval(&beta).unwrap().max_diff(&want).unwrap() < 1e-14);
    let t_omega = SampledForm::from_fn(&cyl, &s, 0b11, 0, |x| x[0] * (2.0 * PI * x[1]).cos()).unwrap();
    assert!(fiber_integrate_interval(&t_omega).unwrap().max_diff(&want.scale(0.5)).unwrap() < 1e-14);
    assert!(fiber_integrate_interval(&SampledForm::one(&Mesh::torus(1, 8).unwrap(), &s)).is_err());
}

#[test]
fn period_examples() {
    let s = CoefficientSpace::scalar();
    let t2 = Mesh::torus(2, 16).unwrap();
    let dx = SampledForm::from_fn(&t2, &s, 0b01, 0, |_| 1.0).unwrap();
    let ps = periods(&dx, 1e-10).unwrap();
    let one_dim: Vec<_> = ps.iter().filter(|p| p.directions.len() == 1).map(|p| p.values[0]).collect();
    assert_eq!(one_dim, [1.0, 0.0]);
    let n_top = SampledForm::from_fn(&t2, &s, 0b11, 0, |_| 3.0).unwrap();
    assert!((periods(&n_top, 1e-10).unwrap()[3].values[0] - 3.0).abs() < 1e-13);
    let f = SampledForm::from_fn(&t2, &s, 0, 0, |x| (2.0 * PI * (x[0] + x[1])).sin()).unwrap();
    let exact = exterior_d(&f);
    for p in periods(&exact, 1e-10).unwrap() {
        assert!(p.values[0].abs() <= 1e-8);
    }
}

#[test]
fn reversing_the_interval_negates_the_integral() {
    let s = CoefficientSpace::scalar();
    let cyl = Mesh::new(vec![Factor::Interval { n: 8 }, Factor::Circle { n: 8 }]).unwrap();
    let w = random_homogeneous(&cyl, &s, 2, 3);
    let rev = MeshMap::new(&cyl, &cyl, vec![Coord::Reversed(0), Coord::Source(1)]).unwrap();
    let a = fiber_integrate_interval(&w).unwrap();
    let b = fiber_integrate_interval(&rev.pullback(&w).unwrap()).unwrap();
    assert!(a.add(&b).unwrap().max_abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let m = Mesh::torus(3, 32).unwrap();
        let w = random_mixed(&m, &graded_coeffs(), seed);
        prop_assert!(exterior_d(&exterior_d(&w)).max_abs() <= 1e-8);
    }

    #[test]
    fn leibniz(seed in any::<u64>(), k in 0u32..3) {
        let m = Mesh::torus(3, 32).unwrap();
        let c = graded_coeffs();
        let w = random_homogeneous(&m, &c, k, seed);
        let e = random_mixed(&m, &c, seed ^ 0x5555);
        let lhs = exterior_d(&w.wedge(&e).unwrap());
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = exterior_d(&w).wedge(&e).unwrap().axpy(sign, &w.wedge(&exterior_d(&e)).unwrap()).unwrap();
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-8);
    }

    #[test]
    fn stokes_along_fibers(seed in any::<u64>(), fiber_dim in 1usize..3) {
        let m = Mesh::torus(3, 32).unwrap();
        let w = random_mixed(&m, &graded_coeffs(), seed);
        let lhs = fiber_integrate(&exterior_d(&w), fiber_dim).unwrap();
        let rhs = exterior_d(&fiber_integrate(&w, fiber_dim).unwrap());
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-8);
    }

    #[test]
    fn homotopy_formula(seed in any::<u64>()) {
        let m = Mesh::cylinder(32, &Mesh::torus(2, 32).unwrap()).unwrap();
        let w = random_mixed(&m, &graded_coeffs(), seed);
        let lhs = exterior_d(&fiber_integrate_interval(&w).unwrap())
            .add(&fiber_integrate_interval(&exterior_d(&w)).unwrap())
            .unwrap();
        let rhs = restrict_interval(&w, true).unwrap().sub(&restrict_interval(&w, false).unwrap()).unwrap();
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-6);
    }

    #[test]
    fn fubini(seed in any::<u64>()) {
        let m = Mesh::torus(3, 32).unwrap();
        let w = random_mixed(&m, &graded_coeffs(), seed);
        let staged = fiber_integrate(&fiber_integrate(&w, 1).unwrap(), 1).unwrap();
        let direct = fiber_integrate(&w, 2).unwrap();
        prop_assert!(staged.max_diff(&direct).unwrap() <= 1e-8);
    }

    #[test]
    fn pullback_commutes_with_d(seed in any::<u64>()) {
        let m = Mesh::torus(3, 16).unwrap();
        let t2 = Mesh::torus(2, 16).unwrap();
        let w = random_mixed(&t2, &CoefficientSpace::scalar(), seed);
        let diag = MeshMap::new(&m, &t2, vec![Coord::Source(2), Coord::Source(0)]).unwrap();
        let lhs = exterior_d(&diag.pullback(&w).unwrap());
        let rhs = diag.pullback(&exterior_d(&w)).unwrap();
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-8);
    }
}
