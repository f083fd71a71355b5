//! The acceptance gate: nine criteria, each with its tolerance and time
//! limit, one PASS/FAIL line per criterion.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use cobord_core::algebra::{Base, Generator, GradedElement, GradedRingSpec, Ring, SeriesVars, TruncatedSeries};
use cobord_core::chernweil::{axioms_suite, chern_suite, pushforward_suite, transgression_suite, DemoConfig, SuiteReport};
use cobord_core::fgl::{
    classify_genus, landweber_check, required_order, tor1, FormalGroupLaw, ModulePresentation, RingMap, Verdict,
};
use cobord_core::formcalc::{
    exterior_d, fiber_integrate, fiber_integrate_interval, random_form, restrict_interval, seeded_rng,
    CoefficientSpace, Mesh, SampledForm,
};
use cobord_core::genera::{
    a_hat, eval_sequence, genus_cpn, genus_cpn_via_chern, k_phi, l_genus, todd, CharacteristicSeries, ChernPoly,
    GenusTable,
};
use common::*;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn genus_tables() -> Outcome {
    let (t, l, a) = (todd(8), l_genus(8), a_hat(8));
    let (to, lo, ao) = (todd_tangential(8), l_tangential(8), a_hat_tangential(8));
    for n in 1..=8usize {
        let v = genus_cpn(&t, n as u32).map_err(err)?.as_constant().ok_or("non-constant Todd value")?;
        check(v == q(1, 1) && v == cpn_from_tangential(&to, n), || format!("Todd(CP{n}) = {v}"))?;
    }
    for k in 1..=4usize {
        let v = genus_cpn(&l, 2 * k as u32).map_err(err)?.as_constant().ok_or("non-constant L value")?;
        check(v == q(1, 1) && v == cpn_from_tangential(&lo, 2 * k), || format!("L(CP{}) = {v}", 2 * k))?;
    }
    let v = genus_cpn(&a, 2).map_err(err)?.as_constant().ok_or("non-constant A-hat value")?;
    check(v == q(-1, 8) && v == cpn_from_tangential(&ao, 2), || format!("A-hat(CP2) = {v}"))?;
    let one = CharacteristicSeries::trivial(&GradedRingSpec::rationals(), 8);
    for n in 1..=8 {
        check(genus_cpn(&one, n).map_err(err)?.is_zero(), || format!("phi = 1 gives nonzero on CP{n}"))?;
    }
    Ok("Todd, L, A-hat and phi = 1 tables exact".into())
}

/// `Q[a1, .., a6]` with `deg a_i = -2i`.
fn coeff_ring() -> Ring {
    let gens = (1..=6).map(|i| Generator::new(format!("a{i}"), -2 * i)).collect();
    GradedRingSpec::new(gens, Base::Q, (-12, 0)).unwrap().into_ring()
}

/// `phi_i = r_i a_i + s_i a_1^i` with random small integers.
fn random_graded_phi(rng: &mut impl Rng) -> CharacteristicSeries {
    let ring = coeff_ring();
    let coeffs: Vec<_> = (0..6)
        .map(|i| {
            let (r, s) = (rng.gen_range(-5..6), rng.gen_range(-5..6));
            let a = GradedElement::generator(&ring, &format!("a{}", i + 1)).unwrap();
            let a1 = GradedElement::generator(&ring, "a1").unwrap().pow(i as u32 + 1).unwrap();
            a.scale(&q(r, 1)).unwrap().add(&a1.scale(&q(s, 1)).unwrap()).unwrap()
        })
        .collect();
    CharacteristicSeries::from_coefficients(&ring, &coeffs, 6, None).unwrap()
}

fn random_rational_phi(rng: &mut impl Rng) -> CharacteristicSeries {
    let coeffs: Vec<_> = (0..6).map(|_| q(rng.gen_range(-6..7), rng.gen_range(1..5))).collect();
    CharacteristicSeries::from_rationals(&coeffs, 6, None).unwrap()
}

fn cross_route() -> Outcome {
    let mut rng = seeded_rng(2);
    let mut phis = vec![todd(6), l_genus(6), a_hat(6)];
    phis.extend((0..20).map(|_| random_graded_phi(&mut rng)));
    for (i, phi) in phis.iter().enumerate() {
        for n in 1..=6 {
            let (a, b) = (genus_cpn(phi, n).map_err(err)?, genus_cpn_via_chern(phi, n).map_err(err)?);
            check(a == b, || format!("series {i}, CP{n}: {a} vs {b}"))?;
        }
    }
    Ok(format!("{} series, n = 1..6", phis.len()))
}

fn elementary(ring: &Ring, vars: &Arc<SeriesVars>, idx: &[usize], order: u32) -> Vec<TruncatedSeries> {
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

fn sequence_properties() -> Outcome {
    let mut rng = seeded_rng(3);
    for case in 0..50 {
        let graded = random_graded_phi(&mut rng);
        let k = k_phi(&graded, 6).map_err(err)?;
        for n in 1..=6u32 {
            for (exps, c) in k.k(n).terms() {
                check(ChernPoly::weight(exps) == 2 * n && c.is_homogeneous_of(-2 * n as i64), || {
                    format!("case {case}: K_{n} term {exps:?} has coefficient {c}")
                })?;
            }
        }
        let phi = random_rational_phi(&mut rng);
        let k = k_phi(&phi, 6).map_err(err)?;
        let ring = phi.ring().clone();
        let (p, r) = (rng.gen_range(1..4usize), rng.gen_range(1..4usize));
        let names: Vec<String> = (0..p + r).map(|i| format!("z{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let vars = SeriesVars::degree_two(&refs);
        let one = TruncatedSeries::one(&ring, &vars, 6);
        let all: Vec<usize> = (0..p + r).collect();
        let whole = eval_sequence(&k, &one, &elementary(&ring, &vars, &all, 6)).map_err(err)?;
        let left = eval_sequence(&k, &one, &elementary(&ring, &vars, &all[..p], 6)).map_err(err)?;
        let right = eval_sequence(&k, &one, &elementary(&ring, &vars, &all[p..], 6)).map_err(err)?;
        check(whole == left.mul(&right).map_err(err)?, || format!("case {case}: Whitney fails for split {p}+{r}"))?;
    }
    Ok("50 series, weight <= 6".into())
}

fn quillen() -> Outcome {
    let q_ring = GradedRingSpec::rationals();
    let c = classify_genus(&GenusTable::from_series(&todd(8), 8).map_err(err)?, 8).map_err(err)?;
    let mult = FormalGroupLaw::parse(&q_ring, "x + y - x*y", 8).map_err(err)?;
    check(c.verified() && c.pushed == mult, || format!("Todd classifies {}", c.pushed.series()))?;
    let one = CharacteristicSeries::trivial(&q_ring, 8);
    let c = classify_genus(&GenusTable::from_series(&one, 8).map_err(err)?, 8).map_err(err)?;
    check(c.verified() && c.pushed == FormalGroupLaw::additive(&q_ring, 8), || {
        format!("phi = 1 classifies {}", c.pushed.series())
    })?;
    Ok("x + y - xy and x + y through order 8".into())
}

fn landweber() -> Outcome {
    let primes = [2, 3, 5];
    let order = required_order(&primes, 2);
    let u = |laurent: bool| {
        let g = if laurent { Generator::laurent("u", -2) } else { Generator::new("u", -2) };
        GradedRingSpec::new(vec![g], Base::Z, (-60, 60)).unwrap().into_ring()
    };
    let cases = [
        (FormalGroupLaw::additive(&GradedRingSpec::integers(), order), 1, Verdict::FailsAt(1)),
        (FormalGroupLaw::parse(&u(true), "x + y - u*x*y", order).map_err(err)?, 2, Verdict::ExactThrough(2)),
        (FormalGroupLaw::parse(&u(false), "x + y - u*x*y", order).map_err(err)?, 2, Verdict::FailsAt(2)),
    ];
    for (law, stages, want) in cases {
        for r in landweber_check(&law, &primes, stages).map_err(err)? {
            check(r.verdict == want, || format!("{} at p = {}: {}", law.series(), r.prime, r.verdict.label()))?;
        }
    }
    Ok("additive, Laurent and polynomial multiplicative laws".into())
}

fn tor() -> Outcome {
    let ring = GradedRingSpec::new(vec![Generator::new("x", -2)], Base::Q, (-40, 0)).unwrap().into_ring();
    let qr = GradedRingSpec::rationals();
    let to_q = RingMap::new(&ring, &qr, vec![GradedElement::zero(&qr)]).map_err(err)?;
    let nonzero = |rels: &[Vec<String>]| -> Result<Vec<(i64, usize)>, String> {
        let m = ModulePresentation::parse(&ring, vec![0], rels).map_err(err)?;
        Ok(tor1(&m, &to_q, (-12, 0)).map_err(err)?.into_iter().filter(|d| d.dim > 0).map(|d| (d.degree, d.dim)).collect())
    };
    let free = nonzero(&[])?;
    check(free.is_empty(), || format!("free module: {free:?}"))?;
    let residue = nonzero(&[vec!["x".into()]])?;
    check(residue == [(-2, 1)], || format!("Q over Q[x]: {residue:?}"))?;
    let square = nonzero(&[vec!["x^2".into()]])?;
    check(square == [(-4, 1)], || format!("Q[x]/(x^2): {square:?}"))?;
    Ok("free, residue field and Q[x]/(x^2) in window [-12, 0]".into())
}

fn graded_coeffs() -> Arc<CoefficientSpace> {
    let r = GradedRingSpec::new(vec![Generator::new("p1", -2), Generator::new("p2", -4)], Base::Q, (-4, 0))
        .unwrap()
        .into_ring();
    CoefficientSpace::new(&r).unwrap()
}

fn random_mixed(mesh: &Arc<Mesh>, coeffs: &Arc<CoefficientSpace>, seed: u64) -> SampledForm {
    let slots: Vec<_> = (0..=mesh.full_mask()).flat_map(|m| (0..coeffs.dim()).map(move |b| (m, b))).collect();
    random_form(mesh, coeffs, &slots, 2, &mut seeded_rng(seed)).unwrap()
}

fn calculus() -> Outcome {
    let c = graded_coeffs();
    let t3 = Mesh::torus(3, 32).map_err(err)?;
    let mut worst = [0.0f64; 5];
    for seed in 0..3 {
        let w = random_mixed(&t3, &c, seed);
        let e = random_mixed(&t3, &c, seed + 100);
        let dw = exterior_d(&w);
        worst[0] = worst[0].max(exterior_d(&dw).max_abs());
        // Leibniz on the even and odd parts of w separately.
        for k in 0..=3 {
            let wk = w.degree_part(k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = exterior_d(&wk.wedge(&e).map_err(err)?);
            let rhs = exterior_d(&wk).wedge(&e).map_err(err)?.axpy(sign, &wk.wedge(&exterior_d(&e)).map_err(err)?).map_err(err)?;
            worst[1] = worst[1].max(lhs.max_diff(&rhs).map_err(err)?);
        }
        for fd in 1..=2 {
            let lhs = fiber_integrate(&dw, fd).map_err(err)?;
            let rhs = exterior_d(&fiber_integrate(&w, fd).map_err(err)?);
            worst[2] = worst[2].max(lhs.max_diff(&rhs).map_err(err)?);
        }
        let staged = fiber_integrate(&fiber_integrate(&w, 1).map_err(err)?, 1).map_err(err)?;
        worst[4] = worst[4].max(staged.max_diff(&fiber_integrate(&w, 2).map_err(err)?).map_err(err)?);
    }
    let cyl = Mesh::cylinder(32, &*Mesh::torus(2, 32).map_err(err)?).map_err(err)?;
    for seed in 0..2 {
        let w = random_mixed(&cyl, &c, seed + 200);
        let lhs = exterior_d(&fiber_integrate_interval(&w).map_err(err)?)
            .add(&fiber_integrate_interval(&exterior_d(&w)).map_err(err)?)
            .map_err(err)?;
        let rhs = restrict_interval(&w, true).map_err(err)?.sub(&restrict_interval(&w, false).map_err(err)?).map_err(err)?;
        worst[3] = worst[3].max(lhs.max_diff(&rhs).map_err(err)?);
    }
    let names = ["d o d", "Leibniz", "Stokes", "homotopy", "Fubini"];
    let tols = [1e-8, 1e-8, 1e-8, 1e-6, 1e-8];
    for i in 0..5 {
        check(worst[i] <= tols[i], || format!("{} residual {:.3e} > {:e}", names[i], worst[i], tols[i]))?;
    }
    Ok(names.iter().zip(worst).map(|(n, r)| format!("{n} {r:.1e}")).collect::<Vec<_>>().join(", "))
}

fn summarize(suites: &[SuiteReport], required: &[&str]) -> Outcome {
    let mut worst: Vec<String> = Vec::new();
    for name in required {
        let hits: Vec<_> =
            suites.iter().flat_map(|s| &s.identities).filter(|i| i.name.starts_with(name)).collect();
        check(!hits.is_empty(), || format!("identity `{name}` was not run"))?;
        let max = hits.iter().map(|i| i.residual).fold(0.0, f64::max);
        worst.push(format!("{name} {max:.1e}"));
    }
    for s in suites {
        for i in &s.identities {
            check(i.pass, || format!("{}: residual {:.3e} > {:e}", i.name, i.residual, i.tolerance))?;
        }
    }
    Ok(worst.join(", "))
}

fn chern_weil() -> Outcome {
    let cfg = DemoConfig { n: 32, ..DemoConfig::default() };
    check(cfg.integrality_tol <= 1e-10 && cfg.form_tol <= 1e-8 && cfg.identity_tol <= 1e-6, || "tolerances".into())?;
    check(cfg.charges == (-3..=3).collect::<Vec<_>>(), || "charges".into())?;
    let suites = [chern_suite(&cfg).map_err(err)?, transgression_suite(&cfg).map_err(err)?];
    summarize(&suites, &["integrality charge", "Whitney sum formula", "transgression differential", "A(o) homotopy invariance"])
}

fn smooth_cycles() -> Outcome {
    let cfg = DemoConfig::default();
    let suites = [pushforward_suite(&cfg).map_err(err)?, axioms_suite(&cfg).map_err(err)?];
    summarize(
        &suites,
        &[
            "push-forward of a(w)",
            "push-forward of T",
            "push-forward of R",
            "push-forward of classes",
            "two-stage push-forward",
            "projection formula, R",
            "projection formula, alpha",
            "product formula rewriting",
            "R o a = d",
            "a(w) u x = a(w ^ R(x))",
        ],
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("genus tables", genus_tables, 2),
        ("cross-route genus equality", cross_route, 5),
        ("multiplicative sequence properties", sequence_properties, 5),
        ("Quillen classification", quillen, 5),
        ("Landweber verdicts", landweber, 5),
        ("Tor_1", tor, 2),
        ("exterior calculus", calculus, 10),
        ("Chern-Weil", chern_weil, 20),
        ("push-forward and product suite", smooth_cycles, 60),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (verdict, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("too slow; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("criterion {}: {verdict} {name} ({:.2} s, limit {limit} s): {detail}", i + 1, elapsed.as_secs_f64());
        if verdict == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
