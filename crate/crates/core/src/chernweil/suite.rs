use std::sync::Arc;

use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bundle::{ComplexForm, GeometricBundle};
use super::cycles::{
    compose_orientations, cup_cycles, product_alpha_rewritten, product_cycles, pushforward_cycle, CwContext,
    SmoothCycleDatum, SmoothOrientationDatum,
};
use crate::algebra::{parse_rational, Base, Generator, GradedElement, GradedRingSpec};
use crate::error::{Error, Result};
use crate::formcalc::{
    closedness_residual, exterior_d, fiber_integrate, fiber_integrate_interval, period_residual, periods,
    random_form, random_form_of_degree, restrict_interval, seeded_rng, CoefficientSpace, Coord, Factor, Mesh,
    MeshMap, SampledForm,
};
use crate::genera::{builtin_genus, CharacteristicSeries};

/// Parameters of the generated bundle and cycle data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoConfig {
    /// Demo name; only `t2-line` is shipped.
    pub demo: String,
    /// Samples per circle of the base manifolds.
    pub n: usize,
    /// Samples per fiber circle.
    pub fiber_n: usize,
    /// Steps along homotopy intervals (even).
    pub interval_n: usize,
    pub seed: u64,
    /// Largest Fourier mode of random data.
    pub modes: u32,
    /// Line-bundle charges for the integrality check.
    pub charges: Vec<i64>,
    /// `generic` (coefficients `phi1`, `phi2` kept symbolic), a built-in
    /// genus name, or a comma-separated list of rational `phi_1, phi_2, ..`.
    pub phi: String,
    pub form_tol: f64,
    pub identity_tol: f64,
    pub integrality_tol: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            demo: "t2-line".into(),
            n: 16,
            fiber_n: 8,
            interval_n: 32,
            seed: 0,
            modes: 1,
            charges: (-3..=3).collect(),
            phi: "generic".into(),
            form_tol: 1e-8,
            identity_tol: 1e-6,
            integrality_tol: 1e-10,
        }
    }
}

impl DemoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.demo != "t2-line" {
            return Err(Error::UnknownName(format!("demo `{}` (available: t2-line)", self.demo)));
        }
        if self.interval_n % 2 != 0 || self.interval_n < 4 {
            return Err(Error::InvalidMesh("interval_n must be even and at least 4".into()));
        }
        if self.n < 4 || self.fiber_n < 4 {
            return Err(Error::InvalidMesh("n and fiber_n must be at least 4".into()));
        }
        if self.modes == 0 {
            return Err(Error::OutOfRange("modes must be at least 1".into()));
        }
        Ok(())
    }

    pub fn characteristic_series(&self) -> Result<CharacteristicSeries> {
        let order = 4;
        match self.phi.as_str() {
            "generic" => {
                let ring = GradedRingSpec::new(
                    vec![Generator::new("phi1", -2), Generator::new("phi2", -4)],
                    Base::Q,
                    (-4, 0),
                )?
                .into_ring();
                let coeffs =
                    ["phi1", "phi2"].iter().map(|g| GradedElement::generator(&ring, g)).collect::<Result<Vec<_>>>()?;
                CharacteristicSeries::from_coefficients(&ring, &coeffs, order, Some("generic".into()))
            }
            name if name.contains(',') || name.parse::<f64>().is_ok() => {
                let coeffs: Vec<BigRational> =
                    name.split(',').map(|t| parse_rational(t.trim())).collect::<Result<_>>()?;
                CharacteristicSeries::from_rationals(&coeffs, order, Some(name.into()))
            }
            name => builtin_genus(name, 8),
        }
    }
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    /// `pointwise` (sup norm of the difference) or `periods` (largest period
    /// of the difference, which is closed).
    pub kind: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub identities: Vec<IdentityReport>,
    pub pass: bool,
}

/// Generated data for one suite.
struct Demo {
    cfg: DemoConfig,
    ctx: CwContext,
    rng: ChaCha8Rng,
    out: Vec<IdentityReport>,
}

impl Demo {
    fn new(cfg: &DemoConfig, stream: u64) -> Result<Self> {
        cfg.validate()?;
        let ctx = CwContext::new(&cfg.characteristic_series()?)?;
        let rng = seeded_rng(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream));
        Ok(Self { cfg: cfg.clone(), ctx, rng, out: Vec::new() })
    }

    fn record(&mut self, name: &str, kind: &str, residual: f64, tolerance: f64) {
        self.out.push(IdentityReport {
            name: name.into(),
            kind: kind.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    fn pointwise(&mut self, name: &str, a: &SampledForm, b: &SampledForm) -> Result<()> {
        let r = a.max_diff(b)?;
        self.record(name, "pointwise", r, self.cfg.identity_tol);
        Ok(())
    }

    fn by_periods(&mut self, name: &str, a: &SampledForm, b: &SampledForm) -> Result<()> {
        let tol = self.cfg.identity_tol;
        let r = match period_residual(a, b, tol) {
            Ok(r) => r,
            Err(Error::NotClosed { residual, .. }) => residual,
            Err(e) => return Err(e),
        };
        self.record(name, "periods", r, tol);
        Ok(())
    }

    fn finish(self, suite: &str) -> SuiteReport {
        let pass = self.out.iter().all(|r| r.pass);
        SuiteReport { suite: suite.into(), identities: self.out, pass }
    }

    fn torus(&self, base: usize, fibers: usize) -> Result<Arc<Mesh>> {
        let mut f = vec![Factor::Circle { n: self.cfg.n }; base];
        f.extend(vec![Factor::Circle { n: self.cfg.fiber_n }; fibers]);
        Mesh::new(f)
    }

    fn scalar_one_form(&mut self, mesh: &Arc<Mesh>) -> Result<SampledForm> {
        let slots: Vec<(u32, usize)> = (0..mesh.dim()).map(|k| (1u32 << k, 0)).collect();
        random_form(mesh, &CoefficientSpace::scalar(), &slots, self.cfg.modes, &mut self.rng)
    }

    /// A line bundle with a random connection and the twist of the given
    /// charges on the given coordinate planes.
    fn line(&mut self, mesh: &Arc<Mesh>, charges: &[(usize, usize, i64)]) -> Result<GeometricBundle> {
        let a = self.scalar_one_form(mesh)?;
        let mut twist = SampledForm::zero(mesh, &CoefficientSpace::scalar());
        for &(i, j, q) in charges {
            twist = twist.add(&GeometricBundle::charge_twist(mesh, i, j, q)?)?;
        }
        GeometricBundle::line(mesh, Some(a), Some(twist))
    }

    /// A random form of total degree `deg` in the coefficient space.
    fn form(&mut self, mesh: &Arc<Mesh>, deg: i64) -> Result<SampledForm> {
        random_form_of_degree(mesh, self.ctx.coeffs(), deg, self.cfg.modes, &mut self.rng)
    }

    fn orientation(&mut self, total: &Arc<Mesh>, fiber_dim: usize) -> Result<SmoothOrientationDatum> {
        let d = total.dim();
        let mut charges = vec![(0, 1, 1)];
        if fiber_dim >= 2 {
            charges.push((d - 2, d - 1, 1));
        }
        let nu = self.line(total, &charges)?;
        let sigma = self.form(total, -1)?;
        SmoothOrientationDatum::new(fiber_dim, nu, sigma)
    }

    /// A cycle on `base` with a circle fiber.
    fn circle_cycle(&mut self, base: &Arc<Mesh>) -> Result<SmoothCycleDatum> {
        let total = base.product(&*Mesh::torus(1, self.cfg.fiber_n)?)?;
        let nu = self.line(&total, &[(0, total.dim() - 1, -1)])?;
        let alpha = self.form(base, -2)?;
        SmoothCycleDatum::fibered(1, nu, alpha)
    }

    /// The identity of `base` with random normal data.
    fn identity_cycle(&mut self, base: &Arc<Mesh>) -> Result<SmoothCycleDatum> {
        let nu = self.line(base, &[(0, 1, 2)])?;
        let alpha = self.form(base, -1)?;
        SmoothCycleDatum::fibered(0, nu, alpha)
    }
}

/// Integrality, Whitney and closedness of Chern and characteristic forms.
pub fn chern_suite(cfg: &DemoConfig) -> Result<SuiteReport> {
    let mut d = Demo::new(cfg, 1)?;
    let t2 = d.torus(2, 0)?;
    for &q in &cfg.charges.clone() {
        let b = d.line(&t2, &[(0, 1, q)])?;
        let c1 = &b.chern_forms(1)?.forms[0];
        let top = periods(c1, cfg.form_tol)?.pop().expect("top period");
        d.record(&format!("integrality charge {q}"), "periods", (top.values[0] - q as f64).abs(), cfg.integrality_tol);
    }

    let trivial = GeometricBundle::trivial(&t2, 2)?;
    let c = trivial.chern_forms(2)?;
    let r = c.forms.iter().map(SampledForm::max_abs).fold(0.0, f64::max);
    d.record("trivial bundle has c = 1", "pointwise", r, cfg.form_tol);

    let t4 = d.torus(2, 2)?;
    let nu = d.line(&t4, &[(0, 1, 1), (2, 3, -2)])?;
    let mu = d.line(&t4, &[(0, 2, 3)])?;
    let sum = nu.direct_sum(&mu)?;
    let c1_sum = &sum.chern_forms(1)?.forms[0];
    let c1_parts = nu.chern_forms(1)?.forms[0].add(&mu.chern_forms(1)?.forms[0])?;
    d.record("c1 of a direct sum", "pointwise", c1_sum.max_diff(&c1_parts)?, cfg.form_tol);
    let phi_sum = d.ctx.phi_form(&sum)?;
    let whitney = d.ctx.phi_form(&nu)?.wedge(&d.ctx.phi_form(&mu)?)?;
    d.record("Whitney sum formula", "pointwise", phi_sum.max_diff(&whitney)?, cfg.form_tol);
    d.record("phi form is closed", "pointwise", closedness_residual(&phi_sum), cfg.form_tol);

    // A u(2) connection with off-diagonal entries; the curvature is
    // quadratic in the data, so use twice the fiber resolution.
    let t4_fine = Mesh::torus(4, 2 * cfg.fiber_n)?;
    let s = CoefficientSpace::scalar();
    let rf = |d: &mut Demo| random_form(&t4_fine, &s, &[(1, 0), (2, 0), (4, 0), (8, 0)], d.cfg.modes, &mut d.rng);
    let (a11, a22, br, bi) = (rf(&mut d)?, rf(&mut d)?, rf(&mut d)?, rf(&mut d)?);
    let off = ComplexForm { re: br.clone(), im: bi.clone() };
    let off_adj = ComplexForm { re: br.neg(), im: bi };
    let tw = GeometricBundle::charge_twist(&t4_fine, 0, 1, 1)?;
    let conn = vec![ComplexForm::imaginary(a11), off, off_adj, ComplexForm::imaginary(a22)];
    let u2 = GeometricBundle::new(&t4_fine, 2, conn, vec![tw.clone(), tw])?;
    let cf = u2.chern_forms(2)?;
    d.record("u(2) Chern forms are real", "pointwise", cf.max_imaginary, cfg.form_tol);
    let closed = cf.forms.iter().map(closedness_residual).fold(0.0, f64::max);
    d.record("u(2) Chern forms are closed", "pointwise", closed, cfg.form_tol);
    let c1_top = periods(&cf.forms[0], cfg.form_tol)?;
    let p01 = c1_top.iter().find(|p| p.directions == [0, 1]).expect("plane").values[0];
    d.record("u(2) first Chern number", "periods", (p01 - 2.0).abs(), cfg.integrality_tol);
    Ok(d.finish("chern"))
}

/// Transgression along linear homotopies and homotopy invariance of `A(o)`.
pub fn transgression_suite(cfg: &DemoConfig) -> Result<SuiteReport> {
    let mut d = Demo::new(cfg, 2)?;
    let t2 = d.torus(2, 0)?;
    let b0 = d.line(&t2, &[(0, 1, 1)])?;
    let b1 = GeometricBundle::line(&t2, Some(d.scalar_one_form(&t2)?), Some(b0.twists()[0].clone()))?;
    let h = GeometricBundle::linear_homotopy(&b0, &b1, cfg.interval_n)?;
    let tr = d.ctx.transgression(&h)?;
    let rhs = d.ctx.phi_form(&b1)?.sub(&d.ctx.phi_form(&b0)?)?;
    d.pointwise("transgression differential", &exterior_d(&tr), &rhs)?;

    let rev = MeshMap::new(h.mesh(), h.mesh(), (0..h.mesh().dim()).map(|k| if k == 0 { Coord::Reversed(0) } else { Coord::Source(k) }).collect())?;
    let tr_rev = d.ctx.transgression(&h.pullback(&rev)?)?;
    d.pointwise("reversed homotopy negates", &tr_rev, &tr.neg())?;

    let constant = GeometricBundle::linear_homotopy(&b0, &b0, cfg.interval_n)?;
    let zero = d.ctx.zero(&t2);
    d.pointwise("constant homotopy", &d.ctx.transgression(&constant)?, &zero)?;

    // A(o) under (nu_0, sigma) -> (nu_1, sigma + transgression).
    let v = d.torus(2, 1)?;
    let o0 = d.orientation(&v, 1)?;
    let nu1 = GeometricBundle::line(&v, Some(d.scalar_one_form(&v)?), Some(o0.bundle().twists()[0].clone()))?;
    let hv = GeometricBundle::linear_homotopy(o0.bundle(), &nu1, cfg.interval_n)?;
    let shift = d.ctx.transgression(&hv)?;
    let o1 = SmoothOrientationDatum::new(1, nu1, o0.sigma().add(&shift)?)?;
    d.pointwise("A(o) homotopy invariance", &o1.a_form(&d.ctx)?, &o0.a_form(&d.ctx)?)?;
    Ok(d.finish("transgression"))
}

/// The push-forward squares, composition and pull-back compatibility.
pub fn pushforward_suite(cfg: &DemoConfig) -> Result<SuiteReport> {
    let mut d = Demo::new(cfg, 3)?;
    let ctx = d.ctx.clone();
    let v = d.torus(2, 2)?;
    let o_p = d.orientation(&v, 2)?;
    let a_p = o_p.a_form(&ctx)?;
    d.record("A(o) is closed", "pointwise", closedness_residual(&a_p), cfg.identity_tol);

    let omega = d.form(&v, -1)?;
    let pushed_a = pushforward_cycle(&ctx, &o_p, &SmoothCycleDatum::action(0, &omega)?)?;
    let direct_a = o_p.integrate(&a_p.wedge(&omega)?)?.neg();
    d.by_periods("push-forward of a(w)", pushed_a.alpha(), &direct_a)?;

    let x = d.circle_cycle(&v)?;
    let px = pushforward_cycle(&ctx, &o_p, &x)?;
    let t_pushed = px.t_form(&ctx)?;
    let t_x = x.t_form(&ctx)?;
    d.pointwise("push-forward of T", &t_pushed, &o_p.integrate(&ctx.phi_form(o_p.bundle())?.wedge(&t_x)?)?)?;
    let r_x = x.curvature(&ctx)?;
    d.pointwise("push-forward of R", &px.curvature(&ctx)?, &o_p.integrate(&a_p.wedge(&r_x)?)?)?;
    d.by_periods("push-forward of classes", &t_pushed, &o_p.integrate(&a_p.wedge(&t_x)?)?)?;

    // U -> V -> A with circle fibers, and a circle cycle on U.
    let va = d.torus(2, 1)?;
    let u = d.torus(2, 2)?;
    let o_p1 = d.orientation(&va, 1)?;
    let o_q = d.orientation(&u, 1)?;
    let comp = compose_orientations(&ctx, &o_p1, &o_q)?;
    let q = o_q.projection()?;
    let contract = o_q.a_form(&ctx)?.wedge(&q.pullback(&o_p1.a_form(&ctx)?)?)?;
    d.pointwise("A of a composite orientation", &comp.a_form(&ctx)?, &contract)?;
    let xu = d.circle_cycle(&u)?;
    let staged = pushforward_cycle(&ctx, &o_p1, &pushforward_cycle(&ctx, &o_q, &xu)?)?;
    let composed = pushforward_cycle(&ctx, &comp, &xu)?;
    d.pointwise("two-stage push-forward, alpha", staged.alpha(), composed.alpha())?;
    d.pointwise("two-stage push-forward, R", &staged.curvature(&ctx)?, &composed.curvature(&ctx)?)?;

    // Cartesian square over f: B -> A.
    let a = d.torus(2, 0)?;
    let b = d.torus(3, 0)?;
    let f = MeshMap::new(&b, &a, vec![Coord::Source(2), Coord::Source(0)])?;
    let xa = d.circle_cycle(&a)?;
    d.pointwise("pull-back of T", &xa.pullback(&f)?.t_form(&ctx)?, &f.pullback(&xa.t_form(&ctx)?)?)?;
    let w = d.form(&a.product(&*Mesh::torus(1, cfg.fiber_n)?)?, 0)?;
    let big = MeshMap::new(
        &b.product(&*Mesh::torus(1, cfg.fiber_n)?)?,
        w.mesh(),
        vec![Coord::Source(2), Coord::Source(0), Coord::Source(3)],
    )?;
    d.pointwise("fiber integration commutes with pull-back", &fiber_integrate(&big.pullback(&w)?, 1)?, &f.pullback(&fiber_integrate(&w, 1)?)?)?;
    Ok(d.finish("pushforward"))
}

/// Axioms of the smooth extension and the multiplicative identities.
pub fn axioms_suite(cfg: &DemoConfig) -> Result<SuiteReport> {
    let mut d = Demo::new(cfg, 4)?;
    let ctx = d.ctx.clone();
    let a = d.torus(2, 0)?;

    let omega = d.form(&a, -1)?;
    let ax = SmoothCycleDatum::action(0, &omega)?;
    d.pointwise("R o a = d", &ax.curvature(&ctx)?, &exterior_d(&omega))?;

    let x = d.circle_cycle(&a)?;
    let cup = cup_cycles(&ctx, &ax, &x)?;
    let direct = SmoothCycleDatum::action(-1, &omega.wedge(&x.curvature(&ctx)?)?)?;
    d.by_periods("a(w) u x = a(w ^ R(x))", cup.alpha(), direct.alpha())?;

    let b = d.torus(1, 0)?;
    let y = d.circle_cycle(&b)?;
    let xy = product_cycles(&ctx, &x, &y)?;
    d.by_periods("product formula rewriting", xy.alpha(), &product_alpha_rewritten(&ctx, &x, &y)?)?;
    let t_cross = super::cycles::cross(&x.t_form(&ctx)?, &y.t_form(&ctx)?)?;
    d.pointwise("T of a product", &xy.t_form(&ctx)?, &t_cross)?;

    // p_!(p^* x u y) = x u p_! y for p: T^2 x T^2 -> T^2.
    let v = d.torus(2, 2)?;
    let o_p = d.orientation(&v, 2)?;
    let y_v = d.identity_cycle(&v)?;
    let p = o_p.projection()?;
    let lhs = pushforward_cycle(&ctx, &o_p, &cup_cycles(&ctx, &x.pullback(&p)?, &y_v)?)?;
    let rhs = cup_cycles(&ctx, &x, &pushforward_cycle(&ctx, &o_p, &y_v)?)?;
    d.pointwise("projection formula, R", &lhs.curvature(&ctx)?, &rhs.curvature(&ctx)?)?;
    d.by_periods("projection formula, alpha", lhs.alpha(), rhs.alpha())?;

    // A cylinder cycle between two normal connections: T(c_1) - T(c_0) = d int T(b).
    let total = d.torus(2, 1)?;
    let nu0 = d.line(&total, &[(0, 2, 1)])?;
    let nu1 = GeometricBundle::line(&total, Some(d.scalar_one_form(&total)?), Some(nu0.twists()[0].clone()))?;
    let h = GeometricBundle::linear_homotopy(&nu0, &nu1, cfg.interval_n)?;
    let t_b = fiber_integrate(&ctx.phi_form(&h)?, 1)?;
    let lhs = exterior_d(&fiber_integrate_interval(&t_b)?);
    let rhs = restrict_interval(&t_b, true)?.sub(&restrict_interval(&t_b, false)?)?;
    d.pointwise("bordism curvature on a cylinder", &lhs, &rhs)?;
    Ok(d.finish("axioms"))
}

/// Every suite, in order.
pub fn all_suites(cfg: &DemoConfig) -> Result<Vec<SuiteReport>> {
    let suites: [fn(&DemoConfig) -> Result<SuiteReport>; 4] =
        [chern_suite, transgression_suite, pushforward_suite, axioms_suite];
    suites.par_iter().map(|f| f(cfg)).collect()
}
