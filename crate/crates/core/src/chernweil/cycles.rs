use std::sync::Arc;

use super::bundle::{integrate_cylinder, GeometricBundle};
use crate::error::{Error, Result};
use crate::formcalc::{
    exterior_d, fiber_integrate, CoefficientSpace, Coord, Mesh, MeshMap, SampledForm, MAX_DIM,
};
use crate::genera::{eval_weight, k_phi, CharacteristicSeries, ChernAlgebra, MultiplicativeSequence};

/// A characteristic series together with its multiplicative sequence and
/// the real coefficient space the forms live in.
#[derive(Clone, Debug)]
pub struct CwContext {
    phi: CharacteristicSeries,
    coeffs: Arc<CoefficientSpace>,
    k: MultiplicativeSequence,
}

impl CwContext {
    pub fn new(phi: &CharacteristicSeries) -> Result<Self> {
        let coeffs = CoefficientSpace::new(phi.ring())?;
        let k = k_phi(phi, (MAX_DIM / 2) as u32)?;
        Ok(Self { phi: phi.clone(), coeffs, k })
    }

    pub fn phi(&self) -> &CharacteristicSeries {
        &self.phi
    }

    pub fn coeffs(&self) -> &Arc<CoefficientSpace> {
        &self.coeffs
    }

    /// `phi(nabla) = K_phi(c_1, c_2, ..)`, summed over the weights the mesh
    /// dimension allows.
    pub fn phi_form(&self, b: &GeometricBundle) -> Result<SampledForm> {
        let top = (b.mesh().dim() / 2).min(self.k.max_weight() as usize);
        let chern: Vec<SampledForm> = b
            .chern_forms(top.min(b.rank()))?
            .forms
            .iter()
            .map(|c| c.lift(&self.coeffs))
            .collect::<Result<_>>()?;
        let unit = SampledForm::one(b.mesh(), &self.coeffs);
        let mut acc = unit.clone();
        for n in 1..=top as u32 {
            acc = ChernAlgebra::add(&acc, &eval_weight(&self.k, n, &unit, &chern)?)?;
        }
        Ok(acc.pruned())
    }

    /// `int_{[0,1] x V / V} phi(nabla)` for bundle data on a cylinder; its
    /// differential is `phi(nabla^1) - phi(nabla^0)`.
    pub fn transgression(&self, h: &GeometricBundle) -> Result<SampledForm> {
        integrate_cylinder(&self.phi_form(h)?)
    }

    pub fn zero(&self, mesh: &Arc<Mesh>) -> SampledForm {
        SampledForm::zero(mesh, &self.coeffs)
    }
}

/// The projection of `total` onto its first `base_dim` factors.
pub(crate) fn base_projection(total: &Arc<Mesh>, base_dim: usize) -> Result<MeshMap> {
    MeshMap::projection(total, &(0..base_dim).collect::<Vec<_>>())
}

fn check_fibration(total: &Mesh, fiber_dim: usize) -> Result<()> {
    if fiber_dim > total.dim() {
        return Err(Error::Fibration(format!("fiber of dimension {fiber_dim} in a {}-dimensional mesh", total.dim())));
    }
    if total.factors()[total.dim() - fiber_dim..].iter().any(|f| !f.is_circle()) {
        return Err(Error::Fibration("fibers must be tori".into()));
    }
    Ok(())
}

/// Geometric normal data on `V = A x F` with a form `sigma` of total degree
/// `-1`.
#[derive(Clone, Debug)]
pub struct SmoothOrientationDatum {
    base: Arc<Mesh>,
    fiber_dim: usize,
    bundle: GeometricBundle,
    sigma: SampledForm,
}

impl SmoothOrientationDatum {
    pub fn new(fiber_dim: usize, bundle: GeometricBundle, sigma: SampledForm) -> Result<Self> {
        let total = bundle.mesh().clone();
        check_fibration(&total, fiber_dim)?;
        if **sigma.mesh() != *total {
            return Err(Error::MeshMismatch("sigma must live on the total space".into()));
        }
        sigma.check_total_degree(-1, "sigma")?;
        let base = total.slice(0..total.dim() - fiber_dim)?;
        Ok(Self { base, fiber_dim, bundle, sigma })
    }

    pub fn base(&self) -> &Arc<Mesh> {
        &self.base
    }

    pub fn total(&self) -> &Arc<Mesh> {
        self.bundle.mesh()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn bundle(&self) -> &GeometricBundle {
        &self.bundle
    }

    pub fn sigma(&self) -> &SampledForm {
        &self.sigma
    }

    pub fn projection(&self) -> Result<MeshMap> {
        base_projection(self.total(), self.base.dim())
    }

    /// `A(o) = phi(nabla^nu) - d sigma`.
    pub fn a_form(&self, ctx: &CwContext) -> Result<SampledForm> {
        ctx.phi_form(&self.bundle)?.sub(&exterior_d(&self.sigma))
    }

    /// `int_{V/A} w`.
    pub fn integrate(&self, w: &SampledForm) -> Result<SampledForm> {
        fiber_integrate(w, self.fiber_dim)
    }
}

/// `o_p o o_q` for `q: U -> V` and `p: V -> A`: the bundle `nu_q + q^* nu_p`
/// and `sigma = A(o_q) ^ q^* sigma_p + sigma_q ^ q^* phi(nu_p)`.
pub fn compose_orientations(
    ctx: &CwContext,
    o_p: &SmoothOrientationDatum,
    o_q: &SmoothOrientationDatum,
) -> Result<SmoothOrientationDatum> {
    if **o_q.base() != **o_p.total() {
        return Err(Error::Fibration("the orientations are not nested".into()));
    }
    let q = o_q.projection()?;
    let bundle = o_q.bundle.direct_sum(&o_p.bundle.pullback(&q)?)?;
    let sigma = o_q
        .a_form(ctx)?
        .wedge(&q.pullback(&o_p.sigma)?)?
        .add(&o_q.sigma.wedge(&q.pullback(&ctx.phi_form(&o_p.bundle)?)?)?)?;
    SmoothOrientationDatum::new(o_p.fiber_dim + o_q.fiber_dim, bundle, sigma)
}

/// The geometric part of a non-empty cycle: a submersion `W = A x F -> A`
/// with normal data on `W`.
#[derive(Clone, Debug)]
pub struct CycleGeometry {
    pub fiber_dim: usize,
    pub bundle: GeometricBundle,
}

/// A cycle of degree `n` on `A`: geometry (or the empty cycle) plus a form
/// `alpha` of total degree `n - 1`. Only submersions are represented, so
/// `T` is a smooth form.
#[derive(Clone, Debug)]
pub struct SmoothCycleDatum {
    base: Arc<Mesh>,
    degree: i64,
    geometry: Option<CycleGeometry>,
    alpha: SampledForm,
}

fn sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl SmoothCycleDatum {
    /// The empty cycle with form `alpha`.
    pub fn empty(degree: i64, alpha: SampledForm) -> Result<Self> {
        alpha.check_total_degree(degree - 1, "alpha")?;
        Ok(Self { base: alpha.mesh().clone(), degree, geometry: None, alpha })
    }

    /// `a(w) = (empty, -w)` for a form of total degree `degree - 1`.
    pub fn action(degree: i64, omega: &SampledForm) -> Result<Self> {
        Self::empty(degree, omega.neg())
    }

    /// The cycle `A x F -> A` with normal data `bundle` on `A x F`.
    pub fn fibered(fiber_dim: usize, bundle: GeometricBundle, alpha: SampledForm) -> Result<Self> {
        let total = bundle.mesh().clone();
        check_fibration(&total, fiber_dim)?;
        let base = total.slice(0..total.dim() - fiber_dim)?;
        if **alpha.mesh() != *base {
            return Err(Error::MeshMismatch("alpha must live on the base".into()));
        }
        let degree = -(fiber_dim as i64);
        alpha.check_total_degree(degree - 1, "alpha")?;
        Ok(Self { base, degree, geometry: Some(CycleGeometry { fiber_dim, bundle }), alpha })
    }

    pub fn base(&self) -> &Arc<Mesh> {
        &self.base
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn geometry(&self) -> Option<&CycleGeometry> {
        self.geometry.as_ref()
    }

    pub fn alpha(&self) -> &SampledForm {
        &self.alpha
    }

    pub fn is_empty(&self) -> bool {
        self.geometry.is_none()
    }

    /// `T = p_!(phi(nabla^nu))`, zero for the empty cycle.
    pub fn t_form(&self, ctx: &CwContext) -> Result<SampledForm> {
        match &self.geometry {
            None => Ok(ctx.zero(&self.base)),
            Some(g) => fiber_integrate(&ctx.phi_form(&g.bundle)?, g.fiber_dim),
        }
    }

    /// `R = T - d alpha`.
    pub fn curvature(&self, ctx: &CwContext) -> Result<SampledForm> {
        self.t_form(ctx)?.sub(&exterior_d(&self.alpha))
    }

    /// `f^* x` along a map of bases `f: B -> A`.
    pub fn pullback(&self, f: &MeshMap) -> Result<Self> {
        if **f.target() != *self.base {
            return Err(Error::MeshMismatch("cycle does not live on the target of the map".into()));
        }
        let alpha = f.pullback(&self.alpha)?;
        let Some(g) = &self.geometry else {
            return Self::empty(self.degree, alpha);
        };
        let b = f.source();
        let fiber = g.bundle.mesh().slice(self.base.dim()..g.bundle.mesh().dim())?;
        let total = b.product(&fiber)?;
        let mut coords = f.coords().to_vec();
        coords.extend((0..g.fiber_dim).map(|j| Coord::Source(b.dim() + j)));
        let big = MeshMap::new(&total, g.bundle.mesh(), coords)?;
        Self::fibered(g.fiber_dim, g.bundle.pullback(&big)?, alpha)
    }
}

/// `p_!(c, alpha) = (p o c, int_{V/A} (phi(nabla^nu) ^ alpha + sigma ^ R(c, alpha)))`.
/// The composite cycle lives on `A x F_p x F_x` with normal data
/// `nu_x + c^* nu_p`.
pub fn pushforward_cycle(
    ctx: &CwContext,
    o_p: &SmoothOrientationDatum,
    x: &SmoothCycleDatum,
) -> Result<SmoothCycleDatum> {
    if **x.base() != **o_p.total() {
        return Err(Error::MeshMismatch("cycle must live on the total space of the orientation".into()));
    }
    let integrand = ctx
        .phi_form(o_p.bundle())?
        .wedge(x.alpha())?
        .add(&o_p.sigma().wedge(&x.curvature(ctx)?)?)?;
    let alpha = o_p.integrate(&integrand)?;
    let degree = x.degree() - o_p.fiber_dim() as i64;
    match x.geometry() {
        None => SmoothCycleDatum::empty(degree, alpha),
        Some(g) => {
            let c = base_projection(g.bundle.mesh(), o_p.total().dim())?;
            let bundle = g.bundle.direct_sum(&o_p.bundle().pullback(&c)?)?;
            let out = SmoothCycleDatum::fibered(g.fiber_dim + o_p.fiber_dim(), bundle, alpha)?;
            debug_assert_eq!(out.degree, degree);
            Ok(out)
        }
    }
}

/// The two projections of `A x B`.
fn product_projections(a: &Arc<Mesh>, b: &Arc<Mesh>) -> Result<(Arc<Mesh>, MeshMap, MeshMap)> {
    let ab = a.product(b)?;
    let pa = MeshMap::projection(&ab, &(0..a.dim()).collect::<Vec<_>>())?;
    let pb = MeshMap::projection(&ab, &(a.dim()..ab.dim()).collect::<Vec<_>>())?;
    Ok((ab, pa, pb))
}

/// `u x v = pr_A^* u ^ pr_B^* v` on `A x B`.
pub fn cross(u: &SampledForm, v: &SampledForm) -> Result<SampledForm> {
    let (_, pa, pb) = product_projections(u.mesh(), v.mesh())?;
    pa.pullback(u)?.wedge(&pb.pullback(v)?)
}

/// Geometry of `x x y` (or of `x u y` when `diagonal`): the total space is
/// `M x F_y x F_x` so that fiber integration factors without signs.
fn combined_geometry(
    x: &SmoothCycleDatum,
    y: &SmoothCycleDatum,
    diagonal: bool,
) -> Result<Option<CycleGeometry>> {
    let (Some(gx), Some(gy)) = (x.geometry(), y.geometry()) else {
        return Ok(None);
    };
    let (a, b) = (x.base().dim(), y.base().dim());
    let m = if diagonal { x.base().clone() } else { x.base().product(y.base())? };
    let fy = gy.bundle.mesh().slice(b..b + gy.fiber_dim)?;
    let fx = gx.bundle.mesh().slice(a..a + gx.fiber_dim)?;
    let total = m.product(&fy)?.product(&fx)?;
    let off_b = if diagonal { 0 } else { a };
    let off_fy = m.dim();
    let off_fx = m.dim() + gy.fiber_dim;
    let to_x: Vec<Coord> = (0..a).map(Coord::Source).chain((0..gx.fiber_dim).map(|j| Coord::Source(off_fx + j))).collect();
    let to_y: Vec<Coord> =
        (0..b).map(|j| Coord::Source(off_b + j)).chain((0..gy.fiber_dim).map(|j| Coord::Source(off_fy + j))).collect();
    let nu_x = gx.bundle.pullback(&MeshMap::new(&total, gx.bundle.mesh(), to_x)?)?;
    let nu_y = gy.bundle.pullback(&MeshMap::new(&total, gy.bundle.mesh(), to_y)?)?;
    Ok(Some(CycleGeometry { fiber_dim: gx.fiber_dim + gy.fiber_dim, bundle: nu_x.direct_sum(&nu_y)? }))
}

fn assemble(base: Arc<Mesh>, degree: i64, geometry: Option<CycleGeometry>, alpha: SampledForm) -> Result<SmoothCycleDatum> {
    match geometry {
        None => {
            let out = SmoothCycleDatum::empty(degree, alpha)?;
            debug_assert!(*out.base == *base);
            Ok(out)
        }
        Some(g) => SmoothCycleDatum::fibered(g.fiber_dim, g.bundle, alpha),
    }
}

/// `x x y` with `alpha = (-1)^{|x|} R(x) x beta + alpha x T(y)`.
pub fn product_cycles(ctx: &CwContext, x: &SmoothCycleDatum, y: &SmoothCycleDatum) -> Result<SmoothCycleDatum> {
    let alpha = cross(&x.curvature(ctx)?, y.alpha())?
        .scale(sign(x.degree()))
        .add(&cross(x.alpha(), &y.t_form(ctx)?)?)?;
    let base = x.base().product(y.base())?;
    assemble(base, x.degree() + y.degree(), combined_geometry(x, y, false)?, alpha)
}

/// The other way to write the product form, `(-1)^{|x|} T(x) x beta + alpha x R(y)`.
/// It differs from the one used by `product_cycles` by an exact form.
pub fn product_alpha_rewritten(ctx: &CwContext, x: &SmoothCycleDatum, y: &SmoothCycleDatum) -> Result<SampledForm> {
    cross(&x.t_form(ctx)?, y.alpha())?
        .scale(sign(x.degree()))
        .add(&cross(x.alpha(), &y.curvature(ctx)?)?)
}

/// `x u y` on a common base, computed directly on the diagonal.
pub fn cup_cycles(ctx: &CwContext, x: &SmoothCycleDatum, y: &SmoothCycleDatum) -> Result<SmoothCycleDatum> {
    if **x.base() != **y.base() {
        return Err(Error::MeshMismatch("cup product needs a common base".into()));
    }
    let alpha = x
        .curvature(ctx)?
        .wedge(y.alpha())?
        .scale(sign(x.degree()))
        .add(&x.alpha().wedge(&y.t_form(ctx)?)?)?;
    assemble(x.base().clone(), x.degree() + y.degree(), combined_geometry(x, y, true)?, alpha)
}
