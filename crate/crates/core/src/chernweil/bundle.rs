use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formcalc::{
    closedness_residual, exterior_d, fiber_integrate_interval, periods_unchecked, CoefficientSpace, Coord, Factor, Mesh,
    MeshMap, SampledForm,
};

/// A complex-valued scalar form.
#[derive(Clone, Debug)]
pub struct ComplexForm {
    pub re: SampledForm,
    pub im: SampledForm,
}

impl ComplexForm {
    pub fn zero(mesh: &Arc<Mesh>) -> Self {
        let s = CoefficientSpace::scalar();
        Self { re: SampledForm::zero(mesh, &s), im: SampledForm::zero(mesh, &s) }
    }

    pub fn real(re: SampledForm) -> Self {
        let im = SampledForm::zero(re.mesh(), re.coeffs());
        Self { re, im }
    }

    /// `i * w`.
    pub fn imaginary(im: SampledForm) -> Self {
        let re = SampledForm::zero(im.mesh(), im.coeffs());
        Self { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self { re: self.re.add(&o.re)?, im: self.im.add(&o.im)? })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(Self { re: self.re.sub(&o.re)?, im: self.im.sub(&o.im)? })
    }

    /// Multiplication by `a + b i`.
    pub fn scale(&self, a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            re: self.re.scale(a).axpy(-b, &self.im)?,
            im: self.im.scale(a).axpy(b, &self.re)?,
        })
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(self.re.mesh()));
        }
        Ok(Self {
            re: self.re.wedge(&o.re)?.sub(&self.im.wedge(&o.im)?)?,
            im: self.re.wedge(&o.im)?.add(&self.im.wedge(&o.re)?)?,
        })
    }

    pub fn d(&self) -> Self {
        Self { re: exterior_d(&self.re), im: exterior_d(&self.im) }
    }

    pub fn pullback(&self, f: &MeshMap) -> Result<Self> {
        Ok(Self { re: f.pullback(&self.re)?, im: f.pullback(&self.im)? })
    }

    pub fn max_abs(&self) -> f64 {
        self.re.max_abs().max(self.im.max_abs())
    }
}

/// Square matrices of complex forms, row-major.
type FormMatrix = Vec<ComplexForm>;

fn mat_mul(a: &FormMatrix, b: &FormMatrix, k: usize) -> Result<FormMatrix> {
    let mesh = a[0].re.mesh().clone();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = ComplexForm::zero(&mesh);
            for l in 0..k {
                let t = a[i * k + l].wedge(&b[l * k + j])?;
                if !t.is_zero() {
                    acc = acc.add(&t)?;
                }
            }
            out.push(acc);
        }
    }
    Ok(out)
}

fn trace(a: &FormMatrix, k: usize) -> Result<ComplexForm> {
    let mut acc = ComplexForm::zero(a[0].re.mesh());
    for i in 0..k {
        acc = acc.add(&a[i * k + i])?;
    }
    Ok(acc)
}

/// Bundle data on a mesh: a global `u(k)`-valued connection 1-form `A` and a
/// closed real 2-form `tau_j` per diagonal line summand. The curvature is
/// `F = dA + A ^ A + i diag(tau)`, so a line bundle with `tau = 2 pi n dx ^ dy`
/// has first Chern form `n dx ^ dy`.
#[derive(Clone, Debug)]
pub struct GeometricBundle {
    mesh: Arc<Mesh>,
    rank: usize,
    connection: FormMatrix,
    twists: Vec<SampledForm>,
}

/// Chern forms with the numerical diagnostics of their computation.
#[derive(Clone, Debug)]
pub struct ChernForms {
    /// `c_1, .., c_imax` as real forms.
    pub forms: Vec<SampledForm>,
    pub max_imaginary: f64,
}

/// Tolerance for closedness of twists and for imaginary parts.
pub const FORM_TOL: f64 = 1e-8;

impl GeometricBundle {
    pub fn new(mesh: &Arc<Mesh>, rank: usize, connection: Vec<ComplexForm>, twists: Vec<SampledForm>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidBundle("rank must be positive".into()));
        }
        if connection.len() != rank * rank || twists.len() != rank {
            return Err(Error::InvalidBundle("connection must be rank x rank with one twist per summand".into()));
        }
        for a in &connection {
            if **a.re.mesh() != **mesh || **a.im.mesh() != **mesh {
                return Err(Error::MeshMismatch("connection entry on another mesh".into()));
            }
            if a.re.coeffs().dim() != 1 || a.im.coeffs().dim() != 1 {
                return Err(Error::InvalidBundle("connection entries must be scalar forms".into()));
            }
            let degs: Vec<u32> = a.re.form_degrees().into_iter().chain(a.im.form_degrees()).collect();
            if degs.iter().any(|&d| d != 1) {
                return Err(Error::InvalidBundle("connection entries must be 1-forms".into()));
            }
        }
        for t in &twists {
            if **t.mesh() != **mesh || t.coeffs().dim() != 1 {
                return Err(Error::InvalidBundle("twists must be scalar forms on the bundle mesh".into()));
            }
            if t.form_degrees().iter().any(|&d| d != 2) {
                return Err(Error::InvalidBundle("twists must be 2-forms".into()));
            }
            let residual = closedness_residual(t);
            if residual > FORM_TOL {
                return Err(Error::InvalidBundle(format!("twist is not closed (residual {residual:e})")));
            }
            for p in periods_unchecked(&t.scale(1.0 / (2.0 * PI))) {
                if p.directions.len() == 2 && (p.values[0] - p.values[0].round()).abs() > 1e-6 {
                    return Err(Error::InvalidBundle(format!(
                        "twist period {} over {:?} is not an integer multiple of 2 pi",
                        p.values[0] * 2.0 * PI,
                        p.directions
                    )));
                }
            }
        }
        for i in 0..rank {
            for j in 0..rank {
                if i != j
                    && !connection[i * rank + j].is_zero()
                    && twists[i].max_diff(&twists[j])? > FORM_TOL
                {
                    return Err(Error::InvalidBundle(
                        "off-diagonal connection entries need equal twists on both summands".into(),
                    ));
                }
            }
        }
        Ok(Self { mesh: mesh.clone(), rank, connection, twists })
    }

    /// Skips the twist checks, for data derived from validated bundles.
    fn derived(mesh: &Arc<Mesh>, rank: usize, connection: Vec<ComplexForm>, twists: Vec<SampledForm>) -> Self {
        Self { mesh: mesh.clone(), rank, connection, twists }
    }

    /// The product bundle with the zero connection.
    pub fn trivial(mesh: &Arc<Mesh>, rank: usize) -> Result<Self> {
        let s = CoefficientSpace::scalar();
        Self::new(
            mesh,
            rank,
            vec![ComplexForm::zero(mesh); rank * rank],
            vec![SampledForm::zero(mesh, &s); rank],
        )
    }

    /// A line bundle with connection `i a` (for a real 1-form `a`) and twist.
    pub fn line(mesh: &Arc<Mesh>, a: Option<SampledForm>, twist: Option<SampledForm>) -> Result<Self> {
        let s = CoefficientSpace::scalar();
        let conn = a.map_or_else(|| ComplexForm::zero(mesh), ComplexForm::imaginary);
        Self::new(mesh, 1, vec![conn], vec![twist.unwrap_or_else(|| SampledForm::zero(mesh, &s))])
    }

    /// `2 pi n dx_i ^ dx_j`, whose Chern form has period `n`.
    pub fn charge_twist(mesh: &Arc<Mesh>, i: usize, j: usize, n: i64) -> Result<SampledForm> {
        if i == j || i.max(j) >= mesh.dim() {
            return Err(Error::OutOfRange(format!("twist directions ({i}, {j})")));
        }
        let sign = if i < j { 1.0 } else { -1.0 };
        SampledForm::from_fn(mesh, &CoefficientSpace::scalar(), (1 << i) | (1 << j), 0, move |_| {
            sign * 2.0 * PI * n as f64
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn connection(&self) -> &[ComplexForm] {
        &self.connection
    }

    pub fn twists(&self) -> &[SampledForm] {
        &self.twists
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if *self.mesh != *other.mesh {
            return Err(Error::MeshMismatch("direct sum of bundles on different meshes".into()));
        }
        let k = self.rank + other.rank;
        let mut conn = vec![ComplexForm::zero(&self.mesh); k * k];
        for i in 0..self.rank {
            for j in 0..self.rank {
                conn[i * k + j] = self.connection[i * self.rank + j].clone();
            }
        }
        for i in 0..other.rank {
            for j in 0..other.rank {
                conn[(self.rank + i) * k + self.rank + j] = other.connection[i * other.rank + j].clone();
            }
        }
        let twists = self.twists.iter().chain(&other.twists).cloned().collect();
        Ok(Self::derived(&self.mesh, k, conn, twists))
    }

    pub fn pullback(&self, f: &MeshMap) -> Result<Self> {
        let conn = self.connection.iter().map(|a| a.pullback(f)).collect::<Result<_>>()?;
        let twists = self.twists.iter().map(|t| f.pullback(t)).collect::<Result<_>>()?;
        Ok(Self::derived(f.source(), self.rank, conn, twists))
    }

    /// On `[0,1] x V` with `n_t` interval steps: the connection
    /// `(1 - t) A_0 + t A_1`. Both ends must share their twists.
    pub fn linear_homotopy(b0: &Self, b1: &Self, n_t: usize) -> Result<Self> {
        if *b0.mesh != *b1.mesh || b0.rank != b1.rank {
            return Err(Error::InvalidBundle("homotopy ends differ in mesh or rank".into()));
        }
        for (t0, t1) in b0.twists.iter().zip(&b1.twists) {
            if t0.max_diff(t1)? > FORM_TOL {
                return Err(Error::InvalidBundle("homotopy ends must share their twists".into()));
            }
        }
        let cyl = Mesh::cylinder(n_t, &b0.mesh)?;
        let proj = MeshMap::new(&cyl, &b0.mesh, (1..cyl.dim()).map(Coord::Source).collect())?;
        let s = CoefficientSpace::scalar();
        let t = SampledForm::from_fn(&cyl, &s, 0, 0, |x| x[0])?;
        let one_minus_t = SampledForm::from_fn(&cyl, &s, 0, 0, |x| 1.0 - x[0])?;
        let along = |w: &ComplexForm, f: &SampledForm| -> Result<ComplexForm> {
            let w = w.pullback(&proj)?;
            Ok(ComplexForm { re: f.wedge(&w.re)?, im: f.wedge(&w.im)? })
        };
        let conn = b0
            .connection
            .iter()
            .zip(&b1.connection)
            .map(|(a0, a1)| along(a0, &one_minus_t)?.add(&along(a1, &t)?))
            .collect::<Result<_>>()?;
        let twists = b0.twists.iter().map(|t| proj.pullback(t)).collect::<Result<_>>()?;
        Ok(Self::derived(&cyl, b0.rank, conn, twists))
    }

    /// `F = dA + A ^ A + i diag(tau)`.
    pub fn curvature(&self) -> Result<Vec<ComplexForm>> {
        let k = self.rank;
        let aa = mat_mul(&self.connection, &self.connection, k)?;
        let mut f = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let mut e = self.connection[i * k + j].d().add(&aa[i * k + j])?;
                if i == j {
                    e = e.add(&ComplexForm::imaginary(self.twists[i].clone()))?;
                }
                f.push(e);
            }
        }
        Ok(f)
    }

    /// `c(F) = det(1 + F / (2 pi i))` through the power traces of
    /// `X = F / (2 pi i)` and Newton's identities.
    pub fn chern_forms(&self, i_max: usize) -> Result<ChernForms> {
        if i_max > self.rank {
            return Err(Error::OutOfRange(format!("c_{i_max} of a rank {} bundle", self.rank)));
        }
        let k = self.rank;
        let x: FormMatrix =
            self.curvature()?.iter().map(|f| f.scale(0.0, -1.0 / (2.0 * PI))).collect::<Result<_>>()?;
        let mut power = x.clone();
        let mut traces = Vec::with_capacity(i_max);
        for m in 1..=i_max {
            if m > 1 {
                power = mat_mul(&power, &x, k)?;
            }
            traces.push(trace(&power, k)?);
        }
        let one = ComplexForm::real(SampledForm::one(&self.mesh, &CoefficientSpace::scalar()));
        let mut c = vec![one];
        for j in 1..=i_max {
            let mut acc = ComplexForm::zero(&self.mesh);
            for m in 1..=j {
                let term = c[j - m].wedge(&traces[m - 1])?;
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                acc = acc.add(&term.scale(sign, 0.0)?)?;
            }
            c.push(acc.scale(1.0 / j as f64, 0.0)?);
        }
        let forms: Vec<SampledForm> = c[1..].iter().map(|z| z.re.clone().pruned()).collect();
        let max_imaginary = c[1..].iter().map(|z| z.im.max_abs()).fold(0.0, f64::max);
        if max_imaginary > FORM_TOL {
            return Err(Error::InvalidBundle(format!(
                "Chern forms have imaginary part {max_imaginary:e}; the connection is not skew-hermitian"
            )));
        }
        Ok(ChernForms { forms, max_imaginary })
    }
}

/// Integral of a form over the leading interval, with a check that the mesh
/// is a cylinder.
pub(crate) fn integrate_cylinder(w: &SampledForm) -> Result<SampledForm> {
    if !matches!(w.mesh().factors().first(), Some(Factor::Interval { .. })) {
        return Err(Error::Fibration("transgression needs the homotopy interval as first factor".into()));
    }
    fiber_integrate_interval(w)
}
