use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlannerScalar;
use serde::Serialize;

use super::form::{accumulate, directions, merge_sign, SampledForm};
use super::mesh::{Factor, Mesh};
use crate::error::{Error, Result};

/// Starting indices of all lines along factor `k`.
fn line_starts(mesh: &Mesh, k: usize) -> Vec<usize> {
    let s = mesh.strides()[k];
    let len = mesh.factors()[k].samples();
    (0..mesh.npts()).filter(|p| (p / s) % len == 0).collect()
}

fn spectral_derivative(line: &mut [Complex<f64>], fwd: &dyn rustfft::Fft<f64>, inv: &dyn rustfft::Fft<f64>) {
    let n = line.len();
    fwd.process(line);
    let two_pi = 2.0 * std::f64::consts::PI;
    for (j, c) in line.iter_mut().enumerate() {
        let freq = if 2 * j < n {
            j as f64
        } else if 2 * j == n {
            0.0
        } else {
            j as f64 - n as f64
        };
        *c *= Complex::new(0.0, two_pi * freq / n as f64);
    }
    inv.process(line);
}

/// Fourth-order first derivative on `n + 1` equispaced samples of `[0,1]`.
fn fd_derivative(f: &[f64], out: &mut [f64]) {
    let n = f.len() - 1;
    let c = n as f64 / 12.0;
    out[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    out[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for i in 2..n - 1 {
        out[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    out[n - 1] = -c * (-3.0 * f[n] - 10.0 * f[n - 1] + 18.0 * f[n - 2] - 6.0 * f[n - 3] + f[n - 4]);
    out[n] = -c * (-25.0 * f[n] + 48.0 * f[n - 1] - 36.0 * f[n - 2] + 16.0 * f[n - 3] - 3.0 * f[n - 4]);
}

/// Partial derivative of one scalar slice along factor `k`.
pub fn partial(mesh: &Mesh, k: usize, f: &[f64]) -> Vec<f64> {
    let s = mesh.strides()[k];
    let fac = mesh.factors()[k];
    let len = fac.samples();
    let starts = line_starts(mesh, k);
    let lines: Vec<Vec<f64>> = match fac {
        Factor::Circle { n } => {
            // The scalar planner keeps results bit-identical across CPUs.
            let mut planner = FftPlannerScalar::<f64>::new();
            let fwd = planner.plan_fft_forward(n);
            let inv = planner.plan_fft_inverse(n);
            starts
                .par_iter()
                .map(|&p0| {
                    let mut buf: Vec<Complex<f64>> = (0..n).map(|i| Complex::new(f[p0 + i * s], 0.0)).collect();
                    spectral_derivative(&mut buf, fwd.as_ref(), inv.as_ref());
                    buf.iter().map(|c| c.re).collect()
                })
                .collect()
        }
        Factor::Interval { .. } => starts
            .par_iter()
            .map(|&p0| {
                let line: Vec<f64> = (0..len).map(|i| f[p0 + i * s]).collect();
                let mut out = vec![0.0; len];
                fd_derivative(&line, &mut out);
                out
            })
            .collect(),
    };
    let mut out = vec![0.0; f.len()];
    for (p0, line) in starts.iter().zip(lines) {
        for (i, v) in line.into_iter().enumerate() {
            out[p0 + i * s] = v;
        }
    }
    out
}

/// Exterior derivative, acting on the form part only.
pub fn exterior_d(w: &SampledForm) -> SampledForm {
    let mesh = &w.mesh;
    let mut out = SampledForm::zero(mesh, &w.coeffs);
    for ((m, b), v) in &w.slots {
        if v.iter().all(|x| *x == 0.0) {
            continue;
        }
        for k in (0..mesh.dim()).filter(|k| m & (1 << k) == 0) {
            let sign = if (m & ((1 << k) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            accumulate(&mut out.slots, (m | (1 << k), *b), sign, &partial(mesh, k, v));
        }
    }
    out
}

/// Integration over the trailing `fiber_dim` factors, which must be circles.
/// With the fiber last, `int(a ^ dy_F) = a int(1 dy_F)` and no sign appears.
pub fn fiber_integrate(w: &SampledForm, fiber_dim: usize) -> Result<SampledForm> {
    let mesh = &w.mesh;
    let dim = mesh.dim();
    if fiber_dim > dim {
        return Err(Error::Fibration(format!("fiber of dimension {fiber_dim} in a {dim}-dimensional mesh")));
    }
    if mesh.factors()[dim - fiber_dim..].iter().any(|f| !f.is_circle()) {
        return Err(Error::Fibration("fiber factors must be circles".into()));
    }
    let base = mesh.slice(0..dim - fiber_dim)?;
    let fmask: u32 = ((1u32 << fiber_dim) - 1) << (dim - fiber_dim);
    let fsize = mesh.npts() / base.npts();
    let mut out = SampledForm::zero(&base, &w.coeffs);
    for ((m, b), v) in &w.slots {
        if m & fmask != fmask {
            continue;
        }
        let data = v.par_chunks(fsize).map(|c| c.iter().sum::<f64>() / fsize as f64).collect();
        out.slots.insert((m & !fmask, *b), data);
    }
    Ok(out)
}

fn simpson_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Integration over the leading interval of `[0,1] x V`, with
/// `I(dt ^ b) = int_0^1 b dt`. This satisfies `d I + I d = r_1^* - r_0^*`.
pub fn fiber_integrate_interval(w: &SampledForm) -> Result<SampledForm> {
    let mesh = &w.mesh;
    let Some(Factor::Interval { n }) = mesh.factors().first().copied() else {
        return Err(Error::Fibration("the first factor must be the interval".into()));
    };
    let v_mesh = mesh.slice(1..mesh.dim())?;
    let weights = simpson_weights(n);
    let nq = v_mesh.npts();
    let mut out = SampledForm::zero(&v_mesh, &w.coeffs);
    for ((m, b), v) in &w.slots {
        if m & 1 == 0 {
            continue;
        }
        let data = (0..nq)
            .into_par_iter()
            .map(|q| weights.iter().enumerate().map(|(i, wi)| wi * v[i * nq + q]).sum())
            .collect();
        out.slots.insert((m >> 1, *b), data);
    }
    Ok(out)
}

/// Restriction of a form on `[0,1] x V` to `{end} x V`.
pub fn restrict_interval(w: &SampledForm, end: bool) -> Result<SampledForm> {
    let mesh = &w.mesh;
    let Some(Factor::Interval { n }) = mesh.factors().first().copied() else {
        return Err(Error::Fibration("the first factor must be the interval".into()));
    };
    let v_mesh = mesh.slice(1..mesh.dim())?;
    let nq = v_mesh.npts();
    let i = if end { n } else { 0 };
    let mut out = SampledForm::zero(&v_mesh, &w.coeffs);
    for ((m, b), v) in &w.slots {
        if m & 1 != 0 {
            continue;
        }
        out.slots.insert((m >> 1, *b), v[i * nq..(i + 1) * nq].to_vec());
    }
    Ok(out)
}

/// Where a target coordinate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    /// The source factor with this index, which must be identical.
    Source(usize),
    /// `t -> 1 - t` on a source interval.
    Reversed(usize),
    /// A fixed sample index.
    Fixed(usize),
}

/// A map between meshes that sends each target coordinate to a source
/// coordinate or a constant.
#[derive(Clone, Debug)]
pub struct MeshMap {
    source: Arc<Mesh>,
    target: Arc<Mesh>,
    coords: Vec<Coord>,
}

impl MeshMap {
    pub fn new(source: &Arc<Mesh>, target: &Arc<Mesh>, coords: Vec<Coord>) -> Result<Self> {
        if coords.len() != target.dim() {
            return Err(Error::MeshMismatch("one coordinate per target factor is required".into()));
        }
        for (j, c) in coords.iter().enumerate() {
            let tf = target.factors()[j];
            match *c {
                Coord::Source(k) | Coord::Reversed(k) => {
                    if source.factors().get(k) != Some(&tf) {
                        return Err(Error::MeshMismatch(format!("target factor {j} does not match source factor {k}")));
                    }
                    if matches!(c, Coord::Reversed(_)) && tf.is_circle() {
                        return Err(Error::MeshMismatch("only intervals can be reversed".into()));
                    }
                }
                Coord::Fixed(i) => {
                    if i >= tf.samples() {
                        return Err(Error::OutOfRange(format!("fixed sample {i} on factor {j}")));
                    }
                }
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), coords })
    }

    /// The projection of `source` onto the factors listed in `keep`.
    pub fn projection(source: &Arc<Mesh>, keep: &[usize]) -> Result<Self> {
        let target = Mesh::new(keep.iter().map(|&k| source.factors()[k]).collect())?;
        Self::new(source, &target, keep.iter().map(|&k| Coord::Source(k)).collect())
    }

    pub fn source(&self) -> &Arc<Mesh> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Mesh> {
        &self.target
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    /// `self` followed by `g`.
    pub fn then(&self, g: &MeshMap) -> Result<MeshMap> {
        if *g.source != *self.target {
            return Err(Error::MeshMismatch("maps do not compose".into()));
        }
        let coords = g
            .coords
            .iter()
            .map(|c| match *c {
                Coord::Fixed(i) => Coord::Fixed(i),
                Coord::Source(k) => self.coords[k],
                Coord::Reversed(k) => match self.coords[k] {
                    Coord::Source(j) => Coord::Reversed(j),
                    Coord::Reversed(j) => Coord::Source(j),
                    Coord::Fixed(i) => Coord::Fixed(self.target.factors()[k].n() - i),
                },
            })
            .collect();
        MeshMap::new(&self.source, &g.target, coords)
    }

    fn point_map(&self) -> Vec<usize> {
        let src = &self.source;
        let tgt = &self.target;
        (0..src.npts())
            .into_par_iter()
            .map(|p| {
                self.coords
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let i = match *c {
                            Coord::Source(k) => src.index_along(p, k),
                            Coord::Reversed(k) => src.factors()[k].n() - src.index_along(p, k),
                            Coord::Fixed(i) => i,
                        };
                        i * tgt.strides()[j]
                    })
                    .sum()
            })
            .collect()
    }

    pub fn pullback(&self, w: &SampledForm) -> Result<SampledForm> {
        if *w.mesh != *self.target {
            return Err(Error::MeshMismatch("form does not live on the target mesh".into()));
        }
        let pmap = self.point_map();
        let mut slots: BTreeMap<(u32, usize), Vec<f64>> = BTreeMap::new();
        'comp: for ((m, b), v) in &w.slots {
            let mut sign = 1.0;
            let mut mask = 0u32;
            for j in directions(*m) {
                let k = match self.coords[j] {
                    Coord::Fixed(_) => continue 'comp,
                    Coord::Source(k) => k,
                    Coord::Reversed(k) => {
                        sign = -sign;
                        k
                    }
                };
                if mask & (1 << k) != 0 {
                    continue 'comp;
                }
                // dx_k joins the directions collected so far on the right.
                sign *= merge_sign(mask, 1 << k);
                mask |= 1 << k;
            }
            let pulled: Vec<f64> = pmap.par_iter().map(|&q| v[q]).collect();
            accumulate(&mut slots, (mask, *b), sign, &pulled);
        }
        SampledForm::from_slots(&self.source, &w.coeffs, slots)
    }
}

/// The integral of a closed form over a coordinate subtorus through the
/// base point, one value per coefficient basis element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Period {
    pub directions: Vec<usize>,
    pub values: Vec<f64>,
}

/// Largest sample of `d w`.
pub fn closedness_residual(w: &SampledForm) -> f64 {
    exterior_d(w).max_abs()
}

/// Periods over every coordinate subtorus of circle directions through the
/// base point (sample 0 in all other directions). A closed form is exact
/// exactly when all of them vanish.
pub fn periods(w: &SampledForm, tol: f64) -> Result<Vec<Period>> {
    let residual = closedness_residual(w);
    if residual > tol {
        return Err(Error::NotClosed { residual, tol });
    }
    Ok(periods_unchecked(w))
}

/// Periods without the closedness check.
pub fn periods_unchecked(w: &SampledForm) -> Vec<Period> {
    let mesh = &w.mesh;
    let circles = mesh.circle_mask();
    let mut out = Vec::new();
    let mut sub = 0u32;
    loop {
        // Points of the subtorus `sub` through the base point.
        let mut pts = vec![0usize];
        for k in directions(sub) {
            let s = mesh.strides()[k];
            pts = pts
                .iter()
                .flat_map(|p| (0..mesh.factors()[k].samples()).map(move |i| p + i * s))
                .collect();
        }
        let values = (0..w.coeffs.dim())
            .map(|b| w.slot(sub, b).map_or(0.0, |v| pts.iter().map(|p| v[*p]).sum::<f64>() / pts.len() as f64))
            .collect();
        out.push(Period { directions: directions(sub), values });
        if sub == circles {
            break;
        }
        sub = (sub.wrapping_sub(circles)) & circles;
    }
    out
}

/// Largest period of the closed form `a - b`.
pub fn period_residual(a: &SampledForm, b: &SampledForm, tol: f64) -> Result<f64> {
    let ps = periods(&a.sub(b)?, tol)?;
    Ok(ps.iter().flat_map(|p| p.values.iter()).fold(0.0, |m, x| m.max(x.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formcalc::CoefficientSpace;
    use std::f64::consts::PI;

    #[test]
    fn spectral_derivative_of_sine() {
        let m = Mesh::torus(2, 16).unwrap();
        let s = CoefficientSpace::scalar();
        let f = SampledForm::from_fn(&m, &s, 0, 0, |x| (2.0 * PI * x[1]).sin()).unwrap();
        let df = exterior_d(&f);
        let want = SampledForm::from_fn(&m, &s, 0b10, 0, |x| 2.0 * PI * (2.0 * PI * x[1]).cos()).unwrap();
        assert!(df.max_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn fd_is_exact_on_quartics() {
        let m = Mesh::new(vec![Factor::Interval { n: 8 }]).unwrap();
        let s = CoefficientSpace::scalar();
        let f = SampledForm::from_fn(&m, &s, 0, 0, |x| x[0].powi(4) - x[0]).unwrap();
        let want = SampledForm::from_fn(&m, &s, 1, 0, |x| 4.0 * x[0].powi(3) - 1.0).unwrap();
        assert!(exterior_d(&f).max_diff(&want).unwrap() < 1e-11);
    }

    #[test]
    fn torus_periods() {
        let m = Mesh::torus(2, 8).unwrap();
        let s = CoefficientSpace::scalar();
        let w = SampledForm::from_fn(&m, &s, 0b11, 0, |x| 3.0 + (2.0 * PI * x[0]).cos()).unwrap();
        let ps = periods(&w, 1e-10).unwrap();
        assert_eq!(ps.len(), 4);
        assert_eq!(ps[3].directions, [0, 1]);
        assert!((ps[3].values[0] - 3.0).abs() < 1e-12);
        let not_closed = SampledForm::from_fn(&m, &s, 0b01, 0, |x| x[1].sin()).unwrap();
        assert!(matches!(periods(&not_closed, 1e-10), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn swap_pullback_flips_sign() {
        let m = Mesh::torus(2, 4).unwrap();
        let s = CoefficientSpace::scalar();
        let w = SampledForm::from_fn(&m, &s, 0b11, 0, |x| x[0]).unwrap();
        let swap = MeshMap::new(&m, &m, vec![Coord::Source(1), Coord::Source(0)]).unwrap();
        let p = swap.pullback(&w).unwrap();
        let want = SampledForm::from_fn(&m, &s, 0b11, 0, |x| -x[1]).unwrap();
        assert!(p.max_diff(&want).unwrap() < 1e-15);
    }
}
