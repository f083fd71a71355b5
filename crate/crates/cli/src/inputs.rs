//! Input files and built-in names.

use std::fs;
use std::path::Path;

use cobord_core::algebra::{parse_rational, Base, Generator, GradedElement, GradedRingSpec, Ring};
use cobord_core::chernweil::DemoConfig;
use cobord_core::fgl::{universal_fgl_rational, FormalGroupLaw, ModulePresentation, RingMap};
use cobord_core::genera::{builtin_genus, CharacteristicSeries};
use serde::Deserialize;

use crate::UsageError;

pub const T2_LINE: &str = include_str!("../demos/t2-line.toml");

fn read(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, UsageError> {
    serde_json::from_str(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiFile {
    #[serde(default)]
    ring: Option<GradedRingSpec>,
    /// `phi_1, phi_2, ..` in the text form of the ring.
    coefficients: Vec<String>,
    #[serde(default)]
    label: Option<String>,
}

/// `phi` from a file, a built-in name, or a list of rationals.
pub fn characteristic_series(spec: &str, order: u32) -> Result<CharacteristicSeries, UsageError> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let f: PhiFile = parse_json(path)?;
        let ring: Ring = f.ring.map(GradedRingSpec::into_ring).unwrap_or_else(GradedRingSpec::rationals);
        let coeffs = f
            .coefficients
            .iter()
            .map(|t| GradedElement::parse(&ring, t))
            .collect::<Result<Vec<_>, _>>()?;
        let order = order.max(coeffs.len() as u32);
        let label = f.label.or_else(|| Some(spec.to_string()));
        return Ok(CharacteristicSeries::from_coefficients(&ring, &coeffs, order, label)?);
    }
    if spec.contains(',') && !spec.starts_with("elliptic(") || parse_rational(spec).is_ok() {
        let coeffs = spec.split(',').map(|t| parse_rational(t.trim())).collect::<Result<Vec<_>, _>>()?;
        let order = order.max(coeffs.len() as u32);
        return Ok(CharacteristicSeries::from_rationals(&coeffs, order, Some(spec.to_string()))?);
    }
    builtin_genus(spec, order).map_err(|e| match e {
        cobord_core::Error::UnknownName(n) => UsageError(format!(
            "unknown series `{n}` (known: one, todd, l_genus, a_hat, elliptic, elliptic(d,e); \
             or rationals `phi1,phi2,..`; or a .json file)"
        )),
        e => e.into(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FglFile {
    ring: GradedRingSpec,
    series: String,
    order: u32,
}

fn u_ring(laurent: bool, order: u32) -> Ring {
    let g = if laurent { Generator::laurent("u", -2) } else { Generator::new("u", -2) };
    let w = 2 * order as i64 + 2;
    GradedRingSpec::new(vec![g], Base::Z, (-w, w)).expect("valid").into_ring()
}

pub const FGL_NAMES: &str = "additive, additive-q, multiplicative, multiplicative-poly, multiplicative-q, universal";

/// A law from a JSON file or a built-in name.
pub fn formal_group_law(spec: &str, order: u32) -> Result<FormalGroupLaw, UsageError> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let f: FglFile = parse_json(path)?;
        return Ok(FormalGroupLaw::parse(&f.ring.into_ring(), &f.series, f.order)?);
    }
    let law = match spec {
        "additive" => FormalGroupLaw::additive(&GradedRingSpec::integers(), order),
        "additive-q" => FormalGroupLaw::additive(&GradedRingSpec::rationals(), order),
        "multiplicative" => FormalGroupLaw::parse(&u_ring(true, order), "x + y - u*x*y", order)?,
        "multiplicative-poly" => FormalGroupLaw::parse(&u_ring(false, order), "x + y - u*x*y", order)?,
        "multiplicative-q" => FormalGroupLaw::parse(&GradedRingSpec::rationals(), "x + y - x*y", order)?,
        "universal" => universal_fgl_rational(order.max(2))?,
        other => return Err(UsageError(format!("unknown law `{other}` (known: {FGL_NAMES}; or a .json file)"))),
    };
    Ok(law)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleFile {
    ring: GradedRingSpec,
    /// Degrees of the generators.
    generators: Vec<i64>,
    /// Relation columns; entry `i` is the coefficient of generator `i`.
    relations: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    target: GradedRingSpec,
    /// Images of the source generators, in order.
    images: Vec<String>,
}

pub fn module_and_map(module: &Path, map: &Path) -> Result<(ModulePresentation, RingMap), UsageError> {
    let m: ModuleFile = parse_json(module)?;
    let r: MapFile = parse_json(map)?;
    let ring = m.ring.into_ring();
    let module = ModulePresentation::parse(&ring, m.generators, &m.relations)?;
    let map = RingMap::parse(&ring, &r.target.into_ring(), &r.images)?;
    Ok((module, map))
}

/// `lo..hi` with `lo <= hi`.
pub fn window(text: &str) -> Result<(i64, i64), UsageError> {
    let bad = || UsageError(format!("window `{text}` is not of the form lo..hi"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// The demo configuration, from a shipped demo or a file, before overrides.
pub fn demo_config(demo: Option<&str>, config: Option<&Path>) -> Result<DemoConfig, UsageError> {
    let (text, origin) = match (demo, config) {
        (_, Some(p)) => (read(p)?, p.display().to_string()),
        (None | Some("t2-line"), None) => (T2_LINE.to_string(), "t2-line".to_string()),
        (Some(other), None) => return Err(UsageError(format!("unknown demo `{other}` (available: t2-line)"))),
    };
    toml::from_str(&text).map_err(|e| UsageError(format!("{origin}: {e}")))
}
