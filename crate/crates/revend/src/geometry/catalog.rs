//! Built-in generating curves with known conformal type, used as the
//! reference suite for the classifier and the CLI table.

use super::catenoid::CatenoidMap;
use super::fresnel::{fresnel_c, fresnel_s};
use super::{arc_reparam, ArcCurve, Kappa, ParamCurve, ProfilePoint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Verdict a catalog entry is documented to have; consumed by the test
/// harness and the table command, never by the classifier itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpectedVerdict {
    Parabolic,
    NonParabolic,
    /// Parabolic on the best available evidence; Inconclusive also counts
    /// as a match.
    ParabolicSoft,
}

impl std::fmt::Display for ExpectedVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExpectedVerdict::Parabolic => write!(f, "parabolic"),
            ExpectedVerdict::NonParabolic => write!(f, "non-parabolic"),
            ExpectedVerdict::ParabolicSoft => write!(f, "parabolic (soft)"),
        }
    }
}

/// An end of revolution: a reparametrized generating curve plus its model.
#[derive(Debug, Clone)]
pub struct EndSpec {
    pub name: String,
    pub kappa: Kappa,
    pub curve: ArcCurve,
    pub expected: Option<ExpectedVerdict>,
}

/// Key-value parameters for catalog entries, all given as text
/// (e.g. from repeated `--param key=value` flags).
#[derive(Debug, Clone, Default)]
pub struct CatalogParams {
    map: BTreeMap<String, String>,
}

impl CatalogParams {
    pub fn new() -> Self {
        CatalogParams::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.map.insert(key.into(), value.into());
    }

    /// Parse `key=value` pairs.
    pub fn parse_pairs<S: AsRef<str>>(pairs: &[S]) -> Result<Self> {
        let mut out = CatalogParams::new();
        for p in pairs {
            let p = p.as_ref();
            let Some((k, v)) = p.split_once('=') else {
                return Err(Error::domain(format!(
                    "parameter `{p}` is not of the form key=value"
                )));
            };
            out.set(k.trim(), v.trim());
        }
        Ok(out)
    }
}

/// Tracks which parameters an entry consumed so leftovers can be rejected.
struct Reader<'a> {
    entry: &'a str,
    map: &'a BTreeMap<String, String>,
    used: BTreeSet<String>,
    known: Vec<&'static str>,
}

impl<'a> Reader<'a> {
    fn new(entry: &'a str, params: &'a CatalogParams) -> Self {
        Reader { entry, map: &params.map, used: BTreeSet::new(), known: Vec::new() }
    }

    fn f64(&mut self, key: &'static str, default: f64) -> Result<f64> {
        self.known.push(key);
        match self.map.get(key) {
            None => Ok(default),
            Some(raw) => {
                self.used.insert(key.to_string());
                raw.parse::<f64>().map_err(|_| {
                    Error::domain(format!(
                        "catalog entry `{}`: parameter `{key}` is not a number: `{raw}`",
                        self.entry
                    ))
                })
            }
        }
    }

    fn u32(&mut self, key: &'static str, default: u32) -> Result<u32> {
        self.known.push(key);
        match self.map.get(key) {
            None => Ok(default),
            Some(raw) => {
                self.used.insert(key.to_string());
                raw.parse::<u32>().map_err(|_| {
                    Error::domain(format!(
                        "catalog entry `{}`: parameter `{key}` is not a nonnegative integer: `{raw}`",
                        self.entry
                    ))
                })
            }
        }
    }

    fn word(&mut self, key: &'static str, default: &str, allowed: &[&str]) -> Result<String> {
        self.known.push(key);
        let raw = match self.map.get(key) {
            None => return Ok(default.to_string()),
            Some(raw) => {
                self.used.insert(key.to_string());
                raw.clone()
            }
        };
        if allowed.contains(&raw.as_str()) {
            Ok(raw)
        } else {
            Err(Error::domain(format!(
                "catalog entry `{}`: parameter `{key}` must be one of {}, got `{raw}`",
                self.entry,
                allowed.join("|")
            )))
        }
    }

    fn finish(self) -> Result<()> {
        for key in self.map.keys() {
            if !self.used.contains(key) {
                return Err(Error::domain(format!(
                    "catalog entry `{}` has no parameter `{key}` (known: {})",
                    self.entry,
                    self.known.join(", ")
                )));
            }
        }
        Ok(())
    }
}

fn require(cond: bool, entry: &str, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(format!("catalog entry `{entry}`: {msg}")))
    }
}

/// Names in table order.
pub fn catalog_names() -> Vec<&'static str> {
    vec![
        "plane_end",
        "bounded_oscillator",
        "sphere_end",
        "c_cone",
        "horosphere",
        "cylinder_upper",
        "cylinder_lower",
        "spherical_catenoid",
        "clothoid",
    ]
}

/// Build a catalog end by name. Unknown names, unknown parameters, and
/// degenerate parameter values are rejected as domain errors.
pub fn catalog(name: &str, params: &CatalogParams) -> Result<EndSpec> {
    let mut r = Reader::new(name, params);
    let (kappa, curve, expected) = match name {
        "plane_end" => {
            let rho = r.f64("rho", 1.0)?;
            require(rho > 0.0 && rho.is_finite(), name, "rho must be positive")?;
            let curve = ParamCurve::new(
                format!("plane_end(rho={rho})"),
                0.0,
                f64::INFINITY,
                move |t| ProfilePoint::new(rho + t, 0.0),
                |_| (1.0, 0.0),
            );
            (Kappa::Euclidean, curve, ExpectedVerdict::Parabolic)
        }
        "bounded_oscillator" => {
            let big_r = r.f64("R", 1.0)?;
            let a = r.f64("a", 0.1)?;
            require(a > 0.0 && a.is_finite(), name, "a must be positive")?;
            require(big_r > a && big_r.is_finite(), name, "R must exceed a")?;
            let d = big_r - a;
            let curve = ParamCurve::new(
                format!("bounded_oscillator(R={big_r},a={a})"),
                0.0,
                f64::INFINITY,
                move |t| {
                    let q = t * t + 1.0;
                    let phase = d * t * t * t / q + a * t;
                    ProfilePoint::new(d * t * t / q + a, phase.sin())
                },
                move |t| {
                    let q = t * t + 1.0;
                    let phase = d * t * t * t / q + a * t;
                    let dphase = d * t * t * (t * t + 3.0) / (q * q) + a;
                    (d * 2.0 * t / (q * q), phase.cos() * dphase)
                },
            );
            (Kappa::Euclidean, curve, ExpectedVerdict::Parabolic)
        }
        "sphere_end" => {
            let rr = r.f64("r", 1.0)?;
            let x = r.f64("x", 2.0)?;
            let z = r.f64("z", 2.0)?;
            require(rr > 0.0 && rr.is_finite(), name, "r must be positive")?;
            require(x.is_finite() && z.is_finite(), name, "center must be finite")?;
            require(x - rr > 0.0, name, "circle must stay off the rotation axis: need x - r > 0")?;
            let curve = ParamCurve::new(
                format!("sphere_end(r={rr},x={x},z={z})"),
                0.0,
                f64::INFINITY,
                move |t| ProfilePoint::new(x + rr * t.cos(), z + rr * t.sin()),
                move |t| (-rr * t.sin(), rr * t.cos()),
            );
            (Kappa::Spherical, curve, ExpectedVerdict::Parabolic)
        }
        "c_cone" => {
            let c = r.f64("c", 1.0)?;
            require(c > 0.0 && c.is_finite(), name, "slope c must be positive")?;
            let curve = ParamCurve::new(
                format!("c_cone(c={c})"),
                1.0,
                f64::INFINITY,
                move |t| ProfilePoint::new(t, c * t),
                move |_| (1.0, c),
            );
            (Kappa::Hyperbolic, curve, ExpectedVerdict::Parabolic)
        }
        "horosphere" => {
            let z = r.f64("z", 1.0)?;
            require(z > 0.0 && z.is_finite(), name, "height z must be positive")?;
            let curve = ParamCurve::new(
                format!("horosphere(z={z})"),
                0.0,
                f64::INFINITY,
                move |t| ProfilePoint::new(z * t + 1.0, z),
                move |_| (z, 0.0),
            );
            (Kappa::Hyperbolic, curve, ExpectedVerdict::Parabolic)
        }
        "cylinder_upper" => {
            let b = r.f64("b", 2.0)?;
            let c = r.f64("c", 1.0)?;
            require(b > 0.0 && b.is_finite(), name, "radius b must be positive")?;
            require(c > 0.0 && c.is_finite(), name, "height scale c must be positive")?;
            let curve = ParamCurve::new(
                format!("cylinder_upper(b={b},c={c})"),
                0.0,
                f64::INFINITY,
                move |t| ProfilePoint::new(b, c * t.exp()),
                move |t| (0.0, c * t.exp()),
            );
            (Kappa::Hyperbolic, curve, ExpectedVerdict::Parabolic)
        }
        "cylinder_lower" => {
            let b = r.f64("b", 2.0)?;
            let c = r.f64("c", 1.0)?;
            require(b > 0.0 && b.is_finite(), name, "radius b must be positive")?;
            require(c > 0.0 && c.is_finite(), name, "height scale c must be positive")?;
            let curve = ParamCurve::new(
                format!("cylinder_lower(b={b},c={c})"),
                0.0,
                f64::INFINITY,
                move |t| ProfilePoint::new(b, c * (-t).exp()),
                move |t| (0.0, -c * (-t).exp()),
            );
            (Kappa::Hyperbolic, curve, ExpectedVerdict::NonParabolic)
        }
        "spherical_catenoid" => {
            let a = r.f64("a", 0.5)?;
            let map = CatenoidMap::new(a)?;
            let map2 = map.clone();
            let curve = ParamCurve::new(
                format!("spherical_catenoid(a={a})"),
                0.0,
                f64::INFINITY,
                move |t| {
                    map.point(t).unwrap_or(ProfilePoint::new(f64::NAN, f64::NAN))
                },
                move |t| map2.velocity(t).unwrap_or((f64::NAN, f64::NAN)),
            );
            (Kappa::Hyperbolic, curve, ExpectedVerdict::NonParabolic)
        }
        "clothoid" => {
            let a = r.f64("a", 1.0)?;
            let n = r.u32("n", 1)?;
            let end = r.word("end", "upper", &["upper", "lower"])?;
            require(a > 0.0 && a.is_finite(), name, "scale a must be positive")?;
            require(n >= 1, name, "spiral exponent n must be at least 1")?;
            // u = e^t runs up the spiral, u = e^{-t} runs down into the
            // tightening end; both start at u = 1.
            let up = end == "upper";
            let bad = ProfilePoint::new(f64::NAN, f64::NAN);
            let curve = ParamCurve::new(
                format!("clothoid(a={a},n={n},end={end})"),
                0.0,
                f64::INFINITY,
                move |t| {
                    let u = if up { t.exp() } else { (-t).exp() };
                    match (fresnel_s(u, n), fresnel_c(u, n)) {
                        (Ok(s), Ok(c)) => ProfilePoint::new(a * s, a * c),
                        _ => bad,
                    }
                },
                move |t| {
                    let u = if up { t.exp() } else { (-t).exp() };
                    let du = if up { u } else { -u };
                    let g = u.powi(n as i32 + 1) / (n as f64 + 1.0);
                    (a * g.sin() * du, a * g.cos() * du)
                },
            );
            (Kappa::Hyperbolic, curve, ExpectedVerdict::ParabolicSoft)
        }
        _ => {
            return Err(Error::domain(format!(
                "unknown catalog entry `{name}` (known: {})",
                catalog_names().join(", ")
            )))
        }
    };
    r.finish()?;
    let arc = arc_reparam(&curve, kappa, 1.0, 1e-9)?;
    Ok(EndSpec { name: name.to_string(), kappa, curve: arc, expected: Some(expected) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(name: &str, pairs: &[&str]) -> Result<EndSpec> {
        catalog(name, &CatalogParams::parse_pairs(pairs)?)
    }

    #[test]
    fn all_defaults_build() {
        for name in catalog_names() {
            let end = build(name, &[]).unwrap();
            let p = end.curve.point(0.5).unwrap();
            assert!(p.x1 > 0.0, "{name} profile leaves the half-plane");
            assert!(end.expected.is_some());
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(build("c_cone", &["c=0"]).is_err());
        assert!(build("c_cone", &["c=-1"]).is_err());
        assert!(build("bounded_oscillator", &["R=0.05"]).is_err(), "R <= a must fail");
        assert!(build("sphere_end", &["x=1"]).is_err(), "circle touching the axis must fail");
        assert!(build("horosphere", &["z=0"]).is_err());
        assert!(build("spherical_catenoid", &["a=0"]).is_err());
        assert!(build("clothoid", &["n=0"]).is_err());
        assert!(build("clothoid", &["end=sideways"]).is_err());
    }

    #[test]
    fn unknown_entry_and_parameter_rejected() {
        let err = build("torus", &[]).unwrap_err();
        assert!(err.to_string().contains("known:"));
        assert!(build("c_cone", &["slope=1"]).is_err());
        assert!(CatalogParams::parse_pairs(&["justakey"]).is_err());
    }

    #[test]
    fn unit_speed_entries_take_identity_path() {
        for (name, pairs) in [
            ("horosphere", vec!["z=0.7"]),
            ("cylinder_upper", vec![]),
            ("cylinder_lower", vec![]),
            ("plane_end", vec![]),
        ] {
            let end = build(name, &pairs).unwrap();
            for s in [0.0, 0.3, 2.0, 17.0] {
                let t = end.curve.t_of_s(s).unwrap();
                assert_eq!(t - end.curve.t0(), s, "{name} is not identity at s = {s}");
            }
        }
    }

    #[test]
    fn catenoid_matches_reference_profile() {
        let end = build("spherical_catenoid", &[]).unwrap();
        let p = end.curve.point(5.0).unwrap();
        assert!((p.x1 - 1.6504855854747764).abs() < 1e-9);
        assert!((p.x3 - 0.01790555508414617).abs() < 1e-9);
    }

    #[test]
    fn clothoid_height_ratio_profile() {
        // Reference values from direct quadrature of the coordinate pair:
        // ratio x3/x1 at u = 1, and its global minimum near u = 2.8972.
        let end = build("clothoid", &[]).unwrap();
        let p0 = end.curve.point(0.0).unwrap();
        assert!((p0.x3 / p0.x1 - 5.9572633126722305).abs() < 1e-9);
        let u_min = 2.897213058534558f64;
        let s_min = end.curve.s_of_t(u_min.ln()).unwrap();
        let pm = end.curve.point(s_min).unwrap();
        assert!((pm.x3 / pm.x1 - 0.5665586313721068).abs() < 1e-8);
    }

    #[test]
    fn clothoid_upper_arc_lengths() {
        // Hyperbolic length along the spiral from u = 1, reference values
        // from independent quadrature of u / C(u) in log-parameter.
        let end = build("clothoid", &[]).unwrap();
        let cases: [(f64, f64); 4] =
            [(2.0, 0.798589), (5.0, 4.426652), (20.0, 21.411491), (100.0, 111.709034)];
        for (u, len) in cases {
            let s = end.curve.s_of_t(u.ln()).unwrap();
            assert!((s - len).abs() < 2e-5, "length to u = {u}: {s} vs {len}");
        }
    }

    #[test]
    fn clothoid_lower_ratio_grows() {
        let end = build("clothoid", &["end=lower"]).unwrap();
        let r = |s: f64| {
            let p = end.curve.point(s).unwrap();
            p.x3 / p.x1
        };
        assert!((r(0.0) - 5.9572633126722305).abs() < 1e-9);
        assert!(r(2.0) > r(0.0));
        assert!(r(6.0) > 100.0 * r(0.0));
    }

    #[test]
    fn oscillator_stays_in_band() {
        let end = build("bounded_oscillator", &[]).unwrap();
        for s in [0.0, 1.0, 5.0, 20.0, 60.0] {
            let p = end.curve.point(s).unwrap();
            assert!(p.x1 >= 0.1 - 1e-12 && p.x1 < 1.0, "x1({s}) = {}", p.x1);
            assert!(p.x3.abs() <= 1.0);
        }
    }

    #[test]
    fn sphere_profile_loops_forever() {
        let end = build("sphere_end", &[]).unwrap();
        // One full circle has finite length; far larger s must still work.
        let p = end.curve.point(10.0).unwrap();
        assert!(p.x1 > 1.0 && p.x1 < 3.0);
    }
}
