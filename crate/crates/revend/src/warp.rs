//! Warped-product data of an end: the warp w(s), its derivative, the
//! cumulative integral Omega(t) = int_0^t w, the mass centroid Omega/s,
//! and the radial Gauss curvature -w''/w.
//!
//! The rotationally invariant metric of the end is ds^2 + w(s)^2 dtheta^2,
//! and for a curve in a conformal model the warp is
//! sqrt(eta(gamma(s))) * gamma_1(s).

use crate::error::{Error, Result};
use crate::geometry::{ArcCurve, Kappa};
use crate::quad::{integrate, Quad, QuadCfg};
use serde::{Deserialize, Serialize};
use std::sync::{Arc, Mutex};

/// Where a warp came from; extensions remember their cap radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WarpSource {
    CurveDerived,
    Extended { rho: f64 },
    Synthetic,
}

type ScalarFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// Cumulative panels of Omega(t) = int_0^t w: unit panels up to 64, then
/// doubling spans. Each panel is integrated independently, so the cached
/// values never depend on query order.
struct OmegaCache {
    w: Arc<ScalarFn>,
    quad: QuadCfg,
    /// (upper bound, cumulative value, cumulative error) per filled panel.
    filled: Mutex<Vec<(f64, f64, f64)>>,
}

impl OmegaCache {
    fn next_bound(prev: f64) -> f64 {
        if prev < 64.0 {
            prev + 1.0
        } else {
            prev * 2.0
        }
    }

    fn query(&self, t: f64) -> Result<Quad> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::domain(format!(
                "cumulative warp integral needs t >= 0, got {t}"
            )));
        }
        if t == 0.0 {
            return Ok(Quad { value: 0.0, abs_err: 0.0 });
        }
        let mut filled = self.filled.lock().unwrap();
        // Fill whole canonical panels only; a partial panel is never
        // cached, so cached values cannot depend on query order.
        loop {
            let lo = filled.last().map_or(0.0, |p| p.0);
            let hi = Self::next_bound(lo);
            if lo >= t || hi > t {
                break;
            }
            let q = integrate(self.w.as_ref(), lo, hi, &self.quad)?;
            let (cum_v, cum_e) = filled.last().map_or((0.0, 0.0), |p| (p.1, p.2));
            filled.push((hi, cum_v + q.value, cum_e + q.abs_err));
        }
        // Largest cached bound not exceeding t.
        let idx = filled.partition_point(|p| p.0 <= t);
        let (base_t, base_v, base_e) = if idx == 0 { (0.0, 0.0, 0.0) } else { filled[idx - 1] };
        drop(filled);
        if base_t == t {
            return Ok(Quad { value: base_v, abs_err: base_e });
        }
        let rem = integrate(self.w.as_ref(), base_t, t, &self.quad)?;
        Ok(Quad { value: base_v + rem.value, abs_err: base_e + rem.abs_err })
    }
}

/// The warp function of an end, with closed-form derivative and a shared
/// cumulative-integral cache.
#[derive(Clone)]
pub struct WarpFn {
    label: String,
    source: WarpSource,
    w: Arc<ScalarFn>,
    dw: Arc<ScalarFn>,
    omega: Arc<OmegaCache>,
}

impl std::fmt::Debug for WarpFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarpFn")
            .field("label", &self.label)
            .field("source", &self.source)
            .finish()
    }
}

impl WarpFn {
    fn assemble(label: String, source: WarpSource, w: Arc<ScalarFn>, dw: Arc<ScalarFn>) -> WarpFn {
        let omega = Arc::new(OmegaCache {
            w: w.clone(),
            quad: QuadCfg::default(),
            filled: Mutex::new(Vec::new()),
        });
        WarpFn { label, source, w, dw, omega }
    }

    /// Warp from plain closures; needed for analytic reference warps.
    pub fn synthetic(
        label: impl Into<String>,
        w: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dw: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> WarpFn {
        WarpFn::assemble(
            label.into(),
            WarpSource::Synthetic,
            Arc::new(move |s| Ok(w(s))),
            Arc::new(move |s| Ok(dw(s))),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The same warp multiplied by a positive constant. Every verdict kind
    /// is invariant under this scaling; tests rely on that.
    pub fn scaled(&self, k: f64) -> Result<WarpFn> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::domain(format!("warp scale must be positive and finite, got {k}")));
        }
        let w = self.w.clone();
        let dw = self.dw.clone();
        Ok(WarpFn::assemble(
            format!("{} * {k}", self.label),
            self.source,
            Arc::new(move |s| Ok(k * w(s)?)),
            Arc::new(move |s| Ok(k * dw(s)?)),
        ))
    }

    pub fn source(&self) -> WarpSource {
        self.source
    }

    /// Cap radius when this warp is an extension across the rotation axis.
    pub fn extension_rho(&self) -> Option<f64> {
        match self.source {
            WarpSource::Extended { rho } => Some(rho),
            _ => None,
        }
    }

    /// w(s); positive and finite or an error.
    pub fn w(&self, s: f64) -> Result<f64> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::domain(format!("warp argument must be >= 0, got {s}")));
        }
        let v = (self.w)(s)?;
        if !v.is_finite() {
            return Err(Error::numeric(format!("warp `{}` overflows at s = {s}", self.label)));
        }
        // A zero at s = 0 is the smooth axis value of capped or synthetic
        // warps; anywhere else the warp must be strictly positive.
        if v < 0.0 || (v == 0.0 && s > 0.0) {
            return Err(Error::domain(format!(
                "warp `{}` must stay positive, got {v} at s = {s}",
                self.label
            )));
        }
        Ok(v)
    }

    /// dw/ds.
    pub fn dw(&self, s: f64) -> Result<f64> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::domain(format!("warp argument must be >= 0, got {s}")));
        }
        let v = (self.dw)(s)?;
        if !v.is_finite() {
            return Err(Error::numeric(format!(
                "warp derivative of `{}` overflows at s = {s}",
                self.label
            )));
        }
        Ok(v)
    }

    /// Omega(t) = int_0^t w, with an accumulated error bound.
    pub fn omega(&self, t: f64) -> Result<Quad> {
        self.omega.query(t)
    }
}

/// Warp of the revolution end generated by `curve`: sqrt(eta) * gamma_1.
/// The derivative uses the exact unit tangent and the chain rule.
pub fn warp_from_curve(curve: &ArcCurve) -> Result<WarpFn> {
    let kappa = curve.kappa();
    let c_w = curve.clone();
    let w = move |s: f64| -> Result<f64> {
        let p = c_w.point(s)?;
        Ok(match kappa {
            Kappa::Euclidean => p.x1,
            Kappa::Hyperbolic => p.x1 / p.x3,
            Kappa::Spherical => 2.0 * p.x1 / (1.0 + p.x1 * p.x1 + p.x3 * p.x3),
        })
    };
    let c_dw = curve.clone();
    let dw = move |s: f64| -> Result<f64> {
        let p = c_dw.point(s)?;
        let (d1, d3) = c_dw.tangent(s)?;
        Ok(match kappa {
            Kappa::Euclidean => d1,
            Kappa::Hyperbolic => (d1 * p.x3 - p.x1 * d3) / (p.x3 * p.x3),
            Kappa::Spherical => {
                let q = 1.0 + p.x1 * p.x1 + p.x3 * p.x3;
                2.0 * (d1 * q - 2.0 * p.x1 * (p.x1 * d1 + p.x3 * d3)) / (q * q)
            }
        })
    };
    let wf = WarpFn::assemble(
        format!("warp[{}]", curve.label()),
        WarpSource::CurveDerived,
        Arc::new(w),
        Arc::new(dw),
    );
    wf.w(0.0)?;
    Ok(wf)
}

/// Cap the end across the axis: returns W with
///   W(x) = x on [0, rho/4],
///   a monotone-safe cubic bridge on (rho/4, rho), clipped from below at
///   half the smaller endpoint value,
///   W(x) = w(x - rho) for x >= rho.
/// Tail quantities of w are unchanged; integrals over the cap become
/// finite even when int 1/w diverges at the inner end.
pub fn extend_warp(w: &WarpFn, rho: f64) -> Result<WarpFn> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("extension radius must be positive, got {rho}")));
    }
    if let WarpSource::Extended { rho: r0 } = w.source {
        return Err(Error::domain(format!(
            "warp `{}` is already an extension with rho = {r0}",
            w.label
        )));
    }
    let w0 = w.w(0.0)?;
    let dw0 = w.dw(0.0)?;
    let x_a = 0.25 * rho;
    let len = rho - x_a;
    let floor = 0.5 * x_a.min(w0);
    // Hermite data on [x_a, rho]: value/slope (x_a, 1) -> (w0, dw0).
    let m = (w0 - x_a) / len;
    let c2 = (3.0 * m - 2.0 - dw0) / len;
    let c3 = (1.0 + dw0 - 2.0 * m) / (len * len);
    let bridge = move |x: f64| {
        let u = x - x_a;
        let v = x_a + u * (1.0 + u * (c2 + u * c3));
        (v.max(floor), v > floor)
    };
    let inner = w.clone();
    let wf = move |x: f64| -> Result<f64> {
        if x < 0.0 {
            return Err(Error::domain(format!("extended warp needs x >= 0, got {x}")));
        }
        if x <= x_a {
            // W(0) = 0 is the smooth axis value; quadratures never
            // evaluate the endpoint itself.
            Ok(x)
        } else if x < rho {
            Ok(bridge(x).0)
        } else {
            inner.w(x - rho)
        }
    };
    let inner_d = w.clone();
    let dwf = move |x: f64| -> Result<f64> {
        if x < 0.0 {
            return Err(Error::domain(format!("extended warp needs x >= 0, got {x}")));
        }
        if x <= x_a {
            Ok(1.0)
        } else if x < rho {
            let u = x - x_a;
            let (_, unclipped) = bridge(x);
            Ok(if unclipped { 1.0 + u * (2.0 * c2 + 3.0 * c3 * u) } else { 0.0 })
        } else {
            inner_d.dw(x - rho)
        }
    };
    Ok(WarpFn::assemble(
        format!("{}+cap(rho={rho})", w.label),
        WarpSource::Extended { rho },
        Arc::new(wf),
        Arc::new(dwf),
    ))
}

/// Omega(t) = int_0^t w ds.
pub fn cumulative(w: &WarpFn, t: f64) -> Result<Quad> {
    w.omega(t)
}

/// The normalized first moment x_g(s) = Omega(s) / s.
#[derive(Clone, Debug)]
pub struct CentroidFn {
    warp: WarpFn,
}

impl CentroidFn {
    pub fn x_g(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("centroid needs s > 0, got {s}")));
        }
        Ok(self.warp.omega(s)?.value / s)
    }
}

pub fn centroid(w: &WarpFn) -> CentroidFn {
    CentroidFn { warp: w.clone() }
}

/// Radial sectional (Gauss) curvature of the warped metric, -w''/w, with
/// w'' from Richardson-refined central differences of dw at step
/// h = 1e-4 * max(1, s).
pub fn gauss_curvature(w: &WarpFn, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!(
            "radial curvature is evaluated at interior points s > 0, got {s}"
        )));
    }
    let mut h = 1e-4 * s.abs().max(1.0);
    if s < 2.0 * h {
        h = 0.5 * s;
    }
    let diff = |hh: f64| -> Result<f64> { Ok((w.dw(s + hh)? - w.dw(s - hh)?) / (2.0 * hh)) };
    let d1 = diff(h)?;
    let d2 = diff(0.5 * h)?;
    let ddw = (4.0 * d2 - d1) / 3.0;
    let ws = w.w(s)?;
    if ws < 1e-300 {
        return Err(Error::numeric(format!(
            "warp `{}` underflows at s = {s}; curvature is not resolvable",
            w.label()
        )));
    }
    Ok(-ddw / ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, CatalogParams};

    fn warp_of(name: &str, pairs: &[&str]) -> WarpFn {
        let end = catalog(name, &CatalogParams::parse_pairs(pairs).unwrap()).unwrap();
        warp_from_curve(&end.curve).unwrap()
    }

    #[test]
    fn cumulative_of_linear_warp() {
        let w = WarpFn::synthetic("s+1", |s| s + 1.0, |_| 1.0);
        assert_eq!(cumulative(&w, 0.0).unwrap().value, 0.0);
        let q1 = cumulative(&w, 1.0).unwrap().value;
        assert!((q1 - 1.5).abs() < 1e-12, "got {q1}");
        let q = cumulative(&w, 200.0).unwrap();
        let exact = 200.0f64 * 200.0 / 2.0 + 200.0;
        assert!((q.value - exact).abs() < 1e-8 * exact, "got {}", q.value);
    }

    #[test]
    fn cumulative_of_exponential_warp() {
        let w = WarpFn::synthetic("e^s", f64::exp, f64::exp);
        let q = cumulative(&w, 2.0).unwrap();
        assert!((q.value - (2.0f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn cumulative_is_query_order_independent() {
        let mk = || WarpFn::synthetic("quad", |s| 1.0 + s * s, |s| 2.0 * s);
        let w1 = mk();
        let a1 = cumulative(&w1, 7.3).unwrap().value;
        let b1 = cumulative(&w1, 130.0).unwrap().value;
        let w2 = mk();
        let b2 = cumulative(&w2, 130.0).unwrap().value;
        let a2 = cumulative(&w2, 7.3).unwrap().value;
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
    }

    #[test]
    fn catalog_warps_match_closed_forms() {
        let cases: Vec<(WarpFn, Box<dyn Fn(f64) -> f64>)> = vec![
            (warp_of("plane_end", &["rho=1"]), Box::new(|s| 1.0 + s)),
            (warp_of("horosphere", &["z=2"]), Box::new(|s| s + 0.5)),
            (warp_of("c_cone", &["c=2"]), Box::new(|_| 0.5)),
            (warp_of("cylinder_upper", &[]), Box::new(|s| 2.0 * (-s).exp())),
            (warp_of("cylinder_lower", &[]), Box::new(|s| 2.0 * s.exp())),
        ];
        for (w, exact) in cases {
            for s in [0.0, 0.4, 2.0, 11.0] {
                let got = w.w(s).unwrap();
                let want = exact(s);
                assert!(
                    (got - want).abs() <= 1e-9 * want.max(1.0),
                    "{}: w({s}) = {got}, want {want}",
                    w.label()
                );
            }
        }
    }

    #[test]
    fn catenoid_warp_is_sinh_y() {
        use crate::geometry::catenoid_y;
        let w = warp_of("spherical_catenoid", &[]);
        for s in [0.0, 1.0, 5.0] {
            let want = catenoid_y(0.5, s).unwrap().sinh();
            let got = w.w(s).unwrap();
            assert!((got - want).abs() < 1e-8 * want.max(1.0));
        }
        assert!((w.w(5.0).unwrap() - 92.17729233851787).abs() < 1e-6);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for (name, pairs) in
            [("horosphere", vec![]), ("cylinder_lower", vec![]), ("spherical_catenoid", vec![])]
        {
            let w = warp_of(name, &pairs);
            for s in [0.5, 2.0, 6.0] {
                let h = 1e-5;
                let fd = (w.w(s + h).unwrap() - w.w(s - h).unwrap()) / (2.0 * h);
                let an = w.dw(s).unwrap();
                assert!(
                    (fd - an).abs() < 1e-6 * an.abs().max(1.0),
                    "{name}: dw({s}) = {an} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn extension_shape() {
        let w = WarpFn::synthetic("const2", |_| 2.0, |_| 0.0);
        let rho = 1.0;
        let ext = extend_warp(&w, rho).unwrap();
        assert_eq!(ext.w(0.1).unwrap(), 0.1);
        assert_eq!(ext.w(0.25).unwrap(), 0.25);
        for x in [0.3, 0.5, 0.7, 0.9, 0.99] {
            let v = ext.w(x).unwrap();
            assert!(v >= 0.125 - 1e-15, "bridge clipped too low at {x}");
        }
        assert!((ext.w(1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((ext.w(3.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(extend_warp(&ext, 0.5).is_err(), "double extension must fail");
    }

    #[test]
    fn extension_preserves_tail_values() {
        let w = warp_of("cylinder_lower", &[]);
        let ext = extend_warp(&w, 2.0).unwrap();
        for s in [0.0, 1.0, 4.0] {
            assert_eq!(ext.w(s + 2.0).unwrap(), w.w(s).unwrap());
            assert_eq!(ext.dw(s + 2.0).unwrap(), w.dw(s).unwrap());
        }
    }

    #[test]
    fn centroid_of_horosphere_is_half_line() {
        let w = warp_of("horosphere", &["z=1"]);
        let c = centroid(&w);
        // Omega(s) = s^2/2 + s, so x_g = s/2 + 1.
        assert!((c.x_g(4.0).unwrap() - 3.0).abs() < 1e-9);
        assert!((c.x_g(10.0).unwrap() - 6.0).abs() < 1e-9);
        assert!(c.x_g(0.0).is_err());
    }

    #[test]
    fn flat_warps_have_zero_curvature() {
        let cone = warp_of("c_cone", &[]);
        let horo = warp_of("horosphere", &[]);
        for s in [1.0, 3.0, 10.0, 50.0, 100.0] {
            assert!(gauss_curvature(&cone, s).unwrap().abs() < 1e-6);
            assert!(gauss_curvature(&horo, s).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn sinh_warp_has_curvature_minus_one() {
        let w = WarpFn::synthetic("sinh", |s| (s + 0.3).sinh(), |s| (s + 0.3).cosh());
        for s in [0.5, 2.0, 8.0] {
            assert!((gauss_curvature(&w, s).unwrap() + 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn negative_warp_is_rejected() {
        let w = WarpFn::synthetic("bad", |s| 1.0 - s, |_| -1.0);
        assert!(w.w(0.5).is_ok());
        assert!(w.w(2.0).is_err());
    }
}
