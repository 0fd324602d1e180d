//! Minimal-surface catenoid profiles in the hyperbolic half-space model.
//!
//! For neck parameter a > 0 the profile is
//!   gamma_a(s) = (e^{Lambda_a(s)} tanh y_a(s), e^{Lambda_a(s)} / cosh y_a(s))
//! with
//!   y_a(s)      = a + int_0^s cosh(2a) sinh(2t) / sqrt(cosh^2(2a) cosh^2(2t) - 1) dt
//!   Lambda_a(s) = sqrt(2) sinh(2a) int_0^s sqrt(cosh(2a) cosh(2t) - 1)
//!                                   / (cosh^2(2a) cosh^2(2t) - 1) dt
//! and the parametrization is exactly unit speed with warp sinh(y_a(s)).
//!
//! Both quadratures are tabulated on a fixed grid (step 0.25 up to s = 30)
//! with a per-query remainder panel; past s = 30 the y integrand is 1 and
//! the Lambda integrand is 0 to below 1e-39 relative, so the table switches
//! to the affine/constant tails. Derivatives come from the integrands
//! directly, never from numeric differentiation.

use crate::error::{Error, Result};
use crate::geometry::ProfilePoint;
use crate::quad::{integrate_fn, QuadCfg};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const GRID_STEP: f64 = 0.25;
const GRID_END: f64 = 30.0;
const GRID_LEN: usize = 121;

/// Cumulative tables for one neck parameter.
pub struct CatenoidMap {
    a: f64,
    /// y knots at s = 0, 0.25, ..., 30.
    y_knots: Vec<f64>,
    /// Lambda knots on the same grid.
    lam_knots: Vec<f64>,
}

/// cosh(2a) cosh(2t) - 1, evaluated as sinh^2(a+t) + sinh^2(a-t) so small
/// a, t do not cancel; the naive product form loses ~8 digits near zero and
/// poisons the adaptive quadrature with irreducible noise.
fn cosh_product_minus_one(a: f64, t: f64) -> f64 {
    let p = (a + t).sinh();
    let q = (a - t).sinh();
    p * p + q * q
}

fn y_integrand(a: f64, t: f64) -> f64 {
    // cosh^2(2a) cosh^2(2t) - 1 = d (d + 2) with d = cosh(2a) cosh(2t) - 1.
    let d = cosh_product_minus_one(a, t);
    (2.0 * a).cosh() * (2.0 * t).sinh() / (d * (d + 2.0)).sqrt()
}

fn lambda_integrand(a: f64, t: f64) -> f64 {
    let d = cosh_product_minus_one(a, t);
    1.0 / (d.sqrt() * (d + 2.0))
}

fn table_quad_cfg() -> QuadCfg {
    QuadCfg { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 40, max_panels: 60_000 }
}

impl CatenoidMap {
    pub fn new(a: f64) -> Result<Arc<CatenoidMap>> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!(
                "catenoid neck parameter must be positive and finite, got {a}"
            )));
        }
        let cache: &'static Mutex<HashMap<u64, Arc<CatenoidMap>>> = {
            static CELL: OnceLock<Mutex<HashMap<u64, Arc<CatenoidMap>>>> = OnceLock::new();
            CELL.get_or_init(|| Mutex::new(HashMap::new()))
        };
        if let Some(hit) = cache.lock().unwrap().get(&a.to_bits()) {
            return Ok(hit.clone());
        }
        let cfg = table_quad_cfg();
        let pref = std::f64::consts::SQRT_2 * (2.0 * a).sinh();
        let mut y_knots = Vec::with_capacity(GRID_LEN);
        let mut lam_knots = Vec::with_capacity(GRID_LEN);
        y_knots.push(a);
        lam_knots.push(0.0);
        for j in 1..GRID_LEN {
            let lo = (j - 1) as f64 * GRID_STEP;
            let hi = j as f64 * GRID_STEP;
            let dy = integrate_fn(|t| y_integrand(a, t), lo, hi, &cfg)?;
            let dl = integrate_fn(|t| lambda_integrand(a, t), lo, hi, &cfg)?;
            y_knots.push(y_knots[j - 1] + dy.value);
            lam_knots.push(lam_knots[j - 1] + pref * dl.value);
        }
        let map = Arc::new(CatenoidMap { a, y_knots, lam_knots });
        let mut g = cache.lock().unwrap();
        Ok(g.entry(a.to_bits()).or_insert(map).clone())
    }

    fn check_s(&self, s: f64) -> Result<()> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::domain(format!("catenoid arc length must be >= 0, got {s}")));
        }
        Ok(())
    }

    pub fn y(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        if s >= GRID_END {
            // Integrand is 1 - O(e^{-4t}); the dropped tail is below e^{-115}.
            return Ok(self.y_knots[GRID_LEN - 1] + (s - GRID_END));
        }
        let j = (s / GRID_STEP).floor() as usize;
        let base = j as f64 * GRID_STEP;
        let rem = integrate_fn(|t| y_integrand(self.a, t), base, s, &table_quad_cfg())?;
        Ok(self.y_knots[j] + rem.value)
    }

    pub fn lambda(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        if s >= GRID_END {
            return Ok(self.lam_knots[GRID_LEN - 1]);
        }
        let j = (s / GRID_STEP).floor() as usize;
        let base = j as f64 * GRID_STEP;
        let pref = std::f64::consts::SQRT_2 * (2.0 * self.a).sinh();
        let rem = integrate_fn(|t| lambda_integrand(self.a, t), base, s, &table_quad_cfg())?;
        Ok(self.lam_knots[j] + pref * rem.value)
    }

    pub fn dy(&self, s: f64) -> f64 {
        if s >= GRID_END {
            1.0
        } else {
            y_integrand(self.a, s)
        }
    }

    pub fn dlambda(&self, s: f64) -> f64 {
        if s >= GRID_END {
            0.0
        } else {
            std::f64::consts::SQRT_2 * (2.0 * self.a).sinh() * lambda_integrand(self.a, s)
        }
    }

    pub fn point(&self, s: f64) -> Result<ProfilePoint> {
        let y = self.y(s)?;
        let el = self.lambda(s)?.exp();
        Ok(ProfilePoint { x1: el * y.tanh(), x3: el / y.cosh() })
    }

    /// (d gamma_1 / ds, d gamma_3 / ds), exact up to the table accuracy.
    pub fn velocity(&self, s: f64) -> Result<(f64, f64)> {
        let y = self.y(s)?;
        let el = self.lambda(s)?.exp();
        let dy = self.dy(s);
        let dl = self.dlambda(s);
        let sech = 1.0 / y.cosh();
        let d1 = el * (dl * y.tanh() + dy * sech * sech);
        let d3 = el * sech * (dl - dy * y.tanh());
        Ok((d1, d3))
    }
}

/// Profile point of the catenoid with neck parameter a at arc length s.
pub fn catenoid_profile(a: f64, s: f64) -> Result<ProfilePoint> {
    CatenoidMap::new(a)?.point(s)
}

/// y_a(s), the log-warp coordinate: the warp of the end is sinh(y_a(s)).
pub fn catenoid_y(a: f64, s: f64) -> Result<f64> {
    CatenoidMap::new(a)?.y(s)
}

/// Lambda_a(s), the conformal stretch exponent; bounded in s.
pub fn catenoid_lambda(a: f64, s: f64) -> Result<f64> {
    CatenoidMap::new(a)?.lambda(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent adaptive quadrature of the
    // defining integrals.
    #[test]
    fn y_reference_values() {
        let cases = [
            (0.5, 0.1, 0.512952435932),
            (0.5, 0.5, 0.756687003298),
            (0.5, 1.0, 1.222214474931),
            (0.5, 2.0, 2.216987707947),
            (0.5, 5.0, 5.216890415839274),
            (0.25, 5.0, 5.06005725369922),
            (1.0, 5.0, 5.662501374636698),
        ];
        for (a, s, want) in cases {
            let got = catenoid_y(a, s).unwrap();
            assert!((got - want).abs() < 1e-10, "y_{a}({s}) = {got}, want {want}");
        }
    }

    #[test]
    fn lambda_reference_values() {
        assert!((catenoid_lambda(0.5, 5.0).unwrap() - 0.5011283820805346).abs() < 1e-10);
        assert!((catenoid_lambda(0.25, 30.0).unwrap() - 0.4315969728853296).abs() < 1e-10);
        assert!((catenoid_lambda(1.0, 30.0).unwrap() - 0.39427581307841836).abs() < 1e-10);
        // Lambda saturates: value at 30 equals the limit to working precision.
        let l30 = catenoid_lambda(0.5, 30.0).unwrap();
        assert!((l30 - 0.501128632139905).abs() < 1e-10);
        assert_eq!(catenoid_lambda(0.5, 100.0).unwrap(), l30);
    }

    #[test]
    fn profile_reference_point() {
        let p = catenoid_profile(0.5, 5.0).unwrap();
        assert!((p.x1 - 1.6504855854747764).abs() < 1e-10);
        assert!((p.x3 - 0.01790555508414617).abs() < 1e-10);
    }

    #[test]
    fn warp_is_sinh_of_y() {
        // Unit-speed profile in the half-space model: warp = x1 / x3.
        for s in [0.3, 1.7, 4.0, 9.5] {
            let p = catenoid_profile(0.5, s).unwrap();
            let w_conf = p.x1 / p.x3;
            let w_exact = catenoid_y(0.5, s).unwrap().sinh();
            assert!((w_conf - w_exact).abs() < 1e-9 * w_exact.max(1.0));
        }
    }

    #[test]
    fn velocity_is_unit_speed_in_model_metric() {
        let map = CatenoidMap::new(0.5).unwrap();
        for s in [0.0, 0.2, 1.0, 3.3, 7.0, 20.0, 45.0] {
            let p = map.point(s).unwrap();
            let (d1, d3) = map.velocity(s).unwrap();
            let sigma = (d1 * d1 + d3 * d3).sqrt() / p.x3;
            assert!((sigma - 1.0).abs() < 1e-9, "sigma({s}) = {sigma}");
        }
    }

    #[test]
    fn tiny_neck_degenerates_to_vertical_line() {
        // y(s) -> s + O(a^2): the a and -a terms of the affine constant
        // cancel, leaving 3 + 1.000012e-12 at a = 1e-6.
        assert!((catenoid_y(1e-6, 3.0).unwrap() - 3.000000000001).abs() < 1e-9);
        assert!(catenoid_lambda(1e-6, 3.0).unwrap() < 1e-4);
    }

    #[test]
    fn invalid_neck_rejected() {
        assert!(catenoid_profile(0.0, 1.0).is_err());
        assert!(catenoid_profile(-1.0, 1.0).is_err());
        assert!(catenoid_y(f64::NAN, 1.0).is_err());
    }
}
