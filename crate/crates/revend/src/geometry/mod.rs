//! Conformal models of the three space forms and profile-curve geometry.
//!
//! Profile curves live in the (x1, x3) half-plane {x1 > 0} of the model and
//! are rotated about the x3-axis. The ambient metric is `eta_kappa * <.,.>`
//! with the conformal factor `eta` depending on the curvature selector.

mod arc;
mod catalog;
mod catenoid;
mod curve;
mod fresnel;
mod surface;

pub use arc::{arc_reparam, ArcCurve};
pub use catalog::{catalog, catalog_names, CatalogParams, EndSpec, ExpectedVerdict};
pub use catenoid::{catenoid_lambda, catenoid_profile, catenoid_y};
pub use curve::ParamCurve;
pub use fresnel::{fresnel_c, fresnel_s, FRESNEL_LIMIT};
pub use surface::{euclid_mean_curvature, mesh, Mesh};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ambient curvature selector: which conformal model the profile lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kappa {
    /// kappa = -1: half-space model, x3 > 0, factor 1/x3^2.
    Hyperbolic,
    /// kappa = 0: Euclidean space, factor 1.
    Euclidean,
    /// kappa = +1: stereographic model, factor 4/(1+|x|^2)^2.
    Spherical,
}

impl Kappa {
    pub fn value(self) -> i8 {
        match self {
            Kappa::Hyperbolic => -1,
            Kappa::Euclidean => 0,
            Kappa::Spherical => 1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(Kappa::Hyperbolic),
            0 => Ok(Kappa::Euclidean),
            1 => Ok(Kappa::Spherical),
            _ => Err(Error::domain(format!("curvature selector must be -1, 0 or 1, got {v}"))),
        }
    }
}

/// A point of the profile half-plane (second model coordinate suppressed:
/// the curve lives in {x2 = 0}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x1: f64,
    pub x3: f64,
}

impl ProfilePoint {
    pub fn new(x1: f64, x3: f64) -> Self {
        ProfilePoint { x1, x3 }
    }

    /// Reject points outside the model domain or on the rotation axis.
    pub fn validate(&self, kappa: Kappa) -> Result<()> {
        if !self.x1.is_finite() || !self.x3.is_finite() {
            return Err(Error::numeric(format!(
                "profile point ({}, {}) is not finite",
                self.x1, self.x3
            )));
        }
        if self.x1 <= 0.0 {
            return Err(Error::domain(format!(
                "profile must stay off the rotation axis: x1 = {} <= 0",
                self.x1
            )));
        }
        if kappa == Kappa::Hyperbolic && self.x3 <= 0.0 {
            return Err(Error::domain(format!(
                "half-space model requires x3 > 0, got x3 = {}",
                self.x3
            )));
        }
        Ok(())
    }
}

/// Conformal factor eta_kappa at `p`: 1/x3^2, 1, or 4/(1+x1^2+x3^2)^2.
pub fn metric_factor(kappa: Kappa, p: ProfilePoint) -> Result<f64> {
    p.validate(kappa)?;
    Ok(match kappa {
        Kappa::Hyperbolic => 1.0 / (p.x3 * p.x3),
        Kappa::Euclidean => 1.0,
        Kappa::Spherical => {
            let r2 = 1.0 + p.x1 * p.x1 + p.x3 * p.x3;
            4.0 / (r2 * r2)
        }
    })
}

/// Length of the tangent vector `v` at `p` in the model metric:
/// sqrt(eta) * |v|.
pub fn tangent_norm(kappa: Kappa, p: ProfilePoint, v: (f64, f64)) -> Result<f64> {
    let eta = metric_factor(kappa, p)?;
    Ok(eta.sqrt() * (v.0 * v.0 + v.1 * v.1).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_factor_is_one() {
        let p = ProfilePoint::new(7.0, -3.0);
        assert_eq!(metric_factor(Kappa::Euclidean, p).unwrap(), 1.0);
    }

    #[test]
    fn hyperbolic_factor() {
        let p = ProfilePoint::new(1.0, 2.0);
        assert_eq!(metric_factor(Kappa::Hyperbolic, p).unwrap(), 0.25);
    }

    #[test]
    fn spherical_factor_near_origin() {
        // x1 must be positive; evaluate just off the origin and compare
        // against the closed form at the same point.
        let p = ProfilePoint::new(1e-12, 0.0);
        let eta = metric_factor(Kappa::Spherical, p).unwrap();
        assert!((eta - 4.0).abs() < 1e-11);
    }

    #[test]
    fn euclidean_norm() {
        let p = ProfilePoint::new(1.0, 0.0);
        assert_eq!(tangent_norm(Kappa::Euclidean, p, (3.0, 4.0)).unwrap(), 5.0);
    }

    #[test]
    fn vertical_cylinder_profile_is_unit_speed() {
        // Point (b, c e^t) with velocity (0, c e^t) has hyperbolic norm 1.
        for t in [0.0, 1.0, 3.0] {
            let x3 = 0.5 * f64::exp(t);
            let p = ProfilePoint::new(2.0, x3);
            let n = tangent_norm(Kappa::Hyperbolic, p, (0.0, x3)).unwrap();
            assert!((n - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cone_ray_speed() {
        // (t, ct) with velocity (1, c): hyperbolic norm sqrt(1+c^2)/(c t).
        let c = 2.0;
        for t in [1.0, 4.0, 9.0] {
            let p = ProfilePoint::new(t, c * t);
            let n = tangent_norm(Kappa::Hyperbolic, p, (1.0, c)).unwrap();
            let exact = (1.0 + c * c).sqrt() / (c * t);
            assert!((n - exact).abs() < 1e-15 * exact);
        }
    }

    #[test]
    fn domain_violations_rejected() {
        assert!(metric_factor(Kappa::Hyperbolic, ProfilePoint::new(1.0, 0.0)).is_err());
        assert!(metric_factor(Kappa::Hyperbolic, ProfilePoint::new(1.0, -1.0)).is_err());
        assert!(metric_factor(Kappa::Euclidean, ProfilePoint::new(0.0, 1.0)).is_err());
    }
}
