//! Profile curves in their native parameter, before arc-length
//! reparametrization.

use super::ProfilePoint;
use crate::error::{Error, Result};
use std::sync::Arc;

type EvalFn = dyn Fn(f64) -> ProfilePoint + Send + Sync;
type DerivFn = dyn Fn(f64) -> (f64, f64) + Send + Sync;

/// A regular curve t -> (x1(t), x3(t)) on the half-open domain [t0, t_end).
#[derive(Clone)]
pub struct ParamCurve {
    pub label: String,
    pub t0: f64,
    /// Domain upper limit, `f64::INFINITY` for a full end.
    pub t_end: f64,
    eval: Arc<EvalFn>,
    deriv: Arc<DerivFn>,
}

impl std::fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamCurve")
            .field("label", &self.label)
            .field("t0", &self.t0)
            .field("t_end", &self.t_end)
            .finish()
    }
}

impl ParamCurve {
    /// Curve with a supplied closed-form derivative.
    pub fn new(
        label: impl Into<String>,
        t0: f64,
        t_end: f64,
        eval: impl Fn(f64) -> ProfilePoint + Send + Sync + 'static,
        deriv: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        ParamCurve {
            label: label.into(),
            t0,
            t_end,
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
        }
    }

    /// Curve with the derivative taken by Richardson-extrapolated central
    /// differences, step h = 1e-6 * max(1, |t|).
    pub fn with_fd_deriv(
        label: impl Into<String>,
        t0: f64,
        t_end: f64,
        eval: impl Fn(f64) -> ProfilePoint + Send + Sync + 'static,
    ) -> Self {
        let eval = Arc::new(eval);
        let eval_for_deriv = Arc::clone(&eval);
        let deriv = move |t: f64| fd_deriv(eval_for_deriv.as_ref(), t);
        ParamCurve {
            label: label.into(),
            t0,
            t_end,
            eval: Arc::new(move |t| eval(t)),
            deriv: Arc::new(deriv),
        }
    }

    pub fn eval(&self, t: f64) -> ProfilePoint {
        (self.eval)(t)
    }

    pub fn deriv(&self, t: f64) -> (f64, f64) {
        (self.deriv)(t)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t < self.t_end
    }

    /// Regularity check at `t`: finite values, nonvanishing velocity.
    pub fn check_regular(&self, t: f64) -> Result<()> {
        let d = self.deriv(t);
        if !d.0.is_finite() || !d.1.is_finite() {
            return Err(Error::numeric(format!(
                "curve `{}` has a non-finite derivative at t = {t}",
                self.label
            )));
        }
        if d.0 == 0.0 && d.1 == 0.0 {
            return Err(Error::domain(format!(
                "curve `{}` is not regular: velocity vanishes at t = {t}",
                self.label
            )));
        }
        Ok(())
    }
}

/// Five-point Richardson refinement of the central difference.
fn fd_deriv(eval: &(impl Fn(f64) -> ProfilePoint + ?Sized), t: f64) -> (f64, f64) {
    let h = 1e-6 * t.abs().max(1.0);
    let diff = |hh: f64| {
        let p = eval(t + hh);
        let m = eval(t - hh);
        ((p.x1 - m.x1) / (2.0 * hh), (p.x3 - m.x3) / (2.0 * hh))
    };
    let d1 = diff(h);
    let d2 = diff(h / 2.0);
    ((4.0 * d2.0 - d1.0) / 3.0, (4.0 * d2.1 - d1.1) / 3.0)
}
