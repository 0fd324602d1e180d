//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule (embedded 7-point Gauss) is applied per panel;
//! the worst panel by error estimate is bisected until the summed estimate
//! meets the requested tolerance. Integrand failures and non-finite values
//! abort the computation instead of being smoothed over.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Abscissae of the 15-point Kronrod rule on [-1, 1], nonnegative half.
/// Odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3], ...).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Quadrature tolerances and budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadCfg {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisection depth cap; panels never shrink below width/2^max_depth.
    pub max_depth: u32,
    /// Upper bound on panel count before giving up.
    pub max_panels: usize,
}

impl Default for QuadCfg {
    fn default() -> Self {
        QuadCfg {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 40,
            max_panels: 20_000,
        }
    }
}

/// An integral value with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub value: f64,
    pub abs_err: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Max-heap on the error estimate; errors are finite by construction.
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// QUADPACK-style error rescaling: sharpen the raw |K15 - G7| difference
/// using the deviation integral `resasc`, floored at roundoff level.
fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut err = err.abs();
    if result_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / result_asc).powf(1.5);
        err = if scale < 1.0 { result_asc * scale } else { result_asc };
    }
    let floor = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if result_abs > floor {
        err = err.max(50.0 * f64::EPSILON * result_abs);
    }
    err
}

/// One K15/G7 panel over [a, b]. Endpoint values are never requested, so
/// integrable endpoint singularities are tolerated.
pub(crate) fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut fv = [0.0f64; 15];
    for (i, &x) in XGK.iter().enumerate() {
        let lo = center - half * x;
        let hi = center + half * x;
        let flo = f(lo)?;
        if !flo.is_finite() {
            return Err(Error::numeric(format!("integrand not finite at {lo}")));
        }
        fv[i] = flo;
        if i < 7 {
            let fhi = f(hi)?;
            if !fhi.is_finite() {
                return Err(Error::numeric(format!("integrand not finite at {hi}")));
            }
            fv[14 - i] = fhi;
        }
    }

    let mut resk = 0.0;
    let mut resabs = 0.0;
    for i in 0..8 {
        let pair = if i < 7 { fv[i] + fv[14 - i] } else { fv[7] };
        resk += WGK[i] * pair;
        let abs_pair = if i < 7 { fv[i].abs() + fv[14 - i].abs() } else { fv[7].abs() };
        resabs += WGK[i] * abs_pair;
    }
    let mut resg = 0.0;
    for j in 0..4 {
        let i = 2 * j + 1;
        let pair = if i < 7 { fv[i] + fv[14 - i] } else { fv[7] };
        resg += WG[j] * pair;
    }
    let mean = resk * 0.5;
    let mut resasc = 0.0;
    for i in 0..8 {
        let dev = if i < 7 {
            (fv[i] - mean).abs() + (fv[14 - i] - mean).abs()
        } else {
            (fv[7] - mean).abs()
        };
        resasc += WGK[i] * dev;
    }

    let value = resk * half;
    let err = rescale_error((resk - resg) * half, resabs * half, resasc * half);
    Ok((value, err))
}

/// Integrate `f` over the finite interval [a, b] to the configured tolerance.
/// Worst-panel-first bisection; fails if the budget is exhausted while the
/// estimate still exceeds tolerance by more than a factor of 1000.
pub fn integrate<F>(f: &F, a: f64, b: f64, cfg: &QuadCfg) -> Result<Quad>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::numeric("quadrature endpoints must be finite"));
    }
    if a == b {
        return Ok(Quad { value: 0.0, abs_err: 0.0 });
    }
    if a > b {
        let q = integrate(f, b, a, cfg)?;
        return Ok(Quad { value: -q.value, abs_err: q.abs_err });
    }

    let (v, e) = gk15(f, a, b)?;
    // Refinable panels in a max-heap on error; panels frozen at max depth
    // keep contributing to the totals but are never revisited.
    let mut live: BinaryHeap<Panel> = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    live.push(Panel { a, b, value: v, err: e, depth: 0 });
    let mut total_v = v;
    let mut total_e = e;

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total_v.abs());
        if total_e <= tol {
            break;
        }
        if live.len() + frozen.len() >= cfg.max_panels {
            break;
        }
        let Some(Panel { a: pa, b: pb, value: pv, err: pe, depth }) = live.pop() else {
            break; // everything is at max depth; report what we have
        };
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(f, pa, mid)?;
        let (v2, e2) = gk15(f, mid, pb)?;
        total_v += v1 + v2 - pv;
        total_e += e1 + e2 - pe;
        for half in [
            Panel { a: pa, b: mid, value: v1, err: e1, depth: depth + 1 },
            Panel { a: mid, b: pb, value: v2, err: e2, depth: depth + 1 },
        ] {
            if half.depth < cfg.max_depth {
                live.push(half);
            } else {
                frozen.push(half);
            }
        }
    }

    // Recompute sums to shed accumulated cancellation in the running totals.
    total_v = live.iter().chain(frozen.iter()).map(|p| p.value).sum();
    total_e = live.iter().chain(frozen.iter()).map(|p| p.err).sum();

    let tol = cfg.abs_tol.max(cfg.rel_tol * total_v.abs());
    if total_e > 1000.0 * tol.max(f64::MIN_POSITIVE) {
        return Err(Error::numeric(format!(
            "quadrature over [{a}, {b}] stalled at error {total_e:.3e} (tolerance {tol:.3e})"
        )));
    }
    Ok(Quad { value: total_v, abs_err: total_e })
}

/// Convenience wrapper for infallible closures.
pub fn integrate_fn<F>(f: F, a: f64, b: f64, cfg: &QuadCfg) -> Result<Quad>
where
    F: Fn(f64) -> f64,
{
    integrate(&move |x| Ok(f(x)), a, b, cfg)
}
