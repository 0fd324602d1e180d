//! Arc-length reparametrization of profile curves.
//!
//! The curve parameter t is mapped to model arc length s through the speed
//! sigma(t) = sqrt(eta(gamma(t))) |gamma'(t)|. Coverage grows lazily in
//! parameter chunks whose span doubles after each cheap chunk and shrinks
//! when refinement overruns its segment budget, so slow log-speed curves
//! reach huge parameters in ~log chunks while rapidly oscillating speeds
//! (a spiral's height through the conformal factor) get short chunks that
//! extend only as far as queries demand. Inside a chunk, intervals are
//! bisected until a cubic Hermite with exact endpoint slopes reproduces
//! both the midpoint arc length and the midpoint speed; chunks whose
//! sampled speed is already 1 are stored as exact identities.
//!
//! Accuracy split: knot values accumulate only Gauss-Kronrod panel error
//! (budgeted per chunk), while the Hermite checks bound the local
//! interpolation error, which does not accumulate.

use super::{tangent_norm, Kappa, ParamCurve, ProfilePoint};
use crate::error::{Error, Result};
use crate::quad::gk15;
use std::sync::{Arc, Mutex};

/// Hard cap on stored chunks. Doubling spans overflow f64 after ~1030
/// chunks; oscillatory speeds can additionally tile long stretches with
/// budget-limited short chunks, so the cap is generous.
const MAX_CHUNKS: usize = 65_536;
/// Interval bisection depth cap inside one chunk.
const MAX_DEPTH: u32 = 46;
/// Unit-speed probe tolerance for the identity fast path.
const ID_PROBE_TOL: f64 = 1e-12;
/// Accepted-segment budget per refinement attempt; a chunk that would need
/// more knots than this is retried over an eighth of its span.
const SEG_BUDGET: usize = 1024;

#[derive(Debug)]
enum ChunkKind {
    /// Sampled speed is 1 on the whole chunk: s - s_lo = t - t_lo.
    Identity,
    /// Hermite knots: parallel arrays of parameter, arc length, speed.
    Knots { ts: Vec<f64>, ss: Vec<f64>, sig: Vec<f64> },
}

#[derive(Debug)]
struct Chunk {
    t_lo: f64,
    t_hi: f64,
    s_lo: f64,
    s_hi: f64,
    kind: ChunkKind,
}

#[derive(Debug)]
struct ArcState {
    chunks: Vec<Chunk>,
    /// Span of the next chunk attempt; doubles on success, shrinks on a
    /// budget overrun.
    next_span: f64,
}

impl Default for ArcState {
    fn default() -> Self {
        ArcState { chunks: Vec::new(), next_span: 1.0 }
    }
}

struct ArcInner {
    base: ParamCurve,
    kappa: Kappa,
    tol: f64,
    state: Mutex<ArcState>,
}

/// A profile curve indexed by model arc length s >= 0.
#[derive(Clone)]
pub struct ArcCurve {
    inner: Arc<ArcInner>,
}

impl std::fmt::Debug for ArcCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArcCurve")
            .field("label", &self.inner.base.label)
            .field("kappa", &self.inner.kappa)
            .field("tol", &self.inner.tol)
            .finish()
    }
}

/// Cubic Hermite on [0, L] with H(0) = 0, H(L) = delta and endpoint slopes.
#[derive(Clone, Copy)]
struct Hermite {
    len: f64,
    c1: f64,
    c2: f64,
    c3: f64,
}

impl Hermite {
    fn new(len: f64, delta: f64, sig_a: f64, sig_b: f64) -> Hermite {
        let m = delta / len;
        Hermite {
            len,
            c1: sig_a,
            c2: (3.0 * m - 2.0 * sig_a - sig_b) / len,
            c3: (sig_a + sig_b - 2.0 * m) / (len * len),
        }
    }

    fn value(&self, x: f64) -> f64 {
        x * (self.c1 + x * (self.c2 + x * self.c3))
    }

    fn slope(&self, x: f64) -> f64 {
        self.c1 + x * (2.0 * self.c2 + 3.0 * self.c3 * x)
    }

    /// Minimum of the (quadratic) slope over [0, L].
    fn min_slope(&self) -> f64 {
        // Slope is quadratic: the interior extremum, if any, is at the
        // vertex; a linear slope is bounded by its endpoint values.
        let mut m = self.c1.min(self.slope(self.len));
        if self.c3.abs() > 0.0 {
            let xv = -self.c2 / (3.0 * self.c3);
            if xv > 0.0 && xv < self.len {
                m = m.min(self.slope(xv));
            }
        }
        m
    }

    /// Solve H(x) = target on [0, L] by safeguarded Newton.
    fn invert(&self, target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, self.len);
        let delta = self.value(self.len);
        let mut x = if delta > 0.0 { self.len * (target / delta).clamp(0.0, 1.0) } else { 0.0 };
        for _ in 0..80 {
            let fx = self.value(x) - target;
            if fx.abs() <= 1e-15 * (target.abs() + delta.abs() + 1e-300) {
                break;
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let dfx = self.slope(x);
            let newton = x - fx / dfx;
            x = if dfx > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= f64::EPSILON * self.len {
                break;
            }
        }
        x
    }
}

impl ArcInner {
    /// Model speed at parameter t; validates the point on every call.
    fn sigma(&self, t: f64) -> Result<f64> {
        let p = self.base.eval(t);
        let v = self.base.deriv(t);
        if !v.0.is_finite() || !v.1.is_finite() {
            return Err(Error::numeric(format!(
                "curve `{}` has a non-finite derivative at t = {t}",
                self.base.label
            )));
        }
        let sig = tangent_norm(self.kappa, p, v)?;
        if !(sig > 1e-300) || !sig.is_finite() {
            return Err(Error::numeric(format!(
                "curve `{}` speed degenerates at t = {t} (sigma = {sig})",
                self.base.label
            )));
        }
        Ok(sig)
    }

    /// Commit exactly one more chunk, shrinking the attempted span until the
    /// refinement fits its segment budget.
    fn build_next_chunk(&self, state: &mut ArcState) -> Result<()> {
        if state.chunks.len() >= MAX_CHUNKS {
            return Err(Error::numeric(format!(
                "curve `{}`: arc-length table exceeded {MAX_CHUNKS} chunks",
                self.base.label
            )));
        }
        let t_lo = state.chunks.last().map_or(self.base.t0, |c| c.t_hi);
        let s_lo = state.chunks.last().map_or(0.0, |c| c.s_hi);
        loop {
            let t_hi = (t_lo + state.next_span).min(self.base.t_end);
            if !t_hi.is_finite() {
                return Err(Error::numeric(format!(
                    "curve `{}`: arc length horizon exceeds the representable parameter range",
                    self.base.label
                )));
            }
            if !(t_hi > t_lo) {
                return Err(Error::domain(format!(
                    "curve `{}`: parameter domain ends at t = {}, no further arc length available",
                    self.base.label, self.base.t_end
                )));
            }
            let width = t_hi - t_lo;

            if self.probe_identity(t_lo, t_hi)? {
                state.chunks.push(Chunk {
                    t_lo,
                    t_hi,
                    s_lo,
                    s_hi: s_lo + width,
                    kind: ChunkKind::Identity,
                });
                state.next_span = 2.0 * width;
                return Ok(());
            }

            match self.refine_chunk(t_lo, t_hi, s_lo)? {
                Some(kind) => {
                    let s_hi = match &kind {
                        ChunkKind::Knots { ss, .. } => *ss.last().unwrap(),
                        ChunkKind::Identity => unreachable!(),
                    };
                    state.chunks.push(Chunk { t_lo, t_hi, s_lo, s_hi, kind });
                    state.next_span = 2.0 * width;
                    return Ok(());
                }
                None => {
                    state.next_span = width / 8.0;
                    if state.next_span < 1e-12 * t_lo.abs().max(1.0) {
                        return Err(Error::numeric(format!(
                            "curve `{}`: arc-length refinement stalled near t = {t_lo}",
                            self.base.label
                        )));
                    }
                }
            }
        }
    }

    /// Do 13 spread samples (including golden-ratio offsets that avoid
    /// periodic coincidences) all report unit speed?
    fn probe_identity(&self, t_lo: f64, t_hi: f64) -> Result<bool> {
        const PHI: f64 = 0.618_033_988_749_894_9;
        let len = t_hi - t_lo;
        let mut fracs = [0.0f64; 13];
        for (j, f) in fracs.iter_mut().enumerate().take(9) {
            *f = j as f64 / 8.0;
        }
        for j in 0..4 {
            fracs[9 + j] = ((j + 1) as f64 * PHI).fract();
        }
        for f in fracs {
            let sig = self.sigma(t_lo + f * len)?;
            if (sig - 1.0).abs() > ID_PROBE_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Refine [t_lo, t_hi] into Hermite knots; `None` when the segment
    /// budget is exhausted (the chunk span is too ambitious).
    fn refine_chunk(&self, t_lo: f64, t_hi: f64, s_lo: f64) -> Result<Option<ChunkKind>> {
        let sig = |t: f64| self.sigma(t);
        let chunk_len = t_hi - t_lo;
        let quad_budget_per_t = 0.1 * self.tol / chunk_len;
        let mut ts = vec![t_lo];
        let mut ss = vec![s_lo];
        let mut sigs = vec![self.sigma(t_lo)?];
        // Stack of pending segments (ta, tb, sig_a, sig_b, depth); pushing
        // right before left emits accepted intervals in parameter order.
        let mut stack = vec![(t_lo, t_hi, sigs[0], self.sigma(t_hi)?, 0u32)];
        while let Some((ta, tb, sig_a, sig_b, depth)) = stack.pop() {
            if ts.len() > SEG_BUDGET {
                return Ok(None);
            }
            let len = tb - ta;
            let tm = 0.5 * (ta + tb);
            let (full, e_full) = gk15(&sig, ta, tb)?;
            let (left, e_left) = gk15(&sig, ta, tm)?;
            let (right, e_right) = gk15(&sig, tm, tb)?;
            let sig_m = self.sigma(tm)?;
            let delta = left + right;
            let eps_loc = 0.25 * self.tol * delta.abs().max(1.0);
            let h = Hermite::new(len, delta, sig_a, sig_b);
            let ok = (full - delta).abs() <= eps_loc
                && (h.value(0.5 * len) - left).abs() <= eps_loc
                && (h.slope(0.5 * len) - sig_m).abs() <= self.tol * sig_m.max(1.0)
                && h.min_slope() > 1e-6 * sig_a.min(sig_b)
                && e_full + e_left + e_right <= quad_budget_per_t * len;
            if ok {
                let s_next = *ss.last().unwrap() + delta;
                ts.push(tb);
                ss.push(s_next);
                sigs.push(sig_b);
            } else {
                if depth >= MAX_DEPTH {
                    return Err(Error::numeric(format!(
                        "curve `{}`: arc-length refinement stalled near t = {tm}",
                        self.base.label
                    )));
                }
                if tm <= ta || tm >= tb {
                    return Err(Error::numeric(format!(
                        "curve `{}`: arc-length interval collapsed at t = {tm}",
                        self.base.label
                    )));
                }
                stack.push((tm, tb, sig_m, sig_b, depth + 1));
                stack.push((ta, tm, sig_a, sig_m, depth + 1));
            }
        }
        Ok(Some(ChunkKind::Knots { ts, ss, sig: sigs }))
    }

    /// Extend coverage until parameter `t` lies in a chunk.
    fn ensure_t(&self, t: f64) -> Result<()> {
        let mut state = self.state.lock().unwrap();
        while state.chunks.last().map_or(true, |c| c.t_hi < t) {
            self.build_next_chunk(&mut state)?;
        }
        Ok(())
    }

    /// Extend coverage until arc length `s` lies in a chunk.
    fn ensure_s(&self, s: f64) -> Result<()> {
        let mut state = self.state.lock().unwrap();
        while state.chunks.last().map_or(true, |c| c.s_hi < s) {
            self.build_next_chunk(&mut state)?;
        }
        Ok(())
    }
}

impl ArcCurve {
    pub fn kappa(&self) -> Kappa {
        self.inner.kappa
    }

    pub fn tol(&self) -> f64 {
        self.inner.tol
    }

    pub fn label(&self) -> &str {
        &self.inner.base.label
    }

    pub fn t0(&self) -> f64 {
        self.inner.base.t0
    }

    /// Arc length built so far (grows on demand).
    pub fn s_built(&self) -> f64 {
        self.inner.state.lock().unwrap().chunks.last().map_or(0.0, |c| c.s_hi)
    }

    /// Model speed of the underlying parametrization at parameter t.
    pub fn speed_at(&self, t: f64) -> Result<f64> {
        self.inner.sigma(t)
    }

    /// Arc length at parameter t.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < self.inner.base.t0 {
            return Err(Error::domain(format!(
                "parameter {t} precedes the curve domain start {}",
                self.inner.base.t0
            )));
        }
        self.inner.ensure_t(t)?;
        let state = self.inner.state.lock().unwrap();
        let chunks = &state.chunks;
        let i = match chunks.partition_point(|c| c.t_hi < t) {
            i if i >= chunks.len() => chunks.len() - 1,
            i => i,
        };
        let c = &chunks[i];
        Ok(match &c.kind {
            ChunkKind::Identity => c.s_lo + (t - c.t_lo),
            ChunkKind::Knots { ts, ss, sig } => {
                let j = ts.partition_point(|&tk| tk < t).clamp(1, ts.len() - 1);
                let len = ts[j] - ts[j - 1];
                let h = Hermite::new(len, ss[j] - ss[j - 1], sig[j - 1], sig[j]);
                ss[j - 1] + h.value((t - ts[j - 1]).clamp(0.0, len))
            }
        })
    }

    /// Parameter at arc length s.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::domain(format!("arc length must be finite and >= 0, got {s}")));
        }
        self.inner.ensure_s(s)?;
        let state = self.inner.state.lock().unwrap();
        let chunks = &state.chunks;
        let i = match chunks.partition_point(|c| c.s_hi < s) {
            i if i >= chunks.len() => chunks.len() - 1,
            i => i,
        };
        let c = &chunks[i];
        Ok(match &c.kind {
            ChunkKind::Identity => c.t_lo + (s - c.s_lo),
            ChunkKind::Knots { ts, ss, sig } => {
                let j = ss.partition_point(|&sk| sk < s).clamp(1, ss.len() - 1);
                let len = ts[j] - ts[j - 1];
                let h = Hermite::new(len, ss[j] - ss[j - 1], sig[j - 1], sig[j]);
                ts[j - 1] + h.invert((s - ss[j - 1]).clamp(0.0, ss[j] - ss[j - 1]))
            }
        })
    }

    /// Profile point at arc length s.
    pub fn point(&self, s: f64) -> Result<ProfilePoint> {
        let t = self.t_of_s(s)?;
        let p = self.inner.base.eval(t);
        p.validate(self.inner.kappa)?;
        Ok(p)
    }

    /// Coordinate velocity d gamma / ds at arc length s. Normalized by the
    /// exact pointwise speed, so its model norm is 1 up to roundoff.
    pub fn tangent(&self, s: f64) -> Result<(f64, f64)> {
        let t = self.t_of_s(s)?;
        let v = self.inner.base.deriv(t);
        let sig = self.inner.sigma(t)?;
        Ok((v.0 / sig, v.1 / sig))
    }
}

/// Reparametrize `curve` by model arc length, pre-building coverage for
/// s in [0, s_max]. Fails on domain violations, irregular points, or an
/// unresolvable speed profile.
pub fn arc_reparam(curve: &ParamCurve, kappa: Kappa, s_max: f64, tol: f64) -> Result<ArcCurve> {
    if !(tol > 0.0) || tol > 1e-2 {
        return Err(Error::domain(format!(
            "reparametrization tolerance must lie in (0, 1e-2], got {tol}"
        )));
    }
    if !s_max.is_finite() || s_max < 0.0 {
        return Err(Error::domain(format!("s_max must be finite and >= 0, got {s_max}")));
    }
    for probe in [0.0, 0.5, 1.0, 2.0] {
        let t = curve.t0 + probe;
        if curve.contains(t) || probe == 0.0 {
            curve.check_regular(t)?;
        }
    }
    let arc = ArcCurve {
        inner: Arc::new(ArcInner {
            base: curve.clone(),
            kappa,
            tol,
            state: Mutex::new(ArcState::default()),
        }),
    };
    arc.inner.sigma(curve.t0)?;
    arc.inner.ensure_s(s_max)?;
    Ok(arc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(c: f64) -> ParamCurve {
        ParamCurve::new(
            "cone",
            1.0,
            f64::INFINITY,
            move |t| ProfilePoint::new(t, c * t),
            move |_| (1.0, c),
        )
    }

    #[test]
    fn cone_arc_length_is_logarithmic() {
        // sigma = sqrt(1+c^2)/(c t), so s(t) = sqrt(1+c^2)/c * ln t.
        let c = 1.0;
        let arc = arc_reparam(&cone(c), Kappa::Hyperbolic, 10.0, 1e-9).unwrap();
        let scale = (1.0 + c * c).sqrt() / c;
        for t in [1.0, 1.5, 2.0, 5.0, 12.0, 19.9] {
            let s = arc.s_of_t(t).unwrap();
            assert!((s - scale * t.ln()).abs() < 1e-7, "s({t}) = {s}");
        }
        for s in [0.0, 0.4, 1.0, 3.0, 4.2] {
            let t = arc.t_of_s(s).unwrap();
            assert!((t - (s / scale).exp()).abs() < 1e-6 * (s / scale).exp());
        }
    }

    #[test]
    fn horosphere_takes_identity_path() {
        let z = 0.3;
        let line = ParamCurve::new(
            "horosphere",
            0.0,
            f64::INFINITY,
            move |t| ProfilePoint::new(z * t + 1.0, z),
            move |_| (z, 0.0),
        );
        let arc = arc_reparam(&line, Kappa::Hyperbolic, 100.0, 1e-9).unwrap();
        for s in [0.0, 0.25, 7.0, 63.0, 99.5] {
            assert_eq!(arc.t_of_s(s).unwrap(), s);
            let p = arc.point(s).unwrap();
            assert!((p.x1 - (z * s + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_t_s_t() {
        let wavy = ParamCurve::new(
            "wavy",
            0.0,
            f64::INFINITY,
            |t| ProfilePoint::new(2.0 + (0.7 * t).sin() * 0.5, 1.0 + t),
            |t| (0.35 * (0.7 * t).cos(), 1.0),
        );
        let arc = arc_reparam(&wavy, Kappa::Euclidean, 30.0, 1e-9).unwrap();
        for t in [0.0, 0.3, 1.7, 8.0, 21.5] {
            let s = arc.s_of_t(t).unwrap();
            let t_back = arc.t_of_s(s).unwrap();
            assert!((t_back - t).abs() < 1e-9 * t.max(1.0), "t = {t} -> {t_back}");
        }
    }

    #[test]
    fn tangent_has_unit_model_norm() {
        let arc = arc_reparam(&cone(2.0), Kappa::Hyperbolic, 20.0, 1e-9).unwrap();
        for s in [0.0, 0.9, 4.0, 11.0, 19.0] {
            let p = arc.point(s).unwrap();
            let v = arc.tangent(s).unwrap();
            let n = tangent_norm(Kappa::Hyperbolic, p, v).unwrap();
            assert!((n - 1.0).abs() < 1e-13, "norm at s = {s} is {n}");
        }
    }

    #[test]
    fn domain_violation_surfaces_as_error() {
        // Curve dives through x3 = 0 at t = 2.
        let bad = ParamCurve::new(
            "sinker",
            0.0,
            f64::INFINITY,
            |t| ProfilePoint::new(1.0 + t, 2.0 - t),
            |_| (1.0, -1.0),
        );
        let arc = arc_reparam(&bad, Kappa::Hyperbolic, 0.5, 1e-9).unwrap();
        let mut s = 0.1;
        let err = loop {
            match arc.point(s) {
                Ok(_) => s += 0.5,
                Err(e) => break e,
            }
            assert!(s < 1e4, "expected a domain error before s = 1e4");
        };
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn finite_parameter_domain_is_exhaustible() {
        let seg = ParamCurve::new(
            "segment",
            0.0,
            1.0,
            |t| ProfilePoint::new(1.0 + t, 1.0),
            |_| (1.0, 0.0),
        );
        let arc = arc_reparam(&seg, Kappa::Euclidean, 0.5, 1e-9).unwrap();
        assert!(arc.point(0.9).is_ok());
        assert!(arc.point(1.5).is_err());
    }

    #[test]
    fn reparametrization_is_parameter_invariant() {
        // Same geometric ray traced as t and as t^3 + t must agree in s.
        let straight = cone(1.0);
        let cubed = ParamCurve::new(
            "cone-cubed",
            0.0,
            f64::INFINITY,
            |t| {
                let u = t * t * t + t + 1.0;
                ProfilePoint::new(u, u)
            },
            |t| {
                let du = 3.0 * t * t + 1.0;
                (du, du)
            },
        );
        let a1 = arc_reparam(&straight, Kappa::Hyperbolic, 6.0, 1e-9).unwrap();
        let a2 = arc_reparam(&cubed, Kappa::Hyperbolic, 6.0, 1e-9).unwrap();
        for s in [0.2, 1.0, 2.5, 5.0] {
            let p1 = a1.point(s).unwrap();
            let p2 = a2.point(s).unwrap();
            assert!((p1.x1 - p2.x1).abs() < 1e-8 * p1.x1.max(1.0), "x1 differs at s = {s}");
            assert!((p1.x3 - p2.x3).abs() < 1e-8 * p1.x3.max(1.0));
        }
    }
}
