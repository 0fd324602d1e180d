//! Conformal-type criteria for an end of revolution: the integral tests
//! (parabolicity, its one-sided sufficient variant, stochastic
//! completeness), the one-sided geometric tests available in the
//! hyperbolic model (cone and horosphere containment, excursion measure,
//! centroid growth), the necessary conditions a non-parabolic end must
//! satisfy, and the orchestrator that combines everything into a report.
//!
//! Geometric tests only ever assert Parabolic. The two-sided decision is
//! the integral int ds/w: divergent iff parabolic. When a geometric test
//! fires and the integral still classifies Convergent, both sides are
//! theorem-backed, so the disagreement can only be numerical error and
//! the report downgrades to Inconclusive with a contradiction flag.

use crate::classify::{
    classify_integral, ClassifierCfg, DivergenceVerdict, TailModel, VerdictKind,
};
use crate::error::{Error, Result};
use crate::geometry::{ArcCurve, EndSpec, ExpectedVerdict, Kappa};
use crate::warp::{centroid, cumulative, extend_warp, warp_from_curve, WarpFn};
use serde::{Deserialize, Serialize};

/// Samples per doubling window in the running sup/inf probes.
const PROBE_SAMPLES: usize = 64;
/// A running sup that multiplies by this across a doubling counts as
/// escaping to infinity.
const GROWTH_FACTOR: f64 = 1.5;

/// Conformal type of an end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Parabolic,
    NonParabolic,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Parabolic => write!(f, "parabolic"),
            Verdict::NonParabolic => write!(f, "non-parabolic"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// A criterion that fired, with human-readable evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Firing {
    pub criterion: String,
    pub evidence: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl std::fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::Fail => write!(f, "fail"),
            CheckStatus::Skip => write!(f, "skip"),
        }
    }
}

/// One consistency check of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub id: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl ConsistencyCheck {
    fn new(id: &str, status: CheckStatus, detail: impl Into<String>) -> Self {
        ConsistencyCheck { id: id.into(), status, detail: detail.into() }
    }
}

/// The three integral verdicts every report carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralVerdicts {
    /// int ds/w: divergent iff the end is parabolic.
    pub parabolicity: DivergenceVerdict,
    /// int s/Omega(s) ds: divergent implies parabolic (one-sided).
    pub sufficient: DivergenceVerdict,
    /// int (C0 + Omega(s))/w(s) ds: divergent implies the end is
    /// stochastically complete.
    pub stochastic: DivergenceVerdict,
}

/// Full classification record of one end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalReport {
    pub end_name: String,
    pub kappa: Kappa,
    pub verdict: Verdict,
    pub fired: Vec<Firing>,
    pub consistency: Vec<ConsistencyCheck>,
    pub integrals: IntegralVerdicts,
}

/// Whether a computed verdict satisfies a catalog expectation.
pub fn verdict_matches(expected: ExpectedVerdict, got: Verdict) -> bool {
    match expected {
        ExpectedVerdict::Parabolic => got == Verdict::Parabolic,
        ExpectedVerdict::NonParabolic => got == Verdict::NonParabolic,
        ExpectedVerdict::ParabolicSoft => matches!(got, Verdict::Parabolic | Verdict::Inconclusive),
    }
}

/// int ds/w over the tail; divergent iff the end is parabolic. For a warp
/// extended across the rotation axis the integral starts at the cap
/// radius, which shifts the integrand without changing its value.
pub fn parabolicity_test(w: &WarpFn, cfg: &ClassifierCfg) -> Result<DivergenceVerdict> {
    let s_lo = w.extension_rho().unwrap_or(0.0);
    classify_integral(&|s| Ok(1.0 / w.w(s)?), s_lo, cfg)
}

/// int s/Omega(s) ds; divergent implies parabolic, convergent says
/// nothing (the test is one-sided).
pub fn sufficient_parabolic_test(w: &WarpFn, cfg: &ClassifierCfg) -> Result<DivergenceVerdict> {
    let s_lo = w.extension_rho().unwrap_or(0.0);
    classify_integral(&|s| Ok(s / w.omega(s)?.value), s_lo, cfg)
}

/// int (C0 + Omega(s))/w(s) ds with C0 = int_0^rho W over the axis cap of
/// extend_warp; divergent implies the end is stochastically complete. A
/// warp that is already an extension carries its cap inside Omega, so the
/// rho argument is ignored for it.
pub fn stochastic_test(w: &WarpFn, rho: f64, cfg: &ClassifierCfg) -> Result<DivergenceVerdict> {
    if let Some(r) = w.extension_rho() {
        return classify_integral(&|s| Ok(w.omega(s)?.value / w.w(s)?), r, cfg);
    }
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::domain(format!("cap radius must be finite and >= 0, got {rho}")));
    }
    let c0 = if rho > 0.0 {
        let ext = extend_warp(w, rho)?;
        cumulative(&ext, rho)?.value
    } else {
        0.0
    };
    classify_integral(&|s| Ok((c0 + w.omega(s)?.value) / w.w(s)?), 0.0, cfg)
}

enum InfTrend {
    /// Infimum unchanged (relatively) across two doublings, above floor.
    Stabilized(f64),
    /// Infimum fell to or below the floor.
    Vanishing(f64),
    Undecided(f64),
}

enum SupTrend {
    Stabilized(f64),
    /// Supremum kept multiplying across doublings; treated as unbounded.
    Growing(f64),
    Undecided(f64),
}

fn probe_horizons(cfg: &ClassifierCfg) -> Vec<(f64, f64)> {
    let mut spans = Vec::with_capacity(cfg.max_doublings as usize + 1);
    let mut lo = 0.0;
    for k in 0..=cfg.max_doublings {
        let hi = cfg.horizon_t0 * f64::powi(2.0, k as i32);
        spans.push((lo, hi));
        lo = hi;
    }
    spans
}

fn running_inf_probe<G>(g: &G, floor: f64, cfg: &ClassifierCfg) -> Result<InfTrend>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut inf = f64::INFINITY;
    let mut prev = f64::INFINITY;
    let mut stable = 0u32;
    for (lo, hi) in probe_horizons(cfg) {
        for i in 0..PROBE_SAMPLES {
            let s = lo + (hi - lo) * i as f64 / (PROBE_SAMPLES - 1) as f64;
            inf = inf.min(g(s)?);
        }
        if inf <= floor {
            return Ok(InfTrend::Vanishing(inf));
        }
        if prev.is_finite() && (prev - inf).abs() <= cfg.stabilize_rel * inf.abs() {
            stable += 1;
            if stable >= 2 {
                return Ok(InfTrend::Stabilized(inf));
            }
        } else {
            stable = 0;
        }
        prev = inf;
    }
    Ok(InfTrend::Undecided(inf))
}

fn running_sup_probe<G>(g: &G, cfg: &ClassifierCfg) -> Result<SupTrend>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut sup = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    let mut stable = 0u32;
    let mut growing = 0u32;
    for (lo, hi) in probe_horizons(cfg) {
        for i in 0..PROBE_SAMPLES {
            let s = lo + (hi - lo) * i as f64 / (PROBE_SAMPLES - 1) as f64;
            sup = sup.max(g(s)?);
        }
        if prev.is_finite() {
            if (sup - prev).abs() <= cfg.stabilize_rel * sup.abs() {
                stable += 1;
                growing = 0;
                if stable >= 2 {
                    return Ok(SupTrend::Stabilized(sup));
                }
            } else if prev > 0.0 && sup >= GROWTH_FACTOR * prev {
                growing += 1;
                stable = 0;
                if growing >= 2 {
                    return Ok(SupTrend::Growing(sup));
                }
            } else {
                stable = 0;
                growing = 0;
            }
        }
        prev = sup;
    }
    Ok(SupTrend::Undecided(sup))
}

fn require_hyperbolic(curve: &ArcCurve, what: &str) -> Result<()> {
    if curve.kappa() != Kappa::Hyperbolic {
        return Err(Error::domain(format!(
            "{what} needs a curve in the hyperbolic model, got kappa = {}",
            curve.kappa().value()
        )));
    }
    Ok(())
}

/// Cone containment: the running infimum of gamma2/gamma1 over doubling
/// horizons. A stabilized positive infimum c means the profile stays on
/// the c-cone, which forces a parabolic end; a vanishing or undecided
/// trend returns None.
pub fn cone_test(curve: &ArcCurve, cfg: &ClassifierCfg) -> Result<Option<f64>> {
    require_hyperbolic(curve, "the cone test")?;
    let ratio = |s: f64| {
        let p = curve.point(s)?;
        Ok(p.x3 / p.x1)
    };
    match running_inf_probe(&ratio, cfg.c_floor, cfg)? {
        InfTrend::Stabilized(c) => Ok(Some(c)),
        InfTrend::Vanishing(_) | InfTrend::Undecided(_) => Ok(None),
    }
}

/// Excursion measure: the arc length of {s : gamma2/gamma1 >= c}. An
/// infinite measure forces a parabolic end for any fixed c > 0. The
/// indicator integrand cannot meet tight quadrature tolerances at its
/// jumps, so the measure is integrated with loose absolute accuracy.
/// Like every sampled divergence decision this can misread a huge but
/// finite excursion as infinite; it never asserts NonParabolic.
pub fn iplus_test(curve: &ArcCurve, c: f64, cfg: &ClassifierCfg) -> Result<DivergenceVerdict> {
    require_hyperbolic(curve, "the excursion test")?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain(format!("excursion level c must be positive, got {c}")));
    }
    let mut loose = *cfg;
    loose.quad.abs_tol = loose.quad.abs_tol.max(1e-4);
    loose.quad.rel_tol = loose.quad.rel_tol.max(1e-6);
    classify_integral(
        &|s| {
            let p = curve.point(s)?;
            Ok(if p.x3 / p.x1 >= c { 1.0 } else { 0.0 })
        },
        0.0,
        &loose,
    )
}

/// Horosphere containment: the running infimum of the height gamma2. A
/// stabilized positive infimum z means the end stays in {x3 >= z}, which
/// forces a parabolic end.
pub fn horosphere_test(curve: &ArcCurve, cfg: &ClassifierCfg) -> Result<Option<f64>> {
    require_hyperbolic(curve, "the horosphere test")?;
    let height = |s: f64| Ok(curve.point(s)?.x3);
    match running_inf_probe(&height, cfg.z_floor, cfg)? {
        InfTrend::Stabilized(z) => Ok(Some(z)),
        InfTrend::Vanishing(_) | InfTrend::Undecided(_) => Ok(None),
    }
}

/// What the centroid growth test found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CentroidFinding {
    /// x_g(s) = Omega(s)/s converges; the centroid stays in a bounded set.
    Confined { x_g: f64 },
    /// x_g(s)/s is positive and non-increasing; the centroid is linearly
    /// bounded.
    LinearBound { ratio: f64 },
    Absent,
}

/// Centroid growth of the profile: confined or linearly bounded centroids
/// force a parabolic end. Superlinear growth exits early so that warps
/// with exponential Omega cannot overflow the probe.
pub fn centroid_test(w: &WarpFn, cfg: &ClassifierCfg) -> Result<CentroidFinding> {
    let xg = centroid(w);
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut confined = 0u32;
    let mut bounded = 0u32;
    let mut growing = 0u32;
    for k in 0..=cfg.max_doublings {
        let s = cfg.horizon_t0 * f64::powi(2.0, k as i32);
        let v = xg.x_g(s)?;
        if let Some(p) = prev {
            if (v - p).abs() <= cfg.tol.max(1e-8 * v.abs()) {
                confined += 1;
                if confined >= 2 {
                    return Ok(CentroidFinding::Confined { x_g: v });
                }
            } else {
                confined = 0;
            }
        }
        let r = v / s;
        if let Some(pr) = prev_ratio {
            if r > 0.0 && r <= pr {
                bounded += 1;
                if bounded >= 3 {
                    return Ok(CentroidFinding::LinearBound { ratio: r });
                }
            } else {
                bounded = 0;
            }
            if r > GROWTH_FACTOR * pr {
                growing += 1;
                if growing >= 2 {
                    return Ok(CentroidFinding::Absent);
                }
            } else {
                growing = 0;
            }
        }
        prev = Some(v);
        prev_ratio = Some(r);
    }
    Ok(CentroidFinding::Absent)
}

/// Necessary conditions for a non-parabolic end in the hyperbolic model:
/// gamma1 must stay bounded and the height gamma2 must trend to 0. Each
/// check passes, fails, or stays undecided (reported as skip); a failure
/// marks a NonParabolic report contradictory.
pub fn nonparabolic_necessaries(
    curve: &ArcCurve,
    cfg: &ClassifierCfg,
) -> Result<Vec<ConsistencyCheck>> {
    require_hyperbolic(curve, "the non-parabolic necessary conditions")?;
    let mut checks = Vec::with_capacity(2);
    let x1 = |s: f64| Ok(curve.point(s)?.x1);
    checks.push(match running_sup_probe(&x1, cfg)? {
        SupTrend::Stabilized(v) => ConsistencyCheck::new(
            "sup-gamma1-bounded",
            CheckStatus::Pass,
            format!("sup gamma1 stabilized at {v}"),
        ),
        SupTrend::Growing(v) => ConsistencyCheck::new(
            "sup-gamma1-bounded",
            CheckStatus::Fail,
            format!("sup gamma1 keeps growing, reached {v}"),
        ),
        SupTrend::Undecided(v) => ConsistencyCheck::new(
            "sup-gamma1-bounded",
            CheckStatus::Skip,
            format!("sup gamma1 undecided at horizon exhaustion, last value {v}"),
        ),
    });
    let x3 = |s: f64| Ok(curve.point(s)?.x3);
    checks.push(match running_inf_probe(&x3, cfg.z_floor, cfg)? {
        InfTrend::Vanishing(v) => ConsistencyCheck::new(
            "inf-gamma2-vanishes",
            CheckStatus::Pass,
            format!("inf gamma2 fell to {v}"),
        ),
        InfTrend::Stabilized(v) => ConsistencyCheck::new(
            "inf-gamma2-vanishes",
            CheckStatus::Fail,
            format!("inf gamma2 stabilized at {v} > 0"),
        ),
        InfTrend::Undecided(v) => ConsistencyCheck::new(
            "inf-gamma2-vanishes",
            CheckStatus::Skip,
            format!("inf gamma2 undecided at horizon exhaustion, last value {v}"),
        ),
    });
    Ok(checks)
}

/// Excursion levels probed when the cone test does not supply one.
const EXCURSION_GRID: [f64; 3] = [1e-3, 1e-2, 1e-1];

fn aborted_verdict() -> DivergenceVerdict {
    DivergenceVerdict {
        kind: VerdictKind::Inconclusive,
        value: None,
        tail: TailModel::unresolved(),
        horizon: 0.0,
        rule: "aborted".into(),
        partials: Vec::new(),
    }
}

fn run_integral(
    id: &str,
    consistency: &mut Vec<ConsistencyCheck>,
    r: Result<DivergenceVerdict>,
) -> DivergenceVerdict {
    match r {
        Ok(v) => v,
        Err(e) => {
            consistency.push(ConsistencyCheck::new(
                &format!("{id}-error"),
                CheckStatus::Fail,
                e.to_string(),
            ));
            aborted_verdict()
        }
    }
}

/// Classify one end: run every applicable criterion and combine them by
/// fixed precedence into a report. Numeric failures of individual tests
/// are recorded as failed consistency checks and the report survives,
/// degrading to Inconclusive when the failure was decision-critical.
pub fn classify_end(end: &EndSpec, cfg: &ClassifierCfg) -> Result<ConformalReport> {
    let w = warp_from_curve(&end.curve)?;
    let mut fired: Vec<Firing> = Vec::new();
    let mut consistency: Vec<ConsistencyCheck> = Vec::new();

    let hyperbolic = end.kappa == Kappa::Hyperbolic;
    let mut cone_c: Option<f64> = None;
    if hyperbolic {
        match cone_test(&end.curve, cfg) {
            Ok(Some(c)) => {
                cone_c = Some(c);
                fired.push(Firing {
                    criterion: "cone".into(),
                    evidence: format!("inf gamma2/gamma1 stabilized at c = {c}"),
                });
            }
            Ok(None) => {}
            Err(e) => consistency.push(ConsistencyCheck::new(
                "cone-error",
                CheckStatus::Fail,
                e.to_string(),
            )),
        }
        let levels: Vec<f64> = match cone_c {
            Some(c) => vec![0.5 * c],
            None => EXCURSION_GRID.to_vec(),
        };
        for c in levels {
            match iplus_test(&end.curve, c, cfg) {
                Ok(v) if v.kind == VerdictKind::Divergent => {
                    fired.push(Firing {
                        criterion: "excursion".into(),
                        evidence: format!(
                            "arc length of {{gamma2/gamma1 >= {c}}} diverges ({})",
                            v.rule
                        ),
                    });
                    break;
                }
                Ok(_) => {}
                Err(e) => consistency.push(ConsistencyCheck::new(
                    "excursion-error",
                    CheckStatus::Fail,
                    e.to_string(),
                )),
            }
        }
        match horosphere_test(&end.curve, cfg) {
            Ok(Some(z)) => fired.push(Firing {
                criterion: "horosphere".into(),
                evidence: format!("inf gamma2 stabilized at z = {z}"),
            }),
            Ok(None) => {}
            Err(e) => consistency.push(ConsistencyCheck::new(
                "horosphere-error",
                CheckStatus::Fail,
                e.to_string(),
            )),
        }
        match centroid_test(&w, cfg) {
            Ok(CentroidFinding::Confined { x_g }) => fired.push(Firing {
                criterion: "centroid".into(),
                evidence: format!("centroid confined near x_g = {x_g}"),
            }),
            Ok(CentroidFinding::LinearBound { ratio }) => fired.push(Firing {
                criterion: "centroid".into(),
                evidence: format!("centroid linearly bounded, x_g/s down to {ratio}"),
            }),
            Ok(CentroidFinding::Absent) => {}
            Err(e) => consistency.push(ConsistencyCheck::new(
                "centroid-error",
                CheckStatus::Fail,
                e.to_string(),
            )),
        }
    } else {
        fired.push(Firing {
            criterion: "model-sign".into(),
            evidence: format!(
                "kappa = {} >= 0: every end of revolution in this model is parabolic",
                end.kappa.value()
            ),
        });
    }

    let sufficient = run_integral(
        "sufficient",
        &mut consistency,
        sufficient_parabolic_test(&w, cfg),
    );
    if hyperbolic && sufficient.kind == VerdictKind::Divergent {
        fired.push(Firing {
            criterion: "omega-ratio".into(),
            evidence: format!("int s/Omega(s) ds diverges ({})", sufficient.rule),
        });
    }
    let parabolicity = run_integral("parabolicity", &mut consistency, parabolicity_test(&w, cfg));
    let stochastic = run_integral("stochastic", &mut consistency, stochastic_test(&w, 0.0, cfg));

    let verdict = if hyperbolic {
        let geometric = !fired.is_empty();
        match parabolicity.kind {
            VerdictKind::Divergent => {
                if geometric {
                    consistency.push(ConsistencyCheck::new(
                        "geometric-vs-integral",
                        CheckStatus::Pass,
                        "geometric criteria and the divergent integral agree",
                    ));
                }
                push_skipped_necessaries(&mut consistency);
                Verdict::Parabolic
            }
            VerdictKind::Convergent => {
                if geometric {
                    consistency.push(ConsistencyCheck::new(
                        "geometric-vs-integral",
                        CheckStatus::Fail,
                        "a geometric criterion asserts parabolic but int ds/w converges; \
                         one side must be numerical error",
                    ));
                    push_skipped_necessaries(&mut consistency);
                    Verdict::Inconclusive
                } else {
                    let mut verdict = Verdict::NonParabolic;
                    match nonparabolic_necessaries(&end.curve, cfg) {
                        Ok(checks) => {
                            if checks.iter().any(|c| c.status == CheckStatus::Fail) {
                                verdict = Verdict::Inconclusive;
                            }
                            consistency.extend(checks);
                        }
                        Err(e) => {
                            consistency.push(ConsistencyCheck::new(
                                "necessaries-error",
                                CheckStatus::Fail,
                                e.to_string(),
                            ));
                            verdict = Verdict::Inconclusive;
                        }
                    }
                    verdict
                }
            }
            VerdictKind::Inconclusive => {
                push_skipped_necessaries(&mut consistency);
                if geometric {
                    Verdict::Parabolic
                } else {
                    Verdict::Inconclusive
                }
            }
        }
    } else {
        // The model-sign shortcut decides; the integral runs as a
        // mandatory cross-check and flags numerical inconsistency without
        // ever overriding the verdict.
        consistency.push(match parabolicity.kind {
            VerdictKind::Divergent => ConsistencyCheck::new(
                "parabolicity-cross-check",
                CheckStatus::Pass,
                "int ds/w diverges as the model sign demands",
            ),
            kind => ConsistencyCheck::new(
                "parabolicity-cross-check",
                CheckStatus::Fail,
                format!("int ds/w classified {kind:?}; expected Divergent for kappa >= 0"),
            ),
        });
        Verdict::Parabolic
    };

    Ok(ConformalReport {
        end_name: end.name.clone(),
        kappa: end.kappa,
        verdict,
        fired,
        consistency,
        integrals: IntegralVerdicts { parabolicity, sufficient, stochastic },
    })
}

fn push_skipped_necessaries(consistency: &mut Vec<ConsistencyCheck>) {
    for id in ["sup-gamma1-bounded", "inf-gamma2-vanishes"] {
        consistency.push(ConsistencyCheck::new(
            id,
            CheckStatus::Skip,
            "only evaluated for non-parabolic verdicts",
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, CatalogParams};

    fn end(name: &str) -> EndSpec {
        catalog(name, &CatalogParams::new()).unwrap()
    }

    fn warp_of(name: &str) -> WarpFn {
        warp_from_curve(&end(name).curve).unwrap()
    }

    fn cfg() -> ClassifierCfg {
        ClassifierCfg::default()
    }

    #[test]
    fn horosphere_parabolicity_diverges() {
        let v = parabolicity_test(&warp_of("horosphere"), &cfg()).unwrap();
        assert_eq!(v.kind, VerdictKind::Divergent);
    }

    #[test]
    fn lower_cylinder_parabolicity_converges_to_half() {
        let v = parabolicity_test(&warp_of("cylinder_lower"), &cfg()).unwrap();
        assert_eq!(v.kind, VerdictKind::Convergent);
        let vb = v.value.unwrap();
        assert!((vb.value - 0.5).abs() < 1e-6, "value {}", vb.value);
    }

    #[test]
    fn constant_warp_is_parabolic_and_slow() {
        let w = WarpFn::synthetic("const", |_| 1.0, |_| 0.0);
        let p = parabolicity_test(&w, &cfg()).unwrap();
        assert_eq!(p.kind, VerdictKind::Divergent);
        let s = sufficient_parabolic_test(&w, &cfg()).unwrap();
        assert_eq!(s.kind, VerdictKind::Divergent);
    }

    #[test]
    fn sufficient_test_fires_for_horosphere_not_lower_cylinder() {
        let h = sufficient_parabolic_test(&warp_of("horosphere"), &cfg()).unwrap();
        assert_eq!(h.kind, VerdictKind::Divergent);
        let c = sufficient_parabolic_test(&warp_of("cylinder_lower"), &cfg()).unwrap();
        assert_eq!(c.kind, VerdictKind::Convergent);
    }

    #[test]
    fn stochastic_test_diverges_for_growing_and_flat_warps() {
        let c = stochastic_test(&warp_of("cylinder_lower"), 0.0, &cfg()).unwrap();
        assert_eq!(c.kind, VerdictKind::Divergent);
        let h = stochastic_test(&warp_of("horosphere"), 0.0, &cfg()).unwrap();
        assert_eq!(h.kind, VerdictKind::Divergent);
    }

    #[test]
    fn stochastic_test_ignores_rho_for_extended_warps() {
        let w = warp_of("cylinder_lower");
        let ext = extend_warp(&w, 1.5).unwrap();
        let v = stochastic_test(&ext, 99.0, &cfg()).unwrap();
        assert_eq!(v.kind, VerdictKind::Divergent);
    }

    #[test]
    fn cone_test_reads_off_the_slope() {
        let c = cone_test(&end("c_cone").curve, &cfg()).unwrap();
        assert!((c.unwrap() - 1.0).abs() < 1e-9);
        let u = cone_test(&end("cylinder_upper").curve, &cfg()).unwrap();
        assert!((u.unwrap() - 0.5).abs() < 1e-9, "got {u:?}");
        let cat = cone_test(&end("spherical_catenoid").curve, &cfg()).unwrap();
        assert!(cat.is_none());
    }

    #[test]
    fn excursion_measure_splits_on_the_cone_slope() {
        let curve = &end("c_cone").curve;
        let below = iplus_test(curve, 0.5, &cfg()).unwrap();
        assert_eq!(below.kind, VerdictKind::Divergent);
        let above = iplus_test(curve, 2.0, &cfg()).unwrap();
        assert_eq!(above.kind, VerdictKind::Convergent);
        assert!(above.value.unwrap().value.abs() < 1e-3);
    }

    #[test]
    fn horosphere_test_reads_off_the_height() {
        let z = horosphere_test(&end("horosphere").curve, &cfg()).unwrap();
        assert!((z.unwrap() - 1.0).abs() < 1e-9);
        let u = horosphere_test(&end("cylinder_upper").curve, &cfg()).unwrap();
        assert!((u.unwrap() - 1.0).abs() < 1e-9);
        let l = horosphere_test(&end("cylinder_lower").curve, &cfg()).unwrap();
        assert!(l.is_none());
    }

    #[test]
    fn centroid_findings_across_profiles() {
        let h = centroid_test(&warp_of("horosphere"), &cfg()).unwrap();
        assert!(matches!(h, CentroidFinding::LinearBound { .. }), "got {h:?}");
        let flat = WarpFn::synthetic("const2", |_| 2.0, |_| 0.0);
        let c = centroid_test(&flat, &cfg()).unwrap();
        match c {
            CentroidFinding::Confined { x_g } => assert!((x_g - 2.0).abs() < 1e-9),
            other => panic!("expected confined, got {other:?}"),
        }
        let l = centroid_test(&warp_of("cylinder_lower"), &cfg()).unwrap();
        assert_eq!(l, CentroidFinding::Absent);
    }

    #[test]
    fn necessaries_pass_for_nonparabolic_catalog_entries() {
        for name in ["cylinder_lower", "spherical_catenoid"] {
            let checks = nonparabolic_necessaries(&end(name).curve, &cfg()).unwrap();
            assert_eq!(checks.len(), 2);
            for c in &checks {
                assert_eq!(c.status, CheckStatus::Pass, "{name}: {} {}", c.id, c.detail);
            }
        }
    }

    #[test]
    fn lower_cylinder_report_is_nonparabolic() {
        let r = classify_end(&end("cylinder_lower"), &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::NonParabolic);
        assert!(r.fired.is_empty(), "fired: {:?}", r.fired);
        let vb = r.integrals.parabolicity.value.unwrap();
        assert!((vb.value - 0.5).abs() < 1e-6);
        assert!(r
            .consistency
            .iter()
            .filter(|c| c.id.contains("gamma"))
            .all(|c| c.status == CheckStatus::Pass));
    }

    #[test]
    fn cone_report_is_parabolic_with_firings() {
        let r = classify_end(&end("c_cone"), &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Parabolic);
        assert!(r.fired.iter().any(|f| f.criterion == "cone"));
        assert_eq!(r.integrals.parabolicity.kind, VerdictKind::Divergent);
    }

    #[test]
    fn flat_model_report_uses_the_sign_shortcut() {
        let r = classify_end(&end("plane_end"), &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Parabolic);
        assert!(r.fired.iter().any(|f| f.criterion == "model-sign"));
        let check = r
            .consistency
            .iter()
            .find(|c| c.id == "parabolicity-cross-check")
            .expect("cross-check entry");
        assert_eq!(check.status, CheckStatus::Pass);
    }

    #[test]
    fn expectation_matching_accepts_soft_parabolic() {
        assert!(verdict_matches(ExpectedVerdict::ParabolicSoft, Verdict::Parabolic));
        assert!(verdict_matches(ExpectedVerdict::ParabolicSoft, Verdict::Inconclusive));
        assert!(!verdict_matches(ExpectedVerdict::ParabolicSoft, Verdict::NonParabolic));
        assert!(!verdict_matches(ExpectedVerdict::Parabolic, Verdict::Inconclusive));
    }
}
