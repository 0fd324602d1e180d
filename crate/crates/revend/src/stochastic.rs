//! Monte Carlo oracle for the radial diffusion on a warped surface,
//! plus the exact scale-function hitting probabilities it is checked
//! against.
//!
//! The radial part of the Laplacian of ds^2 + w^2 dtheta^2 is
//! d^2/dr^2 + (w'/w) d/dr, so the radial diffusion solves
//! dX = (w'/w)(X) dt + sqrt(2) dB. The generator is Delta, not Delta/2:
//! hitting probabilities are invariant to that choice, but mean exit
//! times are half of what the Delta/2 convention would give.
//!
//! Determinism contract: every path consumes its own counter-derived
//! random stream keyed by (seed, path index), paths are accumulated in
//! fixed 1024-index chunks, and chunk sums are reduced in chunk order,
//! so results are bitwise identical for any worker count.

use crate::classify::{ClassifierCfg, ValueBound};
use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::warp::WarpFn;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Paths per deterministic accumulation chunk.
const CHUNK: u64 = 1024;

/// Euler-Maruyama settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionCfg {
    /// Time step of the Euler-Maruyama scheme.
    pub step: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Paths still alive at this time count as undecided.
    pub t_max: f64,
    /// Radius treated as escaped to infinity regardless of the outer
    /// absorbing barrier.
    pub r_explode: f64,
}

impl Default for DiffusionCfg {
    fn default() -> Self {
        DiffusionCfg { step: 1e-4, n_paths: 10_000, seed: 1, t_max: 50.0, r_explode: 1e9 }
    }
}

impl DiffusionCfg {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::domain(format!("diffusion step must be positive, got {}", self.step)));
        }
        if self.n_paths == 0 {
            return Err(Error::domain("diffusion needs at least one path"));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::domain(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.r_explode > 0.0) {
            return Err(Error::domain(format!(
                "explosion radius must be positive, got {}",
                self.r_explode
            )));
        }
        Ok(())
    }
}

/// Absorption statistics of a batch of paths. Standard errors ride in the
/// error slots of the bounds; mean_exit_time averages decided paths only
/// and is 0 +/- 0 when every path was undecided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitStats {
    pub p_hit_inner: ValueBound,
    pub p_hit_outer: ValueBound,
    pub n_undecided: u64,
    pub n_paths: u64,
    pub mean_exit_time: ValueBound,
}

/// Drift of the radial diffusion: b(r) = w'(r)/w(r).
pub fn radial_drift(w: &WarpFn) -> impl Fn(f64) -> Result<f64> {
    let w = w.clone();
    move |r| Ok(w.dw(r)? / w.w(r)?)
}

/// Exact hitting probabilities (inner, outer) of the interval [rho, R]
/// started at x0, from the scale function S(x) = int dt/w(t):
/// p_inner = (S(R) - S(x0)) / (S(R) - S(rho)).
pub fn exact_hitting(w: &WarpFn, rho: f64, big_r: f64, x0: f64) -> Result<(f64, f64)> {
    if !(rho >= 0.0) || !(big_r > rho) || !(x0 >= rho) || x0 > big_r || !big_r.is_finite() {
        return Err(Error::domain(format!(
            "hitting interval needs 0 <= rho <= x0 <= R finite, got rho={rho}, x0={x0}, R={big_r}"
        )));
    }
    if x0 == rho {
        return Ok((1.0, 0.0));
    }
    if x0 == big_r {
        return Ok((0.0, 1.0));
    }
    let inv_w = |t: f64| Ok(1.0 / w.w(t)?);
    let quad = crate::quad::QuadCfg::default();
    let above = integrate(&inv_w, x0, big_r, &quad)?.value;
    let below = integrate(&inv_w, rho, x0, &quad)?.value;
    let p_inner = above / (above + below);
    Ok((p_inner, 1.0 - p_inner))
}

enum PathOutcome {
    Inner(f64),
    Outer(f64),
    Undecided,
}

/// Counter-derived per-path stream: a SplitMix64 round mixes the path
/// index into the seed so that scheduling cannot perturb any stream.
fn path_rng(seed: u64, idx: u64) -> StdRng {
    let mut z = seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    StdRng::seed_from_u64(z ^ (z >> 31))
}

fn run_path<B>(
    b: &B,
    rho: f64,
    outer: f64,
    x0: f64,
    cfg: &DiffusionCfg,
    rng: &mut StdRng,
) -> Result<PathOutcome>
where
    B: Fn(f64) -> Result<f64>,
{
    if x0 <= rho {
        return Ok(PathOutcome::Inner(0.0));
    }
    if x0 >= outer {
        return Ok(PathOutcome::Outer(0.0));
    }
    let h = cfg.step;
    let noise = (2.0 * h).sqrt();
    let mut x = x0;
    let mut t = 0.0;
    while t < cfg.t_max {
        let drift = b(x)?;
        let z: f64 = rng.sample(StandardNormal);
        let xn = x + drift * h + noise * z;
        t += h;
        if xn <= rho {
            return Ok(PathOutcome::Inner(t));
        }
        if xn >= outer {
            return Ok(PathOutcome::Outer(t));
        }
        // Brownian-bridge crossing corrections: the bridge between two
        // interior points dips below a level L with probability
        // exp(-(x-L)(x'-L)/h) at diffusion coefficient 2.
        let u: f64 = rng.random();
        if u < (-(x - rho) * (xn - rho) / h).exp() {
            return Ok(PathOutcome::Inner(t));
        }
        let v: f64 = rng.random();
        if v < (-(outer - x) * (outer - xn) / h).exp() {
            return Ok(PathOutcome::Outer(t));
        }
        x = xn;
    }
    Ok(PathOutcome::Undecided)
}

#[derive(Default, Clone, Copy)]
struct BatchSums {
    inner: u64,
    outer: u64,
    undecided: u64,
    exit_sum: f64,
    exit_sq: f64,
}

/// Euler-Maruyama estimate of the hitting statistics of [rho, R] from x0.
/// Deterministic given (seed, n_paths, step) for any worker count; paths
/// that outlive t_max are counted undecided, never dropped.
pub fn simulate_hitting(
    w: &WarpFn,
    rho: f64,
    big_r: f64,
    x0: f64,
    cfg: &DiffusionCfg,
) -> Result<HitStats> {
    cfg.validate()?;
    if !(rho >= 0.0) || !(big_r > rho) || !(x0 >= rho) || x0 > big_r || !big_r.is_finite() {
        return Err(Error::domain(format!(
            "hitting interval needs 0 <= rho <= x0 <= R finite, got rho={rho}, x0={x0}, R={big_r}"
        )));
    }
    let b = radial_drift(w);
    let outer = big_r.min(cfg.r_explode);
    let chunks = cfg.n_paths.div_ceil(CHUNK);
    let sums: Vec<BatchSums> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = ((ci + 1) * CHUNK).min(cfg.n_paths);
            let mut acc = BatchSums::default();
            for idx in lo..hi {
                let mut rng = path_rng(cfg.seed, idx);
                match run_path(&b, rho, outer, x0, cfg, &mut rng)? {
                    PathOutcome::Inner(t) => {
                        acc.inner += 1;
                        acc.exit_sum += t;
                        acc.exit_sq += t * t;
                    }
                    PathOutcome::Outer(t) => {
                        acc.outer += 1;
                        acc.exit_sum += t;
                        acc.exit_sq += t * t;
                    }
                    PathOutcome::Undecided => acc.undecided += 1,
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    // Chunk order is fixed, so this fold is bitwise reproducible.
    let mut total = BatchSums::default();
    for s in sums {
        total.inner += s.inner;
        total.outer += s.outer;
        total.undecided += s.undecided;
        total.exit_sum += s.exit_sum;
        total.exit_sq += s.exit_sq;
    }

    let n = cfg.n_paths as f64;
    let binomial = |k: u64| {
        let p = k as f64 / n;
        ValueBound { value: p, error: (p * (1.0 - p) / n).sqrt() }
    };
    let decided = total.inner + total.outer;
    let mean_exit_time = if decided == 0 {
        ValueBound { value: 0.0, error: 0.0 }
    } else {
        let m = decided as f64;
        let mean = total.exit_sum / m;
        let var = if decided > 1 {
            ((total.exit_sq - m * mean * mean) / (m - 1.0)).max(0.0)
        } else {
            0.0
        };
        ValueBound { value: mean, error: (var / m).sqrt() }
    };
    Ok(HitStats {
        p_hit_inner: binomial(total.inner),
        p_hit_outer: binomial(total.outer),
        n_undecided: total.undecided,
        n_paths: cfg.n_paths,
        mean_exit_time,
    })
}

/// Where the escape probability p_outer(R) is trending as R doubles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EscapeTrend {
    /// p_outer(R) -> 0: the diffusion is recurrent, the end parabolic.
    Vanishing,
    /// p_outer(R) stabilized at a positive limit: transient.
    Positive { limit: f64 },
    Undecided,
}

/// Escape-probability trend with its samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EscapeProbe {
    pub trend: EscapeTrend,
    /// (R, exact p_outer) per doubling.
    pub samples: Vec<(f64, f64)>,
}

/// Exact escape probabilities out of [rho, R] for R = x0 * 2^k. The limit
/// is 0 exactly when int ds/w diverges, so the trend cross-checks the
/// parabolicity verdict.
pub fn escape_probe(
    w: &WarpFn,
    rho: f64,
    x0: f64,
    cfg: &ClassifierCfg,
) -> Result<EscapeProbe> {
    if !(rho >= 0.0) || !(x0 > rho) || !x0.is_finite() {
        return Err(Error::domain(format!(
            "escape probe needs 0 <= rho < x0 finite, got rho={rho}, x0={x0}"
        )));
    }
    let inv_w = |t: f64| Ok(1.0 / w.w(t)?);
    let below = integrate(&inv_w, rho, x0, &cfg.quad)?.value;
    let mut above = 0.0;
    let mut prev_r = x0;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut inv_q: Vec<f64> = Vec::new();
    let mut positive_streak = 0u32;
    for k in 1..=cfg.max_doublings {
        let r = x0 * f64::powi(2.0, k as i32);
        above += integrate(&inv_w, prev_r, r, &cfg.quad)?.value;
        prev_r = r;
        let q = below / (above + below);
        samples.push((r, q));
        inv_q.push(1.0 / q);
        let first_q = samples[0].1;
        if q <= 1e-3 * first_q {
            return Ok(EscapeProbe { trend: EscapeTrend::Vanishing, samples });
        }
        if inv_q.len() >= 4 {
            let n = inv_q.len();
            let ramp = (n - 3..n)
                .map(|j| inv_q[j] - inv_q[j - 1])
                .collect::<Vec<_>>();
            let growing = ramp.iter().all(|&d| d > 0.0)
                && ramp.windows(2).all(|p| p[1] / p[0] >= 0.999)
                && inv_q[n - 1] >= 2.0 * inv_q[0];
            if growing {
                return Ok(EscapeProbe { trend: EscapeTrend::Vanishing, samples });
            }
        }
        let len = samples.len();
        if len >= 2 && (samples[len - 1].1 - samples[len - 2].1).abs() <= 1e-6 * q {
            positive_streak += 1;
            if positive_streak >= 2 {
                return Ok(EscapeProbe { trend: EscapeTrend::Positive { limit: q }, samples });
            }
        } else {
            positive_streak = 0;
        }
    }
    Ok(EscapeProbe { trend: EscapeTrend::Undecided, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, CatalogParams};
    use crate::warp::warp_from_curve;

    fn warp_of(name: &str) -> WarpFn {
        let end = catalog(name, &CatalogParams::new()).unwrap();
        warp_from_curve(&end.curve).unwrap()
    }

    fn exp_warp() -> WarpFn {
        WarpFn::synthetic("exp", |s| s.exp(), |s| s.exp())
    }

    #[test]
    fn drift_of_reference_warps() {
        let b = radial_drift(&exp_warp());
        assert!((b(0.7).unwrap() - 1.0).abs() < 1e-12);
        let flat = WarpFn::synthetic("const", |_| 3.0, |_| 0.0);
        assert_eq!(radial_drift(&flat)(5.0).unwrap(), 0.0);
        let horo = warp_of("horosphere");
        let bh = radial_drift(&horo);
        assert!((bh(3.0).unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn exact_hitting_closed_forms() {
        // S(x) = -e^{-x}: p_inner = (e^{-1} - e^{-2})/(1 - e^{-2}) = 1/(1+e).
        let (pi, po) = exact_hitting(&exp_warp(), 0.0, 2.0, 1.0).unwrap();
        assert!((pi - 0.2689414213699951).abs() < 1e-9, "got {pi}");
        assert!((pi + po - 1.0).abs() < 1e-12);
        let flat = WarpFn::synthetic("const", |_| 1.0, |_| 0.0);
        let (pf, _) = exact_hitting(&flat, 0.0, 2.0, 1.0).unwrap();
        assert!((pf - 0.5).abs() < 1e-12);
        assert_eq!(exact_hitting(&exp_warp(), 0.5, 2.0, 0.5).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn simulated_flat_interval_is_symmetric() {
        let flat = WarpFn::synthetic("const", |_| 1.0, |_| 0.0);
        let cfg = DiffusionCfg { step: 1e-3, n_paths: 4000, seed: 7, ..DiffusionCfg::default() };
        let stats = simulate_hitting(&flat, 0.0, 2.0, 1.0, &cfg).unwrap();
        let se = stats.p_hit_inner.error.max(1e-3);
        assert!(
            (stats.p_hit_inner.value - 0.5).abs() <= 3.0 * se,
            "p_inner = {} +/- {se}",
            stats.p_hit_inner.value
        );
        assert_eq!(
            stats.p_hit_inner.value * cfg.n_paths as f64
                + stats.p_hit_outer.value * cfg.n_paths as f64
                + stats.n_undecided as f64,
            cfg.n_paths as f64
        );
        assert!(stats.mean_exit_time.value > 0.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let w = exp_warp();
        let cfg = DiffusionCfg { step: 1e-3, n_paths: 3000, seed: 42, ..DiffusionCfg::default() };
        let base = simulate_hitting(&w, 0.0, 2.0, 1.0, &cfg).unwrap();
        for threads in [1usize, 8] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let again = pool.install(|| simulate_hitting(&w, 0.0, 2.0, 1.0, &cfg)).unwrap();
            assert_eq!(base, again, "worker count {threads} changed the statistics");
        }
    }

    #[test]
    fn escape_trends_match_conformal_type() {
        let horo = warp_of("horosphere");
        let p = escape_probe(&horo, 0.0, 1.0, &ClassifierCfg::default()).unwrap();
        assert_eq!(p.trend, EscapeTrend::Vanishing, "samples {:?}", p.samples);
        let lower = warp_of("cylinder_lower");
        let q = escape_probe(&lower, 0.0, 1.0, &ClassifierCfg::default()).unwrap();
        match q.trend {
            EscapeTrend::Positive { limit } => assert!(limit > 0.0),
            other => panic!("expected a positive limit, got {other:?}"),
        }
        let flat = WarpFn::synthetic("const", |_| 1.0, |_| 0.0);
        let f = escape_probe(&flat, 0.0, 1.0, &ClassifierCfg::default()).unwrap();
        assert_eq!(f.trend, EscapeTrend::Vanishing, "samples {:?}", f.samples);
    }
}
