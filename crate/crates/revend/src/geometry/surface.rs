//! Extrinsic Euclidean quantities and triangulated revolution meshes.

use super::{ArcCurve, EndSpec, Kappa};
use crate::error::{Error, Result};

/// Mean curvature of the revolution surface of a Euclidean profile, as a
/// function of arc length. For a unit-speed profile (x1, x3):
/// H = (kappa_profile + x3' / x1) / 2 with
/// kappa_profile = x1' x3'' - x3' x1''.
///
/// Errors immediately unless the curve lives in the flat model; second
/// derivatives come from Richardson-refined central differences of the
/// unit tangent.
pub fn euclid_mean_curvature(curve: &ArcCurve) -> Result<impl Fn(f64) -> Result<f64>> {
    if curve.kappa() != Kappa::Euclidean {
        return Err(Error::domain(format!(
            "mean curvature of the revolution surface is computed in the flat model only; \
             curve `{}` has curvature selector {}",
            curve.label(),
            curve.kappa().value()
        )));
    }
    let curve = curve.clone();
    Ok(move |s: f64| -> Result<f64> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::domain(format!("arc length must be >= 0, got {s}")));
        }
        let p = curve.point(s)?;
        let tan = curve.tangent(s)?;
        // Tangents come from closed-form or knot-table curves and are
        // noise-free at this scale; the step must stay small because fold
        // features of oscillating profiles sharpen cubically with s and a
        // coarser stencil would average them away.
        let mut h = 1e-6 * s.abs().max(1.0);
        let ddot = if s >= 2.0 * h {
            let central = |hh: f64| -> Result<(f64, f64)> {
                let a = curve.tangent(s + hh)?;
                let b = curve.tangent(s - hh)?;
                Ok(((a.0 - b.0) / (2.0 * hh), (a.1 - b.1) / (2.0 * hh)))
            };
            let d1 = central(h)?;
            let d2 = central(0.5 * h)?;
            ((4.0 * d2.0 - d1.0) / 3.0, (4.0 * d2.1 - d1.1) / 3.0)
        } else {
            // Too close to the end start for a centered stencil.
            if s > 0.0 {
                h = h.min(0.5 * s.max(1e-8));
            }
            let t1 = curve.tangent(s + h)?;
            let t2 = curve.tangent(s + 2.0 * h)?;
            ((-3.0 * tan.0 + 4.0 * t1.0 - t2.0) / (2.0 * h), (-3.0 * tan.1 + 4.0 * t1.1 - t2.1) / (2.0 * h))
        };
        let kappa_profile = tan.0 * ddot.1 - tan.1 * ddot.0;
        Ok(0.5 * (kappa_profile + tan.1 / p.x1))
    })
}

/// Triangulated surface of revolution with per-row scalar channels.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub n_s: usize,
    pub n_theta: usize,
    /// Arc-length value of each vertex row.
    pub s_rows: Vec<f64>,
    /// Vertices in row-major order: row i, angle j -> i * n_theta + j.
    pub vertices: Vec<[f64; 3]>,
    /// Counterclockwise triangles, indices into `vertices`.
    pub faces: Vec<[u32; 3]>,
    /// Optional per-row (gauss, warp) channel, parallel to `s_rows`.
    pub scalars: Option<Vec<(f64, f64)>>,
}

impl Mesh {
    /// Attach per-row scalars (ambient Gauss curvature of the metric and
    /// the warp value), evaluated once per row.
    pub fn attach_scalars(&mut self, f: &dyn Fn(f64) -> Result<(f64, f64)>) -> Result<()> {
        let mut rows = Vec::with_capacity(self.s_rows.len());
        for &s in &self.s_rows {
            rows.push(f(s)?);
        }
        self.scalars = Some(rows);
        Ok(())
    }

    /// Wavefront-style text: full-precision `v x y z` lines, 1-based `f`
    /// triangles, scalar rows as comments ahead of the data.
    pub fn write_obj(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        writeln!(out, "# surface of revolution: {} rows x {} angles", self.n_s, self.n_theta)?;
        if let Some(sc) = &self.scalars {
            writeln!(out, "# row s gauss warp")?;
            for (i, (&s, &(g, w))) in self.s_rows.iter().zip(sc.iter()).enumerate() {
                writeln!(out, "# row {i} {s:.17e} {g:.17e} {w:.17e}")?;
            }
        }
        for v in &self.vertices {
            writeln!(out, "v {:.17e} {:.17e} {:.17e}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

/// Sample the end on [0, s_max] with n_s rows of n_theta angles and
/// triangulate the quads. Vertex (i, j) is the profile point at
/// s_i = i * s_max / (n_s - 1) rotated by theta_j = 2 pi j / n_theta:
/// (x1 cos, x1 sin, x3).
pub fn mesh(end: &EndSpec, s_max: f64, n_s: usize, n_theta: usize) -> Result<Mesh> {
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Err(Error::domain(format!("mesh extent s_max must be positive, got {s_max}")));
    }
    if n_s < 2 {
        return Err(Error::domain(format!("mesh needs at least 2 rows, got {n_s}")));
    }
    if n_theta < 3 {
        return Err(Error::domain(format!("mesh needs at least 3 angles, got {n_theta}")));
    }
    if n_s.saturating_mul(n_theta) > 50_000_000 {
        return Err(Error::domain(format!(
            "mesh of {n_s} x {n_theta} vertices exceeds the 5e7 vertex budget"
        )));
    }
    let mut s_rows = Vec::with_capacity(n_s);
    let mut vertices = Vec::with_capacity(n_s * n_theta);
    for i in 0..n_s {
        let s = s_max * i as f64 / (n_s - 1) as f64;
        let p = end.curve.point(s)?;
        s_rows.push(s);
        for j in 0..n_theta {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            vertices.push([p.x1 * th.cos(), p.x1 * th.sin(), p.x3]);
        }
    }
    let mut faces = Vec::with_capacity(2 * (n_s - 1) * n_theta);
    for i in 0..n_s - 1 {
        for j in 0..n_theta {
            let jn = (j + 1) % n_theta;
            let a = (i * n_theta + j) as u32;
            let b = (i * n_theta + jn) as u32;
            let c = ((i + 1) * n_theta + j) as u32;
            let d = ((i + 1) * n_theta + jn) as u32;
            faces.push([a, c, d]);
            faces.push([a, d, b]);
        }
    }
    Ok(Mesh { n_s, n_theta, s_rows, vertices, faces, scalars: None })
}
