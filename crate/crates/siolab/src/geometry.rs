//! Boundary meshes for model domains with exact normals and surface measure,
//! plus geometric diagnostics: Ahlfors regularity profiles, pseudo-balls,
//! hourglass (two-sided cone) checks, and cone points for nontangential
//! limits.
//!
//! Curves are discretized with uniform-parameter trapezoidal nodes, which is
//! spectrally accurate for the analytic parametrizations used here. The
//! teardrop is the deliberately non-smooth fixture: two circular arcs meeting
//! at a corner, kept C^0 only.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthFunction;

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn add_scaled3(a: &[f64; 3], c: f64, b: &[f64; 3]) -> [f64; 3] {
    [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]]
}

/// Model domain. The interior is always the bounded component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk { r: f64 },
    Ellipse { a: f64, b: f64 },
    /// Polar curve r(theta) = r0 (1 + eps cos k theta).
    Star { r0: f64, eps: f64, k: u32 },
    /// Two circular arcs meeting at corner angle gamma; C^0 only.
    Teardrop { gamma: f64 },
    Sphere3 { r: f64 },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        match *self {
            DomainSpec::Disk { r } | DomainSpec::Sphere3 { r } => {
                if r > 0.0 && r.is_finite() {
                    Ok(())
                } else {
                    bad(format!("radius must be positive and finite, got {r}"))
                }
            }
            DomainSpec::Ellipse { a, b } => {
                if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    bad(format!("ellipse needs positive finite semi-axes, got ({a}, {b})"))
                }
            }
            DomainSpec::Star { r0, eps, k } => {
                if !(r0 > 0.0 && r0.is_finite()) {
                    return bad(format!("star needs r0 > 0, got {r0}"));
                }
                if !(eps >= 0.0 && eps.is_finite()) {
                    return bad(format!("star needs eps >= 0, got {eps}"));
                }
                if k == 0 {
                    return bad("star needs k >= 1".into());
                }
                // eps * k < 1 keeps r' bounded below r, so the curve is simple.
                if eps * k as f64 >= 1.0 {
                    return bad(format!("star needs eps * k < 1, got {}", eps * k as f64));
                }
                Ok(())
            }
            DomainSpec::Teardrop { gamma } => {
                if gamma > 0.0 && gamma < PI {
                    Ok(())
                } else {
                    bad(format!("teardrop corner angle must lie in (0, pi), got {gamma}"))
                }
            }
        }
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Sphere3 { .. } => 3,
            _ => 2,
        }
    }

    /// False exactly for the teardrop, which is C^0 but not C^1.
    pub fn is_smooth(&self) -> bool {
        !matches!(self, DomainSpec::Teardrop { .. })
    }

    /// Diameter of the boundary. Closed form except for the star, which
    /// takes a fine parameter scan.
    pub fn diam(&self) -> f64 {
        match *self {
            DomainSpec::Disk { r } | DomainSpec::Sphere3 { r } => 2.0 * r,
            DomainSpec::Ellipse { a, b } => 2.0 * a.max(b),
            DomainSpec::Teardrop { .. } => 2.0,
            DomainSpec::Star { .. } => {
                let m = 1024;
                let pts: Vec<[f64; 3]> =
                    (0..m).map(|i| self.curve_jet(2.0 * PI * i as f64 / m as f64).p).collect();
                let mut best = 0.0f64;
                for i in 0..m {
                    for j in (i + 1)..m {
                        best = best.max(norm3(&sub3(&pts[i], &pts[j])));
                    }
                }
                best
            }
        }
    }

    /// True when z lies in the open interior.
    pub fn contains(&self, z: &[f64; 3]) -> bool {
        match *self {
            DomainSpec::Disk { r } => z[0] * z[0] + z[1] * z[1] < r * r && z[2] == 0.0,
            DomainSpec::Sphere3 { r } => dot3(z, z) < r * r,
            DomainSpec::Ellipse { a, b } => {
                (z[0] / a).powi(2) + (z[1] / b).powi(2) < 1.0 && z[2] == 0.0
            }
            DomainSpec::Star { r0, eps, k } => {
                let rho = (z[0] * z[0] + z[1] * z[1]).sqrt();
                let theta = z[1].atan2(z[0]);
                rho < r0 * (1.0 + eps * (k as f64 * theta).cos()) && z[2] == 0.0
            }
            DomainSpec::Teardrop { gamma } => {
                let lens = TeardropGeom::new(gamma);
                let d1 = (z[0] - 1.0).powi(2) + (z[1] - lens.c).powi(2);
                let d2 = (z[0] - 1.0).powi(2) + (z[1] + lens.c).powi(2);
                d1 < lens.rr * lens.rr && d2 < lens.rr * lens.rr && z[2] == 0.0
            }
        }
    }

    /// Position, velocity, and acceleration of the curve parametrization at t
    /// (2D kinds only).
    fn curve_jet(&self, t: f64) -> CurveJet {
        match *self {
            DomainSpec::Disk { r } => {
                let (s, c) = t.sin_cos();
                CurveJet {
                    p: [r * c, r * s, 0.0],
                    dp: [-r * s, r * c, 0.0],
                    ddp: [-r * c, -r * s, 0.0],
                }
            }
            DomainSpec::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                CurveJet {
                    p: [a * c, b * s, 0.0],
                    dp: [-a * s, b * c, 0.0],
                    ddp: [-a * c, -b * s, 0.0],
                }
            }
            DomainSpec::Star { r0, eps, k } => {
                let kf = k as f64;
                let (s, c) = t.sin_cos();
                let r = r0 * (1.0 + eps * (kf * t).cos());
                let dr = -r0 * eps * kf * (kf * t).sin();
                let ddr = -r0 * eps * kf * kf * (kf * t).cos();
                CurveJet {
                    p: [r * c, r * s, 0.0],
                    dp: [dr * c - r * s, dr * s + r * c, 0.0],
                    ddp: [
                        ddr * c - 2.0 * dr * s - r * c,
                        ddr * s + 2.0 * dr * c - r * s,
                        0.0,
                    ],
                }
            }
            DomainSpec::Teardrop { gamma } => TeardropGeom::new(gamma).jet(t),
            DomainSpec::Sphere3 { .. } => unreachable!("curve_jet is for 2D kinds"),
        }
    }
}

struct CurveJet {
    p: [f64; 3],
    dp: [f64; 3],
    ddp: [f64; 3],
}

/// Symmetric lens: two arcs of radius R = 1/sin(gamma/2) through (0,0) and
/// (2,0), centers (1, +-cot(gamma/2)). Corner angle gamma at both junctions;
/// each arc spans central angle gamma, so the speed is the same constant on
/// both arcs and the midpoint rule integrates the perimeter exactly.
struct TeardropGeom {
    phi: f64,
    rr: f64,
    c: f64,
}

impl TeardropGeom {
    fn new(gamma: f64) -> Self {
        let phi = gamma / 2.0;
        TeardropGeom { phi, rr: 1.0 / phi.sin(), c: 1.0 / phi.tan() }
    }

    #[cfg(test)]
    fn perimeter(&self) -> f64 {
        4.0 * self.phi * self.rr
    }

    /// t in [0, pi) is the lower arc from (0,0) to (2,0); t in [pi, 2 pi) the
    /// upper arc back. Both traversals keep the interior on the left.
    fn jet(&self, t: f64) -> CurveJet {
        let t = t.rem_euclid(2.0 * PI);
        let rate = 2.0 * self.phi / PI;
        let (center_y, psi) = if t < PI {
            let psi0 = (-self.c).atan2(-1.0);
            (self.c, psi0 + rate * t)
        } else {
            let psi0 = self.c.atan2(1.0);
            (-self.c, psi0 + rate * (t - PI))
        };
        let (s, c) = psi.sin_cos();
        CurveJet {
            p: [1.0 + self.rr * c, center_y + self.rr * s, 0.0],
            dp: [-self.rr * rate * s, self.rr * rate * c, 0.0],
            ddp: [-self.rr * rate * rate * c, -self.rr * rate * rate * s, 0.0],
        }
    }

    /// Exact distance to the lens boundary: per arc, project onto the circle,
    /// clamp to the arc's angular range, and compare with the corners.
    fn dist(&self, z: &[f64; 3]) -> f64 {
        let mut best = f64::INFINITY;
        for (cy, lo, hi) in [
            (self.c, (-self.c).atan2(-1.0), (-self.c).atan2(1.0)),
            (-self.c, self.c.atan2(1.0), self.c.atan2(-1.0)),
        ] {
            let v = [z[0] - 1.0, z[1] - cy];
            let ang = v[1].atan2(v[0]);
            if ang >= lo && ang <= hi {
                let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                best = best.min((r - self.rr).abs());
            }
        }
        for corner in [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]] {
            best = best.min(norm3(&sub3(z, &corner)));
        }
        best
    }
}

/// Quadrature mesh for sigma = H^{n-1} restricted to the boundary.
///
/// Nodes and normals live in [f64; 3] with a zero third component for
/// curves. Immutable after construction.
#[derive(Clone, Debug)]
pub struct BoundaryMesh {
    pub spec: DomainSpec,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Outward unit normals.
    pub normals: Vec<[f64; 3]>,
    /// Curve parameter per node; colatitude theta for sphere3.
    pub parametric_t: Vec<f64>,
    /// Max panel diameter (consecutive node spacing).
    pub panel_h: f64,
    pub diam: f64,
    /// Content id tying dependent fields back to this mesh.
    pub id: u64,
}

/// Nystrom discretization of the boundary measure. Curves get N
/// uniform-parameter trapezoidal nodes; sphere3 gets a Gauss-Legendre x
/// trapezoid product grid with about N nodes.
pub fn build_mesh(spec: &DomainSpec, n: usize) -> Result<BoundaryMesh> {
    spec.validate()?;
    if n < 16 {
        return Err(Error::Domain(format!("build_mesh needs N >= 16, got {n}")));
    }
    let mut mesh = match spec {
        DomainSpec::Sphere3 { r } => build_sphere(spec, *r, n),
        _ => build_curve(spec, n),
    };
    mesh.id = mesh_id(spec, n);
    Ok(mesh)
}

fn build_curve(spec: &DomainSpec, n: usize) -> BoundaryMesh {
    let dt = 2.0 * PI / n as f64;
    // Offset the teardrop grid by half a step so no node lands on a corner,
    // where the velocity jumps.
    let offset = if spec.is_smooth() { 0.0 } else { 0.5 };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut parametric_t = Vec::with_capacity(n);
    for i in 0..n {
        let t = (i as f64 + offset) * dt;
        let jet = spec.curve_jet(t);
        let speed = norm3(&jet.dp);
        let tangent = [jet.dp[0] / speed, jet.dp[1] / speed, 0.0];
        // Counterclockwise parametrization puts the outward normal at
        // (tangent_y, -tangent_x); the orientation tests pin this down.
        nodes.push(jet.p);
        weights.push(speed * dt);
        normals.push([tangent[1], -tangent[0], 0.0]);
        parametric_t.push(t);
    }
    let mut panel_h = 0.0f64;
    for i in 0..n {
        panel_h = panel_h.max(norm3(&sub3(&nodes[i], &nodes[(i + 1) % n])));
    }
    BoundaryMesh {
        spec: spec.clone(),
        nodes,
        weights,
        normals,
        parametric_t,
        panel_h,
        diam: spec.diam(),
        id: 0,
    }
}

fn build_sphere(spec: &DomainSpec, r: f64, n: usize) -> BoundaryMesh {
    let n_theta = (((n as f64) / 2.0).sqrt().round() as usize).max(4);
    let n_phi = 2 * n_theta;
    let (mu, wmu) = crate::quad::gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    let mut normals = Vec::with_capacity(n_theta * n_phi);
    let mut parametric_t = Vec::with_capacity(n_theta * n_phi);
    for (i, &m) in mu.iter().enumerate() {
        let theta = m.acos();
        let st = theta.sin();
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let nu = [st * phi.cos(), st * phi.sin(), m];
            nodes.push([r * nu[0], r * nu[1], r * nu[2]]);
            weights.push(r * r * wmu[i] * dphi);
            normals.push(nu);
            parametric_t.push(theta);
        }
    }
    let mut thetas: Vec<f64> = mu.iter().map(|m| m.acos()).collect();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut gap = thetas[0].max(PI - thetas[thetas.len() - 1]);
    for w in thetas.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    let ring = thetas.iter().fold(0.0f64, |m, &t| m.max(t.sin())) * dphi;
    BoundaryMesh {
        spec: spec.clone(),
        nodes,
        weights,
        normals,
        parametric_t,
        panel_h: r * gap.max(ring),
        diam: 2.0 * r,
        id: 0,
    }
}

fn mesh_id(spec: &DomainSpec, n: usize) -> u64 {
    let mut h = DefaultHasher::new();
    match *spec {
        DomainSpec::Disk { r } => (0u8, r.to_bits()).hash(&mut h),
        DomainSpec::Ellipse { a, b } => (1u8, a.to_bits(), b.to_bits()).hash(&mut h),
        DomainSpec::Star { r0, eps, k } => (2u8, r0.to_bits(), eps.to_bits(), k).hash(&mut h),
        DomainSpec::Teardrop { gamma } => (3u8, gamma.to_bits()).hash(&mut h),
        DomainSpec::Sphere3 { r } => (4u8, r.to_bits()).hash(&mut h),
    }
    n.hash(&mut h);
    h.finish()
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// The point at signed distance rho from node i along the outward
    /// normal: rho > 0 is exterior, rho < 0 interior.
    pub fn offset(&self, i: usize, rho: f64) -> [f64; 3] {
        add_scaled3(&self.nodes[i], rho, &self.normals[i])
    }

    /// Distance from z to the boundary.
    ///
    /// Disk, sphere, and teardrop use closed forms; ellipse and star refine
    /// the nearest node with one Newton step on (gamma(t) - z) . gamma'(t),
    /// which gives sub-panel accuracy for the cone checks.
    pub fn dist(&self, z: &[f64; 3]) -> f64 {
        match self.spec {
            DomainSpec::Disk { r } => {
                let rho = (z[0] * z[0] + z[1] * z[1]).sqrt();
                ((rho - r).powi(2) + z[2] * z[2]).sqrt()
            }
            DomainSpec::Sphere3 { r } => (norm3(z) - r).abs(),
            DomainSpec::Teardrop { gamma } => TeardropGeom::new(gamma).dist(z),
            _ => {
                let mut best = (f64::INFINITY, 0usize);
                for (i, y) in self.nodes.iter().enumerate() {
                    let d = norm3(&sub3(z, y));
                    if d < best.0 {
                        best = (d, i);
                    }
                }
                let t0 = self.parametric_t[best.1];
                let jet = self.spec.curve_jet(t0);
                let v = sub3(&jet.p, z);
                let f = dot3(&v, &jet.dp);
                let fp = dot3(&jet.dp, &jet.dp) + dot3(&v, &jet.ddp);
                let mut d = best.0;
                if fp.abs() > 1e-300 {
                    let t1 = t0 - f / fp;
                    d = d.min(norm3(&sub3(z, &self.spec.curve_jet(t1).p)));
                }
                d
            }
        }
    }

    /// Mesh export with columns t,x,y(,z),w,nx,ny(,nz).
    pub fn export_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        if self.dim() == 2 {
            w.write_record(["t", "x", "y", "w", "nx", "ny"])?;
        } else {
            w.write_record(["t", "x", "y", "z", "w", "nx", "ny", "nz"])?;
        }
        for i in 0..self.len() {
            let mut row = vec![format!("{:.17e}", self.parametric_t[i])];
            for k in 0..self.dim() {
                row.push(format!("{:.17e}", self.nodes[i][k]));
            }
            row.push(format!("{:.17e}", self.weights[i]));
            for k in 0..self.dim() {
                row.push(format!("{:.17e}", self.normals[i][k]));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Error {
        Error::Config(format!("csv: {e}"))
    }
}

/// One radius row of the Ahlfors regularity profile.
#[derive(Clone, Debug, Serialize)]
pub struct AhlforsRow {
    pub r: f64,
    /// min over centers of sigma(B(x,r)) / r^{n-1}.
    pub lower: f64,
    /// max over centers of sigma(B(x,r)) / r^{n-1}.
    pub upper: f64,
}

/// Empirical Ahlfors regularity ratios sigma(closed B(x,r)) / r^{n-1} with
/// centers ranging over all mesh nodes.
pub fn ahlfors_profile(mesh: &BoundaryMesh, radii: &[f64]) -> Result<Vec<AhlforsRow>> {
    let lo = mesh.panel_h * 4.0;
    let hi = 2.0 * mesh.diam;
    for &r in radii {
        if !(r > lo && r < hi) {
            return Err(Error::Domain(format!(
                "radius {r} outside the resolvable range ({lo:.3e}, {hi:.3e})"
            )));
        }
    }
    let dim_exp = (mesh.dim() - 1) as i32;
    Ok(radii
        .iter()
        .map(|&r| {
            let (lower, upper) = mesh
                .nodes
                .par_iter()
                .map(|x| {
                    let mut s = 0.0;
                    for (y, w) in mesh.nodes.iter().zip(&mesh.weights) {
                        if norm3(&sub3(x, y)) <= r {
                            s += w;
                        }
                    }
                    let ratio = s / r.powi(dim_exp);
                    (ratio, ratio)
                })
                .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
            AhlforsRow { r, lower, upper }
        })
        .collect())
}

/// The two-sided pseudo-ball membership test
/// a |y-x| omega~(|y-x|) < h . (y-x) < b, evaluated exactly as written.
/// Out-of-range |y-x| (zero, or at least D) returns false.
pub fn pseudo_ball_contains(
    x: &[f64; 3],
    h: &[f64; 3],
    a: f64,
    b: f64,
    g: &GrowthFunction,
    y: &[f64; 3],
) -> bool {
    let v = sub3(y, x);
    let rho = norm3(&v);
    if !(rho > 0.0) || rho >= g.upper_endpoint() {
        return false;
    }
    let height = dot3(h, &v);
    let ext = g.extend();
    match ext.eval(rho) {
        Ok(w) => a * rho * w < height && height < b,
        Err(_) => false,
    }
}

/// Per-node and global outcome of the hourglass condition.
#[derive(Clone, Debug, Serialize)]
pub struct HourglassReport {
    pub per_node: Vec<bool>,
    pub global: bool,
    pub failing_nodes: Vec<usize>,
    pub samples_per_node: usize,
}

const HOURGLASS_BUDGET: usize = 50_000_000;

/// Checks, with h(x) := -nu(x) inward, that the inner pseudo-ball
/// G^omega_{a,b}(x, h) lies in the interior and the outer pseudo-ball
/// G^omega_{a,b}(x, -h) lies in the closed exterior, by polar-grid sampling.
pub fn hourglass_check(
    mesh: &BoundaryMesh,
    g: &GrowthFunction,
    a: f64,
    b: f64,
) -> Result<HourglassReport> {
    hourglass_check_with_budget(mesh, g, a, b, HOURGLASS_BUDGET)
}

pub fn hourglass_check_with_budget(
    mesh: &BoundaryMesh,
    g: &GrowthFunction,
    a: f64,
    b: f64,
    budget: usize,
) -> Result<HourglassReport> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("hourglass needs a, b > 0, got ({a}, {b})")));
    }
    let n_rho = 24usize;
    let n_ang = 17usize;
    let n_azim = if mesh.dim() == 3 { 8 } else { 1 };
    let samples_per_node = 2 * n_rho * n_ang * n_azim;
    let total = samples_per_node.saturating_mul(mesh.len());
    if total > budget {
        return Err(Error::Budget(format!(
            "hourglass sampling would take {total} probes, budget is {budget}"
        )));
    }
    // Radial cap: a rho omega~(rho) < b bounds the pseudo-ball radius.
    let ext = g.extend();
    let mut cap = 4.0 * mesh.diam;
    if a * cap * ext.eval(cap).unwrap_or(f64::INFINITY) > b {
        let mut lo = 0.0;
        let mut hi = cap;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if a * mid * ext.eval(mid).unwrap_or(f64::INFINITY) < b {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        cap = hi;
    }
    let rho_grid: Vec<f64> = (0..n_rho)
        .map(|i| cap * 1e-4 * (1e4f64).powf(i as f64 / (n_rho - 1) as f64) * 0.999_999)
        .collect();
    let ang_grid: Vec<f64> = (0..n_ang)
        .map(|i| -1.545 + 3.09 * i as f64 / (n_ang - 1) as f64)
        .collect();
    let per_node: Vec<bool> = (0..mesh.len())
        .into_par_iter()
        .map(|i| {
            let x = mesh.nodes[i];
            let nu = mesh.normals[i];
            let h = [-nu[0], -nu[1], -nu[2]];
            let (u, w) = orthonormal_complement(&h);
            for &rho in &rho_grid {
                for &xi in &ang_grid {
                    for az in 0..n_azim {
                        let zeta = 2.0 * PI * az as f64 / n_azim as f64;
                        let lateral = [
                            u[0] * zeta.cos() + w[0] * zeta.sin(),
                            u[1] * zeta.cos() + w[1] * zeta.sin(),
                            u[2] * zeta.cos() + w[2] * zeta.sin(),
                        ];
                        let dir = add_scaled3(
                            &[h[0] * xi.cos(), h[1] * xi.cos(), h[2] * xi.cos()],
                            xi.sin(),
                            &lateral,
                        );
                        let y = add_scaled3(&x, rho, &dir);
                        if pseudo_ball_contains(&x, &h, a, b, g, &y) && !mesh.spec.contains(&y) {
                            return false;
                        }
                        // Outer pseudo-ball reflects through the tangent
                        // plane: reuse y mirrored along h.
                        let y_out = add_scaled3(&y, -2.0 * rho * xi.cos(), &h);
                        if pseudo_ball_contains(&x, &nu, a, b, g, &y_out)
                            && mesh.spec.contains(&y_out)
                        {
                            return false;
                        }
                    }
                }
            }
            true
        })
        .collect();
    let failing_nodes: Vec<usize> =
        per_node.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i).collect();
    Ok(HourglassReport {
        global: failing_nodes.is_empty(),
        per_node,
        failing_nodes,
        samples_per_node,
    })
}

/// Any two unit vectors completing h to an orthonormal frame.
fn orthonormal_complement(h: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if h[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut u = add_scaled3(&pick, -dot3(&pick, h), h);
    let nu = norm3(&u);
    u = [u[0] / nu, u[1] / nu, u[2] / nu];
    let w = [
        h[1] * u[2] - h[2] * u[1],
        h[2] * u[0] - h[0] * u[2],
        h[0] * u[1] - h[1] * u[0],
    ];
    (u, w)
}

/// A boundary point with interior samples approaching it inside the cone
/// Gamma_kappa(x) along the inward normal.
#[derive(Clone, Debug)]
pub struct ConePoint {
    pub x: [f64; 3],
    pub kappa: f64,
    pub node: usize,
    pub heights: Vec<f64>,
    pub samples: Vec<[f64; 3]>,
}

/// Builds the sample ladder z_m = x - h_m nu(x) and verifies the cone
/// condition |z - x| < (1 + kappa) dist(z, boundary) for every sample.
pub fn cone_point(
    mesh: &BoundaryMesh,
    node: usize,
    kappa: f64,
    heights: &[f64],
) -> Result<ConePoint> {
    if node >= mesh.len() {
        return Err(Error::Domain(format!("node {node} outside mesh of {}", mesh.len())));
    }
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("cone aperture must be positive, got {kappa}")));
    }
    for w in heights.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Domain("cone heights must decrease strictly".into()));
        }
    }
    let x = mesh.nodes[node];
    let mut samples = Vec::with_capacity(heights.len());
    for &h in heights {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("cone height must be positive, got {h}")));
        }
        let z = mesh.offset(node, -h);
        let d = mesh.dist(&z);
        if !(h < (1.0 + kappa) * d) {
            return Err(Error::Domain(format!(
                "sample at height {h} leaves the cone: |z-x| = {h}, (1+kappa) dist = {}",
                (1.0 + kappa) * d
            )));
        }
        if !mesh.spec.contains(&z) {
            return Err(Error::Domain(format!("sample at height {h} is not interior")));
        }
        samples.push(z);
    }
    Ok(ConePoint { x, kappa, node, heights: heights.to_vec(), samples })
}
