//! Generalized Holder seminorms [u] = sup |u(x)-u(y)| / omega~(|x-y|) for
//! sampled boundary fields, with the modulus-of-continuity fixtures that
//! separate C^alpha from C^omega.
//!
//! All reported seminorms are grid maxima, hence lower bounds of the true
//! supremum.

use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::geometry::{norm3, sub3, BoundaryMesh};
use crate::growth::GrowthFunction;

/// Sample values attached to a mesh, scalar or Clifford-valued.
#[derive(Clone, Debug)]
pub enum FieldValues {
    Scalar(Vec<f64>),
    Clifford(Vec<Multivector>),
}

/// A function sampled at the nodes of one specific mesh; `mesh_ref` ties the
/// samples to the mesh identity they were built from.
#[derive(Clone, Debug)]
pub struct BoundaryField {
    pub mesh_ref: u64,
    pub values: FieldValues,
}

impl BoundaryField {
    pub fn constant(mesh: &BoundaryMesh, value: f64) -> Self {
        BoundaryField {
            mesh_ref: mesh.id,
            values: FieldValues::Scalar(vec![value; mesh.len()]),
        }
    }

    pub fn from_scalar(mesh: &BoundaryMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::Incompatible(format!(
                "field has {} values for a {}-node mesh",
                values.len(),
                mesh.len()
            )));
        }
        Ok(BoundaryField { mesh_ref: mesh.id, values: FieldValues::Scalar(values) })
    }

    pub fn from_clifford(mesh: &BoundaryMesh, values: Vec<Multivector>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::Incompatible(format!(
                "field has {} values for a {}-node mesh",
                values.len(),
                mesh.len()
            )));
        }
        Ok(BoundaryField { mesh_ref: mesh.id, values: FieldValues::Clifford(values) })
    }

    pub fn from_fn(mesh: &BoundaryMesh, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        BoundaryField {
            mesh_ref: mesh.id,
            values: FieldValues::Scalar(mesh.nodes.iter().map(f).collect()),
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            FieldValues::Scalar(v) => v.len(),
            FieldValues::Clifford(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_clifford(&self) -> bool {
        matches!(self.values, FieldValues::Clifford(_))
    }

    /// Scalar sample i; the scalar part for Clifford-valued fields.
    pub fn scalar(&self, i: usize) -> f64 {
        match &self.values {
            FieldValues::Scalar(v) => v[i],
            FieldValues::Clifford(v) => v[i].scalar_part(),
        }
    }

    /// |f(i) - f(j)| in the value metric: absolute value for scalars, the
    /// Euclidean coefficient norm for multivectors.
    pub fn delta(&self, i: usize, j: usize) -> f64 {
        match &self.values {
            FieldValues::Scalar(v) => (v[i] - v[j]).abs(),
            FieldValues::Clifford(v) => (&v[i] - &v[j]).norm(),
        }
    }

    /// |f(i)|.
    pub fn magnitude(&self, i: usize) -> f64 {
        match &self.values {
            FieldValues::Scalar(v) => v[i].abs(),
            FieldValues::Clifford(v) => v[i].norm(),
        }
    }

    pub fn check_mesh(&self, mesh: &BoundaryMesh) -> Result<()> {
        if self.mesh_ref != mesh.id {
            return Err(Error::Incompatible(
                "field was sampled on a different mesh than the one supplied".into(),
            ));
        }
        if self.len() != mesh.len() {
            return Err(Error::Incompatible(format!(
                "field has {} values for a {}-node mesh",
                self.len(),
                mesh.len()
            )));
        }
        Ok(())
    }
}

/// Pair-sampling policy for the seminorm scan.
#[derive(Clone, Copy, Debug)]
pub enum PairPolicy {
    /// All pairs up to 4096 nodes, stratified beyond.
    Auto,
    AllPairs,
    /// Dyadic distance annuli with the given per-annulus pair cap, plus all
    /// nearest-neighbor pairs.
    Stratified { per_annulus: usize },
}

const AUTO_ALL_PAIRS_LIMIT: usize = 4096;
const AUTO_ANNULUS_CAP: usize = 100_000;

/// Seminorm, sup norm, and their sum for one field against one growth
/// function.
#[derive(Clone, Debug, Serialize)]
pub struct HolderReport {
    pub seminorm: f64,
    pub sup_norm: f64,
    /// sup_norm + seminorm.
    pub norm: f64,
    pub argmax_pair: Option<(usize, usize)>,
    pub pair_budget: String,
    pub pairs_evaluated: usize,
}

/// Enumerates the sampled pairs (i, j, |y_i - y_j|) for the policy, in a
/// deterministic order. Returns the budget description and pair count.
fn scan_pairs(
    mesh: &BoundaryMesh,
    policy: PairPolicy,
    mut visit: impl FnMut(usize, usize, f64),
) -> (String, usize) {
    let n = mesh.len();
    let all = match policy {
        PairPolicy::AllPairs => true,
        PairPolicy::Auto => n <= AUTO_ALL_PAIRS_LIMIT,
        PairPolicy::Stratified { .. } => false,
    };
    let mut count = 0usize;
    if all {
        for i in 0..n {
            for j in (i + 1)..n {
                let d = norm3(&sub3(&mesh.nodes[i], &mesh.nodes[j]));
                if d > 0.0 {
                    visit(i, j, d);
                    count += 1;
                }
            }
        }
        return ("all-pairs".into(), count);
    }
    let cap = match policy {
        PairPolicy::Stratified { per_annulus } => per_annulus,
        _ => AUTO_ANNULUS_CAP,
    };
    // Nearest neighbors first: extremes at small distance live here.
    for i in 0..n {
        let j = (i + 1) % n;
        let d = norm3(&sub3(&mesh.nodes[i], &mesh.nodes[j]));
        if d > 0.0 {
            visit(i.min(j), i.max(j), d);
            count += 1;
        }
    }
    let annuli = ((mesh.diam / mesh.panel_h).log2().ceil() as usize + 2).max(2);
    let mut filled = vec![0usize; annuli];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = norm3(&sub3(&mesh.nodes[i], &mesh.nodes[j]));
            if !(d > 0.0) {
                continue;
            }
            let m = ((mesh.diam / d).log2().floor() as isize).clamp(0, annuli as isize - 1)
                as usize;
            if filled[m] < cap {
                filled[m] += 1;
                visit(i, j, d);
                count += 1;
            }
        }
    }
    (
        format!("dyadic annuli, cap {cap} pairs per annulus, plus nearest neighbors"),
        count,
    )
}

/// Grid maximum of |f(x)-f(y)| / omega~(|x-y|) together with the norm
/// bookkeeping. The growth function is extended automatically.
pub fn seminorm(
    mesh: &BoundaryMesh,
    field: &BoundaryField,
    g: &GrowthFunction,
    policy: PairPolicy,
) -> Result<HolderReport> {
    field.check_mesh(mesh)?;
    let mut sup = 0.0f64;
    for i in 0..field.len() {
        sup = sup.max(field.magnitude(i));
    }
    if field.len() < 2 {
        // Singleton domains have seminorm zero by definition.
        return Ok(HolderReport {
            seminorm: 0.0,
            sup_norm: sup,
            norm: sup,
            argmax_pair: None,
            pair_budget: "singleton".into(),
            pairs_evaluated: 0,
        });
    }
    let ext = g.extend();
    let mut best = 0.0f64;
    let mut argmax = None;
    let mut failure: Option<Error> = None;
    let (budget, pairs) = scan_pairs(mesh, policy, |i, j, d| {
        if failure.is_some() {
            return;
        }
        let dv = field.delta(i, j);
        match ext.eval(d) {
            Ok(w) => {
                let ratio = dv / w;
                if ratio > best {
                    best = ratio;
                    argmax = Some((i, j));
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(HolderReport {
        seminorm: best,
        sup_norm: sup,
        norm: sup + best,
        argmax_pair: argmax,
        pair_budget: budget,
        pairs_evaluated: pairs,
    })
}

/// Checks the submultiplicative norm inequality |fg| <= |f| |g| on computed
/// norms. Scalar fields only.
pub fn product_norm_check(
    mesh: &BoundaryMesh,
    f: &BoundaryField,
    g: &BoundaryField,
    gf: &GrowthFunction,
) -> Result<bool> {
    f.check_mesh(mesh)?;
    g.check_mesh(mesh)?;
    let (fv, gv) = match (&f.values, &g.values) {
        (FieldValues::Scalar(a), FieldValues::Scalar(b)) => (a, b),
        _ => {
            return Err(Error::Incompatible(
                "product_norm_check needs scalar fields".into(),
            ))
        }
    };
    let product = BoundaryField {
        mesh_ref: f.mesh_ref,
        values: FieldValues::Scalar(fv.iter().zip(gv).map(|(a, b)| a * b).collect()),
    };
    let nf = seminorm(mesh, f, gf, PairPolicy::Auto)?.norm;
    let ng = seminorm(mesh, g, gf, PairPolicy::Auto)?.norm;
    let nfg = seminorm(mesh, &product, gf, PairPolicy::Auto)?.norm;
    Ok(nfg <= nf * ng * (1.0 + 1e-12))
}

/// One dyadic distance bin of the empirical modulus of continuity.
#[derive(Clone, Debug, Serialize)]
pub struct ModulusBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub max_delta: f64,
}

/// Per-bin maxima of |f(x)-f(y)| over dyadic distance bins
/// (diam 2^{-m-1}, diam 2^{-m}]. Empty bins are omitted.
pub fn modulus_profile(
    mesh: &BoundaryMesh,
    field: &BoundaryField,
    n_bins: usize,
) -> Result<Vec<ModulusBin>> {
    field.check_mesh(mesh)?;
    if field.len() < 2 {
        return Err(Error::Domain("modulus profile needs at least two nodes".into()));
    }
    if n_bins == 0 {
        return Err(Error::Domain("modulus profile needs at least one bin".into()));
    }
    let mut maxima = vec![f64::NEG_INFINITY; n_bins];
    scan_pairs(mesh, PairPolicy::Auto, |i, j, d| {
        // Chords can exceed the tabulated diameter by rounding; clamp into
        // the top bin.
        let m = ((mesh.diam / d).log2().floor() as isize).max(0);
        if m < n_bins as isize {
            let m = m as usize;
            maxima[m] = maxima[m].max(field.delta(i, j));
        }
    });
    Ok(maxima
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(m, &v)| ModulusBin {
            bin_lo: mesh.diam * 2f64.powi(-(m as i32) - 1),
            bin_hi: mesh.diam * 2f64.powi(-(m as i32)),
            max_delta: v,
        })
        .collect())
}

/// Writes a modulus profile as CSV with columns bin_lo, bin_hi, max_delta.
pub fn write_modulus_csv(rows: &[ModulusBin], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["bin_lo", "bin_hi", "max_delta"])?;
    for r in rows {
        w.write_record(&[
            format!("{:.17e}", r.bin_lo),
            format!("{:.17e}", r.bin_hi),
            format!("{:.17e}", r.max_delta),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The growth-function fixture field f(y) = omega~(|y - z|) centered at a
/// mesh node. For subadditive omega its seminorm against omega~ is at
/// most 1.
pub fn fixture_omega_distance(
    mesh: &BoundaryMesh,
    center: usize,
    g: &GrowthFunction,
) -> Result<BoundaryField> {
    if center >= mesh.len() {
        return Err(Error::Domain(format!(
            "center node {center} outside mesh of {}",
            mesh.len()
        )));
    }
    let ext = g.extend();
    let z = mesh.nodes[center];
    let values: Vec<f64> = mesh
        .nodes
        .par_iter()
        .map(|y| {
            let d = norm3(&sub3(y, &z));
            if d > 0.0 {
                ext.eval(d).unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(BoundaryField { mesh_ref: mesh.id, values: FieldValues::Scalar(values) })
}

/// The power fixture f(y) = |y - z|^{alpha - eps}, in C^{alpha-eps} but not
/// in C^omega for the log-corrected omega.
pub fn fixture_power_distance(
    mesh: &BoundaryMesh,
    center: usize,
    exponent: f64,
) -> Result<BoundaryField> {
    if center >= mesh.len() {
        return Err(Error::Domain(format!(
            "center node {center} outside mesh of {}",
            mesh.len()
        )));
    }
    if !(exponent > 0.0) {
        return Err(Error::Domain(format!("exponent must be positive, got {exponent}")));
    }
    let z = mesh.nodes[center];
    let values: Vec<f64> =
        mesh.nodes.iter().map(|y| norm3(&sub3(y, &z)).powf(exponent)).collect();
    Ok(BoundaryField { mesh_ref: mesh.id, values: FieldValues::Scalar(values) })
}

/// The outward normal as a Clifford vector field; its modulus profile
/// detects the teardrop's corner jump.
pub fn normal_field(mesh: &BoundaryMesh) -> BoundaryField {
    let n = mesh.dim() as u32;
    let values: Vec<Multivector> = mesh
        .normals
        .iter()
        .map(|nu| Multivector::embed(&nu[..mesh.dim()]))
        .collect();
    debug_assert!(values.iter().all(|v| v.dim() == n));
    BoundaryField { mesh_ref: mesh.id, values: FieldValues::Clifford(values) }
}
