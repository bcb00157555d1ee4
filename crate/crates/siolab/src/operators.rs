//! Discretized singular integral operators: boundary-to-domain potentials,
//! principal-value boundary operators via the subtraction formula, and
//! nontangential traces along the inward normal.
//!
//! The PV rule on curves is the alternate-point rule: node x_i pairs with
//! the nodes at odd parameter offsets, each carrying twice its weight. The
//! rule integrates trigonometric polynomials of degree < N/2 against the
//! periodic pole exactly, so it is spectrally accurate on analytic curves
//! and reproduces R_j 1 = x_j / 2 on the circle to roundoff.

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::geometry::{build_mesh, cone_point, BoundaryMesh, DomainSpec};
use crate::holder::{BoundaryField, FieldValues};
use crate::kernels::{
    cauchy_clifford_field, riesz_field, theta, unit_sphere_area, DoubleLayerField, KernelValue,
    PolyKernel, ValueKind,
};
use rayon::prelude::*;
use serde::Serialize;

/// Which component of the complement the operator lives on; the exterior
/// side flips the normal inside the kernel and the sign of the jump term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    /// Sign of the normal as seen by the kernel: the outward normal of the
    /// exterior domain is -nu.
    fn normal_sign(self) -> f64 {
        match self {
            Side::Interior => 1.0,
            Side::Exterior => -1.0,
        }
    }

    /// Sign of the theta/2 jump term in the subtraction formula: - for the
    /// bounded side, + for the exterior side.
    fn jump_sign(self) -> f64 {
        match self {
            Side::Interior => -1.0,
            Side::Exterior => 1.0,
        }
    }
}

/// Operator family. Riesz and polynomial kernels are scalar convolution
/// kernels without a normal factor; the double-layer and Cauchy-Clifford
/// kinds carry nu(y) inside the kernel and obey the theta jump calculus;
/// the single layer is the even fundamental-solution kernel.
#[derive(Clone, Debug)]
pub enum OperatorKind {
    Riesz { j: u32 },
    PolyKernel(PolyKernel),
    DoubleLayer(DoubleLayerField),
    CauchyClifford,
    SingleLayer,
}

/// An operator bound to a side of the boundary; `mesh_ref`, when set, pins
/// the spec to one mesh identity and is checked on every evaluation.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub side: Side,
    pub mesh_ref: Option<u64>,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, side: Side) -> Self {
        OperatorSpec { kind, side, mesh_ref: None }
    }

    /// Pin the spec to one mesh; evaluations against any other mesh fail.
    pub fn with_mesh(mut self, mesh: &BoundaryMesh) -> Self {
        self.mesh_ref = Some(mesh.id);
        self
    }

    fn check_mesh(&self, mesh: &BoundaryMesh) -> Result<()> {
        match self.mesh_ref {
            Some(id) if id != mesh.id => Err(Error::Incompatible(format!(
                "operator is pinned to mesh {id}, got mesh {}",
                mesh.id
            ))),
            _ => Ok(()),
        }
    }
}

/// Potential values on a point cloud off the boundary, with the distance
/// rho(x) = dist(x, boundary) recorded per point. `accuracy_warning` is set
/// when any point sits closer than two panel widths to the boundary.
#[derive(Clone, Debug)]
pub struct DomainField {
    pub points: Vec<[f64; 3]>,
    pub rho: Vec<f64>,
    pub values: FieldValues,
    pub gradient_values: Option<Vec<[f64; 3]>>,
    pub accuracy_warning: bool,
}

impl DomainField {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Scalar value at point i; panics on Clifford-valued fields.
    pub fn scalar(&self, i: usize) -> f64 {
        match &self.values {
            FieldValues::Scalar(v) => v[i],
            FieldValues::Clifford(_) => panic!("scalar() on a Clifford-valued domain field"),
        }
    }

    /// Clifford value at point i; panics on scalar fields.
    pub fn clifford(&self, i: usize) -> &Multivector {
        match &self.values {
            FieldValues::Clifford(v) => &v[i],
            FieldValues::Scalar(_) => panic!("clifford() on a scalar domain field"),
        }
    }

    pub fn gradient(&self, i: usize) -> [f64; 3] {
        self.gradient_values.as_ref().expect("gradient was not requested")[i]
    }
}

/// Kernel body resolved against a mesh: raw odd kernels take the
/// antisymmetrized quadrature directly, normal-bearing kernels take the
/// subtraction formula with the exact -+ theta/2 term.
enum PvBody {
    RawRiesz { field: DoubleLayerField, j: u32 },
    RawPoly(PolyKernel),
    Sub(DoubleLayerField),
}

struct PvSetup {
    body: PvBody,
    sigma: f64,
    /// Full multiplier of f(x_i): jump_sign * theta / 2; zero for raw kinds.
    jump: f64,
    theta: f64,
}

fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale3(a: &[f64; 3], c: f64) -> [f64; 3] {
    [c * a[0], c * a[1], c * a[2]]
}

fn norm3(a: &[f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn pv_setup(op: &OperatorSpec, mesh: &BoundaryMesh) -> Result<PvSetup> {
    let n = mesh.dim() as u32;
    let sigma = op.side.normal_sign();
    let (body, theta_val) = match &op.kind {
        OperatorKind::Riesz { j } => {
            if *j < 1 || *j > n {
                return Err(Error::Config(format!(
                    "riesz component {j} out of range for dimension {n}"
                )));
            }
            (PvBody::RawRiesz { field: riesz_field(n), j: *j }, 0.0)
        }
        OperatorKind::PolyKernel(pk) => {
            if pk.n() != n {
                return Err(Error::Incompatible(format!(
                    "kernel dimension {} does not match mesh dimension {n}",
                    pk.n()
                )));
            }
            (PvBody::RawPoly(pk.clone()), 0.0)
        }
        OperatorKind::DoubleLayer(field) => {
            if field.n() != n {
                return Err(Error::Incompatible(format!(
                    "field dimension {} does not match mesh dimension {n}",
                    field.n()
                )));
            }
            let th = theta(field, 64)?.scalar_part();
            (PvBody::Sub(field.clone()), th)
        }
        // theta = -1 exactly for the Cauchy-Clifford kernel; quadrature
        // would only blur the exact jump constant.
        OperatorKind::CauchyClifford => (PvBody::Sub(cauchy_clifford_field(n)), -1.0),
        OperatorKind::SingleLayer => {
            return Err(Error::Config(
                "single-layer kernel is even; it has no principal value".into(),
            ));
        }
    };
    if mesh.dim() == 2 && mesh.len() % 2 != 0 {
        return Err(Error::Config(format!(
            "alternate-point PV rule needs an even node count, got {}",
            mesh.len()
        )));
    }
    let jump = match body {
        PvBody::Sub(_) => op.side.jump_sign() * theta_val / 2.0,
        _ => 0.0,
    };
    Ok(PvSetup { body, sigma, jump, theta: theta_val })
}

/// True when the output of the node evaluation is a plain scalar.
fn pv_scalar_out(setup: &PvSetup, f: &BoundaryField) -> bool {
    if f.is_clifford() {
        return false;
    }
    match &setup.body {
        PvBody::RawRiesz { .. } | PvBody::RawPoly(_) => true,
        PvBody::Sub(field) => field.value_kind() == ValueKind::Scalar,
    }
}

/// Sum `2 w_j term(j)` over the nodes at odd parameter offset from i, in
/// symmetric (+s, -s) pair order so the pole cancellation happens inside
/// each addition. Exact for trigonometric degree < N/2.
fn alternate_sum(
    len: usize,
    i: usize,
    weights: &[f64],
    mut add: impl FnMut(usize, f64),
) {
    let half = len / 2;
    let mut s = 1;
    while s < half {
        let jp = (i + s) % len;
        let jm = (i + len - s) % len;
        add(jp, 2.0 * weights[jp]);
        add(jm, 2.0 * weights[jm]);
        s += 2;
    }
    if half % 2 == 1 {
        let j = (i + half) % len;
        add(j, 2.0 * weights[j]);
    }
}

/// Scalar-path PV value at node i.
fn pv_node_scalar(setup: &PvSetup, mesh: &BoundaryMesh, fv: &[f64], i: usize) -> f64 {
    let xi = &mesh.nodes[i];
    let term = |j: usize| -> f64 {
        let chi = sub3(xi, &mesh.nodes[j]);
        match &setup.body {
            PvBody::RawRiesz { field, j: comp } => field.component(*comp, &chi).scalar_part() * fv[j],
            PvBody::RawPoly(pk) => pk.eval(&chi) * fv[j],
            PvBody::Sub(field) => {
                let nu = scale3(&mesh.normals[j], setup.sigma);
                field.pair(&nu, &chi).scalar_part() * (fv[j] - fv[i])
            }
        }
    };
    let mut acc = 0.0;
    if mesh.dim() == 2 {
        // Pair sums are formed before touching the accumulator so the odd
        // part of the kernel cancels at full precision.
        let half = mesh.len() / 2;
        let mut s = 1;
        while s < half {
            let jp = (i + s) % mesh.len();
            let jm = (i + mesh.len() - s) % mesh.len();
            acc += 2.0 * mesh.weights[jp] * term(jp) + 2.0 * mesh.weights[jm] * term(jm);
            s += 2;
        }
        if half % 2 == 1 {
            let j = (i + half) % mesh.len();
            acc += 2.0 * mesh.weights[j] * term(j);
        }
    } else {
        // Product grids have no antipodal pairing; the subtracted integrand
        // is bounded, so plain diagonal omission converges.
        for j in 0..mesh.len() {
            if j != i {
                acc += mesh.weights[j] * term(j);
            }
        }
    }
    acc + setup.jump * fv[i]
}

/// Clifford-path PV value at node i; scalar inputs are promoted to scalar
/// multivectors so one path serves every kernel/value pairing.
fn pv_node_clifford(setup: &PvSetup, mesh: &BoundaryMesh, f: &BoundaryField, i: usize) -> Multivector {
    let n_alg = mesh.dim() as u32;
    let xi = &mesh.nodes[i];
    let term = |j: usize| -> Multivector {
        let chi = sub3(xi, &mesh.nodes[j]);
        match &setup.body {
            PvBody::RawRiesz { field, j: comp } => {
                let k = field.component(*comp, &chi).scalar_part();
                match &f.values {
                    FieldValues::Scalar(v) => Multivector::scalar(n_alg, k * v[j]),
                    FieldValues::Clifford(v) => v[j].scale(k),
                }
            }
            PvBody::RawPoly(pk) => {
                let k = pk.eval(&chi);
                match &f.values {
                    FieldValues::Scalar(v) => Multivector::scalar(n_alg, k * v[j]),
                    FieldValues::Clifford(v) => v[j].scale(k),
                }
            }
            PvBody::Sub(field) => {
                let nu = scale3(&mesh.normals[j], setup.sigma);
                match (field.pair(&nu, &chi), &f.values) {
                    (KernelValue::Scalar(k), FieldValues::Scalar(v)) => {
                        Multivector::scalar(n_alg, k * (v[j] - v[i]))
                    }
                    (KernelValue::Scalar(k), FieldValues::Clifford(v)) => {
                        (&v[j] - &v[i]).scale(k)
                    }
                    (KernelValue::Clifford(m), FieldValues::Scalar(v)) => m.scale(v[j] - v[i]),
                    (KernelValue::Clifford(m), FieldValues::Clifford(v)) => {
                        m.gproduct(&(&v[j] - &v[i]))
                    }
                }
            }
        }
    };
    let mut acc = Multivector::zero(n_alg);
    if mesh.dim() == 2 {
        alternate_sum(mesh.len(), i, &mesh.weights, |j, w| acc.accumulate(w, &term(j)));
    } else {
        for j in 0..mesh.len() {
            if j != i {
                acc.accumulate(mesh.weights[j], &term(j));
            }
        }
    }
    if setup.jump != 0.0 {
        match &f.values {
            FieldValues::Scalar(v) => {
                acc.accumulate(1.0, &Multivector::scalar(n_alg, setup.jump * v[i]))
            }
            FieldValues::Clifford(v) => acc.accumulate(setup.jump, &v[i]),
        }
    }
    acc
}

/// Principal-value boundary operator at every node of the mesh.
///
/// Normal-bearing kernels (double layer, Cauchy-Clifford) use the
/// subtraction formula: the bounded subtracted integrand is summed with the
/// singular node handled by the PV rule, and the exact
/// `jump_sign * theta/2 * f(x_i)` term is added. Raw odd kernels (Riesz,
/// polynomial) take the antisymmetrized quadrature with no jump term.
pub fn pv_boundary(op: &OperatorSpec, mesh: &BoundaryMesh, f: &BoundaryField) -> Result<BoundaryField> {
    op.check_mesh(mesh)?;
    f.check_mesh(mesh)?;
    let setup = pv_setup(op, mesh)?;
    if pv_scalar_out(&setup, f) {
        let fv = match &f.values {
            FieldValues::Scalar(v) => v,
            FieldValues::Clifford(_) => unreachable!(),
        };
        let values: Vec<f64> =
            (0..mesh.len()).into_par_iter().map(|i| pv_node_scalar(&setup, mesh, fv, i)).collect();
        BoundaryField::from_scalar(mesh, values)
    } else {
        let values: Vec<Multivector> =
            (0..mesh.len()).into_par_iter().map(|i| pv_node_clifford(&setup, mesh, f, i)).collect();
        BoundaryField::from_clifford(mesh, values)
    }
}

/// Fundamental solution of the Laplacian: (1/2pi) ln|x| on the plane,
/// -1/(varpi_2 |x|) in space.
fn fundamental_solution(n: u32, r: f64) -> f64 {
    match n {
        2 => r.ln() / (2.0 * std::f64::consts::PI),
        _ => -1.0 / (unit_sphere_area(n) * r),
    }
}

/// Boundary-to-domain potential on a cloud of off-boundary points.
///
/// Gradients are analytic kernel derivatives and are available for the
/// scalar-valued kinds with scalar densities; Clifford-valued potentials
/// carry no scalar gradient.
pub fn potential(
    op: &OperatorSpec,
    mesh: &BoundaryMesh,
    f: &BoundaryField,
    points: &[[f64; 3]],
    with_gradient: bool,
) -> Result<DomainField> {
    op.check_mesh(mesh)?;
    f.check_mesh(mesh)?;
    let n = mesh.dim() as u32;
    let sigma = op.side.normal_sign();
    // Validate the kind/mesh pairing and resolve the kernel once.
    enum Body {
        Single,
        Riesz(DoubleLayerField, u32),
        Poly(PolyKernel),
        Layer(DoubleLayerField, bool),
    }
    let body = match &op.kind {
        OperatorKind::SingleLayer => Body::Single,
        OperatorKind::Riesz { j } => {
            if *j < 1 || *j > n {
                return Err(Error::Config(format!(
                    "riesz component {j} out of range for dimension {n}"
                )));
            }
            Body::Riesz(riesz_field(n), *j)
        }
        OperatorKind::PolyKernel(pk) => {
            if pk.n() != n {
                return Err(Error::Incompatible(format!(
                    "kernel dimension {} does not match mesh dimension {n}",
                    pk.n()
                )));
            }
            Body::Poly(pk.clone())
        }
        OperatorKind::DoubleLayer(field) => {
            if field.n() != n {
                return Err(Error::Incompatible(format!(
                    "field dimension {} does not match mesh dimension {n}",
                    field.n()
                )));
            }
            Body::Layer(field.clone(), false)
        }
        OperatorKind::CauchyClifford => Body::Layer(cauchy_clifford_field(n), true),
    };
    let clifford_out = match &body {
        Body::Layer(field, with_density) => {
            field.value_kind() == ValueKind::Clifford || *with_density || f.is_clifford()
        }
        _ => f.is_clifford(),
    };
    if with_gradient {
        let scalar_kernel = matches!(&body, Body::Single | Body::Riesz(..) | Body::Poly(_))
            || matches!(&body, Body::Layer(field, false) if field.value_kind() == ValueKind::Scalar);
        if !scalar_kernel || f.is_clifford() {
            return Err(Error::Config(
                "gradients are available only for scalar kernels with scalar densities".into(),
            ));
        }
    }
    let mut rho = Vec::with_capacity(points.len());
    for x in points {
        let d = mesh.dist(x);
        if d <= 1e-12 * (1.0 + mesh.diam) {
            return Err(Error::Domain(format!(
                "evaluation point ({}, {}, {}) lies on the boundary",
                x[0], x[1], x[2]
            )));
        }
        let inside = mesh.spec.contains(x);
        match op.side {
            Side::Interior if !inside => {
                return Err(Error::Domain(format!(
                    "interior-side evaluation point ({}, {}, {}) is outside the domain",
                    x[0], x[1], x[2]
                )));
            }
            Side::Exterior if inside => {
                return Err(Error::Domain(format!(
                    "exterior-side evaluation point ({}, {}, {}) is inside the domain",
                    x[0], x[1], x[2]
                )));
            }
            _ => {}
        }
        rho.push(d);
    }
    let accuracy_warning = rho.iter().any(|&d| d < 2.0 * mesh.panel_h);

    let scalar_density = |j: usize| -> f64 {
        match &f.values {
            FieldValues::Scalar(v) => v[j],
            FieldValues::Clifford(_) => unreachable!(),
        }
    };
    let values = if clifford_out {
        let vals: Vec<Multivector> = points
            .par_iter()
            .map(|x| {
                let mut acc = Multivector::zero(n);
                for j in 0..mesh.len() {
                    let chi = sub3(x, &mesh.nodes[j]);
                    let w = mesh.weights[j];
                    match &body {
                        Body::Single => {
                            let e = fundamental_solution(n, norm3(&chi));
                            match &f.values {
                                FieldValues::Scalar(v) => {
                                    acc.accumulate(1.0, &Multivector::scalar(n, w * e * v[j]))
                                }
                                FieldValues::Clifford(v) => acc.accumulate(w * e, &v[j]),
                            }
                        }
                        Body::Riesz(field, comp) => {
                            let k = field.component(*comp, &chi).scalar_part();
                            match &f.values {
                                FieldValues::Scalar(v) => {
                                    acc.accumulate(1.0, &Multivector::scalar(n, w * k * v[j]))
                                }
                                FieldValues::Clifford(v) => acc.accumulate(w * k, &v[j]),
                            }
                        }
                        Body::Poly(pk) => {
                            let k = pk.eval(&chi);
                            match &f.values {
                                FieldValues::Scalar(v) => {
                                    acc.accumulate(1.0, &Multivector::scalar(n, w * k * v[j]))
                                }
                                FieldValues::Clifford(v) => acc.accumulate(w * k, &v[j]),
                            }
                        }
                        Body::Layer(field, _) => {
                            let nu = scale3(&mesh.normals[j], sigma);
                            match (field.pair(&nu, &chi), &f.values) {
                                (KernelValue::Scalar(k), FieldValues::Scalar(v)) => {
                                    acc.accumulate(1.0, &Multivector::scalar(n, w * k * v[j]))
                                }
                                (KernelValue::Scalar(k), FieldValues::Clifford(v)) => {
                                    acc.accumulate(w * k, &v[j])
                                }
                                (KernelValue::Clifford(m), FieldValues::Scalar(v)) => {
                                    acc.accumulate(w * v[j], &m)
                                }
                                (KernelValue::Clifford(m), FieldValues::Clifford(v)) => {
                                    acc.accumulate(w, &m.gproduct(&v[j]))
                                }
                            }
                        }
                    }
                }
                acc
            })
            .collect();
        FieldValues::Clifford(vals)
    } else {
        let vals: Vec<f64> = points
            .par_iter()
            .map(|x| {
                let mut acc = 0.0;
                for j in 0..mesh.len() {
                    let chi = sub3(x, &mesh.nodes[j]);
                    let w = mesh.weights[j];
                    let k = match &body {
                        Body::Single => fundamental_solution(n, norm3(&chi)),
                        Body::Riesz(field, comp) => field.component(*comp, &chi).scalar_part(),
                        Body::Poly(pk) => pk.eval(&chi),
                        Body::Layer(field, _) => {
                            let nu = scale3(&mesh.normals[j], sigma);
                            field.pair(&nu, &chi).scalar_part()
                        }
                    };
                    acc += w * k * scalar_density(j);
                }
                acc
            })
            .collect();
        FieldValues::Scalar(vals)
    };

    let gradient_values = if with_gradient {
        let grads: Vec<[f64; 3]> = points
            .par_iter()
            .map(|x| {
                let mut g = [0.0; 3];
                for j in 0..mesh.len() {
                    let chi = sub3(x, &mesh.nodes[j]);
                    let wf = mesh.weights[j] * scalar_density(j);
                    match &body {
                        Body::Single => {
                            // grad E(chi) = chi / (varpi |chi|^n).
                            let r = norm3(&chi);
                            let c = wf / (unit_sphere_area(n) * r.powi(n as i32));
                            for a in 0..n as usize {
                                g[a] += c * chi[a];
                            }
                        }
                        Body::Riesz(field, comp) => {
                            for a in 1..=n {
                                g[a as usize - 1] +=
                                    wf * field.component_deriv(*comp, a, &chi).unwrap();
                            }
                        }
                        Body::Poly(pk) => {
                            let gk = pk.grad(&chi);
                            for a in 0..3 {
                                g[a] += wf * gk[a];
                            }
                        }
                        Body::Layer(field, _) => {
                            let nu = scale3(&mesh.normals[j], sigma);
                            for a in 1..=n {
                                let mut da = 0.0;
                                for c in 1..=n {
                                    da += nu[c as usize - 1]
                                        * field.component_deriv(c, a, &chi).unwrap();
                                }
                                g[a as usize - 1] += wf * da;
                            }
                        }
                    }
                }
                g
            })
            .collect();
        Some(grads)
    } else {
        None
    };

    Ok(DomainField { points: points.to_vec(), rho, values, gradient_values, accuracy_warning })
}

/// Riesz transforms recovered from one Cauchy-Clifford evaluation: the
/// vector part of C nu is -(R_1 1, ..., R_n 1); whatever lands outside the
/// vector grade measures blade bookkeeping error.
pub struct RieszCliffordReport {
    /// Component j (1-based at index j-1): the recovered R_j 1.
    pub components: Vec<BoundaryField>,
    /// Sup of |scalar part| of C nu over nodes.
    pub scalar_residual: f64,
    /// Sup over nodes of the largest coefficient of grade >= 2.
    pub blade_residual: f64,
}

pub fn riesz_via_clifford(mesh: &BoundaryMesh) -> Result<RieszCliffordReport> {
    let n = mesh.dim();
    let op = OperatorSpec::new(OperatorKind::CauchyClifford, Side::Interior);
    let nu = crate::holder::normal_field(mesh);
    let cnu = pv_boundary(&op, mesh, &nu)?;
    let values = match &cnu.values {
        FieldValues::Clifford(v) => v,
        FieldValues::Scalar(_) => unreachable!(),
    };
    let mut comps = vec![vec![0.0; mesh.len()]; n];
    let mut scalar_residual = 0.0f64;
    let mut blade_residual = 0.0f64;
    for (i, m) in values.iter().enumerate() {
        scalar_residual = scalar_residual.max(m.scalar_part().abs());
        let vec_part = m.vector_part();
        for j in 0..n {
            comps[j][i] = -vec_part[j];
        }
        let mut high = m.clone();
        high.accumulate(-1.0, &m.grade_part(0));
        high.accumulate(-1.0, &m.grade_part(1));
        blade_residual = blade_residual.max(high.max_abs());
    }
    let components = comps
        .into_iter()
        .map(|v| BoundaryField::from_scalar(mesh, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(RieszCliffordReport { components, scalar_residual, blade_residual })
}

/// One rung of a nontangential approach ladder.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    /// Height above the boundary along the normal.
    pub h: f64,
    /// Node count of the mesh tied to this height.
    pub resolution: usize,
    /// Potential value at the cone sample (multivector coefficients for
    /// Clifford-valued operators, a single entry for scalar ones).
    pub value: Vec<f64>,
    /// Sup-distance to this rung's boundary trace target.
    pub residual: f64,
}

/// Nontangential trace ladder report: per-height values, the trace-formula
/// target -(theta/2) f + (pv f) on the finest mesh, and the Richardson
/// limit estimate.
#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub rows: Vec<TraceRow>,
    pub target: Vec<f64>,
    pub extrapolated: Vec<f64>,
    /// Sup-distance of the extrapolated limit from the target.
    pub residual: f64,
    /// Observed geometric ratio of successive differences; 0 when the rows
    /// already sit at roundoff.
    pub rate: f64,
    pub unstable: bool,
}

fn linf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Smallest mesh (from doubling) whose panels resolve height h four times
/// over, so the near-boundary quadrature error stays a fixed contraction.
fn tied_mesh(domain: &DomainSpec, h: f64) -> Result<BoundaryMesh> {
    let mut n = 32usize;
    loop {
        let mesh = build_mesh(domain, n)?;
        if mesh.panel_h <= h / 4.0 {
            return Ok(mesh);
        }
        n *= 2;
        if n > (1 << 21) {
            return Err(Error::Budget(format!(
                "tied ladder mesh would exceed 2^21 nodes for h = {h}"
            )));
        }
    }
}

/// Approach the boundary at the node-0 point of `domain` along the normal,
/// inside the cone Gamma_kappa, with the mesh refined in lockstep with the
/// height. Interior side descends along -nu, exterior along +nu; both
/// converge to -(theta/2) f + (pv f) at the point.
pub fn nontangential_trace(
    op: &OperatorSpec,
    domain: &DomainSpec,
    f: &(dyn Fn(&[f64; 3]) -> f64 + Sync),
    kappa: f64,
    heights: &[f64],
) -> Result<TraceReport> {
    if heights.is_empty() {
        return Err(Error::Config("trace ladder needs at least one height".into()));
    }
    for w in heights.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Config("trace heights must decrease strictly".into()));
        }
    }
    match &op.kind {
        OperatorKind::DoubleLayer(_) | OperatorKind::CauchyClifford => {}
        _ => {
            return Err(Error::Config(
                "nontangential trace needs a double-layer or Cauchy-Clifford operator".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(heights.len());
    let mut target = Vec::new();
    for &h in heights {
        let mesh = tied_mesh(domain, h)?;
        let setup = pv_setup(op, &mesh)?;
        let fm = BoundaryField::from_fn(&mesh, |x| f(x));
        let z = match op.side {
            Side::Interior => cone_point(&mesh, 0, kappa, &[h])?.samples[0],
            Side::Exterior => {
                let z = mesh.offset(0, h);
                let d = mesh.dist(&z);
                if mesh.spec.contains(&z) || !(h < (1.0 + kappa) * d) {
                    return Err(Error::Domain(format!(
                        "exterior sample at height {h} leaves the cone"
                    )));
                }
                z
            }
        };
        let field = potential(op, &mesh, &fm, &[z], false)?;
        let value: Vec<f64> = match &field.values {
            FieldValues::Scalar(v) => vec![v[0]],
            FieldValues::Clifford(v) => v[0].coeffs().to_vec(),
        };
        // Trace formula at the node: the Gauss flux seen from the far side
        // is zero, so the limit is -(theta/2) f + (pv f) on both sides.
        let x0 = mesh.nodes[0];
        let f0 = f(&x0);
        let mut tgt: Vec<f64> = if pv_scalar_out(&setup, &fm) {
            let fv = match &fm.values {
                FieldValues::Scalar(v) => v,
                FieldValues::Clifford(_) => unreachable!(),
            };
            vec![pv_node_scalar(&setup, &mesh, fv, 0)]
        } else {
            pv_node_clifford(&setup, &mesh, &fm, 0).coeffs().to_vec()
        };
        tgt[0] += -setup.theta / 2.0 * f0;
        let residual = linf_diff(&value, &tgt);
        rows.push(TraceRow { h, resolution: mesh.len(), value, residual });
        target = tgt;
    }
    // Richardson extrapolation from the last geometric difference ratio.
    let last = rows.last().unwrap().value.clone();
    let scale = 1.0 + last.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let diffs: Vec<f64> =
        (1..rows.len()).map(|k| linf_diff(&rows[k].value, &rows[k - 1].value)).collect();
    let (extrapolated, rate, unstable) = if !diffs.is_empty() && diffs[diffs.len() - 1] <= 1e-13 * scale
    {
        (last.clone(), 0.0, false)
    } else if diffs.len() < 2 {
        (last.clone(), 0.0, true)
    } else {
        let q = diffs[diffs.len() - 1] / diffs[diffs.len() - 2];
        if q > 0.0 && q < 0.9 {
            let prev = &rows[rows.len() - 2].value;
            let ext: Vec<f64> = last
                .iter()
                .zip(prev)
                .map(|(v, p)| v + q / (1.0 - q) * (v - p))
                .collect();
            (ext, q, false)
        } else {
            (last.clone(), q, true)
        }
    };
    let residual = linf_diff(&extrapolated, &target);
    Ok(TraceReport { rows, target, extrapolated, residual, rate, unstable })
}

/// Residual report for the identity grad(S 1) = -(vector part of C nu).
#[derive(Clone, Debug, Serialize)]
pub struct GradientIdentityReport {
    pub probes: usize,
    pub max_residual: f64,
}

/// Check grad(S 1) + vec(C nu) = 0 over interior probes obtained by
/// shrinking boundary nodes toward the origin, keeping dist >= rho_min.
/// Discretely both sides are the same quadrature sum with opposite signs,
/// so the residual is pure roundoff on any mesh.
pub fn single_layer_gradient_identity(mesh: &BoundaryMesh, rho_min: f64) -> Result<GradientIdentityReport> {
    let n = mesh.dim();
    let stride = (mesh.len() / 16).max(1);
    let mut probes = Vec::new();
    for s in [0.75, 0.6, 0.45, 0.3, 0.15] {
        for i in (0..mesh.len()).step_by(stride) {
            let x = scale3(&mesh.nodes[i], s);
            if mesh.spec.contains(&x) && mesh.dist(&x) >= rho_min {
                probes.push(x);
            }
        }
    }
    if probes.is_empty() {
        return Err(Error::Domain(format!(
            "no probes survive the rho >= {rho_min} filter"
        )));
    }
    let one = BoundaryField::constant(mesh, 1.0);
    let single = OperatorSpec::new(OperatorKind::SingleLayer, Side::Interior);
    let grad_s = potential(&single, mesh, &one, &probes, true)?;
    let cauchy = OperatorSpec::new(OperatorKind::CauchyClifford, Side::Interior);
    let nu = crate::holder::normal_field(mesh);
    let cnu = potential(&cauchy, mesh, &nu, &probes, false)?;
    let mut max_residual = 0.0f64;
    for i in 0..probes.len() {
        let g = grad_s.gradient(i);
        let v = cnu.clifford(i).vector_part();
        let mut r2 = 0.0;
        for a in 0..n {
            let d = g[a] + v[a];
            r2 += d * d;
        }
        max_residual = max_residual.max(r2.sqrt());
    }
    Ok(GradientIdentityReport { probes: probes.len(), max_residual })
}

/// Sup-norm residual of the involution C(C f) = f / 4 over mesh nodes.
pub fn clifford_involution_check(mesh: &BoundaryMesh, f: &BoundaryField) -> Result<f64> {
    let op = OperatorSpec::new(OperatorKind::CauchyClifford, Side::Interior);
    let once = pv_boundary(&op, mesh, f)?;
    let twice = pv_boundary(&op, mesh, &once)?;
    let values = match &twice.values {
        FieldValues::Clifford(v) => v,
        FieldValues::Scalar(_) => unreachable!(),
    };
    let n_alg = mesh.dim() as u32;
    let mut sup = 0.0f64;
    for i in 0..mesh.len() {
        let target = match &f.values {
            FieldValues::Scalar(v) => Multivector::scalar(n_alg, v[i] / 4.0),
            FieldValues::Clifford(v) => v[i].scale(0.25),
        };
        sup = sup.max((&values[i] - &target).max_abs());
    }
    Ok(sup)
}
