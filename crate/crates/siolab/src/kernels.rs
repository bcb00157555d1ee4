//! Kernels behind the operator family: Riesz components, odd homogeneous
//! polynomial kernels P(x)/|x|^{n-1+l}, the planar Cauchy field, the
//! Cauchy-Clifford kernel, the divergence integral theta, and harmonic
//! decomposition of odd polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
///
/// ```
/// let w1 = siolab::kernels::unit_sphere_area(2);
/// assert!((w1 - 2.0 * std::f64::consts::PI).abs() < 1e-14);
/// ```
pub fn unit_sphere_area(n: u32) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    2.0 * std::f64::consts::PI.powf(f64::from(n) / 2.0) / gamma_half(n)
}

/// Gamma(n/2) by the half-integer recursion; exact for the small n used here.
fn gamma_half(n: u32) -> f64 {
    match n {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (f64::from(n) / 2.0 - 1.0) * gamma_half(n - 2),
    }
}

fn norm_n(n: u32, x: &[f64; 3]) -> f64 {
    x[..n as usize].iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dot_n(n: u32, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[..n as usize]
        .iter()
        .zip(&b[..n as usize])
        .map(|(p, q)| p * q)
        .sum()
}

/// Real polynomial in up to three variables as a dense exponent map.
///
/// Keys are (x, y, z) exponent triples; zero coefficients are never stored,
/// so map equality is polynomial equality and iteration order is canonical.
///
/// ```
/// use siolab::kernels::Poly;
/// let p = Poly::parse("x^3 - 3*x*y^2").unwrap();
/// assert_eq!(p.homogeneous_degree(), Some(3));
/// assert!((p.eval(&[2.0, 1.0, 0.0]) - 2.0).abs() < 1e-15);
/// ```
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<[u8; 3], f64>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly::default()
    }

    /// Build from (exponents, coefficient) pairs; repeated keys accumulate.
    pub fn from_terms<I: IntoIterator<Item = ([u8; 3], f64)>>(items: I) -> Self {
        let mut terms: BTreeMap<[u8; 3], f64> = BTreeMap::new();
        for (e, c) in items {
            *terms.entry(e).or_insert(0.0) += c;
        }
        terms.retain(|_, c| *c != 0.0);
        Poly { terms }
    }

    /// Parse a polynomial literal: monomials in x, y, z with integer powers
    /// and rational or decimal coefficients, e.g. `"x^3 - 3*x*y^2"`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_poly(text)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Term iterator in canonical (lexicographic exponent) order.
    pub fn terms(&self) -> impl Iterator<Item = ([u8; 3], f64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn coeff(&self, exps: [u8; 3]) -> f64 {
        self.terms.get(&exps).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * x[0].powi(i32::from(e[0]))
                    * x[1].powi(i32::from(e[1]))
                    * x[2].powi(i32::from(e[2]))
            })
            .sum()
    }

    /// Partial derivative along the given axis (0, 1, or 2).
    pub fn deriv(&self, axis: usize) -> Poly {
        assert!(axis < 3, "axis out of range");
        Poly::from_terms(self.terms.iter().filter(|(e, _)| e[axis] > 0).map(|(e, c)| {
            let mut d = *e;
            d[axis] -= 1;
            (d, c * f64::from(e[axis]))
        }))
    }

    /// Sum of second partials over all three axes; axes a polynomial does
    /// not use contribute zero, so this is the Laplacian in any valid n.
    pub fn laplacian(&self) -> Poly {
        let mut out = Poly::zero();
        for axis in 0..3 {
            out = out.add(&self.deriv(axis).deriv(axis));
        }
        out
    }

    pub fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        [
            self.deriv(0).eval(x),
            self.deriv(1).eval(x),
            self.deriv(2).eval(x),
        ]
    }

    /// Multiply by |x|^2 = x^2 + y^2 (+ z^2 when n = 3).
    pub fn mul_r2(&self, n: u32) -> Poly {
        assert!((2..=3).contains(&n), "dimension must be 2 or 3");
        let mut items = Vec::new();
        for (e, c) in &self.terms {
            for axis in 0..n as usize {
                let mut u = *e;
                u[axis] += 2;
                items.push((u, *c));
            }
        }
        Poly::from_terms(items)
    }

    pub fn scaled(&self, c: f64) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(e, v)| (*e, v * c)))
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        Poly::from_terms(self.terms().chain(rhs.terms()))
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.scaled(-1.0))
    }

    /// Common total degree of all monomials; None for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self
            .terms
            .keys()
            .map(|e| u32::from(e[0]) + u32::from(e[1]) + u32::from(e[2]));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Number of leading variables in use (2 if y is the last, 3 if z appears).
    pub fn var_count(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| {
                if e[2] > 0 {
                    3
                } else if e[1] > 0 {
                    2
                } else if e[0] > 0 {
                    1
                } else {
                    0
                }
            })
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drop coefficients at or below `tol` in magnitude.
    fn pruned(mut self, tol: f64) -> Poly {
        self.terms.retain(|_, c| c.abs() > tol);
        self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Reverse map order puts x-dominant monomials first.
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
            } else if *c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = ["x", "y", "z"]
                .iter()
                .zip(e)
                .filter(|(_, k)| **k > 0)
                .map(|(v, k)| if *k == 1 { (*v).to_string() } else { format!("{v}^{k}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Poly::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Pow,
    Mul,
    Div,
    Plus,
    Minus,
}

fn tokenize_poly(text: &str) -> Result<Vec<Tok>> {
    let bad = |c: char| Error::Config(format!("polynomial literal: unexpected character '{c}'"));
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '0'..='9' | '.' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::Config(format!("polynomial literal: bad number '{s}'")))?;
                toks.push(Tok::Num(v));
            }
            'x' => {
                toks.push(Tok::Var(0));
                chars.next();
            }
            'y' => {
                toks.push(Tok::Var(1));
                chars.next();
            }
            'z' => {
                toks.push(Tok::Var(2));
                chars.next();
            }
            '^' => {
                toks.push(Tok::Pow);
                chars.next();
            }
            '*' => {
                toks.push(Tok::Mul);
                chars.next();
            }
            '/' => {
                toks.push(Tok::Div);
                chars.next();
            }
            '+' => {
                toks.push(Tok::Plus);
                chars.next();
            }
            '-' => {
                toks.push(Tok::Minus);
                chars.next();
            }
            other => return Err(bad(other)),
        }
    }
    Ok(toks)
}

fn parse_poly(text: &str) -> Result<Poly> {
    let toks = tokenize_poly(text)?;
    if toks.is_empty() {
        return Err(Error::Config("polynomial literal: empty".into()));
    }
    let fail = |msg: &str| Error::Config(format!("polynomial literal: {msg}"));
    let mut items: Vec<([u8; 3], f64)> = Vec::new();
    let mut i = 0usize;
    while i < toks.len() {
        let mut coeff = 1.0f64;
        match toks[i] {
            Tok::Plus => i += 1,
            Tok::Minus => {
                coeff = -1.0;
                i += 1;
            }
            _ if items.is_empty() => {}
            _ => return Err(fail("terms must be separated by + or -")),
        }
        let mut exps = [0u8; 3];
        let mut factors = 0usize;
        loop {
            match toks.get(i) {
                Some(Tok::Num(v)) => {
                    i += 1;
                    let mut v = *v;
                    if toks.get(i) == Some(&Tok::Div) {
                        match toks.get(i + 1) {
                            Some(Tok::Num(d)) if *d != 0.0 => {
                                v /= d;
                                i += 2;
                            }
                            _ => return Err(fail("bad rational coefficient")),
                        }
                    }
                    coeff *= v;
                    factors += 1;
                }
                Some(Tok::Var(axis)) => {
                    let axis = *axis;
                    i += 1;
                    let mut e = 1u32;
                    if toks.get(i) == Some(&Tok::Pow) {
                        match toks.get(i + 1) {
                            Some(Tok::Num(p)) if p.fract() == 0.0 && *p >= 0.0 && *p <= 30.0 => {
                                e = *p as u32;
                                i += 2;
                            }
                            _ => return Err(fail("exponent must be an integer in 0..=30")),
                        }
                    }
                    let total = u32::from(exps[axis]) + e;
                    if total > 30 {
                        return Err(fail("exponent must be an integer in 0..=30"));
                    }
                    exps[axis] = total as u8;
                    factors += 1;
                }
                _ => break,
            }
            // A factor may be followed by an explicit '*' or by juxtaposition.
            if toks.get(i) == Some(&Tok::Mul) {
                i += 1;
                if !matches!(toks.get(i), Some(Tok::Num(_) | Tok::Var(_))) {
                    return Err(fail("dangling '*'"));
                }
            }
        }
        if factors == 0 {
            return Err(fail("empty term"));
        }
        items.push((exps, coeff));
    }
    Ok(Poly::from_terms(items))
}

/// Odd homogeneous polynomial kernel K(x) = P(x)/|x|^{n-1+l}.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyKernel {
    n: u32,
    ell: u32,
    poly: Poly,
}

impl PolyKernel {
    /// Validate and wrap a polynomial: homogeneous of odd degree 1..=9, with
    /// variables limited to the first n axes, n in {2, 3}.
    pub fn new(n: u32, poly: Poly) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(Error::Config(format!("kernel dimension must be 2 or 3, got {n}")));
        }
        if poly.var_count() > n {
            return Err(Error::Config(format!(
                "polynomial uses {} variables but the dimension is {n}",
                poly.var_count()
            )));
        }
        let Some(ell) = poly.homogeneous_degree() else {
            return Err(Error::Config("kernel polynomial must be homogeneous and nonzero".into()));
        };
        if ell % 2 == 0 || ell > 9 {
            return Err(Error::Config(format!(
                "kernel degree must be odd and at most 9, got {ell}"
            )));
        }
        Ok(PolyKernel { n, ell, poly })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// K(x) = P(x)/|x|^{n-1+l}; x must be off the origin.
    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        let r = norm_n(self.n, x);
        assert!(r > 0.0, "kernel evaluated at the origin");
        self.poly.eval(x) / r.powi((self.n - 1 + self.ell) as i32)
    }

    /// Analytic gradient: grad P / r^m - m P x / r^{m+2}, m = n-1+l.
    pub fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        let r = norm_n(self.n, x);
        assert!(r > 0.0, "kernel evaluated at the origin");
        let m = f64::from(self.n - 1 + self.ell);
        let rm = r.powi((self.n - 1 + self.ell) as i32);
        let p = self.poly.eval(x);
        let g = self.poly.grad(x);
        let mut out = [0.0; 3];
        for axis in 0..self.n as usize {
            out[axis] = g[axis] / rm - m * p * x[axis] / (rm * r * r);
        }
        out
    }
}

/// Decompose an odd homogeneous polynomial of degree l = 2N+1 as
/// P = sum_j |x|^{2j} P_j with each P_j harmonic homogeneous of degree l-2j.
///
/// Stein's iteration resolved by Laplacian projection: for harmonic H of
/// degree d, Delta(|x|^{2a} H) = 2a(2a+n-2+2d)|x|^{2a-2} H, so applying
/// Delta^j to the remainder isolates P_j times an explicit positive constant.
/// The float solve is accepted only if every part is harmonic and the parts
/// reconstruct P to 1e-10 of its coefficient scale.
pub fn harmonic_decompose(n: u32, poly: &Poly) -> Result<Vec<Poly>> {
    if !(2..=3).contains(&n) {
        return Err(Error::Config(format!("decomposition dimension must be 2 or 3, got {n}")));
    }
    if poly.var_count() > n {
        return Err(Error::Config(format!(
            "polynomial uses {} variables but the dimension is {n}",
            poly.var_count()
        )));
    }
    let Some(ell) = poly.homogeneous_degree() else {
        return Err(Error::Config("decomposition needs a homogeneous nonzero polynomial".into()));
    };
    if ell % 2 == 0 || ell > 9 {
        return Err(Error::Config(format!(
            "decomposition degree must be odd and at most 9, got {ell}"
        )));
    }
    let scale = poly.max_abs_coeff();
    let big_n = (ell - 1) / 2;
    let mut parts = vec![Poly::zero(); big_n as usize + 1];
    let mut rem = poly.clone();
    for j in (0..=big_n).rev() {
        let d = ell - 2 * j;
        let mut lap = rem.clone();
        let mut c = 1.0f64;
        for a in 1..=j {
            lap = lap.laplacian();
            c *= f64::from(2 * a) * f64::from(2 * a + n - 2 + 2 * d);
        }
        if c <= 0.0 {
            return Err(Error::Domain("singular projection constant".into()));
        }
        let mut pj = lap.scaled(1.0 / c).pruned(1e-13 * scale);
        let mut lifted = pj.clone();
        for _ in 0..j {
            lifted = lifted.mul_r2(n);
        }
        rem = rem.sub(&lifted);
        std::mem::swap(&mut parts[j as usize], &mut pj);
    }
    // parts[0] absorbed the final remainder; rem must now vanish.
    if rem.max_abs_coeff() > 1e-10 * scale {
        return Err(Error::NonConvergent("harmonic decomposition residual too large".into()));
    }
    for p in &parts {
        if p.laplacian().max_abs_coeff() > 1e-10 * scale {
            return Err(Error::NonConvergent("harmonic decomposition part not harmonic".into()));
        }
    }
    Ok(parts)
}

/// Value of one kernel component: scalar kinds yield Scalar, the
/// Clifford-algebra kinds yield Clifford.
#[derive(Clone, Debug)]
pub enum KernelValue {
    Scalar(f64),
    Clifford(Multivector),
}

impl KernelValue {
    pub fn scalar_part(&self) -> f64 {
        match self {
            KernelValue::Scalar(v) => *v,
            KernelValue::Clifford(m) => m.scalar_part(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            KernelValue::Scalar(v) => v.abs(),
            KernelValue::Clifford(m) => m.norm(),
        }
    }

    pub fn scaled(&self, c: f64) -> KernelValue {
        match self {
            KernelValue::Scalar(v) => KernelValue::Scalar(v * c),
            KernelValue::Clifford(m) => KernelValue::Clifford(m.scale(c)),
        }
    }

    /// Norm of the difference; both values must share kind and dimension.
    pub fn distance(&self, other: &KernelValue) -> f64 {
        match (self, other) {
            (KernelValue::Scalar(a), KernelValue::Scalar(b)) => (a - b).abs(),
            (KernelValue::Clifford(a), KernelValue::Clifford(b)) => (a - b).norm(),
            _ => panic!("kernel value kind mismatch"),
        }
    }
}

/// Component value kind of a double-layer field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Scalar,
    Clifford,
}

#[derive(Clone, Debug, PartialEq)]
enum FieldBody {
    HarmonicDl,
    CauchyClifford,
    PlanarCauchy,
}

/// A generalized double-layer field: n components k_j, each odd, positive
/// homogeneous of degree 1-n, smooth off the origin, and divergence-free.
#[derive(Clone, Debug)]
pub struct DoubleLayerField {
    n: u32,
    body: FieldBody,
    scale: f64,
}

/// The n Riesz kernels K_j(x) = x_j/(varpi_{n-1}|x|^n). As a vector field
/// this is the harmonic double layer x/(varpi_{n-1}|x|^n), with theta = 1.
pub fn riesz_field(n: u32) -> DoubleLayerField {
    assert!((2..=8).contains(&n), "dimension must be in 2..=8");
    DoubleLayerField { n, body: FieldBody::HarmonicDl, scale: 1.0 }
}

/// Cauchy-Clifford field k_j(x) = (1/varpi_{n-1})(x/|x|^n) (x) e_j, with
/// theta = -1 as a scalar blade.
pub fn cauchy_clifford_field(n: u32) -> DoubleLayerField {
    assert!((2..=8).contains(&n), "dimension must be in 2..=8");
    DoubleLayerField { n, body: FieldBody::CauchyClifford, scale: 1.0 }
}

/// Planar Cauchy field k(z) = -(1/2pi)(1/z, i/z), complex values embedded
/// in the even subalgebra of Cl_2 (i maps to e1^e2); theta = -1.
pub fn planar_cauchy_field() -> DoubleLayerField {
    DoubleLayerField { n: 2, body: FieldBody::PlanarCauchy, scale: 1.0 }
}

fn complex_to_even(c: Complex64) -> Multivector {
    let mut m = Multivector::scalar(2, c.re);
    m.accumulate(c.im, &Multivector::from_blade(2, 0b11, 1.0));
    m
}

impl DoubleLayerField {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value_kind(&self) -> ValueKind {
        match self.body {
            FieldBody::HarmonicDl => ValueKind::Scalar,
            FieldBody::CauchyClifford | FieldBody::PlanarCauchy => ValueKind::Clifford,
        }
    }

    /// All built-in bodies are divergence-free off the origin.
    pub fn divergence_free(&self) -> bool {
        true
    }

    /// Multiply the whole field (hence theta) by c.
    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    /// Component k_j (j is 1-based) at x off the origin.
    pub fn component(&self, j: u32, x: &[f64; 3]) -> KernelValue {
        assert!(j >= 1 && j <= self.n, "component index out of range");
        let r = norm_n(self.n, x);
        assert!(r > 0.0, "kernel evaluated at the origin");
        let w = unit_sphere_area(self.n);
        match self.body {
            FieldBody::HarmonicDl => {
                KernelValue::Scalar(self.scale * x[j as usize - 1] / (w * r.powi(self.n as i32)))
            }
            FieldBody::CauchyClifford => {
                let xm = Multivector::embed(&x[..self.n as usize])
                    .scale(self.scale / (w * r.powi(self.n as i32)));
                KernelValue::Clifford(xm.gproduct(&Multivector::basis_vector(self.n, j)))
            }
            FieldBody::PlanarCauchy => {
                let z = Complex64::new(x[0], x[1]);
                let base = -self.scale / (2.0 * std::f64::consts::PI) / z;
                let val = if j == 1 { base } else { Complex64::i() * base };
                KernelValue::Clifford(complex_to_even(val))
            }
        }
    }

    /// d k_j / d x_i (both 1-based) at x off the origin; None for
    /// Clifford-valued bodies, whose potentials carry no scalar gradient.
    pub fn component_deriv(&self, j: u32, i: u32, x: &[f64; 3]) -> Option<f64> {
        assert!(j >= 1 && j <= self.n, "component index out of range");
        assert!(i >= 1 && i <= self.n, "derivative index out of range");
        let r = norm_n(self.n, x);
        assert!(r > 0.0, "kernel evaluated at the origin");
        match self.body {
            FieldBody::HarmonicDl => {
                let w = unit_sphere_area(self.n);
                let n = self.n as i32;
                let kron = if i == j { 1.0 } else { 0.0 };
                let xi = x[i as usize - 1];
                let xj = x[j as usize - 1];
                Some(
                    self.scale / w * (kron / r.powi(n) - n as f64 * xi * xj / r.powi(n + 2)),
                )
            }
            FieldBody::CauchyClifford | FieldBody::PlanarCauchy => None,
        }
    }

    /// Pairing sum_j v_j k_j(x). With v = nu(y) and x the chord this is the
    /// double-layer kernel; for the Cauchy-Clifford body it equals
    /// (1/varpi_{n-1})(x/|x|^n) (x) nu as one Clifford product.
    pub fn pair(&self, v: &[f64; 3], x: &[f64; 3]) -> KernelValue {
        let r = norm_n(self.n, x);
        assert!(r > 0.0, "kernel evaluated at the origin");
        let w = unit_sphere_area(self.n);
        match self.body {
            FieldBody::HarmonicDl => {
                KernelValue::Scalar(self.scale * dot_n(self.n, v, x) / (w * r.powi(self.n as i32)))
            }
            FieldBody::CauchyClifford => {
                let xm = Multivector::embed(&x[..self.n as usize])
                    .scale(self.scale / (w * r.powi(self.n as i32)));
                KernelValue::Clifford(xm.gproduct(&Multivector::embed(&v[..self.n as usize])))
            }
            FieldBody::PlanarCauchy => {
                let z = Complex64::new(x[0], x[1]);
                let base = -self.scale / (2.0 * std::f64::consts::PI) / z;
                KernelValue::Clifford(complex_to_even(Complex64::new(v[0], v[1]) * base))
            }
        }
    }
}

/// Unit-sphere quadrature points and weights: m-point trapezoid on the
/// circle, or m-point Gauss-Legendre in cos(theta) times 2m-point trapezoid
/// in phi on the 2-sphere.
fn sphere_points(n: u32, m: usize) -> Result<Vec<([f64; 3], f64)>> {
    if m < 4 {
        return Err(Error::Config(format!("sphere quadrature resolution must be >= 4, got {m}")));
    }
    match n {
        2 => {
            let w = 2.0 * std::f64::consts::PI / m as f64;
            Ok((0..m)
                .map(|i| {
                    let th = w * i as f64;
                    ([th.cos(), th.sin(), 0.0], w)
                })
                .collect())
        }
        3 => {
            let (gu, gw) = gauss_legendre(m);
            let mp = 2 * m;
            let wp = 2.0 * std::f64::consts::PI / mp as f64;
            let mut pts = Vec::with_capacity(m * mp);
            for (u, wu) in gu.iter().zip(&gw) {
                let s = (1.0 - u * u).sqrt();
                for k in 0..mp {
                    let phi = wp * k as f64;
                    pts.push(([s * phi.cos(), s * phi.sin(), *u], wu * wp));
                }
            }
            Ok(pts)
        }
        other => Err(Error::Config(format!("sphere quadrature needs n in {{2, 3}}, got {other}"))),
    }
}

/// Quadrature of a scalar function over S^{n-1}, n in {2, 3}.
pub fn sphere_integral(n: u32, resolution: usize, f: impl Fn(&[f64; 3]) -> f64) -> Result<f64> {
    Ok(sphere_points(n, resolution)?
        .iter()
        .map(|(p, w)| w * f(p))
        .sum())
}

fn theta_quadrature(field: &DoubleLayerField, j: Option<u32>, m: usize) -> Result<KernelValue> {
    let pts = sphere_points(field.n, m)?;
    let eval = |p: &[f64; 3]| match j {
        None => field.pair(p, p),
        Some(j) => field.component(j, p).scaled(p[j as usize - 1]),
    };
    match field.value_kind() {
        ValueKind::Scalar => Ok(KernelValue::Scalar(
            pts.iter().map(|(p, w)| w * eval(p).scalar_part()).sum(),
        )),
        ValueKind::Clifford => {
            let mut acc = Multivector::zero(field.n);
            for (p, w) in &pts {
                match eval(p) {
                    KernelValue::Clifford(m) => acc.accumulate(*w, &m),
                    KernelValue::Scalar(_) => unreachable!("kind fixed by field body"),
                }
            }
            Ok(KernelValue::Clifford(acc))
        }
    }
}

fn theta_converged(field: &DoubleLayerField, j: Option<u32>, resolution: usize) -> Result<KernelValue> {
    let coarse = theta_quadrature(field, j, resolution)?;
    let fine = theta_quadrature(field, j, 2 * resolution)?;
    if coarse.distance(&fine) > 1e-8 * (1.0 + fine.norm()) {
        return Err(Error::NonConvergent(
            "theta quadrature did not settle under resolution doubling".into(),
        ));
    }
    Ok(fine)
}

/// theta = integral over S^{n-1} of <x, k(x)>: the divergence integral that
/// drives every jump formula. Computed at the given resolution and accepted
/// only if doubling the resolution moves it by less than 1e-8.
pub fn theta(field: &DoubleLayerField, resolution: usize) -> Result<KernelValue> {
    theta_converged(field, None, resolution)
}

/// Same quadrature on the single term x_j k_j(x); for the Riesz field each
/// component integrates to 1/n by symmetry.
pub fn theta_component(field: &DoubleLayerField, j: u32, resolution: usize) -> Result<KernelValue> {
    assert!(j >= 1 && j <= field.n, "component index out of range");
    theta_converged(field, Some(j), resolution)
}

/// Central-difference divergence sum_j d_j k_j at x with step h. The
/// built-in fields are divergence-free, so the result measures only
/// finite-difference error.
pub fn fd_divergence(field: &DoubleLayerField, x: &[f64; 3], h: f64) -> KernelValue {
    assert!(h > 0.0, "step must be positive");
    match field.value_kind() {
        ValueKind::Scalar => {
            let mut sum = 0.0;
            for j in 1..=field.n {
                let mut hi = *x;
                let mut lo = *x;
                hi[j as usize - 1] += h;
                lo[j as usize - 1] -= h;
                sum += (field.component(j, &hi).scalar_part()
                    - field.component(j, &lo).scalar_part())
                    / (2.0 * h);
            }
            KernelValue::Scalar(sum)
        }
        ValueKind::Clifford => {
            let mut acc = Multivector::zero(field.n);
            for j in 1..=field.n {
                let mut hi = *x;
                let mut lo = *x;
                hi[j as usize - 1] += h;
                lo[j as usize - 1] -= h;
                match (field.component(j, &hi), field.component(j, &lo)) {
                    (KernelValue::Clifford(a), KernelValue::Clifford(b)) => {
                        acc.accumulate(1.0 / (2.0 * h), &a);
                        acc.accumulate(-1.0 / (2.0 * h), &b);
                    }
                    _ => unreachable!("kind fixed by field body"),
                }
            }
            KernelValue::Clifford(acc)
        }
    }
}
