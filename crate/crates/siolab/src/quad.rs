//! Quadrature utilities: Gauss-Legendre panels and log-substituted
//! integrals with semi-infinite tails.
//!
//! The growth-function integrals all become smooth after the substitution
//! s = e^u, so every integral here is a composite Gauss-Legendre sum in u
//! over finite panels, with tails marched panel by panel until they stop
//! contributing.

use crate::error::{Error, Result};

/// Tolerances and budgets for adaptive quadrature.
#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    /// Target relative tolerance for converged integrals.
    pub rel_tol: f64,
    /// Gauss-Legendre order per panel.
    pub panel_order: usize,
    /// Refinement cap: maximum number of panels on a finite interval.
    pub max_panels: usize,
    /// Marching cap: maximum number of unit-e-fold panels on a tail.
    pub max_tail_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-11,
            panel_order: 16,
            max_panels: 4096,
            max_tail_panels: 400,
        }
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; exact for polynomials of
/// degree 2n-1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = -p / d;
            x += dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // Derivative formula is used only at interior nodes, where x^2 < 1.
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// One Gauss-Legendre pass over [a, b] split into `panels` equal panels.
fn panel_sum(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (nodes, weights) = rule;
    let width = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + width / 2.0;
        let half = width / 2.0;
        let mut local = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            local += w * f(mid + half * x);
        }
        acc += local * half;
    }
    acc
}

/// Integral of a smooth function over the finite interval [a, b].
///
/// Doubles the panel count until two successive estimates agree to the
/// requested relative tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integrate endpoints must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let rule = gauss_legendre(spec.panel_order);
    let mut panels = 1;
    let mut prev = panel_sum(&f, a, b, panels, &rule);
    while panels < spec.max_panels {
        panels *= 2;
        let next = panel_sum(&f, a, b, panels, &rule);
        if (next - prev).abs() <= spec.rel_tol * (next.abs() + 1e-16) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergent(format!(
        "composite rule on [{a}, {b}] still moving after {} panels",
        spec.max_panels
    )))
}

/// Tail integral of a decaying function: either direction from `from`.
fn tail(g: &impl Fn(f64) -> f64, from: f64, step: f64, spec: &QuadratureSpec) -> Result<f64> {
    const WIDTH: f64 = 3.0;
    let rule = gauss_legendre(spec.panel_order.max(24));
    let mut acc = 0.0;
    let mut edge = from;
    let mut calm = 0;
    for _ in 0..spec.max_tail_panels {
        let next = edge + step * WIDTH;
        let (lo, hi) = if step > 0.0 { (edge, next) } else { (next, edge) };
        let piece = panel_sum(g, lo, hi, 2, &rule);
        acc += piece;
        edge = next;
        if piece.abs() <= spec.rel_tol * 1e-2 * (acc.abs() + 1e-300) {
            calm += 1;
            if calm >= 2 {
                return Ok(acc);
            }
        } else {
            calm = 0;
        }
    }
    Err(Error::NonConvergent(format!(
        "tail integral from {from} (step {step:+}) still contributing after {} panels",
        spec.max_tail_panels
    )))
}

/// Integral of g over (-inf, b], for g decaying toward -inf.
pub fn integrate_left_tail(g: impl Fn(f64) -> f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    tail(&g, b, -1.0, spec)
}

/// Integral of g over [a, +inf), for g decaying toward +inf.
pub fn integrate_right_tail(g: impl Fn(f64) -> f64, a: f64, spec: &QuadratureSpec) -> Result<f64> {
    tail(&g, a, 1.0, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 3, 8, 16, 24, 48] {
            let (_, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "order {n}: weight sum {total}");
        }
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        // Exactness through degree 2n-1; odd powers vanish by symmetry.
        let (x, w) = gauss_legendre(8);
        for k in 0..=15u32 {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-13, "degree {k}: {got} vs {exact}");
        }
    }

    #[test]
    fn integrate_matches_closed_forms() {
        let i = integrate(|u| u.exp(), 0.0, 1.0, &spec()).unwrap();
        assert!((i - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let i = integrate(|u| u.sin(), 0.0, std::f64::consts::PI, &spec()).unwrap();
        assert!((i - 2.0).abs() < 1e-12);
    }

    #[test]
    fn left_tail_matches_exponential() {
        // integral of e^u over (-inf, 0] = 1.
        let i = integrate_left_tail(|u| u.exp(), 0.0, &spec()).unwrap();
        assert!((i - 1.0).abs() < 1e-12, "{i}");
        // integral of e^{u/2} over (-inf, ln 4] = 2 * e^{ln(4)/2} = 4.
        let i = integrate_left_tail(|u| (0.5 * u).exp(), 4.0f64.ln(), &spec()).unwrap();
        assert!((i - 4.0).abs() < 1e-11, "{i}");
    }

    #[test]
    fn right_tail_matches_exponential() {
        // integral of e^{-2u} over [0, inf) = 1/2.
        let i = integrate_right_tail(|u| (-2.0 * u).exp(), 0.0, &spec()).unwrap();
        assert!((i - 0.5).abs() < 1e-12, "{i}");
    }

    #[test]
    fn divergent_tail_is_reported() {
        let err = integrate_right_tail(|_| 1.0, 0.0, &spec());
        assert!(err.is_err());
    }
}
