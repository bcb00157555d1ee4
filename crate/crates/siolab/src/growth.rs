//! Growth functions omega on (0, D) and their derived objects: the
//! extension omega~, the Zygmund transform omega_Z, the tail integral W,
//! the dilation function h, and the dilation indices.
//!
//! A growth function is non-decreasing and positive on (0, D) with
//! omega(0+) = 0. The closed-form kinds below all satisfy this by
//! construction; tabulated kinds are validated on input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadratureSpec};

/// Sentinel for D = +infinity.
pub const UNBOUNDED: f64 = f64::INFINITY;

fn unbounded_default() -> f64 {
    UNBOUNDED
}

/// Config-facing description of a growth function.
///
/// The log-corrected kinds absorb their additive constants: `power_log_plus`
/// uses A = max(1, -theta/alpha), while `power_log_inv` and `power_log_d`
/// use B = max(1, theta/alpha). These choices keep the function
/// non-decreasing for every admissible parameter pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthSpec {
    /// t^alpha on (0, D).
    Power {
        alpha: f64,
        #[serde(rename = "D", default = "unbounded_default")]
        d: f64,
    },
    /// t^alpha (A + log+ t)^theta with A = max(1, -theta/alpha).
    PowerLogPlus {
        alpha: f64,
        theta: f64,
        #[serde(rename = "D", default = "unbounded_default")]
        d: f64,
    },
    /// t^alpha (B + log+ (1/t))^theta with B = max(1, theta/alpha).
    PowerLogInv {
        alpha: f64,
        theta: f64,
        #[serde(rename = "D", default = "unbounded_default")]
        d: f64,
    },
    /// t^alpha (B + ln(D/t))^theta with B = max(1, theta/alpha); D finite.
    PowerLogD {
        alpha: f64,
        theta: f64,
        #[serde(rename = "D")]
        d: f64,
    },
    /// max(t^alpha, t^beta), 0 < alpha < beta.
    MaxPowers {
        alpha: f64,
        beta: f64,
        #[serde(rename = "D", default = "unbounded_default")]
        d: f64,
    },
    /// min(t^alpha, t^beta), 0 < alpha < beta.
    MinPowers {
        alpha: f64,
        beta: f64,
        #[serde(rename = "D", default = "unbounded_default")]
        d: f64,
    },
    /// Monotone table, interpolated piecewise linearly in (log t, log omega).
    Tabulated { ts: Vec<f64>, values: Vec<f64> },
}

impl GrowthSpec {
    fn d(&self) -> f64 {
        match self {
            GrowthSpec::Power { d, .. }
            | GrowthSpec::PowerLogPlus { d, .. }
            | GrowthSpec::PowerLogInv { d, .. }
            | GrowthSpec::PowerLogD { d, .. }
            | GrowthSpec::MaxPowers { d, .. }
            | GrowthSpec::MinPowers { d, .. } => *d,
            GrowthSpec::Tabulated { ts, .. } => *ts.last().unwrap_or(&f64::NAN),
        }
    }
}

/// A validated growth function, possibly extended to (0, infinity).
///
/// The extension is omega~(t) = omega(min(t, D)); it is tracked as a flag so
/// that the tail integral W can use its exact two-branch form.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFunction {
    spec: GrowthSpec,
    extended: bool,
}

/// Log-spaced evaluation grids for suprema and dilation estimates.
#[derive(Clone, Debug)]
pub struct LogGrid {
    /// Points per supremum grid.
    pub t_points: usize,
    /// Decades of t below the natural scale (and above it, for D = inf).
    pub t_decades: f64,
    /// Dilation decades: s runs over 10^{-1}..10^{-s_decades} and mirrored.
    pub s_decades: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid { t_points: 512, t_decades: 48.0, s_decades: 6 }
    }
}

impl LogGrid {
    pub fn describe(&self) -> String {
        format!(
            "{} log-spaced t points over {} decades; s in 10^(+/-1..{})",
            self.t_points, self.t_decades, self.s_decades
        )
    }
}

/// Dilation-index estimates with a convergence flag.
///
/// Estimates are Richardson-extrapolated decade slopes of ln h(s) / ln s;
/// `converged` is false when the last two extrapolants still disagree.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DilationIndices {
    pub i_lower: f64,
    pub i_upper: f64,
    pub converged: bool,
}

/// Summary constants of a growth function.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthAnalysis {
    /// Grid supremum of omega~(2t)/omega(t), t in (0, D).
    pub doubling_constant: f64,
    /// Integral of omega(t)/max(t, t^2) over (0, D).
    pub dini_integral: f64,
    /// Grid supremum of omega_Z(t)/omega(t).
    pub zygmund_constant: f64,
    /// Lower dilation index estimate.
    pub i_lower: f64,
    /// Upper dilation index estimate.
    pub i_upper: f64,
    /// Description of the grids used.
    pub grid_spec: String,
}

impl GrowthFunction {
    /// Validates a spec and wraps it.
    pub fn new(spec: GrowthSpec) -> Result<Self> {
        validate(&spec)?;
        Ok(GrowthFunction { spec, extended: false })
    }

    pub fn power(alpha: f64, d: f64) -> Result<Self> {
        Self::new(GrowthSpec::Power { alpha, d })
    }

    pub fn power_log_plus(alpha: f64, theta: f64, d: f64) -> Result<Self> {
        Self::new(GrowthSpec::PowerLogPlus { alpha, theta, d })
    }

    pub fn power_log_inv(alpha: f64, theta: f64, d: f64) -> Result<Self> {
        Self::new(GrowthSpec::PowerLogInv { alpha, theta, d })
    }

    pub fn power_log_d(alpha: f64, theta: f64, d: f64) -> Result<Self> {
        Self::new(GrowthSpec::PowerLogD { alpha, theta, d })
    }

    pub fn max_powers(alpha: f64, beta: f64, d: f64) -> Result<Self> {
        Self::new(GrowthSpec::MaxPowers { alpha, beta, d })
    }

    pub fn min_powers(alpha: f64, beta: f64, d: f64) -> Result<Self> {
        Self::new(GrowthSpec::MinPowers { alpha, beta, d })
    }

    pub fn tabulated(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(GrowthSpec::Tabulated { ts, values })
    }

    pub fn spec(&self) -> &GrowthSpec {
        &self.spec
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    /// Upper endpoint of the domain: D, or +infinity once extended.
    pub fn upper_endpoint(&self) -> f64 {
        if self.extended {
            UNBOUNDED
        } else {
            self.spec.d()
        }
    }

    /// D of the underlying spec, finite even after extension.
    fn base_d(&self) -> f64 {
        self.spec.d()
    }

    fn is_tabulated(&self) -> bool {
        matches!(self.spec, GrowthSpec::Tabulated { .. })
    }

    /// Lower edge of a tabulated grid, or 0 for closed forms.
    fn lower_edge(&self) -> f64 {
        match &self.spec {
            GrowthSpec::Tabulated { ts, .. } => ts[0],
            _ => 0.0,
        }
    }

    /// The extension omega~ with omega~(t) = omega(min(t, D)).
    ///
    /// For D = +infinity the extension is the function itself.
    pub fn extend(&self) -> GrowthFunction {
        if self.upper_endpoint().is_infinite() {
            self.clone()
        } else {
            GrowthFunction { spec: self.spec.clone(), extended: true }
        }
    }

    /// Pointwise evaluation. Errors outside (0, D); tabulated kinds also
    /// error below their first grid point (no extrapolation).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("growth function needs t > 0, got {t}")));
        }
        if !self.extended && t >= self.base_d() && !self.is_tabulated() {
            return Err(Error::Domain(format!(
                "t = {t} is outside (0, D) with D = {}",
                self.base_d()
            )));
        }
        if self.is_tabulated() {
            let (lo, hi) = (self.lower_edge(), self.base_d());
            let t_eff = if self.extended { t.min(hi) } else { t };
            if t_eff < lo || t_eff > hi {
                return Err(Error::Domain(format!(
                    "tabulated growth function covers [{lo}, {hi}], got {t}"
                )));
            }
            return Ok(self.eval_raw(t_eff));
        }
        Ok(self.eval_raw(t))
    }

    /// Unchecked closed-form evaluation; clamps at D when extended.
    fn eval_raw(&self, t: f64) -> f64 {
        let t = if self.extended { t.min(self.base_d()) } else { t };
        match &self.spec {
            GrowthSpec::Power { alpha, .. } => t.powf(*alpha),
            GrowthSpec::PowerLogPlus { alpha, theta, .. } => {
                let a = 1.0f64.max(-theta / alpha);
                t.powf(*alpha) * (a + t.ln().max(0.0)).powf(*theta)
            }
            GrowthSpec::PowerLogInv { alpha, theta, .. } => {
                let b = 1.0f64.max(theta / alpha);
                t.powf(*alpha) * (b + (-t.ln()).max(0.0)).powf(*theta)
            }
            GrowthSpec::PowerLogD { alpha, theta, d } => {
                let b = 1.0f64.max(theta / alpha);
                t.powf(*alpha) * (b + (d / t).ln()).powf(*theta)
            }
            GrowthSpec::MaxPowers { alpha, beta, .. } => t.powf(*alpha).max(t.powf(*beta)),
            GrowthSpec::MinPowers { alpha, beta, .. } => t.powf(*alpha).min(t.powf(*beta)),
            GrowthSpec::Tabulated { ts, values } => interp_loglog(ts, values, t),
        }
    }

    /// Asserts the kind supports integrals reaching down to 0.
    fn require_integrable(&self, what: &str) -> Result<()> {
        if self.is_tabulated() {
            Err(Error::Domain(format!(
                "{what} needs values below the tabulated grid; use a closed-form kind"
            )))
        } else {
            Ok(())
        }
    }

    /// Dini-type integral of omega(t)/max(t, t^2) over (0, D).
    pub fn dini_integral(&self, quad_spec: &QuadratureSpec) -> Result<f64> {
        self.require_integrable("dini_integral")?;
        let d = self.upper_endpoint();
        let split = d.min(1.0);
        // In u = ln t the inner part is omega(e^u), the outer omega(e^u)e^{-u}.
        let inner = quad::integrate_left_tail(|u| self.eval_raw(u.exp()), split.ln(), quad_spec)?;
        let outer = if d > 1.0 {
            if d.is_finite() {
                quad::integrate(|u| self.eval_raw(u.exp()) * (-u).exp(), 0.0, d.ln(), quad_spec)?
            } else {
                quad::integrate_right_tail(|u| self.eval_raw(u.exp()) * (-u).exp(), 0.0, quad_spec)?
            }
        } else {
            0.0
        };
        Ok(inner + outer)
    }

    /// W(t) = integral of omega(s)/s ds/s over (t, D).
    ///
    /// For an extended function the exact two-branch form is used:
    /// W~(t) = W(t) + omega(D)/D below D, and omega(D)/t above.
    pub fn w_omega(&self, t: f64, quad_spec: &QuadratureSpec) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("w_omega needs t > 0, got {t}")));
        }
        self.require_integrable("w_omega")?;
        let d0 = self.base_d();
        if self.extended {
            let omega_d = self.eval_raw(d0);
            if t >= d0 {
                return Ok(omega_d / t);
            }
            let base = GrowthFunction { spec: self.spec.clone(), extended: false };
            return Ok(base.w_omega(t, quad_spec)? + omega_d / d0);
        }
        if t >= d0 {
            return Err(Error::Domain(format!("w_omega needs t < D = {d0}, got {t}")));
        }
        let f = |u: f64| self.eval_raw(u.exp()) * (-u).exp();
        if d0.is_finite() {
            quad::integrate(f, t.ln(), d0.ln(), quad_spec)
        } else {
            quad::integrate_right_tail(f, t.ln(), quad_spec)
        }
    }

    /// Zygmund transform omega_Z(t) = int_0^t omega ds/s + t W(t).
    pub fn zygmund_transform(&self, t: f64, quad_spec: &QuadratureSpec) -> Result<f64> {
        if !(t > 0.0) || (!self.extended && t >= self.base_d()) {
            return Err(Error::Domain(format!(
                "zygmund_transform needs 0 < t < D, got {t}"
            )));
        }
        self.require_integrable("zygmund_transform")?;
        let head = quad::integrate_left_tail(|u| self.eval_raw(u.exp()), t.ln(), quad_spec)?;
        Ok(head + t * self.w_omega(t, quad_spec)?)
    }

    /// Grid supremum of omega~(2t)/omega(t) over t in (0, D).
    pub fn doubling_constant(&self, grid: &LogGrid) -> Result<f64> {
        let et = self.extend();
        let ts = self.sup_grid(grid)?;
        let mut sup = 0.0f64;
        for &t in &ts {
            if self.is_tabulated() && 2.0 * t > self.base_d() && !self.extended {
                continue;
            }
            let r = et.eval_raw(2.0 * t) / self.eval_raw(t);
            sup = sup.max(r);
        }
        if sup == 0.0 {
            return Err(Error::Domain("empty grid for doubling constant".into()));
        }
        Ok(sup)
    }

    /// Grid supremum of omega_Z(t)/omega(t).
    pub fn zygmund_constant(&self, grid: &LogGrid, quad_spec: &QuadratureSpec) -> Result<f64> {
        self.require_integrable("zygmund_constant")?;
        let ts = self.sup_grid(grid)?;
        let mut sup = 0.0f64;
        for &t in &ts {
            sup = sup.max(self.zygmund_transform(t, quad_spec)? / self.eval_raw(t));
        }
        Ok(sup)
    }

    /// Supremum grid on (0, D): log-spaced with anchors near the endpoints.
    fn sup_grid(&self, grid: &LogGrid) -> Result<Vec<f64>> {
        let d = self.upper_endpoint();
        let (lo, hi) = if self.is_tabulated() {
            (self.lower_edge(), self.base_d() * (1.0 - 1e-12))
        } else if d.is_finite() {
            (d * 10f64.powf(-9.0), d * (1.0 - 1e-9))
        } else {
            (10f64.powf(-9.0), 10f64.powf(9.0))
        };
        log_spaced(lo, hi, grid.t_points.max(8))
    }

    /// Grid-supremum lower estimate of the dilation function
    /// h(s) = sup over 0 < t < min(D, D/s) of omega(ts)/omega(t).
    pub fn dilation_function(&self, s: f64, grid: &LogGrid) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("dilation needs s in (0, inf), got {s}")));
        }
        let d = self.upper_endpoint();
        let ts: Vec<f64> = if self.is_tabulated() {
            // Both t and ts must stay inside the table span.
            let lo = (self.lower_edge() / s).max(self.lower_edge());
            let hi = (self.base_d() / s).min(self.base_d());
            if lo >= hi {
                return Err(Error::Domain(format!(
                    "empty dilation grid for tabulated kind at s = {s}"
                )));
            }
            log_spaced(lo, hi, grid.t_points)?
        } else if d.is_finite() {
            let hi = d.min(d / s) * (1.0 - 1e-12);
            let lo = d * 10f64.powf(-grid.t_decades);
            let mut ts = log_spaced(lo, hi, grid.t_points)?;
            // The supremum is often attained at the very edge of the range.
            ts.push(hi * (1.0 - 1e-6));
            ts.push(hi);
            ts
        } else {
            let span = grid.t_decades.max(20.0);
            let mut ts = log_spaced(10f64.powf(-span), 10f64.powf(span), grid.t_points)?;
            ts.push(1.0);
            ts
        };
        let mut sup = 0.0f64;
        for &t in &ts {
            sup = sup.max(self.eval_raw(t * s) / self.eval_raw(t));
        }
        if sup == 0.0 || !sup.is_finite() {
            return Err(Error::Domain(format!("dilation grid degenerate at s = {s}")));
        }
        Ok(sup)
    }

    /// Decade-slope estimates of the dilation indices (i, I) with two-level
    /// Richardson extrapolation and a convergence flag.
    pub fn dilation_indices(&self, grid: &LogGrid) -> Result<DilationIndices> {
        let decades = grid.s_decades.max(3);
        let lower = self.index_one_side(grid, decades, false)?;
        let upper = self.index_one_side(grid, decades, true)?;
        Ok(DilationIndices {
            i_lower: lower.0.min(upper.0),
            i_upper: lower.0.max(upper.0),
            converged: lower.1 && upper.1,
        })
    }

    fn index_one_side(&self, grid: &LogGrid, decades: usize, upper: bool) -> Result<(f64, bool)> {
        let l10 = std::f64::consts::LN_10;
        // ln h at s = 10^{+/- m}, m = 0..decades; h(1) = 1 exactly.
        let mut lnh = vec![0.0];
        let mut max_m = decades;
        for m in 1..=decades {
            let s = if upper { 10f64.powi(m as i32) } else { 10f64.powi(-(m as i32)) };
            match self.dilation_function(s, grid) {
                Ok(h) => lnh.push(h.ln()),
                Err(_) if self.is_tabulated() => {
                    max_m = m - 1;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if max_m < 1 {
            return Err(Error::Domain("dilation grid supports no full decade".into()));
        }
        let sign = if upper { l10 } else { -l10 };
        let d: Vec<f64> = (1..=max_m).map(|m| (lnh[m] - lnh[m - 1]) / sign).collect();
        if max_m < 3 {
            return Ok((d[max_m - 1], false));
        }
        let r: Vec<f64> = (1..max_m)
            .map(|i| {
                let m = (i + 1) as f64;
                m * d[i] - (m - 1.0) * d[i - 1]
            })
            .collect();
        let r2: Vec<f64> = (1..r.len())
            .map(|i| {
                let m = (i + 2) as f64;
                (m * m * r[i] - (m - 1.0) * (m - 1.0) * r[i - 1]) / (2.0 * m - 1.0)
            })
            .collect();
        let est = *r2.last().unwrap();
        let converged = r2.len() < 2 || (est - r2[r2.len() - 2]).abs() <= 5e-3;
        Ok((est, converged))
    }

    /// Populates every summary constant.
    pub fn analyze(&self, grid: &LogGrid, quad_spec: &QuadratureSpec) -> Result<GrowthAnalysis> {
        let indices = self.dilation_indices(grid)?;
        Ok(GrowthAnalysis {
            doubling_constant: self.doubling_constant(grid)?,
            dini_integral: self.dini_integral(quad_spec)?,
            zygmund_constant: self.zygmund_constant(grid, quad_spec)?,
            i_lower: indices.i_lower,
            i_upper: indices.i_upper,
            grid_spec: grid.describe(),
        })
    }
}

fn validate(spec: &GrowthSpec) -> Result<()> {
    let bad = |msg: String| Err(Error::Config(msg));
    let check_d = |d: f64| {
        if d > 0.0 {
            Ok(())
        } else {
            bad(format!("D must be positive, got {d}"))
        }
    };
    match spec {
        GrowthSpec::Power { alpha, d } => {
            if !(*alpha > 0.0) || !alpha.is_finite() {
                return bad(format!("power needs alpha > 0, got {alpha}"));
            }
            check_d(*d)
        }
        GrowthSpec::PowerLogPlus { alpha, theta, d }
        | GrowthSpec::PowerLogInv { alpha, theta, d } => {
            if !(*alpha > 0.0) || !alpha.is_finite() || !theta.is_finite() {
                return bad(format!(
                    "log-corrected kind needs alpha > 0 and finite theta, got ({alpha}, {theta})"
                ));
            }
            check_d(*d)
        }
        GrowthSpec::PowerLogD { alpha, theta, d } => {
            if !(*alpha > 0.0) || !alpha.is_finite() || !theta.is_finite() {
                return bad(format!(
                    "power_log_d needs alpha > 0 and finite theta, got ({alpha}, {theta})"
                ));
            }
            if !d.is_finite() {
                return bad("power_log_d needs a finite D".into());
            }
            check_d(*d)
        }
        GrowthSpec::MaxPowers { alpha, beta, d } | GrowthSpec::MinPowers { alpha, beta, d } => {
            if !(0.0 < *alpha && alpha < beta) || !beta.is_finite() {
                return bad(format!("needs 0 < alpha < beta, got ({alpha}, {beta})"));
            }
            check_d(*d)
        }
        GrowthSpec::Tabulated { ts, values } => {
            if ts.len() < 2 || ts.len() != values.len() {
                return bad(format!(
                    "tabulated needs matching ts/values with >= 2 entries, got {}/{}",
                    ts.len(),
                    values.len()
                ));
            }
            for w in ts.windows(2) {
                if !(w[0] > 0.0 && w[0] < w[1]) {
                    return bad("tabulated ts must be positive and strictly increasing".into());
                }
            }
            for (i, w) in values.windows(2).enumerate() {
                if !(w[0] > 0.0 && w[0] <= w[1]) {
                    return bad(format!(
                        "tabulated values must be positive and non-decreasing (violated at index {i})"
                    ));
                }
            }
            Ok(())
        }
    }
}

/// Piecewise-linear interpolation in (log t, log omega); assumes t inside
/// the span (validated by callers).
fn interp_loglog(ts: &[f64], values: &[f64], t: f64) -> f64 {
    let lt = t.ln();
    match ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
        Ok(i) => values[i],
        Err(pos) => {
            let i = pos.clamp(1, ts.len() - 1);
            let (l0, l1) = (ts[i - 1].ln(), ts[i].ln());
            let (v0, v1) = (values[i - 1].ln(), values[i].ln());
            let w = (lt - l0) / (l1 - l0);
            (v0 + w * (v1 - v0)).exp()
        }
    }
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < hi) || count < 2 {
        return Err(Error::Domain(format!("bad log grid [{lo}, {hi}] x {count}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn grid() -> LogGrid {
        LogGrid::default()
    }

    // Closed forms for the power kind, used as independent oracles:
    // omega_Z(t) = t^a/a + t (D^{a-1} - t^{a-1})/(a-1) and
    // W(t) = (t^{a-1} - D^{a-1})/(1-a), both for a != 1.
    fn power_zygmund(a: f64, d: f64, t: f64) -> f64 {
        t.powf(a) / a + t * (d.powf(a - 1.0) - t.powf(a - 1.0)) / (a - 1.0)
    }

    fn power_w(a: f64, d: f64, t: f64) -> f64 {
        (t.powf(a - 1.0) - d.powf(a - 1.0)) / (1.0 - a)
    }

    #[test]
    fn eval_matches_pinned_values() {
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        assert_eq!(g.eval(0.25).unwrap(), 0.5);

        // power_log_D(0.5, 1, D=1) at t = 1/e: B = 2, value 3 e^{-1/2}.
        let g = GrowthFunction::power_log_d(0.5, 1.0, 1.0).unwrap();
        let got = g.eval((-1.0f64).exp()).unwrap();
        assert!((got - 1.8195919791379003).abs() < 1e-15, "{got}");

        let g = GrowthFunction::max_powers(0.3, 0.7, UNBOUNDED).unwrap();
        assert!((g.eval(2.0).unwrap() - 2f64.powf(0.7)).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        assert!(g.eval(0.0).is_err());
        assert!(g.eval(-1.0).is_err());
        assert!(g.eval(1.0).is_err());
        assert!(g.eval(2.0).is_err());
        assert!(g.extend().eval(2.0).is_ok());
    }

    #[test]
    fn extension_identity() {
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        let e = g.extend();
        assert_eq!(e.upper_endpoint(), UNBOUNDED);
        assert_eq!(e.eval(4.0).unwrap(), 1.0);
        assert_eq!(e.eval(0.25).unwrap(), 0.5);
        let m = GrowthFunction::min_powers(0.3, 0.7, 1.0).unwrap().extend();
        assert_eq!(m.eval(2.0).unwrap(), 1.0);
        // Extending an unbounded function changes nothing.
        let u = GrowthFunction::power(0.5, UNBOUNDED).unwrap();
        assert_eq!(u.extend(), u);
    }

    #[test]
    fn zygmund_transform_matches_closed_form() {
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        for &t in &[1e-6, 1e-3, 0.25, 0.5, 0.99] {
            let got = g.zygmund_transform(t, &q()).unwrap();
            let want = power_zygmund(0.5, 1.0, t);
            assert!(
                (got - want).abs() <= 1e-8 * want,
                "t={t}: {got} vs {want}"
            );
        }
        // Pinned: omega_Z(0.25) = 4 sqrt(t) - 2t = 1.5; limit at D is 2.
        assert!((g.zygmund_transform(0.25, &q()).unwrap() - 1.5).abs() < 1e-9);
        assert!((g.zygmund_transform(1.0 - 1e-12, &q()).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn w_omega_matches_closed_form_and_extension_branches() {
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        let got = g.w_omega(0.25, &q()).unwrap();
        assert!((got - 2.0).abs() < 1e-10, "{got}");
        for &t in &[1e-4, 0.1, 0.7] {
            let want = power_w(0.5, 1.0, t);
            let got = g.w_omega(t, &q()).unwrap();
            assert!((got - want).abs() < 1e-9 * want.max(1.0), "t={t}");
        }
        // Extended branches: below D add omega(D)/D, above D pure tail.
        let e = g.extend();
        let below = e.w_omega(0.25, &q()).unwrap();
        assert!((below - (2.0 + 1.0)).abs() < 1e-10, "{below}");
        let above = e.w_omega(2.0, &q()).unwrap();
        assert!((above - 0.5).abs() < 1e-14, "{above}");
    }

    #[test]
    fn w_omega_unbounded_power_tail() {
        // D = inf: W(t) = t^{a-1}/(1-a) for a < 1.
        let g = GrowthFunction::power(0.5, UNBOUNDED).unwrap();
        let got = g.w_omega(4.0, &q()).unwrap();
        assert!((got - 1.0).abs() < 1e-10, "{got}");
    }

    #[test]
    fn zygmund_w_identity_on_tau_grid() {
        // int_0^tau W(t) dt = omega_Z(tau).
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        let qq = q();
        for &tau in &[0.01f64, 0.1, 0.5, 0.9] {
            let left = quad::integrate_left_tail(
                |u| {
                    let t = u.exp();
                    g.w_omega(t, &qq).unwrap() * t
                },
                tau.ln(),
                &QuadratureSpec { rel_tol: 1e-9, ..q() },
            )
            .unwrap();
            let right = g.zygmund_transform(tau, &qq).unwrap();
            assert!(
                (left - right).abs() < 1e-6 * right,
                "tau={tau}: {left} vs {right}"
            );
        }
    }

    #[test]
    fn analyze_power_constants() {
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        let a = g.analyze(&grid(), &q()).unwrap();
        assert!((a.doubling_constant - 2f64.sqrt()).abs() < 1e-3, "{}", a.doubling_constant);
        assert!((a.dini_integral - 2.0).abs() < 1e-6, "{}", a.dini_integral);
        assert!((a.zygmund_constant - 4.0).abs() < 1e-3, "{}", a.zygmund_constant);
        assert!((a.i_lower - 0.5).abs() < 0.02);
        assert!((a.i_upper - 0.5).abs() < 0.02);
    }

    #[test]
    fn dilation_function_examples() {
        let g = GrowthFunction::power(0.5, UNBOUNDED).unwrap();
        let h = g.dilation_function(0.25, &grid()).unwrap();
        assert!((h - 0.5).abs() < 1e-9, "{h}");

        let m = GrowthFunction::max_powers(0.3, 0.7, UNBOUNDED).unwrap();
        let h = m.dilation_function(0.5, &grid()).unwrap();
        assert!((h - 0.5f64.powf(0.3)).abs() < 1e-9, "{h}");
        let h = m.dilation_function(2.0, &grid()).unwrap();
        assert!((h - 2f64.powf(0.7)).abs() < 1e-9, "{h}");
    }

    #[test]
    fn dilation_indices_match_example_targets() {
        let cases: Vec<(GrowthFunction, f64, f64)> = vec![
            (GrowthFunction::power(0.4, UNBOUNDED).unwrap(), 0.4, 0.4),
            (GrowthFunction::power(0.4, 1.0).unwrap(), 0.4, 0.4),
            (GrowthFunction::max_powers(0.3, 0.7, UNBOUNDED).unwrap(), 0.3, 0.7),
            (GrowthFunction::max_powers(0.3, 0.7, 1.0).unwrap(), 0.3, 0.3),
            (GrowthFunction::min_powers(0.3, 0.7, UNBOUNDED).unwrap(), 0.3, 0.7),
            (GrowthFunction::min_powers(0.3, 0.7, 1.0).unwrap(), 0.7, 0.7),
            (GrowthFunction::power_log_plus(0.5, 1.0, UNBOUNDED).unwrap(), 0.5, 0.5),
            (GrowthFunction::power_log_inv(0.5, 1.0, UNBOUNDED).unwrap(), 0.5, 0.5),
            (GrowthFunction::power_log_d(0.5, 1.0, 1.0).unwrap(), 0.5, 0.5),
        ];
        for (g, i_want, iu_want) in cases {
            let idx = g.dilation_indices(&grid()).unwrap();
            assert!(
                (idx.i_lower - i_want).abs() <= 0.02,
                "{:?}: i_lower {} vs {}",
                g.spec(),
                idx.i_lower,
                i_want
            );
            assert!(
                (idx.i_upper - iu_want).abs() <= 0.02,
                "{:?}: i_upper {} vs {}",
                g.spec(),
                idx.i_upper,
                iu_want
            );
        }
    }

    #[test]
    fn tabulated_interpolates_and_guards() {
        let g = GrowthFunction::tabulated(vec![0.01, 0.1, 1.0], vec![0.1, 0.4, 1.0]).unwrap();
        assert_eq!(g.eval(0.1).unwrap(), 0.4);
        // Log-log linearity between knots.
        let mid = g.eval((0.1f64 * 1.0).sqrt()).unwrap();
        assert!((mid - (0.4f64 * 1.0).sqrt()).abs() < 1e-12);
        assert!(g.eval(0.001).is_err());
        assert!(g.eval(2.0).is_err());
        assert!(g.extend().eval(2.0).is_ok());
        assert!(GrowthFunction::tabulated(vec![0.1, 0.01], vec![0.1, 0.2]).is_err());
        assert!(GrowthFunction::tabulated(vec![0.01, 0.1], vec![0.2, 0.1]).is_err());
        // Indices of a sampled power law recover its exponent roughly.
        let ts: Vec<f64> = (0..200).map(|i| 10f64.powf(-8.0 + 8.0 * i as f64 / 199.0)).collect();
        let vs: Vec<f64> = ts.iter().map(|t| t.powf(0.5)).collect();
        let g = GrowthFunction::tabulated(ts, vs).unwrap();
        let idx = g.dilation_indices(&grid()).unwrap();
        assert!((idx.i_lower - 0.5).abs() < 0.05, "{}", idx.i_lower);
    }

    #[test]
    fn subadditivity_of_strict_fixture() {
        // power_log_d with theta = 1 and alpha <= 1 has B = 1/alpha, which is
        // the concave fixture; concavity with omega(0+) = 0 gives
        // subadditivity.
        let g = GrowthFunction::power_log_d(0.5, 1.0, 2.0).unwrap();
        let mut t = 1e-6;
        while t < 1.0 {
            let mut s = 1e-6;
            while s < 1.0 {
                if t + s < 2.0 {
                    let lhs = g.eval(t + s).unwrap();
                    let rhs = g.eval(t).unwrap() + g.eval(s).unwrap();
                    assert!(lhs <= rhs * (1.0 + 1e-12), "t={t} s={s}");
                }
                s *= 7.3;
            }
            t *= 7.3;
        }
    }

    #[test]
    fn lemma_monotone_ratio_with_c2() {
        // omega~(t2)/t2 <= C2 omega~(t1)/t1 with
        // C2 = C_Zyg + max(1, C_Zyg) omega(D)/omega(D/2).
        let g = GrowthFunction::power(0.5, 1.0).unwrap();
        let c_zyg = g.zygmund_constant(&grid(), &q()).unwrap();
        let c2 = c_zyg + c_zyg.max(1.0) * g.eval_raw(1.0) / g.eval_raw(0.5);
        let e = g.extend();
        let pts: Vec<f64> = (0..60).map(|i| 10f64.powf(-4.0 + 6.0 * i as f64 / 59.0)).collect();
        for (i, &t1) in pts.iter().enumerate() {
            for &t2 in &pts[i + 1..] {
                let lhs = e.eval_raw(t2) / t2;
                let rhs = c2 * e.eval_raw(t1) / t1;
                assert!(lhs <= rhs * (1.0 + 1e-9), "t1={t1} t2={t2}");
            }
        }
    }

    #[test]
    fn serde_round_trip_via_toml() {
        let src = r#"kind = "power"
alpha = 0.5
D = 1.0
"#;
        let spec: GrowthSpec = toml::from_str(src).unwrap();
        assert_eq!(spec, GrowthSpec::Power { alpha: 0.5, d: 1.0 });
        // Omitted D defaults to the unbounded sentinel.
        let spec: GrowthSpec = toml::from_str("kind = \"power\"\nalpha = 0.3\n").unwrap();
        assert_eq!(spec.d(), UNBOUNDED);
        let spec: GrowthSpec =
            toml::from_str("kind = \"max_powers\"\nalpha = 0.3\nbeta = 0.7\nD = inf\n").unwrap();
        assert_eq!(spec.d(), UNBOUNDED);
        let text = toml::to_string(&GrowthSpec::Power { alpha: 0.5, d: UNBOUNDED }).unwrap();
        let back: GrowthSpec = toml::from_str(&text).unwrap();
        assert_eq!(back.d(), UNBOUNDED);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn monotone_on_samples(alpha in 0.1f64..0.95, kind in 0usize..4, t in 1e-8f64..0.99, dt in 1e-8f64..0.5) {
            let g = match kind {
                0 => GrowthFunction::power(alpha, 1.0).unwrap(),
                1 => GrowthFunction::power_log_d(alpha, 1.0, 1.0).unwrap(),
                2 => GrowthFunction::power_log_inv(alpha, 1.5, 1.0).unwrap(),
                _ => GrowthFunction::power_log_plus(alpha, -0.5, 1.0).unwrap(),
            };
            let t2 = (t + dt).min(1.0 - 1e-12);
            prop_assert!(g.eval(t).unwrap() <= g.eval(t2).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn vanishes_at_zero(alpha in 0.1f64..0.9) {
            let g = GrowthFunction::power_log_inv(alpha, 1.0, 1.0).unwrap();
            // t^{alpha/2} (B + ln(1/t)) <= 2/alpha pointwise, so the value
            // at t = 1e-14 sits below (2/alpha) t^{alpha/2}.
            let cap = (2.0 / alpha) * 1e-14f64.powf(alpha / 2.0);
            prop_assert!(g.eval(1e-14).unwrap() < cap);
            prop_assert!(g.eval(1e-14).unwrap() < g.eval(1e-2).unwrap());
        }

        #[test]
        fn submultiplicative_dilation(r in 0.05f64..0.9, s in 0.05f64..0.9) {
            let g = GrowthFunction::power_log_inv(0.5, 1.0, UNBOUNDED).unwrap();
            let gr = grid();
            let hrs = g.dilation_function(r * s, &gr).unwrap();
            let hr = g.dilation_function(r, &gr).unwrap();
            let hs = g.dilation_function(s, &gr).unwrap();
            prop_assert!(hrs <= hr * hs * 1.05);
        }

        #[test]
        fn zygmund_monotone(t1 in 1e-4f64..0.5, scale in 1.01f64..1.9) {
            let g = GrowthFunction::power(0.5, 1.0).unwrap();
            let t2 = (t1 * scale).min(1.0 - 1e-9);
            let z1 = g.zygmund_transform(t1, &q()).unwrap();
            let z2 = g.zygmund_transform(t2, &q()).unwrap();
            prop_assert!(z2 >= z1 * (1.0 - 1e-9));
        }

        #[test]
        fn w_lower_bound(t in 1e-4f64..0.99) {
            // omega(t) (1/t - 1/D) <= W(t).
            let g = GrowthFunction::power(0.5, 1.0).unwrap();
            let w = g.w_omega(t, &q()).unwrap();
            let lb = g.eval(t).unwrap() * (1.0 / t - 1.0);
            prop_assert!(lb <= w * (1.0 + 1e-9));
        }

        #[test]
        fn zygmund_lower_bound_c(t in 1e-6f64..0.9) {
            // For doubling omega, omega_Z >= c omega with c away from 0.
            let g = GrowthFunction::power(0.5, 1.0).unwrap();
            let z = g.zygmund_transform(t, &q()).unwrap();
            prop_assert!(z >= 0.05 * g.eval(t).unwrap());
        }
    }
}
