//! Limit shapes and the flux they determine.
//!
//! For a rate-`r` homogeneous system the limit shape is
//! `tau(x, y) = (sqrt(x + y) + sqrt(y))^2 / r`. The disordered shape is
//! dominated by `tau~(x, y) = tau(x, y) - mu |x|`. From a shape one gets the
//! level function `h(t, x) = inf{y >= 0 : tau(x, y) > t} = t k(x / t)` and
//! the flux through the variational formula `f(rho) = inf_v [k(v) + v rho]`.
//! Equivalently, `f(rho) >= r/4` exactly when `max_x tau(x, 1 - x rho) <= 4/r`;
//! both routes are implemented so they can be checked against each other.

use serde::{Deserialize, Serialize};

use crate::env::DisorderLaw;
use crate::error::{Error, Result};
use crate::optimize::{bisect_threshold, golden_maximize, golden_minimize, midpoint_concave};

/// Slack for points on the boundary of the continuum wedge.
const WEDGE_SLACK: f64 = 1e-12;
/// Absolute tolerance of the level-set bisection, in `y`.
pub const LEVEL_TOL: f64 = 1e-10;
/// Argument tolerance of every golden-section search.
pub const GOLDEN_TOL: f64 = 1e-9;
/// Slack on the plateau verdict `max g <= 4/r`.
pub const PLATEAU_SLACK: f64 = 1e-9;
/// How close to zero the maximiser must be strictly inside the plateau.
pub const ARGMAX_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxSource {
    Analytic,
    Variational,
    Simulation,
    Lpp,
}

impl FluxSource {
    pub fn as_str(self) -> &'static str {
        match self {
            FluxSource::Analytic => "analytic",
            FluxSource::Variational => "variational",
            FluxSource::Simulation => "simulation",
            FluxSource::Lpp => "lpp",
        }
    }
}

/// A flux value at one density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxEstimate {
    pub rho: f64,
    pub value: f64,
    /// Standard error; 0 for analytic and variational values.
    pub sem: f64,
    pub source: FluxSource,
}

fn check_wedge(x: f64, y: f64) -> Result<()> {
    if !(x.is_finite() && y.is_finite()) || y < -WEDGE_SLACK || x + y < -WEDGE_SLACK {
        return Err(Error::Domain(format!("({x}, {y}) is outside the continuum wedge")));
    }
    Ok(())
}

/// Homogeneous limit shape `(sqrt(x + y) + sqrt(y))^2 / r`.
pub fn tau_hom(r: f64, x: f64, y: f64) -> Result<f64> {
    check_wedge(x, y)?;
    let s = (x + y).max(0.0).sqrt() + y.max(0.0).sqrt();
    Ok(s * s / r)
}

/// Homogeneous `k`: `r (1 - v/r)^2 / 4` on `[-r, r]`, `-v` below `-r`, and `0`
/// above `r`, where the level set already starts on the axis `y = 0`.
pub fn k_hom(r: f64, v: f64) -> f64 {
    if v < -r {
        -v
    } else if v > r {
        0.0
    } else {
        let w = 1.0 - v / r;
        r * w * w / 4.0
    }
}

/// Homogeneous flux `r rho (1 - rho)`.
pub fn flux_hom(r: f64, rho: f64) -> f64 {
    r * rho * (1.0 - rho)
}

/// `h(t, x) = inf{y >= 0 : tau(x, y) > t}` by bisection on `[max(0, -x), y_ceiling]`.
///
/// `tau_eval` must be nondecreasing and continuous in `y` on that ray.
pub fn h_from_tau(tau_eval: impl Fn(f64, f64) -> f64, t: f64, x: f64, y_ceiling: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("level t = {t} must be positive")));
    }
    let base = (-x).max(0.0);
    if y_ceiling < base {
        return Err(Error::Bracket(format!("ceiling {y_ceiling} is below the ray base {base}")));
    }
    bisect_threshold(|y| tau_eval(x, y) > t, base, y_ceiling, LEVEL_TOL)
}

/// A `y` at which `tau~(x, y) > t` for any shape with slow rate `r` and `mu < 1/r`.
pub fn level_ceiling(r: f64, t: f64, x: f64) -> f64 {
    4.0 * r * t + 4.0 * x.abs() + 1.0
}

/// Search interval for the variational formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl VariationalBracket {
    /// `[-1/r - 1, 1/r + 1]`, which contains the homogeneous minimiser `r (1 - 2 rho)`.
    pub fn for_rate(r: f64) -> Self {
        VariationalBracket {
            lo: -1.0 / r - 1.0,
            hi: 1.0 / r + 1.0,
            tol: GOLDEN_TOL,
        }
    }

    fn widened(self) -> Self {
        let w = self.hi - self.lo;
        VariationalBracket {
            lo: self.lo - w,
            hi: self.hi + w,
            tol: self.tol,
        }
    }
}

/// `f(rho) = inf_v [k(v) + v rho]` by golden-section search. A minimiser on
/// the bracket boundary triggers one retry on a tripled bracket, then an error.
pub fn flux_from_k(k_eval: impl Fn(f64) -> f64, rho: f64, bracket: VariationalBracket) -> Result<FluxEstimate> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("density {rho} is outside [0, 1]")));
    }
    let objective = |v: f64| k_eval(v) + v * rho;
    let mut b = bracket;
    for attempt in 0..2 {
        let e = golden_minimize(objective, b.lo, b.hi, b.tol);
        let margin = 10.0 * b.tol;
        if e.arg - b.lo > margin && b.hi - e.arg > margin {
            return Ok(FluxEstimate {
                rho,
                value: e.value,
                sem: 0.0,
                source: FluxSource::Variational,
            });
        }
        if attempt == 0 {
            b = b.widened();
        }
    }
    Err(Error::Bracket(format!(
        "variational minimiser for rho = {rho} stays on the boundary of [{}, {}]",
        b.lo, b.hi
    )))
}

/// Slow rate `r` and disorder strength `mu` of a disordered system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeModel {
    pub r: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlateauCheck {
    pub rho: f64,
    pub max_value: f64,
    pub argmax: f64,
    /// `4 / r`.
    pub threshold: f64,
    pub inside_interval: bool,
    pub pass: bool,
}

impl ShapeModel {
    pub fn new(r: f64, mu: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::param("r", format!("must be positive, got {r}")));
        }
        if !(mu.is_finite() && mu >= 0.0 && mu < 1.0 / r) {
            return Err(Error::param("mu", format!("must lie in [0, 1/r), got {mu}")));
        }
        Ok(ShapeModel { r, mu })
    }

    pub fn homogeneous(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }

    pub fn from_law(law: &DisorderLaw) -> Result<Self> {
        Self::new(law.essential_infimum()?, law.mu()?)
    }

    /// `tau~(x, y) = tau(x, y) - mu |x|`.
    pub fn tilde_tau(&self, x: f64, y: f64) -> Result<f64> {
        Ok(tau_hom(self.r, x, y)? - self.mu * x.abs())
    }

    fn tilde_tau_clamped(&self, x: f64, y: f64) -> f64 {
        let s = (x + y).max(0.0).sqrt() + y.max(0.0).sqrt();
        s * s / self.r - self.mu * x.abs()
    }

    /// `h~(t, x)` from the bound `tau~`.
    pub fn h_tilde(&self, t: f64, x: f64) -> Result<f64> {
        h_from_tau(|x, y| self.tilde_tau_clamped(x, y), t, x, level_ceiling(self.r, t, x))
    }

    /// `k~(v) = h~(1, v)`.
    pub fn k_tilde(&self, v: f64) -> f64 {
        self.h_tilde(1.0, v)
            .expect("the analytic ceiling always brackets the level set of tau~")
    }

    /// Flux of the bound shape through the variational formula.
    pub fn flux_tilde(&self, rho: f64) -> Result<FluxEstimate> {
        flux_from_k(|v| self.k_tilde(v), rho, VariationalBracket::for_rate(self.r))
    }

    /// Admissible `x` for the profile `x -> tau~(x, 1 - x rho)`.
    pub fn profile_domain(rho: f64) -> (f64, f64) {
        let lo = if rho < 1.0 { -1.0 / (1.0 - rho) } else { f64::NEG_INFINITY };
        let hi = if rho > 0.0 { 1.0 / rho } else { f64::INFINITY };
        (lo, hi)
    }

    /// `g(x) = tau~(x, 1 - x rho)`.
    pub fn g_profile(&self, rho: f64, x: f64) -> Result<f64> {
        self.tilde_tau(x, 1.0 - x * rho)
    }

    /// `[1/2 - mu r / 4, 1/2 + mu r / 4]`.
    pub fn plateau_interval(&self) -> (f64, f64) {
        let half = self.mu * self.r / 4.0;
        (0.5 - half, 0.5 + half)
    }

    /// Maximises `g` over its domain and compares with `g(0) = 4/r`.
    pub fn plateau_check(&self, rho: f64) -> Result<PlateauCheck> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain(format!("plateau check needs 0 < rho < 1, got {rho}")));
        }
        let (lo, hi) = Self::profile_domain(rho);
        let g = |x: f64| self.tilde_tau_clamped(x, 1.0 - x * rho);
        let probes: Vec<(f64, f64)> = (0..16)
            .map(|k| {
                let s = (k as f64 + 0.5) / 16.0;
                (lo + (hi - lo) * s * s, hi - (hi - lo) * s)
            })
            .collect();
        if !midpoint_concave(g, &probes, 1e-9) {
            return Err(Error::Invariant(format!("profile for rho = {rho} failed the concavity probe")));
        }
        let best = golden_maximize(g, lo, hi, GOLDEN_TOL);
        let (ilo, ihi) = self.plateau_interval();
        let inside_interval = rho > ilo && rho < ihi;
        let threshold = 4.0 / self.r;
        let pass = best.value <= threshold + PLATEAU_SLACK && (!inside_interval || best.arg.abs() <= ARGMAX_TOL);
        Ok(PlateauCheck {
            rho,
            max_value: best.value,
            argmax: best.arg,
            threshold,
            inside_interval,
            pass,
        })
    }

    /// One-sided difference quotients of `g` at `x = 0` with step `h`.
    pub fn one_sided_slopes(&self, rho: f64, h: f64) -> Result<(f64, f64)> {
        let g0 = self.g_profile(rho, 0.0)?;
        let left = (self.g_profile(rho, -h)? - g0) / -h;
        let right = (self.g_profile(rho, h)? - g0) / h;
        Ok((left, right))
    }

    /// Closed-form one-sided slopes `(2 - 4 rho)/r + mu` and `(2 - 4 rho)/r - mu`.
    pub fn slopes_closed_form(&self, rho: f64) -> (f64, f64) {
        let c = (2.0 - 4.0 * rho) / self.r;
        (c + self.mu, c - self.mu)
    }
}
