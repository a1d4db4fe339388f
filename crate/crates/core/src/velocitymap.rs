//! Motions with space-varying speed `v(x)`, obtained from a telegraph path
//! through the monotone map `W(x) = c ∫_{x0}^x dw / v(w)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, ensure_positive, Error, Result};
use crate::eulergen::{euler_family, eval_poly};
use crate::quad;
use crate::specfun::gamma_half;
use crate::telegraph::{self, Atom, PathSample, TelegraphParams, MAX_MOMENT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerVariant {
    Reflect,
    Absorb,
}

/// How a boundary of the state space behaves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Barrier {
    /// The state space is unbounded on this side.
    Open,
    /// `v` vanishes at linear rate; the point is approached but never hit.
    Unreachable,
    /// `v` vanishes sublinearly; the point can be hit from time `t_star` on.
    Reachable { t_star: f64 },
}

#[derive(Clone)]
pub enum Family {
    Constant,
    Linear,
    Power { alpha: f64, variant: PowerVariant },
    Logistic,
    SymLogistic,
    /// Arbitrary profile on `(lo, hi)`, with `W` by quadrature.
    Numeric {
        v: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lo: f64,
        hi: f64,
    },
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Constant => write!(f, "Constant"),
            Family::Linear => write!(f, "Linear"),
            Family::Power { alpha, variant } => write!(f, "Power({alpha}, {variant:?})"),
            Family::Logistic => write!(f, "Logistic"),
            Family::SymLogistic => write!(f, "SymLogistic"),
            Family::Numeric { lo, hi, .. } => write!(f, "Numeric({lo}, {hi})"),
        }
    }
}

/// A speed profile with its integral map and inverse.
#[derive(Debug, Clone)]
pub struct VelocityModel {
    pub family: Family,
    pub c: f64,
    pub x0: f64,
}

/// Support of `X(t)` with the mass carried by each endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
    pub atom_mass: f64,
}

impl VelocityModel {
    pub fn constant(c: f64, x0: f64) -> Result<Self> {
        Self::build(Family::Constant, c, x0)
    }

    /// `v(x) = cx`, the geometric telegraph process.
    pub fn linear(c: f64, x0: f64) -> Result<Self> {
        Self::build(Family::Linear, c, x0)
    }

    /// `v(x) = c x^α`, `0 < α < 1`.
    pub fn power(c: f64, x0: f64, alpha: f64, variant: PowerVariant) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("power family needs 0 < α < 1, got {alpha}")));
        }
        Self::build(Family::Power { alpha, variant }, c, x0)
    }

    /// `v(x) = c x (1 - x)` on `(0, 1)`.
    pub fn logistic(c: f64, x0: f64) -> Result<Self> {
        Self::build(Family::Logistic, c, x0)
    }

    /// `v(x) = c (1 - x²)` on `(-1, 1)`.
    pub fn symlogistic(c: f64, x0: f64) -> Result<Self> {
        Self::build(Family::SymLogistic, c, x0)
    }

    /// Profile `v` on `(lo, hi)`; `W` and its inverse are computed
    /// numerically.
    pub fn numeric(
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lo: f64,
        hi: f64,
        c: f64,
        x0: f64,
    ) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Parameter(format!("empty interval ({lo}, {hi})")));
        }
        Self::build(
            Family::Numeric {
                v: Arc::new(v),
                lo,
                hi,
            },
            c,
            x0,
        )
    }

    fn build(family: Family, c: f64, x0: f64) -> Result<Self> {
        ensure_positive("c", c)?;
        let m = Self { family, c, x0 };
        let (lo, hi) = m.state_space();
        if !(x0 > lo && x0 < hi) || !x0.is_finite() {
            return Err(Error::Parameter(format!(
                "x0 = {x0} must lie inside the state space ({lo}, {hi})"
            )));
        }
        Ok(m)
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Constant => "constant",
            Family::Linear => "linear",
            Family::Power { .. } => "power",
            Family::Logistic => "logistic",
            Family::SymLogistic => "symlogistic",
            Family::Numeric { .. } => "numeric",
        }
    }

    /// Open interval on which `v > 0`.
    pub fn state_space(&self) -> (f64, f64) {
        match &self.family {
            Family::Constant => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Linear | Family::Power { .. } => (0.0, f64::INFINITY),
            Family::Logistic => (0.0, 1.0),
            Family::SymLogistic => (-1.0, 1.0),
            Family::Numeric { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn v(&self, x: f64) -> f64 {
        let c = self.c;
        match &self.family {
            Family::Constant => c,
            Family::Linear => c * x,
            Family::Power { alpha, .. } => c * x.powf(*alpha),
            Family::Logistic => c * x * (1.0 - x),
            Family::SymLogistic => c * (1.0 - x * x),
            Family::Numeric { v, .. } => v(x),
        }
    }

    /// `W(x) = c ∫_{x0}^x dw / v(w)`.
    pub fn w(&self, x: f64) -> f64 {
        let x0 = self.x0;
        match &self.family {
            Family::Constant => x - x0,
            Family::Linear => (x / x0).ln(),
            Family::Power { alpha, .. } => {
                let b = 1.0 - alpha;
                (x.powf(b) - x0.powf(b)) / b
            }
            Family::Logistic => logit(x) - logit(x0),
            Family::SymLogistic => x.atanh() - x0.atanh(),
            Family::Numeric { v, .. } => {
                let c = self.c;
                quad::simpson(&|u| c / v(u), x0, x, 1e-12)
            }
        }
    }

    /// Inverse of [`Self::w`].
    pub fn w_inv(&self, z: f64) -> f64 {
        let x0 = self.x0;
        match &self.family {
            Family::Constant => x0 + z,
            Family::Linear => x0 * z.exp(),
            Family::Power { alpha, .. } => {
                let b = 1.0 - alpha;
                (x0.powf(b) + b * z).max(0.0).powf(1.0 / b)
            }
            Family::Logistic => {
                let theta = x0 / (1.0 - x0);
                let e = theta * z.exp();
                if e.is_infinite() {
                    1.0
                } else {
                    e / (1.0 + e)
                }
            }
            Family::SymLogistic => (z + x0.atanh()).tanh(),
            Family::Numeric { lo, hi, .. } => self.numeric_inverse(z, *lo, *hi),
        }
    }

    fn numeric_inverse(&self, z: f64, lo: f64, hi: f64) -> f64 {
        // Bracket then bisect; W is increasing.
        let mut step = 1.0f64;
        let (mut a, mut b) = (self.x0, self.x0);
        if z > 0.0 {
            while self.w(b) < z {
                a = b;
                b = if hi.is_finite() { b + 0.5 * (hi - b) } else { b + step };
                step *= 2.0;
            }
        } else {
            while self.w(a) > z {
                b = a;
                a = if lo.is_finite() { a - 0.5 * (a - lo) } else { a - step };
                step *= 2.0;
            }
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if self.w(m) < z {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Classification of the lower and upper ends of the state space.
    pub fn barriers(&self) -> (Barrier, Barrier) {
        match &self.family {
            Family::Constant => (Barrier::Open, Barrier::Open),
            Family::Linear => (Barrier::Unreachable, Barrier::Open),
            Family::Power { .. } => (
                Barrier::Reachable {
                    t_star: self.t_star().expect("power model has t*"),
                },
                Barrier::Open,
            ),
            Family::Logistic | Family::SymLogistic => (Barrier::Unreachable, Barrier::Unreachable),
            Family::Numeric { lo, hi, .. } => {
                let classify = |edge: f64| {
                    if edge.is_finite() {
                        Barrier::Unreachable
                    } else {
                        Barrier::Open
                    }
                };
                (classify(*lo), classify(*hi))
            }
        }
    }

    /// First time the power-law motion can reach 0: `x0^{1-α} / (c(1-α))`.
    pub fn t_star(&self) -> Option<f64> {
        match self.family {
            Family::Power { alpha, .. } => {
                let b = 1.0 - alpha;
                Some(self.x0.powf(b) / (self.c * b))
            }
            _ => None,
        }
    }

    fn check_before_t_star(&self, t: f64) -> Result<()> {
        if let Some(ts) = self.t_star() {
            if t >= ts {
                return Err(Error::Model(format!(
                    "power family has no analytic law for t >= t* = {ts}"
                )));
            }
        }
        Ok(())
    }

    /// Support `[W^{-1}(-ct), W^{-1}(ct)]` with the endpoint atoms.
    pub fn support(&self, params: &TelegraphParams, t: f64) -> Result<Support> {
        ensure_positive("t", t)?;
        self.check_before_t_star(t)?;
        let ct = params.c * t;
        Ok(Support {
            lower: self.w_inv(-ct),
            upper: self.w_inv(ct),
            atom_mass: telegraph::atom_mass(params, t),
        })
    }

    /// Continuous density `f(x,t) = c p(W(x), t) / v(x)`.
    ///
    /// `params.c` must equal the model's reference speed.
    pub fn density_x(&self, params: &TelegraphParams, x: f64, t: f64) -> Result<f64> {
        ensure_positive("t", t)?;
        self.check_before_t_star(t)?;
        let (lo, hi) = self.state_space();
        if !(x > lo && x < hi) {
            return domain(format!("x = {x} is outside the state space ({lo}, {hi})"));
        }
        let z = self.w(x);
        let ct = params.c * t;
        if !(z.abs() < ct) {
            return domain(format!("x = {x} is outside the open support at t = {t}"));
        }
        Ok(self.c * telegraph::kernel(params.lambda, params.c, t, z) / self.v(x))
    }

    /// Law of `X(t)` for this model.
    pub fn law(&self, params: &TelegraphParams) -> telegraph::AnalyticDensity {
        let (m, p) = (self.clone(), *params);
        let (m2, m3) = (self.clone(), self.clone());
        telegraph::AnalyticDensity::new(
            move |x, t| m.density_x(&p, x, t).unwrap_or(0.0),
            move |t| {
                let ct = p.c * t;
                let mass = telegraph::atom_mass(&p, t);
                vec![
                    Atom {
                        location: m2.w_inv(-ct),
                        mass,
                    },
                    Atom {
                        location: m2.w_inv(ct),
                        mass,
                    },
                ]
            },
            move |t| (m3.w_inv(-p.c * t), m3.w_inv(p.c * t)),
        )
    }

    /// Pathwise image `X(t)` of a telegraph path.
    pub fn transform_path<'a>(&'a self, path: &'a PathSample) -> MappedPath<'a> {
        let absorb_at = match self.family {
            Family::Power {
                alpha,
                variant: PowerVariant::Absorb,
            } => {
                let b = 1.0 - alpha;
                path.first_hitting_time(-self.x0.powf(b) / b)
            }
            _ => None,
        };
        MappedPath {
            model: self,
            path,
            absorb_at,
        }
    }

    /// Endpoint `X(t)` from a telegraph endpoint, for families whose map
    /// does not depend on the path history (everything but power/absorb).
    pub fn map_endpoint(&self, z: f64) -> f64 {
        match self.family {
            Family::Power {
                alpha,
                variant: PowerVariant::Reflect,
            } => {
                let b = 1.0 - alpha;
                (self.x0.powf(b) + b * z).abs().powf(1.0 / b)
            }
            _ => self.w_inv(z),
        }
    }
}

fn logit(x: f64) -> f64 {
    (x / (1.0 - x)).ln()
}

/// A telegraph path seen through a velocity model.
#[derive(Debug, Clone, Copy)]
pub struct MappedPath<'a> {
    model: &'a VelocityModel,
    path: &'a PathSample,
    absorb_at: Option<f64>,
}

impl MappedPath<'_> {
    pub fn position(&self, t: f64) -> f64 {
        match self.absorb_at {
            Some(tau) if t >= tau => 0.0,
            _ => self.model.map_endpoint(self.path.position(t)),
        }
    }

    /// Absorption time at 0, for the absorbing power variant.
    pub fn absorbed_at(&self) -> Option<f64> {
        self.absorb_at
    }
}

/// Truncated moment series with the size of its last included term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub last_term: f64,
    pub terms: u32,
    /// Set when the last term exceeds `1e-8·|value|`.
    pub warning: bool,
}

fn check_moment_args(a: f64, x0: f64, n: u32) -> Result<()> {
    ensure_positive("a", a)?;
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Parameter(format!("x0 must lie in (0, 1), got {x0}")));
    }
    if n > MAX_MOMENT {
        return Err(Error::Range(format!("series truncation N must be <= {MAX_MOMENT}, got {n}")));
    }
    Ok(())
}

/// `E[X(t)^a]` for the logistic motion via
/// `x0^a Σ_{n<=N} E_{2n}^{(a,θ)}(a)/(2n)! · E[T(t)^{2n}]`, `θ = x0/(1-x0)`.
pub fn logistic_moment(
    a: f64,
    params: &TelegraphParams,
    x0: f64,
    t: f64,
    n_max: u32,
) -> Result<SeriesValue> {
    check_moment_args(a, x0, n_max)?;
    if !(t >= 0.0) {
        return domain(format!("t must be >= 0, got {t}"));
    }
    let theta = x0 / (1.0 - x0);
    let family = euler_family(2 * n_max, a, theta)?;
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut fact = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            fact *= f64::from(2 * n - 1) * f64::from(2 * n);
        }
        let e = eval_poly(&family[2 * n as usize], a);
        last = e / fact * telegraph::moment_even(params, n, t)?;
        sum += last;
    }
    let value = x0.powf(a) * sum;
    let last_term = (x0.powf(a) * last).abs();
    Ok(SeriesValue {
        value,
        last_term,
        terms: n_max + 1,
        warning: last_term > 1e-8 * value.abs(),
    })
}

/// Hydrodynamic limit of [`logistic_moment`]:
/// `x0^a/√π Σ Γ(n+1/2) E_{2n}(a)/(2n)! (2t)^n`.
///
/// The series is asymptotic rather than convergent, so summation stops at
/// the smallest term if that comes before `N`.
pub fn logistic_moment_hydro(a: f64, x0: f64, t: f64, n_max: u32) -> Result<SeriesValue> {
    check_moment_args(a, x0, n_max)?;
    if !(t >= 0.0) {
        return domain(format!("t must be >= 0, got {t}"));
    }
    let theta = x0 / (1.0 - x0);
    let family = euler_family(2 * n_max, a, theta)?;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut fact = 1.0;
    let mut terms = 0;
    for n in 0..=n_max {
        if n > 0 {
            fact *= f64::from(2 * n - 1) * f64::from(2 * n);
        }
        let e = eval_poly(&family[2 * n as usize], a);
        let term = gamma_half(n) * e / fact * (2.0 * t).powi(n as i32) / sqrt_pi;
        if n > 1 && term.abs() > last.abs() {
            break;
        }
        sum += term;
        last = term;
        terms += 1;
    }
    let value = x0.powf(a) * sum;
    let last_term = (x0.powf(a) * last).abs();
    Ok(SeriesValue {
        value,
        last_term,
        terms,
        warning: last_term > 1e-8 * value.abs(),
    })
}
