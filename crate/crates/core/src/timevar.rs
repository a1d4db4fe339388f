//! Telegraph motion with time-dependent speed `cσ(t)`:
//! `X(t) = ∫_0^t σ(u) dT(u)`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{ensure_positive, Error, Result};
use crate::quad;
use crate::rng::{exp_time, sign};
use crate::telegraph::{sample_path as sample_telegraph, PathSample, TelegraphParams};

/// Speed modulation `σ(t) > 0`.
#[derive(Clone)]
pub enum SigmaProfile {
    Constant(f64),
    /// `σ(u) = slope · u`.
    Linear(f64),
    /// `σ(u) = a + b u`.
    Affine { a: f64, b: f64 },
    Tabulated(Pchip),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for SigmaProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(s) => write!(f, "Constant({s})"),
            Self::Linear(s) => write!(f, "Linear({s})"),
            Self::Affine { a, b } => write!(f, "Affine({a}, {b})"),
            Self::Tabulated(p) => write!(f, "Tabulated({} knots)", p.t.len()),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl SigmaProfile {
    pub fn sigma(&self, u: f64) -> f64 {
        match self {
            Self::Constant(s) => *s,
            Self::Linear(k) => k * u,
            Self::Affine { a, b } => a + b * u,
            Self::Tabulated(p) => p.eval(u),
            Self::Custom(f) => f(u),
        }
    }

    /// `∫_a^b σ`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Constant(s) => s * (b - a),
            Self::Linear(k) => 0.5 * k * (b * b - a * a),
            Self::Affine { a: c0, b: c1 } => c0 * (b - a) + 0.5 * c1 * (b * b - a * a),
            Self::Tabulated(p) => quad::simpson_breaks(&|u| p.eval(u), a, b, &p.t, 1e-10),
            Self::Custom(f) => quad::simpson(&|u| f(u), a, b, 1e-10),
        }
    }

    /// `∫_0^t σ²`.
    pub fn integral_sq(&self, t: f64) -> f64 {
        match self {
            Self::Constant(s) => s * s * t,
            Self::Linear(k) => k * k * t.powi(3) / 3.0,
            Self::Affine { a, b } => a * a * t + a * b * t * t + b * b * t.powi(3) / 3.0,
            Self::Tabulated(p) => quad::simpson_breaks(&|u| p.eval(u).powi(2), 0.0, t, &p.t, 1e-12),
            Self::Custom(f) => quad::simpson(&|u| f(u).powi(2), 0.0, t, 1e-12),
        }
    }

    /// `σ` multiplied by a constant.
    pub fn scaled(&self, k: f64) -> SigmaProfile {
        match self {
            Self::Constant(s) => Self::Constant(k * s),
            Self::Linear(s) => Self::Linear(k * s),
            Self::Affine { a, b } => Self::Affine { a: k * a, b: k * b },
            Self::Tabulated(p) => Self::Tabulated(Pchip {
                t: p.t.clone(),
                y: p.y.iter().map(|y| k * y).collect(),
                d: p.d.iter().map(|d| k * d).collect(),
            }),
            Self::Custom(f) => {
                let f = f.clone();
                Self::Custom(Arc::new(move |u| k * f(u)))
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Tabulated(p) => p.t.clone(),
            _ => Vec::new(),
        }
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes),
/// held constant outside the knot range.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    t: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() || t.len() < 2 {
            return Err(Error::Parameter("tabulated σ needs at least two (t, σ) knots".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("tabulated σ knots must be strictly increasing in t".into()));
        }
        if y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Parameter("tabulated σ values must be positive".into()));
        }
        let n = t.len();
        let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { t, y, d })
    }

    /// Parses `t,σ` lines; blank lines, `#` comments and a non-numeric
    /// header line are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut ts = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let (a, b) = match (parts.next(), parts.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Parameter(format!(
                        "line {}: expected `t,sigma`",
                        lineno + 1
                    )))
                }
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(y)) => {
                    ts.push(t);
                    ys.push(y);
                }
                _ if ts.is_empty() => continue,
                _ => {
                    return Err(Error::Parameter(format!(
                        "line {}: cannot parse `{line}`",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(ts, ys)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let n = self.t.len();
        if u <= self.t[0] {
            return self.y[0];
        }
        if u >= self.t[n - 1] {
            return self.y[n - 1];
        }
        let i = self.t.partition_point(|&x| x <= u) - 1;
        let h = self.t[i + 1] - self.t[i];
        let s = (u - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// A telegraph path integrated against `σ`.
#[derive(Debug, Clone)]
pub struct TimeVarPath {
    pub path: PathSample,
    pub profile: SigmaProfile,
}

impl TimeVarPath {
    pub fn position(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (s, e, d) in self.path.segments(t) {
            acc += d * self.profile.integral(s, e);
        }
        self.path.params.c * acc
    }
}

pub fn sample_path<R: Rng + ?Sized>(
    profile: &SigmaProfile,
    params: &TelegraphParams,
    horizon: f64,
    rng: &mut R,
) -> Result<TimeVarPath> {
    Ok(TimeVarPath {
        path: sample_telegraph(params, horizon, rng)?,
        profile: profile.clone(),
    })
}

/// `X(t)` without storing the path; same stream usage as [`sample_path`].
pub fn sample_endpoint<R: Rng + ?Sized>(
    profile: &SigmaProfile,
    params: &TelegraphParams,
    t: f64,
    rng: &mut R,
) -> f64 {
    let mut dir = sign(rng);
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut s = exp_time(rng, params.lambda);
    while s < t {
        acc += dir * profile.integral(prev, s);
        dir = -dir;
        prev = s;
        s += exp_time(rng, params.lambda);
    }
    acc += dir * profile.integral(prev, t);
    params.c * acc
}

/// `Cov(X(s), X(t)) = c² ∫_0^t ∫_0^s e^{-2λ|x-y|} σ(x) σ(y) dy dx`.
///
/// For `s <= t` the domain splits into the square `[0,s]²` and the strip
/// `[s,t]×[0,s]`. On the strip the kernel factorizes. On the square the
/// rotated coordinates `u = (x+y)/2`, `v = (x-y)/2` isolate the `e^{-4λv}`
/// factor.
pub fn covariance(profile: &SigmaProfile, params: &TelegraphParams, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::Domain(format!("covariance needs s, t >= 0, got ({s}, {t})")));
    }
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    if s == 0.0 {
        return Ok(0.0);
    }
    let lambda = params.lambda;
    let sig = |u: f64| profile.sigma(u);
    let knots = profile.breakpoints();

    // Square: 4 ∫_0^s du ∫_0^{min(u, s-u)} e^{-4λv} σ(u+v) σ(u-v) dv.
    let decay = 30.0 / (4.0 * lambda);
    let inner = |u: f64| -> f64 {
        let m = u.min(s - u);
        if m <= 0.0 {
            return 0.0;
        }
        let mut breaks = vec![decay.min(m)];
        for &k in &knots {
            breaks.push((k - u).abs());
        }
        quad::simpson_breaks(
            &|v| (-4.0 * lambda * v).exp() * sig(u + v) * sig(u - v),
            0.0,
            m,
            &breaks,
            1e-14,
        )
    };
    let delta = (0.25 * s).min(10.0 / (4.0 * lambda));
    let mut outer_breaks = vec![0.5 * s, delta, s - delta];
    outer_breaks.extend(knots.iter().copied());
    let square = 4.0 * quad::simpson_breaks(&inner, 0.0, s, &outer_breaks, 1e-12);

    // Strip: [∫_s^t e^{-2λ(x-s)} σ(x) dx] · [∫_0^s e^{-2λ(s-y)} σ(y) dy].
    let edge = 30.0 / (2.0 * lambda);
    let mut right_breaks = vec![s + edge];
    right_breaks.extend(knots.iter().copied());
    let right = quad::simpson_breaks(&|x| (-2.0 * lambda * (x - s)).exp() * sig(x), s, t, &right_breaks, 1e-13);
    let mut left_breaks = vec![s - edge];
    left_breaks.extend(knots.iter().copied());
    let left = quad::simpson_breaks(&|y| (-2.0 * lambda * (s - y)).exp() * sig(y), 0.0, s, &left_breaks, 1e-13);

    Ok(params.c * params.c * (square + right * left))
}

/// Closed form of the variance for `σ ≡ 1`:
/// `(c²/λ)t - (c²/2λ²)(1 - e^{-2λt})`.
pub fn unit_sigma_variance(params: &TelegraphParams, t: f64) -> f64 {
    let (l, c2) = (params.lambda, params.c * params.c);
    c2 / l * t - c2 / (2.0 * l * l) * (-(-2.0 * l * t).exp_m1())
}

/// Hydrodynamic-limit covariance `∫_0^{min(s,t)} σ²`.
pub fn limit_covariance(profile: &SigmaProfile, s: f64, t: f64) -> f64 {
    profile.integral_sq(s.min(t))
}

/// Hydrodynamic-limit density: centred Gaussian with variance `∫_0^t σ²`.
pub fn limit_density(profile: &SigmaProfile, x: f64, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    let var = profile.integral_sq(t);
    Ok((-0.5 * x * x / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn unit_sigma_reproduces_telegraph() {
        let p = TelegraphParams::new(2.0, 1.5).unwrap();
        let path = sample_path(&SigmaProfile::Constant(1.0), &p, 1.0, &mut stream(3, 1)).unwrap();
        for t in [0.2, 0.7, 1.0] {
            assert!((path.position(t) - path.path.position(t)).abs() < 1e-14);
        }
        let lazy = TelegraphParams::new(1e-12, 2.0).unwrap();
        let x = sample_endpoint(&SigmaProfile::Linear(1.0), &lazy, 1.5, &mut stream(0, 0));
        assert!((x.abs() - 2.0 * 1.5 * 1.5 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn covariance_closed_form() {
        for &(lambda, c, t) in &[(1.0, 1.0, 1.0), (0.3, 2.0, 2.5), (40.0, 1.0, 0.7)] {
            let p = TelegraphParams::new(lambda, c).unwrap();
            let got = covariance(&SigmaProfile::Constant(1.0), &p, t, t).unwrap();
            let want = unit_sigma_variance(&p, t);
            assert!((got - want).abs() < 1e-10, "λ={lambda}: {got} vs {want}");
        }
    }

    #[test]
    fn covariance_properties() {
        let p = TelegraphParams::new(1.3, 0.8).unwrap();
        let sig = SigmaProfile::Affine { a: 0.5, b: 1.2 };
        assert_eq!(covariance(&sig, &p, 0.0, 1.0).unwrap(), 0.0);
        let a = covariance(&sig, &p, 0.4, 1.1).unwrap();
        let b = covariance(&sig, &p, 1.1, 0.4).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
        let four = covariance(&sig.scaled(2.0), &p, 0.4, 1.1).unwrap();
        assert!((four - 4.0 * a).abs() <= 1e-12 * four.abs());
        // Unit σ with s < t: c²/(4λ²)(4λs - 1 + e^{-2λs} + e^{-2λt} - e^{-2λ(t-s)})
        let one = SigmaProfile::Constant(1.0);
        let (l, s, t) = (1.3f64, 0.4, 1.1);
        let want = 0.64 / (4.0 * l * l)
            * (4.0 * l * s - 1.0 + (-2.0 * l * s).exp() + (-2.0 * l * t).exp() - (-2.0 * l * (t - s)).exp());
        assert!((covariance(&one, &p, s, t).unwrap() - want).abs() < 1e-11);
    }

    #[test]
    fn limit_quantities() {
        let lin = SigmaProfile::Linear(1.0);
        assert_eq!(limit_covariance(&SigmaProfile::Constant(1.0), 0.3, 0.8), 0.3);
        assert!((limit_covariance(&lin, 1.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        let mass = quad::simpson(&|x| limit_density(&lin, x, 1.0).unwrap(), -6.0, 6.0, 1e-13);
        assert!((mass - 1.0).abs() < 1e-10);
        let p = TelegraphParams::new(1e4, 100.0).unwrap();
        let cov = covariance(&lin, &p, 1.0, 1.0).unwrap();
        assert!((cov - 1.0 / 3.0).abs() < 0.01 / 3.0, "{cov}");
    }

    #[test]
    fn pchip_interpolates_and_stays_monotone() {
        let p = Pchip::from_csv("t,sigma\n0,1\n1,2\n2,2.5\n# note\n4,2.6\n").unwrap();
        assert_eq!(p.eval(1.0), 2.0);
        assert_eq!(p.eval(-1.0), 1.0);
        assert_eq!(p.eval(9.0), 2.6);
        let mut prev = p.eval(0.0);
        for k in 1..=400 {
            let v = p.eval(4.0 * f64::from(k) / 400.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        assert!(Pchip::from_csv("0,1\n0,2\n").is_err());
        assert!(Pchip::from_csv("0,1\n1,-2\n").is_err());
    }

    #[test]
    fn tabulated_profile_integrals() {
        let tab = SigmaProfile::Tabulated(Pchip::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap());
        // Collinear knots give the straight line 1 + u.
        assert!((tab.integral(0.2, 1.7) - SigmaProfile::Affine { a: 1.0, b: 1.0 }.integral(0.2, 1.7)).abs() < 1e-10);
        let p = TelegraphParams::new(2.0, 1.0).unwrap();
        let a = covariance(&tab, &p, 1.5, 1.5).unwrap();
        let b = covariance(&SigmaProfile::Affine { a: 1.0, b: 1.0 }, &p, 1.5, 1.5).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}
