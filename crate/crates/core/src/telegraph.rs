//! The constant-speed telegraph process `T(t) = V(0) c ∫_0^t (-1)^{N(u)} du`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, ensure_positive, Error, Result};
use crate::mc::MixedLaw;
use crate::quad;
use crate::rng::{exp_time, sign};
use crate::specfun::{gamma_half, i0_scaled, i1_over_x_scaled, HalfIntOrder};

/// Largest `n` served by [`moment_even`].
pub const MAX_MOMENT: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TelegraphParams {
    pub lambda: f64,
    pub c: f64,
}

impl TelegraphParams {
    pub fn new(lambda: f64, c: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        ensure_positive("c", c)?;
        Ok(Self { lambda, c })
    }
}

/// One telegraph trajectory on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub horizon: f64,
    /// +1 or -1.
    pub initial_direction: i8,
    pub event_times: Vec<f64>,
    pub params: TelegraphParams,
}

impl PathSample {
    /// Direction-signed segments `(start, end, ±1)` covering `[0, t]`.
    pub fn segments(&self, t: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let t = t.clamp(0.0, self.horizon);
        let d0 = f64::from(self.initial_direction);
        let n = self.event_times.partition_point(|&s| s < t);
        (0..=n).map(move |k| {
            let start = if k == 0 { 0.0 } else { self.event_times[k - 1] };
            let end = if k == n { t } else { self.event_times[k] };
            let dir = if k % 2 == 0 { d0 } else { -d0 };
            (start, end, dir)
        })
    }

    /// `T(t)`; `t` is clamped to `[0, horizon]`.
    pub fn position(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (s, e, d) in self.segments(t) {
            acc += d * (e - s);
        }
        self.params.c * acc
    }

    /// Number of switches in `(0, t]`.
    pub fn events_before(&self, t: f64) -> usize {
        self.event_times.partition_point(|&s| s <= t)
    }

    /// First time `T` reaches `level`, if it does by the horizon.
    pub fn first_hitting_time(&self, level: f64) -> Option<f64> {
        if level == 0.0 {
            return Some(0.0);
        }
        let c = self.params.c;
        let mut x = 0.0;
        for (s, e, d) in self.segments(self.horizon) {
            let next = x + c * d * (e - s);
            if (level - x) * (level - next) <= 0.0 {
                return Some(s + (level - x) / (c * d));
            }
            x = next;
        }
        None
    }
}

pub fn sample_path<R: Rng + ?Sized>(
    params: &TelegraphParams,
    horizon: f64,
    rng: &mut R,
) -> Result<PathSample> {
    ensure_positive("horizon", horizon)?;
    let initial_direction = sign(rng) as i8;
    let mut event_times = Vec::new();
    let mut s = exp_time(rng, params.lambda);
    while s < horizon {
        event_times.push(s);
        s += exp_time(rng, params.lambda);
    }
    Ok(PathSample {
        horizon,
        initial_direction,
        event_times,
        params: *params,
    })
}

/// `T(t)` without storing the path. Consumes the stream exactly like
/// [`sample_path`], so both return the same endpoint for the same stream.
pub fn sample_endpoint<R: Rng + ?Sized>(params: &TelegraphParams, t: f64, rng: &mut R) -> f64 {
    let mut dir = sign(rng);
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut s = exp_time(rng, params.lambda);
    while s < t {
        acc += dir * (s - prev);
        dir = -dir;
        prev = s;
        s += exp_time(rng, params.lambda);
    }
    acc += dir * (t - prev);
    params.c * acc
}

/// Continuous part of the law at `z` of a speed-`c` telegraph motion whose
/// direction flips at rate `mu`:
/// `e^{-μt}/(2c) [μ I_0(w) + ∂_t I_0(w)]` with `w = (μ/c)√(c²t²-z²)`.
///
/// The time derivative is `I_1(w) μ² t / w`; `I_1(w)/w` is finite at `w = 0`,
/// so the kernel is bounded up to the endpoints. Callers check `|z| < ct`.
pub fn kernel(mu: f64, c: f64, t: f64, z: f64) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let ct = c * t;
    let r = ((ct - z) * (ct + z)).max(0.0).sqrt();
    let w = mu * r / c;
    let mt = mu * t;
    mu / (2.0 * c) * (w - mt).exp() * (i0_scaled(w) + mt * i1_over_x_scaled(w))
}

/// Continuous density of `T(t)` on `(-ct, ct)`.
pub fn density(params: &TelegraphParams, z: f64, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    let ct = params.c * t;
    if !(z.abs() < ct) {
        return domain(format!("density needs |z| < ct = {ct}, got z = {z}"));
    }
    Ok(kernel(params.lambda, params.c, t, z))
}

/// Mass at each endpoint `±ct`.
pub fn atom_mass(params: &TelegraphParams, t: f64) -> f64 {
    0.5 * (-params.lambda * t).exp()
}

/// `E[T(t)^{2n}]` in closed form.
///
/// Uses `e^{-λt}(ct)^{2n}(2/λt)^{n-1/2}Γ(n+1/2)[I_{n+1/2}+I_{n-1/2}](λt)`.
/// For `λt <= 30` the powers of `2/λt` are folded into the Bessel series to
/// stay finite as `λt -> 0`.
pub fn moment_even(params: &TelegraphParams, n: u32, t: f64) -> Result<f64> {
    if n > MAX_MOMENT {
        return Err(Error::Range(format!(
            "even moments are served for n <= {MAX_MOMENT}, got {n}"
        )));
    }
    if !(t >= 0.0) {
        return domain(format!("moment needs t >= 0, got {t}"));
    }
    if n == 0 {
        return Ok(1.0);
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = params.lambda * t;
    let ct2n = (params.c * t).powi(2 * n as i32);
    let g = gamma_half(n);
    if x <= 30.0 {
        // (2/x)^ν I_ν(x) = Σ_k (x²/4)^k / (k! Γ(k+ν+1))
        let reduced = |m: u32| -> f64 {
            // ν = m - 1/2, Γ(k+ν+1) = Γ(k+m+1/2)
            let q = 0.25 * x * x;
            let mut term = 1.0 / gamma_half(m);
            let mut sum = term;
            for k in 0..500u32 {
                term *= q / ((f64::from(k) + 1.0) * (f64::from(k + m) + 0.5));
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
            }
            sum
        };
        let bracket = 0.5 * x * reduced(n + 1) + reduced(n);
        Ok((-x).exp() * ct2n * g * bracket)
    } else {
        let hi = crate::specfun::bessel_i_scaled(HalfIntOrder::half(n as i32)?, x)?;
        let lo = crate::specfun::bessel_i_scaled(HalfIntOrder::half(n as i32 - 1)?, x)?;
        let pow = (2.0 / x).powf(f64::from(n) - 0.5);
        Ok(ct2n * pow * g * (hi + lo))
    }
}

/// Right-continuous CDF of `T(t)`, atoms included.
pub fn cdf(params: &TelegraphParams, z: f64, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    let ct = params.c * t;
    if z < -ct {
        return Ok(0.0);
    }
    if z >= ct {
        return Ok(1.0);
    }
    if z == 0.0 {
        return Ok(0.5);
    }
    let left = |y: f64| -> f64 {
        atom_mass(params, t)
            + quad::simpson(&|u| kernel(params.lambda, params.c, t, u), -ct, y, 1e-12)
    };
    // No interior atoms, so F(z) = 1 - F(-z) on (-ct, ct).
    Ok(if z < 0.0 { left(z) } else { 1.0 - left(-z) })
}

/// Point mass of a mixed law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

type ContinuousFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type AtomsFn = Arc<dyn Fn(f64) -> Vec<Atom> + Send + Sync>;
type SupportFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Time-indexed law made of a continuous density on a support interval plus
/// finitely many atoms.
#[derive(Clone)]
pub struct AnalyticDensity {
    continuous: ContinuousFn,
    atoms: AtomsFn,
    support: SupportFn,
}

impl AnalyticDensity {
    pub fn new(
        continuous: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        atoms: impl Fn(f64) -> Vec<Atom> + Send + Sync + 'static,
        support: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self {
            continuous: Arc::new(continuous),
            atoms: Arc::new(atoms),
            support: Arc::new(support),
        }
    }

    /// Continuous part at `x`; zero outside the open support.
    pub fn density(&self, x: f64, t: f64) -> f64 {
        let (lo, hi) = (self.support)(t);
        if x > lo && x < hi {
            (self.continuous)(x, t)
        } else {
            0.0
        }
    }

    pub fn atoms(&self, t: f64) -> Vec<Atom> {
        (self.atoms)(t)
    }

    pub fn support(&self, t: f64) -> (f64, f64) {
        (self.support)(t)
    }

    /// Atom masses plus quadrature of the continuous part.
    pub fn total_mass(&self, t: f64, tol: f64) -> f64 {
        let (lo, hi) = self.support(t);
        let atoms: f64 = self.atoms(t).iter().map(|a| a.mass).sum();
        atoms + quad::simpson(&|x| (self.continuous)(x, t), lo, hi, tol)
    }

    /// The law frozen at time `t`.
    pub fn at(&self, t: f64) -> FixedTime {
        FixedTime {
            law: self.clone(),
            t,
        }
    }
}

impl std::fmt::Debug for AnalyticDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticDensity").finish_non_exhaustive()
    }
}

/// An [`AnalyticDensity`] at a fixed time, usable as a goodness-of-fit target.
#[derive(Debug, Clone)]
pub struct FixedTime {
    law: AnalyticDensity,
    t: f64,
}

impl FixedTime {
    fn atom_mass_below(&self, x: f64, inclusive: bool) -> f64 {
        self.law
            .atoms(self.t)
            .iter()
            .filter(|a| a.location < x || (inclusive && a.location == x))
            .map(|a| a.mass)
            .sum()
    }
}

impl MixedLaw for FixedTime {
    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.law.support(self.t);
        let cont = if x <= lo {
            0.0
        } else {
            let top = x.min(hi);
            quad::simpson(&|u| (self.law.continuous)(u, self.t), lo, top, 1e-12)
        };
        (cont + self.atom_mass_below(x, true)).min(1.0)
    }

    fn atoms(&self) -> Vec<Atom> {
        self.law.atoms(self.t)
    }

    fn cdf_sorted(&self, xs: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.law.support(self.t);
        let clipped: Vec<f64> = xs.iter().map(|&x| x.clamp(lo, hi)).collect();
        let cont = quad::cumulative(&|u| (self.law.continuous)(u, self.t), lo, &clipped, 1e-13);
        xs.iter()
            .zip(cont)
            .map(|(&x, c)| (c + self.atom_mass_below(x, true)).min(1.0))
            .collect()
    }
}

/// Law of `T(t)` as an [`AnalyticDensity`].
pub fn law(params: &TelegraphParams) -> AnalyticDensity {
    let p = *params;
    AnalyticDensity::new(
        move |z, t| kernel(p.lambda, p.c, t, z),
        move |t| {
            let m = atom_mass(&p, t);
            vec![
                Atom {
                    location: -(p.c * t),
                    mass: m,
                },
                Atom {
                    location: p.c * t,
                    mass: m,
                },
            ]
        },
        move |t| (-(p.c * t), p.c * t),
    )
}
