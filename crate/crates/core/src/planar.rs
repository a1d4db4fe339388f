//! Planar motion along the four axis directions `d0 = (1,0)`, `d1 = (0,1)`,
//! `d2 = (-1,0)`, `d3 = (0,-1)`.
//!
//! At rate `λ` the direction turns to a neighbour: `d0 <-> d1` and
//! `d2 <-> d3` with probability `p`, `d1 <-> d2` and `d3 <-> d0` with
//! probability `1-p`. In the rotated coordinates `A = U+V`, `B = U-V` the
//! first kind of turn flips only `B` and the second only `A`, so `A` and `B`
//! are independent telegraph motions with rates `λ(1-p)` and `λp`.

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, ensure_positive, Error, Result};
use crate::rng::exp_time;
use crate::telegraph::kernel;
use crate::velocitymap::{Family, VelocityModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarParams {
    pub lambda: f64,
    pub c: f64,
    pub p: f64,
}

impl PlanarParams {
    pub fn new(lambda: f64, c: f64, p: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        ensure_positive("c", c)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("p must lie in [0, 1], got {p}")));
        }
        Ok(Self { lambda, c, p })
    }

    /// Flip rate of `A = U + V`.
    pub fn rate_a(&self) -> f64 {
        self.lambda * (1.0 - self.p)
    }

    /// Flip rate of `B = U - V`.
    pub fn rate_b(&self) -> f64 {
        self.lambda * self.p
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.p != 0.5 {
            return Err(Error::Parameter(format!(
                "side laws are available for p = 1/2 only, got p = {}",
                self.p
            )));
        }
        Ok(())
    }
}

/// Unit velocity of direction `d`.
pub const DIRECTIONS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];

/// Neighbour reached by a `p`-turn (flips `B`).
#[inline]
pub fn turn_b(d: u8) -> u8 {
    d ^ 1
}

/// Neighbour reached by a `(1-p)`-turn (flips `A`).
#[inline]
pub fn turn_a(d: u8) -> u8 {
    3 - d
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    pub horizon: f64,
    pub c: f64,
    pub event_times: Vec<f64>,
    /// Direction on `[event_times[k-1], event_times[k])`; one more entry
    /// than `event_times`.
    pub directions: Vec<u8>,
}

impl PlanarPath {
    pub fn position(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, self.horizon);
        let (mut u, mut v) = (0.0, 0.0);
        let mut prev = 0.0;
        for (k, &d) in self.directions.iter().enumerate() {
            let end = self.event_times.get(k).copied().unwrap_or(t).min(t);
            let (du, dv) = DIRECTIONS[d as usize];
            u += du * (end - prev);
            v += dv * (end - prev);
            prev = end;
            if end >= t {
                break;
            }
        }
        (self.c * u, self.c * v)
    }
}

/// Endpoint of a planar path with the bookkeeping needed for boundary laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarEndpoint {
    pub u: f64,
    pub v: f64,
    /// Bit `d` set when direction `d` was used.
    pub used: u8,
    pub events: u32,
    pub flips_a: u32,
    pub flips_b: u32,
}

impl PlanarEndpoint {
    /// On the boundary of the square: `A` or `B` never flipped.
    pub fn on_boundary(&self) -> bool {
        self.flips_a == 0 || self.flips_b == 0
    }

    /// On the open side `u + v = ct`: only `d0` and `d1` were used, both of
    /// them.
    pub fn on_side_one(&self) -> bool {
        self.used == 0b0011
    }

    pub fn at_corner(&self) -> bool {
        self.events == 0
    }
}

fn step<R: Rng + ?Sized>(d: u8, p: f64, rng: &mut R) -> (u8, bool) {
    if rng.gen::<f64>() < p {
        (turn_b(d), false)
    } else {
        (turn_a(d), true)
    }
}

pub fn sample_planar<R: Rng + ?Sized>(
    params: &PlanarParams,
    horizon: f64,
    rng: &mut R,
) -> Result<PlanarPath> {
    ensure_positive("horizon", horizon)?;
    let mut d: u8 = rng.gen_range(0..4);
    let mut directions = vec![d];
    let mut event_times = Vec::new();
    let mut s = exp_time(rng, params.lambda);
    while s < horizon {
        event_times.push(s);
        d = step(d, params.p, rng).0;
        directions.push(d);
        s += exp_time(rng, params.lambda);
    }
    Ok(PlanarPath {
        horizon,
        c: params.c,
        event_times,
        directions,
    })
}

/// Endpoint at `t` without storing the path; consumes the stream exactly
/// like [`sample_planar`].
pub fn sample_planar_endpoint<R: Rng + ?Sized>(
    params: &PlanarParams,
    t: f64,
    rng: &mut R,
) -> PlanarEndpoint {
    let mut d: u8 = rng.gen_range(0..4);
    let mut used = 1u8 << d;
    let (mut u, mut v) = (0.0, 0.0);
    let (mut events, mut flips_a, mut flips_b) = (0, 0, 0);
    let mut prev = 0.0;
    let mut s = exp_time(rng, params.lambda);
    while s < t {
        let (du, dv) = DIRECTIONS[d as usize];
        u += du * (s - prev);
        v += dv * (s - prev);
        prev = s;
        let (next, flipped_a) = step(d, params.p, rng);
        d = next;
        used |= 1 << d;
        events += 1;
        if flipped_a {
            flips_a += 1;
        } else {
            flips_b += 1;
        }
        s += exp_time(rng, params.lambda);
    }
    let (du, dv) = DIRECTIONS[d as usize];
    u += du * (t - prev);
    v += dv * (t - prev);
    PlanarEndpoint {
        u: params.c * u,
        v: params.c * v,
        used,
        events,
        flips_a,
        flips_b,
    }
}

/// Probability that `(U(t), V(t))` lies on the boundary of the square.
pub fn boundary_probability(params: &PlanarParams, t: f64) -> f64 {
    (-params.rate_a() * t).exp() + (-params.rate_b() * t).exp() - (-params.lambda * t).exp()
}

/// Interior density `g(u,v) = 2 k_{λ(1-p)}(u+v) k_{λp}(u-v)`.
pub fn interior_density_uv(params: &PlanarParams, u: f64, v: f64, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    let ct = params.c * t;
    let (a, b) = (u + v, u - v);
    if !(a.abs() < ct && b.abs() < ct) {
        return domain(format!("({u}, {v}) is outside the open square |u±v| < {ct}"));
    }
    Ok(2.0 * kernel(params.rate_a(), params.c, t, a) * kernel(params.rate_b(), params.c, t, b))
}

/// Density of the position `η = U - V` along the side `u + v = ct`:
/// `½ e^{-λt/2} k_{λ/2}(η)`.
#[allow(non_snake_case)]
pub fn side_density_H(params: &PlanarParams, eta: f64, t: f64) -> Result<f64> {
    params.require_symmetric()?;
    ensure_positive("t", t)?;
    let ct = params.c * t;
    if !(eta.abs() < ct) {
        return domain(format!("side coordinate needs |η| < {ct}, got {eta}"));
    }
    let mu = 0.5 * params.lambda;
    Ok(0.5 * (-mu * t).exp() * kernel(mu, params.c, t, eta))
}

/// Density of the abscissa `U` along the side `u + v = ct`:
/// `q(u,t) = 2 H(2u - ct, t)`.
pub fn side_density_q(params: &PlanarParams, u: f64, t: f64) -> Result<f64> {
    params.require_symmetric()?;
    ensure_positive("t", t)?;
    let ct = params.c * t;
    if !(u > 0.0 && u < ct) {
        return domain(format!("side abscissa needs 0 < u < {ct}, got {u}"));
    }
    Ok(2.0 * side_density_H(params, 2.0 * u - ct, t)?)
}

/// Probability of the open side `u + v = ct`: `½(e^{-λt/2} - e^{-λt})`.
pub fn side_probability(params: &PlanarParams, t: f64) -> f64 {
    0.5 * ((-0.5 * params.lambda * t).exp() - (-params.lambda * t).exp())
}

/// Interior density of `(X, Y) = (W^{-1}(U), W^{-1}(V))`, both coordinates
/// mapped through the same model.
pub fn wrapped_density_xy(
    model: &VelocityModel,
    params: &PlanarParams,
    x: f64,
    y: f64,
    t: f64,
) -> Result<f64> {
    let (lo, hi) = model.state_space();
    if !(x > lo && x < hi && y > lo && y < hi) {
        return domain(format!("({x}, {y}) is outside the state space"));
    }
    let g = interior_density_uv(params, model.w(x), model.w(y), t)?;
    Ok(g * model.c * model.c / (model.v(x) * model.v(y)))
}

/// Density of the abscissa along the mapped side `R¹_t`:
/// `h(x,t) = q(W(x), t) c / v(x)`.
pub fn wrapped_boundary_abscissa(
    model: &VelocityModel,
    params: &PlanarParams,
    x: f64,
    t: f64,
) -> Result<f64> {
    let (lo, hi) = model.state_space();
    if !(x > lo && x < hi) {
        return domain(format!("x = {x} is outside the state space"));
    }
    let z = model.w(x);
    Ok(side_density_q(params, z, t)? * model.c / model.v(x))
}

/// The four sides of the support boundary as polylines with `points`
/// vertices each, in the order `A = +ct`, `B = -ct`, `A = -ct`, `B = +ct`.
pub fn support_boundary(
    model: &VelocityModel,
    t: f64,
    points: usize,
) -> Result<[Vec<(f64, f64)>; 4]> {
    match model.family {
        Family::Constant | Family::SymLogistic => {}
        _ => {
            return Err(Error::Model(format!(
                "support boundary is drawn for constant and symlogistic models, not {}",
                model.name()
            )))
        }
    }
    ensure_positive("t", t)?;
    let ct = model.c * t;
    let n = points.max(2);
    let side = |fixed_a: Option<f64>, fixed_b: Option<f64>| -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let s = -ct + 2.0 * ct * i as f64 / (n - 1) as f64;
                let a = fixed_a.unwrap_or(s);
                let b = fixed_b.unwrap_or(s);
                let (u, v) = (0.5 * (a + b), 0.5 * (a - b));
                (model.w_inv(u), model.w_inv(v))
            })
            .collect()
    };
    Ok([
        side(Some(ct), None),
        side(None, Some(-ct)),
        side(Some(-ct), None),
        side(None, Some(ct)),
    ])
}
