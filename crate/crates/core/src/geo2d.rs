//! Bivariate geometric telegraph model `(X, Y) = (x0 e^U, y0 e^V)` over the
//! planar motion with switching split `p`.

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, ensure_positive, Error, Result};
use crate::planar::{interior_density_uv, sample_planar, sample_planar_endpoint, PlanarParams, PlanarPath};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geo2dParams {
    pub lambda: f64,
    pub c: f64,
    pub p: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Geo2dParams {
    pub fn new(lambda: f64, c: f64, p: f64, x0: f64, y0: f64) -> Result<Self> {
        PlanarParams::new(lambda, c, p)?;
        ensure_positive("x0", x0)?;
        ensure_positive("y0", y0)?;
        Ok(Self { lambda, c, p, x0, y0 })
    }

    pub fn planar(&self) -> PlanarParams {
        PlanarParams {
            lambda: self.lambda,
            c: self.c,
            p: self.p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geo2dSample {
    pub x: f64,
    pub y: f64,
    pub path: PlanarPath,
}

pub fn sample<R: Rng + ?Sized>(params: &Geo2dParams, horizon: f64, rng: &mut R) -> Result<Geo2dSample> {
    let path = sample_planar(&params.planar(), horizon, rng)?;
    let (u, v) = path.position(horizon);
    Ok(Geo2dSample {
        x: params.x0 * u.exp(),
        y: params.y0 * v.exp(),
        path,
    })
}

/// Log-returns `(log X(t)/x0, log Y(t)/y0)` at `t` without storing the path.
pub fn sample_log_returns<R: Rng + ?Sized>(params: &Geo2dParams, t: f64, rng: &mut R) -> (f64, f64) {
    let e = sample_planar_endpoint(&params.planar(), t, rng);
    (e.u, e.v)
}

/// Interior joint density of `(X(t), Y(t))`: `g(log(x/x0), log(y/y0)) / (xy)`.
pub fn joint_density(params: &Geo2dParams, x: f64, y: f64, t: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("joint density needs x, y > 0, got ({x}, {y})"));
    }
    let g = interior_density_uv(&params.planar(), (x / params.x0).ln(), (y / params.y0).ln(), t)?;
    Ok(g / (x * y))
}

/// Hydrodynamic-limit density
/// `√(p(1-p))/(πtxy) exp{-[(1-p) A² + p B²]/(2t)}` with `A = log(xy/x0y0)`,
/// `B = log(x y0 / (x0 y))`.
pub fn limit_density(p: f64, x0: f64, y0: f64, x: f64, y: f64, t: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("limit density needs 0 < p < 1, got {p}"));
    }
    if !(x > 0.0 && y > 0.0 && x0 > 0.0 && y0 > 0.0) {
        return domain("limit density needs positive coordinates");
    }
    ensure_positive("t", t)?;
    let (u, v) = ((x / x0).ln(), (y / y0).ln());
    let (a, b) = (u + v, u - v);
    let q = 1.0 - p;
    let norm = (p * q).sqrt() / (std::f64::consts::PI * t * x * y);
    Ok(norm * (-(q * a * a + p * b * b) / (2.0 * t)).exp())
}

/// Drift, volatility and correlation of the limiting correlated geometric
/// diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffusionParams {
    pub mu: f64,
    pub kappa: f64,
    pub sigma_sq: f64,
    pub eta_sq: f64,
    pub rho: f64,
}

pub fn param_map(p: f64) -> Result<DiffusionParams> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("parameter map needs 0 < p < 1, got {p}")));
    }
    let v = 1.0 / (4.0 * p * (1.0 - p));
    Ok(DiffusionParams {
        mu: 0.5 * v,
        kappa: 0.5 * v,
        sigma_sq: v,
        eta_sq: v,
        rho: 2.0 * p - 1.0,
    })
}
