//! Motion on `(0, 1)` whose speed depends on the direction: `c(1-x)` when
//! moving right (`d0`) and `cx` when moving left (`d1`). Between switches
//! the position relaxes exponentially towards 1 or 0.

use rand::Rng;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::mc::run_replicas;
use crate::rng::exp_time;
use crate::specfun::{hyp1f1, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dir {
    D0,
    D1,
}

impl Dir {
    fn flip(self) -> Self {
        match self {
            Dir::D0 => Dir::D1,
            Dir::D1 => Dir::D0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirDepParams {
    pub lambda: f64,
    pub c: f64,
    pub x0: f64,
    /// Fixed initial direction; equiprobable when `None`.
    pub d0_start: Option<Dir>,
}

impl DirDepParams {
    pub fn new(lambda: f64, c: f64, x0: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        ensure_positive("c", c)?;
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(Error::Parameter(format!("x0 must lie in (0, 1), got {x0}")));
        }
        Ok(Self {
            lambda,
            c,
            x0,
            d0_start: None,
        })
    }

    pub fn starting(mut self, d: Dir) -> Self {
        self.d0_start = Some(d);
        self
    }
}

/// Relax `x` for time `dt` in direction `d`.
#[inline]
fn relax(x: f64, d: Dir, c: f64, dt: f64) -> f64 {
    let e = (-c * dt).exp();
    match d {
        Dir::D0 => 1.0 - (1.0 - x) * e,
        Dir::D1 => x * e,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirDepPath {
    pub params: DirDepParams,
    pub horizon: f64,
    pub start: Dir,
    pub event_times: Vec<f64>,
    /// `X(T_k)` for `T_0 = 0` and each event time.
    pub knots: Vec<f64>,
}

impl DirDepPath {
    pub fn direction_after(&self, k: usize) -> Dir {
        if k.is_multiple_of(2) {
            self.start
        } else {
            self.start.flip()
        }
    }

    pub fn position(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.horizon);
        let k = self.event_times.partition_point(|&s| s <= t);
        let since = if k == 0 { 0.0 } else { self.event_times[k - 1] };
        relax(self.knots[k], self.direction_after(k), self.params.c, t - since)
    }

    /// `X(t)` from the explicit sum
    /// `x0 e^{-ct} + e^{-ct} Σ_{d0 segments} (e^{c·end} - e^{c·start})`.
    pub fn position_closed_form(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.horizon);
        let c = self.params.c;
        let n = self.event_times.partition_point(|&s| s <= t);
        let mut acc = NeumaierSum::new();
        for k in 0..=n {
            if self.direction_after(k) != Dir::D0 {
                continue;
            }
            let start = if k == 0 { 0.0 } else { self.event_times[k - 1] };
            let end = if k == n { t } else { self.event_times[k] };
            acc.add((c * (end - t)).exp());
            acc.add(-(c * (start - t)).exp());
        }
        self.params.x0 * (-c * t).exp() + acc.value()
    }
}

fn initial_direction<R: Rng + ?Sized>(params: &DirDepParams, rng: &mut R) -> Dir {
    // The coin is drawn either way so fixed-start runs share event times
    // with free-start runs on the same stream.
    let coin: bool = rng.gen();
    params
        .d0_start
        .unwrap_or(if coin { Dir::D0 } else { Dir::D1 })
}

pub fn sample_path<R: Rng + ?Sized>(
    params: &DirDepParams,
    horizon: f64,
    rng: &mut R,
) -> Result<DirDepPath> {
    ensure_positive("horizon", horizon)?;
    let start = initial_direction(params, rng);
    let mut d = start;
    let mut x = params.x0;
    let mut knots = vec![x];
    let mut event_times = Vec::new();
    let mut prev = 0.0;
    let mut s = exp_time(rng, params.lambda);
    while s < horizon {
        x = relax(x, d, params.c, s - prev);
        knots.push(x);
        event_times.push(s);
        d = d.flip();
        prev = s;
        s += exp_time(rng, params.lambda);
    }
    Ok(DirDepPath {
        params: *params,
        horizon,
        start,
        event_times,
        knots,
    })
}

/// `X(t)` without storing the path; same stream usage as [`sample_path`].
pub fn sample_endpoint<R: Rng + ?Sized>(params: &DirDepParams, t: f64, rng: &mut R) -> f64 {
    let mut d = initial_direction(params, rng);
    let mut x = params.x0;
    let mut prev = 0.0;
    let mut s = exp_time(rng, params.lambda);
    while s < t {
        x = relax(x, d, params.c, s - prev);
        d = d.flip();
        prev = s;
        s += exp_time(rng, params.lambda);
    }
    relax(x, d, params.c, t - prev)
}

/// `X(t)` given `D(0) = start` and exactly `n` switches in `(0, t)`: the
/// switch times are sorted uniforms on `(0, t)`.
pub fn sample_conditional<R: Rng + ?Sized>(
    params: &DirDepParams,
    start: Dir,
    n: usize,
    t: f64,
    rng: &mut R,
) -> f64 {
    let mut times: Vec<f64> = (0..n).map(|_| t * rng.gen::<f64>()).collect();
    times.sort_by(f64::total_cmp);
    let mut d = start;
    let mut x = params.x0;
    let mut prev = 0.0;
    for s in times {
        x = relax(x, d, params.c, s - prev);
        d = d.flip();
        prev = s;
    }
    relax(x, d, params.c, t - prev)
}

/// `E[X(t) | D(0) = start, N(t) = n]` from `E[e^{cT_j} | N(t) = n] =
/// 1F1(j; n+1; ct)`.
pub fn cond_mean(params: &DirDepParams, start: Dir, n: u32, t: f64) -> Result<f64> {
    let c = params.c;
    let e = (-c * t).exp();
    let mut alt = NeumaierSum::new();
    for j in 0..=n {
        let f = hyp1f1(j, n + 1, c * t)?;
        alt.add(if j % 2 == 0 { f } else { -f });
    }
    let s = e * alt.value();
    let x0 = params.x0;
    Ok(match (start, n.is_multiple_of(2)) {
        (Dir::D0, true) => 1.0 + x0 * e - s,
        (Dir::D0, false) => x0 * e - s,
        (Dir::D1, true) => -(1.0 - x0) * e + s,
        (Dir::D1, false) => 1.0 - (1.0 - x0) * e + s,
    })
}

/// `E[X(t)] = x0 e^{-ct} + (1 - e^{-ct})/2`.
pub fn uncond_mean(params: &DirDepParams, t: f64) -> f64 {
    let e = (-params.c * t).exp();
    params.x0 * e + 0.5 * (1.0 - e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapseResult {
    pub frac_near_0: f64,
    pub frac_near_1: f64,
    pub mean: f64,
    pub sd: f64,
    pub replicas: usize,
}

/// Fractions of endpoints `X(t)` within `band` of 0 and of 1 with `λ = c²`.
pub fn collapse_experiment(
    c: f64,
    t: f64,
    replicas: usize,
    band: f64,
    x0: f64,
    seed: u64,
) -> Result<CollapseResult> {
    let params = DirDepParams::new(c * c, c, x0)?;
    ensure_positive("t", t)?;
    let xs = run_replicas(replicas, seed, |rng| sample_endpoint(&params, t, rng));
    let n = xs.len() as f64;
    let near0 = xs.iter().filter(|&&x| x < band).count() as f64 / n;
    let near1 = xs.iter().filter(|&&x| x > 1.0 - band).count() as f64 / n;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CollapseResult {
        frac_near_0: near0,
        frac_near_1: near1,
        mean,
        sd,
        replicas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn base(x0: f64) -> DirDepParams {
        DirDepParams::new(1.0, 1.0, x0).unwrap()
    }

    #[test]
    fn no_event_paths() {
        let p = DirDepParams::new(1e-12, 1.3, 0.3).unwrap();
        let e = (-1.3f64).exp();
        let right = sample_path(&p.starting(Dir::D0), 1.0, &mut stream(1, 0)).unwrap();
        assert!((right.position(1.0) - (1.0 - 0.7 * e)).abs() < 1e-15);
        let left = sample_path(&p.starting(Dir::D1), 1.0, &mut stream(1, 0)).unwrap();
        assert!((left.position(1.0) - 0.3 * e).abs() < 1e-15);
    }

    #[test]
    fn recursion_matches_explicit_sum() {
        let p = DirDepParams::new(4.0, 1.0, 0.35).unwrap();
        let mut checked = 0;
        for i in 0..500 {
            let path = sample_path(&p, 1.0, &mut stream(2, i)).unwrap();
            if path.event_times.len() > 10 {
                continue;
            }
            checked += 1;
            for k in 0..=10 {
                let t = f64::from(k) / 10.0;
                assert!((path.position(t) - path.position_closed_form(t)).abs() < 1e-12);
            }
            assert_eq!(path.position(1.0), sample_endpoint(&p, 1.0, &mut stream(2, i)));
        }
        assert!(checked > 400);
    }

    #[test]
    fn paths_stay_inside() {
        let p = DirDepParams::new(50.0, 10.0, 0.02).unwrap();
        for i in 0..200 {
            let path = sample_path(&p, 2.0, &mut stream(4, i)).unwrap();
            for k in 0..=50 {
                let x = path.position(2.0 * f64::from(k) / 50.0);
                assert!(x > 0.0 && x < 1.0);
            }
        }
    }

    #[test]
    fn zero_event_conditional_mean() {
        let p = base(0.3);
        let e = (-1f64).exp();
        assert!((cond_mean(&p, Dir::D0, 0, 1.0).unwrap() - (1.0 - 0.7 * e)).abs() < 1e-15);
        assert!((cond_mean(&p, Dir::D1, 0, 1.0).unwrap() - 0.3 * e).abs() < 1e-15);
    }

    #[test]
    fn direction_average_is_constant_in_n() {
        for x0 in [0.2, 0.5, 0.9] {
            let p = base(x0);
            let want = uncond_mean(&p, 1.0);
            for n in 0..=6 {
                let avg = 0.5 * (cond_mean(&p, Dir::D0, n, 1.0).unwrap() + cond_mean(&p, Dir::D1, n, 1.0).unwrap());
                assert!((avg - want).abs() < 1e-10, "x0={x0}, n={n}");
            }
        }
    }

    #[test]
    fn mean_limits() {
        let p = base(0.2);
        assert_eq!(uncond_mean(&p, 0.0), 0.2);
        assert!((uncond_mean(&p, 60.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collapse_fractions_are_a_subprobability() {
        let r = collapse_experiment(1.0, 1.0, 2000, 0.01, 0.5, 3).unwrap();
        assert!(r.frac_near_0 + r.frac_near_1 <= 1.0);
        assert!(r.frac_near_0 < 0.01 && r.frac_near_1 < 0.01);
    }
}
