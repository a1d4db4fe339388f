//! Seeded replica runner, estimators and goodness-of-fit statistics.

use serde::Serialize;

use crate::rng::{stream, Stream};
use crate::specfun::{chi_square_sf, normal_cdf, NeumaierSum};
use crate::telegraph::Atom;

/// Runs `f` once per replica on stream `(seed, i)` and returns the results
/// in replica order. Parallel when the `parallel` feature is on; the output
/// is identical either way.
pub fn run_replicas<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| f(&mut stream(seed, i as u64)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_replicas_seq(n, seed, f)
    }
}

/// Single-threaded reference for [`run_replicas`].
pub fn run_replicas_seq<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    F: Fn(&mut Stream) -> T,
{
    (0..n).map(|i| f(&mut stream(seed, i as u64))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

/// Estimate with its standard error and the comparison against a target.
///
/// The verdict is `pass` iff `|estimate - target| <= k·se + tol`. Monte
/// Carlo comparisons use a rounding-level `tol`; deterministic checks use `se = 0` and the
/// tolerance of the check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub name: String,
    pub criterion: u32,
    pub estimate: f64,
    pub se: f64,
    pub n: u64,
    pub seed: u64,
    pub target: Option<f64>,
    pub k: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

impl McReport {
    pub fn new(name: impl Into<String>, estimate: f64, se: f64, n: u64, seed: u64) -> Self {
        Self {
            name: name.into(),
            criterion: 0,
            estimate,
            se,
            n,
            seed,
            target: None,
            k: 3.0,
            tol: 0.0,
            verdict: Verdict::NotApplicable,
        }
    }

    /// Deterministic check of `value` against `target` within `tol`.
    pub fn exact(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self::new(name, value, 0.0, 1, 0).with_tol(tol).against(target)
    }

    /// Pass iff `value <= bound`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64, n: u64, seed: u64) -> Self {
        let mut r = Self::new(name, value, 0.0, n, seed);
        r.tol = bound;
        r.target = Some(bound);
        r.verdict = if value <= bound { Verdict::Pass } else { Verdict::Fail };
        r
    }

    /// Pass iff `value >= bound`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64, n: u64, seed: u64) -> Self {
        let mut r = Self::new(name, value, 0.0, n, seed);
        r.tol = bound;
        r.target = Some(bound);
        r.verdict = if value >= bound { Verdict::Pass } else { Verdict::Fail };
        r
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self.reverdict()
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.reverdict()
    }

    pub fn with_criterion(mut self, criterion: u32) -> Self {
        self.criterion = criterion;
        self
    }

    pub fn against(mut self, target: f64) -> Self {
        self.target = Some(target);
        self.reverdict()
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn reverdict(mut self) -> Self {
        if let Some(target) = self.target {
            let ok = (self.estimate - target).abs() <= self.k * self.se + self.tol;
            self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        }
        self
    }
}

/// Sample mean and plug-in standard error.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().copied().collect::<NeumaierSum>().value() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).collect::<NeumaierSum>().value() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `k`-th raw sample moment with its standard error.
pub fn moment_estimate(samples: &[f64], k: u32, seed: u64) -> McReport {
    let powered: Vec<f64> = samples.iter().map(|x| x.powi(k as i32)).collect();
    let (m, se) = mean_se(&powered);
    McReport::new(format!("moment_{k}"), m, se, samples.len() as u64, seed)
}

/// A one-dimensional law that may carry atoms.
pub trait MixedLaw {
    /// Right-continuous CDF.
    fn cdf(&self, x: f64) -> f64;

    fn atoms(&self) -> Vec<Atom> {
        Vec::new()
    }

    /// CDF at increasing points. Implementations may share work between
    /// neighbouring points.
    fn cdf_sorted(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.cdf(x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub mean: f64,
    pub var: f64,
}

impl MixedLaw for Gaussian {
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf((x - self.mean) / self.var.sqrt())
    }
}

/// Law of a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass(pub f64);

impl MixedLaw for PointMass {
    fn cdf(&self, x: f64) -> f64 {
        if x >= self.0 {
            1.0
        } else {
            0.0
        }
    }

    fn atoms(&self) -> Vec<Atom> {
        vec![Atom {
            location: self.0,
            mass: 1.0,
        }]
    }
}

/// Kolmogorov distance `sup_x |F_n(x) - F(x)|` between the empirical CDF of
/// `samples` and a law with atoms.
///
/// Both one-sided limits are compared at every sample value and atom
/// location; the left limit of the model there is `F(x)` minus the atom
/// mass sitting exactly at `x`.
pub fn ks_with_atoms<L: MixedLaw + ?Sized>(samples: &[f64], law: &L) -> f64 {
    assert!(!samples.is_empty(), "KS needs at least one sample");
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let atoms = law.atoms();

    let mut points: Vec<f64> = xs.clone();
    points.extend(atoms.iter().map(|a| a.location));
    points.sort_by(f64::total_cmp);
    points.dedup();

    let model = law.cdf_sorted(&points);
    let mut d: f64 = 0.0;
    for (&x, &f_right) in points.iter().zip(&model) {
        let at_x: f64 = atoms.iter().filter(|a| a.location == x).map(|a| a.mass).sum();
        let f_left = f_right - at_x;
        let below = xs.partition_point(|&s| s < x) as f64 / n;
        let upto = xs.partition_point(|&s| s <= x) as f64 / n;
        d = d.max((upto - f_right).abs()).max((below - f_left).abs());
    }
    d
}

/// 99% critical value of the Kolmogorov statistic, `1.63/√N`.
pub fn ks_threshold(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Pearson χ² test of bin counts against expected probabilities. Bins with
/// expected count below 5 are pooled into one. Returns `(statistic, dof,
/// p-value)`.
pub fn chi_square_test(counts: &[u64], probs: &[f64]) -> (f64, f64, f64) {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let total_p: f64 = probs.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&o, &p) in counts.iter().zip(probs) {
        let e = nf * p / total_p;
        if e < 5.0 {
            pooled_obs += o as f64;
            pooled_exp += e;
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        bins += 1;
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    }
    let dof = (bins.max(2) - 1) as f64;
    (stat, dof, chi_square_sf(stat, dof))
}

/// Pearson correlation of paired samples.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}
