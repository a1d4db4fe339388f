//! Adaptive Simpson quadrature.

/// Default absolute tolerance for analytic mass checks.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 48;
const MIN_DEPTH: u32 = 4;

/// `∫_a^b f` by adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || (depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
}

/// `∫_a^b f`, split at the interior `breaks` (any order, out-of-range points
/// ignored). The tolerance is shared evenly between pieces.
pub fn simpson_breaks<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(lo);
    edges.extend(pts);
    edges.push(hi);
    let piece_tol = tol / (edges.len() - 1) as f64;
    sign * edges
        .windows(2)
        .map(|w| simpson(f, w[0], w[1], piece_tol))
        .sum::<f64>()
}

/// Running integrals `∫_a^{x_i} f` for increasing `xs >= a`, built from the
/// consecutive pieces so each point costs one short integral.
pub fn cumulative<F: Fn(f64) -> f64>(f: &F, a: f64, xs: &[f64], tol: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    let mut prev = a;
    for &x in xs {
        debug_assert!(x >= prev, "cumulative() needs sorted abscissae");
        if x > prev {
            acc += simpson(f, prev, x, tol);
            prev = x;
        }
        out.push(acc);
    }
    out
}
