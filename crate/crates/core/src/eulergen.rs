//! Two-parameter generalized Euler polynomials `E_n^{(a,θ)}(x)`, defined by
//!
//! ```text
//! ((θ+1)/(θe^t+1))^a e^{xt} = Σ_n E_n^{(a,θ)}(x) t^n / n!
//! ```
//!
//! With `r = θ/(θ+1)` the coefficient of `x^m` in `E_n` is `C(n,m) s_{n-m}`,
//! where `s_k = Σ_j binom(-a,j) j! {k,j} r^j`.
//!
//! The inner sum alternates and its terms outgrow the result by tens of
//! orders of magnitude near `k = 60`, so it is carried out exactly: `a` and
//! `r` are binary fractions once stored as `f64`, and every product and sum
//! below is exact until the final rounding of `s_k`.

use num_bigint::{BigInt, BigUint, Sign};
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::specfun::{stirling2_table, STIRLING_MAX};

/// Largest degree served; tied to the Stirling table.
pub const MAX_DEGREE: u32 = STIRLING_MAX;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolySeries {
    pub n: u32,
    pub a: f64,
    pub theta: f64,
    /// Coefficient of `x^m` at index `m`.
    pub coeffs: Vec<f64>,
}

pub fn euler_poly(n: u32, a: f64, theta: f64) -> Result<PolySeries> {
    let mut family = euler_family(n, a, theta)?;
    Ok(family.pop().expect("family has n+1 members"))
}

/// `E_0, ..., E_nmax` for one `(a, θ)`, sharing the inner sums.
pub fn euler_family(nmax: u32, a: f64, theta: f64) -> Result<Vec<PolySeries>> {
    check_args(nmax, a, theta)?;
    let s = inner_sums(nmax, a, theta)?;
    Ok((0..=nmax)
        .map(|n| {
            let coeffs = (0..=n)
                .map(|m| binomial(n, m) * s[(n - m) as usize])
                .collect();
            PolySeries {
                n,
                a,
                theta,
                coeffs,
            }
        })
        .collect())
}

/// Horner evaluation.
pub fn eval_poly(p: &PolySeries, x: f64) -> f64 {
    p.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Closed form of the generating function.
pub fn gf_lhs(a: f64, theta: f64, x: f64, t: f64) -> f64 {
    ((theta + 1.0) / (theta * t.exp() + 1.0)).powf(a) * (x * t).exp()
}

/// `Σ_{n<=N} E_n(x) t^n / n!`.
pub fn gf_partial_sum(a: f64, theta: f64, x: f64, t: f64, n_max: u32) -> Result<f64> {
    let family = euler_family(n_max, a, theta)?;
    let mut sum = 0.0;
    let mut scale = 1.0;
    for (n, p) in family.iter().enumerate() {
        if n > 0 {
            scale *= t / n as f64;
        }
        sum += eval_poly(p, x) * scale;
    }
    Ok(sum)
}

fn check_args(n: u32, a: f64, theta: f64) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::Range(format!(
            "generalized Euler polynomials are served for n <= {MAX_DEGREE}, got {n}"
        )));
    }
    ensure_positive("a", a)?;
    ensure_positive("theta", theta)
}

/// `C(n, m)` rounded once to `f64`.
fn binomial(n: u32, m: u32) -> f64 {
    let m = m.min(n - m);
    let mut c: u128 = 1;
    for i in 0..m {
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c as f64
}

/// `s_0, ..., s_nmax`.
fn inner_sums(nmax: u32, a: f64, theta: f64) -> Result<Vec<f64>> {
    let stirling = stirling2_table(nmax)?;
    let r = Dyadic::from_f64(theta / (theta + 1.0));
    let neg_a = Dyadic::from_f64(-a);
    // falling[j] = prod_{i<j} (-a - i) = binom(-a, j) j!
    let mut falling = Vec::with_capacity(nmax as usize + 1);
    let mut rpow = Vec::with_capacity(nmax as usize + 1);
    falling.push(Dyadic::one());
    rpow.push(Dyadic::one());
    for j in 1..=nmax as usize {
        let factor = neg_a.add(&Dyadic::from_int(-(j as i64 - 1)));
        falling.push(falling[j - 1].mul(&factor));
        rpow.push(rpow[j - 1].mul(&r));
    }
    let weights: Vec<Dyadic> = falling.iter().zip(&rpow).map(|(f, p)| f.mul(p)).collect();
    Ok((0..=nmax as usize)
        .map(|k| {
            let mut acc = Dyadic::zero();
            for j in 0..=k {
                let st: &BigUint = &stirling[k][j];
                if st.bits() == 0 {
                    continue;
                }
                acc = acc.add(&weights[j].scale(st));
            }
            acc.to_f64()
        })
        .collect())
}

/// Exact binary fraction `m · 2^e`.
#[derive(Debug, Clone)]
struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    fn zero() -> Self {
        Self {
            m: BigInt::default(),
            e: 0,
        }
    }

    fn one() -> Self {
        Self::from_int(1)
    }

    fn from_int(i: i64) -> Self {
        Self {
            m: BigInt::from(i),
            e: 0,
        }
    }

    fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite());
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | 0x0010_0000_0000_0000, raw_exp - 1075)
        };
        let m = BigInt::from(mant);
        Self {
            m: if bits >> 63 == 1 { -m } else { m },
            e: exp,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            m: &self.m * &other.m,
            e: self.e + other.e,
        }
    }

    fn scale(&self, k: &BigUint) -> Self {
        Self {
            m: &self.m * BigInt::from_biguint(Sign::Plus, k.clone()),
            e: self.e,
        }
    }

    fn add(&self, other: &Self) -> Self {
        if self.m.bits() == 0 {
            return other.clone();
        }
        if other.m.bits() == 0 {
            return self.clone();
        }
        let (lo, hi) = if self.e <= other.e { (self, other) } else { (other, self) };
        let shift = (hi.e - lo.e) as usize;
        Self {
            m: &lo.m + (&hi.m << shift),
            e: lo.e,
        }
    }

    fn to_f64(&self) -> f64 {
        let mag = self.m.magnitude();
        let bits = mag.bits();
        if bits == 0 {
            return 0.0;
        }
        // Keep the top 64 bits; the dropped tail is below f64 resolution.
        let shift = bits.saturating_sub(64);
        let top = (mag >> shift).iter_u64_digits().next().unwrap_or(0);
        let v = libm::ldexp(top as f64, (self.e + shift as i64) as i32);
        if self.m.sign() == Sign::Minus {
            -v
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        let e0 = euler_poly(0, 2.3, 0.7).unwrap();
        assert_eq!(e0.coeffs, vec![1.0]);
        assert_eq!(eval_poly(&e0, 7.0), 1.0);

        let (a, th) = (2.3, 0.7);
        let e1 = euler_poly(1, a, th).unwrap();
        assert_eq!(e1.coeffs[1], 1.0);
        assert!((e1.coeffs[0] + a * th / (th + 1.0)).abs() < 1e-15);

        let e2 = euler_poly(2, 1.0, 1.0).unwrap();
        assert_eq!(e2.coeffs, vec![0.0, -1.0, 1.0]);
        assert_eq!(eval_poly(&e2, 1.0), 0.0);
        assert_eq!(eval_poly(&euler_poly(1, 1.0, 1.0).unwrap(), 0.5), 0.0);
    }

    #[test]
    fn subleading_coefficient() {
        for &(a, th) in &[(0.5, 0.25), (2.0, 4.0), (1.3, 1.0)] {
            for n in 1..=40 {
                let p = euler_poly(n, a, th).unwrap();
                let want = -(n as f64) * a * th / (th + 1.0);
                assert!((p.coeffs[n as usize - 1] - want).abs() <= 1e-13 * want.abs());
                assert_eq!(p.coeffs[n as usize], 1.0);
            }
        }
    }

    #[test]
    fn degree_window() {
        assert!(matches!(euler_poly(65, 1.0, 1.0), Err(Error::Range(_))));
        assert!(euler_poly(64, 1.0, 1.0).is_ok());
        assert!(matches!(euler_poly(3, -1.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn dyadic_roundtrip() {
        for x in [0.1, -3.75, 1e-300, 6.02e23, 5e-324] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn classical_euler_values() {
        // E_n(0) for the classical polynomials: 1, -1/2, 0, 1/4, 0, -1/2, 0, 17/8
        let fam = euler_family(7, 1.0, 1.0).unwrap();
        let want = [1.0, -0.5, 0.0, 0.25, 0.0, -0.5, 0.0, 17.0 / 8.0];
        for (p, w) in fam.iter().zip(want) {
            assert!((eval_poly(p, 0.0) - w).abs() < 1e-14);
        }
    }
}
