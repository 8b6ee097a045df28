//! Special-function kernels: the standard Gaussian, log-gamma, and the
//! regularized incomplete gamma and beta functions.
//!
//! Everything here is written against `f64` elementary functions only. The
//! accuracy targets are absolute `1e-15` for the Gaussian CDF and `1e-13`
//! for the incomplete functions, which keeps kernel error well below the
//! `1e-9` slack used by the inequality checks.

use crate::error::{domain, Result};

/// The circle constant `2π`.
pub const TAU: f64 = std::f64::consts::TAU;

/// `1 / sqrt(2π)`.
const FRAC_1_SQRT_TAU: f64 = 0.398_942_280_401_432_677_939_946_059_934_381_9;

/// Below this magnitude the Gaussian CDF uses the power series; above it the
/// Mills-ratio continued fraction.
const SERIES_CUTOFF: f64 = 2.5;

const LENTZ_TINY: f64 = 1e-300;

/// Standard Gaussian density `exp(-z²/2) / sqrt(τ)`.
pub fn gaussian_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_TAU * (-0.5 * z * z).exp()
}

/// Standard Gaussian distribution function `Φ(z)`.
pub fn gaussian_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z.abs() < SERIES_CUTOFF {
        0.5 + gaussian_pdf(z) * odd_factorial_series(z)
    } else if z < 0.0 {
        upper_tail(-z)
    } else {
        1.0 - upper_tail(z)
    }
}

/// Survival function `1 - Φ(z) = Φ(-z)`, accurate in the upper tail.
pub fn gaussian_sf(z: f64) -> f64 {
    gaussian_cdf(-z)
}

/// `ln Φ(z)`, finite far into the lower tail where `Φ(z)` underflows.
pub fn ln_gaussian_cdf(z: f64) -> f64 {
    if z < -SERIES_CUTOFF {
        let x = -z;
        -0.5 * x * x + FRAC_1_SQRT_TAU.ln() - mills_denominator(x).ln()
    } else {
        gaussian_cdf(z).ln()
    }
}

/// `Σ z^{2n+1} / (2n+1)!!`, so that `Φ(z) = 1/2 + φ(z)·S(z)`.
fn odd_factorial_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    while term.abs() > 1e-17 * sum.abs() {
        n += 1.0;
        term *= z2 / (2.0 * n + 1.0);
        sum += term;
    }
    sum
}

/// Continued fraction `x + 1/(x + 2/(x + 3/(x + …)))`, evaluated by the
/// modified Lentz method. `Φ(-x) = φ(x) / mills_denominator(x)` for `x > 0`.
fn mills_denominator(x: f64) -> f64 {
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = n as f64;
        d = x + a * d;
        if d == 0.0 {
            d = LENTZ_TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c == 0.0 {
            c = LENTZ_TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    f
}

fn upper_tail(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    gaussian_pdf(x) / mills_denominator(x)
}

/// Inverse of the standard Gaussian distribution function.
///
/// Starts from the Abramowitz–Stegun 26.2.23 rational guess and polishes with
/// Halley steps against [`gaussian_cdf`]. Values above one half are handled
/// through the exact complement `1 - q`, so both tails keep full relative
/// accuracy.
pub fn gaussian_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain(format!("q must lie in (0,1), got {q}")));
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    if q < 0.5 {
        Ok(lower_quantile(q))
    } else {
        Ok(-lower_quantile(1.0 - q))
    }
}

fn lower_quantile(p: f64) -> f64 {
    let t = (-2.0 * p.ln()).sqrt();
    let num = 2.515_517 + t * (0.802_853 + t * 0.010_328);
    let den = 1.0 + t * (1.432_788 + t * (0.189_269 + t * 0.001_308));
    let mut z = -(t - num / den);
    for _ in 0..8 {
        let e = gaussian_cdf(z) - p;
        let u = e / gaussian_pdf(z);
        let step = u / (1.0 + 0.5 * z * u);
        z -= step;
        if step.abs() <= 1e-16 * z.abs().max(1.0) {
            break;
        }
    }
    z
}

// Stirling series coefficients B_{2j} / (2j (2j-1)), j = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(a)` for `a > 0`.
pub fn log_gamma(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("log_gamma requires a > 0, got {a}")));
    }
    Ok(ln_gamma(a))
}

/// Unchecked `ln Γ(a)`; callers guarantee `a > 0`.
///
/// Shifts the argument above 10 with the recurrence and then applies the
/// Stirling series through the `x^{-15}` term.
pub(crate) fn ln_gamma(a: f64) -> f64 {
    let mut x = a;
    let mut shift = 1.0;
    while x < 10.0 {
        shift *= x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    series *= inv;
    (x - 0.5) * x.ln() - x + 0.5 * TAU.ln() + series - shift.ln()
}

/// `ln(1 + d) - d`, accurate for small `d`.
pub fn log1pmx(d: f64) -> f64 {
    if d.abs() < 0.25 {
        // -d²/2 + d³/3 - d⁴/4 + ...
        let mut power = d * d;
        let mut sum = 0.0;
        let mut n = 2.0;
        loop {
            let term = power / n;
            if n as i32 % 2 == 0 {
                sum -= term;
            } else {
                sum += term;
            }
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            power *= d;
            n += 1.0;
        }
        sum
    } else {
        d.ln_1p() - d
    }
}

/// `x ln(x/m) - x + m`, the Poisson deviance contribution of a count `x`
/// against mean `m`; uses the `0·ln 0 = 0` convention at `x = 0`.
///
/// Written through `d = (x - m)/m` so the result keeps relative accuracy when
/// `x` is close to `m`.
pub fn deviance_term(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        return m;
    }
    let d = (x - m) / m;
    if d.abs() < 0.25 {
        m * (d * d + log1pmx(d) * (1.0 + d))
    } else {
        x * (x / m).ln() - x + m
    }
}

/// Stirling-series error `ln Γ(a+1) - (a+½) ln a + a - ½ ln τ`.
pub(crate) fn stirlerr(a: f64) -> f64 {
    if a > 15.0 {
        let r = 1.0 / (a * a);
        (1.0 / 12.0
            - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r * (1.0 / 1188.0)))))
            / a
    } else if a < 1.0 {
        ln_gamma(a + 1.0) - (a + 0.5) * a.ln() + a - 0.5 * TAU.ln()
    } else {
        // stirlerr(a) - stirlerr(a+1) = (a+½) ln(1+1/a) - 1 = Σ u^{2j}/(2j+1),
        // u = 1/(2a+1); summing the steps avoids cancelling against ln Γ.
        let mut total = 0.0;
        let mut b = a;
        while b <= 15.0 {
            let u2 = 1.0 / ((2.0 * b + 1.0) * (2.0 * b + 1.0));
            let mut power = u2;
            let mut step = 0.0;
            let mut j = 1.0;
            while power > 1e-18 * step || step == 0.0 {
                step += power / (2.0 * j + 1.0);
                power *= u2;
                j += 1.0;
            }
            total += step;
            b += 1.0;
        }
        total + stirlerr(b)
    }
}

/// `Γ(n+1)/(Γ(x+1)Γ(n-x+1)) p^x q^(n-x)` for real `n`, with `p + q = 1`, in
/// Loader's form so that it keeps relative accuracy for large arguments.
pub(crate) fn binomial_kernel(x: f64, n: f64, p: f64, q: f64) -> f64 {
    if x == 0.0 {
        return (n * q.ln()).exp();
    }
    if x == n {
        return (n * p.ln()).exp();
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x);
    let dev = deviance_term(x, n * p) + deviance_term(n - x, n * q);
    (lc - dev).exp() * (n / (TAU * x * (n - x))).sqrt()
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn reg_inc_gamma_lower(a: f64, x: f64) -> Result<f64> {
    check_inc_gamma(a, x)?;
    Ok(inc_gamma_pair(a, x).0)
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 - P(a, x)`.
pub fn reg_inc_gamma_upper(a: f64, x: f64) -> Result<f64> {
    check_inc_gamma(a, x)?;
    Ok(inc_gamma_pair(a, x).1)
}

fn check_inc_gamma(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("incomplete gamma requires a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    Ok(())
}

/// Returns `(P(a,x), Q(a,x))`; the series is used below `x = a + 1` and the
/// Lentz continued fraction above.
pub(crate) fn inc_gamma_pair(a: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x == f64::INFINITY {
        return (1.0, 0.0);
    }
    // x^a e^{-x} / Γ(a); for large a through the Poisson-mass form, which
    // avoids the cancellation between a·ln(x) and ln Γ(a).
    let log_prefactor = if a > 10.0 {
        a.ln() - stirlerr(a) - deviance_term(a, x) - 0.5 * (TAU * a).ln()
    } else {
        a * x.ln() - x - ln_gamma(a)
    };
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..100_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        let p = (sum.ln() + log_prefactor).exp().min(1.0);
        (p, 1.0 - p)
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / LENTZ_TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..100_000 {
            let fi = i as f64;
            let an = -fi * (fi - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < LENTZ_TINY {
                d = LENTZ_TINY;
            }
            c = b + an / c;
            if c.abs() < LENTZ_TINY {
                c = LENTZ_TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        let q = (h.ln() + log_prefactor).exp().min(1.0);
        (1.0 - q, q)
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!(
            "incomplete beta requires a > 0 and b > 0, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!(
            "incomplete beta requires 0 <= x <= 1, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let front = if a + b > 20.0 {
        a * b / (a + b) * binomial_kernel(a, a + b, x, 1.0 - x)
    } else {
        let log_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
        log_front.exp()
    };
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((front * beta_fraction(a, b, x) / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - front * beta_fraction(b, a, 1.0 - x) / b).clamp(0.0, 1.0))
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < LENTZ_TINY {
        d = LENTZ_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..100_000 {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < LENTZ_TINY {
            d = LENTZ_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < LENTZ_TINY {
            c = LENTZ_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < LENTZ_TINY {
            d = LENTZ_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < LENTZ_TINY {
            c = LENTZ_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
