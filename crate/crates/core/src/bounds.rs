//! Bounds on distribution functions derived from the signed log-likelihood.
//!
//! The continuous families get one-sided Gaussian lower bounds. The binomial
//! and Poisson families get a two-sided intersection bracket, and the
//! negative binomial and geometric families are bracketed by Gamma and
//! exponential distribution functions instead.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::{FamilyDescriptor, Params, SupportPoint};
use crate::oracles::exact_cdf;
use crate::specialfn::gaussian_cdf;

/// `lower ≤ mid ≤ upper` around a discrete distribution function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBracket {
    /// `Pr(X < point)`.
    pub lower: f64,
    /// The value that the theorem places between the two probabilities.
    #[serde(rename = "mid")]
    pub gaussian_value: f64,
    /// `Pr(X ≤ point)`.
    pub upper: f64,
    pub family: FamilyDescriptor,
    pub point: SupportPoint,
}

impl TailBracket {
    /// `min(mid - lower, upper - mid)`; negative when the ordering fails.
    pub fn slack(&self) -> f64 {
        (self.gaussian_value - self.lower).min(self.upper - self.gaussian_value)
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.slack() >= -tolerance
    }
}

/// Gamma distribution function values bracketing a negative binomial one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBracket {
    pub x_m: f64,
    pub x_m_plus_1: f64,
    pub cdf_lower: f64,
    pub cdf_upper: f64,
}

impl GammaBracket {
    /// Smallest distance from `value` to the bracket ends; negative outside.
    pub fn slack(&self, value: f64) -> f64 {
        (value - self.cdf_lower).min(self.cdf_upper - value)
    }
}

/// Ordering of two signed log-likelihood distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domination {
    /// The first dominates the second: its distribution function is smaller.
    Dominates,
    /// The first is dominated by the second.
    Dominated,
    /// Same law.
    Equal,
}

fn count(name: &str, m: SupportPoint) -> Result<u64> {
    if m >= 0.0 && m.fract() == 0.0 && m.is_finite() {
        Ok(m as u64)
    } else {
        Err(domain(format!(
            "{name} must be a non-negative integer, got {m}"
        )))
    }
}

/// `Pr(X < m)`, zero at `m = 0`.
fn cdf_below(f: &FamilyDescriptor, m: u64) -> Result<f64> {
    if m == 0 {
        Ok(0.0)
    } else {
        exact_cdf(f, (m - 1) as f64)
    }
}

/// `Φ(G(x))`, a lower bound on `Pr(X ≤ x)` for the inverse Gaussian,
/// exponential and Gamma families.
pub fn gaussian_lower_bound(f: &FamilyDescriptor, x: SupportPoint) -> Result<f64> {
    if !f.is_continuous() {
        return Err(f.unsupported("gaussian_lower_bound"));
    }
    Ok(gaussian_cdf(f.signed_ll(x)?.value()))
}

/// `Pr(X < m) ≤ Φ(G(m)) ≤ Pr(X ≤ m)` for the binomial and Poisson families.
pub fn intersection_bracket(f: &FamilyDescriptor, m: SupportPoint) -> Result<TailBracket> {
    if !matches!(f.params(), Params::Binomial { .. } | Params::Poisson { .. }) {
        return Err(f.unsupported("intersection_bracket"));
    }
    let j = count("m", m)?;
    if !f.in_support(m) {
        return Err(domain(format!(
            "m = {m} lies outside the {} support",
            f.name()
        )));
    }
    Ok(TailBracket {
        lower: cdf_below(f, j)?,
        gaussian_value: gaussian_cdf(f.signed_ll(m)?.value()),
        upper: exact_cdf(f, m)?,
        family: *f,
        point: m,
    })
}

/// Brackets `Pr(M ≤ m)` for `M ~ neg(k, θ)` between `Pr(X ≤ x_m)` and
/// `Pr(X ≤ x_{m+1})`, `X ~ Γ(k, θ)`, where `G_Γ(x_j) = G_neg(j)`.
pub fn negbin_gamma_bracket(k: f64, theta: f64, m: u64) -> Result<GammaBracket> {
    let neg = FamilyDescriptor::negative_binomial(k, theta)?;
    let gamma = FamilyDescriptor::gamma(k, theta)?;
    let solve = |j: u64| -> Result<f64> {
        let z = neg.signed_ll(j as f64)?;
        gamma.signed_ll_inverse(z).map_err(|e| {
            Error::Solver(format!(
                "no Gamma point matches G_neg({j}) = {}: {e}",
                z.value()
            ))
        })
    };
    let x_m = solve(m)?;
    let x_m_plus_1 = solve(m + 1)?;
    Ok(GammaBracket {
        x_m,
        x_m_plus_1,
        cdf_lower: exact_cdf(&gamma, x_m)?,
        cdf_upper: exact_cdf(&gamma, x_m_plus_1)?,
    })
}

/// The CDF-matched sandwich `(G_Geo(m - ½), G_Exp(x), G_Geo(m))`, where `x`
/// solves `Pr(X ≤ x) = Pr(M < m)`: `x = θ·m·ln((θ+1)/θ)`.
pub fn geometric_sandwich(theta: f64, m: u64) -> Result<(f64, f64, f64)> {
    if m < 1 {
        return Err(domain("geometric sandwich needs m >= 1"));
    }
    let geo = FamilyDescriptor::geometric(theta)?;
    let exp = FamilyDescriptor::exponential(theta)?;
    let mf = m as f64;
    let x = theta * mf * (1.0 / theta).ln_1p();
    Ok((
        geo.signed_ll(mf - 0.5)?.value(),
        exp.signed_ll(x)?.value(),
        geo.signed_ll(mf)?.value(),
    ))
}

/// The G-matched form: with `G_Exp(x) = G_Geo(m)`,
/// `Pr(M < m) ≤ Pr(X ≤ x) ≤ Pr(M ≤ m)`.
pub fn geometric_exponential_bracket(theta: f64, m: u64) -> Result<TailBracket> {
    let geo = FamilyDescriptor::geometric(theta)?;
    let exp = FamilyDescriptor::exponential(theta)?;
    let x = exp.signed_ll_inverse(geo.signed_ll(m as f64)?)?;
    Ok(TailBracket {
        lower: cdf_below(&geo, m)?,
        gaussian_value: exact_cdf(&exp, x)?,
        upper: exact_cdf(&geo, m as f64)?,
        family: geo,
        point: m as f64,
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be > 0, got {v}")))
    }
}

/// Order of `G(W₁)` against `G(W₂)` for inverse Gaussians: the one with the
/// larger `μ/λ` is dominated.
pub fn domination_order_ig(mu1: f64, lambda1: f64, mu2: f64, lambda2: f64) -> Result<Domination> {
    for (name, v) in [
        ("mu1", mu1),
        ("lambda1", lambda1),
        ("mu2", mu2),
        ("lambda2", lambda2),
    ] {
        positive(name, v)?;
    }
    let (r1, r2) = (mu1 / lambda1, mu2 / lambda2);
    Ok(if (r1 - r2).abs() <= 1e-12 * r1.max(r2) {
        Domination::Equal
    } else if r1 > r2 {
        Domination::Dominated
    } else {
        Domination::Dominates
    })
}

/// Order of `G` for two Gamma shapes: the smaller shape is dominated.
pub fn domination_order_gamma(k1: f64, k2: f64) -> Result<Domination> {
    positive("k1", k1)?;
    positive("k2", k2)?;
    Ok(if k1 == k2 {
        Domination::Equal
    } else if k1 < k2 {
        Domination::Dominated
    } else {
        Domination::Dominates
    })
}

/// `Φ(G_neg(m))`, a lower bound on `Pr(M ≤ m)`.
pub fn negbin_gaussian_lower(k: f64, theta: f64, m: u64) -> Result<f64> {
    let neg = FamilyDescriptor::negative_binomial(k, theta)?;
    Ok(gaussian_cdf(neg.signed_ll(m as f64)?.value()))
}

/// `Φ(G_neg(m)) - Pr(M < m)`. The two-sided Gaussian intersection would make
/// this non-negative; it is not in general.
pub fn negbin_left_slack(k: f64, theta: f64, m: u64) -> Result<f64> {
    let neg = FamilyDescriptor::negative_binomial(k, theta)?;
    Ok(negbin_gaussian_lower(k, theta, m)? - cdf_below(&neg, m)?)
}

/// `Pr(L ≤ m) - Φ(G_Po(m + ½))` for `L ~ Po(λ)`.
pub fn poisson_halfstep_probe(lambda: f64, m: u64) -> Result<f64> {
    let po = FamilyDescriptor::poisson(lambda)?;
    let mf = m as f64;
    Ok(exact_cdf(&po, mf)? - gaussian_cdf(po.signed_ll(mf + 0.5)?.value()))
}

/// The `λ` with `G_Po(λ)(k) = G_bin(n,p)(k)`.
///
/// `G_Po(λ)(k)` decreases in `λ` and vanishes at `λ = k`, so the root is
/// bracketed by growing or shrinking `k` geometrically and then bisected in
/// `ln λ`. The root may exceed `n`.
pub fn binomial_poisson_lambda(n: u64, p: f64, k: u64) -> Result<f64> {
    let bin = FamilyDescriptor::binomial(n, p)?;
    if k > n {
        return Err(domain(format!("k = {k} exceeds n = {n}")));
    }
    let target = bin.signed_ll(k as f64)?.value();
    if k == 0 {
        // G_Po(λ)(0) = -sqrt(2λ).
        return Ok(0.5 * target * target);
    }
    let kf = k as f64;
    if target == 0.0 {
        return Ok(kf);
    }
    let h = |lambda: f64| -> f64 {
        FamilyDescriptor::poisson(lambda)
            .and_then(|po| po.signed_ll(kf))
            .map(|g| g.value() - target)
            .unwrap_or(f64::NAN)
    };
    let (mut lo, mut hi) = (kf, kf);
    if target > 0.0 {
        lo = 0.5 * kf;
        while h(lo) < 0.0 {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::Solver(format!(
                    "no Poisson mean matches G = {target}"
                )));
            }
        }
    } else {
        hi = 2.0 * kf;
        while h(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Solver(format!(
                    "no Poisson mean matches G = {target}"
                )));
            }
        }
    }
    for _ in 0..200 {
        let mid = (0.5 * (lo.ln() + hi.ln())).exp();
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if h(lo).abs() < h(hi).abs() { lo } else { hi })
}

/// `Pr(K < k) ≤ Pr(L < k) ≤ Pr(K ≤ k)` with `L ~ Po(λ)` matched through
/// [`binomial_poisson_lambda`]. The middle entry is `Pr(L < k)`.
pub fn binomial_poisson_bracket(n: u64, p: f64, k: u64) -> Result<TailBracket> {
    let bin = FamilyDescriptor::binomial(n, p)?;
    let lambda = binomial_poisson_lambda(n, p, k)?;
    let po = FamilyDescriptor::poisson(lambda)?;
    Ok(TailBracket {
        lower: cdf_below(&bin, k)?,
        gaussian_value: cdf_below(&po, k)?,
        upper: exact_cdf(&bin, k as f64)?,
        family: bin,
        point: k as f64,
    })
}
