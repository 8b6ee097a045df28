//! The seven exponential families, indexed by their mean.
//!
//! Every family exposes its variance function, the closed-form information
//! divergence between two members, the signed log-likelihood
//! `G(x) = ±sqrt(2 D(P^x ‖ P₀))` and its inverse, and, for the continuous
//! families, the exact saddle-point density and the density of `G(X)`.
//!
//! Divergences are computed through [`deviance_term`] and [`log1pmx`] so that
//! `G` keeps relative accuracy next to the mean, where the textbook forms
//! cancel.

use serde::{Deserialize, Serialize};

use crate::error::{domain, range, Error, Result};
use crate::specialfn::{deviance_term, gaussian_pdf, ln_gamma, log1pmx, TAU};

/// Parameters of a family member in the parametrization each family is
/// usually stated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Params {
    /// Mean `mu` and shape `lambda`.
    InverseGaussian { mu: f64, lambda: f64 },
    /// Mean `theta`.
    Exponential { theta: f64 },
    /// Shape `k`, scale `theta`; mean `k·theta`.
    Gamma { k: f64, theta: f64 },
    /// Mean `theta` (Poisson compounded with an exponential rate).
    Geometric { theta: f64 },
    /// Shape `k`, scale `theta` of the compounding Gamma; mean `k·theta`.
    NegativeBinomial { k: f64, theta: f64 },
    /// `n` trials with success probability `p`.
    Binomial { n: u64, p: f64 },
    /// Mean `lambda`.
    Poisson { lambda: f64 },
}

/// A validated family member. Construct through [`FamilyDescriptor::new`] or
/// one of the named constructors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Params", into = "Params")]
pub struct FamilyDescriptor(Params);

/// The value of the signed log-likelihood at a point.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedLL(pub f64);

impl SignedLL {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for SignedLL {
    fn from(z: f64) -> Self {
        SignedLL(z)
    }
}

/// A point of the sample space. Discrete families read it as a count, but
/// `G` accepts real arguments (half-integers in particular).
pub type SupportPoint = f64;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be > 0, got {v}")))
    }
}

impl TryFrom<Params> for FamilyDescriptor {
    type Error = Error;

    fn try_from(params: Params) -> Result<Self> {
        FamilyDescriptor::new(params)
    }
}

impl From<FamilyDescriptor> for Params {
    fn from(f: FamilyDescriptor) -> Self {
        f.0
    }
}

impl FamilyDescriptor {
    pub fn new(params: Params) -> Result<Self> {
        match params {
            Params::InverseGaussian { mu, lambda } => {
                positive("mu", mu)?;
                positive("lambda", lambda)?;
            }
            Params::Exponential { theta } | Params::Geometric { theta } => {
                positive("theta", theta)?
            }
            Params::Gamma { k, theta } | Params::NegativeBinomial { k, theta } => {
                positive("k", k)?;
                positive("theta", theta)?;
            }
            Params::Binomial { n, p } => {
                if n == 0 {
                    return Err(domain("n must be a positive integer"));
                }
                if !(p > 0.0 && p < 1.0) {
                    return Err(domain("p must lie in (0,1)"));
                }
            }
            Params::Poisson { lambda } => positive("lambda", lambda)?,
        }
        Ok(FamilyDescriptor(params))
    }

    pub fn inverse_gaussian(mu: f64, lambda: f64) -> Result<Self> {
        Self::new(Params::InverseGaussian { mu, lambda })
    }

    pub fn exponential(theta: f64) -> Result<Self> {
        Self::new(Params::Exponential { theta })
    }

    pub fn gamma(k: f64, theta: f64) -> Result<Self> {
        Self::new(Params::Gamma { k, theta })
    }

    pub fn geometric(theta: f64) -> Result<Self> {
        Self::new(Params::Geometric { theta })
    }

    pub fn negative_binomial(k: f64, theta: f64) -> Result<Self> {
        Self::new(Params::NegativeBinomial { k, theta })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        Self::new(Params::Binomial { n, p })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new(Params::Poisson { lambda })
    }

    pub fn params(&self) -> Params {
        self.0
    }

    pub fn name(&self) -> &'static str {
        match self.0 {
            Params::InverseGaussian { .. } => "inverse Gaussian",
            Params::Exponential { .. } => "exponential",
            Params::Gamma { .. } => "gamma",
            Params::Geometric { .. } => "geometric",
            Params::NegativeBinomial { .. } => "negative binomial",
            Params::Binomial { .. } => "binomial",
            Params::Poisson { .. } => "Poisson",
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(
            self.0,
            Params::InverseGaussian { .. } | Params::Exponential { .. } | Params::Gamma { .. }
        )
    }

    pub fn is_discrete(&self) -> bool {
        !self.is_continuous()
    }

    pub(crate) fn unsupported(&self, op: &'static str) -> Error {
        Error::Unsupported {
            op,
            family: self.name(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.0 {
            Params::InverseGaussian { mu, .. } => mu,
            Params::Exponential { theta } | Params::Geometric { theta } => theta,
            Params::Gamma { k, theta } | Params::NegativeBinomial { k, theta } => k * theta,
            Params::Binomial { n, p } => n as f64 * p,
            Params::Poisson { lambda } => lambda,
        }
    }

    /// The member of the same family (same shape, `λ`, `k` or `n`) with mean
    /// `mu`.
    pub fn with_mean(&self, mu: f64) -> Result<Self> {
        self.check_mean(mu, false)?;
        let params = match self.0 {
            Params::InverseGaussian { lambda, .. } => Params::InverseGaussian { mu, lambda },
            Params::Exponential { .. } => Params::Exponential { theta: mu },
            Params::Gamma { k, .. } => Params::Gamma { k, theta: mu / k },
            Params::Geometric { .. } => Params::Geometric { theta: mu },
            Params::NegativeBinomial { k, .. } => Params::NegativeBinomial { k, theta: mu / k },
            Params::Binomial { n, .. } => Params::Binomial {
                n,
                p: mu / n as f64,
            },
            Params::Poisson { .. } => Params::Poisson { lambda: mu },
        };
        Self::new(params)
    }

    /// Checks `mu` against the mean domain. With `allow_boundary`, the limit
    /// means of the discrete families (0, and `n` for the binomial) are
    /// admitted; they are needed for the tilted mean of a divergence.
    fn check_mean(&self, mu: f64, allow_boundary: bool) -> Result<()> {
        if !mu.is_finite() {
            return Err(domain(format!("mean must be finite, got {mu}")));
        }
        let ok = match self.0 {
            Params::Binomial { n, .. } => {
                let n = n as f64;
                if allow_boundary {
                    (0.0..=n).contains(&mu)
                } else {
                    mu > 0.0 && mu < n
                }
            }
            _ if self.is_discrete() && allow_boundary => mu >= 0.0,
            _ => mu > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!(
                "mean {mu} lies outside the mean domain of the {} family",
                self.name()
            )))
        }
    }

    /// Whether `x` lies in the support (real-valued for discrete families).
    pub fn in_support(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self.0 {
            Params::InverseGaussian { .. } | Params::Exponential { .. } | Params::Gamma { .. } => {
                x > 0.0
            }
            Params::Binomial { n, .. } => (0.0..=n as f64).contains(&x),
            _ => x >= 0.0,
        }
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if self.in_support(x) {
            Ok(())
        } else {
            Err(domain(format!(
                "x = {x} lies outside the support of the {} family",
                self.name()
            )))
        }
    }

    /// Variance function `V(mu)`.
    pub fn variance_function(&self, mu: f64) -> Result<f64> {
        self.check_mean(mu, false)?;
        Ok(self.variance_unchecked(mu))
    }

    fn variance_unchecked(&self, mu: f64) -> f64 {
        match self.0 {
            Params::InverseGaussian { lambda, .. } => mu * mu * mu / lambda,
            Params::Exponential { .. } => mu * mu,
            Params::Gamma { k, .. } => mu * mu / k,
            Params::Geometric { .. } => mu + mu * mu,
            Params::NegativeBinomial { k, .. } => mu + mu * mu / k,
            Params::Binomial { n, .. } => mu * (1.0 - mu / n as f64),
            Params::Poisson { .. } => mu,
        }
    }

    /// Information divergence `D(P^{mu1} ‖ P^{mu2})` between two members of
    /// this family (the shape parameter is taken from `self`).
    pub fn divergence(&self, mu1: f64, mu2: f64) -> Result<f64> {
        self.check_mean(mu1, true)?;
        self.check_mean(mu2, false)?;
        Ok(self.divergence_unchecked(mu1, mu2))
    }

    fn divergence_unchecked(&self, mu1: f64, mu2: f64) -> f64 {
        let d = match self.0 {
            Params::InverseGaussian { lambda, .. } => {
                let diff = mu1 - mu2;
                lambda * diff * diff / (2.0 * mu1 * mu2 * mu2)
            }
            Params::Exponential { .. } => scale_divergence(mu1, mu2),
            Params::Gamma { k, .. } => k * scale_divergence(mu1, mu2),
            Params::Geometric { .. } => {
                deviance_term(mu1, mu2) - deviance_term(mu1 + 1.0, mu2 + 1.0)
            }
            Params::NegativeBinomial { k, .. } => {
                let (t1, t2) = (mu1 / k, mu2 / k);
                k * (deviance_term(t1, t2) - deviance_term(t1 + 1.0, t2 + 1.0))
            }
            Params::Binomial { n, .. } => {
                let n = n as f64;
                deviance_term(mu1, mu2) + deviance_term(n - mu1, n - mu2)
            }
            Params::Poisson { .. } => deviance_term(mu1, mu2),
        };
        d.max(0.0)
    }

    /// `β(x) - β(mean)`, the natural-parameter difference, which is `dD/dx`
    /// for the tilted member with mean `x`.
    fn natural_slope(&self, x: f64) -> f64 {
        let m = self.mean();
        match self.0 {
            Params::InverseGaussian { lambda, .. } => {
                0.5 * lambda * (1.0 / (m * m) - 1.0 / (x * x))
            }
            Params::Exponential { .. } => 1.0 / m - 1.0 / x,
            Params::Gamma { k, .. } => k * (1.0 / m - 1.0 / x),
            Params::Geometric { .. } => (x / (1.0 + x)).ln() - (m / (1.0 + m)).ln(),
            Params::NegativeBinomial { k, .. } => (x / (k + x)).ln() - (m / (k + m)).ln(),
            Params::Binomial { n, .. } => {
                let n = n as f64;
                (x / (n - x)).ln() - (m / (n - m)).ln()
            }
            Params::Poisson { .. } => (x / m).ln(),
        }
    }

    /// Signed log-likelihood `G(x)`: negative below the mean, non-negative at
    /// and above it.
    pub fn signed_ll(&self, x: SupportPoint) -> Result<SignedLL> {
        self.check_support(x)?;
        Ok(SignedLL(self.signed_ll_unchecked(x)))
    }

    pub(crate) fn signed_ll_unchecked(&self, x: f64) -> f64 {
        let m = self.mean();
        let root = (2.0 * self.divergence_unchecked(x, m)).sqrt();
        if x < m {
            -root
        } else {
            root
        }
    }

    /// `(inf, sup)` of `G` over the support.
    pub fn signed_ll_range(&self) -> (f64, f64) {
        match self.0 {
            Params::InverseGaussian { .. } | Params::Exponential { .. } | Params::Gamma { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Params::Binomial { n, .. } => (
                self.signed_ll_unchecked(0.0),
                self.signed_ll_unchecked(n as f64),
            ),
            _ => (self.signed_ll_unchecked(0.0), f64::INFINITY),
        }
    }

    /// Inverse of the signed log-likelihood.
    ///
    /// The inverse Gaussian has a closed form; the other families are solved
    /// by bracketed bisection followed by a Newton polish, selecting the branch
    /// by the sign of `z`.
    pub fn signed_ll_inverse(&self, z: SignedLL) -> Result<SupportPoint> {
        let z = z.0;
        if !z.is_finite() {
            return Err(range(format!(
                "signed log-likelihood must be finite, got {z}"
            )));
        }
        if z == 0.0 {
            return Ok(self.mean());
        }
        if let Params::InverseGaussian { mu, lambda } = self.0 {
            let x = mu * unit_ig_inverse(z * (mu / lambda).sqrt());
            return if x > 0.0 && x.is_finite() {
                Ok(x)
            } else {
                Err(range(format!(
                    "z = {z} is beyond the representable range of G"
                )))
            };
        }
        let (lo_g, hi_g) = self.signed_ll_range();
        if z < lo_g || z > hi_g {
            return Err(range(format!(
                "z = {z} lies outside the range [{lo_g}, {hi_g}] of G for the {} family",
                self.name()
            )));
        }
        let m = self.mean();
        let g = |x: f64| self.signed_ll_unchecked(x) - z;
        let (lo, hi) = if z > 0.0 {
            let upper_limit = match self.0 {
                Params::Binomial { n, .. } => n as f64,
                _ => f64::INFINITY,
            };
            let mut lo = m;
            let mut hi = (m * (1.0 + z * z + 2.0 * z * std::f64::consts::E)).min(upper_limit);
            while g(hi) < 0.0 {
                if hi >= upper_limit {
                    return Err(Error::Solver(format!("could not bracket z = {z}")));
                }
                lo = hi;
                hi = (hi * 2.0).min(upper_limit);
                if !hi.is_finite() {
                    return Err(range(format!(
                        "z = {z} is beyond the representable range of G"
                    )));
                }
            }
            (lo, hi)
        } else {
            let mut hi = m;
            let mut lo = 0.5 * m;
            while g(lo) > 0.0 {
                hi = lo;
                lo *= 0.5;
                if lo < f64::MIN_POSITIVE {
                    if self.is_discrete() {
                        lo = 0.0;
                        break;
                    }
                    return Err(range(format!(
                        "z = {z} is beyond the representable range of G"
                    )));
                }
            }
            (lo, hi)
        };
        let x = bisect_increasing(&g, lo, hi);
        Ok(self.newton_polish(x, z, lo, hi))
    }

    fn newton_polish(&self, mut x: f64, z: f64, lo: f64, hi: f64) -> f64 {
        for _ in 0..2 {
            let gx = self.signed_ll_unchecked(x);
            let resid = gx - z;
            if resid == 0.0 || gx == 0.0 || x <= 0.0 {
                break;
            }
            let slope = self.natural_slope(x) / gx;
            if !(slope > 0.0) || !slope.is_finite() {
                break;
            }
            let next = x - resid / slope;
            if !(next >= lo && next <= hi) {
                break;
            }
            if (self.signed_ll_unchecked(next) - z).abs() < resid.abs() {
                x = next;
            } else {
                break;
            }
        }
        x
    }

    /// Exact saddle-point form of the density of a continuous family:
    /// `C · φ(G(x)) / sqrt(V(x))`.
    pub fn saddlepoint_density(&self, x: SupportPoint) -> Result<f64> {
        if !self.is_continuous() {
            return Err(self.unsupported("saddlepoint_density"));
        }
        self.check_support(x)?;
        let ln_c = self.saddlepoint_ln_constant();
        // ln φ(G) = -D - ln(τ)/2, with D computed directly rather than as G²/2.
        let ln_phi = -self.divergence_unchecked(x, self.mean()) - 0.5 * TAU.ln();
        Ok((ln_c + ln_phi - 0.5 * self.variance_unchecked(x).ln()).exp())
    }

    /// `ln C` for the saddle-point constant: `0` for the inverse Gaussian,
    /// `τ^{1/2}/e` for the exponential, `k^k τ^{1/2} e^{-k} / (Γ(k) k^{1/2})`
    /// for the Gamma family.
    fn saddlepoint_ln_constant(&self) -> f64 {
        match self.0 {
            Params::Exponential { .. } => 0.5 * TAU.ln() - 1.0,
            Params::Gamma { k, .. } => k * k.ln() + 0.5 * TAU.ln() - k - ln_gamma(k) - 0.5 * k.ln(),
            _ => 0.0,
        }
    }

    /// Density of the random variable `G(X)` at `z`, for continuous families.
    ///
    /// For the exponential and Gamma families the expression is `0/0` at
    /// `z = 0`; for `|z| < 1e-6` the value is the average of the two sides at
    /// `±1e-6` (error `O(z²)`).
    pub fn signed_ll_density(&self, z: SignedLL) -> Result<f64> {
        let z = z.0;
        match self.0 {
            Params::InverseGaussian { mu, .. } => {
                let w = self.signed_ll_inverse(SignedLL(z))? / mu;
                Ok(2.0 * gaussian_pdf(z) / (1.0 + w))
            }
            Params::Exponential { .. } | Params::Gamma { .. } => {
                if z.abs() < REMOVABLE_EPS {
                    let left = self.gamma_type_density(-REMOVABLE_EPS)?;
                    let right = self.gamma_type_density(REMOVABLE_EPS)?;
                    Ok(0.5 * (left + right))
                } else {
                    self.gamma_type_density(z)
                }
            }
            _ => Err(self.unsupported("signed_ll_density")),
        }
    }

    fn gamma_type_density(&self, z: f64) -> Result<f64> {
        let k = match self.0 {
            Params::Gamma { k, .. } => k,
            _ => 1.0,
        };
        let ratio = self.signed_ll_inverse(SignedLL(z))? / self.mean();
        let t = z / k.sqrt();
        Ok(self.saddlepoint_ln_constant().exp() * t * gaussian_pdf(z) / (ratio - 1.0))
    }
}

const REMOVABLE_EPS: f64 = 1e-6;

/// `r - 1 - ln r` with `r = mu1/mu2`. Near `r = 1` through [`log1pmx`]; far
/// from it directly, since `1 + (r - 1)` would lose a tiny `r`.
fn scale_divergence(mu1: f64, mu2: f64) -> f64 {
    let d = (mu1 - mu2) / mu2;
    if d.abs() < 0.25 {
        -log1pmx(d)
    } else {
        let r = mu1 / mu2;
        r - 1.0 - r.ln()
    }
}

/// Inverse of `g(w) = (w - 1)/sqrt(w)`, the unit inverse-Gaussian signed
/// log-likelihood: `sqrt(w)` is the positive root of `s² - t·s - 1 = 0`.
fn unit_ig_inverse(t: f64) -> f64 {
    let disc = (t * t + 4.0).sqrt();
    let s = if t >= 0.0 {
        0.5 * (t + disc)
    } else {
        2.0 / (disc - t)
    };
    s * s
}

/// Bisection for an increasing `g` with `g(lo) <= 0 <= g(hi)`. Uses geometric
/// midpoints while the bracket spans more than a factor of four so that roots
/// near zero are resolved to full relative precision.
fn bisect_increasing(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = if lo > 0.0 && hi > 4.0 * lo {
            (0.5 * (lo.ln() + hi.ln())).exp()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(hi).abs() < g(lo).abs() {
        hi
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_families() -> Vec<FamilyDescriptor> {
        vec![
            FamilyDescriptor::inverse_gaussian(1.0, 1.0).unwrap(),
            FamilyDescriptor::inverse_gaussian(2.5, 0.7).unwrap(),
            FamilyDescriptor::exponential(3.5).unwrap(),
            FamilyDescriptor::gamma(5.0, 0.7).unwrap(),
            FamilyDescriptor::gamma(0.5, 2.0).unwrap(),
            FamilyDescriptor::geometric(3.5).unwrap(),
            FamilyDescriptor::negative_binomial(2.0, 1.75).unwrap(),
            FamilyDescriptor::binomial(7, 0.5).unwrap(),
            FamilyDescriptor::binomial(40, 0.1).unwrap(),
            FamilyDescriptor::poisson(3.5).unwrap(),
        ]
    }

    fn grid(f: &FamilyDescriptor, count: usize) -> Vec<f64> {
        let m = f.mean();
        let (lo, hi) = match f.params() {
            Params::Binomial { n, .. } => (0.0, n as f64),
            _ if f.is_discrete() => (0.0, 20.0 * m),
            _ => (0.01 * m, 20.0 * m),
        };
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }

    #[test]
    fn constructors_validate() {
        assert!(FamilyDescriptor::binomial(7, 1.5).is_err());
        assert_eq!(
            FamilyDescriptor::binomial(7, 1.5).unwrap_err().to_string(),
            "p must lie in (0,1)"
        );
        assert!(FamilyDescriptor::binomial(0, 0.5).is_err());
        assert!(FamilyDescriptor::gamma(-1.0, 1.0).is_err());
        assert!(FamilyDescriptor::poisson(f64::NAN).is_err());
        assert!(FamilyDescriptor::inverse_gaussian(1.0, 0.0).is_err());
    }

    #[test]
    fn means() {
        assert_eq!(FamilyDescriptor::gamma(5.0, 0.7).unwrap().mean(), 3.5);
        assert_eq!(
            FamilyDescriptor::negative_binomial(2.0, 1.75)
                .unwrap()
                .mean(),
            3.5
        );
        assert_eq!(FamilyDescriptor::binomial(7, 0.5).unwrap().mean(), 3.5);
    }

    #[test]
    fn variance_function_examples() {
        let g = FamilyDescriptor::gamma(5.0, 2.0).unwrap();
        assert_eq!(g.variance_function(10.0).unwrap(), 20.0);
        let geo = FamilyDescriptor::geometric(1.0).unwrap();
        assert_eq!(geo.variance_function(3.5).unwrap(), 15.75);
        let po = FamilyDescriptor::poisson(3.5).unwrap();
        assert_eq!(po.variance_function(3.5).unwrap(), 3.5);
        let bin = FamilyDescriptor::binomial(7, 0.5).unwrap();
        assert!(bin.variance_function(7.0).is_err());
        assert!(bin.variance_function(0.0).is_err());
        assert!(po.variance_function(-1.0).is_err());
    }

    #[test]
    fn divergence_examples() {
        let po = FamilyDescriptor::poisson(3.5).unwrap();
        // 5 ln(10/7) - 1.5
        assert!((po.divergence(5.0, 3.5).unwrap() - 0.283_374_719_693_661_9).abs() < 1e-15);
        let ig = FamilyDescriptor::inverse_gaussian(1.0, 1.0).unwrap();
        assert!((ig.divergence(4.0, 1.0).unwrap() - 1.125).abs() < 1e-15);
        for f in all_families() {
            let m = f.mean();
            assert_eq!(f.divergence(m, m).unwrap(), 0.0);
        }
        let geo = FamilyDescriptor::geometric(1.0).unwrap();
        assert!((geo.divergence(3.5, 5.0).unwrap() - 0.046_207_022_247_450_85).abs() < 1e-15);
        // 0·ln 0 boundary conventions.
        let bin = FamilyDescriptor::binomial(7, 0.5).unwrap();
        assert!((bin.divergence(0.0, 3.5).unwrap() - 7.0 * 2f64.ln()).abs() < 1e-14);
        assert!((po.divergence(0.0, 3.5).unwrap() - 3.5).abs() < 1e-15);
        assert!(bin.divergence(7.5, 3.5).is_err());
    }

    #[test]
    fn signed_ll_examples() {
        let ig = FamilyDescriptor::inverse_gaussian(1.0, 1.0).unwrap();
        assert_eq!(ig.signed_ll(1.0).unwrap().value(), 0.0);
        let exp = FamilyDescriptor::exponential(1.0).unwrap();
        assert!((exp.signed_ll(2.0).unwrap().value() - 0.783_393_667_883_593_1).abs() < 1e-15);
        let bin = FamilyDescriptor::binomial(7, 0.5).unwrap();
        assert!((bin.signed_ll(5.0).unwrap().value() - 1.152_513_031_442_869_6).abs() < 1e-14);
        assert!(bin.signed_ll(8.0).is_err());
        assert!(exp.signed_ll(0.0).is_err());
        let po = FamilyDescriptor::poisson(3.5).unwrap();
        assert!((po.signed_ll(0.0).unwrap().value() + 7f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn signed_ll_square_is_twice_divergence() {
        for f in all_families() {
            for x in grid(&f, 97) {
                if !f.in_support(x) {
                    continue;
                }
                let z = f.signed_ll(x).unwrap().value();
                let d = f.divergence(x, f.mean()).unwrap();
                assert!(
                    (z * z - 2.0 * d).abs() <= 1e-12 * (2.0 * d).max(1e-300),
                    "{f:?} x={x}"
                );
                assert_eq!(z < 0.0, x < f.mean());
            }
        }
    }

    #[test]
    fn signed_ll_strictly_increasing() {
        for f in all_families() {
            let xs = grid(&f, 1000);
            let zs: Vec<f64> = xs
                .iter()
                .map(|&x| f.signed_ll(x).unwrap().value())
                .collect();
            for w in zs.windows(2) {
                assert!(w[1] > w[0], "{f:?}: {} !< {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn ratio_to_offset_is_nonincreasing_where_variance_increases() {
        // G(x)/(x - mean) is nonincreasing when V is increasing.
        let mut cases = all_families();
        cases.retain(|f| !matches!(f.params(), Params::Binomial { .. }));
        // Binomial: V increases only for mu < n/2; restrict to that side.
        let bin = FamilyDescriptor::binomial(40, 0.1).unwrap();
        for f in cases {
            let m = f.mean();
            let xs: Vec<f64> = grid(&f, 800)
                .into_iter()
                .filter(|&x| f.in_support(x) && (x - m).abs() > 1e-3 * m)
                .collect();
            check_ratio_nonincreasing(&f, &xs);
        }
        let xs: Vec<f64> = (0..400)
            .map(|i| 20.0 * i as f64 / 399.0)
            .filter(|&x| (x - 4.0).abs() > 1e-3)
            .collect();
        check_ratio_nonincreasing(&bin, &xs);
    }

    fn check_ratio_nonincreasing(f: &FamilyDescriptor, xs: &[f64]) {
        let m = f.mean();
        let r: Vec<f64> = xs
            .iter()
            .map(|&x| f.signed_ll(x).unwrap().value() / (x - m))
            .collect();
        for (i, w) in r.windows(2).enumerate() {
            assert!(
                w[1] <= w[0] + 1e-9,
                "{f:?} at x={}: {} > {}",
                xs[i + 1],
                w[1],
                w[0]
            );
        }
    }

    #[test]
    fn inverse_examples() {
        let exp = FamilyDescriptor::exponential(1.0).unwrap();
        let x = exp
            .signed_ll_inverse(SignedLL(0.783_393_667_883_593_1))
            .unwrap();
        assert!((x - 2.0).abs() < 1e-12);
        let ig = FamilyDescriptor::inverse_gaussian(1.0, 1.0).unwrap();
        assert!((ig.signed_ll_inverse(SignedLL(1.5)).unwrap() - 4.0).abs() < 1e-14);
        for f in all_families() {
            assert_eq!(f.signed_ll_inverse(SignedLL(0.0)).unwrap(), f.mean());
        }
        let bin = FamilyDescriptor::binomial(7, 0.5).unwrap();
        let (lo, hi) = bin.signed_ll_range();
        assert!(matches!(
            bin.signed_ll_inverse(SignedLL(hi + 0.1)),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            bin.signed_ll_inverse(SignedLL(lo - 0.1)),
            Err(Error::Range(_))
        ));
        assert!((bin.signed_ll_inverse(SignedLL(hi)).unwrap() - 7.0).abs() < 1e-12);
        assert!(bin.signed_ll_inverse(SignedLL(lo)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trips() {
        for f in all_families() {
            for x in grid(&f, 211) {
                if !f.in_support(x) {
                    continue;
                }
                let z = f.signed_ll(x).unwrap();
                let back = f.signed_ll_inverse(z).unwrap();
                let zb = f.signed_ll(back).unwrap().value();
                assert!(
                    (zb - z.value()).abs() <= 1e-12,
                    "{f:?} x={x}: {zb} vs {}",
                    z.value()
                );
                if x > 0.0 {
                    assert!(((back - x) / x).abs() <= 1e-10, "{f:?} x={x} back={back}");
                }
            }
        }
    }

    #[test]
    fn saddlepoint_examples() {
        let ig = FamilyDescriptor::inverse_gaussian(1.0, 1.0).unwrap();
        assert!((ig.saddlepoint_density(1.0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        let exp = FamilyDescriptor::exponential(1.0).unwrap();
        assert!((exp.saddlepoint_density(1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let gam = FamilyDescriptor::gamma(2.0, 1.0).unwrap();
        let want = 2.0 * (-2f64).exp();
        assert!(((gam.saddlepoint_density(2.0).unwrap() - want) / want).abs() < 1e-12);
        let po = FamilyDescriptor::poisson(1.0).unwrap();
        assert!(matches!(
            po.saddlepoint_density(1.0),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn signed_ll_density_at_zero() {
        let ig = FamilyDescriptor::inverse_gaussian(1.0, 1.0).unwrap();
        assert!(
            (ig.signed_ll_density(SignedLL(0.0)).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15
        );
        // The density of G(X) at 0 is f(mean)·sqrt(V(mean)), which is 1/e for Exp(1).
        let exp = FamilyDescriptor::exponential(1.0).unwrap();
        let at0 = exp.signed_ll_density(SignedLL(0.0)).unwrap();
        assert!((at0 - (-1f64).exp()).abs() < 1e-10, "{at0}");
        // Approaching from both sides.
        for &h in &[1e-3, 1e-4] {
            let l = exp.signed_ll_density(SignedLL(-h)).unwrap();
            let r = exp.signed_ll_density(SignedLL(h)).unwrap();
            assert!((l - at0).abs() < 10.0 * h && (r - at0).abs() < 10.0 * h);
        }
        let bin = FamilyDescriptor::binomial(3, 0.5).unwrap();
        assert!(bin.signed_ll_density(SignedLL(0.0)).is_err());
    }

    #[test]
    fn duality_identities() {
        for n in [1u64, 2, 7, 20, 41] {
            for &p in &[0.05, 0.3, 0.5, 0.77, 0.95] {
                let bin = FamilyDescriptor::binomial(n, p).unwrap();
                for k in 1..=n {
                    let nb = FamilyDescriptor::negative_binomial(k as f64, (1.0 - p) / p).unwrap();
                    let lhs = bin.signed_ll(k as f64).unwrap().value();
                    let rhs = -nb.signed_ll((n - k) as f64).unwrap().value();
                    assert!(
                        (lhs - rhs).abs() < 1e-12,
                        "n={n} p={p} k={k}: {lhs} vs {rhs}"
                    );
                }
            }
        }
        for &lambda in &[0.1, 1.0, 3.5, 17.0, 50.0] {
            let po = FamilyDescriptor::poisson(lambda).unwrap();
            for k in 1..80 {
                let gam = FamilyDescriptor::gamma(k as f64, 1.0).unwrap();
                let lhs = po.signed_ll(k as f64).unwrap().value();
                let rhs = -gam.signed_ll(lambda).unwrap().value();
                assert!((lhs - rhs).abs() < 1e-12, "lambda={lambda} k={k}");
            }
        }
    }

    #[test]
    fn serde_rejects_invalid_parameters() {
        let ok: FamilyDescriptor =
            serde_json::from_str(r#"{"family":"binomial","n":7,"p":0.5}"#).unwrap();
        assert_eq!(ok, FamilyDescriptor::binomial(7, 0.5).unwrap());
        assert!(
            serde_json::from_str::<FamilyDescriptor>(r#"{"family":"binomial","n":7,"p":2.0}"#)
                .is_err()
        );
        let s = serde_json::to_string(&FamilyDescriptor::gamma(2.0, 0.5).unwrap()).unwrap();
        assert_eq!(s, r#"{"family":"gamma","k":2.0,"theta":0.5}"#);
    }
}
