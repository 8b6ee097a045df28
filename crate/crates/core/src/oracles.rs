//! Reference computations used to validate the families and bounds modules.
//!
//! Nothing here goes through the signed log-likelihood machinery except where
//! an operation is explicitly a change of variables through `G⁻¹`. Point
//! probabilities use Loader's saddle-point decomposition
//! `exp(-stirlerr - bd0) / sqrt(2π·x)` so that masses keep full relative
//! accuracy for counts up to `10⁶`, and distribution functions are running
//! compensated sums of those masses.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::{FamilyDescriptor, Params, SignedLL, SupportPoint};
use crate::specialfn::{
    binomial_kernel, deviance_term, gaussian_cdf, ln_gamma, ln_gaussian_cdf, reg_inc_gamma_lower,
    stirlerr, TAU,
};

/// A one-dimensional evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridSpec {
    lo: f64,
    hi: f64,
    count: usize,
    spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    lo: f64,
    hi: f64,
    count: usize,
    spacing: Spacing,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;

    fn try_from(g: RawGrid) -> Result<Self> {
        GridSpec::new(g.lo, g.hi, g.count, g.spacing)
    }
}

impl From<GridSpec> for RawGrid {
    fn from(g: GridSpec) -> Self {
        RawGrid {
            lo: g.lo,
            hi: g.hi,
            count: g.count,
            spacing: g.spacing,
        }
    }
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(domain(format!("grid needs lo < hi, got [{lo}, {hi}]")));
        }
        if count < 2 {
            return Err(domain(format!("grid needs at least 2 points, got {count}")));
        }
        if spacing == Spacing::Log && lo <= 0.0 {
            return Err(domain("log-spaced grid needs lo > 0"));
        }
        Ok(GridSpec {
            lo,
            hi,
            count,
            spacing,
        })
    }

    pub fn linear(lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::new(lo, hi, count, Spacing::Linear)
    }

    pub fn log(lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::new(lo, hi, count, Spacing::Log)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// The grid points, both endpoints included exactly.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == self.count - 1 {
                    return self.hi;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.lo + t * (self.hi - self.lo),
                    Spacing::Log => (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Point probability of a discrete family at the count `m`.
pub fn exact_pmf(f: &FamilyDescriptor, m: u64) -> Result<f64> {
    let x = m as f64;
    Ok(match f.params() {
        Params::Poisson { lambda } => {
            if m == 0 {
                (-lambda).exp()
            } else {
                (-stirlerr(x) - deviance_term(x, lambda)).exp() / (TAU * x).sqrt()
            }
        }
        Params::Binomial { n, p } => {
            if m > n {
                0.0
            } else {
                binomial_kernel(x, n as f64, p, 1.0 - p)
            }
        }
        Params::Geometric { theta } => negbin_pmf(x, 1.0, theta),
        Params::NegativeBinomial { k, theta } => negbin_pmf(x, k, theta),
        _ => return Err(f.unsupported("exact_pmf")),
    })
}

/// `Γ(m+k)/(m!Γ(k)) θ^m/(θ+1)^{m+k}`, through the binomial identity
/// `pmf = k/(k+m) · Bin(k | m+k, 1/(1+θ))`.
fn negbin_pmf(x: f64, k: f64, theta: f64) -> f64 {
    let p = 1.0 / (1.0 + theta);
    let q = theta / (1.0 + theta);
    if x == 0.0 {
        return (-k * theta.ln_1p()).exp();
    }
    k / (k + x) * binomial_kernel(k, k + x, p, q)
}

/// Textbook density of a continuous family.
pub fn exact_density(f: &FamilyDescriptor, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain(format!("density needs x > 0, got {x}")));
    }
    Ok(match f.params() {
        Params::InverseGaussian { mu, lambda } => {
            (lambda / (TAU * x * x * x)).sqrt()
                * (-lambda * (x - mu) * (x - mu) / (2.0 * mu * mu * x)).exp()
        }
        Params::Exponential { theta } => (-x / theta).exp() / theta,
        Params::Gamma { k, theta } => {
            ((k - 1.0) * x.ln() - x / theta - ln_gamma(k) - k * theta.ln()).exp()
        }
        _ => return Err(f.unsupported("exact_density")),
    })
}

fn count_arg(f: &FamilyDescriptor, x: SupportPoint) -> Result<u64> {
    if !f.in_support(x) || x.fract() != 0.0 {
        return Err(domain(format!(
            "x = {x} is not an integer point of the {} support",
            f.name()
        )));
    }
    Ok(x as u64)
}

/// Exact distribution function `Pr(X ≤ x)`.
///
/// Discrete families require an integer `x`. Summation stops early once past
/// the mode the next mass drops below `1e-18` of the running sum; the omitted
/// tail is then below `1e-16`.
pub fn exact_cdf(f: &FamilyDescriptor, x: SupportPoint) -> Result<f64> {
    match f.params() {
        Params::Exponential { theta } => {
            if x < 0.0 || !x.is_finite() {
                return Err(domain(format!("x = {x} outside the exponential support")));
            }
            Ok(-(-x / theta).exp_m1())
        }
        Params::Gamma { k, theta } => {
            if x < 0.0 || !x.is_finite() {
                return Err(domain(format!("x = {x} outside the gamma support")));
            }
            reg_inc_gamma_lower(k, x / theta)
        }
        Params::InverseGaussian { mu, lambda } => {
            if x < 0.0 || !x.is_finite() {
                return Err(domain(format!(
                    "x = {x} outside the inverse Gaussian support"
                )));
            }
            if x == 0.0 {
                return Ok(0.0);
            }
            Ok(ig_cdf(mu, lambda, x))
        }
        Params::Geometric { theta } => {
            let m = count_arg(f, x)?;
            // 1 - (θ/(θ+1))^{m+1}
            Ok(-((m as f64 + 1.0) * -(1.0 / theta).ln_1p()).exp_m1())
        }
        _ => {
            let m = count_arg(f, x)?;
            Ok(summed_cdf(f, m, false).pop().unwrap_or(0.0))
        }
    }
}

/// `Pr(X ≤ x) = Φ(√(λ/x)(x/μ - 1)) + e^{2λ/μ} Φ(-√(λ/x)(x/μ + 1))`.
fn ig_cdf(mu: f64, lambda: f64, x: f64) -> f64 {
    let r = (lambda / x).sqrt();
    let first = gaussian_cdf(r * (x / mu - 1.0));
    let second = (2.0 * lambda / mu + ln_gaussian_cdf(-r * (x / mu + 1.0))).exp();
    (first + second).min(1.0)
}

/// Running sums `Pr(X ≤ j)` for `j = 0..=m`; with `keep = false` only the
/// last entry is returned.
fn summed_cdf(f: &FamilyDescriptor, m: u64, keep: bool) -> Vec<f64> {
    let mode = f.mean();
    let mut out = Vec::with_capacity(if keep { m as usize + 1 } else { 1 });
    let mut acc = CompensatedSum::default();
    let mut saturated = false;
    for j in 0..=m {
        if !saturated {
            let term = exact_pmf(f, j).unwrap_or(0.0);
            acc.add(term);
            if j as f64 > mode && term < 1e-18 * acc.value() {
                saturated = true;
            }
        }
        if keep || j == m {
            out.push(acc.value().min(1.0));
        }
    }
    out
}

/// `Pr(X ≤ j)` for every `j = 0..=m_max`, in one pass.
pub fn exact_cdf_table(f: &FamilyDescriptor, m_max: u64) -> Result<Vec<f64>> {
    match f.params() {
        Params::Geometric { .. } => (0..=m_max).map(|j| exact_cdf(f, j as f64)).collect(),
        _ if f.is_discrete() => {
            let top = match f.params() {
                Params::Binomial { n, .. } => m_max.min(n),
                _ => m_max,
            };
            let mut table = summed_cdf(f, top, true);
            table.resize(m_max as usize + 1, 1.0);
            Ok(table)
        }
        _ => Err(f.unsupported("exact_cdf_table")),
    }
}

/// Quantile `inf {x : Pr(X ≤ x) ≥ q}` for `q ∈ (0, 1)`.
///
/// Continuous families bisect the distribution function in `ln x`; discrete
/// families scan the running sum.
pub fn exact_quantile(f: &FamilyDescriptor, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain(format!("probability must lie in (0,1), got {q}")));
    }
    if let Params::Exponential { theta } = f.params() {
        return Ok(-theta * (-q).ln_1p());
    }
    if f.is_discrete() {
        let mut acc = CompensatedSum::default();
        let mut j = 0u64;
        loop {
            acc.add(exact_pmf(f, j)?);
            if acc.value() >= q {
                return Ok(j as f64);
            }
            if let Params::Binomial { n, .. } = f.params() {
                if j >= n {
                    return Ok(n as f64);
                }
            }
            if j as f64 > f.mean() && exact_pmf(f, j)? < 1e-18 * acc.value() {
                return Err(Error::Solver(format!(
                    "quantile {q} lies beyond the summation cutoff"
                )));
            }
            j += 1;
        }
    }
    let cdf = |x: f64| exact_cdf(f, x);
    let (mut lo, mut hi) = (f.mean(), f.mean());
    while cdf(hi)? < q {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Solver(format!("could not bracket quantile {q}")));
        }
    }
    while cdf(lo)? > q {
        hi = lo;
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Ok(lo);
        }
    }
    for _ in 0..200 {
        let mid = if hi > 4.0 * lo {
            (0.5 * (lo.ln() + hi.ln())).exp()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Smallest count past the mean at which the summation in [`exact_cdf`]
/// saturates (the binomial returns `n`).
pub fn support_cutoff(f: &FamilyDescriptor) -> Result<u64> {
    if let Params::Binomial { n, .. } = f.params() {
        return Ok(n);
    }
    if !f.is_discrete() {
        return Err(f.unsupported("support_cutoff"));
    }
    let mut acc = CompensatedSum::default();
    let mut j = 0u64;
    loop {
        let term = exact_pmf(f, j)?;
        acc.add(term);
        if j as f64 > f.mean() && term < 1e-18 * acc.value() {
            return Ok(j);
        }
        j += 1;
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod 7/15 panel: `(kronrod estimate, |kronrod - gauss|)`.
fn gk15(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = g(c - dx) + g(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integration on `[a, b]`. Panels are bisected until
/// each one's error estimate is below `tol` (or the panel can no longer be
/// split in floating point).
pub(crate) fn integrate(g: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut total = CompensatedSum::default();
    let mut stack = vec![(lo, hi, 0u32)];
    while let Some((l, r, depth)) = stack.pop() {
        let (est, err) = gk15(&g, l, r);
        let mid = 0.5 * (l + r);
        if err <= tol || depth >= 60 || mid <= l || mid >= r {
            total.add(est);
        } else {
            stack.push((l, mid, depth + 1));
            stack.push((mid, r, depth + 1));
        }
    }
    sign * total.value()
}

/// `∫_{μ1}^{μ2} (μ - μ1)/V(μ) dμ`, the divergence from the variance function.
///
/// The endpoints may sit on the boundary of the mean domain; the rule never
/// evaluates the integrand there.
pub fn numeric_divergence(f: &FamilyDescriptor, mu1: f64, mu2: f64) -> Result<f64> {
    let upper = match f.params() {
        Params::Binomial { n, .. } => n as f64,
        _ => f64::INFINITY,
    };
    for mu in [mu1, mu2] {
        let ok =
            mu.is_finite() && mu <= upper && if f.is_discrete() { mu >= 0.0 } else { mu > 0.0 };
        if !ok {
            return Err(domain(format!(
                "mean {mu} lies outside the mean domain of the {} family",
                f.name()
            )));
        }
    }
    if mu1 == mu2 {
        return Ok(0.0);
    }
    let v = |mu: f64| -> f64 {
        match f.params() {
            Params::InverseGaussian { lambda, .. } => mu * mu * mu / lambda,
            Params::Exponential { .. } => mu * mu,
            Params::Gamma { k, .. } => mu * mu / k,
            Params::Geometric { .. } => mu * (1.0 + mu),
            Params::NegativeBinomial { k, .. } => mu * (1.0 + mu / k),
            Params::Binomial { n, .. } => mu * (1.0 - mu / n as f64),
            Params::Poisson { .. } => mu,
        }
    };
    Ok(integrate(|mu| (mu - mu1) / v(mu), mu1, mu2, 1e-13).max(0.0))
}

/// Central difference `[F(G⁻¹(z+h)) - F(G⁻¹(z-h))] / 2h` for the density of
/// `G(X)` at `z`.
pub fn numeric_signed_ll_density(f: &FamilyDescriptor, z: SignedLL, h: f64) -> Result<f64> {
    if !f.is_continuous() {
        return Err(f.unsupported("numeric_signed_ll_density"));
    }
    if !(1e-7..=1e-3).contains(&h) {
        return Err(domain(format!("step h must lie in [1e-7, 1e-3], got {h}")));
    }
    let up = f.signed_ll_inverse(SignedLL(z.0 + h))?;
    let down = f.signed_ll_inverse(SignedLL(z.0 - h))?;
    Ok((exact_cdf(f, up)? - exact_cdf(f, down)?) / (2.0 * h))
}

/// Residual of the mean-derivative identities at step `h`:
///
/// * Poisson: `d/dλ Pr(K ≤ k) = -Pr(K = k)`;
/// * negative binomial: `d/dμ Pr(M_k ≤ m) = -Pr(M_{k+1} = m)` at fixed `θ`;
/// * Gamma: `d/dμ F_k(t) = -` the `Γ(k+1, θ)` density at `t`.
///
/// Returns `|central difference + claimed value|`.
pub fn check_derivative_lemmas(f: &FamilyDescriptor, point: SupportPoint, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < f.mean()) {
        return Err(domain(format!("step h must lie in (0, mean), got {h}")));
    }
    let claimed = match f.params() {
        Params::Poisson { .. } => exact_pmf(f, count_arg(f, point)?)?,
        Params::NegativeBinomial { k, theta } => {
            let next = FamilyDescriptor::negative_binomial(k + 1.0, theta)?;
            exact_pmf(&next, count_arg(f, point)?)?
        }
        Params::Gamma { k, theta } => {
            exact_density(&FamilyDescriptor::gamma(k + 1.0, theta)?, point)?
        }
        _ => return Err(f.unsupported("check_derivative_lemmas")),
    };
    let m = f.mean();
    let up = exact_cdf(&f.with_mean(m + h)?, point)?;
    let down = exact_cdf(&f.with_mean(m - h)?, point)?;
    Ok(((up - down) / (2.0 * h) + claimed).abs())
}

/// `residual(h) / residual(h/2)`; close to 4 for a second-order difference of
/// a true identity.
pub fn derivative_convergence_ratio(
    f: &FamilyDescriptor,
    point: SupportPoint,
    h: f64,
) -> Result<f64> {
    Ok(check_derivative_lemmas(f, point, h)? / check_derivative_lemmas(f, point, 0.5 * h)?)
}
