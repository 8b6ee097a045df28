//! Grid sweeps that verify the domination and intersection inequalities.
//!
//! Each check evaluates a slack (bound side minus bounded side, so that
//! non-negative means the inequality holds) at every grid point and keeps the
//! worst one. Theorem checks gate; probes are reported only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    binomial_poisson_bracket, geometric_sandwich, negbin_left_slack, poisson_halfstep_probe,
};
use crate::error::{domain, Result};
use crate::families::{FamilyDescriptor, SignedLL};
use crate::oracles::{exact_cdf, exact_cdf_table, GridSpec, Spacing};
use crate::specialfn::{gaussian_cdf, gaussian_pdf};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Identifiers of the theorem checks, in report order.
pub const THEOREM_CHECKS: [&str; 8] = [
    "ig-gaussian",
    "ig-ig",
    "gamma-gaussian",
    "gamma-gamma",
    "geometric-exponential",
    "negbin-gamma",
    "binomial-gaussian",
    "poisson-gaussian",
];

/// Identifiers of the non-gating probes.
pub const PROBES: [&str; 2] = ["negbin-counterexample", "poisson-halfstep"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ConjectureHoldsOnGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Theorem,
    Probe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub kind: CheckKind,
    pub grid: Vec<GridSpec>,
    pub points_evaluated: u64,
    pub min_slack: f64,
    pub argmin_location: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub tolerance: f64,
    /// For domination checks: whether the density criterion held on the
    /// grid. Against the Gaussian this is a nondecreasing ratio `φ / f_G`;
    /// between two families it is a single crossing of the densities, from
    /// `f₁ ≥ f₂` to `f₁ ≤ f₂` (for two inverse Gaussians the ratio is not
    /// monotone).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_criterion_holds: Option<bool>,
    /// Both sides of the inequality at the worst point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl CheckReport {
    /// Whether this report makes the suite fail.
    pub fn is_failure(&self) -> bool {
        self.kind == CheckKind::Theorem && self.verdict == Verdict::Fail
    }
}

/// Artificially lowers every slack of one check by `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fault {
    pub check_id: String,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub tolerance: f64,
    pub fault: Option<Fault>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            tolerance: DEFAULT_TOLERANCE,
            fault: None,
        }
    }
}

impl CheckConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        CheckConfig {
            tolerance,
            fault: None,
        }
    }

    fn delta_for(&self, id: &str) -> f64 {
        match &self.fault {
            Some(f) if f.check_id == id => f.delta,
            _ => 0.0,
        }
    }
}

/// Grid overrides accepted by [`run_check`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda_grid: Option<GridSpec>,
    pub m_max: Option<u64>,
}

/// Running minimum over a sweep.
struct Sweep {
    id: &'static str,
    delta: f64,
    count: u64,
    min: f64,
    argmin: Vec<(&'static str, f64)>,
    detail: String,
}

impl Sweep {
    fn new(id: &'static str, cfg: &CheckConfig) -> Self {
        Sweep {
            id,
            delta: cfg.delta_for(id),
            count: 0,
            min: f64::INFINITY,
            argmin: Vec::new(),
            detail: String::new(),
        }
    }

    fn record(&mut self, slack: f64, at: &[(&'static str, f64)], detail: impl FnOnce() -> String) {
        let slack = slack - self.delta;
        self.count += 1;
        // NaN counts as a violation so that it cannot hide.
        let slack = if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            slack
        };
        if slack < self.min {
            self.min = slack;
            self.argmin = at.to_vec();
            self.detail = detail();
        }
    }

    fn finish(self, kind: CheckKind, grid: Vec<GridSpec>, cfg: &CheckConfig) -> CheckReport {
        let verdict = if self.min >= -cfg.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self.finish_with(kind, grid, cfg, verdict)
    }

    fn finish_with(
        self,
        kind: CheckKind,
        grid: Vec<GridSpec>,
        cfg: &CheckConfig,
        verdict: Verdict,
    ) -> CheckReport {
        CheckReport {
            check_id: self.id.to_string(),
            kind,
            grid,
            points_evaluated: self.count,
            min_slack: self.min.max(f64::MIN),
            argmin_location: self
                .argmin
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            verdict,
            tolerance: cfg.tolerance,
            density_criterion_holds: None,
            diagnostic: if verdict == Verdict::Fail {
                Some(self.detail)
            } else {
                None
            },
        }
    }
}

/// Comparison distribution in a domination check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    StandardGaussian,
    Family(FamilyDescriptor),
}

/// `Pr(G(X) ≤ t)` through the exact distribution function.
fn signed_ll_cdf(f: &FamilyDescriptor, t: f64) -> Result<f64> {
    exact_cdf(f, f.signed_ll_inverse(SignedLL(t))?)
}

fn reference_cdf(r: &Reference, t: f64) -> Result<f64> {
    match r {
        Reference::StandardGaussian => Ok(gaussian_cdf(t)),
        Reference::Family(g) => signed_ll_cdf(g, t),
    }
}

fn reference_density(r: &Reference, t: f64) -> Result<f64> {
    match r {
        Reference::StandardGaussian => Ok(gaussian_pdf(t)),
        Reference::Family(g) => g.signed_ll_density(SignedLL(t)),
    }
}

/// Default z-grid for domination checks.
pub fn default_z_grid() -> GridSpec {
    GridSpec::linear(-6.0, 6.0, 2001).expect("static grid")
}

struct DominationSweep {
    sweep: Sweep,
    criterion: bool,
}

impl DominationSweep {
    fn new(id: &'static str, cfg: &CheckConfig) -> Self {
        DominationSweep {
            sweep: Sweep::new(id, cfg),
            criterion: true,
        }
    }

    /// Sweeps `Pr(G(X) ≤ t) - Pr(ref ≤ t)` over the grid, and alongside it
    /// the density criterion that implies the domination.
    fn add(
        &mut self,
        f: &FamilyDescriptor,
        reference: &Reference,
        grid: &GridSpec,
        at: &[(&'static str, f64)],
    ) -> Result<()> {
        if !f.is_continuous() {
            return Err(f.unsupported("check_domination"));
        }
        let mut previous = f64::NEG_INFINITY;
        let mut crossed = false;
        for t in grid.points() {
            let lhs = signed_ll_cdf(f, t)?;
            let rhs = reference_cdf(reference, t)?;
            let mut loc = at.to_vec();
            loc.push(("z", t));
            self.sweep.record(lhs - rhs, &loc, || {
                format!("Pr(G(X) <= {t}) = {lhs:e}, reference = {rhs:e}")
            });
            let f1 = f.signed_ll_density(SignedLL(t))?;
            let f2 = reference_density(reference, t)?;
            match reference {
                Reference::StandardGaussian => {
                    let ratio = f2 / f1;
                    // Where both densities underflow the ratio carries nothing.
                    if ratio.is_finite() && ratio > 0.0 {
                        if ratio < previous * (1.0 - 1e-9) {
                            self.criterion = false;
                        }
                        previous = ratio;
                    }
                }
                Reference::Family(_) => {
                    let eps = 1e-9 * f1.max(f2);
                    if f2 - f1 > eps {
                        crossed = true;
                    } else if crossed && f1 - f2 > eps {
                        self.criterion = false;
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(self, grid: Vec<GridSpec>, cfg: &CheckConfig) -> CheckReport {
        let mut report = self.sweep.finish(CheckKind::Theorem, grid, cfg);
        report.density_criterion_holds = Some(self.criterion);
        report
    }
}

/// `Pr(G(X) ≤ t) ≥ Pr(ref ≤ t)` on the grid: the signed log-likelihood of
/// `f` is dominated by the reference.
pub fn check_domination(
    f: &FamilyDescriptor,
    reference: Reference,
    grid: GridSpec,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let id = match (f.is_continuous(), &reference) {
        (false, _) => return Err(f.unsupported("check_domination")),
        (_, Reference::StandardGaussian) if f.name() == "inverse Gaussian" => "ig-gaussian",
        (_, Reference::StandardGaussian) => "gamma-gaussian",
        (_, Reference::Family(_)) if f.name() == "inverse Gaussian" => "ig-ig",
        _ => "gamma-gamma",
    };
    let mut sweep = DominationSweep::new(id, cfg);
    sweep.add(f, &reference, &grid, &[("mean", f.mean())])?;
    Ok(sweep.finish(vec![grid], cfg))
}

const IG_RATIOS: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];
const GAMMA_SHAPES: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 20.0];
const NEGBIN_SCALES: [f64; 4] = [0.25, 1.0, 3.5, 10.0];

fn ratio_grid() -> GridSpec {
    GridSpec::log(0.1, 10.0, 5).expect("static grid")
}

fn shape_grid() -> GridSpec {
    GridSpec::log(0.5, 20.0, 5).expect("static grid")
}

fn check_ig_gaussian(cfg: &CheckConfig) -> Result<CheckReport> {
    let grid = default_z_grid();
    let mut sweep = DominationSweep::new("ig-gaussian", cfg);
    for r in IG_RATIOS {
        let f = FamilyDescriptor::inverse_gaussian(1.0, 1.0 / r)?;
        sweep.add(
            &f,
            &Reference::StandardGaussian,
            &grid,
            &[("mu_over_lambda", r)],
        )?;
    }
    Ok(sweep.finish(vec![ratio_grid(), grid], cfg))
}

fn check_ig_ig(cfg: &CheckConfig) -> Result<CheckReport> {
    let grid = default_z_grid();
    let mut sweep = DominationSweep::new("ig-ig", cfg);
    for r1 in IG_RATIOS {
        for r2 in IG_RATIOS.iter().copied().filter(|r2| *r2 < r1) {
            let f1 = FamilyDescriptor::inverse_gaussian(1.0, 1.0 / r1)?;
            let f2 = FamilyDescriptor::inverse_gaussian(2.0, 2.0 / r2)?;
            sweep.add(
                &f1,
                &Reference::Family(f2),
                &grid,
                &[("ratio1", r1), ("ratio2", r2)],
            )?;
        }
    }
    Ok(sweep.finish(vec![ratio_grid(), ratio_grid(), grid], cfg))
}

fn check_gamma_gaussian(cfg: &CheckConfig) -> Result<CheckReport> {
    let grid = default_z_grid();
    let mut sweep = DominationSweep::new("gamma-gaussian", cfg);
    for k in GAMMA_SHAPES {
        let f = FamilyDescriptor::gamma(k, 1.0)?;
        sweep.add(&f, &Reference::StandardGaussian, &grid, &[("k", k)])?;
    }
    Ok(sweep.finish(vec![shape_grid(), grid], cfg))
}

fn check_gamma_gamma(cfg: &CheckConfig) -> Result<CheckReport> {
    let grid = default_z_grid();
    let mut sweep = DominationSweep::new("gamma-gamma", cfg);
    for (i, k1) in GAMMA_SHAPES.iter().enumerate() {
        for k2 in &GAMMA_SHAPES[i + 1..] {
            let f1 = FamilyDescriptor::gamma(*k1, 1.0)?;
            let f2 = FamilyDescriptor::gamma(*k2, 2.0)?;
            sweep.add(
                &f1,
                &Reference::Family(f2),
                &grid,
                &[("k1", *k1), ("k2", *k2)],
            )?;
        }
    }
    Ok(sweep.finish(vec![shape_grid(), shape_grid(), grid], cfg))
}

fn check_geometric_exponential(cfg: &CheckConfig) -> Result<CheckReport> {
    let theta_grid = GridSpec::log(0.1, 100.0, 20)?;
    let m_grid = GridSpec::linear(1.0, 200.0, 200)?;
    let mut sweep = Sweep::new("geometric-exponential", cfg);
    for theta in theta_grid.points() {
        for m in 1..=200u64 {
            let (a, b, c) = geometric_sandwich(theta, m)?;
            sweep.record(
                (b - a).min(c - b),
                &[("theta", theta), ("m", m as f64)],
                || format!("G_geo(m-1/2) = {a:e}, G_exp(x) = {b:e}, G_geo(m) = {c:e}"),
            );
        }
    }
    Ok(sweep.finish(CheckKind::Theorem, vec![theta_grid, m_grid], cfg))
}

/// Upper end `mean + 10 sd` of the count range for a family.
fn count_range(f: &FamilyDescriptor) -> u64 {
    let m = f.mean();
    let sd = f.variance_function(m).map(f64::sqrt).unwrap_or(0.0);
    (m + 10.0 * sd).ceil() as u64
}

fn check_negbin_gamma(cfg: &CheckConfig) -> Result<CheckReport> {
    let mut sweep = Sweep::new("negbin-gamma", cfg);
    for k in GAMMA_SHAPES {
        for theta in NEGBIN_SCALES {
            let neg = FamilyDescriptor::negative_binomial(k, theta)?;
            let gamma = FamilyDescriptor::gamma(k, theta)?;
            let top = count_range(&neg);
            let cdf = exact_cdf_table(&neg, top)?;
            // Gamma points matched to G_neg(j), j = 0..=top+1.
            let mut gamma_cdf = Vec::with_capacity(top as usize + 2);
            for j in 0..=top + 1 {
                let x = gamma.signed_ll_inverse(neg.signed_ll(j as f64)?)?;
                gamma_cdf.push(exact_cdf(&gamma, x)?);
            }
            for m in 0..=top as usize {
                let (lo, hi, v) = (gamma_cdf[m], gamma_cdf[m + 1], cdf[m]);
                sweep.record(
                    (v - lo).min(hi - v),
                    &[("k", k), ("theta", theta), ("m", m as f64)],
                    || format!("Gamma bracket [{lo:e}, {hi:e}], Pr(M <= m) = {v:e}"),
                );
            }
        }
    }
    let grid = vec![shape_grid(), GridSpec::log(0.25, 10.0, 4)?];
    Ok(sweep.finish(CheckKind::Theorem, grid, cfg))
}

fn check_binomial_gaussian(cfg: &CheckConfig) -> Result<CheckReport> {
    let n_grid = GridSpec::linear(1.0, 60.0, 60)?;
    let p_grid = GridSpec::linear(0.05, 0.95, 19)?;
    let mut sweep = Sweep::new("binomial-gaussian", cfg);
    for n in 1..=60u64 {
        for p in p_grid.points() {
            let f = FamilyDescriptor::binomial(n, p)?;
            let cdf = exact_cdf_table(&f, n)?;
            for k in 0..=n {
                let lower = if k == 0 { 0.0 } else { cdf[k as usize - 1] };
                let upper = cdf[k as usize];
                let mid = gaussian_cdf(f.signed_ll(k as f64)?.value());
                sweep.record(
                    (mid - lower).min(upper - mid),
                    &[("n", n as f64), ("p", p), ("k", k as f64)],
                    || format!("Pr(K<k) = {lower:e}, Phi(G) = {mid:e}, Pr(K<=k) = {upper:e}"),
                );
            }
        }
    }
    Ok(sweep.finish(CheckKind::Theorem, vec![n_grid, p_grid], cfg))
}

fn default_lambda_grid() -> GridSpec {
    GridSpec::log(0.1, 50.0, 25).expect("static grid")
}

fn check_poisson_gaussian(lambda_grid: GridSpec, cfg: &CheckConfig) -> Result<CheckReport> {
    let mut sweep = Sweep::new("poisson-gaussian", cfg);
    for lambda in lambda_grid.points() {
        let f = FamilyDescriptor::poisson(lambda)?;
        let top = (lambda + 10.0 * lambda.sqrt()).floor() as u64;
        let cdf = exact_cdf_table(&f, top)?;
        for k in 0..=top {
            let lower = if k == 0 { 0.0 } else { cdf[k as usize - 1] };
            let upper = cdf[k as usize];
            let mid = gaussian_cdf(f.signed_ll(k as f64)?.value());
            sweep.record(
                (mid - lower).min(upper - mid),
                &[("lambda", lambda), ("k", k as f64)],
                || format!("Pr(L<k) = {lower:e}, Phi(G) = {mid:e}, Pr(L<=k) = {upper:e}"),
            );
        }
    }
    Ok(sweep.finish(CheckKind::Theorem, vec![lambda_grid], cfg))
}

/// Scans `m = 0..=m_max` for `Pr(M < m) > Φ(G_neg(m)) + 1e-12`. Passes when
/// such an `m` is found.
pub fn check_counterexample_negbin(
    k: f64,
    theta: f64,
    m_max: u64,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let mut sweep = Sweep::new("negbin-counterexample", cfg);
    for m in 0..=m_max {
        let s = negbin_left_slack(k, theta, m)?;
        sweep.record(s, &[("k", k), ("theta", theta), ("m", m as f64)], || {
            format!("Phi(G_neg(m)) - Pr(M < m) = {s:e}")
        });
    }
    let verdict = if sweep.min < -1e-12 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let grid = if m_max >= 1 {
        vec![GridSpec::linear(0.0, m_max as f64, m_max as usize + 1)?]
    } else {
        Vec::new()
    };
    let mut report = sweep.finish_with(CheckKind::Probe, grid, cfg, verdict);
    if verdict == Verdict::Fail {
        report.diagnostic = Some(format!("no m <= {m_max} violates the left inequality"));
    }
    Ok(report)
}

/// Slack of `Φ(G_Po(m + ½)) ≤ Pr(L ≤ m)` over `λ` in the grid and
/// `m ≤ λ + 10√λ`.
pub fn check_poisson_halfstep(lambda_grid: GridSpec, cfg: &CheckConfig) -> Result<CheckReport> {
    let mut sweep = Sweep::new("poisson-halfstep", cfg);
    for lambda in lambda_grid.points() {
        let top = (lambda + 10.0 * lambda.sqrt()).floor() as u64;
        for m in 0..=top {
            let s = poisson_halfstep_probe(lambda, m)?;
            sweep.record(s, &[("lambda", lambda), ("m", m as f64)], || {
                format!("Pr(L <= m) - Phi(G(m + 1/2)) = {s:e}")
            });
        }
    }
    let verdict = if sweep.min >= -cfg.tolerance {
        Verdict::ConjectureHoldsOnGrid
    } else {
        Verdict::Fail
    };
    Ok(sweep.finish_with(CheckKind::Probe, vec![lambda_grid], cfg, verdict))
}

/// `Pr(K<k) ≤ Pr(L<k) ≤ Pr(K≤k)` for Poisson means matched through `G`.
pub fn check_binomial_poisson(
    triples: &[(u64, f64, u64)],
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let mut sweep = Sweep::new("binomial-poisson", cfg);
    for &(n, p, k) in triples {
        let b = binomial_poisson_bracket(n, p, k)?;
        sweep.record(
            b.slack(),
            &[("n", n as f64), ("p", p), ("k", k as f64)],
            || {
                format!(
                    "Pr(K<k) = {:e}, Pr(L<k) = {:e}, Pr(K<=k) = {:e}",
                    b.lower, b.gaussian_value, b.upper
                )
            },
        );
    }
    Ok(sweep.finish(CheckKind::Theorem, Vec::new(), cfg))
}

/// Runs one check by identifier.
pub fn run_check(id: &str, cfg: &CheckConfig, overrides: &Overrides) -> Result<CheckReport> {
    let lambda_grid = overrides.lambda_grid;
    match id {
        "ig-gaussian" => check_ig_gaussian(cfg),
        "ig-ig" => check_ig_ig(cfg),
        "gamma-gaussian" => check_gamma_gaussian(cfg),
        "gamma-gamma" => check_gamma_gamma(cfg),
        "geometric-exponential" => check_geometric_exponential(cfg),
        "negbin-gamma" => check_negbin_gamma(cfg),
        "binomial-gaussian" => check_binomial_gaussian(cfg),
        "poisson-gaussian" => {
            check_poisson_gaussian(lambda_grid.unwrap_or_else(default_lambda_grid), cfg)
        }
        "negbin-counterexample" => {
            check_counterexample_negbin(1.0, 3.5, overrides.m_max.unwrap_or(50), cfg)
        }
        "poisson-halfstep" => check_poisson_halfstep(
            lambda_grid.unwrap_or(GridSpec::new(0.5, 50.0, 25, Spacing::Log)?),
            cfg,
        ),
        other => Err(domain(format!(
            "unknown check id '{other}'; expected one of {}",
            THEOREM_CHECKS
                .iter()
                .chain(PROBES.iter())
                .copied()
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

/// One report per row of the domination and intersection tables.
pub fn run_full_matrix(cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    THEOREM_CHECKS
        .iter()
        .map(|id| run_check(id, cfg, &Overrides::default()))
        .collect()
}

/// The conjecture and counterexample probes with their default grids.
pub fn run_probes(cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    PROBES
        .iter()
        .map(|id| run_check(id, cfg, &Overrides::default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ig_dominated_by_gaussian() {
        let f = FamilyDescriptor::inverse_gaussian(1.0, 1.0).unwrap();
        let grid = GridSpec::linear(-5.0, 5.0, 1001).unwrap();
        let r = check_domination(
            &f,
            Reference::StandardGaussian,
            grid,
            &CheckConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.min_slack >= 0.0);
        assert_eq!(r.points_evaluated, 1001);
        assert_eq!(r.density_criterion_holds, Some(true));
    }

    #[test]
    fn gamma_shape_order() {
        let cfg = CheckConfig::default();
        let grid = GridSpec::linear(-6.0, 6.0, 401).unwrap();
        let k5 = FamilyDescriptor::gamma(5.0, 1.0).unwrap();
        let k20 = FamilyDescriptor::gamma(20.0, 1.0).unwrap();
        let ok = check_domination(&k5, Reference::Family(k20), grid, &cfg).unwrap();
        assert_eq!(ok.verdict, Verdict::Pass);
        let reversed = check_domination(&k20, Reference::Family(k5), grid, &cfg).unwrap();
        assert_eq!(reversed.verdict, Verdict::Fail);
        assert_eq!(reversed.density_criterion_holds, Some(false));
        assert!(reversed.diagnostic.is_some());
    }

    #[test]
    fn exponential_report_is_scale_free() {
        let cfg = CheckConfig::default();
        let grid = GridSpec::linear(-6.0, 6.0, 201).unwrap();
        let a = FamilyDescriptor::exponential(7.0).unwrap();
        let b = FamilyDescriptor::exponential(1.0).unwrap();
        let ra = check_domination(&a, Reference::StandardGaussian, grid, &cfg).unwrap();
        let rb = check_domination(&b, Reference::StandardGaussian, grid, &cfg).unwrap();
        assert_eq!(ra.verdict, Verdict::Pass);
        assert!((ra.min_slack - rb.min_slack).abs() < 1e-12);
    }

    #[test]
    fn discrete_domination_is_rejected() {
        let f = FamilyDescriptor::poisson(1.0).unwrap();
        let r = check_domination(
            &f,
            Reference::StandardGaussian,
            default_z_grid(),
            &CheckConfig::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn counterexample_probe() {
        let cfg = CheckConfig::default();
        let found = check_counterexample_negbin(1.0, 3.5, 50, &cfg).unwrap();
        assert_eq!(found.verdict, Verdict::Pass);
        assert_eq!(found.kind, CheckKind::Probe);
        assert!(found.min_slack < -1e-12);
        let tiny = check_counterexample_negbin(1.0, 3.5, 0, &cfg).unwrap();
        assert_eq!(tiny.verdict, Verdict::Fail);
        assert!(!tiny.is_failure());
        let other = check_counterexample_negbin(5.0, 0.2, 100, &cfg).unwrap();
        assert_eq!(other.points_evaluated, 101);
    }

    #[test]
    fn halfstep_holds_on_small_grid() {
        let grid = GridSpec::log(0.5, 50.0, 7).unwrap();
        let r = check_poisson_halfstep(grid, &CheckConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ConjectureHoldsOnGrid);
    }

    #[test]
    fn fault_injection_fails_with_location() {
        let cfg = CheckConfig {
            tolerance: DEFAULT_TOLERANCE,
            fault: Some(Fault {
                check_id: "poisson-gaussian".into(),
                delta: 1.0,
            }),
        };
        let grid = GridSpec::log(1.0, 5.0, 3).unwrap();
        let r = check_poisson_gaussian(grid, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.is_failure());
        assert!(r.argmin_location.contains_key("lambda"));
        assert!(r.argmin_location.contains_key("k"));
    }

    #[test]
    fn unknown_id_is_an_error() {
        assert!(run_check("nope", &CheckConfig::default(), &Overrides::default()).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let grid = GridSpec::log(1.0, 5.0, 3).unwrap();
        let r = check_poisson_gaussian(grid, &CheckConfig::default()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"verdict\":\"pass\""));
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
