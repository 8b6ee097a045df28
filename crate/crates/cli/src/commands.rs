//! The four subcommands. Each returns the rendered text and the exit status.

use tailbound::bounds::{
    geometric_exponential_bracket, geometric_sandwich, intersection_bracket, negbin_gamma_bracket,
    negbin_gaussian_lower,
};
use tailbound::checkers::{
    run_check, CheckConfig, CheckKind, CheckReport, Fault, Overrides, Verdict, DEFAULT_TOLERANCE,
    PROBES, THEOREM_CHECKS,
};
use tailbound::oracles::{exact_cdf, numeric_divergence, GridSpec, Spacing};
use tailbound::qq::{preset, probability_grid, qq_series, QQReference, QQSeries};
use tailbound::{FamilyDescriptor, Params};

use crate::output::{Cell, Format, Record, Table};
use crate::{BoundArgs, CheckArgs, DivergenceArgs, FamilyArgs, FamilyKind, QqArgs};

pub struct Output {
    pub text: String,
    pub status: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, status: 0 }
    }
}

type CmdResult = Result<Output, String>;

fn err(e: tailbound::Error) -> String {
    e.to_string()
}

fn need<T>(flag: &str, family: FamilyKind, v: Option<T>) -> Result<T, String> {
    v.ok_or_else(|| format!("--{flag} is required for --family {}", kind_name(family)))
}

fn kind_name(k: FamilyKind) -> &'static str {
    match k {
        FamilyKind::Binomial => "binomial",
        FamilyKind::Poisson => "poisson",
        FamilyKind::Geometric => "geometric",
        FamilyKind::Negbin => "negbin",
        FamilyKind::Gamma => "gamma",
        FamilyKind::Exponential => "exponential",
        FamilyKind::Ig => "ig",
    }
}

/// Builds the family. With `defaults`, missing nuisance parameters take the
/// value 1 (and `p = ½`), which is all a divergence query needs since the
/// means are given separately.
fn build_family(a: &FamilyArgs, defaults: bool) -> Result<FamilyDescriptor, String> {
    let kind = a.family;
    let get = |flag: &str, v: Option<f64>, dflt: f64| -> Result<f64, String> {
        match v {
            Some(v) => Ok(v),
            None if defaults => Ok(dflt),
            None => need(flag, kind, None),
        }
    };
    let params = match kind {
        FamilyKind::Binomial => Params::Binomial {
            n: need("n", kind, a.n)?,
            p: get("p", a.p, 0.5)?,
        },
        FamilyKind::Poisson => Params::Poisson {
            lambda: get("lambda", a.lambda, 1.0)?,
        },
        FamilyKind::Geometric => Params::Geometric {
            theta: get("theta", a.theta, 1.0)?,
        },
        FamilyKind::Negbin => Params::NegativeBinomial {
            k: get("k", a.k, 1.0)?,
            theta: get("theta", a.theta, 1.0)?,
        },
        FamilyKind::Gamma => Params::Gamma {
            k: get("k", a.k, 1.0)?,
            theta: get("theta", a.theta, 1.0)?,
        },
        FamilyKind::Exponential => Params::Exponential {
            theta: get("theta", a.theta, 1.0)?,
        },
        FamilyKind::Ig => Params::InverseGaussian {
            mu: get("mu", a.mu, 1.0)?,
            lambda: get("lambda", a.lambda, 1.0)?,
        },
    };
    FamilyDescriptor::new(params).map_err(err)
}

fn label(f: &FamilyDescriptor) -> String {
    match f.params() {
        Params::InverseGaussian { mu, lambda } => format!("IG(mu={mu}, lambda={lambda})"),
        Params::Exponential { theta } => format!("Exp(theta={theta})"),
        Params::Gamma { k, theta } => format!("Gamma(k={k}, theta={theta})"),
        Params::Geometric { theta } => format!("Geo(theta={theta})"),
        Params::NegativeBinomial { k, theta } => format!("neg(k={k}, theta={theta})"),
        Params::Binomial { n, p } => format!("bin(n={n}, p={p})"),
        Params::Poisson { lambda } => format!("Po(lambda={lambda})"),
    }
}

fn count(flag: &str, v: f64) -> Result<u64, String> {
    if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(53) {
        Ok(v as u64)
    } else {
        Err(format!("--{flag} must be a non-negative integer, got {v}"))
    }
}

pub fn bound(a: &BoundArgs, format: Format) -> CmdResult {
    let kind = a.family.family;
    // For these two `--k` is the point, so it is not a parameter.
    let params_only = FamilyArgs {
        k: None,
        ..a.family.clone()
    };
    let mut r = Record::default();
    match kind {
        FamilyKind::Binomial | FamilyKind::Poisson => {
            let f = build_family(&params_only, false)?;
            let k = count("k", need("k", kind, a.family.k)?)?;
            let b = intersection_bracket(&f, k as f64).map_err(err)?;
            r.add("family", f.name())
                .add("k", k)
                .add("signed_ll", f.signed_ll(k as f64).map_err(err)?.value())
                .add("lower", b.lower)
                .add("mid", b.gaussian_value)
                .add("upper", b.upper)
                .add("slack", b.slack());
        }
        FamilyKind::Geometric => {
            let f = build_family(&a.family, false)?;
            let theta = f.mean();
            let m = need("m", kind, a.m)?;
            let b = geometric_exponential_bracket(theta, m).map_err(err)?;
            let exp = FamilyDescriptor::exponential(theta).map_err(err)?;
            let z = f.signed_ll(m as f64).map_err(err)?;
            r.add("family", f.name())
                .add("m", m)
                .add("signed_ll", z.value())
                .add("x", exp.signed_ll_inverse(z).map_err(err)?)
                .add("lower", b.lower)
                .add("mid", b.gaussian_value)
                .add("upper", b.upper)
                .add("slack", b.slack());
            if m >= 1 {
                let (half, inner, whole) = geometric_sandwich(theta, m).map_err(err)?;
                r.add("signed_ll_half_step", half)
                    .add("signed_ll_matched_exponential", inner)
                    .add("signed_ll_step", whole);
            }
        }
        FamilyKind::Negbin => {
            let f = build_family(&a.family, false)?;
            let Params::NegativeBinomial { k, theta } = f.params() else {
                unreachable!()
            };
            let m = need("m", kind, a.m)?;
            let b = negbin_gamma_bracket(k, theta, m).map_err(err)?;
            let exact = exact_cdf(&f, m as f64).map_err(err)?;
            r.add("family", f.name())
                .add("m", m)
                .add("signed_ll", f.signed_ll(m as f64).map_err(err)?.value())
                .add("x_m", b.x_m)
                .add("x_m_plus_1", b.x_m_plus_1)
                .add("lower", b.cdf_lower)
                .add("mid", exact)
                .add("upper", b.cdf_upper)
                .add("slack", b.slack(exact))
                .add(
                    "gaussian_lower",
                    negbin_gaussian_lower(k, theta, m).map_err(err)?,
                );
        }
        FamilyKind::Gamma | FamilyKind::Exponential | FamilyKind::Ig => {
            let f = build_family(&a.family, false)?;
            let x = need("x", kind, a.x)?;
            let lower = tailbound::bounds::gaussian_lower_bound(&f, x).map_err(err)?;
            let exact = exact_cdf(&f, x).map_err(err)?;
            r.add("family", f.name())
                .add("x", x)
                .add("signed_ll", f.signed_ll(x).map_err(err)?.value())
                .add("lower", lower)
                .add("exact", exact)
                .add("slack", exact - lower);
        }
    }
    Ok(Output::ok(r.render(format)))
}

pub fn qq(a: &QqArgs, format: Format) -> CmdResult {
    if a.quantiles == 0 {
        return Err("--quantiles must be at least 1".into());
    }
    let probs = probability_grid(a.quantiles);
    let series: Vec<QQSeries> = match (&a.preset, a.family) {
        (Some(name), _) => preset(name, &probs).map_err(err)?,
        (None, Some(family)) => {
            let fa = FamilyArgs {
                family,
                n: a.n,
                p: a.p,
                k: a.k,
                lambda: a.lambda,
                mu: a.mu,
                theta: a.theta,
            };
            let f = build_family(&fa, false)?;
            let label = label(&f);
            vec![qq_series(label, &f, QQReference::StandardGaussian, &probs).map_err(err)?]
        }
        (None, None) => return Err("qq needs --preset or --family".into()),
    };
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string(&series).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
        Format::Csv | Format::Table => {
            let mut t = Table::new(&[
                "series",
                "prob",
                "reference_quantile",
                "signed_ll_quantile",
                "support_point",
                "step_left",
                "step_right",
            ]);
            for s in &series {
                for row in &s.rows {
                    t.push(vec![
                        Cell::from(s.label.as_str()),
                        row.prob.into(),
                        row.reference_quantile.into(),
                        row.signed_ll_quantile.into(),
                        row.support_point.into(),
                        row.step_left.into(),
                        row.step_right.into(),
                    ]);
                }
            }
            if format == Format::Csv {
                t.csv()
            } else {
                t.human()
            }
        }
    };
    Ok(Output::ok(text))
}

fn tolerance_from_env() -> Result<f64, String> {
    match std::env::var("TAILBOUND_TOLERANCE") {
        Err(_) => Ok(DEFAULT_TOLERANCE),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t >= 0.0 && t.is_finite() => Ok(t),
            _ => Err(format!(
                "TAILBOUND_TOLERANCE must be a non-negative number, got '{s}'"
            )),
        },
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let bad = || format!("--lambda-grid expects lo:hi:count[:linear|:log], got '{s}'");
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    let spacing = match parts.get(3) {
        None | Some(&"log") => Spacing::Log,
        Some(&"linear") => Spacing::Linear,
        Some(_) => return Err(bad()),
    };
    GridSpec::new(lo, hi, count, spacing).map_err(err)
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    let (id, delta) = s
        .rsplit_once(':')
        .ok_or_else(|| format!("bad fault '{s}'"))?;
    let delta = delta
        .parse()
        .map_err(|_| format!("bad fault delta in '{s}'"))?;
    Ok(Fault {
        check_id: id.to_string(),
        delta,
    })
}

fn argmin_text(r: &CheckReport) -> String {
    r.argmin_location
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::ConjectureHoldsOnGrid => "conjecture-holds-on-grid",
    }
}

pub fn check(a: &CheckArgs, format: Format) -> CmdResult {
    let mut cfg = CheckConfig::with_tolerance(tolerance_from_env()?);
    cfg.fault = a.inject_fault.as_deref().map(parse_fault).transpose()?;
    let overrides = Overrides {
        lambda_grid: a.lambda_grid.as_deref().map(parse_grid).transpose()?,
        m_max: a.m_max,
    };
    let ids: Vec<&str> = match &a.id {
        Some(id) => vec![id.as_str()],
        None => THEOREM_CHECKS
            .iter()
            .chain(PROBES.iter())
            .copied()
            .collect(),
    };
    let reports = ids
        .iter()
        .map(|id| run_check(id, &cfg, &overrides))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let status = if reports.iter().any(CheckReport::is_failure) {
        1
    } else {
        0
    };

    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string(&reports).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
        Format::Csv | Format::Table => {
            let mut t = Table::new(&["check", "kind", "verdict", "points", "min_slack", "argmin"]);
            for r in &reports {
                t.push(vec![
                    Cell::from(r.check_id.as_str()),
                    Cell::from(match r.kind {
                        CheckKind::Theorem => "theorem",
                        CheckKind::Probe => "probe",
                    }),
                    Cell::from(verdict_text(r.verdict)),
                    Cell::from(r.points_evaluated),
                    Cell::from(r.min_slack),
                    Cell::from(argmin_text(r)),
                ]);
            }
            if format == Format::Csv {
                t.csv()
            } else {
                let mut s = t.human();
                for r in reports.iter().filter(|r| r.diagnostic.is_some()) {
                    s.push_str(&format!(
                        "{}: {}\n",
                        r.check_id,
                        r.diagnostic.as_deref().unwrap_or("")
                    ));
                }
                let theorems: Vec<_> = reports
                    .iter()
                    .filter(|r| r.kind == CheckKind::Theorem)
                    .collect();
                if !theorems.is_empty() {
                    let passed = theorems
                        .iter()
                        .filter(|r| r.verdict == Verdict::Pass)
                        .count();
                    s.push_str(&format!(
                        "{passed}/{} theorem checks pass\n",
                        theorems.len()
                    ));
                }
                if reports.iter().any(|r| r.kind == CheckKind::Probe) {
                    s.push_str("probes are reported but do not affect the exit status\n");
                }
                s
            }
        }
    };
    Ok(Output { text, status })
}

pub fn divergence(a: &DivergenceArgs, format: Format) -> CmdResult {
    let f = build_family(&a.family, true)?;
    let closed = f.divergence(a.mu1, a.mu2).map_err(err)?;
    let numeric = numeric_divergence(&f, a.mu1, a.mu2).map_err(err)?;
    let mut r = Record::default();
    r.add("family", f.name())
        .add("mu1", a.mu1)
        .add("mu2", a.mu2)
        .add("closed_form", closed)
        .add("numeric", numeric)
        .add("abs_diff", (closed - numeric).abs());
    Ok(Output::ok(r.render(format)))
}
