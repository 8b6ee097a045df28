//! Quantile–quantile series of the signed log-likelihood against a reference
//! distribution, the data behind the QQ figures.
//!
//! A continuous family gives a curve: at each probability `q` the reference
//! quantile is paired with `G(F⁻¹(q))`. A discrete family gives a staircase:
//! the atom of `G(M)` at `G(m)` spans reference quantiles from
//! `Pr(M < m)` to `Pr(M ≤ m)`, and both endpoints are emitted.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::families::{FamilyDescriptor, Params};
use crate::oracles::{exact_cdf, exact_quantile};
use crate::specialfn::gaussian_quantile;

/// Distribution on the horizontal axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QQReference {
    StandardGaussian,
    /// Quantiles of the signed log-likelihood of a continuous family.
    SignedLL {
        family: FamilyDescriptor,
    },
}

impl QQReference {
    /// Reference quantile at probability `q`; `None` at `q ∈ {0, 1}`.
    pub fn quantile(&self, q: f64) -> Result<Option<f64>> {
        if q <= 0.0 || q >= 1.0 {
            return Ok(None);
        }
        Ok(Some(match self {
            QQReference::StandardGaussian => gaussian_quantile(q)?,
            QQReference::SignedLL { family } => {
                family.signed_ll(exact_quantile(family, q)?)?.value()
            }
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QQRow {
    pub prob: f64,
    /// Reference quantile at `prob`; absent for a final step with `prob = 1`.
    pub reference_quantile: Option<f64>,
    pub signed_ll_quantile: f64,
    /// The count of a staircase step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_point: Option<f64>,
    /// Reference quantile at `Pr(M < m)`; absent where that is 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_left: Option<f64>,
    /// Reference quantile at `Pr(M ≤ m)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_right: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QQSeries {
    pub label: String,
    pub family: FamilyDescriptor,
    pub reference: QQReference,
    pub rows: Vec<QQRow>,
}

impl QQSeries {
    pub fn is_staircase(&self) -> bool {
        self.family.is_discrete()
    }

    /// Smallest margin by which the diagonal meets each step:
    /// `min(G(m) - step_left, step_right - G(m))` over all steps. Negative
    /// when some step lies entirely on one side. `None` for curves.
    pub fn diagonal_crossing_margin(&self) -> Option<f64> {
        if !self.is_staircase() {
            return None;
        }
        let margin = self
            .rows
            .iter()
            .map(|r| {
                let left = r
                    .step_left
                    .map_or(f64::INFINITY, |l| r.signed_ll_quantile - l);
                let right = r
                    .step_right
                    .map_or(f64::INFINITY, |u| u - r.signed_ll_quantile);
                left.min(right)
            })
            .fold(f64::INFINITY, f64::min);
        Some(margin)
    }
}

/// Probabilities `i / (count + 1)`, `i = 1..=count`.
pub fn probability_grid(count: usize) -> Vec<f64> {
    let denom = (count + 1) as f64;
    (1..=count).map(|i| i as f64 / denom).collect()
}

pub const DEFAULT_QUANTILES: usize = 999;

/// The series for `f` against `reference` over the probabilities `probs`.
/// Staircases cover the counts between the quantiles at the smallest and
/// largest probability.
pub fn qq_series(
    label: impl Into<String>,
    f: &FamilyDescriptor,
    reference: QQReference,
    probs: &[f64],
) -> Result<QQSeries> {
    if let QQReference::SignedLL { family } = &reference {
        if !family.is_continuous() {
            return Err(domain("a QQ reference family must be continuous"));
        }
    }
    if probs.is_empty() {
        return Err(domain("probability grid is empty"));
    }
    let mut rows = Vec::new();
    if f.is_continuous() {
        let mut last = f64::NEG_INFINITY;
        for &q in probs {
            if !(q > last) {
                return Err(domain("probabilities must be strictly increasing"));
            }
            last = q;
            let x = exact_quantile(f, q)?;
            rows.push(QQRow {
                prob: q,
                reference_quantile: reference.quantile(q)?,
                signed_ll_quantile: f.signed_ll(x)?.value(),
                support_point: None,
                step_left: None,
                step_right: None,
            });
        }
    } else {
        let first = exact_quantile(f, probs[0])? as u64;
        let last = exact_quantile(f, probs[probs.len() - 1])? as u64;
        let mut below = if first == 0 {
            0.0
        } else {
            exact_cdf(f, (first - 1) as f64)?
        };
        for m in first..=last {
            let upto = exact_cdf(f, m as f64)?;
            if upto <= below {
                below = upto;
                continue;
            }
            let right = reference.quantile(upto)?;
            rows.push(QQRow {
                prob: upto,
                reference_quantile: right,
                signed_ll_quantile: f.signed_ll(m as f64)?.value(),
                support_point: Some(m as f64),
                step_left: reference.quantile(below)?,
                step_right: right,
            });
            below = upto;
        }
    }
    Ok(QQSeries {
        label: label.into(),
        family: *f,
        reference,
        rows,
    })
}

/// Names of the figure presets.
pub const PRESETS: [&str; 6] = [
    "ig-1-1",
    "exp-geo-3.5",
    "bin-7-0.5",
    "po-3.5",
    "neg-1-3.5",
    "gamma-1-5-20",
];

/// The series behind one figure.
pub fn preset(name: &str, probs: &[f64]) -> Result<Vec<QQSeries>> {
    let gauss = QQReference::StandardGaussian;
    let one = |label: &str, p: Params, r: QQReference| -> Result<QQSeries> {
        qq_series(label, &FamilyDescriptor::new(p)?, r, probs)
    };
    match name {
        "ig-1-1" => Ok(vec![one(
            "IG(1,1)",
            Params::InverseGaussian {
                mu: 1.0,
                lambda: 1.0,
            },
            gauss,
        )?]),
        "exp-geo-3.5" => {
            let exp = FamilyDescriptor::exponential(3.5)?;
            Ok(vec![one(
                "Geo(3.5) vs Exp(3.5)",
                Params::Geometric { theta: 3.5 },
                QQReference::SignedLL { family: exp },
            )?])
        }
        "bin-7-0.5" => Ok(vec![one(
            "bin(7,1/2)",
            Params::Binomial { n: 7, p: 0.5 },
            gauss,
        )?]),
        "po-3.5" => Ok(vec![one(
            "Po(3.5)",
            Params::Poisson { lambda: 3.5 },
            gauss,
        )?]),
        "neg-1-3.5" => Ok(vec![
            one(
                "neg(1,3.5)",
                Params::NegativeBinomial { k: 1.0, theta: 3.5 },
                gauss,
            )?,
            one("Gamma(1,3.5)", Params::Gamma { k: 1.0, theta: 3.5 }, gauss)?,
        ]),
        "gamma-1-5-20" => [1.0, 5.0, 20.0]
            .iter()
            .map(|&k| {
                one(
                    &format!("Gamma({k},1)"),
                    Params::Gamma { k, theta: 1.0 },
                    gauss,
                )
            })
            .collect(),
        other => Err(domain(format!(
            "unknown preset '{other}'; expected one of {}",
            PRESETS.join(", ")
        ))),
    }
}
