//! Scaling-law regression for lifespan sweeps.
//!
//! Power-law mode fits log T against log ε; exponential mode fits log T
//! against ε^{−a} for a caller-chosen exponent a. Both are ordinary least
//! squares with the slope standard error and R² reported.

use serde::Serialize;

use crate::{Error, Result};

/// Which functional form a sweep is fitted against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitMode {
    /// T ≈ C·ε^{slope}: regress log T on log ε.
    PowerLaw,
    /// T ≈ exp(C·ε^{−exponent}): regress log T on ε^{−exponent};
    /// the reported slope is C.
    Exponential { exponent: f64 },
}

/// Least-squares result over an (ε, T) sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit {
    pub mode: FitMode,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Fit uncensored (ε, T) records. Requires ≥ 4 points; power-law mode also
/// requires the ε values to span at least one decade.
pub fn fit_scaling(records: &[(f64, f64)], mode: FitMode) -> Result<ScalingFit> {
    if records.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 uncensored records, got {}",
            records.len()
        )));
    }
    for &(eps, t) in records {
        if !(eps > 0.0) || !(t > 0.0) {
            return Err(Error::InsufficientData(format!(
                "records must have ε, T > 0 (got ε={eps}, T={t})"
            )));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .map(|&(eps, t)| {
            let x = match mode {
                FitMode::PowerLaw => eps.ln(),
                FitMode::Exponential { exponent } => eps.powf(-exponent),
            };
            (x, t.ln())
        })
        .unzip();
    if matches!(mode, FitMode::PowerLaw) {
        let lo = records.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let hi = records.iter().map(|r| r.0).fold(0.0, f64::max);
        if hi / lo < 10.0 - 1e-9 {
            return Err(Error::InsufficientData(format!(
                "power-law fit needs ε spanning a decade, got [{lo}, {hi}]"
            )));
        }
    }
    Ok(least_squares(&xs, &ys, mode))
}

/// Variant without the decade-span requirement, for desk-scale sweeps whose
/// ε range is fixed by the experiment design.
pub fn fit_scaling_unchecked_span(records: &[(f64, f64)], mode: FitMode) -> Result<ScalingFit> {
    if records.len() < 2 {
        return Err(Error::InsufficientData("need at least 2 records".into()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .map(|&(eps, t)| {
            let x = match mode {
                FitMode::PowerLaw => eps.ln(),
                FitMode::Exponential { exponent } => eps.powf(-exponent),
            };
            (x, t.ln())
        })
        .unzip();
    Ok(least_squares(&xs, &ys, mode))
}

fn least_squares(xs: &[f64], ys: &[f64], mode: FitMode) -> ScalingFit {
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let syy: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let dof = (xs.len() as f64 - 2.0).max(1.0);
    let stderr = (ss_res / dof / sxx).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    ScalingFit {
        mode,
        slope,
        intercept,
        stderr,
        r_squared,
        n_points: xs.len(),
    }
}
