use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(j, log₂ value)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `(j, log₂ value)`
    pub samples: Vec<(f64, f64)>,
}

pub fn exponent_fit(samples: &[(f64, f64)]) -> Result<ExponentFit> {
    if samples.len() < 3 {
        return Err(Error::param(format!("exponent fit needs at least 3 samples, got {}", samples.len())));
    }
    if let Some(&(j, v)) = samples.iter().find(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::param(format!("exponent fit needs positive finite values, got {v} at j = {j}")));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(j, v)| (j, v.log2())).collect();
    line_fit(pts)
}

pub(crate) fn line_fit(pts: Vec<(f64, f64)>) -> Result<ExponentFit> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("exponent fit needs at least two distinct abscissae"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot <= 1e-300 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(ExponentFit { slope, intercept, r2, samples: pts })
}
