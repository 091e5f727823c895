use serde::Serialize;

use crate::error::{Error, Result};

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
    pub samples: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 3 {
        return Err(Error::InsufficientData(format!(
            "line fit needs >= 3 paired samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr: (sse / (nf - 2.0) / sxx).sqrt(),
        samples: n,
    })
}

/// Fits the trailing half of `(ts, ys)`, requiring `min_samples` points there.
pub fn trailing_half_fit(ts: &[f64], ys: &[f64], min_samples: usize) -> Result<LineFit> {
    let start = ts.len() / 2;
    let count = ts.len() - start;
    if count < min_samples {
        return Err(Error::InsufficientData(format!(
            "trailing half holds {count} records, need {min_samples}"
        )));
    }
    fit_line(&ts[start..], &ys[start..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!(f.slope_stderr < 1e-10);
    }

    #[test]
    fn too_few_in_trailing_half() {
        let xs: Vec<f64> = (0..15).map(|i| i as f64).collect();
        assert!(matches!(
            trailing_half_fit(&xs, &xs, 10),
            Err(Error::InsufficientData(_))
        ));
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert!(trailing_half_fit(&xs, &xs, 10).is_ok());
    }
}
