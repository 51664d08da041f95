//! Sampled functions: monotone piecewise-cubic interpolation and the
//! two-column CSV format used for tabulated kernels and right-hand sides.

use crate::error::{Error, Result};
use std::path::Path;

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson
/// slopes with weighted harmonic means, one-sided three-point ends).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Argument(format!(
                "{} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::Argument("need at least two samples".into()));
        }
        if let Some(i) = xs.iter().chain(&ys).position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("sample entry {i} is not finite")));
        }
        if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Argument(format!(
                "abscissae must be strictly increasing (row {} -> {})",
                i + 1,
                i + 2
            )));
        }
        let slopes = pchip_slopes(&xs, &ys);
        Ok(MonotoneCubic { xs, ys, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Interpolated value; queries outside the sample hull are errors.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Evaluation {
                at: x,
                context: format!("outside sample hull [{lo}, {hi}]"),
            });
        }
        let k = self.xs.partition_point(|&v| v <= x).clamp(1, self.xs.len() - 1) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.ys[k]
            + h * h10 * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h * h11 * self.slopes[k + 1])
    }
}

fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// Reads a two-column CSV whose header must be exactly `x_name,y_name`.
pub fn read_two_column_csv(
    path: impl AsRef<Path>,
    x_name: &str,
    y_name: &str,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Argument(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Argument(format!("{}: {e}", path.display())))?
        .clone();
    if headers.len() != 2 || &headers[0] != x_name || &headers[1] != y_name {
        return Err(Error::Argument(format!(
            "{}: expected header `{x_name},{y_name}`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Argument(format!("{}: {e}", path.display())))?;
        let parse = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| {
                Error::Argument(format!(
                    "{}: row {}: `{}` is not a number",
                    path.display(),
                    row + 2,
                    &record[i]
                ))
            })
        };
        xs.push(parse(0)?);
        ys.push(parse(1)?);
    }
    Ok((xs, ys))
}
