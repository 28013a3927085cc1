//! Empirical distribution machinery: ECDF and quantile queries,
//! one- and two-sample Kolmogorov distances, chi-square goodness of fit,
//! and the summary rows the experiment tables are assembled from.

use crate::error::{Error, Result};
use crate::special::gamma_q;

/// A sorted sample supporting ECDF, quantile and Kolmogorov queries.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("sample contains NaN".into()));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Values in nondecreasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }

    /// Fraction of the sample at or below `x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.n() as f64
    }

    /// Linear-interpolation quantile (the continuous, type-7 convention):
    /// `p = 0` and `p = 1` return the sample minimum and maximum.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "quantile level must lie in [0,1], got {p}"
            )));
        }
        let n = self.n();
        let h = (n - 1) as f64 * p;
        let lo = h.floor() as usize;
        if lo + 1 >= n {
            return Ok(self.values[n - 1]);
        }
        let frac = h - lo as f64;
        Ok(self.values[lo] + frac * (self.values[lo + 1] - self.values[lo]))
    }
}

/// Exact two-sample Kolmogorov distance `sup_x |F_a(x) - F_b(x)|` by a
/// merge scan over the union of jump points. All values tied at a jump
/// point are consumed before the gap is read, so discrete statistics are
/// handled exactly.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let xs = a.values();
    let ys = b.values();
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() || j < ys.len() {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        let diff = (i as f64 / n - j as f64 / m).abs();
        if diff > d {
            d = diff;
        }
    }
    d
}

/// One-sample Kolmogorov distance of a sample against an analytic CDF:
/// `max_i max(i/n - F(x_i), F(x_i) - (i-1)/n)` over the sorted sample.
pub fn ks_one_sample<F: Fn(f64) -> f64>(a: &EmpiricalDistribution, cdf: F) -> f64 {
    let n = a.n() as f64;
    let mut d = 0.0f64;
    for (idx, &x) in a.values().iter().enumerate() {
        let f = cdf(x);
        let upper = (idx + 1) as f64 / n - f;
        let lower = f - idx as f64 / n;
        d = d.max(upper).max(lower);
    }
    d
}

/// Asymptotic Kolmogorov critical value at the given significance for an
/// effective sample size (`n` for one sample, `n m / (n + m)` for two).
pub fn ks_critical(n_effective: f64, significance: f64) -> f64 {
    ((-0.5 * (significance / 2.0).ln()) / n_effective).sqrt()
}

/// Mean and quartiles of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl SampleStats {
    pub fn from_empirical(d: &EmpiricalDistribution) -> Self {
        SampleStats {
            mean: d.mean(),
            q25: d.quantile(0.25).expect("fixed level"),
            median: d.quantile(0.5).expect("fixed level"),
            q75: d.quantile(0.75).expect("fixed level"),
        }
    }
}

/// One row of an experiment table: the `(theta, eps)` configuration,
/// labeled Kolmogorov distances, and labeled sample summaries.
///
/// Distances are stored at full precision; the conventional factor 100 is
/// applied only when a row is rendered.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub theta: f64,
    pub epsilon: f64,
    pub distances: Vec<(String, f64)>,
    pub samples: Vec<(String, SampleStats)>,
}

impl SummaryRow {
    pub fn distance(&self, label: &str) -> Option<f64> {
        self.distances
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, d)| *d)
    }

    pub fn stats(&self, label: &str) -> Option<&SampleStats> {
        self.samples
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, s)| s)
    }

    /// CSV header matching this row's labels, e.g.
    /// `theta,epsilon,dk_x100,mean_as,q25_as,median_as,q75_as,...`.
    pub fn csv_header(&self) -> String {
        let mut cols = vec!["theta".to_string(), "epsilon".to_string()];
        for (label, _) in &self.distances {
            cols.push(format!("dk_{label}_x100"));
        }
        for (label, _) in &self.samples {
            cols.push(format!("mean_{label}"));
            cols.push(format!("q25_{label}"));
            cols.push(format!("median_{label}"));
            cols.push(format!("q75_{label}"));
        }
        cols.join(",")
    }

    /// CSV record in header order. Floats use the shortest representation
    /// that parses back to the same bits, so files round-trip exactly.
    pub fn csv_record(&self) -> String {
        let mut cols = vec![self.theta.to_string(), self.epsilon.to_string()];
        for (_, d) in &self.distances {
            cols.push((d * 100.0).to_string());
        }
        for (_, s) in &self.samples {
            cols.push(s.mean.to_string());
            cols.push(s.q25.to_string());
            cols.push(s.median.to_string());
            cols.push(s.q75.to_string());
        }
        cols.join(",")
    }
}

/// Packages one configuration's samples and distances into a table row.
pub fn summarize(
    theta: f64,
    epsilon: f64,
    samples: &[(&str, &EmpiricalDistribution)],
    distances: &[(&str, f64)],
) -> SummaryRow {
    SummaryRow {
        theta,
        epsilon,
        distances: distances
            .iter()
            .map(|(l, d)| (l.to_string(), *d))
            .collect(),
        samples: samples
            .iter()
            .map(|(l, s)| (l.to_string(), SampleStats::from_empirical(s)))
            .collect(),
    }
}

/// Chi-square goodness-of-fit outcome.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square against expected cell counts (no parameters
/// estimated, so df = cells - 1). Callers are responsible for merging
/// cells with small expectations.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "chi-square needs matching cell lists of length >= 2, got {} and {}",
            observed.len(),
            expected.len()
        )));
    }
    if expected.iter().any(|&e| e <= 0.0) {
        return Err(Error::InvalidParameter(
            "chi-square expected counts must be positive".into(),
        ));
    }
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let df = observed.len() - 1;
    Ok(ChiSquare {
        statistic,
        df,
        p_value: gamma_q(df as f64 / 2.0, statistic / 2.0),
    })
}
