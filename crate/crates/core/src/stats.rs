//! Two-sample tests, correlations, least squares and power-law fitting.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Mean, standard deviation and size of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub mean: f64,
    pub sd: f64,
    pub n: u64,
}

impl SampleSummary {
    pub fn new(mean: f64, sd: f64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        if sd.is_nan() || sd < 0.0 || !mean.is_finite() || !sd.is_finite() {
            return Err(Error::domain(format!("invalid summary mean={mean} sd={sd}")));
        }
        Ok(SampleSummary { mean, sd, n })
    }

    pub fn sem(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom, rounded down.
    pub dof: u64,
    pub p_two_tailed: f64,
}

/// Welch's unequal-variance t-test on two summaries.
pub fn welch_t_test(a: &SampleSummary, b: &SampleSummary) -> Result<WelchResult> {
    if a.n < 2 || b.n < 2 {
        return Err(Error::domain("Welch's test needs at least two observations per sample"));
    }
    if a.sd == 0.0 && b.sd == 0.0 {
        return Err(Error::domain("Welch's test undefined: both samples have zero variance"));
    }
    let (na, nb) = (a.n as f64, b.n as f64);
    let (va, vb) = (a.sd * a.sd / na, b.sd * b.sd / nb);
    let t = (a.mean - b.mean) / (va + vb).sqrt();
    let nu = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dof = (nu.floor() as u64).max(1);
    let p_two_tailed = (2.0 * student_t_sf(t.abs(), dof)?).min(1.0);
    Ok(WelchResult { t, dof, p_two_tailed })
}

/// Upper tail `P(T > t)` of Student's t with `dof` degrees of freedom.
pub fn student_t_sf(t: f64, dof: u64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::domain("degrees of freedom must be at least 1"));
    }
    if t.is_nan() {
        return Err(Error::domain("t is NaN"));
    }
    let dist = StudentsT::new(0.0, 1.0, dof as f64).map_err(|e| Error::domain(e.to_string()))?;
    // sf on the negative side loses nothing, but keep the small tail exact
    Ok(if t >= 0.0 { dist.sf(t) } else { 1.0 - dist.sf(-t) })
}

fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::domain(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < min_len {
        return Err(Error::domain(format!("need at least {min_len} points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite input"));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 3)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::domain("correlation undefined for a constant sequence"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the positions they cover.
pub fn fractional_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rank correlation: Pearson over fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 3)?;
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Significance {
    pub significant: bool,
    pub p: f64,
}

/// Two-tailed t-test of a correlation coefficient against zero, with
/// `t = r·sqrt((n-2)/(1-r²))` on `n-2` degrees of freedom.
pub fn correlation_significant(r: f64, n: usize, level: f64) -> Result<Significance> {
    if n < 4 {
        return Err(Error::domain(format!("significance needs at least 4 points, got {n}")));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("correlation {r} outside [-1, 1]")));
    }
    if r.abs() == 1.0 {
        return Ok(Significance { significant: true, p: 0.0 });
    }
    let dof = (n - 2) as u64;
    let t = r * ((n - 2) as f64 / (1.0 - r * r)).sqrt();
    let p = (2.0 * student_t_sf(t.abs(), dof)?).min(1.0);
    Ok(Significance { significant: p < level, p })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl RegressionFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares line. R² is 0 when `y` is constant.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    check_pair(x, y, 2)?;
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("regression undefined for constant x"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        0.0
    } else {
        let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - (slope * a + intercept)).powi(2)).sum();
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RegressionFit { slope, intercept, r_squared })
}

/// Continuous power-law fit `p(x) ∝ x^(-alpha)` for `x ≥ x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Positive scaling parameter.
    pub alpha: f64,
    pub x_min: f64,
    /// Values at or above `x_min` used in the fit.
    pub n: usize,
}

impl PowerLawFit {
    /// The fitted exponent with its sign, `-alpha`.
    pub fn exponent(&self) -> f64 {
        -self.alpha
    }

    /// Asymptotic standard error `(alpha - 1) / sqrt(n)`.
    pub fn std_err(&self) -> f64 {
        (self.alpha - 1.0) / (self.n as f64).sqrt()
    }
}

/// Maximum-likelihood estimate `alpha = 1 + n / Σ ln(x_i / x_min)` over the
/// values `≥ x_min`; smaller values are ignored.
pub fn power_law_mle(values: &[f64], x_min: f64) -> Result<PowerLawFit> {
    if !(x_min > 0.0 && x_min.is_finite()) {
        return Err(Error::domain(format!("x_min must be positive, got {x_min}")));
    }
    let tail: Vec<f64> = values.iter().copied().filter(|&v| v >= x_min).collect();
    if tail.len() < 10 {
        return Err(Error::domain(format!("power-law fit needs at least 10 values >= x_min, got {}", tail.len())));
    }
    let log_sum: f64 = tail.iter().map(|&v| (v / x_min).ln()).sum();
    if log_sum <= 0.0 || !log_sum.is_finite() {
        return Err(Error::domain("power-law estimate diverges: all values equal x_min"));
    }
    Ok(PowerLawFit { alpha: 1.0 + tail.len() as f64 / log_sum, x_min, n: tail.len() })
}
