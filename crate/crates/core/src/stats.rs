//! Summation and summary statistics shared by the estimators and the test
//! harness: compensated sums, unbiased variances with standard errors, and
//! reference distribution evaluations for goodness-of-fit checks.

/// Neumaier-compensated sum; result is independent of chunking used upstream.
pub fn sum(xs: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

pub fn mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    sum(xs) / xs.len() as f64
}

/// Sample mean and unbiased sample variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2, "variance needs at least two samples");
    let m = mean(xs);
    let devs: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    (m, sum(&devs) / (n as f64 - 1.0))
}

pub fn standard_error(xs: &[f64]) -> f64 {
    let (_, v) = mean_variance(xs);
    (v / xs.len() as f64).sqrt()
}

/// Standard error of the unbiased sample variance, from the fourth central
/// moment: `SE^2 = (m4 - S^4 (n-3)/(n-1)) / n`.
pub fn variance_stderr(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (m, s2) = mean_variance(xs);
    let fourth: Vec<f64> = xs.iter().map(|&x| (x - m).powi(4)).collect();
    let m4 = sum(&fourth) / n;
    let var_of_var = (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    var_of_var.max(0.0).sqrt()
}

/// Poisson pmf on a window covering all but O(1e-300) of the mass.
///
/// Built by the two-sided recurrence from the mode and normalized over the
/// window, so it needs no factorial or gamma evaluations.
pub fn poisson_pmf_window(mean: f64) -> (u64, Vec<f64>) {
    assert!(mean >= 0.0 && mean.is_finite());
    if mean == 0.0 {
        return (0, vec![1.0]);
    }
    let sigma = mean.sqrt();
    let lo = (mean - 40.0 * sigma - 5.0).floor().max(0.0) as u64;
    let hi = (mean + 40.0 * sigma + 5.0).ceil() as u64;
    let mode = mean.floor() as u64;
    let len = (hi - lo + 1) as usize;
    let mut q = vec![0.0f64; len];
    let mode_idx = (mode - lo) as usize;
    q[mode_idx] = 1.0;
    for idx in mode_idx + 1..len {
        let k = lo + idx as u64;
        q[idx] = q[idx - 1] * mean / k as f64;
    }
    for idx in (0..mode_idx).rev() {
        let k = lo + idx as u64 + 1;
        q[idx] = q[idx + 1] * k as f64 / mean;
    }
    let total = sum(&q);
    for v in &mut q {
        *v /= total;
    }
    (lo, q)
}

/// Poisson CDF on the same window as [`poisson_pmf_window`].
pub fn poisson_cdf_window(mean: f64) -> (u64, Vec<f64>) {
    let (lo, pmf) = poisson_pmf_window(mean);
    let mut cdf = pmf;
    let mut acc = 0.0;
    for v in &mut cdf {
        acc += *v;
        *v = acc;
    }
    (lo, cdf)
}

/// Evaluate a windowed CDF at integer `x` (0 below the window, 1 above).
pub fn window_cdf(lo: u64, cdf: &[f64], x: u64) -> f64 {
    if x < lo {
        0.0
    } else if x >= lo + cdf.len() as u64 {
        1.0
    } else {
        cdf[(x - lo) as usize]
    }
}

/// Binomial(n, p) pmf over `0..=n`, by recurrence from the mode.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&p));
    let len = (n + 1) as usize;
    let mut q = vec![0.0f64; len];
    let mode = ((n as f64 + 1.0) * p).floor().min(n as f64) as usize;
    q[mode] = 1.0;
    let odds = p / (1.0 - p);
    for k in mode + 1..len {
        q[k] = q[k - 1] * ((n - k as u64 + 1) as f64 / k as f64) * odds;
    }
    for k in (0..mode).rev() {
        q[k] = q[k + 1] * ((k + 1) as f64 / (n - k as u64) as f64) / odds;
    }
    let total = sum(&q);
    for v in &mut q {
        *v /= total;
    }
    q
}

/// Pearson chi-square statistic for integer samples against a reference pmf
/// window, pooling bins so every expected count is at least 5.
///
/// Returns `(statistic, degrees_of_freedom)`.
pub fn chi_square_gof(samples: &[u64], lo: u64, pmf: &[f64], n: f64) -> (f64, usize) {
    let mut observed = vec![0u64; pmf.len()];
    for &x in samples {
        let idx = x.saturating_sub(lo).min(pmf.len() as u64 - 1) as usize;
        observed[idx] += 1;
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for (o, e) in observed.iter().zip(pmf) {
        acc_obs += *o as f64;
        acc_exp += e * n;
        if acc_exp >= 5.0 {
            bins.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 || acc_obs > 0.0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc_obs;
            last.1 += acc_exp;
        } else {
            bins.push((acc_obs, acc_exp));
        }
    }
    let stat = bins
        .iter()
        .map(|&(o, e)| (o - e) * (o - e) / e)
        .sum::<f64>();
    (stat, bins.len().saturating_sub(1))
}

/// Ordinary least squares line `y = intercept + slope * x`.
pub fn ols_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    assert!(sxx > 0.0, "regressor is constant");
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Upper 0.1% chi-square critical value by the Wilson-Hilferty cube
/// approximation (inner term uses the 99.9th normal percentile).
pub fn chi_square_critical_p001(df: usize) -> f64 {
    const Z_999: f64 = 3.090_232_306_167_814;
    let d = df as f64;
    let t = 1.0 - 2.0 / (9.0 * d) + Z_999 * (2.0 / (9.0 * d)).sqrt();
    d * t * t * t
}
