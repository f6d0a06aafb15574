//! Aggregates over repeated timings.

/// Middle value; the mean of the two middle values for an even count.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

/// Running mean and sum of squared deviations (Welford).
fn moments(xs: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    (mean, m2)
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| moments(xs).0)
}

/// Sample standard deviation (`n - 1` in the denominator).
pub fn std_dev(xs: &[f64]) -> Option<f64> {
    (xs.len() >= 2).then(|| (moments(xs).1 / (xs.len() - 1) as f64).sqrt())
}

/// Coefficient of variation: standard deviation divided by the mean.
/// Zero for fewer than two samples or a zero mean.
pub fn cov(xs: &[f64]) -> f64 {
    match (std_dev(xs), mean(xs)) {
        (Some(sd), Some(m)) if m != 0.0 => sd / m,
        _ => 0.0,
    }
}
