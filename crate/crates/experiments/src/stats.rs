//! Small summary statistics for sweep results.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Standard error of the mean.
pub fn sem(xs: &[f64]) -> f64 {
    sd(xs) / (xs.len() as f64).sqrt()
}

/// Standard error of `mean(a) - mean(b)` for independent samples.
pub fn pooled_se(a: &[f64], b: &[f64]) -> f64 {
    (sem(a).powi(2) + sem(b).powi(2)).sqrt()
}

/// `(mean(a) - mean(b)) / pooled_se`, infinite in the direction of the
/// difference when both samples are constant.
pub fn z_score(a: &[f64], b: &[f64]) -> f64 {
    let d = mean(a) - mean(b);
    let se = pooled_se(a, b);
    if se == 0.0 {
        if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    } else {
        d / se
    }
}

/// True when every step `groups[i] -> groups[i + 1]` either rises or falls
/// by less than `k` pooled standard errors.
pub fn non_decreasing_within(groups: &[Vec<f64>], k: f64) -> bool {
    groups.windows(2).all(|w| z_score(&w[1], &w[0]) > -k)
}

/// Least-squares fit of `y = c x^p` in log-log space; returns `(p, c)`.
/// Points with a non-positive coordinate are skipped.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let p = sxy / sxx;
    Some((p, (my - p * mx).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((sd(&xs) - 1.2909944487358056).abs() < 1e-12);
        assert_eq!(sd(&[3.0]), 0.0);
    }

    #[test]
    fn power_law_recovers_exponent() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(2.5)).collect();
        let (p, c) = power_law_fit(&xs, &ys).unwrap();
        assert!((p - 2.5).abs() < 1e-9 && (c - 3.0).abs() < 1e-9);
    }

    #[test]
    fn z_scores_of_constant_samples() {
        assert_eq!(z_score(&[1.0, 1.0], &[1.0, 1.0]), 0.0);
        assert_eq!(z_score(&[1.0, 1.0], &[0.5, 0.5]), f64::INFINITY);
        assert!(non_decreasing_within(&[vec![0.5, 0.6], vec![0.55, 0.58], vec![1.0, 1.0]], 2.0));
    }
}
