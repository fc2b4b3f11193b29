//! Small statistical helpers: running moments, batch means, line fits.

/// Mean and standard error of the mean from i.i.d. samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
}

impl MeanEstimate {
    /// Number of standard errors separating the estimate from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_err == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_err
        }
    }
}

/// Sample mean and standard error (unbiased variance).
pub fn mean_estimate(xs: &[f64]) -> MeanEstimate {
    let n = xs.len();
    if n == 0 {
        return MeanEstimate {
            mean: f64::NAN,
            std_err: f64::NAN,
            count: 0,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MeanEstimate {
        mean,
        std_err: (var / n as f64).sqrt(),
        count: n,
    }
}

/// Mean with a batch-means standard error: the samples are cut into
/// `batches` contiguous blocks and the spread of block means is used.
pub fn batch_means(xs: &[f64], batches: usize) -> MeanEstimate {
    let batches = batches.clamp(1, xs.len().max(1));
    if batches < 2 || xs.len() < 2 * batches {
        return mean_estimate(xs);
    }
    let size = xs.len() / batches;
    let means: Vec<f64> = xs
        .chunks(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let e = mean_estimate(&means);
    MeanEstimate {
        mean: xs.iter().sum::<f64>() / xs.len() as f64,
        std_err: e.std_err,
        count: xs.len(),
    }
}

/// Unbiased sample covariance of paired samples with a delta-method
/// standard error.
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> MeanEstimate {
    let n = xs.len().min(ys.len());
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let prods: Vec<f64> = xs[..n]
        .iter()
        .zip(&ys[..n])
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let mut e = mean_estimate(&prods);
    e.mean *= n as f64 / (n as f64 - 1.0);
    e
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_err: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_err = if n > 2.0 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        slope_err,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let f = linear_fit(&xs, &ys);
        assert!((f.slope + 2.0).abs() < 1e-14);
        assert!((f.intercept - 3.0).abs() < 1e-14);
        assert!(f.slope_err < 1e-12);
    }

    #[test]
    fn mean_and_batches() {
        let xs: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let e = mean_estimate(&xs);
        assert!((e.mean - 0.5).abs() < 1e-15);
        assert!(e.std_err > 0.0);
        let b = batch_means(&xs, 10);
        assert_eq!(b.mean, e.mean);
        assert_eq!(b.std_err, 0.0);
        assert_eq!(e.z_score(0.5), 0.0);
    }

    #[test]
    fn covariance_of_identical_samples_is_variance() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let c = covariance_estimate(&xs, &xs);
        let m = 3.5;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 3.0;
        assert!((c.mean - v).abs() < 1e-14);
    }
}
