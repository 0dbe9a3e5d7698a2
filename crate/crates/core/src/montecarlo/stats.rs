//! Summary statistics of simulation output.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Sum with O(log n) rounding growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean with a 95% normal confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Unbiased sample standard deviation; `None` below two samples.
    pub std_dev: Option<f64>,
    pub ci_half_width: Option<f64>,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate {
                mean: f64::NAN,
                std_dev: None,
                ci_half_width: None,
                n,
            };
        }
        let mean = pairwise_sum(xs) / n as f64;
        if n < 2 {
            return MeanEstimate {
                mean,
                std_dev: None,
                ci_half_width: None,
                n,
            };
        }
        let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let sd = (pairwise_sum(&sq) / (n - 1) as f64).sqrt();
        MeanEstimate {
            mean,
            std_dev: Some(sd),
            ci_half_width: Some(Z95 * sd / (n as f64).sqrt()),
            n,
        }
    }
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        EmpiricalCdf { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return f64::NAN;
        }
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}
