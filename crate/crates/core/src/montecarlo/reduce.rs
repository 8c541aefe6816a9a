//! Order-fixed reductions so ensemble results do not depend on scheduling.

/// Pairwise (cascade) summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if v.len() <= LEAF {
        v.iter().sum()
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

/// Sample mean and unbiased standard deviation (zero for a single value).
pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = pairwise_sum(v) / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (pairwise_sum(&dev) / (n - 1.0)).sqrt())
}
