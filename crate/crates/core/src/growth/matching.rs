/// Gamma basis with the first two moments of a Gaussian one: returns
/// (μ̃_t, α) with μ̃_t = μ_t − σ√β·m and α = √(β/σ²).
pub fn moment_match_gamma(mu: f64, variance: f64, shape: f64, measure: f64) -> (f64, f64) {
    let sigma = variance.sqrt();
    (mu - sigma * shape.sqrt() * measure, (shape / variance).sqrt())
}

/// IG(η, γ) parameters such that Z(A) over a set of measure m has mean
/// `mean` and variance `variance`: returns (η, γ).
pub fn moment_match_ig(mean: f64, variance: f64, measure: f64) -> (f64, f64) {
    let gamma = (mean / variance).sqrt();
    (mean * gamma / measure, gamma)
}
