/// Raw detector outputs: `alpha` for class distorted, `beta` for class undistorted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Logits {
    pub alpha: f64,
    pub beta: f64,
}

impl Logits {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn nqm(self) -> f64 {
        nqm(self)
    }
}

/// Native quality measure: softmax probability of the undistorted class,
/// `e^β / (e^α + e^β)`. Evaluated after subtracting the larger logit so
/// that neither exponential can overflow.
pub fn nqm(logits: Logits) -> f64 {
    let m = logits.alpha.max(logits.beta);
    let ea = (logits.alpha - m).exp();
    let eb = (logits.beta - m).exp();
    eb / (ea + eb)
}
