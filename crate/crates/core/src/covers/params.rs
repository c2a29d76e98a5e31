use crate::covers::CoverError;
use crate::geometry::WitnessTriple;

/// Multi-scale parameters: `1 < 1 + γ < β < α < 2`, `δ = (2α + 2β − 3)/(2 − α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RenormParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub delta1: u64,
    /// Angular tolerance ε in radians.
    pub epsilon: f64,
}

pub fn delta_exponent(alpha: f64, beta: f64) -> f64 {
    (2.0 * alpha - 3.0 + 2.0 * beta) / (2.0 - alpha)
}

pub(crate) fn check_order(alpha: f64, beta: f64, gamma: f64) -> Result<(), CoverError> {
    if 1.0 < 1.0 + gamma && 1.0 + gamma < beta && beta < alpha && alpha < 2.0 {
        Ok(())
    } else {
        Err(CoverError::ParameterOrderViolation(format!(
            "need 1 < 1+gamma < beta < alpha < 2, got alpha={alpha}, beta={beta}, gamma={gamma}"
        )))
    }
}

impl RenormParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta1: u64, epsilon: f64) -> Result<Self, CoverError> {
        check_order(alpha, beta, gamma)?;
        if delta1 < 1 || !(epsilon > 0.0) {
            return Err(CoverError::ParameterOrderViolation(format!(
                "need delta1 >= 1 and epsilon > 0, got {delta1} and {epsilon}"
            )));
        }
        Ok(RenormParams { alpha, beta, gamma, delta: delta_exponent(alpha, beta), delta1, epsilon })
    }

    /// Parameters with ε = min(ε₀, margin) for the given witness triple.
    pub fn for_witness(alpha: f64, beta: f64, gamma: f64, delta1: u64, witness: &WitnessTriple) -> Result<Self, CoverError> {
        let eps = crate::covers::epsilon0(&witness.thetas).min(witness.margin);
        Self::new(alpha, beta, gamma, delta1, eps)
    }

    /// Side length Δᵢ of level `i` (1-based).
    pub fn delta_i(&self, i: usize) -> u64 {
        assert!(i >= 1, "levels start at 1");
        let mut d = self.delta1;
        for _ in 1..i {
            let ratio = ((d as f64).powf(self.alpha - 1.0) - 1e-9).ceil().max(1.0) as u64;
            d *= ratio;
        }
        d
    }

    pub fn q(&self, i: usize) -> f64 {
        (self.delta_i(i) as f64).powf(-self.delta)
    }

    pub fn g(&self, i: usize) -> f64 {
        (self.delta_i(i) as f64).powf(self.beta)
    }

    pub fn sigma(&self, i: usize) -> f64 {
        self.epsilon / 2.0 + self.epsilon * (self.delta_i(i) as f64).powf(-self.gamma)
    }
}
