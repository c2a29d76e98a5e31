use std::fmt;

use crate::covers::params::check_order;
use crate::covers::{delta_exponent, ell0, epsilon0, r_epsilon, CoverError};
use crate::geometry::{classify, witness_triple, Classification, UpdateFamily};

/// Numerical lower bound on the critical probability of a subcritical family.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub thetas: [f64; 3],
    pub epsilon0: f64,
    /// Margin of the witness triple inside the usable directions.
    pub epsilon_triple: f64,
    /// `min(epsilon0, epsilon_triple)`; every constant below uses this value.
    pub epsilon: f64,
    /// `r_ε` evaluated at `ε₀`.
    pub r_eps: f64,
    /// `max(6, r_ε)` at the effective ε.
    pub r: f64,
    pub ell0: i64,
    pub c: i64,
    /// `2ℓ₀ + 1` if ε were `ε₀`, for comparison.
    pub c_at_epsilon0: i64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Smallest Δ₁ meeting the five scale conditions.
    pub delta1_min: f64,
    /// `delta1_min` rounded up to a power of ten; the bound is evaluated here.
    pub delta1: f64,
    /// `delta1^(−δ−2)`.
    pub p_bound: f64,
    /// `delta1_min^(−δ−2)`, the bound before rounding Δ₁.
    pub p_bound_at_min: f64,
    pub final_check: bool,
}

/// `5c²(p^{1/3} + 2p^{α/3}) < 1` and `p < 2^{−3/(α ln α)}`.
pub fn final_bound_holds(c: i64, p: f64, alpha: f64) -> bool {
    let c = c as f64;
    5.0 * c * c * (p.powf(1.0 / 3.0) + 2.0 * p.powf(alpha / 3.0)) < 1.0 && p < 2f64.powf(-3.0 / (alpha * alpha.ln()))
}

pub fn certify(
    family: &UpdateFamily,
    alpha: f64,
    beta: f64,
    gamma: f64,
    overrides: Option<[f64; 3]>,
) -> Result<Certificate, CoverError> {
    check_order(alpha, beta, gamma)?;
    let class = classify(family);
    if class != Classification::Subcritical {
        return Err(CoverError::NotSubcritical(class));
    }
    let w = witness_triple(family, overrides)?;
    let e0 = epsilon0(&w.thetas);
    let epsilon = e0.min(w.margin);
    let r_eps = r_epsilon(&w.thetas, e0);
    let r = r_epsilon(&w.thetas, epsilon).max(6.0);
    let ell = ell0(&w.thetas, r);
    let c = 2 * ell + 1;
    let c_at_epsilon0 = 2 * ell0(&w.thetas, r_eps.max(6.0)) + 1;
    let delta = delta_exponent(alpha, beta);
    let cf = c as f64;
    let conditions = [
        2f64.powf(delta + 5.0).max(family.range()),
        (12.0 * cf).powf(1.0 / (alpha - 1.0)),
        30f64.max(3.0 * cf).powf(1.0 / (beta - 1.0)),
        3f64.powf(1.0 / (alpha - beta)),
        (68.0 * cf / epsilon).powf(1.0 / (beta - 1.0 - gamma)),
    ];
    let delta1_min = conditions.into_iter().fold(0.0, f64::max);
    let delta1 = 10f64.powf(delta1_min.log10().ceil());
    let p_bound = delta1.powf(-delta - 2.0);
    Ok(Certificate {
        thetas: w.thetas,
        epsilon0: e0,
        epsilon_triple: w.margin,
        epsilon,
        r_eps,
        r,
        ell0: ell,
        c,
        c_at_epsilon0,
        alpha,
        beta,
        gamma,
        delta,
        delta1_min,
        delta1,
        p_bound,
        p_bound_at_min: delta1_min.powf(-delta - 2.0),
        final_check: final_bound_holds(c, p_bound, alpha),
    })
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pi = std::f64::consts::PI;
        for (t, th) in self.thetas.iter().enumerate() {
            writeln!(f, "theta{} = {th:.9} ({:.6} pi)", t + 1, th / pi)?;
        }
        writeln!(f, "epsilon0 = {:.9} ({:.6} pi)", self.epsilon0, self.epsilon0 / pi)?;
        writeln!(f, "epsilon_triple = {:.9} ({:.6} pi)", self.epsilon_triple, self.epsilon_triple / pi)?;
        writeln!(f, "epsilon = {:.9}", self.epsilon)?;
        writeln!(f, "r_eps = {:.6}", self.r_eps)?;
        writeln!(f, "r = {:.6}", self.r)?;
        writeln!(f, "ell0 = {}", self.ell0)?;
        writeln!(f, "c = {}", self.c)?;
        writeln!(f, "c_at_epsilon0 = {}", self.c_at_epsilon0)?;
        writeln!(f, "alpha = {} beta = {} gamma = {}", self.alpha, self.beta, self.gamma)?;
        writeln!(f, "delta = {:.12}", self.delta)?;
        writeln!(f, "delta1_min = {:.6e} (10^{:.4})", self.delta1_min, self.delta1_min.log10())?;
        writeln!(f, "delta1 = {:.0e}", self.delta1)?;
        writeln!(f, "p_bound = {:.6e}", self.p_bound)?;
        writeln!(f, "p_bound_at_min = {:.6e}", self.p_bound_at_min)?;
        writeln!(f, "final_check = {}", self.final_check)
    }
}
