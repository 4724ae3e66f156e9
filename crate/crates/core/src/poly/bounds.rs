use serde::{Deserialize, Serialize};

/// Closed-form error bounds checked by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Lipschitz bound for the Bernstein PQC: `eps + 2((1 + l^2/(n eps^2))^d - 1)`.
    Thm2,
    /// Hölder bound for the nested Taylor PQC: `d^(s + beta/2) K^(-beta)`.
    Thm3,
    /// Squared L2 bound including the trifling region: `thm3^2 + 4 d K^(1-d)`.
    L2Corollary,
}

/// Parameters for [`thm_bounds`]. Fields irrelevant to a bound are ignored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub d: usize,
    pub lipschitz: f64,
    pub n: u64,
    pub eps: f64,
    pub s: u32,
    pub beta: f64,
    pub k: u32,
}

pub fn thm_bounds(kind: BoundKind, p: &BoundParams) -> f64 {
    let d = p.d as f64;
    match kind {
        BoundKind::Thm2 => {
            let ratio = p.lipschitz * p.lipschitz / (p.n as f64 * p.eps * p.eps);
            p.eps + 2.0 * ((1.0 + ratio).powi(p.d as i32) - 1.0)
        }
        BoundKind::Thm3 => d.powf(p.s as f64 + p.beta / 2.0) * (p.k as f64).powf(-p.beta),
        BoundKind::L2Corollary => {
            let t3 = thm_bounds(BoundKind::Thm3, p);
            t3 * t3 + 4.0 * d * (p.k as f64).powf(1.0 - d)
        }
    }
}

/// The looser closed form `eps + d 2^d l^2 / (n eps^2)`, which dominates the
/// `Thm2` expression whenever `l^2 / (n eps^2) <= 1`.
pub fn thm2_simplified(d: usize, l: f64, n: u64, eps: f64) -> f64 {
    eps + d as f64 * 2f64.powi(d as i32) * l * l / (n as f64 * eps * eps)
}
