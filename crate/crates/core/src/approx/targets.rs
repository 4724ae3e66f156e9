//! Builtin target functions with certified constants.

use crate::error::{PqcError, Result};
use crate::poly::{HolderClass, MultiIndex, TargetFunctionSpec};

pub const BUILTIN_TARGETS: [&str; 4] = ["abs_centered", "halfsine", "product_sines", "gauss_bump"];

/// `k`-th derivative of `sin` at `x`.
fn sin_derivative(k: u32, x: f64) -> f64 {
    match k % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

/// Physicists' Hermite polynomial `H_k(t)`.
fn hermite(k: u32, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * t);
    if k == 0 {
        return a;
    }
    for n in 1..k {
        let c = 2.0 * t * b - 2.0 * n as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Looks up a builtin target in `d` dimensions. `beta` sets the Hölder class for
/// the smooth targets (whose derivatives of every order are bounded by 1).
///
/// * `abs_centered`: `max_j |x_j - 1/2|`, Lipschitz constant 1.
/// * `halfsine`: `0.5 sin(x)` (`d = 1`).
/// * `product_sines`: `0.5 prod_j sin(x_j)`.
/// * `gauss_bump`: `0.125 exp(-2 |x - 1/2|^2)`.
pub fn builtin_target(name: &str, d: usize, beta: f64) -> Result<TargetFunctionSpec> {
    if d == 0 {
        return Err(PqcError::InvalidInput("dimension must be positive".into()));
    }
    let holder = || HolderClass::new(beta, 1.0);
    match name {
        "abs_centered" => Ok(TargetFunctionSpec::new(name, d, |x: &[f64]| {
            x.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max)
        })
        .with_lipschitz(1.0)),
        "halfsine" => {
            if d != 1 {
                return Err(PqcError::InvalidInput("halfsine is one-dimensional".into()));
            }
            Ok(TargetFunctionSpec::new(name, 1, |x: &[f64]| 0.5 * x[0].sin())
                .with_derivatives(|a: &MultiIndex, x: &[f64]| 0.5 * sin_derivative(a.entries()[0], x[0]))
                .with_holder(holder()?)
                .with_lipschitz(0.5))
        }
        "product_sines" => {
            Ok(
                TargetFunctionSpec::new(name, d, |x: &[f64]| 0.5 * x.iter().map(|v| v.sin()).product::<f64>())
                    .with_derivatives(|a: &MultiIndex, x: &[f64]| {
                        0.5 * a
                            .entries()
                            .iter()
                            .zip(x)
                            .map(|(&k, &v)| sin_derivative(k, v))
                            .product::<f64>()
                    })
                    .with_holder(holder()?)
                    .with_lipschitz(0.5 * (d as f64).sqrt()),
            )
        }
        "gauss_bump" => Ok(TargetFunctionSpec::new(name, d, |x: &[f64]| {
            0.125 * (-2.0 * x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>()).exp()
        })
        .with_derivatives(|a: &MultiIndex, x: &[f64]| {
            // d^k/dx^k e^{-2 u^2} = (-sqrt 2)^k H_k(sqrt(2) u) e^{-2 u^2}, u = x - 1/2.
            let s2 = std::f64::consts::SQRT_2;
            0.125
                * a.entries()
                    .iter()
                    .zip(x)
                    .map(|(&k, &v)| {
                        let u = v - 0.5;
                        (-s2).powi(k as i32) * hermite(k, s2 * u) * (-2.0 * u * u).exp()
                    })
                    .product::<f64>()
        })
        .with_holder(holder()?)
        // max |grad| = 0.5 r e^{-2 r^2}, attained at r = 1/2.
        .with_lipschitz(0.25 * (-0.5f64).exp())),
        other => Err(PqcError::InvalidInput(format!(
            "unknown target {other:?}; builtins are {}",
            BUILTIN_TARGETS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::finite_difference;

    #[test]
    fn derivative_oracles_match_finite_differences() {
        for (name, d) in [("halfsine", 1), ("product_sines", 2), ("gauss_bump", 2)] {
            let f = builtin_target(name, d, 2.0).unwrap();
            let ev = f.evaluator();
            let x: Vec<f64> = (0..d).map(|j| 0.3 + 0.2 * j as f64).collect();
            for a in MultiIndex::all_up_to(d, 3) {
                let exact = f.derivative(&a, &x).unwrap();
                let fd = finite_difference(&*ev, &a, &x).unwrap();
                assert!(
                    (exact - fd).abs() < 1e-5 * exact.abs().max(1.0),
                    "{name} {a}: {exact} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn bounded_by_one() {
        for name in BUILTIN_TARGETS {
            let d = if name == "halfsine" { 1 } else { 2 };
            builtin_target(name, d, 2.0).unwrap().check_bounded(21).unwrap();
        }
        assert!(builtin_target("nope", 1, 2.0).is_err());
        assert!(builtin_target("halfsine", 2, 2.0).is_err());
    }
}
