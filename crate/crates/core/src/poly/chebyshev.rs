use super::{Parity, Polynomial};
use std::f64::consts::PI;

/// Chebyshev series `sum_j c_j T_j(x)` on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Interpolates `f` at `nodes` first-kind Chebyshev points and keeps the
    /// coefficients up to `degree`. With `nodes` much larger than `degree` this is
    /// a near-exact truncation of the Chebyshev expansion of `f`.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, degree: usize, nodes: usize) -> Self {
        let nodes = nodes.max(degree + 1);
        let xs = chebyshev_nodes(nodes);
        let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let mut coeffs = vec![0.0; degree + 1];
        // T_j(x_k) through the three-term recurrence, one node at a time.
        for (&x, &v) in xs.iter().zip(&fx) {
            let (mut t_prev, mut t) = (1.0, x);
            coeffs[0] += v;
            if degree >= 1 {
                coeffs[1] += v * x;
            }
            for c in coeffs.iter_mut().skip(2) {
                let t_next = 2.0 * x * t - t_prev;
                *c += v * t_next;
                t_prev = t;
                t = t_next;
            }
        }
        let n = nodes as f64;
        coeffs[0] /= n;
        for c in coeffs.iter_mut().skip(1) {
            *c *= 2.0 / n;
        }
        Self::new(coeffs)
    }

    /// Exact change of basis from monomials (Horner's scheme on Chebyshev series).
    pub fn from_monomial(p: &Polynomial) -> Self {
        let mut acc: Vec<f64> = vec![0.0];
        for &c in p.coeffs().iter().rev() {
            // acc <- x * acc + c
            let mut next = vec![0.0; acc.len() + 1];
            for (j, &a) in acc.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                if j == 0 {
                    next[1] += a;
                } else {
                    next[j + 1] += 0.5 * a;
                    next[j - 1] += 0.5 * a;
                }
            }
            next[0] += c;
            acc = next;
        }
        Self::new(acc)
    }

    pub fn to_monomial(&self) -> Polynomial {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        let mut t_prev = vec![1.0];
        let mut t = vec![0.0, 1.0];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let tj: &[f64] = match j {
                0 => &t_prev,
                1 => &t,
                _ => {
                    let mut next = vec![0.0; j + 1];
                    for (k, &v) in t.iter().enumerate() {
                        next[k + 1] += 2.0 * v;
                    }
                    for (k, &v) in t_prev.iter().enumerate() {
                        next[k] -= v;
                    }
                    t_prev = std::mem::replace(&mut t, next);
                    &t
                }
            };
            for (k, &v) in tj.iter().enumerate() {
                out[k] += c * v;
            }
        }
        Polynomial::new(out)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }

    pub fn truncate(&self, degree: usize) -> Self {
        Self::new(self.coeffs.iter().take(degree + 1).copied().collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Self::new(coeffs)
    }

    /// Zeroes every coefficient whose index has the wrong parity.
    pub fn with_parity(&self, parity: Parity) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| if parity.matches(j) { c } else { 0.0 })
                .collect(),
        )
    }
}

/// First-kind Chebyshev nodes `cos(pi (k + 1/2) / n)`, strictly inside `(-1, 1)`.
pub fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|k| (PI * (k as f64 + 0.5) / n as f64).cos()).collect()
}

/// Chebyshev-Lobatto points `cos(pi k / (n - 1))`, including both endpoints.
pub fn chebyshev_lobatto_grid(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|k| (PI * k as f64 / (n - 1) as f64).cos()).collect(),
    }
}

/// Default grid for bound verification of a degree-`degree` polynomial:
/// `max(1000, 10 * degree)` Lobatto points.
pub fn verification_grid(degree: usize) -> Vec<f64> {
    chebyshev_lobatto_grid(1000.max(10 * degree))
}
