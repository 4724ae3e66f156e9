//! Independent angle finder by polynomial completion and layer stripping.
//!
//! Given a real parity polynomial `p` with `|p| < 1`, builds the full SU(2)
//! matrix `U = [[p + i a, -b sqrt(1-x^2)], [b sqrt(1-x^2), p - i a]]` with
//! `a^2 + (1 - x^2) b^2 = 1 - p^2` (spectral factorization of `1 - p^2` by root
//! pairing), and then peels off one `S(x) R_Z(theta)` layer at a time from its
//! Laurent expansion in `e^{i omega}`, `x = cos(omega)`. Practical for small degrees
//! only: the root finding and stripping lose accuracy as the degree grows.

use super::QspAngleSequence;
use crate::error::{PqcError, Result};
use crate::mat2::{self, Mat2, C64};
use crate::poly::{ChebSeries, ParityPolynomial};
use nalgebra::DMatrix;

/// Laurent polynomial of 2x2 matrices: `coeffs[k + L]` multiplies `e^{i k omega}`.
struct MatLaurent {
    half: usize,
    coeffs: Vec<Mat2>,
}

impl MatLaurent {
    fn zeros(half: usize) -> Self {
        Self {
            half,
            coeffs: vec![[[C64::new(0.0, 0.0); 2]; 2]; 2 * half + 1],
        }
    }

    fn at(&self, k: i64) -> &Mat2 {
        &self.coeffs[(k + self.half as i64) as usize]
    }

    fn at_mut(&mut self, k: i64) -> &mut Mat2 {
        &mut self.coeffs[(k + self.half as i64) as usize]
    }
}

/// Angles realizing `p` via completion and stripping. Requires `|p| <= 1 - 1e-6`.
pub fn completion_angles(p: &ParityPolynomial) -> Result<QspAngleSequence> {
    let sup = p.sup_norm();
    if sup > 1.0 - 1e-6 {
        return Err(PqcError::Domain(format!(
            "completion needs sup |p| <= 1 - 1e-6, got {sup}"
        )));
    }
    let l = p.degree();
    let pc = p.chebyshev();
    let mut pcoef = pc.coeffs().to_vec();
    pcoef.resize(l + 1, 0.0);

    // 1 - p^2 as a Chebyshev series of degree 2L; exact interpolation.
    let f = ChebSeries::from_fn(|x| 1.0 - pc.eval(x).powi(2), 2 * l, 4 * l + 8);
    let mut fhat = f.coeffs().to_vec();
    fhat.resize(2 * l + 1, 0.0);

    let h = if l == 0 {
        vec![(1.0 - pcoef[0] * pcoef[0]).sqrt()]
    } else {
        // In w = e^{2 i omega}: F(w) = sum_m f_m w^m with f_0 = F0, f_{+-m} = F_{2m}/2.
        // w^L F(w) has degree 2L; keep the L roots inside the unit disk.
        let mut poly = vec![0.0; 2 * l + 1];
        for m in 0..=l {
            let v = if m == 0 { fhat[0] } else { fhat[2 * m] / 2.0 };
            poly[l + m] = v;
            poly[l - m] = v;
        }
        let roots = poly_roots(&poly)?;
        let inside: Vec<C64> = roots.into_iter().filter(|r| r.norm() < 1.0).collect();
        if inside.len() != l {
            return Err(PqcError::Verification {
                what: "completion".into(),
                detail: format!("expected {l} roots inside the unit disk, found {}", inside.len()),
            });
        }
        // h(w) = prod (w - r), coefficients ascending; real up to rounding.
        let mut hc = vec![C64::new(1.0, 0.0)];
        for r in &inside {
            let mut next = vec![C64::new(0.0, 0.0); hc.len() + 1];
            for (i, c) in hc.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            hc = next;
        }
        let hc: Vec<f64> = hc.iter().map(|c| c.re).collect();
        // Normalize so that |h(1)|^2 = F at omega = 0, i.e. x = 1.
        let f_at_one: f64 = fhat.iter().sum();
        let h_at_one: f64 = hc.iter().sum();
        let gamma = (f_at_one.max(0.0)).sqrt() / h_at_one.abs();
        hc.iter().map(|c| c * gamma).collect()
    };

    // A(omega) = e^{-i L omega} h(e^{2 i omega}) = sum_k c_k e^{i k omega}, k = 2j - L.
    let c_of = |k: i64| -> f64 {
        let j = k + l as i64;
        if j < 0 || j % 2 != 0 || (j / 2) as usize >= h.len() {
            0.0
        } else {
            h[(j / 2) as usize]
        }
    };

    let mut u = MatLaurent::zeros(l);
    let li = l as i64;
    let i = mat2::I;
    for k in -li..=li {
        // p(cos w) = sum p_j cos(j w)
        let pk = {
            let j = k.unsigned_abs() as usize;
            if j > l {
                0.0
            } else if j == 0 {
                pcoef[0]
            } else {
                pcoef[j] / 2.0
            }
        };
        // a(cos w) + i sin(w) b(cos w) = A(w); a = (A + A(-w))/2 has Laurent coefficient
        // (c_k + c_{-k})/2, and sin(w) b = (A - A(-w))/(2i) has (c_k - c_{-k})/(2i).
        let a_k = (c_of(k) + c_of(-k)) / 2.0;
        let sb_k = (C64::new(c_of(k) - c_of(-k), 0.0)) / (2.0 * i);
        let m = u.at_mut(k);
        m[0][0] = C64::new(pk, 0.0) + i * a_k;
        m[1][1] = C64::new(pk, 0.0) - i * a_k;
        m[0][1] = -sb_k;
        m[1][0] = sb_k;
    }

    // Strip layers: U = V S R_Z(theta), with S = e^{i w} P+ + e^{-i w} P-.
    let pp: Mat2 = [
        [C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
        [C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
    ];
    let pm: Mat2 = [
        [C64::new(0.5, 0.0), C64::new(-0.5, 0.0)],
        [C64::new(-0.5, 0.0), C64::new(0.5, 0.0)],
    ];
    let mut angles_rev = Vec::with_capacity(l + 1);
    let mut cur = u;
    for layer in (1..=l).rev() {
        let top = *cur.at(layer as i64);
        let row = if top[0][0].norm() + top[0][1].norm() >= top[1][0].norm() + top[1][1].norm() {
            0
        } else {
            1
        };
        if top[row][0].norm() < 1e-14 {
            return Err(PqcError::Verification {
                what: "completion".into(),
                detail: "degenerate top coefficient".into(),
            });
        }
        let theta = (top[row][1] / top[row][0]).arg();
        angles_rev.push(theta);
        let r = mat2::rz(-theta);
        let rp = mat2::mul(&r, &pp);
        let rm = mat2::mul(&r, &pm);
        let mut next = MatLaurent::zeros(layer - 1);
        for k in -(layer as i64 - 1)..=(layer as i64 - 1) {
            let a = mat2::mul(cur.at(k + 1), &rp);
            let b = mat2::mul(cur.at(k - 1), &rm);
            let m = next.at_mut(k);
            for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                m[x][y] = a[x][y] + b[x][y];
            }
        }
        cur = next;
    }
    let v00 = cur.at(0)[0][0];
    angles_rev.push(-2.0 * v00.arg());
    angles_rev.reverse();
    QspAngleSequence::new(angles_rev)
}

/// Roots of `sum_i c_i w^i` from the companion matrix eigenvalues.
fn poly_roots(c: &[f64]) -> Result<Vec<C64>> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last().unwrap().abs() < 1e-300 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = c[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    Ok(comp.complex_eigenvalues().iter().copied().collect())
}
