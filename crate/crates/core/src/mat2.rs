//! Small fixed-size complex matrix helpers for single-qubit algebra.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn apply(a: &Mat2, v: [C64; 2]) -> [C64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Row vector times matrix.
pub fn apply_left(v: [C64; 2], a: &Mat2) -> [C64; 2] {
    [v[0] * a[0][0] + v[1] * a[1][0], v[0] * a[0][1] + v[1] * a[1][1]]
}

pub fn scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

/// `e^{-i theta X / 2}`.
pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ]
}

/// `e^{-i theta Y / 2}`.
pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

/// `e^{-i theta Z / 2}`.
pub fn rz(theta: f64) -> Mat2 {
    [
        [C64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, C64::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

/// Largest entry of `|A^dagger A - I|`.
pub fn unitarity_residual(a: &Mat2) -> f64 {
    let p = mul(&dagger(a), a);
    let id = identity();
    let mut r: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            r = r.max((p[i][j] - id[i][j]).norm());
        }
    }
    r
}

/// Largest entrywise distance.
pub fn distance(a: &Mat2, b: &Mat2) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            r = r.max((a[i][j] - b[i][j]).norm());
        }
    }
    r
}

/// Expectation-style matrix element `<u| A |v>`, with `u` given as a ket.
pub fn element(u: [C64; 2], a: &Mat2, v: [C64; 2]) -> C64 {
    let av = apply(a, v);
    u[0].conj() * av[0] + u[1].conj() * av[1]
}

pub fn plus() -> [C64; 2] {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [h, h]
}

pub fn zero_ket() -> [C64; 2] {
    [ONE, ZERO]
}
