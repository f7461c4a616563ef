//! Standard single-site matrices.

use crate::linalg::{c, CMatrix, ONE, ZERO};

fn m2(a: [[crate::linalg::C64; 2]; 2]) -> CMatrix {
    CMatrix::from_shape_fn((2, 2), |(i, j)| a[i][j])
}

pub fn pauli_x() -> CMatrix {
    m2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> CMatrix {
    m2([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]])
}

/// `diag(1, -1)`: `|0>` has eigenvalue +1.
pub fn pauli_z() -> CMatrix {
    m2([[ONE, ZERO], [ZERO, -ONE]])
}

/// `|0><1|`.
pub fn sigma_minus() -> CMatrix {
    m2([[ZERO, ONE], [ZERO, ZERO]])
}

pub fn sigma_plus() -> CMatrix {
    m2([[ZERO, ZERO], [ONE, ZERO]])
}

pub fn hadamard() -> CMatrix {
    let h = 1.0 / 2f64.sqrt();
    m2([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
}

/// `|k><k|` in dimension `d`.
pub fn ket_bra(d: usize, row: usize, col: usize) -> CMatrix {
    let mut m = CMatrix::zeros((d, d));
    m[(row, col)] = ONE;
    m
}

/// Jordan ladder `sum_{j=1}^{d-1} |j-1><j|` with unit amplitudes.
pub fn jordan_ladder(d: usize) -> CMatrix {
    CMatrix::from_shape_fn((d, d), |(i, j)| if j == i + 1 { ONE } else { ZERO })
}

/// Cyclic shift `|j> -> |j+1 mod d>`.
pub fn shift(d: usize) -> CMatrix {
    CMatrix::from_shape_fn((d, d), |(i, j)| if i == (j + 1) % d { ONE } else { ZERO })
}

/// Clock `|j> -> omega^j |j>` with `omega = exp(2 pi i / d)`.
pub fn clock(d: usize) -> CMatrix {
    CMatrix::from_shape_fn((d, d), |(i, j)| {
        if i == j {
            let phase = 2.0 * std::f64::consts::PI * i as f64 / d as f64;
            c(phase.cos(), phase.sin())
        } else {
            ZERO
        }
    })
}

// Spin-1 in the S_z eigenbasis ordered m = +1, 0, -1.

pub fn spin1_z() -> CMatrix {
    CMatrix::from_shape_fn((3, 3), |(i, j)| if i == j { c(1.0 - i as f64, 0.0) } else { ZERO })
}

pub fn spin1_plus() -> CMatrix {
    let r2 = 2f64.sqrt();
    CMatrix::from_shape_fn((3, 3), |(i, j)| if j == i + 1 { c(r2, 0.0) } else { ZERO })
}

pub fn spin1_minus() -> CMatrix {
    spin1_plus().t().to_owned()
}

pub fn spin1_x() -> CMatrix {
    (spin1_plus() + spin1_minus()).mapv(|z| z * 0.5)
}

pub fn spin1_y() -> CMatrix {
    (spin1_plus() - spin1_minus()).mapv(|z| z * c(0.0, -0.5))
}
