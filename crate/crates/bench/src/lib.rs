//! Deterministic fixtures shared by the criterion benches.

use telelab_core::states::{nmes, noes_pure, nonorth_mixed_eps, rho_new, werner};
use telelab_core::{Channel, Complex, ComplexMatrix};

/// One representative channel per family.
pub fn channels() -> Vec<Channel> {
    vec![
        noes_pure(0.5, 0.9).expect("valid params"),
        werner(0.3).expect("valid params"),
        nmes(0.4).expect("valid params"),
        nonorth_mixed_eps(0.4, 0.2, 0.2).expect("valid params"),
        rho_new(0.1).expect("valid params"),
    ]
}

/// Dense Hermitian matrix with distinct eigenvalues, filled from a fixed recurrence.
pub fn hermitian(dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim).expect("dim in 1..=8");
    let mut x = 0.123_f64;
    for i in 0..dim {
        for j in i..dim {
            x = (x * 3.7 + 0.41).fract();
            let re = x - 0.5;
            x = (x * 3.7 + 0.41).fract();
            let im = if i == j { 0.0 } else { x - 0.5 };
            m[(i, j)] = Complex::new(re + if i == j { i as f64 } else { 0.0 }, im);
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    m
}
