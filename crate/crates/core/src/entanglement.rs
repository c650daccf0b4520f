//! Concurrence, negativity and the Horodecki teleportation witness.
//!
//! Each matrix-based quantifier has a closed-form twin for the channel families
//! where one exists; the two routes are kept separate so they can check each other.

use serde::Serialize;

use crate::cmatrix::{
    self, hermitian_eigenvalues, matrix_sqrt_psd, partial_trace, partial_transpose, pauli_x,
    pauli_y, pauli_z, ComplexMatrix, StateVector, Subsystem,
};
use crate::error::{Error, Result};
use crate::states::{g_threshold, Channel};

/// Density inputs are validated at this tolerance.
pub const DENSITY_TOL: f64 = 1e-10;
/// Metrics this far below zero are reported as zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// nu must exceed 1 by this much to count as useful.
pub const USEFUL_MARGIN: f64 = 1e-12;

fn clamp_metric(x: f64) -> f64 {
    if x < CLAMP_TOL {
        x.max(0.0)
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub negativity: f64,
    pub nu: f64,
    pub useful: bool,
}

/// `2 sqrt(det rho_a)` for a normalized two-qubit pure state.
pub fn concurrence_pure(psi: &StateVector) -> Result<f64> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: psi.dim(),
        });
    }
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > DENSITY_TOL {
        return Err(Error::NotNormalized(n));
    }
    let red = partial_trace(&psi.outer(), Subsystem::First)?;
    let det = (red[(0, 0)] * red[(1, 1)] - red[(0, 1)] * red[(1, 0)]).re;
    Ok((2.0 * det.max(0.0).sqrt()).clamp(0.0, 1.0))
}

/// `(1 - r^2)/(1 + r^2)`.
pub fn concurrence_noes_closed(r: f64) -> f64 {
    (1.0 - r * r) / (1.0 + r * r)
}

/// `2uv = (1 - s) sqrt(2 - (1 - s)^2)`.
pub fn concurrence_nmes_closed(s: f64) -> f64 {
    let a = 1.0 - s;
    a * (2.0 - a * a).max(0.0).sqrt()
}

/// `max(0, 1 - 3p/2)`.
pub fn concurrence_werner_closed(p: f64) -> f64 {
    (1.0 - 1.5 * p).max(0.0)
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence_mixed(rho: &ComplexMatrix) -> Result<f64> {
    cmatrix::validate_density(rho, DENSITY_TOL)?;
    let yy = pauli_y().kron(&pauli_y())?;
    let tilde = yy.matmul(&rho.conj())?.matmul(&yy)?;
    let root = matrix_sqrt_psd(rho)?;
    let m = root.matmul(&tilde)?.matmul(&root)?;
    // m is Hermitian PSD in exact arithmetic; drop the round-off asymmetry
    let m = (m + m.dagger()).scale_re(0.5);
    let mut lambdas: Vec<f64> = hermitian_eigenvalues(&m)?
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1..].iter().sum::<f64>();
    Ok(clamp_metric(c).clamp(0.0, 1.0))
}

/// Smallest eigenvalue of the partial transpose.
pub fn min_pt_eigenvalue(rho: &ComplexMatrix) -> Result<f64> {
    let pt = partial_transpose(rho, Subsystem::Second)?;
    Ok(hermitian_eigenvalues(&pt)?[0])
}

/// `2 max(0, -lambda_min(rho^PT))`.
pub fn negativity(rho: &ComplexMatrix) -> Result<f64> {
    cmatrix::validate_density(rho, DENSITY_TOL)?;
    let lambda = min_pt_eigenvalue(rho)?;
    Ok(clamp_metric(-2.0 * lambda).max(0.0))
}

/// Negativity of the non-orthogonal mixture; zero at or below the separability threshold.
pub fn negativity_nonorth_closed(r: f64, g: f64) -> f64 {
    let r2 = r * r;
    if g <= g_threshold(r) {
        return 0.0;
    }
    ((g * (3.0 - r2) - (1.0 + r2)) / (2.0 * (1.0 + r2))).max(0.0)
}

/// `t_ij = tr(rho sigma_i (x) sigma_j)` for i, j over x, y, z.
pub fn correlation_matrix(rho: &ComplexMatrix) -> Result<[[f64; 3]; 3]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (i, a) in paulis.iter().enumerate() {
        for (j, b) in paulis.iter().enumerate() {
            t[i][j] = rho.matmul(&a.kron(b)?)?.trace().re;
        }
    }
    Ok(t)
}

/// Eigenvalues `u_i` of `T^T T`, descending.
pub fn correlation_eigenvalues(rho: &ComplexMatrix) -> Result<[f64; 3]> {
    let t = correlation_matrix(rho)?;
    // T^T T is real symmetric 3x3; embed in a 4x4 with an inert zero row and column
    let mut ttt = ComplexMatrix::zeros(4)?;
    for i in 0..3 {
        for j in 0..3 {
            let v: f64 = (0..3).map(|k| t[k][i] * t[k][j]).sum();
            ttt[(i, j)] = v.into();
        }
    }
    let eig = cmatrix::hermitian_eigen(&ttt)?;
    // the padding index keeps eigenvalue exactly zero and eigenvector e_3
    let mut u: Vec<f64> = (0..4)
        .filter(|&k| eig.vectors[(3, k)].norm() < 0.5)
        .map(|k| eig.values[k])
        .collect();
    u.sort_by(|a, b| b.total_cmp(a));
    Ok([u[0], u[1], u[2]])
}

/// Sum of singular values of the correlation matrix.
pub fn horodecki_nu(rho: &ComplexMatrix) -> Result<f64> {
    cmatrix::validate_density(rho, DENSITY_TOL)?;
    Ok(correlation_eigenvalues(rho)?
        .iter()
        .map(|u| u.max(0.0).sqrt())
        .sum())
}

/// `1 + (3 - r^2) eps / (1 + r^2)`.
pub fn nu_nonorth_closed(r: f64, eps: f64) -> f64 {
    1.0 + (3.0 - r * r) * eps / (1.0 + r * r)
}

pub fn is_useful(nu: f64) -> bool {
    nu > 1.0 + USEFUL_MARGIN
}

pub fn report(channel: &Channel) -> Result<EntanglementReport> {
    let rho = channel.rho();
    let concurrence = match channel.pure_vector() {
        Some(psi) => concurrence_pure(psi)?,
        None => concurrence_mixed(rho)?,
    };
    let negativity = negativity(rho)?;
    let nu = horodecki_nu(rho)?;
    Ok(EntanglementReport {
        concurrence,
        negativity,
        nu,
        useful: is_useful(nu),
    })
}
