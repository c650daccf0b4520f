//! Dense complex linear algebra for one, two and three qubits.
//!
//! Everything here is stack allocated: matrices hold a fixed 8x8 buffer and
//! vectors a fixed 8-slot buffer, with `dim` in {2, 4, 8} marking the live
//! block. Qubit ordering: the leftmost tensor factor is the most significant
//! bit of the row index, so `|ab>` sits at index `2a + b`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64 as Complex;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 8;

/// Hermiticity slack accepted by the eigensolver and the density validator.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues down to `-PSD_TOL` count as round-off and are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;
/// Jacobi stops once every off-diagonal magnitude is below this.
pub const JACOBI_OFF_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        _ => Err(Error::UnsupportedDimension(dim)),
    }
}

/// Which tensor factor of a two-qubit operator an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

#[derive(Clone, Copy, PartialEq)]
pub struct StateVector {
    dim: usize,
    amps: [Complex; MAX_DIM],
}

impl StateVector {
    pub fn new(amps: &[Complex]) -> Result<Self> {
        check_dim(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        let mut buf = [ZERO; MAX_DIM];
        buf[..amps.len()].copy_from_slice(amps);
        Ok(Self {
            dim: amps.len(),
            amps: buf,
        })
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: k,
            });
        }
        let mut buf = [ZERO; MAX_DIM];
        buf[k] = ONE;
        Ok(Self { dim, amps: buf })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps[..self.dim]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Ok(self.scale(Complex::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, k: Complex) -> Self {
        let mut out = *self;
        for z in &mut out.amps[..self.dim] {
            *z *= k;
        }
        out
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(self
            .amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn kron(&self, other: &StateVector) -> Result<StateVector> {
        let dim = self.dim * other.dim;
        check_dim(dim)?;
        let mut buf = [ZERO; MAX_DIM];
        for i in 0..self.dim {
            for j in 0..other.dim {
                buf[i * other.dim + j] = self.amps[i] * other.amps[j];
            }
        }
        Ok(StateVector { dim, amps: buf })
    }

    /// `|self><self|`.
    pub fn outer(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |i, j| self.amps[i] * self.amps[j].conj())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for StateVector {
    type Output = Complex;
    fn index(&self, i: usize) -> &Complex {
        assert!(i < self.dim, "index {i} out of range for dim {}", self.dim);
        &self.amps[i]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amplitudes()).finish()
    }
}

/// Square complex matrix of dimension 2, 4 or 8, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [Complex; MAX_DIM * MAX_DIM],
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [ZERO; MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO }))
    }

    /// Build from a row-major slice of length `dim * dim`.
    pub fn from_rows(dim: usize, entries: &[Complex]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self::from_fn(dim, |i, j| entries[i * dim + j]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        check_dim(dim)?;
        Ok(Self::from_fn(dim, |i, j| {
            if i == j {
                Complex::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Internal constructor; callers guarantee `dim` is supported.
    pub(crate) fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        debug_assert!(check_dim(dim).is_ok());
        let mut data = [ZERO; MAX_DIM * MAX_DIM];
        for i in 0..dim {
            for j in 0..dim {
                data[i * MAX_DIM + j] = f(i, j);
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(i, j)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self::from_fn(self.dim, |i, j| self[(i, j)] * k)
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.scale(Complex::new(k, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self[(i, k)] * other[(k, j)]).sum()
        }))
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        let mut buf = [ZERO; MAX_DIM];
        for (i, slot) in buf.iter_mut().enumerate().take(self.dim) {
            *slot = (0..self.dim).map(|k| self[(i, k)] * v[k]).sum();
        }
        Ok(StateVector {
            dim: self.dim,
            amps: buf,
        })
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.dagger())
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        check_dim(dim)?;
        let n = other.dim;
        Ok(Self::from_fn(dim, |i, j| {
            self[(i / n, j / n)] * other[(i % n, j % n)]
        }))
    }

    /// Largest entrywise modulus of `self - other`; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - other[(i, j)]).norm());
            }
        }
        worst
    }

    /// max |a_ij - conj(a_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let z = self[(i, j)];
                z.re.is_finite() && z.im.is_finite()
            })
        })
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            })
        }
    }

    fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &self.data[i * MAX_DIM + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &mut self.data[i * MAX_DIM + j]
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on dimension mismatch.
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        Self::from_fn(self.dim, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        Self::from_fn(self.dim, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs).expect("dimension mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> ComplexMatrix {
    let i_ = Complex::new(0.0, 1.0);
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => -i_,
        (1, 0) => i_,
        _ => ZERO,
    })
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => -ONE,
        _ => ZERO,
    })
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i == j { ONE } else { ZERO })
}

/// Reduce a two-qubit operator to the factor named by `keep`.
pub fn partial_trace(rho: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    rho.require_dim(4)?;
    Ok(ComplexMatrix::from_fn(2, |i, j| match keep {
        Subsystem::First => rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)],
        Subsystem::Second => rho[(i, j)] + rho[(2 + i, 2 + j)],
    }))
}

/// Trace out the least significant (rightmost) qubit: 8 -> 4 or 4 -> 2.
pub fn trace_out_last_qubit(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.dim() < 4 {
        return Err(Error::UnsupportedDimension(rho.dim() / 2));
    }
    let half = rho.dim() / 2;
    Ok(ComplexMatrix::from_fn(half, |i, j| {
        rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)]
    }))
}

/// Transpose the chosen tensor factor of a two-qubit operator.
pub fn partial_transpose(rho: &ComplexMatrix, on: Subsystem) -> Result<ComplexMatrix> {
    rho.require_dim(4)?;
    Ok(ComplexMatrix::from_fn(4, |row, col| {
        let (a, b) = (row >> 1, row & 1);
        let (c, d) = (col >> 1, col & 1);
        match on {
            Subsystem::First => rho[((c << 1) | b, (a << 1) | d)],
            Subsystem::Second => rho[((a << 1) | d, (c << 1) | b)],
        }
    }))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

impl HermitianEigen {
    /// `V diag(values) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.dim();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }
}

/// Cyclic complex Jacobi rotations.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = a.dim();
    // symmetrize so the rotations act on an exactly Hermitian matrix
    let mut m = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex::new(a[(i, i)].re, 0.0)
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n)?;

    let off = |m: &ComplexMatrix| {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max(m[(i, j)].norm());
            }
        }
        worst
    };

    let mut sweeps = 0;
    while off(&m) >= JACOBI_OFF_TOL && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let mag = b.norm();
                if mag < f64::MIN_POSITIVE {
                    continue;
                }
                let phase = b / mag;
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                let angle = 0.5 * (2.0 * mag).atan2(aqq - app);
                let (s, c) = angle.sin_cos();
                // G = diag(1, e^{-i phi}) · [[c, s], [-s, c]] in the (p, q) plane
                let g_pp = Complex::new(c, 0.0);
                let g_pq = Complex::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = mkp * g_pp + mkq * g_qp;
                    m[(k, q)] = mkp * g_pq + mkq * g_qq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = g_pp.conj() * mpk + g_qp.conj() * mqk;
                    m[(q, k)] = g_pq.conj() * mpk + g_qq.conj() * mqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex::new(m[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a)?.values)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(a)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -PSD_TOL {
            return Err(Error::NotPsd(lowest));
        }
    }
    let roots: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok(HermitianEigen {
        values: roots,
        ..eig
    }
    .reconstruct())
}

/// Hermitian, unit trace, PSD; all within `tol`.
pub fn validate_density(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    if !rho.is_finite() {
        return Err(Error::NonFinite("density matrix"));
    }
    let defect = rho.hermiticity_defect();
    if defect > tol {
        return Err(Error::InvalidDensity(format!(
            "not Hermitian (defect {defect:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
    }
    let lowest = hermitian_eigenvalues(rho)?[0];
    if lowest < -tol {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {lowest:e}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn phi_plus() -> StateVector {
        let h = c(FRAC_1_SQRT_2, 0.0);
        StateVector::new(&[h, ZERO, ZERO, h]).unwrap()
    }

    fn singlet() -> StateVector {
        let h = FRAC_1_SQRT_2;
        StateVector::new(&[ZERO, c(h, 0.0), c(-h, 0.0), ZERO]).unwrap()
    }

    #[test]
    fn kron_identity_and_basis() {
        let i4 = identity2().kron(&identity2()).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4).unwrap());

        let v = StateVector::basis(2, 0)
            .unwrap()
            .kron(&StateVector::basis(2, 1).unwrap())
            .unwrap();
        assert_eq!(v.amplitudes(), &[ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn kron_xx_fixes_phi_plus() {
        let xx = pauli_x().kron(&pauli_x()).unwrap();
        let out = xx.apply(&phi_plus()).unwrap();
        assert!(out.max_abs_diff(&phi_plus()) < 1e-15);
    }

    #[test]
    fn kron_rejects_dimension_overflow() {
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert_eq!(i4.kron(&i4), Err(Error::UnsupportedDimension(16)));
        let v4 = phi_plus();
        assert!(matches!(v4.kron(&v4), Err(Error::UnsupportedDimension(16))));
    }

    #[test]
    fn unsupported_dims_rejected() {
        assert!(ComplexMatrix::zeros(3).is_err());
        assert!(StateVector::new(&[ONE; 3]).is_err());
        assert!(ComplexMatrix::from_rows(2, &[ONE; 3]).is_err());
    }

    #[test]
    fn dagger_cases() {
        assert_eq!(identity2().dagger(), identity2());
        assert_eq!(pauli_y().dagger(), pauli_y());
        let a =
            ComplexMatrix::from_rows(2, &[c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.25), c(-2.0, 0.0)])
                .unwrap();
        assert_eq!(a.dagger().dagger(), a);
        assert_eq!(a.dagger()[(0, 1)], c(0.5, -0.25));
    }

    #[test]
    fn partial_trace_cases() {
        let bell = phi_plus().outer();
        let red = partial_trace(&bell, Subsystem::First).unwrap();
        assert!(red.max_abs_diff(&identity2().scale_re(0.5)) < 1e-15);

        let ket01 = StateVector::basis(4, 1).unwrap().outer();
        let first = partial_trace(&ket01, Subsystem::First).unwrap();
        let second = partial_trace(&ket01, Subsystem::Second).unwrap();
        assert!(first.max_abs_diff(&StateVector::basis(2, 0).unwrap().outer()) < 1e-15);
        assert!(second.max_abs_diff(&StateVector::basis(2, 1).unwrap().outer()) < 1e-15);

        assert!(partial_trace(&identity2(), Subsystem::First).is_err());
    }

    #[test]
    fn trace_out_last_matches_partial_trace() {
        let rho = singlet().outer();
        assert_eq!(
            trace_out_last_qubit(&rho).unwrap(),
            partial_trace(&rho, Subsystem::First).unwrap()
        );
        assert!(trace_out_last_qubit(&identity2()).is_err());
    }

    #[test]
    fn partial_transpose_singlet_spectrum() {
        let pt = partial_transpose(&singlet().outer(), Subsystem::Second).unwrap();
        let ev = hermitian_eigenvalues(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        // the two choices of factor differ by a full transpose, same spectrum
        let pt1 = partial_transpose(&singlet().outer(), Subsystem::First).unwrap();
        assert!(pt1.max_abs_diff(&pt.transpose()) < 1e-15);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let a = ComplexMatrix::from_fn(4, |i, j| c(i as f64 + 0.1 * j as f64, (i * j) as f64));
        for on in [Subsystem::First, Subsystem::Second] {
            let twice = partial_transpose(&partial_transpose(&a, on).unwrap(), on).unwrap();
            assert_eq!(twice, a);
        }
        assert!(partial_transpose(&identity2(), Subsystem::First).is_err());
    }

    #[test]
    fn eigenvalues_simple() {
        assert_eq!(hermitian_eigenvalues(&pauli_z()).unwrap(), vec![-1.0, 1.0]);
        let quarter = ComplexMatrix::identity(4).unwrap().scale_re(0.25);
        assert_eq!(hermitian_eigenvalues(&quarter).unwrap(), vec![0.25; 4]);
        let ev = hermitian_eigenvalues(&pauli_y()).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let a = ComplexMatrix::from_rows(2, &[ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(hermitian_eigen(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigen_reconstructs_complex_hermitian() {
        let b = ComplexMatrix::from_fn(8, |i, j| {
            c(
                ((i * 7 + j * 3) % 5) as f64 - 2.0,
                ((i + 2 * j) % 3) as f64 - 1.0,
            )
        });
        let h = b + b.dagger();
        let eig = hermitian_eigen(&h).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&h) < 1e-9);
        let tr: f64 = eig.values.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-10);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_cases() {
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert!(matrix_sqrt_psd(&i4).unwrap().max_abs_diff(&i4) < 1e-14);

        let d = ComplexMatrix::from_real_diagonal(&[4.0, 1.0, 0.0, 0.0]).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[2.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matrix_sqrt_psd(&d).unwrap().max_abs_diff(&expected) < 1e-14);

        let proj = phi_plus().outer();
        assert!(matrix_sqrt_psd(&proj).unwrap().max_abs_diff(&proj) < 1e-12);

        assert!(matches!(matrix_sqrt_psd(&pauli_z()), Err(Error::NotPsd(_))));
    }

    #[test]
    fn density_validation() {
        assert!(validate_density(&singlet().outer(), 1e-12).is_ok());
        assert!(validate_density(&ComplexMatrix::identity(4).unwrap(), 1e-12).is_err());
        assert!(validate_density(&pauli_z().scale_re(0.5), 1e-12).is_err());
    }
}
