//! Channel and input-state constructors.
//!
//! The non-orthogonal pair is `|alpha> = (1, 0)`, `|beta> = (r e^{i theta}, sqrt(1 - r^2))`,
//! so `<alpha|beta> = r e^{i theta}` and Gram-Schmidt returns the computational basis.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cmatrix::{self, Complex, ComplexMatrix, StateVector};
use crate::error::{Error, Result};
use crate::teleport::CorrectionTable;

/// Construction tolerance for channel density matrices.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            expected: format!("[{lo}, {hi}]"),
        })
    }
}

fn check_r_open(r: f64) -> Result<()> {
    check_range("r", r, 0.0, 1.0)?;
    if r == 1.0 {
        return Err(Error::SeparableDegenerate);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonOrthBasis {
    pub r: f64,
    pub theta: f64,
    pub alpha: StateVector,
    pub beta: StateVector,
}

impl NonOrthBasis {
    /// sqrt(1 - r^2)
    pub fn n_beta(&self) -> f64 {
        (1.0 - self.r * self.r).sqrt()
    }

    /// 1 / sqrt(1 - r^2); infinite at r = 1.
    pub fn n_g(&self) -> f64 {
        1.0 / self.n_beta()
    }

    /// 1 / sqrt(2 (1 + r^2))
    pub fn n_1(&self) -> f64 {
        1.0 / (2.0 * (1.0 + self.r * self.r)).sqrt()
    }

    pub fn overlap(&self) -> Complex {
        Complex::from_polar(self.r, self.theta)
    }
}

pub fn nonorth_basis(r: f64, theta: f64) -> Result<NonOrthBasis> {
    check_range("r", r, 0.0, 1.0)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let alpha = StateVector::new(&[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)])?;
    let beta = StateVector::new(&[
        Complex::from_polar(r, theta),
        Complex::new((1.0 - r * r).sqrt(), 0.0),
    ])?;
    Ok(NonOrthBasis {
        r,
        theta,
        alpha,
        beta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthonormalPair {
    pub zero: StateVector,
    pub one: StateVector,
    /// Norm of `|beta> - <alpha|beta>|alpha>` before rescaling.
    pub residual_norm: f64,
}

pub fn gram_schmidt(basis: &NonOrthBasis) -> Result<OrthonormalPair> {
    if basis.r >= 1.0 {
        return Err(Error::DegenerateBasis);
    }
    let overlap = basis.alpha.inner(&basis.beta)?;
    let residual = StateVector::new(&[
        basis.beta[0] - overlap * basis.alpha[0],
        basis.beta[1] - overlap * basis.alpha[1],
    ])?;
    let residual_norm = residual.norm_sqr().sqrt();
    Ok(OrthonormalPair {
        zero: basis.alpha,
        one: residual.scale(Complex::new(basis.n_g(), 0.0)),
        residual_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputQubit {
    pub theta_b: f64,
    pub phi: f64,
    state: StateVector,
}

impl InputQubit {
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// cos(theta_b / 2)
    pub fn x(&self) -> Complex {
        self.state[0]
    }

    /// e^{i phi} sin(theta_b / 2)
    pub fn y(&self) -> Complex {
        self.state[1]
    }

    /// |y|^2 = sin^2(theta_b / 2)
    pub fn ysq(&self) -> f64 {
        self.state[1].norm_sqr()
    }
}

/// Bloch-sphere input `cos(theta_b/2)|0> + e^{i phi} sin(theta_b/2)|1>`.
pub fn input_state(theta_b: f64, phi: f64) -> InputQubit {
    let (s, c) = (0.5 * theta_b).sin_cos();
    let state = StateVector::new(&[Complex::new(c, 0.0), Complex::from_polar(s, phi)])
        .expect("two amplitudes");
    InputQubit {
        theta_b,
        phi,
        state,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Noes,
    Werner,
    Nmes,
    NonorthMixed,
    RhoNew,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Noes => "noes",
            ChannelKind::Werner => "werner",
            ChannelKind::Nmes => "nmes",
            ChannelKind::NonorthMixed => "nonorth-mixed",
            ChannelKind::RhoNew => "rho-new",
        }
    }

    pub fn is_pure(self) -> bool {
        matches!(self, ChannelKind::Noes | ChannelKind::Nmes)
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "noes" => ChannelKind::Noes,
            "werner" => ChannelKind::Werner,
            "nmes" => ChannelKind::Nmes,
            "nonorth-mixed" => ChannelKind::NonorthMixed,
            "rho-new" => ChannelKind::RhoNew,
            other => {
                return Err(Error::UnknownName {
                    what: "channel",
                    got: other.into(),
                    expected: "noes, werner, nmes, nonorth-mixed, rho-new",
                })
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelParams {
    Noes { r: f64, theta: f64 },
    Werner { p: f64 },
    Nmes { s: f64 },
    NonorthMixed { r: f64, theta: f64, g: f64 },
    RhoNew { p: f64 },
}

impl ChannelParams {
    pub fn kind(&self) -> ChannelKind {
        match self {
            ChannelParams::Noes { .. } => ChannelKind::Noes,
            ChannelParams::Werner { .. } => ChannelKind::Werner,
            ChannelParams::Nmes { .. } => ChannelKind::Nmes,
            ChannelParams::NonorthMixed { .. } => ChannelKind::NonorthMixed,
            ChannelParams::RhoNew { .. } => ChannelKind::RhoNew,
        }
    }

    pub fn build(&self) -> Result<Channel> {
        match *self {
            ChannelParams::Noes { r, theta } => noes_pure(r, theta),
            ChannelParams::Werner { p } => werner(p),
            ChannelParams::Nmes { s } => nmes(s),
            ChannelParams::NonorthMixed { r, theta, g } => nonorth_mixed(r, theta, g),
            ChannelParams::RhoNew { p } => rho_new(p),
        }
    }
}

/// A two-qubit teleportation resource with its realized density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    params: ChannelParams,
    rho: ComplexMatrix,
    pure: Option<StateVector>,
    corrections: CorrectionTable,
}

impl Channel {
    fn mixed(params: ChannelParams, rho: ComplexMatrix) -> Self {
        Self {
            params,
            rho,
            pure: None,
            corrections: CorrectionTable::default(),
        }
    }

    fn pure(params: ChannelParams, psi: StateVector) -> Self {
        Self {
            params,
            rho: psi.outer(),
            pure: Some(psi),
            corrections: CorrectionTable::default(),
        }
    }

    pub fn with_corrections(mut self, corrections: CorrectionTable) -> Self {
        self.corrections = corrections;
        self
    }

    pub fn kind(&self) -> ChannelKind {
        self.params.kind()
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn pure_vector(&self) -> Option<&StateVector> {
        self.pure.as_ref()
    }

    pub fn corrections(&self) -> &CorrectionTable {
        &self.corrections
    }

    /// Hermitian and unit trace to 1e-12, PSD to 1e-10, and `rho = |psi><psi|` for pure channels.
    pub fn validate(&self) -> Result<()> {
        let defect = self.rho.hermiticity_defect();
        if defect > CONSTRUCTION_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > CONSTRUCTION_TOL || tr.im.abs() > CONSTRUCTION_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let lowest = cmatrix::hermitian_eigenvalues(&self.rho)?[0];
        if lowest < -cmatrix::PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        if let Some(psi) = &self.pure {
            let diff = psi.outer().max_abs_diff(&self.rho);
            if diff > CONSTRUCTION_TOL {
                return Err(Error::InvalidDensity(format!(
                    "rho differs from |psi><psi| by {diff:e}"
                )));
            }
        }
        Ok(())
    }
}

fn singlet() -> StateVector {
    let h = FRAC_1_SQRT_2;
    StateVector::new(&[
        Complex::new(0.0, 0.0),
        Complex::new(h, 0.0),
        Complex::new(-h, 0.0),
        Complex::new(0.0, 0.0),
    ])
    .expect("4 amplitudes")
}

/// Symmetric non-orthogonal entangled state `N_1 (|alpha beta> + |beta alpha>)`.
pub fn noes_pure(r: f64, theta: f64) -> Result<Channel> {
    check_r_open(r)?;
    let basis = nonorth_basis(r, theta)?;
    let ab = basis.alpha.kron(&basis.beta)?;
    let ba = basis.beta.kron(&basis.alpha)?;
    let sum: Vec<Complex> = ab
        .amplitudes()
        .iter()
        .zip(ba.amplitudes())
        .map(|(x, y)| (x + y) * basis.n_1())
        .collect();
    let psi = StateVector::new(&sum)?;
    Ok(Channel::pure(ChannelParams::Noes { r, theta }, psi))
}

/// `(1 - p)|psi-><psi-| + (p/4) I`. Corrections are keyed to the singlet.
pub fn werner(p: f64) -> Result<Channel> {
    check_range("p", p, 0.0, 1.0)?;
    let rho = singlet().outer().scale_re(1.0 - p) + ComplexMatrix::identity(4)?.scale_re(p / 4.0);
    Ok(Channel::mixed(ChannelParams::Werner { p }, rho)
        .with_corrections(CorrectionTable::singlet()))
}

/// `u|01> + v|10>` with `u = (1 - s)/sqrt(2)`.
pub fn nmes(s: f64) -> Result<Channel> {
    check_range("s", s, 0.0, 1.0)?;
    let u = (1.0 - s) * FRAC_1_SQRT_2;
    let v = (1.0 - u * u).sqrt();
    let zero = Complex::new(0.0, 0.0);
    let psi = StateVector::new(&[zero, Complex::new(u, 0.0), Complex::new(v, 0.0), zero])?;
    Ok(Channel::pure(ChannelParams::Nmes { s }, psi))
}

/// Separability threshold of the non-orthogonal mixture: `(1 + r^2)/(3 - r^2)`.
pub fn g_threshold(r: f64) -> f64 {
    (1.0 + r * r) / (3.0 - r * r)
}

/// Largest admissible epsilon for a given r, `(2 - 2r^2)/(3 - r^2)`.
pub fn epsilon_bound(r: f64) -> f64 {
    (2.0 - 2.0 * r * r) / (3.0 - r * r)
}

pub fn g_from_epsilon(r: f64, eps: f64) -> Result<f64> {
    check_range("r", r, 0.0, 1.0)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            expected: "eps > 0".into(),
        });
    }
    let g = g_threshold(r) + eps;
    // small slack so eps = bound (g = 1 up to rounding) is accepted
    if g > 1.0 + 1e-12 {
        return Err(Error::EpsilonTooLarge {
            eps,
            bound: epsilon_bound(r),
        });
    }
    Ok(g.min(1.0))
}

/// `g |psi><psi| + ((1 - g)/4) I` with `|psi>` the non-orthogonal entangled state.
pub fn nonorth_mixed(r: f64, theta: f64, g: f64) -> Result<Channel> {
    check_r_open(r)?;
    check_range("g", g, 0.0, 1.0)?;
    let psi = noes_pure(r, theta)?.pure.expect("noes is pure");
    let rho = psi.outer().scale_re(g) + ComplexMatrix::identity(4)?.scale_re((1.0 - g) / 4.0);
    Ok(Channel::mixed(
        ChannelParams::NonorthMixed { r, theta, g },
        rho,
    ))
}

/// Convenience: non-orthogonal mixture parameterized by epsilon above the separability threshold.
pub fn nonorth_mixed_eps(r: f64, theta: f64, eps: f64) -> Result<Channel> {
    let g = g_from_epsilon(r, eps)?;
    nonorth_mixed(r, theta, g)
}

/// Three-qubit GHZ state `(|000> + |111>)/sqrt(2)`.
pub fn ghz3() -> StateVector {
    let mut amps = [Complex::new(0.0, 0.0); 8];
    amps[0] = Complex::new(FRAC_1_SQRT_2, 0.0);
    amps[7] = Complex::new(FRAC_1_SQRT_2, 0.0);
    StateVector::new(&amps).expect("8 amplitudes")
}

/// Three-qubit W state `(|001> + |010> + |100>)/sqrt(3)`.
pub fn w3() -> StateVector {
    let a = Complex::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = [Complex::new(0.0, 0.0); 8];
    amps[1] = a;
    amps[2] = a;
    amps[4] = a;
    StateVector::new(&amps).expect("8 amplitudes")
}

/// `p Tr_3|GHZ><GHZ| + (1 - p) Tr_3|W><W|`.
pub fn rho_new(p: f64) -> Result<Channel> {
    check_range("p", p, 0.0, 1.0)?;
    let ghz = cmatrix::trace_out_last_qubit(&ghz3().outer())?;
    let w = cmatrix::trace_out_last_qubit(&w3().outer())?;
    let rho = ghz.scale_re(p) + w.scale_re(1.0 - p);
    Ok(Channel::mixed(ChannelParams::RhoNew { p }, rho))
}
