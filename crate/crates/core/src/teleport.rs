//! Standard one-qubit teleportation over a two-qubit channel.
//!
//! Qubit 1 carries the input, qubits a and b the channel. The sender measures
//! (1, a) in the Bell basis, the receiver applies the correction assigned to the
//! outcome by the channel's [`CorrectionTable`]. Pure channels are propagated as
//! state vectors, everything else as density matrices.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cmatrix::{identity2, pauli_x, pauli_y, pauli_z, Complex, ComplexMatrix, StateVector};
use crate::entanglement::horodecki_nu;
use crate::error::{Error, Result};
use crate::states::{check_range, g_threshold, input_state, Channel, ChannelParams, InputQubit};

/// The classical (measure-and-prepare) limit on average fidelity.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Outcomes less likely than this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-15;

/// Seed used when a Monte Carlo run does not name one.
pub const DEFAULT_SEED: u64 = 20_240_917;

const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "PHI_PLUS",
            BellOutcome::PhiMinus => "PHI_MINUS",
            BellOutcome::PsiPlus => "PSI_PLUS",
            BellOutcome::PsiMinus => "PSI_MINUS",
        }
    }

    /// Real amplitudes over |00>, |01>, |10>, |11>.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            BellOutcome::PhiPlus => [h, 0.0, 0.0, h],
            BellOutcome::PhiMinus => [h, 0.0, 0.0, -h],
            BellOutcome::PsiPlus => [0.0, h, h, 0.0],
            BellOutcome::PsiMinus => [0.0, h, -h, 0.0],
        }
    }

    pub fn state(self) -> StateVector {
        let amps = self.amplitudes().map(|a| Complex::new(a, 0.0));
        StateVector::new(&amps).expect("4 amplitudes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Correction {
    Identity,
    X,
    Y,
    Z,
}

impl Correction {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Correction::Identity => identity2(),
            Correction::X => pauli_x(),
            Correction::Y => pauli_y(),
            Correction::Z => pauli_z(),
        }
    }
}

/// Receiver's unitary for each Bell outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionTable([Correction; 4]);

impl Default for CorrectionTable {
    /// Table for channels close to `|psi+>`: X, Y, I, Z on PHI+, PHI-, PSI+, PSI-.
    fn default() -> Self {
        Self([
            Correction::X,
            Correction::Y,
            Correction::Identity,
            Correction::Z,
        ])
    }
}

impl CorrectionTable {
    /// Table for singlet-based channels, so that `|psi->` teleports perfectly.
    pub fn singlet() -> Self {
        Self([
            Correction::Y,
            Correction::X,
            Correction::Z,
            Correction::Identity,
        ])
    }

    pub fn new(table: [Correction; 4]) -> Self {
        Self(table)
    }

    pub fn get(&self, outcome: BellOutcome) -> Correction {
        self.0[outcome.index()]
    }

    pub fn correct_vector(&self, outcome: BellOutcome, state: &StateVector) -> Result<StateVector> {
        self.get(outcome).matrix().apply(state)
    }

    pub fn correct_density(
        &self,
        outcome: BellOutcome,
        rho: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        rho.conjugate_by(&self.get(outcome).matrix())
    }
}

/// Apply the default correction for `outcome` to a qubit state.
pub fn apply_correction(outcome: BellOutcome, state: &StateVector) -> Result<StateVector> {
    CorrectionTable::default().correct_vector(outcome, state)
}

/// Density-matrix form of [`apply_correction`]: `U rho U†`.
pub fn apply_correction_density(
    outcome: BellOutcome,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    CorrectionTable::default().correct_density(outcome, rho)
}

/// `|phi>_1 |Psi>_ab = (1/sqrt 2) sum_j |B_j>_1a |v_j>_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDecomposition {
    /// Unnormalized conditional states of qubit b, indexed by [`BellOutcome::index`].
    pub vectors: [StateVector; 4],
}

impl BellDecomposition {
    pub fn vector(&self, outcome: BellOutcome) -> &StateVector {
        &self.vectors[outcome.index()]
    }

    pub fn probability(&self, outcome: BellOutcome) -> f64 {
        0.5 * self.vector(outcome).norm_sqr()
    }
}

/// Closed-form Bell coefficients for the non-orthogonal channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoesCoefficients {
    pub a: Complex,
    pub b: Complex,
    pub p_plus: Complex,
    pub p_minus: Complex,
    pub q_plus: Complex,
    pub q_minus: Complex,
}

impl NoesCoefficients {
    pub fn new(input: &InputQubit, r: f64, theta: f64) -> Self {
        let n1 = 1.0 / (2.0 * (1.0 + r * r)).sqrt();
        let inv_ng = (1.0 - r * r).sqrt();
        let overlap = Complex::from_polar(r, theta);
        let (x, y) = (input.x(), input.y());
        Self {
            a: x * n1 * inv_ng,
            b: y * n1 * inv_ng,
            p_plus: (x * overlap * 2.0 + y * inv_ng) * n1,
            p_minus: (x * overlap * 2.0 - y * inv_ng) * n1,
            q_plus: (x * inv_ng + y * overlap * 2.0) * n1,
            q_minus: (x * inv_ng - y * overlap * 2.0) * n1,
        }
    }

    /// Conditional vectors `(P+, A)`, `(P-, A)`, `(Q+, B)`, `(Q-, -B)`.
    pub fn decomposition(&self) -> BellDecomposition {
        let v = |a: Complex, b: Complex| StateVector::new(&[a, b]).expect("2 amplitudes");
        BellDecomposition {
            vectors: [
                v(self.p_plus, self.a),
                v(self.p_minus, self.a),
                v(self.q_plus, self.b),
                v(self.q_minus, -self.b),
            ],
        }
    }
}

/// Contract `|phi>_1 (x) |Psi>_ab` against each Bell state of (1, a).
pub fn bell_project(input: &InputQubit, channel: &Channel) -> Result<BellDecomposition> {
    let psi = channel
        .pure_vector()
        .ok_or(Error::NotPure(channel.kind().name()))?;
    let chi = input.state().kron(psi)?;
    let vectors = BellOutcome::ALL.map(|outcome| {
        let bell = outcome.amplitudes();
        let mut amps = [Complex::new(0.0, 0.0); 2];
        for (k, amp) in amps.iter_mut().enumerate() {
            *amp = (0..4).map(|i| chi[2 * i + k] * bell[i]).sum::<Complex>() * SQRT_2;
        }
        StateVector::new(&amps).expect("2 amplitudes")
    });
    Ok(BellDecomposition { vectors })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(clippy::large_enum_variant)] // both variants are stack-only and Copy
pub enum OutputState {
    Pure(StateVector),
    Mixed(ComplexMatrix),
}

impl OutputState {
    /// `<phi|rho|phi>`.
    pub fn overlap_with(&self, phi: &StateVector) -> Result<f64> {
        match self {
            OutputState::Pure(xi) => Ok(phi.inner(xi)?.norm_sqr()),
            OutputState::Mixed(rho) => Ok(phi.inner(&rho.apply(phi)?)?.re),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeRecord {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Normalized corrected state; `None` for impossible outcomes.
    pub output: Option<OutputState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportResult {
    pub outcomes: [OutcomeRecord; 4],
    pub fidelity: f64,
}

impl TeleportResult {
    pub fn probability_sum(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// `sum_j P_j <phi|rho_j|phi>` recomputed from the stored outcomes.
    pub fn recompute_fidelity(&self, input: &InputQubit) -> Result<f64> {
        let mut total = 0.0;
        for rec in &self.outcomes {
            if let Some(out) = &rec.output {
                total += rec.probability * out.overlap_with(input.state())?;
            }
        }
        Ok(total)
    }
}

/// State-vector protocol; requires a pure channel.
pub fn teleport_pure(input: &InputQubit, channel: &Channel) -> Result<TeleportResult> {
    let decomp = bell_project(input, channel)?;
    let table = channel.corrections();
    let mut fidelity = 0.0;
    let mut outcomes = [OutcomeRecord {
        outcome: BellOutcome::PhiPlus,
        probability: 0.0,
        output: None,
    }; 4];
    for (slot, outcome) in outcomes.iter_mut().zip(BellOutcome::ALL) {
        let probability = decomp.probability(outcome);
        let output = if probability > ZERO_PROBABILITY {
            let xi = table
                .correct_vector(outcome, decomp.vector(outcome))?
                .normalize()?;
            fidelity += probability * input.state().inner(&xi)?.norm_sqr();
            Some(OutputState::Pure(xi))
        } else {
            None
        };
        *slot = OutcomeRecord {
            outcome,
            probability,
            output,
        };
    }
    Ok(TeleportResult { outcomes, fidelity })
}

/// Density-matrix protocol; accepts any channel.
pub fn teleport_mixed(input: &InputQubit, channel: &Channel) -> Result<TeleportResult> {
    let full = input.state().outer().kron(channel.rho())?;
    let table = channel.corrections();
    let mut fidelity = 0.0;
    let mut outcomes = [OutcomeRecord {
        outcome: BellOutcome::PhiPlus,
        probability: 0.0,
        output: None,
    }; 4];
    for (slot, outcome) in outcomes.iter_mut().zip(BellOutcome::ALL) {
        let bell = outcome.amplitudes();
        // (<B| (x) I) rho_1ab (|B> (x) I)
        let mut cond = ComplexMatrix::zeros(2)?;
        for k in 0..2 {
            for l in 0..2 {
                let mut acc = Complex::new(0.0, 0.0);
                for i in 0..4 {
                    if bell[i] == 0.0 {
                        continue;
                    }
                    for j in 0..4 {
                        if bell[j] == 0.0 {
                            continue;
                        }
                        acc += full[(2 * i + k, 2 * j + l)] * (bell[i] * bell[j]);
                    }
                }
                cond[(k, l)] = acc;
            }
        }
        let probability = cond.trace().re;
        let output = if probability > ZERO_PROBABILITY {
            let corrected = table
                .correct_density(outcome, &cond)?
                .scale_re(1.0 / probability);
            let out = OutputState::Mixed(corrected);
            fidelity += probability * out.overlap_with(input.state())?;
            Some(out)
        } else {
            None
        };
        *slot = OutcomeRecord {
            outcome,
            probability: probability.max(0.0),
            output,
        };
    }
    Ok(TeleportResult { outcomes, fidelity })
}

/// Pure channels go through [`teleport_pure`], the rest through [`teleport_mixed`].
pub fn teleport(input: &InputQubit, channel: &Channel) -> Result<TeleportResult> {
    if channel.pure_vector().is_some() {
        teleport_pure(input, channel)
    } else {
        teleport_mixed(input, channel)
    }
}

/// Per-input fidelity through the non-orthogonal channel.
pub fn fidelity_noes_closed(r: f64, ysq: f64) -> f64 {
    let d = 1.0 - 2.0 * ysq;
    (1.0 - r * r * d * d) / (1.0 + r * r)
}

/// Per-input fidelity through `u|01> + v|10>`, `s = 1 - sqrt(2) u`.
pub fn fidelity_nmes_closed(s: f64, ysq: f64) -> f64 {
    let a = 1.0 - s;
    1.0 - 2.0 * ysq * (1.0 - ysq) * (1.0 - a * (2.0 - a * a).sqrt())
}

pub fn avg_fidelity_noes_closed(r: f64) -> f64 {
    (3.0 - r * r) / (3.0 * (1.0 + r * r))
}

pub fn avg_fidelity_werner_closed(p: f64) -> f64 {
    (2.0 - p) / 2.0
}

pub fn avg_fidelity_nmes_closed(s: f64) -> f64 {
    let a = 1.0 - s;
    (2.0 + a * (2.0 - a * a).sqrt()) / 3.0
}

pub fn avg_fidelity_nonorth_closed(r: f64, eps: f64) -> f64 {
    CLASSICAL_FIDELITY + (3.0 - r * r) * eps / (6.0 * (1.0 + r * r))
}

/// Closed-form average fidelity; `at_classical_bound` marks results pinned at 2/3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedAverage {
    pub value: f64,
    pub at_classical_bound: bool,
}

/// `(7 - 4p)/9` below p = 1/4; exactly 2/3 (nu = 1) from there on.
pub fn avg_fidelity_rho_new_closed(p: f64) -> ClosedAverage {
    if p < 0.25 {
        ClosedAverage {
            value: (7.0 - 4.0 * p) / 9.0,
            at_classical_bound: false,
        }
    } else {
        ClosedAverage {
            value: CLASSICAL_FIDELITY,
            at_classical_bound: true,
        }
    }
}

pub fn avg_fidelity_closed(params: &ChannelParams) -> Result<ClosedAverage> {
    let plain = |value| ClosedAverage {
        value,
        at_classical_bound: false,
    };
    match *params {
        ChannelParams::Noes { r, .. } => {
            check_range("r", r, 0.0, 1.0)?;
            Ok(plain(avg_fidelity_noes_closed(r)))
        }
        ChannelParams::Werner { p } => {
            check_range("p", p, 0.0, 1.0)?;
            Ok(plain(avg_fidelity_werner_closed(p)))
        }
        ChannelParams::Nmes { s } => {
            check_range("s", s, 0.0, 1.0)?;
            Ok(plain(avg_fidelity_nmes_closed(s)))
        }
        ChannelParams::NonorthMixed { r, g, .. } => {
            check_range("r", r, 0.0, 1.0)?;
            check_range("g", g, 0.0, 1.0)?;
            let eps = g - g_threshold(r);
            if eps < -1e-12 {
                return Err(Error::InapplicableMetric {
                    metric: "avg_fidelity_closed",
                    channel: "nonorth-mixed",
                    reason: format!("closed form needs eps >= 0, got {eps}"),
                });
            }
            let eps = eps.max(0.0);
            Ok(ClosedAverage {
                value: avg_fidelity_nonorth_closed(r, eps),
                at_classical_bound: eps == 0.0,
            })
        }
        ChannelParams::RhoNew { p } => {
            check_range("p", p, 0.0, 1.0)?;
            Ok(avg_fidelity_rho_new_closed(p))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AveragingMethod {
    /// Gauss-Legendre in cos(theta_b) times a uniform rule in phi, `nodes` each.
    Quadrature { nodes: usize },
    /// Uniform sampling on the sphere from a seeded ChaCha stream.
    MonteCarlo { samples: usize, seed: Option<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityEstimate {
    pub mean: f64,
    /// Standard error of the mean; Monte Carlo only.
    pub std_error: Option<f64>,
    pub evaluations: usize,
}

/// Summation in a fixed binary tree over index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidSampleCount {
            n,
            reason: "quadrature needs at least 2 nodes",
        });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok((nodes, weights))
}

/// Uniform average of `f` over pure single-qubit inputs.
pub fn bloch_average<F>(f: F, method: AveragingMethod) -> Result<FidelityEstimate>
where
    F: Fn(&InputQubit) -> Result<f64> + Sync,
{
    match method {
        AveragingMethod::Quadrature { nodes } => {
            let (xs, ws) = gauss_legendre(nodes)?;
            let mut rows = Vec::with_capacity(nodes);
            for (x, w) in xs.iter().zip(&ws) {
                let theta_b = x.clamp(-1.0, 1.0).acos();
                let ring = (0..nodes)
                    .map(|j| f(&input_state(theta_b, 2.0 * PI * j as f64 / nodes as f64)))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(0.5 * w * pairwise_sum(&ring) / nodes as f64);
            }
            Ok(FidelityEstimate {
                mean: pairwise_sum(&rows),
                std_error: None,
                evaluations: nodes * nodes,
            })
        }
        AveragingMethod::MonteCarlo { samples, seed } => {
            if samples < 1000 {
                return Err(Error::InvalidSampleCount {
                    n: samples,
                    reason: "Monte Carlo needs at least 1000 samples",
                });
            }
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let chunks = samples.div_ceil(MC_CHUNK);
            let partials = (0..chunks)
                .into_par_iter()
                .map(|k| {
                    let len = MC_CHUNK.min(samples - k * MC_CHUNK);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                    let mut vals = Vec::with_capacity(len);
                    for _ in 0..len {
                        let u: f64 = rng.random();
                        let v: f64 = rng.random();
                        let q = input_state((1.0 - 2.0 * u).acos(), 2.0 * PI * v);
                        vals.push(f(&q)?);
                    }
                    let sq: Vec<f64> = vals.iter().map(|x| x * x).collect();
                    Ok((pairwise_sum(&vals), pairwise_sum(&sq)))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            let sums: Vec<f64> = partials.iter().map(|p| p.0).collect();
            let squares: Vec<f64> = partials.iter().map(|p| p.1).collect();
            let n = samples as f64;
            let mean = pairwise_sum(&sums) / n;
            let var = ((pairwise_sum(&squares) / n - mean * mean) * n / (n - 1.0)).max(0.0);
            Ok(FidelityEstimate {
                mean,
                std_error: Some((var / n).sqrt()),
                evaluations: samples,
            })
        }
    }
}

/// Input-averaged fidelity of the simulated protocol.
pub fn avg_fidelity_numeric(
    channel: &Channel,
    method: AveragingMethod,
) -> Result<FidelityEstimate> {
    bloch_average(|q| Ok(teleport(q, channel)?.fidelity), method)
}

/// `(1 + nu/3)/2`, the optimal average fidelity reachable by local corrections.
pub fn avg_fidelity_horodecki(channel: &Channel) -> Result<f64> {
    Ok(0.5 * (1.0 + horodecki_nu(channel.rho())? / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{nmes, noes_pure, nonorth_mixed_eps, rho_new, werner};

    #[test]
    fn identity_channel_gives_uniform_outcomes() {
        let ch = noes_pure(0.0, 0.0).unwrap();
        let d = bell_project(&input_state(0.0, 0.0), &ch).unwrap();
        for o in BellOutcome::ALL {
            assert!((d.probability(o) - 0.25).abs() < 1e-15);
        }
        let q = input_state(1.1, 0.4);
        let d = bell_project(&q, &ch).unwrap();
        let v = d.vector(BellOutcome::PsiPlus).normalize().unwrap();
        assert!((q.state().inner(&v).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_project_rejects_mixed() {
        let err = bell_project(&input_state(0.0, 0.0), &werner(0.1).unwrap()).unwrap_err();
        assert_eq!(err, Error::NotPure("werner"));
    }

    #[test]
    fn corrections() {
        let q = input_state(0.9, 2.1);
        let out = apply_correction(BellOutcome::PsiPlus, q.state()).unwrap();
        assert_eq!(&out, q.state());
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        assert_eq!(apply_correction(BellOutcome::PhiPlus, &zero).unwrap(), one);
        let y0 = apply_correction(BellOutcome::PhiMinus, &zero).unwrap();
        assert_eq!(y0[1], Complex::new(0.0, 1.0));
        let z1 = apply_correction(BellOutcome::PsiMinus, &one).unwrap();
        assert_eq!(z1[1], Complex::new(-1.0, 0.0));

        let rho = zero.outer();
        let flipped = apply_correction_density(BellOutcome::PhiMinus, &rho).unwrap();
        assert!(flipped.max_abs_diff(&one.outer()) < 1e-15);
    }

    #[test]
    fn pure_fidelity_examples() {
        let ch = noes_pure(0.0, 0.0).unwrap();
        for (t, p) in [(0.3, 0.0), (2.0, 1.0), (3.1, 5.0)] {
            let res = teleport_pure(&input_state(t, p), &ch).unwrap();
            assert!((res.fidelity - 1.0).abs() < 1e-14);
        }
        let r: f64 = 0.45;
        let res = teleport_pure(&input_state(PI / 2.0, 0.3), &noes_pure(r, 1.0).unwrap()).unwrap();
        assert!((res.fidelity - 1.0 / (1.0 + r * r)).abs() < 1e-12);

        // y^2 = 0.25 -> theta_b = pi/3
        let res =
            teleport_pure(&input_state(PI / 3.0, 0.0), &noes_pure(0.5, 0.0).unwrap()).unwrap();
        assert!((res.fidelity - 0.75).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_outcomes_absent() {
        // |0> through |10>: only the PSI outcomes occur
        let ch = nmes(1.0).unwrap();
        let res = teleport_pure(&input_state(0.0, 0.0), &ch).unwrap();
        let absent = res.outcomes.iter().filter(|o| o.output.is_none()).count();
        assert_eq!(absent, 2);
        for o in res.outcomes.iter().filter(|o| o.output.is_none()) {
            assert_eq!(o.probability, 0.0);
        }
        assert!((res.probability_sum() - 1.0).abs() < 1e-12);
        assert!((res.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_fidelity_examples() {
        let w0 = werner(0.0).unwrap();
        let w1 = werner(1.0).unwrap();
        for (t, p) in [(0.0, 0.0), (1.2, 0.5), (2.9, 4.0)] {
            let q = input_state(t, p);
            assert!((teleport_mixed(&q, &w0).unwrap().fidelity - 1.0).abs() < 1e-12);
            assert!((teleport_mixed(&q, &w1).unwrap().fidelity - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_and_pure_protocols_agree_on_pure_channels() {
        let ch = noes_pure(0.6, 0.8).unwrap();
        let q = input_state(1.3, 2.2);
        let a = teleport_pure(&q, &ch).unwrap();
        let b = teleport_mixed(&q, &ch).unwrap();
        assert!((a.fidelity - b.fidelity).abs() < 1e-12);
        for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
            assert!((x.probability - y.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_examples() {
        for r in [0.0, 0.3, 0.9] {
            assert!(
                (fidelity_noes_closed(r, 0.0) - crate::entanglement::concurrence_noes_closed(r))
                    .abs()
                    < 1e-15
            );
        }
        assert!(fidelity_noes_closed(0.44, 0.0) > CLASSICAL_FIDELITY);
        assert!(fidelity_noes_closed(0.7, 0.5) > CLASSICAL_FIDELITY);
        for y in [0.0, 0.3, 0.5, 1.0] {
            assert!((fidelity_nmes_closed(0.0, y) - 1.0).abs() < 1e-15);
        }
        assert!((fidelity_nmes_closed(1.0, 0.5) - 0.5).abs() < 1e-15);
        for s in [0.0, 0.4, 1.0] {
            assert_eq!(fidelity_nmes_closed(s, 0.0), 1.0);
        }
    }

    #[test]
    fn closed_averages() {
        let noes = |r| avg_fidelity_closed(&ChannelParams::Noes { r, theta: 0.0 }).unwrap();
        assert!((noes(1.0 / 3f64.sqrt()).value - 2.0 / 3.0).abs() < 1e-15);
        let w = avg_fidelity_closed(&ChannelParams::Werner { p: 2.0 / 3.0 }).unwrap();
        assert!((w.value - 2.0 / 3.0).abs() < 1e-15);
        let rn = avg_fidelity_closed(&ChannelParams::RhoNew { p: 0.0 }).unwrap();
        assert_eq!(rn.value, 7.0 / 9.0);
        assert!(!rn.at_classical_bound);
        let rn = avg_fidelity_closed(&ChannelParams::RhoNew { p: 0.5 }).unwrap();
        assert_eq!(rn.value, CLASSICAL_FIDELITY);
        assert!(rn.at_classical_bound);
        let bad = ChannelParams::NonorthMixed {
            r: 0.0,
            theta: 0.0,
            g: 0.2,
        };
        assert!(avg_fidelity_closed(&bad).is_err());
    }

    #[test]
    fn gauss_legendre_small_orders() {
        let (x, w) = gauss_legendre(2).unwrap();
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(5).unwrap();
        assert!(x[2].abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for x^8
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-15);
        assert!(gauss_legendre(1).is_err());
    }

    #[test]
    fn numeric_average_bounds() {
        let ch = noes_pure(0.0, 0.0).unwrap();
        let q = avg_fidelity_numeric(&ch, AveragingMethod::Quadrature { nodes: 8 }).unwrap();
        assert!((q.mean - 1.0).abs() < 1e-12);
        assert!(avg_fidelity_numeric(&ch, AveragingMethod::Quadrature { nodes: 1 }).is_err());
        assert!(avg_fidelity_numeric(
            &ch,
            AveragingMethod::MonteCarlo {
                samples: 999,
                seed: None
            }
        )
        .is_err());
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let ch = noes_pure(0.4, 0.0).unwrap();
        let m = AveragingMethod::MonteCarlo {
            samples: 20_000,
            seed: Some(7),
        };
        let a = avg_fidelity_numeric(&ch, m).unwrap();
        let b = avg_fidelity_numeric(&ch, m).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let se = a.std_error.unwrap();
        assert!((a.mean - avg_fidelity_noes_closed(0.4)).abs() < 4.0 * se);
    }

    #[test]
    fn horodecki_examples() {
        let f = avg_fidelity_horodecki(&rho_new(0.125).unwrap()).unwrap();
        assert!((f - 6.5 / 9.0).abs() < 1e-12);
        let f = avg_fidelity_horodecki(&nonorth_mixed_eps(0.0, 0.0, 0.2).unwrap()).unwrap();
        assert!((f - (2.0 / 3.0 + 0.1)).abs() < 1e-12);
        for p in [0.0, 0.25, 0.8] {
            let f = avg_fidelity_horodecki(&werner(p).unwrap()).unwrap();
            assert!((f - (2.0 - p) / 2.0).abs() < 1e-12);
        }
    }
}
