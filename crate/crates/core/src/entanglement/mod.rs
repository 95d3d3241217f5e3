//! Entanglement and entropy diagnostics for two-qubit states, with closed
//! forms for the switch state family in [`closed`].
//!
//! The switch family is `|A01>` evolved for time `t` with the control
//! discarded after projecting it onto `|1>`:
//! `alpha0 |00> - i sin(t) beta0 |01> + cos(t) beta0 |10>`.

pub mod closed;

use std::fmt;
use std::str::FromStr;

use crate::channels::{make_channel, ChannelKind};
use crate::error::{Error, Result};
use crate::qmatrix::{hermitian_eigensystem, psd_sqrt, rank_tolerance, singular_values, ComplexMatrix, C64};
use crate::qstate::{make_qubit, tensor, DensityMatrix, PureState};
use crate::qswitch;

pub use closed::{
    concurrence_closed, iconcurrence_closed, iconcurrence_noisy_closed, ppt_closed,
    reduced_entropy_closed, reduced_spectrum_closed, schmidt_closed,
};

/// Purity deviation beyond which a joint state is treated as mixed.
pub const PURITY_TOL: f64 = 1e-10;

/// Schmidt coefficients in ascending order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchmidtPair {
    pub lambda0: f64,
    pub lambda1: f64,
}

impl SchmidtPair {
    pub fn is_entangled(&self, tol: f64) -> bool {
        self.lambda0 > tol
    }
}

/// Every measure for one pure two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureReport {
    pub concurrence: f64,
    pub iconcurrence: f64,
    pub entropy: f64,
    pub ppt_min_eig: f64,
    pub schmidt: SchmidtPair,
}

/// Which half of a two-qubit system is traced out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn qubit(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    E,
    Two,
}

impl LogBase {
    pub fn unit(self) -> &'static str {
        match self {
            LogBase::E => "nats",
            LogBase::Two => "bits",
        }
    }

    fn ln_scale(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "ln" | "nats" => Ok(LogBase::E),
            "2" | "bits" => Ok(LogBase::Two),
            _ => Err(Error::Config(format!("unknown log base '{s}' (expected e or 2)"))),
        }
    }
}

fn require_two_qubits(n: usize) -> Result<()> {
    if n != 2 {
        return Err(Error::Arity {
            expected: 2,
            actual: n,
        });
    }
    Ok(())
}

/// The switch state family built directly from its amplitudes.
pub fn switch_pair_state(alpha0: C64, beta0: C64, t: f64) -> Result<PureState> {
    let (s, c) = t.sin_cos();
    let v = vec![alpha0, C64::new(0.0, -s) * beta0, beta0 * c, C64::new(0.0, 0.0)];
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > crate::qstate::NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    PureState::new(v)
}

/// The same family obtained by simulation: evolve `|A 0 1>` with the switch
/// unitary, then project the control onto `|1>` and drop it.
pub fn switch_pair_state_evolved(alpha0: C64, beta0: C64, t: f64) -> Result<PureState> {
    let register = tensor(&[
        make_qubit(alpha0, beta0)?,
        PureState::basis(1, 0)?,
        PureState::basis(1, 1)?,
    ])?;
    qswitch::evolve(&register, t)?.project_control(2, 1)
}

/// The evolved switch pair with a single-qubit channel on `noise_qubit`
/// (0 for `A`, 1 for `B`) applied to the instantaneous state.
pub fn noisy_switch_pair(
    kind: ChannelKind,
    p: f64,
    noise_qubit: usize,
    alpha0: C64,
    beta0: C64,
    t: f64,
) -> Result<DensityMatrix> {
    let channel = make_channel(kind, p)?.lift(noise_qubit, 2)?;
    channel.apply(&switch_pair_state_evolved(alpha0, beta0, t)?.to_density())
}

/// Schmidt coefficients from the singular values of the 2x2 coefficient
/// matrix `psi[a][b]`.
pub fn schmidt_coefficients(psi: &PureState) -> Result<SchmidtPair> {
    require_two_qubits(psi.n_qubits())?;
    let m = ComplexMatrix::from_vec(2, 2, psi.amplitudes().to_vec())?;
    let sv = singular_values(&m)?;
    Ok(SchmidtPair {
        lambda0: sv[1],
        lambda1: sv[0],
    })
}

/// Eigenvalues of the transpose on the second qubit, ascending.
pub fn ppt_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    require_two_qubits(rho.n_qubits())?;
    Ok(hermitian_eigensystem(&rho.partial_transpose(1)?)?.eigenvalues)
}

pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    Ok(ppt_spectrum(rho)?[0])
}

fn spin_flip() -> ComplexMatrix {
    let y = qswitch::gates::pauli_y();
    y.kron(&y)
}

/// `(sigma_y x sigma_y) rho* (sigma_y x sigma_y)`.
pub fn spin_flipped(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_two_qubits(rho.n_qubits())?;
    let yy = spin_flip();
    yy.matmul(&rho.matrix().conj())?.matmul(&yy)
}

/// `sqrt(sqrt(rho) rho~ sqrt(rho))`, whose eigenvalues enter the concurrence.
pub fn wootters_r(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let s = psd_sqrt(rho.matrix())?;
    let inner = s.matmul(&spin_flipped(rho)?)?.matmul(&s)?;
    let inner = inner.add(&inner.adjoint())?.scale_real(0.5);
    psd_sqrt(&inner)
}

fn wootters_combination(mut lambdas: Vec<f64>) -> f64 {
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1..].iter().sum::<f64>()).clamp(0.0, 1.0)
}

/// Concurrence `max(0, l1 - l2 - l3 - l4)` with the `l` the eigenvalues of
/// [`wootters_r`] in descending order.
///
/// The eigenvalues are computed as singular values of
/// `sqrt(rho) sqrt(rho~)`, using `sqrt(rho~) = Y conj(sqrt(rho)) Y`. This
/// avoids the second square root and keeps absolute accuracy near zero.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho.n_qubits())?;
    let s = psd_sqrt(rho.matrix())?;
    let yy = spin_flip();
    let s_flip = yy.matmul(&s.conj())?.matmul(&yy)?;
    Ok(wootters_combination(singular_values(&s.matmul(&s_flip)?)?))
}

/// Concurrence taken literally from the eigenvalues of [`wootters_r`].
pub fn concurrence_from_r(rho: &DensityMatrix) -> Result<f64> {
    Ok(wootters_combination(
        hermitian_eigensystem(&wootters_r(rho)?)?.eigenvalues,
    ))
}

/// `sqrt(2 (1 - tr rho_r^2))` for the reduced state `rho_r` left after
/// tracing out `traced`.
///
/// For a 2x2 reduced state this is `2 sqrt(det rho_r) / tr rho_r`. The
/// reduced state is factored as `F F^H` from the eigenvectors of `rho`, and
/// the determinant is summed from the 2x2 minors of `F`, so no cancellation
/// happens near zero.
pub fn iconcurrence(rho: &DensityMatrix, traced: Side) -> Result<f64> {
    require_two_qubits(rho.n_qubits())?;
    let es = hermitian_eigensystem(rho.matrix())?;
    let scale = es.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let cut = rank_tolerance(scale);
    // Columns of the factor F of the kept qubit's reduced state.
    let mut cols: Vec<[C64; 2]> = Vec::new();
    for (k, &mu) in es.eigenvalues.iter().enumerate() {
        if mu <= cut {
            continue;
        }
        let v = es.eigenvector(k);
        let w = mu.sqrt();
        for j in 0..2 {
            cols.push(match traced {
                Side::B => [v[j] * w, v[2 + j] * w],
                Side::A => [v[2 * j] * w, v[2 * j + 1] * w],
            });
        }
    }
    let trace: f64 = cols.iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).sum();
    if trace == 0.0 {
        return Ok(0.0);
    }
    let mut det = 0.0;
    for i in 0..cols.len() {
        for j in (i + 1)..cols.len() {
            det += (cols[i][0] * cols[j][1] - cols[j][0] * cols[i][1]).norm_sqr();
        }
    }
    Ok((2.0 * det.sqrt() / trace).min(1.0))
}

/// `sqrt(2 (1 - purity))` evaluated directly; loses about half the digits
/// near zero and is kept as a cross-check of [`iconcurrence`].
pub fn iconcurrence_from_purity(rho: &DensityMatrix, traced: Side) -> Result<f64> {
    require_two_qubits(rho.n_qubits())?;
    let reduced = rho.partial_trace(&[traced.qubit()])?;
    Ok((2.0 * (1.0 - reduced.purity())).max(0.0).sqrt())
}

/// `-sum l log l` over the eigenvalues of `rho`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    let es = hermitian_eigensystem(rho.matrix())?;
    Ok(entropy_of_spectrum(&es.eigenvalues, base))
}

pub(crate) fn entropy_of_spectrum(spectrum: &[f64], base: LogBase) -> f64 {
    let s: f64 = spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    (s / base.ln_scale()).max(0.0)
}

/// Entropy of the qubit `A` reduced state.
pub fn reduced_entropy(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    require_two_qubits(rho.n_qubits())?;
    von_neumann_entropy(&rho.partial_trace(&[1])?, base)
}

/// `(S(rho_A), S(rho_B))` for a pure joint state, which must agree.
pub fn entropy_symmetry_check(rho: &DensityMatrix, base: LogBase) -> Result<(f64, f64)> {
    require_two_qubits(rho.n_qubits())?;
    let purity = rho.purity();
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(Error::NotPure { purity });
    }
    let a = von_neumann_entropy(&rho.partial_trace(&[1])?, base)?;
    let b = von_neumann_entropy(&rho.partial_trace(&[0])?, base)?;
    Ok((a, b))
}

/// All numeric measures for a pure two-qubit state.
pub fn measure_report(psi: &PureState, base: LogBase) -> Result<MeasureReport> {
    let rho = psi.to_density();
    Ok(MeasureReport {
        concurrence: concurrence(&rho)?,
        iconcurrence: iconcurrence(&rho, Side::B)?,
        entropy: reduced_entropy(&rho, base)?,
        ppt_min_eig: ppt_min_eigenvalue(&rho)?,
        schmidt: schmidt_coefficients(psi)?,
    })
}
