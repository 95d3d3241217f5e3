//! Single-qubit Kraus channels, their embedding in larger registers, and
//! average gate fidelity of a noisy implementation against a target unitary.
//!
//! The probability parameter follows two conventions. Phase flip and bit flip
//! keep the identity with weight `p`, so they are noiseless at `p = 1`.
//! Amplitude and phase damping are noiseless at `p = 0`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qmatrix::{ComplexMatrix, C64};
use crate::qstate::DensityMatrix;
use crate::qswitch::gates;

/// Tolerance on `sum_k E_k^H E_k = I`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Haar samples drawn per deterministic random stream.
const MC_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    PhaseFlip,
    BitFlip,
    AmplitudeDamping,
    PhaseDamping,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::PhaseFlip,
        ChannelKind::BitFlip,
        ChannelKind::AmplitudeDamping,
        ChannelKind::PhaseDamping,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ChannelKind::PhaseFlip => "pf",
            ChannelKind::BitFlip => "bf",
            ChannelKind::AmplitudeDamping => "ad",
            ChannelKind::PhaseDamping => "pd",
        }
    }

    /// The value of `p` at which the channel acts as the identity.
    pub fn noiseless_p(self) -> f64 {
        match self {
            ChannelKind::PhaseFlip | ChannelKind::BitFlip => 1.0,
            ChannelKind::AmplitudeDamping | ChannelKind::PhaseDamping => 0.0,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "pf" | "phaseflip" => Ok(ChannelKind::PhaseFlip),
            "bf" | "bitflip" => Ok(ChannelKind::BitFlip),
            "ad" | "amplitudedamping" => Ok(ChannelKind::AmplitudeDamping),
            "pd" | "phasedamping" => Ok(ChannelKind::PhaseDamping),
            _ => Err(Error::Config(format!(
                "unknown channel '{s}' (expected pf, bf, ad or pd)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KrausChannel {
    kind: ChannelKind,
    p: f64,
    operators: Vec<ComplexMatrix>,
    dim: usize,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The two 2x2 Kraus operators of `kind` at probability `p`.
pub fn make_channel(kind: ChannelKind, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Probability(p));
    }
    let keep = p.sqrt();
    let flip = (1.0 - p).sqrt();
    let operators = match kind {
        ChannelKind::PhaseFlip => vec![
            gates::identity().scale_real(keep),
            gates::pauli_z().scale_real(flip),
        ],
        ChannelKind::BitFlip => vec![
            gates::identity().scale_real(keep),
            gates::pauli_x().scale_real(flip),
        ],
        ChannelKind::AmplitudeDamping => vec![
            ComplexMatrix::from_diag(&[real(1.0), real(flip)]),
            ComplexMatrix::from_fn(2, 2, |r, c| if (r, c) == (0, 1) { real(keep) } else { real(0.0) }),
        ],
        ChannelKind::PhaseDamping => vec![
            ComplexMatrix::from_diag(&[real(1.0), real(flip)]),
            ComplexMatrix::from_diag(&[real(0.0), real(keep)]),
        ],
    };
    Ok(KrausChannel {
        kind,
        p,
        operators,
        dim: 2,
    })
}

impl KrausChannel {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Embeds a single-qubit channel at `qubit` of an `n_qubits` register.
    pub fn lift(&self, qubit: usize, n_qubits: usize) -> Result<KrausChannel> {
        if self.dim != 2 {
            return Err(Error::Shape {
                op: "lift",
                left: (self.dim, self.dim),
                right: (2, 2),
            });
        }
        if qubit >= n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits,
            });
        }
        let before = ComplexMatrix::identity(1 << qubit);
        let after = ComplexMatrix::identity(1 << (n_qubits - 1 - qubit));
        let operators = self
            .operators
            .iter()
            .map(|e| before.kron(e).kron(&after))
            .collect();
        Ok(KrausChannel {
            kind: self.kind,
            p: self.p,
            operators,
            dim: 1 << n_qubits,
        })
    }

    /// `max |sum_k E_k^H E_k - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.operators {
            sum = sum.add(&e.adjoint().matmul(e).expect("square")).expect("same shape");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
            .expect("same shape")
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness_deviation() <= COMPLETENESS_TOL
    }

    /// `sum_k E_k rho E_k^H`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::Shape {
                op: "channel apply",
                left: (self.dim, self.dim),
                right: (rho.dim(), rho.dim()),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.operators {
            let term = e.matmul(rho.matrix())?.matmul(&e.adjoint())?;
            out = out.add(&term)?;
        }
        Ok(DensityMatrix::from_raw(rho.n_qubits(), out))
    }
}

fn check_target(target: &ComplexMatrix, channel: &KrausChannel) -> Result<()> {
    if target.shape() != (channel.dim(), channel.dim()) {
        return Err(Error::Shape {
            op: "average fidelity",
            left: target.shape(),
            right: (channel.dim(), channel.dim()),
        });
    }
    Ok(())
}

/// Average fidelity of `channel` against `target` over Haar-random pure
/// inputs, via `(tr sum M^H M + sum |tr M|^2) / (n (n + 1))` with
/// `M_k = target^H E_k`.
pub fn average_fidelity_numeric(target: &ComplexMatrix, channel: &KrausChannel) -> Result<f64> {
    check_target(target, channel)?;
    let n = channel.dim() as f64;
    let target_h = target.adjoint();
    let mut gram_trace = 0.0;
    let mut overlap = 0.0;
    for e in channel.operators() {
        let m = target_h.matmul(e)?;
        gram_trace += m.adjoint().matmul(&m)?.trace()?.re;
        overlap += m.trace()?.norm_sqr();
    }
    Ok((gram_trace + overlap) / (n * (n + 1.0)))
}

/// Closed-form average fidelity of the switch `U(t)` with the channel on the
/// first qubit of the three-qubit register.
pub fn average_fidelity_closed(kind: ChannelKind, p: f64, t: f64) -> f64 {
    let k = t.cos() + 3.0;
    match kind {
        ChannelKind::PhaseFlip | ChannelKind::BitFlip => (p * k * k + 2.0) / 18.0,
        ChannelKind::AmplitudeDamping => {
            let a = ((1.0 - p).sqrt() + 1.0) * k;
            (a.abs().powi(2) + 8.0) / 72.0
        }
        ChannelKind::PhaseDamping => {
            let a = ((1.0 - p).sqrt() + 1.0) * k;
            (a.abs().powi(2) + (p * k * k).abs() + 8.0) / 72.0
        }
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Haar-random pure state of dimension `dim` from normalized complex
/// Gaussian amplitudes.
pub fn haar_state<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Monte Carlo estimate of the average fidelity by sampling
/// `<psi|U^H E(|psi><psi|) U|psi>` over Haar-random `psi`.
///
/// Samples are drawn in fixed-size chunks, each from its own ChaCha stream,
/// and reduced in chunk order, so the result depends only on `seed` and
/// `samples` regardless of thread count.
pub fn average_fidelity_monte_carlo(
    target: &ComplexMatrix,
    channel: &KrausChannel,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_target(target, channel)?;
    if samples < 2 {
        return Err(Error::Config("Monte Carlo needs at least 2 samples".into()));
    }
    let dim = channel.dim();
    let n_chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let psi = haar_state(dim, &mut rng);
                let ideal = target.matvec(&psi).expect("checked shape");
                let f: f64 = channel
                    .operators()
                    .iter()
                    .map(|e| inner(&ideal, &e.matvec(&psi).expect("checked shape")).norm_sqr())
                    .sum();
                sum += f;
                sum_sq += f * f;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        std_err: (var / n).sqrt(),
        samples,
    })
}
