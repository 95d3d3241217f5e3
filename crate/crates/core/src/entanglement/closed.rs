//! Closed-form measures for the switch state family
//! `alpha0 |00> - i sin(t) beta0 |01> + cos(t) beta0 |10>`.
//!
//! The I-concurrence forms are square roots of quantities that vanish at the
//! separable points, so they are evaluated in double-double arithmetic: an
//! f64 rounding error of 1e-16 under the root would surface as 1e-8.

use crate::channels::ChannelKind;
use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::qmatrix::C64;

use super::{entropy_of_spectrum, LogBase, SchmidtPair};

/// Schmidt coefficients `sqrt(1 -+ sqrt(1 - |beta0|^4 sin^2 2t)) / sqrt 2`.
///
/// The smaller one uses `1 - sqrt(1 - x) = x / (1 + sqrt(1 - x))`, which is
/// the same value without the cancellation.
pub fn schmidt_closed(beta0: C64, t: f64) -> SchmidtPair {
    let x = (beta0.norm_sqr().powi(2) * (2.0 * t).sin().powi(2)).min(1.0);
    let root = (1.0 - x).sqrt();
    SchmidtPair {
        lambda0: (x / (1.0 + root)).sqrt() / std::f64::consts::SQRT_2,
        lambda1: (1.0 + root).sqrt() / std::f64::consts::SQRT_2,
    }
}

/// Spectrum of the partial transpose in the order
/// `[-b s c, +b s c, (1 - r)/2, (1 + r)/2]` with `b = |beta0|^2` and
/// `r = sqrt(|alpha0|^4 + 2|alpha0 beta0|^2 + |beta0|^4 cos^2 2t)`.
///
/// The first two are evaluated as products of principal complex square
/// roots, `-beta0 sqrt(beta0* cos t) sqrt(sin t cos t) sqrt(beta0* sin t)`,
/// and the real part is returned. For `t` in `[0, pi/2]` this equals
/// `-|beta0|^2 sin t cos t` for any complex `beta0`.
pub fn ppt_closed(alpha0: C64, beta0: C64, t: f64) -> [f64; 4] {
    let (s, c) = t.sin_cos();
    let b = beta0.conj();
    let chain = (b * c).sqrt() * C64::new(s * c, 0.0).sqrt() * (b * s).sqrt();
    let l0 = -beta0 * chain;
    let l1 = beta0 * chain;
    let (a2, b2) = (alpha0.norm_sqr(), beta0.norm_sqr());
    let r = (a2 * a2 + 2.0 * a2 * b2 + b2 * b2 * (2.0 * t).cos().powi(2)).sqrt();
    [l0.re, l1.re, 0.5 * (1.0 - r), 0.5 * (1.0 + r)]
}

/// `|beta0^2 sin 2t|`.
pub fn concurrence_closed(beta0: C64, t: f64) -> f64 {
    (beta0 * beta0 * (2.0 * t).sin()).norm()
}

/// Eigenvalues of the reduced state of `A`, ascending:
/// `(1 -+ sqrt(2|alpha0 beta0|^2 + |alpha0|^4 + |beta0|^4 cos^2 2t)) / 2`.
pub fn reduced_spectrum_closed(alpha0: C64, beta0: C64, t: f64) -> (f64, f64) {
    let (a2, b2) = (alpha0.norm_sqr(), beta0.norm_sqr());
    let r = (2.0 * a2 * b2 + a2 * a2 + b2 * b2 * (2.0 * t).cos().powi(2)).sqrt();
    (0.5 * (1.0 - r), 0.5 * (1.0 + r))
}

pub fn reduced_entropy_closed(alpha0: C64, beta0: C64, t: f64, base: LogBase) -> f64 {
    let (l0, l1) = reduced_spectrum_closed(alpha0, beta0, t);
    entropy_of_spectrum(&[l0, l1], base)
}

/// The amplitudes `(alpha0, sin(t) beta0, cos(t) beta0)` rescaled in
/// double-double so that their squared moduli sum to one.
struct Triple {
    a: DdComplex,
    c: DdComplex,
    a2: Dd,
    s2: Dd,
    c2: Dd,
}

impl Triple {
    fn new(alpha0: C64, beta0: C64, t: f64) -> Triple {
        let (s, c) = t.sin_cos();
        let dd = |z: C64| DdComplex::new(z.re, z.im);
        let (a, sb, cb) = (dd(alpha0), dd(beta0 * s), dd(beta0 * c));
        let norm = a.norm_sqr() + sb.norm_sqr() + cb.norm_sqr();
        let inv = Dd::ONE / norm;
        let inv_root = Dd::ONE / norm.sqrt();
        Triple {
            a: a.scale(inv_root),
            c: cb.scale(inv_root),
            a2: a.norm_sqr() * inv,
            s2: sb.norm_sqr() * inv,
            c2: cb.norm_sqr() * inv,
        }
    }
}

/// Clean I-concurrence,
/// `sqrt 2 sqrt(1 - (|alpha0|^2 + |sin t beta0|^2)^2 - 2|cos t alpha0 beta0|^2 - |cos t beta0|^4)`.
pub fn iconcurrence_closed(alpha0: C64, beta0: C64, t: f64) -> f64 {
    let q = Triple::new(alpha0, beta0, t);
    let arg = Dd::ONE - (q.a2 + q.s2).sqr() - q.a2 * q.c2 * 2.0 - q.c2.sqr();
    (arg * 2.0).max0().sqrt().to_f64()
}

/// I-concurrence of the `A` marginal when `kind` acts on qubit `A` of the
/// switch pair at time `t`.
pub fn iconcurrence_noisy_closed(
    kind: ChannelKind,
    p: f64,
    t: f64,
    alpha0: C64,
    beta0: C64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Probability(p));
    }
    let q = Triple::new(alpha0, beta0, t);
    let two = Dd::from(2.0);
    let four = Dd::from(4.0);
    let pd = Dd::from(p);
    let pm1 = Dd::from(p) - Dd::ONE;
    let upper = q.a2 + q.s2;
    let arg = match kind {
        ChannelKind::PhaseFlip => {
            let f = Dd::ONE - pd * 2.0;
            two - four * f.sqr() * q.a2 * q.c2 - two * upper.sqr() - two * q.c2.sqr()
        }
        ChannelKind::BitFlip => {
            let first = pd * q.c2 - pm1 * upper;
            let second = pm1 * q.c2 - pd * upper;
            let pc = DdComplex { re: pd, im: Dd::ZERO };
            let pm1c = DdComplex { re: pm1, im: Dd::ZERO };
            let f1 = pc * q.a * q.c.conj() - pm1c * q.a.conj() * q.c;
            let f2 = pc * q.a.conj() * q.c - pm1c * q.a * q.c.conj();
            two - two * first.sqr() - two * second.sqr() - four * (f1 * f2).re
        }
        ChannelKind::AmplitudeDamping => {
            two + four * pm1 * q.a2 * q.c2
                - two * (q.a2 + pd * q.c2 + q.s2).sqr()
                - two * pm1.sqr() * q.c2.sqr()
        }
        ChannelKind::PhaseDamping => {
            two + four * pm1 * q.a2 * q.c2 - two * upper.sqr() - two * q.c2.sqr()
        }
    };
    Ok(arg.max0().sqrt().to_f64())
}
