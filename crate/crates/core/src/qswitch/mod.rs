//! The three-qubit switch: Hamiltonian, time evolution, gate circuit and
//! fidelity diagnostics.
//!
//! Register layout is `|A B C>` with the control `C` as qubit 2. The switch
//! exchanges `A` and `B` when `C = 1`; the only non-trivial dynamics is the
//! rotation between `|011>` (index 3) and `|101>` (index 5).

pub mod gates;

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::qmatrix::{hermitian_eigensystem, ComplexMatrix, C64};
use crate::qstate::PureState;

pub use gates::GateLibrary;

const SWAP_LO: usize = 0b011;
const SWAP_HI: usize = 0b101;

/// `H = |011><101| + |101><011|`.
pub fn switch_hamiltonian() -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(8, 8);
    h[(SWAP_LO, SWAP_HI)] = C64::new(1., 0.);
    h[(SWAP_HI, SWAP_LO)] = C64::new(1., 0.);
    h
}

/// `U(t) = exp(-i t H)` for the switch Hamiltonian.
#[derive(Clone, Debug)]
pub struct SwitchOperator {
    pub t: f64,
    pub matrix: ComplexMatrix,
}

/// Closed form of `exp(-i t H)`: identity outside the `{3, 5}` block, which
/// is `[[cos t, -i sin t], [-i sin t, cos t]]`.
pub fn switch_unitary(t: f64) -> SwitchOperator {
    let (s, c) = t.sin_cos();
    let mut m = ComplexMatrix::identity(8);
    m[(SWAP_LO, SWAP_LO)] = C64::new(c, 0.);
    m[(SWAP_HI, SWAP_HI)] = C64::new(c, 0.);
    m[(SWAP_LO, SWAP_HI)] = C64::new(0., -s);
    m[(SWAP_HI, SWAP_LO)] = C64::new(0., -s);
    SwitchOperator { t, matrix: m }
}

/// `V diag(exp(-i t lambda)) V^H` from the eigensystem of the Hamiltonian.
pub fn switch_unitary_oracle(t: f64) -> Result<ComplexMatrix> {
    let es = hermitian_eigensystem(&switch_hamiltonian())?;
    Ok(es.map_spectrum(|l| C64::from_polar(1.0, -t * l)))
}

/// The permutation `|011> <-> |101>`.
pub fn ideal_switch() -> ComplexMatrix {
    let perm = |i: usize| match i {
        SWAP_LO => SWAP_HI,
        SWAP_HI => SWAP_LO,
        other => other,
    };
    ComplexMatrix::from_fn(8, 8, |r, c| {
        if perm(c) == r {
            C64::new(1., 0.)
        } else {
            C64::new(0., 0.)
        }
    })
}

/// CNOT(B -> A), Toffoli(C, A -> B), CNOT(B -> A), applied in that order.
pub fn circuit_unitary() -> ComplexMatrix {
    let cnot_ba = gates::controlled_not(3, &[1], 0);
    let toffoli_cab = gates::controlled_not(3, &[2, 0], 1);
    cnot_ba
        .matmul(&toffoli_cab)
        .and_then(|m| m.matmul(&cnot_ba))
        .expect("8x8 products")
}

fn require_register(psi: &PureState) -> Result<()> {
    if psi.n_qubits() != 3 {
        return Err(Error::Arity {
            expected: 3,
            actual: psi.n_qubits(),
        });
    }
    Ok(())
}

/// `U(t) |psi>` for a three-qubit register.
pub fn evolve(psi: &PureState, t: f64) -> Result<PureState> {
    require_register(psi)?;
    psi.apply(&switch_unitary(t).matrix)
}

/// `|<phi|psi>|`, clamped into `[0, 1]` against rounding.
pub fn fidelity(phi: &PureState, psi: &PureState) -> Result<f64> {
    Ok(phi.inner(psi)?.norm().min(1.0))
}

/// Fidelity of the state at time `t` with the completed swap `U(pi/2)|psi0>`.
pub fn switch_fidelity(psi0: &PureState, t: f64) -> Result<f64> {
    let target = evolve(psi0, FRAC_PI_2)?;
    fidelity(&target, &evolve(psi0, t)?)
}

/// `alpha0^2 + sin(t) beta0^2` for `|A 0 1>` with real amplitudes.
pub fn switch_fidelity_closed_a01(alpha0: f64, beta0: f64, t: f64) -> f64 {
    alpha0 * alpha0 + t.sin() * beta0 * beta0
}

/// `sin(t) alpha0^2 + beta0^2` for `|A 1 1>` with real amplitudes.
pub fn switch_fidelity_closed_a11(alpha0: f64, beta0: f64, t: f64) -> f64 {
    t.sin() * alpha0 * alpha0 + beta0 * beta0
}
