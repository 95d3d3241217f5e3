//! Fixed single- and multi-qubit gates, with the same basis ordering as
//! [`crate::qstate`].

use crate::qmatrix::{ComplexMatrix, C64};
use crate::qstate::bit_of;

fn real2(entries: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &entries).expect("2x2 literal")
}

pub fn identity() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    real2([0., 1., 1., 0.])
}

/// `[[0, i], [-i, 0]]`: the sign convention with `+i` in the top row. It only
/// enters through `sigma_y (x) sigma_y`, where the overall sign cancels.
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            C64::new(0., 0.),
            C64::new(0., 1.),
            C64::new(0., -1.),
            C64::new(0., 0.),
        ],
    )
    .expect("2x2 literal")
}

pub fn pauli_z() -> ComplexMatrix {
    real2([1., 0., 0., -1.])
}

/// Permutation matrix of a multi-controlled NOT on an `n`-qubit register:
/// `target` flips iff every qubit in `controls` is 1.
pub fn controlled_not(n: usize, controls: &[usize], target: usize) -> ComplexMatrix {
    assert!(target < n && controls.iter().all(|&c| c < n && c != target));
    let dim = 1 << n;
    let image = |i: usize| {
        if controls.iter().all(|&c| bit_of(i, c, n) == 1) {
            i ^ (1 << (n - 1 - target))
        } else {
            i
        }
    };
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        if image(c) == r {
            C64::new(1., 0.)
        } else {
            C64::new(0., 0.)
        }
    })
}

/// Control on the first qubit, target on the second.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            1., 0., 0., 0., //
            0., 1., 0., 0., //
            0., 0., 0., 1., //
            0., 0., 1., 0.,
        ],
    )
    .expect("4x4 literal")
}

/// Controls on the first two qubits, target on the third: `diag(I, I, I, X)`.
pub fn toffoli() -> ComplexMatrix {
    let x = pauli_x();
    ComplexMatrix::from_fn(8, 8, |r, c| match (r / 2, c / 2) {
        (3, 3) => x[(r % 2, c % 2)],
        (br, bc) if br == bc && r == c => C64::new(1., 0.),
        _ => C64::new(0., 0.),
    })
}

/// The gate constants in one place.
#[derive(Clone, Debug)]
pub struct GateLibrary {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
    pub i: ComplexMatrix,
    pub cnot: ComplexMatrix,
    pub toffoli: ComplexMatrix,
}

impl GateLibrary {
    pub fn standard() -> Self {
        Self {
            x: pauli_x(),
            y: pauli_y(),
            z: pauli_z(),
            i: identity(),
            cnot: cnot(),
            toffoli: toffoli(),
        }
    }

    pub fn all(&self) -> [(&'static str, &ComplexMatrix); 6] {
        [
            ("X", &self.x),
            ("Y", &self.y),
            ("Z", &self.z),
            ("I", &self.i),
            ("CNOT", &self.cnot),
            ("Toffoli", &self.toffoli),
        ]
    }
}
