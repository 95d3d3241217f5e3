//! Qubit registers as pure states and density matrices.
//!
//! Basis states are ordered `|0..0>, .., |1..1>` with qubit 0 the most
//! significant bit, so in the switch register `|A B C>` qubit 0 is `A` and
//! qubit 2 is the control `C`.

use crate::error::{Error, Result};
use crate::qmatrix::{hermitian_eigensystem, ComplexMatrix, C64};

/// Accepted deviation of `sum |amp|^2` from one at construction.
pub const NORM_TOL: f64 = 1e-10;

/// Hermiticity, trace and positivity tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Branches lighter than this cannot be projected onto.
pub const BRANCH_TOL: f64 = 1e-12;

/// Bit of `qubit` in basis index `index` of an `n`-qubit register.
pub(crate) fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

fn with_bit(index: usize, qubit: usize, n: usize, bit: usize) -> usize {
    let mask = 1 << (n - 1 - qubit);
    if bit == 1 {
        index | mask
    } else {
        index & !mask
    }
}

/// Scatters the bits of `value` (most significant first) onto `qubits`.
fn scatter(value: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
        let b = (value >> (k - 1 - pos)) & 1;
        acc | (b << (n - 1 - q))
    })
}

fn check_qubit(index: usize, n_qubits: usize) -> Result<()> {
    if index >= n_qubits {
        return Err(Error::QubitIndex { index, n_qubits });
    }
    Ok(())
}

/// Normalized amplitude vector over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Validates length and normalization, then renormalizes exactly.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Config(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Config("non-finite amplitude".into()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let k = 1.0 / norm_sqr.sqrt();
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|z| z * k).collect(),
        })
    }

    /// Wraps amplitudes produced by norm-preserving arithmetic.
    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if n_qubits == 0 || index >= dim {
            return Err(Error::Config(format!(
                "basis index {index} invalid for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self::from_raw(n_qubits, amps))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Arity {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `U |self>` for a unitary `U`; no renormalization.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.shape() != (self.dim(), self.dim()) {
            return Err(Error::Shape {
                op: "apply",
                left: u.shape(),
                right: (self.dim(), 1),
            });
        }
        Ok(Self::from_raw(self.n_qubits, u.matvec(&self.amplitudes)?))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_raw(
            self.n_qubits,
            ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        )
    }

    /// Projects `qubit` onto `|bit>` and renormalizes the remaining register.
    pub fn project_control(&self, qubit: usize, bit: u8) -> Result<Self> {
        let n = self.n_qubits;
        check_qubit(qubit, n)?;
        if bit > 1 {
            return Err(Error::Config(format!("bit must be 0 or 1, got {bit}")));
        }
        if n < 2 {
            return Err(Error::QubitSubset(
                "cannot project the only qubit of a register".into(),
            ));
        }
        let branch: Vec<C64> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| bit_of(*i, qubit, n) == bit as usize)
            .map(|(_, &z)| z)
            .collect();
        let probability: f64 = branch.iter().map(|z| z.norm_sqr()).sum();
        if probability <= BRANCH_TOL {
            return Err(Error::ZeroBranch { probability });
        }
        let k = 1.0 / probability.sqrt();
        Ok(Self::from_raw(
            n - 1,
            branch.into_iter().map(|z| z * k).collect(),
        ))
    }
}

/// `alpha|0> + beta|1>`.
pub fn make_qubit(alpha: C64, beta: C64) -> Result<PureState> {
    PureState::new(vec![alpha, beta])
}

/// `sin(a)|0> + cos(a)|1>`, the one-parameter family used for `|A>`.
pub fn qubit_from_angle(a: f64) -> PureState {
    PureState::from_raw(1, vec![C64::new(a.sin(), 0.0), C64::new(a.cos(), 0.0)])
}

/// Tensor product of registers, leftmost factor most significant.
pub fn tensor(states: &[PureState]) -> Result<PureState> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::Config("tensor product of an empty sequence".into()))?;
    let mut amps = first.amplitudes.clone();
    let mut n = first.n_qubits;
    for s in rest {
        amps = amps
            .iter()
            .flat_map(|&a| s.amplitudes.iter().map(move |&b| a * b))
            .collect();
        n += s.n_qubits;
    }
    Ok(PureState::from_raw(n, amps))
}

/// Hermitian, unit-trace, positive semidefinite operator on `n_qubits`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant at [`DENSITY_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 || !rows.is_power_of_two() {
            return Err(Error::Config(format!(
                "density matrix dimension {rows} is not a power of two >= 2"
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace()?.re;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::BadTrace { trace });
        }
        let min = hermitian_eigensystem(&matrix)?.eigenvalues[0];
        if min < -DENSITY_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            n_qubits: rows.trailing_zeros() as usize,
            matrix,
        })
    }

    /// Wraps the output of an invariant-preserving map.
    pub(crate) fn from_raw(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.shape(), (1 << n_qubits, 1 << n_qubits));
        Self { n_qubits, matrix }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // tr(rho rho) = sum |rho_ij|^2 for Hermitian rho.
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `U rho U^H`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        if m.shape() != self.matrix.shape() {
            return Err(Error::Shape {
                op: "conjugate_by",
                left: u.shape(),
                right: self.matrix.shape(),
            });
        }
        Ok(Self::from_raw(self.n_qubits, m))
    }

    /// Traces out the qubits in `discard`; the survivors keep their relative
    /// order.
    pub fn partial_trace(&self, discard: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        for &q in discard {
            check_qubit(q, n)?;
        }
        let mut traced: Vec<usize> = discard.to_vec();
        traced.sort_unstable();
        traced.dedup();
        if traced.is_empty() || traced.len() == n {
            return Err(Error::QubitSubset(format!(
                "discard set {discard:?} must be a non-empty proper subset of {n} qubits"
            )));
        }
        let kept: Vec<usize> = (0..n).filter(|q| !traced.contains(q)).collect();
        let kept_dim = 1 << kept.len();
        let traced_dim = 1 << traced.len();

        let out = ComplexMatrix::from_fn(kept_dim, kept_dim, |r, c| {
            let (r0, c0) = (scatter(r, &kept, n), scatter(c, &kept, n));
            (0..traced_dim)
                .map(|j| {
                    let off = scatter(j, &traced, n);
                    self.matrix[(r0 | off, c0 | off)]
                })
                .sum()
        });
        Ok(Self::from_raw(kept.len(), out))
    }

    /// Transposes the indices of `qubit` only. Defined here for two-qubit
    /// states.
    pub fn partial_transpose(&self, qubit: usize) -> Result<ComplexMatrix> {
        if self.n_qubits != 2 {
            return Err(Error::Arity {
                expected: 2,
                actual: self.n_qubits,
            });
        }
        check_qubit(qubit, 2)?;
        let n = self.n_qubits;
        let d = self.dim();
        Ok(ComplexMatrix::from_fn(d, d, |i, j| {
            let bi = bit_of(i, qubit, n);
            let bj = bit_of(j, qubit, n);
            self.matrix[(with_bit(i, qubit, n, bj), with_bit(j, qubit, n, bi))]
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn epr() -> PureState {
        PureState::new(vec![c(FRAC_1_SQRT_2, 0.), c(0., 0.), c(0., 0.), c(FRAC_1_SQRT_2, 0.)])
            .unwrap()
    }

    #[test]
    fn make_qubit_examples() {
        assert_eq!(make_qubit(c(1., 0.), c(0., 0.)).unwrap().amplitudes(), &[c(1., 0.), c(0., 0.)]);
        assert_eq!(make_qubit(c(0., 0.), c(1., 0.)).unwrap().amplitudes(), &[c(0., 0.), c(1., 0.)]);
        let plus = make_qubit(c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.)).unwrap();
        assert!((plus.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn make_qubit_rejects_unnormalized() {
        match make_qubit(c(1., 0.), c(1., 0.)) {
            Err(Error::NotNormalized { norm_sqr }) => assert_eq!(norm_sqr, 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn qubit_from_angle_examples() {
        let s = qubit_from_angle(0.0);
        assert_eq!(s.amplitudes(), &[c(0., 0.), c(1., 0.)]);
        let s = qubit_from_angle(FRAC_PI_2);
        assert!((s.amplitudes()[0] - c(1., 0.)).norm() < 1e-16);
        assert!(s.amplitudes()[1].norm() < 1e-16);
        let s = qubit_from_angle(FRAC_PI_4);
        for z in s.amplitudes() {
            assert!((z.re - 2f64.sqrt() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_examples() {
        let a = qubit_from_angle(0.3);
        let k0 = PureState::basis(1, 0).unwrap();
        let k1 = PureState::basis(1, 1).unwrap();
        let a01 = tensor(&[a.clone(), k0.clone(), k1]).unwrap();
        assert_eq!(a01.n_qubits(), 3);
        assert_eq!(a01.amplitudes()[1], a.amplitudes()[0]);
        assert_eq!(a01.amplitudes()[5], a.amplitudes()[1]);

        let zz = tensor(&[k0.clone(), k0]).unwrap();
        assert_eq!(zz.amplitudes(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);

        let plus = make_qubit(c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.)).unwrap();
        let pp = tensor(&[plus.clone(), plus]).unwrap();
        for z in pp.amplitudes() {
            assert!((z - c(0.5, 0.)).norm() < 1e-15);
        }
        assert!(tensor(&[]).is_err());
    }

    #[test]
    fn to_density_examples() {
        let rho = PureState::basis(1, 0).unwrap().to_density();
        assert_eq!(rho.matrix(), &ComplexMatrix::from_diag(&[c(1., 0.), c(0., 0.)]));

        let plus = make_qubit(c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.)).unwrap();
        for z in plus.to_density().matrix().as_slice() {
            assert!((z - c(0.5, 0.)).norm() < 1e-15);
        }

        let m = epr().to_density();
        let m = m.matrix();
        for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((m[(r, col)] - c(0.5, 0.)).norm() < 1e-15);
        }
        assert!(m[(1, 1)].norm() == 0.0);
    }

    #[test]
    fn density_is_idempotent_projector() {
        let psi = tensor(&[qubit_from_angle(0.7), qubit_from_angle(1.1)]).unwrap();
        let rho = psi.to_density();
        let sq = rho.matrix().matmul(rho.matrix()).unwrap();
        assert!(sq.max_abs_diff(rho.matrix()).unwrap() < 1e-12);
        assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
    }

    #[test]
    fn density_new_validates() {
        let not_unit = ComplexMatrix::identity(2);
        assert!(matches!(DensityMatrix::new(not_unit), Err(Error::BadTrace { .. })));
        let negative = ComplexMatrix::from_real(2, 2, &[1.5, 0., 0., -0.5]).unwrap();
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPsd { .. })));
        let skew = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(DensityMatrix::new(skew), Err(Error::NotHermitian { .. })));
        let odd = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        assert!(DensityMatrix::new(odd).is_err());
    }

    #[test]
    fn epr_reduces_to_maximally_mixed() {
        let rho = epr().to_density();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for q in 0..2 {
            let red = rho.partial_trace(&[q]).unwrap();
            assert!(red.matrix().max_abs_diff(&half).unwrap() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_sets() {
        let rho = epr().to_density();
        assert!(matches!(rho.partial_trace(&[]), Err(Error::QubitSubset(_))));
        assert!(matches!(rho.partial_trace(&[0, 1]), Err(Error::QubitSubset(_))));
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::QubitIndex { .. })));
    }

    #[test]
    fn partial_trace_of_product_middle_qubit() {
        let a = qubit_from_angle(0.2);
        let b = qubit_from_angle(0.9);
        let cq = qubit_from_angle(1.3);
        let rho = tensor(&[a.clone(), b, cq.clone()]).unwrap().to_density();
        let red = rho.partial_trace(&[1]).unwrap();
        let expected = tensor(&[a, cq]).unwrap().to_density();
        assert!(red.matrix().max_abs_diff(expected.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn partial_transpose_examples() {
        let diag = DensityMatrix::new(ComplexMatrix::from_diag(&[
            c(0.1, 0.),
            c(0.2, 0.),
            c(0.3, 0.),
            c(0.4, 0.),
        ]))
        .unwrap();
        for q in 0..2 {
            assert_eq!(&diag.partial_transpose(q).unwrap(), diag.matrix());
        }

        // EPR^T_B = SWAP / 2, whose spectrum is {-1, 1, 1, 1} / 2.
        let pt = epr().to_density().partial_transpose(1).unwrap();
        let es = hermitian_eigensystem(&pt).unwrap();
        assert!((es.eigenvalues[0] + 0.5).abs() < 1e-15);
        assert!(pt.is_hermitian(0.0));
        assert!((pt.trace().unwrap() - c(1., 0.)).norm() < 1e-15);

        let three = tensor(&[epr(), PureState::basis(1, 0).unwrap()]).unwrap().to_density();
        assert!(matches!(three.partial_transpose(0), Err(Error::Arity { .. })));
        assert!(matches!(epr().to_density().partial_transpose(2), Err(Error::QubitIndex { .. })));
    }

    #[test]
    fn project_control_product_state() {
        let a = qubit_from_angle(0.4);
        let b = qubit_from_angle(1.2);
        let abc = tensor(&[a.clone(), b.clone(), PureState::basis(1, 0).unwrap()]).unwrap();
        let proj = abc.project_control(2, 0).unwrap();
        let ab = tensor(&[a, b]).unwrap();
        for (x, y) in proj.amplitudes().iter().zip(ab.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
        assert!(matches!(abc.project_control(2, 1), Err(Error::ZeroBranch { .. })));
        assert!(matches!(abc.project_control(3, 1), Err(Error::QubitIndex { .. })));
    }

    #[test]
    fn inner_product_arity() {
        let a = PureState::basis(1, 0).unwrap();
        let b = PureState::basis(2, 0).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::Arity { .. })));
    }
}
