use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use qswitch::channels::{average_fidelity_numeric, make_channel, ChannelKind};
use qswitch::entanglement::{
    concurrence, iconcurrence, iconcurrence_closed, ppt_min_eigenvalue, ppt_spectrum,
    reduced_entropy, reduced_entropy_closed, schmidt_closed, schmidt_coefficients,
    switch_pair_state, switch_pair_state_evolved, von_neumann_entropy, LogBase, Side,
};
use qswitch::qmatrix::{hermitian_eigensystem, psd_sqrt};
use qswitch::qstate::{tensor, DensityMatrix};
use qswitch::qswitch::{evolve, switch_hamiltonian, switch_unitary};
use qswitch::sweep::{run_sweep, Axis, ChannelSpec, Measure, SweepConfig};
use qswitch::{ComplexMatrix, PureState, C64};

fn matrix(n: usize, parts: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| C64::new(parts[2 * (r * n + c)], parts[2 * (r * n + c) + 1]))
}

fn hermitian(n: usize, parts: &[f64]) -> ComplexMatrix {
    let m = matrix(n, parts);
    m.add(&m.adjoint()).unwrap().scale_real(0.5)
}

fn state(parts: &[f64]) -> PureState {
    let norm = parts.iter().map(|x| x * x).sum::<f64>().sqrt();
    PureState::new(parts.chunks(2).map(|p| C64::new(p[0], p[1]) / norm).collect()).unwrap()
}

fn density(n_qubits: usize, parts: &[f64]) -> DensityMatrix {
    let d = 1 << n_qubits;
    let g = matrix(d, parts);
    let m = g.matmul(&g.adjoint()).unwrap();
    let tr = m.trace().unwrap().re;
    let m = m.scale_real(1.0 / tr);
    DensityMatrix::new(m.add(&m.adjoint()).unwrap().scale_real(0.5)).unwrap()
}

/// Single-qubit unitary from Euler-style angles.
fn unitary(phase: f64, theta: f64, alpha: f64, beta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let e = |x: f64| C64::from_polar(1.0, x);
    ComplexMatrix::from_vec(
        2,
        2,
        vec![e(alpha) * c, e(beta) * s, -e(-beta) * s, e(-alpha) * c],
    )
    .unwrap()
    .scale(e(phase))
}

fn vec_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

fn nonzero_state(len: usize) -> impl Strategy<Value = Vec<f64>> {
    vec_strategy(len).prop_filter("non-negligible norm", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
}

proptest! {
    #[test]
    fn eigensystem_reconstructs((n, parts) in (2usize..=8).prop_flat_map(|n| (Just(n), vec_strategy(2 * n * n)))) {
        let m = hermitian(n, &parts);
        let es = hermitian_eigensystem(&m).unwrap();
        let rel = es.reconstruct().sub(&m).unwrap().frobenius_norm() / m.frobenius_norm().max(1e-300);
        prop_assert!(rel <= 1e-10, "relative error {rel}");
        prop_assert!(es.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = es.eigenvalues.iter().sum();
        prop_assert!((sum - m.trace().unwrap().re).abs() <= 1e-10);
    }

    #[test]
    fn psd_sqrt_squares_back((n, parts) in (2usize..=8).prop_flat_map(|n| (Just(n), vec_strategy(2 * n * n)))) {
        let a = matrix(n, &parts);
        let m = a.adjoint().matmul(&a).unwrap();
        let r = psd_sqrt(&m).unwrap();
        prop_assert!(r.matmul(&r).unwrap().max_abs_diff(&m).unwrap() <= 1e-9);
        prop_assert!(r.is_hermitian(1e-12));
    }

    #[test]
    fn kron_bilinear_and_associative(x in vec_strategy(8), y in vec_strategy(8), z in vec_strategy(8), k in -2.0f64..2.0) {
        let (a, b, c) = (matrix(2, &x), matrix(2, &y), matrix(2, &z));
        let left = a.add(&b).unwrap().kron(&c);
        let right = a.kron(&c).add(&b.kron(&c)).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-14);
        let scaled = a.scale_real(k).kron(&c);
        prop_assert!(scaled.max_abs_diff(&a.kron(&c.scale_real(k))).unwrap() <= 1e-14);
        let assoc = a.kron(&b).kron(&c).max_abs_diff(&a.kron(&b.kron(&c))).unwrap();
        prop_assert!(assoc <= 1e-14);
    }

    #[test]
    fn constructors_meet_invariants(parts in nonzero_state(16), rho_parts in vec_strategy(32)) {
        let psi = state(&parts);
        prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-10);
        let rho = psi.to_density();
        prop_assert!((rho.matrix().trace().unwrap().re - 1.0).abs() <= 1e-10);
        prop_assert!(rho.matrix().is_hermitian(1e-10));
        let mixed = density(2, &rho_parts);
        prop_assert!(mixed.matrix().is_psd(1e-10));
    }

    #[test]
    fn partial_trace_of_product(x in nonzero_state(4), y in nonzero_state(4)) {
        let (a, b) = (state(&x), state(&y));
        let joint = tensor(&[a.clone(), b]).unwrap().to_density();
        let reduced = joint.partial_trace(&[1]).unwrap();
        prop_assert!(reduced.matrix().max_abs_diff(a.to_density().matrix()).unwrap() <= 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(parts in vec_strategy(32), q in 0usize..2) {
        // Mixing with the identity keeps the partial transpose positive, so it
        // can be wrapped as a state and transposed again.
        let raw = density(2, &parts);
        let m = raw.matrix().add(&ComplexMatrix::identity(4)).unwrap().scale_real(0.2);
        let rho = DensityMatrix::new(m).unwrap();
        let once = DensityMatrix::new(rho.partial_transpose(q).unwrap()).unwrap();
        prop_assert_eq!(&once.partial_transpose(q).unwrap(), rho.matrix());
        let other = rho.partial_transpose(1 - q).unwrap().transpose();
        prop_assert_eq!(&rho.partial_transpose(q).unwrap(), &other);
    }

    #[test]
    fn projection_matches_partial_trace(parts in nonzero_state(8), bit in 0u8..2) {
        let pair = state(&parts);
        let control = PureState::basis(1, bit as usize).unwrap();
        let register = tensor(&[pair, control]).unwrap();
        let projected = register.project_control(2, bit).unwrap().to_density();
        let traced = register.to_density().partial_trace(&[2]).unwrap();
        prop_assert!(projected.matrix().max_abs_diff(traced.matrix()).unwrap() <= 1e-12);
    }

    #[test]
    fn switch_unitary_is_unitary(t in -10.0f64..10.0) {
        prop_assert!(switch_unitary(t).matrix.is_unitary(1e-12));
    }

    #[test]
    fn spectral_reconstruction_matches_closed_form(t in -10.0f64..10.0) {
        let es = hermitian_eigensystem(&switch_hamiltonian()).unwrap();
        let mut u = ComplexMatrix::zeros(8, 8);
        for k in 0..8 {
            let v = es.eigenvector(k);
            let projector = ComplexMatrix::outer(&v, &v);
            u = u.add(&projector.scale(C64::from_polar(1.0, -t * es.eigenvalues[k]))).unwrap();
        }
        prop_assert!(u.max_abs_diff(&switch_unitary(t).matrix).unwrap() <= 1e-12);
    }

    #[test]
    fn evolve_preserves_norm(parts in nonzero_state(16), t in -10.0f64..10.0) {
        let psi = state(&parts);
        prop_assert!((evolve(&psi, t).unwrap().norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(parts in vec_strategy(128), kind in 0usize..4, p in 0.0f64..=1.0, q in 0usize..3) {
        let rho = density(3, &parts);
        let ch = make_channel(ChannelKind::ALL[kind], p).unwrap().lift(q, 3).unwrap();
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.matrix().trace().unwrap().re - 1.0).abs() <= 1e-12);
        prop_assert!(hermitian_eigensystem(out.matrix()).unwrap().eigenvalues[0] >= -1e-10);
    }

    #[test]
    fn pure_state_measures_agree(parts in nonzero_state(8)) {
        let psi = state(&parts);
        let rho = psi.to_density();
        let c = concurrence(&rho).unwrap();
        let s = schmidt_coefficients(&psi).unwrap();
        prop_assert!((c - iconcurrence(&rho, Side::B).unwrap()).abs() <= 1e-9);
        prop_assert!((c - iconcurrence(&rho, Side::A).unwrap()).abs() <= 1e-9);
        prop_assert!((c - 2.0 * s.lambda0 * s.lambda1).abs() <= 1e-9);
    }

    #[test]
    fn concurrence_local_unitary_invariance(
        parts in vec_strategy(32),
        u in prop::array::uniform4(-PI..PI),
        v in prop::array::uniform4(-PI..PI),
    ) {
        let rho = density(2, &parts);
        let uv = unitary(u[0], u[1], u[2], u[3]).kron(&unitary(v[0], v[1], v[2], v[3]));
        let moved = rho.conjugate_by(&uv).unwrap();
        prop_assert!((concurrence(&rho).unwrap() - concurrence(&moved).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn entropy_unitary_invariance(parts in vec_strategy(32), u in prop::array::uniform4(-PI..PI), cnot_first in any::<bool>()) {
        let rho = density(2, &parts);
        let local = unitary(u[0], u[1], u[2], u[3]).kron(&unitary(u[3], u[2], u[1], u[0]));
        let w = if cnot_first {
            local.matmul(&qswitch::qswitch::gates::cnot()).unwrap()
        } else {
            local
        };
        let s0 = von_neumann_entropy(&rho, LogBase::E).unwrap();
        let s1 = von_neumann_entropy(&rho.conjugate_by(&w).unwrap(), LogBase::E).unwrap();
        prop_assert!((s0 - s1).abs() <= 1e-10);
    }

    #[test]
    fn family_closed_forms_hold_for_complex_phases(a in 0.0f64..FRAC_PI_2, t in 0.0f64..FRAC_PI_2, pa in -PI..PI, pb in -PI..PI) {
        let alpha0 = C64::from_polar(a.sin(), pa);
        let beta0 = C64::from_polar(a.cos(), pb);
        let built = switch_pair_state(alpha0, beta0, t).unwrap();
        let evolved = switch_pair_state_evolved(alpha0, beta0, t).unwrap();
        prop_assert!((built.inner(&evolved).unwrap().norm() - 1.0).abs() <= 1e-12);
        let rho = evolved.to_density();
        prop_assert!((iconcurrence(&rho, Side::B).unwrap() - iconcurrence_closed(alpha0, beta0, t)).abs() <= 1e-9);
        prop_assert!((schmidt_coefficients(&evolved).unwrap().lambda0 - schmidt_closed(beta0, t).lambda0).abs() <= 1e-10);
        let s = reduced_entropy(&rho, LogBase::Two).unwrap();
        prop_assert!((s - reduced_entropy_closed(alpha0, beta0, t, LogBase::Two)).abs() <= 1e-10);
        let min = ppt_spectrum(&rho).unwrap()[0];
        prop_assert!((min + beta0.norm_sqr() * t.sin() * t.cos()).abs() <= 1e-10);
    }
}

#[test]
fn double_swap_flips_sign_on_block() {
    let u = switch_unitary(FRAC_PI_2).matrix;
    let u2 = u.matmul(&u).unwrap();
    for k in 0..8 {
        let psi = PureState::basis(3, k).unwrap();
        let out = psi.apply(&u2).unwrap();
        let sign = if k == 3 || k == 5 { -1.0 } else { 1.0 };
        assert!((out.amplitudes()[k] - C64::new(sign, 0.0)).norm() <= 1e-15, "basis {k}");
    }
}

#[test]
fn family_partial_transpose_entries() {
    let alpha0 = C64::new(0.3, 0.4);
    let beta0 = C64::from_polar((1.0 - alpha0.norm_sqr()).sqrt(), 1.1);
    let t = 0.9f64;
    let (s, c) = t.sin_cos();
    let x0 = alpha0;
    let x1 = C64::new(0.0, -s) * beta0;
    let x2 = beta0 * c;
    let z = C64::new(0.0, 0.0);
    let rho = switch_pair_state(alpha0, beta0, t).unwrap().to_density();
    // Transposing the first qubit moves the coherences between |01> and |10>
    // onto the corners.
    let expected = ComplexMatrix::from_vec(
        4,
        4,
        vec![
            x0 * x0.conj(), x0 * x1.conj(), x2 * x0.conj(), x2 * x1.conj(),
            x1 * x0.conj(), x1 * x1.conj(), z, z,
            x0 * x2.conj(), z, x2 * x2.conj(), z,
            x1 * x2.conj(), z, z, z,
        ],
    )
    .unwrap();
    let first = rho.partial_transpose(0).unwrap();
    assert!(first.max_abs_diff(&expected).unwrap() <= 1e-15);
    let second = rho.partial_transpose(1).unwrap();
    assert_eq!(second, first.transpose());
    let spec_first = hermitian_eigensystem(&first).unwrap().eigenvalues;
    let spec_second = ppt_spectrum(&rho).unwrap();
    for (x, y) in spec_first.iter().zip(spec_second.iter()) {
        assert!((x - y).abs() <= 1e-14);
    }
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn detection_criteria_agree_on_grid() {
    for a in grid(50) {
        let (al, be) = (C64::new(a.sin(), 0.0), C64::new(a.cos(), 0.0));
        for t in grid(50) {
            let psi = switch_pair_state_evolved(al, be, t).unwrap();
            let rho = psi.to_density();
            let ppt = ppt_min_eigenvalue(&rho).unwrap() < -1e-9;
            let schmidt = schmidt_coefficients(&psi).unwrap().lambda0 > 1e-9;
            let conc = concurrence(&rho).unwrap() > 1e-9;
            assert!(ppt == schmidt && schmidt == conc, "a={a} t={t}: {ppt} {schmidt} {conc}");
        }
    }
}

#[test]
fn all_measures_vanish_at_endpoints() {
    for a in grid(50) {
        let (al, be) = (C64::new(a.sin(), 0.0), C64::new(a.cos(), 0.0));
        for t in [0.0, FRAC_PI_2] {
            let psi = switch_pair_state_evolved(al, be, t).unwrap();
            let rho = psi.to_density();
            assert!(concurrence(&rho).unwrap() <= 1e-9);
            assert!(iconcurrence(&rho, Side::B).unwrap() <= 1e-9);
            assert!(schmidt_coefficients(&psi).unwrap().lambda0 <= 1e-9);
            assert!(ppt_min_eigenvalue(&rho).unwrap() >= -1e-9);
            assert!(reduced_entropy(&rho, LogBase::E).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn average_fidelity_decreases_with_noise() {
    for kind in ChannelKind::ALL {
        for j in 0..20 {
            let t = FRAC_PI_2 * j as f64 / 19.0;
            let u = switch_unitary(t).matrix;
            let values: Vec<f64> = (0..20)
                .map(|i| {
                    let p = i as f64 / 19.0;
                    let ch = make_channel(kind, p).unwrap().lift(0, 3).unwrap();
                    average_fidelity_numeric(&u, &ch).unwrap()
                })
                .collect();
            // Noise grows with p for damping and shrinks with p for flips.
            let ok = values.windows(2).all(|w| match kind {
                ChannelKind::PhaseFlip | ChannelKind::BitFlip => w[1] >= w[0] - 1e-15,
                ChannelKind::AmplitudeDamping | ChannelKind::PhaseDamping => w[1] <= w[0] + 1e-15,
            });
            assert!(ok, "{kind} t={t}: {values:?}");
        }
    }
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let cfg = SweepConfig {
        a: Axis::new(0.0, FRAC_PI_2, 7).unwrap(),
        t: Axis::new(0.0, FRAC_PI_2, 13).unwrap(),
        channel: Some(ChannelSpec { kind: ChannelKind::AmplitudeDamping, p: 0.74, qubit: 0 }),
        compare: true,
        ..SweepConfig::new(Measure::Iconcurrence)
    };
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows, run_sweep(&cfg).unwrap());
    // Evaluating each point on its own gives the same rows in the same order.
    let mut single = Vec::new();
    for a in cfg.a.points() {
        for t in cfg.t.points() {
            let one = SweepConfig {
                a: Axis::single(a).unwrap(),
                t: Axis::new(t, t + 1.0, 2).unwrap(),
                ..cfg.clone()
            };
            single.push(run_sweep(&one).unwrap()[0]);
        }
    }
    assert_eq!(rows, single);
}
