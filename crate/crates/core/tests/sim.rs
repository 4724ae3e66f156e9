use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use pqc_core::sim::dense::{circuit_matrix, distance_up_to_phase, gate_matrix};
use pqc_core::sim::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_op(rng: &mut ChaCha8Rng) -> Op {
    let a = Angle::Fixed(rng.gen_range(-3.0..3.0));
    match rng.gen_range(0..6) {
        0 => Op::H,
        1 => Op::X,
        2 => Op::Z,
        3 => Op::Rx(a),
        4 => Op::Ry(a),
        _ => Op::Rz(a),
    }
}

fn random_circuit(width: usize, len: usize, max_controls: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(width, "random");
    for _ in 0..len {
        let mut qs: Vec<usize> = (0..width).collect();
        for i in (1..qs.len()).rev() {
            qs.swap(i, rng.gen_range(0..=i));
        }
        let k = rng.gen_range(0..=max_controls.min(width - 1));
        let g = Gate::controlled(random_op(&mut rng), qs[1..=k].to_vec(), qs[0]);
        c.push(g).unwrap();
    }
    c
}

fn dense_apply(m: &DMatrix<C64>, s: &Statevector) -> Vec<C64> {
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    (m * v).iter().copied().collect()
}

#[test]
fn bell_state() {
    let mut c = Circuit::new(2, "bell");
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    let s = run(&c, &Statevector::zero(2).unwrap()).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a = s.amplitudes();
    assert!((a[0].re - r).abs() < 1e-14 && (a[3].re - r).abs() < 1e-14);
    assert!(a[1].norm() < 1e-14 && a[2].norm() < 1e-14);
}

#[test]
fn statevector_matches_dense_oracle() {
    for seed in 0..8 {
        let c = random_circuit(5, 40, 3, seed);
        let m = circuit_matrix(&c, None).unwrap();
        let init = Statevector::basis(5, (seed as usize * 7) % 32).unwrap();
        let s = run(&c, &init).unwrap();
        let d = dense_apply(&m, &init);
        let err = s
            .amplitudes()
            .iter()
            .zip(&d)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "seed {seed}: {err}");
    }
}

#[test]
fn hadamard_test_reads_block_value() {
    for seed in 0..6 {
        let u = random_circuit(3, 15, 2, 100 + seed);
        let mut prep = Circuit::new(3, "prep");
        prep.h(0).unwrap();
        prep.x(2).unwrap();
        let m = circuit_matrix(&u, None).unwrap();
        let psi = run(&prep, &Statevector::zero(3).unwrap()).unwrap();
        let upsi = dense_apply(&m, &psi);
        let block: C64 = psi.amplitudes().iter().zip(&upsi).map(|(a, b)| a.conj() * b).sum();
        let re = hadamard_test(&u, &prep, Part::Real).unwrap();
        let im = hadamard_test(&u, &prep, Part::Imaginary).unwrap();
        assert!((re - block.re).abs() < 1e-12, "re {re} vs {}", block.re);
        assert!((im - block.im).abs() < 1e-12, "im {im} vs {}", block.im);
    }
}

#[test]
fn encoded_angles_bind_data() {
    let mut c = Circuit::new(1, "enc");
    c.rx(
        0,
        Angle::encoded(Encoding::Arccos {
            coord: 0,
            scale: 1.0,
            offset: 0.0,
        }),
    )
    .unwrap();
    let prep = Circuit::new(1, "prep");
    let mut plus = Circuit::new(1, "plus");
    plus.h(0).unwrap();
    for &x in &[-0.9, -0.2, 0.0, 0.4, 1.0] {
        // <0| e^{i arccos(x) X} |0> = x
        let v = hadamard_test_at(&c, &prep, Part::Real, Some(&[x])).unwrap();
        assert!((v - x).abs() < 1e-12);
        // |+> is an eigenvector of X, giving e^{i arccos x}.
        let im = hadamard_test_at(&c, &plus, Part::Imaginary, Some(&[x])).unwrap();
        assert!((im - (1.0 - x * x).sqrt()).abs() < 1e-12);
    }
    assert!(hadamard_test_at(&c, &prep, Part::Real, Some(&[1.5])).is_err());
}

#[test]
fn single_control_rx_lowering() {
    let g = Gate::controlled(Op::Rx(Angle::Fixed(1.3)), vec![1], 0);
    let parts = decompose_mcu(&g).unwrap();
    assert!(parts.iter().all(|h| h.controls.len() <= 1));
    let mut c = Circuit::new(2, "low");
    for h in parts {
        c.push(h).unwrap();
    }
    let d = distance_up_to_phase(&circuit_matrix(&c, None).unwrap(), &gate_matrix(&g, 2, None).unwrap());
    assert!(d < 1e-9, "{d}");
}

#[test]
fn three_control_rz_lowering() {
    let g = Gate::controlled(Op::Rz(Angle::Fixed(0.7)), vec![0, 1, 2], 3);
    let mut c = Circuit::new(4, "mcu");
    c.push(g).unwrap();
    let low = lower_circuit(&c).unwrap();
    assert!(low.gates.iter().all(|h| h.controls.len() <= 1));
    let d = distance_up_to_phase(&circuit_matrix(&low, None).unwrap(), &circuit_matrix(&c, None).unwrap());
    assert!(d < 1e-9, "{d}");
}

#[test]
fn lowering_random_multicontrolled_gates() {
    for seed in 0..12 {
        let c = random_circuit(6, 6, 4, 500 + seed);
        let low = lower_circuit(&c).unwrap();
        assert!(low.gates.iter().all(|h| h.controls.len() <= 1));
        let d = distance_up_to_phase(&circuit_matrix(&low, None).unwrap(), &circuit_matrix(&c, None).unwrap());
        assert!(d < 1e-9, "seed {seed}: {d}");
    }
}

#[test]
fn resources_count_layers() {
    let mut c = Circuit::new(3, "r");
    c.h(0).unwrap();
    c.h(1).unwrap();
    c.cnot(0, 1).unwrap();
    c.ry(2, Angle::Trainable(0.2)).unwrap();
    c.rz(1, Angle::Trainable(0.1)).unwrap();
    let r = resource_count(&c, false).unwrap();
    assert_eq!(
        r,
        ResourceCount {
            width: 3,
            depth: 3,
            trainable_params: 2,
            gate_total: 5
        }
    );
    let mut m = Circuit::new(4, "m");
    m.push(Gate::controlled(Op::X, vec![0, 1, 2], 3)).unwrap();
    let lr = resource_count(&m, true).unwrap();
    assert!(lr.gate_total > 1 && lr.depth > 1);
}

#[test]
fn shots_are_deterministic_and_unbiased() {
    let mut c = Circuit::new(1, "s");
    c.ry(0, Angle::Fixed(1.0)).unwrap();
    let a = sample_shots(&c, 20_000, 7).unwrap();
    let b = sample_shots(&c, 20_000, 7).unwrap();
    assert_eq!(a, b);
    assert!((a.estimate - 1f64.cos()).abs() < 5.0 * a.stderr);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulation_preserves_norm(seed in any::<u64>()) {
        let c = random_circuit(6, 30, 3, seed);
        let s = run(&c, &Statevector::zero(6).unwrap()).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let c = random_circuit(5, 20, 3, seed);
        let back = Circuit::from_text(&c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn lowering_preserves_action(seed in any::<u64>()) {
        let c = random_circuit(5, 3, 4, seed);
        let low = lower_circuit(&c).unwrap();
        let init = Statevector::basis(5, (seed % 32) as usize).unwrap();
        let a = run(&c, &init).unwrap();
        let b = run(&low, &init).unwrap();
        let ov = a.inner(&b).norm();
        prop_assert!((ov - 1.0).abs() < 1e-9);
    }
}
