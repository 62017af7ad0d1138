use num_complex::Complex64;

use qwalk_core::hilbert::{BasisIndex, RegisterId};
use qwalk_core::measurement::{
    build_coin_basis, computational_basis, measure_project, outcome_distribution, position_basis_for,
};
use qwalk_core::protocol::{success_probability, target_fidelity, Correction, OutcomeTuple, ProtocolConfig};
use qwalk_core::walks::{build_walk_program, layout_for, run_walk, ConfigKey, Protocol, Topology};

const LINE: ConfigKey = ConfigKey::new(Protocol::Uncontrolled, Topology::Line);

fn coins(state: &qwalk_core::hilbert::StateVector, values: [i32; 4]) -> Complex64 {
    // Positions are collapsed to |00>, so the coin part can be read off directly.
    state.amplitude(&BasisIndex::new([0, 0].into_iter().chain(values).collect()))
}

#[test]
fn line_layout_dimension() {
    assert_eq!(layout_for(LINE).total_dimension(), 5 * 5 * 16);
    assert_eq!(layout_for(ConfigKey::new(Protocol::Controlled, Topology::Line)).total_dimension(), 7 * 7 * 64);
}

#[test]
fn origin_projection_leaves_two_coin_pairs() {
    let p = build_walk_program(LINE.protocol, LINE.topology);
    let psi = run_walk(&p, 4).unwrap();
    let rec = measure_project(&psi, &position_basis_for(LINE), "00").unwrap();
    assert!((rec.probability - 0.25).abs() < 1e-12);
    assert_eq!(rec.post_state.nnz(), 4);
    // A2 A3 B2 B3 in layout order.
    for ket in [[0, 1, 0, 1], [0, 0, 1, 1], [1, 1, 0, 0], [1, 0, 1, 0]] {
        assert!((coins(&rec.post_state, ket) - 0.5).norm() < 1e-12, "{ket:?}");
    }
}

#[test]
fn origin_then_beta0_gamma0_gives_the_flipped_product() {
    let (alice, bob) = ((0.6, -0.8), (0.28, 0.96));
    let p = build_walk_program(LINE.protocol, LINE.topology);
    let psi = run_walk(&p, 4).unwrap();
    let pos = measure_project(&psi, &position_basis_for(LINE), "00").unwrap();
    let a = measure_project(&pos.post_state, &build_coin_basis(RegisterId::A2, alice).unwrap(), "beta0").unwrap();
    let b = measure_project(&a.post_state, &build_coin_basis(RegisterId::B2, bob).unwrap(), "gamma0").unwrap();
    assert!((pos.probability * a.probability * b.probability - 1.0 / 16.0).abs() < 1e-12);
    // Before correction A3 holds b1|0> + b0|1> and B3 holds a1|0> + a0|1>.
    let flipped = target_fidelity(&b.post_state, (alice.1, alice.0), (bob.1, bob.0)).unwrap();
    assert!((flipped - 1.0).abs() < 1e-12);
    let fixed = Correction::new("X".parse().unwrap(), "X".parse().unwrap()).apply(&b.post_state).unwrap();
    assert!((target_fidelity(&fixed, alice, bob).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn two_vertex_positions_are_uniform() {
    let key = ConfigKey::new(Protocol::Uncontrolled, Topology::TwoVertex);
    let p = build_walk_program(key.protocol, key.topology);
    let dist = outcome_distribution(&run_walk(&p, 4).unwrap(), &position_basis_for(key)).unwrap();
    assert!(dist.iter().all(|(_, p)| (p - 0.25).abs() < 1e-12));
}

#[test]
fn controller_bits_are_read_in_register_order() {
    let b = computational_basis(&[RegisterId::C1, RegisterId::C2]).unwrap();
    let v = b.vector("01").unwrap();
    assert_eq!(v.components[0].0, vec![0, 1]);
}

#[test]
fn controlled_line_first_outcome_probability() {
    let cfg = ProtocolConfig::new(Protocol::Controlled, Topology::Line, (0.6, 0.8), (0.8, 0.6)).unwrap();
    let p = success_probability(&cfg, &OutcomeTuple::new("alpha0", "beta0", "gamma0", Some("00"))).unwrap();
    assert!((p - 1.0 / 256.0).abs() < 1e-12);
}
