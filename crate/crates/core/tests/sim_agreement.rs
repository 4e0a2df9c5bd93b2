mod common;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nnq::circuit::{AdaptiveCircuit, Addr, BasicOp, MeasurementId, Model, Timestep};
use nnq::sim::dense::DenseState;
use nnq::sim::stabilizer::StabilizerState;
use nnq::sim::{QubitMap, ScriptedOutcomes, SeededOutcomes};

/// Amplitudes of `state` after applying the Pauli string `g` (`+XZ..`).
fn apply_pauli(g: &str, amps: &[Complex64]) -> Vec<Complex64> {
    let sign = if g.starts_with('-') { -1.0 } else { 1.0 };
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, a) in amps.iter().enumerate() {
        let mut j = i;
        let mut phase = Complex64::new(sign, 0.0);
        for (q, p) in g[1..].chars().enumerate() {
            let bit = i >> q & 1 == 1;
            match p {
                'X' => j ^= 1 << q,
                'Z' if bit => phase = -phase,
                'Y' => {
                    j ^= 1 << q;
                    phase *= if bit { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
                }
                _ => {}
            }
        }
        out[j] += phase * a;
    }
    out
}

#[test]
fn stabilizer_generators_fix_the_dense_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in [2usize, 5, 8, 12] {
        for _ in 0..5 {
            let c = common::random_clifford_circuit(n, 6, &mut rng);
            let map = QubitMap::new((0..n).map(Addr::Index));
            let mut dense = DenseState::zero(map.clone()).unwrap();
            dense.run(&c, &mut SeededOutcomes::new(0)).unwrap();
            let mut tab = StabilizerState::zero(map);
            tab.run(&c, &mut SeededOutcomes::new(0)).unwrap();
            for g in tab.generators() {
                let moved = apply_pauli(&g, dense.amplitudes());
                let err = moved.iter().zip(dense.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-9, "n={n} generator {g}");
            }
        }
    }
}

#[test]
fn deterministic_outcomes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..20 {
        let n = rng.gen_range(2..8);
        let mut c = common::random_clifford_circuit(n, 5, &mut rng);
        c.measurement_count = n as u32;
        c.timesteps.push(Timestep::physical(
            (0..n).map(|q| BasicOp::measure(q, MeasurementId(q as u32))).collect(),
        ));
        let map = QubitMap::new((0..n).map(Addr::Index));
        let mut tab = StabilizerState::zero(map.clone());
        let mut probe = tab.clone();
        probe.run(&AdaptiveCircuit { timesteps: c.timesteps[..c.timesteps.len() - 1].to_vec(), ..c.clone() }, &mut SeededOutcomes::new(0)).unwrap();
        let deterministic: Vec<Option<bool>> = (0..n).map(|q| probe.clone().peek_z(q)).collect();
        let tab_record = tab.run(&c, &mut SeededOutcomes::new(5)).unwrap();
        let script = (0..n).map(|q| (MeasurementId(q as u32), tab_record.get(MeasurementId(q as u32)).unwrap())).collect();
        let mut dense = DenseState::zero(map).unwrap();
        let dense_record = dense.run(&c, &mut ScriptedOutcomes::new(script)).unwrap();
        for (q, det) in deterministic.iter().enumerate() {
            if let Some(v) = det {
                assert_eq!(dense_record.get(MeasurementId(q as u32)), Some(*v));
            }
        }
    }
}

#[test]
fn measurement_statistics_match_probabilities() {
    let mut c = AdaptiveCircuit::new(Model::Ccac, 1);
    let u = nnq::circuit::Mat2::rotation(1.1, [0.0, 1.0, 0.0]);
    c.measurement_count = 1;
    c.timesteps = vec![
        Timestep::physical(vec![BasicOp::single(nnq::circuit::Gate::U { matrix: u }, 0usize)]),
        Timestep::physical(vec![BasicOp::measure(0usize, MeasurementId(0))]),
    ];
    let map = QubitMap::new([Addr::Index(0)]);
    let p1 = (1.1f64 / 2.0).sin().powi(2);
    let shots = 10_000;
    let mut ones = 0;
    let mut source = SeededOutcomes::new(7);
    for _ in 0..shots {
        let mut s = DenseState::zero(map.clone()).unwrap();
        if s.run(&c, &mut source).unwrap().get(MeasurementId(0)).unwrap() {
            ones += 1;
        }
    }
    let sigma = (shots as f64 * p1 * (1.0 - p1)).sqrt();
    assert!((ones as f64 - shots as f64 * p1).abs() <= 3.0 * sigma, "{ones} vs {}", shots as f64 * p1);
}
