mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nnq::circuit::Mat2;
use nnq::compactor::{control_circuit_kd, fanout_circuit};
use nnq::format::{parse, parse_document, serialize, CircuitDocument, CircuitMeta};
use nnq::teleport::{interact, reorder, simulate_ccac, InteractionSpec, ReorderSpec};
use nnq::Error;

fn round_trip(doc_circuit: &nnq::circuit::AdaptiveCircuit, meta: CircuitMeta) {
    let bytes = serialize(doc_circuit, Some(meta.clone()));
    let doc = parse_document(&bytes).unwrap();
    assert_eq!(&doc.circuit(), doc_circuit);
    assert_eq!(doc.meta.as_ref(), Some(&meta));
    assert_eq!(serialize(&doc.circuit(), Some(meta)), bytes);
}

#[test]
fn every_generator_round_trips() {
    let u = Mat2::rotation(0.9, [0.2, 0.3, 0.4]);
    round_trip(&control_circuit_kd(5, 2, u).unwrap(), CircuitMeta::ControlledU { m: 5, dim: 2, u });
    round_trip(&control_circuit_kd(3, 3, u).unwrap(), CircuitMeta::ControlledU { m: 3, dim: 3, u });
    round_trip(&fanout_circuit(5, 2).unwrap(), CircuitMeta::Fanout { m: 5, dim: 2 });
    let spec = ReorderSpec {
        n: 5,
        pi: [(0, 2), (1, 0), (4, 3)].into(),
    };
    round_trip(&reorder(&spec).unwrap(), CircuitMeta::Reorder { spec });
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let step = common::random_abstract_circuit(4, 1, &mut rng);
    let spec = InteractionSpec {
        n: 4,
        ops: step.timesteps[0].ops.clone(),
    };
    round_trip(&interact(&spec).unwrap(), CircuitMeta::Interact { spec });
    let source = common::random_abstract_circuit(3, 2, &mut rng);
    let meta = CircuitMeta::Ccac {
        source: Box::new(CircuitDocument::new(&source, None)),
    };
    round_trip(&simulate_ccac(&source).unwrap(), meta);
}

#[test]
fn truncated_document_reports_position() {
    let bytes = serialize(&fanout_circuit(3, 2).unwrap(), None);
    let cut = &bytes[..bytes.len() / 2];
    match parse(cut) {
        Err(Error::Parse { line, column, .. }) => assert!(line > 1 && column > 0),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn minor_versions_are_accepted() {
    let text = String::from_utf8(serialize(&fanout_circuit(3, 2).unwrap(), None)).unwrap();
    assert!(parse(text.replace("\"1.0.0\"", "\"1.4.2\"").as_bytes()).is_ok());
    assert!(matches!(parse(text.replace("\"1.0.0\"", "\"0.9.0\"").as_bytes()), Err(Error::Version(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn random_abstract_circuits_round_trip(seed in any::<u64>(), n in 2usize..6, depth in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::random_abstract_circuit(n, depth, &mut rng);
        let bytes = serialize(&c, None);
        prop_assert_eq!(parse(&bytes).unwrap(), c);
    }
}
