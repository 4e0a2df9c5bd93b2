//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nnq::analyze::{far_subset, influence_set, scaling_report, sensitivity_check, FAR_FRACTION};
use nnq::circuit::{depth, width, AdaptiveCircuit, Addr, BasicOp, CircuitBuilder, Mat2, MeasurementId, Model, Timestep};
use nnq::compactor::{control_circuit_kd, fanout_circuit, plan};
use nnq::format::{parse_document, serialize, CircuitDocument, CircuitMeta};
use nnq::geom::{distance, GridPoint, Norm};
use nnq::pauli::{compose, correction_condition, sigma_of, BellOutcome, PauliOp};
use nnq::sim::dense::DenseState;
use nnq::sim::density::pure;
use nnq::sim::stabilizer::StabilizerState;
use nnq::sim::{QubitMap, SeededOutcomes};
use nnq::teleport::{emit_chain, reorder, simulate_ccac, ReorderSpec};
use nnq::verify::{reorder_destinations, verify, Sim, VerifyOptions};

/// Tolerances and budgets of the criteria.
const CONTROL_BUDGET: Duration = Duration::from_secs(10);
const FANOUT_BUDGET: Duration = Duration::from_secs(10);
const REORDER_BUDGET: Duration = Duration::from_secs(30);
const CCAC_BUDGET: Duration = Duration::from_secs(300);
const MAX_SPREAD: f64 = 2.0;
const TRACE_TOLERANCE: f64 = 1e-9;
const FIDELITY_TOLERANCE: f64 = 1e-12;
const SENSITIVITY_TOLERANCE: f64 = 1e-9;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Round trip through the interchange format, as the command line does.
fn through_file(c: &AdaptiveCircuit, meta: CircuitMeta) -> CircuitDocument {
    parse_document(&serialize(c, Some(meta))).expect("generated circuits parse")
}

fn controlled_u() -> Verdict {
    let start = Instant::now();
    let u = Mat2::rotation(0.77, [0.3, -0.6, 0.5]);
    let mut notes = Vec::new();
    for (m, shots) in [(3usize, 0usize), (5, 0), (7, 100_000)] {
        let doc = through_file(&control_circuit_kd(m, 2, u).unwrap(), CircuitMeta::ControlledU { m, dim: 2, u });
        let opts = VerifyOptions {
            sim: Sim::Boolean,
            shots: Some(shots),
            seed: m as u64,
        };
        let r = verify(&doc, &opts).unwrap();
        let expect_exhaustive = m < 7;
        if !r.passed() || r.exhaustive != expect_exhaustive || (!expect_exhaustive && r.cases < shots) {
            return verdict(false, format!("m={m}: {r}"));
        }
        notes.push(format!("m={m} {} cases", r.cases));
    }
    let t = start.elapsed();
    verdict(t < CONTROL_BUDGET, format!("{} in {:.2?}", notes.join(", "), t))
}

fn fanout() -> Verdict {
    let start = Instant::now();
    for m in [3usize, 5, 7] {
        let doc = through_file(&fanout_circuit(m, 2).unwrap(), CircuitMeta::Fanout { m, dim: 2 });
        let opts = VerifyOptions {
            sim: Sim::Boolean,
            shots: Some(1000),
            seed: m as u64,
        };
        let r = verify(&doc, &opts).unwrap();
        if !r.passed() {
            return verdict(false, format!("m={m}: {r}"));
        }
    }
    let t = start.elapsed();
    verdict(t < FANOUT_BUDGET, format!("m in {{3,5,7}}, 2 x 1001 inputs each, in {t:.2?}"))
}

fn scaling() -> Verdict {
    let ms: Vec<usize> = (3..=17).step_by(2).collect();
    let r = scaling_report(&ms, 2).unwrap();
    let pass = r.depth_ratio <= MAX_SPREAD && r.size_ratio <= MAX_SPREAD && r.bounds_respected();
    let depths: Vec<String> = r.rows.iter().map(|row| format!("{}:{}>={}", row.m, row.depth, row.depth_bound)).collect();
    verdict(
        pass,
        format!(
            "depth/m spread {:.3}, size/n spread {:.3}, depth>=bound [{}]",
            r.depth_ratio,
            r.size_ratio,
            depths.join(" ")
        ),
    )
}

fn random_reorder<R: Rng>(n: usize, rng: &mut R) -> ReorderSpec {
    loop {
        let moved: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        let spec = ReorderSpec {
            n,
            pi: moved.into_iter().zip(images).collect::<BTreeMap<_, _>>(),
        };
        if spec.moved() > 0 && spec.validate().is_ok() {
            return spec;
        }
    }
}

/// Prepare each data qubit in a random X, Y or Z eigenstate, run the
/// reorder, rotate back at the destination and demand a certain outcome.
fn eigenstates_arrive(spec: &ReorderSpec, rng: &mut ChaCha8Rng) -> bool {
    let c = reorder(spec).unwrap();
    let sources: Vec<Addr> = (0..spec.n as i64).map(|j| Addr::Grid(GridPoint::xy(0, j))).collect();
    let dests: Vec<Addr> = reorder_destinations(spec).into_iter().map(Addr::Grid).collect();
    let map = QubitMap::for_circuit(&c, sources.iter().chain(&dests).cloned());
    let mut state = StabilizerState::zero(map.clone());
    let mut plan = Vec::new();
    for s in &sources {
        let q = map.get(s).unwrap();
        let (basis, sign) = (rng.gen_range(0..3), rng.gen_bool(0.5));
        if sign {
            state.pauli(q, true, false);
        }
        match basis {
            1 => state.h(q),
            2 => {
                state.h(q);
                state.s(q);
            }
            _ => {}
        }
        plan.push((basis, sign));
    }
    state.run(&c, &mut SeededOutcomes::new(rng.gen())).unwrap();
    dests.iter().zip(&plan).all(|(d, &(basis, sign))| {
        let q = map.get(d).unwrap();
        match basis {
            1 => state.h(q),
            2 => {
                state.s(q);
                state.s(q);
                state.s(q);
                state.h(q);
            }
            _ => {}
        }
        state.peek_z(q) == Some(sign)
    })
}

fn constant_depth_reorder() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut depths = BTreeSet::new();
    for n in [4usize, 8, 16, 32] {
        for trial in 0..50 {
            let spec = random_reorder(n, &mut rng);
            let c = reorder(&spec).unwrap();
            depths.insert(depth(&c));
            if width(&c) > (n + 1) * n {
                return verdict(false, format!("n={n}: width {} exceeds {}", width(&c), (n + 1) * n));
            }
            if !eigenstates_arrive(&spec, &mut rng) {
                return verdict(false, format!("n={n} trial {trial}: a data qubit did not arrive"));
            }
        }
    }
    let t = start.elapsed();
    let pass = depths.len() == 1 && t < REORDER_BUDGET;
    verdict(pass, format!("depths {depths:?}, 200 instances verified in {t:.2?}"))
}

fn ccac_simulation() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut ratios = BTreeSet::new();
    for i in 0..25 {
        let d = 1 + i % 5;
        let source = common::random_abstract_circuit(4, d, &mut rng);
        let compiled = simulate_ccac(&source).unwrap();
        if compiled.grid_side != Some(4) {
            return verdict(false, "compiled grid is not 4 x 4");
        }
        ratios.insert(depth(&compiled) / source.timesteps.len());
        if !depth(&compiled).is_multiple_of(source.timesteps.len()) {
            return verdict(false, format!("depth {} not a multiple of {d}", depth(&compiled)));
        }
        let meta = CircuitMeta::Ccac {
            source: Box::new(CircuitDocument::new(&source, None)),
        };
        let opts = VerifyOptions {
            sim: Sim::Dense,
            shots: Some(3),
            seed: i as u64,
        };
        let r = verify(&through_file(&compiled, meta), &opts).unwrap();
        worst = worst.max(r.max_error.unwrap_or(f64::INFINITY));
        if !r.passed() {
            return verdict(false, format!("circuit {i}: {r}"));
        }
    }
    let t = start.elapsed();
    let pass = worst <= TRACE_TOLERANCE && ratios.len() == 1 && t < CCAC_BUDGET;
    verdict(pass, format!("max trace distance {worst:.2e}, depth ratios {ratios:?}, in {t:.2?}"))
}

fn fidelity(hops: usize, rng: &mut ChaCha8Rng) -> f64 {
    let line: Vec<GridPoint> = (0..=2 * hops as i64).map(|x| GridPoint::xy(x, 0)).collect();
    let mut b = CircuitBuilder::new(Model::Ccntc, 2);
    b.set_grid_side(line.len());
    emit_chain(&line, &mut b).unwrap();
    let c = b.finish();
    let map = QubitMap::for_circuit(&c, []);
    let psi = common::random_state(1, rng);
    let first = map.get(&(&line[0]).into()).unwrap();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << map.len()];
    amps[0] = psi[0];
    amps[1 << first] = psi[1];
    let mut s = DenseState::from_amplitudes(map.clone(), amps).unwrap();
    s.run(&c, &mut SeededOutcomes::new(rng.gen())).unwrap();
    let rho = s.reduced_density(&[map.get(&line.last().unwrap().into()).unwrap()]);
    let target = pure(&psi);
    (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (target[(j, i)] * rho[(i, j)]).re).sum()
}

fn teleportation() -> Verdict {
    let mut sequences = 0;
    for len in 0..=4u32 {
        for code in 0..4u32.pow(len) {
            let ks: Vec<u8> = (0..len).map(|i| (code / 4u32.pow(i) % 4) as u8).collect();
            let outcomes: Vec<BellOutcome> = (0..len)
                .map(|i| BellOutcome {
                    phase_bit: MeasurementId(2 * i),
                    flip_bit: MeasurementId(2 * i + 1),
                })
                .collect();
            // (flip, phase) bits read for each Bell outcome.
            let bits = [(false, false), (true, false), (true, true), (false, true)];
            let bit = |id: MeasurementId| {
                let (flip, phase) = bits[ks[(id.0 / 2) as usize] as usize];
                Some(if id.0.is_multiple_of(2) { phase } else { flip })
            };
            let (x, z) = correction_condition(&outcomes).resolve(bit).unwrap();
            let expected = compose(&ks.iter().map(|&k| sigma_of(k)).collect::<Vec<_>>());
            if !PauliOp::new(x, z).eq_up_to_phase(&expected) {
                return verdict(false, format!("outcomes {ks:?}"));
            }
            sequences += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 1.0;
    for hops in [1usize, 2] {
        for _ in 0..100 {
            worst = worst.min(fidelity(hops, &mut rng));
        }
    }
    verdict(
        worst >= 1.0 - FIDELITY_TOLERANCE,
        format!("{sequences} outcome sequences, min fidelity 1 - {:.1e}", 1.0 - worst),
    )
}

fn lower_bounds() -> Verdict {
    for m in (3..=17).step_by(2) {
        let layout = plan(m, 2).unwrap().layout;
        let cert = influence_set(&control_circuit_kd(m, 2, Mat2::x()).unwrap(), &layout.target).unwrap();
        if !cert.influence.is_superset(&layout.controls) || !cert.contained_in_ball() {
            return verdict(false, format!("m={m}: influence misses a control or leaves the ball"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dim in [2usize, 3] {
        for _ in 0..100 {
            let size = rng.gen_range(16..400);
            let mut points = BTreeSet::new();
            while points.len() < size {
                points.insert(GridPoint::new((0..dim).map(|_| rng.gen_range(-15..=15)).collect()));
            }
            let origin = GridPoint::new((0..dim).map(|_| rng.gen_range(-15..=15)).collect());
            let far = far_subset(&points, &origin);
            let threshold = FAR_FRACTION * (size as f64).powf(1.0 / dim as f64);
            let distances_ok = far.iter().all(|p| distance(p, &origin, Norm::L1).unwrap() as f64 >= threshold);
            if 2 * far.len() < size || !distances_ok {
                return verdict(false, format!("dim {dim}: {} of {size} far", far.len()));
            }
        }
    }
    verdict(true, "m = 3..17 influence covers controls; 200 random point sets")
}

fn basis(n: usize, index: usize) -> DMatrix<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
    v[index] = Complex64::new(1.0, 0.0);
    pure(&v)
}

fn sensitivity() -> Verdict {
    let mut worst: f64 = 0.0;
    for controls in 1..=4usize {
        let mut c = AdaptiveCircuit::new(Model::Ccac, 1);
        c.timesteps.push(Timestep::physical(vec![BasicOp::mcx((0..controls).map(Addr::Index).collect(), controls)]));
        let input = basis(controls + 1, (1 << controls) - 1);
        for probe in 0..controls {
            let p = sensitivity_check(&c, &Addr::Index(probe), &Addr::Index(controls), Mat2::x(), std::slice::from_ref(&input)).unwrap();
            worst = worst.max((p.measured_distance - 1.0).abs());
        }
    }
    for targets in 1..=4usize {
        let mut c = AdaptiveCircuit::new(Model::Ccac, 1);
        c.timesteps.push(Timestep::physical(vec![BasicOp::fanout(0usize, (1..=targets).map(Addr::Index).collect())]));
        for observed in 1..=targets {
            let p = sensitivity_check(&c, &Addr::Index(0), &Addr::Index(observed), Mat2::x(), &[basis(targets + 1, 0)]).unwrap();
            worst = worst.max((p.measured_distance - 1.0).abs());
        }
    }
    verdict(worst <= SENSITIVITY_TOLERANCE, format!("max |distance - 1| = {worst:.1e}"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 8] = [
        ("controlled-U correctness", controlled_u),
        ("fan-out correctness", fanout),
        ("depth and size scaling", scaling),
        ("constant-depth reorder", constant_depth_reorder),
        ("abstract circuit simulation", ccac_simulation),
        ("teleportation algebra", teleportation),
        ("lower-bound certificates", lower_bounds),
        ("sensitivity", sensitivity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} [{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
