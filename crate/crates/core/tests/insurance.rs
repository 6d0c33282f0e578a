mod common;

use proptest::prelude::*;
use qinsure::distributions::{uniform_excluding_zero, DiscreteDistribution, LoaderBackend, ProcessDistribution};
use qinsure::insurance::{
    classical_whole_life_pv, dynamic_lapse_circuit, lapse_laf, mortality_weights, stopped_law, sum_register_size,
    weighted_adder_circuit, weighted_adder_with_size, whole_life_circuit, LapseModel, MortalityTable, Scenario,
};
use qinsure::sim::{marginal_probabilities, run, run_from_zero, Circuit, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [f64; 4] = [0.8, 0.9, 1.0, 1.1];
const RATES: [f64; 4] = [0.0, 0.9, 0.5, 0.1];

fn worked_example() -> (ProcessDistribution, LapseModel) {
    let d = uniform_excluding_zero(2).unwrap().with_grid(0.8, 1.1).unwrap();
    (ProcessDistribution::iid(3, d).unwrap(), LapseModel::time_independent(RATES.to_vec(), 3).unwrap())
}

/// Random step law with no mass on grid index 0.
fn step_without_zero(rng: &mut impl Rng, r: usize) -> Vec<f64> {
    let mut p = common::random_probabilities(rng, (1 << r) - 1);
    p.insert(0, 0.0);
    p
}

fn basis_index(state: &StateVector) -> usize {
    let (k, a) = state.amplitudes().iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
    assert!((a.norm() - 1.0).abs() < 1e-9, "not a basis state");
    k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adder_matches_dot_product(weights in prop::collection::vec(0u64..6, 1..=4)) {
        let r = weights.len();
        let c = weighted_adder_circuit(&weights, r).unwrap();
        prop_assert_eq!(c.num_qubits(), r + sum_register_size(weights.iter().sum()));
        for x in 0..1usize << r {
            let out = basis_index(&run(&c, &StateVector::basis(c.num_qubits(), x).unwrap()).unwrap());
            let dot: u64 = weights.iter().enumerate().filter(|(i, _)| x >> i & 1 == 1).map(|(_, w)| w).sum();
            prop_assert_eq!(out & ((1 << r) - 1), x);
            prop_assert_eq!((out >> r) as u64, dot);
        }
    }

    #[test]
    fn mortality_weights_and_survival_partition_one(q in prop::collection::vec(0.0f64..=1.0, 1..8), x in 0u32..100) {
        let t = MortalityTable::new(x, q.clone()).unwrap();
        for n in 0..=q.len() {
            let w = mortality_weights(&t, n).unwrap();
            prop_assert!((w.iter().sum::<f64>() + t.survival(n) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn stopped_law_matches_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=2);
        let probs: Vec<Vec<f64>> = (0..n).map(|_| step_without_zero(&mut rng, r)).collect();
        let mut rates: Vec<Vec<f64>> = (0..n - 1).map(|_| (0..1 << r).map(|_| rng.gen_range(0.0..=1.0)).collect()).collect();
        rates.push(vec![1.0; 1 << r]);
        let steps = probs.iter().map(|p| DiscreteDistribution::new(r, p.clone(), 0.5, 1.5).unwrap()).collect();
        let proc = ProcessDistribution::independent(steps).unwrap();
        let lapse = LapseModel::new(rates.clone()).unwrap();
        let grid: Vec<f64> = (0..1 << r).map(|k| 0.5 + k as f64 / ((1 << r) - 1) as f64).collect();
        let oracle = common::enumerate_lapse(&probs, &rates, &grid);
        let lib = stopped_law(&proc, &lapse).unwrap();
        for (a, b) in lib.stopping_time.iter().zip(&oracle.tau) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!((lib.pv - oracle.pv).abs() <= 1e-12);
        if 2 * n * r + n + r <= 12 {
            let rep = dynamic_lapse_circuit(&proc, &lapse).unwrap().report().unwrap();
            for (a, b) in rep.final_result().iter().zip(&oracle.value) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
            prop_assert!((rep.pv - oracle.pv).abs() <= 1e-10);
        }
    }
}

#[test]
fn adder_rejects_small_register() {
    assert_eq!(weighted_adder_with_size(&[3, 3], 2, 2).unwrap_err().kind(), "register_overflow");
    assert!(weighted_adder_with_size(&[3, 3], 2, 3).is_ok());
    assert_eq!(sum_register_size(0), 1);
    assert_eq!(sum_register_size(6), 3);
    assert_eq!(sum_register_size(8), 4);
}

#[test]
fn whole_life_two_steps_matches_convolution() {
    let a = vec![0.1, 0.2, 0.3, 0.4];
    let b = vec![0.4, 0.0, 0.35, 0.25];
    let steps = vec![
        DiscreteDistribution::new(2, a.clone(), 0.5, 2.0).unwrap(),
        DiscreteDistribution::new(2, b.clone(), 0.5, 2.0).unwrap(),
    ];
    let proc = ProcessDistribution::independent(steps).unwrap();
    let w = [0.03, 0.02];
    let wl = whole_life_circuit(&proc, &w, 100).unwrap();
    assert_eq!(wl.int_weights, vec![3, 2]);
    let rep = wl.report(&proc).unwrap();
    let mut conv = vec![0.0; rep.sum_distribution.len()];
    for (k1, p1) in a.iter().enumerate() {
        for (k2, p2) in b.iter().enumerate() {
            conv[3 * k1 + 2 * k2] += p1 * p2;
        }
    }
    for (got, want) in rep.sum_distribution.iter().zip(&conv) {
        assert!((got - want).abs() <= 1e-10);
    }
    // weights are exact at this scale, so the PV is too
    let oracle = 0.03 * (0.5 + 0.5 * (0.2 + 0.6 + 1.2)) + 0.02 * (0.5 + 0.5 * (0.7 + 0.75));
    assert!(rep.quantization_bound < 1e-12);
    assert!((rep.quantum_pv - oracle).abs() <= 1e-10);
    assert!((rep.classical_pv - oracle).abs() <= 1e-12);
    assert!((classical_whole_life_pv(&proc, &w) - oracle).abs() <= 1e-12);
}

#[test]
fn whole_life_rejects_bad_inputs() {
    let proc = ProcessDistribution::iid(2, uniform_excluding_zero(1).unwrap()).unwrap();
    assert!(whole_life_circuit(&proc, &[0.1], 10).is_err());
    assert!(whole_life_circuit(&proc, &[0.1, -0.1], 10).is_err());
    assert!(whole_life_circuit(&proc, &[0.1, 0.1], 0).is_err());
    let mixed = ProcessDistribution::independent(vec![
        DiscreteDistribution::new(1, vec![0.5, 0.5], 0.0, 1.0).unwrap(),
        DiscreteDistribution::new(1, vec![0.5, 0.5], 0.0, 2.0).unwrap(),
    ])
    .unwrap();
    assert!(whole_life_circuit(&mixed, &[0.1, 0.1], 10).is_err());
}

#[test]
fn worked_example_stopping_time_per_trajectory() {
    let (proc, lapse) = worked_example();
    let dl = dynamic_lapse_circuit(&proc, &lapse).unwrap();
    assert_eq!(dl.layout.width(), 17);
    let start = dl.circuit.marker_position("1").unwrap();
    let tail = Circuit::from_ops(dl.circuit.num_qubits(), dl.circuit.ops()[start..].iter().cloned()).unwrap();
    let third = 1.0 / 3.0;
    let oracle = common::enumerate_lapse(&vec![vec![0.0, third, third, third]; 3], &[RATES.to_vec(), RATES.to_vec(), vec![1.0; 4]], &GRID);
    assert_eq!(oracle.conditional.len(), 27);
    for (ks, cond) in &oracle.conditional {
        let index: usize = ks.iter().enumerate().map(|(i, k)| k << (2 * i)).sum();
        let out = run(&tail, &StateVector::basis(17, index).unwrap()).unwrap();
        let law = marginal_probabilities(&out, &dl.layout.lapse_register()).unwrap();
        // product formula: lapse at step i after surviving all earlier steps
        let mut alive = 1.0;
        for i in 0..3 {
            let p = if i == 2 { 1.0 } else { RATES[ks[i]] };
            assert!((law[1 << i] - alive * p).abs() <= 1e-10, "{ks:?} step {i}");
            assert!((cond[i] - alive * p).abs() <= 1e-12);
            alive *= 1.0 - p;
        }
        let result = marginal_probabilities(&out, &dl.layout.result_register()).unwrap();
        let mut want = [0.0; 4];
        for i in 0..3 {
            want[ks[i]] += law[1 << i];
        }
        for k in 0..4 {
            assert!((result[k] - want[k]).abs() <= 1e-10);
        }
    }
}

#[test]
fn worked_example_registers() {
    let (proc, lapse) = worked_example();
    let rep = dynamic_lapse_circuit(&proc, &lapse).unwrap().report().unwrap();
    let names: Vec<&str> = rep.markers.iter().map(|m| m.marker.as_str()).collect();
    assert_eq!(names, ["1", "2.1", "2.2", "2.3", "3.1", "3.2", "3.3"]);
    let tau = [0.5, 0.25, 0.25];
    for i in 1..=3 {
        let at = rep.at(&format!("2.{i}")).unwrap();
        let off: f64 = at.lapse.iter().enumerate().filter(|(s, _)| s.count_ones() > 1).map(|(_, p)| p).sum();
        assert!(off <= 1e-10, "two lapse qubits set at 2.{i}");
        let survive: f64 = tau[i..].iter().sum();
        let result = &rep.at(&format!("3.{i}")).unwrap().result;
        assert!((result[0] - survive).abs() <= 1e-10, "3.{i}");
    }
    assert!((rep.pv - 0.96).abs() <= 1e-10);
    let lib = stopped_law(&proc, &lapse).unwrap();
    assert!((lib.pv - 0.96).abs() <= 1e-12);
}

#[test]
fn worked_example_sampled_pv() {
    let (proc, lapse) = worked_example();
    let dl = dynamic_lapse_circuit(&proc, &lapse).unwrap();
    let shots = 20_000;
    let (counts, pv) = dl.sampled_result(shots, 3).unwrap();
    assert_eq!(counts.values().sum::<u64>(), shots);
    let law = [0.0, 8.0 / 15.0, 1.0 / 3.0, 2.0 / 15.0];
    let var: f64 = law.iter().zip(GRID).map(|(p, z)| p * (z - 0.96f64).powi(2)).sum();
    assert!((pv - 0.96).abs() <= 3.0 * (var / shots as f64).sqrt());
    assert_eq!(dl.sampled_result(shots, 3).unwrap(), (counts, pv));
}

#[test]
fn degenerate_lapse_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let probs: Vec<Vec<f64>> = (0..3).map(|_| step_without_zero(&mut rng, 1)).collect();
        let steps: Vec<_> = probs.iter().map(|p| DiscreteDistribution::new(1, p.clone(), 1.0, 3.0).unwrap()).collect();
        let proc = ProcessDistribution::independent(steps.clone()).unwrap();

        let never = LapseModel::time_independent(vec![0.0, 0.0], 3).unwrap();
        let pv = dynamic_lapse_circuit(&proc, &never).unwrap().report().unwrap().pv;
        assert!((pv - steps[2].expected_value()).abs() <= 1e-10);

        let first = LapseModel::new(vec![vec![1.0, 1.0], vec![0.3, 0.6], vec![1.0, 1.0]]).unwrap();
        let pv = dynamic_lapse_circuit(&proc, &first).unwrap().report().unwrap().pv;
        assert!((pv - steps[0].expected_value()).abs() <= 1e-10);
    }
}

#[test]
fn dynamic_lapse_rejects_bad_inputs() {
    let (proc, _) = worked_example();
    let short = LapseModel::time_independent(RATES.to_vec(), 2).unwrap();
    assert!(dynamic_lapse_circuit(&proc, &short).is_err());
    let with_zero = ProcessDistribution::iid(3, DiscreteDistribution::on_unit_grid(2, vec![0.25; 4]).unwrap()).unwrap();
    let lapse = LapseModel::time_independent(RATES.to_vec(), 3).unwrap();
    assert_eq!(dynamic_lapse_circuit(&with_zero, &lapse).unwrap_err().kind(), "invalid_distribution");
    assert!(LapseModel::new(vec![vec![0.5, 0.5]]).is_err());
    assert!(LapseModel::new(vec![vec![0.5, 1.5], vec![1.0, 1.0]]).is_err());
    assert!(LapseModel::new(vec![vec![0.5, 0.5, 0.5], vec![1.0; 3]]).is_err());
}

#[test]
fn laf_expectation_on_uniform_law() {
    let d = uniform_excluding_zero(2).unwrap();
    let mut c = Circuit::new(3);
    c.append(&qinsure::distributions::loader_circuit(&d, LoaderBackend::RyTree).unwrap()).unwrap();
    c.append(&lapse_laf(&RATES, 2).unwrap()).unwrap();
    let p = marginal_probabilities(&run_from_zero(&c).unwrap(), &[2]).unwrap()[1];
    assert!((p - 0.5).abs() <= 1e-12);
    assert!(lapse_laf(&RATES, 1).is_err());
}

#[test]
fn scenario_files() {
    let text = r#"{
        "steps": 3, "resolution": 2, "grid": {"z_min": 0.8, "z_max": 1.1},
        "distribution": "uniform_excluding_zero",
        "lapse": [[0, 0.9, 0.5, 0.1], [0, 0.9, 0.5, 0.1], [1, 1, 1, 1]],
        "mortality": {"x": 60, "q": [0.01, 0.02, 0.03]}
    }"#;
    let s = Scenario::from_json(text).unwrap();
    assert_eq!(s.scale(), 100);
    let rep = dynamic_lapse_circuit(&s.process().unwrap(), &s.lapse_model().unwrap()).unwrap().report().unwrap();
    assert!((rep.pv - 0.96).abs() <= 1e-10);
    let w = s.mortality_weights().unwrap();
    assert!((w[1] - 0.99 * 0.02).abs() <= 1e-15);
    let back = Scenario::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);

    let explicit = text.replace("\"uniform_excluding_zero\"", "[0.0, 0.5, 0.25, 0.25]");
    let s = Scenario::from_json(&explicit).unwrap();
    assert_eq!(s.step_distribution().unwrap().probabilities(), &[0.0, 0.5, 0.25, 0.25]);

    assert!(Scenario::from_json(&text.replace("\"steps\"", "\"stepz\"")).is_err());
    let unknown = Scenario::from_json(&text.replace("uniform_excluding_zero", "lognormal")).unwrap();
    assert_eq!(unknown.process().unwrap_err().kind(), "invalid_distribution");
    let bad_q = text.replace("0.03]", "1.5]");
    assert!(Scenario::from_json(&bad_q).is_err());
    let bare = Scenario::from_json(
        r#"{"steps": 1, "resolution": 1, "grid": {"z_min": 0, "z_max": 1}, "distribution": [0.5, 0.5]}"#,
    )
    .unwrap();
    assert!(bare.lapse_model().is_err() && bare.mortality_weights().is_err());
}
