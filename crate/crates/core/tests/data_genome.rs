//! Encoding and data-preparation properties.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use qfm_core::data::{apply_scale, fit_scale, load_csv, make_blobs, make_moons, split, Dataset};
use qfm_core::decode_genome;
use qfm_core::genome::{count_gates, genome_len, random_genome, CircuitSpec, Gate, Genome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_genome() -> impl Strategy<Value = Genome> {
    (1usize..=6, 1usize..=6, 1usize..=5, any::<u64>()).prop_map(|(m, n, d, seed)| {
        random_genome(m, n, d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    })
}

proptest! {
    #[test]
    fn genome_serialization_round_trips(g in arb_genome()) {
        let json = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(&serde_json::from_str::<Genome>(&json).unwrap(), &g);
        let s = g.to_bit_string();
        let back = Genome::from_bit_string(&s, g.num_qubits(), g.max_layers(), g.num_features()).unwrap();
        prop_assert_eq!(back, g.clone());
        let circuit = decode_genome(&g);
        prop_assert_eq!(CircuitSpec::from_json(&circuit.to_json().unwrap()).unwrap(), circuit);
    }

    #[test]
    fn decoding_places_gates_by_gene_index(g in arb_genome()) {
        let m = g.num_qubits();
        let d = g.num_features();
        prop_assert_eq!(g.bits().len(), genome_len(m, g.max_layers()));
        let circuit = decode_genome(&g);
        let allowed: BTreeSet<u64> = [16.0, 32.0, 128.0, 256.0].iter().map(|k| (PI / k).to_bits()).collect();
        let mut expected = 0;
        for i in 0..g.num_genes() {
            let b = g.gene(i);
            if matches!((b[0], b[1], b[2]), (false, false, false) | (false, true, true) | (true, true, true)) {
                continue;
            }
            if (b[0], b[1], b[2]) == (false, true, false) && m < 2 {
                continue;
            }
            let spec = &circuit.gates()[expected];
            prop_assert_eq!(spec.qubit, i % m);
            prop_assert_eq!(spec.layer, i / m);
            match spec.gate {
                Gate::Rotation { theta, feature, .. } => {
                    prop_assert_eq!(feature, i % d);
                    prop_assert!(allowed.contains(&theta.to_bits()));
                }
                Gate::Hadamard => prop_assert_eq!((b[0], b[1], b[2]), (false, false, true)),
                Gate::Cnot => prop_assert_eq!((b[0], b[1], b[2]), (false, true, false)),
                Gate::Identity => prop_assert!(false, "identity gates are not emitted"),
            }
            expected += 1;
        }
        prop_assert_eq!(expected, circuit.gates().len());
        let counts = count_gates(&circuit);
        prop_assert_eq!(counts.local + counts.cnot, circuit.gates().len());
    }

    #[test]
    fn flipping_one_gene_changes_one_slot(g in arb_genome(), pick in any::<usize>(), mask in 1u8..32) {
        let i = pick % g.num_genes();
        let mut bits = g.bits().to_vec();
        for b in 0..5 {
            if mask >> b & 1 == 1 {
                bits[5 * i + b] ^= true;
            }
        }
        let flipped = g.with_bits(bits).unwrap();
        let slot = (i / g.num_qubits(), i % g.num_qubits());
        let others = |c: &CircuitSpec| -> Vec<_> {
            c.gates().iter().filter(|s| (s.layer, s.qubit) != slot).cloned().collect()
        };
        prop_assert_eq!(others(&decode_genome(&g)), others(&decode_genome(&flipped)));
    }

    #[test]
    fn scaler_sends_training_extremes_to_unit_bounds(seed in any::<u64>(), n in 2usize..60) {
        let data = make_blobs(n, 3, 2.min(n), 1.5, seed).unwrap();
        let s = fit_scale(&data).unwrap();
        let scaled = apply_scale(&s, &data).unwrap();
        for k in 0..3 {
            let col: Vec<f64> = scaled.features.iter().map(|r| r[k]).collect();
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if s.maxs[k] > s.mins[k] {
                prop_assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
            }
        }
        for (raw, sc) in data.features.iter().zip(&scaled.features) {
            for (a, b) in raw.iter().zip(s.inverse(sc)) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn split_is_a_stratified_partition(seed in any::<u64>(), n in 20usize..200, frac in 0.2f64..0.8) {
        let data = make_moons(n, 0.2, seed).unwrap();
        let parts = split(&data, frac, seed ^ 1).unwrap();
        let mut all: Vec<usize> = parts.train_indices.iter().chain(&parts.test_indices).cloned().collect();
        all.sort();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(parts.train.len(), parts.train_indices.len());
        let tr = parts.train.class_counts();
        let te = parts.test.class_counts();
        for c in 0..2 {
            prop_assert!(tr[c] >= 1 && te[c] >= 1);
            let total = (tr[c] + te[c]) as f64;
            prop_assert!((tr[c] as f64 - frac * total).abs() <= 1.0 + 1e-9);
        }
        prop_assert!((parts.train.len() as f64 - frac * n as f64).abs() <= 1.0 + 1e-9);
    }
}

#[test]
fn split_of_150_points_gives_105_for_training() {
    let data = make_moons(150, 0.2, 3).unwrap();
    let parts = split(&data, 0.7, 3).unwrap();
    assert_eq!(parts.train.len(), 105);
    assert_eq!(parts.test.len(), 45);
}

#[test]
fn generators_are_deterministic_and_balanced() {
    assert_eq!(
        make_moons(101, 0.2, 4).unwrap().features,
        make_moons(101, 0.2, 4).unwrap().features
    );
    assert_ne!(
        make_moons(101, 0.2, 4).unwrap().features,
        make_moons(101, 0.2, 5).unwrap().features
    );
    assert_eq!(
        make_moons(101, 0.0, 4).unwrap().class_counts(),
        vec![51, 50]
    );
    let blobs = make_blobs(500, 5, 5, 1.0, 2).unwrap();
    assert_eq!(blobs.class_counts(), vec![100; 5]);
    assert!(make_moons(1, 0.1, 0).is_err());
    // noiseless moons lie on their arcs
    let clean = make_moons(50, 0.0, 9).unwrap();
    for (x, &l) in clean.features.iter().zip(&clean.labels) {
        let (cx, cy) = if l == 0 { (0.0, 0.0) } else { (1.0, 0.5) };
        let r = ((x[0] - cx).powi(2) + (x[1] - cy).powi(2)).sqrt();
        assert!((r - 1.0).abs() < 1e-12);
    }
}

#[test]
fn csv_round_trip_preserves_values_and_class_names() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let data = Dataset::new(
        vec![vec![0.5, -1.25], vec![3.0, 1e-7], vec![-2.0, 4.0]],
        vec![1, 0, 1],
        vec!["healthy".into(), "sick".into()],
    )
    .unwrap();
    data.write_csv(std::fs::File::create(&path).unwrap())
        .unwrap();
    let back = load_csv(&path, "label").unwrap();
    assert_eq!(back.features, data.features);
    let names: Vec<&str> = back
        .labels
        .iter()
        .map(|&l| back.class_names[l].as_str())
        .collect();
    assert_eq!(names, ["sick", "healthy", "sick"]);
    assert!(load_csv(&path, "diagnosis").is_err());
    assert!(load_csv(dir.path().join("absent.csv"), "label").is_err());
}

#[test]
fn csv_with_categorical_column_is_encoded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    std::fs::write(
        &path,
        "proto,bytes,label\ntcp,10,a\nudp,20,b\ntcp,30,a\nicmp,5,b\n",
    )
    .unwrap();
    let data = load_csv(&path, "label").unwrap();
    assert_eq!(data.num_features(), 2);
    let codes: BTreeSet<u64> = data.features.iter().map(|r| r[0].to_bits()).collect();
    assert_eq!(codes.len(), 3);
    assert_eq!(data.features[0][0], data.features[2][0]);
    assert_eq!(data.class_counts(), vec![2, 2]);
}
