use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpac::channels::{class_from_json, class_to_json, distance_matrix, InputDistribution};
use qpac::discrimination::helstrom_binary;
use qpac::harness::{gen_class, haar_pure, random_state, Generator};
use qpac::qmath::{
    compress_product, fidelity, haar_basis, outcome_distribution, tensor_all, trace_distance, tv_distance, DIM_CAP,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), dim in 1usize..7) {
        let mut r = rng(seed);
        let (a, b) = (random_state(dim, &mut r), random_state(dim, &mut r));
        let f = fidelity(&a, &b).unwrap();
        let t = trace_distance(&a, &b).unwrap();
        prop_assert!(1.0 - f <= t + 1e-9);
        prop_assert!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn measurement_cannot_increase_distance(seed in any::<u64>(), dim in 2usize..7) {
        let mut r = rng(seed);
        let (a, b) = (random_state(dim, &mut r), random_state(dim, &mut r));
        let povm = haar_basis(dim, &mut r);
        let tv = tv_distance(&outcome_distribution(&a, &povm).unwrap(), &outcome_distribution(&b, &povm).unwrap()).unwrap();
        prop_assert!(tv <= trace_distance(&a, &b).unwrap() + 1e-10);
    }

    #[test]
    fn helstrom_test_attains_trace_distance(seed in any::<u64>(), dim in 1usize..7) {
        let mut r = rng(seed);
        let (a, b) = (random_state(dim, &mut r), random_state(dim, &mut r));
        let m = helstrom_binary(a.matrix(), b.matrix()).unwrap();
        let gap = m.prob_yes(&a) - m.prob_yes(&b);
        prop_assert!((gap - trace_distance(&a, &b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn concept_distance_is_a_pseudometric(seed in any::<u64>(), n in 2usize..6, d1 in 1usize..4) {
        let mut r = rng(seed);
        let (class, dist) = gen_class(&Generator::RandomMixed { n, d1, d2: 3, rank: None }, &mut r).unwrap();
        let d = distance_matrix(&class, &dist).unwrap();
        for i in 0..n {
            prop_assert!(d.get(i, i).abs() < 1e-12);
            for j in 0..n {
                prop_assert!((d.get(i, j) - d.get(j, i)).abs() < 1e-12);
                for k in 0..n {
                    prop_assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-10);
                }
            }
        }
    }

    #[test]
    fn tv_triangle(seed in any::<u64>(), dim in 2usize..6) {
        let mut r = rng(seed);
        let povm = haar_basis(dim, &mut r);
        let p: Vec<_> = (0..3).map(|_| outcome_distribution(&random_state(dim, &mut r), &povm).unwrap()).collect();
        let ab = tv_distance(&p[0], &p[1]).unwrap();
        let bc = tv_distance(&p[1], &p[2]).unwrap();
        let ac = tv_distance(&p[0], &p[2]).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn class_json_round_trip(seed in any::<u64>(), n in 1usize..5, d1 in 1usize..3, d2 in 1usize..4) {
        let (class, _) = gen_class(&Generator::RandomMixed { n, d1, d2, rank: None }, &mut rng(seed)).unwrap();
        let back = class_from_json(&class_to_json(&class)).unwrap();
        for (a, b) in class.concepts().iter().zip(back.concepts()) {
            for (x, y) in a.outputs().iter().zip(b.outputs()) {
                prop_assert!(x.matrix().max_abs_diff(y.matrix()) <= 1e-15);
            }
        }
    }

    #[test]
    fn compressed_products_preserve_distances(seed in any::<u64>(), m0 in 1usize..4, m1 in 0usize..3) {
        let mut r = rng(seed);
        let a: Vec<_> = (0..2).map(|_| random_state(2, &mut r)).collect();
        let b: Vec<_> = (0..2).map(|_| random_state(2, &mut r)).collect();
        let expand = |s: &[qpac::qmath::DensityMatrix]| {
            let list: Vec<_> = std::iter::repeat_n(&s[0], m0).chain(std::iter::repeat_n(&s[1], m1)).collect();
            tensor_all(list, DIM_CAP).unwrap()
        };
        let parts = |s: &[qpac::qmath::DensityMatrix]| {
            let mut p = vec![(&s[0], m0)];
            if m1 > 0 {
                p.push((&s[1], m1));
            }
            compress_product(&p, DIM_CAP).unwrap()
        };
        let (ca, cb) = (parts(&a), parts(&b));
        let (fa, fb) = (expand(&a), expand(&b));
        prop_assert!((trace_distance(&ca, &cb).unwrap() - trace_distance(&fa, &fb).unwrap()).abs() < 1e-10);
        prop_assert!((fidelity(&ca, &cb).unwrap() - fidelity(&fa, &fb).unwrap()).abs() < 1e-10);
    }
}

/// |⟨0|ψ⟩|² of a Haar state in dimension d is Beta(1, d − 1), invariant under any fixed unitary.
#[test]
fn haar_overlap_passes_ks() {
    let n = 4000;
    for d in [2usize, 4, 16] {
        let mut r = rng(d as u64);
        let mut xs: Vec<f64> = (0..n).map(|_| haar_pure(d, &mut r).matrix().get(0, 0).re).collect();
        xs.sort_by(f64::total_cmp);
        let cdf = |x: f64| 1.0 - (1.0 - x).powi(d as i32 - 1);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| (cdf(x) - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - cdf(x)).abs()))
            .fold(0.0, f64::max);
        // 1% critical value
        assert!(ks < 1.63 / (n as f64).sqrt(), "d={d} ks={ks}");
    }
}

#[test]
fn empirical_distribution_matches_counts() {
    let d = InputDistribution::empirical(3, &[0, 2, 2, 2]).unwrap();
    assert_eq!(d.weights().as_slice(), &[0.25, 0.0, 0.75]);
}
