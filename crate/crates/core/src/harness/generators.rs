//! Concept-class generators, including the "string" and clustered pathologies.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelConcept, ConceptClass, InputDistribution};
use crate::error::{Error, Result};
use crate::qmath::{haar_unitary, ComplexMatrix, DensityMatrix};

/// A class recipe. Every kind draws all of its randomness from the rng passed to [`gen_class`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Haar-random pure output per concept and input.
    RandomPure { n: usize, d1: usize, d2: usize },
    /// Normalized Wishart output G·G†/tr with G a d2×rank complex Gaussian; rank defaults to d2.
    RandomMixed { n: usize, d1: usize, d2: usize, rank: Option<usize> },
    /// Constant concepts cos θ_k|0⟩ + sin θ_k|1⟩ with θ_k = k·asin(step), so neighbours sit at
    /// trace distance `step`.
    String { n: usize, d1: usize, d2: usize, step: f64 },
    /// Concepts assigned round-robin to `clusters` Haar-pure centers, each output
    /// (1 − spread)·center + spread·(random mixed state).
    Clustered { n: usize, d1: usize, d2: usize, clusters: usize, spread: f64 },
    /// Explicit states as d2×d2 arrays of [re, im] pairs, wrapped as constant single-input concepts.
    ConstantSet { states: Vec<Vec<Vec<[f64; 2]>>> },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::RandomPure { .. } => "random_pure",
            Generator::RandomMixed { .. } => "random_mixed",
            Generator::String { .. } => "string",
            Generator::Clustered { .. } => "clustered",
            Generator::ConstantSet { .. } => "constant_set",
        }
    }

    pub fn constant_set(states: &[DensityMatrix]) -> Self {
        let states = states
            .iter()
            .map(|s| {
                let m = s.matrix();
                (0..m.dim()).map(|i| (0..m.dim()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect()).collect()
            })
            .collect();
        Generator::ConstantSet { states }
    }
}

fn check_sizes(n: usize, d1: usize, d2: usize) -> Result<()> {
    if n == 0 || d1 == 0 || d2 == 0 {
        return Err(Error::InvalidParams(format!("n, d1, d2 must be positive (got {n}, {d1}, {d2})")));
    }
    Ok(())
}

/// Builds the class and the uniform input distribution over its d1 inputs.
pub fn gen_class<R: Rng + ?Sized>(generator: &Generator, rng: &mut R) -> Result<(ConceptClass, InputDistribution)> {
    let concepts = match *generator {
        Generator::RandomPure { n, d1, d2 } => {
            check_sizes(n, d1, d2)?;
            (0..n)
                .map(|_| ChannelConcept::new((0..d1).map(|_| haar_pure(d2, rng)).collect()))
                .collect::<Result<Vec<_>>>()?
        }
        Generator::RandomMixed { n, d1, d2, rank } => {
            check_sizes(n, d1, d2)?;
            let rank = rank.unwrap_or(d2);
            if rank == 0 || rank > d2 {
                return Err(Error::InvalidParams(format!("rank {rank} outside 1..={d2}")));
            }
            (0..n)
                .map(|_| ChannelConcept::new((0..d1).map(|_| wishart_state(d2, rank, rng)).collect()))
                .collect::<Result<Vec<_>>>()?
        }
        Generator::String { n, d1, d2, step } => {
            check_sizes(n, d1, d2)?;
            if d2 < 2 {
                return Err(Error::InvalidParams("string needs d2 >= 2".into()));
            }
            if !(step > 0.0 && step <= 1.0) {
                return Err(Error::InvalidParams(format!("step {step} outside (0, 1]")));
            }
            let angle = step.asin();
            if (n - 1) as f64 * angle > std::f64::consts::FRAC_PI_2 + 1e-12 {
                return Err(Error::InvalidParams(format!(
                    "{n} states at step {step} overrun the quarter turn between |0> and |1>"
                )));
            }
            (0..n)
                .map(|k| {
                    let theta = k as f64 * angle;
                    let mut psi = vec![Complex64::new(0.0, 0.0); d2];
                    psi[0] = Complex64::new(theta.cos(), 0.0);
                    psi[1] = Complex64::new(theta.sin(), 0.0);
                    Ok(ChannelConcept::constant(DensityMatrix::pure(&psi)?, d1))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Generator::Clustered { n, d1, d2, clusters, spread } => {
            check_sizes(n, d1, d2)?;
            if clusters == 0 || clusters > n {
                return Err(Error::InvalidParams(format!("clusters {clusters} outside 1..={n}")));
            }
            if !(0.0..=1.0).contains(&spread) {
                return Err(Error::InvalidParams(format!("spread {spread} outside [0, 1]")));
            }
            let centers: Vec<Vec<DensityMatrix>> =
                (0..clusters).map(|_| (0..d1).map(|_| haar_pure(d2, rng)).collect()).collect();
            (0..n)
                .map(|c| {
                    let outputs = centers[c % clusters]
                        .iter()
                        .map(|center| {
                            if spread == 0.0 {
                                return Ok(center.clone());
                            }
                            center.mix(&wishart_state(d2, d2, rng), spread)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    ChannelConcept::new(outputs)
                })
                .collect::<Result<Vec<_>>>()?
        }
        Generator::ConstantSet { ref states } => {
            if states.is_empty() {
                return Err(Error::InvalidParams("constant_set needs at least one state".into()));
            }
            states
                .iter()
                .enumerate()
                .map(|(k, rows)| {
                    let rows: Vec<Vec<Complex64>> =
                        rows.iter().map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect();
                    let state = ComplexMatrix::from_rows(&rows)
                        .and_then(DensityMatrix::new)
                        .map_err(|e| Error::InvalidParams(format!("state {k}: {e}")))?;
                    Ok(ChannelConcept::constant(state, 1))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let class = ConceptClass::new(concepts)?;
    let dist = InputDistribution::uniform(class.in_dim());
    Ok((class, dist))
}

/// First column of a Haar unitary.
pub fn haar_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let u = haar_unitary(dim, rng);
    let psi: Vec<Complex64> = (0..dim).map(|i| u.get(i, 0)).collect();
    DensityMatrix::pure(&psi).expect("unitary column is a unit vector")
}

/// G·G†/tr(G·G†) with G a dim×rank matrix of standard complex Gaussians.
pub fn wishart_state<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = nalgebra::DMatrix::<Complex64>::from_fn(dim, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    let m = ComplexMatrix::new(w.map(|z| z / tr)).expect("finite square matrix");
    DensityMatrix::new(m.hermitian_part()).expect("Wishart matrix is a density matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{class_to_json, concept_distance, distance_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn string_neighbours_and_endpoints() {
        let g = Generator::String { n: 5, d1: 1, d2: 2, step: 0.1 };
        let (class, dist) = gen_class(&g, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for k in 0..4 {
            let d = concept_distance(class.get(k), class.get(k + 1), &dist).unwrap();
            assert!((d - 0.1).abs() <= 0.02, "{d}");
        }
        assert!(concept_distance(class.get(0), class.get(4), &dist).unwrap() >= 0.3);
    }

    #[test]
    fn single_tight_cluster_has_zero_distances() {
        let g = Generator::Clustered { n: 6, d1: 2, d2: 3, clusters: 1, spread: 0.0 };
        let (class, dist) = gen_class(&g, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let d = distance_matrix(&class, &dist).unwrap();
        assert!(d.rows().iter().flatten().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn random_pure_is_deterministic() {
        let g = Generator::RandomPure { n: 4, d1: 1, d2: 2 };
        let a = gen_class(&g, &mut ChaCha8Rng::seed_from_u64(11)).unwrap().0;
        let b = gen_class(&g, &mut ChaCha8Rng::seed_from_u64(11)).unwrap().0;
        assert_eq!(class_to_json(&a), class_to_json(&b));
        assert!(a.first_mixed_output(1e-8).is_none());
    }

    #[test]
    fn wishart_rank_is_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = wishart_state(4, 1, &mut rng);
        assert!(rho.is_pure(1e-9));
        let full = wishart_state(4, 4, &mut rng);
        assert!(!full.is_pure(1e-3));
    }

    #[test]
    fn constant_set_round_trip() {
        let states = vec![DensityMatrix::basis(2, 0), DensityMatrix::maximally_mixed(2)];
        let (class, _) = gen_class(&Generator::constant_set(&states), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(class.len(), 2);
        assert!(class.get(1).output(0).matrix().max_abs_diff(states[1].matrix()) == 0.0);
    }

    #[test]
    fn bad_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bad = [
            Generator::RandomPure { n: 0, d1: 1, d2: 2 },
            Generator::RandomMixed { n: 2, d1: 1, d2: 2, rank: Some(3) },
            Generator::String { n: 30, d1: 1, d2: 2, step: 0.5 },
            Generator::String { n: 3, d1: 1, d2: 1, step: 0.1 },
            Generator::Clustered { n: 3, d1: 1, d2: 2, clusters: 4, spread: 0.1 },
            Generator::Clustered { n: 3, d1: 1, d2: 2, clusters: 1, spread: 1.5 },
            Generator::ConstantSet { states: vec![] },
            Generator::ConstantSet { states: vec![vec![vec![[0.9, 0.0]]]] },
        ];
        for g in &bad {
            assert!(matches!(gen_class(g, &mut rng), Err(Error::InvalidParams(_))), "{g:?}");
        }
    }
}
