use rand::Rng;

use crate::error::{Error, Result};
use crate::qmath::{fidelity_of_sqrts, psd_sqrt, trace_distance, DensityMatrix, ProbVector};

/// A channel represented by its outputs on the computational basis inputs 0..d1.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelConcept {
    outputs: Vec<DensityMatrix>,
}

impl ChannelConcept {
    pub fn new(outputs: Vec<DensityMatrix>) -> Result<Self> {
        let d2 = outputs.first().ok_or(Error::EmptySet)?.dim();
        if let Some(bad) = outputs.iter().find(|o| o.dim() != d2) {
            return Err(Error::DimMismatch { expected: d2, found: bad.dim() });
        }
        Ok(Self { outputs })
    }

    /// The same state on every one of `in_dim` inputs.
    pub fn constant(state: DensityMatrix, in_dim: usize) -> Self {
        assert!(in_dim >= 1, "a concept needs at least one input");
        Self { outputs: vec![state; in_dim] }
    }

    pub fn in_dim(&self) -> usize {
        self.outputs.len()
    }

    pub fn out_dim(&self) -> usize {
        self.outputs[0].dim()
    }

    pub fn output(&self, x: usize) -> &DensityMatrix {
        &self.outputs[x]
    }

    pub fn outputs(&self) -> &[DensityMatrix] {
        &self.outputs
    }
}

/// Non-empty indexed family of concepts with common dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct ConceptClass {
    concepts: Vec<ChannelConcept>,
}

impl ConceptClass {
    pub fn new(concepts: Vec<ChannelConcept>) -> Result<Self> {
        let first = concepts.first().ok_or(Error::EmptySet)?;
        let (d1, d2) = (first.in_dim(), first.out_dim());
        for c in &concepts {
            if c.in_dim() != d1 {
                return Err(Error::DimMismatch { expected: d1, found: c.in_dim() });
            }
            if c.out_dim() != d2 {
                return Err(Error::DimMismatch { expected: d2, found: c.out_dim() });
            }
        }
        Ok(Self { concepts })
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn in_dim(&self) -> usize {
        self.concepts[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.concepts[0].out_dim()
    }

    pub fn get(&self, i: usize) -> &ChannelConcept {
        &self.concepts[i]
    }

    pub fn concepts(&self) -> &[ChannelConcept] {
        &self.concepts
    }

    /// First (concept, input) whose output is not rank one within `tol`.
    pub fn first_mixed_output(&self, tol: f64) -> Option<(usize, usize)> {
        self.concepts.iter().enumerate().find_map(|(ci, c)| {
            c.outputs.iter().position(|o| !o.is_pure(tol)).map(|x| (ci, x))
        })
    }
}

/// Distribution over the computational basis inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct InputDistribution(ProbVector);

impl InputDistribution {
    pub fn new(weights: ProbVector) -> Self {
        Self(weights)
    }

    pub fn uniform(in_dim: usize) -> Self {
        Self(ProbVector::uniform(in_dim))
    }

    pub fn point_mass(in_dim: usize, x: usize) -> Self {
        Self(ProbVector::point_mass(in_dim, x))
    }

    /// Empirical distribution of observed input labels.
    pub fn empirical(in_dim: usize, labels: &[usize]) -> Result<Self> {
        let mut counts = vec![0.0; in_dim];
        for &x in labels {
            if x >= in_dim {
                return Err(Error::DimMismatch { expected: in_dim, found: x + 1 });
            }
            counts[x] += 1.0;
        }
        Ok(Self(ProbVector::normalized(counts)?))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.0.get(x)
    }

    pub fn weights(&self) -> &ProbVector {
        &self.0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.0.sample_with(rng.random::<f64>())
    }
}

/// E_{x~D} Δ_tr(c1(x), c2(x)), computed exactly over the inputs.
pub fn concept_distance(c1: &ChannelConcept, c2: &ChannelConcept, dist: &InputDistribution) -> Result<f64> {
    if c1.in_dim() != c2.in_dim() || c1.in_dim() != dist.len() {
        return Err(Error::DimMismatch { expected: c1.in_dim(), found: c2.in_dim().max(dist.len()) });
    }
    let mut total = 0.0;
    for x in 0..c1.in_dim() {
        let w = dist.weight(x);
        if w > 0.0 {
            total += w * trace_distance(c1.output(x), c2.output(x))?;
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Symmetric matrix of pairwise concept distances with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from the upper triangle; `f(i, j)` is called for i < j only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self { n, data }
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Result<f64>) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j)?;
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Ok(Self { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }
}

pub fn distance_matrix(class: &ConceptClass, dist: &InputDistribution) -> Result<DistanceMatrix> {
    distance_matrix_of(class.concepts(), dist)
}

/// Distance matrix over an arbitrary list of concepts (e.g. a surviving subset).
pub fn distance_matrix_of<C: std::borrow::Borrow<ChannelConcept>>(
    concepts: &[C],
    dist: &InputDistribution,
) -> Result<DistanceMatrix> {
    DistanceMatrix::try_from_fn(concepts.len(), |i, j| {
        concept_distance(concepts[i].borrow(), concepts[j].borrow(), dist)
    })
}

/// max F(σ, ρ) over σ ∈ s1, ρ ∈ s2.
pub fn set_fidelity(s1: &[DensityMatrix], s2: &[DensityMatrix]) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySet);
    }
    let dim = s1[0].dim();
    if let Some(bad) = s1.iter().chain(s2).find(|s| s.dim() != dim) {
        return Err(Error::DimMismatch { expected: dim, found: bad.dim() });
    }
    let roots2 = s2.iter().map(|b| psd_sqrt(b.matrix())).collect::<Result<Vec<_>>>()?;
    let mut best = 0.0f64;
    for a in s1 {
        let sqrt_a = psd_sqrt(a.matrix())?;
        for sqrt_b in &roots2 {
            best = best.max(fidelity_of_sqrts(&sqrt_a, sqrt_b));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn basis(k: usize) -> DensityMatrix {
        DensityMatrix::basis(2, k)
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn concept_distance_examples() {
        let c = ChannelConcept::new(vec![basis(0), basis(1)]).unwrap();
        let d = InputDistribution::new(ProbVector::new(vec![0.3, 0.7]).unwrap());
        assert_eq!(concept_distance(&c, &c, &d).unwrap(), 0.0);

        let zero = ChannelConcept::constant(basis(0), 2);
        let one = ChannelConcept::constant(basis(1), 2);
        assert!((concept_distance(&zero, &one, &d).unwrap() - 1.0).abs() < 1e-12);

        let swapped = ChannelConcept::new(vec![basis(1), basis(0)]).unwrap();
        assert!((concept_distance(&c, &swapped, &d).unwrap() - 1.0).abs() < 1e-12);

        let d3 = InputDistribution::uniform(3);
        assert!(matches!(concept_distance(&c, &swapped, &d3), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn distance_matrix_examples() {
        let single = ConceptClass::new(vec![ChannelConcept::constant(basis(0), 1)]).unwrap();
        let m = distance_matrix(&single, &InputDistribution::uniform(1)).unwrap();
        assert_eq!(m.rows(), vec![vec![0.0]]);

        let dup = ConceptClass::new(vec![ChannelConcept::constant(plus(), 1); 3]).unwrap();
        let m = distance_matrix(&dup, &InputDistribution::uniform(1)).unwrap();
        assert!(m.rows().iter().flatten().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn set_fidelity_examples() {
        assert!(set_fidelity(&[basis(0)], &[basis(1)]).unwrap() < 1e-8);
        assert!((set_fidelity(&[basis(0)], &[plus()]).unwrap() - 0.707_106_78).abs() < 1e-6);
        assert!((set_fidelity(&[basis(0), plus()], &[basis(1), plus()]).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(set_fidelity(&[], &[basis(0)]), Err(Error::EmptySet)));
    }

    #[test]
    fn class_requires_common_dims() {
        let a = ChannelConcept::constant(basis(0), 2);
        let b = ChannelConcept::constant(DensityMatrix::basis(3, 0), 2);
        assert!(ConceptClass::new(vec![a.clone(), b]).is_err());
        let c = ChannelConcept::constant(basis(0), 3);
        assert!(ConceptClass::new(vec![a, c]).is_err());
        assert!(matches!(ConceptClass::new(vec![]), Err(Error::EmptySet)));
    }

    #[test]
    fn empirical_distribution() {
        let d = InputDistribution::empirical(3, &[0, 2, 2, 2]).unwrap();
        assert_eq!(d.weights().as_slice(), &[0.25, 0.0, 0.75]);
    }
}
