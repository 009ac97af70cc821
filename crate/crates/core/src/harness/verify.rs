//! Numerical checks of the lemmas the learners rely on, run on random instances.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channels::DistanceMatrix;
use crate::discrimination::{
    block_lemma_check, bsd_error_bound, minimax_bsd, minimax_regret, minimax_step, pgm_confusion, BsdInstance,
    WeightedStateSet,
};
use crate::error::{Error, Result};
use crate::learners::partition;
use crate::qmath::{
    fidelity, haar_basis, outcome_distribution, tensor_product, trace_distance, ComplexMatrix, DensityMatrix,
    ProbVector,
};

use super::generators::{haar_pure, wishart_state};

/// Haar-pure half of the time, otherwise Wishart of random rank.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    if rng.random_bool(0.5) {
        haar_pure(dim, rng)
    } else {
        let rank = rng.random_range(1..=dim);
        wishart_state(dim, rank, rng)
    }
}

fn random_priors<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProbVector {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    ProbVector::normalized(w).expect("positive weights")
}

#[derive(Clone, Debug, Serialize)]
pub struct PgmBoundReport {
    pub instances: usize,
    pub violations: usize,
    /// max over instances of LHS − RHS
    pub max_excess: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Σ_{i∈yes} Σ_{j∈no} [p_i Pr(PGM(σ_i)=j) + p_j Pr(PGM(σ_j)=i)] for the PGM of yes ++ no.
pub fn grouped_pgm_lhs(yes: &[DensityMatrix], no: &[DensityMatrix], priors: &ProbVector) -> Result<f64> {
    let states: Vec<DensityMatrix> = yes.iter().chain(no).cloned().collect();
    let conf = pgm_confusion(&WeightedStateSet::new(states, priors.clone())?)?;
    let split = yes.len();
    let mut lhs = 0.0;
    for i in 0..split {
        for j in split..conf.len() {
            lhs += priors.get(i) * conf[i][j] + priors.get(j) * conf[j][i];
        }
    }
    Ok(lhs)
}

pub fn verify_pgm_bound<R: Rng + ?Sized>(
    instances: usize,
    max_dim: usize,
    max_size: usize,
    rng: &mut R,
) -> Result<PgmBoundReport> {
    if max_dim < 2 || max_size < 1 {
        return Err(Error::InvalidParams("need max_dim >= 2 and max_size >= 1".into()));
    }
    let tol = 1e-8;
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..instances {
        let dim = rng.random_range(2..=max_dim);
        let yes: Vec<_> = (0..rng.random_range(1..=max_size)).map(|_| random_state(dim, rng)).collect();
        let no: Vec<_> = (0..rng.random_range(1..=max_size)).map(|_| random_state(dim, rng)).collect();
        let priors = random_priors(yes.len() + no.len(), rng);
        let lhs = grouped_pgm_lhs(&yes, &no, &priors)?;
        let rhs = bsd_error_bound(&BsdInstance::from_sets(yes, no)?)?;
        max_excess = max_excess.max(lhs - rhs);
        violations += usize::from(lhs > rhs + tol);
    }
    Ok(PgmBoundReport { instances, violations, max_excess, tol, passed: violations == 0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockLemmaReport {
    pub instances: usize,
    pub splits: usize,
    pub violations: usize,
    pub max_excess: f64,
    /// |lhs − rhs| on the all-ones 2×2 matrix, where the bound is tight.
    pub equality_gap: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn verify_block_lemma<R: Rng + ?Sized>(instances: usize, max_dim: usize, rng: &mut R) -> Result<BlockLemmaReport> {
    if max_dim < 2 {
        return Err(Error::InvalidParams("need max_dim >= 2".into()));
    }
    let tol = 1e-9;
    let (mut splits, mut violations, mut max_excess) = (0, 0, f64::NEG_INFINITY);
    for _ in 0..instances {
        let dim = rng.random_range(2..=max_dim);
        let rank = rng.random_range(1..=dim);
        let g = nalgebra::DMatrix::<Complex64>::from_fn(dim, rank, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = ComplexMatrix::new((&g * g.adjoint()).map(|z| z / dim as f64))?.hermitian_part();
        for n1 in 1..dim {
            let (lhs, rhs) = block_lemma_check(&m, n1)?;
            splits += 1;
            max_excess = max_excess.max(lhs - rhs);
            violations += usize::from(lhs > rhs + tol);
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let (lhs, rhs) = block_lemma_check(&ComplexMatrix::from_rows(&[vec![one, one], vec![one, one]])?, 1)?;
    let equality_gap = (lhs - rhs).abs();
    Ok(BlockLemmaReport {
        instances,
        splits,
        violations,
        max_excess,
        equality_gap,
        tol,
        passed: violations == 0 && equality_gap <= 1e-12,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityLawsReport {
    pub pairs: usize,
    pub sandwich_violations: usize,
    pub tensor_violations: usize,
    pub max_tensor_gap: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Fuchs–van de Graaf 1 − F ≤ Δ ≤ √(1 − F²) and F(ρ1⊗ρ3, ρ2⊗ρ4) = F(ρ1,ρ2)·F(ρ3,ρ4).
pub fn verify_fidelity_laws<R: Rng + ?Sized>(pairs: usize, max_dim: usize, rng: &mut R) -> Result<FidelityLawsReport> {
    if max_dim < 2 {
        return Err(Error::InvalidParams("need max_dim >= 2".into()));
    }
    let tol = 1e-8;
    let (mut sandwich, mut tensor, mut max_gap) = (0, 0, 0.0f64);
    for _ in 0..pairs {
        let d = rng.random_range(2..=max_dim);
        let (a, b) = (random_state(d, rng), random_state(d, rng));
        let f = fidelity(&a, &b)?;
        let t = trace_distance(&a, &b)?;
        if 1.0 - f > t + tol || t > (1.0 - f * f).max(0.0).sqrt() + tol {
            sandwich += 1;
        }
        let e = rng.random_range(2..=3);
        let (c, d2) = (random_state(e, rng), random_state(e, rng));
        let joint = fidelity(&tensor_product(&a, &c)?, &tensor_product(&b, &d2)?)?;
        let gap = (joint - f * fidelity(&c, &d2)?).abs();
        max_gap = max_gap.max(gap);
        tensor += usize::from(gap > tol);
    }
    Ok(FidelityLawsReport {
        pairs,
        sandwich_violations: sandwich,
        tensor_violations: tensor,
        max_tensor_gap: max_gap,
        tol,
        passed: sandwich == 0 && tensor == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub instances: usize,
    pub violations: usize,
    pub first_failure: Option<String>,
    pub hand_traces_ok: bool,
    pub passed: bool,
}

/// Random pseudometric on n points: Euclidean, clustered with exact duplicates, graph
/// shortest paths, or identically zero.
pub fn random_pseudometric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DistanceMatrix {
    match rng.random_range(0..4) {
        0 => {
            let k = rng.random_range(1..=4);
            let scale = rng.random::<f64>();
            let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.random::<f64>() * scale).collect()).collect();
            DistanceMatrix::from_fn(n, |i, j| {
                pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            })
        }
        1 => {
            let clusters = rng.random_range(1..=n.clamp(1, 5));
            let centers: Vec<f64> = (0..clusters).map(|_| rng.random::<f64>()).collect();
            let jitter = if rng.random_bool(0.5) { 0.0 } else { 0.01 * rng.random::<f64>() };
            let pts: Vec<f64> =
                (0..n).map(|i| centers[i % clusters] + jitter * rng.random::<f64>()).collect();
            DistanceMatrix::from_fn(n, |i, j| (pts[i] - pts[j]).abs())
        }
        2 => {
            let mut d = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let w = rng.random::<f64>();
                    d[i][j] = w;
                    d[j][i] = w;
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let via = d[i][k] + d[k][j];
                        if via < d[i][j] {
                            d[i][j] = via;
                        }
                    }
                }
            }
            DistanceMatrix::from_fn(n, |i, j| d[i][j])
        }
        _ => DistanceMatrix::from_fn(n, |_, _| 0.0),
    }
}

pub fn verify_partition<R: Rng + ?Sized>(
    instances: usize,
    max_size: usize,
    epsilons: &[f64],
    rng: &mut R,
) -> Result<PartitionReport> {
    if max_size < 1 || epsilons.is_empty() {
        return Err(Error::InvalidParams("need max_size >= 1 and at least one epsilon".into()));
    }
    let mut violations = 0;
    let mut first_failure = None;
    for k in 0..instances {
        let n = rng.random_range(1..=max_size);
        let eps = epsilons[k % epsilons.len()];
        let d = random_pseudometric(n, rng);
        let problems = match partition(&d, eps, 4.0, rng) {
            Ok(r) => r.violations(&d, eps, 1e-12),
            Err(e) => vec![e.to_string()],
        };
        if !problems.is_empty() {
            violations += 1;
            first_failure.get_or_insert_with(|| format!("n = {n}, eps = {eps}: {}", problems.join("; ")));
        }
    }
    let hand_traces_ok = partition_hand_traces(rng)?;
    Ok(PartitionReport { instances, violations, first_failure, hand_traces_ok, passed: violations == 0 && hand_traces_ok })
}

/// The three worked examples: nine coincident points, a single point, and two far clusters of five.
pub fn partition_hand_traces<R: Rng + ?Sized>(rng: &mut R) -> Result<bool> {
    let all: Vec<usize> = (0..9).collect();
    let r = partition(&DistanceMatrix::from_fn(9, |_, _| 0.0), 0.2, 4.0, rng)?;
    let zeros = r.flag_extreme && r.i_star == 2 && r.s_yes == all && r.s_unknown.is_empty() && r.s_no.is_empty();

    let r = partition(&DistanceMatrix::from_fn(1, |_, _| 0.0), 0.2, 4.0, rng)?;
    let single = r.flag_extreme && r.s_yes == vec![0];

    let d = DistanceMatrix::from_fn(10, |i, j| if (i < 5) == (j < 5) { 0.0 } else { 1.0 });
    let r = partition(&d, 0.2, 4.0, rng)?;
    let (own, other): (Vec<usize>, Vec<usize>) = (0..10).partition(|&i| (i < 5) == (r.c_c < 5));
    let clusters = r.flag_extreme && r.i_star == 2 && r.s_yes == own && r.s_no == other && r.s_unknown.is_empty();
    Ok(zeros && single && clusters)
}

#[derive(Clone, Debug, Serialize)]
pub struct SenEstimate {
    pub d: usize,
    pub trials: usize,
    pub p5: f64,
    pub median: f64,
    pub min: f64,
    /// ‖M(σ1) − M(σ2)‖₁ / ‖σ1 − σ2‖_F per random pair, in draw order.
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SenReport {
    pub estimates: Vec<SenEstimate>,
    pub threshold: f64,
    pub passed: bool,
}

/// Nearest-rank quantile of an unsorted sample.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

pub fn verify_sen<R: Rng + ?Sized>(dims: &[usize], trials: usize, rng: &mut R) -> Result<SenReport> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) || trials < 100 {
        return Err(Error::InvalidParams("need dimensions >= 2 and at least 100 trials".into()));
    }
    let mut estimates = Vec::new();
    for &d in dims {
        let mut ratios = Vec::with_capacity(trials);
        while ratios.len() < trials {
            let (a, b) = (haar_pure(d, rng), haar_pure(d, rng));
            let frob = (a.matrix() - b.matrix()).frobenius_norm();
            if frob < 1e-12 {
                continue;
            }
            let basis = haar_basis(d, rng);
            let (p, q) = (outcome_distribution(&a, &basis)?, outcome_distribution(&b, &basis)?);
            let l1: f64 = p.as_slice().iter().zip(q.as_slice()).map(|(x, y)| (x - y).abs()).sum();
            ratios.push(l1 / frob);
        }
        estimates.push(SenEstimate {
            d,
            trials,
            p5: quantile(&ratios, 0.05),
            median: quantile(&ratios, 0.5),
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios,
        });
    }
    let threshold = 0.1;
    let above = estimates.iter().all(|e| e.p5 >= threshold);
    let steady = estimates.last().unwrap().p5 >= 0.5 * estimates[0].p5;
    Ok(SenReport { estimates, threshold, passed: above && steady })
}

#[derive(Clone, Debug, Serialize)]
pub struct BsdReport {
    pub instances: usize,
    pub rounds: usize,
    pub violations: usize,
    /// max over instances of worst-case error − (N²η + regret)
    pub max_excess: f64,
    pub max_eta: f64,
    pub passed: bool,
}

/// Random instance with cross fidelity at most `max_eta`: yes states live near the first half
/// of the space and no states near the second, each blended with a small random component.
pub fn random_separated_instance<R: Rng + ?Sized>(
    dim: usize,
    n_yes: usize,
    n_no: usize,
    max_eta: f64,
    rng: &mut R,
) -> Result<BsdInstance> {
    let half = dim / 2;
    let side = |lo: usize, hi: usize, rng: &mut R| -> DensityMatrix {
        let inner = random_state(hi - lo, rng);
        let m = ComplexMatrix::from_fn(dim, |i, j| {
            if (lo..hi).contains(&i) && (lo..hi).contains(&j) {
                inner.matrix().get(i - lo, j - lo)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .expect("finite entries");
        DensityMatrix::new(m).expect("embedded state")
    };
    let mut blend = 1e-3;
    loop {
        let draw = |lo, hi, n, rng: &mut R| -> Result<Vec<DensityMatrix>> {
            (0..n).map(|_| side(lo, hi, rng).mix(&random_state(dim, rng), blend * rng.random::<f64>())).collect()
        };
        let yes = draw(0, half, n_yes, rng)?;
        let no = draw(half, dim, n_no, rng)?;
        let inst = BsdInstance::from_sets(yes, no)?;
        if inst.eta() <= max_eta {
            return Ok(inst);
        }
        blend /= 4.0;
    }
}

pub fn verify_bsd<R: Rng + ?Sized>(
    instances: usize,
    max_dim: usize,
    max_n: usize,
    rounds: usize,
    max_eta: f64,
    rng: &mut R,
) -> Result<BsdReport> {
    if max_dim < 2 || max_n < 1 || rounds < 1 {
        return Err(Error::InvalidParams("need max_dim >= 2, max_n >= 1, rounds >= 1".into()));
    }
    let (mut violations, mut max_excess, mut top_eta) = (0, f64::NEG_INFINITY, 0.0f64);
    for _ in 0..instances {
        let dim = rng.random_range(2..=max_dim);
        let inst = random_separated_instance(
            dim,
            rng.random_range(1..=max_n),
            rng.random_range(1..=max_n),
            max_eta,
            rng,
        )?;
        let m = minimax_bsd(&inst, rounds, minimax_step(inst.len(), rounds))?;
        let n = inst.cap_n() as f64;
        let bound = n * n * inst.eta() + minimax_regret(inst.cap_n(), rounds);
        let excess = inst.worst_case_error(&m) - bound;
        max_excess = max_excess.max(excess);
        top_eta = top_eta.max(inst.eta());
        violations += usize::from(excess > 0.0);
    }
    Ok(BsdReport { instances, rounds, violations, max_excess, max_eta: top_eta, passed: violations == 0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct BirthdayRow {
    pub d: usize,
    /// Non-e₀ support size and median draws to first collision under D₁.
    pub support_d1: usize,
    pub median_d1: f64,
    pub support_d2: usize,
    pub median_d2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BirthdayReport {
    pub repetitions: usize,
    pub rows: Vec<BirthdayRow>,
    /// median_d1 at the largest d over median_d1 at the smallest.
    pub ratio: f64,
    pub passed: bool,
}

/// Draws from "1/3 on e₀, the rest uniform over `support` other basis vectors" until a non-e₀
/// outcome repeats; returns the number of draws.
fn draws_to_collision<R: Rng + ?Sized>(support: usize, rng: &mut R) -> usize {
    let mut seen = vec![false; support];
    let mut draws = 0;
    loop {
        draws += 1;
        if rng.random_range(0..3) == 0 {
            continue;
        }
        let k = rng.random_range(0..support);
        if seen[k] {
            return draws;
        }
        seen[k] = true;
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Classical hard instance for agnostic learning: C₁ is the point mass on e₀ and C₂ uniform on
/// e₁..e_d. D₁ puts 1/3 on e₀ and 1/d on 2d/3 other vectors; D₂ puts 1/3 on e₀ and 100/d on
/// 2d/300 others. Telling them apart needs a collision among the non-e₀ draws.
pub fn birthday_demo<R: Rng + ?Sized>(dims: &[usize], repetitions: usize, rng: &mut R) -> Result<BirthdayReport> {
    if dims.is_empty() || dims.iter().any(|d| ![100, 400, 1600].contains(d)) || repetitions == 0 {
        return Err(Error::InvalidParams("dims must be drawn from {100, 400, 1600}; repetitions >= 1".into()));
    }
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let rows: Vec<BirthdayRow> = dims
        .iter()
        .map(|&d| {
            let support_d1 = 2 * d / 3;
            let support_d2 = ((2 * d) as f64 / 300.0).round().max(1.0) as usize;
            let mut a: Vec<f64> = (0..repetitions).map(|_| draws_to_collision(support_d1, rng) as f64).collect();
            let mut b: Vec<f64> = (0..repetitions).map(|_| draws_to_collision(support_d2, rng) as f64).collect();
            BirthdayRow { d, support_d1, median_d1: median(&mut a), support_d2, median_d2: median(&mut b) }
        })
        .collect();
    let ratio = rows.last().unwrap().median_d1 / rows[0].median_d1;
    let increasing = rows.windows(2).all(|w| w[0].median_d1 < w[1].median_d1);
    let base_ok = rows.iter().filter(|r| r.d == 100).all(|r| (5.0..=25.0).contains(&r.median_d1));
    let ratio_ok = !(dims.contains(&100) && dims.contains(&1600)) || (2.5..=6.5).contains(&ratio);
    Ok(BirthdayReport { repetitions, rows, ratio, passed: increasing && base_ok && ratio_ok })
}
