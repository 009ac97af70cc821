//! Splits the surviving concepts into yes / unknown / no groups with a distance gap between
//! yes and no, or reports an extreme case when a large cluster sits around one concept.

use rand::Rng;
use serde::Serialize;

use crate::channels::DistanceMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionResult {
    pub s_yes: Vec<usize>,
    pub s_unknown: Vec<usize>,
    pub s_no: Vec<usize>,
    pub flag_extreme: bool,
    /// Center of the last ball carved out.
    pub c_c: usize,
    pub gamma: f64,
    /// Bin index (1-based) at which the ball stopped growing in the last iteration.
    pub i_star: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Group {
    Yes,
    Unknown,
    No,
}

/// γ = ε / (divisor · max(1, log₂ n)).
pub fn partition_gamma(n: usize, epsilon: f64, gamma_divisor: f64) -> f64 {
    epsilon / (gamma_divisor * (n.max(1) as f64).log2().max(1.0))
}

pub fn partition<R: Rng + ?Sized>(
    distances: &DistanceMatrix,
    epsilon: f64,
    gamma_divisor: f64,
    rng: &mut R,
) -> Result<PartitionResult> {
    let n = distances.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if !(epsilon > 0.0) || !(gamma_divisor > 0.0) {
        return Err(Error::InvalidConfig("epsilon and gamma_divisor must be positive".into()));
    }
    let gamma = partition_gamma(n, epsilon, gamma_divisor);
    let mut group = vec![Group::No; n];
    let mut flag_extreme = false;
    let mut c_c = 0;
    let mut i_star = 0;

    // loop until |S_yes| + |S_unknown| > n/3
    while 3 * group.iter().filter(|g| **g != Group::No).count() <= n {
        let no: Vec<usize> = (0..n).filter(|&i| group[i] == Group::No).collect();
        c_c = no[rng.random_range(0..no.len())];

        // 0-based bin of every concept still in S_no
        let bin_of = |c: usize| (distances.get(c, c_c).max(0.0) / gamma).floor() as usize;
        let top_bin = no.iter().map(|&c| bin_of(c)).max().unwrap_or(0);
        let mut bins = vec![0usize; top_bin + 2];
        for &c in &no {
            bins[bin_of(c)] += 1;
        }

        // smallest 1-based i* ≥ 2 with b_{i*} < 2 Σ_{i < i*} b_i; exists since b_1 ≥ 1 and the
        // bins beyond the farthest concept are empty
        let mut prefix = bins[0];
        let mut found = None;
        for (idx, &b) in bins.iter().enumerate().skip(1) {
            if b < 2 * prefix {
                found = Some(idx + 1);
                break;
            }
            prefix += b;
        }
        i_star = found.ok_or_else(|| Error::InternalInvariantViolation("no admissible i* found".into()))?;
        if i_star as f64 * gamma > epsilon * (1.0 + 1e-12) {
            return Err(Error::InternalInvariantViolation(format!(
                "i* = {i_star} exceeds epsilon / gamma = {}",
                epsilon / gamma
            )));
        }
        let inner = prefix;
        let shell = bins[i_star - 1];

        if 3 * (inner + shell) > n {
            flag_extreme = true;
            group.iter_mut().for_each(|g| *g = Group::No);
        }
        for c in 0..n {
            if group[c] != Group::No {
                continue;
            }
            let b = bin_of(c);
            if b + 2 <= i_star {
                group[c] = Group::Yes;
            } else if b + 1 == i_star {
                group[c] = Group::Unknown;
            }
        }
        if flag_extreme {
            break;
        }
    }

    let members = |g: Group| (0..n).filter(|&i| group[i] == g).collect::<Vec<_>>();
    Ok(PartitionResult {
        s_yes: members(Group::Yes),
        s_unknown: members(Group::Unknown),
        s_no: members(Group::No),
        flag_extreme,
        c_c,
        gamma,
        i_star,
    })
}

impl PartitionResult {
    /// Every violated output guarantee, described; empty when the result is sound.
    pub fn violations(&self, distances: &DistanceMatrix, epsilon: f64, tol: f64) -> Vec<String> {
        let n = distances.len();
        let mut out = Vec::new();
        let mut seen = vec![0u8; n];
        for &i in self.s_yes.iter().chain(&self.s_unknown).chain(&self.s_no) {
            if i >= n {
                out.push(format!("index {i} out of range"));
            } else {
                seen[i] += 1;
            }
        }
        if seen.iter().any(|&s| s != 1) {
            out.push("sets do not partition the input".into());
        }
        let ninth = n.div_ceil(9);
        if self.s_yes.len() < ninth {
            out.push(format!("|S_yes| = {} < ceil(n/9) = {ninth}", self.s_yes.len()));
        }
        if !self.s_no.is_empty() {
            let gap = self
                .s_yes
                .iter()
                .flat_map(|&a| self.s_no.iter().map(move |&b| (a, b)))
                .map(|(a, b)| distances.get(a, b))
                .fold(f64::INFINITY, f64::min);
            if gap < self.gamma - tol {
                out.push(format!("yes/no gap {gap} below gamma {}", self.gamma));
            }
        }
        if !self.flag_extreme && self.s_no.len() < ninth {
            out.push(format!("|S_no| = {} < ceil(n/9) = {ninth} without extreme flag", self.s_no.len()));
        }
        if self.flag_extreme {
            for &c in self.s_yes.iter().chain(&self.s_unknown) {
                let d = distances.get(c, self.c_c);
                if d > epsilon + tol {
                    out.push(format!("concept {c} at distance {d} from center {} in extreme case", self.c_c));
                }
            }
        }
        out
    }
}
