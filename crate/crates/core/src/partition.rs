//! Pair partitions, crossings and weighted pair-partition moments.
//!
//! Positions are 1-based in the public API. Enumeration pairs the smallest
//! unpaired position with each larger candidate in increasing order.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("labels are not constant on block ({0}, {1})")]
    LabelsNotConstant(usize, usize),
    #[error("label list has length {0}, partition covers {1} points")]
    LengthMismatch(usize, usize),
    #[error("weight function is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("weight value {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("block label {0} outside weight function range 1..={1}")]
    LabelOutOfRange(u32, usize),
}

/// Perfect matching of `{1, …, s}` as pairs `(e, z)`, `e < z`, sorted by `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Validates and sorts the given pairs.
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Option<Self> {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort();
        let s = 2 * pairs.len();
        let mut seen = vec![false; s + 1];
        for &(e, z) in &pairs {
            if e == 0 || z > s || e == z || seen[e] || seen[z] {
                return None;
            }
            seen[e] = true;
            seen[z] = true;
        }
        Some(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn size(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Crossings `(k, ℓ)`, `k < ℓ` 1-based block numbers, with `e_k < e_ℓ < z_k < z_ℓ`.
    pub fn crossings(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, &(ek, zk)) in self.pairs.iter().enumerate() {
            for (l, &(el, zl)) in self.pairs.iter().enumerate().skip(k + 1) {
                if ek < el && el < zk && zk < zl {
                    out.push((k + 1, l + 1));
                }
            }
        }
        out
    }

    /// True when `labels` (indexed by position − 1) is constant on each block.
    pub fn refines(&self, labels: &[u32]) -> bool {
        labels.len() == self.size() && self.pairs.iter().all(|&(e, z)| labels[e - 1] == labels[z - 1])
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (idx, (e, z)) in self.pairs.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{{e},{z}}}")?;
        }
        write!(f, "}}")
    }
}

/// All pair partitions of `{1, …, s}` in canonical order; empty for odd `s`.
pub fn enumerate_pair_partitions(s: usize) -> Vec<PairPartition> {
    let mut out = Vec::new();
    if s % 2 == 1 {
        return out;
    }
    let mut mate = vec![usize::MAX; s];
    fn rec(mate: &mut [usize], out: &mut Vec<PairPartition>) {
        let Some(e) = mate.iter().position(|&x| x == usize::MAX) else {
            let pairs = (0..mate.len()).filter(|&p| p < mate[p]).map(|p| (p + 1, mate[p] + 1)).collect();
            out.push(PairPartition { pairs });
            return;
        };
        for z in e + 1..mate.len() {
            if mate[z] == usize::MAX {
                mate[e] = z;
                mate[z] = e;
                rec(mate, out);
                mate[e] = usize::MAX;
                mate[z] = usize::MAX;
            }
        }
    }
    rec(&mut mate, &mut out);
    out
}

/// Crossing set `I(σ)` and its restriction `I_α(σ)` to blocks with different labels.
pub fn crossing_sets(
    sigma: &PairPartition,
    alphas: Option<&[u32]>,
) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>), PartitionError> {
    let all = sigma.crossings();
    let Some(alphas) = alphas else {
        return Ok((all, Vec::new()));
    };
    if alphas.len() != sigma.size() {
        return Err(PartitionError::LengthMismatch(alphas.len(), sigma.size()));
    }
    if let Some(&(e, z)) = sigma.pairs.iter().find(|&&(e, z)| alphas[e - 1] != alphas[z - 1]) {
        return Err(PartitionError::LabelsNotConstant(e, z));
    }
    let label = |k: usize| alphas[sigma.pairs[k - 1].0 - 1];
    let restricted = all.iter().copied().filter(|&(k, l)| label(k) != label(l)).collect();
    Ok((all, restricted))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub alpha: u32,
    pub i: u32,
}

impl Letter {
    pub const fn new(alpha: u32, i: u32) -> Self {
        Self { alpha, i }
    }
}

/// A word `x^{α₁}_{i₁} ⋯ x^{α_s}_{i_s}` given by its labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordSpec {
    pub letters: Vec<Letter>,
}

impl WordSpec {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    /// Letters `(alpha, 1)` for a word in the free product of one-generator factors.
    pub fn from_alphas(alphas: &[u32]) -> Self {
        Self::new(alphas.iter().map(|&a| Letter::new(a, 1)).collect())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn alphas(&self) -> Vec<u32> {
        self.letters.iter().map(|l| l.alpha).collect()
    }

    pub fn max_alpha(&self) -> u32 {
        self.letters.iter().map(|l| l.alpha).max().unwrap_or(0)
    }

    pub fn max_i(&self) -> u32 {
        self.letters.iter().map(|l| l.i).max().unwrap_or(0)
    }
}

/// Symmetric `f: [n] × [n] → [−1, 1]` (row-major, 1-based labels in lookups).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    n: usize,
    values: Vec<f64>,
}

impl WeightFunction {
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self, PartitionError> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PartitionError::LengthMismatch(row.len(), n));
            }
            for (b, &v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(PartitionError::OutOfRange(v));
                }
                if rows[b][a] != v {
                    return Err(PartitionError::Asymmetric(a + 1, b + 1));
                }
                values.push(v);
            }
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(u32, u32) -> f64) -> Result<Self, PartitionError> {
        let rows: Vec<Vec<f64>> = (1..=n as u32).map(|a| (1..=n as u32).map(|b| f(a, b)).collect()).collect();
        Self::from_matrix(&rows)
    }

    /// −1 within a factor, 0 across factors.
    pub fn free_clifford(n: usize) -> Self {
        Self::from_fn(n, |a, b| if a == b { -1.0 } else { 0.0 }).expect("valid weight")
    }

    pub fn constant(n: usize, q: f64) -> Result<Self, PartitionError> {
        Self::from_fn(n, |_, _| q)
    }

    /// `f(1,1) = q₁q₂`, all other entries `q₂`.
    pub fn mixed_q(q1: f64, q2: f64) -> Result<Self, PartitionError> {
        Self::from_fn(2, |a, b| if a == 1 && b == 1 { q1 * q2 } else { q2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: u32, b: u32) -> f64 {
        self.values[(a as usize - 1) * self.n + (b as usize - 1)]
    }

    /// Integer table when every value lies in {−1, 0, 1}.
    pub fn as_integers(&self) -> Option<Vec<i64>> {
        self.values
            .iter()
            .map(|&v| if v == -1.0 || v == 0.0 || v == 1.0 { Some(v as i64) } else { None })
            .collect()
    }
}

trait Ring: Copy + PartialEq + std::ops::Mul<Output = Self> + std::ops::AddAssign {
    const ZERO: Self;
    const ONE: Self;
}
impl Ring for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
}
impl Ring for i64 {
    const ZERO: Self = 0;
    const ONE: Self = 1;
}

/// Σ over admissible σ of Π over crossings of `w(α_{e_k}, α_{e_ℓ})`.
///
/// Blocks are built left to right, so a new pair `(e, z)` crosses an existing
/// `(e', z')` iff `e < z' < z`; the product is accumulated incrementally and
/// branches whose product vanishes are cut.
fn pair_sum<T: Ring>(word: &WordSpec, weight: impl Fn(u32, u32) -> T) -> T {
    let s = word.len();
    if s % 2 == 1 {
        return T::ZERO;
    }
    let letters = &word.letters;
    let mut mate = vec![usize::MAX; s];
    let mut total = T::ZERO;

    fn rec<T: Ring>(
        letters: &[Letter],
        weight: &dyn Fn(u32, u32) -> T,
        mate: &mut [usize],
        start: usize,
        acc: T,
        total: &mut T,
    ) {
        let Some(e) = (start..mate.len()).find(|&p| mate[p] == usize::MAX) else {
            *total += acc;
            return;
        };
        for z in e + 1..mate.len() {
            if mate[z] != usize::MAX || letters[z] != letters[e] {
                continue;
            }
            let mut w = acc;
            // existing pairs (e', z') with e' < e and e < z' < z
            for zp in e + 1..z {
                let ep = mate[zp];
                if ep != usize::MAX && ep < e {
                    w = w * weight(letters[ep].alpha, letters[e].alpha);
                }
            }
            if w == T::ZERO {
                continue;
            }
            mate[e] = z;
            mate[z] = e;
            rec(letters, weight, mate, e + 1, w, total);
            mate[e] = usize::MAX;
            mate[z] = usize::MAX;
        }
    }
    rec(letters, &weight, &mut mate, 0, T::ONE, &mut total);
    total
}

fn check_labels(word: &WordSpec, f: &WeightFunction) -> Result<(), PartitionError> {
    match word.letters.iter().find(|l| l.alpha == 0 || l.alpha as usize > f.n()) {
        Some(l) => Err(PartitionError::LabelOutOfRange(l.alpha, f.n())),
        None => Ok(()),
    }
}

/// Limit moment `Σ_{σ ≤ σ(i), σ ≤ σ(α)} Π_{(k,ℓ)∈I(σ)} f(α_{e_k}, α_{e_ℓ})`.
///
/// Uses exact integer arithmetic when `f` takes values in {−1, 0, 1}.
pub fn weighted_pair_moment(word: &WordSpec, f: &WeightFunction) -> Result<f64, PartitionError> {
    check_labels(word, f)?;
    if let Some(v) = weighted_pair_moment_exact(word, f)? {
        return Ok(v as f64);
    }
    Ok(pair_sum(word, |a, b| f.get(a, b)))
}

/// Integer value of [`weighted_pair_moment`], or `None` if `f` is not {−1,0,1}-valued.
pub fn weighted_pair_moment_exact(word: &WordSpec, f: &WeightFunction) -> Result<Option<i64>, PartitionError> {
    check_labels(word, f)?;
    let Some(table) = f.as_integers() else {
        return Ok(None);
    };
    let n = f.n();
    Ok(Some(pair_sum(word, |a, b| table[(a as usize - 1) * n + (b as usize - 1)])))
}

/// The free-Clifford specialisation: `Σ (−1)^{#I(σ)}` over admissible σ with `I_α(σ) = ∅`.
pub fn free_clifford_moment(word: &WordSpec) -> i64 {
    let n = word.max_alpha().max(1) as usize;
    weighted_pair_moment_exact(word, &WeightFunction::free_clifford(n))
        .expect("labels in range")
        .expect("integer weight")
}

/// Admissible partitions `σ ≤ σ(i), σ ≤ σ(α)` of a word.
pub fn admissible_partitions(word: &WordSpec) -> Vec<PairPartition> {
    let labels: Vec<u32> = {
        let mut keys: Vec<Letter> = word.letters.clone();
        keys.sort();
        keys.dedup();
        word.letters.iter().map(|l| keys.binary_search(l).unwrap() as u32).collect()
    };
    enumerate_pair_partitions(word.len()).into_iter().filter(|p| p.refines(&labels)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(s: usize) -> usize {
        (1..s).step_by(2).product()
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_pair_partitions(0).len(), 1);
        assert_eq!(enumerate_pair_partitions(2), vec![PairPartition::new(vec![(1, 2)]).unwrap()]);
        assert_eq!(enumerate_pair_partitions(3).len(), 0);
        let four: Vec<String> = enumerate_pair_partitions(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(four, ["{{1,2},{3,4}}", "{{1,3},{2,4}}", "{{1,4},{2,3}}"]);
        for s in (0..=12).step_by(2) {
            assert_eq!(enumerate_pair_partitions(s).len(), double_factorial(s), "s = {s}");
        }
    }

    #[test]
    fn crossing_examples() {
        let p = |v: Vec<(usize, usize)>| PairPartition::new(v).unwrap();
        assert!(p(vec![(1, 2), (3, 4)]).crossings().is_empty());
        assert_eq!(p(vec![(1, 3), (2, 4)]).crossings(), vec![(1, 2)]);
        assert_eq!(p(vec![(1, 4), (2, 5), (3, 6)]).crossings().len(), 3);

        let sigma = p(vec![(1, 3), (2, 4)]);
        let (all, restricted) = crossing_sets(&sigma, Some(&[1, 2, 1, 2])).unwrap();
        assert_eq!(all, vec![(1, 2)]);
        assert_eq!(restricted, vec![(1, 2)]);
        let (_, restricted) = crossing_sets(&sigma, Some(&[1, 1, 1, 1])).unwrap();
        assert!(restricted.is_empty());
        assert_eq!(
            crossing_sets(&sigma, Some(&[1, 2, 2, 2])),
            Err(PartitionError::LabelsNotConstant(1, 3))
        );
    }

    #[test]
    fn moment_examples() {
        let q = 0.37;
        let w = WordSpec::from_alphas(&[1, 1, 1, 1]);
        let v = weighted_pair_moment(&w, &WeightFunction::constant(1, q).unwrap()).unwrap();
        assert!((v - (2.0 + q)).abs() < 1e-15);

        let fc = WeightFunction::free_clifford(2);
        assert_eq!(weighted_pair_moment(&WordSpec::from_alphas(&[1, 2, 1, 2]), &fc).unwrap(), 0.0);
        assert_eq!(weighted_pair_moment(&WordSpec::from_alphas(&[1, 2, 2, 1]), &fc).unwrap(), 1.0);
        assert_eq!(weighted_pair_moment(&WordSpec::from_alphas(&[1, 2, 1]), &fc).unwrap(), 0.0);
        assert_eq!(weighted_pair_moment(&WordSpec::default(), &fc).unwrap(), 1.0);
        assert!(weighted_pair_moment(&WordSpec::from_alphas(&[3, 3]), &fc).is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(WeightFunction::from_matrix(&[vec![0.0, 0.5], vec![0.4, 0.0]]).is_err());
        assert!(WeightFunction::constant(2, 1.5).is_err());
        assert!(WeightFunction::mixed_q(0.5, 0.2).unwrap().as_integers().is_none());
        assert!(WeightFunction::free_clifford(3).as_integers().is_some());
    }

    #[test]
    fn labels_i_restrict_pairings() {
        // x_1 x_2 x_1 x_2 in one Clifford factor: only {1,3},{2,4}, one crossing.
        let w = WordSpec::new(vec![Letter::new(1, 1), Letter::new(1, 2), Letter::new(1, 1), Letter::new(1, 2)]);
        assert_eq!(free_clifford_moment(&w), -1);
        assert_eq!(admissible_partitions(&w).len(), 1);
    }
}
