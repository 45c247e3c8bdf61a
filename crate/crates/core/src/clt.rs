//! Monte Carlo experiments over random sign functions: moment convergence,
//! key-lemma statistics and L_p norm convergence of spin-model lifts.
//!
//! Mixed generators are built unnormalised (integer coefficients) and the
//! factor `m^{−s/2}` is applied to the final trace, so values that are
//! deterministic in the limit come out exact for powers of two.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gns::{lp_norm_spectral, GnsError};
use crate::group::{
    group_lp_norm, poisson_semigroup, spin_model_lift, spin_model_lift_raw, Flavor, GroupAlgebraElement, GroupError,
    GroupWord, LiftPart,
    lift_scale,
};
use crate::partition::{weighted_pair_moment, PartitionError, WeightFunction, WordSpec};
use crate::spin::{inner, multiply, norm2_sq, ou_semigroup, trace, Dims, GenIndex, SignFunction, SpinElement, SpinError};

#[derive(Debug, Error)]
pub enum CltError {
    #[error("bias has {bias} factors, model has n = {n}")]
    BiasSize { bias: usize, n: u32 },
    #[error("letter {0:?} outside the model dimensions")]
    LetterOutOfRange(crate::partition::Letter),
    #[error("{0} generators exceed the limit of {1}")]
    Cap(usize, usize),
    #[error("m must be at least 1")]
    ZeroM,
    #[error("at least one trial is required")]
    NoTrials,
    #[error("word {0:?} is not reduced in 𝔾_n")]
    NotReduced(Vec<u32>),
    #[error("m = {m} is smaller than the word length {s}")]
    ShortM { m: u32, s: usize },
    #[error("exact enumeration needs n·d·m ≤ 4, got {0}")]
    EnumerationTooLarge(usize),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Gns(#[from] GnsError),
}

/// Random sign model: `P(ε(g,h) = +1) = (1 + f(α_g, α_h))/2`, independently over pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignModel {
    pub dims: Dims,
    pub bias: WeightFunction,
    pub seed: u64,
}

impl SignModel {
    pub fn new(dims: Dims, bias: WeightFunction, seed: u64) -> Result<Self, CltError> {
        if bias.n() != dims.n as usize {
            return Err(CltError::BiasSize { bias: bias.n(), n: dims.n });
        }
        Ok(Self { dims, bias, seed })
    }

    /// Anticommutation within a factor, fair coin across factors.
    pub fn theorem_b(dims: Dims, seed: u64) -> Self {
        Self { dims, bias: WeightFunction::free_clifford(dims.n as usize), seed }
    }

    pub fn with_m(&self, m: u32) -> Self {
        Self { dims: Dims { m, ..self.dims }, ..self.clone() }
    }
}

/// Uniform `[0,1)` value attached to `(seed, trial, pair)`.
fn pair_uniform(rng: &mut ChaCha8Rng, pair: u64) -> f64 {
    rng.set_word_pos(2 * pair as u128);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_sign_function(model: &SignModel, trial: u64) -> Result<SignFunction, CltError> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(trial);
    let dims = model.dims;
    let count = dims.count() as u64;
    let sf = SignFunction::from_fn(dims, |g, h| {
        let f = model.bias.get(g.alpha, h.alpha);
        if f <= -1.0 {
            return -1;
        }
        if f >= 1.0 {
            return 1;
        }
        let (a, b) = (dims.linear(g).unwrap() as u64, dims.linear(h).unwrap() as u64);
        if pair_uniform(&mut rng, a * count + b) < (1.0 + f) / 2.0 {
            1
        } else {
            -1
        }
    })?;
    Ok(sf)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub m: u32,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub target: f64,
    pub abs_error: f64,
}

impl TrialReport {
    fn from_samples(m: u32, samples: &[f64], target: f64) -> Self {
        let (mean, stderr) = mean_stderr(samples);
        Self { m, trials: samples.len(), mean, stderr, target, abs_error: (mean - target).abs() }
    }

    /// Sample variance of a single trial.
    pub fn variance(&self) -> f64 {
        self.stderr * self.stderr * self.trials as f64
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.abs_error <= sigmas * self.stderr
    }
}

/// Mean and standard error, summed in index order.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `Σ_k x_i^α(k)`.
fn copy_sum(dims: Dims, alpha: u32, i: u32) -> Result<SpinElement<Complex64>, SpinError> {
    let one = Complex64::new(1.0, 0.0);
    let mut terms = Vec::with_capacity(dims.m as usize);
    for k in 1..=dims.m {
        let w = crate::spin::SpinWord::from_gens(dims, &[GenIndex::new(alpha, i, k)])?;
        terms.push((w, one));
    }
    Ok(SpinElement::from_terms(dims, terms))
}

fn check_word(word: &WordSpec, dims: Dims) -> Result<(), CltError> {
    match word.letters.iter().find(|l| l.alpha == 0 || l.alpha > dims.n || l.i == 0 || l.i > dims.d) {
        Some(l) => Err(CltError::LetterOutOfRange(*l)),
        None => Ok(()),
    }
}

/// `τ(x̃^{α₁}_{i₁}(m) ⋯ x̃^{α_s}_{i_s}(m))` for one sign function.
pub fn word_trace(word: &WordSpec, sf: &SignFunction) -> Result<f64, CltError> {
    let dims = sf.dims();
    check_word(word, dims)?;
    let mut acc = SpinElement::<Complex64>::one(dims);
    for l in &word.letters {
        acc = multiply(&acc, &copy_sum(dims, l.alpha, l.i)?, sf)?;
    }
    let raw = trace(&acc).re;
    Ok(raw * lift_scale(dims.m, word.len()))
}

fn check_dims(dims: Dims) -> Result<(), CltError> {
    if dims.m == 0 {
        return Err(CltError::ZeroM);
    }
    if dims.count() > crate::spin::MAX_GENERATORS {
        return Err(CltError::Cap(dims.count(), crate::spin::MAX_GENERATORS));
    }
    Ok(())
}

/// Empirical moments of the mixed word at each `m`, against the limit
/// `weighted_pair_moment(word, bias)`.
pub fn mc_moment_study(
    word: &WordSpec,
    model: &SignModel,
    m_list: &[u32],
    trials: usize,
) -> Result<Vec<TrialReport>, CltError> {
    if trials == 0 {
        return Err(CltError::NoTrials);
    }
    let target = weighted_pair_moment(word, &model.bias)?;
    let mut out = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let model_m = model.with_m(m);
        check_dims(model_m.dims)?;
        check_word(word, model_m.dims)?;
        let samples: Vec<f64> = (0..trials as u64)
            .into_par_iter()
            .map(|t| word_trace(word, &sample_sign_function(&model_m, t)?))
            .collect::<Result<_, CltError>>()?;
        out.push(TrialReport::from_samples(m, &samples, target));
    }
    Ok(out)
}

/// Exact expectation over all sign configurations (small models only).
pub fn exact_moment(word: &WordSpec, model: &SignModel) -> Result<f64, CltError> {
    let dims = model.dims;
    if dims.count() > 4 {
        return Err(CltError::EnumerationTooLarge(dims.count()));
    }
    check_word(word, dims)?;
    let mut random_pairs = Vec::new();
    for g in 0..dims.count() {
        for h in g + 1..dims.count() {
            let f = model.bias.get(dims.gen(g).alpha, dims.gen(h).alpha);
            if f > -1.0 && f < 1.0 {
                random_pairs.push((g, h, (1.0 + f) / 2.0));
            }
        }
    }
    let mut total = 0.0;
    for bits in 0u32..1 << random_pairs.len() {
        let mut weight = 1.0;
        let sf = SignFunction::from_fn(dims, |a, b| {
            let (g, h) = (dims.linear(a).unwrap(), dims.linear(b).unwrap());
            match random_pairs.iter().position(|&(x, y, _)| (x, y) == (g, h)) {
                Some(idx) => {
                    let plus = bits >> idx & 1 == 1;
                    let p = random_pairs[idx].2;
                    weight *= if plus { p } else { 1.0 - p };
                    if plus {
                        1
                    } else {
                        -1
                    }
                }
                None => {
                    if model.bias.get(a.alpha, b.alpha) >= 1.0 {
                        1
                    } else {
                        -1
                    }
                }
            }
        })?;
        total += weight * word_trace(word, &sf)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyLemmaReport {
    pub m: u32,
    pub s: usize,
    pub trials: usize,
    /// Largest `|⟨x̃₁, x̃₂⟩|` over samples.
    pub max_abs_inner: f64,
    pub inner_exactly_zero: bool,
    pub norm1: TrialReport,
    /// `‖x̃₂‖₂²`, with target `1 − E‖x̃₁‖₂²`.
    pub norm2: TrialReport,
}

/// Falling factorial ratio `m(m−1)⋯(m−s+1)/m^s`.
pub fn no_repeat_mass(m: u32, s: usize) -> f64 {
    (0..s).map(|j| (m as f64 - j as f64) / m as f64).product()
}

/// Splits the lift of a reduced `𝔾_n` word into the part with distinct copy
/// indices and the rest, per sample.
pub fn key_lemma_study(word: &WordSpec, model: &SignModel, trials: usize) -> Result<KeyLemmaReport, CltError> {
    if trials == 0 {
        return Err(CltError::NoTrials);
    }
    let dims = model.dims;
    check_dims(dims)?;
    check_word(word, dims)?;
    let alphas = word.alphas();
    let letters: Vec<i32> = alphas.iter().map(|&a| a as i32).collect();
    let g = GroupWord::reduce(Flavor::FreeZ2, &letters)?;
    let s = alphas.len();
    if g.len() != s {
        return Err(CltError::NotReduced(alphas));
    }
    if (dims.m as usize) < s {
        return Err(CltError::ShortM { m: dims.m, s });
    }
    let a = GroupAlgebraElement::<Complex64>::from_terms(Flavor::FreeZ2, [(g, Complex64::new(1.0, 0.0))]);
    let scale = (dims.m as f64).powi(-(s as i32));
    let samples: Vec<(f64, f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let sf = sample_sign_function(model, t)?;
            let (full, _) = spin_model_lift_raw(&a, &sf, LiftPart::Full)?;
            let (x1, _) = spin_model_lift_raw(&a, &sf, LiftPart::NoRepeat)?;
            let x2 = full.sub(&x1);
            Ok((inner(&x1, &x2).norm() * scale, norm2_sq(&x1) * scale, norm2_sq(&x2) * scale))
        })
        .collect::<Result<_, CltError>>()?;
    let max_abs_inner = samples.iter().map(|x| x.0).fold(0.0, f64::max);
    let n1: Vec<f64> = samples.iter().map(|x| x.1).collect();
    let n2: Vec<f64> = samples.iter().map(|x| x.2).collect();
    let target1 = no_repeat_mass(dims.m, s);
    Ok(KeyLemmaReport {
        m: dims.m,
        s,
        trials,
        max_abs_inner,
        inner_exactly_zero: samples.iter().all(|x| x.0 == 0.0),
        norm1: TrialReport::from_samples(dims.m, &n1, target1),
        norm2: TrialReport::from_samples(dims.m, &n2, 1.0 - target1),
    })
}

/// `‖z̃(m)‖_p` (optionally `‖S_t z̃(m)‖_p`) per sample against the limit
/// `‖a‖_p` (resp. `‖P_t a‖_p`) from `nodes`-point quadrature.
pub fn norm_convergence_study(
    a: &GroupAlgebraElement<Complex64>,
    p: f64,
    model: &SignModel,
    m_list: &[u32],
    trials: usize,
    t: Option<f64>,
    nodes: usize,
) -> Result<Vec<TrialReport>, CltError> {
    if trials == 0 {
        return Err(CltError::NoTrials);
    }
    let limit = match t {
        Some(t) => poisson_semigroup(a, t)?,
        None => a.clone(),
    };
    let target = group_lp_norm(&limit, p, nodes)?.value;
    let mut out = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let model_m = model.with_m(m);
        check_dims(model_m.dims)?;
        let samples: Vec<f64> = (0..trials as u64)
            .into_par_iter()
            .map(|trial| {
                let sf = sample_sign_function(&model_m, trial)?;
                let mut z = spin_model_lift(a, &sf, LiftPart::Full)?.element;
                if let Some(t) = t {
                    z = ou_semigroup(&z, t)?;
                }
                Ok(lp_norm_spectral(&z, &sf, p)?)
            })
            .collect::<Result<_, CltError>>()?;
        out.push(TrialReport::from_samples(m, &samples, target));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Letter;

    #[test]
    fn theorem_b_signs() {
        let model = SignModel::theorem_b(Dims::new(2, 2, 3), 11);
        let dims = model.dims;
        let mut sum = 0.0;
        let mut count = 0.0;
        for t in 0..10_000 / 36 + 1 {
            let sf = sample_sign_function(&model, t).unwrap();
            for g in dims.gens() {
                for h in dims.gens() {
                    if g.alpha == h.alpha {
                        assert_eq!(sf.eps(g, h).unwrap(), -1);
                    } else if g < h {
                        sum += sf.eps(g, h).unwrap() as f64;
                        count += 1.0;
                    }
                }
            }
        }
        assert!(count >= 10_000.0);
        let mean = sum / count;
        // Bernoulli ±1 with mean 0 has unit variance.
        assert!(mean.abs() <= 4.0 / count.sqrt(), "mean {mean}");
    }

    #[test]
    fn biased_signs() {
        let dims = Dims::new(2, 1, 4);
        let model = SignModel::new(dims, WeightFunction::constant(2, 0.5).unwrap(), 3).unwrap();
        let mut sum = 0.0;
        let mut count = 0.0;
        for t in 0..400 {
            let sf = sample_sign_function(&model, t).unwrap();
            for g in 0..dims.count() {
                for h in g + 1..dims.count() {
                    sum += sf.eps_linear(g, h) as f64;
                    count += 1.0;
                }
            }
        }
        let mean = sum / count;
        let sd = (1.0f64 - 0.25).sqrt() / count.sqrt();
        assert!((mean - 0.5).abs() <= 4.0 * sd, "mean {mean}");
    }

    #[test]
    fn sampling_is_deterministic_and_order_free() {
        let model = SignModel::theorem_b(Dims::new(3, 1, 4), 99);
        let a: Vec<_> = (0..8).map(|t| sample_sign_function(&model, t).unwrap()).collect();
        let b: Vec<_> = (0..8).rev().map(|t| sample_sign_function(&model, t).unwrap()).collect();
        for (x, y) in a.iter().zip(b.iter().rev()) {
            assert_eq!(x, y);
        }
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn exact_enumeration_matches_limit_for_small_cases() {
        // one factor, one generator per copy, m = 2: x̃² = 1 exactly
        let model = SignModel::theorem_b(Dims::new(1, 1, 2), 0);
        assert_eq!(exact_moment(&WordSpec::from_alphas(&[1, 1]), &model).unwrap(), 1.0);
        // two factors, m = 2: alternating word averages to 0
        let model = SignModel::theorem_b(Dims::new(2, 1, 2), 0);
        assert!(exact_moment(&WordSpec::from_alphas(&[1, 2, 1, 2]), &model).unwrap().abs() < 1e-15);
        assert!(exact_moment(&WordSpec::from_alphas(&[1]), &SignModel::theorem_b(Dims::new(1, 1, 5), 0)).is_err());
    }

    #[test]
    fn single_block_word_is_deterministic() {
        let word = WordSpec::new(vec![Letter::new(1, 1), Letter::new(1, 2), Letter::new(1, 1), Letter::new(1, 2)]);
        let model = SignModel::theorem_b(Dims::new(1, 2, 1), 5);
        let r = mc_moment_study(&word, &model, &[2, 4], 16).unwrap();
        for rep in r {
            assert_eq!(rep.mean, -1.0);
            assert_eq!(rep.stderr, 0.0);
        }
    }

    #[test]
    fn key_lemma_small() {
        let model = SignModel::theorem_b(Dims::new(2, 1, 2), 1);
        let rep = key_lemma_study(&WordSpec::from_alphas(&[1, 2]), &model, 8).unwrap();
        assert!(rep.inner_exactly_zero);
        assert_eq!(rep.norm1.mean, 0.5);
        assert_eq!(rep.norm2.mean, 0.5);
        assert!(key_lemma_study(&WordSpec::from_alphas(&[1, 1]), &model, 1).is_err());
        assert!(key_lemma_study(&WordSpec::from_alphas(&[1, 2, 1]), &model, 1).is_err());
    }

    #[test]
    fn norm_study_identity_is_exact() {
        let model = SignModel::theorem_b(Dims::new(2, 1, 1), 2);
        let e = GroupAlgebraElement::<Complex64>::identity(Flavor::FreeZ2);
        let plain = norm_convergence_study(&e, 3.0, &model, &[2, 3], 4, None, 2).unwrap();
        assert!(plain.iter().all(|r| r.mean == 1.0 && r.stderr == 0.0));
        let a = GroupAlgebraElement::<Complex64>::word(Flavor::FreeZ2, &[1])
            .unwrap()
            .add(&GroupAlgebraElement::word(Flavor::FreeZ2, &[2]).unwrap())
            .unwrap();
        let x = norm_convergence_study(&a, 3.0, &model, &[2], 6, None, 4).unwrap();
        let y = norm_convergence_study(&a, 3.0, &model, &[2], 6, Some(0.0), 4).unwrap();
        assert_eq!(x, y);
    }
}
