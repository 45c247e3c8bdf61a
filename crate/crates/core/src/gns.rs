//! Left-regular representation of the spin algebra on its word basis, and
//! two evaluators of `‖a‖_p = τ(|a|^p)^{1/p}`: the spectral route (dense
//! eigensolve) and the moment route (Gauss quadrature from `τ((a*a)^k)`).

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::spin::{adjoint, multiply, trace, SignFunction, SpinElement, SpinError, SpinWord};

pub const DEFAULT_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GnsError {
    #[error("{gens} generators exceed the representation cap of {cap}")]
    CapExceeded { gens: usize, cap: usize },
    #[error("exponent p = {0} must be at least 1")]
    BadExponent(f64),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("at least one node is required")]
    NoNodes,
    #[error("{got} moments given, {needed} needed")]
    NotEnoughMoments { needed: usize, got: usize },
    #[error("Hankel matrix not positive definite beyond {max_usable} nodes")]
    NotPositiveDefinite { max_usable: usize },
    #[error("exponent p = {0} must be at least 1")]
    BadExponent(f64),
}

/// `L_a` acting on `span{x_B}`, basis ordered by bitmask.
#[derive(Clone, Debug)]
pub struct LeftRegularMatrix {
    pub gens: usize,
    pub matrix: DMatrix<Complex64>,
}

impl LeftRegularMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `2^{−N} Tr`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.matrix.trace() / self.dim() as f64
    }
}

fn check_cap(sf: &SignFunction, cap: usize) -> Result<usize, GnsError> {
    let gens = sf.dims().count();
    if gens > cap {
        return Err(GnsError::CapExceeded { gens, cap });
    }
    Ok(gens)
}

fn fill_columns<T, S: Scalar>(a: &SpinElement<S>, sf: &SignFunction, gens: usize, conv: impl Fn(&S, i32) -> T) -> Vec<(usize, usize, T)> {
    let dim = 1usize << gens;
    let mut out = Vec::with_capacity(dim * a.len());
    for b in 0..dim as u64 {
        for (w, c) in a.terms() {
            let (sign, prod) = sf.word_product(*w, SpinWord(b));
            out.push((prod.0 as usize, b as usize, conv(c, sign)));
        }
    }
    out
}

pub fn left_regular_matrix<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction) -> Result<LeftRegularMatrix, GnsError> {
    left_regular_matrix_capped(a, sf, DEFAULT_CAP)
}

pub fn left_regular_matrix_capped<S: Scalar>(
    a: &SpinElement<S>,
    sf: &SignFunction,
    cap: usize,
) -> Result<LeftRegularMatrix, GnsError> {
    let gens = check_cap(sf, cap)?;
    if a.dims() != sf.dims() {
        return Err(SpinError::DimsMismatch(a.dims(), sf.dims()).into());
    }
    let dim = 1usize << gens;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for (r, c, v) in fill_columns(a, sf, gens, |c, s| c.to_c64() * s as f64) {
        matrix[(r, c)] += v;
    }
    Ok(LeftRegularMatrix { gens, matrix })
}

fn real_matrix<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction, gens: usize) -> DMatrix<f64> {
    let dim = 1usize << gens;
    let mut matrix = DMatrix::<f64>::zeros(dim, dim);
    for (r, c, v) in fill_columns(a, sf, gens, |c, s| c.to_c64().re * s as f64) {
        matrix[(r, c)] += v;
    }
    matrix
}

/// Finite probability distribution on ℝ.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    pub fn uniform(nodes: impl IntoIterator<Item = f64>) -> Self {
        let nodes: Vec<f64> = nodes.into_iter().collect();
        let w = 1.0 / nodes.len() as f64;
        Self { atoms: nodes.into_iter().map(|x| (x, w)).collect() }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * f(x)).sum()
    }

    /// `(Σ w |x|^p)^{1/p}`; `p = ∞` gives the largest `|x|`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.atoms.iter().filter(|a| a.1 > 0.0).map(|a| a.0.abs()).fold(0.0, f64::max);
        }
        self.integrate(|x| x.abs().powf(p)).powf(1.0 / p)
    }
}

fn is_self_adjoint<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction) -> Result<bool, GnsError> {
    let adj = adjoint(a, sf)?;
    let scale = a.terms().values().map(|c| c.modulus()).fold(0.0, f64::max);
    let diff = adj.sub(a);
    Ok(diff.terms().values().all(|c| c.modulus() <= 1e-13 * scale))
}

/// Distribution of the singular values of `L_a`, i.e. of `|a|` under `τ`.
pub fn singular_value_measure<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction) -> Result<SpectralMeasure, GnsError> {
    singular_value_measure_capped(a, sf, DEFAULT_CAP)
}

pub fn singular_value_measure_capped<S: Scalar>(
    a: &SpinElement<S>,
    sf: &SignFunction,
    cap: usize,
) -> Result<SpectralMeasure, GnsError> {
    let gens = check_cap(sf, cap)?;
    if a.dims() != sf.dims() {
        return Err(SpinError::DimsMismatch(a.dims(), sf.dims()).into());
    }
    let real = a.terms().values().all(|c| c.to_c64().im == 0.0);
    let (target, sqrt) = if is_self_adjoint(a, sf)? {
        (a.clone(), false)
    } else {
        (multiply(&adjoint(a, sf)?, a, sf)?, true)
    };
    let eig: Vec<f64> = if real {
        real_matrix(&target, sf, gens).symmetric_eigenvalues().iter().copied().collect()
    } else {
        left_regular_matrix_capped(&target, sf, cap)?.matrix.symmetric_eigenvalues().iter().copied().collect()
    };
    let nodes = eig.into_iter().map(|x| if sqrt { x.max(0.0).sqrt() } else { x.abs() });
    Ok(SpectralMeasure::uniform(nodes))
}

/// Eigenvalue distribution of a self-adjoint `a`.
pub fn spectral_measure<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction) -> Result<SpectralMeasure, GnsError> {
    let gens = check_cap(sf, DEFAULT_CAP)?;
    let eig: Vec<f64> = if a.terms().values().all(|c| c.to_c64().im == 0.0) {
        real_matrix(a, sf, gens).symmetric_eigenvalues().iter().copied().collect()
    } else {
        left_regular_matrix(a, sf)?.matrix.symmetric_eigenvalues().iter().copied().collect()
    };
    Ok(SpectralMeasure::uniform(eig))
}

pub fn lp_norm_spectral<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction, p: f64) -> Result<f64, GnsError> {
    if !(p >= 1.0) {
        return Err(GnsError::BadExponent(p));
    }
    Ok(singular_value_measure(a, sf)?.lp_norm(p))
}

/// Exact moments `τ((a*a)^k)`, `k = 0..count`.
pub fn spin_moments<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction, count: usize) -> Result<Vec<S>, SpinError> {
    let h = multiply(&adjoint(a, sf)?, a, sf)?;
    let mut power = SpinElement::one(a.dims());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(trace(&power));
        power = multiply(&power, &h, sf)?;
    }
    Ok(out)
}

/// Gauss rule with nodes and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Golub–Welsch: eigen-decomposition of the Jacobi matrix; `beta[0]` is the total mass.
    pub fn from_recurrence(alpha: &[f64], beta: &[f64]) -> Self {
        let k = alpha.len();
        let mut jac = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            jac[(i, i)] = alpha[i];
            if i + 1 < k {
                let b = beta[i + 1].max(0.0).sqrt();
                jac[(i, i + 1)] = b;
                jac[(i + 1, i)] = b;
            }
        }
        let eig = SymmetricEigen::new(jac);
        let mut pairs: Vec<(f64, f64)> = (0..k)
            .map(|i| (eig.eigenvalues[i], beta[0] * eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Recurrence coefficients from the modified Chebyshev algorithm run in
/// exact rational arithmetic.
#[derive(Clone, Debug)]
struct Recurrence {
    alpha: Vec<BigRational>,
    beta: Vec<BigRational>,
    /// The Hankel form became exactly singular: the measure has `alpha.len()` atoms.
    finite_support: bool,
}

fn chebyshev(moments: &[BigRational], k: usize) -> Recurrence {
    let n = 2 * k;
    let zero = BigRational::zero();
    let mut alpha = Vec::with_capacity(k);
    let mut beta = Vec::with_capacity(k);
    if moments[0] <= zero {
        return Recurrence { alpha, beta, finite_support: false };
    }
    let mut prev = vec![zero.clone(); n];
    let mut cur: Vec<BigRational> = moments[..n].to_vec();
    alpha.push(&moments[1] / &moments[0]);
    beta.push(moments[0].clone());
    for j in 1..k {
        let mut next = vec![zero.clone(); n];
        for l in j..n - j {
            next[l] = &cur[l + 1] - &alpha[j - 1] * &cur[l] - &beta[j - 1] * &prev[l];
        }
        if next[j].is_zero() {
            return Recurrence { alpha, beta, finite_support: true };
        }
        if next[j].is_negative() {
            break;
        }
        alpha.push(&next[j + 1] / &next[j] - &cur[j] / &cur[j - 1]);
        beta.push(&next[j] / &cur[j - 1]);
        prev = std::mem::replace(&mut cur, next);
    }
    Recurrence { alpha, beta, finite_support: false }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `K`-point Gauss rule of the measure with moments `μ_0, …, μ_{2K−1}`.
pub fn gauss_rule_from_moments(moments: &[f64], k: usize) -> Result<GaussRule, QuadratureError> {
    let exact: Vec<BigRational> = moments.iter().map(|&m| rational(m)).collect();
    gauss_rule_from_exact(&exact, k)
}

pub fn gauss_rule_from_exact(moments: &[BigRational], k: usize) -> Result<GaussRule, QuadratureError> {
    if k == 0 {
        return Err(QuadratureError::NoNodes);
    }
    if moments.len() < 2 * k {
        return Err(QuadratureError::NotEnoughMoments { needed: 2 * k, got: moments.len() });
    }
    let rec = chebyshev(moments, k);
    if rec.alpha.len() < k && !rec.finite_support {
        return Err(QuadratureError::NotPositiveDefinite { max_usable: rec.alpha.len() });
    }
    let a: Vec<f64> = rec.alpha.iter().map(to_f64).collect();
    let b: Vec<f64> = rec.beta.iter().map(to_f64).collect();
    Ok(GaussRule::from_recurrence(&a, &b))
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

/// Quadrature value of `‖a‖_p` with its stabilization `|v_K − v_{K−1}|`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadNorm {
    pub value: f64,
    /// `|v_K − v_{K−1}|`; zero when the measure is finitely supported and
    /// fully resolved, infinite when only one node is available.
    pub stabilization: f64,
    /// Nodes actually used.
    pub nodes: usize,
    pub requested: usize,
}

fn norm_from_rule(rule: &GaussRule, p: f64) -> f64 {
    rule.integrate(|x| x.max(0.0).powf(p / 2.0)).powf(1.0 / p)
}

/// Nodes of a measure of `a*a` lie in `[0, ∞)`; a clearly negative node
/// means the recurrence was fed noise.
fn rule_is_sane(rule: &GaussRule) -> bool {
    let top = rule.nodes.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    rule.nodes.iter().all(|&x| x >= -1e-9 * top) && rule.weights.iter().all(|&w| w >= 0.0)
}

/// Gauss rules of a spectral measure of `a*a`: the one with the most usable
/// nodes and, for the stabilization estimate, the one with one node fewer.
#[derive(Clone, Debug)]
pub struct QuadRules {
    pub rule: GaussRule,
    pub previous: Option<GaussRule>,
    /// The moment sequence is that of a measure with at most `rule.nodes.len()` atoms.
    pub finite_support: bool,
    pub requested: usize,
}

impl QuadRules {
    pub fn nodes(&self) -> usize {
        self.rule.nodes.len()
    }

    pub fn norm(&self, p: f64) -> Result<QuadNorm, QuadratureError> {
        if !(p >= 1.0) || p.is_infinite() {
            return Err(QuadratureError::BadExponent(p));
        }
        let value = norm_from_rule(&self.rule, p);
        let stabilization = if self.finite_support {
            0.0
        } else {
            match &self.previous {
                Some(prev) => (value - norm_from_rule(prev, p)).abs(),
                None => f64::INFINITY,
            }
        };
        Ok(QuadNorm { value, stabilization, nodes: self.nodes(), requested: self.requested })
    }
}

/// Builds [`QuadRules`] from `τ((a*a)^j)`, `j = 0..2K` (at least `2K` entries).
/// With `capped`, falls back to the largest rule whose nodes are sane.
pub fn quad_rules(moments: &[BigRational], k: usize, capped: bool) -> Result<QuadRules, QuadratureError> {
    if k == 0 {
        return Err(QuadratureError::NoNodes);
    }
    if moments.len() < 2 * k {
        return Err(QuadratureError::NotEnoughMoments { needed: 2 * k, got: moments.len() });
    }
    let rec = chebyshev(moments, k);
    let a: Vec<f64> = rec.alpha.iter().map(to_f64).collect();
    let b: Vec<f64> = rec.beta.iter().map(to_f64).collect();
    let mut usable = a.len();
    if usable == 0 {
        return Err(QuadratureError::NotPositiveDefinite { max_usable: 0 });
    }
    if rec.finite_support {
        return Ok(QuadRules {
            rule: GaussRule::from_recurrence(&a, &b),
            previous: None,
            finite_support: true,
            requested: k,
        });
    }
    while usable > 0 && !rule_is_sane(&GaussRule::from_recurrence(&a[..usable], &b[..usable])) {
        usable -= 1;
    }
    if usable < k && !capped {
        return Err(QuadratureError::NotPositiveDefinite { max_usable: usable });
    }
    if usable == 0 {
        return Err(QuadratureError::NotPositiveDefinite { max_usable: 0 });
    }
    Ok(QuadRules {
        rule: GaussRule::from_recurrence(&a[..usable], &b[..usable]),
        previous: (usable >= 2).then(|| GaussRule::from_recurrence(&a[..usable - 1], &b[..usable - 1])),
        finite_support: false,
        requested: k,
    })
}

fn quad_norm(moments: &[BigRational], p: f64, k: usize, capped: bool) -> Result<QuadNorm, QuadratureError> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(QuadratureError::BadExponent(p));
    }
    quad_rules(moments, k, capped)?.norm(p)
}

/// `‖a‖_p` from `τ((a*a)^k)`, `k = 0..2K` (at least `2K` entries).
/// Fails if fewer than `K` nodes are usable, unless the measure turns out
/// to have fewer than `K` atoms, in which case the rule is exact.
pub fn lp_norm_moments(moments: &[f64], p: f64, k: usize) -> Result<QuadNorm, QuadratureError> {
    let exact: Vec<BigRational> = moments.iter().map(|&m| rational(m)).collect();
    quad_norm(&exact, p, k, false)
}

/// As [`lp_norm_moments`] but falls back to the largest usable rule.
pub fn lp_norm_moments_capped(moments: &[f64], p: f64, k: usize) -> Result<QuadNorm, QuadratureError> {
    let exact: Vec<BigRational> = moments.iter().map(|&m| rational(m)).collect();
    quad_norm(&exact, p, k, true)
}

pub fn lp_norm_exact_moments(moments: &[BigRational], p: f64, k: usize) -> Result<QuadNorm, QuadratureError> {
    quad_norm(moments, p, k, false)
}

pub fn lp_norm_exact_moments_capped(moments: &[BigRational], p: f64, k: usize) -> Result<QuadNorm, QuadratureError> {
    quad_norm(moments, p, k, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{Dims, GenIndex};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn left_regular_examples() {
        let dims = Dims::new(1, 1, 1);
        let sf = SignFunction::car(dims);
        let x1 = SpinElement::<Complex64>::generator(dims, GenIndex::new(1, 1, 1)).unwrap();
        let l = left_regular_matrix(&x1, &sf).unwrap();
        assert_eq!(l.matrix, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));

        let dims = Dims::new(1, 3, 1);
        let sf = SignFunction::car(dims);
        let x = |i| SpinElement::<Complex64>::generator(dims, GenIndex::new(1, i, 1)).unwrap();
        let x12 = multiply(&x(1), &x(2), &sf).unwrap();
        let l12 = left_regular_matrix(&x12, &sf).unwrap();
        assert_eq!(l12.normalized_trace(), c(0.0));
        let prod = left_regular_matrix(&x(1), &sf).unwrap().matrix * left_regular_matrix(&x(2), &sf).unwrap().matrix;
        assert_eq!(prod, l12.matrix);
        assert!(left_regular_matrix_capped(&x(1), &sf, 2).is_err());
    }

    #[test]
    fn spectral_examples() {
        let dims = Dims::new(1, 2, 1);
        let sf = SignFunction::car(dims);
        let x = |i| SpinElement::<Complex64>::generator(dims, GenIndex::new(1, i, 1)).unwrap();
        let one = SpinElement::<Complex64>::one(dims);
        for p in [1.0, 1.5, 2.0, 3.7, f64::INFINITY] {
            assert!((lp_norm_spectral(&x(1), &sf, p).unwrap() - 1.0).abs() < 1e-12);
            let expected = if p.is_infinite() { 2.0 } else { 2f64.powf(1.0 - 1.0 / p) };
            assert!((lp_norm_spectral(&one.add(&x(1)), &sf, p).unwrap() - expected).abs() < 1e-12);
            assert!((lp_norm_spectral(&x(1).add(&x(2)), &sf, p).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        }
        assert!(lp_norm_spectral(&x(1), &sf, 0.5).is_err());
    }

    #[test]
    fn moment_route_examples() {
        let q = lp_norm_moments(&[1.0; 8], 3.0, 4).unwrap();
        assert_eq!((q.value, q.stabilization, q.nodes), (1.0, 0.0, 1));
        // u + u*: τ((ζ²)^k) = C(2k, k)
        let central = [1.0, 2.0, 6.0, 20.0, 70.0, 252.0, 924.0, 3432.0];
        let q = lp_norm_moments(&central, 4.0, 3).unwrap();
        assert!((q.value - 6f64.powf(0.25)).abs() < 1e-12);
        assert!(lp_norm_moments(&central, 0.9, 3).is_err());
        assert!(matches!(lp_norm_moments(&central[..3], 2.0, 2), Err(QuadratureError::NotEnoughMoments { .. })));
        assert!(matches!(
            lp_norm_moments(&[1.0, 1.0, 0.5, 2.0], 2.0, 2),
            Err(QuadratureError::NotPositiveDefinite { max_usable: 1 })
        ));
    }

    #[test]
    fn gauss_rule_recovers_two_atoms() {
        // ½δ₀ + ½δ₂: moments 1, 1, 2, 4, ...
        let rule = gauss_rule_from_moments(&[1.0, 1.0, 2.0, 4.0], 2).unwrap();
        assert!((rule.nodes[0]).abs() < 1e-14 && (rule.nodes[1] - 2.0).abs() < 1e-14);
        assert!((rule.weights[0] - 0.5).abs() < 1e-14);
    }
}
