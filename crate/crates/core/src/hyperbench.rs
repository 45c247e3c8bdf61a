//! Numerical checks of hypercontractivity and the related inequalities:
//! time laws, semigroup margins on spin and group elements, the two-point
//! inequality, Ball–Carlen–Lieb convexity, the fermionic Khintchine
//! identity, the `W₁` theorem and the β-improvement.
//!
//! Every check produces a [`Margin`] for a claim `lhs ≤ rhs`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clt::CltError;
use crate::gns::{lp_norm_moments_capped, lp_norm_spectral, spin_moments, GnsError, QuadNorm, QuadratureError};
use crate::group::{
    self, group_quadrature, poisson_semigroup, words_up_to, Flavor, GroupAlgebraElement, GroupError, GroupWord,
};
use crate::partition::PartitionError;
use crate::spin::{self, ou_semigroup, Dims, GenIndex, SignFunction, SpinElement, SpinError, SpinWord};

/// Tolerance for checks whose norms come from exact linear algebra.
pub const SPECTRAL_TOL: f64 = 1e-9;
/// Tolerance for checks whose norms come from moment quadrature.
pub const MOMENT_TOL: f64 = 1e-6;
/// Largest quadrature stabilization for which a moment-route check counts.
pub const STABILIZATION_GATE: f64 = 1e-8;
pub const DEFAULT_NODES: usize = 8;
/// A sharpness witness must beat this margin.
pub const VIOLATION_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("need 1 < p ≤ q < ∞, got p = {p}, q = {q}")]
    Exponents { p: f64, q: f64 },
    #[error("p = {p} outside {range}")]
    ExponentRange { p: f64, range: &'static str },
    #[error("time must be finite and nonnegative, got {0}")]
    Time(f64),
    #[error("r must lie in [0, 1], got {0}")]
    Radius(f64),
    #[error("the improvement time is stated for q = 2, got q = {0}")]
    ImprovementNeedsQ2(f64),
    #[error("group elements have no finite spectral route; use moments")]
    SpectralGroup,
    #[error("matrix shapes differ: {0:?} vs {1:?}")]
    Shape((usize, usize), (usize, usize)),
    #[error("empty coefficient list")]
    NoCoefficients,
    #[error("a₁..a_n and b₁..b_n differ in length ({0} vs {1})")]
    CoefficientLengths(usize, usize),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Gns(#[from] GnsError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Clt(#[from] CltError),
}

fn check_exponents(p: f64, q: f64) -> Result<(), BenchError> {
    if p > 1.0 && p <= q && q.is_finite() {
        Ok(())
    } else {
        Err(BenchError::Exponents { p, q })
    }
}

/// `½ log((q−1)/(p−1))`.
pub fn optimal_time(p: f64, q: f64) -> Result<f64, BenchError> {
    check_exponents(p, q)?;
    Ok(0.5 * ((q - 1.0) / (p - 1.0)).ln())
}

/// `log((q−1)/(p−1))`, the time law on `𝔽_n`.
pub fn doubled_time(p: f64, q: f64) -> Result<f64, BenchError> {
    Ok(2.0 * optimal_time(p, q)?)
}

/// `½ log(1/(p−1)) + ½(1/p − ½) log 2`, for `L_p → L₂` on `𝔽_n`.
pub fn improvement_time(p: f64) -> Result<f64, BenchError> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(BenchError::ExponentRange { p, range: "(1, 2]" });
    }
    Ok(0.5 * (1.0 / (p - 1.0)).ln() + 0.5 * (1.0 / p - 0.5) * std::f64::consts::LN_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeRule {
    Optimal,
    Doubled,
    Improvement,
    Explicit(f64),
}

impl TimeRule {
    pub fn resolve(self, p: f64, q: f64) -> Result<f64, BenchError> {
        match self {
            TimeRule::Optimal => optimal_time(p, q),
            TimeRule::Doubled => doubled_time(p, q),
            TimeRule::Improvement => {
                check_exponents(p, q)?;
                if q != 2.0 {
                    return Err(BenchError::ImprovementNeedsQ2(q));
                }
                improvement_time(p)
            }
            TimeRule::Explicit(t) if t.is_finite() && t >= 0.0 => Ok(t),
            TimeRule::Explicit(t) => Err(BenchError::Time(t)),
        }
    }
}

impl std::str::FromStr for TimeRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimal" => Ok(TimeRule::Optimal),
            "doubled" => Ok(TimeRule::Doubled),
            "improvement" => Ok(TimeRule::Improvement),
            other => other
                .parse::<f64>()
                .map(TimeRule::Explicit)
                .map_err(|_| format!("expected optimal, doubled, improvement or a number, got `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Handle {
    Spin { element: SpinElement<Complex64>, sf: SignFunction },
    Group(GroupAlgebraElement<Complex64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Spectral,
    Moments { nodes: usize },
}

#[derive(Clone, Debug)]
pub struct HCQuery {
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub element: Handle,
    pub route: Route,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of a claim `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    /// Quadrature stabilization of the less resolved side; 0 for exact routes.
    pub stabilization: f64,
    pub conclusive: bool,
    pub pass: bool,
}

impl Margin {
    pub fn exact(lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = lhs - rhs;
        Self { lhs, rhs, margin, tol, stabilization: 0.0, conclusive: true, pass: margin <= tol }
    }

    pub fn gated(lhs: f64, rhs: f64, tol: f64, stabilization: f64) -> Self {
        let margin = lhs - rhs;
        let conclusive = stabilization <= STABILIZATION_GATE;
        Self { lhs, rhs, margin, tol, stabilization, conclusive, pass: conclusive && margin <= tol }
    }

    pub fn verdict(&self) -> Verdict {
        match (self.conclusive, self.pass) {
            (false, _) => Verdict::Inconclusive,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Fail,
        }
    }
}

/// `‖a‖_p` on a group algebra: exact for `p = 2`, quadrature otherwise.
pub fn group_norm(a: &GroupAlgebraElement<Complex64>, p: f64, nodes: usize) -> Result<QuadNorm, BenchError> {
    if p == 2.0 {
        return Ok(QuadNorm { value: group::norm2(a), stabilization: 0.0, nodes: 0, requested: nodes });
    }
    Ok(group_quadrature(a, nodes)?.norm(p)?)
}

fn spin_moment_norm(a: &SpinElement<Complex64>, sf: &SignFunction, p: f64, nodes: usize) -> Result<QuadNorm, BenchError> {
    let mu: Vec<f64> = spin_moments(a, sf, 2 * nodes + 1)?.into_iter().map(|z| z.re).collect();
    Ok(lp_norm_moments_capped(&mu, p, nodes)?)
}

/// `‖S_t x‖_q` against `‖x‖_p`, with `S_t` the OU semigroup on spin
/// elements and the Poisson semigroup on group elements.
pub fn hc_margin(query: &HCQuery) -> Result<Margin, BenchError> {
    let HCQuery { p, q, t, .. } = *query;
    check_exponents(p, q)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(BenchError::Time(t));
    }
    match (&query.element, query.route) {
        (Handle::Spin { element, sf }, Route::Spectral) => {
            let lhs = lp_norm_spectral(&ou_semigroup(element, t)?, sf, q)?;
            let rhs = lp_norm_spectral(element, sf, p)?;
            Ok(Margin::exact(lhs, rhs, SPECTRAL_TOL))
        }
        (Handle::Spin { element, sf }, Route::Moments { nodes }) => {
            let lhs = spin_moment_norm(&ou_semigroup(element, t)?, sf, q, nodes)?;
            let rhs = spin_moment_norm(element, sf, p, nodes)?;
            Ok(Margin::gated(lhs.value, rhs.value, MOMENT_TOL, lhs.stabilization.max(rhs.stabilization)))
        }
        (Handle::Group(a), Route::Moments { nodes }) => {
            let lhs = group_norm(&poisson_semigroup(a, t)?, q, nodes)?;
            let rhs = group_norm(a, p, nodes)?;
            Ok(Margin::gated(lhs.value, rhs.value, MOMENT_TOL, lhs.stabilization.max(rhs.stabilization)))
        }
        (Handle::Group(_), Route::Spectral) => Err(BenchError::SpectralGroup),
    }
}

/// `‖1 + δx‖_p` on the two-point space.
pub fn two_point_norm(delta: f64, p: f64) -> f64 {
    (((1.0 + delta).abs().powf(p) + (1.0 - delta).abs().powf(p)) / 2.0).powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub t: f64,
    /// `(δ, ‖P_t f‖_q − ‖f‖_p)` for each grid point.
    pub margins: Vec<(f64, f64)>,
    /// First grid point whose margin exceeds [`VIOLATION_FLOOR`].
    pub witness: Option<(f64, f64)>,
}

/// Scans `f = 1 + δx` at `t = t_factor · optimal_time(p, q)`.
pub fn sharpness_probe(p: f64, q: f64, t_factor: f64, deltas: &[f64]) -> Result<SharpnessReport, BenchError> {
    if !(p > 1.0 && p < q && q.is_finite()) {
        return Err(BenchError::Exponents { p, q });
    }
    let t = t_factor * optimal_time(p, q)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(BenchError::Time(t));
    }
    let r = (-t).exp();
    let margins: Vec<(f64, f64)> =
        deltas.iter().map(|&d| (d, two_point_norm(r * d, q) - two_point_norm(d, p))).collect();
    let witness = margins.iter().copied().find(|&(_, m)| m > VIOLATION_FLOOR);
    Ok(SharpnessReport { t, margins, witness })
}

/// Margin of the two-point inequality at `(α, β)` with `r = e^{−t}`.
pub fn two_point_margin(p: f64, q: f64, r: f64, alpha: Complex64, beta: Complex64) -> f64 {
    let lhs = ([1.0, -1.0].iter())
        .map(|&e| (((1.0 + e * r) * alpha + (1.0 - e * r) * beta) / 2.0).norm().powf(q) / 2.0)
        .sum::<f64>()
        .powf(1.0 / q);
    let rhs = ((alpha.norm().powf(p) + beta.norm().powf(p)) / 2.0).powf(1.0 / p);
    lhs - rhs
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub worst: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub points: usize,
}

pub fn two_point_scan(p: f64, q: f64, r: f64, points: &[(Complex64, Complex64)]) -> Result<ScanReport, BenchError> {
    check_exponents(p, q)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(BenchError::Radius(r));
    }
    let mut best = ScanReport { worst: f64::NEG_INFINITY, alpha: Complex64::default(), beta: Complex64::default(), points: 0 };
    for &(a, b) in points {
        let m = two_point_margin(p, q, r, a, b);
        if m > best.worst {
            best = ScanReport { worst: m, alpha: a, beta: b, points: 0 };
        }
    }
    best.points = points.len();
    Ok(best)
}

/// `α = 1` and `β` on an `n × n` grid of `[−w, w]²`; by homogeneity and
/// phase invariance this covers every ratio `β/α` in the square.
pub fn unit_alpha_grid(n: usize, w: f64) -> Vec<(Complex64, Complex64)> {
    let step = |j: usize| if n == 1 { 0.0 } else { -w + 2.0 * w * j as f64 / (n - 1) as f64 };
    let one = Complex64::new(1.0, 0.0);
    (0..n).flat_map(|x| (0..n).map(move |y| (one, Complex64::new(step(x), step(y))))).collect()
}

/// `Tr|X|^p` from the singular values.
pub fn schatten_trace(x: &DMatrix<Complex64>, p: f64) -> f64 {
    x.singular_values().iter().map(|s| s.powf(p)).sum()
}

/// Ball–Carlen–Lieb: `(Tr|A|^p)^{2/p} + (p−1)(Tr|B|^p)^{2/p}` (lhs) is at most
/// `((Tr|A+B|^p + Tr|A−B|^p)/2)^{2/p}` (rhs) for `1 ≤ p ≤ 2`.
pub fn bcl_check(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, p: f64) -> Result<Margin, BenchError> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(BenchError::Shape(a.shape(), b.shape()));
    }
    if !(1.0..=2.0).contains(&p) {
        return Err(BenchError::ExponentRange { p, range: "[1, 2]" });
    }
    let e = 2.0 / p;
    let rhs = ((schatten_trace(&(a + b), p) + schatten_trace(&(a - b), p)) / 2.0).powf(e);
    let lhs = schatten_trace(a, p).powf(e) + (p - 1.0) * schatten_trace(b, p).powf(e);
    Ok(Margin::exact(lhs, rhs, 1e-10))
}

/// `|‖Σ ρ_j x_j‖_p − (Σ ρ_j²)^{1/2}|` for CAR generators `x_j`.
pub fn khintchine_check(coeffs: &[f64], p: f64) -> Result<Margin, BenchError> {
    if coeffs.is_empty() {
        return Err(BenchError::NoCoefficients);
    }
    let dims = Dims::new(1, coeffs.len() as u32, 1);
    let sf = SignFunction::car(dims);
    let mut terms = Vec::with_capacity(coeffs.len());
    for (j, &c) in coeffs.iter().enumerate() {
        terms.push((SpinWord::from_gens(dims, &[GenIndex::new(1, j as u32 + 1, 1)])?, Complex64::new(c, 0.0)));
    }
    let x = SpinElement::from_terms(dims, terms);
    let lhs = lp_norm_spectral(&x, &sf, p)?;
    let rhs = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut m = Margin::exact(lhs, rhs, 1e-10);
    m.margin = (lhs - rhs).abs();
    m.pass = m.margin <= m.tol;
    Ok(m)
}

/// Coefficients of `a₀ 1 + Σ a_α λ(g_α) + b_α λ(g_α)*` in `ℒ(𝔽_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct W1Input {
    pub a0: Complex64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl W1Input {
    pub fn element(&self) -> Result<GroupAlgebraElement<Complex64>, BenchError> {
        if self.a.len() != self.b.len() {
            return Err(BenchError::CoefficientLengths(self.a.len(), self.b.len()));
        }
        let mut terms = vec![(GroupWord::identity(), self.a0)];
        for (j, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let g = j as i32 + 1;
            terms.push((GroupWord::reduce(Flavor::Free, &[g])?, *a));
            terms.push((GroupWord::reduce(Flavor::Free, &[-g])?, *b));
        }
        Ok(GroupAlgebraElement::from_terms(Flavor::Free, terms))
    }

    /// `‖P_t f‖₂` in closed form.
    pub fn l2_at(&self, t: f64) -> f64 {
        let s: f64 = self.a.iter().chain(&self.b).map(|c| c.norm_sqr()).sum();
        (self.a0.norm_sqr() + (-2.0 * t).exp() * s).sqrt()
    }
}

/// `‖P_t f‖₂ ≤ ‖f‖_p` at `t = −½ log(p−1)` for `f ∈ W₁`.
pub fn w1_check(input: &W1Input, p: f64, nodes: usize) -> Result<Margin, BenchError> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(BenchError::ExponentRange { p, range: "(1, 2]" });
    }
    let t = -0.5 * (p - 1.0).ln();
    let rhs = group_norm(&input.element()?, p, nodes)?;
    Ok(Margin::gated(input.l2_at(t), rhs.value, MOMENT_TOL, rhs.stabilization))
}

/// Two-sided bounds on `‖a‖_p`, `1 ≤ p ≤ 4`, from the exact `‖a‖₂` and
/// `‖a‖₄` via log-convexity of `1/p ↦ log ‖a‖_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn interpolation_bounds(a: &GroupAlgebraElement<Complex64>, p: f64) -> Result<NormBounds, BenchError> {
    if !(1.0..=4.0).contains(&p) {
        return Err(BenchError::ExponentRange { p, range: "[1, 4]" });
    }
    let m = group::moments(a, 3);
    let l2 = m[1].re.max(0.0).sqrt();
    let l4 = m[2].re.max(0.0).powf(0.25);
    Ok(if p <= 2.0 {
        // ‖a‖₂ ≤ ‖a‖_p^θ ‖a‖₄^{1−θ}
        let theta = p / (4.0 - p);
        let lower = if l2 == 0.0 { 0.0 } else { (l2 / l4.powf(1.0 - theta)).powf(1.0 / theta) };
        NormBounds { lower, upper: l2 }
    } else {
        let theta = 4.0 / p - 1.0;
        NormBounds { lower: l2, upper: l2.powf(theta) * l4.powf(1.0 - theta) }
    })
}

/// `‖P_t f‖₂ ≤ ‖f‖_p` at the improvement time.
pub fn improvement_time_check(f: &GroupAlgebraElement<Complex64>, p: f64, nodes: usize) -> Result<Margin, BenchError> {
    let t = improvement_time(p)?;
    let lhs = group::norm2(&poisson_semigroup(f, t)?);
    let rhs = group_norm(f, p, nodes)?;
    Ok(Margin::gated(lhs, rhs.value, MOMENT_TOL, rhs.stabilization))
}

/// `β = 1 + ¼ log 2`.
pub fn beta() -> f64 {
    1.0 + std::f64::consts::LN_2 / 4.0
}

/// `½ log(1/(p−1)) + ½(1/p − ½) log 2 − (β/2) log(1/(p−1))`.
pub fn beta_margin(p: f64) -> f64 {
    let l = (1.0 / (p - 1.0)).ln();
    0.5 * l + 0.5 * (1.0 / p - 0.5) * std::f64::consts::LN_2 - beta() / 2.0 * l
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaScan {
    pub worst: f64,
    pub at: f64,
    pub points: usize,
}

pub fn beta_scan(grid: &[f64]) -> Result<BetaScan, BenchError> {
    if let Some(&p) = grid.iter().find(|&&p| !(p > 1.0 && p <= 2.0)) {
        return Err(BenchError::ExponentRange { p, range: "(1, 2]" });
    }
    let mut out = BetaScan { worst: f64::NEG_INFINITY, at: f64::NAN, points: grid.len() };
    for &p in grid {
        let m = beta_margin(p);
        if m > out.worst {
            out.worst = m;
            out.at = p;
        }
    }
    Ok(out)
}

/// Deterministic RNG for sample `stream` of a run seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex normal: real and imaginary parts `N(0, ½)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// I.i.d. complex normal coefficients on every spin word, optionally
/// symmetrised to `(x + x*)/2`.
pub fn random_spin_element<R: Rng + ?Sized>(
    sf: &SignFunction,
    rng: &mut R,
    self_adjoint: bool,
) -> Result<SpinElement<Complex64>, BenchError> {
    let dims = sf.dims();
    let count = dims.count();
    if count > crate::gns::DEFAULT_CAP {
        return Err(GnsError::CapExceeded { gens: count, cap: crate::gns::DEFAULT_CAP }.into());
    }
    let x = SpinElement::from_terms(dims, (0..1u64 << count).map(|w| (SpinWord(w), complex_normal(rng))));
    if !self_adjoint {
        return Ok(x);
    }
    Ok(x.add(&spin::adjoint(&x, sf)?).scale(&Complex64::new(0.5, 0.0)))
}

/// I.i.d. complex normal coefficients on all reduced words of length
/// `≤ max_len` over `n` generators.
pub fn random_group_element<R: Rng + ?Sized>(
    flavor: Flavor,
    n: u32,
    max_len: usize,
    rng: &mut R,
    self_adjoint: bool,
) -> GroupAlgebraElement<Complex64> {
    let x = GroupAlgebraElement::from_terms(
        flavor,
        words_up_to(flavor, n, max_len).into_iter().map(|w| (w, complex_normal(rng))),
    );
    if !self_adjoint {
        return x;
    }
    x.add(&group::adjoint(&x)).expect("same flavor").scale(&Complex64::new(0.5, 0.0))
}

/// Random `n × n` matrix with standard complex normal entries.
pub fn random_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn time_laws() {
        assert!((optimal_time(2.0, 4.0).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-15);
        assert_eq!(optimal_time(3.0, 3.0).unwrap(), 0.0);
        assert!((optimal_time(1.5, 2.0).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(optimal_time(1.0, 2.0).is_err());
        assert!(optimal_time(3.0, 2.0).is_err());
        assert_eq!(improvement_time(2.0).unwrap(), 0.0);
        assert_eq!(TimeRule::Doubled.resolve(1.5, 3.0).unwrap(), 4f64.ln());
        assert!(TimeRule::Improvement.resolve(1.5, 3.0).is_err());
        assert_eq!("0.25".parse::<TimeRule>().unwrap(), TimeRule::Explicit(0.25));
    }

    #[test]
    fn spin_margin_at_optimal_time() {
        let dims = Dims::new(1, 1, 1);
        let sf = SignFunction::car(dims);
        let x = SpinElement::from_terms(dims, [(SpinWord(0), c(1.0)), (SpinWord(1), c(1.0))]);
        let t = optimal_time(2.0, 4.0).unwrap();
        let q = HCQuery { p: 2.0, q: 4.0, t, element: Handle::Spin { element: x.clone(), sf: sf.clone() }, route: Route::Spectral };
        let m = hc_margin(&q).unwrap();
        // ‖1+x‖₂ = √2; spectrum of 1 + e^{−t}x is {1 ± r}
        let r = (-t).exp();
        let lhs = (((1.0 + r).powi(4) + (1.0 - r).powi(4)) / 2.0).powf(0.25);
        assert!((m.lhs - lhs).abs() < 1e-12 && (m.rhs - 2f64.sqrt()).abs() < 1e-12);
        assert!(m.margin <= 1e-9 && m.pass);
        let same = HCQuery { p: 3.0, q: 3.0, t: 0.0, element: Handle::Spin { element: x, sf }, route: Route::Spectral };
        assert_eq!(hc_margin(&same).unwrap().margin, 0.0);
    }

    #[test]
    fn group_margin_doubled_time() {
        let mut rng = rng_for(5, 0);
        let f = random_group_element(Flavor::Free, 2, 2, &mut rng, false);
        let t = doubled_time(1.5, 3.0).unwrap();
        let m = hc_margin(&HCQuery { p: 1.5, q: 3.0, t, element: Handle::Group(f.clone()), route: Route::Moments { nodes: 6 } })
            .unwrap();
        assert!(m.margin <= MOMENT_TOL, "{m:?}");
        let spectral = HCQuery { p: 1.5, q: 3.0, t, element: Handle::Group(f), route: Route::Spectral };
        assert!(matches!(hc_margin(&spectral), Err(BenchError::SpectralGroup)));
    }

    #[test]
    fn sharpness_examples() {
        let grid: Vec<f64> = (1..=10).map(|j| 0.05 * j as f64).collect();
        let below = sharpness_probe(2.0, 4.0, 0.9, &grid).unwrap();
        assert!(below.witness.unwrap().1 > 1e-6);
        assert!(sharpness_probe(2.0, 4.0, 1.0, &grid).unwrap().witness.is_none());
        let flat = sharpness_probe(2.0, 4.0, 0.5, &[0.0]).unwrap();
        assert_eq!(flat.margins, vec![(0.0, 0.0)]);
    }

    #[test]
    fn two_point_examples() {
        let r = (1.0f64 / 3.0).sqrt();
        let grid = unit_alpha_grid(50, 2.0);
        assert!(two_point_scan(2.0, 4.0, r, &grid).unwrap().worst <= 1e-10);
        assert!(two_point_scan(2.0, 4.0, r + 0.02, &grid).unwrap().worst > 0.0);
        let a = Complex64::new(0.3, -1.2);
        assert!(two_point_margin(1.7, 5.0, 0.9, a, a).abs() < 1e-15);
        assert!(two_point_scan(2.0, 4.0, 1.5, &grid).is_err());
    }

    #[test]
    fn bcl_examples() {
        let one = DMatrix::from_element(1, 1, c(1.0));
        let m = bcl_check(&one, &one, 2.0).unwrap();
        assert_eq!((m.lhs, m.rhs), (2.0, 2.0));
        let mut rng = rng_for(1, 0);
        let a = random_matrix(4, &mut rng);
        let b = random_matrix(4, &mut rng);
        assert!((bcl_check(&a, &DMatrix::zeros(4, 4), 1.5).unwrap().margin).abs() < 1e-12);
        assert!(bcl_check(&a, &b, 1.5).unwrap().pass);
        assert!(bcl_check(&a, &DMatrix::zeros(3, 3), 1.5).is_err());
    }

    #[test]
    fn khintchine_examples() {
        assert!((khintchine_check(&[1.0, 1.0], 3.0).unwrap().lhs - 2f64.sqrt()).abs() < 1e-12);
        let m = khintchine_check(&[3.0, 4.0], 1.3).unwrap();
        assert!((m.lhs - 5.0).abs() < 1e-10 && m.pass);
        assert!((khintchine_check(&[-2.5], 4.0).unwrap().lhs - 2.5).abs() < 1e-12);
    }

    #[test]
    fn w1_examples() {
        let scalar = W1Input { a0: c(2.0), a: vec![], b: vec![] };
        assert!(w1_check(&scalar, 1.5, 4).unwrap().margin.abs() < 1e-12);
        let f = W1Input { a0: c(1.0), a: vec![c(1.0)], b: vec![c(1.0)] };
        let m = w1_check(&f, 1.5, 8).unwrap();
        assert!((m.lhs - 2f64.sqrt()).abs() < 1e-12);
        assert!(m.margin <= MOMENT_TOL, "{m:?}");
        let twisted = W1Input { a0: c(1.0), a: vec![Complex64::from_polar(1.0, 0.4)], b: vec![Complex64::from_polar(1.0, -1.1)] };
        assert!(w1_check(&twisted, 1.5, 8).unwrap().margin <= MOMENT_TOL);
    }

    #[test]
    fn improvement_examples() {
        let mut rng = rng_for(3, 0);
        let f = random_group_element(Flavor::Free, 2, 2, &mut rng, false);
        assert!(improvement_time_check(&f, 2.0, 4).unwrap().margin.abs() < 1e-12);
        assert!(improvement_time_check(&f, 1.5, 6).unwrap().margin <= MOMENT_TOL);
    }

    #[test]
    fn beta_examples() {
        let lhs = 7.0 / 12.0 * std::f64::consts::LN_2;
        let rhs = beta() / 2.0 * std::f64::consts::LN_2;
        assert!((beta_margin(1.5) - (lhs - rhs)).abs() < 1e-15);
        assert!((lhs - 0.404_32).abs() < 1e-4 && (rhs - 0.406_64).abs() < 1e-5);
        assert!(beta_margin(2.0).abs() < 1e-15);
        assert!(beta_scan(&[1.0]).is_err());
    }

    #[test]
    fn interpolation_brackets_arcsine_norms() {
        let u = GroupAlgebraElement::word(Flavor::Free, &[1]).unwrap();
        let a = u.add(&group::adjoint(&u)).unwrap();
        // E|X| and E|X|³ for the arcsine law on [−2, 2]
        let pi = std::f64::consts::PI;
        for (p, exact) in [(1.0, 4.0 / pi), (3.0, (32.0 / (3.0 * pi)).powf(1.0 / 3.0))] {
            let b = interpolation_bounds(&a, p).unwrap();
            assert!(b.lower <= exact && exact <= b.upper, "p={p}: {b:?} vs {exact}");
        }
        let b = interpolation_bounds(&a, 2.0).unwrap();
        assert!((b.lower - 2f64.sqrt()).abs() < 1e-15 && (b.upper - 2f64.sqrt()).abs() < 1e-15);
        assert!(interpolation_bounds(&a, 5.0).is_err());
    }
}
