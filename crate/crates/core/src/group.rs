//! Reduced words and group algebras of the free group `𝔽_n` and of
//! `𝔾_n = ℤ₂ * ⋯ * ℤ₂`, the free Poisson semigroup, and the maps
//! `Φ: 𝔽_n → 𝔾_{2n}`, `Λ` (on polynomials in `ζ_j = u_j + u_j*`) and
//! `π: ℒ(𝔽_n) → M₂ ⊗ ℒ(𝔾_{2n})`.
//!
//! Letters are signed 1-based labels: `j` is `g_j` (or `z_j`), `−j` is
//! `g_j⁻¹`. Words are reduced eagerly.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gns::{quad_rules, QuadNorm, QuadRules, QuadratureError};
use crate::scalar::{prune, QComplex, Scalar};
use crate::spin::{normal_order, GenIndex, SignFunction, SpinElement, SpinError, SpinWord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("flavor mismatch: {0:?} vs {1:?}")]
    FlavorMismatch(Flavor, Flavor),
    #[error("invalid letter {0} for {1:?}")]
    BadLetter(i32, Flavor),
    #[error("semigroup time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("spin lift needs d = 1, got d = {0}")]
    LiftNeedsD1(u32),
    #[error("letter {0} exceeds n = {1} of the sign function")]
    LiftLetter(i32, u32),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("malformed element: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Free group `𝔽_n`.
    Free,
    /// Free product of `n` copies of `ℤ₂`.
    #[serde(rename = "freez2")]
    FreeZ2,
}

impl Flavor {
    fn cancels(self, x: i8, y: i8) -> bool {
        match self {
            Flavor::Free => x == -y,
            Flavor::FreeZ2 => x == y,
        }
    }

    fn inverse_letter(self, x: i8) -> i8 {
        match self {
            Flavor::Free => -x,
            Flavor::FreeZ2 => x,
        }
    }
}

/// Reduced word; the flavor is carried by the enclosing element.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord(Vec<i8>);

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl GroupWord {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// Reduces an arbitrary letter sequence.
    pub fn reduce(flavor: Flavor, letters: &[i32]) -> Result<Self, GroupError> {
        let mut out: Vec<i8> = Vec::with_capacity(letters.len());
        for &x in letters {
            if x == 0 || x.abs() > i8::MAX as i32 || (flavor == Flavor::FreeZ2 && x < 0) {
                return Err(GroupError::BadLetter(x, flavor));
            }
            let x = x as i8;
            match out.last() {
                Some(&y) if flavor.cancels(y, x) => {
                    out.pop();
                }
                _ => out.push(x),
            }
        }
        Ok(Self(out))
    }

    pub fn letters(&self) -> impl Iterator<Item = i32> + '_ {
        self.0.iter().map(|&x| x as i32)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Self, flavor: Flavor) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut overlap = 0;
        while overlap < a.len().min(b.len()) && flavor.cancels(a[a.len() - 1 - overlap], b[overlap]) {
            overlap += 1;
        }
        let mut out = Vec::with_capacity(a.len() + b.len() - 2 * overlap);
        out.extend_from_slice(&a[..a.len() - overlap]);
        out.extend_from_slice(&b[overlap..]);
        Self(out)
    }

    fn inverse(&self, flavor: Flavor) -> Self {
        Self(self.0.iter().rev().map(|&x| flavor.inverse_letter(x)).collect())
    }
}

/// All reduced words of length ≤ `max_len` on `n` generators, by length then lexicographically.
pub fn words_up_to(flavor: Flavor, n: u32, max_len: usize) -> Vec<GroupWord> {
    let alphabet: Vec<i8> = match flavor {
        Flavor::Free => (1..=n as i8).flat_map(|j| [j, -j]).collect(),
        Flavor::FreeZ2 => (1..=n as i8).collect(),
    };
    let mut out = vec![GroupWord::identity()];
    let mut layer = vec![GroupWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in &alphabet {
                if w.0.last().is_some_and(|&y| flavor.cancels(y, x)) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(x);
                next.push(GroupWord(v));
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, PartialEq)]
pub struct GroupAlgebraElement<S: Scalar = Complex64> {
    flavor: Flavor,
    terms: BTreeMap<GroupWord, S>,
}

impl<S: Scalar> fmt::Debug for GroupAlgebraElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupAlgebraElement")
            .field("flavor", &self.flavor)
            .field("terms", &self.terms)
            .finish()
    }
}

impl<S: Scalar> GroupAlgebraElement<S> {
    pub fn zero(flavor: Flavor) -> Self {
        Self { flavor, terms: BTreeMap::new() }
    }

    pub fn identity(flavor: Flavor) -> Self {
        Self::from_terms(flavor, [(GroupWord::identity(), S::one())])
    }

    /// `λ(g)` for the reduction of the given letters.
    pub fn word(flavor: Flavor, letters: &[i32]) -> Result<Self, GroupError> {
        Ok(Self::from_terms(flavor, [(GroupWord::reduce(flavor, letters)?, S::one())]))
    }

    pub fn from_terms<I: IntoIterator<Item = (GroupWord, S)>>(flavor: Flavor, terms: I) -> Self {
        let mut map: BTreeMap<GroupWord, S> = BTreeMap::new();
        for (w, c) in terms {
            map.entry(w).or_insert_with(S::zero).add_assign_ref(&c);
        }
        prune(&mut map);
        Self { flavor, terms: map }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn terms(&self) -> &BTreeMap<GroupWord, S> {
        &self.terms
    }

    pub fn coeff(&self, w: &GroupWord) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&GroupWord, &S) -> T) -> GroupAlgebraElement<T> {
        GroupAlgebraElement::from_terms(self.flavor, self.terms.iter().map(|(w, c)| (w.clone(), f(w, c))))
    }

    pub fn to_c64(&self) -> GroupAlgebraElement<Complex64> {
        self.map_coeffs(|_, c| c.to_c64())
    }

    pub fn to_exact(&self) -> GroupAlgebraElement<QComplex> {
        self.map_coeffs(|_, c| QComplex::from_c64(c.to_c64()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, GroupError> {
        same_flavor(self, other)?;
        Ok(Self::from_terms(
            self.flavor,
            self.terms.iter().chain(&other.terms).map(|(w, c)| (w.clone(), c.clone())),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GroupError> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coeffs(|_, x| x.mul_ref(c))
    }
}

fn same_flavor<S: Scalar>(a: &GroupAlgebraElement<S>, b: &GroupAlgebraElement<S>) -> Result<(), GroupError> {
    if a.flavor != b.flavor {
        return Err(GroupError::FlavorMismatch(a.flavor, b.flavor));
    }
    Ok(())
}

/// Chunk size for parallel convolution; fixed so results do not depend on the thread count.
const CONV_CHUNK: usize = 4096;

/// Convolution with word reduction.
pub fn reduce_multiply<S: Scalar>(
    a: &GroupAlgebraElement<S>,
    b: &GroupAlgebraElement<S>,
) -> Result<GroupAlgebraElement<S>, GroupError> {
    same_flavor(a, b)?;
    let flavor = a.flavor;
    let convolve = |chunk: &[(&GroupWord, &S)]| {
        let mut out: BTreeMap<GroupWord, S> = BTreeMap::new();
        for (wa, ca) in chunk {
            for (wb, cb) in &b.terms {
                let c = ca.mul_ref(cb);
                out.entry(wa.mul(wb, flavor)).or_insert_with(S::zero).add_assign_ref(&c);
            }
        }
        out
    };
    let left: Vec<(&GroupWord, &S)> = a.terms.iter().collect();
    let mut out = if left.len() * b.terms.len() < 4 * CONV_CHUNK {
        convolve(&left)
    } else {
        let parts: Vec<BTreeMap<GroupWord, S>> = left.par_chunks(CONV_CHUNK).map(convolve).collect();
        let mut parts = parts.into_iter();
        let mut acc = parts.next().unwrap_or_default();
        for part in parts {
            for (w, c) in part {
                acc.entry(w).or_insert_with(S::zero).add_assign_ref(&c);
            }
        }
        acc
    };
    prune(&mut out);
    Ok(GroupAlgebraElement { flavor, terms: out })
}

pub fn trace<S: Scalar>(a: &GroupAlgebraElement<S>) -> S {
    a.coeff(&GroupWord::identity())
}

pub fn adjoint<S: Scalar>(a: &GroupAlgebraElement<S>) -> GroupAlgebraElement<S> {
    GroupAlgebraElement::from_terms(a.flavor, a.terms.iter().map(|(w, c)| (w.inverse(a.flavor), c.conj())))
}

/// `τ(a* b) = Σ_g conj(â(g)) b̂(g)`.
pub fn inner<S: Scalar>(a: &GroupAlgebraElement<S>, b: &GroupAlgebraElement<S>) -> S {
    let mut acc = S::zero();
    for (w, ca) in &a.terms {
        if let Some(cb) = b.terms.get(w) {
            acc.add_assign_ref(&ca.conj().mul_ref(cb));
        }
    }
    acc
}

pub fn norm2<S: Scalar>(a: &GroupAlgebraElement<S>) -> f64 {
    a.terms.values().map(|c| c.to_c64().norm_sqr()).sum::<f64>().sqrt()
}

pub fn poisson_semigroup<S: Scalar>(a: &GroupAlgebraElement<S>, t: f64) -> Result<GroupAlgebraElement<S>, GroupError> {
    if t.is_nan() || t < 0.0 {
        return Err(GroupError::NegativeTime(t));
    }
    Ok(a.map_coeffs(|w, c| c.mul_ref(&S::from_f64((-t * w.len() as f64).exp()))))
}

/// Word `g` scaled by `r^{|g|}` (the semigroup at `r = e^{−t}`); exact for rational `r`.
pub fn poisson_contract<S: Scalar>(a: &GroupAlgebraElement<S>, r: &S) -> GroupAlgebraElement<S> {
    a.map_coeffs(|w, c| {
        let mut f = c.clone();
        for _ in 0..w.len() {
            f = f.mul_ref(r);
        }
        f
    })
}

/// `Φ(g_j) = z_{2j−1} z_{2j}`, so `Φ(g_j⁻¹) = z_{2j} z_{2j−1}`.
pub fn phi_embed<S: Scalar>(a: &GroupAlgebraElement<S>) -> Result<GroupAlgebraElement<S>, GroupError> {
    if a.flavor != Flavor::Free {
        return Err(GroupError::FlavorMismatch(a.flavor, Flavor::Free));
    }
    let image = |w: &GroupWord| {
        let mut out = Vec::with_capacity(2 * w.len());
        for x in w.letters() {
            let j = x.abs();
            if x > 0 {
                out.extend([(2 * j - 1) as i8, (2 * j) as i8]);
            } else {
                out.extend([(2 * j) as i8, (2 * j - 1) as i8]);
            }
        }
        GroupWord(out)
    };
    Ok(GroupAlgebraElement::from_terms(
        Flavor::FreeZ2,
        a.terms.iter().map(|(w, c)| (image(w), c.clone())),
    ))
}

/// Multiplies `ĝ(g)` by the character `χ(g) = Π e^{±iθ_j}` of `𝔽_n`.
pub fn character_twist(
    a: &GroupAlgebraElement<Complex64>,
    thetas: &[f64],
) -> Result<GroupAlgebraElement<Complex64>, GroupError> {
    if a.flavor != Flavor::Free {
        return Err(GroupError::FlavorMismatch(a.flavor, Flavor::Free));
    }
    for w in a.terms.keys() {
        if let Some(x) = w.letters().find(|x| x.unsigned_abs() as usize > thetas.len()) {
            return Err(GroupError::BadLetter(x, Flavor::Free));
        }
    }
    Ok(a.map_coeffs(|w, c| {
        let phase: f64 = w.letters().map(|x| x.signum() as f64 * thetas[x.unsigned_abs() as usize - 1]).sum();
        c * Complex64::from_polar(1.0, phase)
    }))
}

pub fn binomial(m: u64, k: u64) -> i64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1i128, |acc, i| acc * (m - i) as i128 / (i + 1) as i128) as i64
}

/// `u_j^k + u_j^{−k}` for `k ≥ 1`, and `1` for `k = 0`.
pub fn v_element<S: Scalar>(j: u32, k: usize) -> GroupAlgebraElement<S> {
    if k == 0 {
        return GroupAlgebraElement::identity(Flavor::Free);
    }
    let j = j as i8;
    GroupAlgebraElement::from_terms(
        Flavor::Free,
        [(GroupWord(vec![j; k]), S::one()), (GroupWord(vec![-j; k]), S::one())],
    )
}

/// Alternating word of length `k` in `z_{2j−1}, z_{2j}` starting at `z_{2j−1}`.
pub fn ladder_a(j: u32, k: usize) -> GroupWord {
    let (x, y) = ((2 * j - 1) as i8, (2 * j) as i8);
    GroupWord((0..k).map(|p| if p % 2 == 0 { x } else { y }).collect())
}

/// Alternating word of length `k` starting at `z_{2j}`.
pub fn ladder_b(j: u32, k: usize) -> GroupWord {
    let (x, y) = ((2 * j - 1) as i8, (2 * j) as i8);
    GroupWord((0..k).map(|p| if p % 2 == 0 { y } else { x }).collect())
}

/// `Λ(v_{j,k}) = a_{j,k} + b_{j,k}`, with `Λ(v_{j,0}) = 1`.
pub fn lambda_v<S: Scalar>(j: u32, k: usize) -> GroupAlgebraElement<S> {
    if k == 0 {
        return GroupAlgebraElement::identity(Flavor::FreeZ2);
    }
    GroupAlgebraElement::from_terms(Flavor::FreeZ2, [(ladder_a(j, k), S::one()), (ladder_b(j, k), S::one())])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymSide {
    /// `(u_j + u_j*)^m` in `ℒ(𝔽_n)`.
    Z,
    /// `(z_{2j−1} + z_{2j})^m` in `ℒ(𝔾_{2n})`.
    Z2,
}

/// Closed-form expansion of `(u_j + u_j*)^m` or `(z_{2j−1} + z_{2j})^m`.
pub fn sym_expand<S: Scalar>(j: u32, m: usize, side: SymSide) -> GroupAlgebraElement<S> {
    let flavor = match side {
        SymSide::Z => Flavor::Free,
        SymSide::Z2 => Flavor::FreeZ2,
    };
    let mut terms = Vec::new();
    for k in 0..=m / 2 {
        let c = S::from_i64(binomial(m as u64, k as u64));
        let basis = match side {
            SymSide::Z => v_element::<S>(j, m - 2 * k),
            SymSide::Z2 => lambda_v::<S>(j, m - 2 * k),
        };
        terms.extend(basis.terms.into_iter().map(|(w, b)| (w, b * c.clone())));
    }
    GroupAlgebraElement::from_terms(flavor, terms)
}

/// Noncommutative polynomial in the `ζ_j` with integer coefficients;
/// each monomial is a sequence of indices `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZetaPolynomial {
    pub terms: Vec<(i64, Vec<u32>)>,
}

impl ZetaPolynomial {
    /// `v_{j,k}` written in `ζ_j`: `v_1 = ζ`, `v_2 = ζ² − 2`, `v_k = ζ v_{k−1} − v_{k−2}`.
    pub fn v(j: u32, k: usize) -> Self {
        // coefficient vectors in powers of ζ_j, with the k = 0 entry u⁰ + u⁰ = 2
        let mut prev: Vec<i64> = vec![2];
        let mut cur: Vec<i64> = vec![0, 1];
        let coeffs = match k {
            0 => vec![1],
            1 => cur.clone(),
            _ => {
                for _ in 2..=k {
                    let mut next = vec![0i64; cur.len() + 1];
                    for (p, &c) in cur.iter().enumerate() {
                        next[p + 1] += c;
                    }
                    for (p, &c) in prev.iter().enumerate() {
                        next[p] -= c;
                    }
                    prev = std::mem::replace(&mut cur, next);
                }
                cur
            }
        };
        Self {
            terms: coeffs
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0)
                .map(|(p, c)| (c, vec![j; p]))
                .collect(),
        }
    }

    fn eval<S: Scalar>(&self, flavor: Flavor, var: impl Fn(u32) -> GroupAlgebraElement<S>) -> GroupAlgebraElement<S> {
        let mut acc = GroupAlgebraElement::zero(flavor);
        for (c, mono) in &self.terms {
            let mut m = GroupAlgebraElement::identity(flavor);
            for &j in mono {
                m = reduce_multiply(&m, &var(j)).expect("same flavor");
            }
            acc = acc.add(&m.scale(&S::from_i64(*c))).expect("same flavor");
        }
        acc
    }

    /// Value at `ζ_j = u_j + u_j*` in `ℒ(𝔽_n)`.
    pub fn eval_zeta<S: Scalar>(&self) -> GroupAlgebraElement<S> {
        self.eval(Flavor::Free, |j| v_element(j, 1))
    }

    /// `Λ` of the polynomial: value at `ψ_j = z_{2j−1} + z_{2j}` in `ℒ(𝔾_{2n})`.
    pub fn lambda<S: Scalar>(&self) -> GroupAlgebraElement<S> {
        self.eval(Flavor::FreeZ2, |j| lambda_v(j, 1))
    }
}

/// 2×2 matrix over `ℒ(𝔾_{2n})`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoByTwoOver<S: Scalar = Complex64> {
    pub entries: [[GroupAlgebraElement<S>; 2]; 2],
}

impl<S: Scalar> TwoByTwoOver<S> {
    pub fn zero() -> Self {
        let z = GroupAlgebraElement::zero(Flavor::FreeZ2);
        Self { entries: [[z.clone(), z.clone()], [z.clone(), z]] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        out.entries[0][0] = GroupAlgebraElement::identity(Flavor::FreeZ2);
        out.entries[1][1] = GroupAlgebraElement::identity(Flavor::FreeZ2);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                let a = reduce_multiply(&self.entries[r][0], &other.entries[0][c]).expect("FreeZ2");
                let b = reduce_multiply(&self.entries[r][1], &other.entries[1][c]).expect("FreeZ2");
                out.entries[r][c] = a.add(&b).expect("FreeZ2");
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for r in 0..2 {
            for c in 0..2 {
                out.entries[r][c] = self.entries[r][c].add(&other.entries[r][c]).expect("FreeZ2");
            }
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = self.clone();
        for row in out.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = e.scale(s);
            }
        }
        out
    }

    /// `(tr ⊗ τ)` with the normalised matrix trace.
    pub fn normalized_trace(&self) -> S {
        (trace(&self.entries[0][0]) + trace(&self.entries[1][1])) * S::from_f64(0.5)
    }
}

fn pi_letter<S: Scalar>(x: i32) -> TwoByTwoOver<S> {
    let j = x.abs();
    let (odd, even) = (2 * j - 1, 2 * j);
    let z = |l: i32| GroupAlgebraElement::word(Flavor::FreeZ2, &[l]).expect("valid letter");
    let mut out = TwoByTwoOver::zero();
    if x > 0 {
        out.entries[0][1] = z(odd);
        out.entries[1][0] = z(even);
    } else {
        out.entries[0][1] = z(even);
        out.entries[1][0] = z(odd);
    }
    out
}

/// `π(u_j) = [[0, z_{2j−1}], [z_{2j}, 0]]`, extended multiplicatively and linearly.
pub fn pi_rep<S: Scalar>(a: &GroupAlgebraElement<S>) -> Result<TwoByTwoOver<S>, GroupError> {
    if a.flavor != Flavor::Free {
        return Err(GroupError::FlavorMismatch(a.flavor, Flavor::Free));
    }
    let mut acc = TwoByTwoOver::zero();
    for (w, c) in &a.terms {
        let mut m = TwoByTwoOver::identity();
        for x in w.letters() {
            m = m.mul(&pi_letter(x));
        }
        acc = acc.add(&m.scale(c));
    }
    Ok(acc)
}

/// Moments `τ((a*a)^k)` for `k = 0..count`, using `μ_{2j} = ‖h^j‖₂²` and
/// `μ_{2j+1} = ⟨h^j, h^{j+1}⟩` with `h = a*a`.
pub fn moments<S: Scalar>(a: &GroupAlgebraElement<S>, count: usize) -> Vec<S> {
    moments_prefix(a, count, usize::MAX)
}

/// As [`moments`], but stops once a power of `a*a` would exceed `budget`
/// terms; the result then holds only the moments reachable so far
/// (always at least `μ₀`, `μ₁`, `μ₂` when `count ≥ 3`).
pub fn moments_prefix<S: Scalar>(a: &GroupAlgebraElement<S>, count: usize, budget: usize) -> Vec<S> {
    moments_from_powers(&powers_of_square(a, count / 2, budget), count)
}

/// `1, h, h², …, h^top` with `h = a*a`, stopping early at `budget` terms.
fn powers_of_square<S: Scalar>(a: &GroupAlgebraElement<S>, top: usize, budget: usize) -> Vec<GroupAlgebraElement<S>> {
    let h = reduce_multiply(&adjoint(a), a).expect("same flavor");
    let mut powers = vec![GroupAlgebraElement::identity(a.flavor)];
    while powers.len() <= top {
        let last = powers.last().unwrap();
        if powers.len() > 1 {
            // supports grow geometrically; skip a product that would be discarded
            let prev = powers[powers.len() - 2].len().max(1);
            let predicted = last.len().saturating_mul(last.len()) / prev;
            if predicted > budget || last.len().saturating_mul(h.len()) > budget.saturating_mul(8) {
                break;
            }
        }
        let next = reduce_multiply(last, &h).expect("same flavor");
        if powers.len() > 1 && next.len() > budget {
            break;
        }
        powers.push(next);
    }
    powers
}

fn moments_from_powers<S: Scalar>(powers: &[GroupAlgebraElement<S>], count: usize) -> Vec<S> {
    let reachable = (2 * powers.len() - 1).min(count);
    (0..reachable)
        .map(|k| {
            let j = k / 2;
            if k % 2 == 0 {
                inner(&powers[j], &powers[j])
            } else {
                inner(&powers[j], &powers[j + 1])
            }
        })
        .collect()
}

/// Term budget below which moments are computed in exact rational arithmetic.
pub const EXACT_MOMENT_BUDGET: usize = 4000;
/// Term budget for the floating-point fallback.
pub const FLOAT_MOMENT_BUDGET: usize = 200_000;

/// Gauss rules for the spectral measure of `a*a` with up to `k` nodes.
///
/// Moments are exact rationals while the powers of `a*a` stay below
/// [`EXACT_MOMENT_BUDGET`] terms; floats (up to [`FLOAT_MOMENT_BUDGET`])
/// are used only if they reach more moments. The node count drops to what
/// the available moments and positivity allow; `QuadRules::nodes` reports it.
pub fn group_quadrature(a: &GroupAlgebraElement<Complex64>, k: usize) -> Result<QuadRules, GroupError> {
    if k == 0 {
        return Err(QuadratureError::NoNodes.into());
    }
    let count = 2 * k + 1;
    let float = powers_of_square(a, count / 2, FLOAT_MOMENT_BUDGET);
    let largest = float.iter().map(GroupAlgebraElement::len).max().unwrap_or(0);
    let moments: Vec<BigRational> = if largest <= EXACT_MOMENT_BUDGET {
        // exact arithmetic reaches the same moments
        moments_from_powers(&powers_of_square(&a.to_exact(), float.len() - 1, usize::MAX), count)
            .into_iter()
            .map(|z| z.re)
            .collect()
    } else {
        moments_from_powers(&float, count)
            .into_iter()
            .map(|z| BigRational::from_float(z.re).unwrap_or_else(BigRational::zero))
            .collect()
    };
    let usable = (moments.len() / 2).clamp(1, k);
    let mut rules = quad_rules(&moments, usable, true)?;
    rules.requested = k;
    Ok(rules)
}

/// `‖a‖_p` from the Gauss rule of [`group_quadrature`].
pub fn group_lp_norm(a: &GroupAlgebraElement<Complex64>, p: f64, k: usize) -> Result<QuadNorm, GroupError> {
    Ok(group_quadrature(a, k)?.norm(p)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftPart {
    Full,
    NoRepeat,
}

#[derive(Clone, Debug)]
pub struct Lift {
    pub element: SpinElement<Complex64>,
    /// Set when `NoRepeat` was requested for words longer than `m`.
    pub truncated: bool,
}

/// `m^{−s/2}`, correctly rounded for even `s`.
pub fn lift_scale(m: u32, s: usize) -> f64 {
    if s % 2 == 0 {
        1.0 / (m as f64).powi(s as i32 / 2)
    } else {
        (m as f64).powf(-(s as f64) / 2.0)
    }
}

/// Replaces each `z_α` by `m^{−1/2} Σ_k x^α(k)` and expands.
pub fn spin_model_lift<S: Scalar>(
    a: &GroupAlgebraElement<S>,
    sf: &SignFunction,
    part: LiftPart,
) -> Result<Lift, GroupError> {
    let m = sf.dims().m as usize;
    let truncated = part == LiftPart::NoRepeat && a.terms.keys().any(|w| w.len() > m);
    let element = lift_terms(a, sf, part, |s| lift_scale(m as u32, s))?;
    Ok(Lift { element, truncated })
}

/// Unnormalised lift `Σ_k x^{α₁}(k₁) ⋯ x^{α_s}(k_s)` (no `m^{−s/2}` factor),
/// which keeps integer coefficients exact.
pub fn spin_model_lift_raw<S: Scalar>(
    a: &GroupAlgebraElement<S>,
    sf: &SignFunction,
    part: LiftPart,
) -> Result<(SpinElement<Complex64>, bool), GroupError> {
    let m = sf.dims().m as usize;
    let truncated = part == LiftPart::NoRepeat && a.terms.keys().any(|w| w.len() > m);
    Ok((lift_terms(a, sf, part, |_| 1.0)?, truncated))
}

fn lift_terms<S: Scalar>(
    a: &GroupAlgebraElement<S>,
    sf: &SignFunction,
    part: LiftPart,
    norm: impl Fn(usize) -> f64,
) -> Result<SpinElement<Complex64>, GroupError> {
    let dims = sf.dims();
    if dims.d != 1 {
        return Err(GroupError::LiftNeedsD1(dims.d));
    }
    if a.flavor != Flavor::FreeZ2 {
        return Err(GroupError::FlavorMismatch(a.flavor, Flavor::FreeZ2));
    }
    let m = dims.m as usize;
    let mut terms: Vec<(SpinWord, Complex64)> = Vec::new();
    for (w, c) in &a.terms {
        let alphas: Vec<u32> = w.letters().map(|x| x as u32).collect();
        if let Some(&bad) = alphas.iter().find(|&&x| x > dims.n) {
            return Err(GroupError::LiftLetter(bad as i32, dims.n));
        }
        let s = alphas.len();
        let c = c.to_c64() * norm(s);
        if part == LiftPart::NoRepeat && s > m {
            continue;
        }
        let mut ks = vec![1u32; s];
        let mut seq = vec![GenIndex::new(1, 1, 1); s];
        loop {
            let admissible = part == LiftPart::Full || {
                let mut seen = 0u64;
                ks.iter().all(|&k| {
                    let bit = 1u64 << (k - 1);
                    let fresh = seen & bit == 0;
                    seen |= bit;
                    fresh
                })
            };
            if admissible {
                for (slot, (&alpha, &k)) in seq.iter_mut().zip(alphas.iter().zip(&ks)) {
                    *slot = GenIndex::new(alpha, 1, k);
                }
                let (sign, word) = normal_order(&seq, sf)?;
                terms.push((word, c * sign as f64));
            }
            // odometer over [m]^s
            let mut pos = 0;
            while pos < s && ks[pos] == m as u32 {
                ks[pos] = 1;
                pos += 1;
            }
            if pos == s {
                break;
            }
            ks[pos] += 1;
        }
    }
    Ok(SpinElement::from_terms(dims, terms))
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    word: Vec<i32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    flavor: Flavor,
    terms: Vec<TermJson>,
}

impl GroupAlgebraElement<Complex64> {
    pub fn to_json(&self) -> serde_json::Value {
        let doc = ElementJson {
            flavor: self.flavor,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermJson { word: w.letters().collect(), re: c.re, im: c.im })
                .collect(),
        };
        serde_json::to_value(doc).expect("serialisable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, GroupError> {
        let doc: ElementJson = serde_json::from_value(value.clone()).map_err(|e| GroupError::Parse(e.to_string()))?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            terms.push((GroupWord::reduce(doc.flavor, &t.word)?, Complex64::new(t.re, t.im)));
        }
        Ok(Self::from_terms(doc.flavor, terms))
    }
}

/// Exact integer-coefficient check helper: every coefficient is a real integer.
pub fn integer_coefficients(a: &GroupAlgebraElement<QComplex>) -> Option<BTreeMap<GroupWord, i64>> {
    a.terms.iter().map(|(w, c)| crate::scalar::q_to_i64(c).map(|v| (w.clone(), v))).collect()
}
