//! Words, products, trace and the Ornstein-Uhlenbeck semigroup in the spin
//! algebra generated by self-adjoint `x_g` with `x_g x_h = ε(g,h) x_h x_g`
//! and `x_g² = 1`.
//!
//! Generators are labelled by [`GenIndex`] `(alpha, i, k)` (1-based) and
//! ordered lexicographically. Elements store words as bitmasks over the
//! linear generator index, so at most [`MAX_GENERATORS`] generators are
//! supported. [`normal_order`] is the reference implementation of the
//! relations; [`multiply`] uses popcounts and must agree with it.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{prune, Scalar};

pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("generator {0:?} outside dims {1:?}")]
    OutOfBounds(GenIndex, Dims),
    #[error("sign for pair ({0:?}, {1:?}) missing")]
    MissingPair(GenIndex, GenIndex),
    #[error("sign for pair ({0:?}, {1:?}) is {2}, expected ±1")]
    BadSign(GenIndex, GenIndex, i32),
    #[error("{0} generators exceed the limit of {MAX_GENERATORS}")]
    TooManyGenerators(usize),
    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimsMismatch(Dims, Dims),
    #[error("semigroup time must be nonnegative, got {0}")]
    NegativeTime(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenIndex {
    pub alpha: u32,
    pub i: u32,
    pub k: u32,
}

impl GenIndex {
    pub const fn new(alpha: u32, i: u32, k: u32) -> Self {
        Self { alpha, i, k }
    }
}

/// Shape `(n, d, m)` of the generator set `[n] × [d] × [m]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub n: u32,
    pub d: u32,
    pub m: u32,
}

impl Dims {
    pub const fn new(n: u32, d: u32, m: u32) -> Self {
        Self { n, d, m }
    }

    pub fn count(&self) -> usize {
        self.n as usize * self.d as usize * self.m as usize
    }

    pub fn contains(&self, g: GenIndex) -> bool {
        (1..=self.n).contains(&g.alpha) && (1..=self.d).contains(&g.i) && (1..=self.m).contains(&g.k)
    }

    /// Position of `g` in the lexicographic order.
    pub fn linear(&self, g: GenIndex) -> Result<usize, SpinError> {
        if !self.contains(g) {
            return Err(SpinError::OutOfBounds(g, *self));
        }
        let (d, m) = (self.d as usize, self.m as usize);
        Ok(((g.alpha as usize - 1) * d + (g.i as usize - 1)) * m + (g.k as usize - 1))
    }

    pub fn gen(&self, idx: usize) -> GenIndex {
        let (d, m) = (self.d as usize, self.m as usize);
        GenIndex {
            alpha: (idx / (d * m)) as u32 + 1,
            i: ((idx / m) % d) as u32 + 1,
            k: (idx % m) as u32 + 1,
        }
    }

    pub fn gens(&self) -> impl Iterator<Item = GenIndex> + '_ {
        (0..self.count()).map(move |idx| self.gen(idx))
    }
}

/// Symmetric ±1 table on generator pairs, −1 on the diagonal.
///
/// Row `g` of `anti` has bit `h` set iff `ε(g,h) = −1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignFunction {
    dims: Dims,
    anti: Vec<u64>,
}

impl SignFunction {
    /// Builds a table from a closure evaluated once per unordered pair `g < h`.
    pub fn try_from_fn<F>(dims: Dims, mut eps: F) -> Result<Self, SpinError>
    where
        F: FnMut(GenIndex, GenIndex) -> Option<i32>,
    {
        let count = dims.count();
        if count > MAX_GENERATORS {
            return Err(SpinError::TooManyGenerators(count));
        }
        let mut anti: Vec<u64> = (0..count).map(|g| 1u64 << g).collect();
        for g in 0..count {
            for h in g + 1..count {
                let (a, b) = (dims.gen(g), dims.gen(h));
                match eps(a, b) {
                    None => return Err(SpinError::MissingPair(a, b)),
                    Some(1) => {}
                    Some(-1) => {
                        anti[g] |= 1 << h;
                        anti[h] |= 1 << g;
                    }
                    Some(v) => return Err(SpinError::BadSign(a, b, v)),
                }
            }
        }
        Ok(Self { dims, anti })
    }

    pub fn from_fn<F>(dims: Dims, mut eps: F) -> Result<Self, SpinError>
    where
        F: FnMut(GenIndex, GenIndex) -> i32,
    {
        Self::try_from_fn(dims, |a, b| Some(eps(a, b)))
    }

    /// All generators anticommute (Clifford/CAR relations).
    pub fn car(dims: Dims) -> Self {
        Self::from_fn(dims, |_, _| -1).expect("valid dims")
    }

    /// Anticommuting within a factor `alpha`, commuting across factors.
    pub fn blockwise(dims: Dims) -> Self {
        Self::from_fn(dims, |a, b| if a.alpha == b.alpha { -1 } else { 1 }).expect("valid dims")
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn eps(&self, g: GenIndex, h: GenIndex) -> Result<i32, SpinError> {
        let (a, b) = (self.dims.linear(g)?, self.dims.linear(h)?);
        Ok(self.eps_linear(a, b))
    }

    pub fn eps_linear(&self, a: usize, b: usize) -> i32 {
        if self.anti[a] >> b & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// Mask of generators anticommuting with linear generator `g` (including `g`).
    pub fn anti_row(&self, g: usize) -> u64 {
        self.anti[g]
    }

    /// Sign and word of `x_A · x_B`.
    pub fn word_product(&self, a: SpinWord, b: SpinWord) -> (i32, SpinWord) {
        let mut parity = 0u32;
        let mut rest = b.0;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let above = if g == 63 { 0 } else { !0u64 << (g + 1) };
            parity += (a.0 & above & self.anti[g]).count_ones();
        }
        let sign = if parity & 1 == 0 { 1 } else { -1 };
        (sign, SpinWord(a.0 ^ b.0))
    }

    /// Sign of reversing the letters of `x_A`, i.e. `x_A* = sign · x_A`.
    pub fn reversal_sign(&self, a: SpinWord) -> i32 {
        let mut parity = 0u32;
        let mut rest = a.0;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let above = if g == 63 { 0 } else { !0u64 << (g + 1) };
            parity += (a.0 & above & self.anti[g]).count_ones();
        }
        if parity & 1 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Canonical word: set of linear generator indices as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinWord(pub u64);

impl SpinWord {
    pub const UNIT: SpinWord = SpinWord(0);

    pub fn from_gens(dims: Dims, gens: &[GenIndex]) -> Result<Self, SpinError> {
        let mut mask = 0u64;
        for &g in gens {
            mask |= 1 << dims.linear(g)?;
        }
        Ok(SpinWord(mask))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Generators in increasing order.
    pub fn gens(&self, dims: Dims) -> Vec<GenIndex> {
        let mut out = Vec::with_capacity(self.len());
        let mut rest = self.0;
        while rest != 0 {
            out.push(dims.gen(rest.trailing_zeros() as usize));
            rest &= rest - 1;
        }
        out
    }
}

/// Reduces a product of generators to `sign · x_word` by insertion sort:
/// one ε lookup per adjacent swap, equal neighbours collapse to 1.
pub fn normal_order(seq: &[GenIndex], sf: &SignFunction) -> Result<(i32, SpinWord), SpinError> {
    let dims = sf.dims();
    let mut sorted: Vec<usize> = Vec::with_capacity(seq.len());
    let mut sign = 1;
    for &g in seq {
        let x = dims.linear(g)?;
        sorted.push(x);
        let mut pos = sorted.len() - 1;
        while pos > 0 {
            let prev = sorted[pos - 1];
            if prev > x {
                sign *= sf.eps_linear(prev, x);
                sorted.swap(pos - 1, pos);
                pos -= 1;
            } else {
                if prev == x {
                    sorted.drain(pos - 1..=pos);
                }
                break;
            }
        }
    }
    let mask = sorted.iter().fold(0u64, |acc, &x| acc | 1 << x);
    Ok((sign, SpinWord(mask)))
}

/// Finite linear combination of canonical words.
#[derive(Clone, PartialEq)]
pub struct SpinElement<S: Scalar = Complex64> {
    dims: Dims,
    terms: BTreeMap<SpinWord, S>,
}

impl<S: Scalar> fmt::Debug for SpinElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for (w, c) in &self.terms {
            list.entry(&(w.gens(self.dims), c));
        }
        list.finish()
    }
}

impl<S: Scalar> SpinElement<S> {
    pub fn zero(dims: Dims) -> Self {
        Self { dims, terms: BTreeMap::new() }
    }

    pub fn scalar(dims: Dims, c: S) -> Self {
        Self::from_terms(dims, [(SpinWord::UNIT, c)])
    }

    pub fn one(dims: Dims) -> Self {
        Self::scalar(dims, S::one())
    }

    pub fn generator(dims: Dims, g: GenIndex) -> Result<Self, SpinError> {
        Ok(Self::from_terms(dims, [(SpinWord::from_gens(dims, &[g])?, S::one())]))
    }

    /// `c · x_{g₁} ⋯ x_{g_s}` in normal order.
    pub fn monomial(sf: &SignFunction, seq: &[GenIndex], c: S) -> Result<Self, SpinError> {
        let (sign, w) = normal_order(seq, sf)?;
        Ok(Self::from_terms(sf.dims(), [(w, c * S::from_i64(sign as i64))]))
    }

    pub fn from_terms<I: IntoIterator<Item = (SpinWord, S)>>(dims: Dims, terms: I) -> Self {
        let mut map: BTreeMap<SpinWord, S> = BTreeMap::new();
        for (w, c) in terms {
            debug_assert!(dims.count() == 64 || w.0 >> dims.count() == 0);
            map.entry(w).or_insert_with(S::zero).add_assign_ref(&c);
        }
        prune(&mut map);
        Self { dims, terms: map }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn terms(&self) -> &BTreeMap<SpinWord, S> {
        &self.terms
    }

    pub fn coeff(&self, w: SpinWord) -> S {
        self.terms.get(&w).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn map_coeffs<T: Scalar, F: Fn(SpinWord, &S) -> T>(&self, f: F) -> SpinElement<T> {
        SpinElement::from_terms(self.dims, self.terms.iter().map(|(w, c)| (*w, f(*w, c))))
    }

    pub fn to_c64(&self) -> SpinElement<Complex64> {
        self.map_coeffs(|_, c| c.to_c64())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "dims mismatch in add");
        Self::from_terms(self.dims, self.terms.iter().chain(&other.terms).map(|(w, c)| (*w, c.clone())))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coeffs(|_, x| x.mul_ref(c))
    }

    /// Restriction to words of length exactly `r`.
    pub fn homogeneous_part(&self, r: usize) -> Self {
        Self::from_terms(
            self.dims,
            self.terms.iter().filter(|(w, _)| w.len() == r).map(|(w, c)| (*w, c.clone())),
        )
    }
}

impl SpinElement<Complex64> {
    /// `{"dims": .., "terms": [{"gens": [[α,i,k],..], "re": .., "im": ..}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let gens: Vec<[u32; 3]> = w.gens(self.dims).into_iter().map(|g| [g.alpha, g.i, g.k]).collect();
                serde_json::json!({"gens": gens, "re": c.re, "im": c.im})
            })
            .collect();
        serde_json::json!({"dims": self.dims, "terms": terms})
    }
}

fn check_dims<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction) -> Result<(), SpinError> {
    if a.dims != sf.dims() {
        return Err(SpinError::DimsMismatch(a.dims, sf.dims()));
    }
    Ok(())
}

pub fn multiply<S: Scalar>(
    a: &SpinElement<S>,
    b: &SpinElement<S>,
    sf: &SignFunction,
) -> Result<SpinElement<S>, SpinError> {
    check_dims(a, sf)?;
    check_dims(b, sf)?;
    let mut out: BTreeMap<SpinWord, S> = BTreeMap::new();
    let minus = -S::one();
    for (wa, ca) in &a.terms {
        for (wb, cb) in &b.terms {
            let (sign, w) = sf.word_product(*wa, *wb);
            let mut c = ca.mul_ref(cb);
            if sign < 0 {
                c = c * minus.clone();
            }
            out.entry(w).or_insert_with(S::zero).add_assign_ref(&c);
        }
    }
    prune(&mut out);
    Ok(SpinElement { dims: a.dims, terms: out })
}

pub fn adjoint<S: Scalar>(a: &SpinElement<S>, sf: &SignFunction) -> Result<SpinElement<S>, SpinError> {
    check_dims(a, sf)?;
    Ok(a.map_coeffs(|w, c| {
        let c = c.conj();
        if sf.reversal_sign(w) < 0 {
            -c
        } else {
            c
        }
    }))
}

pub fn trace<S: Scalar>(a: &SpinElement<S>) -> S {
    a.coeff(SpinWord::UNIT)
}

/// `τ(a* b)`, read off the orthonormal word basis.
pub fn inner<S: Scalar>(a: &SpinElement<S>, b: &SpinElement<S>) -> S {
    let mut acc = S::zero();
    for (w, ca) in &a.terms {
        if let Some(cb) = b.terms.get(w) {
            acc.add_assign_ref(&ca.conj().mul_ref(cb));
        }
    }
    acc
}

/// `τ(a* a)` as a real number.
pub fn norm2_sq<S: Scalar>(a: &SpinElement<S>) -> f64 {
    a.terms.values().map(|c| c.to_c64().norm_sqr()).sum()
}

pub fn ou_semigroup<S: Scalar>(a: &SpinElement<S>, t: f64) -> Result<SpinElement<S>, SpinError> {
    if t.is_nan() || t < 0.0 {
        return Err(SpinError::NegativeTime(t));
    }
    Ok(a.map_coeffs(|w, c| c.mul_ref(&S::from_f64((-t * w.len() as f64).exp()))))
}

/// The semigroup written multiplicatively: word `A` scaled by `r^{|A|}`,
/// `r = e^{−t}`. Exact for rational `r`.
pub fn ou_contract<S: Scalar>(a: &SpinElement<S>, r: &S) -> SpinElement<S> {
    a.map_coeffs(|w, c| {
        let mut f = c.clone();
        for _ in 0..w.len() {
            f = f.mul_ref(r);
        }
        f
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qc, QComplex};

    fn g(alpha: u32, i: u32, k: u32) -> GenIndex {
        GenIndex::new(alpha, i, k)
    }

    #[test]
    fn sign_function_validation() {
        let dims = Dims::new(1, 2, 1);
        let car = SignFunction::car(dims);
        assert_eq!(car.eps(g(1, 1, 1), g(1, 2, 1)).unwrap(), -1);
        assert_eq!(car.eps(g(1, 1, 1), g(1, 1, 1)).unwrap(), -1);
        assert!(SignFunction::from_fn(Dims::new(1, 1, 1), |_, _| 0).is_ok());
        assert_eq!(
            SignFunction::from_fn(dims, |_, _| 0),
            Err(SpinError::BadSign(g(1, 1, 1), g(1, 2, 1), 0))
        );
        assert!(matches!(
            SignFunction::try_from_fn(dims, |_, _| None),
            Err(SpinError::MissingPair(..))
        ));
        assert!(matches!(
            SignFunction::car(Dims::new(5, 2, 6)).eps(g(6, 1, 1), g(1, 1, 1)),
            Err(SpinError::OutOfBounds(..))
        ));
        assert!(SignFunction::from_fn(Dims::new(65, 1, 1), |_, _| 1).is_err());
    }

    #[test]
    fn normal_order_examples() {
        let dims = Dims::new(1, 2, 1);
        let car = SignFunction::car(dims);
        let (g1, g2) = (g(1, 1, 1), g(1, 2, 1));
        let w12 = SpinWord::from_gens(dims, &[g1, g2]).unwrap();
        assert_eq!(normal_order(&[g2, g1], &car).unwrap(), (-1, w12));
        assert_eq!(normal_order(&[g1, g1], &car).unwrap(), (1, SpinWord::UNIT));
        let comm = SignFunction::from_fn(dims, |_, _| 1).unwrap();
        let w2 = SpinWord::from_gens(dims, &[g2]).unwrap();
        assert_eq!(normal_order(&[g1, g2, g1], &comm).unwrap(), (1, w2));
        assert_eq!(normal_order(&[g1, g2, g1], &car).unwrap(), (-1, w2));
    }

    #[test]
    fn multiply_examples() {
        let dims = Dims::new(1, 3, 1);
        let sf = SignFunction::car(dims);
        let x = |i| SpinElement::<QComplex>::generator(dims, g(1, i, 1)).unwrap();
        let prod = |a: &SpinElement<QComplex>, b: &SpinElement<QComplex>| multiply(a, b, &sf).unwrap();
        let x12 = prod(&x(1), &x(2));
        assert_eq!(prod(&x(1), &x12), x(2));
        let one = SpinElement::<QComplex>::one(dims);
        assert!(prod(&one.add(&x(1)), &one.sub(&x(1))).is_zero());
        assert_eq!(prod(&x12, &prod(&x(2), &x(3))), prod(&x(1), &x(3)));
        assert!(multiply(&x(1), &SpinElement::one(Dims::new(1, 2, 1)), &sf).is_err());
    }

    #[test]
    fn adjoint_and_trace_examples() {
        let dims = Dims::new(1, 2, 1);
        let sf = SignFunction::car(dims);
        let x1 = SpinElement::<QComplex>::generator(dims, g(1, 1, 1)).unwrap();
        let x2 = SpinElement::<QComplex>::generator(dims, g(1, 2, 1)).unwrap();
        assert_eq!(adjoint(&x1, &sf).unwrap(), x1);
        let c = QComplex::new(qc(2, 3).re, qc(-1, 5).re);
        let s = SpinElement::scalar(dims, c.clone());
        assert_eq!(adjoint(&s, &sf).unwrap(), SpinElement::scalar(dims, Scalar::conj(&c)));
        let i = QComplex::new(qc(0, 1).re, qc(1, 1).re);
        let ix12 = multiply(&x1, &x2, &sf).unwrap().scale(&i);
        // (i x1x2)* = -i x2x1 = i x1x2
        assert_eq!(adjoint(&ix12, &sf).unwrap(), ix12);

        assert_eq!(trace(&SpinElement::<QComplex>::one(dims)), qc(1, 1));
        assert_eq!(trace(&multiply(&x1, &x2, &sf).unwrap()), qc(0, 1));
        let s12 = x1.add(&x2);
        assert_eq!(trace(&multiply(&s12, &s12, &sf).unwrap()), qc(2, 1));
    }

    #[test]
    fn semigroup_examples() {
        let dims = Dims::new(1, 2, 1);
        let sf = SignFunction::car(dims);
        let one = SpinElement::<Complex64>::one(dims);
        assert_eq!(ou_semigroup(&one, 0.7).unwrap(), one);
        let x12 = SpinElement::<Complex64>::monomial(&sf, &[g(1, 1, 1), g(1, 2, 1)], Complex64::new(1.0, 0.0)).unwrap();
        let t = 0.3;
        let p = ou_semigroup(&x12, t).unwrap();
        let w = SpinWord::from_gens(dims, &[g(1, 1, 1), g(1, 2, 1)]).unwrap();
        assert_eq!(p.coeff(w), Complex64::new((-2.0 * t).exp(), 0.0));
        assert!(ou_semigroup(&one, -1.0).is_err());
    }

    #[test]
    fn linear_index_roundtrip() {
        let dims = Dims::new(3, 2, 4);
        for (idx, gen) in dims.gens().enumerate() {
            assert_eq!(dims.linear(gen).unwrap(), idx);
        }
        let all: Vec<_> = dims.gens().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }
}
