use freehyper::clt::{mc_moment_study, SignModel};
use freehyper::gns::{gauss_rule_from_exact, lp_norm_spectral};
use freehyper::group::{self, Flavor, GroupAlgebraElement, GroupWord};
use freehyper::hyperbench::{hc_margin, random_spin_element, rng_for, HCQuery, Handle, Route};
use freehyper::partition::{enumerate_pair_partitions, WordSpec};
use freehyper::spin::{self, Dims, SignFunction, SpinElement, SpinWord};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_signs(dims: Dims, seed: u64) -> SignFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SignFunction::from_fn(dims, |_, _| if rng.gen::<bool>() { 1 } else { -1 }).unwrap()
}

/// Small integer coefficients keep every product exact in `f64`.
fn int_element(dims: Dims, terms: &[(u64, i8, i8)]) -> SpinElement<Complex64> {
    let mask = (1u64 << dims.count()) - 1;
    let mut acc = SpinElement::zero(dims);
    for &(w, re, im) in terms {
        let t = SpinElement::from_terms(dims, [(SpinWord(w & mask), Complex64::new(re as f64, im as f64))]);
        acc = acc.add(&t);
    }
    acc
}

fn dims_strategy() -> impl Strategy<Value = Dims> {
    (1u32..=2, 1u32..=2, 1u32..=2).prop_map(|(n, d, m)| Dims::new(n, d, m))
}

fn terms_strategy() -> impl Strategy<Value = Vec<(u64, i8, i8)>> {
    prop::collection::vec((any::<u64>(), -4i8..=4, -4i8..=4), 1..6)
}

fn free_letters() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 0..8)
}

fn group_element(terms: &[(Vec<i32>, i8)]) -> GroupAlgebraElement<Complex64> {
    let mut acc = GroupAlgebraElement::zero(Flavor::Free);
    for (letters, c) in terms {
        let w = GroupAlgebraElement::word(Flavor::Free, letters).unwrap().scale(&Complex64::new(*c as f64, 0.0));
        acc = acc.add(&w).unwrap();
    }
    acc
}

fn close(a: &SpinElement<Complex64>, b: &SpinElement<Complex64>, tol: f64) -> bool {
    let diff = a.sub(b);
    diff.terms().values().all(|c| c.norm() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spin_product_is_associative(dims in dims_strategy(), seed in any::<u64>(),
                                   a in terms_strategy(), b in terms_strategy(), c in terms_strategy()) {
        let sf = random_signs(dims, seed);
        let (a, b, c) = (int_element(dims, &a), int_element(dims, &b), int_element(dims, &c));
        let left = spin::multiply(&spin::multiply(&a, &b, &sf).unwrap(), &c, &sf).unwrap();
        let right = spin::multiply(&a, &spin::multiply(&b, &c, &sf).unwrap(), &sf).unwrap();
        prop_assert_eq!(left.terms(), right.terms());
    }

    #[test]
    fn spin_adjoint_reverses_products(dims in dims_strategy(), seed in any::<u64>(),
                                      a in terms_strategy(), b in terms_strategy()) {
        let sf = random_signs(dims, seed);
        let (a, b) = (int_element(dims, &a), int_element(dims, &b));
        let lhs = spin::adjoint(&spin::multiply(&a, &b, &sf).unwrap(), &sf).unwrap();
        let rhs = spin::multiply(&spin::adjoint(&b, &sf).unwrap(), &spin::adjoint(&a, &sf).unwrap(), &sf).unwrap();
        prop_assert_eq!(lhs.terms(), rhs.terms());
        let twice = spin::adjoint(&spin::adjoint(&a, &sf).unwrap(), &sf).unwrap();
        prop_assert_eq!(twice.terms(), a.terms());
    }

    #[test]
    fn trace_of_square_is_the_l2_norm(dims in dims_strategy(), seed in any::<u64>(), a in terms_strategy()) {
        let sf = random_signs(dims, seed);
        let a = int_element(dims, &a);
        let t = spin::trace(&spin::multiply(&spin::adjoint(&a, &sf).unwrap(), &a, &sf).unwrap());
        prop_assert_eq!(t.im, 0.0);
        prop_assert!(t.re >= 0.0);
        prop_assert_eq!(t.re, spin::norm2_sq(&a));
    }

    #[test]
    fn ou_semigroup_law(dims in dims_strategy(), a in terms_strategy(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let a = int_element(dims, &a);
        let two_steps = spin::ou_semigroup(&spin::ou_semigroup(&a, s).unwrap(), t).unwrap();
        let one_step = spin::ou_semigroup(&a, s + t).unwrap();
        prop_assert!(close(&two_steps, &one_step, 1e-12));
        prop_assert!(spin::ou_semigroup(&a, -1e-3).is_err());
    }

    #[test]
    fn homogeneous_chaos_bound(seed in any::<u64>(), mixed in any::<bool>(), p in prop_oneof![Just(3.0), Just(4.0)]) {
        let dims = if mixed { Dims::new(2, 1, 2) } else { Dims::new(1, 3, 1) };
        let sf = if mixed { random_signs(dims, seed) } else { SignFunction::car(dims) };
        let x = random_spin_element(&sf, &mut rng_for(seed, 0), false).unwrap();
        for r in 1..=dims.count() {
            let part = x.homogeneous_part(r);
            let lp = lp_norm_spectral(&part, &sf, p).unwrap();
            let bound = (p - 1.0f64).powf(r as f64 / 2.0) * spin::norm2_sq(&part).sqrt();
            prop_assert!(lp <= bound * (1.0 + 1e-10), "r={} lp={} bound={}", r, lp, bound);
        }
    }

    #[test]
    fn hypercontractive_margin_decreases_in_time(seed in any::<u64>(), sa in any::<bool>()) {
        let dims = Dims::new(2, 1, 2);
        let sf = random_signs(dims, seed);
        let x = random_spin_element(&sf, &mut rng_for(seed, 1), sa).unwrap();
        let margin = |t: f64| hc_margin(&HCQuery {
            p: 1.5,
            q: 3.0,
            t,
            element: Handle::Spin { element: x.clone(), sf: sf.clone() },
            route: Route::Spectral,
        }).unwrap().margin;
        let grid: Vec<f64> = (0..=10).map(|j| j as f64 * 0.1).collect();
        for w in grid.windows(2) {
            prop_assert!(margin(w[1]) <= margin(w[0]) + 1e-10);
        }
    }

    #[test]
    fn group_reduction_is_a_homomorphism(a in free_letters(), b in free_letters()) {
        let joined: Vec<i32> = a.iter().chain(&b).copied().collect();
        let direct = GroupWord::reduce(Flavor::Free, &joined).unwrap();
        let ra: Vec<i32> = GroupWord::reduce(Flavor::Free, &a).unwrap().letters().collect();
        let rb: Vec<i32> = GroupWord::reduce(Flavor::Free, &b).unwrap().letters().collect();
        let staged: Vec<i32> = ra.iter().chain(&rb).copied().collect();
        prop_assert_eq!(&direct, &GroupWord::reduce(Flavor::Free, &staged).unwrap());
        let letters: Vec<i32> = direct.letters().collect();
        prop_assert!(letters.windows(2).all(|w| w[0] != -w[1]));
        let product = group::reduce_multiply(
            &GroupAlgebraElement::<Complex64>::word(Flavor::Free, &a).unwrap(),
            &GroupAlgebraElement::word(Flavor::Free, &b).unwrap(),
        ).unwrap();
        prop_assert_eq!(product.terms().keys().collect::<Vec<_>>(), vec![&direct]);
    }

    #[test]
    fn group_convolution_is_associative(
        a in prop::collection::vec((free_letters(), -3i8..=3), 1..4),
        b in prop::collection::vec((free_letters(), -3i8..=3), 1..4),
        c in prop::collection::vec((free_letters(), -3i8..=3), 1..4),
    ) {
        let (a, b, c) = (group_element(&a), group_element(&b), group_element(&c));
        let left = group::reduce_multiply(&group::reduce_multiply(&a, &b).unwrap(), &c).unwrap();
        let right = group::reduce_multiply(&a, &group::reduce_multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.terms(), right.terms());
        let ab_star = group::adjoint(&group::reduce_multiply(&a, &b).unwrap());
        let b_star_a_star = group::reduce_multiply(&group::adjoint(&b), &group::adjoint(&a)).unwrap();
        prop_assert_eq!(ab_star.terms(), b_star_a_star.terms());
    }

    #[test]
    fn gauss_rules_integrate_low_degree_exactly(
        atoms in prop::collection::btree_map(-5i64..=5, 1i64..=9, 1..8),
        k in 1usize..6,
    ) {
        let moment = |j: u32| -> BigRational {
            atoms.iter().map(|(&x, &w)| BigRational::from_integer(BigInt::from(w) * BigInt::from(x).pow(j))).sum()
        };
        let moments: Vec<BigRational> = (0..=2 * k as u32).map(moment).collect();
        let rule = gauss_rule_from_exact(&moments, k).unwrap();
        prop_assert!(rule.nodes.len() <= k);
        let degree = if atoms.len() <= k { 2 * k as u32 } else { 2 * k as u32 - 1 };
        for j in 0..=degree {
            let exact: f64 = atoms.iter().map(|(&x, &w)| w as f64 * (x as f64).powi(j as i32)).sum();
            let quad = rule.integrate(|x| x.powi(j as i32));
            prop_assert!((quad - exact).abs() <= 1e-9 * (1.0 + exact.abs()), "degree {}: {} vs {}", j, quad, exact);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_studies_replay(seed in any::<u64>()) {
        let word = WordSpec::from_alphas(&[1, 2, 1, 2]);
        let model = SignModel::theorem_b(Dims::new(2, 1, 2), seed);
        let first = mc_moment_study(&word, &model, &[2, 3], 50).unwrap();
        prop_assert_eq!(&first, &mc_moment_study(&word, &model, &[2, 3], 50).unwrap());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let threaded = pool.install(|| mc_moment_study(&word, &model, &[2, 3], 50)).unwrap();
        prop_assert_eq!(&first, &threaded);
    }
}

fn double_factorial(s: usize) -> usize {
    (1..s).step_by(2).product()
}

fn catalan(k: usize) -> usize {
    (0..k).fold(1, |c, j| c * 2 * (2 * j + 1) / (j + 2))
}

#[test]
fn pair_partition_counts() {
    for s in 0..=12 {
        let all = enumerate_pair_partitions(s);
        if s % 2 == 1 {
            assert!(all.is_empty());
            continue;
        }
        assert_eq!(all.len(), double_factorial(s), "s = {s}");
        let noncrossing = all.iter().filter(|p| p.crossings().is_empty()).count();
        assert_eq!(noncrossing, catalan(s / 2), "s = {s}");
        for p in &all {
            assert!(p.pairs().iter().all(|&(e, z)| e < z && z <= s));
        }
    }
}
