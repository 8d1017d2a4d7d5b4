//! Randomized invariants of the algebraic core.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::sample::select;
use stark_core::algebra::{enumerate_characters, ideal_from_generators, CoeffRing, FiniteAbelianGroup, GroupRingElement};
use stark_core::arith::{fundamental_discriminants_negative, kronecker, rat};
use stark_core::cyclotomic::CyclotomicField;
use stark_core::eisenstein::{eisenstein_qexp, l_at_nonpositive_rational, DirichletCharacter};
use stark_core::fitting::{GaloisModule, Matrix};
use stark_core::linalg::{smith_normal_form, IntMatrix};
use stark_core::quadratic::{form_class_group, ideal_to_form, ImagQuadField, QuadForm};
use stark_core::ring::{Integers, Rationals, Ring};
use stark_core::stickelberger::kurihara::inertia_norm;
use stark_core::stickelberger::{theta, AbelianFieldQ};
use stark_core::verify::{admissible_smoothing_sets, verify, FieldSpec, Theorem, VerificationCase};

const GROUPS: &[&[u64]] = &[&[2], &[3], &[4], &[5], &[6], &[8], &[2, 2], &[2, 4], &[3, 3], &[2, 6], &[4, 4], &[2, 2, 2]];

fn group() -> impl Strategy<Value = FiniteAbelianGroup> {
    select(GROUPS).prop_map(|inv| FiniteAbelianGroup::new(inv.to_vec()).unwrap())
}

/// A group with an integral element of it, coefficients in [-bound, bound].
fn group_and_element(bound: i64) -> impl Strategy<Value = (FiniteAbelianGroup, GroupRingElement)> {
    group().prop_flat_map(move |g| {
        let n = g.order();
        (Just(g), prop::collection::vec(-bound..=bound, n))
    })
    .prop_map(|(g, c)| {
        let x = GroupRingElement::from_ints(&g, &c).unwrap();
        (g, x)
    })
}

fn disc() -> impl Strategy<Value = i64> {
    select(fundamental_discriminants_negative(500))
}

fn odd_character(d: i64) -> DirichletCharacter {
    DirichletCharacter::kronecker(d).unwrap()
}

/// χ_D(Θ) for the nontrivial character of Gal(Q(√D)/Q).
fn odd_value(field: &AbelianFieldQ, x: &GroupRingElement) -> BigRational {
    x.coeff(0) - x.coeff(field.conj())
}

fn reduced(f: QuadForm) -> QuadForm {
    f.reduce()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sharp_is_an_involution((_, x) in group_and_element(9)) {
        prop_assert_eq!(x.sharp().sharp(), x);
    }

    #[test]
    fn characters_reconstruct_elements((g, x) in group_and_element(5)) {
        let cf = CyclotomicField::new(g.exponent());
        let chars = enumerate_characters(&g);
        let values: Vec<_> = chars.iter().map(|c| x.eval_character(c, &cf)).collect();
        for h in g.elements() {
            let sum = chars.iter().zip(&values).fold(cf.zero(), |acc, (c, v)| cf.add(&acc, &cf.mul(v, &c.inverse().eval_cyclotomic(&cf, h))));
            let order = BigRational::from_integer(BigInt::from(g.order()));
            prop_assert_eq!(cf.as_rational(&sum), Some(order * x.coeff(h)));
        }
    }

    #[test]
    fn ideals_ignore_generator_order(
        (g, gens) in group().prop_flat_map(|g| {
            let n = g.order();
            (Just(g), prop::collection::vec(prop::collection::vec(-4i64..=4, n), 1..=3))
        }),
        seed in any::<u64>(),
    ) {
        let gens: Vec<GroupRingElement> = gens.iter().map(|c| GroupRingElement::from_ints(&g, c).unwrap()).collect();
        let ideal = ideal_from_generators(&g, &gens).unwrap();
        let mut shuffled = gens.clone();
        shuffled.rotate_left(seed as usize % gens.len());
        shuffled.reverse();
        prop_assert!(ideal.equals(&ideal_from_generators(&g, &shuffled).unwrap()).unwrap());
        prop_assert!(ideal.is_g_stable());
        // closure under sums and the group action
        let shift = seed as usize % g.order();
        let x = gens[0].shift(shift);
        let y = gens[gens.len() - 1].scale(&rat(-3, 1)).unwrap();
        prop_assert!(ideal.contains_element(&x.add(&y).unwrap()).unwrap());
        prop_assert!(ideal.contains_element(&x.add(&y).unwrap().shift(g.inv(shift))).unwrap());
    }

    #[test]
    fn smith_form_is_permutation_invariant(
        a in prop::collection::vec(prop::collection::vec(-20i64..=20, 4), 4),
        rows in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
        cols in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let a: IntMatrix = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let snf = smith_normal_form(&a, 4);
        prop_assert!(snf.verify(&a, 4));
        let p: IntMatrix = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect();
        prop_assert_eq!(smith_normal_form(&p, 4).diagonal, snf.diagonal);
    }

    #[test]
    fn compound_adjugate_identity(a in prop::collection::vec(prop::collection::vec(-6i64..=6, 4), 4), r in 1usize..=4) {
        let entries: Vec<Vec<BigInt>> = a.iter().map(|row| row.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let m = Matrix::new(Integers, entries).unwrap();
        let d = m.det().unwrap();
        let (c, adj) = m.compound_and_adjugate(r).unwrap();
        let prod = adj.mul(&c).unwrap();
        for (i, row) in prod.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                prop_assert_eq!(v, &if i == j { d.clone() } else { BigInt::zero() });
            }
        }
    }

    #[test]
    fn fitting_is_multiplicative_on_sums_and_inside_the_annihilator(
        pieces in prop::collection::vec((2u64..=12, prop::bool::ANY), 1..=3),
    ) {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let modules: Vec<GaloisModule> = pieces
            .iter()
            .map(|&(n, odd)| GaloisModule::scalar_action(z2.clone(), BigInt::from(n), &[if odd { -1 } else { 1 }]).unwrap())
            .collect();
        let total = modules[1..].iter().fold(modules[0].clone(), |acc, m| acc.direct_sum(m).unwrap());
        let fitt = total.fitting_ideal(0).unwrap();
        prop_assert!(total.annihilator().contains(&fitt).unwrap());
        let product = modules[1..].iter().fold(modules[0].fitting_ideal(0).unwrap(), |acc, m| acc.product(&m.fitting_ideal(0).unwrap()).unwrap());
        prop_assert!(fitt.equals(&product).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn inertia_idempotents(which in 0usize..3, d in disc(), m in 3u64..=60) {
        let field = match which {
            0 => AbelianFieldQ::quadratic(d).unwrap(),
            1 => AbelianFieldQ::cyclotomic(m).unwrap(),
            _ => AbelianFieldQ::biquadratic(-4, d).unwrap_or_else(|_| AbelianFieldQ::quadratic(d).unwrap()),
        };
        let one = GroupRingElement::one(field.group(), CoeffRing::Rationals);
        for v in field.ramified_primes() {
            let inertia = field.inertia(v);
            let norm = inertia_norm(&field, v);
            prop_assert_eq!(norm.augmentation(), rat(inertia.len() as i64, 1));
            let e = norm.scale(&rat(1, inertia.len() as i64)).unwrap();
            prop_assert_eq!(e.mul(&e).unwrap(), e.clone());
            let smooth = one.sub(&e.shift(field.frobenius(v))).unwrap();
            for &tau in &inertia {
                let moved = one.sub(&e.shift(field.group().op(field.frobenius(v), tau))).unwrap();
                prop_assert_eq!(&moved, &smooth);
            }
        }
    }

    #[test]
    fn form_composition_is_a_group_law(d in disc(), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let cl = form_class_group(d).unwrap();
        let f: Vec<QuadForm> = picks.iter().map(|i| cl.forms[i.index(cl.forms.len())]).collect();
        let principal = *cl.forms.iter().find(|q| q.a == 1).unwrap();
        prop_assert_eq!(reduced(f[0].compose(&principal).unwrap()), reduced(f[0]));
        prop_assert_eq!(reduced(f[0].compose(&f[0].inverse()).unwrap()), principal);
        let left = f[0].compose(&f[1]).unwrap().compose(&f[2]).unwrap();
        let right = f[0].compose(&f[1].compose(&f[2]).unwrap()).unwrap();
        prop_assert_eq!(reduced(left), reduced(right));
        // forms and ideals multiply alike
        let k = ImagQuadField::new(d).unwrap();
        let product = f[0].to_ideal(&k).mul(&f[1].to_ideal(&k));
        prop_assert_eq!(reduced(ideal_to_form(&product)), reduced(f[0].compose(&f[1]).unwrap()));
    }

    #[test]
    fn theta_values_match_class_numbers(d in disc()) {
        let field = AbelianFieldQ::quadratic(d).unwrap();
        let k = ImagQuadField::new(d).unwrap();
        let h = form_class_group(d).unwrap().order() as i64;
        let l0 = rat(2 * h, k.w() as i64);
        prop_assert_eq!(l_at_nonpositive_rational(&odd_character(d), 1).unwrap(), l0.clone());
        let candidates: Vec<Vec<u64>> = [3u64, 5, 7, 11, 13].iter().map(|&l| vec![l]).collect();
        for t in admissible_smoothing_sets(&FieldSpec::Quadratic { disc: d }, &candidates).unwrap() {
            let smoothing: BigRational = t.iter().map(|&l| rat(1 - kronecker(d, l) * l as i64, 1)).product();
            let th = theta(&field, &field.ramified_primes(), &t).unwrap();
            prop_assert_eq!(odd_value(&field, &th.element), &l0 * &smoothing);
        }
    }

    #[test]
    fn split_depletion_is_a_trivial_zero(d in disc()) {
        let field = AbelianFieldQ::quadratic(d).unwrap();
        let split = (3u64..200).find(|&q| stark_core::arith::is_prime(q) && kronecker(d, q) == 1).unwrap();
        let t: Vec<u64> = [5u64, 7, 11, 13, 17].into_iter().filter(|&l| l != split && !field.is_ramified(l)).take(1).collect();
        let mut s = field.ramified_primes();
        s.push(split);
        let th = theta(&field, &s, &t).unwrap();
        prop_assert!(odd_value(&field, &th.element).is_zero());
    }

    #[test]
    fn level_raising_commutes(f in select(vec![3u64, 4, 5, 7, 8]), k in select(vec![1u64, 3, 5]), q1 in select(vec![2u64, 3, 5]), q2 in select(vec![2u64, 7, 11])) {
        let chi = DirichletCharacter::primitive_of_conductor(f).into_iter().find(|c| c.is_odd()).unwrap();
        if chi.value_order() <= 2 {
            let e = eisenstein_qexp(&Rationals, k, &chi, &[]).unwrap();
            let a = e.raise_level(q1).unwrap().raise_level(q2).unwrap().coefficients(201);
            let b = e.raise_level(q2).unwrap().raise_level(q1).unwrap().coefficients(201);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn reports_are_reproducible(d in disc(), theorem in select(vec![Theorem::BrumerStark, Theorem::ClassNumberFormula, Theorem::SelmerDuality])) {
        let candidates: Vec<Vec<u64>> = [3u64, 5, 7, 11].iter().map(|&l| vec![l]).collect();
        if let Some(t) = admissible_smoothing_sets(&FieldSpec::Quadratic { disc: d }, &candidates).unwrap().into_iter().next() {
            let case = VerificationCase::quadratic(d, &t);
            let a = verify(theorem, &case).unwrap().to_canonical_json();
            let b = verify(theorem, &case.clone()).unwrap().to_canonical_json();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn trivial_group_characters() {
    let g = FiniteAbelianGroup::trivial();
    let x = GroupRingElement::from_ints(&g, &[7]).unwrap();
    let cf = CyclotomicField::new(1);
    assert_eq!(cf.as_rational(&x.eval_character(&enumerate_characters(&g)[0], &cf)), Some(rat(7, 1)));
}
