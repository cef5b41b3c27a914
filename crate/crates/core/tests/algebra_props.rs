use ggp_algebra::matrix::{MatEnum, MatOps, Matrix};
use ggp_algebra::poly::{MonicPoly, PolyOps};
use ggp_algebra::ring::{BinaryField, FiniteRing, GaloisField, LocalRing, Ring};
use proptest::prelude::*;

fn local_ring() -> impl Strategy<Value = LocalRing> {
    (prop::sample::select(vec![2u64, 3, 5, 7]), 1u32..=3).prop_map(|(p, m)| LocalRing::new(p, m).unwrap())
}

fn field_axioms<R: FiniteRing>(r: &R, a: u64, b: u64, c: u64) -> Result<(), TestCaseError> {
    let n = r.cardinality();
    let (a, b, c) = (r.element(a % n), r.element(b % n), r.element(c % n));
    prop_assert_eq!(r.mul(r.add(a, b), c), r.add(r.mul(a, c), r.mul(b, c)));
    prop_assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
    prop_assert_eq!(r.mul(a, b), r.mul(b, a));
    prop_assert_eq!(r.add(a, r.neg(a)), r.zero());
    if !r.is_zero(a) {
        let inv = r.inverse(a).expect("fields have inverses");
        prop_assert!(r.is_one(r.mul(a, inv)));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn local_ring_units_and_valuation(r in local_ring(), a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (r.elem(a % r.modulus()), r.elem(b % r.modulus()));
        prop_assert_eq!(r.is_unit(a), r.valuation(a) == 0);
        if let Some(inv) = r.inverse(a) {
            prop_assert!(r.is_one(r.mul(a, inv)));
        } else {
            prop_assert!(!r.is_unit(a));
        }
        let v = (r.valuation(a) + r.valuation(b)).min(r.m());
        prop_assert_eq!(r.valuation(r.mul(a, b)), v);
        prop_assert!(r.valuation(r.add(a, b)) >= r.valuation(a).min(r.valuation(b)));
    }

    #[test]
    fn galois_field_axioms(p in prop::sample::select(vec![2u64, 3, 5, 7, 11]), k in 1u32..=2, a: u64, b: u64, c: u64) {
        field_axioms(&GaloisField::new(p, k).unwrap(), a, b, c)?;
    }

    #[test]
    fn binary_field_axioms(k in 1u32..=8, a: u64, b: u64, c: u64) {
        let f = BinaryField::new(k).unwrap();
        field_axioms(&f, a, b, c)?;
        // Frobenius is additive
        let n = f.cardinality();
        let (x, y) = (f.element(a % n), f.element(b % n));
        prop_assert_eq!(f.mul(f.add(x, y), f.add(x, y)), f.add(f.mul(x, x), f.mul(y, y)));
    }

    #[test]
    fn determinant_is_multiplicative(r in local_ring(), n in 1usize..=4, seed: u64) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let a = r.random_matrix(n, &mut rng);
        let b = r.random_matrix(n, &mut rng);
        prop_assert_eq!(r.det(&r.mat_mul(&a, &b)), r.mul(r.det(&a), r.det(&b)));
        prop_assert_eq!(r.is_invertible(&a), r.is_unit(r.det(&a)));
        if let Ok(ai) = r.mat_inverse(&a) {
            prop_assert_eq!(r.mat_mul(&a, &ai), r.identity(n));
        }
    }

    #[test]
    fn cayley_hamilton(r in local_ring(), n in 1usize..=5, seed: u64) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let a = r.random_matrix(n, &mut rng);
        let f = r.charpoly_unchecked(&a);
        prop_assert_eq!(f.degree(), n);
        prop_assert_eq!(r.poly_at_matrix(&f, &a), r.zero_matrix(n));
        prop_assert_eq!(r.trace(&a), r.neg(f.coeffs()[n - 1]));
    }

    #[test]
    fn companion_has_its_charpoly(r in local_ring(), coeffs in prop::collection::vec(any::<u64>(), 1..=5)) {
        let f = MonicPoly::new(coeffs.iter().map(|&c| r.elem(c % r.modulus())).collect());
        let c = r.companion(&f);
        prop_assert_eq!(r.charpoly_unchecked(&c), f);
    }

    #[test]
    fn matrix_index_round_trip(r in local_ring(), n in 1usize..=3, idx: u64) {
        let idx = idx as u128 % r.matrix_count(n);
        let a: Matrix<_> = r.matrix_from_index(n, idx);
        let codes = r.matrix_codes(&a);
        let mut back = 0u128;
        for (k, c) in codes.concat().into_iter().enumerate() {
            back += c as u128 * (r.cardinality() as u128).pow(k as u32);
        }
        prop_assert_eq!(back, idx);
    }
}
