mod common;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use cubic_lpf::cubicring::{CubicPoly, RingElem};
use cubic_lpf::primeideals;
use cubic_lpf::sieve;

use common::*;

fn irreducible() -> impl Strategy<Value = (CubicPoly, [i128; 3])> {
    (-6i64..=6, -6i64..=6, -6i64..=6)
        .prop_filter_map("reducible", |(c2, c1, c0)| {
            let f = CubicPoly::from_i64(c2, c1, c0).ok()?;
            Some((f, [c0 as i128, c1 as i128, c2 as i128]))
        })
}

fn coords() -> impl Strategy<Value = [i128; 3]> {
    prop::array::uniform3(-50i128..=50)
}

fn table() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(2_900_000))
}

fn elem(a: [i128; 3]) -> RingElem {
    RingElem::new(a[0] as i64, a[1] as i64, a[2] as i64)
}

fn as_array(e: &RingElem) -> [i128; 3] {
    [e.a0.to_i128().unwrap(), e.a1.to_i128().unwrap(), e.a2.to_i128().unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn product_is_matrix_times_vector((f, c) in irreducible(), a in coords(), b in coords()) {
        let m = mult_matrix(c, a);
        let want: Vec<i128> = (0..3).map(|i| (0..3).map(|j| m[i][j] * b[j]).sum()).collect();
        prop_assert_eq!(as_array(&f.mul(&elem(a), &elem(b))).to_vec(), want);
        prop_assert_eq!(f.norm(&elem(a)), BigInt::from(norm(c, a)));
    }

    #[test]
    fn divisibility_matches_adjugate((f, c) in irreducible(), a in coords(), b in coords(), t in coords()) {
        prop_assume!(norm(c, a) != 0);
        prop_assert_eq!(f.divides_elem(&elem(a), &elem(b)), divides(c, a, b));
        // a multiple is always divisible, with the right quotient
        let ab = f.mul(&elem(a), &elem(t));
        prop_assert!(divides(c, a, as_array(&ab)));
        prop_assert_eq!(f.quotient(&ab, &elem(a)), Some(elem(t)));
    }

    #[test]
    fn roots_agree_with_brute_force((f, c) in irreducible(), i in 0usize..90) {
        let p = primes_below(500)[i];
        match primeideals::roots_mod_p(&f, p) {
            Ok(r) => prop_assert_eq!(r, roots_brute(c, p)),
            Err(_) => prop_assert!(f.disc() % p == BigInt::from(0)),
        }
    }

    #[test]
    fn kclass_is_the_divisibility_class((f, c) in irreducible(), a in coords(), ns in prop::collection::vec(-5000i128..5000, 8)) {
        let Ok(k) = primeideals::k_alpha_cofactor(&f, &elem(a)) else { return Ok(()); };
        let m = k.modulus.to_i128().unwrap();
        let k0 = k.k.to_i128().unwrap();
        prop_assert!(divides(c, a, [k0, -1, 0]));
        for n in ns.into_iter().chain([k0 + m, k0 - 7 * m]) {
            prop_assert_eq!(k.contains(&BigInt::from(n)), divides(c, a, [n, -1, 0]), "n = {}", n);
        }
    }

    #[test]
    fn factorization_matches_trial_division(n in 1u64..20_000, c0 in 1i64..50) {
        let f = CubicPoly::from_i64(0, 0, c0).ok();
        prop_assume!(f.is_some());
        let f = f.unwrap();
        let rec = sieve::factor_value(&f, n).unwrap();
        let v = (n as u128).pow(3) + c0 as u128;
        prop_assert_eq!(rec.value, v);
        prop_assert_eq!(rec.recombine(), v);
        let oracle = brute_factor(v, table());
        prop_assert_eq!(&rec.factors, &oracle);
        prop_assert!(rec.factors.iter().all(|&(p, _)| is_prime(p)));
        prop_assert_eq!(sieve::largest_prime_factor(&f, n as i64).unwrap(), oracle.last().unwrap().0);
    }

    #[test]
    fn weight_sums_are_subset_sums(d in 60u64..3000, z in 5u64..60, n in 1u64..100_000) {
        let w = sieve::rosser_weights(d, z).unwrap();
        let ps: Vec<u64> = primes_below(z as usize).into_iter().filter(|p| n % p == 0).collect();
        let mut total = 0i64;
        for mask in 0u32..(1 << ps.len()) {
            let dd: u64 = (0..ps.len()).filter(|i| mask >> i & 1 == 1).map(|i| ps[i]).product();
            total += w.get(dd) as i64;
        }
        let g: u64 = ps.iter().product::<u64>().max(1);
        prop_assert_eq!(w.divisor_sum(g), total);
        prop_assert!(total <= i64::from(g == 1));
    }
}

#[test]
fn prime_ideal_lattices_have_prime_index() {
    let c = [2, 0, 0];
    let f = CubicPoly::from_i64(0, 0, 2).unwrap();
    for p in primes_below(200) {
        for a in roots_brute(c, p) {
            let lat = prime_ideal(c, p, a);
            let index = lat.index();
            if f.disc() % p == BigInt::from(0) {
                continue;
            }
            assert_eq!(index, BigInt::from(p), "({p}, r - {a})");
            let ideal = primeideals::IdealFD::new(&f, &[(p, a, 1)]).unwrap();
            assert!(ideal.norm == index && !index.is_one());
        }
    }
}
