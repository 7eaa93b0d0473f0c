//! Property and brute-force tests for modular arithmetic and the
//! GF(p^k) extension fields.

use proptest::prelude::*;
use trapmaps::modfield::{
    factorize, fermat_exponent, is_prime, is_primitive_root, is_two_primary, mod_inv, mod_pow,
    mult_order, primes_in_range, ExtField,
};

#[test]
fn primality_matches_trial_division_up_to_2000() {
    fn naive(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }
    for n in 0..2000 {
        assert_eq!(is_prime(n), naive(n), "n = {n}");
    }
}

#[test]
fn orders_divide_group_order_everywhere() {
    for p in primes_in_range(2, 199) {
        for a in 1..p {
            let ord = mult_order(a, p).unwrap();
            assert_eq!((p - 1) % ord, 0, "ord({a}) mod {p}");
            assert_eq!(mod_pow(a, ord, p), 1);
            // minimality
            for d in 1..ord {
                if ord.is_multiple_of(d) {
                    assert_ne!(mod_pow(a, d, p), 1, "a={a} p={p} d={d}");
                }
            }
        }
    }
}

#[test]
fn primitive_root_count_is_phi_of_group_order() {
    fn phi(n: u64) -> u64 {
        (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
    }
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    for p in primes_in_range(3, 97) {
        let count = (1..p)
            .filter(|&a| is_primitive_root(a, p).unwrap())
            .count() as u64;
        assert_eq!(count, phi(p - 1), "p = {p}");
    }
}

#[test]
fn fermat_exponent_oracle() {
    assert_eq!(fermat_exponent(2).unwrap(), None);
    assert_eq!(fermat_exponent(3).unwrap(), Some(1));
    assert_eq!(fermat_exponent(5).unwrap(), Some(2));
    assert_eq!(fermat_exponent(7).unwrap(), None);
    assert_eq!(fermat_exponent(17).unwrap(), Some(4));
    assert_eq!(fermat_exponent(257).unwrap(), Some(8));
    assert_eq!(fermat_exponent(65537).unwrap(), Some(16));
    assert!(fermat_exponent(15).is_err());
}

#[test]
fn two_primary_oracle() {
    let two_primary: Vec<u64> = (1..=64).filter(|&n| is_two_primary(n)).collect();
    assert_eq!(two_primary, vec![1, 2, 4, 8, 16, 32, 64]);
    assert!(!is_two_primary(0));
}

proptest! {
    #[test]
    fn mod_pow_matches_naive(p in prop::sample::select(primes_in_range(2, 31)),
                             a in 0u64..31, e in 0u64..=64) {
        let a = a % p;
        let mut expect = 1u64;
        for _ in 0..e {
            expect = expect * a % p;
        }
        prop_assert_eq!(mod_pow(a, e, p), expect);
    }

    #[test]
    fn mod_inv_inverts(p in prop::sample::select(primes_in_range(2, 199)),
                       a in 1u64..199) {
        let a = a % p;
        prop_assume!(a != 0);
        let inv = mod_inv(a, p).unwrap();
        prop_assert_eq!(a * inv % p, 1);
    }

    #[test]
    fn factorization_reassembles(n in 2u64..1_000_000_000) {
        let factors = factorize(n);
        let mut back = 1u64;
        for &(q, e) in &factors {
            prop_assert!(is_prime(q), "{q} must be prime");
            back *= q.pow(e);
        }
        prop_assert_eq!(back, n);
        // factors strictly ascending
        for w in factors.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
    }
}

/// Exhaustive field-axiom audit over every field of size at most 64.
#[test]
fn small_extension_fields_satisfy_field_axioms() {
    let shapes: [(u64, usize); 9] = [
        (2, 1),
        (2, 2),
        (2, 3),
        (2, 4),
        (2, 5),
        (2, 6),
        (3, 2),
        (3, 3),
        (5, 2),
    ];
    for (p, k) in shapes {
        let field = ExtField::new(p, k, None).unwrap();
        let size = field.size();
        let all: Vec<_> = (0..size).map(|v| field.from_value(v).unwrap()).collect();

        // additive and multiplicative identities
        for a in &all {
            assert_eq!(&field.add(a, &field.zero()).unwrap(), a);
            assert_eq!(&field.mul(a, &field.one()).unwrap(), a);
            assert!(field.sub(a, a).unwrap().is_zero());
        }
        // commutativity and inverses across all pairs
        for a in &all {
            for b in &all {
                assert_eq!(field.add(a, b).unwrap(), field.add(b, a).unwrap());
                assert_eq!(field.mul(a, b).unwrap(), field.mul(b, a).unwrap());
            }
            if !a.is_zero() {
                let inv = all
                    .iter()
                    .find(|b| field.mul(a, b).unwrap() == field.one())
                    .unwrap_or_else(|| panic!("no inverse for {a} in {field}"));
                assert!(!inv.is_zero());
            }
        }
        // nonzero elements have order dividing p^k - 1
        let group = size - 1;
        for a in all.iter().filter(|a| !a.is_zero()) {
            assert_eq!(field.pow(a, group).unwrap(), field.one());
        }
        // the class of t is nonzero for proper extensions and its
        // multiplicative order divides the group order
        if k >= 2 {
            let g = field.generator();
            assert!(!g.is_zero());
            let mut seen = 1u64;
            let mut cur = g.clone();
            while cur != field.one() {
                cur = field.mul(&cur, &g).unwrap();
                seen += 1;
                assert!(seen <= group, "order of t exceeds the group order");
            }
            assert_eq!(group % seen, 0);
        }
    }
}

/// Distributivity and associativity on full triples for the two smallest
/// proper extensions.
#[test]
fn distributivity_and_associativity_exhaustive() {
    for (p, k) in [(2u64, 3usize), (3, 2)] {
        let field = ExtField::new(p, k, None).unwrap();
        let all: Vec<_> = (0..field.size()).map(|v| field.from_value(v).unwrap()).collect();
        for a in &all {
            for b in &all {
                for c in &all {
                    let ab_c = field.mul(&field.mul(a, b).unwrap(), c).unwrap();
                    let a_bc = field.mul(a, &field.mul(b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc);
                    let lhs = field.mul(a, &field.add(b, c).unwrap()).unwrap();
                    let rhs = field
                        .add(&field.mul(a, b).unwrap(), &field.mul(a, c).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn value_round_trip_is_total() {
    for (p, k) in [(2u64, 4usize), (3, 2), (7, 1), (5, 2)] {
        let field = ExtField::new(p, k, None).unwrap();
        for v in 0..field.size() {
            let e = field.from_value(v).unwrap();
            assert_eq!(field.value(&e).unwrap(), v);
        }
        assert!(field.from_value(field.size()).is_err());
    }
}

#[test]
fn prime_field_matches_integer_arithmetic() {
    let field = ExtField::new(13, 1, None).unwrap();
    for a in 0..13u64 {
        for b in 0..13u64 {
            let ea = field.from_value(a).unwrap();
            let eb = field.from_value(b).unwrap();
            assert_eq!(field.value(&field.add(&ea, &eb).unwrap()).unwrap(), (a + b) % 13);
            assert_eq!(field.value(&field.mul(&ea, &eb).unwrap()).unwrap(), a * b % 13);
        }
    }
}
