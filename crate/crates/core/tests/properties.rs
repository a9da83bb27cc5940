use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use rabin_core::numtheory::{
    crt_idempotents, ext_gcd, jacobi_u, mod_inverse, sqrt_mod_pq, sqrt_mod_prime, JacobiClass,
    SecretModulus,
};
use rabin_core::oracle::SmallRing;
use rabin_core::{format, gen_keypair, schemes, Message, Redundancy, Scheme};

const PRIMES: [u64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn prime_pair() -> impl Strategy<Value = (u64, u64)> {
    (0..PRIMES.len(), 0..PRIMES.len())
        .prop_filter("distinct", |(i, j)| i != j)
        .prop_map(|(i, j)| (PRIMES[i], PRIMES[j]))
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

proptest! {
    #[test]
    fn ext_gcd_bezout(a in 0i64..1_000_000, b in 0i64..1_000_000) {
        let (g, x, y) = ext_gcd(&BigInt::from(a), &BigInt::from(b));
        prop_assert_eq!(BigInt::from(a) * x + BigInt::from(b) * y, g.clone());
        let expected = num_integer::gcd(a, b);
        prop_assert_eq!(g, BigInt::from(expected));
    }

    #[test]
    fn inverse_is_inverse(a in 1u64..10_000, n in 2u64..10_000) {
        match mod_inverse(&big(a), &big(n)) {
            Some(inv) => prop_assert!((big(a) * inv % big(n)).is_one() || n == 1),
            None => prop_assert!(num_integer::gcd(a, n) != 1),
        }
    }

    #[test]
    fn jacobi_matches_euler_for_primes(a in 0u64..10_000, i in 1..PRIMES.len()) {
        let p = PRIMES[i];
        let euler = big(a).modpow(&big((p - 1) / 2), &big(p));
        let expected = if euler.is_zero() { 0 } else if euler.is_one() { 1 } else { -1 };
        prop_assert_eq!(jacobi_u(&big(a), &big(p)).unwrap(), expected);
    }

    #[test]
    fn jacobi_is_multiplicative((p, q) in prime_pair(), a in 0u64..5_000, b in 0u64..5_000) {
        let n = big(p * q);
        let j = |x: u64| jacobi_u(&big(x), &n).unwrap();
        prop_assert_eq!(j(a * b), j(a) * j(b));
    }

    #[test]
    fn idempotents_behave((p, q) in prime_pair()) {
        let psi = crt_idempotents(&big(p), &big(q)).unwrap();
        let n = big(p * q);
        prop_assert!(((&psi.psi1 + &psi.psi2) % &n).is_one());
        prop_assert!((&psi.psi1 * &psi.psi2 % &n).is_zero());
        prop_assert!((&psi.psi1 % big(p)).is_one() && (&psi.psi1 % big(q)).is_zero());
    }

    #[test]
    fn prime_roots_square_back(i in 0..PRIMES.len(), x in 1u64..1_000) {
        let p = big(PRIMES[i]);
        let a = big(x * x) % &p;
        let r = sqrt_mod_prime(&a, &p).unwrap();
        prop_assert_eq!(&r * &r % &p, a);
    }

    #[test]
    fn pq_roots_are_the_oracle_roots((p, q) in prime_pair(), x in 1u64..2_000) {
        let ring = SmallRing::new(p, q).unwrap();
        prop_assume!(ring.is_unit(x));
        let a = x * x % ring.n;
        let secret = SecretModulus::from_primes_unchecked(big(p), big(q)).unwrap();
        let roots = sqrt_mod_pq(&big(a), &secret).unwrap();
        let values: Vec<u64> = roots.iter().map(|r| r.value.to_u64_digits().first().copied().unwrap_or(0)).collect();
        prop_assert_eq!(values, ring.all_roots(a));
        for root in &roots {
            prop_assert_eq!(root.class, JacobiClass::of(&root.value, &secret).unwrap());
        }
    }

    #[test]
    fn every_scheme_round_trips(seed in any::<u64>(), scheme_idx in 0..5usize, m in 1u64..u64::MAX, quad in any::<bool>()) {
        let scheme = Scheme::ALL[scheme_idx];
        let redundancy = if quad { Redundancy::Quadratic } else { Redundancy::Identity };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let key = gen_keypair(scheme.preferred_key_kind(), 48, redundancy, &mut rng);
        let msg = Message::int(big(m) % key.n());
        match schemes::sign(scheme, &key, &msg, &mut rng) {
            Ok(sig) => {
                prop_assert!(schemes::verify(&key.public, &sig).valid);
                let text = format::signature_to_text(&sig);
                prop_assert_eq!(format::parse_signature(&text).unwrap(), sig);
            }
            Err(rabin_core::Error::Unsignable) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn changed_message_is_rejected(seed in any::<u64>(), scheme_idx in 0..5usize, m in 1u64..1 << 40) {
        let scheme = Scheme::ALL[scheme_idx];
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let key = gen_keypair(scheme.preferred_key_kind(), 128, Redundancy::Quadratic, &mut rng);
        let sig = schemes::sign(scheme, &key, &Message::int(m), &mut rng).unwrap();
        let mut other = sig.clone();
        *other.message_mut() = Message::int(m + 1);
        prop_assert!(!schemes::verify(&key.public, &other).valid);
    }
}
