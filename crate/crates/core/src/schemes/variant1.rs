//! Blum-prime Variant I: `[m, U, S, T]`, no public padding set.
//!
//! The root `S` of `x² = H(m)U` is the one whose Jacobi class matches `U + 1`,
//! so that `(U + 1)S` is a residue and has a root `T`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::{CryptoRng, Rng};

use super::classic::blum_padding;
use super::{
    components_in_range, require_blum, CountingRing, FailedCheck, Signature, VerifyReport,
    SIGN_ATTEMPTS,
};
use crate::error::{Error, Result};
use crate::hashing::{apply_redundancy, signable_digest, Message};
use crate::keygen::{PrivateKey, PublicKey};
use crate::numtheory::{
    canonical_sqrt, random_unit, sqrt_mod_pq, sqrt_of_unity_nontrivial, JacobiClass,
};

pub fn sign<R: Rng + CryptoRng + ?Sized>(
    key: &PrivateKey,
    message: &Message,
    rng: &mut R,
) -> Result<Signature> {
    require_blum(key, "variant I signing")?;
    signable_digest(key.public.redundancy, message, key.n())?;
    for _ in 0..SIGN_ATTEMPTS {
        let r = random_unit(key.n(), rng);
        match sign_with_factor(key, message, &r) {
            Err(Error::FactorLeak) => continue,
            other => return other,
        }
    }
    Err(Error::RetriesExhausted(SIGN_ATTEMPTS))
}

/// Signs with a caller-chosen `R`. Fails with [`Error::FactorLeak`] when `R`
/// yields a padding `U` that would expose the factorization (`U = ±(ψ1 - ψ2)`
/// or `U + 1` not a unit).
pub fn sign_with_factor(key: &PrivateKey, message: &Message, r: &BigUint) -> Result<Signature> {
    require_blum(key, "variant I signing")?;
    let n = key.n();
    let h = signable_digest(key.public.redundancy, message, n)?;
    let r = r % n;
    if !r.gcd(n).is_one() {
        return Err(Error::NotInvertible);
    }
    let padding = blum_padding(&key.secret, &h, &r)?;
    if sqrt_of_unity_nontrivial(&key.secret).contains(&padding) {
        return Err(Error::FactorLeak);
    }
    let padding_plus_one = (&padding + 1u32) % n;
    if !padding_plus_one.gcd(n).is_one() {
        return Err(Error::FactorLeak);
    }

    let wanted = JacobiClass::of(&padding_plus_one, &key.secret)?;
    let root = sqrt_mod_pq(&(&h * &padding % n), &key.secret)?
        .into_iter()
        .find(|root| root.class == wanted)
        .map(|root| root.value)
        .expect("Blum roots cover every class");
    let witness = canonical_sqrt(&(&padding_plus_one * &root % n), &key.secret)?;

    Ok(Signature::VariantI {
        message: message.clone(),
        padding,
        root,
        witness,
    })
}

/// Accepts iff `T² ≡ (U+1)S` and then `S² ≡ H(m)U (mod N)`.
pub fn verify(public: &PublicKey, sig: &Signature) -> VerifyReport {
    let Signature::VariantI {
        message,
        padding,
        root,
        witness,
    } = sig
    else {
        return VerifyReport::rejected(FailedCheck::KeyMismatch);
    };
    let n = &public.n;
    if !components_in_range(sig, n) {
        return VerifyReport::rejected(FailedCheck::ComponentRange);
    }
    let Ok(h) = apply_redundancy(public.redundancy, message, n) else {
        return VerifyReport::rejected(FailedCheck::MessageEncoding);
    };

    let mut ring = CountingRing::new(n);
    let t_squared = ring.square(witness);
    let shifted = ring.add_small(padding, 1);
    let t_rhs = ring.mul(&shifted, root);
    if t_squared != t_rhs {
        return VerifyReport::from_ring(ring, Some(FailedCheck::WitnessEquation));
    }
    let s_squared = ring.square(root);
    let s_rhs = ring.mul(&h, padding);
    let failed = (s_squared != s_rhs).then_some(FailedCheck::RootEquation);
    VerifyReport::from_ring(ring, failed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{toy_blum, ubig};
    use crate::hashing::Redundancy;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn sig(m: u64, u: u64, s: u64, t: u64) -> Signature {
        Signature::VariantI {
            message: Message::int(m),
            padding: ubig(u),
            root: ubig(s),
            witness: ubig(t),
        }
    }

    #[test]
    fn sign_example() {
        let key = toy_blum(Redundancy::Identity);
        let got = sign_with_factor(&key, &Message::int(3u32), &ubig(2)).unwrap();
        assert_eq!(got, sig(3, 59, 67, 4));
    }

    #[test]
    fn verify_examples() {
        let key = toy_blum(Redundancy::Identity);
        let r = verify(&key.public, &sig(3, 59, 67, 4));
        assert!(r.valid);
        assert_eq!((r.op_counts.squares, r.op_counts.products), (2, 2));
        let r = verify(&key.public, &sig(3, 59, 67, 5));
        assert_eq!(r.failed_check, Some(FailedCheck::WitnessEquation));
        // quartic scaling with w = 2
        assert!(verify(&key.public, &sig(48, 59, 37, 8)).valid);
    }

    #[test]
    fn forbidden_padding_is_never_emitted() {
        let key = toy_blum(Redundancy::Identity);
        let forbidden = sqrt_of_unity_nontrivial(&key.secret);
        // search for an R that lands on a forbidden U and check it is refused
        let mut hit = false;
        for m in 1..77u64 {
            for r in 1..77u64 {
                let Ok(h) = signable_digest(key.public.redundancy, &Message::int(m), key.n())
                else {
                    continue;
                };
                if r % 7 == 0 || r % 11 == 0 {
                    continue;
                }
                let u = blum_padding(&key.secret, &h, &ubig(r)).unwrap();
                if forbidden.contains(&u) {
                    hit = true;
                    assert!(matches!(
                        sign_with_factor(&key, &Message::int(m), &ubig(r)),
                        Err(Error::FactorLeak)
                    ));
                }
            }
        }
        assert!(hit);

        let mut rng = StdRng::seed_from_u64(5);
        for m in 1..77u64 {
            if m % 7 == 0 || m % 11 == 0 {
                continue;
            }
            let s = sign(&key, &Message::int(m), &mut rng).unwrap();
            let Signature::VariantI { padding, .. } = &s else {
                unreachable!()
            };
            assert!(!forbidden.contains(padding));
            assert!(verify(&key.public, &s).valid);
        }
    }
}
