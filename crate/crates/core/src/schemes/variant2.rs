//! Blum-prime Variant II: `[m, F, R³]` with `F = RS`.
//!
//! The padding `U = (H/p)ψ1 + (H/q)ψ2` is a square root of unity and never
//! published; verification checks `(R³)⁴ H(m)⁶ = F¹²`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::{CryptoRng, Rng};

use super::{
    components_in_range, require_blum, CountingRing, FailedCheck, Signature, VerifyReport,
};
use crate::error::{Error, Result};
use crate::hashing::{apply_redundancy, signable_digest, Message};
use crate::keygen::{PrivateKey, PublicKey};
use crate::numtheory::{canonical_sqrt, random_unit, JacobiClass, SecretModulus};

/// `(h/p)ψ1 + (h/q)ψ2`.
pub(crate) fn unity_padding(secret: &SecretModulus, h: &BigUint) -> Result<BigUint> {
    Ok(secret.signed_combination(JacobiClass::of(h, secret)?))
}

/// Returns `(S, F, R³)` for a unit `h`.
pub(crate) fn masked_root(
    secret: &SecretModulus,
    h: &BigUint,
    r: &BigUint,
) -> Result<(BigUint, BigUint, BigUint)> {
    let n = &secret.n;
    let r = r % n;
    if !r.gcd(n).is_one() {
        return Err(Error::NotInvertible);
    }
    let padding = unity_padding(secret, h)?;
    let root = canonical_sqrt(&(h * &padding % n), secret)?;
    let masked = &r * &root % n;
    let r_cubed = r.modpow(&BigUint::from(3u32), n);
    Ok((root, masked, r_cubed))
}

pub fn sign<R: Rng + CryptoRng + ?Sized>(
    key: &PrivateKey,
    message: &Message,
    rng: &mut R,
) -> Result<Signature> {
    let r = random_unit(key.n(), rng);
    sign_with_factor(key, message, &r)
}

pub fn sign_with_factor(key: &PrivateKey, message: &Message, r: &BigUint) -> Result<Signature> {
    require_blum(key, "variant II signing")?;
    let h = signable_digest(key.public.redundancy, message, key.n())?;
    let (_, masked_root, r_cubed) = masked_root(&key.secret, &h, r)?;
    Ok(Signature::VariantII {
        message: message.clone(),
        masked_root,
        r_cubed,
    })
}

/// Checks `(R³)⁴ · h⁶ ≡ F¹² (mod N)` with seven squarings and three products.
pub(crate) fn power_relation_holds(
    ring: &mut CountingRing<'_>,
    h: &BigUint,
    masked_root: &BigUint,
    r_cubed: &BigUint,
) -> bool {
    let f2 = ring.square(masked_root);
    let f4 = ring.square(&f2);
    let f8 = ring.square(&f4);
    let f12 = ring.mul(&f8, &f4);

    let r6 = ring.square(r_cubed);
    let r12 = ring.square(&r6);

    let h2 = ring.square(h);
    let h4 = ring.square(&h2);
    let h6 = ring.mul(&h4, &h2);

    ring.mul(&r12, &h6) == f12
}

pub fn verify(public: &PublicKey, sig: &Signature) -> VerifyReport {
    let Signature::VariantII {
        message,
        masked_root,
        r_cubed,
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
    let ok = power_relation_holds(&mut ring, &h, masked_root, r_cubed);
    VerifyReport::from_ring(ring, (!ok).then_some(FailedCheck::PowerEquation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{toy_blum, ubig};
    use crate::hashing::Redundancy;
    use crate::numtheory::sqrt_of_unity_nontrivial;

    fn sig(m: u64, f: u64, r3: u64) -> Signature {
        Signature::VariantII {
            message: Message::int(m),
            masked_root: ubig(f),
            r_cubed: ubig(r3),
        }
    }

    #[test]
    fn sign_examples() {
        let key = toy_blum(Redundancy::Identity);
        assert_eq!(
            sign_with_factor(&key, &Message::int(4u32), &ubig(3)).unwrap(),
            sig(4, 6, 27)
        );
        assert_eq!(
            sign_with_factor(&key, &Message::int(3u32), &ubig(2)).unwrap(),
            sig(3, 10, 8)
        );
    }

    #[test]
    fn verify_examples() {
        let key = toy_blum(Redundancy::Identity);
        let r = verify(&key.public, &sig(4, 6, 27));
        assert!(r.valid);
        assert_eq!((r.op_counts.squares, r.op_counts.products), (7, 3));
        assert!(verify(&key.public, &sig(3, 10, 8)).valid);
        let r = verify(&key.public, &sig(3, 10, 9));
        assert_eq!(r.failed_check, Some(FailedCheck::PowerEquation));
    }

    #[test]
    fn padding_is_a_root_of_unity() {
        let key = toy_blum(Redundancy::Identity);
        let mut seen = std::collections::BTreeSet::new();
        for h in 1..77u64 {
            if h % 7 == 0 || h % 11 == 0 {
                continue;
            }
            let u = unity_padding(&key.secret, &ubig(h)).unwrap();
            assert!((&u * &u % 77u32).is_one());
            seen.insert(u);
        }
        let [a, b] = sqrt_of_unity_nontrivial(&key.secret);
        let expected: std::collections::BTreeSet<_> = [ubig(1), ubig(76), a, b].into();
        assert_eq!(seen, expected);
    }
}
