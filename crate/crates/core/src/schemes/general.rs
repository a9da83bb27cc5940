//! The padding-set scheme `[m, u, S]`, valid for any pair of odd primes.

use num_integer::Integer;
use num_traits::One;

use super::{components_in_range, CountingRing, FailedCheck, Signature, VerifyReport};
use crate::error::{Error, Result};
use crate::hashing::{apply_redundancy, signable_digest, Message};
use crate::keygen::{PrivateKey, PublicKey};
use crate::numtheory::{canonical_sqrt, JacobiClass};

/// Picks the padding member whose Jacobi class equals that of `H(m)` and
/// returns the canonical root of `H(m)u`. Deterministic.
pub fn sign(key: &PrivateKey, message: &Message) -> Result<Signature> {
    let padding_set = key
        .public
        .padding
        .as_ref()
        .ok_or(Error::WrongKeyKind("general signing"))?;
    let n = key.n();
    let h = signable_digest(key.public.redundancy, message, n)?;
    let class = JacobiClass::of(&h, &key.secret)?;
    let padding = padding_set.select(class, &key.secret)?.clone();
    let root = canonical_sqrt(&(&h * &padding % n), &key.secret)?;
    debug_assert!(padding.gcd(n).is_one());
    Ok(Signature::General {
        message: message.clone(),
        padding,
        root,
    })
}

/// Accepts iff `u ∈ 𝔘` and `S² ≡ H(m)u (mod N)`.
pub fn verify(public: &PublicKey, sig: &Signature) -> VerifyReport {
    let Signature::General {
        message,
        padding,
        root,
    } = sig
    else {
        return VerifyReport::rejected(FailedCheck::KeyMismatch);
    };
    let Some(padding_set) = public.padding.as_ref() else {
        return VerifyReport::rejected(FailedCheck::KeyMismatch);
    };
    let n = &public.n;
    if !components_in_range(sig, n) {
        return VerifyReport::rejected(FailedCheck::ComponentRange);
    }
    if !padding_set.contains(padding) {
        return VerifyReport::rejected(FailedCheck::Membership);
    }
    let Ok(h) = apply_redundancy(public.redundancy, message, n) else {
        return VerifyReport::rejected(FailedCheck::MessageEncoding);
    };
    let mut ring = CountingRing::new(n);
    let rhs = ring.mul(&h, padding);
    let lhs = ring.square(root);
    let failed = (lhs != rhs).then_some(FailedCheck::RootEquation);
    VerifyReport::from_ring(ring, failed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{toy_general_oracle_set, ubig};
    use crate::hashing::Redundancy;

    fn sig(m: u64, u: u64, s: u64) -> Signature {
        Signature::General {
            message: Message::int(m),
            padding: ubig(u),
            root: ubig(s),
        }
    }

    #[test]
    fn sign_selects_matching_class() {
        let key = toy_general_oracle_set(Redundancy::Identity);
        // (5/7) = -1, (5/11) = +1 picks u = 3; 15 has roots {13, 20, 57, 64}
        let got = sign(&key, &Message::int(5u32)).unwrap();
        assert_eq!(got, sig(5, 3, 13));
        assert!(verify(&key.public, &got).valid);
    }

    #[test]
    fn verify_examples() {
        let key = toy_general_oracle_set(Redundancy::Identity);
        let r = verify(&key.public, &sig(5, 3, 57));
        assert!(r.valid);
        assert_eq!((r.op_counts.squares, r.op_counts.products), (1, 1));
        let r = verify(&key.public, &sig(5, 7, 57));
        assert_eq!(r.failed_check, Some(FailedCheck::Membership));
        // scaled forgery of (5, 3, 57) by r = 2
        assert!(verify(&key.public, &sig(20, 3, 37)).valid);
    }

    #[test]
    fn squares_select_the_residue_class_member() {
        let key = toy_general_oracle_set(Redundancy::Identity);
        for x in [2u64, 3, 4, 5, 6, 8, 9, 10] {
            let m = x * x % 77;
            let got = sign(&key, &Message::int(m)).unwrap();
            let Signature::General { padding, .. } = got else {
                unreachable!()
            };
            assert_eq!(padding, ubig(58));
        }
    }

    #[test]
    fn blum_key_cannot_sign_general() {
        let key = crate::fixtures::toy_blum(Redundancy::Identity);
        assert!(matches!(
            sign(&key, &Message::int(5u32)),
            Err(Error::WrongKeyKind(_))
        ));
        assert_eq!(
            verify(&key.public, &sig(5, 3, 57)).failed_check,
            Some(FailedCheck::KeyMismatch)
        );
    }
}
