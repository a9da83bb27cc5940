//! Rabin-Williams `[m, e, f, S]` with `e ∈ {1, -1}`, `f ∈ {1, 2}` and
//! `efS² = H(m)`. Requires one prime ≡ 3 and one ≡ 7 (mod 8).

use num_bigint::BigUint;
use num_traits::One;

use super::{components_in_range, CountingRing, FailedCheck, Signature, VerifyReport};
use crate::error::{Error, Result};
use crate::hashing::{apply_redundancy, signable_digest, Message};
use crate::keygen::{KeyKind, PrivateKey, PublicKey};
use crate::numtheory::{canonical_sqrt, mod_inverse, JacobiClass};

/// The four `(e, f)` pairs as `(e is -1, f)`.
const MULTIPLIERS: [(bool, u32); 4] = [(false, 1), (true, 1), (false, 2), (true, 2)];

pub fn sign(key: &PrivateKey, message: &Message) -> Result<Signature> {
    if key.kind() != KeyKind::RabinWilliams {
        return Err(Error::WrongKeyKind("rabin-williams signing"));
    }
    let n = key.n();
    let h = signable_digest(key.public.redundancy, message, n)?;

    for (negate, f) in MULTIPLIERS {
        let ef = if negate { n - f } else { BigUint::from(f) };
        let ef_inv = mod_inverse(&ef, n).ok_or(Error::NotInvertible)?;
        let target = &h * ef_inv % n;
        if JacobiClass::of(&target, &key.secret)?.is_residue() {
            let root = canonical_sqrt(&target, &key.secret)?;
            let e = if negate { n - 1u32 } else { BigUint::one() };
            return Ok(Signature::RabinWilliams {
                message: message.clone(),
                e,
                f: BigUint::from(f),
                root,
            });
        }
    }
    unreachable!("{{1, -1, 2, -2}} covers every Jacobi class for a 3/7 mod 8 key")
}

/// Accepts iff `e ∈ {1, N-1}`, `f ∈ {1, 2}` and `efS² ≡ H(m) (mod N)`.
pub fn verify(public: &PublicKey, sig: &Signature) -> VerifyReport {
    let Signature::RabinWilliams {
        message,
        e,
        f,
        root,
    } = sig
    else {
        return VerifyReport::rejected(FailedCheck::KeyMismatch);
    };
    let n = &public.n;
    let minus_one = n - 1u32;
    if !(e.is_one() || *e == minus_one) || !(f.is_one() || *f == BigUint::from(2u32)) {
        return VerifyReport::rejected(FailedCheck::MultiplierRange);
    }
    if !components_in_range(sig, n) {
        return VerifyReport::rejected(FailedCheck::ComponentRange);
    }
    let Ok(h) = apply_redundancy(public.redundancy, message, n) else {
        return VerifyReport::rejected(FailedCheck::MessageEncoding);
    };
    let ef = if e.is_one() { f.clone() } else { n - f };
    let mut ring = CountingRing::new(n);
    let s2 = ring.square(root);
    let lhs = ring.mul(&ef, &s2);
    VerifyReport::from_ring(ring, (lhs != h).then_some(FailedCheck::RootEquation))
}
