//! The classic Rabin signature `[m, U, S]`. Kept for comparison: any holder of
//! a signature can re-pad it onto an arbitrary message (see `forgery`).

use num_bigint::BigUint;
use rand::{CryptoRng, Rng};

use super::{
    components_in_range, require_blum, CountingRing, FailedCheck, Signature, VerifyReport,
};
use crate::error::{Error, Result};
use crate::hashing::{apply_redundancy, signable_digest, Message};
use crate::keygen::{PrivateKey, PublicKey};
use crate::numtheory::{canonical_sqrt, random_unit, JacobiClass, SecretModulus};

/// `R²(f1ψ1 + f2ψ2)` where `(f1, f2)` is the Jacobi class of `h`.
pub(crate) fn blum_padding(secret: &SecretModulus, h: &BigUint, r: &BigUint) -> Result<BigUint> {
    let class = JacobiClass::of(h, secret)?;
    let n = &secret.n;
    Ok(r * r % n * secret.signed_combination(class) % n)
}

pub fn sign<R: Rng + CryptoRng + ?Sized>(
    key: &PrivateKey,
    message: &Message,
    rng: &mut R,
) -> Result<Signature> {
    let r = random_unit(key.n(), rng);
    sign_with_factor(key, message, &r)
}

/// Signs with a caller-chosen padding factor `R`.
pub fn sign_with_factor(key: &PrivateKey, message: &Message, r: &BigUint) -> Result<Signature> {
    require_blum(key, "classic signing")?;
    let n = key.n();
    let h = signable_digest(key.public.redundancy, message, n)?;
    let r = r % n;
    if num_integer::Integer::gcd(&r, n) != BigUint::from(1u32) {
        return Err(Error::NotInvertible);
    }
    let padding = blum_padding(&key.secret, &h, &r)?;
    let root = canonical_sqrt(&(&h * &padding % n), &key.secret)?;
    Ok(Signature::Classic {
        message: message.clone(),
        padding,
        root,
    })
}

/// Accepts iff `S² ≡ H(m)U (mod N)`.
pub fn verify(public: &PublicKey, sig: &Signature) -> VerifyReport {
    let Signature::Classic {
        message,
        padding,
        root,
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
    let lhs = ring.square(root);
    let rhs = ring.mul(&h, padding);
    let failed = (lhs != rhs).then_some(FailedCheck::RootEquation);
    VerifyReport::from_ring(ring, failed)
}
