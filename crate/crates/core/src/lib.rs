//! Rabin-type digital signatures over `Z_N`, `N = pq`.
//!
//! The crate covers the classic Rabin signature, a padding-set scheme that
//! works for any pair of primes, two Blum-prime variants that need no public
//! padding set, the Rabin-Williams baseline, a blind signing protocol built on
//! the second Blum variant, and executable forgery and blinding attacks.
//!
//! ```
//! use rabin_core::{gen_keypair, schemes, KeyKind, Message, Redundancy, Scheme};
//! use rand::SeedableRng;
//!
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
//! let key = gen_keypair(KeyKind::Blum, 64, Redundancy::Quadratic, &mut rng);
//! let sig = schemes::sign(Scheme::VariantII, &key, &Message::int(42u32), &mut rng).unwrap();
//! assert!(schemes::verify(&key.public, &sig).valid);
//! ```

pub mod blind;
pub mod cli;
pub mod error;
pub mod forgery;
pub mod format;
pub mod hashing;
pub mod keygen;
pub mod numtheory;
pub mod oracle;
pub mod schemes;

pub use error::{Error, Result};
pub use hashing::{DigestAlg, Message, Redundancy};
pub use keygen::{gen_keypair, KeyKind, PaddingSet, PrivateKey, PublicKey};
pub use numtheory::{JacobiClass, SecretModulus};
pub use schemes::{FailedCheck, OpCounts, Scheme, Signature, VerifyReport};

#[cfg(test)]
pub(crate) mod fixtures {
    use num_bigint::BigUint;

    use crate::hashing::Redundancy;
    use crate::keygen::{padding_set_from, KeyKind, PrivateKey};
    use crate::numtheory::SecretModulus;

    pub fn ubig(x: u64) -> BigUint {
        BigUint::from(x)
    }

    /// p = 7, q = 11.
    pub fn toy_blum(redundancy: Redundancy) -> PrivateKey {
        let secret = SecretModulus::from_primes_unchecked(ubig(7), ubig(11)).unwrap();
        PrivateKey::assemble(KeyKind::Blum, secret, redundancy, None).unwrap()
    }

    /// p = 11, q = 7.
    pub fn toy_rw(redundancy: Redundancy) -> PrivateKey {
        let secret = SecretModulus::from_primes_unchecked(ubig(11), ubig(7)).unwrap();
        PrivateKey::assemble(KeyKind::RabinWilliams, secret, redundancy, None).unwrap()
    }

    /// p = 7, q = 11 with the unrandomised set {58, 2, 3, 24}.
    pub fn toy_general_oracle_set(redundancy: Redundancy) -> PrivateKey {
        let secret = SecretModulus::from_primes_unchecked(ubig(7), ubig(11)).unwrap();
        let one = ubig(1);
        let set = padding_set_from(
            &secret,
            [&ubig(2), &ubig(3)],
            [&ubig(3), &ubig(2)],
            [&one, &one, &one, &one],
        );
        PrivateKey::assemble(KeyKind::General, secret, redundancy, Some(set)).unwrap()
    }
}
