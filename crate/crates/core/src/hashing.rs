//! Redundancy functions `H: Z_M -> Z_N` applied to messages before signing.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DigestAlg {
    Sha256,
}

impl DigestAlg {
    pub fn name(&self) -> &'static str {
        match self {
            DigestAlg::Sha256 => "sha256",
        }
    }

    pub fn digest(&self, bytes: &[u8]) -> BigUint {
        match self {
            DigestAlg::Sha256 => BigUint::from_bytes_be(&Sha256::digest(bytes)),
        }
    }
}

/// Which redundancy function a public key uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Redundancy {
    /// `H(z) = z`.
    Identity,
    /// `H(z) = z(z + 1)`.
    Quadratic,
    /// A cryptographic digest of the message bytes, reduced mod `N`.
    Digest(DigestAlg),
}

impl fmt::Display for Redundancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Redundancy::Identity => f.write_str("identity"),
            Redundancy::Quadratic => f.write_str("quadratic"),
            Redundancy::Digest(alg) => write!(f, "digest:{}", alg.name()),
        }
    }
}

impl FromStr for Redundancy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "identity" => Ok(Redundancy::Identity),
            "quadratic" => Ok(Redundancy::Quadratic),
            "digest" | "digest:sha256" => Ok(Redundancy::Digest(DigestAlg::Sha256)),
            other => Err(format!("unknown redundancy '{other}'")),
        }
    }
}

/// A message as handed to a signer or verifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    /// An integer message.
    Int(BigUint),
    /// An opaque byte string; only digest redundancy applies.
    Bytes(Vec<u8>),
    /// A digest reference: the unreduced digest value of some byte message.
    Digest(BigUint),
}

impl Message {
    pub fn int(value: impl Into<BigUint>) -> Self {
        Message::Int(value.into())
    }

    pub fn as_int(&self) -> Option<&BigUint> {
        match self {
            Message::Int(m) => Some(m),
            _ => None,
        }
    }

    /// Replaces a byte message by its digest reference; other messages are
    /// returned unchanged.
    pub fn to_reference(&self, alg: DigestAlg) -> Message {
        match self {
            Message::Bytes(b) => Message::Digest(alg.digest(b)),
            other => other.clone(),
        }
    }
}

/// Evaluates `H(m) mod N`.
pub fn apply_redundancy(spec: Redundancy, m: &Message, n: &BigUint) -> Result<BigUint> {
    match (spec, m) {
        (Redundancy::Identity, Message::Int(m)) => Ok(m % n),
        (Redundancy::Quadratic, Message::Int(m)) => {
            let z = m % n;
            Ok(&z * (&z + 1u32) % n)
        }
        (Redundancy::Digest(alg), Message::Int(m)) => Ok(alg.digest(&minimal_be_bytes(m)) % n),
        (Redundancy::Digest(alg), Message::Bytes(b)) => Ok(alg.digest(b) % n),
        (Redundancy::Digest(_), Message::Digest(d)) => Ok(d % n),
        (spec, _) => Err(Error::RedundancyMismatch(spec.to_string())),
    }
}

/// `H(m)`, rejected when it is zero or shares a factor with `N`.
pub fn signable_digest(spec: Redundancy, m: &Message, n: &BigUint) -> Result<BigUint> {
    let h = apply_redundancy(spec, m, n)?;
    if h.is_zero() || !h.gcd(n).is_one() {
        return Err(Error::Unsignable);
    }
    Ok(h)
}

/// Big-endian bytes without leading zeros; zero encodes as the empty string.
pub fn minimal_be_bytes(m: &BigUint) -> Vec<u8> {
    if m.is_zero() {
        Vec::new()
    } else {
        m.to_bytes_be()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n77() -> BigUint {
        BigUint::from(77u32)
    }

    #[test]
    fn examples() {
        let h = |spec, m: u32| apply_redundancy(spec, &Message::int(m), &n77()).unwrap();
        assert_eq!(h(Redundancy::Quadratic, 3), BigUint::from(12u32));
        assert_eq!(h(Redundancy::Identity, 80), BigUint::from(3u32));
        assert_eq!(h(Redundancy::Quadratic, 76), BigUint::zero());
    }

    #[test]
    fn degenerate_outputs_are_unsignable() {
        let n = n77();
        for m in [76u32, 7, 0] {
            assert!(matches!(
                signable_digest(Redundancy::Quadratic, &Message::int(m), &n),
                Err(Error::Unsignable)
            ));
        }
        assert!(signable_digest(Redundancy::Quadratic, &Message::int(3u32), &n).is_ok());
    }

    #[test]
    fn bytes_need_digest() {
        let m = Message::Bytes(b"hello".to_vec());
        assert!(matches!(
            apply_redundancy(Redundancy::Identity, &m, &n77()),
            Err(Error::RedundancyMismatch(_))
        ));
        let direct = apply_redundancy(Redundancy::Digest(DigestAlg::Sha256), &m, &n77()).unwrap();
        let via_ref = apply_redundancy(
            Redundancy::Digest(DigestAlg::Sha256),
            &m.to_reference(DigestAlg::Sha256),
            &n77(),
        )
        .unwrap();
        assert_eq!(direct, via_ref);
    }

    #[test]
    fn digest_of_integer_uses_minimal_bytes() {
        let alg = DigestAlg::Sha256;
        let n = BigUint::one() << 300u32;
        let got = apply_redundancy(Redundancy::Digest(alg), &Message::int(0x0102u32), &n).unwrap();
        assert_eq!(got, alg.digest(&[1, 2]));
        assert_eq!(minimal_be_bytes(&BigUint::zero()), Vec::<u8>::new());
    }

    #[test]
    fn redundancy_text_round_trip() {
        for r in [
            Redundancy::Identity,
            Redundancy::Quadratic,
            Redundancy::Digest(DigestAlg::Sha256),
        ] {
            assert_eq!(r.to_string().parse::<Redundancy>().unwrap(), r);
        }
        assert!("md5".parse::<Redundancy>().is_err());
    }

    proptest! {
        #[test]
        fn quadratic_is_not_pseudo_homogeneous(m in 2u64..1_000_000, lambda in 2u64..1_000_000) {
            // 1000003 * 1000033: large enough that collisions are negligible
            let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64);
            let lam = BigUint::from(lambda);
            let lam2 = &lam * &lam % &n;
            prop_assume!(lam2 != BigUint::one());
            let scaled = Message::Int(&lam2 * BigUint::from(m) % &n);
            let lhs = apply_redundancy(Redundancy::Quadratic, &scaled, &n).unwrap();
            let rhs = &lam2 * apply_redundancy(Redundancy::Quadratic, &Message::int(m), &n).unwrap() % &n;
            prop_assert_ne!(lhs, rhs);
        }

        #[test]
        fn redundancy_is_deterministic(m in any::<u64>()) {
            let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64);
            for spec in [Redundancy::Identity, Redundancy::Quadratic, Redundancy::Digest(DigestAlg::Sha256)] {
                let a = apply_redundancy(spec, &Message::int(m), &n).unwrap();
                let b = apply_redundancy(spec, &Message::int(m), &n).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
