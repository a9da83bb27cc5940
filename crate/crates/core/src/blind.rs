//! Blind signing.
//!
//! The hardened protocol runs Variant II on a disguised value `r²H(m)`:
//!
//! 1. the author sends `r²H(m)`,
//! 2. the signer returns `[r²H(m), F = RS, R³]` where `S² = r²H(m)u`,
//! 3. the author publishes `[m, F/r², R³/r³]`, which verifies as Variant II.
//!
//! The naive signer, which hands back a bare square root, is kept here because
//! it is the target of the blinding attack in [`crate::forgery`].

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{CryptoRng, Rng};

use crate::error::{Error, Result};
use crate::hashing::{signable_digest, Message};
use crate::keygen::{PrivateKey, PublicKey};
use crate::numtheory::{mod_inverse, random_unit, sqrt_mod_pq};
use crate::schemes::classic::blum_padding;
use crate::schemes::variant2::{masked_root, power_relation_holds};
use crate::schemes::{require_blum, CountingRing, FailedCheck, Signature, VerifyReport};

/// `[disguised, F, R³]` as returned by the signer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlindSignature {
    pub disguised: BigUint,
    pub masked_root: BigUint,
    pub r_cubed: BigUint,
}

/// `r² H(m) mod N`.
pub fn disguise(message: &Message, r: &BigUint, public: &PublicKey) -> Result<BigUint> {
    let n = &public.n;
    let r = r % n;
    if !r.gcd(n).is_one() {
        return Err(Error::NotInvertible);
    }
    let h = signable_digest(public.redundancy, message, n)?;
    Ok(&r * &r % n * h % n)
}

pub fn blind_sign<R: Rng + CryptoRng + ?Sized>(
    key: &PrivateKey,
    disguised: &BigUint,
    rng: &mut R,
) -> Result<BlindSignature> {
    let r = random_unit(key.n(), rng);
    blind_sign_with_factor(key, disguised, &r)
}

/// Signs a disguised value with a caller-chosen masking factor `R`.
pub fn blind_sign_with_factor(
    key: &PrivateKey,
    disguised: &BigUint,
    r: &BigUint,
) -> Result<BlindSignature> {
    require_blum(key, "blind signing")?;
    let n = key.n();
    let disguised = disguised % n;
    if !disguised.gcd(n).is_one() {
        return Err(Error::FactorLeak);
    }
    let (_, masked_root, r_cubed) = masked_root(&key.secret, &disguised, r)?;
    Ok(BlindSignature {
        disguised,
        masked_root,
        r_cubed,
    })
}

/// Checks `F¹² ≡ (R³)⁴ · disguised⁶` at the same cost as Variant II.
pub fn verify_blind(public: &PublicKey, bsig: &BlindSignature) -> VerifyReport {
    let n = &public.n;
    if [&bsig.disguised, &bsig.masked_root, &bsig.r_cubed]
        .iter()
        .any(|v| *v >= n)
    {
        return VerifyReport::rejected(FailedCheck::ComponentRange);
    }
    let mut ring = CountingRing::new(n);
    let ok = power_relation_holds(&mut ring, &bsig.disguised, &bsig.masked_root, &bsig.r_cubed);
    VerifyReport::from_ring(ring, (!ok).then_some(FailedCheck::PowerEquation))
}

/// `[m, F r⁻², R³ r⁻³]`.
pub fn unblind(
    bsig: &BlindSignature,
    r: &BigUint,
    message: &Message,
    public: &PublicKey,
) -> Result<Signature> {
    let n = &public.n;
    let r_inv = mod_inverse(r, n).ok_or(Error::NotInvertible)?;
    let r_inv2 = &r_inv * &r_inv % n;
    let r_inv3 = &r_inv2 * &r_inv % n;
    Ok(Signature::VariantII {
        message: message.clone(),
        masked_root: &bsig.masked_root * r_inv2 % n,
        r_cubed: &bsig.r_cubed * r_inv3 % n,
    })
}

/// The naive signer: a uniformly random square root of `disguised`.
pub fn naive_blind_sign<R: Rng + ?Sized>(
    key: &PrivateKey,
    disguised: &BigUint,
    rng: &mut R,
) -> Result<BigUint> {
    let roots = sqrt_mod_pq(disguised, &key.secret)?;
    Ok(roots.choose(rng).expect("four roots").value.clone())
}

/// The naive signer with a random padding factor, as in the plain three-step
/// mechanism: returns `(u, S)` with `S² = u · disguised`.
pub fn naive_blind_sign_padded<R: Rng + CryptoRng + ?Sized>(
    key: &PrivateKey,
    disguised: &BigUint,
    rng: &mut R,
) -> Result<(BigUint, BigUint)> {
    require_blum(key, "naive blind signing")?;
    let n = key.n();
    let disguised = disguised % n;
    if !disguised.gcd(n).is_one() {
        return Err(Error::FactorLeak);
    }
    let padding = blum_padding(&key.secret, &disguised, &random_unit(n, rng))?;
    let root = naive_blind_sign(key, &(&disguised * &padding % n), rng)?;
    Ok((padding, root))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TranscriptEntry {
    /// Author to signer.
    Disguised(BigUint),
    /// Signer to author.
    BlindSigned(BlindSignature),
    /// Published by the author.
    Unblinded(Signature),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Stage {
    AwaitingSignature,
    Signed(BlindSignature),
    Finished,
}

/// The author's side of one blind signing run.
///
/// Steps must happen in the order disguise, receive, unblind.
#[derive(Clone, Debug)]
pub struct BlindSession {
    public: PublicKey,
    message: Message,
    blinding: BigUint,
    disguised: BigUint,
    stage: Stage,
    transcript: Vec<TranscriptEntry>,
}

impl BlindSession {
    pub fn start<R: Rng + CryptoRng + ?Sized>(
        public: &PublicKey,
        message: Message,
        rng: &mut R,
    ) -> Result<Self> {
        let r = random_unit(&public.n, rng);
        Self::with_factor(public, message, r)
    }

    pub fn with_factor(public: &PublicKey, message: Message, blinding: BigUint) -> Result<Self> {
        let disguised = disguise(&message, &blinding, public)?;
        Ok(BlindSession {
            public: public.clone(),
            message,
            blinding: blinding % &public.n,
            transcript: vec![TranscriptEntry::Disguised(disguised.clone())],
            disguised,
            stage: Stage::AwaitingSignature,
        })
    }

    pub fn disguised(&self) -> &BigUint {
        &self.disguised
    }

    pub fn blinding_factor(&self) -> &BigUint {
        &self.blinding
    }

    pub fn message(&self) -> &Message {
        &self.message
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// Accepts the signer's reply for this session's disguised value.
    pub fn receive(&mut self, bsig: BlindSignature) -> Result<()> {
        if self.stage != Stage::AwaitingSignature {
            return Err(Error::ProtocolOrder("blind signature already received"));
        }
        if bsig.disguised != self.disguised {
            return Err(Error::ProtocolOrder(
                "blind signature is for another disguised value",
            ));
        }
        self.transcript
            .push(TranscriptEntry::BlindSigned(bsig.clone()));
        self.stage = Stage::Signed(bsig);
        Ok(())
    }

    pub fn unblind(&mut self) -> Result<Signature> {
        let Stage::Signed(bsig) = &self.stage else {
            return Err(Error::ProtocolOrder("nothing to unblind"));
        };
        let sig = unblind(bsig, &self.blinding, &self.message, &self.public)?;
        self.transcript
            .push(TranscriptEntry::Unblinded(sig.clone()));
        self.stage = Stage::Finished;
        Ok(sig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{toy_blum, ubig};
    use crate::hashing::Redundancy;
    use crate::schemes::variant2;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn disguise_examples() {
        let id = toy_blum(Redundancy::Identity);
        let quad = toy_blum(Redundancy::Quadratic);
        let d = |key: &PrivateKey, m: u64, r: u64| {
            disguise(&Message::int(m), &ubig(r), &key.public).unwrap()
        };
        assert_eq!(d(&id, 4, 1), ubig(4));
        assert_eq!(d(&id, 4, 3), ubig(36));
        assert_eq!(d(&quad, 3, 5), ubig(69));
        assert!(matches!(
            disguise(&Message::int(4u32), &ubig(7), &id.public),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn blind_sign_example() {
        let key = toy_blum(Redundancy::Identity);
        let bsig = blind_sign_with_factor(&key, &ubig(36), &ubig(2)).unwrap();
        assert_eq!(
            bsig,
            BlindSignature {
                disguised: ubig(36),
                masked_root: ubig(12),
                r_cubed: ubig(8)
            }
        );
        let report = verify_blind(&key.public, &bsig);
        assert!(report.valid);
        assert_eq!(
            (report.op_counts.squares, report.op_counts.products),
            (7, 3)
        );
        assert!(matches!(
            blind_sign_with_factor(&key, &ubig(14), &ubig(2)),
            Err(Error::FactorLeak)
        ));
    }

    #[test]
    fn unblind_example() {
        let key = toy_blum(Redundancy::Identity);
        let bsig = blind_sign_with_factor(&key, &ubig(36), &ubig(2)).unwrap();
        let sig = unblind(&bsig, &ubig(3), &Message::int(4u32), &key.public).unwrap();
        // 3⁻¹ = 26: F' = 12·26² = 27, R' = 8·26³ = 6 (mod 77)
        assert_eq!(
            sig,
            Signature::VariantII {
                message: Message::int(4u32),
                masked_root: ubig(27),
                r_cubed: ubig(6)
            }
        );
        assert!(variant2::verify(&key.public, &sig).valid);
    }

    #[test]
    fn unit_blinding_is_identity() {
        let key = toy_blum(Redundancy::Identity);
        let bsig = blind_sign_with_factor(&key, &ubig(4), &ubig(3)).unwrap();
        let sig = unblind(&bsig, &BigUint::one(), &Message::int(4u32), &key.public).unwrap();
        assert_eq!(
            sig,
            Signature::VariantII {
                message: Message::int(4u32),
                masked_root: bsig.masked_root,
                r_cubed: bsig.r_cubed
            }
        );
    }

    #[test]
    fn naive_signer_returns_a_root() {
        let key = toy_blum(Redundancy::Identity);
        let mut rng = StdRng::seed_from_u64(9);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..64 {
            let s = naive_blind_sign(&key, &ubig(36), &mut rng).unwrap();
            assert_eq!(&s * &s % 77u32, ubig(36));
            seen.insert(s);
        }
        assert_eq!(seen, [ubig(6), ubig(27), ubig(50), ubig(71)].into());
        assert!(matches!(
            naive_blind_sign(&key, &ubig(3), &mut rng),
            Err(Error::NonResidue)
        ));
    }

    #[test]
    fn naive_padded_signer_output_is_consistent() {
        let key = toy_blum(Redundancy::Identity);
        let mut rng = StdRng::seed_from_u64(2);
        for d in [3u64, 5, 6, 10, 13] {
            let (u, s) = naive_blind_sign_padded(&key, &ubig(d), &mut rng).unwrap();
            assert_eq!(&s * &s % 77u32, u * ubig(d) % 77u32);
        }
    }

    #[test]
    fn session_enforces_order() {
        let key = toy_blum(Redundancy::Quadratic);
        let mut rng = StdRng::seed_from_u64(4);
        let mut session = BlindSession::start(&key.public, Message::int(3u32), &mut rng).unwrap();
        assert!(matches!(session.unblind(), Err(Error::ProtocolOrder(_))));
        let wrong = blind_sign(&key, &ubig(4), &mut rng).unwrap();
        assert!(session.receive(wrong).is_err());
        let bsig = blind_sign(&key, session.disguised(), &mut rng).unwrap();
        session.receive(bsig.clone()).unwrap();
        assert!(session.receive(bsig).is_err());
        let sig = session.unblind().unwrap();
        assert!(variant2::verify(&key.public, &sig).valid);
        assert!(session.unblind().is_err());
        assert_eq!(session.transcript().len(), 3);
        assert!(matches!(
            session.transcript()[0],
            TranscriptEntry::Disguised(_)
        ));
        assert!(matches!(
            session.transcript()[2],
            TranscriptEntry::Unblinded(_)
        ));
    }
}
